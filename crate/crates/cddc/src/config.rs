//! Run configuration: a TOML file merged with command-line overrides.
//!
//! Every key is optional. Missing keys fall back to the experimental
//! defaults of [`SourceConfig`]; a missing temperature is fitted so that the
//! CDDC pump wavelength matches `pump_nm`.
//!
//! ```toml
//! crystal = "ktp.toml"        # relative to this file; bundled KTP if absent
//! poling_um = 63.1
//! length_mm = 10.0
//! temp_c = 68.9
//! temp_window = [30.0, 90.0]
//! pump_nm = 532.3
//! pump_sigma_nm = 0.01
//! pump_pol = "H"
//! order = 1
//! weights = [1.0, 1.0]
//! theta = 0.0
//! grid_points = 512
//! span_fwhms = 5.0
//! pump_window = [450.0, 650.0]
//!
//! [filter]
//! center_nm = 1297.6          # centred on the red photon if absent
//! fwhm_nm = 0.9
//! shape = "gaussian"          # or "rectangular"
//! arm = "red"                 # or "blue"
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use cddc_core::dispersion::{DispersionModel, Polarization};
use cddc_core::search::{match_temperature, CddcSolution, SearchSetup};
use cddc_core::source::SourceConfig;
use cddc_core::spectra::{BandpassFilter, FilterShape, SpectrumAxis};
use serde::Deserialize;

use crate::crystal::load_crystal;
use crate::error::{CliError, Result};

pub const DEFAULT_TEMP_WINDOW: (f64, f64) = (30.0, 90.0);

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    Blue,
    Red,
}

impl Arm {
    /// Grid axis carrying this arm's photon. The blue photon always sits
    /// on the signal axis.
    pub fn axis(self) -> SpectrumAxis {
        match self {
            Arm::Blue => SpectrumAxis::Signal,
            Arm::Red => SpectrumAxis::Idler,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    /// `None` centres the filter on the arm's photon.
    #[serde(default)]
    pub center_nm: Option<f64>,
    pub fwhm_nm: f64,
    #[serde(default = "default_shape", deserialize_with = "de_shape")]
    pub shape: FilterShape,
    #[serde(default = "default_arm")]
    pub arm: Arm,
}

fn default_shape() -> FilterShape {
    FilterShape::Gaussian
}

fn default_arm() -> Arm {
    Arm::Red
}

fn de_shape<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<FilterShape, D::Error> {
    let s = String::deserialize(d)?;
    parse_shape(&s).map_err(serde::de::Error::custom)
}

fn parse_shape(s: &str) -> std::result::Result<FilterShape, String> {
    match s.to_ascii_lowercase().as_str() {
        "gaussian" => Ok(FilterShape::Gaussian),
        "rectangular" | "rect" => Ok(FilterShape::Rectangular),
        other => Err(format!("unknown filter shape `{other}`")),
    }
}

/// `CENTER:FWHM[:SHAPE[:ARM]]` with `auto` as centre, or just `FWHM`.
impl FromStr for FilterSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number `{t}` in filter"))
        };
        let (center_nm, rest) = match parts.as_slice() {
            [w] => {
                return Ok(FilterSpec {
                    center_nm: None,
                    fwhm_nm: num(w)?,
                    shape: default_shape(),
                    arm: default_arm(),
                })
            }
            [c, rest @ ..] if c.eq_ignore_ascii_case("auto") => (None, rest),
            [c, rest @ ..] => (Some(num(c)?), rest),
            [] => unreachable!(),
        };
        let fwhm_nm = num(rest.first().ok_or("filter needs a width")?)?;
        let shape = rest
            .get(1)
            .map(|t| parse_shape(t))
            .transpose()?
            .unwrap_or_else(default_shape);
        let arm = match rest.get(2).map(|t| t.to_ascii_lowercase()) {
            None => default_arm(),
            Some(t) if t == "red" => Arm::Red,
            Some(t) if t == "blue" => Arm::Blue,
            Some(t) => return Err(format!("unknown filter arm `{t}`")),
        };
        if rest.len() > 3 {
            return Err("too many fields in filter".into());
        }
        Ok(FilterSpec {
            center_nm,
            fwhm_nm,
            shape,
            arm,
        })
    }
}

/// Contents of a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub crystal: Option<PathBuf>,
    pub poling_um: Option<f64>,
    pub length_mm: Option<f64>,
    pub temp_c: Option<f64>,
    pub temp_window: Option<(f64, f64)>,
    pub pump_nm: Option<f64>,
    pub pump_sigma_nm: Option<f64>,
    pub pump_pol: Option<String>,
    pub order: Option<u32>,
    pub weights: Option<(f64, f64)>,
    pub theta: Option<f64>,
    pub grid_points: Option<usize>,
    pub span_fwhms: Option<f64>,
    pub pump_window: Option<(f64, f64)>,
    pub filter: Option<FilterSpec>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::parse(path, e.message()))?;
        // Crystal paths are relative to the configuration file.
        if let (Some(c), Some(dir)) = (&cfg.crystal, path.parent()) {
            if c.is_relative() {
                cfg.crystal = Some(dir.join(c));
            }
        }
        Ok(cfg)
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overridden_by(self, other: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            crystal,
            poling_um,
            length_mm,
            temp_c,
            temp_window,
            pump_nm,
            pump_sigma_nm,
            pump_pol,
            order,
            weights,
            theta,
            grid_points,
            span_fwhms,
            pump_window,
            filter
        )
    }

    pub fn model(&self) -> Result<DispersionModel> {
        load_crystal(self.crystal.as_deref())
    }

    pub fn search_setup(&self) -> Result<SearchSetup> {
        let mut setup = SearchSetup {
            order_abs: self.order.unwrap_or(1),
            pump_pol: self.pump_pol()?,
            ..SearchSetup::default()
        };
        if let Some((lo, hi)) = self.pump_window {
            setup = setup.with_pump_window(lo, hi);
        }
        Ok(setup)
    }

    fn pump_pol(&self) -> Result<Polarization> {
        match &self.pump_pol {
            None => Ok(Polarization::H),
            Some(p) => p
                .parse()
                .map_err(|e: cddc_core::Error| CliError::Usage(e.to_string())),
        }
    }

    pub fn temp_window(&self) -> (f64, f64) {
        self.temp_window.unwrap_or(DEFAULT_TEMP_WINDOW)
    }

    /// Source settings with the temperature still to be resolved.
    fn base_source(&self) -> Result<SourceConfig> {
        let d = SourceConfig::default();
        let cfg = SourceConfig {
            poling_um: self.poling_um.unwrap_or(d.poling_um),
            length_mm: self.length_mm.unwrap_or(d.length_mm),
            temp_c: self.temp_c.unwrap_or(d.temp_c),
            pump_nm: self.pump_nm.unwrap_or(d.pump_nm),
            pump_sigma_nm: self.pump_sigma_nm.unwrap_or(d.pump_sigma_nm),
            pump_pol: self.pump_pol()?,
            order_abs: self.order.unwrap_or(d.order_abs),
            weights: self.weights.unwrap_or(d.weights),
            theta: self.theta.unwrap_or(d.theta),
            grid_points: self.grid_points.unwrap_or(d.grid_points),
            span_fwhms: self.span_fwhms.unwrap_or(d.span_fwhms),
            ..d
        };
        for (name, v) in [
            ("poling period", cfg.poling_um),
            ("crystal length", cfg.length_mm),
            ("pump wavelength", cfg.pump_nm),
            ("pump width", cfg.pump_sigma_nm),
            ("grid span", cfg.span_fwhms),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Core(cddc_core::Error::Domain(format!(
                    "{name} must be positive"
                ))));
            }
        }
        Ok(cfg)
    }

    /// Fixes the operating point: the configured temperature, or the one
    /// whose CDDC pump wavelength best matches the configured pump.
    pub fn operating_point(&self, model: &DispersionModel) -> Result<OperatingPoint> {
        let mut source = self.base_source()?;
        let setup = self.search_setup()?;
        let solution = match self.temp_c {
            Some(_) => None,
            None => {
                let (t, sol) = match_temperature(
                    model,
                    source.poling_um,
                    source.pump_nm,
                    self.temp_window(),
                    &setup,
                )?
                .ok_or_else(|| {
                    CliError::NoSolution(format!(
                        "no CDDC point for a {} µm period between {} and {} °C",
                        source.poling_um,
                        self.temp_window().0,
                        self.temp_window().1
                    ))
                })?;
                source.temp_c = t;
                source.plus_blue_pol = sol.plus_blue_pol;
                Some(sol)
            }
        };
        Ok(OperatingPoint {
            source,
            fitted: solution,
        })
    }
}

/// Resolved settings for the spectral commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub source: SourceConfig,
    /// The CDDC solution used to fit the temperature, if it was fitted.
    pub fitted: Option<CddcSolution>,
}

impl OperatingPoint {
    /// Attaches a filter, centring it on `photon_nm` when no centre is set.
    pub fn with_filter(
        mut self,
        spec: Option<FilterSpec>,
        blue_nm: f64,
        red_nm: f64,
    ) -> Result<Self> {
        self.source.filter = spec
            .map(|f| {
                let center = f.center_nm.unwrap_or(match f.arm {
                    Arm::Blue => blue_nm,
                    Arm::Red => red_nm,
                });
                BandpassFilter::new(center, f.fwhm_nm, f.shape).map(|b| (b, f.arm.axis()))
            })
            .transpose()?;
        Ok(self)
    }
}
