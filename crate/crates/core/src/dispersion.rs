//! Temperature dependent refractive index of a biaxial crystal.
//!
//! Light propagates along the crystal x-axis, so only the y and z indices
//! are ever needed. Horizontal polarisation sees the y index and vertical
//! polarisation the z index (see [`HORIZONTAL_AXIS`]).
//!
//! Each axis carries a Sellmeier law for the index at a reference
//! temperature plus a thermo-optic correction that is a polynomial in
//! `ΔT = T - T_ref` whose coefficients are polynomials in `1/λ` (λ in µm).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{config, Error, Result};
#[allow(unused_imports)] // needed for float methods under no_std
use crate::math::Float;
use crate::C_MM_PER_PS;

/// Crystal axis seen by a collinear x-propagating beam.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpticalAxis {
    Y,
    Z,
}

impl fmt::Display for OpticalAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpticalAxis::Y => f.write_str("Y"),
            OpticalAxis::Z => f.write_str("Z"),
        }
    }
}

impl core::str::FromStr for OpticalAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Y" | "y" => Ok(OpticalAxis::Y),
            "Z" | "z" => Ok(OpticalAxis::Z),
            other => Err(config(alloc::format!("unknown optical axis `{other}`"))),
        }
    }
}

/// Linear polarisation in the lab frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
}

/// Axis probed by horizontally polarised light for x-propagation.
pub const HORIZONTAL_AXIS: OpticalAxis = OpticalAxis::Y;

impl Polarization {
    pub const fn axis(self) -> OpticalAxis {
        match (self, HORIZONTAL_AXIS) {
            (Polarization::H, axis) => axis,
            (Polarization::V, OpticalAxis::Y) => OpticalAxis::Z,
            (Polarization::V, OpticalAxis::Z) => OpticalAxis::Y,
        }
    }

    pub const fn orthogonal(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::H => f.write_str("H"),
            Polarization::V => f.write_str("V"),
        }
    }
}

impl core::str::FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" | "h" => Ok(Polarization::H),
            "V" | "v" => Ok(Polarization::V),
            other => Err(config(alloc::format!("unknown polarisation `{other}`"))),
        }
    }
}

/// Functional form of the Sellmeier law, λ in µm.
#[derive(Debug, Clone, PartialEq)]
pub enum SellmeierForm {
    /// `n² = A + B/(1 - C/λ²) - D·λ²`
    OnePole([f64; 4]),
    /// `n² = A + B/(1 - C/λ²) + D/(1 - E/λ²) - F·λ²`
    TwoPole([f64; 6]),
    /// `n² = A + B/(λ² - C) + D/(λ² - E)`
    ShiftedTwoPole([f64; 5]),
}

impl SellmeierForm {
    /// Identifiers accepted by [`SellmeierForm::from_id`].
    pub const IDS: [&'static str; 3] = ["one-pole", "two-pole", "shifted-two-pole"];

    pub fn from_id(id: &str, coefficients: &[f64]) -> Result<Self> {
        fn take<const N: usize>(id: &str, c: &[f64]) -> Result<[f64; N]> {
            c.try_into().map_err(|_| {
                config(alloc::format!(
                    "form `{id}` expects {N} coefficients, got {}",
                    c.len()
                ))
            })
        }
        match id {
            "one-pole" => Ok(SellmeierForm::OnePole(take(id, coefficients)?)),
            "two-pole" => Ok(SellmeierForm::TwoPole(take(id, coefficients)?)),
            "shifted-two-pole" => Ok(SellmeierForm::ShiftedTwoPole(take(id, coefficients)?)),
            other => Err(config(alloc::format!("unknown Sellmeier form `{other}`"))),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            SellmeierForm::OnePole(_) => "one-pole",
            SellmeierForm::TwoPole(_) => "two-pole",
            SellmeierForm::ShiftedTwoPole(_) => "shifted-two-pole",
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        match self {
            SellmeierForm::OnePole(c) => c,
            SellmeierForm::TwoPole(c) => c,
            SellmeierForm::ShiftedTwoPole(c) => c,
        }
    }

    /// Squared index at wavelength `um` (µm).
    fn n_squared(&self, um: f64) -> f64 {
        let l2 = um * um;
        match *self {
            SellmeierForm::OnePole([a, b, c, d]) => a + b / (1.0 - c / l2) - d * l2,
            SellmeierForm::TwoPole([a, b, c, d, e, f]) => {
                a + b / (1.0 - c / l2) + d / (1.0 - e / l2) - f * l2
            }
            SellmeierForm::ShiftedTwoPole([a, b, c, d, e]) => a + b / (l2 - c) + d / (l2 - e),
        }
    }
}

/// Thermo-optic correction `Δn(λ, T)`.
///
/// Coefficient polynomials are evaluated as `Σ_k a_k / λ^k` with λ in µm.
#[derive(Debug, Clone, PartialEq)]
pub enum ThermoOptic {
    None,
    /// `Δn = n1(λ)·ΔT`
    Linear {
        n1: Vec<f64>,
    },
    /// `Δn = n1(λ)·ΔT + n2(λ)·ΔT²`
    Quadratic {
        n1: Vec<f64>,
        n2: Vec<f64>,
    },
}

impl ThermoOptic {
    pub const IDS: [&'static str; 3] = ["none", "linear", "quadratic"];

    /// Builds the correction from its identifier. For `quadratic` the
    /// coefficient list holds the `n1` polynomial followed by the `n2`
    /// polynomial, both of equal length.
    pub fn from_id(id: &str, coefficients: &[f64]) -> Result<Self> {
        match id {
            "none" if coefficients.is_empty() => Ok(ThermoOptic::None),
            "none" => Err(config("thermo form `none` takes no coefficients")),
            "linear" if !coefficients.is_empty() => Ok(ThermoOptic::Linear {
                n1: coefficients.to_vec(),
            }),
            "quadratic" if !coefficients.is_empty() && coefficients.len().is_multiple_of(2) => {
                let (n1, n2) = coefficients.split_at(coefficients.len() / 2);
                Ok(ThermoOptic::Quadratic {
                    n1: n1.to_vec(),
                    n2: n2.to_vec(),
                })
            }
            "linear" | "quadratic" => Err(config(alloc::format!(
                "thermo form `{id}` got an invalid coefficient count ({})",
                coefficients.len()
            ))),
            other => Err(config(alloc::format!(
                "unknown thermo-optic form `{other}`"
            ))),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            ThermoOptic::None => "none",
            ThermoOptic::Linear { .. } => "linear",
            ThermoOptic::Quadratic { .. } => "quadratic",
        }
    }

    fn delta_n(&self, um: f64, delta_t: f64) -> f64 {
        fn poly(coeffs: &[f64], um: f64) -> f64 {
            let inv = 1.0 / um;
            coeffs.iter().rev().fold(0.0, |acc, &a| acc * inv + a)
        }
        match self {
            ThermoOptic::None => 0.0,
            ThermoOptic::Linear { n1 } => poly(n1, um) * delta_t,
            ThermoOptic::Quadratic { n1, n2 } => {
                poly(n1, um) * delta_t + poly(n2, um) * delta_t * delta_t
            }
        }
    }
}

/// Index law for one optical axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SellmeierSet {
    pub axis: OpticalAxis,
    pub form: SellmeierForm,
    pub thermo: ThermoOptic,
    pub t_ref_c: f64,
    pub lambda_min_nm: f64,
    pub lambda_max_nm: f64,
}

impl SellmeierSet {
    fn check_range(&self, lambda_nm: f64) -> Result<()> {
        if lambda_nm >= self.lambda_min_nm && lambda_nm <= self.lambda_max_nm {
            Ok(())
        } else {
            Err(self.range_error(lambda_nm))
        }
    }

    fn range_error(&self, lambda_nm: f64) -> Error {
        Error::OutOfRange {
            axis: self.axis,
            lambda_nm,
            min_nm: self.lambda_min_nm,
            max_nm: self.lambda_max_nm,
        }
    }

    /// Sellmeier value without thermal correction.
    pub fn base_index(&self, lambda_nm: f64) -> Result<f64> {
        self.check_range(lambda_nm)?;
        Ok(self.form.n_squared(lambda_nm * 1e-3).sqrt())
    }

    pub fn index(&self, lambda_nm: f64, temp_c: f64) -> Result<f64> {
        self.check_range(lambda_nm)?;
        Ok(self.index_unchecked(lambda_nm, temp_c))
    }

    fn index_unchecked(&self, lambda_nm: f64, temp_c: f64) -> f64 {
        let um = lambda_nm * 1e-3;
        let dt = temp_c - self.t_ref_c;
        let base = self.form.n_squared(um).sqrt();
        if dt == 0.0 {
            base
        } else {
            base + self.thermo.delta_n(um, dt)
        }
    }

    fn central_difference(&self, lambda_nm: f64, temp_c: f64, h: f64) -> f64 {
        (self.index_unchecked(lambda_nm + h, temp_c) - self.index_unchecked(lambda_nm - h, temp_c))
            / (2.0 * h)
    }
}

/// Initial finite-difference step for dn/dλ, in nm.
pub const DERIVATIVE_STEP_NM: f64 = 0.1;
/// Agreement required between successive step-halved estimates of λ·dn/dλ.
pub const DERIVATIVE_TOL: f64 = 1e-9;
const MAX_HALVINGS: usize = 20;

/// Refractive index model of one crystal: a [`SellmeierSet`] per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionModel {
    crystal: String,
    y: SellmeierSet,
    z: SellmeierSet,
}

impl DispersionModel {
    /// Builds a model from exactly one set per axis.
    pub fn new(crystal: impl Into<String>, sets: Vec<SellmeierSet>) -> Result<Self> {
        let mut y = None;
        let mut z = None;
        for set in sets {
            let slot = match set.axis {
                OpticalAxis::Y => &mut y,
                OpticalAxis::Z => &mut z,
            };
            if slot.is_some() {
                return Err(config(alloc::format!("duplicate {} axis", set.axis)));
            }
            *slot = Some(set);
        }
        let (Some(y), Some(z)) = (y, z) else {
            return Err(config("both the Y and Z axis must be present"));
        };
        for set in [&y, &z] {
            if !(set.lambda_min_nm > 0.0 && set.lambda_min_nm < set.lambda_max_nm) {
                return Err(config(alloc::format!(
                    "{} axis has an empty valid range",
                    set.axis
                )));
            }
            if set.lambda_max_nm < 400.0 || set.lambda_min_nm > 1600.0 {
                return Err(config(alloc::format!(
                    "{} axis range does not overlap 400-1600 nm",
                    set.axis
                )));
            }
            let n = 256;
            for k in 0..=n {
                let l = set.lambda_min_nm
                    + (set.lambda_max_nm - set.lambda_min_nm) * k as f64 / n as f64;
                let v = set.form.n_squared(l * 1e-3);
                if !(v > 1.0) {
                    return Err(config(alloc::format!(
                        "{} axis index is not above 1 at {l} nm",
                        set.axis
                    )));
                }
            }
        }
        Ok(Self {
            crystal: crystal.into(),
            y,
            z,
        })
    }

    /// Dispersion-free model with the same index on both axes.
    pub fn constant(n: f64) -> Self {
        let set = |axis| SellmeierSet {
            axis,
            form: SellmeierForm::OnePole([n * n, 0.0, 0.0, 0.0]),
            thermo: ThermoOptic::None,
            t_ref_c: 25.0,
            lambda_min_nm: 100.0,
            lambda_max_nm: 10_000.0,
        };
        Self {
            crystal: String::from("constant"),
            y: set(OpticalAxis::Y),
            z: set(OpticalAxis::Z),
        }
    }

    pub fn crystal(&self) -> &str {
        &self.crystal
    }

    pub fn set(&self, axis: OpticalAxis) -> &SellmeierSet {
        match axis {
            OpticalAxis::Y => &self.y,
            OpticalAxis::Z => &self.z,
        }
    }

    /// Common wavelength range over which both axes are valid.
    pub fn common_range_nm(&self) -> (f64, f64) {
        (
            self.y.lambda_min_nm.max(self.z.lambda_min_nm),
            self.y.lambda_max_nm.min(self.z.lambda_max_nm),
        )
    }

    pub fn refractive_index(&self, axis: OpticalAxis, lambda_nm: f64, temp_c: f64) -> Result<f64> {
        self.set(axis).index(lambda_nm, temp_c)
    }

    /// dn/dλ in 1/nm from an adaptive central difference.
    pub fn index_derivative(&self, axis: OpticalAxis, lambda_nm: f64, temp_c: f64) -> Result<f64> {
        let set = self.set(axis);
        let mut h = DERIVATIVE_STEP_NM;
        if lambda_nm - h < set.lambda_min_nm || lambda_nm + h > set.lambda_max_nm {
            return Err(set.range_error(lambda_nm));
        }
        let mut prev = set.central_difference(lambda_nm, temp_c, h);
        for _ in 0..MAX_HALVINGS {
            h *= 0.5;
            let est = set.central_difference(lambda_nm, temp_c, h);
            if (est - prev).abs() * lambda_nm <= DERIVATIVE_TOL {
                return Ok(est);
            }
            prev = est;
        }
        Ok(prev)
    }

    /// dn/dλ from a single central difference with step `h_nm`.
    pub fn index_derivative_fixed(
        &self,
        axis: OpticalAxis,
        lambda_nm: f64,
        temp_c: f64,
        h_nm: f64,
    ) -> Result<f64> {
        let set = self.set(axis);
        set.check_range(lambda_nm - h_nm)?;
        set.check_range(lambda_nm + h_nm)?;
        Ok(set.central_difference(lambda_nm, temp_c, h_nm))
    }

    /// Group index `n_g = n - λ·dn/dλ`.
    pub fn group_index(&self, axis: OpticalAxis, lambda_nm: f64, temp_c: f64) -> Result<f64> {
        let d = self.index_derivative(axis, lambda_nm, temp_c)?;
        let n = self.refractive_index(axis, lambda_nm, temp_c)?;
        Ok(n - lambda_nm * d)
    }

    /// Group delay in ps/mm.
    pub fn group_delay_per_mm(
        &self,
        axis: OpticalAxis,
        lambda_nm: f64,
        temp_c: f64,
    ) -> Result<f64> {
        Ok(self.group_index(axis, lambda_nm, temp_c)? / C_MM_PER_PS)
    }
}
