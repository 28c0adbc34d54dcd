//! Crystal coefficient files.
//!
//! One TOML document per crystal with an `[[axis]]` table for each optical
//! axis. See `data/ktp.toml` for the bundled example and the supported form
//! identifiers.

use std::path::Path;

use cddc_core::dispersion::{
    DispersionModel, OpticalAxis, SellmeierForm, SellmeierSet, ThermoOptic,
};
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Coefficient file shipped with the binary.
pub const BUNDLED_KTP: &str = include_str!("../data/ktp.toml");
pub const BUNDLED_NAME: &str = "<bundled ktp.toml>";

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CrystalFile {
    format_version: u32,
    crystal: String,
    axis: Vec<AxisEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisEntry {
    axis: String,
    form: String,
    coefficients: Vec<f64>,
    thermo_form: String,
    #[serde(default)]
    thermo_coefficients: Vec<f64>,
    t_ref_c: f64,
    lambda_min_nm: f64,
    lambda_max_nm: f64,
}

impl AxisEntry {
    fn into_set(self) -> cddc_core::Result<SellmeierSet> {
        Ok(SellmeierSet {
            axis: self.axis.parse::<OpticalAxis>()?,
            form: SellmeierForm::from_id(&self.form, &self.coefficients)?,
            thermo: ThermoOptic::from_id(&self.thermo_form, &self.thermo_coefficients)?,
            t_ref_c: self.t_ref_c,
            lambda_min_nm: self.lambda_min_nm,
            lambda_max_nm: self.lambda_max_nm,
        })
    }
}

/// Parses a coefficient document; `origin` only labels error messages.
pub fn parse_crystal(text: &str, origin: &Path) -> Result<DispersionModel> {
    let file: CrystalFile =
        toml::from_str(text).map_err(|e| CliError::parse(origin, e.message()))?;
    if file.format_version != FORMAT_VERSION {
        return Err(CliError::parse(
            origin,
            format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                file.format_version
            ),
        ));
    }
    let model = file
        .axis
        .into_iter()
        .map(AxisEntry::into_set)
        .collect::<cddc_core::Result<Vec<_>>>()
        .and_then(|sets| DispersionModel::new(file.crystal, sets))
        .map_err(|e| CliError::parse(origin, e))?;
    Ok(model)
}

/// Loads `path`, or the bundled KTP data when `path` is `None`.
pub fn load_crystal(path: Option<&Path>) -> Result<DispersionModel> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            parse_crystal(&text, p)
        }
        None => parse_crystal(BUNDLED_KTP, Path::new(BUNDLED_NAME)),
    }
}
