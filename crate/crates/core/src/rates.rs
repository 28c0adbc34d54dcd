//! Count-rate arithmetic.
//!
//! Measured singles and coincidences are the pair rate attenuated by the
//! coupling efficiency `µ` and the detector efficiency `η` of each arm:
//!
//! ```text
//! SR_B = PR·µ_B·η_B     SR_R = PR·µ_R·η_R     CR = PR·µ_B·µ_R·η_B·η_R
//! ```

use crate::error::{domain, Error, Result};

/// How the rates of a [`CountRecord`] are normalised to pump power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpPower {
    /// Rates are absolute counts/s at this pump power in mW.
    Absolute(f64),
    /// Rates are already given per mW of pump power.
    PerMilliwatt,
}

impl PumpPower {
    pub fn milliwatts(self) -> f64 {
        match self {
            PumpPower::Absolute(p) => p,
            PumpPower::PerMilliwatt => 1.0,
        }
    }
}

/// Measured rates for one source setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountRecord {
    pub singles_blue: f64,
    pub singles_red: f64,
    pub coincidences: f64,
    pub eta_blue: f64,
    pub eta_red: f64,
    pub power: PumpPower,
}

impl CountRecord {
    pub fn new(
        singles_blue: f64,
        singles_red: f64,
        coincidences: f64,
        eta_blue: f64,
        eta_red: f64,
        power: PumpPower,
    ) -> Result<Self> {
        let rec = Self {
            singles_blue,
            singles_red,
            coincidences,
            eta_blue,
            eta_red,
            power,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [self.singles_blue, self.singles_red, self.coincidences];
        if rates.iter().any(|r| !(*r >= 0.0)) {
            return Err(inconsistent("rates must be non-negative"));
        }
        if self.coincidences > self.singles_blue.min(self.singles_red) {
            return Err(inconsistent("coincidences exceed a singles rate"));
        }
        for eta in [self.eta_blue, self.eta_red] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(inconsistent("detector efficiency must lie in (0, 1]"));
            }
        }
        if let PumpPower::Absolute(p) = self.power {
            if !(p > 0.0) {
                return Err(domain("pump power must be positive"));
            }
        }
        Ok(())
    }
}

fn inconsistent(msg: &str) -> Error {
    Error::InconsistentRecord(msg.into())
}

/// `PR = SR_B·SR_R/CR` in the record's units.
pub fn pair_rate(rec: &CountRecord) -> Result<f64> {
    if !(rec.coincidences > 0.0) {
        return Err(Error::UndefinedRate("no coincidences recorded".into()));
    }
    Ok(rec.singles_blue * rec.singles_red / rec.coincidences)
}

/// `(µ_B, µ_R) = (CR/(η_B·SR_R), CR/(η_R·SR_B))`.
pub fn coupling_efficiencies(rec: &CountRecord) -> Result<(f64, f64)> {
    if !(rec.singles_blue > 0.0 && rec.singles_red > 0.0) {
        return Err(Error::UndefinedRate(
            "singles rates must be positive".into(),
        ));
    }
    let mu_b = rec.coincidences / (rec.eta_blue * rec.singles_red);
    let mu_r = rec.coincidences / (rec.eta_red * rec.singles_blue);
    if mu_b > 1.0 || mu_r > 1.0 {
        return Err(inconsistent(
            "coupling efficiency above 1; check detector efficiencies or rates",
        ));
    }
    Ok((mu_b, mu_r))
}

/// Heralding efficiency of one arm under both common definitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Heralding {
    /// `CR / SR_herald`.
    pub raw: f64,
    /// `CR / (SR_herald·η_heralded)`, detector loss of the heralded arm removed.
    pub detector_corrected: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arm {
    Blue,
    Red,
}

/// Probability that a detection in the other arm heralds a photon in `arm`.
pub fn heralding_efficiency(rec: &CountRecord, arm: Arm) -> Result<Heralding> {
    let (herald_singles, eta) = match arm {
        Arm::Red => (rec.singles_blue, rec.eta_red),
        Arm::Blue => (rec.singles_red, rec.eta_blue),
    };
    if !(herald_singles > 0.0) {
        return Err(Error::UndefinedRate("heralding arm has no singles".into()));
    }
    let raw = rec.coincidences / herald_singles;
    Ok(Heralding {
        raw,
        detector_corrected: raw / eta,
    })
}

/// Pair rate per pump power per photon bandwidth, counts/s/mW/THz.
pub fn spectral_brightness(rec: &CountRecord, bandwidth_thz: f64) -> Result<f64> {
    brightness_from_pair_rate(pair_rate(rec)?, rec.power.milliwatts(), bandwidth_thz)
}

pub fn brightness_from_pair_rate(pair_rate: f64, power_mw: f64, bandwidth_thz: f64) -> Result<f64> {
    if !(power_mw > 0.0) || !(bandwidth_thz > 0.0) {
        return Err(domain("pump power and bandwidth must be positive"));
    }
    Ok(pair_rate / (power_mw * bandwidth_thz))
}

/// Removes a uniform accidental share `background_fraction` of the
/// coincidences from a measured visibility, clipped to `[0, 1]`.
pub fn background_subtract(raw_visibility: f64, background_fraction: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&raw_visibility) {
        return Err(domain("visibility must lie in [0, 1]"));
    }
    if !(0.0..=1.0).contains(&background_fraction) {
        return Err(domain("background fraction must lie in [0, 1]"));
    }
    if background_fraction >= 1.0 {
        return Ok(if raw_visibility > 0.0 { 1.0 } else { 0.0 });
    }
    Ok((raw_visibility / (1.0 - background_fraction)).min(1.0))
}
