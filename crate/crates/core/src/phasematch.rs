//! Momentum mismatch and quasi-phase-matching amplitude.
//!
//! Wavelengths are in nm, poling periods in µm, crystal lengths in mm and
//! wavevector mismatches in rad/m.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::dispersion::{DispersionModel, Polarization};
use crate::error::{config, domain, Result};
#[allow(unused_imports)] // needed for float methods under no_std
use crate::math::Float;
use crate::math::{bisect, sign_change_brackets, sinc};

/// Half-maximum point of `sinc²`: `sinc²(x) = 1/2` at `x = ±1.39156`.
pub const SINC2_HALF_WIDTH: f64 = 1.391_557_378_251_51;

/// Wavenumber `2π/λ` in rad/m for λ in nm.
fn wavenumber(lambda_nm: f64) -> f64 {
    2.0 * PI / (lambda_nm * 1e-9)
}

/// `2π/Λ` in rad/m for Λ in µm.
pub fn grating_vector(poling_um: f64) -> f64 {
    2.0 * PI / (poling_um * 1e-6)
}

/// Pump wavelength fixed by energy conservation.
pub fn energy_conserving_pump(signal_nm: f64, idler_nm: f64) -> f64 {
    1.0 / (1.0 / signal_nm + 1.0 / idler_nm)
}

/// Idler wavelength fixed by energy conservation.
pub fn energy_conserving_idler(pump_nm: f64, signal_nm: f64) -> f64 {
    1.0 / (1.0 / pump_nm - 1.0 / signal_nm)
}

/// Odd, nonzero QPM order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QpmOrder(i32);

impl QpmOrder {
    pub const PLUS_ONE: QpmOrder = QpmOrder(1);
    pub const MINUS_ONE: QpmOrder = QpmOrder(-1);

    pub fn new(m: i32) -> Result<Self> {
        if m % 2 == 0 {
            Err(domain(alloc::format!(
                "QPM order must be odd and nonzero, got {m}"
            )))
        } else {
            Ok(QpmOrder(m))
        }
    }

    pub fn get(self) -> i32 {
        self.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }
}

/// Polarisations of the three interacting fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Polarizations {
    pub pump: Polarization,
    pub signal: Polarization,
    pub idler: Polarization,
}

impl Polarizations {
    /// Type-II assignment: the idler is orthogonal to the signal.
    pub fn type_ii(pump: Polarization, signal: Polarization) -> Self {
        Self {
            pump,
            signal,
            idler: signal.orthogonal(),
        }
    }
}

/// One downconversion process in a poled crystal.
///
/// The signal is the shortwave photon throughout this crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessSpec {
    pub pols: Polarizations,
    pub order: QpmOrder,
    pub poling_um: f64,
    pub length_mm: f64,
    pub temp_c: f64,
    /// Central pump wavelength.
    pub pump_nm: f64,
}

impl ProcessSpec {
    pub fn new(
        pols: Polarizations,
        order: QpmOrder,
        poling_um: f64,
        length_mm: f64,
        temp_c: f64,
        pump_nm: f64,
    ) -> Result<Self> {
        let spec = Self {
            pols,
            order,
            poling_um,
            length_mm,
            temp_c,
            pump_nm,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        QpmOrder::new(self.order.0)?;
        if !(self.poling_um > 0.0) {
            return Err(domain("poling period must be positive"));
        }
        if !(self.length_mm > 0.0) {
            return Err(domain("crystal length must be positive"));
        }
        if !(self.pump_nm > 0.0) {
            return Err(domain("pump wavelength must be positive"));
        }
        if self.pols.signal == self.pols.idler {
            return Err(domain("type-II process needs orthogonal signal and idler"));
        }
        Ok(())
    }
}

/// Mismatch before and after the grating contribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchResult {
    pub delta_k: f64,
    pub delta_k_m: f64,
    pub order_used: i32,
}

/// `Δk = k_p - k_s - k_i` in rad/m with an explicit pump wavelength.
pub fn delta_k(
    model: &DispersionModel,
    pols: Polarizations,
    signal_nm: f64,
    idler_nm: f64,
    pump_nm: f64,
    temp_c: f64,
) -> Result<f64> {
    let np = model.refractive_index(pols.pump.axis(), pump_nm, temp_c)?;
    let ns = model.refractive_index(pols.signal.axis(), signal_nm, temp_c)?;
    let ni = model.refractive_index(pols.idler.axis(), idler_nm, temp_c)?;
    Ok(np * wavenumber(pump_nm) - ns * wavenumber(signal_nm) - ni * wavenumber(idler_nm))
}

/// `Δk_m = Δk - m·2π/Λ`. The pump defaults to the energy-conserving value.
pub fn delta_k_m(
    spec: &ProcessSpec,
    model: &DispersionModel,
    signal_nm: f64,
    idler_nm: f64,
    pump_nm: Option<f64>,
) -> Result<MismatchResult> {
    spec.validate()?;
    let pump = pump_nm.unwrap_or_else(|| energy_conserving_pump(signal_nm, idler_nm));
    let dk = delta_k(model, spec.pols, signal_nm, idler_nm, pump, spec.temp_c)?;
    let m = spec.order.get();
    Ok(MismatchResult {
        delta_k: dk,
        delta_k_m: dk - m as f64 * grating_vector(spec.poling_um),
        order_used: m,
    })
}

/// Poling period `Λ = m·2π/Δk` in µm.
pub fn poling_period(delta_k: f64, order: QpmOrder) -> Result<f64> {
    let m = order.get() as f64;
    if delta_k == 0.0 || !delta_k.is_finite() {
        return Err(domain("momentum mismatch is zero; no poling period exists"));
    }
    if delta_k.signum() != m.signum() {
        return Err(domain(
            "momentum mismatch and QPM order have opposite signs",
        ));
    }
    Ok(m * 2.0 * PI / delta_k * 1e6)
}

/// `ψ = exp(i·x)·sinc(x)` with `x = Δk_m·L/2`.
pub fn qpm_amplitude_from_mismatch(delta_k_m: f64, length_mm: f64) -> Complex64 {
    let x = delta_k_m * length_mm * 1e-3 / 2.0;
    Complex64::from_polar(sinc(x), x)
}

/// Phase-matching amplitude of one process at `(λ_s, λ_i)`.
pub fn pm_amplitude(
    spec: &ProcessSpec,
    model: &DispersionModel,
    signal_nm: f64,
    idler_nm: f64,
) -> Result<Complex64> {
    let r = delta_k_m(spec, model, signal_nm, idler_nm, None)?;
    Ok(qpm_amplitude_from_mismatch(r.delta_k_m, spec.length_mm))
}

/// Evaluates the positive- and negative-order amplitudes at the same point.
pub fn pm_amplitude_both(
    plus: &ProcessSpec,
    minus: &ProcessSpec,
    model: &DispersionModel,
    signal_nm: f64,
    idler_nm: f64,
) -> Result<(Complex64, Complex64)> {
    check_pair(plus, minus)?;
    Ok((
        pm_amplitude(plus, model, signal_nm, idler_nm)?,
        pm_amplitude(minus, model, signal_nm, idler_nm)?,
    ))
}

pub(crate) fn check_pair(plus: &ProcessSpec, minus: &ProcessSpec) -> Result<()> {
    if !plus.order.is_positive() || minus.order.is_positive() {
        return Err(config("expected one positive and one negative QPM order"));
    }
    if plus.poling_um != minus.poling_um
        || plus.length_mm != minus.length_mm
        || plus.temp_c != minus.temp_c
    {
        return Err(config(
            "both processes must share poling period, length and temperature",
        ));
    }
    Ok(())
}

/// Mismatch along the energy-conservation ridge of the central pump.
pub fn ridge_mismatch(spec: &ProcessSpec, model: &DispersionModel, signal_nm: f64) -> Result<f64> {
    let idler = energy_conserving_idler(spec.pump_nm, signal_nm);
    Ok(delta_k_m(spec, model, signal_nm, idler, Some(spec.pump_nm))?.delta_k_m)
}

/// Signal wavelength on the pump ridge where `Δk_m = 0`, searched inside
/// `window_nm`. Returns the root closest to the window centre.
pub fn ridge_center(
    spec: &ProcessSpec,
    model: &DispersionModel,
    window_nm: (f64, f64),
) -> Result<Option<f64>> {
    spec.validate()?;
    let (lo, hi) = window_nm;
    if !(lo > spec.pump_nm && hi > lo) {
        return Err(domain("signal window must lie above the pump wavelength"));
    }
    let f = |s: f64| ridge_mismatch(spec, model, s).ok();
    let steps = (((hi - lo) / 0.5).ceil() as usize).max(4);
    let mid = 0.5 * (lo + hi);
    let mut best: Option<f64> = None;
    for (a, b) in sign_change_brackets(f, lo, hi, steps) {
        if let Some(root) = bisect(f, a, b, 1e-10) {
            if best.is_none_or(|r| (root - mid).abs() < (r - mid).abs()) {
                best = Some(root);
            }
        }
    }
    Ok(best)
}

/// d(Δk_m)/dλ_s along the pump ridge in rad/m per nm.
pub fn ridge_slope(spec: &ProcessSpec, model: &DispersionModel, signal_nm: f64) -> Result<f64> {
    let h = 1e-3;
    let up = ridge_mismatch(spec, model, signal_nm + h)?;
    let down = ridge_mismatch(spec, model, signal_nm - h)?;
    Ok((up - down) / (2.0 * h))
}
