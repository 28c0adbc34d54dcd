//! End-to-end characterisation of a CDDC source.
//!
//! Given the crystal geometry, temperature and pump, [`analyze_source`]
//! locates both processes on the pump ridge, samples their joint spectra on
//! a shared grid, optionally filters them, and derives bandwidths,
//! coherence times, group delays, process amplitudes, spectral overlap and
//! the predicted visibilities and CHSH value.

use alloc::vec::Vec;

use crate::dispersion::{DispersionModel, Polarization};
use crate::entanglement::{chsh_parameter, visibility, Basis, EntangledStateModel};
use crate::error::{domain, Error, Result};
#[allow(unused_imports)] // needed for float methods under no_std
use crate::math::Float;
use crate::phasematch::{
    energy_conserving_idler, ridge_center, Polarizations, ProcessSpec, QpmOrder,
};
use crate::spectra::{
    apply_bandpass, coherence_time_ps, compute_jsa, delay_compensated_overlap,
    estimate_signal_fwhm, fwhm, marginal_spectrum, pair_time_offset_ps, process_amplitudes,
    spectral_overlap, BandpassFilter, JointSpectrum, ProcessAmplitudes, PumpEnvelope, Spectrum1d,
    SpectrumAxis, WavelengthAxis, WavelengthGrid,
};

/// Minimum number of grid samples across the narrowest signal bandwidth.
pub const MIN_SAMPLES_PER_FWHM: f64 = 8.0;
/// Minimum pump-ridge width, in grid steps. Summing a sampled Gaussian
/// ridge leaves a ripple of about `2·exp(-π²·(σ/h)²)` in the marginals,
/// under 1% at this ratio.
pub const MIN_RIDGE_SIGMA_STEPS: f64 = 0.75;
/// How often the grid span is doubled before giving up on a bandwidth.
pub const MAX_WIDENINGS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceConfig {
    pub poling_um: f64,
    pub length_mm: f64,
    pub temp_c: f64,
    pub pump_nm: f64,
    pub pump_sigma_nm: f64,
    pub pump_pol: Polarization,
    /// Polarisation of the blue photon in the positive-order process.
    pub plus_blue_pol: Polarization,
    pub order_abs: u32,
    /// Relative nonlinear weights `(w₊, w₋)`.
    pub weights: (f64, f64),
    pub theta: f64,
    pub filter: Option<(BandpassFilter, SpectrumAxis)>,
    pub grid_points: usize,
    /// Half-width of the grid in units of the wider signal bandwidth.
    pub span_fwhms: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            poling_um: 63.1,
            length_mm: 10.0,
            temp_c: 60.0,
            pump_nm: 532.3,
            pump_sigma_nm: PumpEnvelope::CW_SIGMA_NM,
            pump_pol: Polarization::H,
            plus_blue_pol: Polarization::H,
            order_abs: 1,
            weights: (1.0, 1.0),
            theta: 0.0,
            filter: None,
            grid_points: 512,
            span_fwhms: 5.0,
        }
    }
}

impl SourceConfig {
    pub fn process(&self, positive: bool) -> Result<ProcessSpec> {
        let m = self.order_abs as i32;
        let (order, blue) = if positive {
            (QpmOrder::new(m)?, self.plus_blue_pol)
        } else {
            (QpmOrder::new(-m)?, self.plus_blue_pol.orthogonal())
        };
        ProcessSpec::new(
            Polarizations::type_ii(self.pump_pol, blue),
            order,
            self.poling_um,
            self.length_mm,
            self.temp_c,
            self.pump_nm,
        )
    }
}

/// Table row for one photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonRow {
    pub wavelength_nm: f64,
    pub pol: Polarization,
    pub fwhm_nm: f64,
    pub coherence_ps: f64,
    pub filtered_fwhm_nm: Option<f64>,
    pub filtered_coherence_ps: Option<f64>,
    pub group_delay_ps_per_mm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessReport {
    pub spec: ProcessSpec,
    pub blue: PhotonRow,
    pub red: PhotonRow,
    /// `(GD_blue - GD_red)·L`, ps.
    pub time_offset_ps: f64,
    pub spectrum: JointSpectrum,
    pub filtered: Option<JointSpectrum>,
}

impl ProcessReport {
    /// Spectrum after filtering, or the raw one without a filter.
    pub fn final_spectrum(&self) -> &JointSpectrum {
        self.filtered.as_ref().unwrap_or(&self.spectrum)
    }

    pub fn marginals(&self) -> (Spectrum1d, Spectrum1d) {
        let js = self.final_spectrum();
        (
            marginal_spectrum(js, SpectrumAxis::Signal),
            marginal_spectrum(js, SpectrumAxis::Idler),
        )
    }
}

/// Two-process summary for one filter setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub amplitudes: ProcessAmplitudes,
    /// Raw complex overlap of the joint amplitudes.
    pub overlap: f64,
    /// Overlap with the relative group delay compensated.
    pub overlap_compensated: f64,
    pub visibility_hv: f64,
    pub visibility_diagonal: f64,
    pub chsh: f64,
    pub product_state: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceAnalysis {
    pub config: SourceConfig,
    pub grid: WavelengthGrid,
    pub plus: ProcessReport,
    pub minus: ProcessReport,
    pub unfiltered: Summary,
    pub filtered: Option<Summary>,
}

impl SourceAnalysis {
    pub fn summary(&self) -> &Summary {
        self.filtered.as_ref().unwrap_or(&self.unfiltered)
    }
}

fn summarize(plus: &JointSpectrum, minus: &JointSpectrum, cfg: &SourceConfig) -> Result<Summary> {
    let amplitudes = process_amplitudes(plus, minus, cfg.weights, cfg.theta)?;
    let overlap = spectral_overlap(plus, minus)?;
    let overlap_compensated = delay_compensated_overlap(plus, minus)?;
    let state = EntangledStateModel::new(amplitudes, overlap_compensated)?;
    let visibility_hv = visibility(&state, Basis::HV);
    let visibility_diagonal = visibility(&state, Basis::Diagonal);
    Ok(Summary {
        amplitudes,
        overlap,
        overlap_compensated,
        visibility_hv,
        visibility_diagonal,
        chsh: chsh_parameter(0.5 * (visibility_hv + visibility_diagonal)),
        product_state: amplitudes.alpha_abs() == 0.0 || amplitudes.beta_abs() == 0.0,
    })
}

/// Shared grid that holds both processes' ridges.
pub fn shared_grid(
    cfg: &SourceConfig,
    centers: (f64, f64),
    estimated_fwhm: (f64, f64),
) -> Result<WavelengthGrid> {
    let n = cfg.grid_points;
    if n < 2 {
        return Err(Error::Resolution(
            "grid needs at least two points per axis".into(),
        ));
    }
    let widest = estimated_fwhm.0.max(estimated_fwhm.1);
    let narrowest = estimated_fwhm.0.min(estimated_fwhm.1);
    let center = 0.5 * (centers.0 + centers.1);
    let half = cfg.span_fwhms * widest + 0.5 * (centers.0 - centers.1).abs();
    let signal = WavelengthAxis::centered(center, half, n)?;
    if narrowest / signal.step() < MIN_SAMPLES_PER_FWHM {
        return Err(Error::Resolution(alloc::format!(
            "{n} points give {:.2} samples across a {narrowest:.3} nm bandwidth (need {MIN_SAMPLES_PER_FWHM})",
            narrowest / signal.step()
        )));
    }
    let reach = 6.0 * cfg.pump_sigma_nm;
    let idler_lo = energy_conserving_idler(cfg.pump_nm - reach, signal.max_nm);
    let idler_hi = energy_conserving_idler(cfg.pump_nm + reach, signal.min_nm);
    let idler = WavelengthAxis::new(idler_lo, idler_hi, n)?;

    // Width of the pump ridge along each axis at the grid centre.
    let i0 = energy_conserving_idler(cfg.pump_nm, center);
    let ridge_idler = cfg.pump_sigma_nm * (i0 / cfg.pump_nm).powi(2);
    let ridge_signal = cfg.pump_sigma_nm * (center / cfg.pump_nm).powi(2);
    if ridge_idler / idler.step() < MIN_RIDGE_SIGMA_STEPS
        || ridge_signal / signal.step() < MIN_RIDGE_SIGMA_STEPS
    {
        return Err(Error::Resolution(alloc::format!(
            "pump ridge (sigma {:.4} nm) is under-sampled by a {n}-point grid",
            cfg.pump_sigma_nm
        )));
    }
    Ok(WavelengthGrid::new(signal, idler))
}

fn photon_row(
    model: &DispersionModel,
    spec: &ProcessSpec,
    pol: Polarization,
    wavelength_nm: f64,
    raw: &Spectrum1d,
    filtered: Option<&Spectrum1d>,
) -> Result<PhotonRow> {
    let fwhm_nm = fwhm(raw)?;
    let filtered_fwhm_nm = filtered.map(fwhm).transpose()?;
    Ok(PhotonRow {
        wavelength_nm,
        pol,
        fwhm_nm,
        coherence_ps: coherence_time_ps(wavelength_nm, fwhm_nm)?,
        filtered_fwhm_nm,
        filtered_coherence_ps: filtered_fwhm_nm
            .map(|w| coherence_time_ps(wavelength_nm, w))
            .transpose()?,
        group_delay_ps_per_mm: model.group_delay_per_mm(pol.axis(), wavelength_nm, spec.temp_c)?,
    })
}

fn process_report(
    model: &DispersionModel,
    spec: ProcessSpec,
    env: &PumpEnvelope,
    grid: &WavelengthGrid,
    center_nm: f64,
    filter: Option<(BandpassFilter, SpectrumAxis)>,
) -> Result<ProcessReport> {
    let spectrum = compute_jsa(&spec, env, model, grid, 1.0)?;
    let filtered = filter
        .map(|(f, axis)| apply_bandpass(&spectrum, &f, axis))
        .transpose()?;
    let raw_s = marginal_spectrum(&spectrum, SpectrumAxis::Signal);
    let raw_i = marginal_spectrum(&spectrum, SpectrumAxis::Idler);
    let filt = filtered.as_ref().map(|js| {
        (
            marginal_spectrum(js, SpectrumAxis::Signal),
            marginal_spectrum(js, SpectrumAxis::Idler),
        )
    });
    let red_nm = energy_conserving_idler(spec.pump_nm, center_nm);
    let blue = photon_row(
        model,
        &spec,
        spec.pols.signal,
        center_nm,
        &raw_s,
        filt.as_ref().map(|f| &f.0),
    )?;
    let red = photon_row(
        model,
        &spec,
        spec.pols.idler,
        red_nm,
        &raw_i,
        filt.as_ref().map(|f| &f.1),
    )?;
    Ok(ProcessReport {
        spec,
        blue,
        red,
        time_offset_ps: pair_time_offset_ps(model, &spec, center_nm, red_nm)?,
        spectrum,
        filtered,
    })
}

/// Blue wavelengths `(λ₊, λ₋)` at which each process phase-matches on the
/// ridge of the central pump wavelength.
pub fn ridge_centers(model: &DispersionModel, cfg: &SourceConfig) -> Result<(f64, f64)> {
    let (_, max_nm) = model.common_range_nm();
    // The red partner must stay inside the dispersion model's range.
    let red_limit = energy_conserving_idler(cfg.pump_nm, max_nm);
    let window = (
        (cfg.pump_nm * 1.02).max(red_limit + 0.5),
        2.0 * cfg.pump_nm - 1e-6,
    );
    if window.0 >= window.1 {
        return Err(domain(
            "pump wavelength leaves no room for a blue photon in range",
        ));
    }
    let find = |spec: &ProcessSpec| -> Result<f64> {
        ridge_center(spec, model, window)?.ok_or_else(|| {
            Error::NotFound(alloc::format!(
                "the m = {} process does not phase-match anywhere on the pump ridge",
                spec.order.get()
            ))
        })
    };
    Ok((find(&cfg.process(true)?)?, find(&cfg.process(false)?)?))
}

/// Full characterisation of both processes at the configured temperature.
pub fn analyze_source(model: &DispersionModel, cfg: &SourceConfig) -> Result<SourceAnalysis> {
    if !(cfg.weights.0 >= 0.0 && cfg.weights.1 >= 0.0) {
        return Err(domain("process weights must be non-negative"));
    }
    let plus_spec = cfg.process(true)?;
    let minus_spec = cfg.process(false)?;
    let env = PumpEnvelope::new(cfg.pump_nm, cfg.pump_sigma_nm)?;
    let (c_plus, c_minus) = ridge_centers(model, cfg)?;
    let est = (
        estimate_signal_fwhm(&plus_spec, model, c_plus)?,
        estimate_signal_fwhm(&minus_spec, model, c_minus)?,
    );

    // Widen the window while a marginal runs off its edge.
    let mut span = cfg.span_fwhms;
    let mut attempt = 0;
    let (grid, plus, minus) = loop {
        let grid = shared_grid(
            &SourceConfig {
                span_fwhms: span,
                ..*cfg
            },
            (c_plus, c_minus),
            est,
        )?;
        let reports =
            process_report(model, plus_spec, &env, &grid, c_plus, cfg.filter).and_then(|p| {
                Ok((
                    p,
                    process_report(model, minus_spec, &env, &grid, c_minus, cfg.filter)?,
                ))
            });
        match reports {
            Ok((plus, minus)) => break (grid, plus, minus),
            Err(Error::WindowTooNarrow) if attempt < MAX_WIDENINGS => {
                span *= 2.0;
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    };
    let unfiltered = summarize(&plus.spectrum, &minus.spectrum, cfg)?;
    let filtered = match (&plus.filtered, &minus.filtered) {
        (Some(p), Some(m)) => Some(summarize(p, m, cfg)?),
        _ => None,
    };
    Ok(SourceAnalysis {
        config: *cfg,
        grid,
        plus,
        minus,
        unfiltered,
        filtered,
    })
}

/// Blue/red wavelengths of both processes, `[(blue₊, red₊), (blue₋, red₋)]`.
pub fn process_centers(analysis: &SourceAnalysis) -> Vec<(f64, f64)> {
    [&analysis.plus, &analysis.minus]
        .iter()
        .map(|p| (p.blue.wavelength_nm, p.red.wavelength_nm))
        .collect()
}
