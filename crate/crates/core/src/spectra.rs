//! Joint spectra of one downconversion process and quantities derived from
//! them.
//!
//! A [`JointSpectrum`] samples the joint spectral amplitude on a
//! [`WavelengthGrid`] whose first axis is the shortwave (signal) photon and
//! whose second axis is the longwave (idler) photon. Spectra of the two
//! processes built on the same grid compare like-coloured photons directly.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use num_complex::Complex64;

use crate::dispersion::DispersionModel;
use crate::error::{domain, Error, Result};
#[allow(unused_imports)] // needed for float methods under no_std
use crate::math::Float;
use crate::phasematch::{
    energy_conserving_pump, pm_amplitude, ridge_slope, ProcessSpec, SINC2_HALF_WIDTH,
};
use crate::C_NM_PER_PS;

/// Gaussian pump spectral envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpEnvelope {
    center_nm: f64,
    sigma_nm: f64,
}

impl PumpEnvelope {
    /// Width used for a continuous-wave pump.
    pub const CW_SIGMA_NM: f64 = 0.01;

    pub fn new(center_nm: f64, sigma_nm: f64) -> Result<Self> {
        if !(sigma_nm > 0.0) || !(center_nm > 0.0) {
            return Err(domain("pump envelope needs positive centre and width"));
        }
        Ok(Self {
            center_nm,
            sigma_nm,
        })
    }

    pub fn center_nm(&self) -> f64 {
        self.center_nm
    }

    pub fn sigma_nm(&self) -> f64 {
        self.sigma_nm
    }

    /// `exp(-(λ_p - λ_p0)² / 2σ²)` with the energy-conserving pump.
    pub fn amplitude(&self, signal_nm: f64, idler_nm: f64) -> f64 {
        let d = energy_conserving_pump(signal_nm, idler_nm) - self.center_nm;
        (-d * d / (2.0 * self.sigma_nm * self.sigma_nm)).exp()
    }
}

/// Uniformly sampled wavelength axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavelengthAxis {
    pub min_nm: f64,
    pub max_nm: f64,
    pub points: usize,
}

impl WavelengthAxis {
    pub fn new(min_nm: f64, max_nm: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(domain("a wavelength axis needs at least two points"));
        }
        if !(min_nm > 0.0 && max_nm > min_nm) {
            return Err(domain("wavelength axis must be positive and increasing"));
        }
        Ok(Self {
            min_nm,
            max_nm,
            points,
        })
    }

    pub fn centered(center_nm: f64, half_width_nm: f64, points: usize) -> Result<Self> {
        Self::new(center_nm - half_width_nm, center_nm + half_width_nm, points)
    }

    pub fn step(&self) -> f64 {
        (self.max_nm - self.min_nm) / (self.points - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min_nm + self.step() * i as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|i| self.value(i))
    }

    pub fn contains(&self, lambda_nm: f64) -> bool {
        lambda_nm >= self.min_nm && lambda_nm <= self.max_nm
    }
}

/// Signal (shortwave) by idler (longwave) sampling grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavelengthGrid {
    pub signal: WavelengthAxis,
    pub idler: WavelengthAxis,
}

impl WavelengthGrid {
    pub fn new(signal: WavelengthAxis, idler: WavelengthAxis) -> Self {
        Self { signal, idler }
    }

    pub fn len(&self) -> usize {
        self.signal.points * self.idler.points
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.signal.step() * self.idler.step()
    }

    pub fn axis(&self, which: SpectrumAxis) -> &WavelengthAxis {
        match which {
            SpectrumAxis::Signal => &self.signal,
            SpectrumAxis::Idler => &self.idler,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumAxis {
    Signal,
    Idler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcessLabel {
    Plus,
    Minus,
}

/// Sampled joint spectral amplitude and intensity.
///
/// The stored amplitude is rescaled so that `max(intensity) = 1` and
/// `intensity = |amplitude|²` holds cell by cell. The scale and the
/// integrated intensity before rescaling are kept alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectrum {
    grid: WavelengthGrid,
    amplitude: Vec<Complex64>,
    intensity: Vec<f64>,
    label: ProcessLabel,
    weight: f64,
    peak_intensity: f64,
    unweighted_integral: f64,
    transmitted_fraction: f64,
}

impl JointSpectrum {
    /// Builds a spectrum from raw (unnormalised) samples in row-major order,
    /// signal index outermost.
    pub fn from_raw_amplitude(
        grid: WavelengthGrid,
        label: ProcessLabel,
        weight: f64,
        raw: Vec<Complex64>,
    ) -> Result<Self> {
        if raw.len() != grid.len() {
            return Err(Error::IncompatibleGrids);
        }
        let total: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.cell_area();
        let unweighted_integral = if weight != 0.0 {
            total / (weight * weight)
        } else {
            0.0
        };
        let mut js = Self {
            grid,
            amplitude: raw,
            intensity: Vec::new(),
            label,
            weight,
            peak_intensity: 0.0,
            unweighted_integral,
            transmitted_fraction: 1.0,
        };
        js.normalize();
        Ok(js)
    }

    fn normalize(&mut self) {
        let peak = self
            .amplitude
            .iter()
            .map(|a| a.norm_sqr())
            .fold(0.0, f64::max);
        self.peak_intensity = peak;
        if peak > 0.0 {
            let s = 1.0 / peak.sqrt();
            for a in &mut self.amplitude {
                *a *= s;
            }
        }
        self.intensity = self.amplitude.iter().map(|a| a.norm_sqr()).collect();
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn label(&self) -> ProcessLabel {
        self.label
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Largest raw `|JSA|²` before normalisation.
    pub fn peak_intensity(&self) -> f64 {
        self.peak_intensity
    }

    /// `∫|µψ|² dλ_s dλ_i` without the process weight, after any filtering.
    pub fn unweighted_integral(&self) -> f64 {
        self.unweighted_integral
    }

    /// Product of the transmitted fractions of all filters applied so far.
    pub fn transmitted_fraction(&self) -> f64 {
        self.transmitted_fraction
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    pub fn intensity(&self) -> &[f64] {
        &self.intensity
    }

    pub fn jsa(&self, i: usize, j: usize) -> Complex64 {
        self.amplitude[i * self.grid.idler.points + j]
    }

    pub fn jsi(&self, i: usize, j: usize) -> f64 {
        self.intensity[i * self.grid.idler.points + j]
    }
}

/// `JSA = w·µ(λ_p)·ψ_m(λ_s, λ_i)` sampled on `grid`.
pub fn compute_jsa(
    spec: &ProcessSpec,
    env: &PumpEnvelope,
    model: &DispersionModel,
    grid: &WavelengthGrid,
    weight: f64,
) -> Result<JointSpectrum> {
    spec.validate()?;
    let mut raw = Vec::with_capacity(grid.len());
    for s in grid.signal.values() {
        for i in grid.idler.values() {
            let mu = env.amplitude(s, i);
            raw.push(pm_amplitude(spec, model, s, i)? * (weight * mu));
        }
    }
    let label = if spec.order.is_positive() {
        ProcessLabel::Plus
    } else {
        ProcessLabel::Minus
    };
    JointSpectrum::from_raw_amplitude(*grid, label, weight, raw)
}

/// One-dimensional sampled distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1d {
    pub wavelengths_nm: Vec<f64>,
    pub values: Vec<f64>,
}

impl Spectrum1d {
    pub fn new(wavelengths_nm: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if wavelengths_nm.len() != values.len() || values.len() < 2 {
            return Err(domain("distribution needs matching samples, at least two"));
        }
        Ok(Self {
            wavelengths_nm,
            values,
        })
    }

    /// Samples `f` on `axis`.
    pub fn sample(axis: &WavelengthAxis, f: impl Fn(f64) -> f64) -> Self {
        let wavelengths_nm: Vec<f64> = axis.values().collect();
        let values = wavelengths_nm.iter().map(|&l| f(l)).collect();
        Self {
            wavelengths_nm,
            values,
        }
    }

    /// Wavelength of the largest sample.
    pub fn peak_wavelength(&self) -> f64 {
        let (k, _) = self
            .values
            .iter()
            .enumerate()
            .fold(
                (0, f64::MIN),
                |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc },
            );
        self.wavelengths_nm[k]
    }
}

/// Intensity summed over the other axis, max-one normalised.
pub fn marginal_spectrum(js: &JointSpectrum, which: SpectrumAxis) -> Spectrum1d {
    let g = js.grid();
    let (ns, ni) = (g.signal.points, g.idler.points);
    let mut values = match which {
        SpectrumAxis::Signal => (0..ns)
            .map(|i| js.intensity[i * ni..(i + 1) * ni].iter().sum())
            .collect::<Vec<f64>>(),
        SpectrumAxis::Idler => {
            let mut acc = alloc::vec![0.0; ni];
            for row in js.intensity.chunks_exact(ni) {
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += v;
                }
            }
            acc
        }
    };
    let peak = values.iter().cloned().fold(0.0, f64::max);
    if peak > 0.0 {
        values.iter_mut().for_each(|v| *v /= peak);
    }
    Spectrum1d {
        wavelengths_nm: g.axis(which).values().collect(),
        values,
    }
}

/// Full width at half maximum with linear interpolation between samples.
pub fn fwhm(dist: &Spectrum1d) -> Result<f64> {
    let v = &dist.values;
    let x = &dist.wavelengths_nm;
    let (peak_idx, peak) =
        v.iter().enumerate().fold(
            (0, f64::MIN),
            |acc, (k, &y)| if y > acc.1 { (k, y) } else { acc },
        );
    if !(peak > 0.0) {
        return Err(domain("distribution has no positive maximum"));
    }
    let half = peak / 2.0;
    let cross = |a: usize, b: usize| x[a] + (half - v[a]) * (x[b] - x[a]) / (v[b] - v[a]);

    let mut k = peak_idx;
    let left = loop {
        if k == 0 {
            return Err(Error::WindowTooNarrow);
        }
        if v[k - 1] < half {
            break cross(k - 1, k);
        }
        k -= 1;
    };
    let mut k = peak_idx;
    let right = loop {
        if k + 1 == v.len() {
            return Err(Error::WindowTooNarrow);
        }
        if v[k + 1] < half {
            break cross(k, k + 1);
        }
        k += 1;
    };
    Ok(right - left)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterShape {
    Gaussian,
    Rectangular,
}

/// Bandpass filter with unit peak transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandpassFilter {
    pub center_nm: f64,
    pub fwhm_nm: f64,
    pub shape: FilterShape,
}

impl BandpassFilter {
    pub fn new(center_nm: f64, fwhm_nm: f64, shape: FilterShape) -> Result<Self> {
        if !(fwhm_nm > 0.0) || !(center_nm > 0.0) {
            return Err(domain("filter needs positive centre and width"));
        }
        Ok(Self {
            center_nm,
            fwhm_nm,
            shape,
        })
    }

    /// Intensity transmission in `[0, 1]`.
    pub fn transmission(&self, lambda_nm: f64) -> f64 {
        let d = lambda_nm - self.center_nm;
        match self.shape {
            FilterShape::Gaussian => (-4.0 * LN_2 * d * d / (self.fwhm_nm * self.fwhm_nm)).exp(),
            FilterShape::Rectangular => {
                if d.abs() <= self.fwhm_nm / 2.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Multiplies the amplitude by `√t(λ)` along one axis and renormalises.
pub fn apply_bandpass(
    js: &JointSpectrum,
    filter: &BandpassFilter,
    which: SpectrumAxis,
) -> Result<JointSpectrum> {
    let g = *js.grid();
    if !g.axis(which).contains(filter.center_nm) {
        return Err(domain(alloc::format!(
            "filter centre {} nm lies outside the grid",
            filter.center_nm
        )));
    }
    let ni = g.idler.points;
    let before: f64 = js.intensity.iter().sum();
    let amplitude: Vec<Complex64> = js
        .amplitude
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let l = match which {
                SpectrumAxis::Signal => g.signal.value(k / ni),
                SpectrumAxis::Idler => g.idler.value(k % ni),
            };
            a * filter.transmission(l).sqrt()
        })
        .collect();
    let after: f64 = amplitude.iter().map(|a| a.norm_sqr()).sum();
    let fraction = if before > 0.0 { after / before } else { 1.0 };
    let mut out = JointSpectrum {
        grid: g,
        amplitude,
        intensity: Vec::new(),
        label: js.label,
        weight: js.weight,
        peak_intensity: 0.0,
        unweighted_integral: js.unweighted_integral * fraction,
        transmitted_fraction: js.transmitted_fraction * fraction,
    };
    out.normalize();
    out.peak_intensity *= js.peak_intensity;
    Ok(out)
}

/// Fourier-limited coherence time `λ²/(c·Δλ)` in ps.
pub fn coherence_time_ps(lambda_nm: f64, bandwidth_nm: f64) -> Result<f64> {
    if !(bandwidth_nm > 0.0) {
        return Err(domain("bandwidth must be positive"));
    }
    Ok(lambda_nm * lambda_nm / (C_NM_PER_PS * bandwidth_nm))
}

/// Relative amplitudes `α|Ψ₊⟩ + β|Ψ₋⟩`, `β = |β|·e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessAmplitudes {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub theta: f64,
}

impl ProcessAmplitudes {
    /// Builds normalised amplitudes from relative process probabilities.
    pub fn from_probabilities(p_plus: f64, p_minus: f64, theta: f64) -> Result<Self> {
        if !(p_plus >= 0.0 && p_minus >= 0.0) || p_plus + p_minus <= 0.0 {
            return Err(domain(
                "process probabilities must be non-negative, not both zero",
            ));
        }
        let total = p_plus + p_minus;
        Ok(Self {
            alpha: Complex64::new((p_plus / total).sqrt(), 0.0),
            beta: Complex64::from_polar((p_minus / total).sqrt(), theta),
            theta,
        })
    }

    pub fn balanced(theta: f64) -> Self {
        Self::from_probabilities(1.0, 1.0, theta).unwrap()
    }

    pub fn alpha_abs(&self) -> f64 {
        self.alpha.norm()
    }

    pub fn beta_abs(&self) -> f64 {
        self.beta.norm()
    }
}

fn check_compatible(a: &JointSpectrum, b: &JointSpectrum) -> Result<()> {
    if a.grid == b.grid {
        Ok(())
    } else {
        Err(Error::IncompatibleGrids)
    }
}

/// `|α|² ∝ w₊²·∫JSI₊`, `|β|² ∝ w₋²·∫JSI₋` using the post-filter integrals of
/// the unweighted spectra.
pub fn process_amplitudes(
    plus: &JointSpectrum,
    minus: &JointSpectrum,
    weights: (f64, f64),
    theta: f64,
) -> Result<ProcessAmplitudes> {
    check_compatible(plus, minus)?;
    let p = weights.0 * weights.0 * plus.unweighted_integral;
    let m = weights.1 * weights.1 * minus.unweighted_integral;
    ProcessAmplitudes::from_probabilities(p, m, theta)
}

/// Normalised inner product `|⟨JSA₊, JSA₋⟩| / (‖JSA₊‖·‖JSA₋‖)`.
pub fn spectral_overlap(a: &JointSpectrum, b: &JointSpectrum) -> Result<f64> {
    check_compatible(a, b)?;
    let inner: Complex64 = a
        .amplitude
        .iter()
        .zip(&b.amplitude)
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(normalized(inner.norm(), a, b))
}

/// Overlap of the amplitude moduli. This is the overlap reached once the
/// relative group delay of the two processes is compensated, which removes
/// the (linear in frequency) phase of the phase-matching amplitude.
pub fn delay_compensated_overlap(a: &JointSpectrum, b: &JointSpectrum) -> Result<f64> {
    check_compatible(a, b)?;
    let inner: f64 = a
        .amplitude
        .iter()
        .zip(&b.amplitude)
        .map(|(x, y)| x.norm() * y.norm())
        .sum();
    Ok(normalized(inner, a, b))
}

fn normalized(inner: f64, a: &JointSpectrum, b: &JointSpectrum) -> f64 {
    let na: f64 = a.intensity.iter().sum();
    let nb: f64 = b.intensity.iter().sum();
    if na <= 0.0 || nb <= 0.0 {
        return 0.0;
    }
    (inner / (na.sqrt() * nb.sqrt())).min(1.0)
}

/// Exit-time difference `(GD_s - GD_i)·L` in ps for a pair born at the
/// crystal entrance.
pub fn pair_time_offset_ps(
    model: &DispersionModel,
    spec: &ProcessSpec,
    signal_nm: f64,
    idler_nm: f64,
) -> Result<f64> {
    let gs = model.group_delay_per_mm(spec.pols.signal.axis(), signal_nm, spec.temp_c)?;
    let gi = model.group_delay_per_mm(spec.pols.idler.axis(), idler_nm, spec.temp_c)?;
    Ok((gs - gi) * spec.length_mm)
}

/// Signal-marginal FWHM predicted from the slope of `Δk_m` along the pump
/// ridge, for a CW pump.
pub fn estimate_signal_fwhm(
    spec: &ProcessSpec,
    model: &DispersionModel,
    signal_nm: f64,
) -> Result<f64> {
    let slope = ridge_slope(spec, model, signal_nm)?.abs();
    if slope == 0.0 {
        return Err(domain("phase mismatch is flat along the ridge"));
    }
    Ok(4.0 * SINC2_HALF_WIDTH / (spec.length_mm * 1e-3 * slope))
}

/// Frequency bandwidth in THz of a wavelength bandwidth: `c·Δλ/λ²`.
pub fn bandwidth_thz(lambda_nm: f64, bandwidth_nm: f64) -> f64 {
    C_NM_PER_PS * bandwidth_nm / (lambda_nm * lambda_nm)
}
