//! Collinear double-downconversion design search.
//!
//! A configuration is a CDDC point when one pump wavelength phase-matches
//! both type-II processes
//!
//! ```text
//! Δk(P@λ_p; a@λ_B, b@λ_R) = +m·2π/Λ
//! Δk(P@λ_p; b@λ_B, a@λ_R) = -m·2π/Λ
//! ```
//!
//! with `1/λ_p = 1/λ_B + 1/λ_R`, so the blue and red wavelengths of the two
//! pairs coincide while their polarisations are swapped. The unknowns are
//! the pump and the blue wavelength; the red one follows from energy
//! conservation.

use alloc::vec::Vec;

use crate::dispersion::{DispersionModel, Polarization};
use crate::error::{domain, Result};
#[allow(unused_imports)] // needed for float methods under no_std
use crate::math::Float;
use crate::math::{bisect, sign_change_brackets};
use crate::phasematch::{delta_k, energy_conserving_idler, grating_vector, Polarizations};

/// Residual tolerance on both mismatches, rad/m.
pub const RESIDUAL_TOL: f64 = 1e-2;
/// Blue and red closer than this are flagged degenerate, nm.
pub const DEGENERACY_NM: f64 = 0.1;

/// A solved configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CddcSolution {
    pub poling_um: f64,
    pub temp_c: f64,
    pub pump_nm: f64,
    pub blue_nm: f64,
    pub red_nm: f64,
    /// |Δk_m| of the positive-order process, rad/m.
    pub residual_plus: f64,
    /// |Δk_m| of the negative-order process, rad/m.
    pub residual_minus: f64,
    /// Polarisation of the blue photon in the positive-order process.
    pub plus_blue_pol: Polarization,
    pub degenerate: bool,
}

/// Fixed parts of a search: order, pump polarisation and the pump window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSetup {
    pub order_abs: u32,
    pub pump_pol: Polarization,
    pub pump_min_nm: f64,
    pub pump_max_nm: f64,
    /// Coarse scan resolution for both pump and blue wavelength, nm.
    pub scan_step_nm: f64,
}

impl Default for SearchSetup {
    fn default() -> Self {
        Self {
            order_abs: 1,
            pump_pol: Polarization::H,
            pump_min_nm: 450.0,
            pump_max_nm: 650.0,
            scan_step_nm: 0.5,
        }
    }
}

impl SearchSetup {
    pub fn with_pump_window(self, min_nm: f64, max_nm: f64) -> Self {
        Self {
            pump_min_nm: min_nm,
            pump_max_nm: max_nm,
            ..self
        }
    }

    fn validate(&self, model: &DispersionModel) -> Result<()> {
        if self.order_abs.is_multiple_of(2) {
            return Err(domain("QPM order must be odd"));
        }
        if !(self.pump_min_nm < self.pump_max_nm) || !(self.scan_step_nm > 0.0) {
            return Err(domain(
                "pump window must be increasing with a positive step",
            ));
        }
        let (lo, _) = model.common_range_nm();
        if self.pump_min_nm < lo {
            return Err(domain(alloc::format!(
                "pump window starts below the dispersion range ({lo} nm)"
            )));
        }
        Ok(())
    }
}

/// Residual system for one orientation of the polarisations.
struct System<'a> {
    model: &'a DispersionModel,
    temp_c: f64,
    grating: f64,
    pump_pol: Polarization,
    plus_blue_pol: Polarization,
    red_max_nm: f64,
}

impl System<'_> {
    /// `(Δk_m+, Δk_m-)` at pump `p`, blue `b`. `None` outside the domain.
    fn residuals(&self, p: f64, b: f64) -> Option<(f64, f64)> {
        if !(b > p && b <= 2.0 * p) {
            return None;
        }
        let r = energy_conserving_idler(p, b);
        if !(r <= self.red_max_nm) {
            return None;
        }
        let plus = Polarizations::type_ii(self.pump_pol, self.plus_blue_pol);
        let minus = Polarizations::type_ii(self.pump_pol, self.plus_blue_pol.orthogonal());
        let f1 = delta_k(self.model, plus, b, r, p, self.temp_c).ok()? - self.grating;
        let f2 = delta_k(self.model, minus, b, r, p, self.temp_c).ok()? + self.grating;
        Some((f1, f2))
    }

    fn norm(&self, p: f64, b: f64) -> Option<f64> {
        self.residuals(p, b).map(|(a, c)| a.abs().max(c.abs()))
    }

    /// Damped Newton with a finite-difference Jacobian.
    fn newton(&self, mut p: f64, mut b: f64) -> Option<(f64, f64)> {
        let h = 1e-4;
        for _ in 0..60 {
            let (f1, f2) = self.residuals(p, b)?;
            let current = f1.abs().max(f2.abs());
            if current < RESIDUAL_TOL * 0.1 {
                return Some((p, b));
            }
            let (a1, a2) = self.residuals(p + h, b)?;
            let (c1, c2) = self.residuals(p, b + h)?;
            let j11 = (a1 - f1) / h;
            let j21 = (a2 - f2) / h;
            let j12 = (c1 - f1) / h;
            let j22 = (c2 - f2) / h;
            let det = j11 * j22 - j12 * j21;
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            let dp = -(j22 * f1 - j12 * f2) / det;
            let db = -(-j21 * f1 + j11 * f2) / det;
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let (np, nb) = (p + t * dp, b + t * db);
                if let Some(n) = self.norm(np, nb) {
                    if n < current {
                        p = np;
                        b = nb;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                return self
                    .norm(p, b)
                    .filter(|&n| n < RESIDUAL_TOL)
                    .map(|_| (p, b));
            }
        }
        self.norm(p, b)
            .filter(|&n| n < RESIDUAL_TOL)
            .map(|_| (p, b))
    }

    /// Blue wavelength where one residual vanishes at fixed pump, searched
    /// in `[lo, hi]`.
    fn blue_root(&self, p: f64, lo: f64, hi: f64, which: usize) -> Option<f64> {
        let f = |b: f64| {
            self.residuals(p, b)
                .map(|(a, c)| if which == 0 { a } else { c })
        };
        let brackets = sign_change_brackets(f, lo, hi, 16);
        let (a, c) = *brackets.first()?;
        bisect(f, a, c, 1e-11)
    }

    /// Nested bisection: outer on the pump, inner on the blue wavelength of
    /// each residual's zero curve.
    fn nested_bisection(&self, p_lo: f64, p_hi: f64, b_lo: f64, b_hi: f64) -> Option<(f64, f64)> {
        let gap =
            |p: f64| Some(self.blue_root(p, b_lo, b_hi, 0)? - self.blue_root(p, b_lo, b_hi, 1)?);
        let p = bisect(gap, p_lo, p_hi, 1e-11)?;
        let b = self.blue_root(p, b_lo, b_hi, 0)?;
        self.norm(p, b)
            .filter(|&n| n < RESIDUAL_TOL)
            .map(|_| (p, b))
    }

    fn solution(&self, poling_um: f64, p: f64, b: f64) -> CddcSolution {
        let (f1, f2) = self.residuals(p, b).unwrap_or((f64::NAN, f64::NAN));
        let r = energy_conserving_idler(p, b);
        CddcSolution {
            poling_um,
            temp_c: self.temp_c,
            pump_nm: p,
            blue_nm: b,
            red_nm: r,
            residual_plus: f1.abs(),
            residual_minus: f2.abs(),
            plus_blue_pol: self.plus_blue_pol,
            degenerate: (r - b).abs() < DEGENERACY_NM,
        }
    }
}

fn systems<'a>(
    model: &'a DispersionModel,
    poling_um: f64,
    temp_c: f64,
    setup: &SearchSetup,
) -> [System<'a>; 2] {
    let grating = setup.order_abs as f64 * grating_vector(poling_um);
    let (_, red_max_nm) = model.common_range_nm();
    [Polarization::H, Polarization::V].map(|plus_blue_pol| System {
        model,
        temp_c,
        grating,
        pump_pol: setup.pump_pol,
        plus_blue_pol,
        red_max_nm,
    })
}

/// Every distinct CDDC point in the pump window, sorted by pump wavelength.
pub fn solve_cddc_all(
    model: &DispersionModel,
    poling_um: f64,
    temp_c: f64,
    setup: &SearchSetup,
) -> Result<Vec<CddcSolution>> {
    setup.validate(model)?;
    if !(poling_um > 0.0) {
        return Err(domain("poling period must be positive"));
    }
    let step = setup.scan_step_nm;
    let np = ((setup.pump_max_nm - setup.pump_min_nm) / step).ceil() as usize + 1;
    let b_min = setup.pump_min_nm;
    let b_max = 2.0 * setup.pump_max_nm;
    let nb = ((b_max - b_min) / step).ceil() as usize + 1;
    let pump = |k: usize| setup.pump_min_nm + step * k as f64;
    let blue = |k: usize| b_min + step * k as f64;

    let mut found: Vec<CddcSolution> = Vec::new();
    for sys in systems(model, poling_um, temp_c, setup) {
        let table: Vec<Option<(f64, f64)>> = (0..np)
            .flat_map(|i| (0..nb).map(move |j| (i, j)))
            .map(|(i, j)| sys.residuals(pump(i), blue(j)))
            .collect();
        let at = |i: usize, j: usize| table[i * nb + j];
        for i in 0..np - 1 {
            for j in 0..nb - 1 {
                let corners = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
                let Some(vals) = corners.iter().copied().collect::<Option<Vec<_>>>() else {
                    continue;
                };
                let changes = |k: usize| {
                    let sel = |v: &(f64, f64)| if k == 0 { v.0 } else { v.1 };
                    let lo = vals.iter().map(sel).fold(f64::INFINITY, f64::min);
                    let hi = vals.iter().map(sel).fold(f64::NEG_INFINITY, f64::max);
                    lo <= 0.0 && hi >= 0.0
                };
                if !(changes(0) && changes(1)) {
                    continue;
                }
                let (p0, b0) = (pump(i), blue(j));
                let root = sys
                    .newton(p0 + step / 2.0, b0 + step / 2.0)
                    .filter(|&(p, b)| (p - p0).abs() <= 2.0 * step && (b - b0).abs() <= 2.0 * step)
                    .or_else(|| {
                        sys.nested_bisection(p0 - step, p0 + 2.0 * step, b0 - step, b0 + 2.0 * step)
                    });
                if let Some((p, b)) = root {
                    let duplicate = found.iter().any(|s| {
                        s.plus_blue_pol == sys.plus_blue_pol
                            && (s.pump_nm - p).abs() < 1e-3
                            && (s.blue_nm - b).abs() < 1e-3
                    });
                    if !duplicate && p >= setup.pump_min_nm && p <= setup.pump_max_nm {
                        found.push(sys.solution(poling_um, p, b));
                    }
                }
            }
        }
    }
    found.sort_by(|a, b| a.pump_nm.total_cmp(&b.pump_nm));
    Ok(found)
}

/// CDDC point with the shortest pump wavelength in the window, or `None`
/// when the window holds no solution.
pub fn solve_cddc(
    model: &DispersionModel,
    poling_um: f64,
    temp_c: f64,
    setup: &SearchSetup,
) -> Result<Option<CddcSolution>> {
    Ok(solve_cddc_all(model, poling_um, temp_c, setup)?
        .into_iter()
        .next())
}

/// Refines a nearby previous solution at new `(Λ, T)` by Newton iteration.
pub fn solve_cddc_from(
    model: &DispersionModel,
    poling_um: f64,
    temp_c: f64,
    setup: &SearchSetup,
    seed: &CddcSolution,
) -> Option<CddcSolution> {
    let sys = systems(model, poling_um, temp_c, setup)
        .into_iter()
        .find(|s| s.plus_blue_pol == seed.plus_blue_pol)?;
    let (p, b) = sys.newton(seed.pump_nm, seed.blue_nm)?;
    if p < setup.pump_min_nm || p > setup.pump_max_nm {
        return None;
    }
    Some(sys.solution(poling_um, p, b))
}

/// One sample of a configuration curve; `solution` is `None` for gaps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub poling_um: f64,
    pub solution: Option<CddcSolution>,
}

/// Poling periods `start..=end` in `steps` samples (a single sample at
/// `start` when `steps == 1`).
pub fn poling_samples(start_um: f64, end_um: f64, steps: usize) -> Result<Vec<f64>> {
    if !(start_um > 0.0) || steps == 0 || (steps > 1 && !(end_um > start_um)) {
        return Err(domain("poling range must be positive and increasing"));
    }
    if steps == 1 {
        return Ok(alloc::vec![start_um]);
    }
    let h = (end_um - start_um) / (steps - 1) as f64;
    Ok((0..steps).map(|k| start_um + h * k as f64).collect())
}

/// Traces CDDC points along the poling period with continuation.
pub fn trace_curve(
    model: &DispersionModel,
    poling_range: (f64, f64, usize),
    temp_c: f64,
    setup: &SearchSetup,
) -> Result<Vec<CurvePoint>> {
    let samples = poling_samples(poling_range.0, poling_range.1, poling_range.2)?;
    let mut out = Vec::with_capacity(samples.len());
    let mut prev: Option<CddcSolution> = None;
    for poling_um in samples {
        let solution =
            match prev.and_then(|seed| solve_cddc_from(model, poling_um, temp_c, setup, &seed)) {
                Some(s) => Some(s),
                None => solve_cddc(model, poling_um, temp_c, setup)?,
            };
        prev = solution.or(prev);
        out.push(CurvePoint {
            poling_um,
            solution,
        });
    }
    Ok(out)
}

/// Temperature in `temp_window` whose CDDC pump is closest to
/// `target_pump_nm`.
pub fn match_temperature(
    model: &DispersionModel,
    poling_um: f64,
    target_pump_nm: f64,
    temp_window: (f64, f64),
    setup: &SearchSetup,
) -> Result<Option<(f64, CddcSolution)>> {
    let (t_lo, t_hi) = temp_window;
    if !(t_hi >= t_lo) {
        return Err(domain("temperature window must be increasing"));
    }
    let t_mid = 0.5 * (t_lo + t_hi);
    let Some(center) = nearest(
        solve_cddc_all(model, poling_um, t_mid, setup)?,
        target_pump_nm,
    ) else {
        return Ok(None);
    };
    let at = |t: f64, seed: &CddcSolution| -> Result<Option<CddcSolution>> {
        if let Some(s) = solve_cddc_from(model, poling_um, t, setup, seed) {
            return Ok(Some(s));
        }
        Ok(nearest(
            solve_cddc_all(model, poling_um, t, setup)?,
            seed.pump_nm,
        ))
    };

    // Coarse 1 °C scan outward from the middle so every solve is seeded.
    let n = (((t_hi - t_lo) / 1.0).ceil() as usize).max(2);
    let ts: Vec<f64> = (0..=n)
        .map(|k| t_lo + (t_hi - t_lo) * k as f64 / n as f64)
        .collect();
    let mut samples: Vec<(f64, CddcSolution)> = Vec::new();
    let mid_idx = n / 2;
    let mut seed = center;
    for &t in ts[..=mid_idx].iter().rev() {
        if let Some(s) = at(t, &seed)? {
            seed = s;
            samples.push((t, s));
        }
    }
    seed = center;
    for &t in &ts[mid_idx + 1..] {
        if let Some(s) = at(t, &seed)? {
            seed = s;
            samples.push((t, s));
        }
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));

    let spread = samples
        .iter()
        .map(|(_, s)| s.pump_nm)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p), hi.max(p))
        });
    if spread.1 - spread.0 < 1e-9 {
        let s = at(t_mid, &center)?.unwrap_or(center);
        return Ok(Some((t_mid, s)));
    }

    let err = |s: &CddcSolution| s.pump_nm - target_pump_nm;
    let mut best = samples
        .iter()
        .copied()
        .min_by(|a, b| err(&a.1).abs().total_cmp(&err(&b.1).abs()))
        .expect("scan holds the centre solution");
    for w in samples.windows(2) {
        let ((ta, sa), (tb, sb)) = (w[0], w[1]);
        if err(&sa).signum() == err(&sb).signum() {
            continue;
        }
        let mut seed = sa;
        let f = |t: f64| -> Option<f64> {
            let s = solve_cddc_from(model, poling_um, t, setup, &seed)?;
            seed = s;
            Some(err(&s))
        };
        if let Some(t) = bisect(f, ta, tb, 1e-6) {
            if let Some(s) = solve_cddc_from(model, poling_um, t, setup, &sa) {
                if err(&s).abs() < err(&best.1).abs() {
                    best = (t, s);
                }
            }
        }
    }
    Ok(Some(best))
}

fn nearest(solutions: Vec<CddcSolution>, pump_nm: f64) -> Option<CddcSolution> {
    solutions.into_iter().min_by(|a, b| {
        (a.pump_nm - pump_nm)
            .abs()
            .total_cmp(&(b.pump_nm - pump_nm).abs())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::OpticalAxis;
    use crate::fixtures::ktp;

    #[test]
    fn experimental_configuration_at_sixty_degrees() {
        let m = ktp();
        let s = solve_cddc(&m, 63.1, 60.0, &SearchSetup::default())
            .unwrap()
            .unwrap();
        assert!((s.pump_nm - 532.3).abs() < 10.0, "{s:?}");
        assert!((s.blue_nm - 904.3).abs() < 10.0, "{s:?}");
        assert!((s.red_nm - 1293.9).abs() < 15.0, "{s:?}");
        assert_eq!(s.plus_blue_pol, Polarization::H);
        assert!(s.residual_plus < RESIDUAL_TOL && s.residual_minus < RESIDUAL_TOL);
        assert!(!s.degenerate);
    }

    #[test]
    fn empty_window_is_not_found() {
        let m = ktp();
        let setup = SearchSetup::default().with_pump_window(600.0, 650.0);
        assert_eq!(solve_cddc(&m, 63.1, 60.0, &setup).unwrap(), None);
        assert_eq!(
            solve_cddc(&m, 1.5, 60.0, &SearchSetup::default()).unwrap(),
            None
        );
    }

    #[test]
    fn window_below_dispersion_range_is_an_error() {
        let m = ktp();
        let setup = SearchSetup::default().with_pump_window(300.0, 650.0);
        assert!(solve_cddc(&m, 63.1, 60.0, &setup).is_err());
    }

    #[test]
    fn single_step_trace_equals_direct_solve() {
        let m = ktp();
        let setup = SearchSetup::default();
        let curve = trace_curve(&m, (63.1, 63.1, 1), 50.0, &setup).unwrap();
        let direct = solve_cddc(&m, 63.1, 50.0, &setup).unwrap();
        assert_eq!(curve.len(), 1);
        assert_eq!(curve[0].solution, direct);
    }

    #[test]
    fn flat_thermo_optic_model_returns_window_midpoint() {
        let ktp = ktp();
        let strip = |axis| {
            let mut s = ktp.set(axis).clone();
            s.thermo = crate::dispersion::ThermoOptic::None;
            s
        };
        let flat = DispersionModel::new(
            "flat",
            alloc::vec![strip(OpticalAxis::Y), strip(OpticalAxis::Z)],
        )
        .unwrap();
        let (t, s) = match_temperature(&flat, 63.1, 532.3, (30.0, 90.0), &SearchSetup::default())
            .unwrap()
            .unwrap();
        assert_eq!(t, 60.0);
        let other = solve_cddc(&flat, 63.1, 35.0, &SearchSetup::default())
            .unwrap()
            .unwrap();
        assert!((other.pump_nm - s.pump_nm).abs() < 1e-9);
    }

    #[test]
    fn matched_temperature_hits_target_pump() {
        let m = ktp();
        let (t, s) = match_temperature(&m, 63.1, 532.3, (30.0, 90.0), &SearchSetup::default())
            .unwrap()
            .unwrap();
        assert!((30.0..=90.0).contains(&t));
        assert!((s.pump_nm - 532.3).abs() < 0.5, "{t} {s:?}");
        let again = solve_cddc(&m, 63.1, t, &SearchSetup::default())
            .unwrap()
            .unwrap();
        assert!((again.pump_nm - s.pump_nm).abs() < 1e-6);
        assert!((again.blue_nm - s.blue_nm).abs() < 1e-6);
    }

    #[test]
    fn poling_samples_validation() {
        assert!(poling_samples(10.0, 5.0, 3).is_err());
        assert!(poling_samples(0.0, 5.0, 3).is_err());
        assert_eq!(
            poling_samples(10.0, 20.0, 3).unwrap(),
            alloc::vec![10.0, 15.0, 20.0]
        );
    }
}
