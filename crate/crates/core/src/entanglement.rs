//! Polarisation-entangled state of the two superimposed processes.
//!
//! After a dichroic mirror sends blue photons to mode 1 and red photons to
//! mode 2, the state reads `α|H₁V₂⟩ + β|V₁H₂⟩` with `β = |β|e^{iθ}`. Spectral
//! distinguishability between the two processes is folded into a single
//! overlap factor `O` that scales the interference term.

use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use num_complex::Complex64;

use crate::error::{domain, Result};
#[allow(unused_imports)] // needed for float methods under no_std
use crate::math::Float;
use crate::spectra::ProcessAmplitudes;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledStateModel {
    pub amplitudes: ProcessAmplitudes,
    pub overlap: f64,
}

impl EntangledStateModel {
    pub fn new(amplitudes: ProcessAmplitudes, overlap: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&overlap) {
            return Err(domain("overlap must lie in [0, 1]"));
        }
        let norm = amplitudes.alpha.norm_sqr() + amplitudes.beta.norm_sqr();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(domain("process amplitudes are not normalised"));
        }
        Ok(Self {
            amplitudes,
            overlap,
        })
    }

    /// `(|H₁V₂⟩ + e^{iθ}|V₁H₂⟩)/√2` with the given overlap.
    pub fn balanced(theta: f64, overlap: f64) -> Result<Self> {
        Self::new(ProcessAmplitudes::balanced(theta), overlap)
    }
}

/// Coincidence probability behind linear analysers at angle `a` (blue arm)
/// and `b` (red arm), both measured from horizontal.
pub fn coincidence_probability(state: &EntangledStateModel, a: f64, b: f64) -> f64 {
    let pa = state.amplitudes.alpha.norm_sqr();
    let pb = state.amplitudes.beta.norm_sqr();
    let cross = 2.0
        * state.amplitudes.alpha.norm()
        * state.amplitudes.beta.norm()
        * state.overlap
        * state.amplitudes.theta.cos();
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    pa * ca * ca * sb * sb + pb * sa * sa * cb * cb + cross * ca * sa * cb * sb
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Analysers at 0° and 90°.
    HV,
    /// Analysers at ±45°.
    Diagonal,
}

impl Basis {
    pub fn angle(self) -> f64 {
        match self {
            Basis::HV => 0.0,
            Basis::Diagonal => FRAC_PI_4,
        }
    }
}

/// Correlation visibility in a basis: the contrast between orthogonal and
/// parallel analyser settings summed over both settings of the blue arm.
///
/// Evaluates to 1 in the H/V basis and to `2|α||β|·O·|cos θ|` in the
/// diagonal basis.
pub fn visibility(state: &EntangledStateModel, basis: Basis) -> f64 {
    let a = basis.angle();
    let p = |x: f64, y: f64| coincidence_probability(state, x, y);
    let crossed = p(a, a + FRAC_PI_2) + p(a + FRAC_PI_2, a);
    let parallel = p(a, a) + p(a + FRAC_PI_2, a + FRAC_PI_2);
    let total = crossed + parallel;
    if total <= 0.0 {
        0.0
    } else {
        (crossed - parallel).abs() / total
    }
}

/// `(P_max - P_min)/(P_max + P_min)` of the fringe obtained by rotating the
/// red-arm analyser with the blue-arm analyser fixed at `a`.
pub fn fringe_visibility(state: &EntangledStateModel, a: f64) -> f64 {
    // P(a, b) = m + r·cos(2b - φ); extract m and r from three samples.
    let p0 = coincidence_probability(state, a, 0.0);
    let p45 = coincidence_probability(state, a, FRAC_PI_4);
    let p90 = coincidence_probability(state, a, FRAC_PI_2);
    let mean = 0.5 * (p0 + p90);
    let c = 0.5 * (p0 - p90);
    let s = p45 - mean;
    let amp = (c * c + s * s).sqrt();
    if mean <= 0.0 {
        0.0
    } else {
        amp / mean
    }
}

/// CHSH value of a visibility-degraded Bell state at optimal angles,
/// `S = 2√2·V`.
pub fn chsh_parameter(mean_visibility: f64) -> f64 {
    2.0 * SQRT_2 * mean_visibility
}

/// Polarisation correlation `E(a, b)` from the four analyser combinations.
pub fn correlation(state: &EntangledStateModel, a: f64, b: f64) -> f64 {
    let p = |x: f64, y: f64| coincidence_probability(state, x, y);
    let same = p(a, b) + p(a + FRAC_PI_2, b + FRAC_PI_2);
    let diff = p(a, b + FRAC_PI_2) + p(a + FRAC_PI_2, b);
    (same - diff) / (same + diff)
}

/// `|E(a,b) - E(a,b') + E(a',b) + E(a',b')|` for explicit angles.
pub fn chsh_from_angles(state: &EntangledStateModel, a: f64, a2: f64, b: f64, b2: f64) -> f64 {
    let e = |x, y| correlation(state, x, y);
    (e(a, b) - e(a, b2) + e(a2, b) + e(a2, b2)).abs()
}

/// Four-angle CHSH value with the blue arm at 0° and 45° and the red arm
/// at the best pair of the standard settings ±22.5°, ±67.5°.
pub fn chsh_standard_angles(state: &EntangledStateModel) -> f64 {
    let q = FRAC_PI_4 / 2.0;
    let red = [q, 3.0 * q, -q, -3.0 * q];
    let mut best = 0.0f64;
    for &b in &red {
        for &b2 in &red {
            if b != b2 {
                best = best.max(chsh_from_angles(state, 0.0, FRAC_PI_4, b, b2));
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Separation {
    /// Split by colour: polarisation-entangled output.
    Dichroic,
    /// Split by polarisation: frequency-entangled output.
    Polarizing,
}

/// Two-mode description `c₁|k₁⟩ + c₂|k₂⟩` after spatial separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeState {
    pub terms: [(&'static str, Complex64); 2],
    /// Label of the factorised degree of freedom.
    pub spectator: &'static str,
}

impl TwoModeState {
    pub fn is_product(&self) -> bool {
        self.terms.iter().any(|(_, c)| c.norm() == 0.0)
    }
}

pub fn reduce_state(state: &EntangledStateModel, separation: Separation) -> TwoModeState {
    let a = state.amplitudes.alpha;
    let b = state.amplitudes.beta;
    match separation {
        Separation::Dichroic => TwoModeState {
            terms: [("H1V2", a), ("V1H2", b)],
            spectator: "B1R2",
        },
        Separation::Polarizing => TwoModeState {
            terms: [("B1R2", a), ("R1B2", b)],
            spectator: "H1V2",
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn balanced_state_probabilities() {
        let s = EntangledStateModel::balanced(0.0, 1.0).unwrap();
        assert!(coincidence_probability(&s, 0.0, 0.0).abs() < 1e-16);
        assert!((coincidence_probability(&s, 0.0, FRAC_PI_2) - 0.5).abs() < 1e-15);
        let d = EntangledStateModel::balanced(0.0, 0.971).unwrap();
        let p = coincidence_probability(&d, FRAC_PI_4, FRAC_PI_4);
        assert!((p - 0.25 * (1.0 + 0.971)).abs() < 1e-12, "{p}");
        assert!((p - 0.4928).abs() < 1e-4);
    }

    #[test]
    fn visibility_cases() {
        let s = EntangledStateModel::balanced(0.0, 1.0).unwrap();
        assert!((visibility(&s, Basis::Diagonal) - 1.0).abs() < 1e-12);
        assert!((visibility(&s, Basis::HV) - 1.0).abs() < 1e-12);
        let q = EntangledStateModel::balanced(PI / 2.0, 0.8).unwrap();
        assert!(visibility(&q, Basis::Diagonal) < 1e-12);
        let o = EntangledStateModel::balanced(0.0, 0.971).unwrap();
        assert!((visibility(&o, Basis::Diagonal) - 0.971).abs() < 1e-12);
        assert!((fringe_visibility(&o, FRAC_PI_4) - 0.971).abs() < 1e-12);
    }

    #[test]
    fn product_state_has_no_diagonal_visibility() {
        let amp = ProcessAmplitudes::from_probabilities(1.0, 0.0, 0.0).unwrap();
        let s = EntangledStateModel::new(amp, 1.0).unwrap();
        assert!(visibility(&s, Basis::Diagonal).abs() < 1e-15);
        assert!(reduce_state(&s, Separation::Dichroic).is_product());
        assert!(reduce_state(&s, Separation::Polarizing).is_product());
    }

    #[test]
    fn chsh_values() {
        assert!((chsh_parameter(1.0) - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!((chsh_parameter(1.0 / 2f64.sqrt()) - 2.0).abs() < 1e-15);
        assert!((chsh_parameter(0.985) - 2.786).abs() < 5e-4);
    }

    #[test]
    fn four_angle_route_matches_closed_form() {
        for o in [1.0, 0.971, 0.5] {
            let s = EntangledStateModel::balanced(0.0, o).unwrap();
            let v = 0.5 * (visibility(&s, Basis::HV) + visibility(&s, Basis::Diagonal));
            assert!((chsh_standard_angles(&s) - chsh_parameter(v)).abs() < 1e-9);
        }
    }

    #[test]
    fn reduction_relabels_only() {
        let s = EntangledStateModel::balanced(0.4, 0.9).unwrap();
        let d = reduce_state(&s, Separation::Dichroic);
        let f = reduce_state(&s, Separation::Polarizing);
        assert_eq!(d.terms[0].0, "H1V2");
        assert_eq!(f.terms[1].0, "R1B2");
        assert_eq!(d.terms[0].1, f.terms[0].1);
        assert_eq!(d.terms[1].1, s.amplitudes.beta);
    }

    #[test]
    fn rejects_unnormalised_input() {
        let amp = ProcessAmplitudes {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
            theta: 0.0,
        };
        assert!(EntangledStateModel::new(amp, 1.0).is_err());
        assert!(EntangledStateModel::balanced(0.0, 1.5).is_err());
    }
}
