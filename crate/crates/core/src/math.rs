//! Small numerical helpers shared by the modules.

pub(crate) use num_traits::Float;

/// `sin(x)/x` with `sinc(0) = 1`; uses the Taylor series near zero.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        Float::sin(x) / x
    }
}

/// Bisection on a bracketing interval. `fa` and `fb` must differ in sign.
pub(crate) fn bisect<F>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Option<f64>
where
    F: FnMut(f64) -> Option<f64>,
{
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a).abs() <= xtol {
            return Some(mid);
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// Scans `[lo, hi]` in `steps` uniform intervals and returns every bracket
/// `(a, b)` over which `f` changes sign.
pub(crate) fn sign_change_brackets<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    steps: usize,
) -> alloc::vec::Vec<(f64, f64)>
where
    F: FnMut(f64) -> Option<f64>,
{
    let mut out = alloc::vec::Vec::new();
    let h = (hi - lo) / steps as f64;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=steps {
        let x = lo + h * k as f64;
        let fx = f(x);
        if let (Some((px, pf)), Some(v)) = (prev, fx) {
            if pf == 0.0 || pf.signum() != v.signum() {
                out.push((px, x));
            }
        }
        prev = fx.map(|v| (x, v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_series_matches_direct_formula_at_switch_point() {
        let x = 1e-4;
        assert!((sinc(x) - x.sin() / x).abs() < 1e-16);
        assert!((sinc(-x) - sinc(x)).abs() == 0.0);
        assert_eq!(sinc(0.0), 1.0);
    }

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| Some(x * x - 2.0), 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| Some(x * x + 1.0), -1.0, 1.0, 1e-9).is_none());
    }
}
