//! Adaptive Simpson quadrature.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the Richardson error estimates of all accepted panels.
    pub error: f64,
}

const MAX_DEPTH: u32 = 40;

pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Quadrature {
    if a == b {
        return Quadrature { value: 0.0, error: 0.0 };
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut err = 0.0;
    let value = recurse(&f, a, b, fa, fm, fb, whole, abs_tol, MAX_DEPTH, &mut err);
    Quadrature { value, error: err }
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    err: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let noise = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if depth == 0 || delta.abs() <= (15.0 * tol).max(noise) || m <= a || m >= b {
        *err += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = adaptive_simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12);
        assert!((q.value - 0.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_integral() {
        // int_0^inf e^{-x^2/4} dx = sqrt(pi)
        let q = adaptive_simpson(|x| (-x * x / 4.0).exp(), 0.0, 40.0, 1e-12);
        assert!((q.value - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(adaptive_simpson(|x| x, 1.0, 1.0, 1e-9).value, 0.0);
    }
}
