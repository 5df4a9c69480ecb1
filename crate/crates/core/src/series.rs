//! Truncated power-series arithmetic on coefficient vectors (index = power).

pub(crate) fn mul(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if *ai == 0.0 {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `(sin u, cos u)` for a series `u`, via `s' = u' c` and `c' = -u' s`.
pub(crate) fn sin_cos(u: &[f64], len: usize) -> (Vec<f64>, Vec<f64>) {
    let mut s = vec![0.0; len];
    let mut c = vec![0.0; len];
    let u0 = u.first().copied().unwrap_or(0.0);
    s[0] = u0.sin();
    c[0] = u0.cos();
    for m in 1..len {
        let mut sm = 0.0;
        let mut cm = 0.0;
        for j in 1..=m {
            let uj = u.get(j).copied().unwrap_or(0.0);
            if uj == 0.0 {
                continue;
            }
            let w = j as f64 * uj;
            sm += w * c[m - j];
            cm -= w * s[m - j];
        }
        s[m] = sm / m as f64;
        c[m] = cm / m as f64;
    }
    (s, c)
}

/// Value and first derivative of `sum c_k x^k`.
pub(crate) fn eval_with_derivative(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut dv = 0.0;
    for c in coeffs.iter().rev() {
        dv = dv * x + v;
        v = v * x + c;
    }
    (v, dv)
}
