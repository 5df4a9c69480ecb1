//! Dormand–Prince 5(4) embedded pair.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// Fifth-order weights (also the last row of the tableau, FSAL).
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// Fifth minus fourth order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub(crate) struct Stage<const N: usize> {
    pub u: [f64; N],
    pub err: [f64; N],
    /// Derivative at the new point (first stage of the next step).
    pub k7: [f64; N],
}

#[inline]
fn combine<const N: usize>(u: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *u;
    for (c, k) in terms {
        if *c == 0.0 {
            continue;
        }
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand–Prince step of size `h` from `(y, u)` given `k1 = rhs(y, u)`.
pub(crate) fn dp_step<F, const N: usize>(
    rhs: &F,
    y: f64,
    u: &[f64; N],
    k1: &[f64; N],
    h: f64,
) -> Stage<N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k2 = rhs(y + C2 * h, &combine(u, h, &[(A21, k1)]));
    let k3 = rhs(y + C3 * h, &combine(u, h, &[(A31, k1), (A32, &k2)]));
    let k4 = rhs(
        y + C4 * h,
        &combine(u, h, &[(A41, k1), (A42, &k2), (A43, &k3)]),
    );
    let k5 = rhs(
        y + C5 * h,
        &combine(u, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = rhs(
        y + h,
        &combine(
            u,
            h,
            &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ),
    );
    let u_new = combine(
        u,
        h,
        &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
    );
    let k7 = rhs(y + h, &u_new);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    Stage { u: u_new, err, k7 }
}
