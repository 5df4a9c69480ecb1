use super::SystemState;

/// An accepted point of the solution together with the vector field there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<const N: usize> {
    pub y: f64,
    pub u: [f64; N],
    pub du: [f64; N],
}

impl<const N: usize> Sample<N> {
    pub fn state(&self) -> SystemState<N> {
        SystemState { y: self.y, u: self.u }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventHit<const N: usize> {
    pub y: f64,
    pub event: usize,
    pub u: [f64; N],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    ReachedEnd,
    Event(usize),
    Diverged,
    StepLimit,
}

/// Sampled solution of one integration. Samples are strictly increasing in `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub samples: Vec<Sample<N>>,
    pub events: Vec<EventHit<N>>,
    pub reason: Termination,
}

impl<const N: usize> Trajectory<N> {
    pub fn first(&self) -> &Sample<N> {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample<N> {
        self.samples.last().expect("trajectory has at least one sample")
    }

    pub fn y_range(&self) -> (f64, f64) {
        (self.first().y, self.last().y)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Cubic Hermite interpolation between the bracketing samples. `None`
    /// outside the sampled range.
    pub fn interpolate(&self, y: f64) -> Option<[f64; N]> {
        let (lo, hi) = self.y_range();
        if !(y >= lo && y <= hi) {
            return None;
        }
        let idx = match self
            .samples
            .binary_search_by(|s| s.y.partial_cmp(&y).expect("finite sample"))
        {
            Ok(i) => return Some(self.samples[i].u),
            Err(i) => i,
        };
        let (a, b) = (&self.samples[idx - 1], &self.samples[idx]);
        Some(hermite(a, b, y))
    }

    /// Interpolated states on `n` uniformly spaced points spanning the trajectory.
    pub fn resample(&self, n: usize) -> Vec<SystemState<N>> {
        let (lo, hi) = self.y_range();
        if n < 2 {
            return vec![self.first().state()];
        }
        (0..n)
            .map(|i| {
                let y = if i + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                };
                SystemState {
                    y,
                    u: self.interpolate(y).expect("inside range"),
                }
            })
            .collect()
    }
}

pub(crate) fn hermite<const N: usize>(a: &Sample<N>, b: &Sample<N>, y: f64) -> [f64; N] {
    let h = b.y - a.y;
    let t = (y - a.y) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h00 * a.u[i] + h10 * h * a.du[i] + h01 * b.u[i] + h11 * h * b.du[i];
    }
    out
}
