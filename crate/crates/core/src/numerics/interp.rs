//! Shape-preserving piecewise cubic Hermite interpolation (PCHIP).

use crate::error::{Error, Result};
use crate::real::Real;

/// Monotone piecewise cubic interpolant through `(x_i, y_i)`.
///
/// Derivatives follow Fritsch–Carlson (weighted harmonic mean of adjacent
/// secants, zero at local extrema), so monotone data stay monotone and no
/// spurious oscillation is introduced. Outside the data range the
/// interpolant continues linearly with the end derivative.
#[derive(Debug, Clone)]
pub struct MonotoneCubic<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    ds: Vec<T>,
}

impl<T: Real> MonotoneCubic<T> {
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        let n = xs.len();
        if n != ys.len() {
            return Err(Error::InvalidCurve(format!(
                "{} abscissae but {} ordinates",
                n,
                ys.len()
            )));
        }
        if n < 2 {
            return Err(Error::InvalidCurve("need at least two samples".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidCurve("abscissae not strictly increasing".into()));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve("non-finite sample".into()));
        }
        let h: Vec<T> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<T> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut ds = vec![T::zero(); n];
        if n == 2 {
            ds[0] = delta[0];
            ds[1] = delta[0];
        } else {
            let two = T::lit(2.0);
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] <= T::zero() {
                    ds[i] = T::zero();
                } else {
                    let w1 = two * h[i] + h[i - 1];
                    let w2 = h[i] + two * h[i - 1];
                    ds[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            ds[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            ds[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(MonotoneCubic { xs, ys, ds })
    }

    pub fn x_min(&self) -> T {
        self.xs[0]
    }

    pub fn x_max(&self) -> T {
        self.xs[self.xs.len() - 1]
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    pub fn eval(&self, x: T) -> T {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + self.ds[0] * (x - self.xs[0]);
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + self.ds[n - 1] * (x - self.xs[n - 1]);
        }
        let i = match self
            .xs
            .binary_search_by(|probe| probe.partial_cmp(&x).expect("finite abscissa"))
        {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = three * t2 - two * t3;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.ds[i] + h01 * self.ys[i + 1] + h11 * h * self.ds[i + 1]
    }
}

// One-sided three-point estimate with the shape-preserving limits used by
// PCHIP implementations.
fn end_slope<T: Real>(h0: T, h1: T, d0: T, d1: T) -> T {
    let two = T::lit(2.0);
    let d = ((two * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= T::zero() {
        T::zero()
    } else if d0 * d1 <= T::zero() && d.abs() > (T::lit(3.0) * d0).abs() {
        T::lit(3.0) * d0
    } else {
        d
    }
}
