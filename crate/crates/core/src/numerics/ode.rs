//! Dormand–Prince 5(4) embedded Runge–Kutta integration with a terminal event.

use crate::error::{Error, Result};
use crate::real::Real;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th order weights are the last row of A; these are the 4th order ones.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Tolerances and step limits.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub initial_step: T,
    pub max_steps: usize,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        OdeOptions {
            rel_tol: T::lit(1e-6),
            abs_tol: T::lit(1e-12),
            initial_step: T::zero(),
            max_steps: 100_000,
        }
    }
}

/// Accepted steps of an integration: `times[k]`, `states[k]`.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    /// True when the run ended on the event rather than on `t_end`.
    pub event_hit: bool,
}

struct Stepper<'a, T, F> {
    rhs: &'a mut F,
    k: Vec<Vec<T>>,
}

impl<'a, T: Real, F: FnMut(T, &[T], &mut [T])> Stepper<'a, T, F> {
    fn new(rhs: &'a mut F, dim: usize) -> Self {
        Stepper {
            rhs,
            k: vec![vec![T::zero(); dim]; 7],
        }
    }

    /// One trial step; returns (y5, error norm scaled by tolerances).
    fn step(&mut self, t: T, y: &[T], h: T, opts: &OdeOptions<T>) -> (Vec<T>, T) {
        let n = y.len();
        let mut tmp = vec![T::zero(); n];
        (self.rhs)(t, y, &mut self.k[0]);
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for j in 0..s {
                    acc += h * T::lit(A[s][j]) * self.k[j][i];
                }
                tmp[i] = acc;
            }
            let ts = t + T::lit(C[s]) * h;
            (self.rhs)(ts, &tmp, &mut self.k[s]);
        }
        // stage 6 input is the 5th-order solution (FSAL)
        let y5: Vec<T> = (0..n)
            .map(|i| {
                let mut acc = y[i];
                for j in 0..6 {
                    acc += h * T::lit(A[6][j]) * self.k[j][i];
                }
                acc
            })
            .collect();
        let mut err = T::zero();
        for i in 0..n {
            let mut y4 = y[i];
            for j in 0..7 {
                y4 += h * T::lit(B4[j]) * self.k[j][i];
            }
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y5[i].abs());
            let e = (y5[i] - y4) / sc;
            err += e * e;
        }
        (y5, (err / T::lit(n as f64)).sqrt())
    }
}

/// Integrates `y' = rhs(t, y)` from `t0` until `t_end` or until
/// `event(y)` changes sign from positive to nonpositive.
///
/// The terminal step is shortened by secant iteration so that the last
/// stored state sits on the event surface to within `rel_tol`.
pub fn integrate_until<T, F, G>(
    mut rhs: F,
    t0: T,
    y0: &[T],
    t_end: T,
    event: G,
    opts: OdeOptions<T>,
) -> Result<Trajectory<T>>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]),
    G: Fn(&[T]) -> T,
{
    let dim = y0.len();
    let mut times = vec![t0];
    let mut states = vec![y0.to_vec()];
    if event(y0) <= T::zero() {
        return Ok(Trajectory {
            times,
            states,
            event_hit: true,
        });
    }
    let span = t_end - t0;
    let mut h = if opts.initial_step > T::zero() {
        opts.initial_step
    } else {
        span * T::lit(1e-3)
    };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut stepper = Stepper::new(&mut rhs, dim);
    for _ in 0..opts.max_steps {
        if t + h > t_end {
            h = t_end - t;
        }
        let (y_new, err) = stepper.step(t, &y, h, &opts);
        if err <= T::one() || h <= span * T::lit(1e-14) {
            let g_new = event(&y_new);
            if g_new <= T::zero() {
                // Secant on the step length between 0 (g>0) and h (g<=0).
                let (mut lo, mut hi) = (T::zero(), h);
                let (mut g_lo, mut g_hi) = (event(&y), g_new);
                let mut best = (h, y_new.clone());
                for _ in 0..60 {
                    let mut trial = hi - g_hi * (hi - lo) / (g_hi - g_lo);
                    if !(trial > lo && trial < hi) {
                        trial = (lo + hi) * T::lit(0.5);
                    }
                    let (yt, _) = stepper.step(t, &y, trial, &opts);
                    let gt = event(&yt);
                    best = (trial, yt);
                    let scale = event(y0).abs().max(T::eps());
                    if gt.abs() <= opts.rel_tol * T::lit(1e-3) * scale {
                        break;
                    }
                    if gt > T::zero() {
                        lo = trial;
                        g_lo = gt;
                    } else {
                        hi = trial;
                        g_hi = gt;
                    }
                }
                times.push(t + best.0);
                states.push(best.1);
                return Ok(Trajectory {
                    times,
                    states,
                    event_hit: true,
                });
            }
            t += h;
            y = y_new;
            times.push(t);
            states.push(y.clone());
            if t >= t_end {
                return Ok(Trajectory {
                    times,
                    states,
                    event_hit: false,
                });
            }
        }
        let fac = if err > T::zero() {
            T::lit(0.9) * err.powf(T::lit(-0.2))
        } else {
            T::lit(5.0)
        };
        h *= fac.clamp(T::lit(0.2), T::lit(5.0));
        if !h.is_finite() || h <= T::zero() {
            return Err(Error::Integration("step size collapsed".into()));
        }
    }
    Err(Error::Integration(format!(
        "exceeded {} steps",
        opts.max_steps
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let traj = integrate_until(
            |_t, y: &[f64], dy: &mut [f64]| dy[0] = -y[0],
            0.0,
            &[1.0],
            3.0,
            |_| 1.0,
            OdeOptions { rel_tol: 1e-9, ..Default::default() },
        )
        .unwrap();
        let last = traj.states.last().unwrap()[0];
        assert!((last - (-3.0f64).exp()).abs() < 1e-8);
        assert!(!traj.event_hit);
        assert!((traj.times.last().unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn event_stops_on_surface() {
        // x' = -1 from 5: crosses 1.05 at t = 3.95
        let traj = integrate_until(
            |_t, _y: &[f64], dy: &mut [f64]| dy[0] = -1.0,
            0.0,
            &[5.0],
            100.0,
            |y| y[0] - 1.05,
            OdeOptions::default(),
        )
        .unwrap();
        assert!(traj.event_hit);
        assert!((traj.times.last().unwrap() - 3.95).abs() < 1e-8);
        assert!((traj.states.last().unwrap()[0] - 1.05).abs() < 1e-8);
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let traj = integrate_until(
            |_t, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            &[1.0, 0.0],
            10.0,
            |_| 1.0,
            OdeOptions { rel_tol: 1e-10, abs_tol: 1e-12, ..Default::default() },
        )
        .unwrap();
        let y = traj.states.last().unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-7);
    }
}
