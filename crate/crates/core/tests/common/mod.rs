//! Oracles shared by the integration and acceptance targets.

#![allow(dead_code)]

/// Normal-approach resistance of a sphere to a plane, bispherical series,
/// summed in a form that stays finite for any number of terms.
pub fn brenner(delta: f64) -> f64 {
    let a = delta.acosh();
    let mut total = 0.0;
    let mut n = 1.0;
    loop {
        let k = 2.0 * n + 1.0;
        // numerator and denominator divided by e^{(2n+1)a}, so nothing overflows
        let e = (-k * a).exp();
        let num = (1.0 - e * e) + k * (2.0 * a).sinh() * e;
        let den = (1.0 - e).powi(2) - k * k * a.sinh().powi(2) * e;
        let term = n * (n + 1.0) / ((2.0 * n - 1.0) * (2.0 * n + 3.0)) * (num / den - 1.0);
        total += term;
        if term.abs() < 1e-15 * total.abs() || n > 2000.0 {
            break;
        }
        n += 1.0;
    }
    4.0 / 3.0 * a.sinh() * total
}

/// Squirmer with slip `B1 sinθ` on a sphere of radius `a`: swimming speed
/// and dissipated power from the first squirming mode.
pub fn squirmer_series(b1: f64, a: f64, eta: f64) -> (f64, f64) {
    (2.0 * b1 / 3.0, 16.0 * std::f64::consts::PI * eta * a * a * b1 * b1 / 3.0)
}
