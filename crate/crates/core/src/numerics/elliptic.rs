//! Complete elliptic integrals by the arithmetic-geometric mean.

use crate::real::Real;

/// Complete elliptic integrals `(K, E)` of parameter `m = k^2`.
///
/// Takes both `m` and the complementary parameter `m1 = 1 - m` so callers
/// near the logarithmic singularity (`m -> 1`) can pass an `m1` computed
/// without cancellation. Returns infinite `K` at `m1 == 0`.
pub fn complete_elliptic<T: Real>(m: T, m1: T) -> (T, T) {
    let one = T::one();
    if m1 <= T::zero() {
        return (T::lit(f64::INFINITY), one);
    }
    let mut a = one;
    let mut b = m1.sqrt();
    let mut c2 = m;
    // E = K (1 - sum 2^(n-1) c_n^2)
    let mut sum = T::lit(0.5) * c2;
    let mut pow = T::lit(0.5);
    let tol = T::eps() * T::lit(4.0);
    for _ in 0..64 {
        let an = (a + b) * T::lit(0.5);
        let bn = (a * b).sqrt();
        // c_{n+1} = (a_n - b_n)/2 = c_n^2 / (4 a_{n+1})
        let cn = c2 / (T::lit(4.0) * an);
        c2 = cn * cn;
        pow *= T::lit(2.0);
        sum += pow * c2;
        a = an;
        b = bn;
        if cn.abs() <= tol * a {
            break;
        }
    }
    let k = T::FRAC_PI_2() / a;
    (k, k * (one - sum))
}
