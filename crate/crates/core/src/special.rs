//! Scaled complementary error function.

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Below this argument `e^{x²} erfc(x)` is formed directly.
const DIRECT_LIMIT: f64 = 5.0;

/// Terms kept in the backward continued-fraction evaluation.
const CF_TERMS: usize = 60;

/// `erfcx(x) = e^{x²} erfc(x)`.
///
/// For `0 ≤ x < 5` the product is formed from a correctly rounded `erfc`;
/// beyond that the Laplace continued fraction
/// `erfcx(x) = π^{-1/2} / (x + ½/(x + 1/(x + 3/2/(x + …))))`
/// is summed from the tail, which converges to full precision there and
/// never overflows.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        // erfc(-x) = 2 - erfc(x)
        let x2 = x * x;
        if x2 > 700.0 {
            return f64::INFINITY;
        }
        return 2.0 * x2.exp() - erfcx(-x);
    }
    if x < DIRECT_LIMIT {
        return (x * x).exp() * libm::erfc(x);
    }
    if x.is_infinite() {
        return 0.0;
    }
    let mut tail = x;
    for k in (1..=CF_TERMS).rev() {
        tail = x + (k as f64 / 2.0) / tail;
    }
    FRAC_1_SQRT_PI / tail
}
