//! Thin wrappers over `libm` so the rest of the crate reads like `std` float code.

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// Relative comparison used by assumption audits, where both sides are
/// computed through different chains of `pow` calls.
#[inline]
pub(crate) fn le_rel(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs || (lhs - rhs) <= 1e-12 * libm::fabs(rhs).max(libm::fabs(lhs))
}

/// Neumaier-compensated sum.
pub(crate) fn fsum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        c += if libm::fabs(s) >= libm::fabs(x) { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}
