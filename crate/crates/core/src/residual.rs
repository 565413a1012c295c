//! Residual normalization shared by every identity check.

use num_complex::Complex64;

/// `|a − b| / max(1, |a|, |b|)`.
pub fn rel_residual(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm()).max(1.0);
    (a - b).norm() / scale
}

/// `|a − b| / max(|a|, |b|)`, zero when both vanish. For values such as
/// partition functions, whose magnitude carries no fixed scale.
pub fn rel_error(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Entrywise maximum of [`rel_residual`] over two equally long slices.
pub fn max_rel_residual(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| rel_residual(x, y))
        .fold(0.0, f64::max)
}
