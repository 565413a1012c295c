#![allow(dead_code)]

use lattice_lab::lattice::LatticeInstance;
use lattice_lab::rmatrix::{AnisotropyParam, DynamicalParam};
use lattice_lab::theta::ThetaSeries;
use lattice_lab::Complex64;
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn tau_i() -> ThetaSeries {
    ThetaSeries::new(c(0.0, 1.0)).unwrap()
}

/// A point of `[0,1) × [0, 0.3)`, the sampling box at `τ = i`.
pub fn point() -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..0.3f64).prop_map(|(re, im)| c(re, im))
}

pub fn points(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(point(), n)
}

/// A point of `[lo, hi)²`.
pub fn boxed(lo: f64, hi: f64) -> impl Strategy<Value = Complex64> {
    (lo..hi, lo..hi).prop_map(|(re, im)| c(re, im))
}

pub fn aniso() -> AnisotropyParam {
    AnisotropyParam::new(c(0.31, 0.07)).unwrap()
}

pub fn sos(u: Vec<Complex64>, v: Vec<Complex64>, lambda: Complex64) -> Option<LatticeInstance> {
    let dyn_ = DynamicalParam::new(lambda).ok()?;
    LatticeInstance::sos(u, v, dyn_, aniso(), tau_i()).ok()
}

pub fn sixvertex(u: Vec<Complex64>, v: Vec<Complex64>) -> LatticeInstance {
    LatticeInstance::sixvertex(u, v, aniso()).unwrap()
}

/// Largest pairwise relative residual.
pub fn spread(xs: &[Complex64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in xs.iter().enumerate() {
        for b in &xs[i + 1..] {
            worst = worst.max(lattice_lab::residual::rel_error(*a, *b));
        }
    }
    worst
}
