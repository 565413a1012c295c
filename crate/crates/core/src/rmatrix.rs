//! R-matrices on `ℂ² ⊗ ℂ²` and Yang–Baxter checks.
//!
//! Basis order is `(++, +−, −+, −−)`. The entry `R^{αβ}_{γδ}` sits at
//! row `(α,β)`, column `(γ,δ)`; `α` is the top edge of a vertex, `β` the right,
//! `γ` the bottom and `δ` the left. All constructors write the ice-rule zeros
//! structurally.

use std::f64::consts::PI;

use nalgebra::{Matrix4, SMatrix};
use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::theta::ThetaSeries;

pub type Matrix8 = SMatrix<Complex64, 8, 8>;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// Position in a `ℂ²` basis: `+ ↦ 0`, `− ↦ 1`.
    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

fn pair(a: Sign, b: Sign) -> usize {
    2 * a.index() + b.index()
}

/// A 4×4 complex matrix on `ℂ² ⊗ ℂ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorMatrix2(pub Matrix4<Complex64>);

impl TensorMatrix2 {
    pub fn zeros() -> Self {
        Self(Matrix4::zeros())
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    /// `R^{αβ}_{γδ}`.
    pub fn entry(&self, alpha: Sign, beta: Sign, gamma: Sign, delta: Sign) -> Complex64 {
        self.0[(pair(alpha, beta), pair(gamma, delta))]
    }

    pub fn set(&mut self, alpha: Sign, beta: Sign, gamma: Sign, delta: Sign, value: Complex64) {
        self.0[(pair(alpha, beta), pair(gamma, delta))] = value;
    }

    /// Six-vertex layout: `a` on `(++,++)` and `(−−,−−)`, `b` on `(+−,+−)`,
    /// `b̄` on `(−+,−+)`, `c̄` on `(+−,−+)`, `c` on `(−+,+−)`.
    pub fn from_weights(a: Complex64, b: Complex64, bbar: Complex64, c: Complex64, cbar: Complex64) -> Self {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = a;
        m[(3, 3)] = a;
        m[(1, 1)] = b;
        m[(2, 2)] = bbar;
        m[(1, 2)] = cbar;
        m[(2, 1)] = c;
        Self(m)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True when every entry violating `α+β = γ+δ` is exactly zero.
    pub fn satisfies_ice_rule(&self) -> bool {
        let signs = [Sign::Plus, Sign::Minus];
        for &a in &signs {
            for &b in &signs {
                for &c in &signs {
                    for &d in &signs {
                        if a.value() + b.value() != c.value() + d.value() && self.entry(a, b, c, d) != ZERO {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Max-norm of `[H⊗1 + 1⊗H, R]` with `H = diag(1, −1)`.
    pub fn weight_commutator(&self) -> f64 {
        let h = [2.0, 0.0, 0.0, -2.0];
        let mut worst: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                worst = worst.max(((h[r] - h[c]) * self.0[(r, c)]).norm());
            }
        }
        worst
    }

    /// `b ↦ ρ b`, `b̄ ↦ ρ⁻¹ b̄`.
    pub fn gauge(&self, rho: Complex64) -> Self {
        let mut m = self.0;
        m[(1, 1)] *= rho;
        m[(2, 2)] /= rho;
        Self(m)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0 * s)
    }

    /// Embedding into legs `(a, b)` of `(ℂ²)^{⊗3}`; leg 0 is the most
    /// significant bit of the 8-dimensional index.
    pub fn embed(&self, a: usize, b: usize) -> Matrix8 {
        embed_sectors(a, b, |_| *self)
    }
}

/// Embeds a two-leg operator whose value may depend on the sign of the
/// spectator leg.
fn embed_sectors(a: usize, b: usize, mut by_spectator: impl FnMut(Sign) -> TensorMatrix2) -> Matrix8 {
    assert!(a < 3 && b < 3 && a != b);
    let c = 3 - a - b;
    let bit = |idx: usize, leg: usize| (idx >> (2 - leg)) & 1;
    let sectors = [by_spectator(Sign::Plus), by_spectator(Sign::Minus)];
    let mut out = Matrix8::zeros();
    for row in 0..8 {
        for col in 0..8 {
            if bit(row, c) != bit(col, c) {
                continue;
            }
            let r = 2 * bit(row, a) + bit(row, b);
            let k = 2 * bit(col, a) + bit(col, b);
            out[(row, col)] = sectors[bit(row, c)].0[(r, k)];
        }
    }
    out
}

/// Additive anisotropy `ħ` with `q = e^{πiħ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnisotropyParam {
    pub hbar: Complex64,
    pub q: Complex64,
}

impl AnisotropyParam {
    pub fn new(hbar: Complex64) -> Result<Self> {
        Self::checked(hbar, (I * PI * hbar).exp())
    }

    /// From the multiplicative parameter; `ħ` is the principal logarithm.
    pub fn from_q(q: Complex64) -> Result<Self> {
        if q == ZERO {
            return Err(LabError::InvalidParam("q = 0".into()));
        }
        Self::checked(q.ln() / (I * PI), q)
    }

    fn checked(hbar: Complex64, q: Complex64) -> Result<Self> {
        if !(hbar.re.is_finite() && hbar.im.is_finite() && q.re.is_finite() && q.im.is_finite()) {
            return Err(LabError::NonFinite("AnisotropyParam"));
        }
        if q.norm() == 0.0 || (q * q - 1.0).norm() <= 1e-12 {
            return Err(LabError::InvalidParam(format!("degenerate anisotropy q = {q}")));
        }
        Ok(Self { hbar, q })
    }

    /// `q − q⁻¹`.
    pub fn q_minus_qinv(&self) -> Complex64 {
        self.q - self.q.inv()
    }
}

/// Dynamical parameter `λ` with `μ = e^{2πiλ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicalParam {
    pub lambda: Complex64,
    pub mu: Complex64,
}

impl DynamicalParam {
    pub fn new(lambda: Complex64) -> Result<Self> {
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(LabError::NonFinite("DynamicalParam"));
        }
        Ok(Self {
            lambda,
            mu: (2.0 * PI * I * lambda).exp(),
        })
    }

    /// From `μ` directly; `λ` is the principal logarithm. Large `|μ|` is kept
    /// exact in the multiplicative form.
    pub fn from_mu(mu: Complex64) -> Result<Self> {
        if mu == ZERO || !(mu.re.is_finite() && mu.im.is_finite()) {
            return Err(LabError::InvalidParam(format!("mu = {mu}")));
        }
        Ok(Self {
            lambda: mu.ln() / (2.0 * PI * I),
            mu,
        })
    }

    /// `λ + k ħ`.
    pub fn shifted(&self, k: i32, aniso: &AnisotropyParam) -> Self {
        let kk = k as f64;
        Self {
            lambda: self.lambda + kk * aniso.hbar,
            mu: self.mu * aniso.q.powi(2 * k),
        }
    }
}

/// `1 + coupling/(u−v) · P`.
pub fn r_rational(u: Complex64, v: Complex64, coupling: Complex64) -> Result<TensorMatrix2> {
    let d = u - v;
    if d.norm() <= 1e-12 * u.norm().max(v.norm()).max(1.0) {
        return Err(LabError::Coincident(format!("rational R at u = v = {u}")));
    }
    let g = coupling / d;
    Ok(TensorMatrix2::from_weights(ONE + g, ONE, ONE, g, g))
}

/// Six-vertex weights `a = qz − q⁻¹w`, `b = b̄ = z − w`, `c = (q−q⁻¹)z`, `c̄ = (q−q⁻¹)w`.
pub fn r_sixvertex(z: Complex64, w: Complex64, aniso: &AnisotropyParam) -> TensorMatrix2 {
    let q = aniso.q;
    let k = aniso.q_minus_qinv();
    TensorMatrix2::from_weights(q * z - w / q, z - w, z - w, k * z, k * w)
}

/// The non-dynamical limit of the trigonometric SOS matrix: the six-vertex
/// matrix gauged by `ρ = q`.
pub fn r_sixvertex_gauged(z: Complex64, w: Complex64, aniso: &AnisotropyParam) -> TensorMatrix2 {
    r_sixvertex(z, w, aniso).gauge(aniso.q)
}

/// Felder's elliptic dynamical R-matrix `R(u; λ)`.
pub fn r_felder(u: Complex64, dyn_: &DynamicalParam, aniso: &AnisotropyParam, ts: &ThetaSeries) -> Result<TensorMatrix2> {
    let lam = dyn_.lambda;
    let h = aniso.hbar;
    let tl = ts.gated(lam, "Felder R: theta(lambda)")?;
    let tml = -tl;
    let tu = ts.theta(u)?;
    let th = ts.theta(h)?;
    let a = ts.theta(u + h)?;
    let b = tu * ts.theta(lam + h)? / tl;
    let bbar = tu * ts.theta(lam - h)? / tl;
    let c = ts.theta(u + lam)? * th / tl;
    let cbar = ts.theta(u - lam)? * th / tml;
    Ok(TensorMatrix2::from_weights(a, b, bbar, c, cbar))
}

/// Trigonometric SOS matrix in multiplicative variables.
pub fn r_trig_sos(z: Complex64, w: Complex64, dyn_: &DynamicalParam, aniso: &AnisotropyParam) -> Result<TensorMatrix2> {
    let mu = dyn_.mu;
    let q = aniso.q;
    let qi = q.inv();
    let k = q - qi;
    let den = mu - 1.0;
    if den.norm() <= 1e-12 * mu.norm().max(1.0) {
        return Err(LabError::pole("trigonometric SOS R: mu - 1", den.norm()));
    }
    let a = z * q - w * qi;
    let b = (z - w) * (mu * q - qi) / den;
    let bbar = (z - w) * (mu * qi - q) / den;
    let cbar = (z - w * mu) * k / (-den);
    let c = (z * mu - w) * k / den;
    Ok(TensorMatrix2::from_weights(a, b, bbar, c, cbar))
}

/// Max-norm of `R₁₂R₁₃R₂₃ − R₂₃R₁₃R₁₂` with `R_ab = R(z_a, z_b)`.
pub fn ybe_residual<F>(r: F, z1: Complex64, z2: Complex64, z3: Complex64) -> Result<f64>
where
    F: Fn(Complex64, Complex64) -> Result<TensorMatrix2>,
{
    let r12 = r(z1, z2)?.embed(0, 1);
    let r13 = r(z1, z3)?.embed(0, 2);
    let r23 = r(z2, z3)?.embed(1, 2);
    let lhs = r12 * r13 * r23;
    let rhs = r23 * r13 * r12;
    Ok(max_rel(&lhs, &rhs))
}

/// Dynamical YBE for an R-matrix given per leg pair and `λ`-shift `k ħ`:
/// `R₁₂(λ) R₁₃(λ+ħH₂) R₂₃(λ) = R₂₃(λ+ħH₁) R₁₃(λ) R₁₂(λ+ħH₃)`.
/// `r(a, b, k)` must return `R_ab` evaluated at `λ + kħ`.
pub fn dybe_residual_with<F>(r: F) -> Result<f64>
where
    F: Fn(usize, usize, i32) -> Result<TensorMatrix2>,
{
    let plain = |a: usize, b: usize| -> Result<Matrix8> { Ok(r(a, b, 0)?.embed(a, b)) };
    let shifted = |a: usize, b: usize| -> Result<Matrix8> {
        let p = r(a, b, 1)?;
        let m = r(a, b, -1)?;
        Ok(embed_sectors(a, b, |s| if s == Sign::Plus { p } else { m }))
    };
    let lhs = plain(0, 1)? * shifted(0, 2)? * plain(1, 2)?;
    let rhs = shifted(1, 2)? * plain(0, 2)? * shifted(0, 1)?;
    Ok(max_rel(&lhs, &rhs))
}

/// DYBE residual of the Felder matrix at spectral parameters `u₁, u₂, u₃`.
pub fn dybe_residual(
    u1: Complex64,
    u2: Complex64,
    u3: Complex64,
    dyn_: &DynamicalParam,
    aniso: &AnisotropyParam,
    ts: &ThetaSeries,
) -> Result<f64> {
    for k in -2..=2 {
        ts.gated(dyn_.lambda + k as f64 * aniso.hbar, "DYBE: theta(lambda + k hbar)")?;
    }
    let u = [u1, u2, u3];
    dybe_residual_with(|a, b, k| r_felder(u[a] - u[b], &dyn_.shifted(k, aniso), aniso, ts))
}

/// DYBE residual of the trigonometric SOS matrix; the shift acts as `μ ↦ μq^{2k}`.
pub fn dybe_residual_trig(
    z: [Complex64; 3],
    dyn_: &DynamicalParam,
    aniso: &AnisotropyParam,
) -> Result<f64> {
    dybe_residual_with(|a, b, k| r_trig_sos(z[a], z[b], &dyn_.shifted(k, aniso), aniso))
}

/// Entrywise `|a−b| / max(1, ‖a‖_max, ‖b‖_max)`.
pub(crate) fn max_rel(a: &Matrix8, b: &Matrix8) -> f64 {
    let scale = a
        .iter()
        .chain(b.iter())
        .map(|z| z.norm())
        .fold(1.0, f64::max);
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residual::rel_residual;
    use Sign::{Minus as M, Plus as P};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn aniso() -> AnisotropyParam {
        AnisotropyParam::new(c(0.31, 0.07)).unwrap()
    }

    #[test]
    fn rational_entries() {
        assert_eq!(r_rational(c(0.3, 0.0), c(0.1, 0.0), ZERO).unwrap(), TensorMatrix2::identity());
        let r = r_rational(c(0.3, 0.2), c(-0.4, 0.1), c(0.7, 0.0)).unwrap();
        let g = c(0.7, 0.0) / c(0.7, 0.1);
        assert!((r.entry(P, M, M, P) - g).norm() < 1e-15);
        assert!(r_rational(c(0.3, 0.0), c(0.3, 0.0), ONE).is_err());
    }

    #[test]
    fn sixvertex_entries() {
        let an = aniso();
        let (z, w) = (c(0.4, 0.9), c(-1.1, 0.3));
        let r = r_sixvertex(z, w, &an);
        assert!((r.entry(P, M, M, P) - an.q_minus_qinv() * w).norm() < 1e-15);
        assert!((r.entry(M, P, P, M) - an.q_minus_qinv() * z).norm() < 1e-15);
        let r = r_sixvertex(z, z, &an);
        assert_eq!(r.entry(P, M, P, M), ZERO);
        assert_eq!(r.entry(M, P, M, P), ZERO);
    }

    #[test]
    fn ybe_examples() {
        let an = aniso();
        let z = [c(0.3, 0.2), c(-0.7, 1.1), c(1.4, -0.5)];
        let r = ybe_residual(|a, b| Ok(r_sixvertex(a, b, &an)), z[0], z[1], z[2]).unwrap();
        assert!(r <= 1e-12, "{r}");
        let r = ybe_residual(|a, b| r_rational(a, b, c(0.8, 0.1)), z[0], z[1], z[2]).unwrap();
        assert!(r <= 1e-12, "{r}");
        let r = ybe_residual(|_, _| Ok(TensorMatrix2::identity()), z[0], z[1], z[2]).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn felder_entries() {
        let ts = ThetaSeries::new(c(0.0, 1.0)).unwrap();
        let an = aniso();
        let dy = DynamicalParam::new(c(0.27, 0.04)).unwrap();
        let r = r_felder(-an.hbar, &dy, &an, &ts).unwrap();
        assert!(r.entry(P, P, P, P).norm() < 1e-16);
        let r = r_felder(ZERO, &dy, &an, &ts).unwrap();
        assert!(r.entry(P, M, P, M).norm() < 1e-16 && r.entry(M, P, M, P).norm() < 1e-16);
        let u = c(0.13, -0.08);
        let r = r_felder(u, &dy, &an, &ts).unwrap();
        let l = dy.lambda;
        let want = ts.theta(u - l).unwrap() * ts.theta(an.hbar).unwrap() / ts.theta(-l).unwrap();
        assert!(rel_residual(r.entry(P, M, M, P), want) < 1e-14);
        assert!(r.satisfies_ice_rule());
        assert!(r.weight_commutator() <= 1e-12);
    }

    #[test]
    fn dybe_felder() {
        let ts = ThetaSeries::new(c(0.0, 1.0)).unwrap();
        let an = aniso();
        let dy = DynamicalParam::new(c(0.21, 0.05)).unwrap();
        let r = dybe_residual(c(0.3, 0.1), c(-0.2, 0.25), c(0.05, -0.15), &dy, &an, &ts).unwrap();
        assert!(r <= 1e-10, "{r}");
        let r = dybe_residual(c(0.3, 0.1), c(0.3, 0.1), c(0.05, -0.15), &dy, &an, &ts).unwrap();
        assert!(r <= 1e-10, "{r}");
    }

    #[test]
    fn dybe_trig() {
        let an = aniso();
        let dy = DynamicalParam::new(c(0.21, 0.05)).unwrap();
        let z = [c(0.3, 0.1), c(-0.2, 0.25), c(0.05, -0.15)].map(|u| (2.0 * PI * I * u).exp());
        let r = dybe_residual_trig(z, &dy, &an).unwrap();
        assert!(r <= 1e-9, "{r}");
    }

    #[test]
    fn trig_limit_of_felder() {
        let ts = ThetaSeries::new(c(0.0, 30.0)).unwrap();
        let an = aniso();
        let dy = DynamicalParam::new(c(0.21, 0.05)).unwrap();
        let (u, v) = (c(0.31, 0.12), c(-0.17, 0.2));
        let (z, w) = ((2.0 * PI * I * u).exp(), (2.0 * PI * I * v).exp());
        let pref = 2.0 * PI * I * (PI * I * (u + v)).exp();
        let el = r_felder(u - v, &dy, &an, &ts).unwrap().scale(pref);
        let tr = r_trig_sos(z, w, &dy, &an).unwrap();
        for (x, y) in el.0.iter().zip(tr.0.iter()) {
            assert!((x - y).norm() <= 1e-8);
        }
    }

    #[test]
    fn mu_to_infinity_gives_gauged_sixvertex() {
        let an = aniso();
        let dy = DynamicalParam::from_mu(c(1e10, 0.0)).unwrap();
        let (z, w) = (c(0.4, 0.9), c(-1.1, 0.3));
        let tr = r_trig_sos(z, w, &dy, &an).unwrap();
        let sv = r_sixvertex_gauged(z, w, &an);
        for (x, y) in tr.0.iter().zip(sv.0.iter()) {
            assert!((x - y).norm() <= 1e-8);
        }
        let z2 = r_trig_sos(z, z, &dy, &an).unwrap();
        assert_eq!(z2.entry(P, M, P, M), ZERO);
    }

    #[test]
    fn embedding_places_legs() {
        let mut m = TensorMatrix2::zeros();
        m.set(P, M, M, P, ONE);
        // leg 0 = +, leg 2 = −, leg 1 spectator (both values)
        let e = m.embed(0, 2);
        assert_eq!(e[(0b001, 0b100)], ONE);
        assert_eq!(e[(0b011, 0b110)], ONE);
        assert_eq!(e.iter().filter(|z| **z != ZERO).count(), 2);
    }
}
