//! Elliptic polynomials of degree `n`: entire functions with
//! `f(u+1) = χ(1) f(u)` and `f(u+τ) = χ(τ) e^{−2πinu−πinτ} f(u)`.
//!
//! Also the theta identities used by the partition-function arguments: the
//! addition formula for Green kernels and the degenerate Fay identity.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::residual::{rel_error, rel_residual};
use crate::theta::ThetaSeries;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Multipliers `(χ(1), χ(τ))` of `Θ_n(χ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Character {
    pub n: usize,
    pub chi1: Complex64,
    pub chi_tau: Complex64,
    /// Defined when `χ(1) = (−1)^n`: `χ(τ) = (−1)^n e^{2πiα}`.
    pub alpha: Option<Complex64>,
}

impl Character {
    pub fn new(n: usize, chi1: Complex64, chi_tau: Complex64) -> Result<Self> {
        if n == 0 {
            return Err(LabError::InvalidParam("character degree must be positive".into()));
        }
        if chi1.norm() == 0.0 || chi_tau.norm() == 0.0 {
            return Err(LabError::InvalidParam("character values must be nonzero".into()));
        }
        let sign = parity(n);
        let alpha = ((chi1 - sign).norm() <= 1e-14).then(|| (chi_tau * sign).ln() / (2.0 * PI * I));
        Ok(Self { n, chi1, chi_tau, alpha })
    }

    /// `χ(1) = (−1)^n`, `χ(τ) = (−1)^n e^{2πiα}`, keeping `α` as given.
    pub fn from_alpha(n: usize, alpha: Complex64) -> Result<Self> {
        let sign = parity(n);
        let mut ch = Self::new(n, Complex64::new(sign, 0.0), sign * (2.0 * PI * I * alpha).exp())?;
        ch.alpha = Some(alpha);
        Ok(ch)
    }
}

fn parity(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `(|f(u+1) − χ(1)f(u)|, |f(u+τ) − χ(τ)e^{−2πinu−πinτ}f(u)|)`, each divided
/// by `max(|lhs|, |rhs|)`.
pub fn character_residuals<F>(f: F, ch: &Character, u: Complex64, ts: &ThetaSeries) -> Result<(f64, f64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let tau = ts.tau();
    let n = ch.n as f64;
    let fu = f(u)?;
    let r1 = rel_error(f(u + 1.0)?, ch.chi1 * fu);
    let mult = ch.chi_tau * (-2.0 * PI * I * n * u - PI * I * n * tau).exp();
    let r2 = rel_error(f(u + tau)?, mult * fu);
    Ok((r1, r2))
}

/// Interpolation nodes `u_1..u_n` with the zero-sum parameter `α`.
#[derive(Debug, Clone)]
pub struct NodeSet {
    pub nodes: Vec<Complex64>,
    pub alpha: Complex64,
}

impl NodeSet {
    /// Checks `u_i − u_j ∉ ℤ+τℤ` and `Σu − α ∉ ℤ+τℤ` against the theta gate.
    pub fn new(nodes: Vec<Complex64>, alpha: Complex64, ts: &ThetaSeries) -> Result<Self> {
        if nodes.is_empty() {
            return Err(LabError::DegenerateNodes("empty node set".into()));
        }
        for i in 0..nodes.len() {
            for j in 0..i {
                if !ts.is_generic(nodes[i] - nodes[j])? {
                    return Err(LabError::DegenerateNodes(format!("u_{} - u_{} on the period lattice", i + 1, j + 1)));
                }
            }
        }
        let s: Complex64 = nodes.iter().sum();
        if !ts.is_generic(s - alpha)? {
            return Err(LabError::DegenerateNodes("sum of nodes minus alpha on the period lattice".into()));
        }
        Ok(Self { nodes, alpha })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn offset(&self) -> Complex64 {
        self.alpha - self.nodes.iter().sum::<Complex64>()
    }
}

/// The unique member of `Θ_n(χ)` with prescribed nodal values.
#[derive(Debug, Clone)]
pub struct Interpolant {
    nodes: NodeSet,
    /// `values[i] / (θ(α−Σu) Π_{k≠i} θ(u_k−u_i))`.
    coeffs: Vec<Complex64>,
    ts: Arc<ThetaSeries>,
}

impl Interpolant {
    pub fn eval(&self, u: Complex64) -> Result<Complex64> {
        let nodes = &self.nodes.nodes;
        let off = self.nodes.offset();
        let tk: Vec<Complex64> = nodes.iter().map(|&k| self.ts.theta(k - u)).collect::<Result<_>>()?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &c) in self.coeffs.iter().enumerate() {
            let mut t = c * self.ts.theta(nodes[i] - u + off)?;
            for (k, &x) in tk.iter().enumerate() {
                if k != i {
                    t *= x;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }
}

/// `P(u) = Σ_i P(u_i) θ(u_i−u+α−Σu_m)/θ(α−Σu_m) Π_{k≠i} θ(u_k−u)/θ(u_k−u_i)`.
pub fn interpolate(values: &[Complex64], nodes: &NodeSet, ch: &Character, ts: &ThetaSeries) -> Result<Interpolant> {
    let n = nodes.len();
    if values.len() != n || ch.n != n {
        return Err(LabError::InvalidParam(format!(
            "{} values and degree {} for {} nodes",
            values.len(),
            ch.n,
            n
        )));
    }
    match ch.alpha {
        Some(a) if (a - nodes.alpha).norm() <= 1e-12 * a.norm().max(1.0) => {}
        _ => {
            if (ch.chi1 - parity(n)).norm() > 1e-14
                || rel_residual(ch.chi_tau, parity(n) * (2.0 * PI * I * nodes.alpha).exp()) > 1e-12
            {
                return Err(LabError::InvalidParam("character inconsistent with the nodes' alpha".into()));
            }
        }
    }
    let off = nodes.offset();
    let base = ts.gated(off, "interpolation: theta(alpha - sum u)")?;
    let coeffs = (0..n)
        .map(|i| {
            let mut d = base;
            for k in 0..n {
                if k != i {
                    d *= ts.gated(nodes.nodes[k] - nodes.nodes[i], "interpolation: theta(u_k - u_i)")?;
                }
            }
            Ok(values[i] / d)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Interpolant {
        nodes: nodes.clone(),
        coeffs,
        ts: Arc::new(ts.clone()),
    })
}

/// `det‖φ_j(u_i)‖ / (θ(Σu−α) Π_{i<j} θ(u_i−u_j))`.
pub fn elliptic_vandermonde_ratio<F>(basis: &[F], nodes: &NodeSet, ts: &ThetaSeries) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let n = nodes.len();
    if basis.len() != n {
        return Err(LabError::InvalidParam(format!("{} basis functions for {} nodes", basis.len(), n)));
    }
    let mut vals = Vec::with_capacity(n * n);
    for i in 0..n {
        for phi in basis {
            vals.push(phi(nodes.nodes[i])?);
        }
    }
    let det = DMatrix::from_row_slice(n, n, &vals).determinant();
    let mut den = ts.gated(-nodes.offset(), "Vandermonde: theta(sum u - alpha)")?;
    for i in 0..n {
        for j in i + 1..n {
            den *= ts.gated(nodes.nodes[i] - nodes.nodes[j], "Vandermonde: theta(u_i - u_j)")?;
        }
    }
    Ok(det / den)
}

/// Residual of
/// `Σ_i Π_{j≠i} G_{λ_j}(u_j−u_i) G_{λ₀}(u_i−v) = Π_i G_{λ_i}(u_i−v)`, `λ₀ = Σλ_i`.
pub fn addition_formula_residual(points: &[Complex64], lambdas: &[Complex64], v: Complex64, ts: &ThetaSeries) -> Result<f64> {
    if points.is_empty() || points.len() != lambdas.len() {
        return Err(LabError::InvalidParam("points and lambdas must be non-empty and of equal length".into()));
    }
    let lam0: Complex64 = lambdas.iter().sum();
    let n = points.len();
    let mut lhs = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let mut t = ts.green(points[i] - v, lam0)?;
        for j in 0..n {
            if j != i {
                t *= ts.green(points[j] - points[i], lambdas[j])?;
            }
        }
        lhs += t;
    }
    let mut rhs = ONE;
    for i in 0..n {
        rhs *= ts.green(points[i] - v, lambdas[i])?;
    }
    Ok(rel_residual(lhs, rhs))
}

/// Residual of the degenerate Fay identity
/// `G_λ(u−z) G_λ(z) = G_λ(u) (θ'(u−z)/θ(u−z) + θ'(z)/θ(z)) − ∂_λ G_λ(u)`.
pub fn fay_residual(u: Complex64, z: Complex64, lam: Complex64, ts: &ThetaSeries) -> Result<f64> {
    let lhs = ts.green(u - z, lam)? * ts.green(z, lam)?;
    let g = ts.green(u, lam)?;
    let rhs = g * (ts.log_derivative(u - z)? + ts.log_derivative(z)?) - ts.green_dlambda(u, lam)?;
    Ok(rel_residual(lhs, rhs))
}
