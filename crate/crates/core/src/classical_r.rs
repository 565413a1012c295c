//! Classical dynamical r-matrix, its Green kernels, degenerations and the
//! averaging construction. Only meromorphic kernels are computed; contour
//! (distribution) semantics are left to the caller.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::perm::pairwise_sum;
use crate::residual::rel_residual;
use crate::rmatrix::{max_rel, DynamicalParam, Matrix8, TensorMatrix2};
use crate::theta::{ThetaSeries, GATE};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Margin on both walls of the analyticity zone for `μ`.
pub const ZONE_MARGIN: f64 = 1e-9;
/// Reference rescaling for degenerations (a) and (c).
pub const REFERENCE_OMEGA: f64 = 100.0;
/// Reference `Im τ` for degeneration (b).
pub const REFERENCE_TAU_B: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreenKind {
    Cartan,
    LambdaPlus(Complex64),
    LambdaMinus(Complex64),
}

/// `G(u,v) = θ'(u−v)/θ(u−v)` or `G^±_λ(u,v) = θ(u−v+λ)/(θ(u−v)θ(λ))`.
/// `G^+` and `G^-` differ only by their integration contours, so both
/// evaluate to the same meromorphic kernel here.
#[derive(Debug, Clone)]
pub struct GreenKernel {
    pub kind: GreenKind,
    pub ts: ThetaSeries,
}

impl GreenKernel {
    pub fn new(kind: GreenKind, ts: ThetaSeries) -> Self {
        Self { kind, ts }
    }

    pub fn lambda(&self) -> Option<Complex64> {
        match self.kind {
            GreenKind::Cartan => None,
            GreenKind::LambdaPlus(l) | GreenKind::LambdaMinus(l) => Some(l),
        }
    }
}

pub fn green_value(k: &GreenKernel, u: Complex64, v: Complex64) -> Result<Complex64> {
    match k.kind {
        GreenKind::Cartan => k.ts.log_derivative(u - v),
        GreenKind::LambdaPlus(l) | GreenKind::LambdaMinus(l) => k.ts.green(u - v, l),
    }
}

fn r_from_kernels(g: Complex64, g_minus: Complex64, g_plus: Complex64) -> TensorMatrix2 {
    let h = g * 0.5;
    TensorMatrix2(Matrix4::new(
        h, Complex64::ZERO, Complex64::ZERO, Complex64::ZERO,
        Complex64::ZERO, -h, g_minus, Complex64::ZERO,
        Complex64::ZERO, g_plus, -h, Complex64::ZERO,
        Complex64::ZERO, Complex64::ZERO, Complex64::ZERO, h,
    ))
}

/// `r_λ⁺(u,v)`: diagonal `±½G`, `(+−,−+)` slot `G_{−λ}`, `(−+,+−)` slot `G_λ`.
pub fn classical_r_plus(u: Complex64, v: Complex64, dyn_: &DynamicalParam, ts: &ThetaSeries) -> Result<TensorMatrix2> {
    let x = u - v;
    let l = dyn_.lambda;
    Ok(r_from_kernels(ts.log_derivative(x)?, ts.green(x, -l)?, ts.green(x, l)?))
}

/// Analytic `∂_λ r_λ⁺(u,v)`.
pub fn classical_r_plus_dlambda(
    u: Complex64,
    v: Complex64,
    dyn_: &DynamicalParam,
    ts: &ThetaSeries,
) -> Result<TensorMatrix2> {
    let x = u - v;
    let l = dyn_.lambda;
    Ok(r_from_kernels(Complex64::ZERO, -ts.green_dlambda(x, -l)?, ts.green_dlambda(x, l)?))
}

fn cartan(leg: usize) -> Matrix8 {
    Matrix8::from_fn(|r, c| {
        if r != c {
            Complex64::ZERO
        } else if (r >> (2 - leg)) & 1 == 0 {
            Complex64::ONE
        } else {
            -Complex64::ONE
        }
    })
}

fn commutator(a: &Matrix8, b: &Matrix8) -> Matrix8 {
    a * b - b * a
}

/// Max-norm of `[r₁₂,r₁₃]+[r₁₂,r₂₃]+[r₁₃,r₂₃] − (H₁∂_λr₂₃ − H₂∂_λr₁₃ + H₃∂_λr₁₂)`,
/// normalized by the largest entry involved.
pub fn cdybe_residual(
    u1: Complex64,
    u2: Complex64,
    u3: Complex64,
    dyn_: &DynamicalParam,
    ts: &ThetaSeries,
) -> Result<f64> {
    let u = [u1, u2, u3];
    let r = |a: usize, b: usize| -> Result<Matrix8> { Ok(classical_r_plus(u[a], u[b], dyn_, ts)?.embed(a, b)) };
    let dr = |a: usize, b: usize| -> Result<Matrix8> {
        Ok(classical_r_plus_dlambda(u[a], u[b], dyn_, ts)?.embed(a, b))
    };
    let (r12, r13, r23) = (r(0, 1)?, r(0, 2)?, r(1, 2)?);
    let lhs = commutator(&r12, &r13) + commutator(&r12, &r23) + commutator(&r13, &r23);
    let rhs = cartan(0) * dr(1, 2)? - cartan(1) * dr(0, 2)? + cartan(2) * dr(0, 1)?;
    Ok(max_rel(&lhs, &rhs))
}

/// `r^{(b)+}(u−v)`, the `τ → i∞`, `λ → −i∞` limit, with `ψ = π cot π(u−v)`.
pub fn r_b_plus(u: Complex64, v: Complex64) -> Result<TensorMatrix2> {
    let [psi, plus, minus] = cot_parts(u - v, "r_b: u - v")?;
    Ok(r_from_kernels(psi, minus, plus))
}

/// Max-norm of `[r₁₂,r₁₃]+[r₁₂,r₂₃]+[r₁₃,r₂₃]`, relative to the largest
/// entry of the three commutators.
pub fn cybe_residual<F>(r: F, u1: Complex64, u2: Complex64, u3: Complex64) -> Result<f64>
where
    F: Fn(Complex64, Complex64) -> Result<TensorMatrix2>,
{
    let r12 = r(u1, u2)?.embed(0, 1);
    let r13 = r(u1, u3)?.embed(0, 2);
    let r23 = r(u2, u3)?.embed(1, 2);
    let (a, b, c) = (commutator(&r12, &r13), commutator(&r12, &r23), commutator(&r13, &r23));
    let scale = a.iter().chain(b.iter()).chain(c.iter()).map(|z| z.norm()).fold(1.0, f64::max);
    Ok((a + b + c).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale)
}

fn pi_cot(x: Complex64, what: &str) -> Result<Complex64> {
    Ok(cot_parts(x, what)?[0])
}

/// `π cot πx`, `π(cot πx + i)`, `π(cot πx − i)`. Built from `e^{±2πix}` on
/// the decaying side so the `± i` shifts never cancel.
fn cot_parts(x: Complex64, what: &str) -> Result<[Complex64; 3]> {
    let up = x.im >= 0.0;
    let w = if up { (2.0 * PI * I * x).exp() } else { (-2.0 * PI * I * x).exp() };
    let d = Complex64::ONE - w;
    if d.norm() <= GATE {
        return Err(LabError::pole(what, d.norm()));
    }
    let t = 2.0 * PI * I / d;
    Ok(if up {
        [-PI * I - t * w, -t * w, -t]
    } else {
        [PI * I + t * w, t, t * w]
    })
}

/// `π e^{−2πiλn}(cot π(u−nτ) + i)`, `π e^{2πiλn}(cot π(u−nτ) − i)` and
/// `π cot π(u−nτ)`, with each phase merged into the exponential of the
/// decaying side so large `|n|` neither overflows nor cancels.
fn averaging_terms(u: Complex64, lambda: Complex64, tau: Complex64, n: i64) -> Result<[Complex64; 3]> {
    let x = u - tau * n as f64;
    let [cot, _, _] = cot_parts(x, "averaging: cot pi(u - n tau)")?;
    let a = 2.0 * PI * I * lambda * n as f64;
    let t = 2.0 * PI * I;
    if x.im >= 0.0 {
        let w = (t * x).exp();
        let d = Complex64::ONE - w;
        Ok([-t * (t * x - a).exp() / d, -t * a.exp() / d, cot])
    } else {
        let w = (-t * x).exp();
        let d = Complex64::ONE - w;
        Ok([t * (-a).exp() / d, t * (a - t * x).exp() / d, cot])
    }
}

/// Degenerate kernels. Rescaling parameters: (a) `u → u/ω`, `λ → λ/ω` at the
/// caller's `τ`; (b) `τ → i∞`; (c) `u → u/ω` with `ωτ = i/η` fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Degeneration {
    /// `1/x + 1/λ`.
    RationalA { lambda: Complex64 },
    /// `π cot πx + π cot πλ`.
    TrigB { lambda: Complex64 },
    /// `2πη e^{−2πημx} / (1 − e^{−2πηx})`, `μ` in the analyticity zone.
    TrigC { mu: Complex64, eta: Complex64 },
    /// `πη coth πηx + πη coth πηλ` (the `μ = 0` branch).
    TrigC0 { lambda: Complex64, eta: Complex64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateValue {
    pub limit: Complex64,
    pub approximant: Complex64,
    pub residual: f64,
}

/// Whether `Im η Im μ / Re η + m < Re μ < Im η Im μ / Re η + 1 − m`.
pub fn mu_in_zone(mu: Complex64, eta: Complex64) -> bool {
    if eta.re <= 0.0 {
        return false;
    }
    let wall = eta.im * mu.im / eta.re;
    mu.re > wall + ZONE_MARGIN && mu.re < wall + 1.0 - ZONE_MARGIN
}

fn check_eta(eta: Complex64) -> Result<()> {
    if eta.re.is_nan() || eta.re <= 0.0 || !eta.im.is_finite() {
        return Err(LabError::InvalidParam(format!("eta must have positive real part, got {eta}")));
    }
    Ok(())
}

/// `τ = i/(ηω)`, the modulus of the rescaled lattice in degeneration (c).
pub fn tau_c(eta: Complex64, omega: f64) -> Complex64 {
    I / (eta * omega)
}

impl Degeneration {
    /// Closed-form limit at `x = u − v`.
    pub fn limit(&self, x: Complex64) -> Result<Complex64> {
        match *self {
            Self::RationalA { lambda } => {
                if x.norm() <= GATE || lambda.norm() <= GATE {
                    return Err(LabError::pole("1/x + 1/lambda", x.norm().min(lambda.norm())));
                }
                Ok(x.inv() + lambda.inv())
            }
            Self::TrigB { lambda } => Ok(pi_cot(x, "cot(pi x)")? + pi_cot(lambda, "cot(pi lambda)")?),
            Self::TrigC { mu, eta } => {
                check_eta(eta)?;
                if !mu_in_zone(mu, eta) {
                    return Err(LabError::InvalidParam(format!("mu = {mu} is outside the analyticity zone for eta = {eta}")));
                }
                let den = Complex64::ONE - (-2.0 * PI * eta * x).exp();
                if den.norm() <= GATE {
                    return Err(LabError::pole("1 - exp(-2 pi eta x)", den.norm()));
                }
                Ok(2.0 * PI * eta * (-2.0 * PI * eta * mu * x).exp() / den)
            }
            Self::TrigC0 { lambda, eta } => {
                check_eta(eta)?;
                let coth = |y: Complex64, what: &str| -> Result<Complex64> {
                    let s = (PI * eta * y).sinh();
                    if s.norm() <= GATE {
                        return Err(LabError::pole(what, s.norm()));
                    }
                    Ok(PI * eta * (PI * eta * y).cosh() / s)
                };
                Ok(coth(x, "coth(pi eta x)")? + coth(lambda, "coth(pi eta lambda)")?)
            }
        }
    }

    /// The elliptic kernel at a finite rescaling: `ω` for (a) and (c), ignored
    /// for (b), which always uses `τ = 30i`. `ts` supplies `τ` for (a) only.
    pub fn approximant(&self, x: Complex64, omega: f64, ts: &ThetaSeries) -> Result<Complex64> {
        match *self {
            Self::RationalA { lambda } => Ok(ts.green(x / omega, lambda / omega)? / omega),
            Self::TrigB { lambda } => ThetaSeries::new(Complex64::new(0.0, REFERENCE_TAU_B))?.green(x, lambda),
            Self::TrigC { mu, eta } => {
                check_eta(eta)?;
                let tc = ThetaSeries::new(tau_c(eta, omega))?;
                let xs = x / omega;
                Ok(tc.theta(mu + xs)? / (tc.gated(xs, "theta(x/omega)")? * tc.gated(mu, "theta(mu)")? * omega))
            }
            Self::TrigC0 { lambda, eta } => {
                check_eta(eta)?;
                let tc = ThetaSeries::new(tau_c(eta, omega))?;
                Ok(tc.green(x / omega, lambda / omega)? / omega)
            }
        }
    }

    pub fn evaluate_at(&self, u: Complex64, v: Complex64, omega: f64, ts: &ThetaSeries) -> Result<DegenerateValue> {
        let limit = self.limit(u - v)?;
        let approximant = self.approximant(u - v, omega, ts)?;
        Ok(DegenerateValue { limit, approximant, residual: rel_residual(limit, approximant) })
    }
}

/// Limit value and its residual against the elliptic kernel at the reference
/// point (`ω = 100` for (a) and (c), `τ = 30i` for (b)).
pub fn degenerate_kernel(kind: Degeneration, u: Complex64, v: Complex64, ts: &ThetaSeries) -> Result<DegenerateValue> {
    kind.evaluate_at(u, v, REFERENCE_OMEGA, ts)
}

/// `h ↦ h`, `e ↦ e^{2πiλ}e`, `f ↦ e^{−2πiλ}f`, realized as conjugation by
/// `diag(e^{πiλ}, e^{−πiλ})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragingAutomorphism {
    pub lambda: Complex64,
}

impl AveragingAutomorphism {
    pub fn new(lambda: Complex64) -> Self {
        Self { lambda }
    }

    fn half_phase(&self, power: i64) -> Complex64 {
        (PI * I * self.lambda * power as f64).exp()
    }

    /// `A^n ⊗ A^n` acting on `ℂ² ⊗ ℂ²` by the conjugating diagonal matrix.
    pub fn tensor_action(&self, n: i64) -> Matrix4<Complex64> {
        let d = [self.half_phase(n), self.half_phase(-n)];
        Matrix4::from_fn(|r, c| if r == c { d[r >> 1] * d[r & 1] } else { Complex64::ZERO })
    }

    /// `(A^n ⊗ id) r`: entry `(αβ, γδ)` picks up `e^{πiλn(s_α − s_γ)}`.
    pub fn apply_first(&self, n: i64, r: &TensorMatrix2) -> TensorMatrix2 {
        let s = |idx: usize| if idx >> 1 == 0 { 1 } else { -1 };
        TensorMatrix2(Matrix4::from_fn(|row, col| {
            r.0[(row, col)] * self.half_phase(n * (s(row) - s(col)))
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragingSum {
    /// Partial sum for `G_λ(u) = θ(u+λ)/(θ(u)θ(λ))`.
    pub g_plus: Complex64,
    /// Partial sum for `G_{−λ}(u)`.
    pub g_minus: Complex64,
    /// Partial sum for `θ'(u)/θ(u)`.
    pub cartan: Complex64,
    /// Max residual of the off-diagonal pair.
    pub residual: f64,
    pub cartan_residual: f64,
}

/// Requires `−Im τ < Im λ < 0`.
pub fn check_averaging_strip(lambda: Complex64, tau: Complex64) -> Result<()> {
    if lambda.im < 0.0 && lambda.im > -tau.im {
        Ok(())
    } else {
        Err(LabError::OutsideStrip(format!(
            "averaging needs -Im tau < Im lambda < 0, got Im lambda = {}, Im tau = {}",
            lambda.im, tau.im
        )))
    }
}

/// `e^{−2π·min(|Im λ|, Im τ − |Im λ|)}`, the geometric rate of the symmetric
/// partial sums.
pub fn averaging_rate(lambda: Complex64, tau: Complex64) -> f64 {
    let d = lambda.im.abs().min(tau.im - lambda.im.abs());
    (-2.0 * PI * d).exp()
}

/// Leading-order size of the neglected terms `|n| > N`: each term is about
/// `2π e^{2π|Im u|}` times a power of the two rates
/// `e^{−2π|Im λ|}` and `e^{−2π(Im τ − |Im λ|)}`.
pub fn averaging_tail_estimate(u: Complex64, lambda: Complex64, tau: Complex64, n: usize) -> f64 {
    let tail = |d: f64| {
        let r = (-2.0 * PI * d).exp();
        r.powi(n as i32 + 1) / (1.0 - r)
    };
    2.0 * PI * (2.0 * PI * u.im.abs()).exp() * (tail(lambda.im.abs()) + tail(tau.im - lambda.im.abs()))
}

/// Symmetric partial sums over `n ∈ [−N, N]` of `π e^{∓2nπiλ}(cot π(u−nτ) ± i)`
/// and `π cot π(u−nτ)`, each compared with its elliptic kernel.
pub fn averaging_partial_sum(u: Complex64, dyn_: &DynamicalParam, ts: &ThetaSeries, n: usize) -> Result<AveragingSum> {
    let tau = ts.tau();
    let lambda = dyn_.lambda;
    check_averaging_strip(lambda, tau)?;
    let n = n as i64;
    let mut plus = Vec::with_capacity(2 * n as usize + 1);
    let mut minus = Vec::with_capacity(2 * n as usize + 1);
    let mut cart = Vec::with_capacity(2 * n as usize + 1);
    for k in -n..=n {
        let [p, m, c] = averaging_terms(u, lambda, tau, k)?;
        plus.push(p);
        minus.push(m);
        cart.push(c);
    }
    let (g_plus, g_minus, cartan) = (pairwise_sum(&plus), pairwise_sum(&minus), pairwise_sum(&cart));
    let residual = rel_residual(g_plus, ts.green(u, lambda)?).max(rel_residual(g_minus, ts.green(u, -lambda)?));
    let cartan_residual = rel_residual(cartan, ts.log_derivative(u)?);
    Ok(AveragingSum { g_plus, g_minus, cartan, residual, cartan_residual })
}

/// Symmetric partial sum of `(A^n ⊗ id) r^{(b)+}(u − nτ)` as a matrix.
pub fn averaged_r_b(u: Complex64, dyn_: &DynamicalParam, ts: &ThetaSeries, n: usize) -> Result<TensorMatrix2> {
    check_averaging_strip(dyn_.lambda, ts.tau())?;
    let a = AveragingAutomorphism::new(dyn_.lambda);
    let n = n as i64;
    let terms = (-n..=n)
        .map(|k| Ok(a.apply_first(k, &r_b_plus(u - ts.tau() * k as f64, Complex64::ZERO)?).0))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Matrix4::zeros();
    for idx in 0..16 {
        let entries: Vec<Complex64> = terms.iter().map(|m| m[idx]).collect();
        out[idx] = pairwise_sum(&entries);
    }
    Ok(TensorMatrix2(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ts_i() -> ThetaSeries {
        ThetaSeries::new(c(0.0, 1.0)).unwrap()
    }

    #[test]
    fn cartan_kernel_is_log_derivative() {
        let ts = ts_i();
        let k = GreenKernel::new(GreenKind::Cartan, ts.clone());
        let x = c(0.25, 0.0);
        let j = ts.jet(x, 1).unwrap();
        assert!(rel_residual(green_value(&k, x, Complex64::ZERO).unwrap(), j[1] / j[0]) < 1e-12);
        assert_eq!(k.lambda(), None);
    }

    #[test]
    fn plus_minus_relation_and_periodicity() {
        let ts = ts_i();
        let (u, v, l) = (c(0.31, 0.12), c(0.07, 0.2), c(0.21, 0.05));
        let gp = green_value(&GreenKernel::new(GreenKind::LambdaPlus(l), ts.clone()), u, v).unwrap();
        let gm = green_value(&GreenKernel::new(GreenKind::LambdaMinus(-l), ts.clone()), v, u).unwrap();
        assert!((gp + gm).norm() < 1e-11);
        let shifted = green_value(&GreenKernel::new(GreenKind::LambdaPlus(l + 1.0), ts.clone()), u, v).unwrap();
        assert!(rel_residual(gp, shifted) < 1e-11);
    }

    #[test]
    fn r_plus_entries() {
        let ts = ts_i();
        let (u, v) = (c(0.4, 0.1), c(0.15, 0.05));
        let d = DynamicalParam::new(c(0.21, 0.05)).unwrap();
        let r = classical_r_plus(u, v, &d, &ts).unwrap();
        let x = u - v;
        let l = d.lambda;
        let want = ts.theta(x - l).unwrap() / (ts.theta(x).unwrap() * ts.theta(-l).unwrap());
        assert!(rel_residual(r.0[(1, 2)], want) < 1e-13);
        let j = ts.jet(x, 1).unwrap();
        assert!(rel_residual(r.0[(0, 0)], j[1] / j[0] * 0.5) < 1e-13);
        assert!(rel_residual(r.0[(2, 2)], -j[1] / j[0] * 0.5) < 1e-13);
    }

    #[test]
    fn reflection_x_to_one_minus_x() {
        // G(1−x) = −G(x) and G_λ(1−x) = −G_{−λ}(x), so the off-diagonal slots swap.
        let ts = ts_i();
        let d = DynamicalParam::new(c(0.33, -0.1)).unwrap();
        let x = c(0.27, 0.08);
        let r = classical_r_plus(x, Complex64::ZERO, &d, &ts).unwrap();
        let s = classical_r_plus(Complex64::ONE - x, Complex64::ZERO, &d, &ts).unwrap();
        let mut want = r.scale(-Complex64::ONE);
        want.0.swap((1, 2), (2, 1));
        let err = (s.0 - want.0).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn dlambda_matches_finite_difference() {
        let ts = ts_i();
        let (u, v) = (c(0.43, 0.17), c(0.12, 0.03));
        let l = c(0.21, 0.05);
        let h = 1e-5;
        let at = |l: Complex64| classical_r_plus(u, v, &DynamicalParam::new(l).unwrap(), &ts).unwrap();
        let fd = (at(l + h).0 - at(l - h).0) / Complex64::from(2.0 * h);
        let an = classical_r_plus_dlambda(u, v, &DynamicalParam::new(l).unwrap(), &ts).unwrap();
        let err = (fd - an.0).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-7, "{err}");
    }

    #[test]
    fn cdybe_holds() {
        let ts = ts_i();
        let d = DynamicalParam::new(c(0.21, 0.05)).unwrap();
        let res = cdybe_residual(c(0.11, 0.07), c(0.46, 0.21), c(0.78, 0.02), &d, &ts).unwrap();
        assert!(res < 1e-9, "{res}");
    }

    #[test]
    fn r_b_satisfies_cybe() {
        let res = cybe_residual(r_b_plus, c(0.13, 0.2), c(0.52, -0.1), c(0.81, 0.05)).unwrap();
        assert!(res < 1e-10, "{res}");
    }

    #[test]
    fn degeneration_b() {
        let ts = ts_i();
        let d = degenerate_kernel(Degeneration::TrigB { lambda: c(0.3, 0.1) }, c(0.45, 0.2), c(0.1, 0.0), &ts).unwrap();
        assert!(d.residual < 1e-10, "{}", d.residual);
    }

    #[test]
    fn degeneration_a_converges_quadratically() {
        let ts = ts_i();
        let k = Degeneration::RationalA { lambda: c(0.7, 0.3) };
        let (u, v) = (c(0.45, 0.2), c(0.1, 0.0));
        let r200 = k.evaluate_at(u, v, 200.0, &ts).unwrap().residual;
        let r400 = k.evaluate_at(u, v, 400.0, &ts).unwrap().residual;
        assert!(r200 < 1e-4, "{r200}");
        let ratio = r200 / r400;
        assert!((ratio - 4.0).abs() < 0.8, "{ratio}");
    }

    #[test]
    fn degeneration_c_with_mu() {
        let ts = ts_i();
        let eta = c(0.1, 0.0);
        let (u, v) = (c(0.9, -2.5), c(0.2, 0.0));
        let d = degenerate_kernel(Degeneration::TrigC { mu: c(0.35, 0.1), eta }, u, v, &ts).unwrap();
        assert!(d.residual < 1e-6, "{}", d.residual);
    }

    #[test]
    fn degeneration_c0_is_first_order() {
        // The modular Gaussian leaves exp(−2πηxλ/ω), so the μ = 0 branch
        // converges like 1/ω.
        let ts = ts_i();
        let k = Degeneration::TrigC0 { lambda: c(1.3, 0.4), eta: c(0.1, 0.0) };
        let (u, v) = (c(0.9, -0.5), c(0.2, 0.0));
        let r100 = k.evaluate_at(u, v, 100.0, &ts).unwrap().residual;
        let r200 = k.evaluate_at(u, v, 200.0, &ts).unwrap().residual;
        assert!((r100 / r200 - 2.0).abs() < 0.4, "{}", r100 / r200);
    }

    #[test]
    fn c0_at_large_lambda_is_c_at_zero_mu() {
        // πη coth πηx + πη coth πηλ → 2πη / (1 − e^{−2πηx}) as Re ηλ → ∞.
        let eta = c(0.1, 0.02);
        let x = c(0.7, -1.3);
        let c0 = Degeneration::TrigC0 { lambda: c(40.0, 0.0), eta }.limit(x).unwrap();
        let mu0 = 2.0 * PI * eta / (Complex64::ONE - (-2.0 * PI * eta * x).exp());
        assert!(rel_residual(c0, mu0) < 1e-6);
        let inside = Degeneration::TrigC { mu: c(1e-6, 0.0), eta }.limit(x).unwrap();
        assert!(rel_residual(inside, mu0) < 1e-5);
    }

    #[test]
    fn zone_is_enforced() {
        let ts = ts_i();
        let eta = c(0.1, 0.0);
        assert!(mu_in_zone(c(0.5, 3.0), eta));
        assert!(!mu_in_zone(c(1.2, 0.0), eta));
        assert!(!mu_in_zone(c(0.0, 0.0), eta));
        let k = Degeneration::TrigC { mu: c(1.2, 0.0), eta };
        assert!(degenerate_kernel(k, c(0.3, 0.0), Complex64::ZERO, &ts).is_err());
    }

    #[test]
    fn averaging_reaches_elliptic_kernels() {
        let ts = ts_i();
        let d = DynamicalParam::new(c(0.0, -0.4)).unwrap();
        let s10 = averaging_partial_sum(c(0.3, 0.1), &d, &ts, 10).unwrap();
        assert!(s10.residual < 1e-8, "{}", s10.residual);
        let s40 = averaging_partial_sum(c(0.3, 0.1), &d, &ts, 40).unwrap();
        assert!(s40.residual < 1e-10 && s40.cartan_residual < 1e-10);
    }

    #[test]
    fn averaging_single_term_matches_tail_estimate() {
        let ts = ThetaSeries::new(c(0.0, 5.0)).unwrap();
        let l = c(0.0, -0.8);
        let u = c(0.3, 0.0);
        let s0 = averaging_partial_sum(u, &DynamicalParam::new(l).unwrap(), &ts, 0).unwrap();
        let err = (s0.g_plus - ts.green(u, l).unwrap()).norm();
        let est = averaging_tail_estimate(u, l, ts.tau(), 0);
        assert!(err <= 1.5 * est && err >= est / 1.5, "{err} vs {est}");
    }

    #[test]
    fn successive_differences_shrink_at_predicted_rate() {
        let ts = ts_i();
        let l = c(0.1, -0.3);
        let d = DynamicalParam::new(l).unwrap();
        let u = c(0.3, 0.1);
        let sums: Vec<Complex64> = (0..=12).map(|n| averaging_partial_sum(u, &d, &ts, n).unwrap().g_plus).collect();
        let rate = averaging_rate(l, ts.tau());
        for n in 2..12 {
            let ratio = (sums[n + 1] - sums[n]).norm() / (sums[n] - sums[n - 1]).norm();
            assert!(ratio <= 1.5 * rate, "n={n}: {ratio} vs {rate}");
        }
    }

    #[test]
    fn averaging_outside_strip_is_refused() {
        let ts = ts_i();
        let d = DynamicalParam::new(c(0.2, 0.3)).unwrap();
        assert!(matches!(averaging_partial_sum(c(0.3, 0.1), &d, &ts, 5), Err(LabError::OutsideStrip(_))));
    }

    #[test]
    fn averaged_r_b_is_r_plus() {
        let ts = ts_i();
        let d = DynamicalParam::new(c(0.15, -0.45)).unwrap();
        let u = c(0.37, 0.12);
        let avg = averaged_r_b(u, &d, &ts, 40).unwrap();
        let r = classical_r_plus(u, Complex64::ZERO, &d, &ts).unwrap();
        let err = (avg.0 - r.0).iter().map(|z| z.norm()).fold(0.0, f64::max) / r.max_abs().max(1.0);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn automorphism_determinant() {
        let a = AveragingAutomorphism::new(c(0.37, 0.0));
        assert!((a.tensor_action(3).determinant().norm() - 1.0).abs() < 1e-14);
    }
}
