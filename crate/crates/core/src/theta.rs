//! The odd Jacobi theta function normalized by `θ'(0) = 1`.
//!
//! `θ(u) = ϑ₁(u) / ϑ₁'(0)` with
//! `ϑ₁(u) = Σ_k exp(πiτ(k+½)² + 2πi(k+½)(u+½))`, so that
//!
//! ```text
//! θ(u+1) = −θ(u),   θ(u+τ) = −exp(−2πiu − πiτ) θ(u),   θ'(0) = 1.
//! ```
//!
//! Arguments are reduced into the strip `|Re u| ≤ ½, |Im u| ≤ Im τ / 2`
//! before summation and the quasi-periodicity factor is applied exactly.
//! Both the numerator series and the normalization `ϑ₁'(0)` are computed from
//! the same truncation, so `θ'(0) = 1` holds at every truncation order.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{LabError, Result};

/// Smallest `Im τ` accepted by [`ThetaSeries`].
pub const MIN_IM_TAU: f64 = 0.05;
/// Default bound on the truncation remainder.
pub const DEFAULT_TAIL_TOL: f64 = 1e-18;
/// Largest truncation the default policy will try.
pub const MAX_TERMS: usize = 400;
/// Relative size below which `θ(x)` counts as a lattice point.
pub const GATE: f64 = 1e-6;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Modular parameter `τ` with `Im τ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularParam {
    tau: Complex64,
}

impl ModularParam {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(LabError::NonFinite("ModularParam::new"));
        }
        if tau.im <= 0.0 {
            return Err(LabError::BadTau {
                im: tau.im,
                min: 0.0,
            });
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    /// `q = exp(πiτ)`.
    pub fn nome(&self) -> Complex64 {
        (I * PI * self.tau).exp()
    }
}

/// Truncated q-series evaluator for `θ(u|τ)` and its first three derivatives.
///
/// Immutable after construction; cheap to clone and safe to share.
#[derive(Debug, Clone)]
pub struct ThetaSeries {
    tau: ModularParam,
    n_terms: usize,
    tail_bound: f64,
    /// `(2πm, (−1)^k q^{m²})` for `m = k + ½`, `k = 0..n_terms`.
    terms: Vec<(f64, Complex64)>,
    inv_norm: Complex64,
}

impl ThetaSeries {
    /// Default truncation: the smallest `n_terms` whose certified remainder is
    /// below [`DEFAULT_TAIL_TOL`].
    pub fn new(tau: Complex64) -> Result<Self> {
        Self::with_tolerance(tau, DEFAULT_TAIL_TOL)
    }

    pub fn with_tolerance(tau: Complex64, tol: f64) -> Result<Self> {
        let tau = Self::check_tau(tau)?;
        let mut last = f64::INFINITY;
        for n in 1..=MAX_TERMS {
            let ts = Self::build(tau, n);
            if ts.tail_bound < tol {
                return Ok(ts);
            }
            last = ts.tail_bound;
        }
        Err(LabError::Truncation {
            tail: last,
            tol,
            n_terms: MAX_TERMS,
        })
    }

    /// Fixed truncation: `n_terms` pairs `±(k+½)`, `k = 0..n_terms`.
    pub fn with_terms(tau: Complex64, n_terms: usize) -> Result<Self> {
        let tau = Self::check_tau(tau)?;
        if n_terms == 0 {
            return Err(LabError::InvalidParam("n_terms must be positive".into()));
        }
        Ok(Self::build(tau, n_terms))
    }

    fn check_tau(tau: Complex64) -> Result<ModularParam> {
        let tau = ModularParam::new(tau)?;
        if tau.tau.im < MIN_IM_TAU {
            return Err(LabError::BadTau {
                im: tau.tau.im,
                min: MIN_IM_TAU,
            });
        }
        Ok(tau)
    }

    fn build(tau: ModularParam, n_terms: usize) -> Self {
        let t = tau.tau.im;
        let terms: Vec<(f64, Complex64)> = (0..n_terms)
            .map(|k| {
                let m = k as f64 + 0.5;
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                (2.0 * PI * m, sign * (I * PI * tau.tau * m * m).exp())
            })
            .collect();
        let norm: Complex64 = terms.iter().map(|&(w, c)| c * w).sum();

        // |sin(2πmu)| ≤ exp(πmt) on the reduced strip, hence the weights below.
        let strip_sum: f64 = (0..n_terms)
            .map(|k| {
                let m = k as f64 + 0.5;
                (-PI * t * (m * m - m)).exp()
            })
            .sum();
        let (mut tail0, mut tail1) = (0.0, 0.0);
        for k in n_terms..n_terms + 2000 {
            let m = k as f64 + 0.5;
            let e0 = (-PI * t * (m * m - m)).exp();
            let e1 = 2.0 * PI * m * (-PI * t * m * m).exp();
            tail0 += e0;
            tail1 += e1;
            if e0 < 1e-300 && e1 < 1e-300 {
                break;
            }
        }
        let nabs = norm.norm();
        let tail_bound = tail0 / nabs + strip_sum * tail1 / (nabs * nabs);

        Self {
            tau,
            n_terms,
            tail_bound,
            terms,
            inv_norm: norm.inv(),
        }
    }

    pub fn tau(&self) -> Complex64 {
        self.tau.tau
    }

    pub fn modular(&self) -> ModularParam {
        self.tau
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    /// Certified bound on the truncation error of `θ` on the reduced strip.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `θ(u)`.
    pub fn theta(&self, u: Complex64) -> Result<Complex64> {
        Ok(self.jet(u, 0)?[0])
    }

    /// `θ^{(order)}(u)` for `order ∈ {0, 1, 2, 3}`, by termwise differentiation.
    pub fn theta_derivative(&self, u: Complex64, order: usize) -> Result<Complex64> {
        if order > 3 {
            return Err(LabError::DerivativeOrder(order));
        }
        Ok(self.jet(u, order)?[order])
    }

    /// `[θ, θ', θ'', θ''']` at `u`; entries above `order` are left at zero.
    pub fn jet(&self, u: Complex64, order: usize) -> Result<[Complex64; 4]> {
        if !u.re.is_finite() || !u.im.is_finite() {
            return Err(LabError::NonFinite("theta"));
        }
        if order > 3 {
            return Err(LabError::DerivativeOrder(order));
        }
        let tau = self.tau.tau;
        let b = (u.im / tau.im).round();
        let u1 = u - b * tau;
        let a = u1.re.round();
        let u0 = u1 - a;

        let mut s = [Complex64::new(0.0, 0.0); 4];
        for &(w, c) in &self.terms {
            let x = u0 * w;
            let (sn, cs) = (x.sin(), x.cos());
            s[0] += c * sn;
            if order >= 1 {
                s[1] += c * w * cs;
            }
            if order >= 2 {
                s[2] -= c * (w * w) * sn;
            }
            if order >= 3 {
                s[3] -= c * (w * w * w) * cs;
            }
        }
        for v in s.iter_mut() {
            *v *= self.inv_norm;
        }
        if a == 0.0 && b == 0.0 {
            return Ok(s);
        }

        // θ(u) = F(u) θ(u0),  F(u) = (−1)^{a+b} exp(−2πib(u − a − bτ) − πiτb²),
        // F' = −2πib F.
        let parity = ((a + b) as i64).rem_euclid(2);
        let sign = if parity == 0 { 1.0 } else { -1.0 };
        let f = sign * (-2.0 * PI * I * b * u0 - PI * I * tau * b * b).exp();
        let g = -2.0 * PI * I * b;
        let mut out = [Complex64::new(0.0, 0.0); 4];
        let binom = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
        for k in 0..=order {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut gp = Complex64::new(1.0, 0.0);
            for j in 0..=k {
                acc += binom[k][j] * gp * s[k - j];
                gp *= g;
            }
            out[k] = f * acc;
        }
        Ok(out)
    }

    /// `|θ(u) − sin(πu)/π|`, meaningful in the strip `|Im u| < Im τ / 2`.
    pub fn trig_limit_residual(&self, u: Complex64) -> Result<f64> {
        let half = self.tau.tau.im / 2.0;
        if u.im.abs() >= half {
            return Err(LabError::OutsideStrip(format!(
                "|Im u| = {} not below Im(tau)/2 = {}",
                u.im.abs(),
                half
            )));
        }
        let th = self.theta(u)?;
        Ok((th - (u * PI).sin() / PI).norm())
    }

    /// Whether `x` passes the lattice-point gate `|θ(x)| > GATE·max(1, |θ'(x)|)`.
    pub fn is_generic(&self, x: Complex64) -> Result<bool> {
        let j = self.jet(x, 1)?;
        Ok(j[0].norm() > GATE * j[1].norm().max(1.0))
    }

    /// `θ(x)`, refusing values at (or numerically next to) a lattice point.
    pub fn gated(&self, x: Complex64, what: &str) -> Result<Complex64> {
        let j = self.jet(x, 1)?;
        if j[0].norm() > GATE * j[1].norm().max(1.0) {
            Ok(j[0])
        } else {
            Err(LabError::pole(what, j[0].norm()))
        }
    }

    /// `θ'(x)/θ(x)`.
    pub fn log_derivative(&self, x: Complex64) -> Result<Complex64> {
        let j = self.jet(x, 1)?;
        if j[0].norm() > GATE * j[1].norm().max(1.0) {
            Ok(j[1] / j[0])
        } else {
            Err(LabError::pole("theta'/theta", j[0].norm()))
        }
    }

    /// `G_λ(x) = θ(x+λ) / (θ(x) θ(λ))`.
    pub fn green(&self, x: Complex64, lambda: Complex64) -> Result<Complex64> {
        let num = self.theta(x + lambda)?;
        Ok(num / (self.gated(x, "G_lambda(x): theta(x)")? * self.gated(lambda, "G_lambda(x): theta(lambda)")?))
    }

    /// `∂_λ G_λ(x) = G_λ(x) (θ'(x+λ)/θ(x+λ) − θ'(λ)/θ(λ))`, written without
    /// dividing by `θ(x+λ)`.
    pub fn green_dlambda(&self, x: Complex64, lambda: Complex64) -> Result<Complex64> {
        let jn = self.jet(x + lambda, 1)?;
        let tx = self.gated(x, "dG_lambda: theta(x)")?;
        let jl = self.jet(lambda, 1)?;
        if jl[0].norm() <= GATE * jl[1].norm().max(1.0) {
            return Err(LabError::pole("dG_lambda: theta(lambda)", jl[0].norm()));
        }
        let tl = jl[0];
        Ok(jn[1] / (tx * tl) - jn[0] * jl[1] / (tx * tl * tl))
    }
}
