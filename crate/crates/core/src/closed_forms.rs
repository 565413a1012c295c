//! Closed-form partition functions and the recursions that characterize them.
//!
//! Six-vertex instances carry multiplicative variables (`u = z`, `v = w`);
//! SOS instances carry additive ones. Removable singularities are refused
//! rather than resolved.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};
use num_traits::One;
use twofloat::TwoFloat;

use crate::error::{LabError, Result};
use crate::lattice::LatticeInstance;
use crate::perm::{inversions, perm_sum, MAX_PERM_N};
use crate::residual::rel_error;
use crate::rmatrix::{AnisotropyParam, DynamicalParam};
use crate::theta::ThetaSeries;

pub const IZERGIN_CAP: usize = 12;
/// Relative distance below which a denominator counts as vanishing.
pub const COINCIDENCE_TOL: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn nonzero(d: Complex64, a: Complex64, b: Complex64, what: &str) -> Result<Complex64> {
    if d.norm() <= COINCIDENCE_TOL * a.norm().max(b.norm()).max(1.0) {
        Err(LabError::Coincident(what.to_string()))
    } else {
        Ok(d)
    }
}

fn perm_cap(n: usize, method: &'static str) -> Result<()> {
    if n == 0 || n > MAX_PERM_N {
        Err(LabError::SizeCap { method, n, cap: MAX_PERM_N })
    } else {
        Ok(())
    }
}

/// Izergin's determinant, with each row multiplied through by its
/// denominators so that `qz_i = q⁻¹w_j` is not a pole.
pub fn izergin(inst: &LatticeInstance) -> Result<Complex64> {
    inst.require_sixvertex()?;
    let n = inst.n;
    if n > IZERGIN_CAP {
        return Err(LabError::SizeCap {
            method: "izergin",
            n,
            cap: IZERGIN_CAP,
        });
    }
    let (z, w, q) = (&inst.u, &inst.v, inst.aniso.q);
    let qi = q.inv();
    let mut pref = inst.aniso.q_minus_qinv().powu(n as u32) * w.iter().product::<Complex64>();
    for i in 0..n {
        for j in 0..i {
            pref /= nonzero(z[i] - z[j], z[i], z[j], "izergin: z_i = z_j")?;
            pref /= nonzero(w[j] - w[i], w[i], w[j], "izergin: w_i = w_j")?;
        }
    }
    let m = DMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .filter(|&k| k != j)
            .map(|k| (z[i] - w[k]) * (q * z[i] - qi * w[k]))
            .product::<Complex64>()
    });
    Ok(pref * m.determinant())
}

/// The kernel `K(u; v)`.
pub fn trig_kernel(u: &[Complex64], v: &[Complex64], aniso: &AnisotropyParam) -> Result<Complex64> {
    let n = check_pair(u, v)?;
    let mut k = kernel_prefactor(u, v, aniso)?;
    for m in 0..n {
        k *= kernel_column(u, v[m], m, aniso)?;
    }
    Ok(k)
}

fn check_pair(u: &[Complex64], v: &[Complex64]) -> Result<usize> {
    if u.is_empty() || u.len() != v.len() {
        return Err(LabError::InvalidParam("u and v must be non-empty and of equal length".into()));
    }
    Ok(u.len())
}

fn kernel_prefactor(u: &[Complex64], v: &[Complex64], aniso: &AnisotropyParam) -> Result<Complex64> {
    let (q, qi) = (aniso.q, aniso.q.inv());
    let mut p: Complex64 = v.iter().product();
    for k in 0..u.len() {
        for j in 0..k {
            p *= (u[k] - u[j]) / nonzero(q * u[k] - qi * u[j], q * u[k], qi * u[j], "kernel: q u_k = q^-1 u_j")?;
        }
    }
    Ok(p)
}

/// `Π_{i>k}(qu_i − q⁻¹v) / Π_{i≥k}(u_i − v)`.
fn kernel_column(u: &[Complex64], v: Complex64, k: usize, aniso: &AnisotropyParam) -> Result<Complex64> {
    let (q, qi) = (aniso.q, aniso.q.inv());
    let mut x = ONE;
    for i in k..u.len() {
        if i > k {
            x *= q * u[i] - qi * v;
        }
        x /= nonzero(u[i] - v, u[i], v, "kernel: u_i = v_k")?;
    }
    Ok(x)
}

/// Inversion weight `(qa − q⁻¹b)/(q⁻¹a − qb)` of the `q⁻¹`-action.
fn q_inv_weight(a: Complex64, b: Complex64, q: Complex64) -> Result<Complex64> {
    let qi = q.inv();
    Ok((q * a - qi * b) / nonzero(qi * a - q * b, qi * a, q * b, "q-action: q^-1 v_a = q v_b")?)
}

fn q_inv_table(v: &[Complex64], q: Complex64) -> Result<Vec<Complex64>> {
    let n = v.len();
    let mut g = vec![ONE; n * n];
    for a in 0..n {
        for b in 0..a {
            g[a * n + b] = q_inv_weight(v[a], v[b], q)?;
        }
    }
    Ok(g)
}

/// `𝒦(u, v) = Σ_σ Π_{inv} (qv_{σi} − q⁻¹v_{σj})/(q⁻¹v_{σi} − qv_{σj}) · K(u; v^σ)`.
pub fn q_symmetrized_kernel(u: &[Complex64], v: &[Complex64], aniso: &AnisotropyParam) -> Result<Complex64> {
    let n = check_pair(u, v)?;
    perm_cap(n, "q_symmetrized_kernel")?;
    let pref = kernel_prefactor(u, v, aniso)?;
    let mut f = Vec::with_capacity(n * n);
    for k in 0..n {
        for s in 0..n {
            f.push(kernel_column(u, v[s], k, aniso)?);
        }
    }
    Ok(pref * perm_sum(n, &f, &q_inv_table(v, aniso.q)?))
}

type Cdd = Complex<TwoFloat>;

fn dd(z: Complex64) -> Cdd {
    Cdd::new(z.re.into(), z.im.into())
}

fn from_dd(z: Cdd) -> Complex64 {
    Complex64::new(z.re.into(), z.im.into())
}

fn q_inv_table_dd(w: &[Cdd], q: Cdd) -> Vec<Cdd> {
    let n = w.len();
    let qi = Cdd::one() / q;
    let mut g = vec![Cdd::one(); n * n];
    for a in 0..n {
        for b in 0..a {
            g[a * n + b] = (q * w[a] - qi * w[b]) / (qi * w[a] - q * w[b]);
        }
    }
    g
}

/// The six-vertex partition function as an explicit permutation sum.
///
/// The sum cancels down by roughly `Π|w_k − w_j|`, so it is carried out in
/// double-double arithmetic from the (exact) double inputs.
pub fn sixvertex_projection_formula(inst: &LatticeInstance) -> Result<Complex64> {
    inst.require_sixvertex()?;
    let n = inst.n;
    perm_cap(n, "sixvertex_projection_formula")?;
    let (z, w) = (&inst.u, &inst.v);
    // Gates in double precision; the table itself is rebuilt below.
    q_inv_table(w, inst.aniso.q)?;
    for k in 0..n {
        for j in 0..k {
            nonzero(w[k] - w[j], w[k], w[j], "projection: w_k = w_j")?;
        }
    }
    let z: Vec<Cdd> = z.iter().map(|&x| dd(x)).collect();
    let w: Vec<Cdd> = w.iter().map(|&x| dd(x)).collect();
    let q = dd(inst.aniso.q);
    let qi = Cdd::one() / q;
    let mut pref = w.iter().fold(Cdd::one(), |p, &x| p * x);
    for _ in 0..n {
        pref *= q - qi;
    }
    for k in 0..n {
        for j in 0..k {
            pref = pref * (qi * w[k] - q * w[j]) / (w[k] - w[j]);
        }
    }
    let f: Vec<Cdd> = (0..n)
        .flat_map(|k| {
            let (z, w) = (&z, &w);
            (0..n).map(move |s| {
                let above = (k + 1..n).fold(Cdd::one(), |p, i| p * (q * z[i] - qi * w[s]));
                (0..k).fold(above, |p, i| p * (z[i] - w[s]))
            })
        })
        .collect();
    Ok(from_dd(pref * perm_sum(n, &f, &q_inv_table_dd(&w, q))))
}

/// Elliptic projection kernel
/// `Π_{k>m} θ(u_k−u_m)/θ(u_k−u_m+ħ) · Π_{k>m} θ(u_k−v_m+ħ)/θ(u_k−v_m)
///  · Π_m θ(u_m−v_m−λ−(m−1)ħ)/(θ(u_m−v_m)θ(−λ−(m−1)ħ))`.
pub fn elliptic_projection_kernel(
    u: &[Complex64],
    v: &[Complex64],
    dyn_: &DynamicalParam,
    aniso: &AnisotropyParam,
    ts: &ThetaSeries,
) -> Result<Complex64> {
    let n = check_pair(u, v)?;
    let h = aniso.hbar;
    let lam = dyn_.lambda;
    let mut p = ONE;
    for k in 0..n {
        for m in 0..k {
            p *= ts.theta(u[k] - u[m])? / ts.gated(u[k] - u[m] + h, "projection kernel: theta(u_k - u_m + hbar)")?;
            p *= ts.theta(u[k] - v[m] + h)? / ts.gated(u[k] - v[m], "projection kernel: theta(u_k - v_m)")?;
        }
    }
    for m in 0..n {
        let shift = lam + m as f64 * h;
        p *= ts.theta(u[m] - v[m] - shift)?
            / (ts.gated(u[m] - v[m], "projection kernel: theta(u_m - v_m)")?
                * ts.gated(-shift, "projection kernel: theta(-lambda - (m-1) hbar)")?);
    }
    Ok(p)
}

/// The SOS partition function as an `ħ`-symmetrized sum.
pub fn sos_formula(inst: &LatticeInstance) -> Result<Complex64> {
    let (dyn_, ts) = inst.sos_parts()?;
    let n = inst.n;
    perm_cap(n, "sos_formula")?;
    let (u, v, h) = (&inst.u, &inst.v, inst.aniso.hbar);
    let lam = dyn_.lambda;
    let th = ts.theta(h)?;

    let mut pref = ONE;
    for k in 0..n {
        for m in 0..k {
            pref *= ts.theta(v[k] - v[m] - h)? / ts.gated(v[k] - v[m], "sos formula: theta(v_k - v_m)")?;
        }
    }
    let mut tu = vec![ONE; n * n];
    let mut tuh = vec![ONE; n * n];
    for k in 0..n {
        for s in 0..n {
            tu[k * n + s] = ts.theta(u[k] - v[s])?;
            tuh[k * n + s] = ts.theta(u[k] - v[s] + h)?;
        }
    }
    let mut f = Vec::with_capacity(n * n);
    for m in 0..n {
        let shift = lam + m as f64 * h;
        let den = ts.gated(-shift, "sos formula: theta(-lambda - (m-1) hbar)")?;
        for s in 0..n {
            let mut x = ts.theta(u[m] - v[s] - shift)? * th / den;
            for k in 0..m {
                x *= tu[k * n + s];
            }
            for k in m + 1..n {
                x *= tuh[k * n + s];
            }
            f.push(x);
        }
    }
    let mut g = vec![ONE; n * n];
    for a in 0..n {
        for b in 0..a {
            g[a * n + b] = ts.theta(v[a] - v[b] + h)? / ts.gated(v[a] - v[b] - h, "sos formula: theta(v_a - v_b - hbar)")?;
        }
    }
    Ok(pref * perm_sum(n, &f, &g))
}

/// Trigonometric SOS partition function of an additive SOS instance, via
/// `z = e^{2πiu}`, `w = e^{2πiv}`, `μ = e^{2πiλ}`.
pub fn trig_sos_formula(inst: &LatticeInstance) -> Result<Complex64> {
    let (dyn_, _) = inst.sos_parts()?;
    let e = |x: &Complex64| (2.0 * PI * I * x).exp();
    let z: Vec<Complex64> = inst.u.iter().map(e).collect();
    let w: Vec<Complex64> = inst.v.iter().map(e).collect();
    trig_sos_formula_mult(&z, &w, dyn_.mu, &inst.aniso)
}

/// Trigonometric SOS partition function in multiplicative variables.
///
/// Same cancellation as the six-vertex permutation sum, hence the same
/// double-double evaluation.
pub fn trig_sos_formula_mult(z: &[Complex64], w: &[Complex64], mu: Complex64, aniso: &AnisotropyParam) -> Result<Complex64> {
    let n = check_pair(z, w)?;
    perm_cap(n, "trig_sos_formula")?;
    q_inv_table(w, aniso.q)?;
    for a in 0..n {
        for m in 0..a {
            nonzero(w[a] - w[m], w[a], w[m], "trig sos: w_k = w_m")?;
        }
    }
    for m in 0..n {
        let mq = mu * aniso.q.powi(2 * m as i32);
        nonzero(ONE - mq, ONE, mq, "trig sos: mu q^{2(m-1)} = 1")?;
    }
    let z: Vec<Cdd> = z.iter().map(|&x| dd(x)).collect();
    let w: Vec<Cdd> = w.iter().map(|&x| dd(x)).collect();
    let q = dd(aniso.q);
    let qi = Cdd::one() / q;
    let k = q - qi;
    let mut pref = Cdd::one();
    for a in 0..n {
        for m in 0..a {
            pref = pref * (w[a] * qi - w[m] * q) / (w[a] - w[m]);
        }
    }
    let mut f = Vec::with_capacity(n * n);
    let mut mq = dd(mu);
    for m in 0..n {
        let den = Cdd::one() - mq;
        for s in 0..n {
            let mut x = (z[m] - w[s] * mq) * k / den;
            for a in 0..m {
                x *= z[a] - w[s];
            }
            for a in m + 1..n {
                x *= z[a] * q - w[s] * qi;
            }
            f.push(x);
        }
        mq = mq * q * q;
    }
    Ok(from_dd(pref * perm_sum(n, &f, &q_inv_table_dd(&w, q))))
}

/// Residual of the six-vertex recursion at `u_n = q⁻²v_n`:
/// `Z^{(n)} = (q−q⁻¹) v_n Π_{k<n} (u_k − v_n)(q⁻²v_n − v_k) · Z^{(n−1)}`.
pub fn korepin_residual_sixvertex<F>(inst: &LatticeInstance, z: F) -> Result<f64>
where
    F: Fn(&LatticeInstance) -> Result<Complex64>,
{
    inst.require_sixvertex()?;
    let n = inst.n;
    if n < 2 {
        return Err(LabError::InvalidParam("recursion needs n >= 2".into()));
    }
    let qi = inst.aniso.q.inv();
    let vn = inst.v[n - 1];
    let mut u = inst.u.clone();
    u[n - 1] = qi * qi * vn;
    let full = z(&inst.with_params(u.clone(), inst.v.clone())?)?;
    // At u_n = q⁻²v_n the top-left vertex is forced to c̄, its column to b̄
    // and its row to b.
    let mut pref = inst.aniso.q_minus_qinv() * vn;
    for k in 0..n - 1 {
        pref *= (u[k] - vn) * (u[n - 1] - inst.v[k]);
    }
    let lower = z(&inst.truncated()?)?;
    Ok(rel_error(full, pref * lower))
}

/// Residual of the SOS recursion at `u_n = v_n − ħ`.
pub fn korepin_residual_sos<F>(inst: &LatticeInstance, z: F) -> Result<f64>
where
    F: Fn(&LatticeInstance) -> Result<Complex64>,
{
    let (dyn_, ts) = inst.sos_parts()?;
    let n = inst.n;
    if n < 2 {
        return Err(LabError::InvalidParam("recursion needs n >= 2".into()));
    }
    let h = inst.aniso.hbar;
    let lam = dyn_.lambda;
    let vn = inst.v[n - 1];
    let mut u = inst.u.clone();
    u[n - 1] = vn - h;
    let full = z(&inst.with_params(u.clone(), inst.v.clone())?)?;
    let nf = n as f64;
    let mut pref = ts.theta(lam + nf * h)? * ts.theta(h)? / ts.gated(lam + (nf - 1.0) * h, "recursion: theta(lambda + (n-1) hbar)")?;
    for m in 0..n - 1 {
        pref *= ts.theta(vn - inst.v[m] - h)? * ts.theta(u[m] - vn)?;
    }
    let lower = z(&inst.truncated()?)?;
    Ok(rel_error(full, pref * lower))
}

/// `Π_{inv(σ)} θ(v_{σ(l)} − v_{σ(l')} − ħ) / θ(v_{σ(l)} − v_{σ(l')} + ħ)`;
/// `sigma` is 0-based.
pub fn hbar_symmetrization_weight(sigma: &[usize], v: &[Complex64], hbar: Complex64, ts: &ThetaSeries) -> Result<Complex64> {
    check_permutation(sigma, v.len())?;
    let mut w = ONE;
    for (a, b) in inversions(sigma) {
        let x = v[a] - v[b];
        w *= ts.theta(x - hbar)? / ts.gated(x + hbar, "hbar action: theta(v_a - v_b + hbar)")?;
    }
    Ok(w)
}

fn check_permutation(sigma: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if sigma.len() != n {
        return Err(LabError::InvalidParam(format!("permutation of length {} for n = {n}", sigma.len())));
    }
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(LabError::InvalidParam(format!("{sigma:?} is not a permutation")));
        }
        seen[s] = true;
    }
    Ok(())
}

/// A permutation together with its symmetrization weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationWeight {
    pub sigma: Vec<usize>,
    pub weight: Complex64,
}

impl PermutationWeight {
    pub fn hbar(sigma: Vec<usize>, v: &[Complex64], hbar: Complex64, ts: &ThetaSeries) -> Result<Self> {
        let weight = hbar_symmetrization_weight(&sigma, v, hbar, ts)?;
        Ok(Self { sigma, weight })
    }

    /// Weight of the `q⁻¹`-action on the `v` variables.
    pub fn q_inverse(sigma: Vec<usize>, v: &[Complex64], q: Complex64) -> Result<Self> {
        check_permutation(&sigma, v.len())?;
        let mut weight = ONE;
        for (a, b) in inversions(&sigma) {
            weight *= q_inv_weight(v[a], v[b], q)?;
        }
        Ok(Self { sigma, weight })
    }
}
