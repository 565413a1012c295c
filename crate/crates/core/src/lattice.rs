//! Domain-wall partition functions by configuration enumeration and by
//! column transfer matrices.
//!
//! Geometry: columns `i = 0..n` run from right to left and carry `u_i`
//! (or `z_i`); rows `j = 0..n` run upward and carry `v_j` (or `w_j`).
//! Boundary signs: `+` on top and on the left, `−` on the bottom and on
//! the right. The SOS vertex `(i, j)` uses `R(u_i − v_j; λ_ij)` with
//! `λ_ij = λ + ħ(n−1−i) + ħ Σ_{l>j} δ_il`, `δ_il` being the left edge of
//! vertex `(i, l)`.

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::rmatrix::{r_felder, r_sixvertex, AnisotropyParam, DynamicalParam, Sign, TensorMatrix2};
use crate::theta::ThetaSeries;

pub const ENUM_CAP: usize = 4;
pub const TRANSFER_SIXVERTEX_CAP: usize = 12;
pub const TRANSFER_SOS_CAP: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Arguments of every partition-function route.
#[derive(Debug, Clone)]
pub struct LatticeInstance {
    pub n: usize,
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
    pub dyn_: Option<DynamicalParam>,
    pub aniso: AnisotropyParam,
    pub ts: Option<ThetaSeries>,
}

impl LatticeInstance {
    /// Six-vertex instance in multiplicative variables `z = u`, `w = v`.
    pub fn sixvertex(u: Vec<Complex64>, v: Vec<Complex64>, aniso: AnisotropyParam) -> Result<Self> {
        check_lists(&u, &v)?;
        Ok(Self {
            n: u.len(),
            u,
            v,
            dyn_: None,
            aniso,
            ts: None,
        })
    }

    /// SOS instance; requires `θ(λ + kħ)` above the genericity gate for `|k| ≤ n`.
    pub fn sos(
        u: Vec<Complex64>,
        v: Vec<Complex64>,
        dyn_: DynamicalParam,
        aniso: AnisotropyParam,
        ts: ThetaSeries,
    ) -> Result<Self> {
        check_lists(&u, &v)?;
        let n = u.len() as i32;
        for k in -n..=n {
            ts.gated(dyn_.lambda + k as f64 * aniso.hbar, "SOS instance: theta(lambda + k hbar)")?;
        }
        Ok(Self {
            n: u.len(),
            u,
            v,
            dyn_: Some(dyn_),
            aniso,
            ts: Some(ts),
        })
    }

    pub fn is_sos(&self) -> bool {
        self.dyn_.is_some()
    }

    pub(crate) fn sos_parts(&self) -> Result<(&DynamicalParam, &ThetaSeries)> {
        match (&self.dyn_, &self.ts) {
            (Some(d), Some(t)) => Ok((d, t)),
            _ => Err(LabError::InvalidParam("SOS route called on a six-vertex instance".into())),
        }
    }

    pub(crate) fn require_sixvertex(&self) -> Result<()> {
        if self.is_sos() {
            Err(LabError::InvalidParam("six-vertex route called on an SOS instance".into()))
        } else {
            Ok(())
        }
    }

    /// Same model with `u_i` and `v_j` replaced.
    pub fn with_params(&self, u: Vec<Complex64>, v: Vec<Complex64>) -> Result<Self> {
        check_lists(&u, &v)?;
        Ok(Self {
            n: u.len(),
            u,
            v,
            ..self.clone()
        })
    }

    /// Drops the last column and row parameters (`u_n`, `v_n`).
    pub fn truncated(&self) -> Result<Self> {
        if self.n < 2 {
            return Err(LabError::InvalidParam("cannot truncate n = 1".into()));
        }
        self.with_params(self.u[..self.n - 1].to_vec(), self.v[..self.n - 1].to_vec())
    }

    /// Vertex matrix at column `i`, row `j`, with `s = Σ_{l>j} δ_il` (ignored
    /// for the six-vertex model).
    pub fn vertex_matrix(&self, i: usize, j: usize, s: i32) -> Result<TensorMatrix2> {
        match (&self.dyn_, &self.ts) {
            (Some(d), Some(ts)) => {
                let k = (self.n - 1 - i) as i32 + s;
                r_felder(self.u[i] - self.v[j], &d.shifted(k, &self.aniso), &self.aniso, ts)
            }
            _ => Ok(r_sixvertex(self.u[i], self.v[j], &self.aniso)),
        }
    }
}

fn check_lists(u: &[Complex64], v: &[Complex64]) -> Result<()> {
    if u.is_empty() || u.len() != v.len() {
        return Err(LabError::InvalidParam(format!(
            "spectral lists must be non-empty and of equal length (got {} and {})",
            u.len(),
            v.len()
        )));
    }
    if u.iter().chain(v).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(LabError::NonFinite("LatticeInstance"));
    }
    Ok(())
}

/// Internal edge signs of a DWBC configuration.
///
/// `horizontal[j][k]` is the edge between columns `k` and `k+1` in row `j`;
/// `vertical[j][i]` is the edge between rows `j` and `j+1` in column `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeConfiguration {
    pub n: usize,
    pub horizontal: Vec<Vec<Sign>>,
    pub vertical: Vec<Vec<Sign>>,
}

impl EdgeConfiguration {
    /// `(α, β, γ, δ)` = (top, right, bottom, left) at vertex `(i, j)`.
    pub fn signs_at(&self, i: usize, j: usize) -> (Sign, Sign, Sign, Sign) {
        let n = self.n;
        let top = if j + 1 == n { Sign::Plus } else { self.vertical[j][i] };
        let bottom = if j == 0 { Sign::Minus } else { self.vertical[j - 1][i] };
        let right = if i == 0 { Sign::Minus } else { self.horizontal[j][i - 1] };
        let left = if i + 1 == n { Sign::Plus } else { self.horizontal[j][i] };
        (top, right, bottom, left)
    }

    pub fn satisfies_ice_rule(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let (a, b, c, d) = self.signs_at(i, j);
                a.value() + b.value() == c.value() + d.value()
            })
        })
    }
}

/// All DWBC configurations obeying the ice rule, built row by row from the
/// bottom with per-row pruning.
pub fn enumerate_configurations(n: usize) -> Result<Vec<EdgeConfiguration>> {
    if n == 0 || n > ENUM_CAP {
        return Err(LabError::SizeCap {
            method: "enumerate",
            n,
            cap: ENUM_CAP,
        });
    }
    let mut out = Vec::new();
    let mut horizontal = Vec::with_capacity(n);
    let mut vertical = Vec::with_capacity(n);
    let bottom = vec![Sign::Minus; n];
    rows(n, 0, &bottom, &mut horizontal, &mut vertical, &mut out);
    Ok(out)
}

fn rows(
    n: usize,
    j: usize,
    below: &[Sign],
    horizontal: &mut Vec<Vec<Sign>>,
    vertical: &mut Vec<Vec<Sign>>,
    out: &mut Vec<EdgeConfiguration>,
) {
    if j == n {
        out.push(EdgeConfiguration {
            n,
            horizontal: horizontal.clone(),
            vertical: vertical.clone(),
        });
        return;
    }
    let top_choices: Vec<Vec<Sign>> = if j + 1 == n {
        vec![vec![Sign::Plus; n]]
    } else {
        sign_vectors(n)
    };
    for inner in sign_vectors(n - 1) {
        for top in &top_choices {
            let ok = (0..n).all(|i| {
                let right = if i == 0 { Sign::Minus } else { inner[i - 1] };
                let left = if i + 1 == n { Sign::Plus } else { inner[i] };
                top[i].value() + right.value() == below[i].value() + left.value()
            });
            if !ok {
                continue;
            }
            horizontal.push(inner.clone());
            if j + 1 < n {
                vertical.push(top.clone());
            }
            rows(n, j + 1, top, horizontal, vertical, out);
            horizontal.pop();
            if j + 1 < n {
                vertical.pop();
            }
        }
    }
}

fn sign_vectors(len: usize) -> Vec<Vec<Sign>> {
    (0..1usize << len)
        .map(|mask| (0..len).map(|k| Sign::from_index((mask >> k) & 1)).collect())
        .collect()
}

/// `Π_{ij} R^{α_ij β_ij}_{γ_ij δ_ij}` for one configuration.
pub fn configuration_weight(inst: &LatticeInstance, cfg: &EdgeConfiguration) -> Result<Complex64> {
    let n = inst.n;
    let mut w = Complex64::new(1.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let s: i32 = (j + 1..n).map(|l| cfg.signs_at(i, l).3.value()).sum();
            let (a, b, c, d) = cfg.signs_at(i, j);
            w *= inst.vertex_matrix(i, j, s)?.entry(a, b, c, d);
        }
    }
    Ok(w)
}

fn enumerate(inst: &LatticeInstance) -> Result<Complex64> {
    let cfgs = enumerate_configurations(inst.n)?;
    let mut z = ZERO;
    for cfg in &cfgs {
        z += configuration_weight(inst, cfg)?;
    }
    Ok(z)
}

/// Six-vertex DWBC partition function by exhaustive enumeration (`n ≤ 4`).
pub fn enumerate_sixvertex(inst: &LatticeInstance) -> Result<Complex64> {
    inst.require_sixvertex()?;
    enumerate(inst)
}

/// SOS DWBC partition function by exhaustive enumeration (`n ≤ 4`).
pub fn enumerate_sos(inst: &LatticeInstance) -> Result<Complex64> {
    inst.sos_parts()?;
    enumerate(inst)
}

/// Six-vertex DWBC partition function by column transfer matrices (`n ≤ 12`).
pub fn transfer_sixvertex(inst: &LatticeInstance) -> Result<Complex64> {
    inst.require_sixvertex()?;
    if inst.n > TRANSFER_SIXVERTEX_CAP {
        return Err(LabError::SizeCap {
            method: "transfer_sixvertex",
            n: inst.n,
            cap: TRANSFER_SIXVERTEX_CAP,
        });
    }
    contract(inst, Complex64::new(1.0, 0.0))
}

/// SOS DWBC partition function by column transfer matrices (`n ≤ 10`).
pub fn transfer_sos(inst: &LatticeInstance) -> Result<Complex64> {
    transfer_sos_gauged(inst, Complex64::new(1.0, 0.0))
}

/// [`transfer_sos`] with every vertex gauged by `b ↦ ρb`, `b̄ ↦ ρ⁻¹b̄`.
pub fn transfer_sos_gauged(inst: &LatticeInstance, rho: Complex64) -> Result<Complex64> {
    inst.sos_parts()?;
    if inst.n > TRANSFER_SOS_CAP {
        return Err(LabError::SizeCap {
            method: "transfer_sos",
            n: inst.n,
            cap: TRANSFER_SOS_CAP,
        });
    }
    contract(inst, rho)
}

/// State: bit `j` set ⇔ the horizontal edge of row `j` is `+`; bit `n` holds
/// the running vertical edge. Columns are swept right to left, each one top
/// to bottom, so the rows above `j` already hold their left edges `δ_il`.
fn contract(inst: &LatticeInstance, rho: Complex64) -> Result<Complex64> {
    let n = inst.n;
    let vbit = 1usize << n;
    let mut state = vec![ZERO; 1 << n];
    state[0] = Complex64::new(1.0, 0.0);
    let sos = inst.is_sos();

    for i in 0..n {
        let mut cur = vec![ZERO; 2 << n];
        for (h, &x) in state.iter().enumerate() {
            cur[h | vbit] = x;
        }
        for j in (0..n).rev() {
            let span = (n - 1 - j) as i32;
            let mut table: Vec<Option<Result<TensorMatrix2>>> = vec![None; (2 * span + 1) as usize];
            let mut next = vec![ZERO; 2 << n];
            for (st, &x) in cur.iter().enumerate() {
                if x == ZERO {
                    continue;
                }
                let s = if sos {
                    (j + 1..n).map(|l| if st >> l & 1 == 1 { 1 } else { -1 }).sum()
                } else {
                    0
                };
                let slot = &mut table[(s + span) as usize];
                let r = slot.get_or_insert_with(|| inst.vertex_matrix(i, j, s).map(|m| m.gauge(rho)));
                let r = r.as_ref().map_err(Clone::clone)?;
                let alpha = if st & vbit != 0 { Sign::Plus } else { Sign::Minus };
                let beta = if st >> j & 1 == 1 { Sign::Plus } else { Sign::Minus };
                let mut push = |gamma: Sign, delta: Sign| {
                    let w = r.entry(alpha, beta, gamma, delta);
                    let mut t = st & !vbit & !(1 << j);
                    if delta == Sign::Plus {
                        t |= 1 << j;
                    }
                    if gamma == Sign::Plus {
                        t |= vbit;
                    }
                    next[t] += x * w;
                };
                push(alpha, beta);
                if alpha != beta {
                    push(beta, alpha);
                }
            }
            cur = next;
        }
        state = cur[..vbit].to_vec();
    }
    Ok(state[(1 << n) - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residual::{rel_error, rel_residual};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sv(n: usize) -> LatticeInstance {
        let u = (0..n).map(|k| c(0.4 + 0.3 * k as f64, 0.2 - 0.1 * k as f64)).collect();
        let v = (0..n).map(|k| c(-0.5 + 0.17 * k as f64, 0.6 + 0.05 * k as f64)).collect();
        LatticeInstance::sixvertex(u, v, AnisotropyParam::new(c(0.31, 0.07)).unwrap()).unwrap()
    }

    fn sos(n: usize) -> LatticeInstance {
        let ts = ThetaSeries::new(c(0.0, 1.0)).unwrap();
        let u = (0..n).map(|k| c(0.11 + 0.23 * k as f64, 0.05 * k as f64)).collect();
        let v = (0..n).map(|k| c(0.37 - 0.13 * k as f64, 0.2 - 0.04 * k as f64)).collect();
        let an = AnisotropyParam::new(c(0.31, 0.07)).unwrap();
        LatticeInstance::sos(u, v, DynamicalParam::new(c(0.27, 0.03)).unwrap(), an, ts).unwrap()
    }

    #[test]
    fn configuration_counts_are_alternating_sign_matrices() {
        let counts: Vec<usize> = (1..=4).map(|n| enumerate_configurations(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 7, 42]);
        for cfg in enumerate_configurations(3).unwrap() {
            assert!(cfg.satisfies_ice_rule());
        }
        assert!(matches!(enumerate_configurations(5), Err(LabError::SizeCap { .. })));
    }

    #[test]
    fn n1_values() {
        let inst = sv(1);
        let want = inst.aniso.q_minus_qinv() * inst.v[0];
        assert!(rel_residual(enumerate_sixvertex(&inst).unwrap(), want) < 1e-15);
        assert!(rel_residual(transfer_sixvertex(&inst).unwrap(), want) < 1e-15);

        let inst = sos(1);
        let ts = inst.ts.as_ref().unwrap();
        let l = inst.dyn_.unwrap().lambda;
        let want = ts.theta(inst.u[0] - inst.v[0] - l).unwrap() * ts.theta(inst.aniso.hbar).unwrap() / ts.theta(-l).unwrap();
        assert!(rel_residual(enumerate_sos(&inst).unwrap(), want) < 1e-15);
        assert!(rel_residual(transfer_sos(&inst).unwrap(), want) < 1e-15);
    }

    #[test]
    fn q_one_kills_n1() {
        let an = AnisotropyParam { hbar: ZERO, q: c(1.0, 0.0) };
        let inst = LatticeInstance::sixvertex(vec![c(0.3, 0.0)], vec![c(0.7, 0.1)], an).unwrap();
        assert_eq!(enumerate_sixvertex(&inst).unwrap(), ZERO);
    }

    #[test]
    fn transfer_matches_enumeration() {
        for n in 1..=4 {
            let a = sv(n);
            assert!(rel_error(enumerate_sixvertex(&a).unwrap(), transfer_sixvertex(&a).unwrap()) < 1e-12);
            let b = sos(n);
            assert!(rel_error(enumerate_sos(&b).unwrap(), transfer_sos(&b).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn model_mismatch_is_rejected() {
        assert!(enumerate_sos(&sv(2)).is_err());
        assert!(transfer_sixvertex(&sos(2)).is_err());
    }
}
