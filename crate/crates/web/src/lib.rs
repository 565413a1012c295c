//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string: either the payload or `{"error": ..}`.

use lattice_lab::classical_r::{averaging_partial_sum, averaging_tail_estimate};
use lattice_lab::closed_forms::{izergin, sixvertex_projection_formula, sos_formula};
use lattice_lab::lattice::{enumerate_sixvertex, enumerate_sos, transfer_sixvertex, transfer_sos, LatticeInstance, ENUM_CAP};
use lattice_lab::residual::rel_error;
use lattice_lab::rmatrix::{AnisotropyParam, DynamicalParam};
use lattice_lab::sampling::Sampler;
use lattice_lab::theta::ThetaSeries;
use lattice_lab::{Complex64, LabError, Result};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest `n` offered by the explorer; the permutation sums stay interactive.
pub const MAX_DEMO_N: usize = 6;
pub const MAX_DEMO_TERMS: usize = 60;
const DRAWS: usize = 200;

#[derive(Debug, Serialize)]
pub struct ThetaCurve {
    pub x: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub abs: Vec<f64>,
    pub n_terms: usize,
    pub tail_bound: f64,
}

/// `θ(x + i·y)` for `x` on `[0, 2]`.
pub fn theta_curve(tau: Complex64, y: f64, samples: usize) -> Result<ThetaCurve> {
    let ts = ThetaSeries::new(tau)?;
    let samples = samples.clamp(2, 2000);
    let mut curve = ThetaCurve {
        x: Vec::with_capacity(samples),
        re: Vec::with_capacity(samples),
        im: Vec::with_capacity(samples),
        abs: Vec::with_capacity(samples),
        n_terms: ts.n_terms(),
        tail_bound: ts.tail_bound(),
    };
    for k in 0..samples {
        let x = 2.0 * k as f64 / (samples - 1) as f64;
        let t = ts.theta(Complex64::new(x, y))?;
        curve.x.push(x);
        curve.re.push(t.re);
        curve.im.push(t.im);
        curve.abs.push(t.norm());
    }
    Ok(curve)
}

#[derive(Debug, Serialize)]
pub struct RouteValue {
    pub method: &'static str,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Serialize)]
pub struct Partition {
    pub u: Vec<[f64; 2]>,
    pub v: Vec<[f64; 2]>,
    pub values: Vec<RouteValue>,
    pub max_residual: f64,
}

type Route = fn(&LatticeInstance) -> Result<Complex64>;

fn routes(sos: bool, n: usize) -> Vec<(&'static str, Route)> {
    let mut out: Vec<(&'static str, Route)> = Vec::new();
    if n <= ENUM_CAP {
        out.push(("enum", if sos { enumerate_sos } else { enumerate_sixvertex }));
    }
    if sos {
        out.extend([("transfer", transfer_sos as Route), ("formula", sos_formula)]);
    } else {
        out.extend([("transfer", transfer_sixvertex as Route), ("izergin", izergin), ("projection", sixvertex_projection_formula)]);
    }
    out
}

/// A seeded random instance evaluated by every route that handles `n`.
pub fn partition(sos: bool, n: usize, seed: u64, tau: Complex64, hbar: Complex64, lambda: Complex64) -> Result<Partition> {
    if n == 0 || n > MAX_DEMO_N {
        return Err(LabError::InvalidParam(format!("n must lie in 1..={MAX_DEMO_N}")));
    }
    let ts = ThetaSeries::new(tau)?;
    let aniso = AnisotropyParam::new(hbar)?;
    let routes = routes(sos, n);
    Sampler::new(seed, tau).rejection(DRAWS, |s| {
        let (u, v) = (s.points(n), s.points(n));
        let inst = if sos {
            LatticeInstance::sos(u, v, DynamicalParam::new(lambda)?, aniso, ts.clone())?
        } else {
            LatticeInstance::sixvertex(u, v, aniso)?
        };
        let values = routes.iter().map(|(_, r)| r(&inst)).collect::<Result<Vec<_>>>()?;
        let mut max_residual = 0.0f64;
        for (i, a) in values.iter().enumerate() {
            for b in &values[i + 1..] {
                max_residual = max_residual.max(rel_error(*a, *b));
            }
        }
        let pair = |z: &Complex64| [z.re, z.im];
        Ok(Partition {
            u: inst.u.iter().map(pair).collect(),
            v: inst.v.iter().map(pair).collect(),
            values: routes.iter().zip(&values).map(|((m, _), z)| RouteValue { method: m, re: z.re, im: z.im }).collect(),
            max_residual,
        })
    })
}

#[derive(Debug, Serialize)]
pub struct Convergence {
    pub n: Vec<usize>,
    /// `|S_N − G_λ(u)|`.
    pub error: Vec<f64>,
    pub tail_estimate: Vec<f64>,
    pub exact: [f64; 2],
}

/// Symmetric partial sums of the averaged trigonometric kernel for
/// `N = 0..=max_terms`.
pub fn averaging(u: Complex64, lambda: Complex64, tau: Complex64, max_terms: usize) -> Result<Convergence> {
    let ts = ThetaSeries::new(tau)?;
    let d = DynamicalParam::new(lambda)?;
    let exact = ts.green(u, lambda)?;
    let max_terms = max_terms.min(MAX_DEMO_TERMS);
    let mut out = Convergence {
        n: Vec::new(),
        error: Vec::new(),
        tail_estimate: Vec::new(),
        exact: [exact.re, exact.im],
    };
    for n in 0..=max_terms {
        let s = averaging_partial_sum(u, &d, &ts, n)?;
        out.n.push(n);
        out.error.push((s.g_plus - exact).norm());
        out.tail_estimate.push(averaging_tail_estimate(u, lambda, tau, n));
    }
    Ok(out)
}

fn to_json<T: Serialize>(r: Result<T>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e.to_string()),
    }
}

fn error_json(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

#[wasm_bindgen(js_name = thetaCurve)]
pub fn theta_curve_json(tau_re: f64, tau_im: f64, y: f64, samples: usize) -> String {
    to_json(theta_curve(Complex64::new(tau_re, tau_im), y, samples))
}

#[wasm_bindgen(js_name = partitionFunction)]
#[allow(clippy::too_many_arguments)]
pub fn partition_json(
    model: &str,
    n: usize,
    seed: u32,
    tau_im: f64,
    hbar_re: f64,
    hbar_im: f64,
    lambda_re: f64,
    lambda_im: f64,
) -> String {
    let sos = match model {
        "sos" => true,
        "sixvertex" => false,
        other => return error_json(&format!("unknown model '{other}'")),
    };
    let tau = Complex64::new(0.0, tau_im);
    to_json(partition(sos, n, seed as u64, tau, Complex64::new(hbar_re, hbar_im), Complex64::new(lambda_re, lambda_im)))
}

#[wasm_bindgen(js_name = averagingConvergence)]
pub fn averaging_json(u_re: f64, u_im: f64, lambda_re: f64, lambda_im: f64, tau_im: f64, max_terms: usize) -> String {
    to_json(averaging(
        Complex64::new(u_re, u_im),
        Complex64::new(lambda_re, lambda_im),
        Complex64::new(0.0, tau_im),
        max_terms,
    ))
}
