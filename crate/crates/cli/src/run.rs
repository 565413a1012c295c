use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use lattice_lab::closed_forms::{izergin, korepin_residual_sixvertex, korepin_residual_sos, sixvertex_projection_formula, sos_formula};
use lattice_lab::elliptic_poly::{character_residuals, Character};
use lattice_lab::lattice::{enumerate_sixvertex, enumerate_sos, transfer_sixvertex, transfer_sos, LatticeInstance};
use lattice_lab::residual::rel_error;
use lattice_lab::rmatrix::{dybe_residual, r_sixvertex, ybe_residual, AnisotropyParam, DynamicalParam};
use lattice_lab::sampling::Sampler;
use lattice_lab::theta::ThetaSeries;
use lattice_lab::{Complex64, LabError};

use crate::config::{ConfigError, Method, Model, RunConfig};
use crate::report::{Check, ConfigEcho, EvalReport, MethodValue, ResidualMatrix, RunEcho};

const MAX_DRAWS: usize = 1000;
/// Minimal separation of multiplicative six-vertex parameters.
const SEPARATION: f64 = 1e-6;

const DEGREE_RADIUS: f64 = 0.25;

pub fn evaluate(method: Method, inst: &LatticeInstance) -> lattice_lab::Result<Complex64> {
    match (method, inst.is_sos()) {
        (Method::Enum, false) => enumerate_sixvertex(inst),
        (Method::Enum, true) => enumerate_sos(inst),
        (Method::Transfer, false) => transfer_sixvertex(inst),
        (Method::Transfer, true) => transfer_sos(inst),
        (Method::Izergin, false) => izergin(inst),
        (Method::Projection, false) => sixvertex_projection_formula(inst),
        (Method::Formula, true) => sos_formula(inst),
        (m, _) => Err(LabError::InvalidParam(format!("method {m} does not apply to this model"))),
    }
}

fn theta_series(tau: Complex64, trunc: Option<usize>) -> lattice_lab::Result<ThetaSeries> {
    match trunc {
        Some(n) => ThetaSeries::with_terms(tau, n),
        None => ThetaSeries::new(tau),
    }
}

/// Differences the closed forms divide by, checked for both models.
fn sixvertex_generic(u: &[Complex64], v: &[Complex64], aniso: &AnisotropyParam) -> bool {
    let q = aniso.q;
    let qi = q.inv();
    let far = |a: Complex64, b: Complex64| (a - b).norm() > SEPARATION * a.norm().max(b.norm()).max(1.0);
    let n = u.len();
    for i in 0..n {
        for j in 0..n {
            if i != j && (!far(u[i], u[j]) || !far(v[i], v[j])) {
                return false;
            }
            if !far(u[i], v[j]) || !far(q * u[i], qi * v[j]) || !far(qi * u[i], q * v[j]) {
                return false;
            }
            if !far(u[i], qi * qi * v[j]) {
                return false;
            }
        }
    }
    true
}

fn sos_generic(u: &[Complex64], v: &[Complex64], hbar: Complex64, ts: &ThetaSeries) -> lattice_lab::Result<bool> {
    let n = u.len();
    let mut diffs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                diffs.extend([u[i] - u[j], v[i] - v[j], v[i] - v[j] + hbar, v[i] - v[j] - hbar]);
            }
            diffs.extend([u[i] - v[j], u[i] - v[j] + hbar, u[i] - v[j] - hbar]);
        }
    }
    for d in diffs {
        if !ts.is_generic(d)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Draws `u`, `v` (unless fixed) until every route's denominators clear the
/// genericity gates.
#[allow(clippy::too_many_arguments)]
pub fn draw_instance(
    sampler: &mut Sampler,
    model: Model,
    n: usize,
    aniso: AnisotropyParam,
    lambda: Complex64,
    ts: &ThetaSeries,
    fixed_u: Option<&[Complex64]>,
    fixed_v: Option<&[Complex64]>,
) -> lattice_lab::Result<LatticeInstance> {
    sampler.rejection(MAX_DRAWS, |s| {
        let u = fixed_u.map_or_else(|| s.points(n), <[_]>::to_vec);
        let v = fixed_v.map_or_else(|| s.points(n), <[_]>::to_vec);
        let ok = match model {
            Model::Sixvertex => sixvertex_generic(&u, &v, &aniso),
            Model::Sos => sos_generic(&u, &v, aniso.hbar, ts)?,
        };
        if !ok {
            return Err(LabError::Coincident("random draw too close to a pole".into()));
        }
        match model {
            Model::Sixvertex => LatticeInstance::sixvertex(u, v, aniso),
            Model::Sos => LatticeInstance::sos(u, v, DynamicalParam::new(lambda)?, aniso, ts.clone()),
        }
    })
}

struct Setup {
    inst: LatticeInstance,
    ts: ThetaSeries,
    sampler: Sampler,
}

fn setup(cfg: &RunConfig) -> Result<Setup, ConfigError> {
    let cerr = |e: LabError| ConfigError(e.to_string());
    let ts = theta_series(cfg.tau, cfg.trunc).map_err(cerr)?;
    let aniso = match (cfg.model, cfg.q) {
        (Model::Sixvertex, Some(q)) => AnisotropyParam::from_q(q),
        _ => AnisotropyParam::new(cfg.hbar),
    }
    .map_err(cerr)?;
    let mut sampler = Sampler::new(cfg.seed, cfg.tau);
    let inst = match (&cfg.u, &cfg.v) {
        // Explicit parameters are taken as given, even near a pole.
        (Some(u), Some(v)) => match cfg.model {
            Model::Sixvertex => LatticeInstance::sixvertex(u.clone(), v.clone(), aniso),
            Model::Sos => DynamicalParam::new(cfg.lambda)
                .and_then(|d| LatticeInstance::sos(u.clone(), v.clone(), d, aniso, ts.clone())),
        }
        .map_err(cerr)?,
        (u, v) => draw_instance(&mut sampler, cfg.model, cfg.n, aniso, cfg.lambda, &ts, u.as_deref(), v.as_deref())
            .map_err(|e| ConfigError(format!("could not draw a generic instance: {e}")))?,
    };
    Ok(Setup { inst, ts, sampler })
}

/// Closed forms first: they are the cheapest route for the derived checks.
fn check_route(methods: &[Method]) -> Method {
    [Method::Formula, Method::Izergin, Method::Projection, Method::Transfer, Method::Enum]
        .into_iter()
        .find(|m| methods.contains(m))
        .expect("at least one method")
}

fn lagrange(xs: &[Complex64], ys: &[Complex64], x: Complex64) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut t = yi;
        for (k, &xk) in xs.iter().enumerate() {
            if k != i {
                t *= (x - xk) / (xi - xk);
            }
        }
        acc += t;
    }
    acc
}

/// Interpolates `route` in the last `u` (or `v`) from `degree + 1` samples on
/// a circle of radius `DEGREE_RADIUS` about its current value, rotated by
/// `phase`, and compares at a point inside the circle.
pub fn degree_residual(
    inst: &LatticeInstance,
    route: Method,
    in_u: bool,
    degree: usize,
    phase: f64,
) -> lattice_lab::Result<f64> {
    let n = inst.n;
    let center = if in_u { inst.u[n - 1] } else { inst.v[n - 1] };
    let at = |x: Complex64| {
        let (mut u, mut v) = (inst.u.clone(), inst.v.clone());
        if in_u {
            u[n - 1] = x;
        } else {
            v[n - 1] = x;
        }
        evaluate(route, &inst.with_params(u, v)?)
    };
    let step = 2.0 * PI / (degree + 1) as f64;
    let xs: Vec<Complex64> = (0..=degree)
        .map(|k| center + Complex64::from_polar(DEGREE_RADIUS, phase + step * k as f64))
        .collect();
    let ys = xs.iter().map(|&x| at(x)).collect::<lattice_lab::Result<Vec<_>>>()?;
    let probe = center + Complex64::from_polar(0.5 * DEGREE_RADIUS, phase + 0.5 * step);
    Ok(rel_error(lagrange(&xs, &ys, probe), at(probe)?))
}

fn derived_checks(cfg: &RunConfig, s: &mut Setup, methods: &[Method]) -> Vec<Check> {
    let inst = &s.inst;
    let n = inst.n;
    let route = check_route(methods);
    let eval = |i: &LatticeInstance| evaluate(route, i);
    let mut checks = Vec::new();

    if n >= 2 {
        let r = if inst.is_sos() { korepin_residual_sos(inst, eval) } else { korepin_residual_sixvertex(inst, eval) };
        checks.push(Check::new(format!("korepin[{route}]"), r, cfg.tol));
        let mut pu = inst.u.clone();
        pu.reverse();
        let mut pv = inst.v.clone();
        pv.rotate_left(1);
        let r = (|| Ok(rel_error(eval(inst)?, eval(&inst.with_params(pu, pv)?)?)))();
        checks.push(Check::new(format!("symmetry[{route}]"), r, cfg.tol));
    }

    // Probe points are drawn after the instance so explicit and random runs
    // share the same sampler stream layout.
    let probe = s.sampler.point();
    let phase = 2.0 * PI * s.sampler.uniform(0.0, 1.0);
    let triple = s.sampler.points(3);
    if let Some(d) = inst.dyn_ {
        let lam = d.lambda;
        let vs: Complex64 = inst.v.iter().sum();
        let r = Character::from_alpha(n, lam + vs)
            .and_then(|ch| {
                let f = |x: Complex64| {
                    let mut u = inst.u.clone();
                    u[n - 1] = x;
                    eval(&inst.with_params(u, inst.v.clone())?)
                };
                character_residuals(f, &ch, probe, &s.ts)
            })
            .map(|(a, b)| a.max(b));
        checks.push(Check::new(format!("ellipticity[{route}]"), r, cfg.tol));
        let r = dybe_residual(triple[0], triple[1], triple[2], &d, &inst.aniso, &s.ts);
        checks.push(Check::new("dybe", r, cfg.tol));
    } else {
        if n >= 2 {
            checks.push(Check::new(format!("degree_z[{route}]"), degree_residual(inst, route, true, n - 1, phase), cfg.tol));
        }
        checks.push(Check::new(format!("degree_w[{route}]"), degree_residual(inst, route, false, n, phase), cfg.tol));
        let an = inst.aniso;
        let r = ybe_residual(|a, b| Ok(r_sixvertex(a, b, &an)), triple[0], triple[1], triple[2]);
        checks.push(Check::new("ybe", r, cfg.tol));
    }
    checks
}

/// Runs the requested routes on one instance and cross-checks them.
pub fn run(cfg: &RunConfig) -> Result<EvalReport, ConfigError> {
    let methods = cfg.validate()?;
    let mut s = setup(cfg)?;
    let mut timing = BTreeMap::new();
    let mut values = Vec::new();
    for &m in &methods {
        let start = Instant::now();
        let out = evaluate(m, &s.inst);
        timing.insert(m.name().to_string(), start.elapsed().as_secs_f64() * 1e3);
        values.push(match out {
            Ok(z) => MethodValue { method: m, value: Some(z.into()), error: None },
            Err(e) => MethodValue { method: m, value: None, error: Some(e.to_string()) },
        });
    }

    let k = values.len();
    let mut matrix = vec![vec![None; k]; k];
    let mut worst: Option<f64> = None;
    for i in 0..k {
        for j in 0..k {
            if let (Some(a), Some(b)) = (values[i].value, values[j].value) {
                let r = rel_error(Complex64::new(a.re, a.im), Complex64::new(b.re, b.im));
                matrix[i][j] = Some(r);
                worst = Some(worst.map_or(r, |w: f64| w.max(r)));
            }
        }
    }

    let mut checks = Vec::new();
    if k >= 2 {
        let failed: Vec<String> = values.iter().filter_map(|v| v.error.as_ref().map(|_| v.method.to_string())).collect();
        let outcome = if failed.is_empty() {
            Ok(worst.unwrap_or(0.0))
        } else {
            Err(LabError::InvalidParam(format!("routes failed: {}", failed.join(", "))))
        };
        checks.push(Check::new("agreement", outcome, cfg.tol));
    }
    let start = Instant::now();
    checks.extend(derived_checks(cfg, &mut s, &methods));
    timing.insert("checks".to_string(), start.elapsed().as_secs_f64() * 1e3);

    let pass = values.iter().all(|v| v.error.is_none()) && checks.iter().all(|c| c.pass);
    let max_residual = checks.iter().filter_map(|c| c.residual).fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
    let inst = &s.inst;
    let echo = RunEcho {
        model: cfg.model,
        n: cfg.n,
        tau: cfg.tau.into(),
        hbar: inst.aniso.hbar.into(),
        lambda: inst.dyn_.map(|d| d.lambda.into()),
        q: (!inst.is_sos()).then(|| inst.aniso.q.into()),
        seed: cfg.seed,
        methods: methods.clone(),
        tol: cfg.tol,
        trunc: inst.is_sos().then(|| s.ts.n_terms()),
        tail_bound: inst.is_sos().then(|| s.ts.tail_bound()),
        u: inst.u.iter().map(|&z| z.into()).collect(),
        v: inst.v.iter().map(|&z| z.into()).collect(),
    };
    Ok(EvalReport {
        command: "run",
        config: ConfigEcho::Run(echo),
        values,
        residual_matrix: Some(ResidualMatrix { methods, matrix }),
        checks,
        max_residual,
        pass,
        timing,
    })
}
