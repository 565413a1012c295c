use std::collections::BTreeMap;
use std::fmt::Write as _;

use lattice_lab::Complex64;
use serde::Serialize;

use crate::config::{Method, Model, OutputFormat, Suite};

/// Complex number as `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cplx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cplx {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunEcho {
    pub model: Model,
    pub n: usize,
    pub tau: Cplx,
    pub hbar: Cplx,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Cplx>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Cplx>,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trunc: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
    pub u: Vec<Cplx>,
    pub v: Vec<Cplx>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyEcho {
    pub suite: Suite,
    pub seed: u64,
    pub count: usize,
    pub tol: f64,
    pub tau: Cplx,
    pub hbar: Cplx,
    pub lambda: Option<Cplx>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ConfigEcho {
    Run(RunEcho),
    Verify(VerifyEcho),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodValue {
    pub method: Method,
    pub value: Option<Cplx>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// `matrix[i][j]` is the relative residual between `methods[i]` and
/// `methods[j]`, or `null` when either failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualMatrix {
    pub methods: Vec<Method>,
    pub matrix: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, outcome: lattice_lab::Result<f64>, tol: f64) -> Self {
        match outcome {
            Ok(r) => Self {
                name: name.into(),
                residual: Some(r),
                tol,
                pass: r <= tol,
                error: None,
            },
            Err(e) => Self {
                name: name.into(),
                residual: None,
                tol,
                pass: false,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub command: &'static str,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<MethodValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_matrix: Option<ResidualMatrix>,
    pub checks: Vec<Check>,
    pub max_residual: Option<f64>,
    pub pass: bool,
    /// Wall-clock milliseconds; the only nondeterministic part of a report.
    pub timing: BTreeMap<String, f64>,
}

impl EvalReport {
    pub fn exit_code(&self) -> u8 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let num = |x: Option<f64>| x.map(|v| format!("{v:?}")).unwrap_or_default();
        if !self.values.is_empty() {
            out.push_str("method,value_re,value_im,error\n");
            for v in &self.values {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    v.method,
                    num(v.value.map(|z| z.re)),
                    num(v.value.map(|z| z.im)),
                    csv_field(v.error.as_deref().unwrap_or(""))
                );
            }
            out.push('\n');
        }
        if let Some(m) = &self.residual_matrix {
            out.push_str("residual");
            for name in &m.methods {
                let _ = write!(out, ",{name}");
            }
            out.push('\n');
            for (name, row) in m.methods.iter().zip(&m.matrix) {
                out.push_str(name.name());
                for x in row {
                    let _ = write!(out, ",{}", num(*x));
                }
                out.push('\n');
            }
            out.push('\n');
        }
        out.push_str("check,residual,tol,pass,error\n");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},{},{:?},{},{}",
                csv_field(&c.name),
                num(c.residual),
                c.tol,
                c.pass,
                csv_field(c.error.as_deref().unwrap_or(""))
            );
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
