use std::fmt;
use std::str::FromStr;

use lattice_lab::closed_forms::IZERGIN_CAP;
use lattice_lab::lattice::{ENUM_CAP, TRANSFER_SIXVERTEX_CAP, TRANSFER_SOS_CAP};
use lattice_lab::MAX_PERM_N;
use lattice_lab::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Invalid configuration; maps to exit status 2.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Sixvertex,
    Sos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Enum,
    Transfer,
    Izergin,
    Projection,
    Formula,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for Model {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sixvertex" | "6v" => Ok(Self::Sixvertex),
            "sos" => Ok(Self::Sos),
            _ => Err(bad(format!("unknown model '{s}' (expected sixvertex or sos)"))),
        }
    }
}

impl FromStr for OutputFormat {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err(bad(format!("unknown output format '{s}'"))),
        }
    }
}

impl Method {
    pub const ALL: [Method; 5] = [Self::Enum, Self::Transfer, Self::Izergin, Self::Projection, Self::Formula];

    pub fn name(self) -> &'static str {
        match self {
            Self::Enum => "enum",
            Self::Transfer => "transfer",
            Self::Izergin => "izergin",
            Self::Projection => "projection",
            Self::Formula => "formula",
        }
    }

    pub fn valid_for(self, model: Model) -> bool {
        match model {
            Model::Sixvertex => self != Self::Formula,
            Model::Sos => matches!(self, Self::Enum | Self::Transfer | Self::Formula),
        }
    }

    pub fn cap(self, model: Model) -> usize {
        match (self, model) {
            (Self::Enum, _) => ENUM_CAP,
            (Self::Transfer, Model::Sixvertex) => TRANSFER_SIXVERTEX_CAP,
            (Self::Transfer, Model::Sos) => TRANSFER_SOS_CAP,
            (Self::Izergin, _) => IZERGIN_CAP,
            (Self::Projection | Self::Formula, _) => MAX_PERM_N,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| bad(format!("unknown method '{s}'")))
    }
}

/// `"all"` or a comma list; `None` stands for all methods the model allows.
pub fn parse_methods(s: &str) -> Result<Option<Vec<Method>>, ConfigError> {
    if s.trim() == "all" {
        return Ok(None);
    }
    let mut out: Vec<Method> = s.split(',').map(|t| t.trim().parse()).collect::<Result<_, _>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(bad("empty method list"));
    }
    Ok(Some(out))
}

/// `"re,im"` or `"re"`.
pub fn parse_complex(s: &str) -> Result<Complex64, ConfigError> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad(format!("not a number: '{t}' in '{s}'")));
    let z = match s.split_once(',') {
        Some((re, im)) => Complex64::new(num(re)?, num(im)?),
        None => Complex64::new(num(s)?, 0.0),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(bad(format!("non-finite value '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub n: usize,
    pub tau: Complex64,
    pub hbar: Complex64,
    /// SOS only.
    pub lambda: Complex64,
    /// Six-vertex only; `e^{πiħ}` when absent.
    pub q: Option<Complex64>,
    pub seed: u64,
    /// `None` means every method valid for the model within its cap.
    pub methods: Option<Vec<Method>>,
    pub tol: f64,
    pub trunc: Option<usize>,
    pub output: OutputFormat,
    pub u: Option<Vec<Complex64>>,
    pub v: Option<Vec<Complex64>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: Model::Sixvertex,
            n: 3,
            tau: Complex64::new(0.0, 1.0),
            hbar: Complex64::new(0.31, 0.07),
            lambda: Complex64::new(0.27, 0.03),
            q: None,
            seed: 0,
            methods: None,
            tol: 1e-8,
            trunc: None,
            output: OutputFormat::Json,
            u: None,
            v: None,
        }
    }
}

impl RunConfig {
    /// The methods to run, after checking model validity and size caps.
    pub fn resolved_methods(&self) -> Result<Vec<Method>, ConfigError> {
        match &self.methods {
            None => Ok(Method::ALL
                .into_iter()
                .filter(|m| m.valid_for(self.model) && self.n <= m.cap(self.model))
                .collect()),
            Some(ms) => {
                for &m in ms {
                    if !m.valid_for(self.model) {
                        return Err(bad(format!("method '{m}' is not available for the {:?} model", self.model)));
                    }
                    let cap = m.cap(self.model);
                    if self.n > cap {
                        return Err(bad(format!("method '{m}' is capped at n = {cap}, got n = {}", self.n)));
                    }
                }
                Ok(ms.clone())
            }
        }
    }

    pub fn validate(&self) -> Result<Vec<Method>, ConfigError> {
        if self.n == 0 {
            return Err(bad("n must be positive"));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(bad("tol must be positive"));
        }
        if self.tau.im <= 0.0 {
            return Err(bad("tau must lie in the upper half-plane"));
        }
        if self.trunc == Some(0) {
            return Err(bad("trunc must be positive"));
        }
        for (name, list) in [("u", &self.u), ("v", &self.v)] {
            if let Some(l) = list {
                if l.len() != self.n {
                    return Err(bad(format!("--{name} given {} values for n = {}", l.len(), self.n)));
                }
            }
        }
        if self.model == Model::Sos && self.q.is_some() {
            return Err(bad("--q applies to the sixvertex model only"));
        }
        let methods = self.resolved_methods()?;
        if methods.is_empty() {
            return Err(bad(format!("no method handles n = {}", self.n)));
        }
        Ok(methods)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Ybe,
    Dybe,
    Cdybe,
    Fay,
    Addition,
    Recursion,
    Degeneration,
    Averaging,
    Interpolation,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Self::Ybe,
        Self::Dybe,
        Self::Cdybe,
        Self::Fay,
        Self::Addition,
        Self::Recursion,
        Self::Degeneration,
        Self::Averaging,
        Self::Interpolation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ybe => "ybe",
            Self::Dybe => "dybe",
            Self::Cdybe => "cdybe",
            Self::Fay => "fay",
            Self::Addition => "addition",
            Self::Recursion => "recursion",
            Self::Degeneration => "degeneration",
            Self::Averaging => "averaging",
            Self::Interpolation => "interpolation",
        }
    }
}

impl FromStr for Suite {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| bad(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub seed: u64,
    pub count: usize,
    pub tol: f64,
    pub tau: Complex64,
    pub hbar: Complex64,
    /// Fixed `λ` for every case instead of a random draw.
    pub lambda: Option<Complex64>,
    pub output: OutputFormat,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            suite: Suite::Dybe,
            seed: 0,
            count: 50,
            tol: 1e-9,
            tau: Complex64::new(0.0, 1.0),
            hbar: Complex64::new(0.31, 0.07),
            lambda: None,
            output: OutputFormat::Json,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.count == 0 {
            return Err(bad("count must be positive"));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(bad("tol must be positive"));
        }
        if self.tau.im <= 0.0 {
            return Err(bad("tau must lie in the upper half-plane"));
        }
        Ok(())
    }
}
