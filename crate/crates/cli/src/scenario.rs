//! Scenario files: JSON with `kind`, `parameters`, optional `tolerances` and
//! `seed`. Complex numbers are `[re, im]` (a bare number is read as real),
//! exact integers are JSON integers or decimal strings, and coefficient
//! series are a built-in name or `{"file": "relative/path"}`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use integrable_core::algebra::SolverConfig;
use integrable_core::Complex64;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Trs,
    Duality,
    Spinchain,
    Qq,
    Elliptic,
    Adhm,
    Dwork,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_count: Option<usize>,
}

impl Tolerances {
    pub fn solver_config(&self) -> SolverConfig {
        let d = SolverConfig::default();
        SolverConfig {
            tolerance: self.tolerance.unwrap_or(d.tolerance),
            max_iterations: self.max_iterations.unwrap_or(d.max_iterations),
            step_count: self.step_count.unwrap_or(d.step_count),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: Kind,
    #[serde(default)]
    pub parameters: BTreeMap<String, Value>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamType {
    Complex,
    ComplexVec,
    Integer,
    IntegerVec,
    Series,
    Text,
}

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub ty: ParamType,
    pub required: bool,
}

const fn req(name: &'static str, ty: ParamType) -> ParamSpec {
    ParamSpec { name, ty, required: true }
}

const fn opt(name: &'static str, ty: ParamType) -> ParamSpec {
    ParamSpec { name, ty, required: false }
}

use ParamType::*;

const TRS: &[ParamSpec] = &[
    req("chi", ComplexVec),
    req("hbar", Complex),
    req("p", ComplexVec),
    opt("samples", Integer),
];
const DUALITY: &[ParamSpec] = &[
    req("zeta", ComplexVec),
    req("a", ComplexVec),
    req("hbar", Complex),
    opt("permutation", IntegerVec),
];
const SPINCHAIN: &[ParamSpec] = &[
    req("site_params", ComplexVec),
    req("twist", Complex),
    req("q", Complex),
    req("hbar", Complex),
    opt("samples", Integer),
];
const QQ: &[ParamSpec] = &[
    req("lambda_roots", ComplexVec),
    req("hbar", Complex),
    req("magnon_count", Integer),
    req("xi", Complex),
    req("xi_tilde", Complex),
    opt("seeds", Integer),
    opt("orbifold_q", Complex),
    opt("samples", Integer),
];
const ELLIPTIC: &[ParamSpec] = &[
    req("x", ComplexVec),
    req("hbar", Complex),
    req("p_ell", Complex),
    opt("truncation", Integer),
    opt("momenta", ComplexVec),
    opt("samples", Integer),
];
const ADHM: &[ParamSpec] = &[
    req("a_params", ComplexVec),
    req("k", Integer),
    req("q", Complex),
    req("coupling", Complex),
    opt("hbar", Complex),
];
const DWORK: &[ParamSpec] = &[
    req("series", Series),
    req("primes", IntegerVec),
    req("levels", IntegerVec),
    opt("expect", Text),
];

pub fn schema(kind: Kind) -> &'static [ParamSpec] {
    match kind {
        Kind::Trs => TRS,
        Kind::Duality => DUALITY,
        Kind::Spinchain => SPINCHAIN,
        Kind::Qq => QQ,
        Kind::Elliptic => ELLIPTIC,
        Kind::Adhm => ADHM,
        Kind::Dwork => DWORK,
    }
}

/// Built-in coefficient series or a resolved file path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesRef {
    CentralBinomial,
    FactorialControl,
    File(PathBuf),
}

pub fn parse_complex(v: &Value) -> Result<Complex64, String> {
    match v {
        Value::Number(n) => n.as_f64().map(|re| Complex64::new(re, 0.0)).ok_or_else(|| format!("bad number {n}")),
        Value::Array(a) if a.len() == 2 => match (a[0].as_f64(), a[1].as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => Err("complex entries must be numbers".into()),
        },
        _ => Err(format!("expected [re, im], got {v}")),
    }
}

pub fn parse_complex_vec(v: &Value) -> Result<Vec<Complex64>, String> {
    match v {
        Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(i, x)| parse_complex(x).map_err(|e| format!("entry {i}: {e}")))
            .collect(),
        _ => Err(format!("expected an array of [re, im], got {v}")),
    }
}

pub fn parse_integer(v: &Value) -> Result<BigInt, String> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse().expect("integer literal")),
        Value::String(s) => s.trim().parse().map_err(|_| format!("not a decimal integer: {s:?}")),
        _ => Err(format!("expected an integer or decimal string, got {v}")),
    }
}

pub fn parse_integer_vec(v: &Value) -> Result<Vec<BigInt>, String> {
    match v {
        Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(i, x)| parse_integer(x).map_err(|e| format!("entry {i}: {e}")))
            .collect(),
        _ => Err(format!("expected an array of integers, got {v}")),
    }
}

pub fn parse_series(v: &Value) -> Result<SeriesRef, String> {
    match v {
        Value::String(s) if s == "central_binomial" => Ok(SeriesRef::CentralBinomial),
        Value::String(s) if s == "factorial_control" => Ok(SeriesRef::FactorialControl),
        Value::Object(o) if o.len() == 1 => match o.get("file") {
            Some(Value::String(p)) => Ok(SeriesRef::File(PathBuf::from(p))),
            _ => Err("file reference must be {\"file\": \"path\"}".into()),
        },
        _ => Err(format!("expected \"central_binomial\", \"factorial_control\" or {{\"file\": ...}}, got {v}")),
    }
}

fn check_type(ty: ParamType, v: &Value) -> Result<(), String> {
    match ty {
        Complex => parse_complex(v).map(drop),
        ComplexVec => parse_complex_vec(v).map(drop),
        Integer => parse_integer(v).map(drop),
        IntegerVec => parse_integer_vec(v).map(drop),
        Series => parse_series(v).map(drop),
        Text => v.as_str().map(drop).ok_or_else(|| format!("expected a string, got {v}")),
    }
}

impl Scenario {
    /// Schema check: every required parameter present, no unknown names,
    /// every value of the declared type. All problems are reported at once.
    pub fn validate(&self) -> Result<(), CliError> {
        let spec = schema(self.kind);
        let mut problems = Vec::new();
        for p in spec {
            if p.required && !self.parameters.contains_key(p.name) {
                problems.push(format!("missing parameter `{}`", p.name));
            }
        }
        for (name, value) in &self.parameters {
            match spec.iter().find(|p| p.name == name) {
                None => problems.push(format!("unknown parameter `{name}` for kind {:?}", self.kind)),
                Some(p) => {
                    if let Err(e) = check_type(p.ty, value) {
                        problems.push(format!("parameter `{name}`: {e}"));
                    }
                }
            }
        }
        if let Some(t) = self.tolerances.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                problems.push(format!("tolerances.tolerance must be positive, got {t}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(problems))
        }
    }

    /// Rewrites relative file references against `base`.
    pub fn resolve_files(&mut self, base: &Path) {
        let spec = schema(self.kind);
        for (name, value) in self.parameters.iter_mut() {
            let is_series = spec.iter().any(|p| p.name == name && p.ty == Series);
            if !is_series {
                continue;
            }
            if let Value::Object(o) = value {
                if let Some(Value::String(p)) = o.get("file") {
                    let resolved = base.join(p);
                    o.insert("file".into(), Value::String(resolved.to_string_lossy().into_owned()));
                }
            }
        }
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self, CliError> {
        let mut s: Scenario = serde_json::from_str(text).map_err(|e| CliError::Parse {
            path: origin.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let base = origin.parent().unwrap_or(Path::new(""));
        s.resolve_files(base);
        s.validate()?;
        Ok(s)
    }

    pub fn params(&self) -> Params<'_> {
        Params { map: &self.parameters }
    }
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::from_json(&text, path)
}

/// Typed access to validated parameters.
pub struct Params<'a> {
    map: &'a BTreeMap<String, Value>,
}

fn missing(name: &str) -> String {
    format!("missing parameter `{name}`")
}

impl Params<'_> {
    pub fn raw(&self, name: &str) -> Option<&Value> {
        self.map.get(name)
    }

    pub fn complex(&self, name: &str) -> Result<Complex64, String> {
        parse_complex(self.map.get(name).ok_or_else(|| missing(name))?)
    }

    pub fn complex_opt(&self, name: &str) -> Result<Option<Complex64>, String> {
        self.map.get(name).map(parse_complex).transpose()
    }

    pub fn complex_vec(&self, name: &str) -> Result<Vec<Complex64>, String> {
        parse_complex_vec(self.map.get(name).ok_or_else(|| missing(name))?)
    }

    pub fn complex_vec_opt(&self, name: &str) -> Result<Option<Vec<Complex64>>, String> {
        self.map.get(name).map(parse_complex_vec).transpose()
    }

    /// Integer parameter as `usize`, `default` when absent.
    pub fn count(&self, name: &str, default: usize) -> Result<usize, String> {
        match self.map.get(name) {
            None => Ok(default),
            Some(v) => {
                let n = parse_integer(v)?;
                n.try_into().map_err(|_| format!("`{name}` must be a small nonnegative integer"))
            }
        }
    }

    pub fn integer_vec(&self, name: &str) -> Result<Vec<BigInt>, String> {
        parse_integer_vec(self.map.get(name).ok_or_else(|| missing(name))?)
    }

    pub fn usize_vec_opt(&self, name: &str) -> Result<Option<Vec<usize>>, String> {
        let Some(v) = self.map.get(name) else {
            return Ok(None);
        };
        parse_integer_vec(v)?
            .into_iter()
            .map(|n| usize::try_from(n).map_err(|_| format!("`{name}` entries must be nonnegative")))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn series(&self, name: &str) -> Result<SeriesRef, String> {
        parse_series(self.map.get(name).ok_or_else(|| missing(name))?)
    }

    pub fn text_opt(&self, name: &str) -> Result<Option<&str>, String> {
        match self.map.get(name) {
            None => Ok(None),
            Some(v) => v.as_str().map(Some).ok_or_else(|| format!("`{name}` must be a string")),
        }
    }
}
