//! Result types shared by the evaluators and the command-line front end.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Complex number serialized as `{ "re": .., "im": .. }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for CValue {
    fn from(z: Complex64) -> Self {
        CValue { re: z.re, im: z.im }
    }
}

impl From<CValue> for Complex64 {
    fn from(z: CValue) -> Self {
        Complex64::new(z.re, z.im)
    }
}

pub mod complex_obj {
    use super::CValue;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        CValue::from(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        Ok(CValue::deserialize(d)?.into())
    }
}

/// How far a reported tail estimate can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailKind {
    /// A proven upper bound.
    Rigorous,
    /// An estimate built on an empirically calibrated constant or a density
    /// approximation.
    Heuristic,
    /// Outside the region where any bound is available.
    NoTailBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tail {
    pub estimate: f64,
    pub kind: TailKind,
}

impl Tail {
    pub fn rigorous(estimate: f64) -> Self {
        Tail { estimate, kind: TailKind::Rigorous }
    }

    pub fn heuristic(estimate: f64) -> Self {
        Tail { estimate, kind: TailKind::Heuristic }
    }

    pub fn none() -> Self {
        Tail { estimate: f64::INFINITY, kind: TailKind::NoTailBound }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HeightSubtotal {
    pub n: u64,
    pub count: u64,
    pub radius_sq: f64,
    #[serde(with = "complex_obj")]
    pub subtotal: Complex64,
}

/// Truncation parameters of the series evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TruncationPolicy {
    /// Cutoff of sums over `n` (heights or the coefficient sums).
    pub n_max: u64,
    /// Cutoff `lambda^2 <= lambda_radius_sq` of the Fourier sum; `None`
    /// selects it from `tol`.
    pub lambda_radius_sq: Option<f64>,
    pub quad_tol: f64,
    /// Target relative accuracy used to size adaptive cutoffs.
    pub tol: f64,
    /// Upper bound on enumerated points.
    pub budget: u64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            n_max: 40,
            lambda_radius_sq: None,
            quad_tol: 1e-12,
            tol: 1e-8,
            budget: 1 << 31,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvalResult {
    #[serde(with = "complex_obj")]
    pub value: Complex64,
    pub method: String,
    pub terms: u64,
    pub tail: Tail,
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub heights: Vec<HeightSubtotal>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub policy: Option<TruncationPolicy>,
    pub runtime_ms: f64,
}

impl EvalResult {
    pub fn new(method: &str, value: Complex64, terms: u64, tail: Tail) -> Self {
        Self {
            value,
            method: method.to_string(),
            terms,
            tail,
            flags: Vec::new(),
            heights: Vec::new(),
            policy: None,
            runtime_ms: 0.0,
        }
    }
}

/// Relative difference `|a - b| / |b|`, with `|a - b|` when `b = 0`.
pub fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if b.norm() == 0.0 {
        d
    } else {
        d / b.norm()
    }
}
