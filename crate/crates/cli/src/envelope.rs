use serde_json::{json, Value};

use leech_poincare::Complex64;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Partial,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Partial => "partial",
            Status::Error => "error",
        }
    }
}

/// What a command produced, before it is wrapped in an envelope.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub value: Value,
    pub method: Option<String>,
    pub terms: Option<u64>,
    pub diagnostics: Value,
    pub status: Status,
    /// Lossy tabular form for `--format csv`.
    pub csv: Option<String>,
}

impl Outcome {
    pub fn new(value: Value) -> Self {
        Self { value, method: None, terms: None, diagnostics: json!({}), status: Status::Ok, csv: None }
    }

    pub fn method(mut self, m: impl Into<String>) -> Self {
        self.method = Some(m.into());
        self
    }

    pub fn terms(mut self, t: u64) -> Self {
        self.terms = Some(t);
        self
    }

    pub fn diagnostics(mut self, d: Value) -> Self {
        self.diagnostics = d;
        self
    }

    pub fn status(mut self, s: Status) -> Self {
        self.status = s;
        self
    }

    pub fn csv(mut self, c: String) -> Self {
        self.csv = Some(c);
        self
    }
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn envelope(op: &str, params: &Value, out: &Outcome, runtime_ms: f64) -> Value {
    let mut diagnostics = match &out.diagnostics {
        Value::Object(m) => m.clone(),
        Value::Null => Default::default(),
        other => [("detail".to_string(), other.clone())].into_iter().collect(),
    };
    diagnostics.insert("terms".into(), json!(out.terms));
    diagnostics.insert("runtimeMs".into(), json!(runtime_ms));
    diagnostics.entry("cacheHits").or_insert(json!(0));
    json!({
        "schemaVersion": SCHEMA_VERSION,
        "op": op,
        "params": params,
        "value": out.value,
        "method": out.method,
        "status": out.status.as_str(),
        "diagnostics": diagnostics,
    })
}

/// CSV rendering: the outcome's own table, a complex value as `op,re,im`,
/// or the value's JSON in one column.
pub fn to_csv(op: &str, out: &Outcome) -> String {
    if let Some(c) = &out.csv {
        return c.clone();
    }
    match (&out.value.get("re"), &out.value.get("im")) {
        (Some(re), Some(im)) => format!("op,re,im\n{op},{re},{im}\n"),
        _ => format!("op,value\n{op},\"{}\"\n", out.value.to_string().replace('"', "\"\"")),
    }
}
