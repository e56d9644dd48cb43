//! Machine-readable reports. Keys are emitted in sorted order and numbers
//! through a fixed formatter, so identical inputs give identical bytes.

use serde_json::{json, Map, Value};
use wdvv_core::algebra::{Poly, PolyTensor, Rational};
use wdvv_core::exprlang::format_polynomial;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Checks with `required = false` are reported but do not affect the
    /// overall verdict.
    pub required: bool,
    pub detail: Map<String, Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            pass,
            required: true,
            detail: Map::new(),
        }
    }

    pub fn optional(mut self) -> Self {
        self.required = false;
        self
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.detail.insert(key.to_string(), value);
        self
    }

    /// Exact-zero check on a tensor of residuals.
    pub fn residual(name: impl Into<String>, t: &PolyTensor, cap: usize) -> Self {
        Check::new(name, t.is_zero()).with("residual", summarize(t.nonzero(), cap))
    }

    /// Numeric check `value <= limit`.
    pub fn bounded(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check::new(name, value <= limit)
            .with("value", number(value))
            .with("limit", number(limit))
    }

    fn to_json(&self) -> Value {
        let mut m = self.detail.clone();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("pass".into(), Value::Bool(self.pass));
        if !self.required {
            m.insert("required".into(), Value::Bool(false));
        }
        Value::Object(m)
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub kind: String,
    pub checks: Vec<Check>,
    pub data: Map<String, Value>,
    pub timings_ms: Option<f64>,
}

impl Report {
    pub fn new(command: &str, kind: &str) -> Self {
        Report {
            command: command.to_string(),
            kind: kind.to_string(),
            checks: Vec::new(),
            data: Map::new(),
            timings_ms: None,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn data(&mut self, key: &str, value: Value) {
        self.data.insert(key.to_string(), value);
    }

    pub fn passes(&self) -> bool {
        self.checks.iter().filter(|c| c.required).all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("command".into(), json!(self.command));
        m.insert("kind".into(), json!(self.kind));
        m.insert("pass".into(), json!(self.passes()));
        m.insert("checks".into(), Value::Array(self.checks.iter().map(Check::to_json).collect()));
        if !self.data.is_empty() {
            m.insert("data".into(), Value::Object(self.data.clone()));
        }
        if let Some(t) = self.timings_ms {
            m.insert("timings_ms".into(), number(t));
        }
        Value::Object(m)
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Count, degree and size of the nonzero residual entries; the entries
/// themselves (one-based indices) when their total size is within `cap` terms.
pub fn summarize<'a>(entries: impl Iterator<Item = (Vec<usize>, &'a Poly)>, cap: usize) -> Value {
    let entries: Vec<(Vec<usize>, &Poly)> = entries.filter(|(_, p)| !p.is_zero()).collect();
    let terms: usize = entries.iter().map(|(_, p)| p.nterms()).sum();
    let degree = entries.iter().filter_map(|(_, p)| p.total_degree()).max();
    let mut m = Map::new();
    m.insert("nonzero_entries".into(), json!(entries.len()));
    m.insert("total_terms".into(), json!(terms));
    m.insert("max_total_degree".into(), json!(degree));
    if terms <= cap {
        let list = entries
            .iter()
            .map(|(idx, p)| {
                json!({
                    "index": idx.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "poly": format_polynomial(p),
                })
            })
            .collect();
        m.insert("entries".into(), Value::Array(list));
    }
    Value::Object(m)
}

pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn poly(p: &Poly) -> Value {
    Value::String(format_polynomial(p))
}

pub fn polys(ps: &[Poly]) -> Value {
    Value::Array(ps.iter().map(poly).collect())
}

/// Integers as JSON numbers when they fit, everything else as `"p/q"`.
pub fn rational(r: &Rational) -> Value {
    use num_traits::ToPrimitive;
    if r.is_integer() {
        if let Some(i) = r.numer().to_i64() {
            return json!(i);
        }
    }
    Value::String(r.to_string())
}

pub fn rational_matrix(rows: &[Vec<Rational>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| Value::Array(r.iter().map(rational).collect()))
            .collect(),
    )
}
