use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Serialize;

/// A loosely typed parameter or diagnostic value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
    List(Vec<f64>),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}
impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}
impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}
impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}
impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}
impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}
impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}
impl From<Vec<f64>> for Value {
    fn from(v: Vec<f64>) -> Self {
        Value::List(v)
    }
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Real(r) => Some(*r),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

/// Ordered key-value record used for parameters and diagnostics.
pub type Record = BTreeMap<String, Value>;

/// One estimator's output.
///
/// `valid` is true exactly when `value` is finite and strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdEstimate {
    pub method: String,
    pub value: f64,
    pub valid: bool,
    pub params: Record,
    pub diagnostics: Record,
}

impl IdEstimate {
    pub fn new(method: impl Into<String>, value: f64) -> Self {
        IdEstimate {
            method: method.into(),
            value,
            valid: value.is_finite() && value > 0.0,
            params: Record::new(),
            diagnostics: Record::new(),
        }
    }

    /// An estimate that failed; `reason` ends up in the diagnostics.
    pub fn invalid(method: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut e = IdEstimate::new(method, f64::NAN);
        e.diagnostics
            .insert("reason".into(), Value::Text(reason.into()));
        e
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.into(), v.into());
        self
    }

    pub fn diag(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.diagnostics.insert(key.into(), v.into());
        self
    }

    pub fn with_method(mut self, method: impl Into<String>) -> Self {
        self.method = method.into();
        self
    }

    /// Replaces the value and recomputes validity.
    pub fn set_value(&mut self, value: f64) {
        self.value = value;
        self.valid = value.is_finite() && value > 0.0;
    }

    pub fn reason(&self) -> Option<&str> {
        match self.diagnostics.get("reason") {
            Some(Value::Text(s)) => Some(s),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validity_follows_value() {
        assert!(IdEstimate::new("m", 2.0).valid);
        assert!(!IdEstimate::new("m", 0.0).valid);
        assert!(!IdEstimate::new("m", -1.0).valid);
        assert!(!IdEstimate::new("m", f64::INFINITY).valid);
        let e = IdEstimate::invalid("m", "why");
        assert!(!e.valid);
        assert_eq!(e.reason(), Some("why"));
    }
}
