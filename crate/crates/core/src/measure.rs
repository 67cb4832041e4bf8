use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

/// A statistic that may be undefined on degenerate input.
///
/// Serializes as `{"value": x}` or `{"value": null, "undefined": reason}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Defined(f64),
    Undefined(String),
}

impl Measure {
    pub fn undefined(reason: impl Into<String>) -> Self {
        Measure::Undefined(reason.into())
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Measure::Defined(v) => Some(*v),
            Measure::Undefined(_) => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Measure::Defined(_))
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Measure::Defined(v) => write!(f, "{v:.4}"),
            Measure::Undefined(_) => f.write_str("undefined"),
        }
    }
}

impl Serialize for Measure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Measure::Defined(v) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("value", v)?;
                m.end()
            }
            Measure::Undefined(reason) => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("value", &None::<f64>)?;
                m.serialize_entry("undefined", reason)?;
                m.end()
            }
        }
    }
}
