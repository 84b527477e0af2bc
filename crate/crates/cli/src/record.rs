//! JSON records for computed points and fits.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use rflat_core::TailBound;

pub const SCHEMA_VERSION: u32 = 1;

/// A float that survives JSON: non-finite values are written as the strings
/// `"inf"`, `"-inf"` and `"nan"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Real(pub f64);

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_finite() {
            ser.serialize_f64(x)
        } else if x.is_nan() {
            ser.serialize_str("nan")
        } else if x > 0.0 {
            ser.serialize_str("inf")
        } else {
            ser.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        struct RealVisitor;

        impl Visitor<'_> for RealVisitor {
            type Value = Real;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v {
                    "inf" => Ok(Real(f64::INFINITY)),
                    "-inf" => Ok(Real(f64::NEG_INFINITY)),
                    "nan" => Ok(Real(f64::NAN)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }

        de.deserialize_any(RealVisitor)
    }
}

/// Parameters identifying one computed point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub s: Real,
    pub p: Real,
    /// Cutoff `N`, increment `ell`, block index, or truncation, depending on
    /// the quantity.
    pub scale: Real,
    pub a: Option<u64>,
    pub grid_policy: Option<String>,
    pub n_max: Option<u64>,
    /// Inclusive block-index range of a block fit.
    pub k_range: Option<[u32; 2]>,
}

impl Params {
    pub fn new(s: f64, p: f64, scale: f64) -> Self {
        Self {
            s: Real(s),
            p: Real(p),
            scale: Real(scale),
            a: None,
            grid_policy: None,
            n_max: None,
            k_range: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRecord {
    pub sup_tail: Real,
    pub l2_tail: Real,
    pub convergent: bool,
}

impl From<&TailBound> for TailRecord {
    fn from(t: &TailBound) -> Self {
        Self {
            sup_tail: t.sup_tail.into(),
            l2_tail: t.l2_tail.into(),
            convergent: t.convergent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub quantity: String,
    pub params: Params,
    pub values: BTreeMap<String, Real>,
    pub certified_exact: Option<bool>,
    pub tail: Option<TailRecord>,
    /// Seconds since the Unix epoch when the value was computed.
    pub created_unix: u64,
}

impl ResultRecord {
    pub fn new(quantity: &str, params: Params) -> Self {
        let created_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            schema_version: SCHEMA_VERSION,
            quantity: quantity.to_string(),
            params,
            values: BTreeMap::new(),
            certified_exact: None,
            tail: None,
            created_unix,
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.values.insert(name.to_string(), Real(value));
        self
    }

    /// Stored value, `NaN` when missing.
    pub fn get(&self, name: &str) -> f64 {
        self.values.get(name).map(|r| r.0).unwrap_or(f64::NAN)
    }
}

pub fn emit<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = serde_json::to_string_pretty(value)?;
    out.push('\n');
    Ok(out)
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> serde_json::Result<T> {
    serde_json::from_str(text)
}
