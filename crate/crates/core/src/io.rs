//! JSON file formats and output encoding.
//!
//! Ray and cone indices in files are 1-based, rationals are strings, complex
//! floats are `[re, im]` pairs and floats carry 17 significant digits.

use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, GaussianRational, Rational};
use crate::fan::StackyFan;
use crate::gkz::XPoint;

/// `{"rank": d, "rays": [[..], ..], "max_cones": [[1-based], ..], "deg": [..]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deg: Option<Vec<i64>>,
}

impl FanFile {
    pub fn from_fan(fan: &StackyFan) -> Self {
        Self {
            rank: fan.rank(),
            rays: fan.rays().to_vec(),
            max_cones: fan.max_cones().iter().map(|c| one_based(c)).collect(),
            deg: fan.given_deg().map(<[i64]>::to_vec),
        }
    }

    pub fn into_fan(self) -> Result<StackyFan> {
        let mut cones = Vec::with_capacity(self.max_cones.len());
        for c in self.max_cones {
            if c.contains(&0) {
                return Err(Error::InvalidFan("cone indices are 1-based".into()));
            }
            cones.push(c.into_iter().map(|i| i - 1).collect());
        }
        StackyFan::new(self.rank, self.rays, cones, self.deg)
    }
}

/// A parameter file: a list of Gaussian rationals, each a string or
/// `{"re": .., "im": ..}`.
pub type BetaFile = Vec<GaussianRational>;

/// A real vector file: a list of rational strings.
pub fn parse_rational_list(items: &[String]) -> std::result::Result<Vec<Rational>, String> {
    items.iter().map(|s| parse_rational(s).map_err(|e| format!("{s:?}: {e}"))).collect()
}

/// Either a bare list of `[re, im]` pairs or
/// `{"x": [[re, im], ..], "arg_offsets": [..]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct XFile {
    pub x: Vec<[f64; 2]>,
    pub arg_offsets: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct XObject {
    x: Vec<[f64; 2]>,
    #[serde(default)]
    arg_offsets: Option<Vec<f64>>,
}

impl<'de> Deserialize<'de> for XFile {
    // dispatch on the JSON shape by hand: untagged enums buffer numbers in a
    // way that does not survive arbitrary-precision parsing
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        if v.is_array() {
            let x = serde_json::from_value(v).map_err(serde::de::Error::custom)?;
            Ok(XFile { x, arg_offsets: None })
        } else {
            let o: XObject = serde_json::from_value(v).map_err(serde::de::Error::custom)?;
            Ok(XFile { x: o.x, arg_offsets: o.arg_offsets })
        }
    }
}

impl XFile {
    pub fn into_point(self) -> Result<XPoint> {
        let mut p = XPoint::new(self.x.iter().map(|[re, im]| Complex64::new(*re, *im)).collect());
        if let Some(o) = self.arg_offsets {
            if o.len() != p.values.len() {
                return Err(Error::DimensionMismatch("arg_offsets and x differ in length".into()));
            }
            p.arg_offsets = o;
        }
        Ok(p)
    }
}

pub fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i + 1).collect()
}

/// A float written with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Float(pub f64);

impl Serialize for Float {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let text = format!("{:.16e}", self.0);
        serde_json::Number::from_str(&text).map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

/// `[re, im]`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexOut(pub Complex64);

impl Serialize for ComplexOut {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [Float(self.0.re), Float(self.0.im)].serialize(s)
    }
}

pub fn complex_vec(v: &[Complex64]) -> Vec<ComplexOut> {
    v.iter().copied().map(ComplexOut).collect()
}

pub fn float_vec(v: &[f64]) -> Vec<Float> {
    v.iter().copied().map(Float).collect()
}

pub fn rational_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

pub fn int_strings(v: &[BigInt]) -> Vec<String> {
    v.iter().map(BigInt::to_string).collect()
}

/// `{"error": {"kind": .., "message": ..}}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorObject {
    pub error: ErrorBody,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

impl ErrorObject {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        Self { error: ErrorBody { kind: kind.into(), message: message.into() } }
    }
}

impl From<&Error> for ErrorObject {
    fn from(e: &Error) -> Self {
        Self::new(e.kind(), e.to_string())
    }
}
