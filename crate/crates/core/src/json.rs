//! JSON wire formats shared with the command-line front end.
//!
//! Rationals travel as `"p/q"` strings; vectors accept a mix of numbers and
//! rational strings and take the exact path when every entry is rational.

use nalgebra::DVector;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::QuadLattice;
use crate::rational::{self, Rat};

pub fn ser_rat<S: Serializer>(x: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format_rat(x))
}

pub fn ser_rat_vec<S: Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational::format_rat))
}

/// A single JSON scalar: an exact rational or a double.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(Rat),
    Float(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational::to_f64(r),
            Scalar::Float(x) => *x,
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(i) => Ok(Scalar::Exact(rational::rat(i))),
            Raw::Float(x) => Ok(Scalar::Float(x)),
            Raw::Str(s) => rational::parse_rat(&s)
                .map(Scalar::Exact)
                .map_err(D::Error::custom),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => ser_rat(r, s),
            Scalar::Float(x) => s.serialize_f64(*x),
        }
    }
}

/// A vector of scalars as read from JSON.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(transparent)]
pub struct VectorJson(pub Vec<Scalar>);

impl VectorJson {
    /// `Some` when every entry is exact.
    pub fn exact(&self) -> Option<Vec<Rat>> {
        self.0
            .iter()
            .map(|s| match s {
                Scalar::Exact(r) => Some(r.clone()),
                Scalar::Float(_) => None,
            })
            .collect()
    }

    pub fn to_f64(&self) -> DVector<f64> {
        DVector::from_iterator(self.0.len(), self.0.iter().map(Scalar::to_f64))
    }

    pub fn from_f64(v: &DVector<f64>) -> Self {
        Self(v.iter().map(|&x| Scalar::Float(x)).collect())
    }

    pub fn from_rat(v: &[Rat]) -> Self {
        Self(v.iter().cloned().map(Scalar::Exact).collect())
    }
}

/// `{"rank": int, "gram": [[int]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
pub struct LatticeJson {
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
}

impl LatticeJson {
    pub fn build(&self) -> Result<QuadLattice> {
        if self.gram.len() != self.rank {
            return Err(Error::Dimension {
                expected: self.rank,
                got: self.gram.len(),
            });
        }
        QuadLattice::new(self.gram.clone())
    }
}

impl From<&QuadLattice> for LatticeJson {
    fn from(l: &QuadLattice) -> Self {
        Self {
            rank: l.rank(),
            gram: l.gram().to_vec(),
        }
    }
}

/// `{"matrix": [[scalar]]}` with exact entries.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct IsometryJson {
    pub matrix: Vec<VectorJson>,
}

impl IsometryJson {
    pub fn exact(&self) -> Result<Vec<Vec<Rat>>> {
        self.matrix
            .iter()
            .map(|r| {
                r.exact()
                    .ok_or_else(|| Error::Invalid("isometry entries must be exact".into()))
            })
            .collect()
    }
}

/// `{"re": [...], "im": [...]}`.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct PointJson {
    pub re: VectorJson,
    pub im: VectorJson,
}
