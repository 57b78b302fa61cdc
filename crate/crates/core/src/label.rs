//! Symbolic names for the indecomposable bimodules.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The four string shapes. `M` has two more basis vectors than `W`; `N` and `S`
/// sit in between (`N` drops the last vector of `M`, `S` the first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Shape {
    M,
    N,
    S,
    W,
}

impl Shape {
    pub const ALL: [Shape; 4] = [Shape::M, Shape::N, Shape::S, Shape::W];

    pub fn letter(self) -> char {
        match self {
            Shape::M => 'M',
            Shape::N => 'N',
            Shape::S => 'S',
            Shape::W => 'W',
        }
    }
}

/// An indecomposable bimodule up to isomorphism.
///
/// The derived order is the tie-break order used by decomposition:
/// strings (M, N, S, W) before bands before `ProjInj` before `Regular`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    String { shape: Shape, valleys: usize },
    Band { length: usize, eigenvalue: BigRational },
    /// `D ⊗_k D`, the projective-injective bimodule.
    ProjInj,
    /// The regular bimodule `D`, which is the band `B_1(1)`.
    Regular,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error("cannot parse label '{0}': expected D | DxD | W:k | S:k | N:k | M:k | B:k:p/q")]
    Syntax(String),
    #[error("band eigenvalue must be nonzero")]
    ZeroEigenvalue,
    #[error("band length must be positive")]
    EmptyBand,
}

impl Label {
    pub fn string(shape: Shape, valleys: usize) -> Self {
        Label::String { shape, valleys }
    }

    pub fn m(k: usize) -> Self {
        Self::string(Shape::M, k)
    }

    pub fn n(k: usize) -> Self {
        Self::string(Shape::N, k)
    }

    pub fn s(k: usize) -> Self {
        Self::string(Shape::S, k)
    }

    pub fn w(k: usize) -> Self {
        Self::string(Shape::W, k)
    }

    pub fn band(length: usize, eigenvalue: BigRational) -> Result<Self, LabelError> {
        if length == 0 {
            return Err(LabelError::EmptyBand);
        }
        if eigenvalue.is_zero() {
            return Err(LabelError::ZeroEigenvalue);
        }
        Ok(Label::Band { length, eigenvalue })
    }

    pub fn dim(&self) -> usize {
        match self {
            Label::String { shape, valleys: k } => match shape {
                Shape::M => 2 * k + 3,
                Shape::N | Shape::S => 2 * k + 2,
                Shape::W => 2 * k + 1,
            },
            Label::Band { length, .. } => 2 * length,
            Label::ProjInj => 4,
            Label::Regular => 2,
        }
    }

    /// `B_1(1)` and the regular bimodule are the same object; prefer `Regular`.
    pub fn canonical(self) -> Self {
        match &self {
            Label::Band { length: 1, eigenvalue } if eigenvalue.is_one() => Label::Regular,
            _ => self,
        }
    }

    /// The simple bimodule `k = W_0`.
    pub fn simple() -> Self {
        Self::w(0)
    }

    pub fn is_k_split(&self) -> bool {
        matches!(self, Label::ProjInj)
            || matches!(self, Label::String { shape, valleys: 0 } if *shape != Shape::M)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::String { shape, valleys } => write!(f, "{}:{}", shape.letter(), valleys),
            Label::Band { length, eigenvalue } => write!(f, "B:{}:{}", length, eigenvalue),
            Label::ProjInj => write!(f, "ProjInj"),
            Label::Regular => write!(f, "D"),
        }
    }
}

impl FromStr for Label {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LabelError::Syntax(s.to_string());
        match s {
            "D" => return Ok(Label::Regular),
            "DxD" | "ProjInj" => return Ok(Label::ProjInj),
            _ => {}
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [shape, k] => {
                let shape = match *shape {
                    "M" => Shape::M,
                    "N" => Shape::N,
                    "S" => Shape::S,
                    "W" => Shape::W,
                    _ => return Err(bad()),
                };
                let k = k.parse::<usize>().map_err(|_| bad())?;
                Ok(Label::string(shape, k))
            }
            ["B", k, lambda] => {
                let k = k.parse::<usize>().map_err(|_| bad())?;
                let lambda = lambda.parse::<BigRational>().map_err(|_| bad())?;
                Label::band(k, lambda)
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn dims_follow_closed_form() {
        assert_eq!(Label::m(0).dim(), 3);
        assert_eq!(Label::w(1).dim(), 3);
        assert_eq!(Label::s(2).dim(), 6);
        assert_eq!(Label::n(2).dim(), 6);
        assert_eq!(Label::ProjInj.dim(), 4);
        assert_eq!(Label::Regular.dim(), 2);
    }

    #[test]
    fn parse_and_display_roundtrip() {
        for s in ["D", "ProjInj", "W:0", "S:3", "N:1", "M:4", "B:2:3", "B:3:-1/2"] {
            let l: Label = s.parse().unwrap();
            assert_eq!(l.to_string(), s);
        }
        assert_eq!("DxD".parse::<Label>().unwrap(), Label::ProjInj);
        assert_eq!(
            "B:2:3/1".parse::<Label>().unwrap(),
            Label::band(2, BigRational::from_integer(BigInt::from(3))).unwrap()
        );
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!("X:9".parse::<Label>(), Err(LabelError::Syntax(_))));
        assert!(matches!("M:-1".parse::<Label>(), Err(LabelError::Syntax(_))));
        assert_eq!("B:2:0".parse::<Label>(), Err(LabelError::ZeroEigenvalue));
        assert_eq!("B:0:1".parse::<Label>(), Err(LabelError::EmptyBand));
    }

    #[test]
    fn label_order_puts_strings_first() {
        let mut v = vec![Label::Regular, Label::ProjInj, Label::w(1), Label::m(1), Label::n(1)];
        v.sort();
        assert_eq!(v, vec![Label::m(1), Label::n(1), Label::w(1), Label::ProjInj, Label::Regular]);
    }

    #[test]
    fn regular_band_is_canonicalized() {
        let b = Label::band(1, BigRational::one()).unwrap();
        assert_eq!(b.canonical(), Label::Regular);
    }
}
