//! Serde adapters writing big integers as decimal strings and rationals as
//! `{"num": "...", "den": "..."}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::Serializer;

pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }
}

pub mod opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_str(&x.to_string()),
            None => s.serialize_none(),
        }
    }
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("num", &v.numer().to_string())?;
        map.serialize_entry("den", &v.denom().to_string())?;
        map.end()
    }
}

/// `IntPoly` as its text form.
pub mod poly {
    use super::*;
    use crate::polynomial::IntPoly;

    pub fn serialize<S: Serializer>(v: &IntPoly, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }
}
