//! JSON has no infinities; unbounded region edges are written as `null`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Real;

pub mod lower_edge {
    use super::*;

    pub fn serialize<T: Real, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
        (if x.is_finite() { Some(*x) } else { None }).serialize(s)
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        Ok(Option::<T>::deserialize(d)?.unwrap_or_else(T::neg_infinity))
    }
}

pub mod upper_edge {
    use super::*;

    pub fn serialize<T: Real, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
        (if x.is_finite() { Some(*x) } else { None }).serialize(s)
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        Ok(Option::<T>::deserialize(d)?.unwrap_or_else(T::infinity))
    }
}
