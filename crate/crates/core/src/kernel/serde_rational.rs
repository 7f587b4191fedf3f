//! Serde adapters that write rationals as `"p/q"` strings.

use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

use super::{format_rational, parse_rational, Rational};

pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&format_rational(value))
}

pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
    let text = String::deserialize(deserializer)?;
    parse_rational(&text).map_err(D::Error::custom)
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(
        value: &Option<Rational>,
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => serializer.serialize_some(&format_rational(v)),
            None => serializer.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(deserializer)?
            .map(|text| parse_rational(&text).map_err(D::Error::custom))
            .transpose()
    }
}
