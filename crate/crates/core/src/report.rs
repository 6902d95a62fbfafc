//! Serialization helpers shared by the stage reports.

use crate::rational::{to_fraction_string, Rational};

pub(crate) fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&to_fraction_string(r))
}

pub(crate) fn ser_opt_rational<S: serde::Serializer>(
    r: &Option<Rational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&to_fraction_string(r)),
        None => s.serialize_none(),
    }
}
