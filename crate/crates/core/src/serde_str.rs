//! Big numbers serialized as decimal strings, so reports stay exact in any
//! JSON reader.

use serde::Serializer;

pub(crate) fn one<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub(crate) fn many<T: std::fmt::Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub(crate) fn matrix<T: std::fmt::Display, S: Serializer>(
    m: &[Vec<T>],
    s: S,
) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = m
        .iter()
        .map(|row| row.iter().map(|x| x.to_string()).collect())
        .collect();
    serde::Serialize::serialize(&rows, s)
}
