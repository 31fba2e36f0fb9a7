//! Serde helpers: big naturals are emitted as decimal strings.

use num_bigint::BigUint;
use serde::ser::{SerializeSeq, Serializer};

pub(crate) fn big_pairs<S: Serializer>(xs: &[(usize, BigUint)], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for (n, x) in xs {
        seq.serialize_element(&(n, x.to_string()))?;
    }
    seq.end()
}
