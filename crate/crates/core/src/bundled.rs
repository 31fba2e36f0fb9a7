//! Example substitutions shipped with the repository under `specs/`.

use crate::document::parse_spec;
use crate::substitution::RandomSubstitution;

macro_rules! bundle {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../../specs/", $name, ".json")))),*]
    };
}

static SOURCES: &[(&str, &str)] = bundle!(
    "random_fibonacci",
    "log_series",
    "triple_bba_abb",
    "cyclic_abc",
    "squaring",
    "sum_of_squares",
    "family_3_abc_acb",
    "intermediate_growth",
    "finite_subshift",
    "illegal_letter",
);

/// Names of all bundled examples.
pub fn names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|(n, _)| *n)
}

/// Raw document text of a bundled example.
pub fn source(name: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parsed bundled example.
pub fn get(name: &str) -> Option<RandomSubstitution> {
    source(name).map(|s| parse_spec(s).expect("bundled spec parses"))
}

pub fn all() -> Vec<(&'static str, RandomSubstitution)> {
    names().map(|n| (n, get(n).unwrap())).collect()
}
