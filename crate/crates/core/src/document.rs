//! JSON substitution documents.
//!
//! ```json
//! {
//!   "alphabet": ["a", "b"],
//!   "rules": { "a": ["ab", "ba"], "b": ["a"] },
//!   "probabilities": { "a": [0.5, 0.5], "b": [1.0] }
//! }
//! ```
//!
//! Words are strings when every token is a single character, otherwise
//! arrays of tokens. `probabilities` is optional.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::substitution::RandomSubstitution;
use crate::word::Word;

/// Parses and validates a substitution document.
pub fn parse_spec(text: &str) -> Result<RandomSubstitution> {
    parse_spec_with_warnings(text).map(|(s, _)| s)
}

/// Like [`parse_spec`], also returning deduplication warnings.
pub fn parse_spec_with_warnings(text: &str) -> Result<(RandomSubstitution, Vec<String>)> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("json: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::InvalidSpec("top level must be an object".into()))?;

    let alphabet: Vec<String> = match obj.get("alphabet") {
        Some(Value::Array(xs)) => xs
            .iter()
            .map(|x| {
                x.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::InvalidSpec("alphabet entries must be strings".into()))
            })
            .collect::<Result<_>>()?,
        _ => return Err(Error::InvalidSpec("missing `alphabet` array".into())),
    };
    if alphabet.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    for (i, t) in alphabet.iter().enumerate() {
        if alphabet[..i].contains(t) {
            return Err(Error::DuplicateLetter(t.clone()));
        }
    }
    let single = alphabet.iter().all(|t| t.chars().count() == 1);

    let rules_obj = obj
        .get("rules")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::InvalidSpec("missing `rules` object".into()))?;
    if let Some(k) = rules_obj.keys().find(|k| !alphabet.contains(k)) {
        return Err(Error::UnknownLetter(k.clone()));
    }
    let mut rules = Vec::with_capacity(alphabet.len());
    for a in &alphabet {
        let list = match rules_obj.get(a) {
            Some(Value::Array(xs)) => xs,
            Some(_) => return Err(Error::InvalidSpec(format!("rules for `{a}` must be an array"))),
            None => return Err(Error::EmptyRule(a.clone())),
        };
        let words = list
            .iter()
            .map(|v| parse_word_value(v, &alphabet, single))
            .collect::<Result<Vec<_>>>()?;
        rules.push(words);
    }

    let probabilities = match obj.get("probabilities") {
        None | Some(Value::Null) => None,
        Some(Value::Object(p)) => {
            if let Some(k) = p.keys().find(|k| !alphabet.contains(k)) {
                return Err(Error::UnknownLetter(k.clone()));
            }
            let mut out = Vec::with_capacity(alphabet.len());
            for a in &alphabet {
                let xs = p
                    .get(a)
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Probability {
                        letter: a.clone(),
                        reason: "missing probability list".into(),
                    })?;
                let xs = xs
                    .iter()
                    .map(|x| {
                        x.as_f64().ok_or_else(|| Error::Probability {
                            letter: a.clone(),
                            reason: "entries must be numbers".into(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.push(xs);
            }
            Some(out)
        }
        Some(_) => return Err(Error::InvalidSpec("`probabilities` must be an object".into())),
    };

    RandomSubstitution::with_warnings(alphabet, rules, probabilities)
}

fn parse_word_value(v: &Value, alphabet: &[String], single: bool) -> Result<Word> {
    let lookup = |t: &str| -> Result<u8> {
        alphabet
            .iter()
            .position(|x| x == t)
            .map(|i| i as u8)
            .ok_or_else(|| Error::UnknownLetter(t.to_string()))
    };
    let letters = match v {
        Value::String(s) if single => s
            .chars()
            .map(|c| lookup(&c.to_string()))
            .collect::<Result<Vec<_>>>()?,
        Value::String(_) => {
            return Err(Error::InvalidSpec(
                "multi-character tokens require words as token arrays".into(),
            ))
        }
        Value::Array(ts) => ts
            .iter()
            .map(|t| {
                t.as_str()
                    .ok_or_else(|| Error::InvalidSpec("word tokens must be strings".into()))
                    .and_then(lookup)
            })
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::InvalidSpec("words must be strings or arrays".into())),
    };
    if letters.is_empty() {
        return Err(Error::InvalidSpec("empty realisation".into()));
    }
    Ok(Word::new(letters))
}

/// JSON value of a word: a string for single-character alphabets,
/// otherwise an array of tokens.
pub fn word_value(sub: &RandomSubstitution, w: &Word) -> Value {
    if sub.single_char_tokens() {
        Value::String(sub.format_word(w))
    } else {
        Value::Array(
            w.letters()
                .map(|a| Value::String(sub.token(a).to_string()))
                .collect(),
        )
    }
}

/// The document as a JSON value with keys in canonical order.
pub fn to_value(sub: &RandomSubstitution) -> Value {
    let mut root = Map::new();
    root.insert(
        "alphabet".into(),
        Value::Array(sub.alphabet().iter().cloned().map(Value::String).collect()),
    );
    let mut rules = Map::new();
    for a in sub.letters() {
        rules.insert(
            sub.token(a).to_string(),
            Value::Array(sub.rules(a).iter().map(|w| word_value(sub, w)).collect()),
        );
    }
    root.insert("rules".into(), Value::Object(rules));
    if let Some(p) = sub.probabilities() {
        let mut probs = Map::new();
        for a in sub.letters() {
            probs.insert(
                sub.token(a).to_string(),
                Value::Array(p[a.index()].iter().map(|&x| Value::from(x)).collect()),
            );
        }
        root.insert("probabilities".into(), Value::Object(probs));
    }
    Value::Object(root)
}

/// Canonical serialisation: pretty-printed, canonical key order, trailing
/// newline. `to_canonical_json(parse_spec(t))` is a fixpoint.
pub fn to_canonical_json(sub: &RandomSubstitution) -> String {
    let mut s = serde_json::to_string_pretty(&to_value(sub)).expect("document serialises");
    s.push('\n');
    s
}
