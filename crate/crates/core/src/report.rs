//! Command-level analyses and their JSON, TSV and text renderings.

use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::budget::Budget;
use crate::complexity::{
    family_generator, fit_polynomial_exponent, intermediate_growth_check, predicted_exponent,
    stretched_envelope_check, FamilyParams,
};
use crate::document::{to_canonical_json, to_value, word_value};
use crate::entropy::{
    count_table, inflation_entropy_from, prop44_upper_bound, EngineChoice, DEFAULT_M_EXACT,
};
use crate::error::{Error, Result};
use crate::language::{
    complexity_table, complexity_table_at, entropy_from_complexity, Language, LanguageMode,
};
use crate::parikh::{
    letters_in_subshift, parikh_hull_from, perron_data, positivity_report, prop45_bounds,
    DEFAULT_LETTER_MARGIN,
};
use crate::structure::{
    classify_entropy, constant_length, find_splitting_pair, is_compatible, is_primitive,
    unique_realisation_paths, UrpStatus, Witness,
};
use crate::substitution::RandomSubstitution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputMode {
    Tsv,
    Json,
    Text,
}

/// Model for `complexity` fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitModel {
    Polynomial,
    Stretched,
}

impl std::str::FromStr for FitModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polynomial" => Ok(FitModel::Polynomial),
            "stretched" | "stretched-exponential" => Ok(FitModel::Stretched),
            _ => Err(Error::pre(format!("unknown fit model `{s}`"))),
        }
    }
}

/// Parameters shared by all commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Depth `m` (powers, counts).
    pub m: usize,
    /// Depth `k` (inflation words, hulls).
    pub k: usize,
    /// Word length `N` or language depth.
    pub n: usize,
    pub margin: Option<usize>,
    pub engine: EngineChoice,
    pub mode: LanguageMode,
    pub output: OutputMode,
    pub threads: Option<usize>,
    pub budget: Budget,
    pub reference: Option<f64>,
    pub reference_tolerance: f64,
    pub fit: FitModel,
    /// Minimum frequency for a positivity certificate.
    pub threshold: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            m: 8,
            k: 4,
            n: 12,
            margin: None,
            engine: EngineChoice::Auto,
            mode: LanguageMode::Subshift,
            output: OutputMode::Tsv,
            threads: None,
            budget: Budget::from_env(),
            reference: None,
            reference_tolerance: 1e-3,
            fit: FitModel::Polynomial,
            threshold: 0.05,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.k == 0 || self.n == 0 {
            return Err(Error::pre("depth parameters must be at least 1"));
        }
        if self.margin == Some(0) {
            return Err(Error::pre("margin must be at least 1"));
        }
        if self.budget.max_words == 0 || self.budget.max_bytes == 0 {
            return Err(Error::pre("budgets must be positive"));
        }
        if self.threads == Some(0) {
            return Err(Error::pre("thread count must be at least 1"));
        }
        Ok(())
    }

    /// Runs `f` on a pool with the configured number of workers.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = self.threads {
            builder = builder.num_threads(t);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::pre(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

/// A rectangular table for TSV and text output.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub value: Value,
    pub tables: Vec<Table>,
    pub summary: Vec<String>,
}

impl Report {
    /// True when some table in the report was cut short by the budget.
    pub fn truncated(&self) -> bool {
        fn walk(v: &Value) -> bool {
            match v {
                Value::Object(m) => m
                    .iter()
                    .any(|(k, x)| (k.ends_with("truncated") && x == &Value::Bool(true)) || walk(x)),
                Value::Array(a) => a.iter().any(walk),
                _ => false,
            }
        }
        walk(&self.value)
    }

    pub fn render(&self, mode: OutputMode) -> String {
        match mode {
            OutputMode::Json => self.to_json(),
            OutputMode::Tsv => self.to_tsv(),
            OutputMode::Text => self.to_text(),
        }
    }

    /// Pretty JSON with stable key order and a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.value).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for t in &self.tables {
            out.push_str(&format!("# {}\n", t.name));
            out.push_str(&t.header.join("\t"));
            out.push('\n');
            for r in &t.rows {
                out.push_str(&r.join("\t"));
                out.push('\n');
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for line in &self.summary {
            out.push_str(line);
            out.push('\n');
        }
        for t in &self.tables {
            out.push_str(&format!("\n{}\n", t.name));
            let mut widths: Vec<usize> = t.header.iter().map(|h| h.chars().count()).collect();
            for r in &t.rows {
                for (w, c) in widths.iter_mut().zip(r) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let line = |cells: &[String]| -> String {
                let parts: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect();
                parts.join("  ").trim_end().to_string() + "\n"
            };
            out.push_str(&line(&t.header));
            for r in &t.rows {
                out.push_str(&line(r));
            }
        }
        out
    }
}

fn labelled(value: impl Into<Value>, status: &str) -> Value {
    json!({ "value": value.into(), "status": status })
}

fn f(x: f64) -> String {
    let s = format!("{x:.12}");
    // tiny negatives round to "-0.000000000000"
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

fn big(x: &BigUint) -> Value {
    Value::String(x.to_string())
}

/// Structural properties in one document.
pub fn cmd_check(sub: &RandomSubstitution, cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let prim = is_primitive(sub);
    let compat = is_compatible(sub);
    let ell = constant_length(sub);
    let urp = unique_realisation_paths(sub, cfg.m.min(3), cfg.n.max(2), &cfg.budget)?;
    let pair = find_splitting_pair(sub, cfg.m, &cfg.budget)?;

    let mut summary = Vec::new();
    let mut props = Table::new("properties", &["property", "value", "witness"]);
    let tick = |b: bool| if b { "yes" } else { "no" }.to_string();

    let mut primitivity = json!({
        "primitive": prim.primitive,
        "exponent": prim.exponent,
    });
    if !prim.primitive {
        let pairs: Vec<Value> = prim
            .unreachable
            .iter()
            .map(|(a, b)| json!([sub.token(*a), sub.token(*b)]))
            .collect();
        let note = match prim.unreachable.first() {
            Some((a, b)) => format!(
                "not primitive: `{}` never produces `{}` at any power",
                sub.token(*a),
                sub.token(*b)
            ),
            None => "not primitive: no power has all entries positive".to_string(),
        };
        primitivity["unreachable"] = Value::Array(pairs);
        primitivity["note"] = Value::String(note.clone());
        summary.push(note);
    }
    props.push(vec![
        "primitive".into(),
        tick(prim.primitive),
        prim.exponent.map_or(String::new(), |e| format!("exponent {e}")),
    ]);
    props.push(vec!["deterministic".into(), tick(sub.is_deterministic()), String::new()]);

    let compatibility = match &compat {
        Ok(()) => json!({ "compatible": true }),
        Err(w) => json!({
            "compatible": false,
            "witness": {
                "letter": sub.token(w.letter),
                "u": word_value(sub, &w.u),
                "v": word_value(sub, &w.v),
                "count_letter": sub.token(w.count_letter),
            }
        }),
    };
    props.push(vec![
        "compatible".into(),
        tick(compat.is_ok()),
        compat.as_ref().err().map_or(String::new(), |w| {
            format!(
                "{}: {} vs {} differ in `{}`",
                sub.token(w.letter),
                sub.format_word(&w.u),
                sub.format_word(&w.v),
                sub.token(w.count_letter)
            )
        }),
    ]);
    props.push(vec![
        "constant_length".into(),
        ell.map_or("no".into(), |l| l.to_string()),
        String::new(),
    ]);

    let urp_value = urp_json(sub, &urp);
    props.push(vec![
        "unique_realisation_paths".into(),
        match &urp {
            UrpStatus::ProvedByLemma { .. } => "proved".into(),
            UrpStatus::VerifiedUpTo { .. } => "verified".into(),
            UrpStatus::Counterexample { .. } => "no".into(),
        },
        String::new(),
    ]);
    let pair_value = match &pair {
        Some(p) => json!({
            "power": p.power,
            "letter": sub.token(p.letter),
            "u": word_value(sub, &p.u),
            "v": word_value(sub, &p.v),
        }),
        None => Value::Null,
    };
    props.push(vec![
        "splitting_pair".into(),
        tick(pair.is_some()),
        pair.as_ref().map_or(String::new(), |p| {
            format!(
                "({}, {}, {}, {})",
                p.power,
                sub.token(p.letter),
                sub.format_word(&p.u),
                sub.format_word(&p.v)
            )
        }),
    ]);
    summary.insert(
        0,
        format!(
            "primitive {}, compatible {}, constant length {}, splitting pair {}",
            tick(prim.primitive),
            tick(compat.is_ok()),
            ell.map_or("no".into(), |l| l.to_string()),
            tick(pair.is_some())
        ),
    );
    let value = json!({
        "command": "check",
        "substitution": to_value(sub),
        "primitivity": primitivity,
        "deterministic": sub.is_deterministic(),
        "compatibility": compatibility,
        "constant_length": ell,
        "unique_realisation_paths": urp_value,
        "splitting_pair": pair_value,
        "max_power_searched": cfg.m,
    });
    Ok(Report {
        command: "check",
        value,
        tables: vec![props],
        summary,
    })
}

fn urp_json(sub: &RandomSubstitution, urp: &UrpStatus) -> Value {
    match urp {
        UrpStatus::ProvedByLemma {
            compatible,
            constant_length,
        } => json!({
            "status": "proved-by-lemma",
            "compatible": compatible,
            "constant_length": constant_length,
        }),
        UrpStatus::VerifiedUpTo {
            max_power,
            max_word_len,
        } => json!({
            "status": "verified-up-to",
            "max_power": max_power,
            "max_word_len": max_word_len,
        }),
        UrpStatus::Counterexample {
            word,
            power,
            first,
            second,
        } => json!({
            "status": "counterexample",
            "word": word_value(sub, word),
            "power": power,
            "first": first.iter().map(|w| word_value(sub, w)).collect::<Vec<_>>(),
            "second": second.iter().map(|w| word_value(sub, w)).collect::<Vec<_>>(),
        }),
    }
}

/// Counts with more digits appear in JSON only.
const TABLE_DIGITS: usize = 30;

/// Inflation word entropy with bounds, frequency estimates and a
/// positivity verdict.
pub fn cmd_entropy(sub: &RandomSubstitution, cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let ell = constant_length(sub);
    if ell.is_none() && is_compatible(sub).is_err() {
        return Err(Error::pre("entropy needs constant length or compatibility"));
    }
    let m_exact = DEFAULT_M_EXACT.max(cfg.m.min(20));
    let table = count_table(sub, cfg.m, cfg.engine, m_exact, &cfg.budget)?;
    let mut report = inflation_entropy_from(sub, &table)?;
    if let Some(r) = cfg.reference {
        report.compare_with(r, cfg.reference_tolerance);
    }
    let mut summary = vec![format!(
        "engine {}, depth {}, pooled estimate {:.6} (letter {})",
        report.engine, report.m_max, report.pooled_estimate, report.pooled_letter
    )];

    let mut seq = Table::new("inflation_entropy", &["m", "letter", "e_m", "lower", "upper", "count"]);
    for (a, l) in sub.letters().zip(&report.letters) {
        for (i, e) in l.sequence.iter().enumerate() {
            let m = i + 1;
            let (lo, hi) = l.enclosure[i];
            let c = table
                .exact(a, m)
                .map(|x| x.to_string())
                .filter(|s| s.len() <= TABLE_DIGITS)
                .unwrap_or_default();
            seq.push(vec![m.to_string(), l.letter.clone(), f(*e), f(lo), f(hi), c]);
        }
    }

    let mut counts = Map::new();
    for a in sub.letters() {
        let row: Vec<Value> = (0..=table.depth())
            .map(|m| match table.exact(a, m) {
                Some(x) => big(x),
                None => {
                    let (lo, hi) = table.log_interval(a, m);
                    json!({ "ln_lower": lo, "ln_upper": hi })
                }
            })
            .collect();
        counts.insert(sub.token(a).to_string(), Value::Array(row));
    }

    let mut value = json!({
        "command": "entropy",
        "substitution": to_value(sub),
        "log_base": "e",
        "counts": {
            "engine": table.engine.as_str(),
            "m_exact": table.m_exact,
            "truncated": table.truncated,
            "by_letter": counts,
        },
        "inflation_entropy": labelled(serde_json::to_value(&report).expect("report serialises"), "certified-enclosures; limits are estimates"),
    });

    let mut bounds = Table::new("bounds", &["quantity", "value", "status"]);
    for l in &report.letters {
        if let Some((lo, hi)) = l.bracket {
            bounds.push(vec![format!("bracket({})", l.letter), format!("[{}, {}]", f(lo), f(hi)), "estimate".into()]);
        }
    }
    if let Some(c) = &report.reference {
        summary.push(format!(
            "reference {} vs computed midpoint {:.6}: {}",
            c.reference,
            c.computed_midpoint,
            if c.agrees { "agrees" } else { "disagrees" }
        ));
    }

    if let Some(ell) = ell {
        let margin = cfg.margin.unwrap_or(DEFAULT_LETTER_MARGIN);
        let letters = letters_in_subshift(sub, margin, &cfg.budget)?;
        let sources = letters.letters();
        if sources.is_empty() {
            summary.push("subshift has no letters; frequency analysis skipped".into());
            value["letters_in_subshift"] = serde_json::to_value(&letters).expect("serialises");
        } else {
            let bound = prop44_upper_bound(sub, &table, cfg.m.min(table.depth()), cfg.k, &sources)?;
            let hulls = parikh_hull_from(sub, cfg.k, &sources, &cfg.budget)?;
            let freq = prop45_bounds(sub, &hulls)?;
            let positivity = positivity_report(sub, &hulls, cfg.threshold)?;
            bounds.push(vec![
                format!("inflation_bound(m={}, k={})", bound.m, bound.k),
                f(bound.bound),
                "certified".into(),
            ]);
            bounds.push(vec!["frequency_lower".into(), f(freq.lower_estimate), "estimate".into()]);
            bounds.push(vec![
                "frequency_upper".into(),
                f(freq.upper_asymptotic_form),
                "asymptotic-form".into(),
            ]);
            summary.push(format!(
                "certified upper bound {:.6} (m={}, k={}); positivity {}",
                bound.bound,
                bound.m,
                bound.k,
                positivity.verdict.as_str()
            ));
            value["letters_in_subshift"] = serde_json::to_value(&letters).expect("serialises");
            value["inflation_bound"] = labelled(
                serde_json::to_value(&bound).expect("serialises"),
                "certified",
            );
            value["frequency_bounds"] = serde_json::to_value(&freq).expect("serialises");
            value["frequency_hull"] = hulls.last().expect("k ≥ 1").to_json(sub);
            value["positivity"] = serde_json::to_value(&positivity).expect("serialises");
            let _ = ell;
        }
    } else if is_primitive(sub).primitive {
        let p = perron_data(sub)?;
        summary.push(format!("Perron eigenvalue {:.10}", p.lambda));
        value["perron"] = labelled(serde_json::to_value(&p).expect("serialises"), "estimate");
    }
    Ok(Report {
        command: "entropy",
        value,
        tables: vec![seq, bounds],
        summary,
    })
}

/// Entropy classification with its witness.
pub fn cmd_classify(sub: &RandomSubstitution, cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let r = classify_entropy(sub, cfg.m, cfg.n, &cfg.budget)?;
    let witness = |w: &Witness| -> Value {
        match w {
            Witness::SplittingPair(p) => json!({
                "kind": "splitting-pair",
                "power": p.power,
                "letter": sub.token(p.letter),
                "u": word_value(sub, &p.u),
                "v": word_value(sub, &p.v),
            }),
            Witness::UniquePaths { letter, urp } => json!({
                "kind": "unique-realisation-paths",
                "letter": sub.token(*letter),
                "paths": urp_json(sub, urp),
            }),
            Witness::Marginal {
                marginal,
                verified_depth,
            } => json!({
                "kind": "marginal",
                "marginal": to_value(marginal),
                "verified_depth": verified_depth,
            }),
        }
    };
    let table = complexity_table(sub, cfg.n, cfg.mode, cfg.margin, &cfg.budget)?;
    let mut t = Table::new("complexity", &["n", "p"]);
    for (n, p) in &table.entries {
        t.push(vec![n.to_string(), p.to_string()]);
    }
    let mut summary = vec![format!("verdict {}", r.verdict.as_str())];
    if let Some(Witness::Marginal { marginal, .. }) = &r.witness {
        let rules: Vec<String> = marginal
            .letters()
            .map(|a| format!("{} -> {}", marginal.token(a), marginal.format_word(&marginal.rules(a)[0])))
            .collect();
        summary.push(format!("marginal {}", rules.join(", ")));
    }
    summary.extend(r.diagnostics.iter().cloned());
    let value = json!({
        "command": "classify",
        "substitution": to_value(sub),
        "verdict": r.verdict.as_str(),
        "witness": r.witness.as_ref().map(witness),
        "supporting": r.supporting.iter().map(witness).collect::<Vec<_>>(),
        "max_power_searched": r.max_power_searched,
        "language_depth": r.language_depth,
        "diagnostics": r.diagnostics,
        "complexity": table,
    });
    Ok(Report {
        command: "classify",
        value,
        tables: vec![t],
        summary,
    })
}

/// Largest slice listed word by word.
pub const WORD_LISTING_CAP: usize = 10_000;

/// Complexity table `p(1..=N)` with its laws and entropy read-off.
pub fn cmd_language(sub: &RandomSubstitution, cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let table = complexity_table(sub, cfg.n, cfg.mode, cfg.margin, &cfg.budget)?;
    let ent = entropy_from_complexity(&table)?;
    let mut t = Table::new("complexity", &["n", "p", "ln_p_over_n"]);
    for ((n, p), r) in table.entries.iter().zip(&ent.ratio) {
        t.push(vec![n.to_string(), p.to_string(), f(*r)]);
    }
    let last = table.entries.last().map(|e| e.0).unwrap_or(0);
    let mut lang = Language::new(sub, cfg.budget);
    let words = match table.get(last) {
        Some(p) if *p <= BigUint::from(WORD_LISTING_CAP) && !table.truncated => {
            let set = match table.margin {
                Some(k) => lang.subshift_words(last, k)?,
                None => lang.legal_words(last)?,
            };
            Value::Array(set.iter().map(|w| word_value(sub, w)).collect())
        }
        _ => Value::Null,
    };
    let summary = vec![format!(
        "{} language, p({last}) = {}, entropy upper bound {:.6}",
        match cfg.mode {
            LanguageMode::Legal => "legal",
            LanguageMode::Subshift => "subshift",
        },
        table.get(last).map_or("?".into(), |p| p.to_string()),
        ent.upper_bound
    )];
    let value = json!({
        "command": "language",
        "substitution": to_value(sub),
        "complexity": table,
        "laws": {
            "monotone": table.is_monotone(),
            "submultiplicative": table.is_submultiplicative(),
            "morse_hedlund_consistent": table.morse_hedlund_consistent(),
        },
        "entropy": labelled(serde_json::to_value(&ent).expect("serialises"), "upper-bound"),
        "words": words,
    });
    Ok(Report {
        command: "language",
        value,
        tables: vec![t],
        summary,
    })
}

/// The family member as a substitution document plus its predicted exponent.
pub fn cmd_family(params: &FamilyParams) -> Result<(String, Report)> {
    let sub = family_generator(params)?;
    let doc = to_canonical_json(&sub);
    let alpha = predicted_exponent(params);
    let mut t = Table::new("family", &["ell", "perms", "predicted_exponent"]);
    t.push(vec![params.ell.to_string(), params.perms.join(","), f(alpha)]);
    let value = json!({
        "command": "family",
        "params": params,
        "predicted_exponent": alpha,
        "substitution": to_value(&sub),
    });
    Ok((
        doc,
        Report {
            command: "family",
            value,
            tables: vec![t],
            summary: vec![format!("predicted exponent {alpha:.6}")],
        },
    ))
}

/// Geometric grid `b, b², …` up to `max_n`.
pub fn geometric_grid(base: usize, max_n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = base.max(2);
    while n <= max_n {
        out.push(n);
        n = match n.checked_mul(base.max(2)) {
            Some(x) => x,
            None => break,
        };
    }
    out
}

/// Complexity on a geometric grid with a growth fit.
pub fn cmd_complexity(sub: &RandomSubstitution, cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let base = constant_length(sub).unwrap_or(2);
    let grid: Vec<usize> = match cfg.fit {
        FitModel::Polynomial => geometric_grid(base, cfg.n),
        FitModel::Stretched => (1..=cfg.n).filter(|n| *n <= 12 || geometric_grid(base, cfg.n).contains(n)).collect(),
    };
    let table = complexity_table_at(sub, &grid, cfg.mode, cfg.margin, &cfg.budget)?;
    let mut t = Table::new("complexity", &["n", "p"]);
    for (n, p) in &table.entries {
        t.push(vec![n.to_string(), p.to_string()]);
    }
    let mut summary = Vec::new();
    let fit_value = match cfg.fit {
        FitModel::Polynomial => {
            let ns: Vec<usize> = table.entries.iter().map(|e| e.0).collect();
            let fit = fit_polynomial_exponent(&table, &ns)?;
            summary.push(format!(
                "fitted exponent {:.4} (log-log slope {:.4})",
                fit.alpha_hat, fit.alpha_loglog
            ));
            labelled(serde_json::to_value(&fit).expect("serialises"), "estimate")
        }
        FitModel::Stretched => {
            let ell = constant_length(sub)
                .ok_or_else(|| Error::pre("stretched envelope needs constant length"))?;
            let check = intermediate_growth_check(sub, cfg.k, cfg.m, &cfg.budget)?;
            let counts = match &check.condition_ii {
                Some(w) => Some((
                    count_table(sub, cfg.m, EngineChoice::Auto, DEFAULT_M_EXACT, &cfg.budget)?,
                    sub.letter(&w.letter).expect("witness letter"),
                )),
                None => None,
            };
            let env = stretched_envelope_check(&table, ell, counts.as_ref().map(|(c, b)| (c, *b)))?;
            summary.push(format!(
                "envelope constants c1 = {:.4}, c2 = {:.4}; {}",
                env.c1, env.c2, env.classification
            ));
            let mut e = Table::new("envelope", &["n", "log2_p", "ratio", "source"]);
            for p in &env.points {
                e.push(vec![p.n.to_string(), f(p.log2_p), f(p.ratio), p.source.into()]);
            }
            t = e;
            json!({
                "envelope": labelled(serde_json::to_value(&env).expect("serialises"), "estimate"),
                "intermediate_growth": serde_json::to_value(&check).expect("serialises"),
            })
        }
    };
    let value = json!({
        "command": "complexity",
        "substitution": to_value(sub),
        "grid": grid,
        "complexity": table,
        "fit": fit_value,
    });
    Ok(Report {
        command: "complexity",
        value,
        tables: vec![t],
        summary,
    })
}
