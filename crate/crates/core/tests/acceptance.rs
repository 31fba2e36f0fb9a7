//! Acceptance checks, one line per criterion. Run with
//! `cargo test --release -p rsubst --test acceptance`.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::One;
use rsubst::bundled;
use rsubst::complexity::{
    family_generator, fit_polynomial_exponent, intermediate_growth_check,
    stretched_envelope_check, FamilyParams,
};
use rsubst::entropy::{
    count_table, counts_enumeration, counts_recurrence, inflation_entropy_from,
    prop44_upper_bound, EngineChoice,
};
use rsubst::parikh::{letters_in_subshift, parikh_hull_from, prop45_bounds};
use rsubst::report::{cmd_entropy, cmd_language, OutputMode, RunConfig};
use rsubst::structure::{
    classify_entropy, constant_length, find_splitting_pair, is_compatible, is_primitive, Verdict,
    Witness,
};
use rsubst::{
    complexity_table, complexity_table_at, subshift_language, Budget, LanguageMode,
    RandomSubstitution,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn get(name: &str) -> RandomSubstitution {
    bundled::get(name).expect("bundled example")
}

fn pow2(e: usize) -> BigUint {
    BigUint::one() << e
}

fn ac1() -> Outcome {
    let s = get("squaring");
    let t = counts_recurrence(&s, 12, 12).map_err(|e| e.to_string())?;
    let a = s.letter("a").unwrap();
    for m in 1..=12 {
        let c = t.exact(a, m).ok_or("missing exact count")?;
        ensure(*c == pow2(1 << (m - 1)), || format!("count(a,{m}) = {c}"))?;
    }
    let r = inflation_entropy_from(&s, &t).map_err(|e| e.to_string())?;
    let target = std::f64::consts::LN_2 / 2.0;
    let worst = r.letter("a").unwrap().sequence.iter().map(|e| (e - target).abs()).fold(0.0, f64::max);
    ensure(worst < 1e-12, || format!("max |e_m − ln2/2| = {worst:e}"))?;
    Ok(format!("log2 count = 2^(m-1) for m <= 12; max |e_m - ln2/2| = {worst:.1e}"))
}

fn ac2() -> Outcome {
    let s = get("log_series");
    let t = counts_recurrence(&s, 20, 20).map_err(|e| e.to_string())?;
    let (a, b) = (s.letter("a").unwrap(), s.letter("b").unwrap());
    for m in 1..=20 {
        let (ca, cb) = (t.exact(a, m).unwrap(), t.exact(b, m).unwrap());
        ensure(*ca == cb * BigUint::from(m + 1), || format!("identity fails at m={m}"))?;
    }
    let r = inflation_entropy_from(&s, &t).map_err(|e| e.to_string())?;
    let seq = &r.letter("b").unwrap().sequence;
    let mut partial = 0.0f64;
    let mut worst = 0.0f64;
    for n in 1..=20 {
        partial += (n as f64).ln() / 2f64.powi(n);
        worst = worst.max((seq[n as usize - 1] - partial).abs());
    }
    ensure(worst < 1e-10, || format!("partial-sum deviation {worst:e}"))?;
    let gap = (seq[19] - 0.507834).abs();
    ensure(gap < 5e-6, || format!("e_20(b) = {} differs by {gap:e}", seq[19]))?;
    Ok(format!("identity exact for m <= 20; partial sums within {worst:.1e}; e_20(b) = {:.7}", seq[19]))
}

fn ac3() -> Outcome {
    let budget = Budget::words(100_000);
    let mut lines = Vec::new();
    for name in ["squaring", "log_series", "sum_of_squares", "intermediate_growth", "family_3_abc_acb"] {
        let s = get(name);
        let rec = counts_recurrence(&s, 6, 6).map_err(|e| format!("{name}: {e}"))?;
        let en = counts_enumeration(&s, 6, &budget).map_err(|e| format!("{name}: {e}"))?;
        let depth = en.depth();
        ensure(depth >= 4, || format!("{name}: enumeration stopped at {depth}"))?;
        for a in s.letters() {
            for m in 0..=depth {
                ensure(rec.exact(a, m) == en.exact(a, m), || {
                    format!("{name}: count({}, {m}) differs", s.token(a))
                })?;
            }
        }
        lines.push(format!("{name}:{depth}"));
    }
    Ok(format!("engines agree (letters x depth): {}", lines.join(" ")))
}

fn ac4() -> Outcome {
    let s = get("sum_of_squares");
    let a = s.letter("a").unwrap();
    let rec = counts_recurrence(&s, 14, 14).map_err(|e| e.to_string())?;
    let want = [2u32, 5, 29, 941];
    for (i, w) in want.iter().enumerate() {
        ensure(rec.exact(a, i + 1) == Some(&BigUint::from(*w)), || format!("count(a,{}) mismatch", i + 1))?;
    }
    // the recurrence from (2,1): c_{m+1}(a) = c_m(a)^2 + c_m(b)^2, c_{m+1}(b) = c_m(a) c_m(b)
    let (mut x, mut y) = (BigUint::from(2u32), BigUint::one());
    for m in 1..=14 {
        ensure(rec.exact(a, m) == Some(&x), || format!("oracle recurrence differs at m={m}"))?;
        let nx = &x * &x + &y * &y;
        y = &x * &y;
        x = nx;
    }
    let en = counts_enumeration(&s, 3, &Budget::default()).map_err(|e| e.to_string())?;
    for m in 1..=3 {
        ensure(en.exact(a, m) == rec.exact(a, m), || format!("enumeration differs at m={m}"))?;
    }
    let mut r = inflation_entropy_from(&s, &rec).map_err(|e| e.to_string())?;
    r.compare_with(0.4115, 1e-3);
    let (lo, hi) = r.letter("a").unwrap().bracket.ok_or("no bracket")?;
    let ln = rec.ln(a, 14);
    let l14 = 2f64.powi(14);
    ensure((lo - ln / l14).abs() < 1e-12 && (hi - ln / (l14 - 1.0)).abs() < 1e-12, || "bracket formula".into())?;
    ensure(hi - lo < 1e-4, || format!("bracket width {}", hi - lo))?;
    let check = r.reference.as_ref().ok_or("reference not recorded")?;
    ensure(check.computed_midpoint >= lo && check.computed_midpoint <= hi, || "midpoint outside bracket".into())?;
    Ok(format!(
        "counts 2,5,29,941 confirmed; bracket [{lo:.6}, {hi:.6}] width {:.1e}; midpoint {:.6} vs printed 0.4115 -> {}",
        hi - lo,
        check.computed_midpoint,
        if check.agrees { "agrees" } else { "disagrees (flagged)" }
    ))
}

fn ac5() -> Outcome {
    let budget = Budget::default();
    let s1 = get("random_fibonacci");
    let r = classify_entropy(&s1, 4, 8, &budget).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::PositiveEntropy, || format!("verdict {}", r.verdict.as_str()))?;
    match &r.witness {
        Some(Witness::SplittingPair(p)) => ensure(p.power == 1, || format!("power {}", p.power))?,
        other => return Err(format!("witness {other:?}")),
    }
    let s = get("finite_subshift");
    let r = classify_entropy(&s, 4, 12, &budget).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::ZeroEntropyDeterministic, || format!("verdict {}", r.verdict.as_str()))?;
    let Some(Witness::Marginal { marginal, verified_depth }) = &r.witness else {
        return Err("no marginal witness".into());
    };
    ensure(*verified_depth >= 12, || format!("verified to {verified_depth}"))?;
    let expect = RandomSubstitution::from_strs(&[("a", &["aba"]), ("b", &["bab"])]).unwrap();
    ensure(*marginal == expect, || "marginal differs".into())?;
    let table = complexity_table(&s, 12, LanguageMode::Subshift, None, &budget).map_err(|e| e.to_string())?;
    ensure(table.entries.iter().all(|(_, p)| *p == BigUint::from(2u32)), || "p(n) != 2".into())?;
    Ok("random Fibonacci: splitting pair at power 1; a->{a,aba}, b->{bab}: marginal a->aba, b->bab, depth 12, p(n)=2 for n <= 12".into())
}

fn ac6() -> Outcome {
    let s = family_generator(&FamilyParams::new(3, &["abc", "acb"]).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let grid: Vec<usize> = (1..=7).map(|k| 3usize.pow(k)).collect();
    let table = complexity_table_at(&s, &grid, LanguageMode::Legal, None, &Budget::default())
        .map_err(|e| e.to_string())?;
    ensure(!table.truncated && table.entries.len() == grid.len(), || "table truncated".into())?;
    let fit = fit_polynomial_exponent(&table, &grid).map_err(|e| e.to_string())?;
    ensure((1.55..=1.71).contains(&fit.alpha_hat), || {
        format!("alpha_hat {} (log-log {})", fit.alpha_hat, fit.alpha_loglog)
    })?;
    let counts = counts_recurrence(&s, 10, 10).map_err(|e| e.to_string())?;
    let e = s.letter("e").unwrap();
    for m in 1..=10 {
        ensure(counts.exact(e, m) == Some(&pow2(m - 1)), || format!("count(a5,{m})"))?;
    }
    Ok(format!(
        "p(3^7) = {}; alpha_hat = {:.4} (log-log slope {:.4}); count(a5,m) = 2^(m-1) for m <= 10",
        table.entries.last().unwrap().1,
        fit.alpha_hat,
        fit.alpha_loglog
    ))
}

fn ac7() -> Outcome {
    let s = get("intermediate_growth");
    let budget = Budget::default();
    let r = intermediate_growth_check(&s, 8, 12, &budget).map_err(|e| e.to_string())?;
    ensure(r.satisfied, || "not satisfied".into())?;
    let ev = r.frequency_evidence.iter().find(|e| e.letter == "b").ok_or("no b evidence")?;
    for k in 1..=8u32 {
        let want = format!("{}/{}", 2u64.pow(k), 3u64.pow(k));
        ensure(ev.max_frequency[k as usize - 1] == want, || {
            format!("max b-frequency at k={k}: {}", ev.max_frequency[k as usize - 1])
        })?;
    }
    let w = r.condition_ii.as_ref().ok_or("no growth witness")?;
    ensure(w.realisation == "abb" && w.occurrences == 2, || format!("witness {w:?}"))?;
    let counts = count_table(&s, 12, EngineChoice::Recurrence, 12, &budget).map_err(|e| e.to_string())?;
    let b = s.letter("b").unwrap();
    for m in 1..=12 {
        let c = counts.exact(b, m).ok_or("missing count")?;
        ensure(*c >= pow2(1 << (m - 1)), || format!("count(b,{m}) = {c}"))?;
    }
    let table = complexity_table(&s, 81, LanguageMode::Legal, None, &budget).map_err(|e| e.to_string())?;
    let env = stretched_envelope_check(&table, 3, Some((&counts, b))).map_err(|e| e.to_string())?;
    ensure(env.c1.is_finite() && env.c1 > 0.0 && env.c2.is_finite() && env.c2 > 0.0, || {
        format!("constants c1={} c2={}", env.c1, env.c2)
    })?;
    let beta = env.beta;
    for (n, p) in &table.entries {
        if *p <= BigUint::one() {
            continue;
        }
        let l2 = rsubst::entropy::ln_biguint(p) / std::f64::consts::LN_2;
        let nb = (*n as f64).powf(beta);
        ensure(l2 >= env.c1 * nb - 1e-9 && l2 <= (*n as f64).log2() + env.c2 * nb + 1e-9, || {
            format!("p({n}) outside envelope")
        })?;
    }
    Ok(format!(
        "b-frequency (2/3)^k for k <= 8; witness abb (|abb|_b = 2); count(b,m) >= 2^(2^(m-1)) for m <= 12; p(81) = {}; envelope c1 = {:.4}, c2 = {:.4} ({})",
        table.get(81).unwrap(),
        env.c1,
        env.c2,
        env.classification
    ))
}

fn ac8() -> Outcome {
    let budget = Budget::default();
    let mut checked = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut names = Vec::new();
    for (name, s) in bundled::all() {
        let Some(ell) = constant_length(&s) else { continue };
        if !is_primitive(&s).primitive {
            continue;
        }
        names.push(name);
        let counts = count_table(&s, 6, EngineChoice::Auto, 6, &budget).map_err(|e| e.to_string())?;
        let r = inflation_entropy_from(&s, &counts).map_err(|e| e.to_string())?;
        let sources = letters_in_subshift(&s, 8, &budget).map_err(|e| e.to_string())?.letters();
        let hulls = parikh_hull_from(&s, 6, &sources, &budget).map_err(|e| e.to_string())?;
        for k in 1..=6 {
            let lower = prop45_bounds(&s, &hulls[..k]).map_err(|e| e.to_string())?.lower_estimate;
            for m in 1..=6 {
                let bound = prop44_upper_bound(&s, &counts, m, k, &sources).map_err(|e| e.to_string())?.bound;
                let lm = (ell as f64).powi(m as i32);
                for a in &sources {
                    let e = r.letters[a.index()].sequence[m - 1];
                    let gap = e - lm / (lm - 1.0) * bound;
                    worst = worst.max(gap);
                    ensure(gap <= 1e-9, || format!("{name}: e_{m}({}) above scaled bound at k={k}", s.token(*a)))?;
                    checked += 1;
                }
                let gap = lower - bound;
                worst = worst.max(gap);
                ensure(gap <= 1e-9, || format!("{name}: frequency lower estimate above bound at m={m}, k={k}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} inequalities on {}; largest gap e_m minus scaled bound {worst:.2e}", names.join(", ")))
}

fn ac9() -> Outcome {
    let th = |n: &str| get(n);
    let (t1, t2, t3, t4) = (th("random_fibonacci"), th("log_series"), th("triple_bba_abb"), th("cyclic_abc"));
    let prim = |s: &RandomSubstitution| is_primitive(s).primitive;
    let comp = |s: &RandomSubstitution| is_compatible(s).is_ok();
    ensure(prim(&t1) && prim(&t2) && prim(&t4), || "primitivity of 1,2,4".into())?;
    ensure(comp(&t1) && comp(&t3) && comp(&t4) && !comp(&t2), || "compatibility".into())?;
    ensure(
        constant_length(&t1).is_none()
            && constant_length(&t2) == Some(2)
            && constant_length(&t3) == Some(3)
            && constant_length(&t4) == Some(3),
        || "constant length".into(),
    )?;
    let p3 = is_primitive(&t3);
    ensure(!p3.primitive && !p3.unreachable.is_empty(), || "third example primitivity".into())?;
    let cfg = RunConfig { budget: Budget::default(), ..RunConfig::default() };
    let report = rsubst::report::cmd_check(&t3, &cfg).map_err(|e| e.to_string())?;
    let note = report.value["primitivity"]["note"].as_str().ok_or("no discrepancy note")?.to_string();
    let _ = find_splitting_pair(&t1, 1, &Budget::default()).map_err(|e| e.to_string())?;
    Ok(format!("truth table matches; third example note: {note}"))
}

fn ac10() -> Outcome {
    let budget = Budget::default();
    let mut tables = 0;
    for (name, s) in bundled::all() {
        for mode in [LanguageMode::Legal, LanguageMode::Subshift] {
            let t = complexity_table(&s, 10, mode, Some(6), &budget).map_err(|e| format!("{name}: {e}"))?;
            ensure(t.is_monotone(), || {
                format!("{name}: not monotone")
            })?;
            ensure(t.is_submultiplicative(), || format!("{name}: not submultiplicative"))?;
            let constant = t.entries.windows(2).any(|w| w[0].1 == w[1].1);
            if constant {
                ensure(t.morse_hedlund_consistent(), || format!("{name}: Morse-Hedlund flag"))?;
            }
            tables += 1;
        }
        for n in 1..=8 {
            let sub = subshift_language(&s, n, 4, &budget).map_err(|e| e.to_string())?;
            let legal = rsubst::legal_words(&s, n, &budget).map_err(|e| e.to_string())?.words;
            ensure(sub.iter().all(|w| legal.contains(w)), || format!("{name}: subshift not in legal at n={n}"))?;
        }
    }
    let s = get("illegal_letter");
    let a = s.letter("a").unwrap();
    for margin in 4..=8 {
        let l = letters_in_subshift(&s, margin, &budget).map_err(|e| e.to_string())?;
        ensure(!l.contains(a), || format!("a kept at margin {margin}"))?;
    }
    let run = |threads: usize| -> Result<(String, String), String> {
        let cfg = RunConfig {
            m: 10,
            k: 4,
            n: 14,
            threads: Some(threads),
            output: OutputMode::Json,
            budget,
            ..RunConfig::default()
        };
        let e = cfg.install(|| cmd_entropy(&get("sum_of_squares"), &cfg)).map_err(|e| e.to_string())?;
        let l = cfg.install(|| cmd_language(&get("log_series"), &cfg)).map_err(|e| e.to_string())?;
        Ok((
            e.map_err(|e| e.to_string())?.to_json(),
            l.map_err(|e| e.to_string())?.to_json(),
        ))
    };
    let one = run(1)?;
    let four = run(4)?;
    ensure(one == four, || "JSON differs across thread counts".into())?;
    Ok(format!("{tables} tables obey the laws; subshift within legal; a excluded at margins 4..8; JSON identical on 1 and 4 threads"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("AC1", ac1, Duration::from_secs(1)),
        ("AC2", ac2, Duration::from_secs(1)),
        ("AC3", ac3, Duration::from_secs(60)),
        ("AC4", ac4, Duration::from_secs(1)),
        ("AC5", ac5, Duration::from_secs(5)),
        ("AC6", ac6, Duration::from_secs(180)),
        ("AC7", ac7, Duration::from_secs(120)),
        ("AC8", ac8, Duration::from_secs(120)),
        ("AC9", ac9, Duration::from_secs(10)),
        ("AC10", ac10, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if took <= limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("too slow; {d}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "{name} {status} [{:.2}s, limit {}s] {detail}",
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
