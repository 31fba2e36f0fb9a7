use num_bigint::BigUint;
use proptest::prelude::*;
use rsubst::entropy::{counts_enumeration, counts_recurrence};
use rsubst::language::Completeness;
use rsubst::structure::{constant_length, is_primitive};
use rsubst::{
    complexity_table, legal_words, legal_words_by_generation, parse_spec, subshift_language,
    to_canonical_json, Budget, LanguageMode, RandomSubstitution,
};

const LETTERS: [&str; 3] = ["a", "b", "c"];

/// Substitutions on two or three letters with one or two images each.
fn substitution(max_len: usize) -> impl Strategy<Value = RandomSubstitution> {
    (2usize..=3).prop_flat_map(move |d| {
        let word = proptest::collection::vec(0..d, 1..=max_len)
            .prop_map(|w| w.iter().map(|&i| LETTERS[i]).collect::<String>());
        proptest::collection::vec(proptest::collection::vec(word, 1..=2), d).prop_map(move |rules| {
            let rules: Vec<(&str, Vec<String>)> =
                rules.into_iter().enumerate().map(|(i, r)| (LETTERS[i], r)).collect();
            build(&rules)
        })
    })
}

fn constant_length_substitution(ell: usize) -> impl Strategy<Value = RandomSubstitution> {
    let word = proptest::collection::vec(0..2usize, ell)
        .prop_map(|w| w.iter().map(|&i| LETTERS[i]).collect::<String>());
    proptest::collection::vec(proptest::collection::vec(word, 1..=2), 2).prop_map(|rules| {
        let rules: Vec<(&str, Vec<String>)> =
            rules.into_iter().enumerate().map(|(i, r)| (LETTERS[i], r)).collect();
        build(&rules)
    })
}

fn build(rules: &[(&str, Vec<String>)]) -> RandomSubstitution {
    let mut dedup: Vec<(&str, Vec<&str>)> = Vec::new();
    for (a, r) in rules {
        let mut r: Vec<&str> = r.iter().map(String::as_str).collect();
        r.sort_unstable();
        r.dedup();
        dedup.push((a, r));
    }
    let refs: Vec<(&str, &[&str])> = dedup.iter().map(|(a, r)| (*a, r.as_slice())).collect();
    RandomSubstitution::from_strs(&refs).expect("valid substitution")
}

fn budget() -> Budget {
    Budget::words(200_000)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn complexity_tables_obey_the_laws(s in substitution(3)) {
        for mode in [LanguageMode::Legal, LanguageMode::Subshift] {
            let t = complexity_table(&s, 7, mode, Some(3), &budget()).unwrap();
            prop_assert!(t.is_submultiplicative());
            if mode == LanguageMode::Subshift {
                prop_assert!(t.is_monotone());
            }
            let constant = t.entries.windows(2).any(|w| w[0].1 == w[1].1);
            if constant {
                prop_assert!(t.morse_hedlund_consistent());
            }
        }
    }

    #[test]
    fn subshift_slices_lie_in_the_legal_language(s in substitution(3), n in 1usize..6, k in 1usize..4) {
        let x = subshift_language(&s, n, k, &budget()).unwrap();
        let l = legal_words(&s, n, &budget()).unwrap().words;
        prop_assert!(x.iter().all(|w| l.contains(w)));
    }

    #[test]
    fn closure_matches_generation_oracle(s in substitution(3), n in 1usize..6) {
        let exact = legal_words(&s, n, &budget()).unwrap().words;
        let oracle = legal_words_by_generation(&s, n, 4, 12, &budget()).unwrap();
        // the oracle can only miss words, never invent them, and misses
        // none once it has stabilised
        prop_assert!(oracle.words.iter().all(|w| exact.contains(w)));
        if matches!(oracle.completeness, Completeness::Stabilized { .. }) {
            prop_assert_eq!(exact, oracle.words);
        }
    }

    #[test]
    fn count_engines_agree(s in constant_length_substitution(2)) {
        let Ok(rec) = counts_recurrence(&s, 5, 5) else { return Ok(()) };
        let en = counts_enumeration(&s, 5, &budget()).unwrap();
        for a in s.letters() {
            for m in 0..=en.depth() {
                prop_assert_eq!(rec.exact(a, m), en.exact(a, m));
            }
        }
    }

    #[test]
    fn documents_round_trip(s in substitution(4)) {
        let doc = to_canonical_json(&s);
        let back = parse_spec(&doc).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(to_canonical_json(&back), doc);
    }

    #[test]
    fn primitive_subshift_equals_legal(s in constant_length_substitution(3), n in 1usize..5) {
        prop_assume!(is_primitive(&s).primitive);
        let x = subshift_language(&s, n, 6, &budget()).unwrap();
        let l = legal_words(&s, n, &budget()).unwrap().words;
        prop_assert_eq!(x, l);
    }
}

#[test]
fn legal_count_at_a_length_is_the_number_of_words() {
    let s = rsubst::bundled::get("log_series").unwrap();
    let t = complexity_table(&s, 9, LanguageMode::Legal, None, &budget()).unwrap();
    for (n, p) in &t.entries {
        let words = legal_words(&s, *n, &budget()).unwrap().words;
        assert_eq!(*p, BigUint::from(words.len()));
    }
    assert_eq!(constant_length(&s), Some(2));
}
