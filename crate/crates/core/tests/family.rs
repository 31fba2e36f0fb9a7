use num_bigint::BigUint;
use rsubst::complexity::{family_generator, fit_polynomial_exponent, predicted_exponent, FamilyParams};
use rsubst::entropy::counts_recurrence;
use rsubst::report::cmd_family;
use rsubst::structure::{constant_length, is_primitive};
use rsubst::{complexity_table_at, parse_spec, Budget, LanguageMode};

fn perms_for(ell: usize) -> Vec<String> {
    // the identity plus the transposition of the last two letters
    let id: String = (0..ell).map(|i| (b'a' + i as u8) as char).collect();
    let mut swapped: Vec<char> = id.chars().collect();
    swapped.swap(ell - 2, ell - 1);
    vec![id, swapped.into_iter().collect()]
}

#[test]
fn last_letter_count_is_a_power_of_the_choice_count() {
    for ell in 3..=5 {
        let perms = perms_for(ell);
        let refs: Vec<&str> = perms.iter().map(String::as_str).collect();
        let params = FamilyParams::new(ell, &refs).unwrap();
        let sub = family_generator(&params).unwrap();
        assert_eq!(constant_length(&sub), Some(ell));
        assert!(!is_primitive(&sub).primitive);
        let counts = counts_recurrence(&sub, 10, 10).unwrap();
        let last = sub.letters().last().unwrap();
        for m in 1..=10 {
            let want = BigUint::from(perms.len()).pow(m as u32 - 1);
            assert_eq!(counts.exact(last, m), Some(&want), "ell={ell}, m={m}");
        }
    }
}

#[test]
fn family_documents_round_trip() {
    for (ell, perms) in [(3, vec!["abc", "acb"]), (4, vec!["abcd", "badc", "dcba"])] {
        let params = FamilyParams::new(ell, &perms).unwrap();
        let (doc, report) = cmd_family(&params).unwrap();
        let parsed = parse_spec(&doc).unwrap();
        assert_eq!(parsed, family_generator(&params).unwrap());
        assert_eq!(report.value["predicted_exponent"].as_f64().unwrap(), predicted_exponent(&params));
    }
}

/// About a minute and a half in release mode: p(729) ≈ 1.3e7.
#[test]
fn all_permutations_exponent() {
    let params = FamilyParams::all_permutations(3).unwrap();
    let sub = family_generator(&params).unwrap();
    let grid: Vec<usize> = (2..=6).map(|k| 3usize.pow(k)).collect();
    let table = complexity_table_at(&sub, &grid, LanguageMode::Legal, None, &Budget::default()).unwrap();
    assert!(!table.truncated);
    let fit = fit_polynomial_exponent(&table, &grid).unwrap();
    let predicted = predicted_exponent(&params);
    assert!((predicted - (1.0 + 6f64.ln() / 3f64.ln())).abs() < 1e-12);
    assert!(
        (fit.alpha_hat - predicted).abs() < 0.1,
        "alpha_hat {} vs predicted {predicted}",
        fit.alpha_hat
    );
}
