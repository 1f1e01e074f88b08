mod common;

use betathermo::digits::DigitSeq;
use betathermo::gibbs::{
    classify, cylinder_estimate, k_envelope, make_witnesses, mme_oracle, weak_gibbs_defect, ClassifyOptions,
    DefectOptions, DefectSource, Verdict, Windowing,
};
use betathermo::language::{PrefixAutomaton, Word};
use betathermo::presets::Preset;
use betathermo::thermo::{pressure, PressureMode, Potential};
use common::*;
use proptest::prelude::*;

fn preset() -> impl Strategy<Value = Preset> {
    prop::sample::select(Preset::ALL.to_vec())
}

fn windowing() -> impl Strategy<Value = Windowing> {
    prop::sample::select(vec![Windowing::Interior, Windowing::Literal])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimates_sum_to_one(p in preset(), w in windowing(), n in 3usize..13, m in 1usize..7, t in -1.0f64..1.0) {
        let aut = PrefixAutomaton::build(&p.digits(40).unwrap()).unwrap();
        let phi = Potential::indicator(2, 1, t);
        let total: f64 = aut
            .enumerate_words(m)
            .unwrap()
            .map(|u| cylinder_estimate(&aut, &phi, &u, n, w).unwrap().value)
            .sum();
        prop_assert!((total - 1.0).abs() <= 1e-12, "{}", total);
    }

    #[test]
    fn defects_are_nonnegative_and_banded(p in preset(), m in 1usize..6, n in 4usize..9) {
        let aut = PrefixAutomaton::build(&p.digits(40).unwrap()).unwrap();
        let phi = Potential::from_fn("pair", 2, (0, 1), |w| 0.3 * (w[0] * w[1]) as f64 - 0.1 * w[0] as f64).unwrap();
        let est = pressure(&aut, &phi, 8, PressureMode::Both).unwrap();
        let opts = DefectOptions {
            source: DefectSource::Estimator,
            windowing: Windowing::Interior,
            p_hat: est.extrapolated,
            p_uncertainty: est.uncertainty,
        };
        let r = weak_gibbs_defect(&aut, &phi, m, n, &opts).unwrap();
        prop_assert!(r.defect >= 0.0);
        prop_assert!(r.lower <= r.defect && r.defect <= r.upper);
        prop_assert!(r.anomalies.is_empty());
        prop_assert!(r.rows.iter().all(|row| row.defect <= r.defect));
    }
}

#[test]
fn golden_oracle_is_the_parry_measure() {
    let c = Preset::Golden.digits(10).unwrap();
    for m in 1..=8 {
        for w in all_words(2, m) {
            let exact = mme_oracle(&c, &Word::new(w.clone())).unwrap();
            assert!((exact - golden_parry(&w)).abs() < 1e-12, "{w:?}");
        }
    }
}

#[test]
fn golden_estimates_approach_the_parry_measure() {
    let aut = PrefixAutomaton::build(&Preset::Golden.digits(40).unwrap()).unwrap();
    let u = Word::new(vec![1, 0]);
    let errs: Vec<f64> = [5, 10, 15]
        .iter()
        .map(|&n| {
            let v = cylinder_estimate(&aut, &Potential::zero(2), &u, n, Windowing::Interior).unwrap().value;
            (v - golden_parry(u.letters())).abs()
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn pinned_ratios_are_translation_invariant_away_from_the_edges() {
    let aut = PrefixAutomaton::build(&Preset::Golden.digits(80).unwrap()).unwrap();
    let n = 30;
    for u in ["1", "10", "0100"] {
        let u = Word::parse(u).unwrap();
        let est = cylinder_estimate(&aut, &Potential::indicator(2, 1, 0.5), &u, n, Windowing::Interior).unwrap();
        let middle: Vec<f64> = est.ratios.iter().filter(|r| r.j.abs() <= 3).map(|r| r.ratio).collect();
        let spread = middle.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - middle.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(spread < 1e-9, "{u}: {spread:e}");
    }
}

#[test]
fn forced_zeros_do_not_change_witness_cylinders() {
    let c = Preset::DoublingZeros.digits(120).unwrap();
    let aut = PrefixAutomaton::build(&c).unwrap();
    let family = make_witnesses(&c, 25).unwrap();
    let n = 12;
    let mut checked = 0;
    for w in family.witnesses.iter().filter(|w| w.padded.len() <= 2 * n + 1) {
        let phi = Potential::zero(2);
        let a = cylinder_estimate(&aut, &phi, &w.word, n, Windowing::Literal).unwrap().value;
        let b = cylinder_estimate(&aut, &phi, &w.padded, n, Windowing::Literal).unwrap().value;
        assert!((a / b - 1.0).abs() < 1e-6, "m={}: {a} vs {b}", w.m);
        checked += 1;
    }
    assert!(checked >= 3);
}

#[test]
fn witness_families() {
    let golden = make_witnesses(&Preset::Golden.digits(40).unwrap(), 30).unwrap();
    assert!(!golden.positive);
    assert_eq!(golden.limit_ratio, Some(0.0));
    assert!(golden.witnesses.iter().all(|w| w.z <= 1));
    let doubling = make_witnesses(&Preset::DoublingZeros.digits(40).unwrap(), 200).unwrap();
    assert!(doubling.positive);
    assert!(doubling.witnesses.iter().all(|w| w.ratio >= 0.5));
    let aut = PrefixAutomaton::build(&Preset::DoublingZeros.digits(400).unwrap()).unwrap();
    for w in &doubling.witnesses {
        assert!(aut.is_member(&w.word).unwrap() && aut.is_member(&w.padded).unwrap());
        assert_eq!(w.padded.trailing_zeros(), w.z);
    }
    let one = make_witnesses(&DigitSeq::new(vec![1, 0, 1], 2).unwrap(), 1).unwrap();
    assert_eq!(one.witnesses.len(), 1);
    assert_eq!(one.witnesses[0].word, Word::new(vec![1]));
    assert_eq!(one.witnesses[0].z, 1);
}

#[test]
fn envelopes_hold_for_long_zero_runs() {
    let c = Preset::DoublingZeros.digits(80).unwrap();
    let aut = PrefixAutomaton::build(&c).unwrap();
    let phi = Potential::zero(2);
    let p_hat = pressure(&aut, &phi, 12, PressureMode::Both).unwrap().extrapolated;
    for w in make_witnesses(&c, 12).unwrap().witnesses {
        let nu = cylinder_estimate(&aut, &phi, &w.word, 12, Windowing::Interior).unwrap().value;
        let e = k_envelope(&aut, &phi, &w.word, 0.05, p_hat, nu).unwrap();
        assert!(e.contained, "{e:?}");
        // K⁻ carries 2^{-(z+1)}
        assert!(e.k_minus <= 2f64.powi(-(w.z as i32 + 1)));
    }
}

#[test]
fn classifier_examples() {
    let golden = classify(&Preset::Golden.digits(10).unwrap(), &Potential::zero(2), &ClassifyOptions::default()).unwrap();
    assert_eq!(golden.verdict, Verdict::WeakGibbs);
    assert!(golden.certified);
    assert_eq!(golden.source, DefectSource::ExactOracle);
    let witness =
        classify(&Preset::DoublingZeros.digits(10).unwrap(), &Potential::zero(2), &ClassifyOptions::default()).unwrap();
    assert_eq!(witness.verdict, Verdict::NotWeakGibbsEvidence);
    assert!(witness.p_hat > witness.phi_at_zero);
    let shallow = classify(&DigitSeq::new(vec![1, 0, 1, 0, 0, 1], 2).unwrap(), &Potential::zero(2), &ClassifyOptions::default())
        .unwrap();
    assert_eq!(shallow.verdict, Verdict::Inconclusive);
    assert!(!shallow.certified);
    let json = serde_json::to_string(&witness).unwrap();
    assert!(json.contains("\"NotWeakGibbs-evidence\""));
}
