use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hforge::chm::{apply_equivalence, dephase, fixture, fourier, verify_chm, FIXTURE_NAMES};
use hforge::construct::{conference_to_chm, hadamard_design_to_chm};
use hforge::designs::{paley_conference, paley_design};
use hforge::equivalence::{certify_inequivalent, compare_haagerup, Comparison, InvariantKind};
use hforge::invariants::{haagerup_set, minor_spectrum};
use hforge::linalg::det;
use hforge::{ComplexHadamardMatrix, Engine, EquivalenceMove, Rational, Sign, Verdict};

fn subsets(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..d).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..d).rev().find(|&i| cur[i] < n - d + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..d {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn brute_spectrum(h: &ComplexHadamardMatrix, d: usize) -> BTreeMap<Rational, u64> {
    let m = h.exact_entries().unwrap();
    let all = subsets(h.order(), d);
    let mut counts = BTreeMap::new();
    for rows in &all {
        for cols in &all {
            *counts.entry(det(&m.select(rows, cols)).abs_squared()).or_default() += 1;
        }
    }
    counts
}

fn moved(name: &str, seed: u64) -> (ComplexHadamardMatrix, ComplexHadamardMatrix) {
    let h = fixture(name).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = apply_equivalence(&h, &EquivalenceMove::random(&h, &mut rng)).unwrap();
    (h, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fraction_free_minors_match_field_determinants(seed in any::<u64>(), which in 0usize..2, d in 1usize..=3) {
        let (_, g) = moved(["P7", "W9A"][which], seed);
        let spectrum = minor_spectrum(&g, d, &Engine::new(2)).unwrap();
        let fast: BTreeMap<Rational, u64> = spectrum.exact_pairs().unwrap().iter().cloned().collect();
        prop_assert_eq!(fast, brute_spectrum(&g, d));
    }

    #[test]
    fn moves_preserve_the_chm_property(seed in any::<u64>(), which in 0usize..FIXTURE_NAMES.len()) {
        let (h, g) = moved(FIXTURE_NAMES[which], seed);
        prop_assert!(verify_chm(&g).is_ok());
        prop_assert_eq!(haagerup_set(&g), haagerup_set(&h));
        prop_assert_eq!(haagerup_set(&dephase(&g)), haagerup_set(&h));
    }

    #[test]
    fn equivalent_matrices_are_never_certified(seed in any::<u64>(), which in 0usize..FIXTURE_NAMES.len()) {
        let (h, g) = moved(FIXTURE_NAMES[which], seed);
        let verdict = certify_inequivalent(&h, &g, 2, &Engine::new(2)).unwrap();
        prop_assert_eq!(verdict, Verdict::Undecided { proven_equal: true });
    }

    #[test]
    fn certificates_survive_moves(seed in any::<u64>()) {
        let (u, u2) = moved("U15", seed);
        let (_, v2) = moved("V15", seed ^ 0x5a5a);
        let engine = Engine::new(2);
        let Verdict::Certificate(c) = certify_inequivalent(&u2, &v2, 2, &engine).unwrap() else {
            panic!("U15 and V15 not separated");
        };
        prop_assert!(c.revalidate(&u2, &v2, &engine).unwrap());
        prop_assert!(c.revalidate(&u, &v2, &engine).unwrap());
    }
}

#[test]
fn certificates_do_not_revalidate_on_equal_pairs() {
    let (u, v) = (fixture("U15").unwrap(), fixture("V15").unwrap());
    let engine = Engine::new(2);
    let Verdict::Certificate(c) = certify_inequivalent(&u, &v, 2, &engine).unwrap() else { panic!() };
    assert!(!c.revalidate(&u, &u, &engine).unwrap());
}

#[test]
fn w9_sign_choices_are_inequivalent() {
    let conf = paley_conference(9).unwrap();
    let (a, b) = (conference_to_chm(&conf, Sign::Plus).unwrap(), conference_to_chm(&conf, Sign::Minus).unwrap());
    let stored = fixture("W9A").unwrap();
    assert_eq!(certify_inequivalent(&a, &stored, 4, &Engine::new(2)).unwrap(), Verdict::Undecided { proven_equal: true });
    let Comparison::Certificate(c) = compare_haagerup(&a, &b) else { panic!("Λ(W9A) = Λ(W9B)") };
    assert_eq!(c.kind, InvariantKind::Haagerup);
    assert!(!c.numeric);
}

#[test]
fn induced_order_three_is_fourier() {
    let h = hadamard_design_to_chm(&paley_design(3).unwrap(), Sign::Plus).unwrap();
    let verdict = certify_inequivalent(&h, &fourier(3), 1, &Engine::new(1)).unwrap();
    assert!(matches!(verdict, Verdict::Undecided { .. }));
}
