//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hforge::chm::{apply_equivalence, detect_butson, fixture, fourier, verify_chm, FIXTURE_NAMES};
use hforge::construct::{
    classify_two_entry, conference_to_chm, hadamard_design_to_chm, induced_entry, sym_hadamard_to_chm, TwoEntryClass,
};
use hforge::designs::{
    hadamard_core_design, paley_conference, paley_design, paley_hadamard_i, paley_hadamard_ii, sylvester_hadamard,
};
use hforge::equivalence::{certify_inequivalent, InvariantKind, Witness};
use hforge::invariants::{
    block_det_check, det_lemma_eval, duality_check, exhaustive_minor_census, fingerprint, haagerup_set, klms_unit,
    sample_minor_census,
};
use hforge::matrix::{is_circulant, Matrix};
use hforge::scalar::{int, rat};
use hforge::{ComplexHadamardMatrix, Engine, EquivalenceMove, HaagerupSet, QuadExtScalar, Rational, Sign, Verdict};

type Outcome = Result<String, String>;
type Criterion = (u32, fn() -> Outcome, Option<Duration>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn quad(x: Rational, y: Rational, d: u64) -> QuadExtScalar {
    QuadExtScalar::new(x, y, d)
}

fn entry_set(h: &ComplexHadamardMatrix) -> BTreeSet<QuadExtScalar> {
    h.exact_entries().expect("exact").as_slice().iter().cloned().collect()
}

fn float_sets_agree(a: &HaagerupSet, b: &HaagerupSet, tol: f64) -> bool {
    let (fa, fb) = (a.to_float(), b.to_float());
    fa.iter().all(|&z| b.contains_approx(z, tol)) && fb.iter().all(|&z| a.contains_approx(z, tol))
}

fn criterion_1() -> Outcome {
    let fp = ok(fingerprint(&ok(fixture("P7"))?, Some(3), &Engine::new(1)))?;
    let as_map = |d: usize| -> Result<BTreeMap<Rational, u64>, String> {
        let s = fp.spectrum(d).ok_or(format!("no d={d} spectrum"))?;
        Ok(s.exact_pairs().ok_or("not exact")?.iter().cloned().collect())
    };
    let build = |pairs: &[(i64, u64)]| pairs.iter().map(|&(v, m)| (int(v), m)).collect::<BTreeMap<_, _>>();
    let d2 = build(&[(0, 54), (1, 114), (4, 96), (3, 177)]);
    let d3 = build(&[
        (0, 60),
        (1, 36),
        (4, 108),
        (9, 210),
        (16, 110),
        (3, 162),
        (12, 216),
        (27, 14),
        (7, 111),
        (13, 54),
        (19, 36),
        (21, 108),
    ]);
    ensure!(as_map(2)? == d2, "d=2 spectrum {}", fp.spectra[0]);
    ensure!(as_map(3)? == d3, "d=3 spectrum {}", fp.spectra[1]);
    let (t2, t3) = (fp.spectra[0].total(), fp.spectra[1].total());
    ensure!(t2 == 441 && t3 == 1225, "totals {t2}, {t3}");
    Ok(format!("4 + 12 pairs, totals {t2} and {t3}"))
}

fn criterion_2() -> Outcome {
    let engine = Engine::default();
    let p7 = ok(fixture("P7"))?;
    let built = ok(sym_hadamard_to_chm(&sylvester_hadamard(3), Sign::Plus))?;
    ensure!(verify_chm(&built).is_ok(), "order-7 construction fails verification");
    ensure!(haagerup_set(&built) == haagerup_set(&p7), "Λ differs from P7");
    let (fb, fp) = (ok(fingerprint(&built, Some(3), &engine))?, ok(fingerprint(&p7, Some(3), &engine))?);
    ensure!(fb == fp, "Φ differs from P7");

    let a = quad(rat(-7, 8), rat(1, 8), 15);
    let core = ok(hadamard_core_design(&sylvester_hadamard(4)))?;
    let u = ok(hadamard_design_to_chm(&core, Sign::Plus))?;
    ensure!(verify_chm(&u).is_ok(), "order-15 design matrix fails verification");
    ensure!(entry_set(&u) == BTreeSet::from([QuadExtScalar::one(), a.clone()]), "entries are not {{1, a}}");
    match classify_two_entry(&u) {
        TwoEntryClass::Regular { design, a: found } => {
            ensure!(design.params() == (15, 7, 3), "design {:?}", design.params());
            ensure!(found == a, "a = {}", found.render_surd());
        }
        other => return Err(format!("classified as {other:?}")),
    }
    ensure!(haagerup_set(&u) == haagerup_set(&ok(fixture("U15"))?), "Λ differs from U15");

    let conf = ok(paley_conference(9))?;
    let w = ok(conference_to_chm(&conf, Sign::Plus))?;
    ensure!(w.is_exact() && verify_chm(&w).is_ok(), "order-9 conference matrix fails exact verification");
    let c = quad(rat(1, 4), rat(1, 4), 15);
    ensure!(entry_set(&w) == BTreeSet::from([QuadExtScalar::one(), c.clone(), c.conj()]), "entries are not {{1, c, c̄}}");
    let w_minus = ok(conference_to_chm(&conf, Sign::Minus))?;
    ensure!(verify_chm(&w_minus).is_ok(), "sign − fails verification");
    let butson = detect_butson(&w_minus);
    ensure!(butson == Some(3), "sign − Butson order {butson:?}");
    Ok("P7, U15 and W9 constructions agree".into())
}

fn criterion_3() -> Outcome {
    let engine = Engine::default();
    for sign in [Sign::Plus, Sign::Minus] {
        let h3 = ok(hadamard_design_to_chm(&ok(paley_design(3))?, sign))?;
        ensure!(h3.order() == 3 && verify_chm(&h3).is_ok(), "m=1 {sign:?} is not an order-3 CHM");
        ensure!(float_sets_agree(&haagerup_set(&h3), &haagerup_set(&fourier(3)), 1e-8), "m=1 {sign:?}: Λ differs from F3");
    }
    let mut certs = 0;
    for q in [7u64, 11] {
        let design = ok(paley_design(q))?;
        for sign in [Sign::Plus, Sign::Minus] {
            let h = ok(hadamard_design_to_chm(&design, sign))?;
            ensure!(h.is_exact() && verify_chm(&h).is_ok(), "q={q} {sign:?} fails exact verification");
            let f = fourier(q as usize);
            match ok(certify_inequivalent(&h, &f, 3, &engine))? {
                Verdict::Certificate(c) => {
                    ensure!(ok(c.revalidate(&h, &f, &engine))?, "q={q} {sign:?}: certificate does not revalidate");
                    certs += 1;
                }
                other => return Err(format!("q={q} {sign:?}: {other}")),
            }
        }
    }
    Ok(format!("F3 recovered, {certs} certificates against F7/F11"))
}

fn criterion_4() -> Outcome {
    let w = ok(conference_to_chm(&ok(paley_conference(13))?, Sign::Plus))?;
    ensure!(w.order() == 13 && verify_chm(&w).is_ok(), "order-13 matrix fails verification");
    ensure!(is_circulant(&w.float_entries()), "not circulant");
    let f = fourier(13);
    match ok(certify_inequivalent(&w, &f, 2, &Engine::default()))? {
        Verdict::Certificate(c) => Ok(format!("circulant, certificate: {c}")),
        other => Err(format!("{other}")),
    }
}

fn criterion_5() -> Outcome {
    let engine = Engine::default();
    let h8 = ComplexHadamardMatrix::from_real(&sylvester_hadamard(3));
    let h12 = ComplexHadamardMatrix::from_real(&ok(paley_hadamard_i(11))?);
    let f4 = fourier(4);
    ensure!(f4.is_exact(), "F4 is not exact");
    let cases: [(&str, &ComplexHadamardMatrix, &[usize]); 3] =
        [("H8", &h8, &[2, 3]), ("F4", &f4, &[2]), ("H12", &h12, &[2, 3, 4, 5])];
    let mut checked = 0;
    for (name, h, ds) in cases {
        for &d in ds {
            let r = ok(duality_check(h, d, &engine))?;
            ensure!(r.low.exact_pairs().is_some() && r.high.exact_pairs().is_some(), "{name} d={d} not exact");
            checked += 1;
        }
    }
    Ok(format!("{checked} exact (d, n−d) pairs"))
}

fn criterion_6() -> Outcome {
    let engine = Engine::default();
    for (name, h) in [("Sylvester H8", sylvester_hadamard(3)), ("Paley H8", ok(paley_hadamard_i(7))?)] {
        let c = ok(exhaustive_minor_census(&h, 6, &engine))?;
        ensure!(c.count == 784, "{name}: {} minors", c.count);
        ensure!(c.histogram.keys().all(|v| [0, 128].contains(v)), "{name}: values {:?}", c.histogram);
        ensure!(!c.histogram.contains_key(&160), "{name}: 160 occurs");
    }
    Ok("only |det| ∈ {0, 128} across 2 × 784 minors".into())
}

fn criterion_7() -> Outcome {
    let h = sylvester_hadamard(4);
    let c = ok(sample_minor_census(&h, 8, 100_000, 20_240_501, &Engine::new(4)))?;
    let unit = klms_unit(16).ok_or("no unit")?;
    ensure!(unit == 128, "unit {unit}");
    let r = c.klms_report(unit);
    ensure!(c.histogram.values().sum::<u64>() == 100_000, "sample count");
    ensure!(r.all_multiples, "non-multiples in {:?}", c.histogram);
    ensure!(r.multiples.keys().all(|&k| k <= 32), "k out of range: {:?}", r.multiples);
    ensure!(r.forbidden_hits.is_empty(), "forbidden k {:?}", r.forbidden_hits);
    Ok(format!("k ∈ {:?}", r.multiples.keys().collect::<Vec<_>>()))
}

fn criterion_8a() -> Result<usize, String> {
    let mut stored = vec![sylvester_hadamard(1), sylvester_hadamard(2), sylvester_hadamard(3)];
    for q in [3, 7, 11] {
        stored.push(ok(paley_hadamard_i(q))?);
    }
    stored.push(ok(paley_hadamard_ii(5))?);
    let pm = HaagerupSet::Exact(BTreeSet::from([QuadExtScalar::one(), QuadExtScalar::from_int(-1)]));
    for h in &stored {
        ensure!(haagerup_set(&ComplexHadamardMatrix::from_real(h)) == pm, "order {}: Λ ≠ {{±1}}", h.order());
    }
    Ok(stored.len())
}

/// Fingerprints are taken up to `d = 3`.
fn criterion_8b(engine: &Engine) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    let mut moves = 0;
    for name in FIXTURE_NAMES {
        let h = ok(fixture(name))?;
        let dmax = 3;
        let (lambda, phi) = (haagerup_set(&h), ok(fingerprint(&h, Some(dmax), engine))?);
        for i in 0..100 {
            let moved = ok(apply_equivalence(&h, &EquivalenceMove::random(&h, &mut rng)))?;
            ensure!(haagerup_set(&moved) == lambda, "{name} move {i}: Λ changed");
            ensure!(ok(fingerprint(&moved, Some(dmax), engine))? == phi, "{name} move {i}: Φ changed");
            moves += 1;
        }
    }
    Ok(moves)
}

fn criterion_8c() -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(82);
    let fixtures: Vec<_> = FIXTURE_NAMES.iter().map(|n| fixture(n)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    for i in 0..200 {
        let h = &fixtures[rng.gen_range(0..fixtures.len())];
        let n = h.order();
        let r = rng.gen_range(1..n);
        let rows = index::sample(&mut rng, n, r).into_vec();
        let cols = index::sample(&mut rng, n, r).into_vec();
        let sides = ok(block_det_check(h, &rows, &cols))?;
        ensure!(sides.agree(0.0), "split {i} (n={n}, r={r}): {sides:?}");
    }
    Ok(200)
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

fn random_quad(rng: &mut ChaCha8Rng) -> QuadExtScalar {
    quad(random_rational(rng), random_rational(rng), 15)
}

fn criterion_8d() -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(83);
    let mut done = 0;
    while done < 100 {
        let (n, m) = (rng.gen_range(1..=5), rng.gen_range(1..=3));
        let result = if done % 2 == 0 {
            let a = Matrix::from_fn(n, n, |_, _| random_rational(&mut rng));
            let u = Matrix::from_fn(n, m, |_, _| random_rational(&mut rng));
            let v = Matrix::from_fn(n, m, |_, _| random_rational(&mut rng));
            det_lemma_eval(&a, &u, &v).map(|(l, r)| l == r)
        } else {
            let a = Matrix::from_fn(n, n, |_, _| random_quad(&mut rng));
            let u = Matrix::from_fn(n, m, |_, _| random_quad(&mut rng));
            let v = Matrix::from_fn(n, m, |_, _| random_quad(&mut rng));
            det_lemma_eval(&a, &u, &v).map(|(l, r)| l == r)
        };
        match result {
            Ok(true) => done += 1,
            Ok(false) => return Err(format!("instance {done} (n={n}, m={m}): sides differ")),
            Err(hforge::Error::Singular) => {}
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(done)
}

fn criterion_8e() -> Result<usize, String> {
    let mut admissible = 0;
    for v in 3..=100u64 {
        for k in 1..v {
            for lambda in 0..k {
                if lambda * (v - 1) != k * (k - 1) {
                    continue;
                }
                admissible += 1;
                let n = k - lambda;
                let predicted = v == 4 * n - 1 || v == 4 * n;
                let feasible = induced_entry(v, k, lambda).is_ok();
                ensure!(feasible == predicted, "2-({v},{k},{lambda}): feasible={feasible}");
            }
        }
    }
    Ok(admissible)
}

fn criterion_8f() -> Result<(), String> {
    let u = ok(fixture("U15"))?;
    let runs: Vec<String> = [1, 2, 8]
        .into_iter()
        .map(|w| fingerprint(&u, Some(3), &Engine::new(w)).map(|fp| fp.to_json().to_string()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure!(runs.iter().all(|r| r == &runs[0]), "outputs differ across worker counts");
    Ok(())
}

fn criterion_8() -> Outcome {
    let engine = Engine::default();
    let a = criterion_8a()?;
    let b = criterion_8b(&engine)?;
    let c = criterion_8c()?;
    let d = criterion_8d()?;
    let e = criterion_8e()?;
    criterion_8f()?;
    Ok(format!("(a) {a} matrices (b) {b} moves (c) {c} splits (d) {d} instances (e) {e} parameter sets (f) identical"))
}

fn criterion_9() -> Outcome {
    let (u, v) = (ok(fixture("U15"))?, ok(fixture("V15"))?);
    let Verdict::Certificate(c) = ok(certify_inequivalent(&u, &v, 2, &Engine::default()))? else {
        return Err("no certificate".into());
    };
    ensure!(c.kind == InvariantKind::Haagerup && !c.numeric, "certificate {c}");
    let Witness::Exact(z) = &c.witness else {
        return Err(format!("witness {:?}", c.witness));
    };
    ensure!(z.radicand() == 15 && !z.is_real(), "witness {}", z.render_surd());
    ensure!(ok(c.revalidate(&u, &v, &Engine::default()))?, "certificate does not revalidate");
    Ok(format!("witness {}", z.render_surd()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, criterion_1, Some(Duration::from_secs(10))),
        (2, criterion_2, Some(Duration::from_secs(30))),
        (3, criterion_3, Some(Duration::from_secs(10))),
        (4, criterion_4, Some(Duration::from_secs(10))),
        (5, criterion_5, Some(Duration::from_secs(300))),
        (6, criterion_6, Some(Duration::from_secs(5))),
        (7, criterion_7, Some(Duration::from_secs(120))),
        (8, criterion_8, None),
        (9, criterion_9, Some(Duration::from_secs(5))),
    ];
    let mut failed = 0;
    for (id, run, limit) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if limit.is_some_and(|l| elapsed > l) => Err(format!("exceeded {} s", limit.unwrap().as_secs())),
            other => other,
        };
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        let limit = limit.map_or("no limit".to_string(), |l| format!("limit {} s", l.as_secs()));
        println!("criterion {id}: {status} ({detail}) [{:.2} s, {limit}]", elapsed.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
