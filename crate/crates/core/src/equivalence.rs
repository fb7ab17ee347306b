//! Inequivalence certificates from the Haagerup set and the fingerprint.
//!
//! Equal invariants never prove equivalence, so the strongest positive
//! outcome is [`Verdict::Undecided`]. Comparisons involving a float matrix
//! run on float projections and are marked numeric.

use std::fmt;

use num_complex::Complex64;

use crate::chm::ComplexHadamardMatrix;
use crate::error::{Error, Result};
use crate::invariants::{haagerup_set, minor_spectrum, Engine, HaagerupSet, MinorSpectrum, SpectrumValues};
use crate::scalar::{format_rational, render_sqrt, QuadExtScalar, Rational};

/// Tolerance for float projections of invariants.
pub const COMPARE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantKind {
    Haagerup,
    Fingerprint,
}

/// Which matrix holds the witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MinorValue {
    /// Exact `|det|²`.
    ExactSq(Rational),
    /// Float `|det|`.
    Float(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Exact(QuadExtScalar),
    Float(Complex64),
    /// A minor value whose multiplicity differs between the two matrices.
    Minor { d: usize, value: MinorValue, mult_first: u64, mult_second: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequivalenceCertificate {
    pub kind: InvariantKind,
    pub witness: Witness,
    pub direction: Direction,
    /// Obtained from float projections rather than exact arithmetic.
    pub numeric: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Comparison {
    /// `proven` is false when equality only holds within tolerance.
    Equal { proven: bool },
    Certificate(InequivalenceCertificate),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Certificate(InequivalenceCertificate),
    /// All compared invariants agree.
    Undecided { proven_equal: bool },
}

fn float_contains(set: &[Complex64], z: Complex64) -> bool {
    set.iter().any(|w| (w - z).norm() < COMPARE_TOL)
}

pub fn compare_haagerup(h1: &ComplexHadamardMatrix, h2: &ComplexHadamardMatrix) -> Comparison {
    compare_haagerup_sets(&haagerup_set(h1), &haagerup_set(h2))
}

fn compare_haagerup_sets(a: &HaagerupSet, b: &HaagerupSet) -> Comparison {
    if let (HaagerupSet::Exact(x), HaagerupSet::Exact(y)) = (a, b) {
        let cert = |z: &QuadExtScalar, direction| {
            Comparison::Certificate(InequivalenceCertificate {
                kind: InvariantKind::Haagerup,
                witness: Witness::Exact(z.clone()),
                direction,
                numeric: false,
            })
        };
        if let Some(z) = x.difference(y).next() {
            return cert(z, Direction::First);
        }
        if let Some(z) = y.difference(x).next() {
            return cert(z, Direction::Second);
        }
        return Comparison::Equal { proven: true };
    }
    let (fa, fb) = (a.to_float(), b.to_float());
    let missing = |own: &HaagerupSet, fown: &[Complex64], other: &[Complex64]| -> Option<Witness> {
        match own {
            HaagerupSet::Exact(s) => s.iter().find(|z| !float_contains(other, z.to_float())).cloned().map(Witness::Exact),
            HaagerupSet::Float(_) => fown.iter().find(|&&z| !float_contains(other, z)).copied().map(Witness::Float),
        }
    };
    let found = missing(a, &fa, &fb)
        .map(|w| (w, Direction::First))
        .or_else(|| missing(b, &fb, &fa).map(|w| (w, Direction::Second)));
    match found {
        Some((witness, direction)) => Comparison::Certificate(InequivalenceCertificate {
            kind: InvariantKind::Haagerup,
            witness,
            direction,
            numeric: true,
        }),
        None => Comparison::Equal { proven: false },
    }
}

/// First value, ascending, whose multiplicities differ.
fn spectrum_mismatch(s1: &MinorSpectrum, s2: &MinorSpectrum) -> Option<Witness> {
    let d = s1.d;
    if let (SpectrumValues::Exact(a), SpectrumValues::Exact(b)) = (&s1.values, &s2.values) {
        let (mut i, mut j) = (0, 0);
        loop {
            let (value, m1, m2, di, dj) = match (a.get(i), b.get(j)) {
                (None, None) => return None,
                (Some((v, m)), None) => (v, *m, 0, 1, 0),
                (None, Some((w, k))) => (w, 0, *k, 0, 1),
                (Some((v, m)), Some((w, k))) => match v.cmp(w) {
                    std::cmp::Ordering::Less => (v, *m, 0, 1, 0),
                    std::cmp::Ordering::Greater => (w, 0, *k, 0, 1),
                    std::cmp::Ordering::Equal => (v, *m, *k, 1, 1),
                },
            };
            if m1 != m2 {
                return Some(Witness::Minor { d, value: MinorValue::ExactSq(value.clone()), mult_first: m1, mult_second: m2 });
            }
            i += di;
            j += dj;
        }
    }
    let (a, b) = (s1.float_pairs(), s2.float_pairs());
    let (mut i, mut j) = (0, 0);
    let near = |x: f64, y: f64| (x - y).abs() < COMPARE_TOL * x.max(y).max(1.0);
    loop {
        let (value, m1, m2, di, dj) = match (a.get(i), b.get(j)) {
            (None, None) => return None,
            (Some(&(v, m)), None) => (v, m, 0, 1, 0),
            (None, Some(&(w, k))) => (w, 0, k, 0, 1),
            (Some(&(v, m)), Some(&(w, k))) if near(v, w) => (v, m, k, 1, 1),
            (Some(&(v, m)), Some(&(w, _))) if v < w => (v, m, 0, 1, 0),
            (Some(_), Some(&(w, k))) => (w, 0, k, 0, 1),
        };
        if m1 != m2 {
            return Some(Witness::Minor { d, value: MinorValue::Float(value), mult_first: m1, mult_second: m2 });
        }
        i += di;
        j += dj;
    }
}

fn minor_certificate(witness: Witness, numeric: bool) -> InequivalenceCertificate {
    let direction = match &witness {
        Witness::Minor { mult_first, mult_second, .. } if mult_first < mult_second => Direction::Second,
        _ => Direction::First,
    };
    InequivalenceCertificate { kind: InvariantKind::Fingerprint, witness, direction, numeric }
}

fn same_order(h1: &ComplexHadamardMatrix, h2: &ComplexHadamardMatrix) -> Result<()> {
    if h1.order() != h2.order() {
        return Err(Error::Dimension(format!("orders {} and {} differ", h1.order(), h2.order())));
    }
    Ok(())
}

/// Compares minor spectra for `d = 2..=dmax`; the first mismatch is the certificate.
pub fn compare_fingerprint(
    h1: &ComplexHadamardMatrix,
    h2: &ComplexHadamardMatrix,
    dmax: usize,
    engine: &Engine,
) -> Result<Comparison> {
    same_order(h1, h2)?;
    let numeric = !(h1.is_exact() && h2.is_exact());
    for d in 2..=dmax.min(h1.order()) {
        let (s1, s2) = (minor_spectrum(h1, d, engine)?, minor_spectrum(h2, d, engine)?);
        if let Some(w) = spectrum_mismatch(&s1, &s2) {
            return Ok(Comparison::Certificate(minor_certificate(w, numeric)));
        }
    }
    Ok(Comparison::Equal { proven: !numeric })
}

/// The Haagerup set first, then the fingerprint up to `dmax`.
pub fn certify_inequivalent(
    h1: &ComplexHadamardMatrix,
    h2: &ComplexHadamardMatrix,
    dmax: usize,
    engine: &Engine,
) -> Result<Verdict> {
    same_order(h1, h2)?;
    let haagerup_proven = match compare_haagerup(h1, h2) {
        Comparison::Certificate(c) => return Ok(Verdict::Certificate(c)),
        Comparison::Equal { proven } => proven,
    };
    match compare_fingerprint(h1, h2, dmax, engine)? {
        Comparison::Certificate(c) => Ok(Verdict::Certificate(c)),
        Comparison::Equal { proven } => Ok(Verdict::Undecided { proven_equal: proven && haagerup_proven }),
    }
}

impl InequivalenceCertificate {
    /// Recomputes the invariants of both matrices and checks the witness.
    pub fn revalidate(&self, h1: &ComplexHadamardMatrix, h2: &ComplexHadamardMatrix, engine: &Engine) -> Result<bool> {
        let (holder, other) = match self.direction {
            Direction::First => (h1, h2),
            Direction::Second => (h2, h1),
        };
        Ok(match &self.witness {
            Witness::Exact(z) => {
                let (a, b) = (haagerup_set(holder), haagerup_set(other));
                match (&a, &b, self.numeric) {
                    (HaagerupSet::Exact(x), HaagerupSet::Exact(y), false) => x.contains(z) && !y.contains(z),
                    _ => a.contains_approx(z.to_float(), COMPARE_TOL) && !b.contains_approx(z.to_float(), COMPARE_TOL),
                }
            }
            Witness::Float(z) => {
                haagerup_set(holder).contains_approx(*z, COMPARE_TOL) && !haagerup_set(other).contains_approx(*z, COMPARE_TOL)
            }
            Witness::Minor { d, value, mult_first, mult_second } => {
                let s1 = minor_spectrum(h1, *d, engine)?;
                let s2 = minor_spectrum(h2, *d, engine)?;
                let mult = |s: &MinorSpectrum| -> u64 {
                    match value {
                        MinorValue::ExactSq(v) if !self.numeric => s.multiplicity_sq(v).unwrap_or(0),
                        MinorValue::ExactSq(v) => float_mult(s, num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN).sqrt()),
                        MinorValue::Float(v) => float_mult(s, *v),
                    }
                };
                mult(&s1) == *mult_first && mult(&s2) == *mult_second && mult_first != mult_second
            }
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self.kind {
            InvariantKind::Haagerup => "haagerup",
            InvariantKind::Fingerprint => "fingerprint",
        };
        let direction = match self.direction {
            Direction::First => "first",
            Direction::Second => "second",
        };
        let witness = match &self.witness {
            Witness::Exact(z) => serde_json::json!({ "value": z.to_string() }),
            Witness::Float(z) => serde_json::json!({ "re": z.re, "im": z.im }),
            Witness::Minor { d, value: MinorValue::ExactSq(v), mult_first, mult_second } => serde_json::json!({
                "d": d, "value_sq": format_rational(v), "mult_first": mult_first, "mult_second": mult_second,
            }),
            Witness::Minor { d, value: MinorValue::Float(v), mult_first, mult_second } => serde_json::json!({
                "d": d, "value": v, "mult_first": mult_first, "mult_second": mult_second,
            }),
        };
        serde_json::json!({ "kind": kind, "witness": witness, "direction": direction, "numeric": self.numeric })
    }
}

fn float_mult(s: &MinorSpectrum, v: f64) -> u64 {
    s.float_pairs().iter().find(|(w, _)| (w - v).abs() < COMPARE_TOL * v.max(1.0)).map_or(0, |x| x.1)
}

impl fmt::Display for InequivalenceCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (holder, other) = match self.direction {
            Direction::First => ("first", "second"),
            Direction::Second => ("second", "first"),
        };
        let label = if self.numeric { " (numeric)" } else { "" };
        match &self.witness {
            Witness::Exact(z) => write!(f, "haagerup{label}: {} lies in Λ({holder}) but not in Λ({other})", z.render_surd()),
            Witness::Float(z) => {
                write!(f, "haagerup{label}: {:.12} {:+.12}i lies in Λ({holder}) but not in Λ({other})", z.re, z.im)
            }
            Witness::Minor { d, value, mult_first, mult_second } => {
                let v = match value {
                    MinorValue::ExactSq(v) => render_sqrt(v),
                    MinorValue::Float(v) => format!("{v:.10}"),
                };
                write!(f, "fingerprint{label}: d={d}, |det| = {v} occurs {mult_first} times in first, {mult_second} in second")
            }
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Certificate(c) => write!(f, "inequivalent: {c}"),
            Verdict::Undecided { proven_equal: true } => write!(f, "undecided: invariants agree exactly"),
            Verdict::Undecided { proven_equal: false } => write!(f, "undecided: invariants agree numerically"),
        }
    }
}

impl Verdict {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Verdict::Certificate(c) => serde_json::json!({ "verdict": "inequivalent", "certificate": c.to_json() }),
            Verdict::Undecided { proven_equal } => {
                serde_json::json!({ "verdict": "undecided", "invariants_equal": if *proven_equal { "exact" } else { "numeric" } })
            }
        }
    }
}
