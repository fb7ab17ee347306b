//! Complex Hadamard matrices induced by designs, conference matrices and
//! symmetric real Hadamard matrices, plus the inverse direction: recovering
//! the design behind a two-entry matrix.
//!
//! Sign convention: [`Sign::Plus`] always selects the `+` branch of the entry
//! formula. For design-induced and Hadamard-induced entries that is the sign
//! of the imaginary part; for conference matrices it is the sign in front of
//! `√(4m+1)` in the real part.

use std::collections::BTreeSet;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::chm::{pair_profile, verify_chm, ComplexHadamardMatrix};
use crate::designs::{verify_2design, BlockDesign, ConferenceMatrixReal, RealHadamard};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{int, rat, QuadExtScalar, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn is_plus(self) -> bool {
        self == Sign::Plus
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "pos" => Ok(Sign::Plus),
            "-" | "minus" | "neg" => Ok(Sign::Minus),
            _ => Err(Error::Parse(format!("sign must be + or -, got {s:?}"))),
        }
    }
}

/// The unimodular `a` that turns a design into a complex Hadamard matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedEntry {
    pub re: Rational,
    pub value_pos: QuadExtScalar,
    pub value_neg: QuadExtScalar,
}

impl InducedEntry {
    pub fn value(&self, sign: Sign) -> &QuadExtScalar {
        match sign {
            Sign::Plus => &self.value_pos,
            Sign::Minus => &self.value_neg,
        }
    }
}

/// `Re[a] = 1 − v(v−1) / (2k(v−k))`; feasible iff `Re[a] ≥ −1`.
pub fn induced_entry(v: u64, k: u64, lambda: u64) -> Result<InducedEntry> {
    if !(lambda < k && k < v) || lambda * (v - 1) != k * (k - 1) {
        return Err(Error::BadParameters { v, k, lambda });
    }
    let re = int(1) - Rational::new(BigInt::from(v * (v - 1)), BigInt::from(2 * k * (v - k)));
    let value_pos = QuadExtScalar::unimodular_with_re(re.clone(), true).ok_or_else(|| Error::Infeasible(re.clone()))?;
    let value_neg = value_pos.conj();
    Ok(InducedEntry { re, value_pos, value_neg })
}

/// Replaces every 0 of the incidence matrix by `a` (and keeps the 1s).
pub fn induce_from_design(b: &BlockDesign, sign: Sign) -> Result<ComplexHadamardMatrix> {
    let entry = induced_entry(b.v as u64, b.k as u64, b.lambda as u64)?;
    let a = entry.value(sign);
    let one = QuadExtScalar::one();
    ComplexHadamardMatrix::from_exact(b.incidence.map(|&e| if e == 1 { one.clone() } else { a.clone() }))
}

/// `m` if the design has Hadamard parameters 2-(4m−1, 2m−1, m−1).
pub fn hadamard_design_m(b: &BlockDesign) -> Option<usize> {
    let m = (b.v + 1) / 4;
    (m >= 1 && b.v == 4 * m - 1 && b.k == 2 * m - 1 && b.lambda == m - 1).then_some(m)
}

/// The Hadamard-design case: `a = −1 + 1/(2m) ± i√(4m−1)/(2m)`.
pub fn hadamard_design_to_chm(b: &BlockDesign, sign: Sign) -> Result<ComplexHadamardMatrix> {
    if hadamard_design_m(b).is_none() {
        return Err(Error::BadParameters { v: b.v as u64, k: b.k as u64, lambda: b.lambda as u64 });
    }
    induce_from_design(b, sign)
}

fn perfect_sqrt(n: u64) -> Option<u64> {
    let r = num_integer::Roots::sqrt(&n);
    (r * r == n).then_some(r)
}

/// Off-diagonal `c` for a conference matrix of order `4m + 2`:
/// `Re[c] = −1/(4m) ± √(4m+1)/(4m)`, `Im[c] > 0`. Exact when `4m + 1` is a
/// perfect square; otherwise `Re[c]` is irrational and `c` is returned as a float.
pub fn conference_entry(m: u64, sign: Sign) -> std::result::Result<QuadExtScalar, Complex64> {
    let four_m = 4 * m as i64;
    match perfect_sqrt(4 * m + 1) {
        Some(s) => {
            let s = s as i64;
            let re = rat(if sign.is_plus() { s - 1 } else { -s - 1 }, four_m);
            Ok(QuadExtScalar::unimodular_with_re(re, true).expect("|Re c| ≤ 1"))
        }
        None => {
            let s = ((4 * m + 1) as f64).sqrt();
            let re = (if sign.is_plus() { s } else { -s } - 1.0) / four_m as f64;
            Err(Complex64::new(re, (1.0 - re * re).sqrt()))
        }
    }
}

/// Drops the first row and column of a normalized symmetric conference matrix
/// of order `4m + 2` and maps `0 ↦ 1`, `+1 ↦ c`, `−1 ↦ c̄`.
pub fn conference_to_chm(c: &ConferenceMatrixReal, sign: Sign) -> Result<ComplexHadamardMatrix> {
    let order = c.order();
    if order < 6 || order % 4 != 2 {
        return Err(Error::BadOrder { order, reason: "conference matrix must have order 4m + 2 ≥ 6".into() });
    }
    if !c.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if !c.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let n = order - 1;
    let m = c.entries();
    match conference_entry(((order - 2) / 4) as u64, sign) {
        Ok(val) => {
            let (one, conj) = (QuadExtScalar::one(), val.conj());
            ComplexHadamardMatrix::from_exact(Matrix::from_fn(n, n, |i, j| match m[(i + 1, j + 1)] {
                0 => one.clone(),
                1 => val.clone(),
                _ => conj.clone(),
            }))
        }
        Err(val) => ComplexHadamardMatrix::from_float(Matrix::from_fn(n, n, |i, j| match m[(i + 1, j + 1)] {
            0 => Complex64::new(1.0, 0.0),
            1 => val,
            _ => val.conj(),
        })),
    }
}

/// `b = −1 + 1/(2m−2) ± i√(4m−5)/(2m−2)` for order `4m`.
pub fn hadamard_entry(m: u64, sign: Sign) -> QuadExtScalar {
    assert!(m >= 2);
    let re = int(-1) + rat(1, 2 * m as i64 - 2);
    QuadExtScalar::unimodular_with_re(re, sign.is_plus()).expect("|Re b| ≤ 1")
}

/// Drops the first row and column of a normalized symmetric real Hadamard
/// matrix of order `4m ≥ 8`; off-diagonal −1 ↦ b, diagonal +1 ↦ −b, other
/// entries unchanged.
pub fn sym_hadamard_to_chm(h: &RealHadamard, sign: Sign) -> Result<ComplexHadamardMatrix> {
    let order = h.order();
    if order < 8 || !order.is_multiple_of(4) {
        return Err(Error::BadOrder { order, reason: "needs a real Hadamard matrix of order 4m ≥ 8".into() });
    }
    if !h.is_normalized() {
        return Err(Error::NotNormalized);
    }
    if !h.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let b = hadamard_entry((order / 4) as u64, sign);
    let neg_b = -&b;
    let m = h.entries();
    let n = order - 1;
    ComplexHadamardMatrix::from_exact(Matrix::from_fn(n, n, |i, j| match (i == j, m[(i + 1, j + 1)]) {
        (true, 1) => neg_b.clone(),
        (false, -1) => b.clone(),
        (_, e) => QuadExtScalar::from_int(i64::from(e)),
    }))
}

/// Values for the diagonal +1s (`x`), diagonal −1s (`y`) and off-diagonal −1s
/// (`z`) of a symmetric Hadamard core that make it complex Hadamard.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ThreeEntrySolution {
    pub x: QuadExtScalar,
    pub y: QuadExtScalar,
    pub z: QuadExtScalar,
}

impl ThreeEntrySolution {
    /// Left-hand sides of the six orthogonality equations, in order.
    pub fn residuals(&self, m: u64) -> Result<[QuadExtScalar; 6]> {
        let (x, y, z) = (&self.x, &self.y, &self.z);
        let m = m as i64;
        let q = QuadExtScalar::from_rational;
        let c = |k: i64| QuadExtScalar::from_int(k);
        let re2 = |w: &QuadExtScalar| q(int(2) * w.re());
        let rz = q(z.re().clone());
        let zc = z.conj();
        let yc = y.conj();
        let xz = x.checked_mul(&zc)?;
        let yz = y.checked_mul(&zc)?;
        let zy = z.checked_mul(&yc)?;
        let e10 = &(&c(2 * m) * &rz) + &(&re2(x) + &c(2 * m - 3));
        let e11 = &(&c(2 * (m - 1)) * &rz) + &(&re2(&xz) + &c(2 * m - 1));
        let e12 = (&c(2 * m) * &rz).checked_add(x)?.checked_add(&yc)?.checked_sub(&zc)?.checked_add(&c(2 * m - 2))?;
        let e13 = (&c(2 * m) * &rz).checked_add(&xz)?.checked_add(&zy)?.checked_sub(&zc)?.checked_add(&c(2 * m - 2))?;
        let e14 = &(&c(2 * (m - 1)) * &rz) + &(&re2(y) + &c(2 * m - 1));
        let e15 = &(&c(2 * m) * &rz) + &(&re2(&yz) + &c(2 * m - 3));
        Ok([e10, e11, e12, e13, e14, e15])
    }

    pub fn satisfies(&self, m: u64) -> bool {
        self.residuals(m).is_ok_and(|r| r.iter().all(QuadExtScalar::is_zero))
    }
}

/// Polynomial in `r` with rational coefficients, lowest degree first.
type Poly = Vec<Rational>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let len = a.len().max(b.len());
    let get = |p: &Poly, i: usize| p.get(i).cloned().unwrap_or_else(Rational::zero);
    (0..len).map(|i| get(a, i) - get(b, i)).collect()
}

fn poly_eval(p: &Poly, r: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * r + c)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs().to_u128().expect("coefficients stay small");
    let mut out = Vec::new();
    let mut d = 1u128;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(BigInt::from(d));
            out.push(BigInt::from(n / d));
        }
        d += 1;
    }
    out
}

/// All rational roots, by the rational root theorem.
fn rational_roots(p: &Poly) -> BTreeSet<Rational> {
    let mut roots = BTreeSet::new();
    let mut coeffs: Vec<Rational> = p.clone();
    while coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    if coeffs.is_empty() {
        return roots;
    }
    if coeffs[0].is_zero() {
        roots.insert(Rational::zero());
        while coeffs.first().is_some_and(Zero::is_zero) {
            coeffs.remove(0);
        }
    }
    let scale = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * Rational::from_integer(scale.clone())).to_integer()).collect();
    let ints_poly: Poly = ints.iter().cloned().map(Rational::from_integer).collect();
    for num in divisors(&ints[0]) {
        for den in divisors(ints.last().expect("nonempty")) {
            for cand in [Rational::new(num.clone(), den.clone()), -Rational::new(num.clone(), den.clone())] {
                if poly_eval(&ints_poly, &cand).is_zero() {
                    roots.insert(cand);
                }
            }
        }
    }
    roots
}

/// Solves the six orthogonality equations of the three-entry construction
/// for unimodular `x`, `y`, `z`.
///
/// `Re x` and `Re y` are linear in `r = Re z` by the first and fifth equations.
/// Squaring the second and sixth (which fix `Im x·Im z` and `Im y·Im z`) gives
/// two quartics in `r`; their common rational roots, with every sign choice
/// for the imaginary parts, are checked by exact substitution.
pub fn solve_theorem3_system(m: u64) -> Vec<ThreeEntrySolution> {
    assert!(m >= 2, "the three-entry system needs m ≥ 2");
    let mi = m as i64;
    let r: Poly = vec![int(0), int(1)];
    let x_re: Poly = vec![rat(-(2 * mi - 3), 2), int(-mi)];
    let y_re: Poly = vec![rat(-(2 * mi - 1), 2), int(-(mi - 1))];
    let one_minus_sq = |p: &Poly| poly_sub(&vec![int(1)], &poly_mul(p, p));
    // G = 2(m−1)r + 2·Re x·r + 2m − 1 = −2·Im x·Im z
    let g = poly_sub(
        &poly_mul(&vec![int(2 * mi - 1), int(2 * (mi - 1))], &vec![int(1)]),
        &poly_mul(&poly_mul(&vec![int(-2)], &x_re), &r),
    );
    // K = 2m·r + 2·Re y·r + 2m − 3 = −2·Im y·Im z
    let k = poly_sub(
        &vec![int(2 * mi - 3), int(2 * mi)],
        &poly_mul(&poly_mul(&vec![int(-2)], &y_re), &r),
    );
    let quarter = vec![rat(1, 4)];
    let p11 = poly_sub(&poly_mul(&one_minus_sq(&x_re), &one_minus_sq(&r)), &poly_mul(&quarter, &poly_mul(&g, &g)));
    let p15 = poly_sub(&poly_mul(&one_minus_sq(&y_re), &one_minus_sq(&r)), &poly_mul(&quarter, &poly_mul(&k, &k)));
    let candidates: BTreeSet<Rational> = match (p11.iter().all(Zero::is_zero), p15.iter().all(Zero::is_zero)) {
        (true, _) => rational_roots(&p15),
        (_, true) => rational_roots(&p11),
        _ => rational_roots(&p11).intersection(&rational_roots(&p15)).cloned().collect(),
    };

    let mut found = BTreeSet::new();
    for rz in candidates {
        let (xr, yr) = (poly_eval(&x_re, &rz), poly_eval(&y_re, &rz));
        for (sx, sy, sz) in [true, false].iter().flat_map(|&a| [true, false].iter().flat_map(move |&b| [(a, b, true), (a, b, false)])) {
            let (Some(x), Some(y), Some(z)) = (
                QuadExtScalar::unimodular_with_re(xr.clone(), sx),
                QuadExtScalar::unimodular_with_re(yr.clone(), sy),
                QuadExtScalar::unimodular_with_re(rz.clone(), sz),
            ) else {
                continue;
            };
            let sol = ThreeEntrySolution { x, y, z };
            if sol.satisfies(m) {
                found.insert(sol);
            }
        }
    }
    found.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwoEntryClass {
    /// Entries `{1, a}` with `a ≠ −1`: the 1s form a symmetric design.
    Regular { design: BlockDesign, a: QuadExtScalar },
    /// Entries `{1, −1}`.
    RealMenon,
    NotTwoEntry,
}

/// Classifies an exact complex Hadamard matrix whose entries are exactly
/// `{1, a}`. Entries are scanned as given; dephase first for a classification
/// that ignores rephasing.
pub fn classify_two_entry(h: &ComplexHadamardMatrix) -> TwoEntryClass {
    let Some(m) = h.exact_entries() else {
        return TwoEntryClass::NotTwoEntry;
    };
    let one = QuadExtScalar::one();
    let values: BTreeSet<&QuadExtScalar> = m.as_slice().iter().collect();
    if values.len() != 2 || !values.contains(&one) {
        return TwoEntryClass::NotTwoEntry;
    }
    let a = values.into_iter().find(|&z| z != &one).expect("two values").clone();
    if a == QuadExtScalar::from_int(-1) {
        return TwoEntryClass::RealMenon;
    }
    if verify_chm(h).is_err() {
        return TwoEntryClass::NotTwoEntry;
    }
    let v = h.order();
    let ones = |i: usize| m.row(i).iter().filter(|z| **z == one).count();
    let k = ones(0);
    if (1..v).any(|i| ones(i) != k) {
        return TwoEntryClass::NotTwoEntry;
    }
    // λ = k + v / (2·Re a − 2)
    let lambda = int(k as i64) + int(v as i64) / (int(2) * a.re() - int(2));
    if !lambda.is_integer() || lambda.is_negative() {
        return TwoEntryClass::NotTwoEntry;
    }
    let lambda = lambda.to_integer().to_usize().expect("small");
    for i in 0..v {
        for j in i + 1..v {
            if pair_profile(h, i, j, &a).map(|p| p.a_count) != Some(lambda) {
                return TwoEntryClass::NotTwoEntry;
            }
        }
    }
    match verify_2design(&m.map(|z| u8::from(*z == one))) {
        Ok(design) if design.lambda == lambda => TwoEntryClass::Regular { design, a },
        _ => TwoEntryClass::NotTwoEntry,
    }
}
