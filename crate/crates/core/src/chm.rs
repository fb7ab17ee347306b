//! Complex Hadamard matrices over the exact or the float backend.

use num_complex::Complex64;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::designs::RealHadamard;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{format_rational, parse_rational, rat, QuadExtScalar, Rational};

/// Absolute tolerance of the float backend; inner products are held to `FLOAT_TOL·n`.
pub const FLOAT_TOL: f64 = 1e-9;

/// A single matrix entry or phase, on either backend.
#[derive(Clone, Debug, PartialEq)]
pub enum Entry {
    Exact(QuadExtScalar),
    Float(Complex64),
}

impl Entry {
    pub fn to_float(&self) -> Complex64 {
        match self {
            Entry::Exact(z) => z.to_float(),
            Entry::Float(z) => *z,
        }
    }

    pub fn is_unimodular(&self) -> bool {
        match self {
            Entry::Exact(z) => z.is_unimodular(),
            Entry::Float(z) => (z.norm() - 1.0).abs() <= FLOAT_TOL,
        }
    }
}

impl std::fmt::Display for Entry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Entry::Exact(z) => write!(f, "{z}"),
            Entry::Float(z) => write!(f, "{} + {}*i", z.re, z.im),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Entries {
    Exact { radicand: u64, m: Matrix<QuadExtScalar> },
    Float(Matrix<Complex64>),
}

/// Square matrix of unimodular entries. Orthogonality is checked by
/// [`verify_chm`], not by the constructors, so broken matrices can be
/// represented and diagnosed.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexHadamardMatrix {
    entries: Entries,
}

fn check_square<T>(m: &Matrix<T>) -> Result<()> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::Dimension("complex Hadamard matrices are square and nonempty".into()));
    }
    Ok(())
}

impl ComplexHadamardMatrix {
    pub fn from_exact(m: Matrix<QuadExtScalar>) -> Result<Self> {
        check_square(&m)?;
        let mut radicand = 1;
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let z = &m[(i, j)];
                if !z.is_unimodular() {
                    return Err(Error::NotUnimodular(i, j));
                }
                if !z.is_real() {
                    if radicand != 1 && radicand != z.radicand() {
                        return Err(Error::MixedRadicand(radicand, z.radicand()));
                    }
                    radicand = z.radicand();
                }
            }
        }
        Ok(Self { entries: Entries::Exact { radicand, m } })
    }

    pub fn from_float(m: Matrix<Complex64>) -> Result<Self> {
        check_square(&m)?;
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let z = m[(i, j)];
                if !z.is_finite() || (z.norm() - 1.0).abs() > FLOAT_TOL {
                    return Err(Error::NotUnimodular(i, j));
                }
            }
        }
        Ok(Self { entries: Entries::Float(m) })
    }

    pub fn from_real(h: &RealHadamard) -> Self {
        let m = h.entries().map(|&e| QuadExtScalar::from_int(i64::from(e)));
        Self { entries: Entries::Exact { radicand: 1, m } }
    }

    pub fn order(&self) -> usize {
        match &self.entries {
            Entries::Exact { m, .. } => m.rows(),
            Entries::Float(m) => m.rows(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.entries, Entries::Exact { .. })
    }

    /// Radicand `D` of the field `Q(i√D)` holding the entries (exact backend).
    pub fn radicand(&self) -> Option<u64> {
        match &self.entries {
            Entries::Exact { radicand, .. } => Some(*radicand),
            Entries::Float(_) => None,
        }
    }

    pub fn exact_entries(&self) -> Option<&Matrix<QuadExtScalar>> {
        match &self.entries {
            Entries::Exact { m, .. } => Some(m),
            Entries::Float(_) => None,
        }
    }

    /// Float projection of the entries (a copy on either backend).
    pub fn float_entries(&self) -> Matrix<Complex64> {
        match &self.entries {
            Entries::Exact { m, .. } => m.map(QuadExtScalar::to_float),
            Entries::Float(m) => m.clone(),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> Entry {
        match &self.entries {
            Entries::Exact { m, .. } => Entry::Exact(m[(i, j)].clone()),
            Entries::Float(m) => Entry::Float(m[(i, j)]),
        }
    }

    pub fn to_float(&self) -> Self {
        Self { entries: Entries::Float(self.float_entries()) }
    }

    /// The entries as a ±1 matrix, if they are all real units.
    pub fn to_real(&self) -> Option<RealHadamard> {
        let m = self.exact_entries()?;
        let mut signs = Vec::with_capacity(m.rows() * m.cols());
        for z in m.as_slice() {
            if !z.is_real() {
                return None;
            }
            signs.push(if z.re().is_one() { 1i8 } else { -1 });
        }
        RealHadamard::new(Matrix::from_vec(m.rows(), m.cols(), signs).ok()?).ok()
    }
}

/// Worst row pair found by [`verify_chm`].
#[derive(Clone, Debug, PartialEq)]
pub struct ChmViolation {
    pub row_i: usize,
    pub row_j: usize,
    /// `|⟨row_i, row_j⟩ − δ_ij·n|`.
    pub deviation: f64,
}

impl std::fmt::Display for ChmViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "rows {} and {} deviate from H·H* = nI by {:e}", self.row_i, self.row_j, self.deviation)
    }
}

/// Checks `H·H* = n·I`: exactly on the exact backend, within `FLOAT_TOL·n`
/// on the float backend.
pub fn verify_chm(h: &ComplexHadamardMatrix) -> std::result::Result<(), ChmViolation> {
    let n = h.order();
    let mut worst: Option<ChmViolation> = None;
    let mut record = |i: usize, j: usize, dev: f64| {
        if worst.as_ref().is_none_or(|w| dev > w.deviation) {
            worst = Some(ChmViolation { row_i: i, row_j: j, deviation: dev });
        }
    };
    match &h.entries {
        Entries::Exact { m, .. } => {
            let target = QuadExtScalar::from_int(n as i64);
            for i in 0..n {
                for j in i..n {
                    let ip = (0..n).fold(QuadExtScalar::zero(), |acc, t| &acc + &(&m[(i, t)] * &m[(j, t)].conj()));
                    let expected = if i == j { target.clone() } else { QuadExtScalar::zero() };
                    if ip != expected {
                        record(i, j, (ip - expected).to_float().norm());
                    }
                }
            }
        }
        Entries::Float(m) => {
            let tol = FLOAT_TOL * n as f64;
            for i in 0..n {
                for j in i..n {
                    let ip: Complex64 = (0..n).map(|t| m[(i, t)] * m[(j, t)].conj()).sum();
                    let expected = if i == j { n as f64 } else { 0.0 };
                    let dev = (ip - expected).norm();
                    if dev > tol {
                        record(i, j, dev);
                    }
                }
            }
        }
    }
    worst.map_or(Ok(()), Err)
}

fn unit_inverse(z: Complex64) -> Complex64 {
    z.conj() / z.norm()
}

/// Divides column `j` by `h_{1j}`, then row `i` by the new `h_{i1}`, so the
/// first row and column become all 1.
pub fn dephase(h: &ComplexHadamardMatrix) -> ComplexHadamardMatrix {
    let n = h.order();
    match &h.entries {
        Entries::Exact { radicand, m } => {
            let cols: Vec<QuadExtScalar> = (0..n).map(|j| m[(0, j)].conj()).collect();
            let rows: Vec<QuadExtScalar> = (0..n).map(|i| (&m[(i, 0)] * &cols[0]).conj()).collect();
            let out = Matrix::from_fn(n, n, |i, j| &(&m[(i, j)] * &cols[j]) * &rows[i]);
            // dephasing can leave the field only through products of its own entries
            let radicand = if out.as_slice().iter().all(QuadExtScalar::is_real) { 1 } else { *radicand };
            ComplexHadamardMatrix { entries: Entries::Exact { radicand, m: out } }
        }
        Entries::Float(m) => {
            let cols: Vec<Complex64> = (0..n).map(|j| unit_inverse(m[(0, j)])).collect();
            let rows: Vec<Complex64> = (0..n).map(|i| unit_inverse(m[(i, 0)] * cols[0])).collect();
            let mut out = Matrix::from_fn(n, n, |i, j| m[(i, j)] * cols[j] * rows[i]);
            for k in 0..n {
                out[(0, k)] = Complex64::one();
                out[(k, 0)] = Complex64::one();
            }
            ComplexHadamardMatrix { entries: Entries::Float(out) }
        }
    }
}

/// `K ↦ P₁·D₁·K·D₂·P₂`, stored as permutations and phase vectors:
/// `out[i][j] = row_phases[i] · h[row_perm[i]][col_perm[j]] · col_phases[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceMove {
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    pub row_phases: Vec<Entry>,
    pub col_phases: Vec<Entry>,
}

impl EquivalenceMove {
    pub fn identity(n: usize) -> Self {
        let one = Entry::Exact(QuadExtScalar::one());
        Self {
            row_perm: (0..n).collect(),
            col_perm: (0..n).collect(),
            row_phases: vec![one.clone(); n],
            col_phases: vec![one; n],
        }
    }

    /// Random permutations and phases compatible with `h`'s backend. Exact
    /// phases are signed products of up to two entries of `h`, so they stay
    /// in its field.
    pub fn random<R: Rng + ?Sized>(h: &ComplexHadamardMatrix, rng: &mut R) -> Self {
        let n = h.order();
        let mut row_perm: Vec<usize> = (0..n).collect();
        let mut col_perm: Vec<usize> = (0..n).collect();
        row_perm.shuffle(rng);
        col_perm.shuffle(rng);
        let phase = |rng: &mut R| match &h.entries {
            Entries::Exact { m, .. } => {
                let mut z = QuadExtScalar::from_int(if rng.gen::<bool>() { 1 } else { -1 });
                for _ in 0..rng.gen_range(0..=2) {
                    let e = &m[(rng.gen_range(0..n), rng.gen_range(0..n))];
                    let e = if rng.gen::<bool>() { e.clone() } else { e.conj() };
                    z = &z * &e;
                }
                Entry::Exact(z)
            }
            Entries::Float(_) => Entry::Float(Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))),
        };
        let row_phases = (0..n).map(|_| phase(rng)).collect();
        let col_phases = (0..n).map(|_| phase(rng)).collect();
        Self { row_perm, col_perm, row_phases, col_phases }
    }
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n && p.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

pub fn apply_equivalence(h: &ComplexHadamardMatrix, mv: &EquivalenceMove) -> Result<ComplexHadamardMatrix> {
    let n = h.order();
    if !is_permutation(&mv.row_perm, n) || !is_permutation(&mv.col_perm, n) {
        return Err(Error::InvalidMove("permutations must be bijections of 0..n".into()));
    }
    if mv.row_phases.len() != n || mv.col_phases.len() != n {
        return Err(Error::InvalidMove(format!("expected {n} row and column phases")));
    }
    if let Some(p) = mv.row_phases.iter().chain(&mv.col_phases).find(|p| !p.is_unimodular()) {
        return Err(Error::InvalidMove(format!("phase {p} is not unimodular")));
    }
    match &h.entries {
        Entries::Exact { m, .. } => {
            let exact = |ps: &[Entry]| -> Result<Vec<QuadExtScalar>> {
                ps.iter()
                    .map(|p| match p {
                        Entry::Exact(z) => Ok(z.clone()),
                        Entry::Float(_) => {
                            Err(Error::BackendMismatch("float phase applied to an exact matrix".into()))
                        }
                    })
                    .collect()
            };
            let (rp, cp) = (exact(&mv.row_phases)?, exact(&mv.col_phases)?);
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let z = rp[i].checked_mul(&m[(mv.row_perm[i], mv.col_perm[j])])?;
                    out.push(z.checked_mul(&cp[j])?);
                }
            }
            ComplexHadamardMatrix::from_exact(Matrix::from_vec(n, n, out)?)
        }
        Entries::Float(m) => {
            let rp: Vec<Complex64> = mv.row_phases.iter().map(Entry::to_float).collect();
            let cp: Vec<Complex64> = mv.col_phases.iter().map(Entry::to_float).collect();
            let out = Matrix::from_fn(n, n, |i, j| rp[i] * m[(mv.row_perm[i], mv.col_perm[j])] * cp[j]);
            Ok(ComplexHadamardMatrix { entries: Entries::Float(out) })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regularity {
    pub regular: bool,
    /// Two rows whose absolute row sums differ.
    pub mismatch: Option<(usize, usize)>,
}

/// A matrix is regular when all its rows have the same absolute row sum.
pub fn is_regular(h: &ComplexHadamardMatrix) -> Regularity {
    let n = h.order();
    let mismatch = match &h.entries {
        Entries::Exact { m, .. } => {
            let sums: Vec<Rational> = m
                .iter_rows()
                .map(|r| r.iter().fold(QuadExtScalar::zero(), |a, z| &a + z).abs_squared())
                .collect();
            (1..n).find(|&i| sums[i] != sums[0])
        }
        Entries::Float(m) => {
            let sums: Vec<f64> = m.iter_rows().map(|r| r.iter().sum::<Complex64>().norm()).collect();
            (1..n).find(|&i| (sums[i] - sums[0]).abs() > FLOAT_TOL * n as f64)
        }
    };
    Regularity { regular: mismatch.is_none(), mismatch: mismatch.map(|i| (0, i)) }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

const BUTSON_MAX_DENOMINATOR: u32 = 360;

fn float_root_order(z: Complex64) -> Option<u32> {
    if (z.norm() - 1.0).abs() > FLOAT_TOL {
        return None;
    }
    let turns = z.arg() / std::f64::consts::TAU;
    (1..=BUTSON_MAX_DENOMINATOR).find(|&q| {
        let t = turns * f64::from(q);
        (t - t.round()).abs() <= FLOAT_TOL * f64::from(q)
    })
}

/// Smallest `m` such that every entry is an `m`-th root of unity.
pub fn detect_butson(h: &ComplexHadamardMatrix) -> Option<u32> {
    let mut order = 1u32;
    match &h.entries {
        Entries::Exact { m, .. } => {
            for z in m.as_slice() {
                order = lcm(order, z.root_of_unity_order()?);
            }
        }
        Entries::Float(m) => {
            for z in m.as_slice() {
                order = lcm(order, float_root_order(*z)?);
            }
        }
    }
    Some(order)
}

/// Fourier matrix `F_n` with entries `exp(2πi·jk/n)` (float backend).
/// `F_n[j][k] = exp(2πi·jk/n)`; exact for `n ∈ {1, 2, 3, 4, 6}`, whose roots
/// of unity lie in `Q(i)` or `Q(i√3)`.
pub fn fourier(n: usize) -> ComplexHadamardMatrix {
    assert!(n >= 1, "Fourier matrices need n ≥ 1");
    if matches!(n, 1 | 2 | 3 | 4 | 6) {
        let m = Matrix::from_fn(n, n, |j, k| exact_root_of_unity(j * k % n, n));
        return ComplexHadamardMatrix::from_exact(m).expect("roots of unity are unimodular");
    }
    fourier_float(n)
}

/// `F_n` on the float backend for every `n`.
pub fn fourier_float(n: usize) -> ComplexHadamardMatrix {
    assert!(n >= 1, "Fourier matrices need n ≥ 1");
    let m = Matrix::from_fn(n, n, |j, k| {
        let t = (j * k % n) as f64 / n as f64;
        Complex64::from_polar(1.0, std::f64::consts::TAU * t)
    });
    ComplexHadamardMatrix { entries: Entries::Float(m) }
}

/// `exp(2πi·k/n)` for `n` dividing 4 or 6.
fn exact_root_of_unity(k: usize, n: usize) -> QuadExtScalar {
    let g = num_integer::gcd(k, n);
    let (k, n) = (k / g, n / g);
    let upper = 2 * k < n;
    let half_sqrt3 = |x: i64| QuadExtScalar::new(rat(x, 2), rat(if upper { 1 } else { -1 }, 2), 3);
    match n {
        1 => QuadExtScalar::one(),
        2 => QuadExtScalar::from_int(-1),
        4 => QuadExtScalar::new(rat(0, 1), rat(if upper { 1 } else { -1 }, 1), 1),
        3 => half_sqrt3(-1),
        6 => half_sqrt3(1),
        _ => unreachable!("only divisors of 4 and 6"),
    }
}

/// How two rows of a two-entry matrix `{1, a}` meet: `(1,1)`, `(1,a)`,
/// `(a,1)` and `(a,a)` coordinate counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairProfile {
    pub a_count: usize,
    pub b_count: usize,
    pub c_count: usize,
    pub d_count: usize,
}

/// Profile of rows `i` and `j` against the entry pair `{1, a}`; `None` if the
/// rows hold any other value.
pub fn pair_profile(h: &ComplexHadamardMatrix, i: usize, j: usize, a: &QuadExtScalar) -> Option<PairProfile> {
    let m = h.exact_entries()?;
    let one = QuadExtScalar::one();
    let mut p = PairProfile { a_count: 0, b_count: 0, c_count: 0, d_count: 0 };
    for t in 0..h.order() {
        let (x, y) = (&m[(i, t)], &m[(j, t)]);
        match (x == &one, y == &one) {
            (true, true) => p.a_count += 1,
            (true, false) if y == a => p.b_count += 1,
            (false, true) if x == a => p.c_count += 1,
            (false, false) if x == a && y == a => p.d_count += 1,
            _ => return None,
        }
    }
    Some(p)
}

pub const FIXTURE_NAMES: [&str; 4] = ["P7", "U15", "V15", "W9A"];

const P7: [&str; 7] = [
    "-1 1 w 1 w 1 w",
    "1 -1 w 1 1 w w",
    "w w -w 1 w w 1",
    "1 1 1 -1 w w w",
    "w 1 w w -w w 1",
    "1 w w w w -w 1",
    "w w 1 w 1 1 -1",
];

const U15: [&str; 15] = [
    "a 1 a 1 a 1 a 1 a 1 a 1 a 1 a",
    "1 a a 1 1 a a 1 1 a a 1 1 a a",
    "a a 1 1 a a 1 1 a a 1 1 a a 1",
    "1 1 1 a a a a 1 1 1 1 a a a a",
    "a 1 a a 1 a 1 1 a 1 a a 1 a 1",
    "1 a a a a 1 1 1 1 a a a a 1 1",
    "a a 1 a 1 1 a 1 a a 1 a 1 1 a",
    "1 1 1 1 1 1 1 a a a a a a a a",
    "a 1 a 1 a 1 a a 1 a 1 a 1 a 1",
    "1 a a 1 1 a a a a 1 1 a a 1 1",
    "a a 1 1 a a 1 a 1 1 a a 1 1 a",
    "1 1 1 a a a a a a a a 1 1 1 1",
    "a 1 a a 1 a 1 a 1 a 1 1 a 1 a",
    "1 a a a a 1 1 a a 1 1 1 1 a a",
    "a a 1 a 1 1 a a 1 1 a 1 a a 1",
];

const V15: [&str; 15] = [
    "-1 1 b 1 b 1 b 1 b 1 b 1 b 1 b",
    "1 -1 b 1 1 b b 1 1 b b 1 1 b b",
    "b b -b 1 b b 1 1 b b 1 1 b b 1",
    "1 1 1 -1 b b b 1 1 1 1 b b b b",
    "b 1 b b -b b 1 1 b 1 b b 1 b 1",
    "1 b b b b -b 1 1 1 b b b b 1 1",
    "b b 1 b 1 1 -1 1 b b 1 b 1 1 b",
    "1 1 1 1 1 1 1 -1 b b b b b b b",
    "b 1 b 1 b 1 b b -b b 1 b 1 b 1",
    "1 b b 1 1 b b b b -b 1 b b 1 1",
    "b b 1 1 b b 1 b 1 1 -1 b 1 1 b",
    "1 1 1 b b b b b b b b -b 1 1 1",
    "b 1 b b 1 b 1 b 1 b 1 1 -1 1 b",
    "1 b b b b 1 1 b b 1 1 1 1 -1 b",
    "b b 1 b 1 1 b b 1 1 b 1 b b -b",
];

// `C` is the conjugate of `c`
const W9A: [&str; 9] = [
    "1 c c c c C C C C",
    "c 1 C C c c c C C",
    "c C 1 c C c C c C",
    "c C c 1 C C c C c",
    "c c C C 1 C C c c",
    "C c c C C 1 c c C",
    "C c C c C c 1 C c",
    "C C c C c c C 1 c",
    "C C C c c C c c 1",
];

fn parse_fixture(rows: &[&str], symbol: char, value: &QuadExtScalar) -> ComplexHadamardMatrix {
    let conj_symbol = symbol.to_ascii_uppercase();
    let parse = |tok: &str| -> QuadExtScalar {
        let (neg, body) = tok.strip_prefix('-').map_or((false, tok), |b| (true, b));
        let z = match body {
            "1" => QuadExtScalar::one(),
            s if s.len() == 1 && s.starts_with(symbol) => value.clone(),
            s if s.len() == 1 && s.starts_with(conj_symbol) => value.conj(),
            _ => unreachable!("bad fixture token {tok}"),
        };
        if neg {
            -z
        } else {
            z
        }
    };
    let m = Matrix::from_rows(rows.iter().map(|r| r.split_whitespace().map(parse).collect()).collect())
        .expect("fixture rows are rectangular");
    ComplexHadamardMatrix::from_exact(m).expect("fixture entries are unimodular")
}

/// Matrices printed in the literature, transcribed entry by entry:
/// `P7` (ω = −1/2 + i√3/2), `U15` (a = −7/8 + i√15/8),
/// `V15` (b = −5/6 + i√11/6) and `W9A` (c = 1/4 + i√15/4).
pub fn fixture(name: &str) -> Result<ComplexHadamardMatrix> {
    let q = |x: Rational, y: Rational, d: u64| QuadExtScalar::new(x, y, d);
    Ok(match name {
        "P7" => parse_fixture(&P7, 'w', &q(rat(-1, 2), rat(1, 2), 3)),
        "U15" => parse_fixture(&U15, 'a', &q(rat(-7, 8), rat(1, 8), 15)),
        "V15" => parse_fixture(&V15, 'b', &q(rat(-5, 6), rat(1, 6), 11)),
        "W9A" => parse_fixture(&W9A, 'c', &q(rat(1, 4), rat(1, 4), 15)),
        _ => return Err(Error::UnknownFixture(name.to_string())),
    })
}

#[derive(Serialize, Deserialize)]
struct ExactEntryJson {
    x: String,
    y: String,
}

#[derive(Serialize, Deserialize)]
struct FloatEntryJson {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "lowercase")]
enum ChmJson {
    Exact { n: usize, d: u64, entries: Vec<Vec<ExactEntryJson>> },
    Float { n: usize, entries: Vec<Vec<FloatEntryJson>> },
}

impl ComplexHadamardMatrix {
    /// One row per line; exact entries in surd notation.
    pub fn render_text(&self) -> String {
        let n = self.order();
        let mut out = String::new();
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| match self.entry(i, j) {
                    Entry::Exact(z) => z.render_surd(),
                    Entry::Float(z) => format!("{:.12}{:+.12}i", z.re, z.im),
                })
                .collect();
            out.push('[');
            out.push_str(&row.join(", "));
            out.push_str("]\n");
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = match &self.entries {
            Entries::Exact { radicand, m } => ChmJson::Exact {
                n: m.rows(),
                d: *radicand,
                entries: m
                    .iter_rows()
                    .map(|r| {
                        r.iter()
                            .map(|z| ExactEntryJson { x: format_rational(z.re()), y: format_rational(z.im_coeff()) })
                            .collect()
                    })
                    .collect(),
            },
            Entries::Float(m) => ChmJson::Float {
                n: m.rows(),
                entries: m.iter_rows().map(|r| r.iter().map(|z| FloatEntryJson { re: z.re, im: z.im }).collect()).collect(),
            },
        };
        serde_json::to_value(doc).expect("matrix JSON is always serializable")
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self> {
        let h = match serde_json::from_value::<ChmJson>(value)? {
            ChmJson::Exact { n, d, entries } => {
                if d == 0 {
                    return Err(Error::Parse("radicand must be positive".into()));
                }
                let rows = entries
                    .into_iter()
                    .map(|r| {
                        r.into_iter()
                            .map(|e| Ok(QuadExtScalar::new(parse_rational(&e.x)?, parse_rational(&e.y)?, d)))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let h = Self::from_exact(Matrix::from_rows(rows)?)?;
                if h.order() != n {
                    return Err(Error::Dimension(format!("declared n = {n}, found {}", h.order())));
                }
                h
            }
            ChmJson::Float { n, entries } => {
                let rows = entries.into_iter().map(|r| r.into_iter().map(|e| Complex64::new(e.re, e.im)).collect()).collect();
                let h = Self::from_float(Matrix::from_rows(rows)?)?;
                if h.order() != n {
                    return Err(Error::Dimension(format!("declared n = {n}, found {}", h.order())));
                }
                h
            }
        };
        Ok(h)
    }
}
