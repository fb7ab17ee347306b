//! Equivalence invariants: the Haagerup set, minor spectra and the
//! fingerprint, the `d ↔ n−d` minor duality, two determinant identities as
//! checkable utilities, and sampled minor censuses of real Hadamard matrices.

mod census;
mod minors;

use std::collections::BTreeSet;
use std::fmt;
use std::time::Duration;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::chm::{verify_chm, ComplexHadamardMatrix};
use crate::error::{Error, Result};
use crate::linalg::{adjoint, det, identity, mat_add, mat_mul, solve, FieldScalar};
use crate::matrix::Matrix;
use crate::scalar::{format_rational, parse_rational, render_sqrt, QuadExtScalar, Rational};

pub use census::{klms_unit, sample_minor_census, exhaustive_minor_census, Census, KlmsReport, SAMPLE_BLOCK};

/// Float Haagerup values closer than this are identified.
pub const HAAGERUP_TOL: f64 = 1e-9;
/// Relative gap below which neighbouring float `|det|` values merge.
pub const FLOAT_MERGE_REL: f64 = 1e-8;
/// Largest default `dmax`; larger values must be requested explicitly.
pub const DEFAULT_DMAX_CAP: usize = 5;

/// Caps on a minor enumeration. Exceeding either aborts with
/// [`Error::BudgetExceeded`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_minors: Option<u64>,
    pub max_time: Option<Duration>,
}

/// Worker count and budget for the parallel minor engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Engine {
    pub workers: usize,
    pub budget: Budget,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(std::thread::available_parallelism().map_or(1, usize::from))
    }
}

impl Engine {
    pub fn new(workers: usize) -> Self {
        Engine { workers: workers.max(1), budget: Budget::default() }
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub(crate) fn pool(&self) -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new().num_threads(self.workers).build().expect("thread pool")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum HaagerupSet {
    Exact(BTreeSet<QuadExtScalar>),
    /// Cluster representatives sorted by real then imaginary part.
    Float(Vec<Complex64>),
}

impl HaagerupSet {
    pub fn len(&self) -> usize {
        match self {
            HaagerupSet::Exact(s) => s.len(),
            HaagerupSet::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, HaagerupSet::Exact(_))
    }

    pub fn contains_exact(&self, z: &QuadExtScalar) -> bool {
        match self {
            HaagerupSet::Exact(s) => s.contains(z),
            HaagerupSet::Float(_) => self.contains_approx(z.to_float(), HAAGERUP_TOL),
        }
    }

    pub fn contains_approx(&self, z: Complex64, tol: f64) -> bool {
        self.to_float().iter().any(|w| (w - z).norm() < tol)
    }

    pub fn to_float(&self) -> Vec<Complex64> {
        match self {
            HaagerupSet::Exact(s) => s.iter().map(QuadExtScalar::to_float).collect(),
            HaagerupSet::Float(v) => v.clone(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            HaagerupSet::Exact(s) => serde_json::json!({
                "backend": "exact",
                "values": s.iter().map(ToString::to_string).collect::<Vec<_>>(),
            }),
            HaagerupSet::Float(v) => serde_json::json!({
                "backend": "float",
                "values": v.iter().map(|z| serde_json::json!({"re": z.re, "im": z.im})).collect::<Vec<_>>(),
            }),
        }
    }
}

impl fmt::Display for HaagerupSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HaagerupSet::Exact(s) => {
                for z in s {
                    writeln!(f, "{}", z.render_surd())?;
                }
            }
            HaagerupSet::Float(v) => {
                for z in v {
                    writeln!(f, "{:.12} {:+.12}i", z.re, z.im)?;
                }
            }
        }
        Ok(())
    }
}

/// Greedy clustering of complex values within `tol`; representatives are
/// the first member in (re, im) order.
pub(crate) fn cluster_complex(mut values: Vec<Complex64>, tol: f64) -> Vec<Complex64> {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut reps: Vec<Complex64> = Vec::new();
    for z in values {
        let near = reps.iter().rev().take_while(|r| z.re - r.re < tol).any(|r| (r - z).norm() < tol);
        if !near {
            reps.push(z);
        }
    }
    reps.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    reps
}

/// `Λ(H) = { h_ij·h_kl·conj(h_il)·conj(h_kj) }`. For each row pair the
/// products `r_j = h_ij·conj(h_kj)` are collected once, and `Λ` is the union of
/// `r_j·conj(r_l)`.
pub fn haagerup_set(h: &ComplexHadamardMatrix) -> HaagerupSet {
    let n = h.order();
    match h.exact_entries() {
        Some(m) => {
            let mut out = BTreeSet::new();
            for i in 0..n {
                for k in 0..n {
                    let r: BTreeSet<QuadExtScalar> = (0..n).map(|j| &m[(i, j)] * &m[(k, j)].conj()).collect();
                    for a in &r {
                        for b in &r {
                            out.insert(a * &b.conj());
                        }
                    }
                }
            }
            HaagerupSet::Exact(out)
        }
        None => {
            let m = h.float_entries();
            let mut all = Vec::new();
            for i in 0..n {
                for k in 0..n {
                    let r = cluster_complex((0..n).map(|j| m[(i, j)] * m[(k, j)].conj()).collect(), HAAGERUP_TOL / 4.0);
                    all.extend(cluster_complex(r.iter().flat_map(|a| r.iter().map(move |b| a * b.conj())).collect(), HAAGERUP_TOL));
                }
            }
            HaagerupSet::Float(cluster_complex(all, HAAGERUP_TOL))
        }
    }
}

/// `(value, multiplicity)` pairs ascending by value.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumValues {
    /// Exact `|det|²`.
    Exact(Vec<(Rational, u64)>),
    /// Clustered float `|det|`.
    Float(Vec<(f64, u64)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinorSpectrum {
    pub d: usize,
    pub values: SpectrumValues,
}

impl MinorSpectrum {
    pub fn len(&self) -> usize {
        match &self.values {
            SpectrumValues::Exact(p) => p.len(),
            SpectrumValues::Float(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total(&self) -> u64 {
        match &self.values {
            SpectrumValues::Exact(p) => p.iter().map(|x| x.1).sum(),
            SpectrumValues::Float(p) => p.iter().map(|x| x.1).sum(),
        }
    }

    pub fn exact_pairs(&self) -> Option<&[(Rational, u64)]> {
        match &self.values {
            SpectrumValues::Exact(p) => Some(p),
            SpectrumValues::Float(_) => None,
        }
    }

    /// `(|det|, multiplicity)`; exact values are square-rooted.
    pub fn float_pairs(&self) -> Vec<(f64, u64)> {
        match &self.values {
            SpectrumValues::Exact(p) => p
                .iter()
                .map(|(v, m)| (num_traits::ToPrimitive::to_f64(v).expect("finite").sqrt(), *m))
                .collect(),
            SpectrumValues::Float(p) => p.clone(),
        }
    }

    /// Multiplicity of the exact `|det|²` value, if the spectrum is exact.
    pub fn multiplicity_sq(&self, value_sq: &Rational) -> Option<u64> {
        self.exact_pairs().map(|p| p.iter().find(|(v, _)| v == value_sq).map_or(0, |x| x.1))
    }
}

impl MinorSpectrum {
    fn to_json_doc(&self) -> SpectrumJson {
        let pairs = match &self.values {
            SpectrumValues::Exact(p) => p.iter().map(|(v, m)| PairJson::Exact { value_sq: format_rational(v), mult: *m }).collect(),
            SpectrumValues::Float(p) => p.iter().map(|&(v, m)| PairJson::Float { value: v, mult: m }).collect(),
        };
        SpectrumJson { d: self.d, pairs }
    }

    /// `{"d": d, "pairs": [{"value_sq": "p/q", "mult": m}, ...]}`; float
    /// spectra use `"value"` for `|det|`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_json_doc()).expect("serializable")
    }
}

impl fmt::Display for MinorSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={}:", self.d)?;
        match &self.values {
            SpectrumValues::Exact(p) => {
                for (v, m) in p {
                    write!(f, " ({}, {m})", render_sqrt(v))?;
                }
            }
            SpectrumValues::Float(p) => {
                for (v, m) in p {
                    write!(f, " ({v:.10}, {m})")?;
                }
            }
        }
        Ok(())
    }
}

/// Spectrum of `|det|` over all `d×d` submatrices.
pub fn minor_spectrum(h: &ComplexHadamardMatrix, d: usize, engine: &Engine) -> Result<MinorSpectrum> {
    let n = h.order();
    if d == 0 || d > n {
        return Err(Error::Dimension(format!("minor size {d} outside 1..={n}")));
    }
    if n >= 64 {
        return Err(Error::Dimension(format!("order {n} is too large for subset enumeration")));
    }
    let values = match h.exact_entries() {
        Some(m) => {
            let scaled = minors::ScaledMatrix::new(m, h.radicand().expect("exact"));
            let counts = minors::exact_norm_counts(&scaled, d, engine)?;
            let denom = scaled.scale.pow(2 * d as u32);
            SpectrumValues::Exact(counts.into_iter().map(|(k, v)| (Rational::new(k, denom.clone()), v)).collect())
        }
        None => {
            let clusters = minors::float_clusters(&h.float_entries(), d, engine)?;
            SpectrumValues::Float(clusters.into_iter().map(|(lo, _, c)| (lo, c)).collect())
        }
    };
    let spectrum = MinorSpectrum { d, values };
    let expected = minors::binomial(n, d).pow(2);
    assert_eq!(spectrum.total(), expected, "multiplicities must sum to C(n,d)²");
    Ok(spectrum)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fingerprint {
    pub n: usize,
    pub spectra: Vec<MinorSpectrum>,
}

pub fn default_dmax(n: usize) -> usize {
    (n / 2).min(DEFAULT_DMAX_CAP)
}

/// Spectra for `d = 2..=dmax`; `dmax` defaults to [`default_dmax`].
pub fn fingerprint(h: &ComplexHadamardMatrix, dmax: Option<usize>, engine: &Engine) -> Result<Fingerprint> {
    let n = h.order();
    let dmax = dmax.unwrap_or_else(|| default_dmax(n));
    if dmax > n {
        return Err(Error::Dimension(format!("dmax {dmax} exceeds the order {n}")));
    }
    let spectra = (2..=dmax).map(|d| minor_spectrum(h, d, engine)).collect::<Result<_>>()?;
    Ok(Fingerprint { n, spectra })
}

#[derive(Serialize, Deserialize)]
struct FingerprintJson {
    n: usize,
    spectra: Vec<SpectrumJson>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumJson {
    d: usize,
    pairs: Vec<PairJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PairJson {
    Exact { value_sq: String, mult: u64 },
    Float { value: f64, mult: u64 },
}

impl Fingerprint {
    pub fn spectrum(&self, d: usize) -> Option<&MinorSpectrum> {
        self.spectra.iter().find(|s| s.d == d)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let spectra = self.spectra.iter().map(MinorSpectrum::to_json_doc).collect();
        serde_json::to_value(FingerprintJson { n: self.n, spectra }).expect("serializable")
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self> {
        let raw: FingerprintJson = serde_json::from_value(value)?;
        let spectra = raw
            .spectra
            .into_iter()
            .map(|s| {
                let exact = s.pairs.iter().all(|p| matches!(p, PairJson::Exact { .. }));
                let values = if exact {
                    SpectrumValues::Exact(
                        s.pairs
                            .into_iter()
                            .map(|p| match p {
                                PairJson::Exact { value_sq, mult } => Ok((parse_rational(&value_sq)?, mult)),
                                PairJson::Float { .. } => unreachable!(),
                            })
                            .collect::<Result<_>>()?,
                    )
                } else {
                    SpectrumValues::Float(
                        s.pairs
                            .into_iter()
                            .map(|p| match p {
                                PairJson::Float { value, mult } => Ok((value, mult)),
                                PairJson::Exact { .. } => Err(Error::Parse("mixed exact and float pairs".into())),
                            })
                            .collect::<Result<_>>()?,
                    )
                };
                Ok(MinorSpectrum { d: s.d, values })
            })
            .collect::<Result<_>>()?;
        Ok(Fingerprint { n: raw.n, spectra })
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        for s in &self.spectra {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

fn pow_rational(n: usize, e: i64) -> Rational {
    let b = Rational::from_integer(BigInt::from(n));
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        <Rational as One>::one() / num_traits::pow(b, (-e) as usize)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualityReport {
    pub n: usize,
    pub d: usize,
    pub low: MinorSpectrum,
    pub high: MinorSpectrum,
    /// Factor `n^{n−2d}` taking `|det|²` of `d`-minors to `(n−d)`-minors.
    pub scale_sq: Rational,
}

/// Enumerates the `d` and `n−d` spectra independently and checks that
/// `|det|²` values correspond under the factor `n^{n−2d}` with equal
/// multiplicities.
pub fn duality_check(h: &ComplexHadamardMatrix, d: usize, engine: &Engine) -> Result<DualityReport> {
    let n = h.order();
    if let Err(v) = verify_chm(h) {
        return Err(Error::NotHadamard(v.to_string()));
    }
    if d == 0 || d >= n {
        return Err(Error::Dimension(format!("duality needs 1 ≤ d < {n}, got {d}")));
    }
    let low = minor_spectrum(h, d, engine)?;
    let high = minor_spectrum(h, n - d, engine)?;
    let scale_sq = pow_rational(n, n as i64 - 2 * d as i64);
    match (&low.values, &high.values) {
        (SpectrumValues::Exact(lo), SpectrumValues::Exact(hi)) => {
            let scaled: Vec<(Rational, u64)> = lo.iter().map(|(v, m)| (v * &scale_sq, *m)).collect();
            if &scaled != hi {
                let bad = scaled.iter().zip(hi).find(|(a, b)| a != b);
                return Err(Error::DualityViolation(match bad {
                    Some((a, b)) => format!(
                        "d={d}: scaled ({}, {}) vs ({}, {})",
                        format_rational(&a.0),
                        a.1,
                        format_rational(&b.0),
                        b.1
                    ),
                    None => format!("d={d}: {} values vs {}", scaled.len(), hi.len()),
                }));
            }
        }
        _ => {
            let factor = num_traits::ToPrimitive::to_f64(&scale_sq).expect("finite").sqrt();
            let (lo, hi) = (low.float_pairs(), high.float_pairs());
            let ok = lo.len() == hi.len()
                && lo.iter().zip(&hi).all(|((a, ma), (b, mb))| {
                    ma == mb && (a * factor - b).abs() <= 1e-8 * b.max(1.0)
                });
            if !ok {
                return Err(Error::DualityViolation(format!("d={d}: float spectra disagree")));
            }
        }
    }
    Ok(DualityReport { n, d, low, high, scale_sq })
}

/// Both sides of the complementary-block identity.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockDetSides {
    Exact { lhs: Rational, rhs: Rational },
    Float { lhs: f64, rhs: f64 },
}

impl BlockDetSides {
    pub fn agree(&self, tol: f64) -> bool {
        match self {
            BlockDetSides::Exact { lhs, rhs } => lhs == rhs,
            BlockDetSides::Float { lhs, rhs } => (lhs - rhs).abs() <= tol * rhs.abs().max(1.0),
        }
    }
}

/// For `H/√n` unitary, the block `A` on `rows × cols` and the complementary
/// block `D` satisfy `|det A| = |det D|` after scaling. Returned as
/// `lhs = n^{n−2r}·|det A|²` and `rhs = |det D|²`, with `det` of an empty
/// block equal to 1.
pub fn block_det_check(h: &ComplexHadamardMatrix, rows: &[usize], cols: &[usize]) -> Result<BlockDetSides> {
    let n = h.order();
    let r = rows.len();
    let distinct = |s: &[usize]| s.iter().collect::<BTreeSet<_>>().len() == s.len() && s.iter().all(|&i| i < n);
    if cols.len() != r || !distinct(rows) || !distinct(cols) {
        return Err(Error::Dimension("block needs equally many distinct in-range rows and columns".into()));
    }
    let comp = |s: &[usize]| (0..n).filter(|i| !s.contains(i)).collect::<Vec<_>>();
    let (rows_c, cols_c) = (comp(rows), comp(cols));
    let factor = pow_rational(n, n as i64 - 2 * r as i64);
    Ok(match h.exact_entries() {
        Some(m) => {
            let a = det(&m.select(rows, cols)).abs_squared();
            let d = det(&m.select(&rows_c, &cols_c)).abs_squared();
            BlockDetSides::Exact { lhs: factor * a, rhs: d }
        }
        None => {
            let m = h.float_entries();
            let a = det(&m.select(rows, cols)).norm_sqr();
            let d = det(&m.select(&rows_c, &cols_c)).norm_sqr();
            let f = num_traits::ToPrimitive::to_f64(&factor).expect("finite");
            BlockDetSides::Float { lhs: f * a, rhs: d }
        }
    })
}

/// Leading `r×r` block against the trailing `(n−r)×(n−r)` block.
pub fn block_det_check_leading(h: &ComplexHadamardMatrix, r: usize) -> Result<BlockDetSides> {
    let idx: Vec<usize> = (0..r).collect();
    block_det_check(h, &idx, &idx)
}

/// `(det(A + U·V*), det(I + V*·A⁻¹·U)·det(A))`.
pub fn det_lemma_eval<T: FieldScalar>(a: &Matrix<T>, u: &Matrix<T>, v: &Matrix<T>) -> Result<(T, T)> {
    if !a.is_square() || u.rows() != a.rows() || v.rows() != a.rows() || u.cols() != v.cols() {
        return Err(Error::Dimension("A must be n×n and U, V both n×m".into()));
    }
    let vstar = adjoint(v);
    let lhs = det(&mat_add(a, &mat_mul(u, &vstar)?)?);
    let ainv_u = solve(a, u)?;
    let inner = mat_add(&identity(u.cols()), &mat_mul(&vstar, &ainv_u)?)?;
    let rhs = det(&inner).mul(&det(a));
    Ok((lhs, rhs))
}
