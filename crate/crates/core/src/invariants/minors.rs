//! Enumeration of all `d×d` minors.
//!
//! Row subsets are listed in colexicographic order and cut into a fixed
//! number of contiguous chunks; chunks run on the worker pool and are merged
//! in chunk order, so the result never depends on the number of workers.
//!
//! Exact entries `x + y·i√D` are scaled by the common denominator `L` into
//! `Z[i√D]`, where fraction-free elimination keeps every intermediate value a
//! minor of the scaled matrix. `|det|²` is then `N(det)/L^{2d}` with the norm
//! `N(a + b·i√D) = a² + D·b²`.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::Engine;
use crate::error::{Error, Progress, Result};
use crate::matrix::Matrix;
use crate::scalar::QuadExtScalar;

const CHUNKS: usize = 256;

/// All `d`-subsets of `0..n` in colex order, stored flat with stride `d`.
pub(crate) struct Subsets {
    d: usize,
    count: usize,
    flat: Vec<usize>,
}

impl Subsets {
    pub(crate) fn new(n: usize, d: usize) -> Self {
        assert!(d <= n && n < 64);
        let mut flat = Vec::new();
        let mut count = 0;
        if d == 0 {
            return Subsets { d, count: 1, flat };
        }
        let limit = 1u64 << n;
        let mut x: u64 = (1u64 << d) - 1;
        while x < limit {
            flat.extend((0..n).filter(|&i| x >> i & 1 == 1));
            count += 1;
            let c = x & x.wrapping_neg();
            let r = x + c;
            x = (((r ^ x) >> 2) / c) | r;
        }
        Subsets { d, count, flat }
    }

    pub(crate) fn len(&self) -> usize {
        self.count
    }

    pub(crate) fn get(&self, i: usize) -> &[usize] {
        &self.flat[i * self.d..(i + 1) * self.d]
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Runs `visit` on every row subset, chunked as described above.
pub(crate) fn run_chunks<A, I, F>(n: usize, d: usize, engine: &Engine, init: I, visit: F) -> Result<Vec<A>>
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&[usize], &Subsets, &mut A) + Sync,
{
    let rows = Subsets::new(n, d);
    let cols = Subsets::new(n, d);
    let per_row = cols.len() as u64;
    let total = (rows.len() as u64).saturating_mul(per_row);
    if engine.budget.max_minors.is_some_and(|cap| total > cap) {
        return Err(Error::BudgetExceeded(Progress { done: 0, total }));
    }
    let deadline = engine.budget.max_time.map(|t| Instant::now() + t);
    let stop = AtomicBool::new(false);
    let done = AtomicU64::new(0);
    let chunk = rows.len().div_ceil(CHUNKS).max(1);
    let nchunks = rows.len().div_ceil(chunk);
    let out: Vec<A> = engine.pool().install(|| {
        (0..nchunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = init();
                for r in c * chunk..((c + 1) * chunk).min(rows.len()) {
                    if stop.load(Ordering::Relaxed) {
                        break;
                    }
                    if deadline.is_some_and(|t| Instant::now() > t) {
                        stop.store(true, Ordering::Relaxed);
                        break;
                    }
                    visit(rows.get(r), &cols, &mut acc);
                    done.fetch_add(per_row, Ordering::Relaxed);
                }
                acc
            })
            .collect()
    });
    if stop.load(Ordering::Relaxed) {
        return Err(Error::BudgetExceeded(Progress { done: done.load(Ordering::Relaxed), total }));
    }
    Ok(out)
}

/// Integer types the fraction-free elimination runs on. `None` signals overflow.
pub(crate) trait Int: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn div_exact(&self, o: &Self) -> Self;
}

impl Int for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        debug_assert_eq!(self % o, 0);
        self / o
    }
}

impl Int for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        debug_assert!(Zero::is_zero(&(self % o)));
        self / o
    }
}

/// `a + b·i√D`.
type Gauss<T> = (T, T);

fn gmul<T: Int>(x: &Gauss<T>, y: &Gauss<T>, disc: &T) -> Option<Gauss<T>> {
    let re = x.0.mul(&y.0)?.sub(&disc.mul(&x.1.mul(&y.1)?)?)?;
    let im = x.0.mul(&y.1)?.add(&x.1.mul(&y.0)?)?;
    Some((re, im))
}

fn gnorm<T: Int>(x: &Gauss<T>, disc: &T) -> Option<T> {
    x.0.mul(&x.0)?.add(&disc.mul(&x.1.mul(&x.1)?)?)
}

/// `x / y`, known to lie in the ring.
fn gdiv<T: Int>(x: &Gauss<T>, y: &Gauss<T>, disc: &T) -> Option<Gauss<T>> {
    if y.1.is_zero() {
        return Some((x.0.div_exact(&y.0), x.1.div_exact(&y.0)));
    }
    let conj = (y.0.clone(), T::zero().sub(&y.1)?);
    let num = gmul(x, &conj, disc)?;
    let n = gnorm(y, disc)?;
    Some((num.0.div_exact(&n), num.1.div_exact(&n)))
}

/// Determinant up to sign by Bareiss elimination on a row-major `d×d` buffer.
pub(crate) fn bareiss<T: Int>(m: &mut [Gauss<T>], d: usize, disc: &T) -> Option<Gauss<T>> {
    if d == 0 {
        return Some((T::one(), T::zero()));
    }
    let mut prev: Gauss<T> = (T::one(), T::zero());
    for k in 0..d - 1 {
        if m[k * d + k].0.is_zero() && m[k * d + k].1.is_zero() {
            let Some(p) = (k + 1..d).find(|&p| !(m[p * d + k].0.is_zero() && m[p * d + k].1.is_zero())) else {
                return Some((T::zero(), T::zero()));
            };
            for j in 0..d {
                m.swap(k * d + j, p * d + j);
            }
        }
        let pivot = m[k * d + k].clone();
        let trivial = k == 0;
        for i in k + 1..d {
            let lead = m[i * d + k].clone();
            for j in k + 1..d {
                let t = gmul(&m[i * d + j], &pivot, disc)?;
                let u = gmul(&lead, &m[k * d + j], disc)?;
                let diff = (t.0.sub(&u.0)?, t.1.sub(&u.1)?);
                m[i * d + j] = if trivial { diff } else { gdiv(&diff, &prev, disc)? };
            }
        }
        prev = pivot;
    }
    Some(m[d * d - 1].clone())
}

/// An exact matrix scaled into `Z[i√D]`.
pub(crate) struct ScaledMatrix {
    pub n: usize,
    pub scale: BigInt,
    disc_big: BigInt,
    disc_small: i128,
    big: Vec<Gauss<BigInt>>,
    small: Option<Vec<Gauss<i128>>>,
}

impl ScaledMatrix {
    pub(crate) fn new(m: &Matrix<QuadExtScalar>, radicand: u64) -> Self {
        let scale = m
            .as_slice()
            .iter()
            .fold(<BigInt as One>::one(), |l, z| l.lcm(z.re().denom()).lcm(z.im_coeff().denom()));
        let big: Vec<Gauss<BigInt>> = m
            .as_slice()
            .iter()
            .map(|z| {
                let s = num_rational::BigRational::from_integer(scale.clone());
                ((z.re() * &s).to_integer(), (z.im_coeff() * &s).to_integer())
            })
            .collect();
        let small = big.iter().map(|(a, b)| Some((a.to_i128()?, b.to_i128()?))).collect();
        ScaledMatrix {
            n: m.rows(),
            scale,
            disc_big: BigInt::from(radicand),
            disc_small: i128::from(radicand),
            big,
            small,
        }
    }

    /// Norm of the scaled minor on `rows × cols`.
    fn minor_norm(&self, rows: &[usize], cols: &[usize], buf: &mut Vec<Gauss<i128>>) -> Norm {
        let d = rows.len();
        if let Some(small) = &self.small {
            let disc = self.disc_small;
            buf.clear();
            for &r in rows {
                buf.extend(cols.iter().map(|&c| small[r * self.n + c]));
            }
            if let Some(n) = bareiss(buf, d, &disc).and_then(|det| gnorm(&det, &disc)) {
                return Norm::Small(n as u128);
            }
        }
        let mut m: Vec<Gauss<BigInt>> = Vec::with_capacity(d * d);
        for &r in rows {
            m.extend(cols.iter().map(|&c| self.big[r * self.n + c].clone()));
        }
        let det = bareiss(&mut m, d, &self.disc_big).expect("big integers do not overflow");
        Norm::Big(gnorm(&det, &self.disc_big).expect("big integers do not overflow"))
    }
}

enum Norm {
    Small(u128),
    Big(BigInt),
}

#[derive(Default)]
struct NormCounts {
    small: HashMap<u128, u64>,
    big: BTreeMap<BigInt, u64>,
}

/// Multiplicities of the scaled minor norms, ascending.
pub(crate) fn exact_norm_counts(m: &ScaledMatrix, d: usize, engine: &Engine) -> Result<BTreeMap<BigInt, u64>> {
    let chunks = run_chunks(m.n, d, engine, || (NormCounts::default(), Vec::new()), |rows, cols, (acc, buf)| {
        for c in 0..cols.len() {
            match m.minor_norm(rows, cols.get(c), buf) {
                Norm::Small(v) => *acc.small.entry(v).or_default() += 1,
                Norm::Big(v) => *acc.big.entry(v).or_default() += 1,
            }
        }
    })?;
    let mut out = BTreeMap::new();
    for (acc, _) in chunks {
        for (k, v) in acc.small {
            *out.entry(BigInt::from(k)).or_default() += v;
        }
        for (k, v) in acc.big {
            *out.entry(k).or_default() += v;
        }
    }
    Ok(out)
}

/// `|det|` by LU with partial pivoting.
pub(crate) fn float_abs_det(buf: &mut [Complex64], d: usize) -> f64 {
    let mut acc = 1.0;
    for k in 0..d {
        let p = (k..d).max_by(|&a, &b| buf[a * d + k].norm().total_cmp(&buf[b * d + k].norm())).expect("nonempty");
        let pivot = buf[p * d + k];
        if pivot.norm() == 0.0 {
            return 0.0;
        }
        if p != k {
            for j in 0..d {
                buf.swap(k * d + j, p * d + j);
            }
        }
        acc *= pivot.norm();
        for i in k + 1..d {
            let f = buf[i * d + k] / pivot;
            for j in k + 1..d {
                let t = f * buf[k * d + j];
                buf[i * d + j] -= t;
            }
        }
    }
    acc
}

/// A cluster of nearby float values: `(min, max, count)`.
pub(crate) type Cluster = (f64, f64, u64);

fn close(gap: f64, value: f64) -> bool {
    gap < super::FLOAT_MERGE_REL * value.max(1.0)
}

/// Chains sorted neighbours closer than the merge tolerance.
pub(crate) fn cluster_sorted(values: &[f64]) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some(last) if close(v - last.1, v) => {
                last.1 = v;
                last.2 += 1;
            }
            _ => out.push((v, v, 1)),
        }
    }
    out
}

/// Merges clusters from independent chunks; equal to clustering the union.
pub(crate) fn merge_clusters(mut parts: Vec<Cluster>) -> Vec<Cluster> {
    parts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<Cluster> = Vec::new();
    for (lo, hi, n) in parts {
        match out.last_mut() {
            Some(last) if lo <= last.1 || close(lo - last.1, lo) => {
                last.1 = last.1.max(hi);
                last.2 += n;
            }
            _ => out.push((lo, hi, n)),
        }
    }
    out
}

pub(crate) fn float_clusters(m: &Matrix<Complex64>, d: usize, engine: &Engine) -> Result<Vec<Cluster>> {
    let n = m.rows();
    let data = m.as_slice();
    let chunks = run_chunks(n, d, engine, || (Vec::new(), Vec::new()), |rows, cols, (values, buf)| {
        for c in 0..cols.len() {
            buf.clear();
            for &r in rows {
                buf.extend(cols.get(c).iter().map(|&j| data[r * n + j]));
            }
            values.push(float_abs_det(buf, d));
        }
    })?;
    let parts = chunks
        .into_iter()
        .flat_map(|(mut values, _)| {
            values.sort_by(f64::total_cmp);
            cluster_sorted(&values)
        })
        .collect();
    Ok(merge_clusters(parts))
}

/// `|det|` of the integer matrix `src` (row-major), using `buf` as scratch.
pub(crate) fn int_abs_det(src: &[Gauss<i128>], buf: &mut Vec<Gauss<i128>>, d: usize) -> BigInt {
    buf.clear();
    buf.extend_from_slice(src);
    match bareiss(buf, d, &0i128) {
        Some((a, _)) => BigInt::from(a.unsigned_abs()),
        None => {
            let mut big: Vec<Gauss<BigInt>> = src.iter().map(|&(a, b)| (BigInt::from(a), BigInt::from(b))).collect();
            let (a, _) = bareiss(&mut big, d, &<BigInt as Zero>::zero()).expect("big integers do not overflow");
            num_traits::Signed::abs(&a)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det;
    use crate::scalar::{rat, Rational};

    #[test]
    fn colex_order() {
        let s = Subsets::new(4, 2);
        let all: Vec<Vec<usize>> = (0..s.len()).map(|i| s.get(i).to_vec()).collect();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3], vec![2, 3]]);
        assert_eq!(Subsets::new(5, 0).len(), 1);
        assert_eq!(Subsets::new(12, 5).len() as u64, binomial(12, 5));
        assert_eq!(binomial(15, 7), 6435);
    }

    #[test]
    fn bareiss_matches_gaussian_elimination() {
        let d = 3u64;
        let entries: Vec<QuadExtScalar> = (0..16)
            .map(|i| QuadExtScalar::new(rat((i * 5 % 7) as i64 - 3, 2), rat((i * 3 % 5) as i64 - 2, 4), d))
            .collect();
        let m = Matrix::from_vec(4, 4, entries).unwrap();
        let scaled = ScaledMatrix::new(&m, d);
        let expected = det(&m).abs_squared();
        let mut buf = Vec::new();
        let rows = [0, 1, 2, 3];
        let Norm::Small(n) = scaled.minor_norm(&rows, &rows, &mut buf) else { panic!() };
        let l4 = Rational::from_integer(scaled.scale.pow(8));
        assert_eq!(Rational::from_integer(BigInt::from(n)) / l4, expected);
    }

    #[test]
    fn bareiss_handles_zero_pivots() {
        let mut m: Vec<Gauss<i128>> = [0, 1, 0, 1, 0, 0, 0, 0, 1].iter().map(|&a| (a, 0)).collect();
        assert_eq!(bareiss(&mut m, 3, &1).map(|z| z.0.abs()), Some(1));
        let mut s: Vec<Gauss<i128>> = [1, 2, 2, 4].iter().map(|&a| (a, 0)).collect();
        assert_eq!(bareiss(&mut s, 2, &1), Some((0, 0)));
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        let big = i128::MAX / 4;
        let src: Vec<Gauss<i128>> = vec![(big, 0), (1, 0), (1, 0), (big, 0)];
        let expected = BigInt::from(big) * BigInt::from(big) - 1;
        assert_eq!(int_abs_det(&src, &mut Vec::new(), 2), expected);
    }

    #[test]
    fn float_lu() {
        let mut m = vec![Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(0.0, 3.0), Complex64::new(1.0, 0.0)];
        assert!((float_abs_det(&mut m, 2) - 6.0).abs() < 1e-15);
    }

    #[test]
    fn clustering_is_chunk_independent() {
        let values: Vec<f64> = (0..200).map(|i| (i / 10) as f64 + (i % 10) as f64 * 1e-10).collect();
        let whole = cluster_sorted(&values);
        let mut parts = Vec::new();
        for chunk in values.chunks(7) {
            let mut c = chunk.to_vec();
            c.sort_by(f64::total_cmp);
            parts.extend(cluster_sorted(&c));
        }
        assert_eq!(merge_clusters(parts), whole);
        assert_eq!(whole.len(), 20);
        assert!(whole.iter().all(|c| c.2 == 10));
    }
}
