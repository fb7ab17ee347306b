//! Sampled and exhaustive `|det|` censuses of real Hadamard submatrices.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rand::seq::index;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{minor_spectrum, minors, Engine};
use crate::chm::ComplexHadamardMatrix;
use crate::designs::RealHadamard;
use crate::error::{Error, Result};

/// Samples per generator stream. Block `b` draws from stream `b` of the
/// seeded generator, so the census does not depend on the worker count.
pub const SAMPLE_BLOCK: u64 = 1024;

/// Largest minor size whose `|det|` is guaranteed to fit a `u64` key.
const MAX_D: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub d: usize,
    /// `None` for an exhaustive census.
    pub seed: Option<u64>,
    pub count: u64,
    /// `|det| ↦ number of samples`.
    pub histogram: BTreeMap<u64, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KlmsReport {
    pub unit: u64,
    /// Every observed value is a multiple of `unit`.
    pub all_multiples: bool,
    /// `k ↦ count` for values `k·unit`.
    pub multiples: BTreeMap<u64, u64>,
    /// Observed `k ∈ {28, 29, 30, 31}`.
    pub forbidden_hits: Vec<u64>,
}

/// `2⁷·n^{n/2−8}`, the conjectured step of `(n−8)`-minors of an order-`n`
/// real Hadamard matrix.
pub fn klms_unit(n: usize) -> Option<u64> {
    if n < 16 || !n.is_multiple_of(4) {
        return None;
    }
    (n as u64).checked_pow((n / 2 - 8) as u32)?.checked_mul(128)
}

impl Census {
    pub fn klms_report(&self, unit: u64) -> KlmsReport {
        let mut multiples = BTreeMap::new();
        let mut all_multiples = true;
        for (&v, &c) in &self.histogram {
            if v % unit == 0 {
                *multiples.entry(v / unit).or_default() += c;
            } else {
                all_multiples = false;
            }
        }
        let forbidden_hits = (28..=31).filter(|k| multiples.contains_key(k)).collect();
        KlmsReport { unit, all_multiples, multiples, forbidden_hits }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

fn check_size(n: usize, d: usize) -> Result<()> {
    if d == 0 || d > n || d > MAX_D {
        return Err(Error::Dimension(format!("census needs 1 ≤ d ≤ min({n}, {MAX_D}), got {d}")));
    }
    Ok(())
}

/// `count` uniformly random (row subset, column subset) pairs of size `d`.
pub fn sample_minor_census(h: &RealHadamard, d: usize, count: u64, seed: u64, engine: &Engine) -> Result<Census> {
    let n = h.order();
    check_size(n, d)?;
    if count == 0 {
        return Err(Error::Dimension("census needs count ≥ 1".into()));
    }
    let entries: Vec<(i128, i128)> = h.entries().as_slice().iter().map(|&e| (i128::from(e), 0)).collect();
    let blocks = count.div_ceil(SAMPLE_BLOCK);
    let parts: Vec<BTreeMap<u64, u64>> = engine.pool().install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(b);
                let mut hist = BTreeMap::new();
                let (mut src, mut buf) = (Vec::with_capacity(d * d), Vec::with_capacity(d * d));
                for _ in b * SAMPLE_BLOCK..((b + 1) * SAMPLE_BLOCK).min(count) {
                    let mut rows = index::sample(&mut rng, n, d).into_vec();
                    let mut cols = index::sample(&mut rng, n, d).into_vec();
                    rows.sort_unstable();
                    cols.sort_unstable();
                    src.clear();
                    for &r in &rows {
                        src.extend(cols.iter().map(|&c| entries[r * n + c]));
                    }
                    let v = minors::int_abs_det(&src, &mut buf, d).to_u64().expect("bounded by MAX_D");
                    *hist.entry(v).or_default() += 1;
                }
                hist
            })
            .collect()
    });
    let mut histogram = BTreeMap::new();
    for part in parts {
        for (k, v) in part {
            *histogram.entry(k).or_default() += v;
        }
    }
    Ok(Census { d, seed: Some(seed), count, histogram })
}

/// Every `d×d` minor.
pub fn exhaustive_minor_census(h: &RealHadamard, d: usize, engine: &Engine) -> Result<Census> {
    check_size(h.order(), d)?;
    let spectrum = minor_spectrum(&ComplexHadamardMatrix::from_real(h), d, engine)?;
    let mut histogram = BTreeMap::new();
    for (v, m) in spectrum.exact_pairs().expect("real matrices are exact") {
        let sq = v.to_integer();
        let root = sq.sqrt();
        debug_assert!(&root * &root == sq && v.is_integer());
        histogram.insert(root.to_u64().expect("bounded by MAX_D"), *m);
    }
    Ok(Census { d, seed: None, count: spectrum.total(), histogram })
}
