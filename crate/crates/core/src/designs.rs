//! Incidence structures: symmetric 2-designs, conference matrices and real
//! Hadamard matrices, with the Paley and Sylvester constructions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_field::field_of_order;
use crate::matrix::Matrix;

/// Symmetric 2-(v, k, λ) design given by its incidence matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDesign {
    pub v: usize,
    pub k: usize,
    pub lambda: usize,
    pub incidence: Matrix<u8>,
}

impl BlockDesign {
    /// `n = k − λ`.
    pub fn order(&self) -> usize {
        self.k - self.lambda
    }

    /// `4n − 1 ≤ v`, which every symmetric design satisfies.
    pub fn satisfies_order_bound(&self) -> bool {
        4 * self.order() - 1 <= self.v
    }

    pub fn params(&self) -> (usize, usize, usize) {
        (self.v, self.k, self.lambda)
    }
}

fn not_a_design(reason: impl Into<String>, witness: Vec<usize>) -> Error {
    Error::NotADesign { reason: reason.into(), witness }
}

/// Checks `B·Bᵀ = (k−λ)I + λJ` with constant row and column sums and
/// `λ < k < v`. The first violated condition is reported with witness indices.
pub fn verify_2design(incidence: &Matrix<u8>) -> Result<BlockDesign> {
    if !incidence.is_square() || incidence.rows() == 0 {
        return Err(not_a_design("incidence matrix must be square and nonempty", vec![]));
    }
    let v = incidence.rows();
    for i in 0..v {
        for j in 0..v {
            if incidence[(i, j)] > 1 {
                return Err(not_a_design("entries must be 0 or 1", vec![i, j]));
            }
        }
    }
    let row_sum = |i: usize| incidence.row(i).iter().map(|&b| usize::from(b)).sum::<usize>();
    let k = row_sum(0);
    if let Some(i) = (1..v).find(|&i| row_sum(i) != k) {
        return Err(not_a_design("row sums differ", vec![0, i]));
    }
    let col_sum = |j: usize| (0..v).map(|i| usize::from(incidence[(i, j)])).sum::<usize>();
    if let Some(j) = (0..v).find(|&j| col_sum(j) != k) {
        return Err(not_a_design("column sum differs from row sum", vec![j]));
    }
    if k == 0 || k >= v {
        return Err(not_a_design(format!("requires λ < k < v, got k = {k}, v = {v}"), vec![]));
    }
    let common = |i: usize, j: usize| {
        incidence.row(i).iter().zip(incidence.row(j)).filter(|(a, b)| **a == 1 && **b == 1).count()
    };
    let lambda = common(0, 1);
    for i in 0..v {
        for j in i + 1..v {
            if common(i, j) != lambda {
                return Err(not_a_design(
                    format!("rows {i} and {j} meet in {} points, expected λ = {lambda}", common(i, j)),
                    vec![i, j],
                ));
            }
        }
    }
    if lambda >= k {
        return Err(not_a_design(format!("requires λ < k, got λ = {lambda}, k = {k}"), vec![]));
    }
    debug_assert_eq!(lambda * (v - 1), k * (k - 1));
    Ok(BlockDesign { v, k, lambda, incidence: incidence.clone() })
}

/// Real ±1 matrix with `H·Hᵀ = n·I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealHadamard {
    entries: Matrix<i8>,
}

fn gram_is_scalar(m: &Matrix<i8>, scale: i64) -> Option<(usize, usize)> {
    let n = m.rows();
    for i in 0..n {
        for j in i..n {
            let ip: i64 = m.row(i).iter().zip(m.row(j)).map(|(a, b)| i64::from(*a) * i64::from(*b)).sum();
            let expected = if i == j { scale } else { 0 };
            if ip != expected {
                return Some((i, j));
            }
        }
    }
    None
}

impl RealHadamard {
    pub fn new(entries: Matrix<i8>) -> Result<Self> {
        if !entries.is_square() || entries.rows() == 0 {
            return Err(Error::NotHadamard("matrix must be square and nonempty".into()));
        }
        if entries.as_slice().iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::NotHadamard("entries must be ±1".into()));
        }
        if let Some((i, j)) = gram_is_scalar(&entries, entries.rows() as i64) {
            return Err(Error::NotHadamard(format!("rows {i} and {j} violate H·Hᵀ = nI")));
        }
        Ok(Self { entries })
    }

    pub fn order(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &Matrix<i8> {
        &self.entries
    }

    pub fn is_normalized(&self) -> bool {
        let n = self.order();
        (0..n).all(|i| self.entries[(0, i)] == 1 && self.entries[(i, 0)] == 1)
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries.is_symmetric()
    }

    /// Negates columns, then rows, so that the first row and column are all +1.
    pub fn normalized(&self) -> Self {
        let m = &self.entries;
        let n = m.rows();
        let col_sign: Vec<i8> = (0..n).map(|j| m[(0, j)]).collect();
        let row_sign: Vec<i8> = (0..n).map(|i| m[(i, 0)] * col_sign[0]).collect();
        Self { entries: Matrix::from_fn(n, n, |i, j| m[(i, j)] * col_sign[j] * row_sign[i]) }
    }
}

/// Sylvester matrix of order `2^t`: entry `(i, j) = (−1)^popcount(i & j)`.
pub fn sylvester_hadamard(t: u32) -> RealHadamard {
    let n = 1usize << t;
    let entries = Matrix::from_fn(n, n, |i, j| if (i & j).count_ones() % 2 == 0 { 1 } else { -1 });
    RealHadamard { entries }
}

/// Deletes the first row and column of a normalized Hadamard matrix of order
/// `4m` and reads `+1` as incidence, giving a 2-(4m−1, 2m−1, m−1) design.
pub fn hadamard_core_design(h: &RealHadamard) -> Result<BlockDesign> {
    if !h.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let n = h.order();
    if n < 4 {
        return Err(Error::BadOrder { order: n, reason: "core designs need order 4m ≥ 4".into() });
    }
    let m = h.entries();
    verify_2design(&Matrix::from_fn(n - 1, n - 1, |i, j| u8::from(m[(i + 1, j + 1)] == 1)))
}

/// Circulant 2-(q, (q−1)/2, (q−3)/4) design from the quadratic residues of `GF(q)`.
pub fn paley_design(q: u64) -> Result<BlockDesign> {
    if q % 4 != 3 {
        return Err(Error::BadResidueClass { q, expected: 3 });
    }
    let f = field_of_order(q)?;
    let elems: Vec<_> = f.elements().collect();
    let n = elems.len();
    let incidence =
        Matrix::from_fn(n, n, |a, b| u8::from(f.quadratic_character(f.sub(elems[b], elems[a])) == 1));
    verify_2design(&incidence)
}

/// Zero diagonal, ±1 elsewhere, `C·Cᵀ = (n−1)I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConferenceMatrixReal {
    entries: Matrix<i8>,
}

impl ConferenceMatrixReal {
    pub fn new(entries: Matrix<i8>) -> Result<Self> {
        if !entries.is_square() || entries.rows() < 2 {
            return Err(Error::NotConference("matrix must be square of order ≥ 2".into()));
        }
        let n = entries.rows();
        for i in 0..n {
            for j in 0..n {
                let e = entries[(i, j)];
                let ok = if i == j { e == 0 } else { e == 1 || e == -1 };
                if !ok {
                    return Err(Error::NotConference(format!("bad entry {e} at ({i}, {j})")));
                }
            }
        }
        if let Some((i, j)) = gram_is_scalar(&entries, n as i64 - 1) {
            return Err(Error::NotConference(format!("rows {i} and {j} violate C·Cᵀ = (n−1)I")));
        }
        Ok(Self { entries })
    }

    pub fn order(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &Matrix<i8> {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries.is_symmetric()
    }

    /// Nonzero entries of the first row and column are all +1.
    pub fn is_normalized(&self) -> bool {
        let n = self.order();
        (1..n).all(|i| self.entries[(0, i)] == 1 && self.entries[(i, 0)] == 1)
    }
}

/// Renormalizes a conference matrix: negate every column whose first-row entry
/// is −1, then every row whose first-column entry is −1. Symmetric inputs stay
/// symmetric since the same index set is flipped on both sides.
pub fn normalize_conference(c: &ConferenceMatrixReal) -> ConferenceMatrixReal {
    let m = c.entries();
    let n = m.rows();
    // column 0 and row 0 are never flipped, so each pass leaves the other intact
    let col_sign: Vec<i8> = (0..n).map(|j| if j == 0 { 1 } else { m[(0, j)] }).collect();
    let row_sign: Vec<i8> = (0..n).map(|i| if i == 0 { 1 } else { m[(i, 0)] }).collect();
    ConferenceMatrixReal {
        entries: Matrix::from_fn(n, n, |i, j| m[(i, j)] * row_sign[i] * col_sign[j]),
    }
}

/// Symmetric normalized conference matrix of order `q + 1` obtained by
/// bordering the Jacobsthal matrix `Q_ab = χ(a − b)` of `GF(q)`.
pub fn paley_conference(q: u64) -> Result<ConferenceMatrixReal> {
    if q % 4 != 1 {
        return Err(Error::BadResidueClass { q, expected: 1 });
    }
    let f = field_of_order(q)?;
    let elems: Vec<_> = f.elements().collect();
    let n = elems.len() + 1;
    let entries = Matrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => 0,
        (0, _) | (_, 0) => 1,
        _ => f.quadratic_character(f.sub(elems[i - 1], elems[j - 1])),
    });
    ConferenceMatrixReal::new(entries)
}

/// Paley type I Hadamard matrix of order `q + 1` for `q ≡ 3 (mod 4)`, normalized.
pub fn paley_hadamard_i(q: u64) -> Result<RealHadamard> {
    if q % 4 != 3 {
        return Err(Error::BadResidueClass { q, expected: 3 });
    }
    let f = field_of_order(q)?;
    let elems: Vec<_> = f.elements().collect();
    let n = elems.len() + 1;
    // H = I + S with S the skew conference matrix [[0, 1ᵀ], [−1, Q]]
    let entries = Matrix::from_fn(n, n, |i, j| match (i, j) {
        _ if i == j => 1,
        (0, _) => 1,
        (_, 0) => -1,
        _ => f.quadratic_character(f.sub(elems[i - 1], elems[j - 1])),
    });
    Ok(RealHadamard::new(entries)?.normalized())
}

/// Paley type II Hadamard matrix of order `2(q + 1)` for `q ≡ 1 (mod 4)`; symmetric.
pub fn paley_hadamard_ii(q: u64) -> Result<RealHadamard> {
    let c = paley_conference(q)?;
    let m = c.entries();
    let n = m.rows();
    const SIGN: [[i8; 2]; 2] = [[1, 1], [1, -1]];
    const DIAG: [[i8; 2]; 2] = [[1, -1], [-1, -1]];
    let entries = Matrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj, si, sj) = (i / 2, j / 2, i % 2, j % 2);
        if bi == bj {
            DIAG[si][sj]
        } else {
            m[(bi, bj)] * SIGN[si][sj]
        }
    });
    RealHadamard::new(entries)
}

/// `{"order": n, "rows": [[...], ...]}` for 0/1 and ±1/0 matrices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntMatrixJson {
    pub order: usize,
    pub rows: Vec<Vec<i8>>,
}

impl IntMatrixJson {
    pub fn from_matrix<T: Copy + Into<i16>>(m: &Matrix<T>) -> Self {
        let rows = m.iter_rows().map(|r| r.iter().map(|&e| e.into() as i8).collect()).collect();
        Self { order: m.rows(), rows }
    }

    pub fn to_matrix(&self) -> Result<Matrix<i8>> {
        let m = Matrix::from_rows(self.rows.clone())?;
        if m.rows() != self.order || !m.is_square() {
            return Err(Error::Dimension(format!("expected a square matrix of order {}", self.order)));
        }
        Ok(m)
    }

    pub fn to_incidence(&self) -> Result<Matrix<u8>> {
        let m = self.to_matrix()?;
        if m.as_slice().iter().any(|&e| e != 0 && e != 1) {
            return Err(Error::Parse("incidence entries must be 0 or 1".into()));
        }
        Ok(m.map(|&e| e as u8))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::is_circulant;

    fn fano() -> Matrix<u8> {
        let first = [0u8, 1, 1, 0, 1, 0, 0];
        Matrix::from_fn(7, 7, |i, j| first[(j + 7 - i) % 7])
    }

    #[test]
    fn fano_plane_verifies() {
        let b = fano();
        // oracle: B·Bᵀ = 2I + J by direct multiplication
        for i in 0..7 {
            for j in 0..7 {
                let s: u32 = (0..7).map(|t| u32::from(b[(i, t)] * b[(j, t)])).sum();
                assert_eq!(s, if i == j { 3 } else { 1 });
            }
        }
        let d = verify_2design(&b).unwrap();
        assert_eq!(d.params(), (7, 3, 1));
        assert_eq!(d.order(), 2);
    }

    #[test]
    fn degenerate_matrices_rejected() {
        let ones = Matrix::from_fn(5, 5, |_, _| 1u8);
        assert!(matches!(verify_2design(&ones), Err(Error::NotADesign { .. })));
        let id1 = Matrix::from_fn(1, 1, |_, _| 1u8);
        assert!(matches!(verify_2design(&id1), Err(Error::NotADesign { .. })));
        let zeros = Matrix::from_fn(4, 4, |_, _| 0u8);
        assert!(verify_2design(&zeros).is_err());
    }

    #[test]
    fn identity_is_the_lambda_zero_design() {
        // λ = 0 < k = 1 < v: the same structure as the order-3 Hadamard design
        let id = Matrix::from_fn(4, 4, |i, j| u8::from(i == j));
        assert_eq!(verify_2design(&id).unwrap().params(), (4, 1, 0));
    }

    #[test]
    fn failure_reports_witness() {
        let mut b = fano();
        b[(3, 0)] = 1 - b[(3, 0)];
        match verify_2design(&b) {
            Err(Error::NotADesign { witness, .. }) => assert_eq!(witness, vec![0, 3]),
            other => panic!("unexpected {other:?}"),
        }
        let mut b = fano();
        b[(0, 0)] = 2;
        assert!(matches!(verify_2design(&b), Err(Error::NotADesign { witness, .. }) if witness == vec![0, 0]));
    }

    #[test]
    fn paley_designs() {
        let d7 = paley_design(7).unwrap();
        assert_eq!(d7.params(), (7, 3, 1));
        assert!(is_circulant(&d7.incidence));
        assert_eq!(d7.incidence, fano());
        let d11 = paley_design(11).unwrap();
        assert_eq!(d11.params(), (11, 5, 2));
        assert!(is_circulant(&d11.incidence));
        assert!(matches!(paley_design(13), Err(Error::BadResidueClass { q: 13, .. })));
        for q in [3u64, 7, 11, 19, 23, 31, 43] {
            let d = paley_design(q).unwrap();
            let q = q as usize;
            assert_eq!(d.params(), (q, (q - 1) / 2, (q - 3) / 4));
            assert!(d.satisfies_order_bound());
        }
    }

    #[test]
    fn sylvester_matrices() {
        let h2 = sylvester_hadamard(1);
        assert_eq!(h2.entries().to_rows(), vec![vec![1, 1], vec![1, -1]]);
        for t in 1..=5 {
            let h = sylvester_hadamard(t);
            assert!(RealHadamard::new(h.entries().clone()).is_ok());
            assert!(h.is_symmetric() && h.is_normalized());
        }
    }

    #[test]
    fn sylvester_core_designs() {
        for t in 3..=5u32 {
            let d = hadamard_core_design(&sylvester_hadamard(t)).unwrap();
            let n = 1usize << t;
            assert_eq!(d.params(), (n - 1, n / 2 - 1, n / 4 - 1));
            assert!(d.satisfies_order_bound());
        }
        assert_eq!(hadamard_core_design(&sylvester_hadamard(2)).unwrap().params(), (3, 1, 0));
        let mut m = sylvester_hadamard(3).entries().clone();
        for j in 0..8 {
            m[(1, j)] = -m[(1, j)];
        }
        let h = RealHadamard::new(m).unwrap();
        assert!(matches!(hadamard_core_design(&h), Err(Error::NotNormalized)));
        assert!(hadamard_core_design(&h.normalized()).is_ok());
    }

    #[test]
    fn paley_conference_matrices() {
        for q in [5u64, 9, 13, 17, 25, 29] {
            let c = paley_conference(q).unwrap();
            assert_eq!(c.order() as u64, q + 1);
            assert!(c.is_symmetric() && c.is_normalized());
            let m = c.entries();
            let n = m.rows();
            for i in 0..n {
                for j in 0..n {
                    let ip: i64 = (0..n).map(|t| i64::from(m[(i, t)] * m[(j, t)])).sum();
                    assert_eq!(ip, if i == j { q as i64 } else { 0 });
                }
            }
        }
        assert!(matches!(paley_conference(7), Err(Error::BadResidueClass { q: 7, .. })));
        assert!(is_circulant(&paley_conference(13).unwrap().entries().select(
            &(1..14).collect::<Vec<_>>(),
            &(1..14).collect::<Vec<_>>()
        )));
    }

    #[test]
    fn conference_renormalization() {
        let c = paley_conference(9).unwrap();
        let flips = [1usize, 4, 7];
        let m = Matrix::from_fn(10, 10, |i, j| {
            let s = |k: usize| if flips.contains(&k) { -1i8 } else { 1 };
            c.entries()[(i, j)] * s(i) * s(j)
        });
        let scrambled = ConferenceMatrixReal::new(m).unwrap();
        assert!(!scrambled.is_normalized());
        let fixed = normalize_conference(&scrambled);
        assert!(fixed.is_normalized() && fixed.is_symmetric());
        assert_eq!(fixed, c);
    }

    #[test]
    fn paley_hadamard_families() {
        for q in [3u64, 7, 11, 19] {
            let h = paley_hadamard_i(q).unwrap();
            assert_eq!(h.order() as u64, q + 1);
            assert!(h.is_normalized());
        }
        let h12 = paley_hadamard_ii(5).unwrap();
        assert_eq!(h12.order(), 12);
        assert!(h12.is_symmetric());
    }

    #[test]
    fn json_shape() {
        let j = IntMatrixJson::from_matrix(&fano());
        let s = serde_json::to_string(&j).unwrap();
        assert!(s.starts_with(r#"{"order":7,"rows":[[0,1,1,0,1,0,0],"#));
        let back: IntMatrixJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_incidence().unwrap(), fano());
    }
}
