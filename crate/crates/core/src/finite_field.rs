//! Small finite fields `GF(p)` and `GF(p²)` with their quadratic character.

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Element `c0 + c1·x`; `c1 = 0` in prime fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    coeffs: [u64; 2],
}

impl FieldElem {
    pub fn coeffs(&self) -> [u64; 2] {
        self.coeffs
    }
}

#[derive(Clone, Debug)]
pub struct PrimePowerField {
    p: u64,
    k: u32,
    /// `(b, c)` of the modulus `x² + bx + c`; unused when `k = 1`.
    modulus: (u64, u64),
    is_square: Vec<bool>,
}

/// Builds `GF(p^k)` for `k ∈ {1, 2}`. For `k = 2` the modulus is the smallest
/// monic irreducible `x² + bx + c` in `(b, c)` order.
pub fn make_field(p: u64, k: u32) -> Result<PrimePowerField> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let modulus = match k {
        1 => (0, 0),
        2 => (0..p)
            .flat_map(|b| (0..p).map(move |c| (b, c)))
            .find(|&(b, c)| (0..p).all(|t| (t * t + b * t + c) % p != 0))
            .expect("an irreducible quadratic exists over every prime field"),
        _ => return Err(Error::UnsupportedDegree(k)),
    };
    let mut field = PrimePowerField { p, k, modulus, is_square: Vec::new() };
    let mut is_square = vec![false; field.order() as usize];
    for e in field.elements() {
        is_square[field.index_of(field.mul(e, e)) as usize] = true;
    }
    field.is_square = is_square;
    Ok(field)
}

/// Field of order `q = p` or `q = p²`.
pub fn field_of_order(q: u64) -> Result<PrimePowerField> {
    if is_prime(q) {
        return make_field(q, 1);
    }
    let r = (q as f64).sqrt().round() as u64;
    if r * r == q && is_prime(r) {
        return make_field(r, 2);
    }
    Err(Error::NotPrimePower(q))
}

impl PrimePowerField {
    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.k)
    }

    /// Modulus coefficients `[c, b, 1]` (constant term first) for `k = 2`.
    pub fn modulus(&self) -> Option<[u64; 3]> {
        (self.k == 2).then_some([self.modulus.1, self.modulus.0, 1])
    }

    /// Element with index `i`, where index `c0 + c1·p` fixes the enumeration order.
    pub fn element(&self, i: u64) -> FieldElem {
        debug_assert!(i < self.order());
        FieldElem { coeffs: [i % self.p, i / self.p] }
    }

    pub fn index_of(&self, e: FieldElem) -> u64 {
        e.coeffs[0] + e.coeffs[1] * self.p
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.order()).map(|i| self.element(i))
    }

    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem { coeffs: [n.rem_euclid(self.p as i64) as u64, 0] }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { coeffs: [0, 0] }
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.p;
        FieldElem { coeffs: [(a.coeffs[0] + b.coeffs[0]) % p, (a.coeffs[1] + b.coeffs[1]) % p] }
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let p = self.p;
        FieldElem { coeffs: [(p - a.coeffs[0]) % p, (p - a.coeffs[1]) % p] }
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.p;
        let [a0, a1] = a.coeffs;
        let [b0, b1] = b.coeffs;
        let hi = a1 * b1 % p;
        let (mb, mc) = self.modulus;
        // x² = -b·x - c
        let c0 = (a0 * b0 + (p - mc) * hi) % p;
        let c1 = (a0 * b1 + a1 * b0 + (p - mb) * hi) % p;
        FieldElem { coeffs: [c0, c1] }
    }

    pub fn is_zero(&self, a: FieldElem) -> bool {
        a.coeffs == [0, 0]
    }

    /// `0` for zero, `+1` for nonzero squares, `-1` otherwise.
    pub fn quadratic_character(&self, e: FieldElem) -> i8 {
        if self.is_zero(e) {
            0
        } else if self.is_square[self.index_of(e) as usize] {
            1
        } else {
            -1
        }
    }
}
