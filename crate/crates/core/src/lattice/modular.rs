//! Residue arithmetic for the two moduli the scheme works over.
//!
//! `WordModulus` covers Z_p (p < 2^62, residues stored as `u64`, products in
//! `u128`). `WideModulus` covers Z_q with q = p^k, which for every parameter
//! set satisfying the correctness bounds exceeds 64 bits, so residues are
//! arbitrary-precision.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngCore};

use crate::error::{Error, Result};

/// Largest word modulus accepted; keeps `a*b + c` within `u128` and lets a
/// handful of products accumulate before reduction.
pub const WORD_MODULUS_MAX: u64 = 1 << 62;

/// A ring Z_M with a concrete residue representation.
pub trait Modulus: Clone + PartialEq + Eq + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Debug + Hash + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_biguint(&self, v: &BigUint) -> Self::Elem;
    fn to_biguint(&self, a: &Self::Elem) -> BigUint;
    fn is_reduced(&self, a: &Self::Elem) -> bool;
    fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    fn value(&self) -> BigUint;
    fn bits(&self) -> u64;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    /// Σ a_i·b_i. Implementations may defer reduction.
    fn dot<'a, I>(&self, pairs: I) -> Self::Elem
    where
        I: Iterator<Item = (&'a Self::Elem, &'a Self::Elem)>,
        Self::Elem: 'a,
    {
        pairs.fold(self.zero(), |acc, (a, b)| self.add(&acc, &self.mul(a, b)))
    }

    /// Signed representative in (-M/2, M/2].
    fn centered(&self, a: &Self::Elem) -> BigInt {
        let m = self.value();
        let v = self.to_biguint(a);
        if v.clone() * 2u32 > m {
            BigInt::from_biguint(Sign::Minus, m - v)
        } else {
            BigInt::from_biguint(Sign::Plus, v)
        }
    }

    /// Bytes per residue in the canonical encoding.
    fn residue_width(&self) -> usize {
        self.bits().div_ceil(8) as usize
    }
}

/// Z_p with p < 2^62.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct WordModulus {
    p: u64,
    // how many products of reduced residues fit in a u128 accumulator
    lazy_terms: u32,
}

impl WordModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || p > WORD_MODULUS_MAX {
            return Err(Error::Parameter(format!(
                "word modulus {p} outside [2, 2^62]"
            )));
        }
        let max_prod = (p as u128 - 1) * (p as u128 - 1);
        let lazy_terms = if max_prod == 0 {
            u32::MAX
        } else {
            (u128::MAX / max_prod).min(u32::MAX as u128) as u32 - 1
        };
        Ok(Self {
            p,
            lazy_terms: lazy_terms.max(1),
        })
    }

    #[inline]
    pub fn get(&self) -> u64 {
        self.p
    }

    /// ⌈log₂ p⌉.
    pub fn log2_ceil(&self) -> u32 {
        64 - (self.p - 1).leading_zeros()
    }

    #[inline]
    pub fn reduce_u128(&self, v: u128) -> u64 {
        (v % self.p as u128) as u64
    }

    #[inline]
    pub fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.p as i128) as u64
    }

    /// Multiplicative inverse, if `a` is a unit.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let (g, x, _) = egcd(a as i128 % self.p as i128, self.p as i128);
        (g == 1).then(|| x.rem_euclid(self.p as i128) as u64)
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    /// Signed representative in (-p/2, p/2].
    pub fn centered_i64(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            -((self.p - a) as i64)
        } else {
            a as i64
        }
    }
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

impl Modulus for WordModulus {
    type Elem = u64;

    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        1 % self.p
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline]
    fn from_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.p as i128) as u64
    }
    fn from_biguint(&self, v: &BigUint) -> u64 {
        (v % self.p).to_u64().expect("reduced below p")
    }
    fn to_biguint(&self, a: &u64) -> BigUint {
        BigUint::from(*a)
    }
    fn is_reduced(&self, a: &u64) -> bool {
        *a < self.p
    }
    fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.p)
    }
    fn value(&self) -> BigUint {
        BigUint::from(self.p)
    }
    fn bits(&self) -> u64 {
        64 - u64::from((self.p - 1).leading_zeros())
    }

    fn dot<'a, I>(&self, pairs: I) -> u64
    where
        I: Iterator<Item = (&'a u64, &'a u64)>,
    {
        let mut acc: u128 = 0;
        let mut pending = 0u32;
        let mut out = 0u64;
        for (a, b) in pairs {
            acc += *a as u128 * *b as u128;
            pending += 1;
            if pending == self.lazy_terms {
                out = self.add(&out, &self.reduce_u128(acc));
                acc = 0;
                pending = 0;
            }
        }
        self.add(&out, &self.reduce_u128(acc))
    }
}

/// Z_q for arbitrary-size odd or even q.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WideModulus {
    q: BigUint,
    bits: u64,
}

impl WideModulus {
    pub fn new(q: BigUint) -> Result<Self> {
        if q < BigUint::from(2u32) {
            return Err(Error::Parameter("wide modulus must be at least 2".into()));
        }
        let bits = (q.clone() - 1u32).bits();
        Ok(Self { q, bits })
    }

    pub fn get(&self) -> &BigUint {
        &self.q
    }
}

impl Modulus for WideModulus {
    type Elem = BigUint;

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one() % &self.q
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.q {
            s - &self.q
        } else {
            s
        }
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            a + &self.q - b
        }
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.q
    }
    fn neg(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            BigUint::zero()
        } else {
            &self.q - a
        }
    }
    fn from_i64(&self, v: i64) -> BigUint {
        let mag = BigUint::from(v.unsigned_abs()) % &self.q;
        if v < 0 {
            self.neg(&mag)
        } else {
            mag
        }
    }
    fn from_biguint(&self, v: &BigUint) -> BigUint {
        v % &self.q
    }
    fn to_biguint(&self, a: &BigUint) -> BigUint {
        a.clone()
    }
    fn is_reduced(&self, a: &BigUint) -> bool {
        *a < self.q
    }
    fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> BigUint {
        uniform_biguint_below(&self.q, rng)
    }
    fn value(&self) -> BigUint {
        self.q.clone()
    }
    fn bits(&self) -> u64 {
        self.bits
    }

    fn dot<'a, I>(&self, pairs: I) -> BigUint
    where
        I: Iterator<Item = (&'a BigUint, &'a BigUint)>,
    {
        // unreduced sum, one reduction at the end
        let sum: BigUint = pairs.map(|(a, b)| a * b).sum();
        sum % &self.q
    }
}

/// Uniform integer in [0, bound) by rejection on `bits(bound)`-bit draws.
pub fn uniform_biguint_below<R: RngCore + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let excess = (bytes as u64 * 8 - bits) as u32;
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill_bytes(&mut buf);
        if let Some(last) = buf.last_mut() {
            *last &= 0xffu8 >> excess;
        }
        let v = BigUint::from_bytes_le(&buf);
        if &v < bound {
            return v;
        }
    }
}

/// Deterministic Miller–Rabin, exact for all n < 2^64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let m = WordModulus {
        p: n,
        lazy_terms: 1,
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = m.pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = m.mul(&x, &x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime ≥ `n`.
pub fn next_prime(mut n: u64) -> u64 {
    if n <= 2 {
        return 2;
    }
    if n % 2 == 0 {
        n += 1;
    }
    while !is_prime_u64(n) {
        n += 2;
    }
    n
}

/// Exact integer p^k.
pub fn pow_biguint(p: u64, k: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), k as usize)
}

/// `a mod m` as a signed integer for `BigInt` inputs.
pub fn mod_floor_big(a: &BigInt, m: &BigUint) -> BigUint {
    let m = BigInt::from(m.clone());
    a.mod_floor(&m).to_biguint().expect("non-negative after mod_floor")
}
