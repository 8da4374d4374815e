//! Binary decomposition gadgets, signed packing and rounding decoders.
//!
//! Layout is coordinate-major and little-endian throughout: the h bits (or
//! powers of two) belonging to coordinate j occupy positions `j*h .. j*h+h`,
//! lowest power first. With this layout
//! `⟨BitD(x), PowerT(y)⟩ = ⟨x, y⟩ mod p` and
//! `BitD(cᵀ) · power_two_matrix(Z) = cᵀ · Z mod p` hold entrywise.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{IntMatrix, IntVector, Modulus, WordModulus, ZpMatrix, ZpVector};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct BitVector(Vec<u8>);

impl BitVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Domain("bit vector entries must be 0 or 1".into()));
        }
        Ok(Self(bits))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "xor of {} and {} bits",
                self.len(),
                other.len()
            )));
        }
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect()))
    }

    /// Packs 8 bits per byte, little-endian within each byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0
            .chunks(8)
            .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b << i)))
            .collect()
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Format(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        let bits: Vec<u8> = (0..len).map(|i| (bytes[i / 8] >> (i % 8)) & 1).collect();
        let padding = bytes.len() * 8 - len;
        if padding > 0 && bytes[bytes.len() - 1] >> (8 - padding) != 0 {
            return Err(Error::Format("nonzero padding bits".into()));
        }
        Ok(Self(bits))
    }
}

/// h = ⌈log₂ p⌉, the number of bits per residue.
pub fn gadget_width(p: &WordModulus) -> usize {
    p.log2_ceil() as usize
}

/// BitD_p: each residue expanded into h little-endian bits.
pub fn bit_decompose(x: &ZpVector) -> BitVector {
    let h = gadget_width(x.modulus());
    let mut bits = Vec::with_capacity(x.len() * h);
    for &v in x.entries() {
        for i in 0..h {
            bits.push(((v >> i) & 1) as u8);
        }
    }
    BitVector(bits)
}

/// Inverse of [`bit_decompose`]: Σ 2^i·b_i mod p per coordinate.
pub fn recompose(bits: &BitVector, p: WordModulus) -> Result<ZpVector> {
    let h = gadget_width(&p);
    if bits.len() % h != 0 {
        return Err(Error::Dimension(format!(
            "{} bits is not a multiple of {h}",
            bits.len()
        )));
    }
    let entries = bits
        .bits()
        .chunks(h)
        .map(|c| {
            let v = c
                .iter()
                .enumerate()
                .fold(0u128, |acc, (i, &b)| acc | ((b as u128) << i));
            p.reduce_u128(v)
        })
        .collect();
    ZpVector::new(p, entries)
}

/// PowerT_p: (y_j, 2y_j, …, 2^{h−1}y_j) for each coordinate j.
pub fn power_two(y: &ZpVector) -> ZpVector {
    let p = *y.modulus();
    let h = gadget_width(&p);
    let mut out = Vec::with_capacity(y.len() * h);
    for &v in y.entries() {
        let mut cur = v;
        for _ in 0..h {
            out.push(cur);
            cur = p.add(&cur, &cur);
        }
    }
    ZpVector::new(p, out).expect("reduced")
}

/// PowerT_p applied to each column of a signed matrix: row `j*h + i` is
/// `2^i · z_j mod p`.
pub fn power_two_matrix(z: &IntMatrix, p: WordModulus) -> ZpMatrix {
    let h = gadget_width(&p);
    let l = z.cols();
    let mut data = Vec::with_capacity(z.rows() * h * l);
    for j in 0..z.rows() {
        let mut row: Vec<u64> = z.row(j).iter().map(|&v| p.from_i64(v)).collect();
        for _ in 0..h {
            data.extend_from_slice(&row);
            for v in row.iter_mut() {
                *v = p.add(v, v);
            }
        }
    }
    ZpMatrix::new(p, z.rows() * h, l, data).expect("reduced")
}

/// `BitD(c)ᵀ · M` where `M` has `len(c)·h` rows, skipping zero bits.
pub fn bitd_mul(c: &ZpVector, mat: &ZpMatrix) -> Result<ZpVector> {
    let h = gadget_width(c.modulus());
    if mat.rows() != c.len() * h {
        return Err(Error::Dimension(format!(
            "BitD of length {} against {} rows",
            c.len() * h,
            mat.rows()
        )));
    }
    bitd_mul_top(c, mat)
}

/// Like [`bitd_mul`] but only reads the first `len(c)·h` rows of `mat`.
pub fn bitd_mul_top(c: &ZpVector, mat: &ZpMatrix) -> Result<ZpVector> {
    let p = *c.modulus();
    let h = gadget_width(&p);
    if mat.rows() < c.len() * h {
        return Err(Error::Dimension(format!(
            "BitD of length {} against {} rows",
            c.len() * h,
            mat.rows()
        )));
    }
    if *mat.modulus() != p {
        return Err(Error::ModulusMismatch("bitd_mul".into()));
    }
    // Sum at most `cap` rows of reduced residues in u128 before reducing.
    let cap = (u128::MAX / p.get() as u128).min(1 << 20) as usize;
    let cols = mat.cols();
    let mut acc = vec![0u128; cols];
    let mut pending = 0usize;
    for (j, &v) in c.entries().iter().enumerate() {
        for i in 0..h {
            if (v >> i) & 1 == 0 {
                continue;
            }
            for (a, &x) in acc.iter_mut().zip(mat.row(j * h + i)) {
                *a += x as u128;
            }
            pending += 1;
            if pending == cap {
                for a in acc.iter_mut() {
                    *a %= p.get() as u128;
                }
                pending = 0;
            }
        }
    }
    let out = acc.into_iter().map(|a| p.reduce_u128(a)).collect();
    ZpVector::new(p, out)
}

/// Entry width for [`pack_signed`]: ⌈log₂(2B)⌉.
pub fn pack_width(bound: u64) -> usize {
    let two_b = 2 * bound as u128;
    (128 - (two_b - 1).leading_zeros()) as usize
}

/// Offset-binary encoding: each entry v becomes `v + B` in w little-endian
/// bits. Requires |v| < B.
pub fn pack_signed(v: &IntVector, bound: u64) -> Result<BitVector> {
    if bound == 0 {
        return Err(Error::Encoding("pack bound must be positive".into()));
    }
    let w = pack_width(bound);
    let mut bits = Vec::with_capacity(v.len() * w);
    for &x in v.as_slice() {
        if x.unsigned_abs() >= bound {
            return Err(Error::Encoding(format!("entry {x} outside (-{bound}, {bound})")));
        }
        let off = (x as i128 + bound as i128) as u128;
        for i in 0..w {
            bits.push(((off >> i) & 1) as u8);
        }
    }
    Ok(BitVector(bits))
}

pub fn unpack_signed(bits: &BitVector, bound: u64) -> Result<IntVector> {
    let w = pack_width(bound);
    if bits.len() % w != 0 {
        return Err(Error::Encoding(format!(
            "{} bits is not a multiple of width {w}",
            bits.len()
        )));
    }
    bits.bits()
        .chunks(w)
        .map(|c| {
            let off = c
                .iter()
                .enumerate()
                .fold(0u128, |acc, (i, &b)| acc | ((b as u128) << i));
            let v = off as i128 - bound as i128;
            if v.unsigned_abs() >= bound as u128 {
                Err(Error::Encoding(format!("decoded entry {v} out of bound")))
            } else {
                Ok(v as i64)
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(IntVector::new)
}

fn circular_distance(a: &BigUint, b: &BigUint, modulus: &BigUint) -> BigUint {
    let d = if a >= b { a - b } else { b - a };
    let wrap = modulus - &d;
    d.min(wrap)
}

/// The μ ∈ [0, K) minimising the circular distance between `step·μ` and
/// `v` modulo `modulus`; ties go to the smaller μ.
pub fn decode_round(v: &BigUint, modulus: &BigUint, step: &BigUint, k: u64) -> Result<u64> {
    if step.is_zero() || k == 0 {
        return Err(Error::Parameter("decode step and range must be positive".into()));
    }
    if step * k > *modulus {
        return Err(Error::Parameter("step·K exceeds the modulus".into()));
    }
    let v = v % modulus;
    let q = (&v / step).to_u64().unwrap_or(u64::MAX);
    let mut candidates = vec![0, k - 1];
    if q < k {
        candidates.push(q);
    }
    if q.saturating_add(1) < k {
        candidates.push(q + 1);
    }
    candidates.sort_unstable();
    candidates.dedup();
    let mut best = candidates[0];
    let mut best_d = circular_distance(&(step * best), &v, modulus);
    for &c in &candidates[1..] {
        let d = circular_distance(&(step * c), &v, modulus);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    Ok(best)
}

/// Word-sized convenience wrapper around [`decode_round`].
pub fn decode_round_u64(v: u64, modulus: u64, step: u64, k: u64) -> Result<u64> {
    decode_round(
        &BigUint::from(v),
        &BigUint::from(modulus),
        &BigUint::from(step),
        k,
    )
}
