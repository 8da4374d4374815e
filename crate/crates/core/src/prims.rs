//! Hash-derived primitives: the PRF and the two random-oracle hashes.
//!
//! All three read from SHAKE256 under distinct domain-separation tags.
//! Residues mod p are drawn by rejection on (⌈log₂ p⌉ + 64)-bit chunks.

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::error::{Error, Result};
use crate::gadgets::BitVector;
use crate::lattice::{WordModulus, ZpVector};
use crate::wire::codec::Writer;

pub const TAG_H1: &[u8] = b"IPFEFR/H1";
pub const TAG_H2: &[u8] = b"IPFEFR/H2";
pub const TAG_PRF: &[u8] = b"IPFEFR/PRF";

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PrfKey(u64);

impl PrfKey {
    pub fn new(k: u64, p: &WordModulus) -> Result<Self> {
        if k >= p.get() {
            return Err(Error::Domain(format!("PRF key {k} not reduced mod {}", p.get())));
        }
        Ok(Self(k))
    }

    pub fn value(&self) -> u64 {
        self.0
    }
}

fn xof(tag: &[u8], parts: &[&[u8]]) -> impl XofReader {
    let mut h = Shake256::default();
    h.update(&(tag.len() as u32).to_le_bytes());
    h.update(tag);
    for part in parts {
        h.update(&(part.len() as u64).to_le_bytes());
        h.update(part);
    }
    h.finalize_xof()
}

/// Draws residues mod p from an XOF stream. Chunks of h+64 bits are
/// rejected above the largest multiple of p, so the output is exactly
/// uniform given an ideal stream and rejections occur with probability
/// below 2^-64.
fn residues(reader: &mut impl XofReader, p: &WordModulus, count: usize) -> Vec<u64> {
    let bits = p.log2_ceil() + 64;
    let bytes = bits.div_ceil(8) as usize;
    let mask: u128 = if bits >= 128 { u128::MAX } else { (1u128 << bits) - 1 };
    // accepted values [0, limit] form a whole number of residue cycles
    let limit = mask - (mask % p.get() as u128 + 1) % p.get() as u128;
    let mut out = Vec::with_capacity(count);
    let mut buf = [0u8; 16];
    while out.len() < count {
        buf.fill(0);
        reader.read(&mut buf[..bytes]);
        let v = u128::from_le_bytes(buf) & mask;
        if v <= limit {
            out.push(p.reduce_u128(v));
        }
    }
    out
}

/// PRF(k, x) ∈ Z_p^{l2}, keyed on the canonical encoding of x.
pub fn prf_eval(k: &PrfKey, x: &ZpVector, l2: usize) -> ZpVector {
    let p = *x.modulus();
    let mut w = Writer::new();
    w.mod_vector(x);
    let encoded = w.finish();
    let mut reader = xof(TAG_PRF, &[&k.0.to_le_bytes(), &encoded]);
    ZpVector::new(p, residues(&mut reader, &p, l2)).expect("reduced")
}

/// H1(identity) ∈ Z_p^{l2} \ {0}. An all-zero draw is retried with an
/// incremented counter.
pub fn h1(identity: &[u8], p: &WordModulus, l2: usize) -> ZpVector {
    for counter in 0u64.. {
        let mut reader = xof(TAG_H1, &[&counter.to_le_bytes(), identity]);
        let v = ZpVector::new(*p, residues(&mut reader, p, l2)).expect("reduced");
        if !v.is_zero() {
            return v;
        }
    }
    unreachable!("counter space exhausted")
}

/// H2(k) ∈ {0,1}^t.
pub fn h2(k: u64, p: &WordModulus, t: usize) -> BitVector {
    let k = k % p.get();
    let mut reader = xof(TAG_H2, &[&k.to_le_bytes()]);
    let mut bytes = vec![0u8; t.div_ceil(8)];
    reader.read(&mut bytes);
    let bits = (0..t).map(|i| (bytes[i / 8] >> (i % 8)) & 1).collect();
    BitVector::new(bits).expect("binary")
}
