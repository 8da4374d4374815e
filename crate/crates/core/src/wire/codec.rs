//! Low-level canonical byte encoding.
//!
//! Integers are little-endian. Residues are fixed width
//! (⌈⌈log₂ M⌉/8⌉ bytes). Moduli are written as a length-prefixed minimal
//! little-endian byte string. Signed integers are zig-zag mapped then
//! LEB128 encoded with no redundant trailing groups. Every decoder rejects
//! non-canonical input, so `encode(decode(b)) == b` whenever decoding
//! succeeds.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::gadgets::BitVector;
use crate::lattice::{IntMatrix, IntVector, ModMatrix, ModVector, Modulus, WideModulus, WordModulus};

/// Ring types that can be reconstructed from their encoded modulus.
pub trait WireModulus: Modulus + Sized {
    fn from_value(v: &BigUint) -> Result<Self>;
}

impl WireModulus for WordModulus {
    fn from_value(v: &BigUint) -> Result<Self> {
        let p = u64::try_from(v).map_err(|_| Error::Format("word modulus too large".into()))?;
        WordModulus::new(p).map_err(|e| Error::Format(e.to_string()))
    }
}

impl WireModulus for WideModulus {
    fn from_value(v: &BigUint) -> Result<Self> {
        WideModulus::new(v.clone()).map_err(|e| Error::Format(e.to_string()))
    }
}

fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

fn unzigzag(u: u64) -> i64 {
    ((u >> 1) as i64) ^ -((u & 1) as i64)
}

#[derive(Default, Debug)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn f64(&mut self, v: f64) -> &mut Self {
        self.u64(v.to_bits())
    }

    pub fn raw(&mut self, bytes: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(bytes);
        self
    }

    pub fn bytes(&mut self, bytes: &[u8]) -> &mut Self {
        self.u32(len32(bytes.len())).raw(bytes)
    }

    pub fn biguint(&mut self, v: &BigUint) -> &mut Self {
        let b = if v == &BigUint::default() {
            Vec::new()
        } else {
            v.to_bytes_le()
        };
        self.bytes(&b)
    }

    pub fn varint(&mut self, mut v: u64) -> &mut Self {
        loop {
            let byte = (v & 0x7f) as u8;
            v >>= 7;
            if v == 0 {
                self.buf.push(byte);
                return self;
            }
            self.buf.push(byte | 0x80);
        }
    }

    pub fn signed(&mut self, v: i64) -> &mut Self {
        self.varint(zigzag(v))
    }

    fn residue<M: Modulus>(&mut self, m: &M, width: usize, e: &M::Elem) {
        let mut b = m.to_biguint(e).to_bytes_le();
        b.resize(width, 0);
        self.buf.extend_from_slice(&b);
    }

    pub fn mod_vector<M: Modulus>(&mut self, v: &ModVector<M>) -> &mut Self {
        let m = v.modulus();
        self.biguint(&m.value()).u32(len32(v.len()));
        let w = m.residue_width();
        for e in v.entries() {
            self.residue(m, w, e);
        }
        self
    }

    pub fn mod_matrix<M: Modulus>(&mut self, a: &ModMatrix<M>) -> &mut Self {
        let m = a.modulus();
        self.u32(len32(a.rows()))
            .u32(len32(a.cols()))
            .biguint(&m.value());
        let w = m.residue_width();
        for e in a.data() {
            self.residue(m, w, e);
        }
        self
    }

    pub fn int_vector(&mut self, v: &IntVector) -> &mut Self {
        self.u32(len32(v.len()));
        for &x in v.as_slice() {
            self.signed(x);
        }
        self
    }

    pub fn int_matrix(&mut self, z: &IntMatrix) -> &mut Self {
        self.u32(len32(z.rows())).u32(len32(z.cols()));
        for &x in z.data() {
            self.signed(x);
        }
        self
    }

    pub fn bits(&mut self, b: &BitVector) -> &mut Self {
        self.u32(len32(b.len())).raw(&b.to_bytes())
    }
}

fn len32(n: usize) -> u32 {
    u32::try_from(n).expect("length fits in u32")
}

#[derive(Debug)]
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn truncated() -> Error {
    Error::Format("truncated input".into())
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn finish(&self) -> Result<()> {
        if self.remaining() == 0 {
            Ok(())
        } else {
            Err(Error::Format(format!("{} trailing bytes", self.remaining())))
        }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(truncated());
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    pub fn bytes(&mut self) -> Result<&'a [u8]> {
        let n = self.u32()? as usize;
        self.take(n)
    }

    pub fn biguint(&mut self) -> Result<BigUint> {
        let b = self.bytes()?;
        if b.last() == Some(&0) {
            return Err(Error::Format("non-minimal integer encoding".into()));
        }
        Ok(BigUint::from_bytes_le(b))
    }

    pub fn varint(&mut self) -> Result<u64> {
        let mut v: u64 = 0;
        for i in 0..10 {
            let byte = self.u8()?;
            let chunk = (byte & 0x7f) as u64;
            if i == 9 && chunk > 1 {
                return Err(Error::Format("varint overflow".into()));
            }
            v |= chunk << (7 * i);
            if byte & 0x80 == 0 {
                if i > 0 && byte == 0 {
                    return Err(Error::Format("non-minimal varint".into()));
                }
                return Ok(v);
            }
        }
        Err(Error::Format("varint too long".into()))
    }

    pub fn signed(&mut self) -> Result<i64> {
        self.varint().map(unzigzag)
    }

    fn count(&mut self, elem_min_bytes: usize) -> Result<usize> {
        let n = self.u32()? as usize;
        if n.saturating_mul(elem_min_bytes) > self.remaining() {
            return Err(truncated());
        }
        Ok(n)
    }

    fn residues<M: Modulus>(&mut self, m: &M, n: usize) -> Result<Vec<M::Elem>> {
        let w = m.residue_width();
        if n.saturating_mul(w) > self.remaining() {
            return Err(truncated());
        }
        let raw = self.take(n * w)?;
        raw.chunks(w.max(1))
            .take(n)
            .map(|c| {
                let e = m.from_biguint(&BigUint::from_bytes_le(c));
                if m.to_biguint(&e) != BigUint::from_bytes_le(c) {
                    Err(Error::Format("residue not reduced".into()))
                } else {
                    Ok(e)
                }
            })
            .collect()
    }

    pub fn mod_vector<M: WireModulus>(&mut self) -> Result<ModVector<M>> {
        let m = M::from_value(&self.biguint()?)?;
        let n = self.u32()? as usize;
        let entries = self.residues(&m, n)?;
        ModVector::new(m, entries)
    }

    pub fn mod_matrix<M: WireModulus>(&mut self) -> Result<ModMatrix<M>> {
        let rows = self.u32()? as usize;
        let cols = self.u32()? as usize;
        let m = M::from_value(&self.biguint()?)?;
        let n = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Format("matrix too large".into()))?;
        let data = self.residues(&m, n)?;
        ModMatrix::new(m, rows, cols, data)
    }

    pub fn int_vector(&mut self) -> Result<IntVector> {
        let n = self.count(1)?;
        (0..n)
            .map(|_| self.signed())
            .collect::<Result<Vec<_>>>()
            .map(IntVector::new)
    }

    pub fn int_matrix(&mut self) -> Result<IntMatrix> {
        let rows = self.u32()? as usize;
        let cols = self.u32()? as usize;
        let n = rows
            .checked_mul(cols)
            .filter(|&n| n <= self.remaining())
            .ok_or_else(truncated)?;
        let data = (0..n).map(|_| self.signed()).collect::<Result<Vec<_>>>()?;
        IntMatrix::new(rows, cols, data)
    }

    pub fn bits(&mut self) -> Result<BitVector> {
        let n = self.u32()? as usize;
        let raw = self.take(n.div_ceil(8))?;
        BitVector::from_bytes(raw, n)
    }
}
