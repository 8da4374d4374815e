//! Dense vectors and row-major matrices over a [`Modulus`].

use rand::RngCore;

use super::int::{IntMatrix, IntVector};
use super::modular::{Modulus, WideModulus, WordModulus};
use crate::error::{dim_check, Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModVector<M: Modulus> {
    modulus: M,
    entries: Vec<M::Elem>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModMatrix<M: Modulus> {
    modulus: M,
    rows: usize,
    cols: usize,
    data: Vec<M::Elem>,
}

pub type ZpVector = ModVector<WordModulus>;
pub type ZpMatrix = ModMatrix<WordModulus>;
pub type ZqVector = ModVector<WideModulus>;
pub type ZqMatrix = ModMatrix<WideModulus>;

fn same_modulus<M: Modulus>(a: &M, b: &M) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ModulusMismatch(format!(
            "{} vs {}",
            a.value(),
            b.value()
        )))
    }
}

impl<M: Modulus> ModVector<M> {
    /// Builds a vector, rejecting unreduced entries.
    pub fn new(modulus: M, entries: Vec<M::Elem>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|e| !modulus.is_reduced(e)) {
            return Err(Error::Domain(format!(
                "entry {} not reduced mod {}",
                modulus.to_biguint(bad),
                modulus.value()
            )));
        }
        Ok(Self { modulus, entries })
    }

    pub(crate) fn from_reduced(modulus: M, entries: Vec<M::Elem>) -> Self {
        debug_assert!(entries.iter().all(|e| modulus.is_reduced(e)));
        Self { modulus, entries }
    }

    pub fn zeros(modulus: M, len: usize) -> Self {
        let entries = vec![modulus.zero(); len];
        Self { modulus, entries }
    }

    pub fn from_i64s(modulus: M, values: &[i64]) -> Self {
        let entries = values.iter().map(|&v| modulus.from_i64(v)).collect();
        Self { modulus, entries }
    }

    pub fn from_int(modulus: M, v: &IntVector) -> Self {
        Self::from_i64s(modulus, v.as_slice())
    }

    pub fn random<R: RngCore + ?Sized>(modulus: M, len: usize, rng: &mut R) -> Self {
        let entries = (0..len).map(|_| modulus.sample(rng)).collect();
        Self { modulus, entries }
    }

    pub fn modulus(&self) -> &M {
        &self.modulus
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[M::Elem] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<M::Elem> {
        self.entries
    }

    pub fn get(&self, i: usize) -> &M::Elem {
        &self.entries[i]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| self.modulus.is_zero(e))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_modulus(&self.modulus, &other.modulus)?;
        dim_check(self.len() == other.len(), || {
            format!("vector add {} vs {}", self.len(), other.len())
        })?;
        let m = &self.modulus;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| m.add(a, b))
            .collect();
        Ok(Self::from_reduced(m.clone(), entries))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_modulus(&self.modulus, &other.modulus)?;
        dim_check(self.len() == other.len(), || {
            format!("vector sub {} vs {}", self.len(), other.len())
        })?;
        let m = &self.modulus;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| m.sub(a, b))
            .collect();
        Ok(Self::from_reduced(m.clone(), entries))
    }

    pub fn scale(&self, c: &M::Elem) -> Self {
        let m = &self.modulus;
        let entries = self.entries.iter().map(|a| m.mul(a, c)).collect();
        Self::from_reduced(m.clone(), entries)
    }

    pub fn dot(&self, other: &Self) -> Result<M::Elem> {
        same_modulus(&self.modulus, &other.modulus)?;
        dim_check(self.len() == other.len(), || {
            format!("dot {} vs {}", self.len(), other.len())
        })?;
        Ok(self.modulus.dot(self.entries.iter().zip(&other.entries)))
    }

    /// ⟨self, v⟩ for a signed integer vector, reduced mod the modulus.
    pub fn dot_int(&self, v: &IntVector) -> Result<M::Elem> {
        dim_check(self.len() == v.len(), || {
            format!("dot {} vs {}", self.len(), v.len())
        })?;
        let lifted = Self::from_int(self.modulus.clone(), v);
        self.dot(&lifted)
    }

    /// vᵀ·M as a row vector.
    pub fn mul_mat(&self, mat: &ModMatrix<M>) -> Result<Self> {
        mat.transpose_mul_vec(self)
    }
}

impl<M: Modulus> ModMatrix<M> {
    pub fn new(modulus: M, rows: usize, cols: usize, data: Vec<M::Elem>) -> Result<Self> {
        dim_check(rows * cols == data.len(), || {
            format!("{rows}x{cols} matrix from {} entries", data.len())
        })?;
        if let Some(bad) = data.iter().find(|e| !modulus.is_reduced(e)) {
            return Err(Error::Domain(format!(
                "entry {} not reduced mod {}",
                modulus.to_biguint(bad),
                modulus.value()
            )));
        }
        Ok(Self {
            modulus,
            rows,
            cols,
            data,
        })
    }

    pub(crate) fn from_reduced(modulus: M, rows: usize, cols: usize, data: Vec<M::Elem>) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        Self {
            modulus,
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(modulus: M, rows: usize, cols: usize) -> Self {
        let data = vec![modulus.zero(); rows * cols];
        Self::from_reduced(modulus, rows, cols, data)
    }

    pub fn identity(modulus: M, n: usize) -> Self {
        let mut out = Self::zeros(modulus, n, n);
        for i in 0..n {
            out.data[i * n + i] = out.modulus.one();
        }
        out
    }

    pub fn random<R: RngCore + ?Sized>(modulus: M, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| modulus.sample(rng)).collect();
        Self::from_reduced(modulus, rows, cols, data)
    }

    pub fn from_int(modulus: M, z: &IntMatrix) -> Self {
        let data = z.data().iter().map(|&v| modulus.from_i64(v)).collect();
        Self::from_reduced(modulus, z.rows(), z.cols(), data)
    }

    pub fn from_rows(modulus: M, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        dim_check(rows.iter().all(|row| row.len() == c), || {
            "ragged rows".to_string()
        })?;
        let data = rows.iter().flatten().map(|&v| modulus.from_i64(v)).collect();
        Ok(Self::from_reduced(modulus, r, c, data))
    }

    pub fn modulus(&self) -> &M {
        &self.modulus
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[M::Elem] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> &M::Elem {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: M::Elem) {
        debug_assert!(self.modulus.is_reduced(&v));
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[M::Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> ModVector<M> {
        let entries = (0..self.rows).map(|r| self.get(r, c).clone()).collect();
        ModVector::from_reduced(self.modulus.clone(), entries)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| self.modulus.is_zero(e))
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Self::from_reduced(self.modulus.clone(), self.cols, self.rows, data)
    }

    fn zip_with(&self, other: &Self, op: &str, f: impl Fn(&M, &M::Elem, &M::Elem) -> M::Elem) -> Result<Self> {
        same_modulus(&self.modulus, &other.modulus)?;
        dim_check(self.rows == other.rows && self.cols == other.cols, || {
            format!(
                "{op} {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )
        })?;
        let m = &self.modulus;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f(m, a, b))
            .collect();
        Ok(Self::from_reduced(m.clone(), self.rows, self.cols, data))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |m, a, b| m.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |m, a, b| m.sub(a, b))
    }

    /// Exact product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_modulus(&self.modulus, &other.modulus)?;
        dim_check(self.cols == other.rows, || {
            format!(
                "mat_mul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )
        })?;
        let bt = other.transpose();
        let m = &self.modulus;
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for r in 0..self.rows {
            let row = self.row(r);
            for c in 0..other.cols {
                data.push(m.dot(row.iter().zip(bt.row(c))));
            }
        }
        Ok(Self::from_reduced(m.clone(), self.rows, other.cols, data))
    }

    /// `self · z` for a signed integer matrix, lifted into the ring.
    pub fn mul_int(&self, z: &IntMatrix) -> Result<Self> {
        dim_check(self.cols == z.rows(), || {
            format!(
                "mat_mul {}x{} by {}x{}",
                self.rows,
                self.cols,
                z.rows(),
                z.cols()
            )
        })?;
        self.mul(&Self::from_int(self.modulus.clone(), z))
    }

    pub fn mul_vec(&self, v: &ModVector<M>) -> Result<ModVector<M>> {
        same_modulus(&self.modulus, v.modulus())?;
        dim_check(self.cols == v.len(), || {
            format!("{}x{} times vector of {}", self.rows, self.cols, v.len())
        })?;
        let m = &self.modulus;
        let entries = (0..self.rows)
            .map(|r| m.dot(self.row(r).iter().zip(v.entries())))
            .collect();
        Ok(ModVector::from_reduced(m.clone(), entries))
    }

    /// `selfᵀ · v`, equivalently the row vector `vᵀ · self`.
    pub fn transpose_mul_vec(&self, v: &ModVector<M>) -> Result<ModVector<M>> {
        same_modulus(&self.modulus, v.modulus())?;
        dim_check(self.rows == v.len(), || {
            format!("transpose of {}x{} times vector of {}", self.rows, self.cols, v.len())
        })?;
        let m = &self.modulus;
        let mut acc = vec![m.zero(); self.cols];
        for (r, coef) in v.entries().iter().enumerate() {
            if m.is_zero(coef) {
                continue;
            }
            for (a, x) in acc.iter_mut().zip(self.row(r)) {
                *a = m.add(a, &m.mul(coef, x));
            }
        }
        Ok(ModVector::from_reduced(m.clone(), acc))
    }

    /// Places `blocks` side by side.
    pub fn hconcat(blocks: &[&Self]) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::Dimension("empty concatenation".into()))?;
        let rows = first.rows;
        for b in blocks {
            same_modulus(&first.modulus, &b.modulus)?;
            dim_check(b.rows == rows, || format!("hconcat rows {} vs {}", b.rows, rows))?;
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(r));
            }
        }
        Ok(Self::from_reduced(first.modulus.clone(), rows, cols, data))
    }

    /// Stacks `blocks` vertically.
    pub fn vconcat(blocks: &[&Self]) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::Dimension("empty concatenation".into()))?;
        let cols = first.cols;
        for b in blocks {
            same_modulus(&first.modulus, &b.modulus)?;
            dim_check(b.cols == cols, || format!("vconcat cols {} vs {}", b.cols, cols))?;
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            data.extend_from_slice(&b.data);
        }
        Ok(Self::from_reduced(first.modulus.clone(), rows, cols, data))
    }

    /// Sub-block of rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut data = Vec::with_capacity((r1 - r0) * (c1 - c0));
        for r in r0..r1 {
            data.extend_from_slice(&self.row(r)[c0..c1]);
        }
        Self::from_reduced(self.modulus.clone(), r1 - r0, c1 - c0, data)
    }
}

impl ModMatrix<WordModulus> {
    /// Rank via row reduction (p must be prime).
    pub fn rank(&self) -> usize {
        let m = self.modulus;
        let mut a = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for c in 0..cols {
            if rank == rows {
                break;
            }
            let Some(piv) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
                continue;
            };
            for k in 0..cols {
                a.swap(piv * cols + k, rank * cols + k);
            }
            let inv = m.inv(a[rank * cols + c]).expect("prime modulus");
            for r in 0..rows {
                if r == rank || a[r * cols + c] == 0 {
                    continue;
                }
                let f = m.mul(&a[r * cols + c], &inv);
                for k in c..cols {
                    let t = m.mul(&f, &a[rank * cols + k]);
                    a[r * cols + k] = m.sub(&a[r * cols + k], &t);
                }
            }
            rank += 1;
        }
        rank
    }
}
