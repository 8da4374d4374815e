//! Signed integer vectors and matrices (Gaussian samples, short preimages,
//! function keys).

use crate::error::{dim_check, Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct IntVector(Vec<i64>);

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

fn checked(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow(format!("{v} does not fit in 64 bits")))
}

impl IntVector {
    pub fn new(v: Vec<i64>) -> Self {
        Self(v)
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

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }

    pub fn inf_norm(&self) -> u64 {
        self.0.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.0
            .iter()
            .map(|&v| (v as f64) * (v as f64))
            .sum::<f64>()
            .sqrt()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        dim_check(self.len() == other.len(), || {
            format!("int add {} vs {}", self.len(), other.len())
        })?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| checked(a as i128 + b as i128))
            .collect::<Result<_>>()
            .map(Self)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        dim_check(self.len() == other.len(), || {
            format!("int sub {} vs {}", self.len(), other.len())
        })?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| checked(a as i128 - b as i128))
            .collect::<Result<_>>()
            .map(Self)
    }

    /// Adds `c` to every entry.
    pub fn offset(&self, c: i64) -> Result<Self> {
        self.0
            .iter()
            .map(|&a| checked(a as i128 + c as i128))
            .collect::<Result<_>>()
            .map(Self)
    }
}

impl From<Vec<i64>> for IntVector {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        dim_check(rows * cols == data.len(), || {
            format!("{rows}x{cols} matrix from {} entries", data.len())
        })?;
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> IntVector {
        IntVector((0..self.rows).map(|r| self.get(r, c)).collect())
    }

    pub fn inf_norm(&self) -> u64 {
        self.data.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        dim_check(self.rows == other.rows && self.cols == other.cols, || {
            "int matrix sub shape".to_string()
        })?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| checked(a as i128 - b as i128))
            .collect::<Result<_>>()?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        dim_check(self.rows == other.rows && self.cols == other.cols, || {
            "int matrix add shape".to_string()
        })?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| checked(a as i128 + b as i128))
            .collect::<Result<_>>()?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Exact product with an integer vector, with overflow detection.
    pub fn mul_vec(&self, v: &[i64]) -> Result<IntVector> {
        dim_check(self.cols == v.len(), || {
            format!("{}x{} times vector of {}", self.rows, self.cols, v.len())
        })?;
        (0..self.rows)
            .map(|r| {
                let s: i128 = self
                    .row(r)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as i128 * b as i128)
                    .sum();
                checked(s)
            })
            .collect::<Result<_>>()
            .map(IntVector)
    }

    /// Exact integer product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        dim_check(self.cols == other.rows, || {
            format!(
                "{}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )
        })?;
        let bt = other.transpose();
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let s: i128 = self
                    .row(r)
                    .iter()
                    .zip(bt.row(c))
                    .map(|(&a, &b)| a as i128 * b as i128)
                    .sum();
                data.push(checked(s)?);
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// Largest singular value by power iteration on ZᵀZ.
    pub fn spectral_norm(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        let mut v = vec![1.0 / (self.cols as f64).sqrt(); self.cols];
        let mut sigma = 0.0;
        for _ in 0..200 {
            let zv: Vec<f64> = (0..self.rows)
                .map(|r| self.row(r).iter().zip(&v).map(|(&a, b)| a as f64 * b).sum())
                .collect();
            let mut ztzv = vec![0.0; self.cols];
            for (r, &w) in zv.iter().enumerate() {
                for (acc, &a) in ztzv.iter_mut().zip(self.row(r)) {
                    *acc += a as f64 * w;
                }
            }
            let norm = ztzv.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let next = norm.sqrt();
            v = ztzv.iter().map(|x| x / norm).collect();
            if (next - sigma).abs() <= 1e-9 * next {
                return next;
            }
            sigma = next;
        }
        sigma
    }
}
