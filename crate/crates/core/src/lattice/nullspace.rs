//! Kernel computations over a prime field Z_p.

use super::matrix::ZpVector;
use super::modular::{Modulus, WordModulus};
use crate::error::{Error, Result};

/// Basis of `{v : ⟨id, v⟩ = 0 for all ids}` in Z_p^dim, one vector per free
/// variable in ascending column order, each with that variable set to 1 and
/// the other free variables 0.
pub fn nullspace_basis(p: WordModulus, ids: &[ZpVector], dim: usize) -> Result<Vec<ZpVector>> {
    for id in ids {
        if id.len() != dim {
            return Err(Error::Dimension(format!(
                "identity of length {} in dimension {dim}",
                id.len()
            )));
        }
        if *id.modulus() != p {
            return Err(Error::ModulusMismatch("identity modulus".into()));
        }
    }
    let rows = ids.len();
    let mut a: Vec<Vec<u64>> = ids.iter().map(|v| v.entries().to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..dim {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = p
            .inv(a[r][c])
            .ok_or_else(|| Error::Parameter("modulus is not prime".into()))?;
        for x in a[r].iter_mut() {
            *x = p.mul(x, &inv);
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for k in 0..dim {
                    let t = p.mul(&f, &a[r][k]);
                    a[i][k] = p.sub(&a[i][k], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    Ok(free
        .iter()
        .map(|&f| {
            let mut v = vec![0u64; dim];
            v[f] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = p.neg(&a[row][f]);
            }
            ZpVector::from_reduced(p, v)
        })
        .collect())
}

/// A nonzero vector orthogonal to every id: the basis vector for the
/// lowest-index free variable.
pub fn solve_nullspace(p: WordModulus, ids: &[ZpVector], dim: usize) -> Result<ZpVector> {
    let v = nullspace_basis(p, ids, dim)?
        .into_iter()
        .next()
        .ok_or(Error::NoSolution)?;
    for id in ids {
        if id.dot(&v)? != 0 {
            return Err(Error::Internal("nullspace vector fails orthogonality".into()));
        }
    }
    Ok(v)
}
