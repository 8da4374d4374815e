//! Gadget trapdoors and discrete Gaussian preimage sampling.
//!
//! `A = [Ā | G − Ā·R]` over Z_p with Ā uniform, R ∈ {−1,0,1}^{m̄×nh} and
//! G = I_n ⊗ (1, 2, …, 2^{h−1}). Preimages of a target U are sampled
//! column by column as `z = p + [R; I]·z_g`, where the perturbation `p` has
//! covariance `s²I − a²[R; I][R; I]ᵀ` and `z_g` is a Gaussian point in a
//! coset of the gadget lattice, drawn with Klein's algorithm on a fixed
//! short basis. All widths are in the `s` convention of ρ_s.

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::gadgets::gadget_width;
use crate::lattice::gaussian::{continuous_gaussian, gauss_sample_int};
use crate::lattice::{IntMatrix, Modulus, WordModulus, ZpMatrix};

/// Resampling budget for R before giving up on the singular value target.
const TRAPGEN_ATTEMPTS: usize = 64;

/// Smoothing parameter η_ε(Z) for ε = 2^-64.
pub fn smoothing_parameter() -> f64 {
    ((2.0 * (1.0 + 2f64.powi(64))).ln() / std::f64::consts::PI).sqrt()
}

/// Largest Gram–Schmidt norm of the gadget basis. It is √5 for every
/// modulus that is not a power of two.
pub const GADGET_GSO_MAX: f64 = 2.236_067_977_499_79;

/// Target for s₁(R): (√m̄ + √w + 2)/√2, the expected extreme singular value
/// of a matrix with entry variance 1/2 plus a small deviation allowance.
pub fn predicted_s1(mbar: usize, w: usize) -> f64 {
    ((mbar as f64).sqrt() + (w as f64).sqrt() + 2.0) / 2f64.sqrt()
}

/// Minimal admissible preimage width for a trapdoor with s₁(R) = `s1`:
/// twice the positive-definiteness threshold of the perturbation
/// covariance.
pub fn quality_bound_for(s1: f64) -> f64 {
    let r = smoothing_parameter();
    let a = r * GADGET_GSO_MAX;
    2.0 * (a * a * (s1 * s1 + 1.0) + r * r).sqrt()
}

/// Short basis of Λ⊥(g) = {z ∈ Z^h : Σ 2^i z_i ≡ 0 mod p} with its
/// Gram–Schmidt data.
#[derive(Clone, Debug)]
struct GadgetBasis {
    cols: Vec<Vec<i64>>,
    gso: Vec<Vec<f64>>,
    gso_sq: Vec<f64>,
}

impl GadgetBasis {
    fn new(p: u64, h: usize) -> Self {
        let mut cols = Vec::with_capacity(h);
        for j in 0..h.saturating_sub(1) {
            let mut c = vec![0i64; h];
            c[j] = 2;
            c[j + 1] = -1;
            cols.push(c);
        }
        cols.push((0..h).map(|j| ((p >> j) & 1) as i64).collect());
        let mut gso: Vec<Vec<f64>> = Vec::with_capacity(h);
        for c in &cols {
            let mut v: Vec<f64> = c.iter().map(|&x| x as f64).collect();
            for prev in &gso {
                let num: f64 = v.iter().zip(prev).map(|(a, b)| a * b).sum();
                let den: f64 = prev.iter().map(|b| b * b).sum();
                let mu = num / den;
                for (x, b) in v.iter_mut().zip(prev) {
                    *x -= mu * b;
                }
            }
            gso.push(v);
        }
        let gso_sq = gso.iter().map(|v| v.iter().map(|x| x * x).sum()).collect();
        Self { cols, gso, gso_sq }
    }

    fn max_norm(&self) -> f64 {
        self.gso_sq.iter().cloned().fold(0.0, f64::max).sqrt()
    }

    /// A point of the coset {z : ⟨g, z⟩ ≡ u} distributed as D_{coset, a}:
    /// t − x with t the binary digits of u and x ← D_{Λ, a, t} by Klein's
    /// randomized nearest plane.
    fn sample_coset<R: RngCore + ?Sized>(&self, u: u64, a: f64, rng: &mut R) -> Result<Vec<i64>> {
        let h = self.cols.len();
        let t: Vec<i64> = (0..h).map(|j| ((u >> j) & 1) as i64).collect();
        let mut c: Vec<f64> = t.iter().map(|&x| x as f64).collect();
        let mut x = vec![0i64; h];
        for i in (0..h).rev() {
            let ci = c.iter().zip(&self.gso[i]).map(|(a, b)| a * b).sum::<f64>() / self.gso_sq[i];
            let zi = gauss_sample_int(a / self.gso_sq[i].sqrt(), ci, rng)?;
            for (j, &b) in self.cols[i].iter().enumerate() {
                c[j] -= zi as f64 * b as f64;
                x[j] += zi * b;
            }
        }
        Ok(t.iter().zip(&x).map(|(t, x)| t - x).collect())
    }
}

/// Secret trapdoor data for a matrix produced by [`trap_gen`].
#[derive(Clone, Debug)]
pub struct Trapdoor {
    r: IntMatrix,
    s1: f64,
    // R·Rᵀ, cached for the perturbation covariance
    gram: Vec<f64>,
    basis: GadgetBasis,
}

impl PartialEq for Trapdoor {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r
    }
}

impl Eq for Trapdoor {}

impl Trapdoor {
    pub fn r(&self) -> &IntMatrix {
        &self.r
    }

    /// Measured largest singular value of R.
    pub fn s1(&self) -> f64 {
        self.s1
    }

    /// Smallest width accepted by [`sample_pre`].
    pub fn quality_bound(&self) -> f64 {
        let r = smoothing_parameter();
        let a = r * self.basis.max_norm();
        2.0 * (a * a * (self.s1 * self.s1 + 1.0) + r * r).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrapdoorMatrix {
    pub a: ZpMatrix,
    pub trap: Trapdoor,
}

fn gadget_matrix(p: WordModulus, n: usize, h: usize) -> ZpMatrix {
    let mut g = ZpMatrix::zeros(p, n, n * h);
    for i in 0..n {
        for j in 0..h {
            g.set(i, i * h + j, p.from_i64(1i64 << j));
        }
    }
    g
}

fn gram(r: &IntMatrix) -> Vec<f64> {
    let mb = r.rows();
    let rows: Vec<Vec<f64>> = (0..mb)
        .map(|i| r.row(i).iter().map(|&v| v as f64).collect())
        .collect();
    let mut g = vec![0.0; mb * mb];
    for i in 0..mb {
        for j in 0..=i {
            let d: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            g[i * mb + j] = d;
            g[j * mb + i] = d;
        }
    }
    g
}

fn check_modulus(p: &WordModulus) -> Result<usize> {
    let v = p.get();
    if v < 3 || v.is_power_of_two() {
        return Err(Error::Parameter(format!(
            "trapdoor modulus {v} must be at least 3 and not a power of two"
        )));
    }
    Ok(gadget_width(p))
}

/// Generates `A ∈ Z_p^{n×m}` with a gadget trapdoor. R is resampled until
/// s₁(R) ≤ [`predicted_s1`].
pub fn trap_gen<R: RngCore + ?Sized>(n: usize, m: usize, p: WordModulus, rng: &mut R) -> Result<TrapdoorMatrix> {
    let h = check_modulus(&p)?;
    let w = n * h;
    if n == 0 || m < 2 * n * h {
        return Err(Error::Parameter(format!(
            "m = {m} below 2n⌈log₂ p⌉ = {}",
            2 * n * h
        )));
    }
    let mbar = m - w;
    let target = predicted_s1(mbar, w);
    let mut r = None;
    for _ in 0..TRAPGEN_ATTEMPTS {
        let data: Vec<i64> = (0..mbar * w)
            .map(|_| match rng.random_range(0u8..4) {
                0 => -1,
                1 => 1,
                _ => 0,
            })
            .collect();
        let cand = IntMatrix::new(mbar, w, data)?;
        let s1 = cand.spectral_norm();
        if s1 <= target {
            r = Some((cand, s1));
            break;
        }
    }
    let (r, s1) = r.ok_or_else(|| Error::Internal("could not meet trapdoor singular value target".into()))?;
    let abar = ZpMatrix::random(p, n, mbar, rng);
    let right = gadget_matrix(p, n, h).sub(&abar.mul_int(&r)?)?;
    let a = ZpMatrix::hconcat(&[&abar, &right])?;
    let trap = Trapdoor {
        gram: gram(&r),
        r,
        s1,
        basis: GadgetBasis::new(p.get(), h),
    };
    Ok(TrapdoorMatrix { a, trap })
}

impl TrapdoorMatrix {
    /// Reassembles a trapdoor from `A` and `R`, checking that the right
    /// block of `A` equals `G − Ā·R`.
    pub fn from_parts(a: ZpMatrix, r: IntMatrix) -> Result<Self> {
        let p = *a.modulus();
        let h = check_modulus(&p)?;
        let n = a.rows();
        let w = n * h;
        if a.cols() < 2 * w || r.rows() != a.cols() - w || r.cols() != w {
            return Err(Error::Dimension("trapdoor shape does not match A".into()));
        }
        let mbar = a.cols() - w;
        let abar = a.block(0, n, 0, mbar);
        let expect = gadget_matrix(p, n, h).sub(&abar.mul_int(&r)?)?;
        if a.block(0, n, mbar, a.cols()) != expect {
            return Err(Error::Corruption("trapdoor does not match public matrix".into()));
        }
        if r.data().iter().any(|v| v.abs() > 1) {
            return Err(Error::Corruption("trapdoor entries outside {-1,0,1}".into()));
        }
        let s1 = r.spectral_norm();
        Ok(Self {
            a,
            trap: Trapdoor {
                gram: gram(&r),
                r,
                s1,
                basis: GadgetBasis::new(p.get(), h),
            },
        })
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.a.cols()
    }
}

/// In-place lower Cholesky factor of a dense symmetric matrix.
fn cholesky(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= 0.0 {
            return Err(Error::Parameter("perturbation covariance is not positive definite".into()));
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / d;
        }
        for k in j + 1..n {
            a[j * n + k] = 0.0;
        }
    }
    Ok(a)
}

/// Samples `Z ∈ Z^{m×l}` with `A·Z ≡ U (mod p)`, columns distributed as
/// discrete Gaussians of width `s` over the matching cosets.
pub fn sample_pre<R: RngCore + ?Sized>(td: &TrapdoorMatrix, u: &ZpMatrix, s: f64, rng: &mut R) -> Result<IntMatrix> {
    let bound = td.trap.quality_bound();
    if !(s >= bound) {
        return Err(Error::Parameter(format!(
            "preimage width {s:.2} below trapdoor quality bound {bound:.2}"
        )));
    }
    let a = &td.a;
    let p = *a.modulus();
    if *u.modulus() != p {
        return Err(Error::ModulusMismatch("preimage target".into()));
    }
    if u.rows() != a.rows() {
        return Err(Error::Dimension(format!(
            "target has {} rows, A has {}",
            u.rows(),
            a.rows()
        )));
    }
    let n = a.rows();
    let h = gadget_width(&p);
    let w = n * h;
    let mbar = a.cols() - w;
    let r_mat = &td.trap.r;
    let rs = smoothing_parameter();
    let gw = rs * td.trap.basis.max_norm();
    let c2 = s * s - rs * rs;
    let k = gw * gw * c2 / (c2 - gw * gw);
    let mut cov: Vec<f64> = td.trap.gram.iter().map(|g| -k * g).collect();
    for i in 0..mbar {
        cov[i * mbar + i] += c2;
    }
    let chol = cholesky(cov, mbar)?;
    let shift = -gw * gw / (c2 - gw * gw);
    let p2_width = (c2 - gw * gw).sqrt();

    let mut out = IntMatrix::zeros(a.cols(), u.cols());
    for col in 0..u.cols() {
        // continuous perturbation, then randomized rounding
        let p2c = continuous_gaussian(p2_width, w, rng);
        let xi = continuous_gaussian(1.0, mbar, rng);
        let mut p1c = vec![0.0; mbar];
        for i in 0..mbar {
            let row = r_mat.row(i);
            let mean: f64 = row.iter().zip(&p2c).map(|(&r, &x)| r as f64 * x).sum::<f64>() * shift;
            let noise: f64 = chol[i * mbar..i * mbar + i + 1]
                .iter()
                .zip(&xi)
                .map(|(l, x)| l * x)
                .sum();
            p1c[i] = mean + noise;
        }
        let mut pert = Vec::with_capacity(a.cols());
        for &c in p1c.iter().chain(&p2c) {
            pert.push(gauss_sample_int(rs, c, rng)?);
        }
        // syndrome left for the gadget part
        let pert_mod: Vec<u64> = pert.iter().map(|&v| p.from_i64(v)).collect();
        let mut zg = Vec::with_capacity(w);
        for i in 0..n {
            let ap = p.dot(a.row(i).iter().zip(&pert_mod));
            let v = p.sub(u.get(i, col), &ap);
            zg.extend(td.trap.basis.sample_coset(v, gw, rng)?);
        }
        for i in 0..mbar {
            let rz: i64 = r_mat.row(i).iter().zip(&zg).map(|(&r, &z)| r * z).sum();
            out.set(i, col, pert[i] + rz);
        }
        for j in 0..w {
            out.set(mbar + j, col, pert[mbar + j] + zg[j]);
        }
    }
    debug_assert!(a.mul_int(&out).map(|az| &az == u).unwrap_or(false));
    Ok(out)
}
