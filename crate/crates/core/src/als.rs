//! The plain LWE inner-product FE scheme that IPFE-FR extends.
//!
//! Setup samples a Gaussian `Z ∈ Z^{m×l}` and publishes `(A, U = A·Z)`.
//! A key for x is `z_x = Z·x`; decryption computes
//! `μ′ = xᵀ·c2 − z_xᵀ·c1 mod p` and rounds to the nearest multiple of ⌊p/K⌋.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::gadgets::decode_round_u64;
use crate::lattice::{
    gauss_sample_matrix, CenteredSampler, IntMatrix, IntVector, Modulus, WordModulus, ZpMatrix, ZpVector,
};
use crate::params::Params;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlsPublicKey {
    pub a: ZpMatrix,
    pub u: ZpMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlsKeys {
    pub msk: IntMatrix,
    pub mpk: AlsPublicKey,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlsFunctionKey {
    pub x: ZpVector,
    pub z_x: IntVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlsCiphertext {
    pub c1: ZpVector,
    pub c2: ZpVector,
}

/// Intermediate values of a decryption, for noise accounting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlsDecryption {
    pub mu_prime: u64,
    pub mu: u64,
    /// μ′ − ⌊p/K⌋·μ as a centered residue.
    pub noise: i64,
}

/// Checks every entry of `v` lies in `[0, bound)` and lifts it to Z_p.
pub fn bounded_vector(p: WordModulus, v: &[u64], len: usize, bound: u64, what: &str) -> Result<ZpVector> {
    if v.len() != len {
        return Err(Error::Dimension(format!("{what} has length {}, expected {len}", v.len())));
    }
    if let Some(bad) = v.iter().find(|&&e| e >= bound) {
        return Err(Error::Domain(format!("{what} entry {bad} not below {bound}")));
    }
    ZpVector::new(p, v.to_vec())
}

fn check_range(v: &ZpVector, len: usize, bound: u64, what: &str) -> Result<()> {
    bounded_vector(*v.modulus(), v.entries(), len, bound, what).map(|_| ())
}

pub fn als_setup<R: RngCore + ?Sized>(params: &Params, rng: &mut R) -> Result<AlsKeys> {
    let p = params.zp();
    let a = ZpMatrix::random(p, params.n, params.m, rng);
    let z = gauss_sample_matrix(params.m, params.l1, params.rho1, rng)?;
    let u = a.mul_int(&z)?;
    Ok(AlsKeys {
        msk: z,
        mpk: AlsPublicKey { a, u },
    })
}

pub fn als_keygen(params: &Params, msk: &IntMatrix, x: &ZpVector) -> Result<AlsFunctionKey> {
    check_range(x, params.l1, params.x_bound, "function vector")?;
    let xi: Vec<i64> = x.entries().iter().map(|&v| v as i64).collect();
    Ok(AlsFunctionKey {
        x: x.clone(),
        z_x: msk.mul_vec(&xi)?,
    })
}

fn enc_inner<R: RngCore + ?Sized>(
    params: &Params,
    mpk: &AlsPublicKey,
    y: &ZpVector,
    noisy: bool,
    rng: &mut R,
) -> Result<AlsCiphertext> {
    check_range(y, params.l1, params.y_bound, "plaintext")?;
    let p = params.zp();
    let s = ZpVector::random(p, params.n, rng);
    let mut c1 = mpk.a.transpose_mul_vec(&s)?;
    let mut c2 = mpk.u.transpose_mul_vec(&s)?;
    if noisy {
        let noise = CenteredSampler::new(params.sigma2)?;
        c1 = c1.add(&ZpVector::from_i64s(p, &noise.sample_vec(params.m, rng)?))?;
        c2 = c2.add(&ZpVector::from_i64s(p, &noise.sample_vec(params.l1, rng)?))?;
    }
    let scaled = y.scale(&params.delta());
    c2 = c2.add(&scaled)?;
    Ok(AlsCiphertext { c1, c2 })
}

pub fn als_enc<R: RngCore + ?Sized>(
    params: &Params,
    mpk: &AlsPublicKey,
    y: &ZpVector,
    rng: &mut R,
) -> Result<AlsCiphertext> {
    enc_inner(params, mpk, y, true, rng)
}

pub fn als_dec_traced(params: &Params, sk: &AlsFunctionKey, ct: &AlsCiphertext) -> Result<AlsDecryption> {
    let p = params.zp();
    let a = sk.x.dot(&ct.c2)?;
    let b = ct.c1.dot_int(&sk.z_x)?;
    let mu_prime = p.sub(&a, &b);
    let mu = decode_round_u64(mu_prime, params.p, params.delta(), params.big_k())?;
    let noise = p.centered_i64(p.sub(&mu_prime, &p.mul(&params.delta(), &mu)));
    Ok(AlsDecryption { mu_prime, mu, noise })
}

pub fn als_dec(params: &Params, sk: &AlsFunctionKey, ct: &AlsCiphertext) -> Result<u64> {
    als_dec_traced(params, sk, ct).map(|d| d.mu)
}

/// Largest decryption noise tolerated by rounding: p/(4K).
pub fn noise_budget(params: &Params) -> u64 {
    params.p / (4 * params.big_k())
}
