use num_bigint::{BigInt, BigUint};
use rand::RngCore;

use super::keys::*;
use crate::als::bounded_vector;
use crate::error::{Error, Result};
use crate::gadgets::{bitd_mul_top, decode_round, decode_round_u64, pack_signed, unpack_signed};
use crate::lattice::{
    gauss_sample_matrix, nullspace_basis, CenteredSampler, IntMatrix, IntVector, Modulus, WideModulus,
    WordModulus, ZpMatrix, ZpVector, ZqMatrix, ZqVector,
};
use crate::lattice::modular::pow_biguint;
use crate::params::Params;
use crate::prims::{h1, h2, prf_eval, PrfKey};
use crate::trapdoor::{sample_pre, trap_gen};

/// Attempts at re-randomising v_R before reporting a degenerate nullspace.
pub const NULLSPACE_ATTEMPTS: usize = 16;

/// Randomness and noise of one encryption, exposed for noise accounting.
#[derive(Clone, Debug)]
pub struct EncryptionTrace {
    pub ct: Ciphertext,
    pub s2: ZpVector,
    pub e3: IntVector,
    pub e4: IntVector,
}

/// Every intermediate of a decryption.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecryptionTrace {
    /// idᵀ·pd2 − u_idᵀ·pd1 mod q.
    pub theta_prime: BigUint,
    pub theta: u64,
    /// θ′ − p^{k−1}·θ, centered.
    pub theta_noise: BigInt,
    pub mu_prime: u64,
    pub mu: u64,
    /// μ′ − ⌊p/K⌋·μ, centered.
    pub mu_noise: i64,
}

fn to_signed(v: &ZpVector) -> Vec<i64> {
    v.entries().iter().map(|&e| e as i64).collect()
}

fn lift_q(v: &ZpVector, zq: &WideModulus) -> ZqVector {
    let e = v.entries().iter().map(|&x| BigUint::from(x)).collect();
    ZqVector::new(zq.clone(), e).expect("p < q")
}

fn check_version(expected: u32, found: u32) -> Result<()> {
    if expected != found {
        return Err(Error::VersionMismatch { expected, found });
    }
    Ok(())
}

fn check_public_key(params: &Params, mpk: &MasterPublicKey) -> Result<()> {
    let ok = mpk.a.rows() == params.n
        && mpk.a.cols() == params.m
        && mpk.v.rows() == params.n
        && mpk.v.cols() == params.m
        && mpk.c.rows() == params.n
        && mpk.c.cols() == params.l1
        && mpk.a.modulus().get() == params.p
        && *mpk.v.modulus().get() == params.q();
    if !ok {
        return Err(Error::Dimension("master public key does not match parameters".into()));
    }
    Ok(())
}

fn check_group_key(params: &Params, gpk: &GroupPublicKey) -> Result<()> {
    let ok = gpk.f.rows() == params.n
        && gpk.f.cols() == params.l2
        && gpk.u.rows() == params.n
        && gpk.u.cols() == params.l1;
    if !ok {
        return Err(Error::Dimension("group public key does not match parameters".into()));
    }
    Ok(())
}

/// Encrypts `payload ∈ Z_p^{l2}` at scale p^{k−1} under (V, F).
fn encrypt_q<R: RngCore + ?Sized>(
    params: &Params,
    v: &ZqMatrix,
    f: &ZqMatrix,
    payload: &ZpVector,
    rng: &mut R,
) -> Result<(ZqVector, ZqVector)> {
    let zq = params.zq();
    let noise = CenteredSampler::new(params.sigma1)?;
    let s = ZqVector::random(zq.clone(), params.n, rng);
    let c1 = v
        .transpose_mul_vec(&s)?
        .add(&ZqVector::from_i64s(zq.clone(), &noise.sample_vec(params.m, rng)?))?;
    let scale = pow_biguint(params.p, params.k - 1);
    let c2 = f
        .transpose_mul_vec(&s)?
        .add(&ZqVector::from_i64s(zq.clone(), &noise.sample_vec(params.l2, rng)?))?
        .add(&lift_q(payload, &zq).scale(&scale))?;
    Ok((c1, c2))
}

/// Returns (θ′, θ, centered noise) for an encryption under (V, F).
fn decrypt_q(params: &Params, usk: &UserKey, c1: &ZqVector, c2: &ZqVector) -> Result<(BigUint, u64, BigInt)> {
    let zq = params.zq();
    let a = lift_q(&usk.id, &zq).dot(c2)?;
    let b = c1.dot_int(&usk.u_id)?;
    let theta_prime = zq.sub(&a, &b);
    let step = pow_biguint(params.p, params.k - 1);
    let theta = decode_round(&theta_prime, zq.get(), &step, params.p)?;
    let rem = zq.sub(&theta_prime, &zq.mul(&step, &BigUint::from(theta)));
    Ok((theta_prime, theta, zq.centered(&rem)))
}

fn validated(params: &Params) -> Result<()> {
    let violations = params.validate();
    if violations.is_empty() {
        return Ok(());
    }
    let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
    Err(Error::Parameter(list.join("; ")))
}

pub fn system_setup<R: RngCore + ?Sized>(
    params: &Params,
    rng: &mut R,
) -> Result<(MasterSecretKey, MasterPublicKey, PublicDirectory)> {
    validated(params)?;
    system_setup_unchecked(params, rng)
}

/// Setup without the parameter-set validation, for benchmarking parameter
/// sets that trade correctness for size.
pub fn system_setup_unchecked<R: RngCore + ?Sized>(
    params: &Params,
    rng: &mut R,
) -> Result<(MasterSecretKey, MasterPublicKey, PublicDirectory)> {
    let p = WordModulus::new(params.p)?;
    let zq = WideModulus::new(params.q())?;
    let td = trap_gen(params.n, params.m, p, rng)?;
    let v = ZqMatrix::random(zq, params.n, params.m, rng);
    let c = ZpMatrix::random(p, params.n, params.l1, rng);
    let k_p = PrfKey::new(p.sample(rng), &p)?;
    let mpk = MasterPublicKey { a: td.a.clone(), v, c };
    let msk = MasterSecretKey {
        td,
        k_p,
        preimages: Default::default(),
    };
    Ok((msk, mpk, PublicDirectory::new()))
}

pub fn group_setup<R: RngCore + ?Sized>(params: &Params, mpk: &MasterPublicKey, rng: &mut R) -> Result<GroupKeys> {
    check_public_key(params, mpk)?;
    let d = gauss_sample_matrix(params.m, params.l2, params.rho2, rng)?;
    let f = mpk.v.mul_int(&d)?;
    let b = gauss_sample_matrix(params.m, params.l1, params.rho1, rng)?;
    let u = mpk.a.mul_int(&b)?;
    Ok(GroupKeys {
        guk: GroupUserKey { d },
        gfk: GroupFunctionKey { ver: 1, b },
        gpk: GroupPublicKey { ver: 1, f, u },
    })
}

/// Issues the key for `identity`, registering it if new.
pub fn ukeygen(params: &Params, guk: &GroupUserKey, identity: &[u8], registry: &mut Registry) -> Result<UserKey> {
    let id = registry.register(identity, &params.zp(), params.l2)?;
    let u_id = guk.d.mul_vec(&to_signed(&id))?;
    Ok(UserKey {
        identity: identity.to_vec(),
        id,
        u_id,
    })
}

/// The cached preimage Z_ver of C + U_ver, sampled on first use.
pub fn version_preimage<'a, R: RngCore + ?Sized>(
    params: &Params,
    msk: &'a mut MasterSecretKey,
    mpk: &MasterPublicKey,
    gpk: &GroupPublicKey,
    rng: &mut R,
) -> Result<&'a IntMatrix> {
    let target = mpk.c.add(&gpk.u)?;
    let fresh = match msk.preimages.get(&gpk.ver) {
        Some(z) => mpk.a.mul_int(z)? != target,
        None => true,
    };
    if fresh {
        let z = sample_pre(&msk.td, &target, params.rho1, rng)?;
        msk.preimages.insert(gpk.ver, z);
    }
    Ok(&msk.preimages[&gpk.ver])
}

#[allow(clippy::too_many_arguments)]
pub fn fkeygen<R: RngCore + ?Sized>(
    params: &Params,
    msk: &mut MasterSecretKey,
    mpk: &MasterPublicKey,
    gpk: &GroupPublicKey,
    x: &ZpVector,
    identity: &[u8],
    pd: &mut PublicDirectory,
    rng: &mut R,
) -> Result<FunctionKey> {
    check_public_key(params, mpk)?;
    check_group_key(params, gpk)?;
    let p = params.zp();
    let x = bounded_vector(p, x.entries(), params.l1, params.x_bound, "function vector")?;
    let id = h1(identity, &p, params.l2);
    let t_x = prf_eval(&msk.k_p, &x, params.l2);
    let v = id.dot(&t_x)?;
    let z = version_preimage(params, msk, mpk, gpk, rng)?;
    let f = z.mul_vec(&to_signed(&x))?.offset(-(v as i64))?;
    if !pd.contains(&x) {
        let (pd1, pd2) = encrypt_q(params, &mpk.v, &gpk.f, &t_x, rng)?;
        pd.insert(DirectoryEntry { x: x.clone(), pd1, pd2 });
    }
    Ok(FunctionKey { x, f, ver: gpk.ver })
}

/// Encryption with its randomness exposed. `noisy = false` omits e3 and e4
/// and exists only for testing.
pub fn enc_traced<R: RngCore + ?Sized>(
    params: &Params,
    mpk: &MasterPublicKey,
    gpk: &GroupPublicKey,
    y: &ZpVector,
    noisy: bool,
    rng: &mut R,
) -> Result<EncryptionTrace> {
    check_public_key(params, mpk)?;
    check_group_key(params, gpk)?;
    let p = params.zp();
    let y = bounded_vector(p, y.entries(), params.l1, params.y_bound, "plaintext")?;
    let s2 = ZpVector::random(p, params.n, rng);
    let (e3, e4) = if noisy {
        let noise = CenteredSampler::new(params.sigma2)?;
        (
            IntVector::new(noise.sample_vec(params.m, rng)?),
            IntVector::new(noise.sample_vec(params.l1, rng)?),
        )
    } else {
        (IntVector::zeros(params.m), IntVector::zeros(params.l1))
    };
    let cu = mpk.c.add(&gpk.u)?;
    let c1 = mpk.a.transpose_mul_vec(&s2)?.add(&ZpVector::from_int(p, &e3))?;
    let c2 = cu
        .transpose_mul_vec(&s2)?
        .add(&ZpVector::from_int(p, &e4))?
        .add(&y.scale(&params.delta()))?;
    Ok(EncryptionTrace {
        ct: Ciphertext {
            ver: gpk.ver,
            c1,
            c2,
            update_count: 0,
        },
        s2,
        e3,
        e4,
    })
}

pub fn enc<R: RngCore + ?Sized>(
    params: &Params,
    mpk: &MasterPublicKey,
    gpk: &GroupPublicKey,
    y: &ZpVector,
    rng: &mut R,
) -> Result<Ciphertext> {
    enc_traced(params, mpk, gpk, y, true, rng).map(|t| t.ct)
}

pub fn dec_traced(
    params: &Params,
    ct: &Ciphertext,
    usk: &UserKey,
    fsk: &FunctionKey,
    pd: &PublicDirectory,
) -> Result<DecryptionTrace> {
    check_version(fsk.ver, ct.ver)?;
    let entry = pd.get(&fsk.x).ok_or(Error::MissingDirectoryEntry)?;
    let (theta_prime, theta, theta_noise) = decrypt_q(params, usk, &entry.pd1, &entry.pd2)?;
    let f_full = fsk.f.offset(theta as i64)?;
    let p = params.zp();
    let mu_prime = p.sub(&fsk.x.dot(&ct.c2)?, &ct.c1.dot_int(&f_full)?);
    let delta = params.delta();
    let mu = decode_round_u64(mu_prime, params.p, delta, params.big_k())?;
    let mu_noise = p.centered_i64(p.sub(&mu_prime, &p.mul(&delta, &mu)));
    Ok(DecryptionTrace {
        theta_prime,
        theta,
        theta_noise,
        mu_prime,
        mu,
        mu_noise,
    })
}

pub fn dec(params: &Params, ct: &Ciphertext, usk: &UserKey, fsk: &FunctionKey, pd: &PublicDirectory) -> Result<u64> {
    dec_traced(params, ct, usk, fsk, pd).map(|t| t.mu)
}

/// Moves the group to the next version with a fresh B. D and F carry over.
pub fn group_update<R: RngCore + ?Sized>(
    params: &Params,
    mpk: &MasterPublicKey,
    gk: &GroupKeys,
    rng: &mut R,
) -> Result<GroupKeys> {
    check_public_key(params, mpk)?;
    let ver = gk.ver().checked_add(1).ok_or_else(|| Error::Overflow("group version".into()))?;
    let b = gauss_sample_matrix(params.m, params.l1, params.rho1, rng)?;
    let u = mpk.a.mul_int(&b)?;
    Ok(GroupKeys {
        guk: gk.guk.clone(),
        gfk: GroupFunctionKey { ver, b },
        gpk: GroupPublicKey {
            ver,
            f: gk.gpk.f.clone(),
            u,
        },
    })
}

/// Row-wise `e·M mod p` accumulated in u128 with periodic reduction.
fn row_combination(p: &WordModulus, e: &[u64], mat: &ZpMatrix, out: &mut [u128]) {
    let pv = p.get() as u128;
    let cap = (u128::MAX / ((pv - 1) * (pv - 1)).max(1) - 1).clamp(1, 1 << 20) as usize;
    out.iter_mut().for_each(|a| *a = 0);
    for (j, &c) in e.iter().enumerate() {
        if j > 0 && j % cap == 0 {
            out.iter_mut().for_each(|a| *a %= pv);
        }
        if c == 0 {
            continue;
        }
        for (a, &v) in out.iter_mut().zip(mat.row(j)) {
            *a += c as u128 * v as u128;
        }
    }
}

pub fn uptkeygen<R: RngCore + ?Sized>(
    params: &Params,
    msk: &mut MasterSecretKey,
    mpk: &MasterPublicKey,
    gpk_old: &GroupPublicKey,
    gpk_new: &GroupPublicKey,
    rng: &mut R,
) -> Result<UpdateKey> {
    check_public_key(params, mpk)?;
    check_group_key(params, gpk_old)?;
    check_group_key(params, gpk_new)?;
    check_version(gpk_old.ver + 1, gpk_new.ver)?;
    let p = params.zp();
    let (n, m, l1, h) = (params.n, params.m, params.l1, params.h());
    let z = version_preimage(params, msk, mpk, gpk_old, rng)?.clone();
    let cu_new = mpk.c.add(&gpk_new.u)?;
    let noise = CenteredSampler::new(params.sigma2)?;
    let cols = m + l1;
    let rows = h * m + l1;
    let mut data = Vec::with_capacity(rows * cols);
    let mut left = vec![0u128; m];
    let mut right = vec![0u128; l1];
    let mut z_row = vec![0u64; l1];
    for j in 0..m {
        for (slot, &v) in z_row.iter_mut().zip(z.row(j)) {
            *slot = p.from_i64(v);
        }
        for _ in 0..h {
            let e1: Vec<u64> = (0..n).map(|_| p.sample(rng)).collect();
            row_combination(&p, &e1, &mpk.a, &mut left);
            row_combination(&p, &e1, &cu_new, &mut right);
            for a in &left {
                let e2 = noise.sample(rng)?;
                data.push(p.add(&p.reduce_u128(*a), &p.from_i64(e2)));
            }
            for (a, zb) in right.iter().zip(z_row.iter_mut()) {
                let e3 = noise.sample(rng)?;
                let v = p.add(&p.reduce_u128(*a), &p.from_i64(e3));
                data.push(p.sub(&v, zb));
                *zb = p.add(zb, zb);
            }
        }
    }
    for i in 0..l1 {
        data.extend(std::iter::repeat_n(0, m));
        data.extend((0..l1).map(|c| u64::from(c == i)));
    }
    Ok(UpdateKey {
        to_ver: gpk_new.ver,
        matrix: ZpMatrix::new(p, rows, cols, data)?,
    })
}

/// Re-encrypts `ct` to `uptk.to_ver`: `(BitD(c1)ᵀ, c2ᵀ)·M`.
pub fn ct_update(params: &Params, uptk: &UpdateKey, ct: &Ciphertext) -> Result<Ciphertext> {
    check_version(uptk.to_ver, ct.ver.saturating_add(1))?;
    if ct.update_count >= params.v_max {
        return Err(Error::UpdateBudget(params.v_max));
    }
    let p = params.zp();
    let (m, l1, h) = (params.m, params.l1, params.h());
    let mat = &uptk.matrix;
    if mat.rows() != h * m + l1 || mat.cols() != m + l1 || ct.c1.len() != m || ct.c2.len() != l1 {
        return Err(Error::Dimension("update key does not match ciphertext".into()));
    }
    let top = bitd_mul_top(&ct.c1, mat)?;
    let mut acc: Vec<u64> = top.into_entries();
    for (i, c) in ct.c2.entries().iter().enumerate() {
        for (a, v) in acc.iter_mut().zip(mat.row(h * m + i)) {
            *a = p.add(a, &p.mul(c, v));
        }
    }
    let c2 = ZpVector::new(p, acc.split_off(m))?;
    let c1 = ZpVector::new(p, acc)?;
    Ok(Ciphertext {
        ver: uptk.to_ver,
        c1,
        c2,
        update_count: ct.update_count + 1,
    })
}

/// Picks v_R in the nullspace of the revoked vectors that every other
/// registered identity sees as nonzero.
pub(super) fn revocation_vector<R: RngCore + ?Sized>(
    p: WordModulus,
    revoked: &[ZpVector],
    others: &[&ZpVector],
    l2: usize,
    rng: &mut R,
) -> Result<ZpVector> {
    let basis = nullspace_basis(p, revoked, l2)?;
    let first = basis.first().cloned().ok_or(Error::NoSolution)?;
    let usable = |v: &ZpVector| -> Result<bool> {
        if v.is_zero() {
            return Ok(false);
        }
        for id in others {
            if id.dot(v)? == 0 {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if usable(&first)? {
        return Ok(first);
    }
    for _ in 0..NULLSPACE_ATTEMPTS {
        let mut v = ZpVector::zeros(p, l2);
        for b in &basis {
            v = v.add(&b.scale(&p.sample(rng)))?;
        }
        if usable(&v)? {
            return Ok(v);
        }
    }
    Err(Error::DegenerateNullspace(NULLSPACE_ATTEMPTS))
}

/// Builds the update broadcast for function vector `x`, locking out every
/// identity in `revoked`.
#[allow(clippy::too_many_arguments)]
pub fn fupdate<R: RngCore + ?Sized>(
    params: &Params,
    mpk: &MasterPublicKey,
    gpk_new: &GroupPublicKey,
    gfk_old: &GroupFunctionKey,
    gfk_new: &GroupFunctionKey,
    x: &ZpVector,
    revoked: &[Vec<u8>],
    registry: &Registry,
    rng: &mut R,
) -> Result<UpdateInfo> {
    check_public_key(params, mpk)?;
    check_group_key(params, gpk_new)?;
    check_version(gfk_old.ver + 1, gfk_new.ver)?;
    check_version(gfk_new.ver, gpk_new.ver)?;
    if revoked.len() > params.big_n {
        return Err(Error::Capacity(format!(
            "{} revoked identities, at most {}",
            revoked.len(),
            params.big_n
        )));
    }
    let p = params.zp();
    let x = bounded_vector(p, x.entries(), params.l1, params.x_bound, "function vector")?;
    let revoked_vecs: Vec<ZpVector> = revoked.iter().map(|r| h1(r, &p, params.l2)).collect();
    let others: Vec<&ZpVector> = registry
        .identities()
        .filter(|(name, _)| !revoked.iter().any(|r| r.as_slice() == *name))
        .map(|(_, v)| v)
        .collect();
    let v_rx = revocation_vector(p, &revoked_vecs, &others, params.l2, rng)?;
    let k_t = p.sample(rng);
    let (upi1, upi2) = encrypt_q(params, &mpk.v, &gpk_new.f, &v_rx.scale(&k_t), rng)?;
    let delta = gfk_new.b.sub(&gfk_old.b)?.mul_vec(&to_signed(&x))?;
    let packed = pack_signed(&delta, params.pack_bound())?;
    let upi3 = h2(k_t, &p, params.t()).xor(&packed)?;
    Ok(UpdateInfo {
        x,
        to_ver: gfk_new.ver,
        upi1,
        upi2,
        upi3,
        v_rx,
    })
}

pub fn key_update(params: &Params, usk: &UserKey, fsk: &FunctionKey, upi: &UpdateInfo) -> Result<FunctionKey> {
    check_version(upi.to_ver, fsk.ver.saturating_add(1))?;
    if fsk.x != upi.x {
        return Err(Error::Domain("update info is for a different function vector".into()));
    }
    let p = params.zp();
    let denom = usk.id.dot(&upi.v_rx)?;
    let inv = p.inv(denom).ok_or(Error::Revoked)?;
    let (_, nu, _) = decrypt_q(params, usk, &upi.upi1, &upi.upi2)?;
    let k_t = p.mul(&nu, &inv);
    let bits = h2(k_t, &p, params.t()).xor(&upi.upi3)?;
    let delta = unpack_signed(&bits, params.pack_bound())
        .map_err(|e| Error::Corruption(format!("key delta: {e}")))?;
    if delta.len() != fsk.f.len() {
        return Err(Error::Corruption(format!("key delta has length {}", delta.len())));
    }
    Ok(FunctionKey {
        x: fsk.x.clone(),
        f: fsk.f.add(&delta)?,
        ver: upi.to_ver,
    })
}
