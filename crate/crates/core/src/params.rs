//! Parameter derivation and validation.
//!
//! Widths σ and ρ follow the ρ_s convention. The constant C ≈ 1/√(2π)
//! converts between them and standard deviations. The two LWE instances
//! (over Z_p for ciphertexts and over Z_q for directory entries and update
//! broadcasts) carry separate noise rates α and α_q.

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gadgets::pack_width;
use crate::lattice::modular::{is_prime_u64, next_prime, pow_biguint, WORD_MODULUS_MAX};
use crate::lattice::{WideModulus, WordModulus, TAIL_CUT};
use crate::trapdoor::{predicted_s1, quality_bound_for, smoothing_parameter};
use crate::wire::codec::{Reader, Writer};

/// Stand-in constant for the ω(log n) requirements on ρ1 and ρ2.
pub const C_OMEGA: f64 = 1.0;

/// Default number of sequential ciphertext updates budgeted for.
pub const DEFAULT_V_MAX: u32 = 3;

/// The constant of the singular value bound, 1/√(2π).
pub fn c_const() -> f64 {
    1.0 / (2.0 * std::f64::consts::PI).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub n: usize,
    pub m: usize,
    pub l1: usize,
    pub l2: usize,
    /// Maximum number of registered identities.
    pub big_n: usize,
    pub p: u64,
    pub k: u32,
    /// Function vector entries lie in [0, X).
    pub x_bound: u64,
    /// Plaintext entries lie in [0, Y).
    pub y_bound: u64,
    pub rho1: f64,
    pub rho2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    /// Noise rate of the Z_p instance.
    pub alpha: f64,
    /// Noise rate of the Z_q instance.
    pub alpha_q: f64,
    pub v_max: u32,
    /// Safety factor applied to both correctness inequalities.
    pub margin: f64,
}

/// A violated constraint reported by [`Params::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub constraint: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.constraint, self.detail)
    }
}

fn sqrt(x: usize) -> f64 {
    (x as f64).sqrt()
}

fn log2(x: usize) -> f64 {
    (x as f64).log2()
}

/// ⌈log₂ p⌉.
fn ceil_log2(p: u64) -> usize {
    (64 - (p - 1).leading_zeros()) as usize
}

/// Lower bound on ρ1/ρ2 from the ω-requirements: the larger of c·log₂ n
/// and c·√(log₂ m).
fn omega_floor(n: usize, m: usize) -> f64 {
    (C_OMEGA * log2(n)).max(C_OMEGA * log2(m).sqrt())
}

/// Noise amplification of the Z_q decryption: l2·p·(1 + √m·ρ2).
fn g1(l2: usize, p: f64, m: usize, rho2: f64) -> f64 {
    l2 as f64 * p * (1.0 + sqrt(m) * rho2)
}

/// Noise amplification of the Z_p decryption, including `v_max`
/// ciphertext updates. One update adds `BitD(c1)ᵀ·E3` to c2 and
/// `E2ᵀ·BitD(c1)` to c1, and the updated key's preimage has width at most
/// √3·ρ1, giving a per-hop term l1·X·√(hm)·(1 + √3·√m·ρ1).
fn g2(l1: usize, x: u64, m: usize, h: usize, rho1: f64, v_max: u32) -> f64 {
    let (l1, x) = (l1 as f64, x as f64);
    let fresh = l1 * x + l1 * sqrt(m) * x * rho1;
    let hop = l1 * x * sqrt(h * m) * (1.0 + 3f64.sqrt() * sqrt(m) * rho1);
    fresh + v_max as f64 * hop
}

fn sigma_factor(m: usize, n: usize, l: usize) -> f64 {
    2.0 * c_const() * (sqrt(m) + sqrt(n) + sqrt(l))
}

/// Relative slack used when a strict inequality is met by construction.
const STRICT: f64 = 1.0 + 1e-9;

impl Params {
    pub fn q(&self) -> BigUint {
        pow_biguint(self.p, self.k)
    }

    pub fn h(&self) -> usize {
        ceil_log2(self.p)
    }

    /// K = l1·X·Y, the size of the inner-product range.
    pub fn big_k(&self) -> u64 {
        self.l1 as u64 * self.x_bound * self.y_bound
    }

    pub fn zp(&self) -> WordModulus {
        WordModulus::new(self.p).expect("validated modulus")
    }

    pub fn zq(&self) -> WideModulus {
        WideModulus::new(self.q()).expect("validated modulus")
    }

    /// ⌊p/K⌋, the plaintext scaling.
    pub fn delta(&self) -> u64 {
        self.p / self.big_k()
    }

    /// Strict bound on entries of (B_{ver+1} − B_ver)·x: 2·l1·X·ρ1·t_cut.
    pub fn pack_bound(&self) -> u64 {
        (2.0 * self.l1 as f64 * self.x_bound as f64 * self.rho1 * TAIL_CUT).ceil() as u64
    }

    /// Bits per packed entry.
    pub fn pack_width(&self) -> usize {
        pack_width(self.pack_bound())
    }

    /// Length of the masked key-delta broadcast, m·w.
    pub fn t(&self) -> usize {
        self.m * self.pack_width()
    }

    /// Derives the smallest admissible parameter set for the given sizes.
    pub fn derive(n: usize, l1: usize, big_n: usize, x: u64, y: u64, margin: f64) -> Result<Self> {
        Self::derive_with(n, l1, big_n, x, y, margin, DEFAULT_V_MAX)
    }

    pub fn derive_with(
        n: usize,
        l1: usize,
        big_n: usize,
        x: u64,
        y: u64,
        margin: f64,
        v_max: u32,
    ) -> Result<Self> {
        if n == 0 || l1 == 0 || big_n == 0 || x == 0 || y == 0 {
            return Err(Error::Parameter("sizes must be positive".into()));
        }
        if !(margin >= 1.0) {
            return Err(Error::Parameter(format!("margin {margin} below 1")));
        }
        let l2 = big_n + 1;
        let big_k = (l1 as u64)
            .checked_mul(x)
            .and_then(|v| v.checked_mul(y))
            .ok_or_else(|| Error::Parameter("K overflows".into()))?;
        let r = smoothing_parameter();
        let max_h = ceil_log2(WORD_MODULUS_MAX);
        for h in 2..=max_h {
            let m = 2 * n * h;
            let w = n * h;
            let rho1 = quality_bound_for(predicted_s1(m - w, w)).max(omega_floor(n, m));
            let rho2 = r.max(omega_floor(n, m));
            let gp = g2(l1, x, m, h, rho1, v_max);
            let sigma2_min = sigma_factor(m, n, l1) * 2.0 * sqrt(n);
            let p_min = 4.0 * big_k as f64 * margin * gp * sigma2_min * STRICT * STRICT;
            let lo = 2f64.powi(h as i32 - 1);
            let hi = 2f64.powi(h as i32);
            if p_min >= hi {
                continue;
            }
            let start = p_min.max(lo).ceil() as u64 + 1;
            let p = next_prime(start);
            if p as f64 >= hi || p > WORD_MODULUS_MAX {
                continue;
            }
            let pf = p as f64;
            let sigma2 = pf / (4.0 * big_k as f64 * margin * gp * STRICT);
            let alpha = sigma2 / (sigma_factor(m, n, l1) * pf);
            let gq = g1(l2, pf, m, rho2);
            let sigma1_min = sigma_factor(m, n, l2) * 2.0 * sqrt(n) * STRICT * STRICT;
            let mut k = 2u32;
            while pf.powi(k as i32 - 1) < 4.0 * margin * sigma1_min * gq {
                k += 1;
            }
            let sigma1 = pf.powi(k as i32 - 1) / (4.0 * margin * gq * STRICT);
            let q = pow_biguint(p, k).to_f64().unwrap_or(f64::INFINITY);
            let alpha_q = sigma1 / (sigma_factor(m, n, l2) * q);
            let params = Params {
                n,
                m,
                l1,
                l2,
                big_n,
                p,
                k,
                x_bound: x,
                y_bound: y,
                rho1,
                rho2,
                sigma1,
                sigma2,
                alpha,
                alpha_q,
                v_max,
                margin,
            };
            let violations = params.validate();
            if !violations.is_empty() {
                return Err(Error::Internal(format!(
                    "derived parameters fail validation: {}",
                    violations[0]
                )));
            }
            return Ok(params);
        }
        Err(Error::Infeasible(format!(
            "no prime below 2^{max_h} satisfies the correctness bounds"
        )))
    }

    /// Every violated constraint; empty when the set is usable with its
    /// correctness guarantees.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut fail = |constraint: &'static str, detail: String| {
            out.push(Violation { constraint, detail })
        };
        if self.n == 0 || self.l1 == 0 || self.big_n == 0 || self.x_bound == 0 || self.y_bound == 0 {
            fail("positive-sizes", "n, l1, N, X, Y must be positive".into());
            return out;
        }
        if self.l2 != self.big_n + 1 {
            fail("l2", format!("l2 = {} but N + 1 = {}", self.l2, self.big_n + 1));
        }
        if self.k < 2 {
            fail("k", format!("k = {} below 2", self.k));
        }
        if self.p < 3 || self.p > WORD_MODULUS_MAX || !is_prime_u64(self.p) {
            fail("p", format!("p = {} must be a prime in [3, 2^62]", self.p));
            return out;
        }
        if self.big_k() == 0 || self.big_k() > self.p {
            fail("K", format!("K = {} exceeds p", self.big_k()));
            return out;
        }
        let h = self.h();
        let (n, m, p) = (self.n, self.m, self.p as f64);
        let q = self.q().to_f64().unwrap_or(f64::INFINITY);
        let pk1 = p.powi(self.k as i32 - 1);

        let lhs1 = g1(self.l2, p, m, self.rho2) * self.sigma1 * self.margin;
        if !(lhs1 <= pk1 / 4.0) {
            fail(
                "noise-q",
                format!("l2·p·σ1 + l2·√m·p·ρ2·σ1 = {lhs1:.4e} > p^(k-1)/4 = {:.4e}", pk1 / 4.0),
            );
        }
        let big_k = self.big_k() as f64;
        let lhs2 = g2(self.l1, self.x_bound, m, h, self.rho1, self.v_max) * self.sigma2 * self.margin;
        if !(lhs2 <= p / (4.0 * big_k)) {
            fail(
                "noise-p",
                format!(
                    "l1·X·σ2 + l1·√m·X·ρ1·σ2 (with {} updates) = {lhs2:.4e} > p/(4K) = {:.4e}",
                    self.v_max,
                    p / (4.0 * big_k)
                ),
            );
        }
        if !(self.alpha * p > 2.0 * sqrt(n)) {
            fail("alpha-p", format!("α·p = {:.4} not above 2√n = {:.4}", self.alpha * p, 2.0 * sqrt(n)));
        }
        if !(self.alpha_q * q > 2.0 * sqrt(n)) {
            fail(
                "alpha-q",
                format!("α_q·q = {:.4} not above 2√n = {:.4}", self.alpha_q * q, 2.0 * sqrt(n)),
            );
        }
        if m < 2 * n * h {
            fail("m", format!("m = {m} below 2n⌈log₂ p⌉ = {}", 2 * n * h));
        }
        let floor = omega_floor(n, m);
        if !(self.rho1 >= floor) {
            fail("rho1-omega", format!("ρ1 = {:.3} below {floor:.3}", self.rho1));
        }
        if !(self.rho2 >= floor) {
            fail("rho2-omega", format!("ρ2 = {:.3} below {floor:.3}", self.rho2));
        }
        if m >= n * h {
            let bound = quality_bound_for(predicted_s1(m - n * h, n * h));
            if !(self.rho1 >= bound) {
                fail(
                    "rho1-trapdoor",
                    format!("ρ1 = {:.3} below the preimage quality bound {bound:.3}", self.rho1),
                );
            }
        }
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
        let s1 = sigma_factor(m, n, self.l2) * self.alpha_q * q;
        if !close(self.sigma1, s1) {
            fail("sigma1", format!("σ1 = {:.6e} but 2C·α_q·q·(√m+√n+√l2) = {s1:.6e}", self.sigma1));
        }
        let s2 = sigma_factor(m, n, self.l1) * self.alpha * p;
        if !close(self.sigma2, s2) {
            fail("sigma2", format!("σ2 = {:.6e} but 2C·α·p·(√m+√n+√l1) = {s2:.6e}", self.sigma2));
        }
        out
    }

    /// Named desk profiles: `micro`, `demo`, `toy` and `n64`.
    pub fn profile(name: &str) -> Result<Self> {
        match name {
            "micro" => Self::derive(4, 2, 3, 4, 4, 1.0),
            "demo" => Self::derive(4, 2, 4, 4, 4, 1.0),
            "toy" => Self::derive(16, 3, 3, 4, 4, 1.0),
            "n64" => Ok(Self::timing(5, 5)),
            other => Err(Error::Parameter(format!("unknown profile {other:?}"))),
        }
    }

    /// The n = 64 timing profile with a fixed 13-bit prime, k = 3 and
    /// X = Y = 8. Its modulus is far too small for the correctness
    /// inequalities; [`Params::validate`] reports which ones fail. It exists
    /// to time every algorithm at n = 64 within desk memory limits.
    pub fn timing(l1: usize, big_n: usize) -> Self {
        let (n, p, k, x, y) = (64usize, 8191u64, 3u32, 8u64, 8u64);
        let h = ceil_log2(p);
        let m = 2 * n * h;
        let l2 = big_n + 1;
        let rho1 = quality_bound_for(predicted_s1(m - n * h, n * h)).max(omega_floor(n, m));
        let rho2 = smoothing_parameter().max(omega_floor(n, m));
        let pf = p as f64;
        let alpha = 2.0 * sqrt(n) / pf * STRICT;
        let q = pow_biguint(p, k).to_f64().expect("small");
        let alpha_q = 2.0 * sqrt(n) / q * STRICT;
        Params {
            n,
            m,
            l1,
            l2,
            big_n,
            p,
            k,
            x_bound: x,
            y_bound: y,
            rho1,
            rho2,
            sigma1: sigma_factor(m, n, l2) * alpha_q * q,
            sigma2: sigma_factor(m, n, l1) * alpha * pf,
            alpha,
            alpha_q,
            v_max: 1,
            margin: 1.0,
        }
    }

    /// Canonical encoding, also the preimage of [`Params::hash`].
    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u64(self.n as u64)
            .u64(self.m as u64)
            .u64(self.l1 as u64)
            .u64(self.l2 as u64)
            .u64(self.big_n as u64)
            .u64(self.p)
            .u32(self.k)
            .u64(self.x_bound)
            .u64(self.y_bound)
            .f64(self.rho1)
            .f64(self.rho2)
            .f64(self.sigma1)
            .f64(self.sigma2)
            .f64(self.alpha)
            .f64(self.alpha_q)
            .u32(self.v_max)
            .f64(self.margin)
            // packing rule: bound = ⌈2·l1·X·ρ1·t_cut⌉, recorded explicitly
            .u64(self.pack_bound());
        w.finish()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let usize_field = |v: u64| usize::try_from(v).map_err(|_| Error::Format("size overflow".into()));
        let params = Params {
            n: usize_field(r.u64()?)?,
            m: usize_field(r.u64()?)?,
            l1: usize_field(r.u64()?)?,
            l2: usize_field(r.u64()?)?,
            big_n: usize_field(r.u64()?)?,
            p: r.u64()?,
            k: r.u32()?,
            x_bound: r.u64()?,
            y_bound: r.u64()?,
            rho1: r.f64()?,
            rho2: r.f64()?,
            sigma1: r.f64()?,
            sigma2: r.f64()?,
            alpha: r.f64()?,
            alpha_q: r.f64()?,
            v_max: r.u32()?,
            margin: r.f64()?,
        };
        let pack = r.u64()?;
        r.finish()?;
        if params.p < 3 || params.p > WORD_MODULUS_MAX || params.k < 1 || params.k > 8 {
            return Err(Error::Format("parameter moduli out of range".into()));
        }
        if params.l1 == 0 || params.x_bound == 0 || params.y_bound == 0 || params.big_k() > params.p {
            return Err(Error::Format("parameter sizes out of range".into()));
        }
        if pack != params.pack_bound() {
            return Err(Error::Format("packing bound does not match parameters".into()));
        }
        Ok(params)
    }

    /// SHA-256 of the canonical encoding; stamped on every wire object.
    pub fn hash(&self) -> [u8; 32] {
        Sha256::digest(self.encode()).into()
    }
}
