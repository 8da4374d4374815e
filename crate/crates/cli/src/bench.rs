//! Wall-clock timing of every algorithm at n = 64 over the three
//! (l1, N) configurations.

use std::fmt::Write as _;
use std::time::Instant;

use ipfefr_core::lattice::ZpVector;
use ipfefr_core::params::Params;
use ipfefr_core::scheme::{self, Registry};
use ipfefr_core::Result;
use rand::{Rng, RngCore};
use serde::Serialize;

pub const CONFIGS: [(usize, usize); 3] = [(5, 5), (5, 10), (10, 10)];

pub const ALGORITHMS: [&str; 11] = [
    "Setup",
    "GroupSetup",
    "UKeyGen",
    "FKeyGen",
    "Enc",
    "Dec",
    "GroupUpdate",
    "UptKeyGen",
    "CTUpdate",
    "FUpdate",
    "KeyUpdate",
];

#[derive(Clone, Debug, Serialize)]
pub struct Stats {
    pub median_ms: f64,
    /// Median absolute deviation from the median.
    pub mad_ms: f64,
    pub samples: Vec<f64>,
}

impl Stats {
    pub fn from_samples(samples: Vec<f64>) -> Self {
        let median_ms = median(&samples);
        let dev: Vec<f64> = samples.iter().map(|s| (s - median_ms).abs()).collect();
        Stats { median_ms, mad_ms: median(&dev), samples }
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigReport {
    pub n: usize,
    pub m: usize,
    pub l1: usize,
    pub big_n: usize,
    /// Timings in [`ALGORITHMS`] order.
    pub timings: Vec<(String, Stats)>,
}

impl ConfigReport {
    pub fn median(&self, alg: &str) -> f64 {
        self.timings.iter().find(|(a, _)| a == alg).map_or(f64::NAN, |(_, s)| s.median_ms)
    }

    pub fn slowest(&self) -> &str {
        self.timings
            .iter()
            .max_by(|a, b| a.1.median_ms.total_cmp(&b.1.median_ms))
            .map_or("", |(a, _)| a.as_str())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrdinalCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub repetitions: usize,
    pub configs: Vec<ConfigReport>,
}

impl BenchReport {
    fn config(&self, l1: usize, big_n: usize) -> Option<&ConfigReport> {
        self.configs.iter().find(|c| c.l1 == l1 && c.big_n == big_n)
    }

    /// The three ordinal relations the timings are expected to show.
    pub fn checks(&self) -> Vec<OrdinalCheck> {
        let slowest: Vec<&str> = self.configs.iter().map(ConfigReport::slowest).collect();
        let mut out = vec![OrdinalCheck {
            name: "uptkeygen-slowest",
            passed: !slowest.is_empty() && slowest.iter().all(|s| *s == "UptKeyGen"),
            detail: format!("slowest per config: {slowest:?}"),
        }];
        let ratios: Vec<f64> = self.configs.iter().map(|c| c.median("Dec") / c.median("Enc")).collect();
        out.push(OrdinalCheck {
            name: "dec-over-enc-10x",
            passed: !ratios.is_empty() && ratios.iter().all(|r| *r >= 10.0),
            detail: format!("Dec/Enc per config: {}", fmt_list(&ratios, 3)),
        });
        let (a, b) = (self.config(5, 5), self.config(5, 10));
        let (t5, t10) = (a.map_or(f64::NAN, |c| c.median("FUpdate")), b.map_or(f64::NAN, |c| c.median("FUpdate")));
        out.push(OrdinalCheck {
            name: "fupdate-grows-with-n",
            passed: t10 > t5,
            detail: format!("FUpdate l1=5: N=5 {t5:.3} ms, N=10 {t10:.3} ms"),
        });
        out
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{:<12}", "algorithm");
        for c in &self.configs {
            let _ = write!(s, " {:>24}", format!("l1={} N={} (ms)", c.l1, c.big_n));
        }
        s.push('\n');
        for alg in ALGORITHMS {
            let _ = write!(s, "{alg:<12}");
            for c in &self.configs {
                let st = &c.timings.iter().find(|(a, _)| a == alg).expect("all algorithms timed").1;
                let _ = write!(s, " {:>24}", format!("{:.3} ± {:.3}", st.median_ms, st.mad_ms));
            }
            s.push('\n');
        }
        for check in self.checks() {
            let _ = writeln!(s, "{} {}: {}", if check.passed { "PASS" } else { "FAIL" }, check.name, check.detail);
        }
        s
    }
}

fn fmt_list(v: &[f64], prec: usize) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.prec$}")).collect();
    format!("[{}]", items.join(", "))
}

fn timed<T>(samples: &mut [Vec<f64>], alg: usize, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    samples[alg].push(start.elapsed().as_secs_f64() * 1e3);
    out
}

/// Calls per sample for the millisecond-scale algorithms, whose single-call
/// times sit close to timer and scheduling noise.
pub const INNER: usize = 10;

/// Times `INNER` back-to-back calls and records the mean per call.
fn timed_mean<T>(samples: &mut [Vec<f64>], alg: usize, mut f: impl FnMut() -> T) -> T {
    let start = Instant::now();
    for _ in 1..INNER {
        std::hint::black_box(f());
    }
    let out = f();
    samples[alg].push(start.elapsed().as_secs_f64() * 1e3 / INNER as f64);
    out
}

fn random_vector<R: RngCore + ?Sized>(params: &Params, bound: u64, rng: &mut R) -> ZpVector {
    let v = (0..params.l1).map(|_| rng.random_range(0..bound)).collect();
    ZpVector::new(params.zp(), v).expect("entries below p")
}

/// One full lifecycle with every algorithm timed once. N identities are
/// registered and all but the first are revoked in FUpdate.
fn run_once<R: RngCore + ?Sized>(params: &Params, samples: &mut [Vec<f64>], rng: &mut R) -> Result<()> {
    let (mut msk, mpk, mut pd) = timed(samples, 0, || scheme::system_setup_unchecked(params, rng))?;
    let gk = timed(samples, 1, || scheme::group_setup(params, &mpk, rng))?;
    let mut registry = Registry::new(params.big_n);
    let names: Vec<Vec<u8>> = (0..params.big_n).map(|i| format!("member-{i}").into_bytes()).collect();
    let usk = timed_mean(samples, 2, || scheme::ukeygen(params, &gk.guk, &names[0], &mut registry))?;
    for name in &names[1..] {
        scheme::ukeygen(params, &gk.guk, name, &mut registry)?;
    }
    let x = random_vector(params, params.x_bound, rng);
    let y = random_vector(params, params.y_bound, rng);
    let fsk = timed(samples, 3, || scheme::fkeygen(params, &mut msk, &mpk, &gk.gpk, &x, &names[0], &mut pd, rng))?;
    let ct = timed_mean(samples, 4, || scheme::enc(params, &mpk, &gk.gpk, &y, rng))?;
    // The timing profile violates the noise inequalities, so the decoded
    // value is not meaningful here; only the work is measured.
    let _ = timed_mean(samples, 5, || scheme::dec(params, &ct, &usk, &fsk, &pd));
    let gk2 = timed_mean(samples, 6, || scheme::group_update(params, &mpk, &gk, rng))?;
    let uptk = timed(samples, 7, || scheme::uptkeygen(params, &mut msk, &mpk, &gk.gpk, &gk2.gpk, rng))?;
    timed(samples, 8, || scheme::ct_update(params, &uptk, &ct))?;
    drop(uptk);
    let upi = timed_mean(samples, 9, || {
        scheme::fupdate(params, &mpk, &gk2.gpk, &gk.gfk, &gk2.gfk, &x, &names[1..], &registry, rng)
    })?;
    let _ = timed_mean(samples, 10, || scheme::key_update(params, &usk, &fsk, &upi));
    Ok(())
}

/// Times every algorithm `reps` times per configuration.
pub fn run<R: RngCore + ?Sized>(reps: usize, configs: &[(usize, usize)], rng: &mut R) -> Result<BenchReport> {
    let mut reports = Vec::new();
    for &(l1, big_n) in configs {
        let params = Params::timing(l1, big_n);
        let mut samples = vec![Vec::new(); ALGORITHMS.len()];
        for _ in 0..reps.max(1) {
            run_once(&params, &mut samples, rng)?;
        }
        reports.push(ConfigReport {
            n: params.n,
            m: params.m,
            l1,
            big_n,
            timings: ALGORITHMS.iter().map(|a| a.to_string()).zip(samples.into_iter().map(Stats::from_samples)).collect(),
        });
    }
    Ok(BenchReport { repetitions: reps.max(1), configs: reports })
}
