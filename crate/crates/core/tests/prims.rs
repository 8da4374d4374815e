use std::collections::HashSet;

use ipfefr_core::lattice::{WordModulus, ZpVector};
use ipfefr_core::prims::{h1, h2, prf_eval, PrfKey};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const BUCKETS: usize = 16;

fn bucket_counts(values: impl Iterator<Item = u64>, p: u64) -> [u64; BUCKETS] {
    let mut counts = [0u64; BUCKETS];
    for v in values {
        counts[(v as u128 * BUCKETS as u128 / p as u128) as usize] += 1;
    }
    counts
}

fn assert_uniform(counts: &[u64]) {
    let total: u64 = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    let limit = ChiSquared::new((counts.len() - 1) as f64).unwrap().inverse_cdf(0.999);
    assert!(stat < limit, "chi-square {stat} over {limit}: {counts:?}");
}

#[test]
fn identity_hash_is_injective_and_uniform_on_corpus() {
    let p = WordModulus::new(212_578_770_281).unwrap();
    let vecs: Vec<ZpVector> = (0..2000).map(|i| h1(format!("clinic-{i}").as_bytes(), &p, 4)).collect();
    let distinct: HashSet<Vec<u64>> = vecs.iter().map(|v| v.entries().to_vec()).collect();
    assert_eq!(distinct.len(), vecs.len());
    assert!(vecs.iter().all(|v| !v.is_zero()));
    assert_uniform(&bucket_counts(vecs.iter().flat_map(|v| v.entries().to_vec()), p.get()));
    assert_eq!(h1(b"clinic-7", &p, 4), vecs[7]);
}

#[test]
fn prf_outputs_look_uniform_and_depend_on_both_inputs() {
    let p = WordModulus::new(8191).unwrap();
    let k1 = PrfKey::new(17, &p).unwrap();
    let k2 = PrfKey::new(18, &p).unwrap();
    let mut outputs = Vec::new();
    for a in 0..40 {
        for b in 0..40 {
            let x = ZpVector::from_i64s(p, &[a, b]);
            let t = prf_eval(&k1, &x, 3);
            assert_eq!(t, prf_eval(&k1, &x, 3));
            assert_ne!(t, prf_eval(&k2, &x, 3));
            outputs.push(t);
        }
    }
    let distinct: HashSet<Vec<u64>> = outputs.iter().map(|v| v.entries().to_vec()).collect();
    assert_eq!(distinct.len(), outputs.len());
    assert_uniform(&bucket_counts(outputs.iter().flat_map(|v| v.entries().to_vec()), p.get()));
    assert!(PrfKey::new(8191, &p).is_err());
}

#[test]
fn mask_bits_are_balanced() {
    let p = WordModulus::new(212_578_770_281).unwrap();
    let t = 5168;
    let mut ones = 0usize;
    let mut total = 0usize;
    let mut prev = h2(0, &p, t);
    for k in 1..200u64 {
        let bits = h2(k, &p, t);
        assert_eq!(bits.len(), t);
        assert_ne!(bits, prev);
        ones += bits.weight();
        total += t;
        prev = bits;
    }
    let rate = ones as f64 / total as f64;
    // 5 standard deviations of a fair-coin rate over ~10^6 bits
    assert!((rate - 0.5).abs() < 5.0 * 0.5 / (total as f64).sqrt(), "{rate}");
    assert_eq!(h2(3, &p, t), h2(3 + p.get(), &p, t));
}
