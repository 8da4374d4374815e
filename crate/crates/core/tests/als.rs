use ipfefr_core::als::{als_dec_traced, als_enc, als_keygen, als_setup, noise_budget};
use ipfefr_core::lattice::ZpVector;
use ipfefr_core::params::Params;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[test]
fn random_sweep_decrypts_within_budget() {
    for (name, trials) in [("micro", 400), ("toy", 100)] {
        let params = Params::profile(name).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        let keys = als_setup(&params, &mut rng).unwrap();
        let p = params.zp();
        let budget = noise_budget(&params) as i64;
        for _ in 0..trials {
            let xv: Vec<u64> = (0..params.l1).map(|_| rng.random_range(0..params.x_bound)).collect();
            let yv: Vec<u64> = (0..params.l1).map(|_| rng.random_range(0..params.y_bound)).collect();
            let sk = als_keygen(&params, &keys.msk, &ZpVector::new(p, xv.clone()).unwrap()).unwrap();
            let ct = als_enc(&params, &keys.mpk, &ZpVector::new(p, yv.clone()).unwrap(), &mut rng).unwrap();
            let d = als_dec_traced(&params, &sk, &ct).unwrap();
            let want: u64 = xv.iter().zip(&yv).map(|(a, b)| a * b).sum();
            assert_eq!(d.mu, want, "{name}");
            assert!(d.noise.abs() <= budget);
        }
    }
}

#[test]
fn public_key_matches_secret() {
    let params = Params::profile("micro").unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(32);
    let keys = als_setup(&params, &mut rng).unwrap();
    assert_eq!(keys.mpk.a.mul_int(&keys.msk).unwrap(), keys.mpk.u);
    assert!(keys.msk.inf_norm() as f64 <= params.rho1 * 12.0);
}
