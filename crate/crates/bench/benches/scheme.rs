use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ipfefr_core::lattice::ZpVector;
use ipfefr_core::params::Params;
use ipfefr_core::scheme::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

struct Fixture {
    params: Params,
    msk: MasterSecretKey,
    mpk: MasterPublicKey,
    pd: PublicDirectory,
    gk: GroupKeys,
    next: GroupKeys,
    registry: Registry,
    usk: UserKey,
    fsk: FunctionKey,
    x: ZpVector,
    y: ZpVector,
    ct: Ciphertext,
}

fn fixture(params: Params, rng: &mut ChaCha20Rng) -> Fixture {
    let (mut msk, mpk, mut pd) = system_setup_unchecked(&params, rng).unwrap();
    let gk = group_setup(&params, &mpk, rng).unwrap();
    let mut registry = Registry::new(params.big_n);
    let usk = ukeygen(&params, &gk.guk, b"member-0", &mut registry).unwrap();
    for i in 1..params.big_n {
        ukeygen(&params, &gk.guk, format!("member-{i}").as_bytes(), &mut registry).unwrap();
    }
    let x = ZpVector::from_i64s(params.zp(), &vec![1; params.l1]);
    let y = ZpVector::from_i64s(params.zp(), &vec![2; params.l1]);
    let fsk = fkeygen(&params, &mut msk, &mpk, &gk.gpk, &x, b"member-0", &mut pd, rng).unwrap();
    let ct = enc(&params, &mpk, &gk.gpk, &y, rng).unwrap();
    let next = group_update(&params, &mpk, &gk, rng).unwrap();
    Fixture { params, msk, mpk, pd, gk, next, registry, usk, fsk, x, y, ct }
}

fn per_operation(c: &mut Criterion) {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for name in ["micro", "toy"] {
        let mut f = fixture(Params::profile(name).unwrap(), &mut rng);
        let mut g = c.benchmark_group(format!("scheme/{name}"));
        g.sample_size(10);
        g.bench_function("enc", |b| b.iter(|| enc(&f.params, &f.mpk, &f.gk.gpk, &f.y, &mut rng).unwrap()));
        g.bench_function("dec", |b| b.iter(|| dec(&f.params, &f.ct, &f.usk, &f.fsk, &f.pd).unwrap()));
        g.bench_function("fkeygen", |b| {
            b.iter(|| fkeygen(&f.params, &mut f.msk, &f.mpk, &f.gk.gpk, &f.x, b"member-0", &mut f.pd, &mut rng).unwrap())
        });
        g.bench_function("group_update", |b| b.iter(|| group_update(&f.params, &f.mpk, &f.gk, &mut rng).unwrap()));
        let revoked = vec![b"member-1".to_vec()];
        let upi = fupdate(&f.params, &f.mpk, &f.next.gpk, &f.gk.gfk, &f.next.gfk, &f.x, &revoked, &f.registry, &mut rng)
            .unwrap();
        g.bench_function("fupdate", |b| {
            b.iter(|| {
                fupdate(&f.params, &f.mpk, &f.next.gpk, &f.gk.gfk, &f.next.gfk, &f.x, &revoked, &f.registry, &mut rng)
                    .unwrap()
            })
        });
        g.bench_function("key_update", |b| b.iter(|| key_update(&f.params, &f.usk, &f.fsk, &upi).unwrap()));
        if name == "micro" {
            let uptk = uptkeygen(&f.params, &mut f.msk, &f.mpk, &f.gk.gpk, &f.next.gpk, &mut rng).unwrap();
            g.bench_function("ct_update", |b| b.iter(|| ct_update(&f.params, &uptk, &f.ct).unwrap()));
            g.bench_function("uptkeygen", |b| {
                b.iter(|| uptkeygen(&f.params, &mut f.msk, &f.mpk, &f.gk.gpk, &f.next.gpk, &mut rng).unwrap())
            });
        }
        g.finish();
    }
}

fn timing_profile(c: &mut Criterion) {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let mut g = c.benchmark_group("scheme/n64");
    g.sample_size(10);
    for (l1, big_n) in [(5, 5), (5, 10), (10, 10)] {
        let f = fixture(Params::timing(l1, big_n), &mut rng);
        let id = format!("l1={l1},N={big_n}");
        g.bench_with_input(BenchmarkId::new("enc", &id), &f, |b, f| {
            b.iter(|| enc(&f.params, &f.mpk, &f.gk.gpk, &f.y, &mut rng).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("dec", &id), &f, |b, f| {
            b.iter(|| dec(&f.params, &f.ct, &f.usk, &f.fsk, &f.pd))
        });
        let revoked: Vec<Vec<u8>> = (1..big_n).map(|i| format!("member-{i}").into_bytes()).collect();
        g.bench_with_input(BenchmarkId::new("fupdate", &id), &f, |b, f| {
            b.iter(|| {
                fupdate(&f.params, &f.mpk, &f.next.gpk, &f.gk.gfk, &f.next.gfk, &f.x, &revoked, &f.registry, &mut rng)
                    .unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, per_operation, timing_profile);
criterion_main!(benches);
