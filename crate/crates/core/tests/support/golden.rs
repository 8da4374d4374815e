//! Fixed-seed lifecycle objects pinned under `tests/fixtures/golden`.
//! Set `IPFEFR_BLESS=1` to regenerate.

use std::path::PathBuf;

use ipfefr_core::lattice::ZpVector;
use ipfefr_core::params::Params;
use ipfefr_core::scheme::*;
use ipfefr_core::wire::{encode, encode_params};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

/// Fixed-seed micro-profile lifecycle whose serializations are pinned.
fn golden_objects() -> Vec<(&'static str, Vec<u8>)> {
    let pr = Params::profile("micro").unwrap();
    let r = &mut ChaCha20Rng::seed_from_u64(0x1f2e_3d4c);
    let (mut msk, mpk, mut pd) = system_setup(&pr, r).unwrap();
    let gk = group_setup(&pr, &mpk, r).unwrap();
    let mut reg = Registry::new(pr.big_n);
    let alice = ukeygen(&pr, &gk.guk, b"alice", &mut reg).unwrap();
    let _bob = ukeygen(&pr, &gk.guk, b"bob", &mut reg).unwrap();
    let x = ZpVector::from_i64s(pr.zp(), &[1, 3]);
    let y = ZpVector::from_i64s(pr.zp(), &[2, 2]);
    let fsk = fkeygen(&pr, &mut msk, &mpk, &gk.gpk, &x, b"alice", &mut pd, r).unwrap();
    let ct = enc(&pr, &mpk, &gk.gpk, &y, r).unwrap();
    let gk2 = group_update(&pr, &mpk, &gk, r).unwrap();
    let uptk = uptkeygen(&pr, &mut msk, &mpk, &gk.gpk, &gk2.gpk, r).unwrap();
    let ct2 = ct_update(&pr, &uptk, &ct).unwrap();
    let upi = fupdate(&pr, &mpk, &gk2.gpk, &gk.gfk, &gk2.gfk, &x, &[b"bob".to_vec()], &reg, r).unwrap();
    let fsk2 = key_update(&pr, &alice, &fsk, &upi).unwrap();
    assert_eq!(dec(&pr, &ct2, &alice, &fsk2, &pd).unwrap(), 8);
    vec![
        ("params", encode_params(&pr)),
        ("mpk", encode(&mpk, &pr)),
        ("msk", encode(&msk, &pr)),
        ("guk", encode(&gk.guk, &pr)),
        ("gfk", encode(&gk.gfk, &pr)),
        ("gpk", encode(&gk.gpk, &pr)),
        ("usk", encode(&alice, &pr)),
        ("fsk", encode(&fsk, &pr)),
        ("ct", encode(&ct, &pr)),
        ("pd", encode(&pd, &pr)),
        ("pd_entry", encode(pd.get(&x).unwrap(), &pr)),
        ("registry", encode(&reg, &pr)),
        ("uptk", encode(&uptk, &pr)),
        ("ct_v2", encode(&ct2, &pr)),
        ("upi", encode(&upi, &pr)),
        ("fsk_v2", encode(&fsk2, &pr)),
    ]
}

/// Objects above this size are pinned by SHA-256 instead of committed.
const INLINE_LIMIT: usize = 1 << 20;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/golden")
}

/// Compares against the committed fixtures, or rewrites them when
/// `IPFEFR_BLESS` is set. Returns the names that differ.
pub fn mismatches() -> Vec<String> {
    let dir = fixture_dir();
    let bless = std::env::var_os("IPFEFR_BLESS").is_some();
    if bless {
        std::fs::create_dir_all(&dir).unwrap();
    }
    let mut bad = Vec::new();
    for (name, bytes) in golden_objects() {
        let (path, body) = if bytes.len() > INLINE_LIMIT {
            let digest = Sha256::digest(&bytes);
            let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
            (dir.join(format!("{name}.sha256")), format!("{hex}\n").into_bytes())
        } else {
            (dir.join(format!("{name}.bin")), bytes)
        };
        if bless {
            std::fs::write(&path, &body).unwrap();
        } else if std::fs::read(&path).ok().as_deref() != Some(body.as_slice()) {
            bad.push(name.to_string());
        }
    }
    bad
}
