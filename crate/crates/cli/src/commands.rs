//! One function per role command. Each opens the keystore, checks the
//! command's preconditions, calls into the scheme and persists the results.

use std::path::Path;

use ipfefr_core::lattice::ZpVector;
use ipfefr_core::params::Params;
use ipfefr_core::scheme::{self, GroupKeys, GroupUserKey, MasterPublicKey, MasterSecretKey, PublicDirectory, Registry};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::keystore::*;

/// What a command reports: a human line and a JSON object.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub json: Value,
}

impl Outcome {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Outcome { text: text.into(), json }
    }
}

fn open(store: &Path, profile: Option<&str>) -> CliResult<Keystore> {
    let ks = Keystore::open(store)?;
    if let Some(name) = profile {
        if name != ks.manifest.profile {
            return Err(CliError::store(
                "params-mismatch",
                format!("store uses profile {:?}, not {name:?}", ks.manifest.profile),
            ));
        }
    }
    Ok(ks)
}

fn require_group(ks: &Keystore) -> CliResult<u32> {
    match ks.manifest.version {
        0 => Err(CliError::store("no-group", "run `gm group-setup` first")),
        v => Ok(v),
    }
}

fn require_update(ks: &Keystore) -> CliResult<u32> {
    match require_group(ks)? {
        1 => Err(CliError::store("no-update", "run `gm group-update` first")),
        v => Ok(v),
    }
}

fn require_identity(ks: &Keystore, identity: &str) -> CliResult<()> {
    if ks.manifest.identities.iter().any(|i| i == identity) {
        Ok(())
    } else {
        Err(CliError::store("unknown-identity", format!("{identity:?} is not registered")))
    }
}

fn vector(params: &Params, v: &[u64], len: usize, what: &str) -> CliResult<ZpVector> {
    if v.len() != len {
        return Err(CliError::Usage(format!("{what} needs {len} entries, got {}", v.len())));
    }
    ZpVector::new(params.zp(), v.to_vec()).map_err(|e| CliError::Usage(format!("{what}: {e}")))
}

pub fn check_ct_name(name: &str) -> CliResult<()> {
    let ok = !name.is_empty()
        && !name.starts_with('.')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c));
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(format!("invalid ciphertext name {name:?}")))
    }
}

fn group_keys(ks: &Keystore, ver: u32) -> CliResult<GroupKeys> {
    Ok(GroupKeys {
        guk: ks.read::<GroupUserKey>("gm/guk.ipf")?,
        gfk: ks.read(&gfk_path(ver))?,
        gpk: ks.read(&gpk_path(ver))?,
    })
}

pub fn setup(store: &Path, profile: Option<&str>, rng: &mut ChaCha20Rng) -> CliResult<Outcome> {
    let name = profile.unwrap_or("micro");
    let params = Params::profile(name).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut ks = Keystore::create(store, name, params)?;
    let params = ks.params().clone();
    let (msk, mpk, pd) = scheme::system_setup(&params, rng)?;
    ks.write("ca/msk.ipf", &msk)?;
    ks.write("ca/mpk.ipf", &mpk)?;
    ks.write("ca/pd.ipf", &pd)?;
    ks.save()?;
    Ok(Outcome::new(
        format!("initialized {} with profile {name} (n={}, m={}, p={})", store.display(), params.n, params.m, params.p),
        json!({ "command": "setup", "profile": name, "params_hash": ks.manifest.params_hash }),
    ))
}

pub fn group_setup(store: &Path, profile: Option<&str>, rng: &mut ChaCha20Rng) -> CliResult<Outcome> {
    let mut ks = open(store, profile)?;
    if ks.manifest.version != 0 {
        return Err(CliError::store("group-exists", "group is already set up"));
    }
    let mpk: MasterPublicKey = ks.read("ca/mpk.ipf")?;
    let gk = scheme::group_setup(ks.params(), &mpk, rng)?;
    ks.write("gm/guk.ipf", &gk.guk)?;
    ks.write(&gfk_path(1), &gk.gfk)?;
    ks.write(&gpk_path(1), &gk.gpk)?;
    ks.write("gm/registry.ipf", &Registry::new(ks.params().big_n))?;
    ks.manifest.version = 1;
    ks.save()?;
    Ok(Outcome::new("group set up at version 1", json!({ "command": "group-setup", "version": 1 })))
}

pub fn ukeygen(store: &Path, profile: Option<&str>, identity: &str) -> CliResult<Outcome> {
    let mut ks = open(store, profile)?;
    require_group(&ks)?;
    let guk: GroupUserKey = ks.read("gm/guk.ipf")?;
    let mut registry: Registry = ks.read("gm/registry.ipf")?;
    let usk = scheme::ukeygen(ks.params(), &guk, identity.as_bytes(), &mut registry)?;
    ks.write(&usk_path(identity), &usk)?;
    ks.write("gm/registry.ipf", &registry)?;
    if !ks.manifest.identities.iter().any(|i| i == identity) {
        ks.manifest.identities.push(identity.to_string());
    }
    ks.save()?;
    Ok(Outcome::new(
        format!("issued user key for {identity:?}"),
        json!({ "command": "ukeygen", "identity": identity }),
    ))
}

pub fn fkeygen(
    store: &Path,
    profile: Option<&str>,
    identity: &str,
    x: &[u64],
    rng: &mut ChaCha20Rng,
) -> CliResult<Outcome> {
    let mut ks = open(store, profile)?;
    let ver = require_group(&ks)?;
    require_identity(&ks, identity)?;
    let params = ks.params().clone();
    let xv = vector(&params, x, params.l1, "x")?;
    let mut msk: MasterSecretKey = ks.read("ca/msk.ipf")?;
    let mpk: MasterPublicKey = ks.read("ca/mpk.ipf")?;
    let mut pd: PublicDirectory = ks.read("ca/pd.ipf")?;
    let gpk = ks.read(&gpk_path(ver))?;
    let fsk = scheme::fkeygen(&params, &mut msk, &mpk, &gpk, &xv, identity.as_bytes(), &mut pd, rng)?;
    ks.write("ca/msk.ipf", &msk)?;
    ks.write("ca/pd.ipf", &pd)?;
    ks.write(&fsk_path(identity, x), &fsk)?;
    match ks.manifest.function_mut(identity, x) {
        Some(rec) => rec.version = ver,
        None => ks.manifest.functions.push(FunctionRecord { identity: identity.into(), x: x.to_vec(), version: ver }),
    }
    ks.save()?;
    Ok(Outcome::new(
        format!("issued function key {} for {identity:?} at version {ver}", vector_label(x)),
        json!({ "command": "fkeygen", "identity": identity, "x": x, "version": ver }),
    ))
}

pub fn enc(store: &Path, profile: Option<&str>, y: &[u64], name: &str, rng: &mut ChaCha20Rng) -> CliResult<Outcome> {
    check_ct_name(name)?;
    let mut ks = open(store, profile)?;
    let ver = require_group(&ks)?;
    let params = ks.params().clone();
    let yv = vector(&params, y, params.l1, "y")?;
    let mpk: MasterPublicKey = ks.read("ca/mpk.ipf")?;
    let gpk = ks.read(&gpk_path(ver))?;
    let ct = scheme::enc(&params, &mpk, &gpk, &yv, rng)?;
    ks.write(&ct_path(name), &ct)?;
    ks.manifest.ciphertexts.insert(name.to_string(), ver);
    ks.save()?;
    Ok(Outcome::new(
        format!("encrypted {name} at version {ver}"),
        json!({ "command": "enc", "ciphertext": name, "version": ver }),
    ))
}

pub fn dec(store: &Path, profile: Option<&str>, identity: &str, x: &[u64], name: &str) -> CliResult<Outcome> {
    check_ct_name(name)?;
    let ks = open(store, profile)?;
    require_identity(&ks, identity)?;
    let usk = ks.read(&usk_path(identity))?;
    let fsk = ks.read(&fsk_path(identity, x))?;
    let ct = ks.read(&ct_path(name))?;
    let pd = ks.read("ca/pd.ipf")?;
    let value = scheme::dec(ks.params(), &ct, &usk, &fsk, &pd)?;
    Ok(Outcome::new(value.to_string(), json!({ "command": "dec", "ciphertext": name, "value": value })))
}

pub fn group_update(store: &Path, profile: Option<&str>, rng: &mut ChaCha20Rng) -> CliResult<Outcome> {
    let mut ks = open(store, profile)?;
    let ver = require_group(&ks)?;
    let mpk: MasterPublicKey = ks.read("ca/mpk.ipf")?;
    let gk = group_keys(&ks, ver)?;
    let next = scheme::group_update(ks.params(), &mpk, &gk, rng)?;
    let new_ver = next.ver();
    ks.write(&gfk_path(new_ver), &next.gfk)?;
    ks.write(&gpk_path(new_ver), &next.gpk)?;
    ks.manifest.version = new_ver;
    ks.save()?;
    Ok(Outcome::new(
        format!("group moved to version {new_ver}"),
        json!({ "command": "group-update", "version": new_ver }),
    ))
}

pub fn uptkeygen(store: &Path, profile: Option<&str>, rng: &mut ChaCha20Rng) -> CliResult<Outcome> {
    let ks = open(store, profile)?;
    let ver = require_update(&ks)?;
    let mut msk: MasterSecretKey = ks.read("ca/msk.ipf")?;
    let mpk: MasterPublicKey = ks.read("ca/mpk.ipf")?;
    let old = ks.read(&gpk_path(ver - 1))?;
    let new = ks.read(&gpk_path(ver))?;
    let uptk = scheme::uptkeygen(ks.params(), &mut msk, &mpk, &old, &new, rng)?;
    ks.write("ca/msk.ipf", &msk)?;
    ks.write(&uptk_path(ver), &uptk)?;
    Ok(Outcome::new(
        format!("update key for version {} -> {ver} written", ver - 1),
        json!({ "command": "uptkeygen", "version": ver }),
    ))
}

pub fn ct_update(store: &Path, profile: Option<&str>, name: &str) -> CliResult<Outcome> {
    check_ct_name(name)?;
    let mut ks = open(store, profile)?;
    let ct: scheme::Ciphertext = ks.read(&ct_path(name))?;
    let target = ct.ver.saturating_add(1);
    if target > ks.manifest.version {
        return Err(CliError::Scheme(ipfefr_core::Error::VersionMismatch {
            expected: ks.manifest.version,
            found: target,
        }));
    }
    let uptk = ks.read(&uptk_path(target))?;
    let updated = scheme::ct_update(ks.params(), &uptk, &ct)?;
    ks.write(&ct_path(name), &updated)?;
    ks.manifest.ciphertexts.insert(name.to_string(), updated.ver);
    ks.save()?;
    Ok(Outcome::new(
        format!("{name} moved to version {}", updated.ver),
        json!({ "command": "ct-update", "ciphertext": name, "version": updated.ver }),
    ))
}

pub fn fupdate(
    store: &Path,
    profile: Option<&str>,
    x: &[u64],
    revoke: &[String],
    rng: &mut ChaCha20Rng,
) -> CliResult<Outcome> {
    let mut ks = open(store, profile)?;
    let ver = require_update(&ks)?;
    for id in revoke {
        require_identity(&ks, id)?;
    }
    let params = ks.params().clone();
    let xv = vector(&params, x, params.l1, "x")?;
    let mpk: MasterPublicKey = ks.read("ca/mpk.ipf")?;
    let registry: Registry = ks.read("gm/registry.ipf")?;
    let gfk_old = ks.read(&gfk_path(ver - 1))?;
    let gfk_new = ks.read(&gfk_path(ver))?;
    let gpk_new = ks.read(&gpk_path(ver))?;
    let revoked: Vec<Vec<u8>> = revoke.iter().map(|s| s.as_bytes().to_vec()).collect();
    let upi = scheme::fupdate(&params, &mpk, &gpk_new, &gfk_old, &gfk_new, &xv, &revoked, &registry, rng)?;
    ks.write(&upi_path(ver, x), &upi)?;
    ks.manifest.revocations.push(Revocation { version: ver, x: x.to_vec(), identities: revoke.to_vec() });
    ks.save()?;
    Ok(Outcome::new(
        format!("update info for {} at version {ver} revoking {revoke:?}", vector_label(x)),
        json!({ "command": "fupdate", "x": x, "version": ver, "revoked": revoke }),
    ))
}

pub fn key_update(store: &Path, profile: Option<&str>, identity: &str, x: &[u64]) -> CliResult<Outcome> {
    let mut ks = open(store, profile)?;
    require_identity(&ks, identity)?;
    let usk = ks.read(&usk_path(identity))?;
    let fsk: scheme::FunctionKey = ks.read(&fsk_path(identity, x))?;
    let target = fsk.ver.saturating_add(1);
    let upi = ks.read(&upi_path(target, x))?;
    let updated = scheme::key_update(ks.params(), &usk, &fsk, &upi)?;
    ks.write(&fsk_path(identity, x), &updated)?;
    if let Some(rec) = ks.manifest.function_mut(identity, x) {
        rec.version = updated.ver;
    }
    ks.save()?;
    Ok(Outcome::new(
        format!("function key {} for {identity:?} moved to version {}", vector_label(x), updated.ver),
        json!({ "command": "key-update", "identity": identity, "x": x, "version": updated.ver }),
    ))
}
