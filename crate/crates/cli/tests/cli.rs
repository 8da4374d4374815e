use std::path::Path;
use std::process::{Command, Output};

use ipfefr_cli::keystore::{Keystore, Manifest, MANIFEST};
use ipfefr_core::scheme::{Ciphertext, FunctionKey, MasterPublicKey, MasterSecretKey, PublicDirectory, UserKey};
use tempfile::TempDir;

struct Store {
    dir: TempDir,
    seed: &'static str,
}

impl Store {
    fn new(seed: &'static str) -> Self {
        Store { dir: TempDir::new().unwrap(), seed }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_ipfefr"))
            .args(args)
            .arg("--store")
            .arg(self.path())
            .args(["--seed", self.seed])
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    }

    /// Runs a command expected to fail; returns the exit code and stderr.
    fn fail(&self, args: &[&str]) -> (i32, String) {
        let out = self.run(args);
        assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
        (out.status.code().unwrap(), String::from_utf8(out.stderr).unwrap())
    }

    fn dec(&self, id: &str, x: &str, ct: &str) -> u64 {
        self.ok(&["mi", "dec", "--id", id, "--x", x, "--ct", ct]).trim().parse().unwrap()
    }

    fn manifest(&self) -> Manifest {
        serde_json::from_slice(&std::fs::read(self.path().join(MANIFEST)).unwrap()).unwrap()
    }
}

fn inner(x: &[u64], y: &[u64]) -> u64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn csv(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// Every object file in the store decodes under the manifest's parameters
/// and no temporary files are left behind.
fn assert_consistent(store: &Store) {
    let ks = Keystore::open(store.path()).unwrap();
    let mut stack = vec![store.path().to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            let name = path.file_name().unwrap().to_str().unwrap().to_string();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            assert!(name == MANIFEST || name == ".lock" || name.ends_with(".ipf"), "stray file {name}");
            let rel = path.strip_prefix(store.path()).unwrap().to_str().unwrap().to_string();
            let decoded = match name.as_str() {
                "msk.ipf" => ks.read::<MasterSecretKey>(&rel).map(drop),
                "mpk.ipf" => ks.read::<MasterPublicKey>(&rel).map(drop),
                "pd.ipf" => ks.read::<PublicDirectory>(&rel).map(drop),
                "usk.ipf" => ks.read::<UserKey>(&rel).map(drop),
                n if n.starts_with("fsk-") => ks.read::<FunctionKey>(&rel).map(drop),
                _ if rel.starts_with("cs/ct/") => ks.read::<Ciphertext>(&rel).map(drop),
                _ => Ok(()),
            };
            decoded.unwrap_or_else(|e| panic!("{rel}: {e}"));
        }
    }
}

#[test]
fn scripted_scenario_prints_inner_product() {
    let s = Store::new("a1");
    s.ok(&["ca", "setup", "--profile", "micro"]);
    s.ok(&["gm", "group-setup"]);
    for id in ["alice", "bob"] {
        s.ok(&["gm", "ukeygen", "--id", id]);
    }
    let (xa, xb, y) = ([1u64, 3], [2u64, 0], [3u64, 2]);
    s.ok(&["ca", "fkeygen", "--id", "alice", "--x", &csv(&xa)]);
    s.ok(&["ca", "fkeygen", "--id", "bob", "--x", &csv(&xb)]);
    s.ok(&["eh", "enc", "--y", &csv(&y), "--out", "record"]);
    assert_eq!(s.dec("alice", &csv(&xa), "record"), inner(&xa, &y));
    assert_eq!(s.dec("bob", &csv(&xb), "record"), inner(&xb, &y));

    let json: serde_json::Value =
        serde_json::from_str(&s.ok(&["mi", "dec", "--id", "bob", "--x", "2,0", "--ct", "record", "--json"])).unwrap();
    assert_eq!(json["value"], inner(&xb, &y));
    assert_consistent(&s);
}

#[test]
fn revocation_scenario_and_stale_version() {
    let s = Store::new("b2");
    s.ok(&["ca", "setup"]);
    s.ok(&["gm", "group-setup"]);
    for id in ["id1", "id2"] {
        s.ok(&["gm", "ukeygen", "--id", id]);
        s.ok(&["ca", "fkeygen", "--id", id, "--x", "2,1"]);
    }
    s.ok(&["eh", "enc", "--y", "3,3", "--out", "c"]);
    s.ok(&["gm", "group-update"]);
    s.ok(&["ca", "uptkeygen"]);
    s.ok(&["cs", "ct-update", "--ct", "c"]);

    let (code, err) = s.fail(&["mi", "dec", "--id", "id1", "--x", "2,1", "--ct", "c"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: version-mismatch:"), "{err}");

    s.ok(&["gm", "fupdate", "--x", "2,1", "--revoke", "id2"]);
    s.ok(&["mi", "key-update", "--id", "id1", "--x", "2,1"]);
    assert_eq!(s.dec("id1", "2,1", "c"), 9);
    let (code, err) = s.fail(&["mi", "key-update", "--id", "id2", "--x", "2,1"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: revoked:"), "{err}");

    let m = s.manifest();
    assert_eq!(m.version, 2);
    assert_eq!(m.revocations.len(), 1);
    assert_eq!(m.revocations[0].identities, ["id2"]);
    assert_eq!(m.ciphertexts["c"], 2);
    assert_consistent(&s);
}

#[test]
fn preconditions_map_to_exit_codes() {
    let s = Store::new("c3");
    let (code, err) = s.fail(&["gm", "group-setup"]);
    assert_eq!((code, err.starts_with("error: no-store:")), (2, true), "{err}");
    let (code, _) = s.fail(&["ca", "setup", "--profile", "huge"]);
    assert_eq!(code, 1);
    let (code, _) = s.fail(&["ca", "frobnicate"]);
    assert_eq!(code, 1);

    s.ok(&["ca", "setup"]);
    let (code, err) = s.fail(&["ca", "setup"]);
    assert_eq!((code, err.starts_with("error: store-exists:")), (2, true), "{err}");
    let (code, err) = s.fail(&["gm", "ukeygen", "--id", "a"]);
    assert_eq!((code, err.starts_with("error: no-group:")), (2, true), "{err}");
    s.ok(&["gm", "group-setup"]);
    let (code, err) = s.fail(&["ca", "uptkeygen"]);
    assert_eq!((code, err.starts_with("error: no-update:")), (2, true), "{err}");
    let (code, err) = s.fail(&["ca", "fkeygen", "--id", "ghost", "--x", "1,1"]);
    assert_eq!((code, err.starts_with("error: unknown-identity:")), (2, true), "{err}");
    s.ok(&["gm", "ukeygen", "--id", "a"]);
    let (code, _) = s.fail(&["ca", "fkeygen", "--id", "a", "--x", "1,1,1"]);
    assert_eq!(code, 1);
    let (code, err) = s.fail(&["ca", "fkeygen", "--id", "a", "--x", "9,1"]);
    assert_eq!((code, err.starts_with("error: out-of-domain:")), (2, true), "{err}");
    let (code, err) = s.fail(&["gm", "group-setup", "--profile", "toy"]);
    assert_eq!((code, err.starts_with("error: params-mismatch:")), (2, true), "{err}");
    let (code, _) = s.fail(&["eh", "enc", "--y", "1,1", "--out", "../escape"]);
    assert_eq!(code, 1);
    for id in ["b", "c"] {
        s.ok(&["gm", "ukeygen", "--id", id]);
    }
    let (code, err) = s.fail(&["gm", "ukeygen", "--id", "d"]);
    assert_eq!((code, err.starts_with("error: capacity-exceeded:")), (2, true), "{err}");
    assert_consistent(&s);
}

#[test]
fn parallel_invocations_serialize_on_the_lock() {
    let s = Store::new("d4");
    s.ok(&["ca", "setup", "--profile", "demo"]);
    s.ok(&["gm", "group-setup"]);
    let ids = ["p", "q", "r", "s"];
    let children: Vec<_> = ids
        .iter()
        .map(|id| {
            Command::new(env!("CARGO_BIN_EXE_ipfefr"))
                .args(["gm", "ukeygen", "--id", id, "--store"])
                .arg(s.path())
                .output()
        })
        .collect();
    for c in children {
        assert!(c.unwrap().status.success());
    }
    let mut got = s.manifest().identities;
    got.sort();
    assert_eq!(got, ids);
    assert_consistent(&s);
}

#[test]
fn full_lifecycle_three_versions() {
    let s = Store::new("e5");
    s.ok(&["ca", "setup", "--profile", "demo"]);
    s.ok(&["gm", "group-setup"]);
    let ids = ["ward-a", "ward-b", "lab-c", "lab-d"];
    let funcs: [[u64; 2]; 2] = [[1, 2], [3, 1]];
    for id in ids {
        s.ok(&["gm", "ukeygen", "--id", id]);
        for x in &funcs {
            s.ok(&["ca", "fkeygen", "--id", id, "--x", &csv(x)]);
        }
    }
    let y1 = [2u64, 3];
    s.ok(&["eh", "enc", "--y", &csv(&y1), "--out", "v1"]);
    for id in ids {
        for x in &funcs {
            assert_eq!(s.dec(id, &csv(x), "v1"), inner(x, &y1));
        }
    }

    // One (identity, function) revocation per version.
    let revocations = [("ward-b", 0usize), ("lab-c", 1usize)];
    let mut revoked: Vec<(&str, usize)> = Vec::new();
    for (step, &(victim, fi)) in revocations.iter().enumerate() {
        let ver = step as u32 + 2;
        s.ok(&["gm", "group-update"]);
        s.ok(&["ca", "uptkeygen"]);
        s.ok(&["cs", "ct-update", "--ct", "v1"]);
        revoked.push((victim, fi));
        for (i, x) in funcs.iter().enumerate() {
            let mut args = vec!["gm", "fupdate", "--x"];
            let xs = csv(x);
            args.push(&xs);
            for (who, f) in &revoked {
                if *f == i {
                    args.extend(["--revoke", who]);
                }
            }
            s.ok(&args);
        }
        let fresh = format!("fresh{ver}");
        let y = [ver as u64, 1];
        s.ok(&["eh", "enc", "--y", &csv(&y), "--out", &fresh]);
        for id in ids {
            for (i, x) in funcs.iter().enumerate() {
                let is_revoked = revoked.contains(&(id, i));
                if is_revoked {
                    let (code, err) = s.fail(&["mi", "key-update", "--id", id, "--x", &csv(x)]);
                    assert_eq!(code, 2);
                    assert!(
                        err.starts_with("error: revoked:") || err.starts_with("error: version-mismatch:"),
                        "{err}"
                    );
                    for ct in ["v1", fresh.as_str()] {
                        let (code, err) = s.fail(&["mi", "dec", "--id", id, "--x", &csv(x), "--ct", ct]);
                        assert_eq!(code, 2);
                        assert!(err.starts_with("error: version-mismatch:"), "{err}");
                    }
                } else {
                    s.ok(&["mi", "key-update", "--id", id, "--x", &csv(x)]);
                    assert_eq!(s.dec(id, &csv(x), "v1"), inner(x, &y1));
                    assert_eq!(s.dec(id, &csv(x), &fresh), inner(x, &y));
                }
            }
        }
        assert_eq!(s.manifest().version, ver);
    }
    let m = s.manifest();
    assert_eq!(m.revocations.len(), 4);
    assert_eq!(m.ciphertexts["v1"], 3);
    assert_consistent(&s);
}
