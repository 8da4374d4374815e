//! File-backed state shared by all roles.
//!
//! ```text
//! <store>/manifest.json        versions, identities, revocations
//! <store>/params.ipf
//! <store>/ca/{msk,mpk,pd}.ipf
//! <store>/gm/{guk,registry}.ipf
//! <store>/gm/v<ver>/{gfk,gpk}.ipf
//! <store>/gm/upi/v<ver>-<x>.ipf
//! <store>/cs/uptk-v<ver>.ipf
//! <store>/cs/ct/<name>.ipf
//! <store>/mi/<hex identity>/{usk,fsk-<x>}.ipf
//! ```
//!
//! Every write goes to a temporary file in the target directory and is
//! renamed into place, so an interrupted command never leaves a torn file.
//! An exclusive lock on `<store>/.lock` serializes concurrent invocations.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use ipfefr_core::params::Params;
use ipfefr_core::wire::{decode, decode_params, encode, encode_params, WireObject};
use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";
const FORMAT: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FunctionRecord {
    pub identity: String,
    pub x: Vec<u64>,
    pub version: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Revocation {
    pub version: u32,
    pub x: Vec<u64>,
    pub identities: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u32,
    pub profile: String,
    pub params_hash: String,
    /// Current group version; 0 until the group is set up.
    pub version: u32,
    pub identities: Vec<String>,
    pub functions: Vec<FunctionRecord>,
    pub revocations: Vec<Revocation>,
    /// Ciphertext name to its version.
    pub ciphertexts: BTreeMap<String, u32>,
}

impl Manifest {
    pub fn function_mut(&mut self, identity: &str, x: &[u64]) -> Option<&mut FunctionRecord> {
        self.functions.iter_mut().find(|f| f.identity == identity && f.x == x)
    }
}

pub struct Keystore {
    root: PathBuf,
    params: Params,
    pub manifest: Manifest,
    persisted_version: u32,
    _lock: File,
}

fn lock(root: &Path) -> CliResult<File> {
    let file = OpenOptions::new().create(true).truncate(false).write(true).open(root.join(".lock"))?;
    file.lock()?;
    Ok(file)
}

/// Writes `bytes` to `path` through a temporary file and an atomic rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

impl Keystore {
    /// Initializes a new store. Fails if one already exists at `root`.
    pub fn create(root: &Path, profile: &str, params: Params) -> CliResult<Self> {
        fs::create_dir_all(root)?;
        let lock = lock(root)?;
        if root.join(MANIFEST).exists() {
            return Err(CliError::store("store-exists", format!("{} already holds a keystore", root.display())));
        }
        write_atomic(&root.join("params.ipf"), &encode_params(&params))?;
        let manifest = Manifest {
            format: FORMAT,
            profile: profile.to_string(),
            params_hash: hex::encode(params.hash()),
            ..Manifest::default()
        };
        Ok(Keystore { root: root.to_path_buf(), params, manifest, persisted_version: 0, _lock: lock })
    }

    pub fn open(root: &Path) -> CliResult<Self> {
        if !root.join(MANIFEST).exists() {
            return Err(CliError::store("no-store", format!("no keystore at {}", root.display())));
        }
        let lock = lock(root)?;
        let manifest: Manifest = serde_json::from_slice(&fs::read(root.join(MANIFEST))?)?;
        if manifest.format != FORMAT {
            return Err(CliError::store("manifest-corrupt", format!("unsupported format {}", manifest.format)));
        }
        let params = decode_params(&fs::read(root.join("params.ipf"))?)?;
        if hex::encode(params.hash()) != manifest.params_hash {
            return Err(CliError::store("params-mismatch", "params.ipf does not match the manifest hash"));
        }
        let persisted_version = manifest.version;
        Ok(Keystore { root: root.to_path_buf(), params, manifest, persisted_version, _lock: lock })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn exists(&self, rel: &str) -> bool {
        self.path(rel).exists()
    }

    pub fn read<T: WireObject>(&self, rel: &str) -> CliResult<T> {
        let path = self.path(rel);
        let bytes = fs::read(&path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => CliError::store("missing-object", format!("{rel} not found")),
            _ => e.into(),
        })?;
        Ok(decode(&bytes, &self.params)?)
    }

    pub fn write<T: WireObject>(&self, rel: &str, obj: &T) -> CliResult<()> {
        write_atomic(&self.path(rel), &encode(obj, &self.params))
    }

    /// Persists the manifest. The group version never moves backwards.
    pub fn save(&mut self) -> CliResult<()> {
        if self.manifest.version < self.persisted_version {
            return Err(CliError::store(
                "version-regression",
                format!("manifest version {} below {}", self.manifest.version, self.persisted_version),
            ));
        }
        let mut body = serde_json::to_vec_pretty(&self.manifest)?;
        body.push(b'\n');
        write_atomic(&self.root.join(MANIFEST), &body)?;
        self.persisted_version = self.manifest.version;
        Ok(())
    }
}

/// Directory name for an identity: its bytes in hex, so any string is safe.
pub fn identity_dir(identity: &str) -> String {
    format!("mi/{}", hex::encode(identity.as_bytes()))
}

pub fn vector_label(x: &[u64]) -> String {
    x.iter().map(u64::to_string).collect::<Vec<_>>().join("-")
}

pub fn usk_path(identity: &str) -> String {
    format!("{}/usk.ipf", identity_dir(identity))
}

pub fn fsk_path(identity: &str, x: &[u64]) -> String {
    format!("{}/fsk-{}.ipf", identity_dir(identity), vector_label(x))
}

pub fn gfk_path(ver: u32) -> String {
    format!("gm/v{ver}/gfk.ipf")
}

pub fn gpk_path(ver: u32) -> String {
    format!("gm/v{ver}/gpk.ipf")
}

pub fn upi_path(ver: u32, x: &[u64]) -> String {
    format!("gm/upi/v{ver}-{}.ipf", vector_label(x))
}

pub fn uptk_path(ver: u32) -> String {
    format!("cs/uptk-v{ver}.ipf")
}

pub fn ct_path(name: &str) -> String {
    format!("cs/ct/{name}.ipf")
}
