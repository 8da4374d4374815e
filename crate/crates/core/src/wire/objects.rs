//! Versioned container for every scheme object.
//!
//! ```text
//! magic        8 bytes  "IPFEFR\0\x01"
//! kind         1 byte
//! params_hash 32 bytes  SHA-256 of the parameter set encoding
//! body                  sequence of u32-length-prefixed fields
//! ```
//!
//! Decoding checks every field against the parameter set the caller
//! supplies, so a well-formed object for a different parameter set is
//! rejected on the hash before any field is parsed.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{IntMatrix, IntVector, ZpMatrix, ZpVector, ZqMatrix, ZqVector};
use crate::params::Params;
use crate::prims::{h1, PrfKey};
use crate::scheme::*;
use crate::trapdoor::TrapdoorMatrix;

use super::codec::{Reader, Writer};

pub const MAGIC: &[u8; 8] = b"IPFEFR\x00\x01";
pub const HEADER_LEN: usize = 8 + 1 + 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Kind {
    Params = 1,
    MasterPublicKey = 2,
    MasterSecretKey = 3,
    GroupUserKey = 4,
    GroupFunctionKey = 5,
    GroupPublicKey = 6,
    UserKey = 7,
    FunctionKey = 8,
    Ciphertext = 9,
    DirectoryEntry = 10,
    PublicDirectory = 11,
    UpdateKey = 12,
    UpdateInfo = 13,
    Registry = 14,
}

impl Kind {
    pub const ALL: [Kind; 14] = [
        Kind::Params,
        Kind::MasterPublicKey,
        Kind::MasterSecretKey,
        Kind::GroupUserKey,
        Kind::GroupFunctionKey,
        Kind::GroupPublicKey,
        Kind::UserKey,
        Kind::FunctionKey,
        Kind::Ciphertext,
        Kind::DirectoryEntry,
        Kind::PublicDirectory,
        Kind::UpdateKey,
        Kind::UpdateInfo,
        Kind::Registry,
    ];

    pub fn from_u8(tag: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| *k as u8 == tag)
            .ok_or_else(|| Error::Format(format!("unknown object kind {tag}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Params => "params",
            Kind::MasterPublicKey => "master-public-key",
            Kind::MasterSecretKey => "master-secret-key",
            Kind::GroupUserKey => "group-user-key",
            Kind::GroupFunctionKey => "group-function-key",
            Kind::GroupPublicKey => "group-public-key",
            Kind::UserKey => "user-key",
            Kind::FunctionKey => "function-key",
            Kind::Ciphertext => "ciphertext",
            Kind::DirectoryEntry => "directory-entry",
            Kind::PublicDirectory => "public-directory",
            Kind::UpdateKey => "update-key",
            Kind::UpdateInfo => "update-info",
            Kind::Registry => "registry",
        }
    }
}

/// Object body writer: each call appends one length-prefixed field.
pub struct Fields {
    out: Writer,
}

impl Fields {
    fn field(&mut self, f: impl FnOnce(&mut Writer)) -> &mut Self {
        let mut inner = Writer::new();
        f(&mut inner);
        self.out.bytes(&inner.finish());
        self
    }

    fn u32(&mut self, v: u32) -> &mut Self {
        self.field(|w| {
            w.u32(v);
        })
    }
}

/// Object body reader with parameter-aware shape checks.
pub struct FieldReader<'a> {
    r: Reader<'a>,
    params: &'a Params,
}

fn format<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Format(_) => e,
        other => Error::Format(other.to_string()),
    })
}

fn shape_error(what: &str) -> Error {
    Error::Format(format!("{what} has the wrong shape or modulus"))
}

impl<'a> FieldReader<'a> {
    fn field<T>(&mut self, f: impl FnOnce(&mut Reader<'a>) -> Result<T>) -> Result<T> {
        let mut inner = Reader::new(self.r.bytes()?);
        let v = format(f(&mut inner))?;
        inner.finish()?;
        Ok(v)
    }

    fn u32(&mut self) -> Result<u32> {
        self.field(|r| r.u32())
    }

    fn version(&mut self) -> Result<u32> {
        let v = self.u32()?;
        if v == 0 {
            return Err(Error::Format("version 0".into()));
        }
        Ok(v)
    }

    fn zp_vector(&mut self, len: usize, what: &str) -> Result<ZpVector> {
        let v: ZpVector = self.field(|r| r.mod_vector())?;
        if v.modulus().get() != self.params.p || v.len() != len {
            return Err(shape_error(what));
        }
        Ok(v)
    }

    fn zq_vector(&mut self, len: usize, what: &str) -> Result<ZqVector> {
        let v: ZqVector = self.field(|r| r.mod_vector())?;
        if *v.modulus().get() != self.params.q() || v.len() != len {
            return Err(shape_error(what));
        }
        Ok(v)
    }

    fn zp_matrix(&mut self, rows: usize, cols: usize, what: &str) -> Result<ZpMatrix> {
        let a: ZpMatrix = self.field(|r| r.mod_matrix())?;
        if a.modulus().get() != self.params.p || a.rows() != rows || a.cols() != cols {
            return Err(shape_error(what));
        }
        Ok(a)
    }

    fn zq_matrix(&mut self, rows: usize, cols: usize, what: &str) -> Result<ZqMatrix> {
        let a: ZqMatrix = self.field(|r| r.mod_matrix())?;
        if *a.modulus().get() != self.params.q() || a.rows() != rows || a.cols() != cols {
            return Err(shape_error(what));
        }
        Ok(a)
    }

    fn int_vector(&mut self, len: usize, what: &str) -> Result<IntVector> {
        let v = self.field(|r| r.int_vector())?;
        if v.len() != len {
            return Err(shape_error(what));
        }
        Ok(v)
    }

    fn int_matrix(&mut self, rows: usize, cols: usize, what: &str) -> Result<IntMatrix> {
        let z = self.field(|r| r.int_matrix())?;
        if z.rows() != rows || z.cols() != cols {
            return Err(shape_error(what));
        }
        Ok(z)
    }

    fn function_vector(&mut self) -> Result<ZpVector> {
        let x = self.zp_vector(self.params.l1, "function vector")?;
        if x.entries().iter().any(|&e| e >= self.params.x_bound) {
            return Err(Error::Format("function vector entry out of range".into()));
        }
        Ok(x)
    }
}

/// A scheme object with a wire kind.
pub trait WireObject: Sized {
    const KIND: Kind;
    fn write_fields(&self, f: &mut Fields);
    fn read_fields(r: &mut FieldReader<'_>) -> Result<Self>;
}

fn header(kind: Kind, hash: &[u8; 32]) -> Writer {
    let mut w = Writer::new();
    w.raw(MAGIC).u8(kind as u8).raw(hash);
    w
}

/// Reads the kind and parameter hash without decoding the body.
pub fn peek_header(bytes: &[u8]) -> Result<(Kind, [u8; 32])> {
    let mut r = Reader::new(bytes);
    if r.take(8)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let kind = Kind::from_u8(r.u8()?)?;
    let hash = r.take(32)?.try_into().expect("32 bytes");
    Ok((kind, hash))
}

fn open<'a>(bytes: &'a [u8], kind: Kind, hash: &[u8; 32]) -> Result<Reader<'a>> {
    let (found, h) = peek_header(bytes)?;
    if found != kind {
        return Err(Error::Format(format!("expected {}, found {}", kind.name(), found.name())));
    }
    if &h != hash {
        return Err(Error::Format("parameter hash mismatch".into()));
    }
    let mut r = Reader::new(bytes);
    r.take(HEADER_LEN)?;
    Ok(r)
}

pub fn encode<T: WireObject>(obj: &T, params: &Params) -> Vec<u8> {
    let mut f = Fields {
        out: header(T::KIND, &params.hash()),
    };
    obj.write_fields(&mut f);
    f.out.finish()
}

pub fn decode<T: WireObject>(bytes: &[u8], params: &Params) -> Result<T> {
    let r = open(bytes, T::KIND, &params.hash())?;
    let mut fr = FieldReader { r, params };
    let obj = T::read_fields(&mut fr)?;
    fr.r.finish()?;
    Ok(obj)
}

pub fn encode_params(params: &Params) -> Vec<u8> {
    let mut w = header(Kind::Params, &params.hash());
    w.bytes(&params.encode());
    w.finish()
}

/// Decodes a parameter object, checking the header hash against the body.
pub fn decode_params(bytes: &[u8]) -> Result<Params> {
    let (kind, hash) = peek_header(bytes)?;
    let mut r = open(bytes, Kind::Params, &hash)?;
    debug_assert_eq!(kind, Kind::Params);
    let params = format(Params::decode(r.bytes()?))?;
    r.finish()?;
    if params.hash() != hash {
        return Err(Error::Format("parameter hash mismatch".into()));
    }
    Ok(params)
}

impl WireObject for MasterPublicKey {
    const KIND: Kind = Kind::MasterPublicKey;

    fn write_fields(&self, f: &mut Fields) {
        f.field(|w| {
            w.mod_matrix(&self.a);
        })
        .field(|w| {
            w.mod_matrix(&self.v);
        })
        .field(|w| {
            w.mod_matrix(&self.c);
        });
    }

    fn read_fields(r: &mut FieldReader<'_>) -> Result<Self> {
        let (n, m, l1) = (r.params.n, r.params.m, r.params.l1);
        Ok(Self {
            a: r.zp_matrix(n, m, "A")?,
            v: r.zq_matrix(n, m, "V")?,
            c: r.zp_matrix(n, l1, "C")?,
        })
    }
}

impl WireObject for MasterSecretKey {
    const KIND: Kind = Kind::MasterSecretKey;

    fn write_fields(&self, f: &mut Fields) {
        f.field(|w| {
            w.mod_matrix(&self.td.a);
        })
        .field(|w| {
            w.int_matrix(self.td.trap.r());
        })
        .field(|w| {
            w.u64(self.k_p.value());
        })
        .u32(self.preimages.len() as u32);
        for (ver, z) in &self.preimages {
            f.u32(*ver).field(|w| {
                w.int_matrix(z);
            });
        }
    }

    fn read_fields(r: &mut FieldReader<'_>) -> Result<Self> {
        let (n, m, l1) = (r.params.n, r.params.m, r.params.l1);
        let a = r.zp_matrix(n, m, "A")?;
        let trap = r.field(|f| f.int_matrix())?;
        let td = format(TrapdoorMatrix::from_parts(a, trap))?;
        let k_p = format(PrfKey::new(r.field(|f| f.u64())?, &r.params.zp()))?;
        let count = r.u32()?;
        let mut preimages = BTreeMap::new();
        let mut last = 0;
        for _ in 0..count {
            let ver = r.version()?;
            if ver <= last {
                return Err(Error::Format("preimage versions not increasing".into()));
            }
            last = ver;
            preimages.insert(ver, r.int_matrix(m, l1, "preimage")?);
        }
        Ok(Self { td, k_p, preimages })
    }
}

impl WireObject for GroupUserKey {
    const KIND: Kind = Kind::GroupUserKey;

    fn write_fields(&self, f: &mut Fields) {
        f.field(|w| {
            w.int_matrix(&self.d);
        });
    }

    fn read_fields(r: &mut FieldReader<'_>) -> Result<Self> {
        let (m, l2) = (r.params.m, r.params.l2);
        Ok(Self {
            d: r.int_matrix(m, l2, "D")?,
        })
    }
}

impl WireObject for GroupFunctionKey {
    const KIND: Kind = Kind::GroupFunctionKey;

    fn write_fields(&self, f: &mut Fields) {
        f.u32(self.ver).field(|w| {
            w.int_matrix(&self.b);
        });
    }

    fn read_fields(r: &mut FieldReader<'_>) -> Result<Self> {
        let (m, l1) = (r.params.m, r.params.l1);
        Ok(Self {
            ver: r.version()?,
            b: r.int_matrix(m, l1, "B")?,
        })
    }
}

impl WireObject for GroupPublicKey {
    const KIND: Kind = Kind::GroupPublicKey;

    fn write_fields(&self, f: &mut Fields) {
        f.u32(self.ver)
            .field(|w| {
                w.mod_matrix(&self.f);
            })
            .field(|w| {
                w.mod_matrix(&self.u);
            });
    }

    fn read_fields(r: &mut FieldReader<'_>) -> Result<Self> {
        let (n, l1, l2) = (r.params.n, r.params.l1, r.params.l2);
        Ok(Self {
            ver: r.version()?,
            f: r.zq_matrix(n, l2, "F")?,
            u: r.zp_matrix(n, l1, "U")?,
        })
    }
}

impl WireObject for UserKey {
    const KIND: Kind = Kind::UserKey;

    fn write_fields(&self, f: &mut Fields) {
        f.field(|w| {
            w.bytes(&self.identity);
        })
        .field(|w| {
            w.mod_vector(&self.id);
        })
        .field(|w| {
            w.int_vector(&self.u_id);
        });
    }

    fn read_fields(r: &mut FieldReader<'_>) -> Result<Self> {
        let identity = r.field(|f| f.bytes().map(<[u8]>::to_vec))?;
        let id = r.zp_vector(r.params.l2, "identity vector")?;
        if id != h1(&identity, &r.params.zp(), r.params.l2) {
            return Err(Error::Format("identity vector does not match identity".into()));
        }
        let u_id = r.int_vector(r.params.m, "u_id")?;
        Ok(Self { identity, id, u_id })
    }
}

impl WireObject for FunctionKey {
    const KIND: Kind = Kind::FunctionKey;

    fn write_fields(&self, f: &mut Fields) {
        f.field(|w| {
            w.mod_vector(&self.x);
        })
        .field(|w| {
            w.int_vector(&self.f);
        })
        .u32(self.ver);
    }

    fn read_fields(r: &mut FieldReader<'_>) -> Result<Self> {
        Ok(Self {
            x: r.function_vector()?,
            f: r.int_vector(r.params.m, "f")?,
            ver: r.version()?,
        })
    }
}

impl WireObject for Ciphertext {
    const KIND: Kind = Kind::Ciphertext;

    fn write_fields(&self, f: &mut Fields) {
        f.u32(self.ver)
            .field(|w| {
                w.mod_vector(&self.c1);
            })
            .field(|w| {
                w.mod_vector(&self.c2);
            })
            .u32(self.update_count);
    }

    fn read_fields(r: &mut FieldReader<'_>) -> Result<Self> {
        let ct = Self {
            ver: r.version()?,
            c1: r.zp_vector(r.params.m, "c1")?,
            c2: r.zp_vector(r.params.l1, "c2")?,
            update_count: r.u32()?,
        };
        if ct.update_count > r.params.v_max {
            return Err(Error::Format("update count above budget".into()));
        }
        Ok(ct)
    }
}

fn write_entry(f: &mut Fields, e: &DirectoryEntry) {
    f.field(|w| {
        w.mod_vector(&e.x);
    })
    .field(|w| {
        w.mod_vector(&e.pd1);
    })
    .field(|w| {
        w.mod_vector(&e.pd2);
    });
}

fn read_entry(r: &mut FieldReader<'_>) -> Result<DirectoryEntry> {
    Ok(DirectoryEntry {
        x: r.function_vector()?,
        pd1: r.zq_vector(r.params.m, "pd1")?,
        pd2: r.zq_vector(r.params.l2, "pd2")?,
    })
}

impl WireObject for DirectoryEntry {
    const KIND: Kind = Kind::DirectoryEntry;

    fn write_fields(&self, f: &mut Fields) {
        write_entry(f, self);
    }

    fn read_fields(r: &mut FieldReader<'_>) -> Result<Self> {
        read_entry(r)
    }
}

impl WireObject for PublicDirectory {
    const KIND: Kind = Kind::PublicDirectory;

    fn write_fields(&self, f: &mut Fields) {
        f.u32(self.len() as u32);
        for e in self.entries() {
            write_entry(f, e);
        }
    }

    fn read_fields(r: &mut FieldReader<'_>) -> Result<Self> {
        let count = r.u32()?;
        let mut pd = PublicDirectory::new();
        let mut last: Option<Vec<u8>> = None;
        for _ in 0..count {
            let e = read_entry(r)?;
            let key = vector_key(&e.x);
            if last.as_ref().is_some_and(|l| *l >= key) {
                return Err(Error::Format("directory entries not in canonical order".into()));
            }
            last = Some(key);
            pd.insert(e);
        }
        Ok(pd)
    }
}

impl WireObject for UpdateKey {
    const KIND: Kind = Kind::UpdateKey;

    fn write_fields(&self, f: &mut Fields) {
        f.u32(self.to_ver).field(|w| {
            w.mod_matrix(&self.matrix);
        });
    }

    fn read_fields(r: &mut FieldReader<'_>) -> Result<Self> {
        let pr = r.params;
        let to_ver = r.version()?;
        if to_ver < 2 {
            return Err(Error::Format("update key targets version 1".into()));
        }
        let top = pr.h() * pr.m;
        let matrix = r.zp_matrix(top + pr.l1, pr.m + pr.l1, "update matrix")?;
        for i in 0..pr.l1 {
            let row = matrix.row(top + i);
            if row.iter().enumerate().any(|(c, &v)| v != u64::from(c == pr.m + i)) {
                return Err(Error::Format("update matrix bottom block is not [0 | I]".into()));
            }
        }
        Ok(Self { to_ver, matrix })
    }
}

impl WireObject for UpdateInfo {
    const KIND: Kind = Kind::UpdateInfo;

    fn write_fields(&self, f: &mut Fields) {
        f.field(|w| {
            w.mod_vector(&self.x);
        })
        .u32(self.to_ver)
        .field(|w| {
            w.mod_vector(&self.upi1);
        })
        .field(|w| {
            w.mod_vector(&self.upi2);
        })
        .field(|w| {
            w.bits(&self.upi3);
        })
        .field(|w| {
            w.mod_vector(&self.v_rx);
        });
    }

    fn read_fields(r: &mut FieldReader<'_>) -> Result<Self> {
        let pr = r.params;
        let upi = Self {
            x: r.function_vector()?,
            to_ver: r.version()?,
            upi1: r.zq_vector(pr.m, "upi1")?,
            upi2: r.zq_vector(pr.l2, "upi2")?,
            upi3: r.field(|f| f.bits())?,
            v_rx: r.zp_vector(pr.l2, "v_R")?,
        };
        if upi.upi3.len() != pr.t() {
            return Err(shape_error("upi3"));
        }
        if upi.v_rx.is_zero() {
            return Err(Error::Format("zero revocation vector".into()));
        }
        Ok(upi)
    }
}

impl WireObject for Registry {
    const KIND: Kind = Kind::Registry;

    fn write_fields(&self, f: &mut Fields) {
        f.u32(self.capacity() as u32).u32(self.len() as u32);
        for (name, _) in self.identities() {
            f.field(|w| {
                w.bytes(name);
            });
        }
    }

    fn read_fields(r: &mut FieldReader<'_>) -> Result<Self> {
        let capacity = r.u32()? as usize;
        if capacity != r.params.big_n {
            return Err(Error::Format("registry capacity does not match parameters".into()));
        }
        let count = r.u32()?;
        let mut reg = Registry::new(capacity);
        let mut last: Option<Vec<u8>> = None;
        for _ in 0..count {
            let name = r.field(|f| f.bytes().map(<[u8]>::to_vec))?;
            if last.as_ref().is_some_and(|l| *l >= name) {
                return Err(Error::Format("registry not in canonical order".into()));
            }
            format(reg.register(&name, &r.params.zp(), r.params.l2))?;
            last = Some(name);
        }
        Ok(reg)
    }
}

