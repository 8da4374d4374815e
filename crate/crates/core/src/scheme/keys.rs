use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gadgets::BitVector;
use crate::lattice::{IntMatrix, IntVector, WordModulus, ZpMatrix, ZpVector, ZqMatrix, ZqVector};
use crate::prims::{h1, PrfKey};
use crate::trapdoor::TrapdoorMatrix;
use crate::wire::codec::Writer;

/// CA secret: the trapdoor for A, the PRF key, and one cached preimage
/// Z_ver of C + U_ver per group version.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MasterSecretKey {
    pub td: TrapdoorMatrix,
    pub k_p: PrfKey,
    pub preimages: BTreeMap<u32, IntMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MasterPublicKey {
    /// n×m mod p, with trapdoor.
    pub a: ZpMatrix,
    /// n×m mod q.
    pub v: ZqMatrix,
    /// n×l1 mod p.
    pub c: ZpMatrix,
}

/// D ∈ Z^{m×l2}, used to derive user keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupUserKey {
    pub d: IntMatrix,
}

/// B_ver ∈ Z^{m×l1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupFunctionKey {
    pub ver: u32,
    pub b: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPublicKey {
    pub ver: u32,
    /// F = V·D mod q.
    pub f: ZqMatrix,
    /// U_ver = A·B_ver mod p.
    pub u: ZpMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupKeys {
    pub guk: GroupUserKey,
    pub gfk: GroupFunctionKey,
    pub gpk: GroupPublicKey,
}

impl GroupKeys {
    pub fn ver(&self) -> u32 {
        self.gpk.ver
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserKey {
    pub identity: Vec<u8>,
    pub id: ZpVector,
    /// D·id over the integers.
    pub u_id: IntVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionKey {
    pub x: ZpVector,
    pub f: IntVector,
    pub ver: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    pub ver: u32,
    pub c1: ZpVector,
    pub c2: ZpVector,
    /// Number of `ct_update` hops applied since encryption.
    pub update_count: u32,
}

/// Encryption of t_x under (V, F), published once per function vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectoryEntry {
    pub x: ZpVector,
    pub pd1: ZqVector,
    pub pd2: ZqVector,
}

/// Append-only public directory keyed by the canonical encoding of x.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PublicDirectory {
    entries: BTreeMap<Vec<u8>, DirectoryEntry>,
}

pub(crate) fn vector_key(x: &ZpVector) -> Vec<u8> {
    let mut w = Writer::new();
    w.mod_vector(x);
    w.finish()
}

impl PublicDirectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, x: &ZpVector) -> Option<&DirectoryEntry> {
        self.entries.get(&vector_key(x))
    }

    pub fn contains(&self, x: &ZpVector) -> bool {
        self.entries.contains_key(&vector_key(x))
    }

    /// Adds `entry` unless its vector is already present. Returns whether
    /// the directory changed.
    pub fn insert(&mut self, entry: DirectoryEntry) -> bool {
        let key = vector_key(&entry.x);
        if self.entries.contains_key(&key) {
            return false;
        }
        self.entries.insert(key, entry);
        true
    }

    pub fn entries(&self) -> impl Iterator<Item = &DirectoryEntry> {
        self.entries.values()
    }
}

/// Re-encryption matrix `[[E1·A + E2, E1·(C+U_new) + E3 − PowerT(Z_ver)], [0, I]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateKey {
    pub to_ver: u32,
    pub matrix: ZpMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateInfo {
    pub x: ZpVector,
    pub to_ver: u32,
    pub upi1: ZqVector,
    pub upi2: ZqVector,
    /// H2(k_t) XOR the packed key delta.
    pub upi3: BitVector,
    /// Annihilates every revoked identity vector.
    pub v_rx: ZpVector,
}

/// Identities registered with the group, capped at N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Registry {
    capacity: usize,
    ids: BTreeMap<Vec<u8>, ZpVector>,
}

impl Registry {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            ids: BTreeMap::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, identity: &[u8]) -> bool {
        self.ids.contains_key(identity)
    }

    /// Registers `identity`, returning its hashed vector. Re-registering is
    /// a no-op.
    pub fn register(&mut self, identity: &[u8], p: &WordModulus, l2: usize) -> Result<ZpVector> {
        if let Some(v) = self.ids.get(identity) {
            return Ok(v.clone());
        }
        if self.ids.len() >= self.capacity {
            return Err(Error::Capacity(format!("registry holds {} identities", self.capacity)));
        }
        let v = h1(identity, p, l2);
        self.ids.insert(identity.to_vec(), v.clone());
        Ok(v)
    }

    pub fn identities(&self) -> impl Iterator<Item = (&[u8], &ZpVector)> {
        self.ids.iter().map(|(k, v)| (k.as_slice(), v))
    }
}
