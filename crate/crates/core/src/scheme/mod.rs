//! Inner-product functional encryption with fine-grained revocation.
//!
//! Roles: the CA runs [`system_setup`], [`fkeygen`] and [`uptkeygen`]; the
//! group manager runs [`group_setup`], [`ukeygen`], [`group_update`] and
//! [`fupdate`]; anyone holding data runs [`enc`]; the storage host runs
//! [`ct_update`]; key holders run [`dec`] and [`key_update`].

mod keys;
mod ops;

pub use keys::*;
pub use ops::*;
