//! Reference implementations used as test oracles. Everything in here is
//! written directly from the published algorithm descriptions and shares no
//! code with the crate under test: agreement between the two sides is the
//! evidence, so the oracle must not reuse the implementation's helpers.
#![allow(dead_code)]

pub mod keccak;
pub mod rlp;
pub mod trie;
pub mod wide;
