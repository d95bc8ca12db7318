//! Deterministic simulation of a rollup escape hatch.
//!
//! When a rollup operator stops posting valid state roots, users are locked
//! out of the canonical withdrawal path. This library models the full escape
//! flow on the L1 side: a time trigger armed by the last valid root, Merkle
//! Patricia Trie proofs of account and storage state, resolver logic that
//! locates assets inside L2 contract storage, and nullifiers that make every
//! escape a one-shot.
//!
//! The crate is organized by protocol layer:
//!
//! - [`encoding`]: keccak-256, RLP, hex conventions, contract-address derivation
//! - [`mpt`]: hexary Merkle Patricia Trie with proof generation and adversarial
//!   proof verification
//! - [`state`]: the simulated L2 world (accounts, token storage layouts,
//!   `eth_getProof`-style bundles)
//! - [`contracts`]: L1 state machines (oracle, bridge, resolver registry)
//! - [`resolvers`]: entitlement computation over verified storage reads
//! - [`scenario`]: deterministic timeline driver, fixtures, and reports

pub mod contracts;
pub mod encoding;
pub mod mpt;
pub mod resolvers;
pub mod scenario;
pub mod state;

pub use encoding::{Address, Hash256};
