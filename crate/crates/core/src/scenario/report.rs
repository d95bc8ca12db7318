//! Report emitted by a scenario run.
//!
//! Everything here serializes through ordered maps and fixed-order vectors,
//! so the JSON text is a pure function of the run: the same scenario file
//! produces the same bytes every time.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::contracts::bridge::{DecAmount, EscapeReceipt};
use crate::encoding::{Address, Hash256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub t_seconds: u64,
    pub outcomes: Vec<ActionOutcome>,
    pub final_state: FinalState,
    pub conservation: Conservation,
    pub assertions: Vec<AssertionOutcome>,
    pub structural: Structural,
    /// True only if every expectation matched, every assertion held,
    /// conservation is exact, and post-failure silence was observed.
    pub passed: bool,
}

impl Report {
    /// Canonical JSON text of the report (pretty, trailing newline).
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports always serialize");
        text.push('\n');
        text
    }
}

/// What one timeline action did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionOutcome {
    pub index: usize,
    pub at: u64,
    pub kind: String,
    /// Stable one-line description of the action's arguments.
    pub detail: String,
    /// `"ok"` or `"error:<Code>"`.
    pub result: String,
    pub expected: String,
    pub matched: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub receipt: Option<EscapeReceipt>,
}

/// An NFT named by contract and id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NftRef {
    pub token: Address,
    pub token_id: Hash256,
}

/// The bridge at the end of the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinalState {
    pub latest_valid_root: Option<Hash256>,
    #[serde(with = "crate::encoding::dec")]
    pub eth_escrow: u128,
    pub token_escrow: BTreeMap<Address, DecAmount>,
    pub nft_escrow: Vec<NftRef>,
    pub nullifiers: Vec<Hash256>,
    pub l1_eth_credits: BTreeMap<Address, DecAmount>,
    pub l1_token_credits: BTreeMap<Address, BTreeMap<Address, DecAmount>>,
    pub l1_nft_credits: BTreeMap<Address, Vec<NftRef>>,
}

/// deposited == escrowed + paid, checked in exact integer arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FungibleConservation {
    #[serde(with = "crate::encoding::dec")]
    pub deposited: u128,
    #[serde(with = "crate::encoding::dec")]
    pub escrowed: u128,
    #[serde(with = "crate::encoding::dec")]
    pub paid: u128,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conservation {
    pub eth: FungibleConservation,
    pub tokens: BTreeMap<Address, FungibleConservation>,
    /// Every deposited NFT is either still escrowed or credited to exactly
    /// one L1 owner, and nothing undeposited ever appears.
    pub nfts_exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssertionOutcome {
    pub index: usize,
    pub kind: String,
    pub detail: String,
    pub passed: bool,
}

/// Invariants the harness checks over the whole timeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Structural {
    /// After operator failure, no root proposal or messenger-borne
    /// registration succeeded.
    pub post_failure_silence: bool,
}
