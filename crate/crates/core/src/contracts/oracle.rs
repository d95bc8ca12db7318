//! The L1 state-root oracle: the append-only record of what the rollup
//! operator claimed about L2, and which claims survived validity checking.
//!
//! The escape clock is anchored to the newest *valid* root. Invalid proposals
//! are recorded (they happened) but never move the anchor, so a failing
//! operator cannot reset the countdown by posting garbage.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::Hash256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("proposal timestamp {got} precedes last proposal at {last}")]
    NonMonotoneTimestamp { got: u64, last: u64 },
}

impl OracleError {
    pub fn code(&self) -> &'static str {
        match self {
            OracleError::NonMonotoneTimestamp { .. } => "NonMonotoneTimestamp",
        }
    }
}

/// One proposed state root as the oracle recorded it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateRootRecord {
    pub root: Hash256,
    pub timestamp: u64,
    pub l2_block_number: u64,
    /// Whether the proposal's validity proof checked out.
    pub valid: bool,
}

/// Whether a proposal moved the escape anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProposeOutcome {
    Accepted,
    RejectedInvalid,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct L2Oracle {
    records: Vec<StateRootRecord>,
}

impl L2Oracle {
    pub fn new() -> Self {
        L2Oracle::default()
    }

    /// Records a proposal. `valid` stands in for a full validity proof check;
    /// timestamps must not run backwards even for invalid proposals.
    pub fn propose_root(
        &mut self,
        root: Hash256,
        timestamp: u64,
        l2_block_number: u64,
        valid: bool,
    ) -> Result<ProposeOutcome, OracleError> {
        if let Some(last) = self.records.last() {
            if timestamp < last.timestamp {
                return Err(OracleError::NonMonotoneTimestamp {
                    got: timestamp,
                    last: last.timestamp,
                });
            }
        }
        self.records.push(StateRootRecord {
            root,
            timestamp,
            l2_block_number,
            valid,
        });
        Ok(if valid {
            ProposeOutcome::Accepted
        } else {
            ProposeOutcome::RejectedInvalid
        })
    }

    /// The newest valid root: the anchor for escape timing and proofs.
    pub fn latest_valid(&self) -> Option<&StateRootRecord> {
        self.records.iter().rev().find(|r| r.valid)
    }

    pub fn records(&self) -> &[StateRootRecord] {
        &self.records
    }
}
