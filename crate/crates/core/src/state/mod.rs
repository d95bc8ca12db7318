//! The simulated L2 world: accounts, contract storage, and declared token
//! layouts, with Merkle commitments and `eth_getProof`-style bundles over it.
//!
//! Every map is ordered, so state roots and snapshot JSON are deterministic
//! functions of the world's content. Zero-valued storage slots are pruned on
//! write; only nonzero words reach the storage tries.

pub mod layout;
pub(crate) mod math;
mod proof;
mod tokens;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::{
    keccak256, min_be, rlp_decode, rlp_encode, u128_from_min_be, Address, Hash256, RlpItem,
    KECCAK_EMPTY,
};
use crate::mpt::{secure_key, MptError, Trie};

pub use layout::{address_mapping_slot, direct_slot, mapping_slot, TokenLayout};
pub use proof::{generate_bundle, ProofBundle, SlotProof, VerifiedBundle};
pub use tokens::{
    erc20_balance, erc20_mint, erc20_transfer, erc721_mint, erc721_owner, erc721_transfer,
    univ2_add_liquidity, univ2_lp_balance, univ2_tokens,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("no contract deployed at {0}")]
    UnknownContract(Address),
    #[error("contract {contract} is {actual}, not {expected}")]
    WrongTokenKind {
        contract: Address,
        expected: &'static str,
        actual: &'static str,
    },
    #[error("{holder} holds {available}, needs {required}")]
    InsufficientBalance {
        holder: Address,
        available: u128,
        required: u128,
    },
    #[error("token id {token_id} of {token} already minted")]
    AlreadyMinted { token: Address, token_id: Hash256 },
    #[error("{claimed} does not own token id {token_id} of {token}")]
    NotOwner {
        token: Address,
        token_id: Hash256,
        claimed: Address,
    },
    #[error("amount must be nonzero")]
    ZeroAmount,
    #[error("arithmetic overflow or empty pool")]
    Overflow,
    #[error("address {0} is already occupied")]
    AddressCollision(Address),
}

impl StateError {
    /// Stable error code used in reports and scenario expectations.
    pub fn code(&self) -> &'static str {
        match self {
            StateError::UnknownContract(_) => "UnknownContract",
            StateError::WrongTokenKind { .. } => "WrongTokenKind",
            StateError::InsufficientBalance { .. } => "InsufficientBalance",
            StateError::AlreadyMinted { .. } => "AlreadyMinted",
            StateError::NotOwner { .. } => "NotOwner",
            StateError::ZeroAmount => "ZeroAmount",
            StateError::Overflow => "Overflow",
            StateError::AddressCollision(_) => "AddressCollision",
        }
    }
}

/// One account's trie leaf fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AccountState {
    pub nonce: u64,
    pub balance: u128,
    pub storage_root: Hash256,
    pub code_hash: Hash256,
}

impl AccountState {
    /// The leaf value: rlp([nonce, balance, storage_root, code_hash]).
    pub fn to_leaf_rlp(&self) -> Vec<u8> {
        rlp_encode(&RlpItem::list([
            RlpItem::uint(self.nonce as u128),
            RlpItem::uint(self.balance),
            RlpItem::bytes(self.storage_root.0.as_slice()),
            RlpItem::bytes(self.code_hash.0.as_slice()),
        ]))
    }

    /// Strict inverse of [`to_leaf_rlp`] for leaves pulled out of proofs.
    pub fn from_leaf_rlp(bytes: &[u8]) -> Result<Self, MptError> {
        let malformed = MptError::InvalidProof("malformed account leaf");
        let item = rlp_decode(bytes).map_err(|_| malformed.clone())?;
        let fields = item.as_list().ok_or(malformed.clone())?;
        if fields.len() != 4 {
            return Err(malformed);
        }
        let int_field = |i: usize| -> Result<u128, MptError> {
            let b = fields[i].as_bytes().ok_or(malformed.clone())?;
            u128_from_min_be(b).map_err(|_| malformed.clone())
        };
        let hash_field = |i: usize| -> Result<Hash256, MptError> {
            let b = fields[i].as_bytes().ok_or(malformed.clone())?;
            Hash256::from_slice(b).map_err(|_| malformed.clone())
        };
        let nonce = int_field(0)?;
        if nonce > u64::MAX as u128 {
            return Err(malformed);
        }
        Ok(AccountState {
            nonce: nonce as u64,
            balance: int_field(1)?,
            storage_root: hash_field(2)?,
            code_hash: hash_field(3)?,
        })
    }
}

/// Account fields the world tracks directly (storage root is derived).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccountRecord {
    pub nonce: u64,
    #[serde(with = "crate::encoding::dec")]
    pub balance: u128,
    pub code_hash: Hash256,
}

impl Default for AccountRecord {
    fn default() -> Self {
        AccountRecord {
            nonce: 0,
            balance: 0,
            code_hash: KECCAK_EMPTY,
        }
    }
}

/// How a contract address is derived at deployment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deployment {
    Create,
    Create2 { salt: Hash256 },
}

/// The full simulated L2 state. Serializes to the snapshot JSON consumed by
/// the `prove` subcommand.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldState {
    accounts: BTreeMap<Address, AccountRecord>,
    storage: BTreeMap<Address, BTreeMap<Hash256, Hash256>>,
    layouts: BTreeMap<Address, TokenLayout>,
}

impl WorldState {
    pub fn new() -> Self {
        WorldState::default()
    }

    pub fn account(&self, address: &Address) -> Option<&AccountRecord> {
        self.accounts.get(address)
    }

    pub fn layout_of(&self, contract: &Address) -> Option<&TokenLayout> {
        self.layouts.get(contract)
    }

    /// Adds ETH to an account, creating it on first touch.
    pub fn credit_eth(&mut self, account: Address, amount: u128) -> Result<(), StateError> {
        let record = self.accounts.entry(account).or_default();
        record.balance = record
            .balance
            .checked_add(amount)
            .ok_or(StateError::Overflow)?;
        Ok(())
    }

    /// Deploys a token contract for `deployer`, deriving the address from the
    /// deployer's current nonce (CREATE) or the salt and code (CREATE2).
    pub fn deploy_contract(
        &mut self,
        deployer: Address,
        deployment: Deployment,
        layout: TokenLayout,
    ) -> Result<Address, StateError> {
        let code_hash = keccak256(layout.code_blob());
        let nonce = self.accounts.entry(deployer).or_default().nonce;
        let address = match deployment {
            Deployment::Create => crate::encoding::create_address(&deployer, nonce),
            Deployment::Create2 { salt } => {
                crate::encoding::create2_address(&deployer, &salt, &code_hash)
            }
        };
        if self.layouts.contains_key(&address) {
            return Err(StateError::AddressCollision(address));
        }
        self.accounts.entry(deployer).or_default().nonce = nonce + 1;
        let contract = self.accounts.entry(address).or_default();
        contract.nonce = 1;
        contract.code_hash = code_hash;
        self.layouts.insert(address, layout);
        Ok(address)
    }

    /// Current word in a storage slot; zero when unset.
    pub fn storage_at(&self, contract: &Address, slot: &Hash256) -> Hash256 {
        self.storage
            .get(contract)
            .and_then(|slots| slots.get(slot))
            .copied()
            .unwrap_or(Hash256::ZERO)
    }

    /// Writes a storage word; zero deletes the slot.
    pub fn set_storage(&mut self, contract: Address, slot: Hash256, value: Hash256) {
        if value.is_zero() {
            if let Some(slots) = self.storage.get_mut(&contract) {
                slots.remove(&slot);
                if slots.is_empty() {
                    self.storage.remove(&contract);
                }
            }
        } else {
            self.storage
                .entry(contract)
                .or_default()
                .insert(slot, value);
        }
    }

    /// The account trie leaf for `address`, with the derived storage root.
    pub fn account_state(&self, address: &Address) -> Option<AccountState> {
        let record = self.accounts.get(address)?;
        Some(AccountState {
            nonce: record.nonce,
            balance: record.balance,
            storage_root: self.storage_trie(address).root_hash(),
            code_hash: record.code_hash,
        })
    }

    /// Builds the storage trie for one contract: secure-keyed slots mapping
    /// to RLP of the left-trimmed word.
    pub(crate) fn storage_trie(&self, contract: &Address) -> Trie {
        let mut trie = Trie::new();
        if let Some(slots) = self.storage.get(contract) {
            for (slot, value) in slots {
                let key = secure_key(&slot.0).expect("slot keys are 32 bytes");
                trie.insert(&key.0, &storage_value_rlp(value));
            }
        }
        trie
    }

    /// Builds the account trie over every account in the world.
    pub(crate) fn account_trie(&self) -> Trie {
        let mut trie = Trie::new();
        for address in self.accounts.keys() {
            let state = self.account_state(address).expect("iterating live keys");
            let key = secure_key(&address.0).expect("addresses are 20 bytes");
            trie.insert(&key.0, &state.to_leaf_rlp());
        }
        trie
    }

    /// The state root committing to the whole world.
    pub fn state_root(&self) -> Hash256 {
        self.account_trie().root_hash()
    }
}

/// Storage leaf value: RLP of the word with leading zeros stripped.
pub(crate) fn storage_value_rlp(value: &Hash256) -> Vec<u8> {
    let first = value.0.iter().position(|&b| b != 0).unwrap_or(32);
    rlp_encode(&RlpItem::bytes(&value.0[first..]))
}

/// Strict inverse of [`storage_value_rlp`] for words pulled out of proofs.
pub(crate) fn storage_value_from_rlp(bytes: &[u8]) -> Result<Hash256, MptError> {
    let malformed = MptError::InvalidProof("malformed storage word");
    let item = rlp_decode(bytes).map_err(|_| malformed.clone())?;
    let raw = item.as_bytes().ok_or(malformed.clone())?;
    if raw.is_empty() || raw.len() > 32 || raw[0] == 0 {
        return Err(malformed);
    }
    let mut word = [0u8; 32];
    word[32 - raw.len()..].copy_from_slice(raw);
    Ok(Hash256(word))
}

/// RLP bytes for an unsigned integer value (used in tests and fixtures).
pub fn uint_rlp(value: u128) -> Vec<u8> {
    rlp_encode(&RlpItem::Bytes(min_be(value)))
}
