//! `eth_getProof`-shaped bundles: an account proof plus storage proofs,
//! carried as JSON between the snapshotting side and the verifying side.
//!
//! The wire format mirrors the RPC response: camelCase field names, hex
//! quantities for nonce/balance/values, full-width hex for slot keys. The
//! claimed fields are redundant with the proofs on purpose; verification
//! recomputes everything from the node lists and rejects any disagreement.

use std::collections::BTreeMap;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::encoding::{Address, EncodingError, Hash256, KECCAK_EMPTY};
use crate::mpt::{secure_key, verify_proof, MptError, ProofNodes, ProofOutcome, EMPTY_TRIE_ROOT};
use crate::state::{storage_value_from_rlp, AccountState, WorldState};

/// Proof material for one account and a set of its storage slots, against a
/// declared state root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofBundle {
    pub address: Address,
    pub state_root: Hash256,
    pub account_proof: ProofNodes,
    /// Claimed account fields; `None` claims the account is absent.
    pub account: Option<AccountState>,
    pub storage_proofs: Vec<SlotProof>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotProof {
    pub key: Hash256,
    /// Claimed word; `None` claims the slot is unset.
    pub value: Option<Hash256>,
    pub proof: ProofNodes,
}

/// The account and slot facts a bundle proves, after every hash checks out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifiedBundle {
    pub address: Address,
    pub account: Option<AccountState>,
    pub slots: BTreeMap<Hash256, Option<Hash256>>,
}

/// Builds a bundle for `address` covering `slots`, against the world's
/// current root. Works for absent accounts and unset slots; those yield
/// absence proofs.
pub fn generate_bundle(world: &WorldState, address: Address, slots: &[Hash256]) -> ProofBundle {
    let account_trie = world.account_trie();
    let account_key = secure_key(&address.0).expect("addresses are 20 bytes");
    let account = world.account_state(&address);
    let storage_trie = world.storage_trie(&address);
    let storage_proofs = slots
        .iter()
        .map(|slot| {
            let slot_key = secure_key(&slot.0).expect("slot keys are 32 bytes");
            let value = world.storage_at(&address, slot);
            SlotProof {
                key: *slot,
                value: (!value.is_zero()).then_some(value),
                proof: storage_trie.prove(&slot_key.0),
            }
        })
        .collect();
    ProofBundle {
        address,
        state_root: account_trie.root_hash(),
        account_proof: account_trie.prove(&account_key.0),
        account,
        storage_proofs,
    }
}

impl ProofBundle {
    /// Checks every proof against `trusted_root` and the claimed fields
    /// against what the proofs establish. Storage proofs verify against the
    /// proven storage root, or the empty root when the account is absent.
    pub fn verify(&self, trusted_root: &Hash256) -> Result<VerifiedBundle, MptError> {
        let account_key = secure_key(&self.address.0)?;
        let account = match verify_proof(trusted_root, &account_key.0, &self.account_proof)? {
            ProofOutcome::Included(leaf) => {
                let proven = AccountState::from_leaf_rlp(&leaf)?;
                if self.account != Some(proven) {
                    return Err(MptError::InvalidProof(
                        "claimed account fields disagree with proof",
                    ));
                }
                Some(proven)
            }
            ProofOutcome::Absent => {
                if self.account.is_some() {
                    return Err(MptError::InvalidProof(
                        "claimed account fields disagree with proof",
                    ));
                }
                None
            }
        };
        let storage_root = account.map_or(EMPTY_TRIE_ROOT, |a| a.storage_root);
        let mut slots = BTreeMap::new();
        for slot in &self.storage_proofs {
            let slot_key = secure_key(&slot.key.0)?;
            let value = match verify_proof(&storage_root, &slot_key.0, &slot.proof)? {
                ProofOutcome::Included(raw) => Some(storage_value_from_rlp(&raw)?),
                ProofOutcome::Absent => None,
            };
            if slot.value != value {
                return Err(MptError::InvalidProof(
                    "claimed slot value disagrees with proof",
                ));
            }
            slots.insert(slot.key, value);
        }
        Ok(VerifiedBundle {
            address: self.address,
            account,
            slots,
        })
    }
}

/// Minimal hex quantity: "0x0", no leading zeros.
fn quantity_hex(bytes: &[u8]) -> String {
    let hex_full = hex::encode(bytes);
    let trimmed = hex_full.trim_start_matches('0');
    if trimmed.is_empty() {
        "0x0".to_string()
    } else {
        format!("0x{trimmed}")
    }
}

fn word_from_quantity(s: &str) -> Result<Hash256, EncodingError> {
    let digits = s
        .strip_prefix("0x")
        .ok_or_else(|| EncodingError::InvalidHex(s.to_string()))?;
    if digits.is_empty() || digits.len() > 64 || !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(EncodingError::InvalidHex(s.to_string()));
    }
    let padded = format!("{digits:0>64}");
    let bytes = hex::decode(&padded).map_err(|_| EncodingError::InvalidHex(s.to_string()))?;
    Hash256::from_slice(&bytes)
}

fn u128_from_quantity(s: &str) -> Result<u128, EncodingError> {
    word_from_quantity(s)?
        .to_u128()
        .ok_or_else(|| EncodingError::InvalidHex(s.to_string()))
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct BundleWire {
    address: Address,
    state_root: Hash256,
    account_proof: ProofNodes,
    nonce: String,
    balance: String,
    storage_hash: Hash256,
    code_hash: Hash256,
    storage_proof: Vec<SlotWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SlotWire {
    key: Hash256,
    value: String,
    proof: ProofNodes,
}

impl From<&ProofBundle> for BundleWire {
    fn from(bundle: &ProofBundle) -> Self {
        // Absent accounts carry the RPC defaults: zero quantities, the empty
        // storage root, and the empty code hash.
        let account = bundle.account.unwrap_or(AccountState {
            nonce: 0,
            balance: 0,
            storage_root: EMPTY_TRIE_ROOT,
            code_hash: KECCAK_EMPTY,
        });
        BundleWire {
            address: bundle.address,
            state_root: bundle.state_root,
            account_proof: bundle.account_proof.clone(),
            nonce: quantity_hex(&account.nonce.to_be_bytes()),
            balance: quantity_hex(&account.balance.to_be_bytes()),
            storage_hash: account.storage_root,
            code_hash: account.code_hash,
            storage_proof: bundle
                .storage_proofs
                .iter()
                .map(|slot| SlotWire {
                    key: slot.key,
                    value: quantity_hex(&slot.value.unwrap_or(Hash256::ZERO).0),
                    proof: slot.proof.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<BundleWire> for ProofBundle {
    type Error = EncodingError;

    fn try_from(wire: BundleWire) -> Result<Self, Self::Error> {
        let nonce_wide = u128_from_quantity(&wire.nonce)?;
        if nonce_wide > u64::MAX as u128 {
            return Err(EncodingError::InvalidHex(wire.nonce.clone()));
        }
        let account = AccountState {
            nonce: nonce_wide as u64,
            balance: u128_from_quantity(&wire.balance)?,
            storage_root: wire.storage_hash,
            code_hash: wire.code_hash,
        };
        let absent_defaults = account.nonce == 0
            && account.balance == 0
            && account.storage_root == EMPTY_TRIE_ROOT
            && account.code_hash == KECCAK_EMPTY;
        let storage_proofs = wire
            .storage_proof
            .into_iter()
            .map(|slot| {
                let word = word_from_quantity(&slot.value)?;
                Ok(SlotProof {
                    key: slot.key,
                    value: (!word.is_zero()).then_some(word),
                    proof: slot.proof,
                })
            })
            .collect::<Result<Vec<_>, EncodingError>>()?;
        Ok(ProofBundle {
            address: wire.address,
            state_root: wire.state_root,
            account_proof: wire.account_proof,
            account: (!absent_defaults).then_some(account),
            storage_proofs,
        })
    }
}

impl Serialize for ProofBundle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        BundleWire::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProofBundle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = BundleWire::deserialize(deserializer)?;
        ProofBundle::try_from(wire).map_err(de::Error::custom)
    }
}
