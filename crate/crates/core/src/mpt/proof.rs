//! Proof verification against a trusted root.
//!
//! The proof node list is attacker-controlled; nothing in it is believed
//! until it hash-links back to the root. The verifier walks the key path,
//! pulling each hash-referenced node from the list in order and descending
//! into inlined children in place. Malformed RLP, a broken hash link, a
//! missing node, or unused trailing nodes all reject the proof; a clean walk
//! ends in either inclusion (with the stored value) or proven absence.

use crate::encoding::{keccak256, rlp_decode, rlp_encode, RlpItem};
use crate::mpt::{decode_path, key_to_nibbles, Hash256, MptError, ProofNodes, EMPTY_TRIE_ROOT};

/// What a valid proof demonstrates about a key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofOutcome {
    /// The key is bound to this value under the root.
    Included(Vec<u8>),
    /// The key has no binding under the root.
    Absent,
}

enum ChildRef {
    Empty,
    Hash(Hash256),
    Inline(RlpItem),
}

enum ParsedNode {
    Leaf { path: Vec<u8>, value: Vec<u8> },
    Extension { path: Vec<u8>, child: ChildRef },
    Branch { children: Vec<ChildRef> },
}

/// Checks `proof` for `key` against `root`.
///
/// An empty node list is a valid absence proof only for the empty-trie root.
pub fn verify_proof(
    root: &Hash256,
    key: &[u8],
    proof: &ProofNodes,
) -> Result<ProofOutcome, MptError> {
    let nodes = &proof.0;
    if nodes.is_empty() {
        return if *root == EMPTY_TRIE_ROOT {
            Ok(ProofOutcome::Absent)
        } else {
            Err(MptError::InvalidProof("no nodes for a non-empty root"))
        };
    }

    let path = key_to_nibbles(key);
    let mut remaining: &[u8] = &path;
    let mut index = 0usize;
    let mut current = take_node(nodes, &mut index, root)?;

    let outcome = loop {
        match parse_node(&current)? {
            ParsedNode::Leaf { path, value } => {
                break if path[..] == *remaining {
                    ProofOutcome::Included(value)
                } else {
                    ProofOutcome::Absent
                };
            }
            ParsedNode::Extension { path, child } => {
                if remaining.len() >= path.len() && remaining[..path.len()] == path[..] {
                    remaining = &remaining[path.len()..];
                    current = follow(child, nodes, &mut index)?
                        .ok_or(MptError::InvalidProof("extension without child"))?;
                } else {
                    break ProofOutcome::Absent;
                }
            }
            ParsedNode::Branch { children } => {
                let Some((&nib, rest)) = remaining.split_first() else {
                    // No branch values: a key ending at a branch is unbound.
                    break ProofOutcome::Absent;
                };
                remaining = rest;
                match follow(
                    children.into_iter().nth(nib as usize).unwrap(),
                    nodes,
                    &mut index,
                )? {
                    Some(next) => current = next,
                    None => break ProofOutcome::Absent,
                }
            }
        }
    };

    if index != nodes.len() {
        return Err(MptError::InvalidProof("unused trailing nodes"));
    }
    Ok(outcome)
}

/// Resolves a child reference: consume the next list node for a hash,
/// descend in place for an inline node, `None` for an empty slot.
fn follow(
    child: ChildRef,
    nodes: &[Vec<u8>],
    index: &mut usize,
) -> Result<Option<RlpItem>, MptError> {
    match child {
        ChildRef::Empty => Ok(None),
        ChildRef::Hash(expected) => take_node(nodes, index, &expected).map(Some),
        ChildRef::Inline(item) => Ok(Some(item)),
    }
}

fn take_node(
    nodes: &[Vec<u8>],
    index: &mut usize,
    expected: &Hash256,
) -> Result<RlpItem, MptError> {
    let raw = nodes.get(*index).ok_or(MptError::InvalidProof(
        "proof ends before the key path does",
    ))?;
    *index += 1;
    if keccak256(raw) != *expected {
        return Err(MptError::InvalidProof("node hash mismatch"));
    }
    rlp_decode(raw).map_err(|_| MptError::InvalidProof("undecodable node"))
}

fn parse_node(item: &RlpItem) -> Result<ParsedNode, MptError> {
    let items = item
        .as_list()
        .ok_or(MptError::InvalidProof("node is not a list"))?;
    match items.len() {
        2 => {
            let encoded_path = items[0]
                .as_bytes()
                .ok_or(MptError::InvalidProof("node path is not bytes"))?;
            let (path, is_leaf) = decode_path(encoded_path)
                .map_err(|_| MptError::InvalidProof("bad hex-prefix path"))?;
            if is_leaf {
                let value = items[1]
                    .as_bytes()
                    .ok_or(MptError::InvalidProof("leaf value is not bytes"))?;
                if value.is_empty() {
                    return Err(MptError::InvalidProof("empty leaf value"));
                }
                Ok(ParsedNode::Leaf {
                    path,
                    value: value.to_vec(),
                })
            } else {
                if path.is_empty() {
                    return Err(MptError::InvalidProof("empty extension path"));
                }
                let child = parse_child(&items[1])?;
                if matches!(child, ChildRef::Empty) {
                    return Err(MptError::InvalidProof("extension without child"));
                }
                Ok(ParsedNode::Extension { path, child })
            }
        }
        17 => {
            let children = items[..16]
                .iter()
                .map(parse_child)
                .collect::<Result<Vec<_>, _>>()?;
            let value = items[16]
                .as_bytes()
                .ok_or(MptError::InvalidProof("branch value is not bytes"))?;
            if !value.is_empty() {
                return Err(MptError::InvalidProof("unexpected branch value"));
            }
            Ok(ParsedNode::Branch { children })
        }
        _ => Err(MptError::InvalidProof("node is neither pair nor branch")),
    }
}

fn parse_child(item: &RlpItem) -> Result<ChildRef, MptError> {
    match item {
        RlpItem::Bytes(b) if b.is_empty() => Ok(ChildRef::Empty),
        RlpItem::Bytes(b) => {
            let hash = Hash256::from_slice(b)
                .map_err(|_| MptError::InvalidProof("child reference is not a hash"))?;
            Ok(ChildRef::Hash(hash))
        }
        RlpItem::List(_) => {
            // Inlining is only legal for encodings under 32 bytes; anything
            // larger must travel by hash so it can be independently checked.
            if rlp_encode(item).len() >= 32 {
                return Err(MptError::InvalidProof("inline node too large"));
            }
            Ok(ChildRef::Inline(item.clone()))
        }
    }
}
