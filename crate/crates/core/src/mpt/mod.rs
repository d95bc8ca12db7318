//! Hexary Merkle Patricia Trie with node inlining, as used for Ethereum state
//! and storage tries.
//!
//! Keys are arbitrary byte strings of equal length within one trie; in this
//! crate every key is a keccak-256 digest ("secure" keying), so branch nodes
//! never carry values and no key is a prefix of another. Values are RLP blobs.
//! Node references follow the consensus rule: a child whose RLP encoding is
//! shorter than 32 bytes is inlined into its parent, otherwise the parent
//! stores the child's keccak-256 hash. The root is always a hash.
//!
//! Roots are recomputed on demand rather than cached; tries here hold at most
//! a few hundred keys.

mod nibbles;
mod proof;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::encoding::{bytes_to_hex, hex_to_bytes, keccak256, rlp_encode, Hash256, RlpItem};

pub use nibbles::{common_prefix_len, decode_path, encode_path, key_to_nibbles};
pub use proof::{verify_proof, ProofOutcome};

/// Root hash of the empty trie: keccak256(rlp("")).
pub const EMPTY_TRIE_ROOT: Hash256 = Hash256([
    0x56, 0xe8, 0x1f, 0x17, 0x1b, 0xcc, 0x55, 0xa6, 0xff, 0x83, 0x45, 0xe6, 0x92, 0xc0, 0xf8, 0x6e,
    0x5b, 0x48, 0xe0, 0x1b, 0x99, 0x6c, 0xad, 0xc0, 0x01, 0x62, 0x2f, 0xb5, 0xe3, 0x63, 0xb4, 0x21,
]);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MptError {
    #[error("invalid proof: {0}")]
    InvalidProof(&'static str),
    #[error("secure key input must be 20 or 32 bytes, got {0}")]
    WrongKeyLength(usize),
}

/// Trie key for an address or storage slot: keccak256 of the raw bytes.
pub fn secure_key(raw: &[u8]) -> Result<Hash256, MptError> {
    if raw.len() != 20 && raw.len() != 32 {
        return Err(MptError::WrongKeyLength(raw.len()));
    }
    Ok(keccak256(raw))
}

/// The ordered node list for one key: RLP encodings of every hash-referenced
/// node on the path from the root toward the key. Inlined nodes travel inside
/// their parent's encoding and do not appear separately.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProofNodes(pub Vec<Vec<u8>>);

impl Serialize for ProofNodes {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(|n| bytes_to_hex(n)))
    }
}

impl<'de> Deserialize<'de> for ProofNodes {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(deserializer)?;
        let nodes = strings
            .iter()
            .map(|s| hex_to_bytes(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(de::Error::custom)?;
        Ok(ProofNodes(nodes))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Node {
    Leaf { path: Vec<u8>, value: Vec<u8> },
    Extension { path: Vec<u8>, child: Box<Node> },
    Branch { children: [Option<Box<Node>>; 16] },
}

/// An in-memory trie owning its nodes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trie {
    root: Option<Box<Node>>,
}

impl Trie {
    pub fn new() -> Self {
        Trie::default()
    }

    /// Inserts `value` under `key`, replacing any previous value. An empty
    /// value means deletion: tries never store empty values.
    pub fn insert(&mut self, key: &[u8], value: &[u8]) {
        if value.is_empty() {
            self.remove(key);
            return;
        }
        let path = key_to_nibbles(key);
        let root = self.root.take();
        self.root = Some(insert_at(root, &path, value.to_vec()));
    }

    /// Removes `key` if present; absent keys are a no-op.
    pub fn remove(&mut self, key: &[u8]) {
        let path = key_to_nibbles(key);
        if let Some(root) = self.root.take() {
            self.root = remove_at(root, &path);
        }
    }

    pub fn get(&self, key: &[u8]) -> Option<&[u8]> {
        let path = key_to_nibbles(key);
        let mut node = self.root.as_deref()?;
        let mut remaining: &[u8] = &path;
        loop {
            match node {
                Node::Leaf { path, value } => {
                    return (path[..] == *remaining).then_some(value.as_slice());
                }
                Node::Extension { path, child } => {
                    if remaining.len() >= path.len() && remaining[..path.len()] == path[..] {
                        remaining = &remaining[path.len()..];
                        node = child;
                    } else {
                        return None;
                    }
                }
                Node::Branch { children } => {
                    let (&nib, rest) = remaining.split_first()?;
                    node = children[nib as usize].as_deref()?;
                    remaining = rest;
                }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    /// keccak-256 of the root node's RLP encoding; the empty trie has the
    /// well-known constant root.
    pub fn root_hash(&self) -> Hash256 {
        match &self.root {
            None => EMPTY_TRIE_ROOT,
            Some(node) => keccak256(&rlp_encode(&node_item(node))),
        }
    }

    /// Collects the proof node list for `key`: the RLP of every
    /// hash-referenced node visited walking toward the key, root first. The
    /// same walk serves inclusion and absence; on the empty trie the list is
    /// empty.
    pub fn prove(&self, key: &[u8]) -> ProofNodes {
        let mut nodes = Vec::new();
        let Some(root) = self.root.as_deref() else {
            return ProofNodes(nodes);
        };
        nodes.push(rlp_encode(&node_item(root)));
        let path = key_to_nibbles(key);
        let mut remaining: &[u8] = &path;
        let mut node = root;
        loop {
            let next = match node {
                Node::Leaf { .. } => None,
                Node::Extension { path, child } => {
                    if remaining.len() >= path.len() && remaining[..path.len()] == path[..] {
                        remaining = &remaining[path.len()..];
                        Some(child.as_ref())
                    } else {
                        None
                    }
                }
                Node::Branch { children } => match remaining.split_first() {
                    Some((&nib, rest)) => {
                        remaining = rest;
                        children[nib as usize].as_deref()
                    }
                    None => None,
                },
            };
            match next {
                Some(child) => {
                    let encoded = rlp_encode(&node_item(child));
                    if encoded.len() >= 32 {
                        nodes.push(encoded);
                    }
                    node = child;
                }
                None => break,
            }
        }
        ProofNodes(nodes)
    }
}

/// Structural RLP item of a node (children inlined or referenced by hash).
fn node_item(node: &Node) -> RlpItem {
    match node {
        Node::Leaf { path, value } => RlpItem::list([
            RlpItem::bytes(encode_path(path, true)),
            RlpItem::bytes(value.as_slice()),
        ]),
        Node::Extension { path, child } => {
            RlpItem::list([RlpItem::bytes(encode_path(path, false)), ref_item(child)])
        }
        Node::Branch { children } => {
            let mut items: Vec<RlpItem> = children
                .iter()
                .map(|slot| match slot {
                    None => RlpItem::bytes([]),
                    Some(child) => ref_item(child),
                })
                .collect();
            items.push(RlpItem::bytes([]));
            RlpItem::List(items)
        }
    }
}

/// Reference to a child inside its parent: the node itself when its encoding
/// is shorter than 32 bytes, its hash otherwise.
fn ref_item(node: &Node) -> RlpItem {
    let item = node_item(node);
    let encoded = rlp_encode(&item);
    if encoded.len() < 32 {
        item
    } else {
        RlpItem::bytes(keccak256(&encoded).0.as_slice())
    }
}

fn insert_at(node: Option<Box<Node>>, path: &[u8], value: Vec<u8>) -> Box<Node> {
    let Some(node) = node else {
        return Box::new(Node::Leaf {
            path: path.to_vec(),
            value,
        });
    };
    match *node {
        Node::Leaf {
            path: leaf_path,
            value: leaf_value,
        } => {
            if leaf_path[..] == *path {
                return Box::new(Node::Leaf {
                    path: leaf_path,
                    value,
                });
            }
            let common = common_prefix_len(&leaf_path, path);
            assert!(
                common < leaf_path.len() && common < path.len(),
                "key is a prefix of an existing key; equal-length keys required"
            );
            let mut children: [Option<Box<Node>>; 16] = Default::default();
            children[leaf_path[common] as usize] = Some(Box::new(Node::Leaf {
                path: leaf_path[common + 1..].to_vec(),
                value: leaf_value,
            }));
            children[path[common] as usize] = Some(Box::new(Node::Leaf {
                path: path[common + 1..].to_vec(),
                value,
            }));
            wrap_extension(&path[..common], Box::new(Node::Branch { children }))
        }
        Node::Extension {
            path: ext_path,
            child,
        } => {
            let common = common_prefix_len(&ext_path, path);
            if common == ext_path.len() {
                let child = insert_at(Some(child), &path[common..], value);
                return Box::new(Node::Extension {
                    path: ext_path,
                    child,
                });
            }
            assert!(
                common < path.len(),
                "key is a prefix of an existing key; equal-length keys required"
            );
            let mut children: [Option<Box<Node>>; 16] = Default::default();
            // The surviving part of the extension past the fork, if any.
            let ext_remainder = &ext_path[common + 1..];
            children[ext_path[common] as usize] = Some(if ext_remainder.is_empty() {
                child
            } else {
                Box::new(Node::Extension {
                    path: ext_remainder.to_vec(),
                    child,
                })
            });
            children[path[common] as usize] = Some(Box::new(Node::Leaf {
                path: path[common + 1..].to_vec(),
                value,
            }));
            wrap_extension(&path[..common], Box::new(Node::Branch { children }))
        }
        Node::Branch { mut children } => {
            let (&nib, rest) = path
                .split_first()
                .expect("key is a prefix of an existing key; equal-length keys required");
            let slot = &mut children[nib as usize];
            *slot = Some(insert_at(slot.take(), rest, value));
            Box::new(Node::Branch { children })
        }
    }
}

fn wrap_extension(prefix: &[u8], node: Box<Node>) -> Box<Node> {
    if prefix.is_empty() {
        node
    } else {
        Box::new(Node::Extension {
            path: prefix.to_vec(),
            child: node,
        })
    }
}

fn remove_at(node: Box<Node>, path: &[u8]) -> Option<Box<Node>> {
    match *node {
        Node::Leaf {
            path: ref leaf_path,
            ..
        } => {
            if leaf_path[..] == *path {
                None
            } else {
                Some(node)
            }
        }
        Node::Extension {
            path: ext_path,
            child,
        } => {
            if path.len() >= ext_path.len() && path[..ext_path.len()] == ext_path[..] {
                remove_at(child, &path[ext_path.len()..])
                    .map(|new_child| merge_extension(ext_path, *new_child))
            } else {
                Some(Box::new(Node::Extension {
                    path: ext_path,
                    child,
                }))
            }
        }
        Node::Branch { mut children } => {
            let Some((&nib, rest)) = path.split_first() else {
                return Some(Box::new(Node::Branch { children }));
            };
            let slot = &mut children[nib as usize];
            let Some(child) = slot.take() else {
                return Some(Box::new(Node::Branch { children }));
            };
            *slot = remove_at(child, rest);
            let occupied: Vec<usize> = (0..16).filter(|&i| children[i].is_some()).collect();
            match occupied.len() {
                0 => None,
                1 => {
                    // A one-child branch is non-canonical; fold the surviving
                    // child's nibble back into its path.
                    let i = occupied[0];
                    let survivor = children[i].take().unwrap();
                    Some(merge_extension(vec![i as u8], *survivor))
                }
                _ => Some(Box::new(Node::Branch { children })),
            }
        }
    }
}

/// Prepends `prefix` nibbles onto a node, fusing with a leaf or extension
/// rather than stacking extensions.
fn merge_extension(prefix: Vec<u8>, node: Node) -> Box<Node> {
    match node {
        Node::Leaf { path, value } => {
            let mut joined = prefix;
            joined.extend_from_slice(&path);
            Box::new(Node::Leaf {
                path: joined,
                value,
            })
        }
        Node::Extension { path, child } => {
            let mut joined = prefix;
            joined.extend_from_slice(&path);
            Box::new(Node::Extension {
                path: joined,
                child,
            })
        }
        branch @ Node::Branch { .. } => Box::new(Node::Extension {
            path: prefix,
            child: Box::new(branch),
        }),
    }
}
