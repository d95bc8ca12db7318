//! Reference Merkle Patricia Trie root, computed in one top-down pass over
//! the sorted key set: find the shared nibble run, emit an extension, split
//! on the next nibble, emit a branch, end single survivors in leaves. The
//! production trie builds the same structure incrementally; this one never
//! mutates anything, so a bug would have to be made twice to go unnoticed.
//!
//! Keys must be prefix-free (secure tries hash every key to 32 bytes, so
//! this always holds); branch nodes therefore never carry values.

use std::collections::BTreeMap;

use super::keccak::keccak256_ref;
use super::rlp::{encode, Item};

/// Root hash of the trie holding `pairs` (raw key to non-empty value).
pub fn trie_root_ref(pairs: &BTreeMap<Vec<u8>, Vec<u8>>) -> [u8; 32] {
    if pairs.is_empty() {
        // the empty trie commits to the RLP of the empty string
        return keccak256_ref(&encode(&Item::bytes(&[])));
    }
    let items: Vec<(Vec<u8>, &[u8])> = pairs
        .iter()
        .map(|(key, value)| {
            assert!(!value.is_empty(), "tries never store empty values");
            (to_nibbles(key), value.as_slice())
        })
        .collect();
    keccak256_ref(&encode(&node(&items, 0)))
}

/// The node covering `items`, all of which agree on their first `depth`
/// nibbles.
fn node(items: &[(Vec<u8>, &[u8])], depth: usize) -> Item {
    if items.len() == 1 {
        let (nibbles, value) = &items[0];
        return Item::List(vec![
            Item::Bytes(hex_prefix(&nibbles[depth..], true)),
            Item::bytes(value),
        ]);
    }

    let shared = shared_run(items, depth);
    if shared > 0 {
        let path = items[0].0[depth..depth + shared].to_vec();
        return Item::List(vec![
            Item::Bytes(hex_prefix(&path, false)),
            child_ref(node(items, depth + shared)),
        ]);
    }

    let mut children = Vec::with_capacity(17);
    for nibble in 0..16u8 {
        let group: Vec<(Vec<u8>, &[u8])> = items
            .iter()
            .filter(|(key, _)| {
                assert!(depth < key.len(), "keys must be prefix-free");
                key[depth] == nibble
            })
            .cloned()
            .collect();
        children.push(if group.is_empty() {
            Item::bytes(&[])
        } else {
            child_ref(node(&group, depth + 1))
        });
    }
    children.push(Item::bytes(&[])); // value slot, empty for prefix-free keys
    Item::List(children)
}

/// How many nibbles beyond `depth` every item shares.
fn shared_run(items: &[(Vec<u8>, &[u8])], depth: usize) -> usize {
    let first = &items[0].0;
    let mut run = 0;
    while depth + run < first.len() {
        let nibble = first[depth + run];
        if items
            .iter()
            .any(|(key, _)| depth + run >= key.len() || key[depth + run] != nibble)
        {
            break;
        }
        run += 1;
    }
    assert!(depth + run < first.len(), "duplicate or prefix keys");
    run
}

/// A child is inlined when its encoding is short, referenced by hash
/// otherwise.
fn child_ref(child: Item) -> Item {
    let encoded = encode(&child);
    if encoded.len() < 32 {
        child
    } else {
        Item::Bytes(keccak256_ref(&encoded).to_vec())
    }
}

fn to_nibbles(key: &[u8]) -> Vec<u8> {
    key.iter()
        .flat_map(|byte| [byte >> 4, byte & 0x0f])
        .collect()
}

/// Hex-prefix encoding: flag 2 marks a leaf, low bit marks odd length, odd
/// paths start in the low nibble of the first byte.
fn hex_prefix(nibbles: &[u8], leaf: bool) -> Vec<u8> {
    let flag = if leaf { 2u8 } else { 0 };
    let mut out = Vec::with_capacity(nibbles.len() / 2 + 1);
    let rest = if nibbles.len().is_multiple_of(2) {
        out.push(flag << 4);
        nibbles
    } else {
        out.push((flag | 1) << 4 | nibbles[0]);
        &nibbles[1..]
    };
    for pair in rest.chunks(2) {
        out.push(pair[0] << 4 | pair[1]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hex(digest: [u8; 32]) -> String {
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    #[test]
    fn empty_trie_root_is_the_known_constant() {
        assert_eq!(
            hex(trie_root_ref(&BTreeMap::new())),
            "56e81f171bcc55a6ff8345e692c0f86e5b48e01b996cadc001622fb5e363b421",
        );
    }

    #[test]
    fn hex_prefix_examples() {
        assert_eq!(hex_prefix(&[1, 2, 3, 4, 5], false), vec![0x11, 0x23, 0x45]);
        assert_eq!(
            hex_prefix(&[0, 1, 2, 3, 4, 5], false),
            vec![0x00, 0x01, 0x23, 0x45]
        );
        assert_eq!(
            hex_prefix(&[0x0f, 1, 0x0c, 0x0b, 8], true),
            vec![0x3f, 0x1c, 0xb8]
        );
        assert_eq!(hex_prefix(&[], true), vec![0x20]);
    }

    #[test]
    fn single_pair_root_is_hash_of_one_leaf() {
        let mut pairs = BTreeMap::new();
        pairs.insert(b"k".to_vec(), b"value".to_vec());
        // leaf: [hex_prefix(nibbles of "k", leaf), "value"]
        let leaf = Item::List(vec![
            Item::Bytes(hex_prefix(&[6, 0x0b], true)),
            Item::bytes(b"value"),
        ]);
        assert_eq!(trie_root_ref(&pairs), keccak256_ref(&encode(&leaf)));
    }
}
