//! Nibble paths and the hex-prefix encoding used inside trie nodes.

use crate::encoding::EncodingError;

/// Splits each key byte into two nibbles, high first.
pub fn key_to_nibbles(key: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(key.len() * 2);
    for &b in key {
        out.push(b >> 4);
        out.push(b & 0x0f);
    }
    out
}

/// Hex-prefix encoding: packs a nibble path and a leaf/extension flag into
/// bytes. The first nibble carries the flags (bit 1 = odd length, bit 2 =
/// leaf); an even path gets a zero padding nibble after the flag.
pub fn encode_path(nibbles: &[u8], is_leaf: bool) -> Vec<u8> {
    let flag = if is_leaf { 2u8 } else { 0u8 };
    let mut out = Vec::with_capacity(nibbles.len() / 2 + 1);
    if nibbles.len() % 2 == 1 {
        out.push(((flag | 1) << 4) | nibbles[0]);
        pack_pairs(&nibbles[1..], &mut out);
    } else {
        out.push(flag << 4);
        pack_pairs(nibbles, &mut out);
    }
    out
}

fn pack_pairs(nibbles: &[u8], out: &mut Vec<u8>) {
    for pair in nibbles.chunks(2) {
        out.push((pair[0] << 4) | pair[1]);
    }
}

/// Decodes a hex-prefix path into (nibbles, is_leaf). Rejects flag nibbles
/// above 3, nibble values above 15 (impossible by construction, checked for
/// clarity), and a nonzero padding nibble.
pub fn decode_path(encoded: &[u8]) -> Result<(Vec<u8>, bool), EncodingError> {
    let first = *encoded
        .first()
        .ok_or(EncodingError::MalformedRlp("empty path"))?;
    let flag = first >> 4;
    if flag > 3 {
        return Err(EncodingError::MalformedRlp("invalid path flag"));
    }
    let is_leaf = flag & 2 != 0;
    let is_odd = flag & 1 != 0;
    let mut nibbles = Vec::with_capacity(encoded.len() * 2);
    if is_odd {
        nibbles.push(first & 0x0f);
    } else if first & 0x0f != 0 {
        return Err(EncodingError::MalformedRlp("nonzero path padding"));
    }
    for &b in &encoded[1..] {
        nibbles.push(b >> 4);
        nibbles.push(b & 0x0f);
    }
    Ok((nibbles, is_leaf))
}

/// Length of the longest common prefix of two nibble slices.
pub fn common_prefix_len(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}
