//! Recursive-Length Prefix serialization.
//!
//! The decoder is strict: proofs are adversarial inputs, so any non-canonical
//! encoding (padded lengths, a single byte below 0x80 wrapped in a length
//! prefix, trailing data) is rejected rather than normalized.

use serde::{Deserialize, Serialize};

use super::EncodingError;

/// Maximum nesting depth accepted by the decoder. Trie nodes nest at most two
/// levels deep; anything past this bound is garbage or an attack.
const MAX_DEPTH: usize = 64;

/// An RLP item: either a byte string or an ordered list of items.
///
/// Integers do not appear here directly; callers convert them to minimal
/// big-endian bytes first (zero encodes as the empty string).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RlpItem {
    Bytes(Vec<u8>),
    List(Vec<RlpItem>),
}

impl RlpItem {
    pub fn bytes(data: impl Into<Vec<u8>>) -> Self {
        RlpItem::Bytes(data.into())
    }

    pub fn list(items: impl Into<Vec<RlpItem>>) -> Self {
        RlpItem::List(items.into())
    }

    /// Item for an unsigned integer: minimal big-endian bytes, zero → empty.
    pub fn uint(value: u128) -> Self {
        RlpItem::Bytes(super::min_be(value))
    }

    pub fn as_bytes(&self) -> Option<&[u8]> {
        match self {
            RlpItem::Bytes(b) => Some(b),
            RlpItem::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[RlpItem]> {
        match self {
            RlpItem::Bytes(_) => None,
            RlpItem::List(items) => Some(items),
        }
    }
}

/// Encodes an item tree to canonical RLP bytes.
pub fn rlp_encode(item: &RlpItem) -> Vec<u8> {
    let mut out = Vec::new();
    encode_into(item, &mut out);
    out
}

fn encode_into(item: &RlpItem, out: &mut Vec<u8>) {
    match item {
        RlpItem::Bytes(data) => {
            if data.len() == 1 && data[0] < 0x80 {
                out.push(data[0]);
            } else {
                encode_length(data.len(), 0x80, out);
                out.extend_from_slice(data);
            }
        }
        RlpItem::List(items) => {
            let mut payload = Vec::new();
            for it in items {
                encode_into(it, &mut payload);
            }
            encode_length(payload.len(), 0xc0, out);
            out.extend_from_slice(&payload);
        }
    }
}

fn encode_length(len: usize, offset: u8, out: &mut Vec<u8>) {
    if len < 56 {
        out.push(offset + len as u8);
    } else {
        let be = (len as u64).to_be_bytes();
        let first = be.iter().position(|&b| b != 0).unwrap_or(7);
        out.push(offset + 55 + (8 - first) as u8);
        out.extend_from_slice(&be[first..]);
    }
}

/// Decodes exactly one canonical RLP item; trailing bytes are an error.
pub fn rlp_decode(data: &[u8]) -> Result<RlpItem, EncodingError> {
    if data.is_empty() {
        return Err(EncodingError::MalformedRlp("empty input"));
    }
    let (item, consumed) = decode_item(data, 0)?;
    if consumed != data.len() {
        return Err(EncodingError::MalformedRlp("trailing bytes after item"));
    }
    Ok(item)
}

fn decode_item(data: &[u8], depth: usize) -> Result<(RlpItem, usize), EncodingError> {
    if depth > MAX_DEPTH {
        return Err(EncodingError::MalformedRlp("nesting too deep"));
    }
    let prefix = *data
        .first()
        .ok_or(EncodingError::MalformedRlp("truncated item"))?;
    match prefix {
        0x00..=0x7f => Ok((RlpItem::Bytes(vec![prefix]), 1)),
        0x80..=0xb7 => {
            let len = (prefix - 0x80) as usize;
            let payload = slice_payload(data, 1, len)?;
            if len == 1 && payload[0] < 0x80 {
                return Err(EncodingError::MalformedRlp(
                    "single byte below 0x80 must encode as itself",
                ));
            }
            Ok((RlpItem::Bytes(payload.to_vec()), 1 + len))
        }
        0xb8..=0xbf => {
            let (len, header) = decode_long_length(data, prefix - 0xb7)?;
            let payload = slice_payload(data, header, len)?;
            Ok((RlpItem::Bytes(payload.to_vec()), header + len))
        }
        0xc0..=0xf7 => {
            let len = (prefix - 0xc0) as usize;
            let payload = slice_payload(data, 1, len)?;
            Ok((decode_list_payload(payload, depth)?, 1 + len))
        }
        0xf8..=0xff => {
            let (len, header) = decode_long_length(data, prefix - 0xf7)?;
            let payload = slice_payload(data, header, len)?;
            Ok((decode_list_payload(payload, depth)?, header + len))
        }
    }
}

/// Reads a long-form length (`len_of_len` bytes after the prefix), rejecting
/// padded lengths and values that fit the short form.
fn decode_long_length(data: &[u8], len_of_len: u8) -> Result<(usize, usize), EncodingError> {
    let len_of_len = len_of_len as usize;
    if data.len() < 1 + len_of_len {
        return Err(EncodingError::MalformedRlp("truncated length prefix"));
    }
    let len_bytes = &data[1..1 + len_of_len];
    if len_bytes[0] == 0 {
        return Err(EncodingError::MalformedRlp("length has leading zero"));
    }
    let mut len: usize = 0;
    for &b in len_bytes {
        len = len
            .checked_mul(256)
            .and_then(|v| v.checked_add(b as usize))
            .ok_or(EncodingError::MalformedRlp("length overflow"))?;
    }
    if len < 56 {
        return Err(EncodingError::MalformedRlp(
            "long form used for short payload",
        ));
    }
    Ok((len, 1 + len_of_len))
}

fn slice_payload(data: &[u8], start: usize, len: usize) -> Result<&[u8], EncodingError> {
    data.get(start..start + len)
        .ok_or(EncodingError::MalformedRlp("truncated payload"))
}

fn decode_list_payload(payload: &[u8], depth: usize) -> Result<RlpItem, EncodingError> {
    let mut items = Vec::new();
    let mut pos = 0;
    while pos < payload.len() {
        let (item, consumed) = decode_item(&payload[pos..], depth + 1)?;
        items.push(item);
        pos += consumed;
    }
    Ok(RlpItem::List(items))
}
