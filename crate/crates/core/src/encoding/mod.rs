//! Byte-level primitives shared by every layer: keccak-256, RLP, fixed-width
//! word and address types, hex conventions, and contract-address derivation.
//!
//! Hex is 0x-prefixed lowercase everywhere. Parsing accepts mixed case but
//! output is always lowercase.

mod rlp;

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;
use tiny_keccak::{Hasher, Keccak};

pub use rlp::{rlp_decode, rlp_encode, RlpItem};

/// Serde adapter: u128 amounts as decimal strings in JSON. Floats cannot
/// represent token amounts; every quantity crosses the wire as text.
pub mod dec {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &u128, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<u128, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse()
            .map_err(|_| de::Error::custom(format!("not a decimal amount: {s:?}")))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("malformed rlp: {0}")]
    MalformedRlp(&'static str),
    #[error("invalid hex string {0:?}")]
    InvalidHex(String),
    #[error("expected {expected} bytes, got {got}")]
    WrongLength { expected: usize, got: usize },
}

/// A 32-byte word: hashes, trie keys, storage slots, and storage values all
/// share this shape.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Hash256(pub [u8; 32]);

/// A 20-byte account address.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Address(pub [u8; 20]);

/// keccak256 of the empty byte string.
pub const KECCAK_EMPTY: Hash256 = Hash256([
    0xc5, 0xd2, 0x46, 0x01, 0x86, 0xf7, 0x23, 0x3c, 0x92, 0x7e, 0x7d, 0xb2, 0xdc, 0xc7, 0x03, 0xc0,
    0xe5, 0x00, 0xb6, 0x53, 0xca, 0x82, 0x27, 0x3b, 0x7b, 0xfa, 0xd8, 0x04, 0x5d, 0x85, 0xa4, 0x70,
]);

pub fn keccak256(data: &[u8]) -> Hash256 {
    let mut hasher = Keccak::v256();
    hasher.update(data);
    let mut out = [0u8; 32];
    hasher.finalize(&mut out);
    Hash256(out)
}

/// keccak256 over several segments without intermediate concatenation.
pub fn keccak256_concat(segments: &[&[u8]]) -> Hash256 {
    let mut hasher = Keccak::v256();
    for seg in segments {
        hasher.update(seg);
    }
    let mut out = [0u8; 32];
    hasher.finalize(&mut out);
    Hash256(out)
}

/// Minimal big-endian bytes of an unsigned integer; zero is the empty string.
pub fn min_be(value: u128) -> Vec<u8> {
    let be = value.to_be_bytes();
    let first = be.iter().position(|&b| b != 0).unwrap_or(be.len());
    be[first..].to_vec()
}

/// Inverse of [`min_be`] for values that must fit in a u128. Rejects leading
/// zeros: integer fields in canonical encodings are minimal.
pub fn u128_from_min_be(bytes: &[u8]) -> Result<u128, EncodingError> {
    if bytes.first() == Some(&0) {
        return Err(EncodingError::MalformedRlp("integer has leading zero"));
    }
    if bytes.len() > 16 {
        return Err(EncodingError::WrongLength {
            expected: 16,
            got: bytes.len(),
        });
    }
    let mut value: u128 = 0;
    for &b in bytes {
        value = (value << 8) | b as u128;
    }
    Ok(value)
}

/// Address of a contract deployed with CREATE:
/// last 20 bytes of keccak256(rlp([deployer, nonce])).
pub fn create_address(deployer: &Address, nonce: u64) -> Address {
    let encoded = rlp_encode(&RlpItem::list([
        RlpItem::bytes(deployer.0.as_slice()),
        RlpItem::uint(nonce as u128),
    ]));
    Address::from_word(&keccak256(&encoded))
}

/// Address of a contract deployed with CREATE2:
/// last 20 bytes of keccak256(0xff ++ deployer ++ salt ++ keccak256(init_code)).
pub fn create2_address(deployer: &Address, salt: &Hash256, init_code_hash: &Hash256) -> Address {
    let digest = keccak256_concat(&[&[0xff], &deployer.0, &salt.0, &init_code_hash.0]);
    Address::from_word(&digest)
}

pub fn bytes_to_hex(bytes: &[u8]) -> String {
    format!("0x{}", hex::encode(bytes))
}

pub fn hex_to_bytes(s: &str) -> Result<Vec<u8>, EncodingError> {
    let stripped = s
        .strip_prefix("0x")
        .ok_or_else(|| EncodingError::InvalidHex(s.to_string()))?;
    hex::decode(stripped).map_err(|_| EncodingError::InvalidHex(s.to_string()))
}

impl Hash256 {
    pub const ZERO: Hash256 = Hash256([0; 32]);

    pub fn from_slice(bytes: &[u8]) -> Result<Self, EncodingError> {
        let arr: [u8; 32] = bytes.try_into().map_err(|_| EncodingError::WrongLength {
            expected: 32,
            got: bytes.len(),
        })?;
        Ok(Hash256(arr))
    }

    /// A word holding a small integer, left-padded with zeros.
    pub fn from_u128(value: u128) -> Self {
        let mut out = [0u8; 32];
        out[16..].copy_from_slice(&value.to_be_bytes());
        Hash256(out)
    }

    /// A word holding an address, left-padded with zeros.
    pub fn from_address(addr: &Address) -> Self {
        let mut out = [0u8; 32];
        out[12..].copy_from_slice(&addr.0);
        Hash256(out)
    }

    /// Reads the word as an integer if it fits in a u128.
    pub fn to_u128(&self) -> Option<u128> {
        if self.0[..16].iter().any(|&b| b != 0) {
            return None;
        }
        Some(u128::from_be_bytes(self.0[16..].try_into().unwrap()))
    }

    /// Reads the low 20 bytes as an address; the high 12 must be zero.
    pub fn to_address(&self) -> Option<Address> {
        if self.0[..12].iter().any(|&b| b != 0) {
            return None;
        }
        Some(Address(self.0[12..].try_into().unwrap()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }
}

impl Address {
    pub const ZERO: Address = Address([0; 20]);

    pub fn from_slice(bytes: &[u8]) -> Result<Self, EncodingError> {
        let arr: [u8; 20] = bytes.try_into().map_err(|_| EncodingError::WrongLength {
            expected: 20,
            got: bytes.len(),
        })?;
        Ok(Address(arr))
    }

    /// Low 20 bytes of a 32-byte word, as used by CREATE-style derivation.
    pub fn from_word(word: &Hash256) -> Self {
        Address(word.0[12..].try_into().unwrap())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }
}

macro_rules! impl_hex_traits {
    ($ty:ty, $len:expr) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "0x{}", hex::encode(self.0))
            }
        }

        impl fmt::Debug for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{self}")
            }
        }

        impl FromStr for $ty {
            type Err = EncodingError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let bytes = hex_to_bytes(s)?;
                Self::from_slice(&bytes)
            }
        }

        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(&self.to_string())
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(de::Error::custom)
            }
        }
    };
}

impl_hex_traits!(Hash256, 32);
impl_hex_traits!(Address, 20);
