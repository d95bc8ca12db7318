//! Reference RLP encoder written straight from the encoding rules: a single
//! byte below 0x80 stands for itself, short payloads get a one-byte length
//! prefix, long payloads a length-of-length prefix, and lists wrap the
//! concatenation of their encoded elements.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Bytes(Vec<u8>),
    List(Vec<Item>),
}

impl Item {
    pub fn bytes(data: &[u8]) -> Item {
        Item::Bytes(data.to_vec())
    }

    /// Minimal big-endian integer: zero encodes as the empty string.
    pub fn uint(value: u128) -> Item {
        let be = value.to_be_bytes();
        let first = be.iter().position(|&b| b != 0).unwrap_or(be.len());
        Item::Bytes(be[first..].to_vec())
    }
}

pub fn encode(item: &Item) -> Vec<u8> {
    match item {
        Item::Bytes(data) => {
            if data.len() == 1 && data[0] < 0x80 {
                data.clone()
            } else {
                let mut out = length_prefix(0x80, data.len());
                out.extend_from_slice(data);
                out
            }
        }
        Item::List(items) => {
            let mut payload = Vec::new();
            for element in items {
                payload.extend(encode(element));
            }
            let mut out = length_prefix(0xc0, payload.len());
            out.extend(payload);
            out
        }
    }
}

fn length_prefix(base: u8, len: usize) -> Vec<u8> {
    if len <= 55 {
        return vec![base + len as u8];
    }
    let be = len.to_be_bytes();
    let first = be.iter().position(|&b| b != 0).unwrap();
    let mut out = vec![base + 55 + (be.len() - first) as u8];
    out.extend_from_slice(&be[first..]);
    out
}

#[cfg(test)]
mod tests {
    use super::{encode, Item};

    // The classic worked examples that ship with the encoding's definition.
    #[test]
    fn canonical_examples() {
        assert_eq!(encode(&Item::bytes(b"dog")), vec![0x83, b'd', b'o', b'g']);
        assert_eq!(
            encode(&Item::List(vec![Item::bytes(b"cat"), Item::bytes(b"dog")])),
            vec![0xc8, 0x83, b'c', b'a', b't', 0x83, b'd', b'o', b'g'],
        );
        assert_eq!(encode(&Item::bytes(b"")), vec![0x80]);
        assert_eq!(encode(&Item::List(vec![])), vec![0xc0]);
        assert_eq!(encode(&Item::uint(0)), vec![0x80]);
        assert_eq!(encode(&Item::uint(15)), vec![0x0f]);
        assert_eq!(encode(&Item::uint(1024)), vec![0x82, 0x04, 0x00]);
        // set-theoretic representation of three: [ [], [[]], [ [], [[]] ] ]
        let three = Item::List(vec![
            Item::List(vec![]),
            Item::List(vec![Item::List(vec![])]),
            Item::List(vec![
                Item::List(vec![]),
                Item::List(vec![Item::List(vec![])]),
            ]),
        ]);
        assert_eq!(
            encode(&three),
            vec![0xc7, 0xc0, 0xc1, 0xc0, 0xc3, 0xc0, 0xc1, 0xc0],
        );
    }

    #[test]
    fn long_string_gets_length_of_length() {
        let lorem = vec![b'a'; 56];
        let encoded = encode(&Item::bytes(&lorem));
        assert_eq!(encoded[0], 0xb8);
        assert_eq!(encoded[1], 56);
        assert_eq!(&encoded[2..], &lorem[..]);
    }
}
