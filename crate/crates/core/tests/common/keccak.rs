//! Reference Keccak-256: the f[1600] permutation transcribed step by step
//! (theta, rho, pi, chi, iota over a 5x5 lane grid), a byte-rate sponge, and
//! the original 0x01 multi-rate padding. Anchored to published digests in
//! the self-tests below.

/// 1600 - 2 * 256 bits of capacity leaves a 136-byte rate.
const RATE_BYTES: usize = 136;

const ROUND_CONSTANTS: [u64; 24] = [
    0x0000000000000001,
    0x0000000000008082,
    0x800000000000808a,
    0x8000000080008000,
    0x000000000000808b,
    0x0000000080000001,
    0x8000000080008081,
    0x8000000000008009,
    0x000000000000008a,
    0x0000000000000088,
    0x0000000080008009,
    0x000000008000000a,
    0x000000008000808b,
    0x800000000000008b,
    0x8000000000008089,
    0x8000000000008003,
    0x8000000000008002,
    0x8000000000000080,
    0x000000000000800a,
    0x800000008000000a,
    0x8000000080008081,
    0x8000000000008080,
    0x0000000080000001,
    0x8000000080008008,
];

/// Rho rotation offset of lane (x, y).
const ROTATIONS: [[u32; 5]; 5] = [
    [0, 36, 3, 41, 18],
    [1, 44, 10, 45, 2],
    [62, 6, 43, 15, 61],
    [28, 55, 25, 21, 56],
    [27, 20, 39, 8, 14],
];

fn keccak_f(state: &mut [[u64; 5]; 5]) {
    for &round_constant in &ROUND_CONSTANTS {
        // theta: each lane absorbs the parity of its two neighbor columns
        let mut column = [0u64; 5];
        for x in 0..5 {
            column[x] = state[x][0] ^ state[x][1] ^ state[x][2] ^ state[x][3] ^ state[x][4];
        }
        for x in 0..5 {
            let d = column[(x + 4) % 5] ^ column[(x + 1) % 5].rotate_left(1);
            for lane in state[x].iter_mut() {
                *lane ^= d;
            }
        }
        // rho and pi: rotate every lane, then move it to (y, 2x + 3y)
        let mut moved = [[0u64; 5]; 5];
        for x in 0..5 {
            for y in 0..5 {
                moved[y][(2 * x + 3 * y) % 5] = state[x][y].rotate_left(ROTATIONS[x][y]);
            }
        }
        // chi: nonlinear mix along each row
        for x in 0..5 {
            for y in 0..5 {
                state[x][y] = moved[x][y] ^ (!moved[(x + 1) % 5][y] & moved[(x + 2) % 5][y]);
            }
        }
        // iota
        state[0][0] ^= round_constant;
    }
}

/// Keccak-256 digest of `data`.
pub fn keccak256_ref(data: &[u8]) -> [u8; 32] {
    let mut padded = data.to_vec();
    padded.push(0x01);
    while !padded.len().is_multiple_of(RATE_BYTES) {
        padded.push(0x00);
    }
    *padded.last_mut().unwrap() |= 0x80;

    let mut state = [[0u64; 5]; 5];
    for block in padded.chunks(RATE_BYTES) {
        for (i, lane) in block.chunks(8).enumerate() {
            state[i % 5][i / 5] ^= u64::from_le_bytes(lane.try_into().unwrap());
        }
        keccak_f(&mut state);
    }

    let mut digest = [0u8; 32];
    for i in 0..4 {
        digest[i * 8..][..8].copy_from_slice(&state[i % 5][i / 5].to_le_bytes());
    }
    digest
}

#[cfg(test)]
mod tests {
    use super::keccak256_ref;

    fn hex(digest: [u8; 32]) -> String {
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    // Published Keccak-256 digests, independent of any code in this repo.
    #[test]
    fn matches_published_digests() {
        assert_eq!(
            hex(keccak256_ref(b"")),
            "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470",
        );
        assert_eq!(
            hex(keccak256_ref(b"abc")),
            "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45",
        );
        assert_eq!(
            hex(keccak256_ref(
                b"The quick brown fox jumps over the lazy dog"
            )),
            "4d741b6f1eb29cb2a9b9911c82f56fa8d73b04959d3d9d222895df6c0b28aa15",
        );
    }

    #[test]
    fn multi_block_inputs_absorb_cleanly() {
        // Crossing the 136-byte rate boundary must change the digest stream,
        // not wedge the sponge: three related lengths, three digests.
        let long = [0x61u8; 200];
        let a = keccak256_ref(&long[..135]);
        let b = keccak256_ref(&long[..136]);
        let c = keccak256_ref(&long[..137]);
        assert_ne!(a, b);
        assert_ne!(b, c);
        assert_ne!(a, c);
    }
}
