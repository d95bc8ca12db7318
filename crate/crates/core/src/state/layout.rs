//! Storage layouts of the token contracts the simulation understands, and
//! the slot arithmetic shared by state writes and resolver reads.

use serde::{Deserialize, Serialize};

use crate::encoding::{keccak256_concat, Address, Hash256};

/// Where a token contract keeps its data, by Solidity storage slot index.
///
/// The same description serves two sides: the simulated L2 writes through it,
/// and resolvers read through it when computing entitlements from proofs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TokenLayout {
    /// Fungible token: `mapping(address => uint256) balances` plus a total
    /// supply counter.
    Erc20 {
        balances_slot: u64,
        total_supply_slot: u64,
    },
    /// Non-fungible token: `mapping(uint256 => address) owners`.
    Erc721 { owners_slot: u64 },
    /// Constant-product pair: LP token bookkeeping plus the two pooled token
    /// addresses.
    Univ2Pair {
        total_supply_slot: u64,
        lp_balances_slot: u64,
        token0_slot: u64,
        token1_slot: u64,
    },
}

impl TokenLayout {
    /// OpenZeppelin-style ERC-20: balances in slot 0.
    pub fn erc20_default() -> Self {
        TokenLayout::Erc20 {
            balances_slot: 0,
            total_supply_slot: 2,
        }
    }

    /// ERC-721 with owners in slot 0.
    pub fn erc721_default() -> Self {
        TokenLayout::Erc721 { owners_slot: 0 }
    }

    /// The UniswapV2Pair layout: ERC-20 bookkeeping inherited first
    /// (totalSupply 0, balanceOf 1), pooled token addresses at 6 and 7.
    pub fn univ2_default() -> Self {
        TokenLayout::Univ2Pair {
            total_supply_slot: 0,
            lp_balances_slot: 1,
            token0_slot: 6,
            token1_slot: 7,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            TokenLayout::Erc20 { .. } => "erc20",
            TokenLayout::Erc721 { .. } => "erc721",
            TokenLayout::Univ2Pair { .. } => "univ2_pair",
        }
    }

    /// Placeholder runtime bytecode, distinct per kind so code hashes differ.
    pub fn code_blob(&self) -> &'static [u8] {
        match self {
            TokenLayout::Erc20 { .. } => b"\x60erc20-sim-runtime",
            TokenLayout::Erc721 { .. } => b"\x60erc721-sim-runtime",
            TokenLayout::Univ2Pair { .. } => b"\x60univ2-pair-sim-runtime",
        }
    }
}

/// Slot of `mapping(...)[key]` for a mapping declared at `slot_index`:
/// keccak256(pad32(key) ++ pad32(slot_index)).
pub fn mapping_slot(key: &Hash256, slot_index: u64) -> Hash256 {
    let index_word = Hash256::from_u128(slot_index as u128);
    keccak256_concat(&[&key.0, &index_word.0])
}

/// Slot of a mapping keyed by address.
pub fn address_mapping_slot(key: &Address, slot_index: u64) -> Hash256 {
    mapping_slot(&Hash256::from_address(key), slot_index)
}

/// Slot of a plain (non-mapping) declaration at `slot_index`.
pub fn direct_slot(slot_index: u64) -> Hash256 {
    Hash256::from_u128(slot_index as u128)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mapping_slot_is_keccak_of_padded_pair() {
        let holder: Address = "0x00000000000000000000000000000000000000ab"
            .parse()
            .unwrap();
        let slot = address_mapping_slot(&holder, 0);
        // keccak256(0^12 ++ holder ++ 0^31 ++ 0x00)
        let mut preimage = [0u8; 64];
        preimage[12..32].copy_from_slice(&holder.0);
        assert_eq!(slot, crate::encoding::keccak256(&preimage));
    }

    #[test]
    fn different_indices_give_different_slots() {
        let key = Hash256::from_u128(7);
        assert_ne!(mapping_slot(&key, 0), mapping_slot(&key, 1));
    }

    #[test]
    fn layout_json_shape() {
        let layout = TokenLayout::erc20_default();
        let json = serde_json::to_string(&layout).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"erc20","balances_slot":0,"total_supply_slot":2}"#
        );
        let back: TokenLayout = serde_json::from_str(&json).unwrap();
        assert_eq!(back, layout);
    }
}
