//! Token operations on the simulated L2: every balance, owner, and pool share
//! lives in contract storage words, so escape proofs later read exactly what
//! these writes produced.

use crate::encoding::{Address, Hash256};
use crate::state::layout::{address_mapping_slot, direct_slot, mapping_slot};
use crate::state::math::{mul_div_floor, sqrt_product_floor};
use crate::state::{StateError, TokenLayout, WorldState};

fn erc20_slots(world: &WorldState, token: &Address) -> Result<(u64, u64), StateError> {
    match world.layout_of(token) {
        None => Err(StateError::UnknownContract(*token)),
        Some(TokenLayout::Erc20 {
            balances_slot,
            total_supply_slot,
        }) => Ok((*balances_slot, *total_supply_slot)),
        Some(other) => Err(StateError::WrongTokenKind {
            contract: *token,
            expected: "erc20",
            actual: other.kind_name(),
        }),
    }
}

fn erc721_owners_slot(world: &WorldState, token: &Address) -> Result<u64, StateError> {
    match world.layout_of(token) {
        None => Err(StateError::UnknownContract(*token)),
        Some(TokenLayout::Erc721 { owners_slot }) => Ok(*owners_slot),
        Some(other) => Err(StateError::WrongTokenKind {
            contract: *token,
            expected: "erc721",
            actual: other.kind_name(),
        }),
    }
}

fn univ2_layout(world: &WorldState, pool: &Address) -> Result<(u64, u64, u64, u64), StateError> {
    match world.layout_of(pool) {
        None => Err(StateError::UnknownContract(*pool)),
        Some(TokenLayout::Univ2Pair {
            total_supply_slot,
            lp_balances_slot,
            token0_slot,
            token1_slot,
        }) => Ok((
            *total_supply_slot,
            *lp_balances_slot,
            *token0_slot,
            *token1_slot,
        )),
        Some(other) => Err(StateError::WrongTokenKind {
            contract: *pool,
            expected: "univ2_pair",
            actual: other.kind_name(),
        }),
    }
}

/// Words written by this module always hold amounts that fit in u128.
fn word_amount(word: Hash256) -> u128 {
    word.to_u128().expect("simulation amounts fit in u128")
}

pub fn erc20_balance(world: &WorldState, token: &Address, holder: &Address) -> u128 {
    match erc20_slots(world, token) {
        Ok((balances_slot, _)) => {
            word_amount(world.storage_at(token, &address_mapping_slot(holder, balances_slot)))
        }
        Err(_) => 0,
    }
}

pub fn erc20_mint(
    world: &mut WorldState,
    token: Address,
    to: Address,
    amount: u128,
) -> Result<(), StateError> {
    if amount == 0 {
        return Err(StateError::ZeroAmount);
    }
    let (balances_slot, total_supply_slot) = erc20_slots(world, &token)?;
    let bal_slot = address_mapping_slot(&to, balances_slot);
    let supply_slot = direct_slot(total_supply_slot);
    let balance = word_amount(world.storage_at(&token, &bal_slot))
        .checked_add(amount)
        .ok_or(StateError::Overflow)?;
    let supply = word_amount(world.storage_at(&token, &supply_slot))
        .checked_add(amount)
        .ok_or(StateError::Overflow)?;
    world.set_storage(token, bal_slot, Hash256::from_u128(balance));
    world.set_storage(token, supply_slot, Hash256::from_u128(supply));
    Ok(())
}

pub fn erc20_transfer(
    world: &mut WorldState,
    token: Address,
    from: Address,
    to: Address,
    amount: u128,
) -> Result<(), StateError> {
    let (balances_slot, _) = erc20_slots(world, &token)?;
    let from_slot = address_mapping_slot(&from, balances_slot);
    let to_slot = address_mapping_slot(&to, balances_slot);
    let from_balance = word_amount(world.storage_at(&token, &from_slot));
    if from_balance < amount {
        return Err(StateError::InsufficientBalance {
            holder: from,
            available: from_balance,
            required: amount,
        });
    }
    if from == to || amount == 0 {
        return Ok(());
    }
    let to_balance = word_amount(world.storage_at(&token, &to_slot))
        .checked_add(amount)
        .ok_or(StateError::Overflow)?;
    world.set_storage(token, from_slot, Hash256::from_u128(from_balance - amount));
    world.set_storage(token, to_slot, Hash256::from_u128(to_balance));
    Ok(())
}

pub fn erc721_owner(world: &WorldState, token: &Address, token_id: &Hash256) -> Option<Address> {
    let owners_slot = erc721_owners_slot(world, token).ok()?;
    let word = world.storage_at(token, &mapping_slot(token_id, owners_slot));
    if word.is_zero() {
        return None;
    }
    word.to_address()
}

pub fn erc721_mint(
    world: &mut WorldState,
    token: Address,
    to: Address,
    token_id: Hash256,
) -> Result<(), StateError> {
    let owners_slot = erc721_owners_slot(world, &token)?;
    let slot = mapping_slot(&token_id, owners_slot);
    if !world.storage_at(&token, &slot).is_zero() {
        return Err(StateError::AlreadyMinted { token, token_id });
    }
    world.set_storage(token, slot, Hash256::from_address(&to));
    Ok(())
}

pub fn erc721_transfer(
    world: &mut WorldState,
    token: Address,
    from: Address,
    to: Address,
    token_id: Hash256,
) -> Result<(), StateError> {
    let owners_slot = erc721_owners_slot(world, &token)?;
    let slot = mapping_slot(&token_id, owners_slot);
    if world.storage_at(&token, &slot) != Hash256::from_address(&from) {
        return Err(StateError::NotOwner {
            token,
            token_id,
            claimed: from,
        });
    }
    world.set_storage(token, slot, Hash256::from_address(&to));
    Ok(())
}

/// The pooled token addresses (token0, token1) read from pool storage.
pub fn univ2_tokens(world: &WorldState, pool: &Address) -> Result<(Address, Address), StateError> {
    let (_, _, token0_slot, token1_slot) = univ2_layout(world, pool)?;
    let read = |slot: u64| -> Result<Address, StateError> {
        world
            .storage_at(pool, &direct_slot(slot))
            .to_address()
            .ok_or(StateError::UnknownContract(*pool))
    };
    Ok((read(token0_slot)?, read(token1_slot)?))
}

pub fn univ2_lp_balance(world: &WorldState, pool: &Address, provider: &Address) -> u128 {
    match univ2_layout(world, pool) {
        Ok((_, lp_balances_slot, _, _)) => {
            word_amount(world.storage_at(pool, &address_mapping_slot(provider, lp_balances_slot)))
        }
        Err(_) => 0,
    }
}

/// Deposits both tokens into the pool and mints LP shares to the provider.
///
/// The first deposit mints floor(sqrt(x * y)); later deposits mint
/// min(x * total / bal_x, y * total / bal_y) against the pool's pre-deposit
/// balances. Returns the LP amount minted.
pub fn univ2_add_liquidity(
    world: &mut WorldState,
    pool: Address,
    provider: Address,
    amount_x: u128,
    amount_y: u128,
) -> Result<u128, StateError> {
    if amount_x == 0 || amount_y == 0 {
        return Err(StateError::ZeroAmount);
    }
    let (total_supply_slot, lp_balances_slot, _, _) = univ2_layout(world, &pool)?;
    let (token_x, token_y) = univ2_tokens(world, &pool)?;

    let pool_bal_x = erc20_balance(world, &token_x, &pool);
    let pool_bal_y = erc20_balance(world, &token_y, &pool);
    let supply_slot = direct_slot(total_supply_slot);
    let total = word_amount(world.storage_at(&pool, &supply_slot));

    let minted = if total == 0 {
        sqrt_product_floor(amount_x, amount_y)
    } else {
        let share_x = mul_div_floor(amount_x, total, pool_bal_x).ok_or(StateError::Overflow)?;
        let share_y = mul_div_floor(amount_y, total, pool_bal_y).ok_or(StateError::Overflow)?;
        share_x.min(share_y)
    };
    if minted == 0 {
        return Err(StateError::ZeroAmount);
    }

    // Check both token balances before moving either, so a failure cannot
    // leave a half-applied deposit.
    for (token, amount) in [(token_x, amount_x), (token_y, amount_y)] {
        let held = erc20_balance(world, &token, &provider);
        if held < amount {
            return Err(StateError::InsufficientBalance {
                holder: provider,
                available: held,
                required: amount,
            });
        }
    }
    erc20_transfer(world, token_x, provider, pool, amount_x)?;
    erc20_transfer(world, token_y, provider, pool, amount_y)?;

    let lp_slot = address_mapping_slot(&provider, lp_balances_slot);
    let lp_balance = word_amount(world.storage_at(&pool, &lp_slot))
        .checked_add(minted)
        .ok_or(StateError::Overflow)?;
    let new_total = total.checked_add(minted).ok_or(StateError::Overflow)?;
    world.set_storage(pool, lp_slot, Hash256::from_u128(lp_balance));
    world.set_storage(pool, supply_slot, Hash256::from_u128(new_total));
    Ok(minted)
}
