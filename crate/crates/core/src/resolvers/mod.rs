//! Resolvers: pure functions that turn proven storage words into escape
//! entitlements.
//!
//! A resolver never touches live state. It reads only from a
//! [`SlotReadContext`] of proof-verified words, so every payout it reports is
//! backed by the state root the proofs were checked against. Reading a slot
//! the context does not cover is an error, not a zero: silence about a slot
//! proves nothing.
//!
//! Which resolver speaks for a contract is decided by [`dispatch`]: a live
//! registration made from the L2 contract itself wins; failing that, a
//! post-failure registration by the proven deployer (active only after the
//! extended delay); failing that, a default resolver matching the token kind.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contracts::registry::{RegistrationKind, ResolverRegistry};
use crate::encoding::{Address, Hash256};
use crate::state::layout::{address_mapping_slot, direct_slot, mapping_slot};
use crate::state::math::mul_div_floor;
use crate::state::{TokenLayout, VerifiedBundle};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolverError {
    #[error("no resolver serves contract {0}")]
    NoResolver(Address),
    #[error("resolver for {contract} activates at {active_at}, now is {now}")]
    ResolverNotYetActive {
        contract: Address,
        active_at: u64,
        now: u64,
    },
    #[error("no proof covers slot {slot} of {contract}")]
    MissingSlotProof { contract: Address, slot: Hash256 },
    #[error("pool {0} has zero LP supply")]
    ZeroSupply(Address),
    #[error("no entitlement for {0} here")]
    NothingToEscape(Address),
    #[error("resolver kind {resolver} cannot serve a {requested} request")]
    WrongResolverKind {
        resolver: &'static str,
        requested: &'static str,
    },
    #[error("proven word is not a valid {0}")]
    ValueOutOfRange(&'static str),
}

impl ResolverError {
    /// Stable error code used in reports and scenario expectations.
    pub fn code(&self) -> &'static str {
        match self {
            ResolverError::NoResolver(_) => "NoResolver",
            ResolverError::ResolverNotYetActive { .. } => "ResolverNotYetActive",
            ResolverError::MissingSlotProof { .. } => "MissingSlotProof",
            ResolverError::ZeroSupply(_) => "ZeroSupply",
            ResolverError::NothingToEscape(_) => "NothingToEscape",
            ResolverError::WrongResolverKind { .. } => "WrongResolverKind",
            ResolverError::ValueOutOfRange(_) => "ValueOutOfRange",
        }
    }
}

/// The proven (contract, slot) → word facts one escape request may read.
/// A key that is present with `None` is proven absent (reads as zero); a key
/// that is missing entirely was never proven.
#[derive(Debug, Clone, Default)]
pub struct SlotReadContext {
    reads: BTreeMap<(Address, Hash256), Option<Hash256>>,
}

impl SlotReadContext {
    pub fn from_bundles(bundles: &[VerifiedBundle]) -> Self {
        let mut reads = BTreeMap::new();
        for bundle in bundles {
            for (slot, value) in &bundle.slots {
                reads.insert((bundle.address, *slot), *value);
            }
        }
        SlotReadContext { reads }
    }

    #[cfg(test)]
    pub(crate) fn from_entries(
        entries: impl IntoIterator<Item = ((Address, Hash256), Option<Hash256>)>,
    ) -> Self {
        SlotReadContext {
            reads: entries.into_iter().collect(),
        }
    }
}

/// One proven storage read, in the order the resolver performed it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotRead {
    pub contract: Address,
    pub slot: Hash256,
}

/// What an escape pays and to whom it belonged on the L2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Payout {
    /// `asset` is the token contract; the all-zero address means ETH.
    Fungible {
        asset: Address,
        #[serde(with = "crate::encoding::dec")]
        amount: u128,
    },
    Nft {
        asset: Address,
        token_id: Hash256,
    },
}

/// A resolver's verdict: who is entitled, what they get, what was read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolverOutcome {
    pub entitled: Address,
    pub payouts: Vec<Payout>,
    pub slots_consulted: Vec<SlotRead>,
}

/// The asset-specific arguments of an escape request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolverRequest {
    Erc20 { holder: Address },
    Erc721 { token_id: Hash256 },
    Univ2 { provider: Address },
}

impl ResolverRequest {
    fn kind_name(&self) -> &'static str {
        match self {
            ResolverRequest::Erc20 { .. } => "erc20",
            ResolverRequest::Erc721 { .. } => "erc721",
            ResolverRequest::Univ2 { .. } => "univ2_pair",
        }
    }
}

/// Named resolver definitions. Registrations point into this table by id;
/// the three `default-*` entries are always present and carry the common
/// stock layouts.
#[derive(Debug, Clone)]
pub struct ResolverLibrary {
    defs: BTreeMap<String, TokenLayout>,
}

pub const DEFAULT_ERC20_RESOLVER: &str = "default-erc20";
pub const DEFAULT_ERC721_RESOLVER: &str = "default-erc721";
pub const DEFAULT_UNIV2_RESOLVER: &str = "default-univ2";

impl Default for ResolverLibrary {
    fn default() -> Self {
        let mut defs = BTreeMap::new();
        defs.insert(
            DEFAULT_ERC20_RESOLVER.to_string(),
            TokenLayout::erc20_default(),
        );
        defs.insert(
            DEFAULT_ERC721_RESOLVER.to_string(),
            TokenLayout::erc721_default(),
        );
        defs.insert(
            DEFAULT_UNIV2_RESOLVER.to_string(),
            TokenLayout::univ2_default(),
        );
        ResolverLibrary { defs }
    }
}

impl ResolverLibrary {
    /// Adds or replaces a named definition.
    pub fn insert(&mut self, id: impl Into<String>, def: TokenLayout) {
        self.defs.insert(id.into(), def);
    }

    pub fn get(&self, id: &str) -> Option<&TokenLayout> {
        self.defs.get(id)
    }

    fn default_id_for(layout: &TokenLayout) -> &'static str {
        match layout {
            TokenLayout::Erc20 { .. } => DEFAULT_ERC20_RESOLVER,
            TokenLayout::Erc721 { .. } => DEFAULT_ERC721_RESOLVER,
            TokenLayout::Univ2Pair { .. } => DEFAULT_UNIV2_RESOLVER,
        }
    }
}

/// Picks the resolver definition that speaks for `contract`.
///
/// `anchor_ts` is the timestamp of the latest valid state root and `t` the
/// escape delay: live registrations activate with the escape window at
/// `anchor_ts + t`, post-failure registrations only at `anchor_ts + 2t`,
/// giving users a full window in which pre-failure resolvers cannot be
/// displaced by late ones.
pub fn dispatch<'lib>(
    registry: &ResolverRegistry,
    library: &'lib ResolverLibrary,
    declared: Option<&TokenLayout>,
    contract: &Address,
    now: u64,
    anchor_ts: u64,
    t: u64,
) -> Result<(String, &'lib TokenLayout), ResolverError> {
    let registration = registry
        .live_registration(contract)
        .or_else(|| registry.post_failure_registration(contract));
    if let Some(reg) = registration {
        let active_at = match reg.kind {
            RegistrationKind::Live => anchor_ts.saturating_add(t),
            RegistrationKind::PostFailure => anchor_ts.saturating_add(2 * t),
        };
        if now < active_at {
            return Err(ResolverError::ResolverNotYetActive {
                contract: *contract,
                active_at,
                now,
            });
        }
        let def = library
            .get(&reg.resolver_id)
            .ok_or(ResolverError::NoResolver(*contract))?;
        return Ok((reg.resolver_id.clone(), def));
    }
    if let Some(layout) = declared {
        let id = ResolverLibrary::default_id_for(layout);
        let def = library.get(id).expect("default entries always present");
        return Ok((id.to_string(), def));
    }
    Err(ResolverError::NoResolver(*contract))
}

/// Runs the resolver `def` for `contract` against proven reads.
///
/// `erc20_balances_slot_for` maps a pooled token address to the balances
/// slot of the resolver that speaks for that token; only pair resolution
/// uses it.
pub fn run_resolver(
    ctx: &SlotReadContext,
    contract: &Address,
    request: &ResolverRequest,
    def: &TokenLayout,
    erc20_balances_slot_for: &dyn Fn(&Address) -> Result<u64, ResolverError>,
) -> Result<ResolverOutcome, ResolverError> {
    match (def, request) {
        (TokenLayout::Erc20 { balances_slot, .. }, ResolverRequest::Erc20 { holder }) => {
            resolve_erc20(ctx, contract, holder, *balances_slot)
        }
        (TokenLayout::Erc721 { owners_slot }, ResolverRequest::Erc721 { token_id }) => {
            resolve_erc721(ctx, contract, token_id, *owners_slot)
        }
        (
            TokenLayout::Univ2Pair {
                total_supply_slot,
                lp_balances_slot,
                token0_slot,
                token1_slot,
            },
            ResolverRequest::Univ2 { provider },
        ) => resolve_univ2(
            ctx,
            contract,
            provider,
            (
                *total_supply_slot,
                *lp_balances_slot,
                *token0_slot,
                *token1_slot,
            ),
            erc20_balances_slot_for,
        ),
        (def, request) => Err(ResolverError::WrongResolverKind {
            resolver: def.kind_name(),
            requested: request.kind_name(),
        }),
    }
}

/// Reads one proven word, recording the read. Proven-absent reads as zero.
fn read_word(
    ctx: &SlotReadContext,
    log: &mut Vec<SlotRead>,
    contract: Address,
    slot: Hash256,
) -> Result<Hash256, ResolverError> {
    log.push(SlotRead { contract, slot });
    match ctx.reads.get(&(contract, slot)) {
        None => Err(ResolverError::MissingSlotProof { contract, slot }),
        Some(None) => Ok(Hash256::ZERO),
        Some(Some(word)) => Ok(*word),
    }
}

fn word_amount(word: Hash256) -> Result<u128, ResolverError> {
    word.to_u128()
        .ok_or(ResolverError::ValueOutOfRange("u128 amount"))
}

/// Whole-balance entitlement: the proven `balances[holder]` word, all of it.
fn resolve_erc20(
    ctx: &SlotReadContext,
    token: &Address,
    holder: &Address,
    balances_slot: u64,
) -> Result<ResolverOutcome, ResolverError> {
    let mut log = Vec::new();
    let slot = address_mapping_slot(holder, balances_slot);
    let balance = word_amount(read_word(ctx, &mut log, *token, slot)?)?;
    if balance == 0 {
        return Err(ResolverError::NothingToEscape(*holder));
    }
    Ok(ResolverOutcome {
        entitled: *holder,
        payouts: vec![Payout::Fungible {
            asset: *token,
            amount: balance,
        }],
        slots_consulted: log,
    })
}

/// Ownership entitlement: the proven `owners[token_id]` word names who may
/// escape the token.
fn resolve_erc721(
    ctx: &SlotReadContext,
    token: &Address,
    token_id: &Hash256,
    owners_slot: u64,
) -> Result<ResolverOutcome, ResolverError> {
    let mut log = Vec::new();
    let slot = mapping_slot(token_id, owners_slot);
    let word = read_word(ctx, &mut log, *token, slot)?;
    if word.is_zero() {
        return Err(ResolverError::NothingToEscape(*token));
    }
    let owner = word
        .to_address()
        .ok_or(ResolverError::ValueOutOfRange("owner address"))?;
    Ok(ResolverOutcome {
        entitled: owner,
        payouts: vec![Payout::Nft {
            asset: *token,
            token_id: *token_id,
        }],
        slots_consulted: log,
    })
}

/// LP share redemption: the provider's pro-rata cut of both pooled tokens.
///
/// Reads, in order: the pool's token0 and token1 words, the pool's balance in
/// each pooled token (through that token's own resolver layout), the pool's
/// LP total supply, and the provider's LP balance. Pays
/// floor(lp * balance / total) of each token.
fn resolve_univ2(
    ctx: &SlotReadContext,
    pool: &Address,
    provider: &Address,
    (total_supply_slot, lp_balances_slot, token0_slot, token1_slot): (u64, u64, u64, u64),
    erc20_balances_slot_for: &dyn Fn(&Address) -> Result<u64, ResolverError>,
) -> Result<ResolverOutcome, ResolverError> {
    let mut log = Vec::new();
    let token_word = |log: &mut Vec<SlotRead>, slot_index: u64| -> Result<Address, ResolverError> {
        read_word(ctx, log, *pool, direct_slot(slot_index))?
            .to_address()
            .ok_or(ResolverError::ValueOutOfRange("token address"))
    };
    let token_x = token_word(&mut log, token0_slot)?;
    let token_y = token_word(&mut log, token1_slot)?;

    let pool_balance = |log: &mut Vec<SlotRead>, token: &Address| -> Result<u128, ResolverError> {
        let balances_slot = erc20_balances_slot_for(token)?;
        let slot = address_mapping_slot(pool, balances_slot);
        word_amount(read_word(ctx, log, *token, slot)?)
    };
    let balance_x = pool_balance(&mut log, &token_x)?;
    let balance_y = pool_balance(&mut log, &token_y)?;

    let total = word_amount(read_word(
        ctx,
        &mut log,
        *pool,
        direct_slot(total_supply_slot),
    )?)?;
    let lp_slot = address_mapping_slot(provider, lp_balances_slot);
    let lp = word_amount(read_word(ctx, &mut log, *pool, lp_slot)?)?;

    if lp == 0 {
        return Err(ResolverError::NothingToEscape(*provider));
    }
    if total == 0 {
        return Err(ResolverError::ZeroSupply(*pool));
    }
    let share_x =
        mul_div_floor(lp, balance_x, total).ok_or(ResolverError::ValueOutOfRange("payout"))?;
    let share_y =
        mul_div_floor(lp, balance_y, total).ok_or(ResolverError::ValueOutOfRange("payout"))?;

    let mut payouts = Vec::new();
    if share_x > 0 {
        payouts.push(Payout::Fungible {
            asset: token_x,
            amount: share_x,
        });
    }
    if share_y > 0 {
        payouts.push(Payout::Fungible {
            asset: token_y,
            amount: share_y,
        });
    }
    if payouts.is_empty() {
        return Err(ResolverError::NothingToEscape(*provider));
    }
    Ok(ResolverOutcome {
        entitled: *provider,
        payouts,
        slots_consulted: log,
    })
}
