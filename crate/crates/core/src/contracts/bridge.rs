//! The L1 bridge: escrow on the way in, proof-gated escape on the way out.
//!
//! Deposits accumulate escrow while the rollup lives. Once the escape window
//! opens (no valid root for `t_seconds`), anyone holding proofs against the
//! latest valid root can take their assets out. Every check runs before any
//! effect: a failed escape changes nothing.
//!
//! One escape consumes one nullifier, keyed by the entitled L2 address, the
//! asset contract, and a discriminator (the token id for NFTs). Delegates
//! claim on behalf of a wallet but the nullifier still names the wallet, so
//! a wallet/delegate pair cannot take the same asset twice.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contracts::oracle::L2Oracle;
use crate::contracts::registry::ResolverRegistry;
use crate::encoding::{keccak256_concat, Address, Hash256};
use crate::mpt::MptError;
use crate::resolvers::{
    dispatch, run_resolver, Payout, ResolverError, ResolverLibrary, ResolverRequest, SlotRead,
    SlotReadContext,
};
use crate::state::{ProofBundle, TokenLayout};

/// Default escape delay: seven days of operator silence.
pub const DEFAULT_T_SECONDS: u64 = 604_800;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EscapeError {
    #[error("no valid state root has ever been accepted")]
    NoValidRoot,
    #[error("escape window opens at {opens_at}, now is {now}")]
    EscapeNotEnabled { opens_at: u64, now: u64 },
    #[error("bundle is against root {got}, latest valid root is {expected}")]
    StaleRoot { expected: Hash256, got: Hash256 },
    #[error(transparent)]
    InvalidProof(#[from] MptError),
    #[error(transparent)]
    Resolver(#[from] ResolverError),
    #[error("{claimer} is neither entitled nor a registered delegate, or holds nothing")]
    NothingToEscape { claimer: Address },
    #[error("nullifier {0} already spent")]
    NullifierUsed(Hash256),
    #[error("escrow of {asset} holds {available}, payout needs {needed}")]
    EscrowInsufficient {
        asset: Address,
        needed: u128,
        available: u128,
    },
}

impl EscapeError {
    /// Stable error code used in reports and scenario expectations.
    pub fn code(&self) -> &'static str {
        match self {
            EscapeError::NoValidRoot => "NoValidRoot",
            EscapeError::EscapeNotEnabled { .. } => "EscapeNotEnabled",
            EscapeError::StaleRoot { .. } => "StaleRoot",
            EscapeError::InvalidProof(_) => "InvalidProof",
            EscapeError::Resolver(err) => err.code(),
            EscapeError::NothingToEscape { .. } => "NothingToEscape",
            EscapeError::NullifierUsed(_) => "NullifierUsed",
            EscapeError::EscrowInsufficient { .. } => "EscrowInsufficient",
        }
    }
}

/// Preimage of a nullifier: who was entitled on L2, which asset contract,
/// and a per-asset discriminator (token id for NFTs, zero otherwise). ETH
/// uses the all-zero address as its asset contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NullifierKey {
    pub escaper: Address,
    pub asset_contract: Address,
    pub discriminator: Hash256,
}

impl NullifierKey {
    pub fn eth(escaper: Address) -> Self {
        NullifierKey {
            escaper,
            asset_contract: Address::ZERO,
            discriminator: Hash256::ZERO,
        }
    }

    pub fn asset(escaper: Address, asset_contract: Address, discriminator: Hash256) -> Self {
        NullifierKey {
            escaper,
            asset_contract,
            discriminator,
        }
    }

    /// keccak256(escaper ++ asset_contract ++ discriminator).
    pub fn hash(&self) -> Hash256 {
        keccak256_concat(&[
            &self.escaper.0,
            &self.asset_contract.0,
            &self.discriminator.0,
        ])
    }
}

/// What one successful escape did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscapeReceipt {
    pub claimer: Address,
    /// The state root every proof in this escape was checked against.
    pub root: Hash256,
    pub payouts: Vec<Payout>,
    pub nullifiers: Vec<Hash256>,
    pub slots_consulted: Vec<SlotRead>,
}

/// The bridge's escrow, nullifier set, and L1 credit ledger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bridge {
    t_seconds: u64,
    #[serde(with = "crate::encoding::dec")]
    eth_escrow: u128,
    token_escrow: BTreeMap<Address, DecAmount>,
    nft_escrow: BTreeSet<(Address, Hash256)>,
    nullifiers: BTreeSet<Hash256>,
    l1_eth_credits: BTreeMap<Address, DecAmount>,
    l1_token_credits: BTreeMap<Address, BTreeMap<Address, DecAmount>>,
    l1_nft_credits: BTreeMap<Address, BTreeSet<(Address, Hash256)>>,
}

/// u128 that serializes as a decimal string wherever it appears.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DecAmount(#[serde(with = "crate::encoding::dec")] pub u128);

impl Default for Bridge {
    fn default() -> Self {
        Bridge::new(DEFAULT_T_SECONDS)
    }
}

impl Bridge {
    pub fn new(t_seconds: u64) -> Self {
        Bridge {
            t_seconds,
            eth_escrow: 0,
            token_escrow: BTreeMap::new(),
            nft_escrow: BTreeSet::new(),
            nullifiers: BTreeSet::new(),
            l1_eth_credits: BTreeMap::new(),
            l1_token_credits: BTreeMap::new(),
            l1_nft_credits: BTreeMap::new(),
        }
    }

    pub fn t_seconds(&self) -> u64 {
        self.t_seconds
    }

    /// Whether the escape window is open: `now` is at or past the latest
    /// valid root's timestamp plus the delay. The boundary instant itself is
    /// open.
    pub fn escape_enabled(&self, oracle: &L2Oracle, now: u64) -> Result<bool, EscapeError> {
        let latest = oracle.latest_valid().ok_or(EscapeError::NoValidRoot)?;
        Ok(now >= latest.timestamp.saturating_add(self.t_seconds))
    }

    fn require_enabled<'a>(
        &self,
        oracle: &'a L2Oracle,
        now: u64,
    ) -> Result<&'a crate::contracts::oracle::StateRootRecord, EscapeError> {
        let latest = oracle.latest_valid().ok_or(EscapeError::NoValidRoot)?;
        let opens_at = latest.timestamp.saturating_add(self.t_seconds);
        if now < opens_at {
            return Err(EscapeError::EscapeNotEnabled { opens_at, now });
        }
        Ok(latest)
    }

    // Escrow intake: the deposit side of the canonical bridge.

    pub fn escrow_eth(&mut self, amount: u128) {
        self.eth_escrow = self
            .eth_escrow
            .checked_add(amount)
            .expect("escrow sums fit in u128");
    }

    pub fn escrow_tokens(&mut self, token: Address, amount: u128) {
        let entry = self.token_escrow.entry(token).or_insert(DecAmount(0));
        entry.0 = entry
            .0
            .checked_add(amount)
            .expect("escrow sums fit in u128");
    }

    pub fn escrow_nft(&mut self, token: Address, token_id: Hash256) {
        self.nft_escrow.insert((token, token_id));
    }

    // Escape paths.

    /// Escapes the full ETH balance of the proven account. The bundle covers
    /// just the account; the claimer must be the account or its registered
    /// delegate.
    pub fn escape_eth(
        &mut self,
        oracle: &L2Oracle,
        registry: &ResolverRegistry,
        now: u64,
        claimer: Address,
        bundle: &ProofBundle,
    ) -> Result<EscapeReceipt, EscapeError> {
        let latest = self.require_enabled(oracle, now)?;
        if bundle.state_root != latest.root {
            return Err(EscapeError::StaleRoot {
                expected: latest.root,
                got: bundle.state_root,
            });
        }
        let verified = bundle.verify(&latest.root)?;
        let entitled = verified.address;
        self.authorize(&registry_delegate(registry, &entitled), claimer, entitled)?;
        let balance = verified.account.map_or(0, |a| a.balance);
        if balance == 0 {
            return Err(EscapeError::NothingToEscape { claimer });
        }
        let nullifier = NullifierKey::eth(entitled).hash();
        if self.nullifiers.contains(&nullifier) {
            return Err(EscapeError::NullifierUsed(nullifier));
        }
        if self.eth_escrow < balance {
            return Err(EscapeError::EscrowInsufficient {
                asset: Address::ZERO,
                needed: balance,
                available: self.eth_escrow,
            });
        }

        self.eth_escrow -= balance;
        let credit = self.l1_eth_credits.entry(claimer).or_insert(DecAmount(0));
        credit.0 += balance;
        self.nullifiers.insert(nullifier);
        Ok(EscapeReceipt {
            claimer,
            root: latest.root,
            payouts: vec![Payout::Fungible {
                asset: Address::ZERO,
                amount: balance,
            }],
            nullifiers: vec![nullifier],
            slots_consulted: Vec::new(),
        })
    }

    /// Escapes a contract-held asset: ERC-20 balance, ERC-721 token, or LP
    /// position. `declared_layouts` carries the claimer's assertion of each
    /// contract's layout kind for default-resolver selection; lying is
    /// harmless because every word still comes out of verified proofs.
    #[allow(clippy::too_many_arguments)]
    pub fn escape_asset(
        &mut self,
        oracle: &L2Oracle,
        registry: &ResolverRegistry,
        library: &ResolverLibrary,
        declared_layouts: &BTreeMap<Address, TokenLayout>,
        now: u64,
        claimer: Address,
        l2_contract: Address,
        request: &ResolverRequest,
        bundles: &[ProofBundle],
    ) -> Result<EscapeReceipt, EscapeError> {
        let latest = self.require_enabled(oracle, now)?;
        for bundle in bundles {
            if bundle.state_root != latest.root {
                return Err(EscapeError::StaleRoot {
                    expected: latest.root,
                    got: bundle.state_root,
                });
            }
        }
        let verified = bundles
            .iter()
            .map(|b| b.verify(&latest.root))
            .collect::<Result<Vec<_>, _>>()?;
        let ctx = SlotReadContext::from_bundles(&verified);

        let anchor = latest.timestamp;
        let t = self.t_seconds;
        let (_, def) = dispatch(
            registry,
            library,
            declared_layouts.get(&l2_contract),
            &l2_contract,
            now,
            anchor,
            t,
        )?;
        let erc20_slot_for = |token: &Address| -> Result<u64, ResolverError> {
            let (_, token_def) = dispatch(
                registry,
                library,
                declared_layouts.get(token),
                token,
                now,
                anchor,
                t,
            )?;
            match token_def {
                TokenLayout::Erc20 { balances_slot, .. } => Ok(*balances_slot),
                other => Err(ResolverError::WrongResolverKind {
                    resolver: other.kind_name(),
                    requested: "erc20",
                }),
            }
        };
        let outcome = run_resolver(&ctx, &l2_contract, request, def, &erc20_slot_for)?;

        self.authorize(
            &registry_delegate(registry, &outcome.entitled),
            claimer,
            outcome.entitled,
        )?;

        let discriminator = match request {
            ResolverRequest::Erc721 { token_id } => *token_id,
            _ => Hash256::ZERO,
        };
        let nullifier = NullifierKey::asset(outcome.entitled, l2_contract, discriminator).hash();
        if self.nullifiers.contains(&nullifier) {
            return Err(EscapeError::NullifierUsed(nullifier));
        }

        // All escrow checks before any effect.
        for payout in &outcome.payouts {
            match payout {
                Payout::Fungible { asset, amount } => {
                    let available = self.token_escrow.get(asset).map_or(0, |a| a.0);
                    if available < *amount {
                        return Err(EscapeError::EscrowInsufficient {
                            asset: *asset,
                            needed: *amount,
                            available,
                        });
                    }
                }
                Payout::Nft { asset, token_id } => {
                    if !self.nft_escrow.contains(&(*asset, *token_id)) {
                        return Err(EscapeError::EscrowInsufficient {
                            asset: *asset,
                            needed: 1,
                            available: 0,
                        });
                    }
                }
            }
        }

        for payout in &outcome.payouts {
            match payout {
                Payout::Fungible { asset, amount } => {
                    self.token_escrow.get_mut(asset).expect("checked above").0 -= amount;
                    let credit = self
                        .l1_token_credits
                        .entry(claimer)
                        .or_default()
                        .entry(*asset)
                        .or_insert(DecAmount(0));
                    credit.0 += amount;
                }
                Payout::Nft { asset, token_id } => {
                    self.nft_escrow.remove(&(*asset, *token_id));
                    self.l1_nft_credits
                        .entry(claimer)
                        .or_default()
                        .insert((*asset, *token_id));
                }
            }
        }
        self.nullifiers.insert(nullifier);
        Ok(EscapeReceipt {
            claimer,
            root: latest.root,
            payouts: outcome.payouts,
            nullifiers: vec![nullifier],
            slots_consulted: outcome.slots_consulted,
        })
    }

    /// Claimer must be the entitled address itself or its registered
    /// delegate; anyone else has nothing to escape here.
    fn authorize(
        &self,
        delegate: &Option<Address>,
        claimer: Address,
        entitled: Address,
    ) -> Result<(), EscapeError> {
        if claimer == entitled || *delegate == Some(claimer) {
            Ok(())
        } else {
            Err(EscapeError::NothingToEscape { claimer })
        }
    }

    // Read access for reports and assertions.

    pub fn eth_escrow(&self) -> u128 {
        self.eth_escrow
    }

    pub fn token_escrow(&self, token: &Address) -> u128 {
        self.token_escrow.get(token).map_or(0, |a| a.0)
    }

    pub fn token_escrow_all(&self) -> &BTreeMap<Address, DecAmount> {
        &self.token_escrow
    }

    pub fn nft_in_escrow(&self, token: &Address, token_id: &Hash256) -> bool {
        self.nft_escrow.contains(&(*token, *token_id))
    }

    pub fn nft_escrow_all(&self) -> &BTreeSet<(Address, Hash256)> {
        &self.nft_escrow
    }

    pub fn nullifiers(&self) -> &BTreeSet<Hash256> {
        &self.nullifiers
    }

    pub fn l1_eth_credit(&self, owner: &Address) -> u128 {
        self.l1_eth_credits.get(owner).map_or(0, |a| a.0)
    }

    pub fn l1_eth_credits(&self) -> &BTreeMap<Address, DecAmount> {
        &self.l1_eth_credits
    }

    pub fn l1_token_credit(&self, owner: &Address, token: &Address) -> u128 {
        self.l1_token_credits
            .get(owner)
            .and_then(|m| m.get(token))
            .map_or(0, |a| a.0)
    }

    pub fn l1_token_credits(&self) -> &BTreeMap<Address, BTreeMap<Address, DecAmount>> {
        &self.l1_token_credits
    }

    pub fn l1_holds_nft(&self, owner: &Address, token: &Address, token_id: &Hash256) -> bool {
        self.l1_nft_credits
            .get(owner)
            .is_some_and(|set| set.contains(&(*token, *token_id)))
    }

    pub fn l1_nft_credits(&self) -> &BTreeMap<Address, BTreeSet<(Address, Hash256)>> {
        &self.l1_nft_credits
    }
}

fn registry_delegate(registry: &ResolverRegistry, entitled: &Address) -> Option<Address> {
    registry.delegate_of(entitled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contracts::registry::{CallOrigin, CrossDomainMessenger};
    use crate::state::{generate_bundle, Deployment, WorldState};

    fn addr(byte: u8) -> Address {
        Address([byte; 20])
    }

    /// A world with one funded account, proposed at t=1000 and valid.
    fn eth_fixture() -> (WorldState, L2Oracle, Bridge, ResolverRegistry) {
        let mut world = WorldState::new();
        world.credit_eth(addr(1), 40_000).unwrap();
        world.credit_eth(addr(2), 7_000).unwrap();
        let mut oracle = L2Oracle::new();
        oracle
            .propose_root(world.state_root(), 1_000, 1, true)
            .unwrap();
        let mut bridge = Bridge::new(100);
        bridge.escrow_eth(47_000);
        (world, oracle, bridge, ResolverRegistry::new())
    }

    #[test]
    fn escape_window_boundary_is_inclusive() {
        let (_, oracle, bridge, _) = eth_fixture();
        assert!(!bridge.escape_enabled(&oracle, 1_099).unwrap());
        assert!(bridge.escape_enabled(&oracle, 1_100).unwrap());
        assert!(bridge.escape_enabled(&oracle, 2_000).unwrap());
    }

    #[test]
    fn no_root_means_no_window() {
        let bridge = Bridge::new(100);
        let oracle = L2Oracle::new();
        assert_eq!(
            bridge.escape_enabled(&oracle, 10).unwrap_err(),
            EscapeError::NoValidRoot,
        );
    }

    #[test]
    fn eth_escape_happy_path() {
        let (world, oracle, mut bridge, registry) = eth_fixture();
        let bundle = generate_bundle(&world, addr(1), &[]);
        let receipt = bridge
            .escape_eth(&oracle, &registry, 1_100, addr(1), &bundle)
            .unwrap();
        assert_eq!(
            receipt.payouts,
            vec![Payout::Fungible {
                asset: Address::ZERO,
                amount: 40_000
            }],
        );
        assert_eq!(bridge.eth_escrow(), 7_000);
        assert_eq!(bridge.l1_eth_credit(&addr(1)), 40_000);
        assert_eq!(bridge.nullifiers().len(), 1);
    }

    #[test]
    fn eth_escape_requires_open_window() {
        let (world, oracle, mut bridge, registry) = eth_fixture();
        let bundle = generate_bundle(&world, addr(1), &[]);
        let err = bridge
            .escape_eth(&oracle, &registry, 1_099, addr(1), &bundle)
            .unwrap_err();
        assert_eq!(
            err,
            EscapeError::EscapeNotEnabled {
                opens_at: 1_100,
                now: 1_099
            },
        );
        assert_eq!(bridge.eth_escrow(), 47_000);
    }

    #[test]
    fn eth_escape_is_one_shot() {
        let (world, oracle, mut bridge, registry) = eth_fixture();
        let bundle = generate_bundle(&world, addr(1), &[]);
        bridge
            .escape_eth(&oracle, &registry, 1_100, addr(1), &bundle)
            .unwrap();
        let err = bridge
            .escape_eth(&oracle, &registry, 1_101, addr(1), &bundle)
            .unwrap_err();
        assert!(matches!(err, EscapeError::NullifierUsed(_)));
        assert_eq!(bridge.l1_eth_credit(&addr(1)), 40_000);
    }

    #[test]
    fn eth_escape_rejects_stale_root() {
        let (mut world, mut oracle, mut bridge, registry) = eth_fixture();
        let old_bundle = generate_bundle(&world, addr(1), &[]);
        world.credit_eth(addr(1), 1).unwrap();
        bridge.escrow_eth(1);
        oracle
            .propose_root(world.state_root(), 1_001, 2, true)
            .unwrap();
        let err = bridge
            .escape_eth(&oracle, &registry, 2_000, addr(1), &old_bundle)
            .unwrap_err();
        assert!(matches!(err, EscapeError::StaleRoot { .. }));
    }

    #[test]
    fn eth_escape_authorizes_only_entitled_or_delegate() {
        let (world, oracle, mut bridge, mut registry) = eth_fixture();
        let messenger = CrossDomainMessenger::new();
        let bundle = generate_bundle(&world, addr(1), &[]);
        // a stranger cannot claim account 1's funds
        let err = bridge
            .escape_eth(&oracle, &registry, 1_100, addr(9), &bundle)
            .unwrap_err();
        assert_eq!(err, EscapeError::NothingToEscape { claimer: addr(9) });
        // the registered delegate can; the nullifier names the wallet
        registry
            .register_delegate(
                &messenger,
                CallOrigin::CrossDomainMessage { l2_sender: addr(1) },
                addr(9),
                10,
            )
            .unwrap();
        let receipt = bridge
            .escape_eth(&oracle, &registry, 1_100, addr(9), &bundle)
            .unwrap();
        assert_eq!(bridge.l1_eth_credit(&addr(9)), 40_000);
        assert_eq!(receipt.nullifiers[0], NullifierKey::eth(addr(1)).hash());
        // and the wallet itself cannot double-claim afterwards
        let err = bridge
            .escape_eth(&oracle, &registry, 1_101, addr(1), &bundle)
            .unwrap_err();
        assert!(matches!(err, EscapeError::NullifierUsed(_)));
    }

    #[test]
    fn eth_escape_needs_nonzero_balance() {
        let (world, oracle, mut bridge, registry) = eth_fixture();
        // account 5 never existed on L2
        let bundle = generate_bundle(&world, addr(5), &[]);
        let err = bridge
            .escape_eth(&oracle, &registry, 1_100, addr(5), &bundle)
            .unwrap_err();
        assert_eq!(err, EscapeError::NothingToEscape { claimer: addr(5) });
    }

    #[test]
    fn eth_escape_respects_escrow() {
        let (world, oracle, _, registry) = eth_fixture();
        let mut bridge = Bridge::new(100);
        bridge.escrow_eth(10); // far less than proven balances
        let bundle = generate_bundle(&world, addr(1), &[]);
        let err = bridge
            .escape_eth(&oracle, &registry, 1_100, addr(1), &bundle)
            .unwrap_err();
        assert_eq!(
            err,
            EscapeError::EscrowInsufficient {
                asset: Address::ZERO,
                needed: 40_000,
                available: 10,
            },
        );
    }

    /// A world with an ERC-20 and balances, for asset-escape tests.
    fn erc20_fixture() -> (
        WorldState,
        L2Oracle,
        Bridge,
        ResolverRegistry,
        ResolverLibrary,
        Address,
    ) {
        let mut world = WorldState::new();
        let token = world
            .deploy_contract(
                addr(0xde),
                Deployment::Create,
                crate::state::TokenLayout::erc20_default(),
            )
            .unwrap();
        crate::state::erc20_mint(&mut world, token, addr(1), 900).unwrap();
        crate::state::erc20_mint(&mut world, token, addr(2), 100).unwrap();
        let mut oracle = L2Oracle::new();
        oracle
            .propose_root(world.state_root(), 1_000, 1, true)
            .unwrap();
        let mut bridge = Bridge::new(100);
        bridge.escrow_tokens(token, 1_000);
        (
            world,
            oracle,
            bridge,
            ResolverRegistry::new(),
            ResolverLibrary::default(),
            token,
        )
    }

    fn erc20_bundles(world: &WorldState, token: Address, holder: Address) -> Vec<ProofBundle> {
        let slot = crate::state::address_mapping_slot(&holder, 0);
        vec![generate_bundle(world, token, &[slot])]
    }

    #[test]
    fn erc20_escape_with_default_resolver() {
        let (world, oracle, mut bridge, registry, library, token) = erc20_fixture();
        let declared = world_layouts(&world, &[token]);
        let bundles = erc20_bundles(&world, token, addr(1));
        let receipt = bridge
            .escape_asset(
                &oracle,
                &registry,
                &library,
                &declared,
                1_100,
                addr(1),
                token,
                &ResolverRequest::Erc20 { holder: addr(1) },
                &bundles,
            )
            .unwrap();
        assert_eq!(
            receipt.payouts,
            vec![Payout::Fungible {
                asset: token,
                amount: 900
            }],
        );
        assert_eq!(bridge.token_escrow(&token), 100);
        assert_eq!(bridge.l1_token_credit(&addr(1), &token), 900);
        assert_eq!(receipt.slots_consulted.len(), 1);
    }

    fn world_layouts(world: &WorldState, contracts: &[Address]) -> BTreeMap<Address, TokenLayout> {
        contracts
            .iter()
            .filter_map(|c| world.layout_of(c).map(|l| (*c, *l)))
            .collect()
    }

    #[test]
    fn erc20_escape_is_one_shot_per_holder() {
        let (world, oracle, mut bridge, registry, library, token) = erc20_fixture();
        let declared = world_layouts(&world, &[token]);
        let bundles = erc20_bundles(&world, token, addr(1));
        let request = ResolverRequest::Erc20 { holder: addr(1) };
        bridge
            .escape_asset(
                &oracle,
                &registry,
                &library,
                &declared,
                1_100,
                addr(1),
                token,
                &request,
                &bundles,
            )
            .unwrap();
        let err = bridge
            .escape_asset(
                &oracle,
                &registry,
                &library,
                &declared,
                1_101,
                addr(1),
                token,
                &request,
                &bundles,
            )
            .unwrap_err();
        assert!(matches!(err, EscapeError::NullifierUsed(_)));
        // a different holder still escapes fine
        let bundles2 = erc20_bundles(&world, token, addr(2));
        bridge
            .escape_asset(
                &oracle,
                &registry,
                &library,
                &declared,
                1_102,
                addr(2),
                token,
                &ResolverRequest::Erc20 { holder: addr(2) },
                &bundles2,
            )
            .unwrap();
        assert_eq!(bridge.token_escrow(&token), 0);
    }

    #[test]
    fn unknown_contract_has_no_resolver() {
        let (world, oracle, mut bridge, registry, library, token) = erc20_fixture();
        let declared = BTreeMap::new(); // nothing declared
        let bundles = erc20_bundles(&world, token, addr(1));
        let err = bridge
            .escape_asset(
                &oracle,
                &registry,
                &library,
                &declared,
                1_100,
                addr(1),
                token,
                &ResolverRequest::Erc20 { holder: addr(1) },
                &bundles,
            )
            .unwrap_err();
        assert_eq!(err, EscapeError::Resolver(ResolverError::NoResolver(token)));
    }

    #[test]
    fn failed_escape_mutates_nothing() {
        let (world, oracle, mut bridge, registry, library, token) = erc20_fixture();
        let declared = world_layouts(&world, &[token]);
        let before = bridge.clone();
        // withhold the slot proof so the resolver fails mid-run
        let bundles = vec![generate_bundle(&world, token, &[])];
        let err = bridge
            .escape_asset(
                &oracle,
                &registry,
                &library,
                &declared,
                1_100,
                addr(1),
                token,
                &ResolverRequest::Erc20 { holder: addr(1) },
                &bundles,
            )
            .unwrap_err();
        assert!(matches!(
            err,
            EscapeError::Resolver(ResolverError::MissingSlotProof { .. })
        ));
        assert_eq!(bridge, before);
    }
}
