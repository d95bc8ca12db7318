//! Timeline execution.
//!
//! The runner owns one copy of every layer: the L2 ledger, the root oracle,
//! the registry, the messenger, and the bridge. Actions either mutate the
//! L2 world (possible only while the operator lives), drive the L1
//! contracts, or attempt escapes. Escape attempts prove state out of the
//! snapshot taken at the latest valid root, exactly as a user armed with
//! old `eth_getProof` responses would.

use std::collections::{BTreeMap, BTreeSet};

use crate::contracts::bridge::{Bridge, EscapeReceipt};
use crate::contracts::oracle::L2Oracle;
use crate::contracts::registry::{
    CallOrigin, CrossDomainMessenger, DeploymentClaim, ResolverRegistry,
};
use crate::encoding::{keccak256, Address, Hash256};
use crate::resolvers::{dispatch, ResolverLibrary, ResolverRequest};
use crate::scenario::report::{
    ActionOutcome, AssertionOutcome, Conservation, FinalState, FungibleConservation, NftRef,
    Report, Structural,
};
use crate::scenario::{
    Action, Assertion, ClaimDecl, DeploymentDecl, EscapeDecl, Expect, Scenario, ScenarioError,
};
use crate::state::{
    address_mapping_slot, direct_slot, generate_bundle, mapping_slot, Deployment, ProofBundle,
    TokenLayout, WorldState,
};

/// Runtime knobs that sit outside the scenario file.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Overrides the scenario's escape delay T.
    pub t_override: Option<u64>,
}

/// Executes a validated scenario. Action-level failures live inside the
/// report; an error here means genesis itself could not be built.
pub fn run_scenario(scenario: &Scenario, options: &RunOptions) -> Result<Report, ScenarioError> {
    let t_seconds = options.t_override.unwrap_or(scenario.parameters.t_seconds);
    let mut runner = Runner::build(scenario, t_seconds)?;

    let mut outcomes = Vec::with_capacity(scenario.timeline.len());
    for (index, entry) in scenario.timeline.iter().enumerate() {
        runner.clock = entry.at;
        let (result, receipt) = runner.apply(&entry.action);
        let expected = entry.action.expect().to_string();
        let matched = result == expected;
        outcomes.push(ActionOutcome {
            index,
            at: entry.at,
            kind: entry.action.kind_name().to_string(),
            detail: runner.describe(&entry.action),
            result,
            expected,
            matched,
            receipt,
        });
    }

    let structural = Structural {
        post_failure_silence: post_failure_silence(scenario, &outcomes),
    };
    let conservation = runner.conservation();
    let assertions = runner.run_assertions(&scenario.assertions);

    let passed = outcomes.iter().all(|o| o.matched)
        && assertions.iter().all(|a| a.passed)
        && conservation.eth.exact
        && conservation.tokens.values().all(|c| c.exact)
        && conservation.nfts_exact
        && structural.post_failure_silence;

    Ok(Report {
        scenario: scenario.name.clone(),
        t_seconds,
        outcomes,
        final_state: runner.final_state(),
        conservation,
        assertions,
        structural,
        passed,
    })
}

/// After the failure action, neither root proposals nor messenger-borne
/// registrations may report success.
fn post_failure_silence(scenario: &Scenario, outcomes: &[ActionOutcome]) -> bool {
    let failure_index = scenario
        .timeline
        .iter()
        .position(|e| matches!(e.action, Action::OperatorFailure));
    let Some(failure_index) = failure_index else {
        return true;
    };
    scenario
        .timeline
        .iter()
        .enumerate()
        .skip(failure_index + 1)
        .all(|(i, entry)| match entry.action {
            Action::ProposeRoot { .. }
            | Action::RegisterResolverLive { .. }
            | Action::RegisterDelegate { .. } => outcomes[i].result != "ok",
            _ => true,
        })
}

struct Runner {
    t_seconds: u64,
    world: WorldState,
    oracle: L2Oracle,
    bridge: Bridge,
    registry: ResolverRegistry,
    messenger: CrossDomainMessenger,
    library: ResolverLibrary,
    /// Every named entity's address.
    names: BTreeMap<String, Address>,
    /// The contract subset of `names` (tokens and pools).
    contracts: BTreeMap<String, Address>,
    /// World as of each accepted valid root.
    snapshots: BTreeMap<Hash256, WorldState>,
    clock: u64,
    next_block: u64,
    operator_failed: bool,
    // Conservation counters.
    eth_deposited: u128,
    tokens_minted: BTreeMap<Address, u128>,
    nfts_minted: BTreeSet<(Address, Hash256)>,
}

type ActionResult = (String, Option<EscapeReceipt>);

fn ok() -> ActionResult {
    ("ok".to_string(), None)
}

fn err(code: &str) -> ActionResult {
    (Expect::Error(code.to_string()).to_string(), None)
}

impl Runner {
    fn build(scenario: &Scenario, t_seconds: u64) -> Result<Runner, ScenarioError> {
        let mut library = ResolverLibrary::default();
        for (id, def) in &scenario.resolvers {
            library.insert(id.clone(), *def);
        }

        let mut world = WorldState::new();
        let mut names: BTreeMap<String, Address> = scenario
            .genesis
            .accounts
            .iter()
            .map(|(name, address)| (name.clone(), *address))
            .collect();
        let mut contracts = BTreeMap::new();

        let genesis_err = |name: &str, e: crate::state::StateError| -> ScenarioError {
            ScenarioError::Schema(format!("genesis deployment of {name:?} failed: {e}"))
        };
        for token in &scenario.genesis.tokens {
            let deployer = names[&token.deployer];
            let address = world
                .deploy_contract(deployer, deployment_of(&token.deployment), token.layout)
                .map_err(|e| genesis_err(&token.name, e))?;
            names.insert(token.name.clone(), address);
            contracts.insert(token.name.clone(), address);
        }
        for pool in &scenario.genesis.pools {
            let deployer = names[&pool.deployer];
            let address = world
                .deploy_contract(deployer, deployment_of(&pool.deployment), pool.layout)
                .map_err(|e| genesis_err(&pool.name, e))?;
            let TokenLayout::Univ2Pair {
                token0_slot,
                token1_slot,
                ..
            } = pool.layout
            else {
                unreachable!("validated as a pair layout");
            };
            let x = names[&pool.token_x];
            let y = names[&pool.token_y];
            world.set_storage(address, direct_slot(token0_slot), Hash256::from_address(&x));
            world.set_storage(address, direct_slot(token1_slot), Hash256::from_address(&y));
            names.insert(pool.name.clone(), address);
            contracts.insert(pool.name.clone(), address);
        }

        Ok(Runner {
            t_seconds,
            world,
            oracle: L2Oracle::new(),
            bridge: Bridge::new(t_seconds),
            registry: ResolverRegistry::new(),
            messenger: CrossDomainMessenger::new(),
            library,
            names,
            contracts,
            snapshots: BTreeMap::new(),
            clock: 0,
            next_block: 1,
            operator_failed: false,
            eth_deposited: 0,
            tokens_minted: BTreeMap::new(),
            nfts_minted: BTreeSet::new(),
        })
    }

    fn addr(&self, name: &str) -> Address {
        self.names[name]
    }

    fn apply(&mut self, action: &Action) -> ActionResult {
        match action {
            Action::DepositEth { to, amount, .. } => self.deposit_eth(to, *amount),
            Action::Erc20Mint {
                token, to, amount, ..
            } => self.erc20_mint(token, to, *amount),
            Action::Erc20Transfer {
                token,
                from,
                to,
                amount,
                ..
            } => self.l2_ledger(|world, names| {
                crate::state::erc20_transfer(world, names[token], names[from], names[to], *amount)
            }),
            Action::Erc721Mint {
                token,
                to,
                token_id,
                ..
            } => self.erc721_mint(token, to, *token_id),
            Action::Erc721Transfer {
                token,
                from,
                to,
                token_id,
                ..
            } => self.l2_ledger(|world, names| {
                crate::state::erc721_transfer(
                    world,
                    names[token],
                    names[from],
                    names[to],
                    Hash256::from_u128(*token_id),
                )
            }),
            Action::AddLiquidity {
                pool,
                provider,
                amount_x,
                amount_y,
                ..
            } => self.l2_ledger(|world, names| {
                crate::state::univ2_add_liquidity(
                    world,
                    names[pool],
                    names[provider],
                    *amount_x,
                    *amount_y,
                )
                .map(|_| ())
            }),
            Action::ProposeRoot { valid, .. } => self.propose_root(*valid),
            Action::RegisterResolverLive {
                contract, resolver, ..
            } => {
                let origin = CallOrigin::CrossDomainMessage {
                    l2_sender: self.addr(contract),
                };
                match self.registry.register_resolver_live(
                    &self.messenger,
                    origin,
                    resolver,
                    self.clock,
                ) {
                    Ok(_) => ok(),
                    Err(e) => err(e.code()),
                }
            }
            Action::RegisterDelegate {
                wallet, delegate, ..
            } => {
                let origin = CallOrigin::CrossDomainMessage {
                    l2_sender: self.addr(wallet),
                };
                let delegate = self.addr(delegate);
                match self
                    .registry
                    .register_delegate(&self.messenger, origin, delegate, self.clock)
                {
                    Ok(_) => ok(),
                    Err(e) => err(e.code()),
                }
            }
            Action::OperatorFailure => {
                self.messenger.mark_failed();
                self.operator_failed = true;
                ok()
            }
            Action::RegisterResolverPostFailure {
                l2_contract,
                caller,
                claim,
                resolver,
                ..
            } => self.register_post_failure(l2_contract, caller, claim, resolver),
            Action::AdvanceClock { by } => {
                // Validation already simulated this addition without overflow.
                self.clock += by;
                ok()
            }
            Action::AttemptEscape {
                escape, claimer, ..
            } => self.attempt_escape(escape, claimer),
        }
    }

    /// Runs an L2-side ledger mutation, which requires a live operator.
    fn l2_ledger<F>(&mut self, op: F) -> ActionResult
    where
        F: FnOnce(
            &mut WorldState,
            &BTreeMap<String, Address>,
        ) -> Result<(), crate::state::StateError>,
    {
        if self.operator_failed {
            return err("OperatorFailed");
        }
        match op(&mut self.world, &self.names) {
            Ok(()) => ok(),
            Err(e) => err(e.code()),
        }
    }

    fn deposit_eth(&mut self, to: &str, amount: u128) -> ActionResult {
        if self.operator_failed {
            return err("OperatorFailed");
        }
        let Some(deposited) = self.eth_deposited.checked_add(amount) else {
            return err("Overflow");
        };
        let to = self.addr(to);
        if let Err(e) = self.world.credit_eth(to, amount) {
            return err(e.code());
        }
        self.bridge.escrow_eth(amount);
        self.eth_deposited = deposited;
        ok()
    }

    fn erc20_mint(&mut self, token: &str, to: &str, amount: u128) -> ActionResult {
        if self.operator_failed {
            return err("OperatorFailed");
        }
        let token = self.addr(token);
        let minted = self.tokens_minted.get(&token).copied().unwrap_or(0);
        let Some(minted) = minted.checked_add(amount) else {
            return err("Overflow");
        };
        let to = self.addr(to);
        if let Err(e) = crate::state::erc20_mint(&mut self.world, token, to, amount) {
            return err(e.code());
        }
        self.bridge.escrow_tokens(token, amount);
        self.tokens_minted.insert(token, minted);
        ok()
    }

    fn erc721_mint(&mut self, token: &str, to: &str, token_id: u128) -> ActionResult {
        if self.operator_failed {
            return err("OperatorFailed");
        }
        let token = self.addr(token);
        let to = self.addr(to);
        let id = Hash256::from_u128(token_id);
        if let Err(e) = crate::state::erc721_mint(&mut self.world, token, to, id) {
            return err(e.code());
        }
        self.bridge.escrow_nft(token, id);
        self.nfts_minted.insert((token, id));
        ok()
    }

    fn propose_root(&mut self, valid: bool) -> ActionResult {
        if self.operator_failed {
            return err("OperatorFailed");
        }
        let root = self.world.state_root();
        let block = self.next_block;
        self.next_block += 1;
        match self.oracle.propose_root(root, self.clock, block, valid) {
            Ok(_) => {
                if valid {
                    self.snapshots.insert(root, self.world.clone());
                }
                ok()
            }
            Err(e) => err(e.code()),
        }
    }

    fn register_post_failure(
        &mut self,
        l2_contract: &str,
        caller: &str,
        claim: &ClaimDecl,
        resolver: &str,
    ) -> ActionResult {
        let contract = self.addr(l2_contract);
        let caller = self.addr(caller);
        let enabled = self
            .bridge
            .escape_enabled(&self.oracle, self.clock)
            .unwrap_or(false);
        let claim = match claim {
            ClaimDecl::Create { nonce } => DeploymentClaim::Create { nonce: *nonce },
            ClaimDecl::Create2 { salt } => {
                let layout = self
                    .world
                    .layout_of(&contract)
                    .expect("genesis-deployed contract");
                DeploymentClaim::Create2 {
                    salt: *salt,
                    init_code_hash: keccak256(layout.code_blob()),
                }
            }
        };
        match self
            .registry
            .register_resolver_post_failure(caller, contract, claim, resolver, enabled, self.clock)
        {
            Ok(()) => ok(),
            Err(e) => err(e.code()),
        }
    }

    fn attempt_escape(&mut self, escape: &EscapeDecl, claimer: &str) -> ActionResult {
        let claimer = self.addr(claimer);
        // Proofs come from the snapshot at the latest valid root; with no
        // valid root the bridge rejects before looking at them.
        let snapshot = self
            .oracle
            .latest_valid()
            .and_then(|r| self.snapshots.get(&r.root));
        let source = snapshot.unwrap_or(&self.world);
        let anchor = self.oracle.latest_valid().map_or(0, |r| r.timestamp);

        let outcome = match escape {
            EscapeDecl::Eth { account } => {
                let account = self.names[account];
                let bundle = generate_bundle(source, account, &[]);
                self.bridge
                    .escape_eth(&self.oracle, &self.registry, self.clock, claimer, &bundle)
            }
            EscapeDecl::Erc20 { token, holder } => {
                let contract = self.names[token];
                let holder = self.names[holder];
                let declared = self.declared_layouts();
                let slots = match self.planned_def(&declared, &contract, anchor) {
                    Some(TokenLayout::Erc20 { balances_slot, .. }) => {
                        vec![address_mapping_slot(&holder, balances_slot)]
                    }
                    _ => Vec::new(),
                };
                let bundles = vec![generate_bundle(source, contract, &slots)];
                self.bridge.escape_asset(
                    &self.oracle,
                    &self.registry,
                    &self.library,
                    &declared,
                    self.clock,
                    claimer,
                    contract,
                    &ResolverRequest::Erc20 { holder },
                    &bundles,
                )
            }
            EscapeDecl::Erc721 { token, token_id } => {
                let contract = self.names[token];
                let id = Hash256::from_u128(*token_id);
                let declared = self.declared_layouts();
                let slots = match self.planned_def(&declared, &contract, anchor) {
                    Some(TokenLayout::Erc721 { owners_slot }) => {
                        vec![mapping_slot(&id, owners_slot)]
                    }
                    _ => Vec::new(),
                };
                let bundles = vec![generate_bundle(source, contract, &slots)];
                self.bridge.escape_asset(
                    &self.oracle,
                    &self.registry,
                    &self.library,
                    &declared,
                    self.clock,
                    claimer,
                    contract,
                    &ResolverRequest::Erc721 { token_id: id },
                    &bundles,
                )
            }
            EscapeDecl::Univ2 { pool, provider } => {
                let contract = self.names[pool];
                let provider = self.names[provider];
                let declared = self.declared_layouts();
                let bundles =
                    self.plan_univ2_bundles(source, &declared, &contract, &provider, anchor);
                self.bridge.escape_asset(
                    &self.oracle,
                    &self.registry,
                    &self.library,
                    &declared,
                    self.clock,
                    claimer,
                    contract,
                    &ResolverRequest::Univ2 { provider },
                    &bundles,
                )
            }
        };
        match outcome {
            Ok(receipt) => ("ok".to_string(), Some(receipt)),
            Err(e) => err(e.code()),
        }
    }

    /// The layout kinds the escaper declares: honest copies of every
    /// genesis contract's real layout.
    fn declared_layouts(&self) -> BTreeMap<Address, TokenLayout> {
        self.contracts
            .values()
            .filter_map(|address| self.world.layout_of(address).map(|l| (*address, *l)))
            .collect()
    }

    /// Which resolver definition an escape of `contract` would use right
    /// now; None when dispatch fails (the escape call will surface why).
    fn planned_def(
        &self,
        declared: &BTreeMap<Address, TokenLayout>,
        contract: &Address,
        anchor: u64,
    ) -> Option<TokenLayout> {
        dispatch(
            &self.registry,
            &self.library,
            declared.get(contract),
            contract,
            self.clock,
            anchor,
            self.t_seconds,
        )
        .ok()
        .map(|(_, def)| *def)
    }

    /// Pair escapes need the pool's words plus the pool's balance in each
    /// pooled token, each proved against that token's own layout.
    fn plan_univ2_bundles(
        &self,
        source: &WorldState,
        declared: &BTreeMap<Address, TokenLayout>,
        pool: &Address,
        provider: &Address,
        anchor: u64,
    ) -> Vec<ProofBundle> {
        let Some(TokenLayout::Univ2Pair {
            total_supply_slot,
            lp_balances_slot,
            token0_slot,
            token1_slot,
        }) = self.planned_def(declared, pool, anchor)
        else {
            return vec![generate_bundle(source, *pool, &[])];
        };
        let pool_slots = vec![
            direct_slot(token0_slot),
            direct_slot(token1_slot),
            direct_slot(total_supply_slot),
            address_mapping_slot(provider, lp_balances_slot),
        ];
        let mut bundles = vec![generate_bundle(source, *pool, &pool_slots)];
        for slot in [token0_slot, token1_slot] {
            let Some(token) = source.storage_at(pool, &direct_slot(slot)).to_address() else {
                continue;
            };
            let Some(TokenLayout::Erc20 { balances_slot, .. }) =
                self.planned_def(declared, &token, anchor)
            else {
                continue;
            };
            bundles.push(generate_bundle(
                source,
                token,
                &[address_mapping_slot(pool, balances_slot)],
            ));
        }
        bundles
    }

    fn describe(&self, action: &Action) -> String {
        match action {
            Action::DepositEth { to, amount, .. } => format!("to={to} amount={amount}"),
            Action::Erc20Mint {
                token, to, amount, ..
            } => {
                format!("token={token} to={to} amount={amount}")
            }
            Action::Erc20Transfer {
                token,
                from,
                to,
                amount,
                ..
            } => {
                format!("token={token} from={from} to={to} amount={amount}")
            }
            Action::Erc721Mint {
                token,
                to,
                token_id,
                ..
            } => {
                format!("token={token} to={to} token_id={token_id}")
            }
            Action::Erc721Transfer {
                token,
                from,
                to,
                token_id,
                ..
            } => {
                format!("token={token} from={from} to={to} token_id={token_id}")
            }
            Action::AddLiquidity {
                pool,
                provider,
                amount_x,
                amount_y,
                ..
            } => {
                format!("pool={pool} provider={provider} x={amount_x} y={amount_y}")
            }
            Action::ProposeRoot { valid, .. } => format!("valid={valid}"),
            Action::RegisterResolverLive {
                contract, resolver, ..
            } => {
                format!("contract={contract} resolver={resolver}")
            }
            Action::RegisterDelegate {
                wallet, delegate, ..
            } => {
                format!("wallet={wallet} delegate={delegate}")
            }
            Action::OperatorFailure => String::new(),
            Action::RegisterResolverPostFailure {
                l2_contract,
                caller,
                resolver,
                ..
            } => {
                format!("contract={l2_contract} caller={caller} resolver={resolver}")
            }
            Action::AdvanceClock { by } => format!("by={by}"),
            Action::AttemptEscape {
                escape, claimer, ..
            } => {
                let target = match escape {
                    EscapeDecl::Eth { account } => format!("eth account={account}"),
                    EscapeDecl::Erc20 { token, holder } => {
                        format!("erc20 token={token} holder={holder}")
                    }
                    EscapeDecl::Erc721 { token, token_id } => {
                        format!("erc721 token={token} token_id={token_id}")
                    }
                    EscapeDecl::Univ2 { pool, provider } => {
                        format!("univ2 pool={pool} provider={provider}")
                    }
                };
                format!("{target} claimer={claimer}")
            }
        }
    }

    fn final_state(&self) -> FinalState {
        FinalState {
            latest_valid_root: self.oracle.latest_valid().map(|r| r.root),
            eth_escrow: self.bridge.eth_escrow(),
            token_escrow: self.bridge.token_escrow_all().clone(),
            nft_escrow: self
                .bridge
                .nft_escrow_all()
                .iter()
                .map(|(token, token_id)| NftRef {
                    token: *token,
                    token_id: *token_id,
                })
                .collect(),
            nullifiers: self.bridge.nullifiers().iter().copied().collect(),
            l1_eth_credits: self.bridge.l1_eth_credits().clone(),
            l1_token_credits: self.bridge.l1_token_credits().clone(),
            l1_nft_credits: self
                .bridge
                .l1_nft_credits()
                .iter()
                .map(|(owner, set)| {
                    let refs = set
                        .iter()
                        .map(|(token, token_id)| NftRef {
                            token: *token,
                            token_id: *token_id,
                        })
                        .collect();
                    (*owner, refs)
                })
                .collect(),
        }
    }

    fn conservation(&self) -> Conservation {
        let eth_paid: u128 = self
            .bridge
            .l1_eth_credits()
            .values()
            .fold(0u128, |acc, a| acc.saturating_add(a.0));
        let eth = FungibleConservation {
            deposited: self.eth_deposited,
            escrowed: self.bridge.eth_escrow(),
            paid: eth_paid,
            exact: self
                .bridge
                .eth_escrow()
                .checked_add(eth_paid)
                .is_some_and(|sum| sum == self.eth_deposited),
        };

        let mut token_addresses: BTreeSet<Address> = self.tokens_minted.keys().copied().collect();
        token_addresses.extend(self.bridge.token_escrow_all().keys().copied());
        for credits in self.bridge.l1_token_credits().values() {
            token_addresses.extend(credits.keys().copied());
        }
        let tokens = token_addresses
            .into_iter()
            .map(|token| {
                let minted = self.tokens_minted.get(&token).copied().unwrap_or(0);
                let escrowed = self.bridge.token_escrow(&token);
                let paid: u128 = self
                    .bridge
                    .l1_token_credits()
                    .values()
                    .filter_map(|m| m.get(&token))
                    .fold(0u128, |acc, a| acc.saturating_add(a.0));
                let exact = escrowed.checked_add(paid).is_some_and(|sum| sum == minted);
                (
                    token,
                    FungibleConservation {
                        deposited: minted,
                        escrowed,
                        paid,
                        exact,
                    },
                )
            })
            .collect();

        let nfts_exact = self.nfts_exact();
        Conservation {
            eth,
            tokens,
            nfts_exact,
        }
    }

    fn nfts_exact(&self) -> bool {
        let minted = &self.nfts_minted;
        let escrowed = self.bridge.nft_escrow_all();
        let mut credited: BTreeSet<(Address, Hash256)> = BTreeSet::new();
        for set in self.bridge.l1_nft_credits().values() {
            for piece in set {
                // A piece credited to two owners is a conservation failure.
                if !credited.insert(*piece) {
                    return false;
                }
            }
        }
        if !escrowed.is_subset(minted) || !credited.is_subset(minted) {
            return false;
        }
        minted
            .iter()
            .all(|piece| escrowed.contains(piece) != credited.contains(piece))
    }

    fn run_assertions(&self, assertions: &[Assertion]) -> Vec<AssertionOutcome> {
        assertions
            .iter()
            .enumerate()
            .map(|(index, assertion)| {
                let (detail, passed) = self.check_assertion(assertion);
                AssertionOutcome {
                    index,
                    kind: assertion.kind_name().to_string(),
                    detail,
                    passed,
                }
            })
            .collect()
    }

    fn check_assertion(&self, assertion: &Assertion) -> (String, bool) {
        match assertion {
            Assertion::EthEscrow { equals } => {
                let actual = self.bridge.eth_escrow();
                (
                    format!("eth escrow: expected {equals}, actual {actual}"),
                    actual == *equals,
                )
            }
            Assertion::TokenEscrow { token, equals } => {
                let actual = self.bridge.token_escrow(&self.names[token]);
                (
                    format!("escrow of {token}: expected {equals}, actual {actual}"),
                    actual == *equals,
                )
            }
            Assertion::L1EthCredit { account, equals } => {
                let actual = self.bridge.l1_eth_credit(&self.names[account]);
                (
                    format!("eth credit of {account}: expected {equals}, actual {actual}"),
                    actual == *equals,
                )
            }
            Assertion::L1TokenCredit {
                account,
                token,
                equals,
            } => {
                let actual = self
                    .bridge
                    .l1_token_credit(&self.names[account], &self.names[token]);
                (
                    format!("{token} credit of {account}: expected {equals}, actual {actual}"),
                    actual == *equals,
                )
            }
            Assertion::L1NftOwned {
                account,
                token,
                token_id,
                owned,
            } => {
                let actual = self.bridge.l1_holds_nft(
                    &self.names[account],
                    &self.names[token],
                    &Hash256::from_u128(*token_id),
                );
                (
                    format!(
                        "{account} holds {token}#{token_id}: expected {owned}, actual {actual}"
                    ),
                    actual == *owned,
                )
            }
            Assertion::NullifierCount { equals } => {
                let actual = self.bridge.nullifiers().len() as u64;
                (
                    format!("nullifiers: expected {equals}, actual {actual}"),
                    actual == *equals,
                )
            }
        }
    }
}

fn deployment_of(decl: &DeploymentDecl) -> Deployment {
    match decl {
        DeploymentDecl::Create => Deployment::Create,
        DeploymentDecl::Create2 { salt } => Deployment::Create2 { salt: *salt },
    }
}
