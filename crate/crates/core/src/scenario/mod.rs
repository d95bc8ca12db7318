//! Scenario files, the timeline runner, and deterministic reports.
//!
//! A scenario is a JSON file: named accounts, token and pool deployments,
//! a timestamped timeline of actions, and assertions over the final bridge
//! state. Running one drives every layer of the crate (ledger, oracle,
//! registry, bridge) under a logical clock and produces a [`report::Report`]
//! that is byte-identical across repeated runs.
//!
//! Entities are referred to by name throughout; addresses appear only in
//! the genesis account table and in reports. Amounts are decimal strings.

pub mod fixtures;
pub mod report;
mod runner;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::contracts::bridge::DEFAULT_T_SECONDS;
use crate::encoding::{Address, Hash256};
use crate::resolvers::{DEFAULT_ERC20_RESOLVER, DEFAULT_ERC721_RESOLVER, DEFAULT_UNIV2_RESOLVER};
use crate::state::TokenLayout;

pub use runner::{run_scenario, RunOptions};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    /// The file is not valid JSON for the schema; carries serde's
    /// line/column context.
    #[error("scenario parse error: {0}")]
    Parse(String),
    /// The JSON parsed but violates a structural rule.
    #[error("schema violation: {0}")]
    Schema(String),
}

/// A full scenario file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub parameters: Parameters,
    /// Extra named resolver definitions, merged into the library next to
    /// the built-in `default-*` entries.
    #[serde(default)]
    pub resolvers: BTreeMap<String, TokenLayout>,
    pub genesis: Genesis,
    pub timeline: Vec<TimelineEntry>,
    #[serde(default)]
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default = "default_t")]
    pub t_seconds: u64,
}

fn default_t() -> u64 {
    DEFAULT_T_SECONDS
}

impl Default for Parameters {
    fn default() -> Self {
        Parameters {
            t_seconds: DEFAULT_T_SECONDS,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Genesis {
    /// Name to L2/L1 address bindings for people and wallets.
    #[serde(default)]
    pub accounts: BTreeMap<String, Address>,
    /// Token contracts deployed at genesis, in order.
    #[serde(default)]
    pub tokens: Vec<TokenDecl>,
    /// Pair pools deployed after the tokens, in order.
    #[serde(default)]
    pub pools: Vec<PoolDecl>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenDecl {
    pub name: String,
    /// Deploying account name; its nonce drives CREATE addressing.
    pub deployer: String,
    #[serde(default)]
    pub deployment: DeploymentDecl,
    pub layout: TokenLayout,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolDecl {
    pub name: String,
    pub deployer: String,
    #[serde(default)]
    pub deployment: DeploymentDecl,
    /// Token names wired into the pool's token0/token1 slots.
    pub token_x: String,
    pub token_y: String,
    #[serde(default = "TokenLayout::univ2_default")]
    pub layout: TokenLayout,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeploymentDecl {
    #[default]
    Create,
    Create2 {
        salt: Hash256,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimelineEntry {
    /// Logical timestamp; non-decreasing along the timeline.
    pub at: u64,
    pub action: Action,
}

/// Expected outcome of an action: `"ok"` or `"error:<Code>"`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(try_from = "String")]
pub enum Expect {
    #[default]
    Ok,
    Error(String),
}

impl fmt::Display for Expect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expect::Ok => f.write_str("ok"),
            Expect::Error(code) => write!(f, "error:{code}"),
        }
    }
}

impl TryFrom<String> for Expect {
    type Error = String;

    fn try_from(value: String) -> Result<Self, String> {
        if value == "ok" {
            return Ok(Expect::Ok);
        }
        match value.strip_prefix("error:") {
            Some(code) if !code.is_empty() => Ok(Expect::Error(code.to_string())),
            _ => Err(format!(
                "expect must be \"ok\" or \"error:<Code>\", got {value:?}"
            )),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Action {
    /// L1 deposit: escrows ETH in the bridge and credits the L2 account.
    DepositEth {
        to: String,
        #[serde(with = "crate::encoding::dec")]
        amount: u128,
        #[serde(default)]
        expect: Expect,
    },
    /// Canonical token deposit: escrows on L1 and mints on L2.
    Erc20Mint {
        token: String,
        to: String,
        #[serde(with = "crate::encoding::dec")]
        amount: u128,
        #[serde(default)]
        expect: Expect,
    },
    Erc20Transfer {
        token: String,
        from: String,
        to: String,
        #[serde(with = "crate::encoding::dec")]
        amount: u128,
        #[serde(default)]
        expect: Expect,
    },
    /// Canonical NFT deposit: escrows the piece on L1 and mints on L2.
    Erc721Mint {
        token: String,
        to: String,
        #[serde(with = "crate::encoding::dec")]
        token_id: u128,
        #[serde(default)]
        expect: Expect,
    },
    Erc721Transfer {
        token: String,
        from: String,
        to: String,
        #[serde(with = "crate::encoding::dec")]
        token_id: u128,
        #[serde(default)]
        expect: Expect,
    },
    AddLiquidity {
        pool: String,
        provider: String,
        #[serde(with = "crate::encoding::dec")]
        amount_x: u128,
        #[serde(with = "crate::encoding::dec")]
        amount_y: u128,
        #[serde(default)]
        expect: Expect,
    },
    /// The operator posts the current L2 state root at the current clock.
    ProposeRoot {
        valid: bool,
        #[serde(default)]
        expect: Expect,
    },
    RegisterResolverLive {
        contract: String,
        resolver: String,
        #[serde(default)]
        expect: Expect,
    },
    RegisterDelegate {
        wallet: String,
        delegate: String,
        #[serde(default)]
        expect: Expect,
    },
    /// The rollup dies: no more roots, no more cross-domain messages.
    OperatorFailure,
    RegisterResolverPostFailure {
        l2_contract: String,
        caller: String,
        claim: ClaimDecl,
        resolver: String,
        #[serde(default)]
        expect: Expect,
    },
    AdvanceClock {
        by: u64,
    },
    AttemptEscape {
        escape: EscapeDecl,
        claimer: String,
        #[serde(default)]
        expect: Expect,
    },
}

impl Action {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Action::DepositEth { .. } => "deposit_eth",
            Action::Erc20Mint { .. } => "erc20_mint",
            Action::Erc20Transfer { .. } => "erc20_transfer",
            Action::Erc721Mint { .. } => "erc721_mint",
            Action::Erc721Transfer { .. } => "erc721_transfer",
            Action::AddLiquidity { .. } => "add_liquidity",
            Action::ProposeRoot { .. } => "propose_root",
            Action::RegisterResolverLive { .. } => "register_resolver_live",
            Action::RegisterDelegate { .. } => "register_delegate",
            Action::OperatorFailure => "operator_failure",
            Action::RegisterResolverPostFailure { .. } => "register_resolver_post_failure",
            Action::AdvanceClock { .. } => "advance_clock",
            Action::AttemptEscape { .. } => "attempt_escape",
        }
    }

    /// The declared expectation; actions without one expect success.
    pub fn expect(&self) -> &Expect {
        const OK: &Expect = &Expect::Ok;
        match self {
            Action::DepositEth { expect, .. }
            | Action::Erc20Mint { expect, .. }
            | Action::Erc20Transfer { expect, .. }
            | Action::Erc721Mint { expect, .. }
            | Action::Erc721Transfer { expect, .. }
            | Action::AddLiquidity { expect, .. }
            | Action::ProposeRoot { expect, .. }
            | Action::RegisterResolverLive { expect, .. }
            | Action::RegisterDelegate { expect, .. }
            | Action::RegisterResolverPostFailure { expect, .. }
            | Action::AttemptEscape { expect, .. } => expect,
            Action::OperatorFailure | Action::AdvanceClock { .. } => OK,
        }
    }
}

/// The deployment preimage exhibited by a post-failure registrant. The
/// caller is the claimed deployer; for create2 the init code hash is
/// derived from the target contract's declared layout.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClaimDecl {
    Create { nonce: u64 },
    Create2 { salt: Hash256 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EscapeDecl {
    Eth {
        account: String,
    },
    Erc20 {
        token: String,
        holder: String,
    },
    Erc721 {
        token: String,
        #[serde(with = "crate::encoding::dec")]
        token_id: u128,
    },
    Univ2 {
        pool: String,
        provider: String,
    },
}

impl EscapeDecl {
    pub fn kind_name(&self) -> &'static str {
        match self {
            EscapeDecl::Eth { .. } => "eth",
            EscapeDecl::Erc20 { .. } => "erc20",
            EscapeDecl::Erc721 { .. } => "erc721",
            EscapeDecl::Univ2 { .. } => "univ2",
        }
    }
}

/// A check against the final bridge state; all must hold for the run to
/// pass.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Assertion {
    EthEscrow {
        #[serde(with = "crate::encoding::dec")]
        equals: u128,
    },
    TokenEscrow {
        token: String,
        #[serde(with = "crate::encoding::dec")]
        equals: u128,
    },
    L1EthCredit {
        account: String,
        #[serde(with = "crate::encoding::dec")]
        equals: u128,
    },
    L1TokenCredit {
        account: String,
        token: String,
        #[serde(with = "crate::encoding::dec")]
        equals: u128,
    },
    L1NftOwned {
        account: String,
        token: String,
        #[serde(with = "crate::encoding::dec")]
        token_id: u128,
        #[serde(default = "default_true")]
        owned: bool,
    },
    NullifierCount {
        equals: u64,
    },
}

fn default_true() -> bool {
    true
}

impl Assertion {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Assertion::EthEscrow { .. } => "eth_escrow",
            Assertion::TokenEscrow { .. } => "token_escrow",
            Assertion::L1EthCredit { .. } => "l1_eth_credit",
            Assertion::L1TokenCredit { .. } => "l1_token_credit",
            Assertion::L1NftOwned { .. } => "l1_nft_owned",
            Assertion::NullifierCount { .. } => "nullifier_count",
        }
    }
}

/// Parses and validates scenario JSON.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let scenario: Scenario =
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    validate(&scenario)?;
    Ok(scenario)
}

/// Reads and parses a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Parse(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

/// What kind of entity a name refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NameKind {
    Account,
    Token,
    Pool,
}

pub(crate) fn name_table(scenario: &Scenario) -> Result<BTreeMap<&str, NameKind>, ScenarioError> {
    fn bind<'s>(
        table: &mut BTreeMap<&'s str, NameKind>,
        name: &'s str,
        kind: NameKind,
    ) -> Result<(), ScenarioError> {
        if name.is_empty() {
            return Err(ScenarioError::Schema(
                "entity names must be nonempty".into(),
            ));
        }
        if table.insert(name, kind).is_some() {
            return Err(ScenarioError::Schema(format!(
                "duplicate entity name {name:?}"
            )));
        }
        Ok(())
    }
    let mut table: BTreeMap<&str, NameKind> = BTreeMap::new();
    for name in scenario.genesis.accounts.keys() {
        bind(&mut table, name, NameKind::Account)?;
    }
    for token in &scenario.genesis.tokens {
        bind(&mut table, &token.name, NameKind::Token)?;
    }
    for pool in &scenario.genesis.pools {
        bind(&mut table, &pool.name, NameKind::Pool)?;
    }
    Ok(table)
}

fn validate(scenario: &Scenario) -> Result<(), ScenarioError> {
    let schema = |msg: String| ScenarioError::Schema(msg);
    if scenario.name.is_empty() {
        return Err(schema("scenario name must be nonempty".into()));
    }

    let names = name_table(scenario)?;
    let require = |name: &str, kind: NameKind, role: &str| -> Result<(), ScenarioError> {
        match names.get(name) {
            Some(k) if *k == kind => Ok(()),
            Some(_) => Err(ScenarioError::Schema(format!(
                "{role} {name:?} refers to the wrong kind of entity"
            ))),
            None => Err(ScenarioError::Schema(format!("unknown {role} {name:?}"))),
        }
    };
    let require_contract = |name: &str, role: &str| -> Result<(), ScenarioError> {
        match names.get(name) {
            Some(NameKind::Token) | Some(NameKind::Pool) => Ok(()),
            Some(NameKind::Account) => Err(ScenarioError::Schema(format!(
                "{role} {name:?} must be a token or pool, not an account"
            ))),
            None => Err(ScenarioError::Schema(format!("unknown {role} {name:?}"))),
        }
    };

    // Distinct account addresses.
    {
        let mut seen: BTreeMap<Address, &str> = BTreeMap::new();
        for (name, address) in &scenario.genesis.accounts {
            if let Some(other) = seen.insert(*address, name) {
                return Err(schema(format!(
                    "accounts {other:?} and {name:?} share address {address}"
                )));
            }
        }
    }

    // Resolver ids: nonempty, and the built-in names stay built-in.
    for id in scenario.resolvers.keys() {
        if id.is_empty() {
            return Err(schema("resolver ids must be nonempty".into()));
        }
        if [
            DEFAULT_ERC20_RESOLVER,
            DEFAULT_ERC721_RESOLVER,
            DEFAULT_UNIV2_RESOLVER,
        ]
        .contains(&id.as_str())
        {
            return Err(schema(format!(
                "resolver id {id:?} shadows a built-in definition"
            )));
        }
    }
    let resolver_known = |id: &str| -> bool {
        scenario.resolvers.contains_key(id)
            || [
                DEFAULT_ERC20_RESOLVER,
                DEFAULT_ERC721_RESOLVER,
                DEFAULT_UNIV2_RESOLVER,
            ]
            .contains(&id)
    };

    // Genesis declarations.
    for token in &scenario.genesis.tokens {
        require(&token.deployer, NameKind::Account, "deployer")?;
        if matches!(token.layout, TokenLayout::Univ2Pair { .. }) {
            return Err(schema(format!(
                "token {:?} declares a pair layout; declare it under pools",
                token.name
            )));
        }
    }
    for pool in &scenario.genesis.pools {
        require(&pool.deployer, NameKind::Account, "deployer")?;
        if !matches!(pool.layout, TokenLayout::Univ2Pair { .. }) {
            return Err(schema(format!(
                "pool {:?} must declare a pair layout",
                pool.name
            )));
        }
        require(&pool.token_x, NameKind::Token, "pool token")?;
        require(&pool.token_y, NameKind::Token, "pool token")?;
        if pool.token_x == pool.token_y {
            return Err(schema(format!(
                "pool {:?} pairs token {:?} with itself",
                pool.name, pool.token_x
            )));
        }
    }

    // Timeline: clock discipline, at most one operator failure, names.
    let mut clock: u64 = 0;
    let mut failures = 0usize;
    for (index, entry) in scenario.timeline.iter().enumerate() {
        if entry.at < clock {
            return Err(schema(format!(
                "timeline entry {index} at t={} precedes the clock at {clock}",
                entry.at
            )));
        }
        clock = entry.at;
        match &entry.action {
            Action::DepositEth { to, .. } => require(to, NameKind::Account, "account")?,
            Action::Erc20Mint { token, to, .. } => {
                require_contract(token, "token")?;
                require(to, NameKind::Account, "account")?;
            }
            Action::Erc20Transfer {
                token, from, to, ..
            } => {
                require_contract(token, "token")?;
                require(from, NameKind::Account, "account")?;
                require(to, NameKind::Account, "account")?;
            }
            Action::Erc721Mint { token, to, .. } => {
                require_contract(token, "token")?;
                require(to, NameKind::Account, "account")?;
            }
            Action::Erc721Transfer {
                token, from, to, ..
            } => {
                require_contract(token, "token")?;
                require(from, NameKind::Account, "account")?;
                require(to, NameKind::Account, "account")?;
            }
            Action::AddLiquidity { pool, provider, .. } => {
                require(pool, NameKind::Pool, "pool")?;
                require(provider, NameKind::Account, "account")?;
            }
            Action::ProposeRoot { .. } => {}
            Action::RegisterResolverLive {
                contract, resolver, ..
            } => {
                require_contract(contract, "contract")?;
                if !resolver_known(resolver) {
                    return Err(schema(format!("unknown resolver id {resolver:?}")));
                }
            }
            Action::RegisterDelegate {
                wallet, delegate, ..
            } => {
                require(wallet, NameKind::Account, "wallet")?;
                require(delegate, NameKind::Account, "delegate")?;
            }
            Action::OperatorFailure => failures += 1,
            Action::RegisterResolverPostFailure {
                l2_contract,
                caller,
                resolver,
                ..
            } => {
                require_contract(l2_contract, "contract")?;
                require(caller, NameKind::Account, "account")?;
                if !resolver_known(resolver) {
                    return Err(schema(format!("unknown resolver id {resolver:?}")));
                }
            }
            Action::AdvanceClock { by } => {
                clock = clock.checked_add(*by).ok_or_else(|| {
                    ScenarioError::Schema(format!("timeline entry {index} overflows the clock"))
                })?;
            }
            Action::AttemptEscape {
                escape, claimer, ..
            } => {
                require(claimer, NameKind::Account, "claimer")?;
                match escape {
                    EscapeDecl::Eth { account } => require(account, NameKind::Account, "account")?,
                    EscapeDecl::Erc20 { token, holder } => {
                        require_contract(token, "token")?;
                        require(holder, NameKind::Account, "holder")?;
                    }
                    EscapeDecl::Erc721 { token, .. } => require_contract(token, "token")?,
                    EscapeDecl::Univ2 { pool, provider } => {
                        require(pool, NameKind::Pool, "pool")?;
                        require(provider, NameKind::Account, "provider")?;
                    }
                }
            }
        }
    }
    if failures > 1 {
        return Err(schema(
            "a timeline may contain at most one operator_failure".into(),
        ));
    }

    for assertion in &scenario.assertions {
        match assertion {
            Assertion::EthEscrow { .. } | Assertion::NullifierCount { .. } => {}
            Assertion::TokenEscrow { token, .. } => require_contract(token, "token")?,
            Assertion::L1EthCredit { account, .. } => {
                require(account, NameKind::Account, "account")?
            }
            Assertion::L1TokenCredit { account, token, .. } => {
                require(account, NameKind::Account, "account")?;
                require_contract(token, "token")?;
            }
            Assertion::L1NftOwned { account, token, .. } => {
                require(account, NameKind::Account, "account")?;
                require_contract(token, "token")?;
            }
        }
    }
    Ok(())
}
