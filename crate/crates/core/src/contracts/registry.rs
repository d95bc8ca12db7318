//! The resolver and delegate registry.
//!
//! While the rollup lives, bindings arrive through the cross-domain
//! messenger, so the L2 contract (or wallet) itself is the authenticated
//! sender. After the rollup fails the messenger is gone; the only party who
//! can still prove a claim over an L2 contract address on L1 is its deployer,
//! by exhibiting the CREATE or CREATE2 preimage of that address.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::{create2_address, create_address, Address, Hash256};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegistryError {
    #[error("registration must arrive via the cross-domain messenger")]
    NotViaMessenger,
    #[error("the rollup has failed; the messenger no longer delivers")]
    L2AlreadyFailed,
    #[error("post-failure registration requires the escape window to be open")]
    EscapeNotEnabled,
    #[error("derived deployment address {derived} does not match {claimed}")]
    DeployerMismatch { claimed: Address, derived: Address },
    #[error("{0} already has a live registration")]
    LiveResolverExists(Address),
}

impl RegistryError {
    pub fn code(&self) -> &'static str {
        match self {
            RegistryError::NotViaMessenger => "NotViaMessenger",
            RegistryError::L2AlreadyFailed => "L2AlreadyFailed",
            RegistryError::EscapeNotEnabled => "EscapeNotEnabled",
            RegistryError::DeployerMismatch { .. } => "DeployerMismatch",
            RegistryError::LiveResolverExists(_) => "LiveResolverExists",
        }
    }
}

/// Who a call appears to come from on L1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CallOrigin {
    /// Relayed by the messenger; `l2_sender` is authenticated.
    CrossDomainMessage { l2_sender: Address },
    /// An ordinary L1 transaction.
    Direct { caller: Address },
}

/// The cross-domain messenger's one observable fact: whether the rollup
/// still relays messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossDomainMessenger {
    live: bool,
}

impl Default for CrossDomainMessenger {
    fn default() -> Self {
        CrossDomainMessenger { live: true }
    }
}

impl CrossDomainMessenger {
    pub fn new() -> Self {
        CrossDomainMessenger::default()
    }

    pub fn mark_failed(&mut self) {
        self.live = false;
    }

    pub fn is_live(&self) -> bool {
        self.live
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegistrationKind {
    Live,
    PostFailure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolverRegistration {
    pub resolver_id: String,
    pub kind: RegistrationKind,
    pub registered_at: u64,
}

/// The deployment preimage a post-failure registrant exhibits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeploymentClaim {
    Create {
        nonce: u64,
    },
    Create2 {
        salt: Hash256,
        init_code_hash: Hash256,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResolverRegistry {
    live: BTreeMap<Address, ResolverRegistration>,
    post_failure: BTreeMap<Address, ResolverRegistration>,
    /// L2 wallet address → L1 delegate allowed to claim for it.
    delegates: BTreeMap<Address, Address>,
}

impl ResolverRegistry {
    pub fn new() -> Self {
        ResolverRegistry::default()
    }

    /// A live registration: the L2 contract binds its own resolver through
    /// the messenger. Re-registration overwrites (last write wins).
    pub fn register_resolver_live(
        &mut self,
        messenger: &CrossDomainMessenger,
        origin: CallOrigin,
        resolver_id: &str,
        now: u64,
    ) -> Result<Address, RegistryError> {
        let contract = authenticated_sender(messenger, origin)?;
        self.live.insert(
            contract,
            ResolverRegistration {
                resolver_id: resolver_id.to_string(),
                kind: RegistrationKind::Live,
                registered_at: now,
            },
        );
        Ok(contract)
    }

    /// An L2 wallet binds an L1 delegate through the messenger. Last write
    /// wins, so a wallet can rotate its delegate while the rollup lives.
    pub fn register_delegate(
        &mut self,
        messenger: &CrossDomainMessenger,
        origin: CallOrigin,
        delegate: Address,
        _now: u64,
    ) -> Result<Address, RegistryError> {
        let wallet = authenticated_sender(messenger, origin)?;
        self.delegates.insert(wallet, delegate);
        Ok(wallet)
    }

    /// A post-failure registration: `caller` proves they deployed
    /// `l2_contract` by exhibiting the address preimage. Only possible once
    /// the escape window is open, and never over a live registration.
    pub fn register_resolver_post_failure(
        &mut self,
        caller: Address,
        l2_contract: Address,
        claim: DeploymentClaim,
        resolver_id: &str,
        escape_enabled: bool,
        now: u64,
    ) -> Result<(), RegistryError> {
        if !escape_enabled {
            return Err(RegistryError::EscapeNotEnabled);
        }
        if self.live.contains_key(&l2_contract) {
            return Err(RegistryError::LiveResolverExists(l2_contract));
        }
        let derived = match claim {
            DeploymentClaim::Create { nonce } => create_address(&caller, nonce),
            DeploymentClaim::Create2 {
                salt,
                init_code_hash,
            } => create2_address(&caller, &salt, &init_code_hash),
        };
        if derived != l2_contract {
            return Err(RegistryError::DeployerMismatch {
                claimed: l2_contract,
                derived,
            });
        }
        self.post_failure.insert(
            l2_contract,
            ResolverRegistration {
                resolver_id: resolver_id.to_string(),
                kind: RegistrationKind::PostFailure,
                registered_at: now,
            },
        );
        Ok(())
    }

    pub fn live_registration(&self, contract: &Address) -> Option<&ResolverRegistration> {
        self.live.get(contract)
    }

    pub fn post_failure_registration(&self, contract: &Address) -> Option<&ResolverRegistration> {
        self.post_failure.get(contract)
    }

    pub fn delegate_of(&self, wallet: &Address) -> Option<Address> {
        self.delegates.get(wallet).copied()
    }
}

/// Registrations made while the rollup lives must arrive as relayed
/// messages; the authenticated L2 sender is the registered subject.
fn authenticated_sender(
    messenger: &CrossDomainMessenger,
    origin: CallOrigin,
) -> Result<Address, RegistryError> {
    match origin {
        CallOrigin::Direct { .. } => Err(RegistryError::NotViaMessenger),
        CallOrigin::CrossDomainMessage { l2_sender } => {
            if !messenger.is_live() {
                return Err(RegistryError::L2AlreadyFailed);
            }
            Ok(l2_sender)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn addr(byte: u8) -> Address {
        Address([byte; 20])
    }

    fn message_from(contract: Address) -> CallOrigin {
        CallOrigin::CrossDomainMessage {
            l2_sender: contract,
        }
    }

    #[test]
    fn live_registration_authenticates_the_l2_sender() {
        let messenger = CrossDomainMessenger::new();
        let mut registry = ResolverRegistry::new();
        registry
            .register_resolver_live(&messenger, message_from(addr(0xaa)), "custom-1", 50)
            .unwrap();
        let reg = registry.live_registration(&addr(0xaa)).unwrap();
        assert_eq!(reg.resolver_id, "custom-1");
        assert_eq!(reg.kind, RegistrationKind::Live);

        // direct calls cannot impersonate a contract
        let err = registry
            .register_resolver_live(
                &messenger,
                CallOrigin::Direct { caller: addr(0xaa) },
                "custom-2",
                51,
            )
            .unwrap_err();
        assert_eq!(err, RegistryError::NotViaMessenger);
    }

    #[test]
    fn live_registration_last_write_wins() {
        let messenger = CrossDomainMessenger::new();
        let mut registry = ResolverRegistry::new();
        registry
            .register_resolver_live(&messenger, message_from(addr(0xaa)), "v1", 10)
            .unwrap();
        registry
            .register_resolver_live(&messenger, message_from(addr(0xaa)), "v2", 20)
            .unwrap();
        assert_eq!(
            registry.live_registration(&addr(0xaa)).unwrap().resolver_id,
            "v2",
        );
    }

    #[test]
    fn failed_messenger_delivers_nothing() {
        let mut messenger = CrossDomainMessenger::new();
        messenger.mark_failed();
        let mut registry = ResolverRegistry::new();
        assert_eq!(
            registry
                .register_resolver_live(&messenger, message_from(addr(1)), "x", 99)
                .unwrap_err(),
            RegistryError::L2AlreadyFailed,
        );
        assert_eq!(
            registry
                .register_delegate(&messenger, message_from(addr(1)), addr(2), 99)
                .unwrap_err(),
            RegistryError::L2AlreadyFailed,
        );
    }

    #[test]
    fn post_failure_registration_verifies_create_preimage() {
        let mut registry = ResolverRegistry::new();
        let deployer = addr(0xde);
        let contract = create_address(&deployer, 3);

        // closed window
        let err = registry
            .register_resolver_post_failure(
                deployer,
                contract,
                DeploymentClaim::Create { nonce: 3 },
                "r",
                false,
                100,
            )
            .unwrap_err();
        assert_eq!(err, RegistryError::EscapeNotEnabled);

        // wrong nonce derives a different address
        let err = registry
            .register_resolver_post_failure(
                deployer,
                contract,
                DeploymentClaim::Create { nonce: 4 },
                "r",
                true,
                100,
            )
            .unwrap_err();
        assert!(matches!(err, RegistryError::DeployerMismatch { .. }));

        registry
            .register_resolver_post_failure(
                deployer,
                contract,
                DeploymentClaim::Create { nonce: 3 },
                "r",
                true,
                100,
            )
            .unwrap();
        let reg = registry.post_failure_registration(&contract).unwrap();
        assert_eq!(reg.kind, RegistrationKind::PostFailure);
        assert_eq!(reg.registered_at, 100);
    }

    #[test]
    fn post_failure_registration_verifies_create2_preimage() {
        let mut registry = ResolverRegistry::new();
        let deployer = addr(0xde);
        let salt = Hash256::from_u128(9);
        let code_hash = crate::encoding::keccak256(b"init");
        let contract = create2_address(&deployer, &salt, &code_hash);

        let err = registry
            .register_resolver_post_failure(
                deployer,
                contract,
                DeploymentClaim::Create2 {
                    salt: Hash256::from_u128(10),
                    init_code_hash: code_hash,
                },
                "r",
                true,
                7,
            )
            .unwrap_err();
        assert!(matches!(err, RegistryError::DeployerMismatch { .. }));

        registry
            .register_resolver_post_failure(
                deployer,
                contract,
                DeploymentClaim::Create2 {
                    salt,
                    init_code_hash: code_hash,
                },
                "r",
                true,
                7,
            )
            .unwrap();
        assert!(registry.post_failure_registration(&contract).is_some());
    }

    #[test]
    fn live_registration_blocks_post_failure_takeover() {
        let messenger = CrossDomainMessenger::new();
        let mut registry = ResolverRegistry::new();
        let deployer = addr(0xde);
        let contract = create_address(&deployer, 0);
        registry
            .register_resolver_live(&messenger, message_from(contract), "official", 10)
            .unwrap();
        let err = registry
            .register_resolver_post_failure(
                deployer,
                contract,
                DeploymentClaim::Create { nonce: 0 },
                "usurper",
                true,
                999,
            )
            .unwrap_err();
        assert_eq!(err, RegistryError::LiveResolverExists(contract));
        assert_eq!(
            registry.live_registration(&contract).unwrap().resolver_id,
            "official",
        );
    }

    #[test]
    fn delegate_binding_round_trip() {
        let messenger = CrossDomainMessenger::new();
        let mut registry = ResolverRegistry::new();
        let wallet = addr(0x77);
        registry
            .register_delegate(&messenger, message_from(wallet), addr(1), 5)
            .unwrap();
        assert_eq!(registry.delegate_of(&wallet), Some(addr(1)));
        // rotation
        registry
            .register_delegate(&messenger, message_from(wallet), addr(2), 6)
            .unwrap();
        assert_eq!(registry.delegate_of(&wallet), Some(addr(2)));
        assert_eq!(registry.delegate_of(&addr(0x78)), None);
    }
}
