//! The L1 side: state-root oracle, resolver registry, and escape bridge.
//!
//! These three pieces are the contracts a real deployment would put on L1.
//! The oracle records proposed L2 state roots, the registry maps L2
//! contracts to resolver implementations (and wallets to delegates), and
//! the bridge holds escrow and pays out against verified proofs once the
//! operator has been silent long enough.

pub mod bridge;
pub mod oracle;
pub mod registry;

pub use bridge::{Bridge, EscapeError, EscapeReceipt, NullifierKey, DEFAULT_T_SECONDS};
pub use oracle::{L2Oracle, OracleError, ProposeOutcome, StateRootRecord};
pub use registry::{
    CallOrigin, CrossDomainMessenger, DeploymentClaim, RegistrationKind, RegistryError,
    ResolverRegistration, ResolverRegistry,
};
