//! Bundled scenario fixtures.
//!
//! Ten scenarios ship inside the library, one per protocol flow. Setting
//! `ESCAPE_SIM_FIXTURES` to a directory of `*.json` files replaces the
//! bundled set entirely (names are the file stems).

use std::path::PathBuf;

use crate::scenario::{parse_scenario, Scenario, ScenarioError};

/// Environment variable naming a replacement fixture directory.
pub const FIXTURE_ENV: &str = "ESCAPE_SIM_FIXTURES";

const EMBEDDED: &[(&str, &str)] = &[
    (
        "double-escape",
        include_str!("../../fixtures/double-escape.json"),
    ),
    (
        "early-escape",
        include_str!("../../fixtures/early-escape.json"),
    ),
    (
        "erc20-default-resolver",
        include_str!("../../fixtures/erc20-default-resolver.json"),
    ),
    (
        "erc20-escape",
        include_str!("../../fixtures/erc20-escape.json"),
    ),
    (
        "erc721-escape",
        include_str!("../../fixtures/erc721-escape.json"),
    ),
    ("eth-escape", include_str!("../../fixtures/eth-escape.json")),
    (
        "invalid-root-rejected",
        include_str!("../../fixtures/invalid-root-rejected.json"),
    ),
    (
        "post-failure-registration",
        include_str!("../../fixtures/post-failure-registration.json"),
    ),
    (
        "univ2-escape",
        include_str!("../../fixtures/univ2-escape.json"),
    ),
    (
        "wallet-delegate-escape",
        include_str!("../../fixtures/wallet-delegate-escape.json"),
    ),
];

fn override_dir() -> Option<PathBuf> {
    match std::env::var_os(FIXTURE_ENV) {
        Some(dir) if !dir.is_empty() => Some(PathBuf::from(dir)),
        _ => None,
    }
}

/// Fixture names, sorted. From the override directory when set, else the
/// bundled list.
pub fn fixture_names() -> Result<Vec<String>, ScenarioError> {
    let Some(dir) = override_dir() else {
        return Ok(EMBEDDED.iter().map(|(name, _)| name.to_string()).collect());
    };
    let entries = std::fs::read_dir(&dir)
        .map_err(|e| ScenarioError::Parse(format!("fixture directory {}: {e}", dir.display())))?;
    let mut names = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| {
            ScenarioError::Parse(format!("fixture directory {}: {e}", dir.display()))
        })?;
        let path = entry.path();
        if path.extension().is_some_and(|ext| ext == "json") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                names.push(stem.to_string());
            }
        }
    }
    names.sort();
    Ok(names)
}

/// Loads one fixture by name.
pub fn load_fixture(name: &str) -> Result<Scenario, ScenarioError> {
    match override_dir() {
        Some(dir) => crate::scenario::load_scenario(&dir.join(format!("{name}.json"))),
        None => {
            let (_, text) = EMBEDDED
                .iter()
                .find(|(n, _)| *n == name)
                .ok_or_else(|| ScenarioError::Parse(format!("unknown fixture {name:?}")))?;
            parse_scenario(text)
        }
    }
}
