//! `escape-sim`: scenario runner and proof tool for the escape-hatch
//! simulator.
//!
//! Exit codes: 0 on success, 1 when assertions or verification fail, 2 on
//! parse or schema errors (clap uses 2 for usage errors as well).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use escape_core::scenario::fixtures;
use escape_core::scenario::report::Report;
use escape_core::scenario::{load_scenario, run_scenario, RunOptions, ScenarioError};
use escape_core::state::{generate_bundle, ProofBundle, WorldState};
use escape_core::{Address, Hash256};

#[derive(Parser)]
#[command(
    name = "escape-sim",
    version,
    about = "Deterministic rollup escape-hatch simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and evaluate its assertions.
    Run {
        /// Scenario JSON file.
        scenario: PathBuf,
        /// Write the full JSON report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Override the scenario's escape delay T, in seconds.
        #[arg(long)]
        t_override: Option<u64>,
    },
    /// Generate a proof bundle from a world snapshot.
    Prove {
        /// World snapshot JSON file.
        snapshot: PathBuf,
        /// Account address (0x-prefixed).
        address: String,
        /// Storage slot key (0x-prefixed 32-octet hex); repeatable.
        #[arg(long = "slot", value_name = "KEY")]
        slots: Vec<String>,
    },
    /// Check a proof bundle against a state root.
    Verify {
        /// Trusted state root (0x-prefixed 32-octet hex).
        root: String,
        /// Proof bundle JSON file.
        bundle: PathBuf,
    },
    /// Operate on the bundled scenario fixtures.
    Fixtures {
        #[command(subcommand)]
        command: FixturesCommand,
    },
}

#[derive(Subcommand)]
enum FixturesCommand {
    /// Print fixture names, one per line.
    List,
    /// Run every fixture and report pass/fail.
    RunAll,
}

const EXIT_FAILED: u8 = 1;
const EXIT_PARSE: u8 = 2;

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            scenario,
            report,
            t_override,
        } => cmd_run(&scenario, report, t_override),
        Command::Prove {
            snapshot,
            address,
            slots,
        } => cmd_prove(&snapshot, &address, &slots),
        Command::Verify { root, bundle } => cmd_verify(&root, &bundle),
        Command::Fixtures {
            command: FixturesCommand::List,
        } => cmd_fixtures_list(),
        Command::Fixtures {
            command: FixturesCommand::RunAll,
        } => cmd_fixtures_run_all(),
    }
}

fn parse_failure(err: &dyn std::fmt::Display) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(EXIT_PARSE)
}

fn cmd_run(scenario: &Path, report_path: Option<PathBuf>, t_override: Option<u64>) -> ExitCode {
    let scenario = match load_scenario(scenario) {
        Ok(s) => s,
        Err(e) => return parse_failure(&e),
    };
    let report = match run_scenario(&scenario, &RunOptions { t_override }) {
        Ok(r) => r,
        Err(e) => return parse_failure(&e),
    };
    print_report(&report);
    if let Some(path) = report_path {
        if let Err(e) = std::fs::write(&path, report.to_json()) {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(EXIT_PARSE);
        }
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn print_report(report: &Report) {
    for outcome in &report.outcomes {
        let mismatch = if outcome.matched {
            String::new()
        } else {
            format!("  (expected {})", outcome.expected)
        };
        let detail = if outcome.detail.is_empty() {
            String::new()
        } else {
            format!(" {}", outcome.detail)
        };
        println!(
            "[{:>3}] t={} {}{}: {}{}",
            outcome.index, outcome.at, outcome.kind, detail, outcome.result, mismatch
        );
    }
    for assertion in &report.assertions {
        let verdict = if assertion.passed { "pass" } else { "FAIL" };
        println!(
            "assert {}: {} -> {}",
            assertion.kind, assertion.detail, verdict
        );
    }
    let conservation_ok = report.conservation.eth.exact
        && report.conservation.tokens.values().all(|c| c.exact)
        && report.conservation.nfts_exact;
    println!(
        "conservation: {}",
        if conservation_ok { "exact" } else { "VIOLATED" }
    );
    if !report.structural.post_failure_silence {
        println!("structural: post-failure silence VIOLATED");
    }
    println!(
        "scenario {}: {}",
        report.scenario,
        if report.passed { "PASS" } else { "FAIL" }
    );
}

fn cmd_prove(snapshot: &Path, address: &str, slots: &[String]) -> ExitCode {
    let text = match std::fs::read_to_string(snapshot) {
        Ok(t) => t,
        Err(e) => return parse_failure(&format!("{}: {e}", snapshot.display())),
    };
    let world: WorldState = match serde_json::from_str(&text) {
        Ok(w) => w,
        Err(e) => return parse_failure(&format!("{}: {e}", snapshot.display())),
    };
    let address: Address = match address.parse() {
        Ok(a) => a,
        Err(e) => return parse_failure(&e),
    };
    let mut keys = Vec::with_capacity(slots.len());
    for slot in slots {
        match slot.parse::<Hash256>() {
            Ok(key) => keys.push(key),
            Err(e) => return parse_failure(&e),
        }
    }
    let bundle = generate_bundle(&world, address, &keys);
    let mut json = serde_json::to_string_pretty(&bundle).expect("bundles always serialize");
    json.push('\n');
    print!("{json}");
    ExitCode::SUCCESS
}

fn cmd_verify(root: &str, bundle: &Path) -> ExitCode {
    let root: Hash256 = match root.parse() {
        Ok(r) => r,
        Err(e) => return parse_failure(&e),
    };
    let text = match std::fs::read_to_string(bundle) {
        Ok(t) => t,
        Err(e) => return parse_failure(&format!("{}: {e}", bundle.display())),
    };
    let bundle: ProofBundle = match serde_json::from_str(&text) {
        Ok(b) => b,
        Err(e) => return parse_failure(&format!("{}: {e}", bundle.display())),
    };
    match bundle.verify(&root) {
        Ok(verified) => {
            match verified.account {
                Some(account) => println!(
                    "account {}: included nonce={} balance={} storage_root={} code_hash={}",
                    verified.address,
                    account.nonce,
                    account.balance,
                    account.storage_root,
                    account.code_hash,
                ),
                None => println!("account {}: absent", verified.address),
            }
            for (key, value) in &verified.slots {
                match value {
                    Some(word) => println!("slot {key}: included value={word}"),
                    None => println!("slot {key}: absent"),
                }
            }
            println!("verdict: valid");
            ExitCode::SUCCESS
        }
        Err(e) => {
            println!("verdict: invalid ({e})");
            ExitCode::from(EXIT_FAILED)
        }
    }
}

fn cmd_fixtures_list() -> ExitCode {
    match fixtures::fixture_names() {
        Ok(names) => {
            for name in names {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => parse_failure(&e),
    }
}

fn cmd_fixtures_run_all() -> ExitCode {
    let names = match fixtures::fixture_names() {
        Ok(names) => names,
        Err(e) => return parse_failure(&e),
    };
    let mut all_passed = true;
    for name in &names {
        let outcome: Result<Report, ScenarioError> = fixtures::load_fixture(name)
            .and_then(|scenario| run_scenario(&scenario, &RunOptions::default()));
        match outcome {
            Ok(report) => {
                println!(
                    "fixture {name}: {}",
                    if report.passed { "PASS" } else { "FAIL" }
                );
                all_passed &= report.passed;
            }
            Err(e) => return parse_failure(&format!("fixture {name}: {e}")),
        }
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}
