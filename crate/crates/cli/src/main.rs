//! `rfdkit`: batch runner for the representation-building and separation
//! experiments. Exit codes: 0 all checks passed, 1 invariant violation or
//! error, 2 inconclusive result present, 64 configuration error.

mod commands;
mod config;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::config::{ConfigError, Defaults, ExperimentConfig, Flags};
use crate::report::{build_report, write_outputs};

#[derive(Parser, Debug)]
#[command(name = "rfdkit", version, about = "Finite-dimensional representation experiments on central amalgams and HNN-extensions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Enumerate congruence quotients and report their sizes.
    Quotient,
    /// Smallest modulus keeping the given elements outside the image of C.
    Filtration,
    /// Whether an element's image lies in the image of C, modulus by modulus.
    Probe,
    /// Induced representations approximating a character, with certificates.
    CharApprox,
    /// Seeded sweep of Gram matrices of the zero-extended character.
    Psd,
    /// Finite GNS construction for the normalized trace of induced representations.
    Gns,
    /// Seeded kernel-consistency checks against the level-0 representation.
    Kernel,
    /// Search for a separating pair of representations of G ∗_C G.
    SeparateAmalgam,
    /// Search for a representation and unitary separating an HNN word.
    SeparateHnn,
    /// The Abels non-separability protocol.
    Abels,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Quotient => "quotient",
            Command::Filtration => "filtration",
            Command::Probe => "probe",
            Command::CharApprox => "char-approx",
            Command::Psd => "psd",
            Command::Gns => "gns",
            Command::Kernel => "kernel",
            Command::SeparateAmalgam => "separate-amalgam",
            Command::SeparateHnn => "separate-hnn",
            Command::Abels => "abels",
        }
    }

    fn defaults(self) -> Defaults {
        let d = Defaults::default();
        match self {
            Command::Quotient => Defaults { range: (2, 5), ..d },
            Command::Filtration | Command::Probe => Defaults { range: (2, 30), ..d },
            Command::CharApprox => Defaults { character: Some("1/3"), range: (1, 100), levels: 4, ..d },
            Command::Psd => Defaults { needs_seed: true, ..d },
            Command::Gns => Defaults { character: Some("1/3"), range: (3, 3), ..d },
            Command::Kernel => Defaults { character: Some("1/3"), range: (1, 100), needs_seed: true, ..d },
            Command::SeparateAmalgam => Defaults { epsilon: 0.5, needs_word: true, ..d },
            Command::SeparateHnn => Defaults { epsilon: 0.5, needs_word: true, needs_seed: true, ..d },
            Command::Abels => Defaults { group: "abels", range: (3, 99), cap: 300_000, dim_cap: 65_536, ..d },
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    let start = Instant::now();
    let cfg = ExperimentConfig::resolve(cli.command.name(), &cli.flags, cli.command.defaults())?;
    let mut outcome = match cli.command {
        Command::Quotient => commands::quotient(&cfg),
        Command::Filtration => commands::filtration(&cfg),
        Command::Probe => commands::probe(&cfg),
        Command::CharApprox => commands::char_approx(&cfg),
        Command::Psd => commands::psd(&cfg),
        Command::Gns => commands::gns(&cfg),
        Command::Kernel => commands::kernel(&cfg),
        Command::SeparateAmalgam => commands::separate_amalgam_cmd(&cfg),
        Command::SeparateHnn => commands::separate_hnn_cmd(&cfg),
        Command::Abels => commands::abels(&cfg),
    }?;
    let report = build_report(&cfg, &mut outcome, start);
    match &cfg.out {
        Some(dir) => {
            write_outputs(dir, &outcome.records, &report)?;
            for line in &outcome.summary {
                println!("{line}");
            }
            println!("status: {:?} (reports in {})", outcome.status, dir.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for r in &outcome.records {
                serde_json::to_writer(&mut stdout, r)?;
                writeln!(stdout)?;
            }
            for line in &outcome.summary {
                eprintln!("{line}");
            }
            eprintln!("status: {:?}", outcome.status);
        }
    }
    Ok(outcome.status.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<ConfigError>() { 64 } else { 1 })
        }
    }
}
