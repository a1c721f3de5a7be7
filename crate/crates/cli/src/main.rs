mod args;
mod commands;
mod failure;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use failure::Failure;
use output::{manifest_path, sha256_hex, strip_globals, write_atomic, FileHash, RunManifest};

fn run(cli: &Cli, raw: &[String]) -> Result<(), Failure> {
    if let Command::Replay(r) = &cli.command {
        println!("{}", commands::replay(&r.path)?);
        return Ok(());
    }
    let p = commands::produce(cli)?;
    match &cli.out {
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(&p.bytes).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(Failure::Io(e.to_string())),
                _ => {}
            }
        }
        Some(path) => {
            write_atomic(path, &p.bytes)?;
            let m = RunManifest {
                kind: "run".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: cli.command.name().into(),
                args: strip_globals(&raw[1..]),
                seed: cli.seed,
                precision_bits: cli.precision_bits,
                inputs: p.inputs,
                output: FileHash { path: path.display().to_string(), sha256: sha256_hex(&p.bytes) },
            };
            let mut json = serde_json::to_string_pretty(&m)?;
            json.push('\n');
            write_atomic(&manifest_path(path), json.as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&raw) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let f = Failure::input(e.to_string().trim().to_string());
            eprintln!("{}", f.to_json());
            return ExitCode::from(f.exit_code() as u8);
        }
    };
    match run(&cli, &raw) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
