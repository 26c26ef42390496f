//! The `kcayley` command line. Every command writes one report (JSON by
//! default, CSV on request) and exits 0 on success, 1 when a check or a
//! cross-method comparison fails, and 2 on invalid input or a numerical
//! error.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use config::{Format, ModelArgs, RunConfig};
use report::{Inputs, Report, Table};

#[derive(Debug, Parser)]
#[command(name = "kcayley", version, about = "Cayley transforms, van Daele K-theory and bulk-boundary checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Bulk invariant of a chain, computed by independent methods.
    #[command(allow_negative_numbers = true)]
    Invariant(ModelArgs),
    /// Edge modes of the open chain and their signed counts.
    #[command(allow_negative_numbers = true)]
    Boundary(ModelArgs),
    /// Index pairing and product representative on the circle.
    #[command(allow_negative_numbers = true)]
    Product(ModelArgs),
    /// Band structure of a chain.
    #[command(allow_negative_numbers = true)]
    Bands(ModelArgs),
    /// Bulk against edge invariant over a parameter grid.
    #[command(allow_negative_numbers = true)]
    Sweep(ModelArgs),
    /// Run a named verification suite, or `all`.
    #[command(allow_negative_numbers = true)]
    Verify {
        /// One of the suite names, or `all`.
        suite: String,
        #[command(flatten)]
        args: ModelArgs,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Invariant(_) => "invariant",
            Command::Boundary(_) => "boundary",
            Command::Product(_) => "product",
            Command::Bands(_) => "bands",
            Command::Sweep(_) => "sweep",
            Command::Verify { .. } => "verify",
        }
    }

    fn args(&self) -> &ModelArgs {
        match self {
            Command::Invariant(a)
            | Command::Boundary(a)
            | Command::Product(a)
            | Command::Bands(a)
            | Command::Sweep(a)
            | Command::Verify { args: a, .. } => a,
        }
    }
}

/// The finished output of one invocation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub table: Table,
}

impl Outcome {
    pub fn render(&self) -> String {
        match self.report.inputs.config.format {
            Format::Json => self.report.to_json(),
            Format::Csv => self.table.to_csv(),
        }
    }
}

fn resolve(cmd: &Command, env_tol: Option<&str>) -> Result<RunConfig> {
    let args = cmd.args();
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Domain(format!("cannot read config {}: {e}", path.display())))?;
            config::parse_config_file(&text)?
        }
        None => BTreeMap::new(),
    };
    RunConfig::resolve(args, &file, env_tol)
}

/// Runs a parsed command. Input errors found before a configuration
/// exists are reported against the default configuration.
pub fn execute(cmd: &Command, env_tol: Option<&str>) -> Outcome {
    let suite = match cmd {
        Command::Verify { suite, .. } => Some(suite.clone()),
        _ => None,
    };
    let (cfg, early) = match resolve(cmd, env_tol) {
        Ok(cfg) => (cfg, None),
        Err(e) => {
            let blank = RunConfig::resolve(&ModelArgs::default(), &BTreeMap::new(), None).expect("defaults resolve");
            (blank, Some(e))
        }
    };
    let mut cfg = cfg;
    let mut report = Report::new(Inputs {
        command: cmd.name().to_string(),
        suite: suite.clone(),
        config: cfg.clone(),
    });
    if let Some(e) = early {
        report.fail(&e);
        return Outcome {
            report,
            table: Table::default(),
        };
    }
    let result = match cmd {
        Command::Invariant(_) => commands::invariant(&mut cfg, &mut report),
        Command::Boundary(_) => commands::boundary(&mut cfg, &mut report),
        Command::Product(_) => commands::product(&mut cfg, &mut report),
        Command::Bands(_) => commands::bands(&mut cfg, &mut report),
        Command::Sweep(_) => commands::sweep(&mut cfg, &mut report),
        Command::Verify { suite, .. } => commands::verify(suite, &mut cfg, &mut report),
    };
    // echo the defaults the command filled in
    report.inputs.config = cfg;
    let table = match result {
        Ok(t) => t,
        Err(e) => {
            report.fail(&e);
            Table::default()
        }
    };
    Outcome { report, table }
}

fn emit(outcome: &Outcome) -> std::io::Result<()> {
    let text = outcome.render();
    match &outcome.report.inputs.config.out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

/// What one invocation produced, for callers embedding the CLI.
#[derive(Debug, Clone)]
pub struct Captured {
    /// Rendered report, or usage text when parsing failed.
    pub text: String,
    pub exit_code: i32,
    pub error: Option<String>,
}

/// Parses and runs `args` (program name first) without touching stdout,
/// stderr or `--out`.
pub fn capture<I, T>(args: I) -> Captured
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => {
            let outcome = execute(&cli.command, None);
            Captured {
                text: outcome.render(),
                exit_code: outcome.report.exit_code(),
                error: outcome.report.status.error.as_ref().map(|e| e.message.clone()),
            }
        }
        Err(e) => {
            let usage = e.use_stderr();
            let text = e.render().to_string();
            Captured {
                error: usage.then(|| text.lines().next().unwrap_or("usage error").to_string()),
                exit_code: if usage { 2 } else { 0 },
                text,
            }
        }
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let env_tol = std::env::var("KCAYLEY_TOL").ok();
    let outcome = execute(&cli.command, env_tol.as_deref());
    if let Some(err) = &outcome.report.status.error {
        eprintln!("kcayley: {}", err.message);
    }
    if let Err(e) = emit(&outcome) {
        eprintln!("kcayley: cannot write report: {e}");
        return 2;
    }
    outcome.report.exit_code()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exec(args: &[&str]) -> Outcome {
        let mut full = vec!["kcayley"];
        full.extend_from_slice(args);
        let cli = Cli::try_parse_from(full).unwrap();
        execute(&cli.command, None)
    }

    #[test]
    fn ssh_winding_by_every_method() {
        let o = exec(&["invariant", "--model", "ssh", "--t1", "0.5", "--t2", "1.0"]);
        assert_eq!(o.report.exit_code(), 0, "{}", o.report.to_json());
        let w = &o.report.invariants["winding"];
        assert_eq!(w.value, Some(1));
        assert!(w.methods.len() >= 2);
        let o = exec(&["invariant", "--model", "ssh", "--t1", "1.0", "--t2", "0.5"]);
        assert_eq!(o.report.invariants["winding"].value, Some(0));
    }

    #[test]
    fn gapless_and_unknown_inputs_exit_2() {
        let o = exec(&["invariant", "--model", "ssh", "--t1", "1", "--t2", "1"]);
        assert_eq!(o.report.exit_code(), 2);
        assert_eq!(o.report.status.error.as_ref().unwrap().kind, "bulk_gapless");
        assert_eq!(exec(&["invariant", "--model", "graphene"]).report.exit_code(), 2);
        assert_eq!(exec(&["invariant"]).report.exit_code(), 2);
        assert_eq!(exec(&["invariant", "--model", "ssh", "--L", "100000"]).report.exit_code(), 2);
    }

    #[test]
    fn kitaev_majorana_number() {
        let o = exec(&["invariant", "--model", "kitaev", "--mu", "0.5", "--t", "1", "--delta", "1"]);
        assert_eq!(o.report.exit_code(), 0, "{}", o.report.to_json());
        assert_eq!(o.report.invariants["majorana_number"].value, Some(-1));
        let o = exec(&["invariant", "--model", "kitaev", "--mu", "-3", "--t", "1", "--delta", "1"]);
        assert_eq!(o.report.invariants["majorana_number"].value, Some(1));
    }

    #[test]
    fn csv_output_has_a_header() {
        let o = exec(&["bands", "--model", "ssh", "--N", "16", "--format", "csv"]);
        let text = o.render();
        assert!(text.starts_with("k,e0,e1,phase\n"));
        assert_eq!(text.lines().count(), 17);
    }

    #[test]
    fn help_exits_0_and_bad_flags_exit_2() {
        assert_eq!(run(["kcayley", "--help"]), 0);
        assert_eq!(run(["kcayley", "invariant", "--bogus"]), 2);
    }

    #[test]
    fn capture_matches_execute() {
        let c = capture(["kcayley", "invariant", "--model", "ssh"]);
        assert_eq!((c.exit_code, c.error), (0, None));
        assert_eq!(c.text, exec(&["invariant", "--model", "ssh"]).render());
        let c = capture(["kcayley", "nope"]);
        assert_eq!(c.exit_code, 2);
        assert!(c.error.is_some());
    }
}
