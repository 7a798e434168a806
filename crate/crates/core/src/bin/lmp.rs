use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lmp::bounds::{truncation_threshold, BoundContext, DEFAULT_RHO};
use lmp::bt_orbital::orbital_oracle;
use lmp::fields::{field_invariants, Signature};
use lmp::io_cli::{error_exit_code, field_reports, ingest_field_table, run_scan, write_csv, ScanConfig};
use lmp::lattices::{check_point_count_bounds, count_ball, first_minimum, IdealLattice};
use lmp::lfun::DEFAULT_TOL;
use lmp::sigma::{d0_threshold, sigma0_set};
use lmp::volumes::volume_pack;
use lmp::{BoundReport, GroupKind, Result};

#[derive(Parser)]
#[command(name = "lmp", version, about = "Explicit trace-formula bounds for SL2/GL2 over quadratic fields")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    #[arg(long, global = true, default_value = "SL2")]
    group: GroupKind,
    #[arg(long, global = true, default_value = "imaginary")]
    signature: Signature,
    #[arg(long, global = true, default_value_t = DEFAULT_RHO)]
    rho: f64,
    #[arg(long, global = true, default_value_t = 5.0)]
    radius: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Output directory (scan) or file (other commands).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Every check over a range of fundamental discriminants.
    Scan {
        #[arg(long, allow_hyphen_values = true, default_value_t = -1000)]
        dmin: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -3)]
        dmax: i64,
        /// JSON-lines table of quartic fields for the elliptic terms.
        #[arg(long)]
        quartics: Option<PathBuf>,
    },
    /// Invariants, volumes and arithmetic cross-checks of one field.
    Field {
        #[arg(allow_hyphen_values = true)]
        d: i64,
    },
    /// Fixed-vertex counts against the closed form.
    Orbital {
        p: u64,
        d: u32,
        #[arg(long)]
        ramified: bool,
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
    /// First minimum and ball counts of the ring of integers.
    Lattice {
        #[arg(allow_hyphen_values = true)]
        d: i64,
        r: f64,
    },
    /// The finite set of characteristic polynomials for a radius.
    Sigma0 { r: f64 },
    /// The per-field bound reports at the least regular truncation.
    Bounds {
        #[arg(allow_hyphen_values = true)]
        d: i64,
    },
    /// Validate a JSON-lines field table.
    Ingest { path: PathBuf },
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn reports_exit(reports: &[BoundReport]) -> i32 {
    i32::from(reports.iter().any(BoundReport::is_failure))
}

fn csv_string(reports: &[BoundReport]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(reports, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

fn run(cli: Cli) -> Result<i32> {
    let o = cli.opts;
    match cli.cmd {
        Cmd::Scan { dmin, dmax, quartics } => {
            let mut cfg = ScanConfig::new(o.group, o.signature, dmin, dmax);
            cfg.radius = o.radius;
            cfg.rho = o.rho;
            cfg.tol = o.tol;
            cfg.jobs = o.jobs;
            cfg.out = o.out.clone();
            if let Some(q) = quartics {
                cfg.quartics = ingest_field_table(q)?.quartics();
            }
            let outcome = run_scan(&cfg)?;
            if o.out.is_none() {
                outcome.write_csv(std::io::stdout().lock())?;
            }
            let s = &outcome.summary;
            eprintln!("{} fields, {} reports, {} failures", s.fields, outcome.reports.len(), s.failures);
            Ok(outcome.exit_code())
        }
        Cmd::Field { d } => {
            let inv = field_invariants(d)?;
            let vols = volume_pack(o.group, &inv)?;
            let reports = lmp::io_cli::invariant_checks(&inv, o.tol)?;
            let v = serde_json::json!({ "invariants": inv, "volumes": vols, "reports": reports });
            emit(&(serde_json::to_string_pretty(&v)? + "\n"), &o.out)?;
            Ok(reports_exit(&reports))
        }
        Cmd::Orbital { p, d, ramified, samples } => {
            let reports = orbital_oracle(p, d, ramified, samples)?;
            emit(&csv_string(&reports)?, &o.out)?;
            Ok(reports_exit(&reports))
        }
        Cmd::Lattice { d, r } => {
            field_invariants(d)?;
            let lat = IdealLattice::ring_of_integers(d, 1.0);
            let reports = check_point_count_bounds(&lat, r)?;
            let v = serde_json::json!({
                "disc": d,
                "first_minimum": first_minimum(&lat)?,
                "count": count_ball(&lat, r),
                "reports": reports,
            });
            emit(&(serde_json::to_string_pretty(&v)? + "\n"), &o.out)?;
            Ok(reports_exit(&reports))
        }
        Cmd::Sigma0 { r } => {
            let set = sigma0_set(r, o.group, o.signature)?;
            let mut text = format!("# {} classes, D0 = {}\n", set.len(), d0_threshold(r));
            for p in &set {
                text.push_str(&format!("{p}\n"));
            }
            emit(&text, &o.out)?;
            Ok(0)
        }
        Cmd::Bounds { d } => {
            let inv = field_invariants(d)?;
            let mut cfg = ScanConfig::new(o.group, inv.signature, d, d);
            cfg.radius = o.radius;
            cfg.rho = o.rho;
            cfg.tol = o.tol;
            cfg.validate()?;
            let ctx = BoundContext::new(o.group, inv.signature, o.radius)?;
            let (reports, terms) = field_reports(&inv, &cfg, &ctx)?;
            let t = truncation_threshold(&inv, o.rho)?;
            eprintln!("varpi(T) = {}, geometric total = {}", t.varpi, terms.total());
            emit(&csv_string(&reports)?, &o.out)?;
            Ok(reports_exit(&reports))
        }
        Cmd::Ingest { path } => {
            let rep = ingest_field_table(path)?;
            for w in &rep.warnings {
                eprintln!("warning: {w}");
            }
            for r in &rep.rejected {
                eprintln!("rejected line {} ({}): {}", r.line, r.label, r.reason);
            }
            emit(&(serde_json::to_string_pretty(&rep)? + "\n"), &o.out)?;
            Ok(i32::from(!rep.rejected.is_empty()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}

