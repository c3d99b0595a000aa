//! Command-line front end. Reports go to standard output (or `--out`) as
//! JSON or CSV; a one-line summary goes to standard error.
//!
//! Exit codes: 0 when every checked assertion holds, 1 when one fails,
//! 2 for usage and scope errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::arith::Prime;
use crate::companion::companion_report;
use crate::eis_lambda::specialize_and_compare;
use crate::forms::{miller_basis, sturm};
use crate::hecke::{hecke_report, HeckeReport, TpRedundancy};
use crate::qseries::Modulus;
use crate::scan::scan_range;
use crate::structure::{verify_with_override, LocalAlgebra, StructureReport};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "eisgor", version, about = "Mod-p modular forms of level one and Eisenstein-local Hecke algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Weight {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub k: u64,
    /// Number of q-coefficients; never below the sound bound.
    #[arg(long)]
    pub prec: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Echelon basis of M_k over Z/p^M.
    Basis {
        #[command(flatten)]
        w: Weight,
        /// p-adic digits M.
        #[arg(long, default_value_t = 1)]
        digits: u32,
    },
    /// Hecke algebra, duality, ordinary part, Eisenstein-local dimension.
    Hecke {
        #[command(flatten)]
        w: Weight,
    },
    /// Companion dimensions c(m), c(m') at (k, p+1-k).
    Companion {
        #[command(flatten)]
        w: Weight,
    },
    /// Gorenstein and principality checks on the Eisenstein-local algebras.
    Structure {
        #[command(flatten)]
        w: Weight,
        /// Replace the full local algebra by a non-Gorenstein fixture.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Irregular indices and Bernoulli pairs over a range of primes.
    Scan {
        /// Inclusive range such as 5..4001.
        range: String,
        #[arg(long, default_value_t = 1)]
        shards: usize,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Specialize E(ω^d, 1) at γ^d - 1 and compare with the p-deprived series.
    Specialize {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
        /// Number of q-coefficients.
        #[arg(long, default_value_t = 30)]
        prec: usize,
        /// p-adic digits M.
        #[arg(long, default_value_t = 3)]
        digits: u32,
        /// Truncation degree in T; defaults to the digit count.
        #[arg(long)]
        trunc: Option<usize>,
    },
    /// A quick run of every suite on small inputs.
    Selftest,
}

/// What a command produced and whether its assertions held.
pub struct Outcome {
    pub body: String,
    pub summary: String,
    pub ok: bool,
}

fn usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidPrime(_)
            | Error::InvalidWeight { .. }
            | Error::OutOfRange { .. }
            | Error::NonInvertible { .. }
            | Error::PrecisionUnderflow { .. }
            | Error::CorruptCheckpoint { .. }
            | Error::Io(_)
    )
}

/// Runs the parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(&cli) {
        Ok(out) => {
            eprintln!("{}", out.summary);
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &out.body).map_err(Error::from),
                None => {
                    println!("{}", out.body.trim_end());
                    Ok(())
                }
            };
            match written {
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
                Ok(()) if out.ok => 0,
                Ok(()) => 1,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if usage_error(&e) {
                2
            } else {
                1
            }
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable report")
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

fn parse_range(s: &str) -> Result<(u64, u64)> {
    let bad = || Error::OutOfRange { k: 0, lo: 0, hi: 0 };
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let lo: u64 = a.trim().parse().map_err(|_| bad())?;
    let hi: u64 = b.trim().parse().map_err(|_| bad())?;
    if hi < lo {
        return Err(Error::OutOfRange {
            k: hi as i64,
            lo: lo as i64,
            hi: lo as i64,
        });
    }
    Ok((lo, hi))
}

fn hecke_ok(r: &HeckeReport) -> bool {
    r.commutative
        && r.excludes_constants
        && (!r.duality_perfect_expected || r.duality_perfect)
        && r.tp_redundant != TpRedundancy::NotRedundant
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let format = cli.format;
    match &cli.command {
        Command::Basis { w, digits } => {
            let p = Prime::new(w.p)?;
            let modulus = Modulus::new(p, *digits)?;
            let precision = w.prec.map_or(sturm(w.k) + 10, |d| d.max(sturm(w.k)));
            let space = miller_basis(w.k, precision, modulus)?;
            let body = match format {
                Format::Json => serde_json::to_string_pretty(&space.to_json()).expect("json"),
                Format::Csv => {
                    let header: Vec<String> = (0..precision).map(|n| format!("a{n}")).collect();
                    let header: Vec<&str> = header.iter().map(String::as_str).collect();
                    let rows: Vec<Vec<String>> = space
                        .rows()
                        .iter()
                        .map(|r| r.coeffs().iter().map(u64::to_string).collect())
                        .collect();
                    csv_table(&header, &rows)?
                }
            };
            Ok(Outcome {
                body,
                summary: format!("p={} k={} dim={} precision={precision}", w.p, w.k, space.dim()),
                ok: true,
            })
        }
        Command::Hecke { w } => {
            let r = hecke_report(Prime::new(w.p)?, w.k)?;
            let ok = hecke_ok(&r);
            let body = match format {
                Format::Json => json(&r),
                Format::Csv => csv_table(
                    &["p", "k", "dim", "eis_local_dim", "ordinary_dim", "duality_rank", "tp_redundant"],
                    &[vec![
                        r.p.to_string(),
                        r.k.to_string(),
                        r.dim.to_string(),
                        r.eis_local_dim.to_string(),
                        r.ordinary_dim.to_string(),
                        r.duality_rank.to_string(),
                        format!("{:?}", r.tp_redundant),
                    ]],
                )?,
            };
            Ok(Outcome {
                summary: format!(
                    "p={} k={} dim={} eis_local_dim={} duality_rank={}",
                    r.p, r.k, r.dim, r.eis_local_dim, r.duality_rank
                ),
                body,
                ok,
            })
        }
        Command::Companion { w } => {
            let r = companion_report(Prime::new(w.p)?, w.k, w.prec)?;
            let body = match format {
                Format::Json => json(&r),
                Format::Csv => {
                    let mut rows = Vec::new();
                    for (side, ws) in [("m", &r.witnesses_m), ("m_prime", &r.witnesses_m_prime)] {
                        for wit in ws.iter() {
                            rows.push(vec![
                                side.to_string(),
                                wit.f.iter().map(u64::to_string).collect::<Vec<_>>().join(";"),
                                wit.g.iter().map(u64::to_string).collect::<Vec<_>>().join(";"),
                            ]);
                        }
                    }
                    csv_table(&["side", "f", "g"], &rows)?
                }
            };
            Ok(Outcome {
                summary: format!("p={} k={} k'={} c(m)={} c(m')={}", r.p, r.k, r.k_prime, r.c_m, r.c_m_prime),
                ok: r.all_hold(),
                body,
            })
        }
        Command::Structure { w, inject_fault } => {
            let p = Prime::new(w.p)?;
            let fixture = inject_fault.then(|| LocalAlgebra::socle_two_fixture(p.get()));
            let r = verify_with_override(p, w.k, fixture)?;
            let body = match format {
                Format::Json => json(&r),
                Format::Csv => csv_table(StructureReport::csv_header(), &[r.csv_row()])?,
            };
            for f in &r.failures {
                eprintln!("assertion failed: {f}");
            }
            Ok(Outcome {
                summary: format!(
                    "p={} k={} gor_H={} min_gens={} verdict={:?}",
                    r.p, r.k, r.gorenstein_full, r.eis_ideal_min_gens, r.verdict
                ),
                ok: r.assertions_hold(),
                body,
            })
        }
        Command::Scan {
            range,
            shards,
            checkpoint,
        } => {
            let (lo, hi) = parse_range(range)?;
            let r = scan_range(lo, hi, *shards, checkpoint.as_deref())?;
            let body = match format {
                Format::Json => json(&r),
                Format::Csv => r.to_csv()?,
            };
            Ok(Outcome {
                summary: format!(
                    "primes={} irregular={} pair_hits={} half_index_ok={}",
                    r.primes_processed,
                    r.records.iter().filter(|x| !x.irregular_indices.is_empty()).count(),
                    r.total_pair_hits,
                    r.half_index_all_ok()
                ),
                ok: r.total_pair_hits == 0 && r.half_index_all_ok(),
                body,
            })
        }
        Command::Specialize {
            p,
            d,
            prec,
            digits,
            trunc,
        } => {
            let r = specialize_and_compare(Prime::new(*p)?, *d, *prec, trunc.unwrap_or(*digits as usize), *digits)?;
            let body = match format {
                Format::Json => json(&r),
                Format::Csv => csv_table(
                    &["p", "d", "digits_compared", "mismatches", "constant_status"],
                    &[vec![
                        r.p.to_string(),
                        r.d.to_string(),
                        r.digits_compared.to_string(),
                        r.mismatches.iter().map(u64::to_string).collect::<Vec<_>>().join(";"),
                        format!("{:?}", r.constant_status),
                    ]],
                )?,
            };
            Ok(Outcome {
                summary: format!(
                    "p={} d={} mismatches={} constant={:?}",
                    r.p,
                    r.d,
                    r.mismatches.len(),
                    r.constant_status
                ),
                ok: r.all_match(),
                body,
            })
        }
        Command::Selftest => selftest(),
    }
}

fn selftest() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut check = |name: &str, pass: bool| {
        ok &= pass;
        lines.push(serde_json::json!({ "check": name, "pass": pass }));
    };
    let scan = scan_range(5, 200, 2, None)?;
    check("scan 5..200 has no pairs", scan.total_pair_hits == 0 && scan.half_index_all_ok());
    let p37 = Prime::new(37)?;
    check("companion (37, 32)", companion_report(p37, 32, None)?.all_hold());
    check("structure (37, 32)", verify_with_override(p37, 32, None)?.assertions_hold());
    check(
        "structure fault fixture is flagged",
        !verify_with_override(p37, 32, Some(LocalAlgebra::socle_two_fixture(37)))?.assertions_hold(),
    );
    check("hecke (11, 12)", hecke_ok(&hecke_report(Prime::new(11)?, 12)?));
    check("specialize (7, 2)", specialize_and_compare(Prime::new(7)?, 2, 30, 3, 3)?.all_match());
    let passed = lines.iter().filter(|l| l["pass"] == true).count();
    Ok(Outcome {
        summary: format!("selftest: {passed}/{} checks passed", lines.len()),
        body: json(&lines),
        ok,
    })
}
