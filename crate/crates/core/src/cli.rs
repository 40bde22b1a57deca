//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or parse failure, 2 vector fails the unit
//! congruences, 3 verification mismatch.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds::{envelope_scan, DEFAULT_PRECISION_BITS, ENVELOPE_START};
use crate::closedform::{leading_order, ExponentTable};
use crate::cyclofield::Embedder;
use crate::error::Error;
use crate::qseries::oracle_c;
use crate::unitvec::{search_valid, ExponentVector, LevelSpec, ValidityReport, VectorFile};
use crate::{Cyc, Rational};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Check the unit congruences.
    Validate,
    /// c(n) from the closed formula.
    Compute,
    /// c(n) from the expanded Siegel product.
    Oracle,
    /// Closed formula against the product expansion, exactly.
    Compare,
    /// Growth-bound chain and envelope.
    Bounds,
    /// Valid vectors on the file's support.
    Search,
    /// Leading exponents α and β.
    Leading,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "modunit", version, about = "Product exponents of prime-power level modular units")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,

    /// Exponent vector JSON file.
    #[arg(long)]
    pub vector: PathBuf,

    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub nmax: u64,

    #[arg(long = "precision-bits", default_value_t = DEFAULT_PRECISION_BITS, value_parser = clap::value_parser!(u32).range(64..=4096))]
    pub precision_bits: u32,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Expected prime of the level, checked against the vector file.
    #[arg(long = "level-p")]
    pub level_p: Option<u64>,

    /// Expected exponent of the level, checked against the vector file.
    #[arg(long = "level-f")]
    pub level_f: Option<u32>,

    /// Entry bound for `search`.
    #[arg(long, default_value_t = 60)]
    pub bound: u64,

    /// Compute for vectors that fail the congruences.
    #[arg(long = "allow-invalid")]
    pub allow_invalid: bool,

    /// Adds 1 to the oracle value c(N) before comparing (fault injection).
    #[arg(long = "perturb-oracle", hide = true)]
    pub perturb_oracle: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Approx {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueRow {
    pub n: u64,
    pub coeffs: Vec<String>,
    pub approx: Approx,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValuesOutput {
    pub level: LevelSpec,
    pub method: String,
    pub nmax: u64,
    pub values: Vec<ValueRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidateOutput {
    pub level: LevelSpec,
    #[serde(flatten)]
    pub report: ValidityReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub n: u64,
    pub equal: bool,
    pub closed_form: Vec<String>,
    pub oracle: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareOutput {
    pub level: LevelSpec,
    pub nmax: u64,
    pub all_equal: bool,
    pub mismatches: Vec<u64>,
    pub rows: Vec<CompareRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub n: u64,
    pub abs_c: String,
    pub b1: String,
    pub b2: String,
    pub b3: Option<String>,
    pub chain_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsSummary {
    pub violations: Vec<u64>,
    pub chain_failures: Vec<u64>,
    pub max_ratio_n: Option<u64>,
    pub max_ratio: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsOutput {
    pub level: LevelSpec,
    pub nmax: u64,
    pub precision_bits: u32,
    pub rows: Vec<BoundRow>,
    pub summary: BoundsSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutput {
    pub level: LevelSpec,
    pub bound: u64,
    pub vectors: Vec<VectorFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeadingOutput {
    pub alpha: String,
    pub beta: String,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn io(message: impl Into<String>) -> Self {
        Failure { code: EXIT_IO, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidVector => EXIT_INVALID,
            _ => EXIT_IO,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Runs one command, writing the result to `out` (or `--out`) and any
/// diagnostics to `err`. Returns the process exit code.
pub fn run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cfg) {
        Ok((text, code)) => {
            let written = match &cfg.out {
                Some(path) => std::fs::write(path, &text).map_err(|e| e.to_string()),
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: cannot write output: {e}");
                return EXIT_IO;
            }
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load_vector(cfg: &RunConfig) -> Result<ExponentVector, Failure> {
    let text = std::fs::read_to_string(&cfg.vector)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", cfg.vector.display())))?;
    let v = VectorFile::parse(&text).map_err(|e| Failure::io(e.to_string()))?;
    let level = v.level();
    if cfg.level_p.is_some_and(|p| p != level.p()) || cfg.level_f.is_some_and(|f| f != level.f()) {
        return Err(Failure::io(format!(
            "level override (p={:?}, f={:?}) disagrees with the vector file (p={}, f={})",
            cfg.level_p,
            cfg.level_f,
            level.p(),
            level.f()
        )));
    }
    Ok(v)
}

fn require_valid(v: &ExponentVector, cfg: &RunConfig) -> Result<(), Failure> {
    if !cfg.allow_invalid && !v.is_valid() {
        return Err(Failure {
            code: EXIT_INVALID,
            message: format!("vector fails the unit congruences: {:?}", v.validate()),
        });
    }
    Ok(())
}

fn level_spec(v: &ExponentVector) -> LevelSpec {
    LevelSpec { p: v.level().p(), f: v.level().f() }
}

fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn execute(cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let v = load_vector(cfg)?;
    match cfg.command {
        Command::Validate => Ok(cmd_validate(&v, cfg)),
        Command::Compute => {
            require_valid(&v, cfg)?;
            let table = ExponentTable::<Rational>::compute(&v, cfg.nmax);
            Ok((render_values(&v, "closed_form", table.values(), cfg), EXIT_OK))
        }
        Command::Oracle => {
            require_valid(&v, cfg)?;
            let values = oracle_c(&v, cfg.nmax)?;
            Ok((render_values(&v, "oracle", &values, cfg), EXIT_OK))
        }
        Command::Compare => {
            require_valid(&v, cfg)?;
            cmd_compare(&v, cfg)
        }
        Command::Bounds => {
            require_valid(&v, cfg)?;
            cmd_bounds(&v, cfg)
        }
        Command::Search => cmd_search(&v, cfg),
        Command::Leading => {
            require_valid(&v, cfg)?;
            let (alpha, beta) = leading_order(&v);
            let out = LeadingOutput { alpha: alpha.to_string(), beta: beta.to_string() };
            let text = match cfg.format {
                Format::Json => to_json(&out),
                Format::Csv => format!("alpha,beta\n{},{}\n", out.alpha, out.beta),
            };
            Ok((text, EXIT_OK))
        }
    }
}

fn cmd_validate(v: &ExponentVector, cfg: &RunConfig) -> (String, i32) {
    let report = v.validate();
    let code = if report.valid { EXIT_OK } else { EXIT_INVALID };
    let text = match cfg.format {
        Format::Json => to_json(&ValidateOutput { level: level_spec(v), report }),
        Format::Csv => format!(
            "sum_r2,sum_s2,sum_rs,sum_m,valid\n{},{},{},{},{}\n",
            report.sum_r2, report.sum_s2, report.sum_rs, report.sum_m, report.valid
        ),
    };
    (text, code)
}

fn render_values(v: &ExponentVector, method: &str, values: &[Cyc], cfg: &RunConfig) -> String {
    let embedder = Embedder::new(v.level(), cfg.precision_bits);
    let rows: Vec<ValueRow> = values
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (re, im) = embedder.embed(c).to_f64();
            ValueRow { n: i as u64 + 1, coeffs: c.to_strings(), approx: Approx { re, im } }
        })
        .collect();
    match cfg.format {
        Format::Json => to_json(&ValuesOutput {
            level: level_spec(v),
            method: method.to_string(),
            nmax: values.len() as u64,
            values: rows,
        }),
        Format::Csv => {
            let mut s = String::from("n,coeffs,re,im\n");
            for r in rows {
                let _ = writeln!(s, "{},{},{:?},{:?}", r.n, r.coeffs.join(";"), r.approx.re, r.approx.im);
            }
            s
        }
    }
}

fn cmd_compare(v: &ExponentVector, cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let table = ExponentTable::<Rational>::compute(v, cfg.nmax);
    let mut oracle = oracle_c(v, cfg.nmax)?;
    if let Some(n) = cfg.perturb_oracle {
        let slot = n
            .checked_sub(1)
            .and_then(|i| oracle.get_mut(i as usize))
            .ok_or_else(|| Failure::io(format!("perturbation index {n} outside 1..={}", cfg.nmax)))?;
        *slot = &*slot + &Cyc::one(v.level());
    }
    let rows: Vec<CompareRow> = table
        .values()
        .iter()
        .zip(&oracle)
        .enumerate()
        .map(|(i, (a, b))| CompareRow {
            n: i as u64 + 1,
            equal: a == b,
            closed_form: a.to_strings(),
            oracle: b.to_strings(),
        })
        .collect();
    let mismatches: Vec<u64> = rows.iter().filter(|r| !r.equal).map(|r| r.n).collect();
    let all_equal = mismatches.is_empty();
    let code = if all_equal { EXIT_OK } else { EXIT_MISMATCH };
    let text = match cfg.format {
        Format::Json => to_json(&CompareOutput {
            level: level_spec(v),
            nmax: cfg.nmax,
            all_equal,
            mismatches,
            rows,
        }),
        Format::Csv => {
            let mut s = String::from("n,equal,closed_form,oracle\n");
            for r in rows {
                let _ = writeln!(s, "{},{},{},{}", r.n, r.equal, r.closed_form.join(";"), r.oracle.join(";"));
            }
            s
        }
    };
    Ok((text, code))
}

fn cmd_bounds(v: &ExponentVector, cfg: &RunConfig) -> Result<(String, i32), Failure> {
    if cfg.nmax < ENVELOPE_START {
        return Err(Failure::io(format!("bounds needs --nmax >= {ENVELOPE_START}")));
    }
    let scan = envelope_scan(v, cfg.nmax, cfg.precision_bits)?;
    let digits = 30;
    let rows: Vec<BoundRow> = scan
        .reports
        .iter()
        .map(|r| BoundRow {
            n: r.n,
            abs_c: r.abs_c.to_decimal(digits),
            b1: r.b1.to_decimal(digits),
            b2: r.b2.to_string(),
            b3: r.b3.as_ref().map(|b| b.to_decimal(digits)),
            chain_ok: r.chain_ok,
        })
        .collect();
    let s = scan.summary();
    let code = if s.violations.is_empty() && s.chain_failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    };
    let text = match cfg.format {
        Format::Json => to_json(&BoundsOutput {
            level: level_spec(v),
            nmax: cfg.nmax,
            precision_bits: cfg.precision_bits,
            rows,
            summary: BoundsSummary {
                violations: s.violations,
                chain_failures: s.chain_failures,
                max_ratio_n: s.max_ratio_n,
                max_ratio: s.max_ratio,
            },
        }),
        Format::Csv => {
            let mut out = String::from("n,abs_c,b1,b2,b3,chain_ok\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.n,
                    r.abs_c,
                    r.b1,
                    r.b2,
                    r.b3.unwrap_or_default(),
                    r.chain_ok
                );
            }
            out
        }
    };
    Ok((text, code))
}

fn cmd_search(v: &ExponentVector, cfg: &RunConfig) -> Result<(String, i32), Failure> {
    let support: Vec<_> = v.entries().keys().copied().collect();
    let found = search_valid(v.level(), &support, cfg.bound)?;
    let vectors: Vec<VectorFile> = found.iter().map(VectorFile::from_vector).collect();
    let text = match cfg.format {
        Format::Json => to_json(&SearchOutput { level: level_spec(v), bound: cfg.bound, vectors }),
        Format::Csv => {
            let mut s = String::from("index,r,s,m\n");
            for (i, f) in vectors.iter().enumerate() {
                for e in &f.entries {
                    let _ = writeln!(s, "{i},{},{},{}", e.r, e.s, e.m);
                }
            }
            s
        }
    };
    Ok((text, EXIT_OK))
}
