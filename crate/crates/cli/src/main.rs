//! charvar: exact computations of character-variety invariants.
//!
//! Subcommands: `hlrv` (HLRV function, grid, specializations, motive sum),
//! `cells` (cell decomposition of a very generic spec), `walks` (walks of a
//! positive braid word), `macdonald` (Kostka tables), `check` (property
//! suite). Exit codes: 0 success, 2 a conjecture-shaped validation failed,
//! 1 usage or internal error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use charvar_core::braid::{enumerate_walks, BraidWord, Walk};
use charvar_core::charvar::{
    cell_decomposition, cross_check_epoly, hlrv, motive_sum, specialize,
    CharVarError, CharVarSpec, Specialization,
};
use charvar_core::exact::VarSet;
use charvar_core::macdonald::MacdonaldTable;
use charvar_core::partitions::{partitions_of, Partition};

mod checks;

#[derive(Parser)]
#[command(name = "charvar", version, about = "Exact character-variety invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CommonOpts {
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Directory for the Macdonald cache (also CHARVAR_CACHE_DIR).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Number of worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// HLRV function of a type: grid, specializations, motive sum.
    Hlrv {
        #[command(flatten)]
        common: CommonOpts,
        /// Genus.
        #[arg(long, default_value_t = 0)]
        g: u32,
        /// Punctures: semicolon-separated partitions, comma-separated parts,
        /// e.g. "1,1;1,1;1,1;1,1".
        #[arg(long)]
        mu: String,
        /// Truncation override (defaults to the common weight n).
        #[arg(long)]
        truncation: Option<u32>,
    },
    /// Cell decomposition of a very generic spec.
    Cells {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = 0)]
        g: u32,
        #[arg(long)]
        mu: String,
    },
    /// Walks of a positive braid word (letters in walk order).
    Walks {
        #[command(flatten)]
        common: CommonOpts,
        /// Comma-separated generator indices, e.g. "1,1,1,1".
        #[arg(long)]
        word: String,
    },
    /// Kostka tables: Schur expansions of the modified Macdonald functions.
    Macdonald {
        #[command(flatten)]
        common: CommonOpts,
        /// Largest weight to tabulate.
        #[arg(long)]
        n: u32,
    },
    /// Run the bundled property suite.
    Check {
        #[command(flatten)]
        common: CommonOpts,
        /// Seed for the randomized checks.
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Hlrv { common, g, mu, truncation } => {
            setup(&common)?;
            cmd_hlrv(&common, g, &mu, truncation)
        }
        Command::Cells { common, g, mu } => {
            setup(&common)?;
            cmd_cells(&common, g, &mu)
        }
        Command::Walks { common, word } => {
            setup(&common)?;
            cmd_walks(&common, &word)
        }
        Command::Macdonald { common, n } => {
            setup(&common)?;
            cmd_macdonald(&common, n)
        }
        Command::Check { common, seed } => {
            setup(&common)?;
            checks::cmd_check(common.format == Format::Json, seed)
        }
    }
}

fn setup(common: &CommonOpts) -> Result<()> {
    if common.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(common.jobs)
            .build_global()
            .context("thread pool already initialized")?;
    }
    Ok(())
}

fn cache_dir(common: &CommonOpts) -> Option<PathBuf> {
    common
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("CHARVAR_CACHE_DIR").map(PathBuf::from))
}

fn table(common: &CommonOpts) -> MacdonaldTable {
    MacdonaldTable::with_cache(cache_dir(common))
}

fn drain_warnings(table: &MacdonaldTable) {
    for w in table.take_warnings() {
        eprintln!("warning: {w}");
    }
}

/// Parse the mu grammar: semicolon-separated punctures, comma-separated
/// parts, each partition weakly decreasing.
fn parse_mu(s: &str) -> Result<Vec<Partition>> {
    let mut out = Vec::new();
    for (idx, chunk) in s.split(';').enumerate() {
        let parts: Result<Vec<u32>> = chunk
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| anyhow!("bad part `{p}` in puncture {}", idx + 1))
            })
            .collect();
        let parts = parts?;
        if parts.is_empty() || parts.iter().any(|&p| p == 0) {
            bail!("puncture {} must have positive parts", idx + 1);
        }
        if !parts.windows(2).all(|w| w[0] >= w[1]) {
            bail!(
                "puncture {} must be weakly decreasing: {:?}",
                idx + 1,
                parts
            );
        }
        out.push(Partition::new(parts));
    }
    Ok(out)
}

fn parse_spec(g: u32, mu: &str) -> Result<CharVarSpec> {
    let mu = parse_mu(mu)?;
    CharVarSpec::new(g, mu).map_err(|e| anyhow!("invalid spec: {e}"))
}

fn big_to_json(v: &BigInt) -> Value {
    match v.to_u64() {
        Some(u) => json!(u),
        None => json!(v.to_string()),
    }
}

fn spec_json(spec: &CharVarSpec) -> Value {
    json!({
        "g": spec.g,
        "k": spec.k(),
        "mu": spec.mu,
    })
}

fn cmd_hlrv(common: &CommonOpts, g: u32, mu: &str, truncation: Option<u32>) -> Result<ExitCode> {
    let spec = parse_spec(g, mu)?;
    if spec.g >= 1 && spec.n() * spec.g >= 8 {
        bail!(
            "n*g = {} is too large for exact evaluation; this tool caps n*g < 8",
            spec.n() * spec.g
        );
    }
    let table = table(common);
    let report = hlrv(&spec, &table, truncation).map_err(|e| anyhow!("{e}"))?;
    drain_warnings(&table);
    let d = spec.dimension();
    match &report.outcome {
        Ok(grid) => {
            let weight = specialize(grid, Specialization::Weight);
            let epoly = specialize(grid, Specialization::EPoly);
            let pure = specialize(grid, Specialization::Pure);
            let poincare = specialize(grid, Specialization::Poincare);
            let motive = motive_sum(grid);
            let duality = grid.duality_check();
            let minus_z: String = {
                // Reassemble H(-z,w) from the grid for display.
                let zw = VarSet::zw();
                let mut p = charvar_core::exact::MPoly::zero(&zw);
                for (&(i, j), c) in &grid.c {
                    p = p.add(&charvar_core::exact::MPoly::from_terms(
                        &zw,
                        [(vec![i, j], c.clone())],
                    ));
                }
                p.to_string()
            };
            if common.format == Format::Json {
                let out = json!({
                    "spec": spec_json(&spec),
                    "d": d,
                    "truncation": report.truncation,
                    "hlrv_zw": report.hlrv_zw.to_string(),
                    "hlrv_minus_z": minus_z,
                    "grid": grid.c.iter().map(|(&(i, j), c)| json!([i, j, big_to_json(c)])).collect::<Vec<_>>(),
                    "weight_poly": weight.to_string(),
                    "e_poly": epoly.to_string(),
                    "pure_poly": pure.to_string(),
                    "poincare_poly": poincare.to_string(),
                    "motive": motive.terms.iter().map(|(&(a, b), m)| json!([a, b, big_to_json(m)])).collect::<Vec<_>>(),
                    "duality": duality,
                });
                println!("{}", serde_json::to_string_pretty(&out)?);
            } else {
                println!("spec      : {spec}  (n = {}, k = {})", spec.n(), spec.k());
                println!("d         : {d}");
                println!("H(z,w)    : {}", report.hlrv_zw);
                println!("H(-z,w)   : {minus_z}");
                print!("grid      :");
                for (&(i, j), c) in &grid.c {
                    print!(" c[{i},{j}]={c}");
                }
                println!();
                println!("W(q,t)    : {weight}   (conjectural)");
                println!("E(q)      : {epoly}");
                println!("pure      : {pure}");
                println!("Poincare  : {poincare}");
                println!("motive    : {motive}");
                println!(
                    "duality   : {}",
                    if duality { "ok (c_ij = c_ji)" } else { "FAILED" }
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(violation) => {
            if common.format == Format::Json {
                let out = json!({
                    "spec": spec_json(&spec),
                    "d": d,
                    "truncation": report.truncation,
                    "hlrv_zw": report.hlrv_zw.to_string(),
                    "validation_failure": violation.to_string(),
                });
                println!("{}", serde_json::to_string_pretty(&out)?);
            } else {
                println!("spec      : {spec}  (n = {}, k = {})", spec.n(), spec.k());
                println!("d         : {d}");
                println!("H(z,w)    : {}", report.hlrv_zw);
                println!("validation: FAILED  {violation}");
            }
            Ok(ExitCode::from(2))
        }
    }
}

fn walk_pattern(walk: &Walk) -> String {
    (1..=walk.len()).map(|m| walk.class_of(m)).collect()
}

fn walk_json(walk: &Walk) -> Value {
    json!({
        "states": walk.states.iter().map(|p| p.one_line()).collect::<Vec<_>>(),
        "up": walk.up,
        "stay": walk.stay,
        "down": walk.down,
    })
}

fn cmd_cells(common: &CommonOpts, g: u32, mu: &str) -> Result<ExitCode> {
    let spec = parse_spec(g, mu)?;
    // Strata: W^{2g} x minimal coset representatives per puncture. The walk
    // search is exponential in the word length, so bound both the stratum
    // count and the longest possible shape word.
    let n = spec.n() as u128;
    let fact = |m: u128| (1..=m).product::<u128>();
    let mut strata: u128 = fact(n).pow(2 * g);
    let w0_len = n * (n - 1) / 2;
    let mut max_word = 2 * 2 * (g as u128) * w0_len;
    for mu_i in &spec.mu[..spec.k() - 1] {
        let block: u128 = mu_i.parts().iter().map(|&p| fact(p as u128)).product();
        strata = strata.saturating_mul(fact(n) / block);
        let block_len: u128 = mu_i
            .parts()
            .iter()
            .map(|&p| (p as u128) * (p as u128 - 1) / 2)
            .sum();
        max_word += 2 * (w0_len - block_len);
    }
    if strata > 20_000 || max_word > 12 {
        bail!(
            "this spec needs up to {strata} Bruhat strata with shape words of \
length up to {max_word}; enumeration is capped at 20000 strata and length 12"
        );
    }
    let cells = match cell_decomposition(&spec) {
        Ok(c) => c,
        Err(CharVarError::NotVeryGeneric) => bail!(
            "spec is not very generic: the last conjugacy class must be regular \
             semisimple, i.e. the last partition must be (1^n)"
        ),
        Err(e) => return Err(anyhow!("{e}")),
    };
    let table = table(common);
    let check = cross_check_epoly(&spec, &table).map_err(|e| anyhow!("{e}"))?;
    drain_warnings(&table);
    if common.format == Format::Json {
        let out = json!({
            "spec": spec_json(&spec),
            "d": spec.dimension(),
            "cells": cells.cells.iter().map(|c| json!({
                "wvec": {
                    "taus": c.wvec.taus.iter().map(|p| p.one_line()).collect::<Vec<_>>(),
                    "wdots": c.wvec.wdots.iter().map(|p| p.one_line()).collect::<Vec<_>>(),
                },
                "word": c.word.letters(),
                "walk": walk_json(&c.walk),
                "a_bar": c.a_bar,
                "b_bar": c.b_bar,
            })).collect::<Vec<_>>(),
            "f": cells.f,
            "summary": cells.summary(),
            "cross_check": {
                "cell_side": check.cell_side.to_string(),
                "hlrv_side": check.hlrv_side.to_string(),
                "agree": check.agree,
            },
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!("spec    : {spec}  (d = {})", spec.dimension());
        println!("cells   : {} in admissible order", cells.cells.len());
        for (idx, c) in cells.cells.iter().enumerate() {
            let taus: Vec<String> = c.wvec.taus.iter().map(|p| p.to_string()).collect();
            let wdots: Vec<String> = c.wvec.wdots.iter().map(|p| p.to_string()).collect();
            println!(
                "  #{:<3} taus=({}) ws=({}) pattern={} S={:?} a={} b={}",
                idx + 1,
                taus.join(","),
                wdots.join(","),
                walk_pattern(&c.walk),
                c.walk.stay,
                c.a_bar,
                c.b_bar
            );
        }
        println!("f       : {:?}", cells.f);
        println!("summary : {}", cells.summary());
        println!(
            "E-check : cells {} vs grid {} -> {}",
            check.cell_side,
            check.hlrv_side,
            if check.agree { "ok" } else { "MISMATCH" }
        );
    }
    Ok(if check.agree {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_walks(common: &CommonOpts, word: &str) -> Result<ExitCode> {
    let letters: Result<Vec<usize>> = word
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| anyhow!("bad letter `{p}`"))
        })
        .collect();
    let letters = letters?;
    if letters.is_empty() {
        bail!("the word must have at least one letter");
    }
    let n = letters.iter().max().unwrap() + 1;
    let braid = BraidWord::new(n, letters);
    let walks = enumerate_walks(&braid);
    if common.format == Format::Json {
        let out = json!({
            "n": n,
            "word": braid.letters(),
            "walks": walks.iter().map(walk_json).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!("word  : {:?} on {n} strands", braid.letters());
        println!("walks : {}", walks.len());
        for (idx, w) in walks.iter().enumerate() {
            let states: Vec<String> = w.states.iter().map(|p| p.to_string()).collect();
            println!(
                "  #{:<3} {}  pattern={} U={:?} S={:?} D={:?}",
                idx + 1,
                states.join(" "),
                walk_pattern(w),
                w.up,
                w.stay,
                w.down
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_macdonald(common: &CommonOpts, n: u32) -> Result<ExitCode> {
    let table = table(common);
    let mut tables = Vec::new();
    for m in 1..=n {
        let mut entries = Vec::new();
        for mu in partitions_of(m) {
            let entry = table.entry(&mu).map_err(|e| anyhow!("{e}"))?;
            entries.push((mu, entry));
        }
        tables.push((m, entries));
    }
    drain_warnings(&table);
    if common.format == Format::Json {
        let out = json!({
            "n": n,
            "tables": tables.iter().map(|(m, entries)| json!({
                "weight": m,
                "entries": entries.iter().map(|(mu, e)| json!({
                    "mu": mu,
                    "schur": e.htilde_in_s.iter().map(|(l, c)| json!({
                        "lambda": l,
                        "coeff": c.to_string(),
                    })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        for (m, entries) in &tables {
            println!("weight {m}:");
            for (mu, e) in entries {
                let terms: Vec<String> = e
                    .htilde_in_s
                    .iter()
                    .map(|(l, c)| {
                        if c.is_one() {
                            format!("s_{l}")
                        } else if c.num_terms() == 1 {
                            format!("{c}*s_{l}")
                        } else {
                            format!("({c})*s_{l}")
                        }
                    })
                    .collect();
                println!("  Htilde_{mu} = {}", terms.join(" + "));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
