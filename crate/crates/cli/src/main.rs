//! `pinchflow` command-line interface.
//!
//! Exit codes: 0 when every check passes, 1 when a check is violated,
//! 2 on usage or configuration errors.

mod params;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use pinchflow::flow::{simulate, write_csv, FlowFamily};
use pinchflow::pinching::{
    c_n, d_lower_bound, kappa_n, rational_to_f64, space_form_min_d, CnRegime, PinchingConstants, PreservationWeights,
};
use pinchflow::rescaling::{invariance_report, rescale, write_rescaled_csv};
use pinchflow::tensor_core::Dims;
use pinchflow::verifier::{Campaign, CampaignConstants, Suite};

#[derive(Parser)]
#[command(name = "pinchflow", version, about = "Pinching constants, inequality campaigns and exact flow families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Regime {
    General,
    Codim,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Li,
    Kato,
    Reaction,
    Gradient,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Sphere,
    Cylinder,
    Product,
    Hyperbolic,
}

#[derive(Subcommand)]
enum Command {
    /// Print c_n, the lower bound for d and kappa_n.
    #[command(allow_negative_numbers = true)]
    Constants {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long = "K1", requires_all = ["k2", "l"], conflicts_with = "kbar")]
        k1: Option<f64>,
        #[arg(long = "K2")]
        k2: Option<f64>,
        #[arg(long = "L")]
        l: Option<f64>,
        #[arg(long = "Kbar")]
        kbar: Option<f64>,
        #[arg(long, value_enum, default_value = "general")]
        regime: Regime,
        /// Use this c instead of c_n when computing the other constants.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Run a seeded verification campaign.
    #[command(allow_negative_numbers = true)]
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Falls back to MCF_SEED, then to a random seed; always echoed.
        #[arg(long, env = "MCF_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long = "Kbar")]
        kbar: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
        /// Relative violation tolerance; a negative value demands that
        /// much relative margin.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Report file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for counterexample files.
        #[arg(long, default_value = ".")]
        counterexample_dir: PathBuf,
    },
    /// Integrate an exact flow family and write its diagnostics as CSV.
    #[command(allow_negative_numbers = true)]
    Simulate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Comma-separated k=v pairs.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        dt: f64,
        #[arg(long = "t-end")]
        t_end: f64,
        #[arg(long, default_value_t = 1)]
        every: usize,
        /// Defaults to c_n (general regime), or 4/(3n) when n < 5.
        #[arg(long)]
        c: Option<f64>,
        /// Defaults to 0, or max(0, 2n − 2/c) for the hyperbolic family.
        #[arg(long)]
        d: Option<f64>,
        /// CSV file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rescale a simulated series about one row.
    #[command(allow_negative_numbers = true)]
    Rescale {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "base-row")]
        base_row: usize,
        #[arg(long)]
        out: PathBuf,
        /// Ambient curvature the series was recorded in.
        #[arg(long = "Kbar", default_value_t = 0.0)]
        kbar: f64,
        #[arg(long, default_value_t = 0.0)]
        d: f64,
    },
}

type CmdResult = Result<bool, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Constants { n, m, k1, k2, l, kbar, regime, c } => constants(n, m, k1.zip(k2).zip(l), kbar, regime, c),
        Command::Verify {
            suite,
            trials,
            seed,
            n,
            m,
            c,
            d,
            delta,
            kbar,
            eta,
            tol,
            out,
            counterexample_dir,
        } => {
            let overrides = Overrides { c, d, delta, kbar, eta };
            verify(suite, trials, seed.unwrap_or_else(rand::random), n, m, overrides, tol, out, &counterexample_dir)
        }
        Command::Simulate { family, params, dt, t_end, every, c, d, out } => {
            simulate_cmd(family, &params, dt, t_end, every, c, d, out)
        }
        Command::Rescale { input, base_row, out, kbar, d } => rescale_cmd(&input, base_row, &out, kbar, d),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn constants(n: usize, m: usize, bounded: Option<((f64, f64), f64)>, kbar: Option<f64>, regime: Regime, c: Option<f64>) -> CmdResult {
    let dims = Dims::new(n, m).map_err(err)?;
    let reg = match regime {
        Regime::General => CnRegime::General,
        Regime::Codim => CnRegime::CodimEstimate,
    };
    let cn = c_n(n, reg).map_err(err)?;
    let c_used = c.unwrap_or_else(|| rational_to_f64(cn));
    if !(c_used > 1.0 / n as f64) {
        return Err(format!("c = {c_used} must exceed 1/n"));
    }
    let (background, d) = match (bounded, kbar) {
        (Some(((k1, k2), l)), _) => (
            json!({"kind": "bounded", "K1": k1, "K2": k2, "L": l}),
            d_lower_bound(n, m, c_used, k1, k2, l, PreservationWeights::default()).map_err(err)?,
        ),
        (None, Some(kb)) => (
            json!({"kind": "space_form", "Kbar": kb}),
            if kb < 0.0 { space_form_min_d(n, c_used).max(0.0) } else { 0.0 },
        ),
        (None, None) => (json!({"kind": "euclidean"}), 0.0),
    };
    let kappa = kappa_n(n, c_used).map_err(err)?;
    let report = json!({
        "n": dims.n(),
        "m": dims.m(),
        "regime": match regime { Regime::General => "general", Regime::Codim => "codim" },
        "c_n": cn.to_string(),
        "c": c_used,
        "background": background,
        "d": d,
        "kappa_n": kappa,
    });
    emit(None, &serde_json::to_string_pretty(&report).map_err(err)?)?;
    Ok(true)
}

struct Overrides {
    c: Option<f64>,
    d: Option<f64>,
    delta: Option<f64>,
    kbar: Option<f64>,
    eta: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
fn verify(
    suite: SuiteArg,
    trials: u64,
    seed: u64,
    n: usize,
    m: usize,
    o: Overrides,
    tol: f64,
    out: Option<PathBuf>,
    cx_dir: &Path,
) -> CmdResult {
    let dims = Dims::new(n, m).map_err(err)?;
    let mut k = CampaignConstants::defaults(n);
    k.c = o.c.unwrap_or(k.c);
    k.d = o.d.unwrap_or(k.d);
    k.delta = o.delta.unwrap_or(k.delta);
    k.kbar = o.kbar.unwrap_or(k.kbar);
    k.eta = o.eta.or(k.eta);
    if !tol.is_finite() {
        return Err("tolerance must be finite".into());
    }
    let lemmas = match suite {
        SuiteArg::Li => Suite::Li,
        SuiteArg::Kato => Suite::Kato,
        SuiteArg::Reaction => Suite::Reaction,
        SuiteArg::Gradient => Suite::Gradient,
        SuiteArg::All => Suite::All,
    }
    .lemmas();
    let campaign = Campaign { rel_tol: tol, ..Campaign::new(dims, seed, trials).with_constants(k) };
    let outcomes = campaign.run(&lemmas).map_err(err)?;
    let mut files = Vec::new();
    for o in &outcomes {
        if let Some(cx) = &o.counterexample {
            let path = cx_dir.join(format!("counterexample_{}_{}.json", cx.lemma_id, seed));
            cx.write(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            files.push(path.display().to_string());
        }
    }
    let results: Vec<_> = outcomes.iter().map(|o| &o.result).collect();
    let all_pass = results.iter().all(|r| r.passed());
    let report = json!({
        "seed": seed,
        "n": n,
        "m": m,
        "constants": k,
        "tolerance": tol,
        "results": results,
        "counterexamples": files,
    });
    emit(out.as_deref(), &serde_json::to_string_pretty(&report).map_err(err)?)?;
    eprintln!(
        "seed {seed}: {} lemma(s), {} with violations",
        results.len(),
        results.iter().filter(|r| !r.passed()).count()
    );
    Ok(all_pass)
}

fn default_c(n: usize) -> f64 {
    c_n(n, CnRegime::General).map(rational_to_f64).unwrap_or(4.0 / (3.0 * n as f64))
}

#[allow(clippy::too_many_arguments)]
fn simulate_cmd(
    family: FamilyArg,
    params: &str,
    dt: f64,
    t_end: f64,
    every: usize,
    c: Option<f64>,
    d: Option<f64>,
    out: Option<PathBuf>,
) -> CmdResult {
    let kind = match family {
        FamilyArg::Sphere => "sphere",
        FamilyArg::Cylinder => "cylinder",
        FamilyArg::Product => "product",
        FamilyArg::Hyperbolic => "hyperbolic",
    };
    let fam = params::Params::parse(params)?.family(kind)?;
    let dims = fam.dims().map_err(err)?;
    let c = c.unwrap_or_else(|| default_c(dims.n()));
    let k = match fam {
        FlowFamily::Hyperbolic { kbar, .. } => {
            let d = d.unwrap_or_else(|| space_form_min_d(dims.n(), c).max(0.0));
            PinchingConstants::space_form(dims, c, d, kbar)
        }
        _ => PinchingConstants::euclidean(dims, c, d.unwrap_or(0.0)),
    }
    .map_err(err)?;
    let rows = simulate(&fam, &k, dt, t_end, every).map_err(err)?;
    match &out {
        Some(p) => {
            let f = File::create(p).map_err(|e| format!("{}: {e}", p.display()))?;
            write_csv(&rows, BufWriter::new(f)).map_err(err)?;
        }
        None => write_csv(&rows, io::stdout().lock()).map_err(err)?,
    }
    let last = rows.last().map_or(0.0, |r| r.t);
    eprintln!("{kind}: {} rows, last t = {last}, blow-up at {}", rows.len(), fam.blowup_time());
    Ok(true)
}

fn rescale_cmd(input: &Path, base_row: usize, out: &Path, kbar: f64, d: f64) -> CmdResult {
    let f = File::open(input).map_err(|e| format!("{}: {e}", input.display()))?;
    let series = pinchflow::flow::read_csv(BufReader::new(f)).map_err(err)?;
    let s = rescale(&series, base_row, kbar, d).map_err(err)?;
    let file = File::create(out).map_err(|e| format!("{}: {e}", out.display()))?;
    let mut w = BufWriter::new(file);
    write_rescaled_csv(&s, &mut w).map_err(err)?;
    w.flush().map_err(err)?;
    let rep = invariance_report(&series, &s).map_err(err)?;
    let ok = rep.holds(1e-12);
    let report = json!({
        "base_row": base_row,
        "r_hat": s.r_hat,
        "t_base": s.t_base,
        "dbar": s.dbar,
        "invariance": rep,
        "passed": ok,
    });
    emit(None, &serde_json::to_string_pretty(&report).map_err(err)?)?;
    Ok(ok)
}
