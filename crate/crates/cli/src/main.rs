use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hcfsim::cost::{complexity_table, fronthaul_overhead, CostParams};
use hcfsim::harness::{export_results, run_campaign_with_workers, CampaignSpec, CampaignSummary};
use hcfsim::{validate, Architecture, Error, Mode, Result, SystemConfig};
use serde_json::json;

#[derive(Parser)]
#[command(name = "hcfsim", version, about = "Uplink simulator for hierarchical cell-free massive MIMO")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo campaign and write summary.json plus CDF tables.
    Run(RunArgs),
    /// Print complexity and fronthaul tables for a parameter set.
    Cost(CostArgs),
    /// Run the built-in analytic checks.
    Validate,
}

#[derive(Args)]
struct RunArgs {
    /// Campaign file (JSON); defaults to the built-in campaign.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "HCFSIM_WORKERS")]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    drops: Option<usize>,
    #[arg(long)]
    inner: Option<usize>,
}

#[derive(Args)]
struct CostArgs {
    /// System or campaign file (JSON) to take dimensions from.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "M")]
    m: Option<u64>,
    #[arg(long = "K")]
    k: Option<u64>,
    #[arg(long = "N_a")]
    n_a: Option<u64>,
    #[arg(long = "N_b")]
    n_b: Option<u64>,
    #[arg(long = "L")]
    l: Option<u64>,
    #[arg(long = "tau_p", alias = "tau-p")]
    tau_p: Option<u64>,
    #[arg(long = "tau_u", alias = "tau-u")]
    tau_u: Option<u64>,
    /// Emit JSON instead of tables.
    #[arg(long)]
    json: bool,
}

fn run(args: RunArgs) -> Result<()> {
    let mut spec = match &args.config {
        Some(path) => CampaignSpec::from_file(path)?,
        None => CampaignSpec::default(),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(n) = args.drops {
        spec.n_drops = n;
    }
    if let Some(n) = args.inner {
        spec.n_inner = n;
    }
    if let Some(out) = args.out {
        spec.output_dir = out;
    }
    spec.validate()?;
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));

    let result = run_campaign_with_workers(&spec, workers)?;
    let summary = match export_results(&result, &spec.output_dir) {
        Ok(s) => s,
        Err(e) => {
            // keep the numbers even when the output directory is unusable
            let fallback = CampaignSummary::from_result(&result);
            println!("{}", serde_json::to_string_pretty(&fallback)?);
            return Err(e);
        }
    };
    println!(
        "{:<16} {:>6} {:>5} {:>3} {:>10} {:>10} {:>12} {:>10}",
        "variant", "arch", "mode", "pc", "SE95", "medianCap", "mults/use", "fronthaul"
    );
    for v in &summary.variants {
        println!(
            "{:<16} {:>6} {:>5} {:>3} {:>10.4} {:>10.4} {:>12} {:>10}",
            v.name,
            v.architecture.label(),
            match v.mode {
                Mode::Centralized => "cent",
                Mode::Hierarchical => "hier",
            },
            if v.power_control { "yes" } else { "no" },
            v.se_95_likely,
            v.median_capacity,
            v.cost.complexity_reported,
            v.cost.fronthaul_scalars,
        );
    }
    println!(
        "{} drops x {} realizations, {} resampled, {:.1} s on {} workers -> {}",
        spec.n_drops,
        spec.n_inner,
        result.diagnostics.resampled_drops,
        result.diagnostics.runtime_s,
        result.diagnostics.workers,
        spec.output_dir.display()
    );
    Ok(())
}

fn load_params(path: &Path) -> Result<CostParams> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let is_campaign = ["base", "variants", "n_drops", "n_inner"]
        .iter()
        .any(|k| value.get(k).is_some());
    let cfg = if is_campaign {
        CampaignSpec::from_json(&text)?.base
    } else {
        serde_json::from_value::<SystemConfig>(value)?
    };
    Ok(CostParams::from(&cfg))
}

fn cost(args: CostArgs) -> Result<()> {
    let mut p = match &args.config {
        Some(path) => load_params(path)?,
        None => CostParams::default(),
    };
    let overrides = [
        (&mut p.m, args.m),
        (&mut p.k, args.k),
        (&mut p.n_a, args.n_a),
        (&mut p.n_b, args.n_b),
        (&mut p.l, args.l),
        (&mut p.tau_p, args.tau_p),
        (&mut p.tau_u, args.tau_u),
    ];
    for (slot, value) in overrides {
        if let Some(v) = value {
            *slot = v;
        }
    }
    let table = complexity_table(&p)?;
    let fronthaul = [
        ("HCF centralized", Architecture::Hcf, Mode::Centralized),
        ("HCF hierarchical", Architecture::Hcf, Mode::Hierarchical),
        ("CF centralized", Architecture::Cf, Mode::Centralized),
        ("CF local", Architecture::Cf, Mode::Hierarchical),
        ("Cellular", Architecture::Cellular, Mode::Centralized),
    ]
    .map(|(name, arch, mode)| (name, fronthaul_overhead(arch, mode, &p)));

    if args.json {
        let rows: Vec<_> = table
            .iter()
            .map(|(method, row)| json!({"method": method, "MR": row[0], "ZF": row[1], "MMSE": row[2]}))
            .collect();
        let fh: serde_json::Map<_, _> = fronthaul.iter().map(|(n, v)| (n.to_string(), json!(v))).collect();
        let doc = json!({"params": p, "complexity": rows, "fronthaul": fh});
        println!("{}", serde_json::to_string_pretty(&doc)?);
        return Ok(());
    }
    println!("Complex multiplications per channel use");
    println!("{:<32} {:>10} {:>10} {:>10}", "method", "MR", "ZF", "MMSE");
    for (method, row) in &table {
        println!("{:<32} {:>10} {:>10} {:>10}", method.label(), row[0], row[1], row[2]);
    }
    println!();
    println!("Fronthaul load (complex scalars per coherence block)");
    for (name, v) in fronthaul {
        println!("{name:<32} {v:>10}");
    }
    Ok(())
}

fn validate_all() -> Result<bool> {
    let checks = validate::run_checks();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(checks.iter().all(|c| c.passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args).map(|()| true),
        Command::Cost(args) => cost(args).map(|()| true),
        Command::Validate => validate_all(),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("{}: {e}", e.class_name());
            ExitCode::from(2)
        }
    }
}
