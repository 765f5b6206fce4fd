use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use dyngap::harness::{replay_episode, replay_trials, run_monte_carlo, McConfig, TrialRecord};
use dyngap::sim::{read_trace, run_episode, write_trace, PlanRecord, Scenario};
use dyngap::PlannerConfig;

#[derive(Parser, Debug)]
#[command(
    name = "dyngap",
    version,
    about = "Dynamic gap planner: scenarios, Monte Carlo and replay"
)]
struct Cli {
    /// TOML file overriding planner defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for result files.
    #[arg(
        long,
        global = true,
        env = "DYNGAP_OUT_DIR",
        default_value = "dyngap-out"
    )]
    out_dir: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run one closed-loop episode.
    RunScenario {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        social_weight: Option<f64>,
    },
    /// Random single-gap trials.
    MonteCarlo {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Pursuer speed (m/s).
        #[arg(long, default_value_t = 0.5)]
        v_e: f64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Dump per-frame geometry from a trace CSV or a Monte Carlo trial log.
    Replay {
        trace: PathBuf,
        /// Plan log; defaults to the sibling `*_plans.jsonl` of the trace.
        #[arg(long)]
        plans: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<PlannerConfig> {
    let Some(path) = path else {
        return Ok(PlannerConfig::default());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg: PlannerConfig =
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Err(e) = cfg.validate() {
        bail!("invalid config {}: {e}", path.display());
    }
    Ok(cfg)
}

fn write_jsonl<T: serde::Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut w =
        BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    for it in items {
        serde_json::to_writer(&mut w, it)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))?,
        );
    }
    Ok(out)
}

fn run_scenario(cli: &Cli, file: &Path, seed: u64, social_weight: Option<f64>) -> Result<()> {
    let mut cfg = load_config(cli.config.as_deref())?;
    if let Some(w) = social_weight {
        cfg.social_weight = w;
    }
    let scenario = Scenario::load(file)?;
    let result = run_episode(&scenario, &cfg, seed);
    fs::create_dir_all(&cli.out_dir)?;
    let stem = cli.out_dir.join(&scenario.name);
    let summary_path = stem.with_file_name(format!("{}_summary.json", scenario.name));
    let trace_path = stem.with_file_name(format!("{}_trace.csv", scenario.name));
    let plans_path = stem.with_file_name(format!("{}_plans.jsonl", scenario.name));
    fs::write(
        &summary_path,
        serde_json::to_string_pretty(&result.summary)?,
    )?;
    write_trace(&result.trace, BufWriter::new(File::create(&trace_path)?))?;
    write_jsonl(&plans_path, &result.plans)?;
    let s = &result.summary;
    println!("{}", s.outcome.label());
    println!(
        "scenario={} collisions={} duration={:.2}s time_to_goal={} mean_plan_ms={:.3} sources={}",
        s.scenario,
        s.collisions,
        s.duration,
        s.time_to_goal
            .map_or("-".to_string(), |t| format!("{t:.2}s")),
        s.mean_plan_latency_ms,
        s.sources.join(",")
    );
    println!("wrote {}", trace_path.display());
    Ok(())
}

fn monte_carlo(cli: &Cli, trials: usize, seed: u64, v_e: f64, threads: usize) -> Result<()> {
    if trials == 0 {
        bail!("--trials must be at least 1");
    }
    let mc = McConfig {
        trials,
        seed,
        v_e,
        threads,
        planner: load_config(cli.config.as_deref())?,
        ..Default::default()
    };
    let report = run_monte_carlo(&mc);
    fs::create_dir_all(&cli.out_dir)?;
    fs::write(
        cli.out_dir.join("monte_carlo_tally.json"),
        serde_json::to_string_pretty(&report.tally)?,
    )?;
    write_jsonl(
        &cli.out_dir.join("monte_carlo_trials.jsonl"),
        &report.trials,
    )?;
    let t = report.tally;
    println!(
        "trials={} passed={} speed_infeasible={} closed_before_pass={} collisions={}",
        t.total(),
        t.passed,
        t.speed_infeasible,
        t.closed_before_pass,
        t.collisions
    );
    Ok(())
}

fn replay(trace: &Path, plans: Option<&Path>) -> Result<()> {
    let out = std::io::stdout();
    let mut w = BufWriter::new(out.lock());
    if trace.extension().is_some_and(|e| e == "jsonl") {
        let trials: Vec<TrialRecord> = read_jsonl(trace)?;
        for g in replay_trials(&trials) {
            serde_json::to_writer(&mut w, &g)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        return Ok(());
    }
    let f = File::open(trace).with_context(|| format!("opening {}", trace.display()))?;
    let rows = read_trace(f)?;
    let plans_path = plans.map(Path::to_path_buf).or_else(|| {
        let name = trace.file_name()?.to_str()?;
        let p = trace.with_file_name(name.strip_suffix("_trace.csv")?.to_string() + "_plans.jsonl");
        p.exists().then_some(p)
    });
    let plans: Vec<PlanRecord> = match plans_path {
        Some(p) => read_jsonl(&p)?,
        None => Vec::new(),
    };
    for frame in replay_episode(&rows, &plans) {
        serde_json::to_writer(&mut w, &frame)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::RunScenario {
            file,
            seed,
            social_weight,
        } => run_scenario(&cli, file, *seed, *social_weight),
        Cmd::MonteCarlo {
            trials,
            seed,
            v_e,
            threads,
        } => monte_carlo(&cli, *trials, *seed, *v_e, *threads),
        Cmd::Replay { trace, plans } => replay(trace, plans.as_deref()),
    }
}
