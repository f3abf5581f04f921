use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use unified_hb::channel::{ArrayGeometry, Sector};
use unified_hb::harness::{self, manifest_path, run_scenario, write_csv, RunManifest, Scale, ScenarioConfig};
use unified_hb::hybrid_bf::sufficient_rf_chains;

#[derive(Parser)]
#[command(name = "hbsim", version = env!("CARGO_PKG_VERSION"), about = "Multi-group hybrid beamforming simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write per-seed sum rates as CSV plus a manifest.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides array, band and group sizes with a preset.
        #[arg(long)]
        scale: Option<Scale>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the RF-chain count sufficient for a sector.
    Sufficiency {
        #[arg(long)]
        mh: usize,
        #[arg(long)]
        mv: usize,
        #[arg(long, default_value_t = 0.5)]
        dh: f64,
        #[arg(long, default_value_t = 0.5)]
        dv: f64,
        #[arg(long, allow_negative_numbers = true)]
        phi_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        phi_max: f64,
        #[arg(long, allow_negative_numbers = true)]
        theta_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        theta_max: f64,
    },
    /// Run the seeded invariant checks.
    Selftest,
}

fn simulate(config: PathBuf, out: PathBuf, scale: Option<Scale>, threads: Option<usize>) -> Result<(), String> {
    let text = std::fs::read_to_string(&config).map_err(|e| format!("{}: {e}", config.display()))?;
    let mut cfg = ScenarioConfig::from_json(&text).map_err(|e| e.to_string())?;
    if let Some(s) = scale {
        cfg = cfg.with_scale(s);
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| e.to_string())?;
    let rec = pool.install(|| run_scenario(&cfg)).map_err(|e| e.to_string())?;
    write_csv(&rec, &out).map_err(|e| e.to_string())?;
    RunManifest::new(&cfg, &rec, pool.current_num_threads())
        .write(&manifest_path(&out))
        .map_err(|e| e.to_string())?;
    for d in &rec.diagnostics {
        eprintln!("diagnostic: seed {} {} group {} subcarrier {}: {}", d.seed, d.method, d.group, d.subcarrier, d.message);
    }
    eprintln!("wrote {} ({:.2} s)", out.display(), rec.elapsed_secs);
    Ok(())
}

fn sufficiency(geom: ArrayGeometry, sector: Sector) -> Result<(), String> {
    geom.validate().map_err(|e| e.to_string())?;
    sector.validate().map_err(|e| e.to_string())?;
    let s = sufficient_rf_chains(&geom, &sector);
    println!("kappa_h = {}", s.kappa_h);
    println!("kappa_v = {}", s.kappa_v);
    println!("kappa = {}", s.kappa);
    Ok(())
}

fn selftest() -> Result<(), String> {
    let outcomes = harness::selftest::run_all();
    for c in &outcomes {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = outcomes.iter().filter(|c| !c.passed).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(format!("{failed} check(s) failed"))
    }
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Simulate { config, out, scale, threads } => simulate(config, out, scale, threads),
        Command::Sufficiency { mh, mv, dh, dv, phi_min, phi_max, theta_min, theta_max } => sufficiency(
            ArrayGeometry { m_h: mh, m_v: mv, d_h_over_lambda: dh, d_v_over_lambda: dv },
            Sector { phi_min, phi_max, theta_min, theta_max },
        ),
        Command::Selftest => selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
