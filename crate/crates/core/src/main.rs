//! `g2a-plan`: command-line front end.
//!
//! Exit codes: 0 success, 2 validation error, 3 infeasible run, 4 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use g2a_coverage::optimizer::Algorithm;
use g2a_coverage::pipeline::{run_network, triangulate, RunManifest, TriangleStatus, TriangulationMode};
use g2a_coverage::prism::zeta_table;
use g2a_coverage::report::{export_reports, triangulation_json, write_zeta_table, MANIFEST_FILE};
use g2a_coverage::scenario::{load_scenario, Scenario, ScenarioError};
use g2a_coverage::Error;

#[derive(Parser)]
#[command(name = "g2a-plan", version, about = "Ground-to-air coverage planning over triangular prisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the cooperation-set triangulation as JSON.
    Triangulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "delaunay")]
        triangulation: TriangulationMode,
    },
    /// Optimize every cooperation set and export reports.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "slbc")]
        algorithm: Algorithm,
        #[arg(long, value_enum, default_value = "delaunay")]
        triangulation: TriangulationMode,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Evaluate the fixed down-tilt configuration and export reports.
    Baseline {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "delaunay")]
        triangulation: TriangulationMode,
        #[arg(long)]
        overlap_cap: Option<f64>,
    },
    /// Overlap ratios of the triangular, square and hexagonal prism cells.
    Prisms {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Monte-Carlo samples per structure; 0 skips the estimate.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Re-export the CSV tables from an existing manifest.
    Report {
        #[arg(long)]
        out: PathBuf,
        /// Defaults to `<out>/manifest.json`.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Tuning {
    #[arg(long)]
    overlap_cap: Option<f64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    particles: Option<usize>,
}

/// `println!` that ignores a closed stdout (e.g. piped into `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// Failure carrying its exit code.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
struct Exit {
    code: u8,
    message: String,
}

fn code_of(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<Exit>() {
        return e.code;
    }
    if let Some(e) = err.downcast_ref::<ScenarioError>() {
        return match e {
            ScenarioError::Io { .. } => 4,
            _ => 2,
        };
    }
    if let Some(e) = err.downcast_ref::<Error>() {
        return match e {
            Error::InfeasibleRun { .. } => 3,
            _ => 2,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() || err.downcast_ref::<serde_json::Error>().is_some() {
        return 4;
    }
    2
}

fn scenario(common: &Common) -> anyhow::Result<Scenario> {
    let mut s = load_scenario(&common.scenario)?;
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    Ok(s)
}

fn revalidate(s: &Scenario) -> anyhow::Result<()> {
    Ok(s.validate()?)
}

fn write_out(dir: &Path, name: &str, text: &str) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn finish_run(manifest: &RunManifest, out: Option<&Path>) -> anyhow::Result<()> {
    let out = out.unwrap_or(Path::new("."));
    export_reports(manifest, out).with_context(|| format!("writing reports to {}", out.display()))?;
    for t in &manifest.triangles {
        let ids = t.vertex_ids.map(|i| i.to_string()).join("-");
        match (t.status, t.gcr) {
            (TriangleStatus::Solved, Some(g)) => say!("triangle {} [{ids}]: gcr {g:.4} cor {:.6}", t.triangle_id, t.cor.unwrap_or(0.0)),
            _ => say!("triangle {} [{ids}]: {}", t.triangle_id, t.error.as_deref().unwrap_or("no result")),
        }
    }
    match manifest.average_gcr() {
        Some(g) => say!("average gcr {g:.4}"),
        None => say!("average gcr unavailable"),
    }
    let infeasible = manifest.count(TriangleStatus::Infeasible);
    if infeasible > 0 {
        return Err(Exit { code: 3, message: format!("{infeasible} triangle(s) had no feasible configuration") }.into());
    }
    if manifest.count(TriangleStatus::Failed) > 0 {
        return Err(Exit { code: 2, message: "some triangles failed; see the manifest".into() }.into());
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Triangulate { common, triangulation } => {
            let s = scenario(&common)?;
            let json = triangulation_json(&triangulate(&s, triangulation)?);
            match &common.out {
                Some(dir) => write_out(dir, "triangulation.json", &json)?,
                None => say!("{json}"),
            }
        }
        Command::Optimize { common, algorithm, triangulation, tuning } => {
            let mut s = scenario(&common)?;
            if let Some(t) = tuning.overlap_cap {
                s.overlap_cap = t;
            }
            if let Some(n) = tuning.iterations {
                s.optimizer.iterations = n;
            }
            if let Some(n) = tuning.particles {
                s.optimizer.particles = n;
            }
            revalidate(&s)?;
            finish_run(&run_network(&s, algorithm, triangulation)?, common.out.as_deref())?;
        }
        Command::Baseline { common, triangulation, overlap_cap } => {
            let mut s = scenario(&common)?;
            if let Some(t) = overlap_cap {
                s.overlap_cap = t;
            }
            revalidate(&s)?;
            finish_run(&run_network(&s, Algorithm::Downtilt, triangulation)?, common.out.as_deref())?;
        }
        Command::Prisms { out, seed, samples } => {
            let mc = (samples > 0).then_some((samples, seed));
            let rows = zeta_table(&[1.0, 1.1, 2.0, 5.0], mc)?;
            for r in &rows {
                say!(
                    "{} r/H={} analytic={:.4}{}",
                    r.kind.name(),
                    r.r_over_h,
                    r.analytic,
                    r.monte_carlo.map(|m| format!(" monte_carlo={m:.4} se={:.4}", r.std_error.unwrap_or(0.0))).unwrap_or_default()
                );
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                write_zeta_table(&rows, &dir.join("prism_overlap.csv"))?;
            }
        }
        Command::Report { out, manifest } => {
            let path = manifest.unwrap_or_else(|| out.join(MANIFEST_FILE));
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let m: RunManifest = serde_json::from_str(&text)
                .map_err(|e| Exit { code: 2, message: format!("{}: {e}", path.display()) })?;
            export_reports(&m, &out).with_context(|| format!("writing reports to {}", out.display()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code_of(&e))
        }
    }
}
