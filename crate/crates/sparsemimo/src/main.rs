use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sparsemimo::config::{Family, ScenarioConfig, ScenarioKind};
use sparsemimo::core::geometry::make_ula;
use sparsemimo::core::mra::{ruler_geometry, search_ruler};
use sparsemimo::core::wavefield::{beampattern, find_lobes, sine_space_grid, Direction};
use sparsemimo::error::{Error, Result};
use sparsemimo::export::{self, beampattern_csv, lobes_csv, pso_trace_csv, ratio_csv, thin_trace_csv};
use sparsemimo::geometry_io::{read_geometry, write_geometry};
use sparsemimo::scenario::{Artifacts, Designer};
use sparsemimo::{fmt_f64, ratio_sweep, run_scenario};

#[derive(Parser)]
#[command(name = "sparsemimo", version, about = "Sparse and movable antenna arrays for multiuser MIMO")]
struct Cli {
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write CSVs, geometries and traces.
    Run { config: PathBuf },
    /// Sum rate against antenna/user ratio under iid Rayleigh fading.
    SweepRatio {
        /// Optional rayleigh-ratio config; flags below override it.
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        ratios: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        users: Option<Vec<usize>>,
        #[arg(long)]
        snr_db: Option<f64>,
        #[arg(long)]
        drops: Option<usize>,
    },
    /// Beampattern and lobe table of a geometry.
    Beampattern(BeamArgs),
    /// Minimum-redundancy ruler search.
    MraSearch {
        #[arg(long)]
        antennas: usize,
        #[arg(long)]
        slots: usize,
        #[arg(long, default_value_t = sparsemimo::core::mra::DEFAULT_NODE_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 0.5)]
        pitch: f64,
    },
    /// Greedy thinning for the config's linear aperture.
    Thin { config: PathBuf },
    /// Pre-optimize an irregular array on the config's training drops.
    OptimizePia { config: PathBuf },
    /// Write the geometry of one family.
    ExportGeometry {
        config: PathBuf,
        #[arg(long)]
        family: String,
    },
}

#[derive(Args)]
struct BeamArgs {
    /// Geometry file; defaults to a ULA built from --antennas/--spacing.
    #[arg(long)]
    geometry: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    antennas: usize,
    #[arg(long, default_value_t = 0.5)]
    spacing: f64,
    /// Steering azimuth as a multiple of π.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    steer_pi: f64,
    #[arg(long, default_value_t = sparsemimo::core::wavefield::DEFAULT_GRID_POINTS)]
    points: usize,
    #[arg(long, default_value_t = sparsemimo::core::wavefield::DEFAULT_GRATING_TOLERANCE_DB)]
    tolerance_db: f64,
}

fn load(path: &Path, seed: Option<u64>) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn save(path: PathBuf, text: &str) -> Result<()> {
    std::fs::write(&path, text).map_err(|e| Error::Io { path: path.clone(), source: e })?;
    println!("wrote {}", path.display());
    Ok(())
}

fn mkdir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn sweep(cli: &Cli, cfg: ScenarioConfig) -> Result<()> {
    let r = &cfg.ratio;
    let rows = ratio_sweep(&r.ratios, &r.users, r.snr_db, r.drops, cfg.seed)?;
    println!("{:>5} {:>5} {:>10} {:>10} {:>8}", "M/K", "K", "rzf", "bound", "gap");
    for row in &rows {
        println!(
            "{:>5} {:>5} {:>10.3} {:>10.3} {:>7.1}%",
            row.ratio,
            row.users,
            row.rzf,
            row.bound,
            100.0 * row.relative_gap()
        );
    }
    mkdir(&cli.out_dir)?;
    save(cli.out_dir.join("ratio.csv"), &ratio_csv(&rows))
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = load(config, cli.seed)?;
            if cfg.kind == ScenarioKind::RayleighRatio {
                return sweep(cli, cfg);
            }
            let result = run_scenario(&cfg)?;
            println!("{:<16} {:>12} {:>12}", "family", "mean_rate", "bound");
            for f in &result.families {
                println!("{:<16} {:>12.4} {:>12.4}", f.family.to_string(), f.mean_rate, f.mean_bound);
            }
            let written = export::export_all(&result, &cli.out_dir)?;
            println!("wrote {} files to {}", written.len(), cli.out_dir.display());
            Ok(())
        }
        Command::SweepRatio {
            config,
            ratios,
            users,
            snr_db,
            drops,
        } => {
            let mut cfg = match config {
                Some(p) => load(p, cli.seed)?,
                None => ScenarioConfig::defaults(ScenarioKind::RayleighRatio),
            };
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let r = &mut cfg.ratio;
            if let Some(v) = ratios {
                r.ratios.clone_from(v);
            }
            if let Some(v) = users {
                r.users.clone_from(v);
            }
            if let Some(v) = snr_db {
                r.snr_db = *v;
            }
            if let Some(v) = drops {
                r.drops = *v;
            }
            cfg.validate()?;
            sweep(cli, cfg)
        }
        Command::Beampattern(b) => {
            let geometry = match &b.geometry {
                Some(p) => read_geometry(p)?,
                None => make_ula(b.antennas, b.spacing)?,
            };
            let steer = Direction::new(b.steer_pi * PI, 0.0)?;
            let pattern = beampattern(&geometry, &steer, &sine_space_grid(b.points))?;
            let report = find_lobes(&pattern, b.tolerance_db)?;
            for l in &report.lobes {
                if l.kind != sparsemimo::core::wavefield::LobeKind::Side {
                    println!("{:?} lobe at {:.4}π, {:.2} dB", l.kind, l.azimuth / PI, l.level_db);
                }
            }
            mkdir(&cli.out_dir)?;
            save(cli.out_dir.join("beampattern.csv"), &beampattern_csv(&pattern))?;
            save(cli.out_dir.join("lobes.csv"), &lobes_csv(&report))
        }
        Command::MraSearch {
            antennas,
            slots,
            budget,
            pitch,
        } => {
            let outcome = search_ruler(*antennas, *slots, *budget)?;
            let marks: Vec<String> = outcome.marks.iter().map(u32::to_string).collect();
            println!(
                "marks {{{}}} redundancy {} aperture {} complete {} nodes {}",
                marks.join(","),
                outcome.redundancy,
                outcome.aperture(),
                outcome.complete,
                outcome.nodes
            );
            mkdir(&cli.out_dir)?;
            let path = cli.out_dir.join("mra.geom");
            write_geometry(&path, &ruler_geometry(&outcome.marks, *pitch)?)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Thin { config } => {
            let cfg = load(config, cli.seed)?;
            if cfg.kind != ScenarioKind::Linear {
                return Err(Error::Config("thinning needs a linear scenario".into()));
            }
            let designer = Designer::new(&cfg)?;
            let t = designer.thin()?;
            println!("kept dense indices {:?}", t.kept);
            mkdir(&cli.out_dir)?;
            let path = cli.out_dir.join("thinned.geom");
            write_geometry(&path, &t.geometry)?;
            println!("wrote {}", path.display());
            save(cli.out_dir.join("thin_trace.csv"), &thin_trace_csv(&t.trace))
        }
        Command::OptimizePia { config } => {
            let cfg = load(config, cli.seed)?;
            let designer = Designer::new(&cfg)?;
            let p = designer.pia()?;
            println!("training mean sum rate {}", fmt_f64(p.objective));
            mkdir(&cli.out_dir)?;
            let path = cli.out_dir.join("pia.geom");
            write_geometry(&path, &p.geometry)?;
            println!("wrote {}", path.display());
            save(cli.out_dir.join("pia_trace.csv"), &pso_trace_csv(&p.trace))
        }
        Command::ExportGeometry { config, family } => {
            let cfg = load(config, cli.seed)?;
            let family: Family = family.parse()?;
            if !family.supports(cfg.kind) {
                return Err(Error::Config(format!("family {family} is not available in a {} scenario", cfg.kind)));
            }
            let designer = Designer::new(&cfg)?;
            let g = designer.design(family, &mut Artifacts::default())?;
            mkdir(&cli.out_dir)?;
            let path = cli.out_dir.join(format!("{family}.geom"));
            write_geometry(&path, &g)?;
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{}", serde_json::json!({"error": {"kind": "threads", "message": e.to_string()}}));
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::json!({"error": {"kind": e.kind(), "message": e.to_string()}}));
            ExitCode::FAILURE
        }
    }
}
