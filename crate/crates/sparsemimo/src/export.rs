//! CSV and geometry output for scenario results.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sparsemimo_core::optim::ThinStep;
use sparsemimo_core::wavefield::{BeamPattern, LobeKind, LobeReport};

use crate::error::{Error, Result};
use crate::fmt_f64;
use crate::geometry_io::write_geometry;
use crate::ratio::RatioRow;
use crate::scenario::ScenarioResult;

pub const MEANS_FILE: &str = "means.csv";
pub const CDF_FILE: &str = "cdf.csv";
pub const DROPS_FILE: &str = "drops.csv";
pub const METADATA_FILE: &str = "config.resolved.toml";

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn means_csv(result: &ScenarioResult) -> String {
    let mut s = String::from("family,mean_rate,bound\n");
    for f in &result.families {
        let _ = writeln!(s, "{},{},{}", f.family, fmt_f64(f.mean_rate), fmt_f64(f.mean_bound));
    }
    s
}

pub fn cdf_csv(result: &ScenarioResult) -> String {
    let mut s = String::from("family,rate,cdf_probability\n");
    for f in &result.families {
        for (i, r) in f.cdf.sorted().iter().enumerate() {
            let _ = writeln!(s, "{},{},{}", f.family, fmt_f64(*r), fmt_f64(f.cdf.probability(i)));
        }
    }
    s
}

pub fn drops_csv(result: &ScenarioResult) -> String {
    let mut s = String::from("family,drop,sum_rate,bound\n");
    for f in &result.families {
        for d in &f.drops {
            let _ = writeln!(s, "{},{},{},{}", f.family, d.drop, fmt_f64(d.sum_rate), fmt_f64(d.bound));
        }
    }
    s
}

pub fn pso_trace_csv(trace: &[f64]) -> String {
    let mut s = String::from("iteration,best_objective\n");
    for (i, v) in trace.iter().enumerate() {
        let _ = writeln!(s, "{i},{}", fmt_f64(*v));
    }
    s
}

pub fn thin_trace_csv(trace: &[ThinStep]) -> String {
    let mut s = String::from("step,removed,objective\n");
    for (i, t) in trace.iter().enumerate() {
        let _ = writeln!(s, "{},{},{}", i + 1, t.removed, fmt_f64(t.objective));
    }
    s
}

pub fn ratio_csv(rows: &[RatioRow]) -> String {
    let mut s = String::from("ratio,users,antennas,rzf,bound,relative_gap\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.ratio,
            r.users,
            r.antennas,
            fmt_f64(r.rzf),
            fmt_f64(r.bound),
            fmt_f64(r.relative_gap())
        );
    }
    s
}

pub fn beampattern_csv(pattern: &BeamPattern) -> String {
    let mut s = String::from("azimuth,sin_azimuth,gain,gain_db\n");
    for (d, (g, db)) in pattern.directions.iter().zip(pattern.gains.iter().zip(pattern.gains_db())) {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_f64(d.azimuth),
            fmt_f64(d.azimuth.sin()),
            fmt_f64(*g),
            fmt_f64(db)
        );
    }
    s
}

pub fn lobes_csv(report: &LobeReport) -> String {
    let mut s = String::from("kind,azimuth,gain,level_db,half_power_width\n");
    for l in &report.lobes {
        let kind = match l.kind {
            LobeKind::Main => "main",
            LobeKind::Grating => "grating",
            LobeKind::Side => "side",
        };
        let width = l.half_power_width.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(
            s,
            "{kind},{},{},{},{width}",
            fmt_f64(l.azimuth),
            fmt_f64(l.gain),
            fmt_f64(l.level_db)
        );
    }
    s
}

/// Writes means, CDF and per-drop CSVs to `dir`; returns the paths written.
pub fn export_csv(result: &ScenarioResult, dir: &Path) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    Ok(vec![
        write(dir.join(MEANS_FILE), &means_csv(result))?,
        write(dir.join(CDF_FILE), &cdf_csv(result))?,
        write(dir.join(DROPS_FILE), &drops_csv(result))?,
    ])
}

/// Everything: the CSVs, the resolved config, family geometries and
/// optimizer traces.
pub fn export_all(result: &ScenarioResult, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = export_csv(result, dir)?;
    written.push(write(dir.join(METADATA_FILE), &result.metadata())?);
    for f in &result.families {
        let path = dir.join(format!("{}.geom", f.family));
        write_geometry(&path, &f.geometry)?;
        written.push(path);
        if let Some(per_drop) = &f.per_drop_geometries {
            let sub = dir.join(format!("{}-drops", f.family));
            create_dir(&sub)?;
            for (i, g) in per_drop.iter().enumerate() {
                let path = sub.join(format!("drop{i:05}.geom"));
                write_geometry(&path, g)?;
                written.push(path);
            }
        }
    }
    if let Some(t) = &result.artifacts.thinning {
        written.push(write(dir.join("thin_trace.csv"), &thin_trace_csv(&t.trace))?);
    }
    if let Some(p) = &result.artifacts.pia {
        written.push(write(dir.join("pia_trace.csv"), &pso_trace_csv(&p.trace))?);
    }
    Ok(written)
}
