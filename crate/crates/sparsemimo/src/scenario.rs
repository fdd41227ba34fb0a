//! Monte Carlo scenarios over array families.

use rand::Rng;
use rayon::prelude::*;
use sparsemimo_core::channel::{ChannelSpec, DropChannel};
use sparsemimo_core::geometry::{make_ula, make_upa};
use sparsemimo_core::mimo::{interference_free_bound, mean_sum_rate};
use sparsemimo_core::mra::{best_permutation, make_2d_pmra, ruler_geometry, search_ruler, RulerOutcome};
use sparsemimo_core::optim::{
    greedy_thin, optimize_ma, pso_optimize, MovableRegions, PsoOutcome, SumRateObjective, ThinOutcome,
};
use sparsemimo_core::rng::{stream_rng, Stream};
use sparsemimo_core::ArrayGeometry;

use crate::config::{square_side, Family, FamilyKind, ScenarioConfig, ScenarioKind};
use crate::error::{Error, Result};
use crate::parallel::ParallelSumRate;
use crate::stats::{mean, Cdf};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DropRecord {
    pub drop: usize,
    pub sum_rate: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyResult {
    pub family: Family,
    /// The deployed array; for MA this is the warm-start (PIA) geometry.
    pub geometry: ArrayGeometry,
    /// MA only: the geometry chosen for each test drop.
    pub per_drop_geometries: Option<Vec<ArrayGeometry>>,
    pub mean_rate: f64,
    pub mean_bound: f64,
    pub cdf: Cdf,
    pub drops: Vec<DropRecord>,
}

/// Design-time by-products kept for export.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Artifacts {
    pub ruler: Option<RulerOutcome>,
    pub thinning: Option<ThinOutcome>,
    pub pia: Option<PsoOutcome>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub families: Vec<FamilyResult>,
    pub artifacts: Artifacts,
}

impl ScenarioResult {
    pub fn family(&self, family: &str) -> Option<&FamilyResult> {
        let f: Family = family.parse().ok()?;
        self.families.iter().find(|r| r.family == f)
    }

    /// Resolved config, echoed into exported metadata.
    pub fn metadata(&self) -> String {
        self.config.to_toml()
    }
}

/// Builds family geometries for one config.
pub struct Designer<'a> {
    cfg: &'a ScenarioConfig,
    spec: ChannelSpec,
}

impl<'a> Designer<'a> {
    pub fn new(cfg: &'a ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.kind == ScenarioKind::RayleighRatio {
            return Err(Error::Config("rayleigh-ratio configs have no array families".into()));
        }
        Ok(Designer {
            cfg,
            spec: cfg.channel_spec()?,
        })
    }

    pub fn spec(&self) -> &ChannelSpec {
        &self.spec
    }

    pub fn antennas(&self, family: Family) -> usize {
        family.antennas.unwrap_or(self.cfg.array.antennas)
    }

    pub fn element_gain(&self, family: Family) -> f64 {
        let a = &self.cfg.array;
        if a.link_budget_parity {
            (a.antennas as f64 * a.element_gain / self.antennas(family) as f64).max(1.0)
        } else {
            a.element_gain
        }
    }

    fn planar(&self) -> bool {
        self.cfg.kind == ScenarioKind::Planar
    }

    pub fn regions(&self) -> Result<MovableRegions> {
        let m = self.cfg.array.antennas;
        let l = self.cfg.array.aperture;
        Ok(if self.planar() {
            let n = square_side(m).ok_or_else(|| Error::Config(format!("{m} antennas do not form a square")))?;
            MovableRegions::grid(n, n, l, l)?
        } else {
            MovableRegions::linear_segments(m, l)?
        })
    }

    pub fn ruler(&self) -> Result<RulerOutcome> {
        Ok(search_ruler(self.cfg.array.antennas, self.cfg.mra.slots, self.cfg.mra.node_budget)?)
    }

    /// Dense ULA on the pitch grid spanning the aperture, thinned greedily.
    pub fn thin(&self) -> Result<ThinOutcome> {
        let a = &self.cfg.array;
        let family = Family::new(FamilyKind::Thinned);
        let dense_count = (a.aperture / a.pitch + 1e-9).floor() as usize + 1;
        let dense = make_ula(dense_count, a.pitch)?.with_element_gain(self.element_gain(family))?;
        let objective = SumRateObjective::from_spec(
            &self.spec,
            self.cfg.seed,
            Stream::ThinningDrops,
            self.cfg.thinning.validation_drops,
        )?;
        Ok(greedy_thin(&dense, a.antennas, &ParallelSumRate(&objective), false)?)
    }

    pub fn pia(&self) -> Result<PsoOutcome> {
        let o = &self.cfg.optimizer;
        let objective =
            SumRateObjective::from_spec(&self.spec, self.cfg.seed, Stream::PiaDrops, o.pia_training_drops)?;
        let seed = stream_rng(self.cfg.seed, Stream::PiaSwarm, 0).random();
        let params = self.cfg.pso_params(o.pia_iterations, seed);
        let gain = self.element_gain(Family::new(FamilyKind::Pia));
        Ok(pso_optimize(&self.regions()?, &ParallelSumRate(&objective), &params, gain, None)?)
    }

    /// Geometry of a fixed family, filling `artifacts` with any by-products.
    /// MA yields its warm start.
    pub fn design(&self, family: Family, artifacts: &mut Artifacts) -> Result<ArrayGeometry> {
        let ctx = |source| Error::Family {
            family: family.to_string(),
            source,
        };
        self.design_inner(family, artifacts).map_err(|e| match e {
            Error::Core(source) => ctx(source),
            other => other,
        })
    }

    fn design_inner(&self, family: Family, artifacts: &mut Artifacts) -> Result<ArrayGeometry> {
        let m = self.antennas(family);
        let l = self.cfg.array.aperture;
        let gain = self.element_gain(family);
        let side = || square_side(m).ok_or_else(|| Error::Config(format!("{m} antennas do not form a square")));
        let geometry = match family.kind {
            FamilyKind::CompactUla => make_ula(m, 0.5)?,
            FamilyKind::SparseUla => make_ula(m, if m > 1 { l / (m - 1) as f64 } else { 0.5 })?,
            FamilyKind::CompactUpa => {
                let n = side()?;
                make_upa(n, n, 0.5, 0.5)?
            }
            FamilyKind::SparseUpa => {
                let n = side()?;
                let s = if n > 1 { l / (n - 1) as f64 } else { 0.5 };
                make_upa(n, n, s, s)?
            }
            FamilyKind::Mra | FamilyKind::Pmra2d => {
                let ruler = match &artifacts.ruler {
                    Some(r) => r.clone(),
                    None => self.ruler()?,
                };
                let pitch = if ruler.aperture() > 0 {
                    l / ruler.aperture() as f64
                } else {
                    self.cfg.array.pitch
                };
                let g = if family.kind == FamilyKind::Mra {
                    ruler_geometry(&ruler.marks, pitch)?
                } else {
                    let seed = stream_rng(self.cfg.seed, Stream::Permutation, 0).random();
                    let perm = best_permutation(&ruler.marks, seed);
                    make_2d_pmra(&ruler.marks, Some(&perm), pitch)?
                };
                artifacts.ruler = Some(ruler);
                g
            }
            FamilyKind::Thinned => {
                let t = match &artifacts.thinning {
                    Some(t) => t.clone(),
                    None => self.thin()?,
                };
                let g = t.geometry.clone();
                artifacts.thinning = Some(t);
                g
            }
            FamilyKind::Pia | FamilyKind::Ma => {
                let p = match &artifacts.pia {
                    Some(p) => p.clone(),
                    None => self.pia()?,
                };
                let g = p.geometry.clone();
                artifacts.pia = Some(p);
                g
            }
        };
        Ok(geometry.with_element_gain(gain)?)
    }
}

fn evaluate(drop: &DropChannel, geometry: &ArrayGeometry, index: usize) -> DropRecord {
    let ch = drop.channels(geometry);
    DropRecord {
        drop: index,
        sum_rate: mean_sum_rate(&ch),
        bound: interference_free_bound(&ch),
    }
}

fn summarize(
    family: Family,
    geometry: ArrayGeometry,
    per_drop_geometries: Option<Vec<ArrayGeometry>>,
    drops: Vec<DropRecord>,
) -> Result<FamilyResult> {
    let rates: Vec<f64> = drops.iter().map(|d| d.sum_rate).collect();
    let bounds: Vec<f64> = drops.iter().map(|d| d.bound).collect();
    Ok(FamilyResult {
        family,
        geometry,
        per_drop_geometries,
        mean_rate: mean(&rates),
        mean_bound: mean(&bounds),
        cdf: Cdf::new(&rates)?,
        drops,
    })
}

/// Runs every configured family on the same test drops.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    let designer = Designer::new(cfg)?;
    let spec = designer.spec();
    let test_drops: Vec<DropChannel> = (0..cfg.n_test_drops as u64)
        .into_par_iter()
        .map(|i| spec.realize(cfg.seed, Stream::TestDrops, i).map(|(_, c)| c))
        .collect::<std::result::Result<_, _>>()?;

    let mut artifacts = Artifacts::default();
    let mut families = Vec::with_capacity(cfg.families.len());
    for &family in &cfg.families {
        let geometry = designer.design(family, &mut artifacts)?;
        let result = if family.kind == FamilyKind::Ma {
            let regions = designer.regions()?;
            let gain = geometry.element_gain();
            let outcomes: Vec<PsoOutcome> = test_drops
                .par_iter()
                .enumerate()
                .map(|(i, d)| {
                    let seed = stream_rng(cfg.seed, Stream::MovableSwarm, i as u64).random();
                    let params = cfg.pso_params(cfg.optimizer.ma_iterations, seed);
                    optimize_ma(&regions, d, &params, Some(&geometry), gain)
                })
                .collect::<std::result::Result<_, _>>()
                .map_err(|source| Error::Family {
                    family: family.to_string(),
                    source,
                })?;
            let records = test_drops
                .iter()
                .zip(&outcomes)
                .enumerate()
                .map(|(i, (d, o))| evaluate(d, &o.geometry, i))
                .collect();
            let per_drop = outcomes.into_iter().map(|o| o.geometry).collect();
            summarize(family, geometry, Some(per_drop), records)?
        } else {
            let records = test_drops
                .par_iter()
                .enumerate()
                .map(|(i, d)| evaluate(d, &geometry, i))
                .collect();
            summarize(family, geometry, None, records)?
        };
        families.push(result);
    }
    Ok(ScenarioResult {
        config: cfg.clone(),
        families,
        artifacts,
    })
}
