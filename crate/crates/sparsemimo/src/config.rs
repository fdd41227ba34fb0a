//! Scenario configuration files.
//!
//! A config is a TOML document whose `kind` selects a table of defaults; the
//! file only needs the keys it changes. Unknown keys are rejected.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sparsemimo_core::channel::{ChannelModel, ChannelSpec, DropLayout, RicianConfig, SectorLayout};
use sparsemimo_core::optim::PsoParams;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Linear,
    Planar,
    RayleighRatio,
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Linear => "linear",
            ScenarioKind::Planar => "planar",
            ScenarioKind::RayleighRatio => "rayleigh-ratio",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    CompactUla,
    SparseUla,
    Mra,
    Thinned,
    Pia,
    Ma,
    CompactUpa,
    SparseUpa,
    Pmra2d,
}

/// A geometry family, optionally with its own antenna count (`compact-upa@64`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Family {
    pub kind: FamilyKind,
    pub antennas: Option<usize>,
}

impl Family {
    pub const fn new(kind: FamilyKind) -> Self {
        Family { kind, antennas: None }
    }

    fn base_name(self) -> &'static str {
        match self.kind {
            FamilyKind::CompactUla => "compact-ula",
            FamilyKind::SparseUla => "sparse-ula",
            FamilyKind::Mra => "mra",
            FamilyKind::Thinned => "thinned",
            FamilyKind::Pia => "pia",
            FamilyKind::Ma => "ma",
            FamilyKind::CompactUpa => "compact-upa",
            FamilyKind::SparseUpa => "sparse-upa",
            FamilyKind::Pmra2d => "pmra-2d",
        }
    }

    pub fn supports(self, kind: ScenarioKind) -> bool {
        use FamilyKind::*;
        match kind {
            ScenarioKind::Linear => {
                matches!(self.kind, CompactUla | SparseUla | Mra | Thinned | Pia | Ma)
                    && (self.antennas.is_none() || matches!(self.kind, CompactUla | SparseUla))
            }
            ScenarioKind::Planar => {
                matches!(self.kind, CompactUpa | SparseUpa | Pmra2d | Pia | Ma)
                    && (self.antennas.is_none() || matches!(self.kind, CompactUpa | SparseUpa))
            }
            ScenarioKind::RayleighRatio => false,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.base_name())?;
        if let Some(m) = self.antennas {
            write!(f, "@{m}")?;
        }
        Ok(())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (base, count) = match s.split_once('@') {
            Some((b, c)) => {
                let m = c
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad antenna count in family {s:?}")))?;
                (b, Some(m))
            }
            None => (s, None),
        };
        let kind = match base {
            "compact-ula" => FamilyKind::CompactUla,
            "sparse-ula" => FamilyKind::SparseUla,
            "mra" => FamilyKind::Mra,
            "thinned" => FamilyKind::Thinned,
            "pia" => FamilyKind::Pia,
            "ma" => FamilyKind::Ma,
            "compact-upa" => FamilyKind::CompactUpa,
            "sparse-upa" => FamilyKind::SparseUpa,
            "pmra-2d" => FamilyKind::Pmra2d,
            _ => return Err(Error::Config(format!("unknown family {s:?}"))),
        };
        Ok(Family { kind, antennas: count })
    }
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayConfig {
    /// Antennas in every family without an explicit `@M`.
    pub antennas: usize,
    /// Aperture length (linear) or square side (planar), in wavelengths.
    pub aperture: f64,
    pub element_gain: f64,
    /// Scale each family's element gain so that M·G matches `antennas · element_gain`.
    pub link_budget_parity: bool,
    /// Grid pitch of the thinning and ruler grids, in wavelengths.
    pub pitch: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UsersConfig {
    pub count: usize,
    /// Linear layout: per-antenna SNR.
    pub snr_db: f64,
    pub angle_lo_deg: f64,
    pub angle_hi_deg: f64,
    /// Planar layout: ground sector seen from a mast.
    pub sector_width_deg: f64,
    pub dist_lo_m: f64,
    pub dist_hi_m: f64,
    pub bs_height_m: f64,
    pub snr_at_dist_lo_db: f64,
    pub pathloss_exponent: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Los,
    Rician,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub model: ModelKind,
    pub k_factor_db: f64,
    pub clusters: usize,
    pub delay_spread_s: f64,
    pub azimuth_spread_deg: f64,
    pub elevation_spread_deg: f64,
    pub subcarriers: usize,
    pub subcarrier_spacing_hz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub swarm_size: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub velocity_clamp: f64,
    pub init_retries: usize,
    pub pia_iterations: usize,
    pub pia_training_drops: usize,
    pub ma_iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThinningConfig {
    pub validation_drops: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MraConfig {
    /// Grid slots available to the ruler search; the ruler is then stretched
    /// to fill the aperture.
    pub slots: usize,
    pub node_budget: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioConfig {
    pub ratios: Vec<usize>,
    pub users: Vec<usize>,
    pub snr_db: f64,
    pub drops: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub seed: u64,
    pub n_test_drops: usize,
    pub families: Vec<Family>,
    pub array: ArrayConfig,
    pub users: UsersConfig,
    pub channel: ChannelConfig,
    pub optimizer: OptimizerConfig,
    pub thinning: ThinningConfig,
    pub mra: MraConfig,
    pub ratio: RatioConfig,
}

impl ScenarioConfig {
    pub fn defaults(kind: ScenarioKind) -> Self {
        let planar = kind == ScenarioKind::Planar;
        let families = match kind {
            ScenarioKind::Linear => ["compact-ula", "sparse-ula", "mra", "thinned", "pia", "ma"].as_slice(),
            ScenarioKind::Planar => ["compact-upa", "compact-upa@64", "sparse-upa", "pmra-2d", "pia", "ma"].as_slice(),
            ScenarioKind::RayleighRatio => [].as_slice(),
        };
        let pso = PsoParams::default();
        ScenarioConfig {
            kind,
            seed: 1,
            n_test_drops: if planar { 300 } else { 500 },
            families: families.iter().map(|f| f.parse().expect("built-in family")).collect(),
            array: ArrayConfig {
                antennas: if planar { 16 } else { 8 },
                aperture: 20.0,
                element_gain: if planar { 4.0 } else { 1.0 },
                link_budget_parity: true,
                pitch: 0.5,
            },
            users: UsersConfig {
                count: if planar { 10 } else { 5 },
                snr_db: 10.0,
                angle_lo_deg: -45.0,
                angle_hi_deg: 45.0,
                sector_width_deg: 120.0,
                dist_lo_m: 100.0,
                dist_hi_m: 200.0,
                bs_height_m: 25.0,
                snr_at_dist_lo_db: 22.0,
                pathloss_exponent: 5.0,
            },
            channel: ChannelConfig {
                model: if planar { ModelKind::Rician } else { ModelKind::Los },
                k_factor_db: 8.0,
                clusters: 6,
                delay_spread_s: 200e-9,
                azimuth_spread_deg: 10.0,
                elevation_spread_deg: 5.0,
                subcarriers: if planar { 50 } else { 1 },
                subcarrier_spacing_hz: 15e3,
            },
            optimizer: OptimizerConfig {
                swarm_size: pso.swarm_size,
                inertia: pso.inertia,
                cognitive: pso.cognitive,
                social: pso.social,
                velocity_clamp: pso.velocity_clamp,
                init_retries: pso.init_retries,
                pia_iterations: pso.iterations,
                pia_training_drops: 1000,
                ma_iterations: PsoParams::movable().iterations,
            },
            thinning: ThinningConfig { validation_drops: 200 },
            mra: MraConfig {
                slots: if planar { 256 } else { 41 },
                node_budget: if planar { 10_000_000 } else { 200_000_000 },
            },
            ratio: RatioConfig {
                ratios: vec![1, 4, 8],
                users: (2..=12).collect(),
                snr_db: 10.0,
                drops: 500,
            },
        }
    }

    /// Parses `text` over the defaults of its `kind`.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let user: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        Self::from_table(user)
    }

    pub fn from_table(user: toml::Table) -> Result<Self> {
        let kind: ScenarioKind = match user.get("kind") {
            Some(v) => v
                .clone()
                .try_into()
                .map_err(|e: toml::de::Error| Error::Config(format!("kind: {e}")))?,
            None => return Err(Error::Config("missing key `kind`".into())),
        };
        let mut merged = toml::Table::try_from(Self::defaults(kind)).map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut merged, user);
        let cfg: Self = toml::Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// The fully resolved config, every default included.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.kind != ScenarioKind::RayleighRatio {
            if self.n_test_drops == 0 {
                return bad("n_test_drops must be at least 1".into());
            }
            for f in &self.families {
                if !f.supports(self.kind) {
                    return bad(format!("family {f} is not available in a {} scenario", self.kind));
                }
            }
            let a = &self.array;
            if a.antennas == 0 || !(a.aperture > 0.0) || !(a.element_gain >= 1.0) || !(a.pitch > 0.0) {
                return bad("array: antennas, aperture and pitch must be positive, element_gain ≥ 1".into());
            }
            if self.kind == ScenarioKind::Planar {
                for m in self.families.iter().map(|f| f.antennas.unwrap_or(a.antennas)) {
                    if square_side(m).is_none() {
                        return bad(format!("planar arrays need a square antenna count, got {m}"));
                    }
                }
            }
            if self.users.count == 0 {
                return bad("users.count must be at least 1".into());
            }
        } else {
            if self.ratio.ratios.contains(&0) || self.ratio.users.contains(&0) {
                return bad("ratio: ratios and user counts must be at least 1".into());
            }
            if self.ratio.drops == 0 {
                return bad("ratio.drops must be at least 1".into());
            }
        }
        Ok(())
    }

    pub fn channel_spec(&self) -> Result<ChannelSpec> {
        let u = &self.users;
        let layout = match self.kind {
            ScenarioKind::Planar => DropLayout::Sector {
                users: u.count,
                layout: SectorLayout {
                    sector_width: u.sector_width_deg.to_radians(),
                    dist_lo: u.dist_lo_m,
                    dist_hi: u.dist_hi_m,
                    bs_height: u.bs_height_m,
                    snr_at_dist_lo_db: u.snr_at_dist_lo_db,
                    pathloss_exponent: u.pathloss_exponent,
                },
            },
            _ => DropLayout::Linear {
                users: u.count,
                angle_lo: u.angle_lo_deg.to_radians(),
                angle_hi: u.angle_hi_deg.to_radians(),
                snr_db: u.snr_db,
            },
        };
        let c = &self.channel;
        let model = match c.model {
            ModelKind::Los => ChannelModel::Los,
            ModelKind::Rician => {
                let config = RicianConfig {
                    k_factor_db: c.k_factor_db,
                    clusters: c.clusters,
                    delay_spread: c.delay_spread_s,
                    azimuth_spread: c.azimuth_spread_deg.to_radians(),
                    elevation_spread: c.elevation_spread_deg.to_radians(),
                };
                config.validate()?;
                ChannelModel::Rician {
                    config,
                    subcarriers: c.subcarriers,
                    subcarrier_spacing: c.subcarrier_spacing_hz,
                }
            }
        };
        if let DropLayout::Linear { angle_lo, angle_hi, .. } = layout {
            if !(angle_lo < angle_hi) || angle_lo < -PI / 2.0 || angle_hi > PI / 2.0 {
                return Err(Error::Config("users: need -90 ≤ angle_lo_deg < angle_hi_deg ≤ 90".into()));
            }
        }
        Ok(ChannelSpec { layout, model })
    }

    pub fn pso_params(&self, iterations: usize, seed: u64) -> PsoParams {
        let o = &self.optimizer;
        PsoParams {
            swarm_size: o.swarm_size,
            iterations,
            inertia: o.inertia,
            cognitive: o.cognitive,
            social: o.social,
            velocity_clamp: o.velocity_clamp,
            seed,
            init_retries: o.init_retries,
        }
    }
}

pub(crate) fn square_side(m: usize) -> Option<usize> {
    let n = (m as f64).sqrt().round() as usize;
    (n * n == m && n > 0).then_some(n)
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
