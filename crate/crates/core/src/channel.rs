//! User drops and channel generation.
//!
//! Per-user SNRs in a [`UserDrop`] are per-antenna SNRs for a unit-gain
//! element; channel generators multiply by the geometry's element gain `G`,
//! so `E‖h_k‖² = M·G·ρ_k`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::linalg::CMatrix;
use crate::rng::{stream_rng, Stream};
use crate::wavefield::{cis, steering_into, Direction};

pub const DEFAULT_CARRIER_HZ: f64 = 3.0e9;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct UserDrop {
    pub directions: Vec<Direction>,
    /// Ground distances in metres (sector drops only).
    pub distances: Option<Vec<f64>>,
    /// Linear per-antenna SNR for a unit-gain element.
    pub snrs: Vec<f64>,
}

impl UserDrop {
    pub fn new(directions: Vec<Direction>, distances: Option<Vec<f64>>, snrs: Vec<f64>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::invalid("a drop needs at least one user"));
        }
        if snrs.len() != directions.len() || distances.as_ref().is_some_and(|d| d.len() != directions.len()) {
            return Err(Error::invalid("per-user vectors differ in length"));
        }
        if snrs.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::invalid("SNRs must be positive and finite"));
        }
        Ok(UserDrop {
            directions,
            distances,
            snrs,
        })
    }

    pub fn users(&self) -> usize {
        self.directions.len()
    }
}

/// `users` iid azimuths uniform in `[angle_lo, angle_hi)`, all at `snr_db`.
pub fn drop_linear<R: Rng + ?Sized>(
    users: usize,
    angle_lo: f64,
    angle_hi: f64,
    snr_db: f64,
    rng: &mut R,
) -> Result<UserDrop> {
    if users == 0 {
        return Err(Error::invalid("K must be at least 1"));
    }
    if !(angle_lo < angle_hi) {
        return Err(Error::invalid("angle_lo must be below angle_hi"));
    }
    let directions = (0..users)
        .map(|_| {
            let u: f64 = rng.random();
            Direction::new(angle_lo + (angle_hi - angle_lo) * u, 0.0)
        })
        .collect::<Result<Vec<_>>>()?;
    UserDrop::new(directions, None, vec![db_to_linear(snr_db); users])
}

/// Ground users in an annular sector facing the array, seen from a mast.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorLayout {
    /// Full sector width in radians (at most π).
    pub sector_width: f64,
    pub dist_lo: f64,
    pub dist_hi: f64,
    pub bs_height: f64,
    pub snr_at_dist_lo_db: f64,
    pub pathloss_exponent: f64,
}

impl Default for SectorLayout {
    fn default() -> Self {
        SectorLayout {
            sector_width: 2.0 * PI / 3.0,
            dist_lo: 100.0,
            dist_hi: 200.0,
            bs_height: 25.0,
            snr_at_dist_lo_db: 22.0,
            pathloss_exponent: 5.0,
        }
    }
}

impl SectorLayout {
    fn check(&self) -> Result<()> {
        if !(self.dist_lo > 0.0 && self.dist_lo < self.dist_hi && self.dist_hi.is_finite()) {
            return Err(Error::invalid("need 0 < dist_lo < dist_hi"));
        }
        if !(self.sector_width > 0.0 && self.sector_width <= PI) {
            return Err(Error::invalid("sector width must lie in (0, pi]"));
        }
        if !(self.bs_height >= 0.0 && self.bs_height.is_finite()) {
            return Err(Error::invalid("BS height must be non-negative"));
        }
        if !(self.pathloss_exponent > 0.0 && self.snr_at_dist_lo_db.is_finite()) {
            return Err(Error::invalid("invalid path-loss parameters"));
        }
        Ok(())
    }

    /// Log-distance law anchored at `dist_lo`.
    pub fn snr_db_at(&self, ground_distance: f64) -> f64 {
        self.snr_at_dist_lo_db - 10.0 * self.pathloss_exponent * libm::log10(ground_distance / self.dist_lo)
    }

    /// Direction of a user at `bearing` from boresight; users sit below the array.
    pub fn direction_of(&self, ground_distance: f64, bearing: f64) -> Direction {
        Direction::clamped(bearing, -libm::atan2(self.bs_height, ground_distance))
    }
}

/// Uniform-area sampling of the annular sector.
pub fn drop_sector<R: Rng + ?Sized>(users: usize, layout: &SectorLayout, rng: &mut R) -> Result<UserDrop> {
    if users == 0 {
        return Err(Error::invalid("K must be at least 1"));
    }
    layout.check()?;
    let (lo2, hi2) = (layout.dist_lo * layout.dist_lo, layout.dist_hi * layout.dist_hi);
    let mut directions = Vec::with_capacity(users);
    let mut distances = Vec::with_capacity(users);
    let mut snrs = Vec::with_capacity(users);
    for _ in 0..users {
        let a: f64 = rng.random();
        let b: f64 = rng.random();
        let r = libm::sqrt(lo2 + a * (hi2 - lo2));
        let bearing = (b - 0.5) * layout.sector_width;
        directions.push(layout.direction_of(r, bearing));
        distances.push(r);
        snrs.push(db_to_linear(layout.snr_db_at(r)));
    }
    UserDrop::new(directions, Some(distances), snrs)
}

/// Per-subcarrier `M×K` channel matrices for one drop, noise-normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSet {
    pub matrices: Vec<CMatrix>,
    pub subcarrier_spacing: f64,
    pub carrier_frequency: f64,
}

impl ChannelSet {
    pub fn narrowband(h: CMatrix) -> Self {
        ChannelSet {
            matrices: vec![h],
            subcarrier_spacing: 0.0,
            carrier_frequency: DEFAULT_CARRIER_HZ,
        }
    }

    pub fn antennas(&self) -> usize {
        self.matrices[0].rows()
    }

    pub fn users(&self) -> usize {
        self.matrices[0].cols()
    }

    pub fn subcarriers(&self) -> usize {
        self.matrices.len()
    }
}

/// iid `CN(0, ρ_k)` entries in column `k`.
pub fn channel_iid_rayleigh<R: Rng + ?Sized>(antennas: usize, snrs: &[f64], rng: &mut R) -> ChannelSet {
    let mut h = CMatrix::zeros(antennas, snrs.len());
    for (k, &rho) in snrs.iter().enumerate() {
        let s = libm::sqrt(rho / 2.0);
        for v in h.column_mut(k) {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *v = Complex64::new(s * re, s * im);
        }
    }
    ChannelSet::narrowband(h)
}

/// Pure line of sight: `h_k = √(G ρ_k)·a(direction_k)`.
pub fn channel_los(geometry: &ArrayGeometry, drop: &UserDrop) -> ChannelSet {
    let m = geometry.len();
    let mut h = CMatrix::zeros(m, drop.users());
    for (k, (d, &rho)) in drop.directions.iter().zip(&drop.snrs).enumerate() {
        let (u, v) = d.sine_components();
        steering_into(geometry.positions(), u, v, h.column_mut(k));
        h.scale_column(k, libm::sqrt(rho * geometry.element_gain()));
    }
    ChannelSet::narrowband(h)
}

/// Cluster parameters of the wideband Rician model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RicianConfig {
    pub k_factor_db: f64,
    pub clusters: usize,
    /// Cluster delays are uniform in `[0, delay_spread]` seconds.
    pub delay_spread: f64,
    /// Half-width of the uniform azimuth offset of each cluster, radians.
    pub azimuth_spread: f64,
    /// Half-width of the uniform elevation offset of each cluster, radians.
    pub elevation_spread: f64,
}

impl Default for RicianConfig {
    fn default() -> Self {
        RicianConfig {
            k_factor_db: 8.0,
            clusters: 6,
            delay_spread: 200e-9,
            azimuth_spread: 10f64.to_radians(),
            elevation_spread: 5f64.to_radians(),
        }
    }
}

impl RicianConfig {
    pub fn validate(&self) -> Result<()> {
        if self.clusters == 0 {
            return Err(Error::invalid("at least one cluster"));
        }
        if !self.k_factor_db.is_finite() {
            return Err(Error::invalid("k-factor must be finite"));
        }
        if !(self.delay_spread >= 0.0 && self.delay_spread.is_finite()) {
            return Err(Error::invalid("delay spread must be non-negative"));
        }
        if !(self.azimuth_spread >= 0.0 && self.elevation_spread >= 0.0) {
            return Err(Error::invalid("angular spreads must be non-negative"));
        }
        Ok(())
    }

    pub fn k_factor(&self) -> f64 {
        db_to_linear(self.k_factor_db)
    }

    /// Share of the channel power carried by the LOS path, `κ/(κ+1)`.
    pub fn los_fraction(&self) -> f64 {
        let k = self.k_factor();
        k / (k + 1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
struct UserPaths {
    /// Sine-space `(u, v)` of the LOS path followed by the clusters.
    sine: Vec<(f64, f64)>,
    /// Complex path weights, subcarrier-major: `weights[s·P + p]`. Includes √ρ_k.
    weights: Vec<Complex64>,
}

/// Small-scale state of one wideband Rician drop. It fixes everything but the
/// array geometry, so many geometries can be evaluated on the same fading.
#[derive(Clone, Debug, PartialEq)]
pub struct RicianRealization {
    users: Vec<UserPaths>,
    subcarriers: usize,
    subcarrier_spacing: f64,
}

impl RicianRealization {
    pub fn draw<R: Rng + ?Sized>(
        drop: &UserDrop,
        cfg: &RicianConfig,
        subcarriers: usize,
        subcarrier_spacing: f64,
        rng: &mut R,
    ) -> Result<Self> {
        cfg.validate()?;
        if subcarriers == 0 {
            return Err(Error::invalid("at least one subcarrier"));
        }
        let kappa = cfg.k_factor();
        let c = cfg.clusters;
        let los_amp = libm::sqrt(kappa / (kappa + 1.0));
        let nlos_amp = libm::sqrt(1.0 / ((kappa + 1.0) * c as f64));
        let paths = c + 1;
        let users = drop
            .directions
            .iter()
            .zip(&drop.snrs)
            .map(|(dir, &rho)| {
                let amp = libm::sqrt(rho);
                let mut sine = Vec::with_capacity(paths);
                sine.push(dir.sine_components());
                let mut gains = Vec::with_capacity(c);
                let mut delays = Vec::with_capacity(c);
                for _ in 0..c {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    // Unit-variance circularly symmetric gain.
                    gains.push(Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2);
                    let da = (rng.random::<f64>() * 2.0 - 1.0) * cfg.azimuth_spread;
                    let de = (rng.random::<f64>() * 2.0 - 1.0) * cfg.elevation_spread;
                    sine.push(Direction::clamped(dir.azimuth + da, dir.elevation + de).sine_components());
                    delays.push(rng.random::<f64>() * cfg.delay_spread);
                }
                let mut weights = Vec::with_capacity(subcarriers * paths);
                for s in 0..subcarriers {
                    let f = s as f64 * subcarrier_spacing;
                    weights.push(Complex64::new(amp * los_amp, 0.0));
                    for (g, tau) in gains.iter().zip(&delays) {
                        weights.push(g * cis(-2.0 * PI * f * tau) * (amp * nlos_amp));
                    }
                }
                UserPaths { sine, weights }
            })
            .collect();
        Ok(RicianRealization {
            users,
            subcarriers,
            subcarrier_spacing,
        })
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    /// Channel matrices of this realization seen by `geometry`.
    pub fn channels(&self, geometry: &ArrayGeometry) -> ChannelSet {
        let m = geometry.len();
        let k = self.users.len();
        let gain = libm::sqrt(geometry.element_gain());
        let mut matrices = vec![CMatrix::zeros(m, k); self.subcarriers];
        let mut steer: Vec<Complex64> = Vec::new();
        for (ki, user) in self.users.iter().enumerate() {
            let p = user.sine.len();
            steer.clear();
            steer.resize(p * m, Complex64::new(0.0, 0.0));
            for (pi, &(u, v)) in user.sine.iter().enumerate() {
                steering_into(geometry.positions(), u, v, &mut steer[pi * m..(pi + 1) * m]);
            }
            for (s, h) in matrices.iter_mut().enumerate() {
                let w = &user.weights[s * p..(s + 1) * p];
                let col = h.column_mut(ki);
                for (pi, wp) in w.iter().enumerate() {
                    let wp = wp * gain;
                    for (c, a) in col.iter_mut().zip(&steer[pi * m..(pi + 1) * m]) {
                        *c += wp * a;
                    }
                }
            }
        }
        ChannelSet {
            matrices,
            subcarrier_spacing: self.subcarrier_spacing,
            carrier_frequency: DEFAULT_CARRIER_HZ,
        }
    }
}

/// `h_k(f_s) = √ρ_k[√(κ/(κ+1))·a(dir_k) + √(1/((κ+1)C))·Σ_c g_kc·a(dir_kc)·e^{−j2π f_s τ_kc}]`
/// with `f_s = s·subcarrier_spacing`, scaled by `√G`.
pub fn channel_rician_wideband<R: Rng + ?Sized>(
    geometry: &ArrayGeometry,
    drop: &UserDrop,
    cfg: &RicianConfig,
    subcarriers: usize,
    subcarrier_spacing: f64,
    rng: &mut R,
) -> Result<ChannelSet> {
    Ok(RicianRealization::draw(drop, cfg, subcarriers, subcarrier_spacing, rng)?.channels(geometry))
}

/// Geometry-dependent channel model used by scenarios and optimizers.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelModel {
    Los,
    Rician {
        config: RicianConfig,
        subcarriers: usize,
        subcarrier_spacing: f64,
    },
}

/// How user positions are drawn.
#[derive(Clone, Debug, PartialEq)]
pub enum DropLayout {
    Linear {
        users: usize,
        angle_lo: f64,
        angle_hi: f64,
        snr_db: f64,
    },
    Sector {
        users: usize,
        layout: SectorLayout,
    },
}

impl DropLayout {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<UserDrop> {
        match *self {
            DropLayout::Linear {
                users,
                angle_lo,
                angle_hi,
                snr_db,
            } => drop_linear(users, angle_lo, angle_hi, snr_db, rng),
            DropLayout::Sector { users, ref layout } => drop_sector(users, layout, rng),
        }
    }

    pub fn users(&self) -> usize {
        match *self {
            DropLayout::Linear { users, .. } | DropLayout::Sector { users, .. } => users,
        }
    }
}

/// Everything random about one drop, independent of the array.
#[derive(Clone, Debug, PartialEq)]
pub enum DropChannel {
    Los(UserDrop),
    Rician(RicianRealization),
}

impl DropChannel {
    pub fn channels(&self, geometry: &ArrayGeometry) -> ChannelSet {
        match self {
            DropChannel::Los(drop) => channel_los(geometry, drop),
            DropChannel::Rician(r) => r.channels(geometry),
        }
    }
}

/// Drop layout plus channel model: a reproducible source of [`DropChannel`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    pub layout: DropLayout,
    pub model: ChannelModel,
}

impl ChannelSpec {
    /// Drop `index` of `stream`, drawn from `stream_rng(seed, stream, index)`.
    pub fn realize(&self, seed: u64, stream: Stream, index: u64) -> Result<(UserDrop, DropChannel)> {
        let mut rng = stream_rng(seed, stream, index);
        let drop = self.layout.draw(&mut rng)?;
        let ch = match &self.model {
            ChannelModel::Los => DropChannel::Los(drop.clone()),
            ChannelModel::Rician {
                config,
                subcarriers,
                subcarrier_spacing,
            } => DropChannel::Rician(RicianRealization::draw(
                &drop,
                config,
                *subcarriers,
                *subcarrier_spacing,
                &mut rng,
            )?),
        };
        Ok((drop, ch))
    }

    /// Drops `0..n` of `stream`.
    pub fn realize_many(&self, seed: u64, stream: Stream, n: usize) -> Result<Vec<DropChannel>> {
        (0..n as u64)
            .map(|i| self.realize(seed, stream, i).map(|(_, c)| c))
            .collect()
    }
}
