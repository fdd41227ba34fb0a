//! Far-field plane waves: directions, steering vectors and beampatterns.
//!
//! A direction `(φ, θ)` maps to sine-space coordinates
//! `u = sin φ cos θ` (along x) and `v = sin θ` (along y), and antenna `m` at
//! `(x, y)` wavelengths observes the phase `2π(x·u + y·v)`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Position};

const ANGLE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    /// Azimuth relative to the array normal, in `[−π/2, π/2]`.
    pub azimuth: f64,
    /// Elevation, in `[−π/2, π/2]`; zero for linear scenarios.
    pub elevation: f64,
}

impl Direction {
    pub fn new(azimuth: f64, elevation: f64) -> Result<Self> {
        let ok = |a: f64| a.is_finite() && a.abs() <= FRAC_PI_2 + ANGLE_TOL;
        if !ok(azimuth) || !ok(elevation) {
            return Err(Error::InvalidArgument(alloc::format!(
                "direction ({azimuth}, {elevation}) outside [-pi/2, pi/2]"
            )));
        }
        Ok(Direction { azimuth, elevation })
    }

    /// Horizontal-only direction (elevation 0). Out-of-range input is clamped.
    pub fn azimuth(azimuth: f64) -> Self {
        Direction {
            azimuth: azimuth.clamp(-FRAC_PI_2, FRAC_PI_2),
            elevation: 0.0,
        }
    }

    /// Builds a direction with both angles clamped into range.
    pub fn clamped(azimuth: f64, elevation: f64) -> Self {
        Direction {
            azimuth: azimuth.clamp(-FRAC_PI_2, FRAC_PI_2),
            elevation: elevation.clamp(-FRAC_PI_2, FRAC_PI_2),
        }
    }

    pub const fn broadside() -> Self {
        Direction {
            azimuth: 0.0,
            elevation: 0.0,
        }
    }

    /// `(sin φ cos θ, sin θ)`.
    pub fn sine_components(&self) -> (f64, f64) {
        let (sa, _) = libm::sincos(self.azimuth);
        let (se, ce) = libm::sincos(self.elevation);
        (sa * ce, se)
    }
}

/// Apparent spatial frequencies in cycles per unit length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialFrequency {
    pub horizontal: f64,
    pub vertical: f64,
}

/// `sin φ / λ` along the horizontal axis and `sin θ / λ` along the vertical one.
pub fn spatial_frequency(direction: &Direction, wavelength: f64) -> SpatialFrequency {
    SpatialFrequency {
        horizontal: libm::sin(direction.azimuth) / wavelength,
        vertical: libm::sin(direction.elevation) / wavelength,
    }
}

#[inline]
pub(crate) fn cis(phase: f64) -> Complex64 {
    let (s, c) = libm::sincos(phase);
    Complex64::new(c, s)
}

/// Writes `exp(j2π(x·u + y·v))` for every position into `out`.
#[inline]
pub(crate) fn steering_into(positions: &[Position], u: f64, v: f64, out: &mut [Complex64]) {
    for (o, p) in out.iter_mut().zip(positions) {
        *o = cis(2.0 * PI * (p.x * u + p.y * v));
    }
}

/// Unit-modulus array response toward `direction`.
pub fn steering_vector(geometry: &ArrayGeometry, direction: &Direction) -> Vec<Complex64> {
    let (u, v) = direction.sine_components();
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); geometry.len()];
    steering_into(geometry.positions(), u, v, &mut out);
    out
}

/// Matched-filter beampattern in linear power, peaking at `M·G` toward `steer`.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamPattern {
    pub directions: Vec<Direction>,
    pub gains: Vec<f64>,
    pub steer: Direction,
    /// `M·G`, the coherent peak.
    pub peak_gain: f64,
}

impl BeamPattern {
    pub fn gains_db(&self) -> Vec<f64> {
        self.gains.iter().map(|&g| 10.0 * libm::log10(g)).collect()
    }
}

/// `gain(d) = G·|a(steer)ᴴ a(d)|² / M` over the grid.
pub fn beampattern(geometry: &ArrayGeometry, steer: &Direction, grid: &[Direction]) -> Result<BeamPattern> {
    if grid.is_empty() {
        return Err(Error::invalid("empty angle grid"));
    }
    let (us, vs) = steer.sine_components();
    let m = geometry.len() as f64;
    let g = geometry.element_gain();
    let gains = grid
        .iter()
        .map(|d| {
            let (u, v) = d.sine_components();
            let (du, dv) = (u - us, v - vs);
            let mut acc = Complex64::new(0.0, 0.0);
            for p in geometry.positions() {
                acc += cis(2.0 * PI * (p.x * du + p.y * dv));
            }
            g * acc.norm_sqr() / m
        })
        .collect();
    Ok(BeamPattern {
        directions: grid.to_vec(),
        gains,
        steer: *steer,
        peak_gain: m * g,
    })
}

/// `n` azimuths uniformly spaced in `sin φ` over the open interval `(−1, 1)`.
pub fn sine_space_grid(n: usize) -> Vec<Direction> {
    (0..n)
        .map(|i| {
            let s = -1.0 + (2 * i + 1) as f64 / n as f64;
            Direction::azimuth(libm::asin(s))
        })
        .collect()
}

pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const DEFAULT_GRATING_TOLERANCE_DB: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LobeKind {
    Main,
    Grating,
    Side,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lobe {
    pub kind: LobeKind,
    /// Grid index of the lobe maximum (centre of a flat top).
    pub index: usize,
    pub azimuth: f64,
    pub gain: f64,
    /// Level relative to the pattern maximum, in dB (≤ 0).
    pub level_db: f64,
    /// −3 dB width in radians; main lobe only.
    pub half_power_width: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LobeReport {
    pub peak: f64,
    pub lobes: Vec<Lobe>,
}

impl LobeReport {
    pub fn main(&self) -> Option<&Lobe> {
        self.lobes.iter().find(|l| l.kind == LobeKind::Main)
    }

    pub fn grating(&self) -> impl Iterator<Item = &Lobe> {
        self.lobes.iter().filter(|l| l.kind == LobeKind::Grating)
    }

    pub fn sidelobes(&self) -> impl Iterator<Item = &Lobe> {
        self.lobes.iter().filter(|l| l.kind == LobeKind::Side)
    }
}

/// Finds the local maxima of an azimuth-ordered pattern and classifies them.
///
/// The main lobe is the one whose region (between the neighbouring minima)
/// contains the steering azimuth. Other maxima within `grating_tolerance_db`
/// of the array gain `M·G` are grating lobes; the rest are sidelobes. Levels
/// are reported relative to `M·G`. Flat tops
/// count as a single maximum, so an isotropic pattern yields one main lobe.
pub fn find_lobes(pattern: &BeamPattern, grating_tolerance_db: f64) -> Result<LobeReport> {
    let g = &pattern.gains;
    let n = g.len();
    if n < 3 {
        return Err(Error::invalid("lobe search needs at least three grid points"));
    }
    let peak = pattern.peak_gain;
    let top = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * top.max(f64::MIN_POSITIVE);
    let eq = |a: f64, b: f64| (a - b).abs() <= tol;

    // Plateau maxima: runs [s, e] of equal values whose outside neighbours are lower.
    let mut maxima: Vec<(usize, usize)> = Vec::new();
    let mut s = 0;
    while s < n {
        let mut e = s;
        while e + 1 < n && eq(g[e + 1], g[s]) {
            e += 1;
        }
        let left_lower = s == 0 || g[s - 1] < g[s];
        let right_lower = e == n - 1 || g[e + 1] < g[e];
        if left_lower && right_lower {
            maxima.push((s, e));
        }
        s = e + 1;
    }

    let az: Vec<f64> = pattern.directions.iter().map(|d| d.azimuth).collect();
    // Region of each maximum: from the minimum to its left to the minimum to its right.
    let mut regions = Vec::with_capacity(maxima.len());
    for (k, &(s, e)) in maxima.iter().enumerate() {
        let lo = if k == 0 { 0 } else { argmin(g, maxima[k - 1].1, s) };
        let hi = if k + 1 == maxima.len() { n - 1 } else { argmin(g, e, maxima[k + 1].0) };
        regions.push((lo, hi));
    }
    let steer = pattern.steer.azimuth;
    let main_idx = regions
        .iter()
        .position(|&(lo, hi)| az[lo] <= steer && steer <= az[hi])
        .unwrap_or_else(|| {
            // Steer outside the grid: nearest maximum.
            let mut best = 0;
            for (k, &(s, e)) in maxima.iter().enumerate() {
                let c = (s + e) / 2;
                let cb = (maxima[best].0 + maxima[best].1) / 2;
                if (az[c] - steer).abs() < (az[cb] - steer).abs() {
                    best = k;
                }
            }
            best
        });

    let threshold = peak * libm::pow(10.0, -grating_tolerance_db / 10.0);
    let lobes = maxima
        .iter()
        .enumerate()
        .map(|(k, &(s, e))| {
            let c = (s + e) / 2;
            let kind = if k == main_idx {
                LobeKind::Main
            } else if g[c] >= threshold {
                LobeKind::Grating
            } else {
                LobeKind::Side
            };
            let half_power_width = (kind == LobeKind::Main).then(|| half_power_width(g, &az, s, e));
            Lobe {
                kind,
                index: c,
                azimuth: az[c],
                gain: g[c],
                level_db: 10.0 * libm::log10(g[c] / peak),
                half_power_width,
            }
        })
        .collect();
    Ok(LobeReport { peak, lobes })
}

fn argmin(g: &[f64], from: usize, to: usize) -> usize {
    let mut best = from;
    for i in from..=to {
        if g[i] < g[best] {
            best = i;
        }
    }
    best
}

/// Width between the −3 dB crossings around a maximum, linearly interpolated
/// in angle; a crossing that does not occur before the grid edge uses the edge.
fn half_power_width(g: &[f64], az: &[f64], s: usize, e: usize) -> f64 {
    let half = g[s] / 2.0;
    let mut left = az[0];
    let mut i = s;
    while i > 0 {
        if g[i - 1] < half {
            let t = (g[i] - half) / (g[i] - g[i - 1]);
            left = az[i] + t * (az[i - 1] - az[i]);
            break;
        }
        i -= 1;
    }
    let n = g.len();
    let mut right = az[n - 1];
    let mut i = e;
    while i + 1 < n {
        if g[i + 1] < half {
            let t = (g[i] - half) / (g[i] - g[i + 1]);
            right = az[i] + t * (az[i + 1] - az[i]);
            break;
        }
        i += 1;
    }
    right - left
}
