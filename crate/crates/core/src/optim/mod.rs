//! Geometry optimization: greedy thinning, particle-swarm placement of a
//! pre-optimized irregular array (PIA), and per-drop movable antennas (MA).

mod pso;
mod thin;

pub use pso::{pso_optimize, PsoOutcome, PsoParams};
pub use thin::{greedy_thin, ThinOutcome, ThinStep};

use alloc::format;
use alloc::vec::Vec;

use crate::channel::{ChannelSpec, DropChannel};
use crate::error::{Error, Result};
use crate::geometry::{ApertureBox, ArrayGeometry};
use crate::mimo::mean_sum_rate;
use crate::rng::Stream;

/// Quantity to maximize over array geometries.
pub trait Objective {
    fn evaluate(&self, geometry: &ArrayGeometry) -> Result<f64>;

    /// Evaluates several candidates. Implementations may run them concurrently
    /// but must return results in input order.
    fn evaluate_batch(&self, geometries: &[ArrayGeometry]) -> Result<Vec<f64>> {
        geometries.iter().map(|g| self.evaluate(g)).collect()
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn evaluate(&self, geometry: &ArrayGeometry) -> Result<f64> {
        (**self).evaluate(geometry)
    }

    fn evaluate_batch(&self, geometries: &[ArrayGeometry]) -> Result<Vec<f64>> {
        (**self).evaluate_batch(geometries)
    }
}

/// Adapts a plain function into an [`Objective`].
pub struct FnObjective<F>(pub F);

impl<F: Fn(&ArrayGeometry) -> f64> Objective for FnObjective<F> {
    fn evaluate(&self, geometry: &ArrayGeometry) -> Result<f64> {
        Ok((self.0)(geometry))
    }
}

/// Mean MMSE sum rate over a fixed set of drops.
#[derive(Clone, Debug)]
pub struct SumRateObjective {
    drops: Vec<DropChannel>,
}

impl SumRateObjective {
    pub fn new(drops: Vec<DropChannel>) -> Result<Self> {
        if drops.is_empty() {
            return Err(Error::invalid("objective needs at least one drop"));
        }
        Ok(SumRateObjective { drops })
    }

    /// Drops `0..n_drops` of `stream` under `spec`.
    pub fn from_spec(spec: &ChannelSpec, seed: u64, stream: Stream, n_drops: usize) -> Result<Self> {
        Self::new(spec.realize_many(seed, stream, n_drops)?)
    }

    pub fn drops(&self) -> &[DropChannel] {
        &self.drops
    }

    /// Sum rate of a single drop.
    pub fn drop_rate(&self, index: usize, geometry: &ArrayGeometry) -> f64 {
        mean_sum_rate(&self.drops[index].channels(geometry))
    }
}

impl Objective for SumRateObjective {
    fn evaluate(&self, geometry: &ArrayGeometry) -> Result<f64> {
        let total: f64 = (0..self.drops.len()).map(|i| self.drop_rate(i, geometry)).sum();
        Ok(total / self.drops.len() as f64)
    }
}

/// Per-antenna placement boxes.
#[derive(Clone, Debug, PartialEq)]
pub struct MovableRegions {
    boxes: Vec<ApertureBox>,
}

impl MovableRegions {
    pub fn new(boxes: Vec<ApertureBox>, aperture: &ApertureBox) -> Result<Self> {
        if boxes.is_empty() {
            return Err(Error::invalid("no placement regions"));
        }
        for (i, b) in boxes.iter().enumerate() {
            if !(b.x.0 <= b.x.1 && b.y.0 <= b.y.1) {
                return Err(Error::invalid(format!("region {i} has inverted bounds")));
            }
            if !aperture.contains_box(b) {
                return Err(Error::invalid(format!("region {i} leaves the aperture")));
            }
        }
        Ok(MovableRegions { boxes })
    }

    /// `antennas` equal, contiguous segments of `[0, length]` on the x axis.
    pub fn linear_segments(antennas: usize, length: f64) -> Result<Self> {
        if antennas == 0 {
            return Err(Error::invalid("no antennas"));
        }
        let w = length / antennas as f64;
        let boxes = (0..antennas)
            .map(|i| ApertureBox::new((i as f64 * w, (i + 1) as f64 * w), (0.0, 0.0)))
            .collect();
        Self::new(boxes, &ApertureBox::linear(length))
    }

    /// `nx × ny` equal tiles of `[0, width] × [0, height]`, row by row.
    pub fn grid(nx: usize, ny: usize, width: f64, height: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::invalid("no antennas"));
        }
        let (w, h) = (width / nx as f64, height / ny as f64);
        let mut boxes = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                boxes.push(ApertureBox::new(
                    (i as f64 * w, (i + 1) as f64 * w),
                    (j as f64 * h, (j + 1) as f64 * h),
                ));
            }
        }
        Self::new(boxes, &ApertureBox::new((0.0, width), (0.0, height)))
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn boxes(&self) -> &[ApertureBox] {
        &self.boxes
    }

    /// True when antenna `i` of `geometry` lies in box `i` for every `i`.
    pub fn contains(&self, geometry: &ArrayGeometry) -> bool {
        geometry.len() == self.boxes.len()
            && geometry.positions().iter().zip(&self.boxes).all(|(p, b)| b.contains(p))
    }

    /// Box centres as a starting geometry (spacing is not checked).
    pub fn centres(&self, element_gain: f64) -> Result<ArrayGeometry> {
        let p = self
            .boxes
            .iter()
            .map(|b| crate::geometry::Position::new((b.x.0 + b.x.1) / 2.0, (b.y.0 + b.y.1) / 2.0))
            .collect();
        ArrayGeometry::new(p, element_gain)
    }
}

/// Pre-optimized irregular array: PSO on the mean sum rate over `n_drops`
/// training drops drawn from the PIA stream, disjoint from test drops.
pub fn optimize_pia(
    regions: &MovableRegions,
    spec: &ChannelSpec,
    n_drops: usize,
    seed: u64,
    params: &PsoParams,
    element_gain: f64,
) -> Result<PsoOutcome> {
    if n_drops == 0 {
        return Err(Error::invalid("PIA needs at least one training drop"));
    }
    let objective = SumRateObjective::from_spec(spec, seed, Stream::PiaDrops, n_drops)?;
    pso_optimize(regions, &objective, params, element_gain, None)
}

/// Movable antennas: PSO on this drop's sum rate, warm-started at `warm_start`.
pub fn optimize_ma(
    regions: &MovableRegions,
    drop: &DropChannel,
    params: &PsoParams,
    warm_start: Option<&ArrayGeometry>,
    element_gain: f64,
) -> Result<PsoOutcome> {
    let objective = SumRateObjective::new(alloc::vec![drop.clone()])?;
    pso_optimize(regions, &objective, params, element_gain, warm_start)
}
