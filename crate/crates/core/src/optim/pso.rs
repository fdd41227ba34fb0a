use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MovableRegions, Objective};
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Position, MIN_SPACING};

/// Global-best particle swarm settings.
#[derive(Clone, Debug, PartialEq)]
pub struct PsoParams {
    pub swarm_size: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Maximum speed per axis as a fraction of that axis' box extent.
    pub velocity_clamp: f64,
    pub seed: u64,
    /// Resamples per particle when its initial placement breaks the spacing rule.
    pub init_retries: usize,
}

impl Default for PsoParams {
    fn default() -> Self {
        PsoParams {
            swarm_size: 50,
            iterations: 100,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
            velocity_clamp: 0.2,
            seed: 0,
            init_retries: 100,
        }
    }
}

impl PsoParams {
    /// Defaults for per-drop movable-antenna optimization (30 iterations).
    pub fn movable() -> Self {
        PsoParams {
            iterations: 30,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(Error::invalid("swarm size must be at least 2"));
        }
        if !(self.inertia > 0.0 && self.cognitive > 0.0 && self.social > 0.0 && self.velocity_clamp > 0.0) {
            return Err(Error::invalid("PSO coefficients must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsoOutcome {
    pub geometry: ArrayGeometry,
    pub objective: f64,
    /// Best objective after initialization, then after every iteration.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

fn feasible(coords: &[f64]) -> bool {
    let n = coords.len() / 2;
    for i in 0..n {
        for j in i + 1..n {
            let dx = coords[2 * i] - coords[2 * j];
            let dy = coords[2 * i + 1] - coords[2 * j + 1];
            if libm::sqrt(dx * dx + dy * dy) < MIN_SPACING {
                return false;
            }
        }
    }
    true
}

fn to_geometry(coords: &[f64], element_gain: f64) -> Result<ArrayGeometry> {
    let p = coords.chunks_exact(2).map(|c| Position::new(c[0], c[1])).collect();
    ArrayGeometry::new(p, element_gain)
}

/// Maximizes `objective` over one antenna per region.
///
/// Positions are clamped to their boxes every step; candidates closer than
/// half a wavelength are scored `−∞` without being evaluated. With a warm
/// start it occupies particle 0, and since improvements must be strict the
/// warm start is returned unless something beats it.
pub fn pso_optimize<O: Objective + ?Sized>(
    regions: &MovableRegions,
    objective: &O,
    params: &PsoParams,
    element_gain: f64,
    warm_start: Option<&ArrayGeometry>,
) -> Result<PsoOutcome> {
    params.validate()?;
    let n = regions.len();
    let dims = 2 * n;
    let mut lo = Vec::with_capacity(dims);
    let mut hi = Vec::with_capacity(dims);
    for b in regions.boxes() {
        lo.extend([b.x.0, b.y.0]);
        hi.extend([b.x.1, b.y.1]);
    }
    let vmax: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| params.velocity_clamp * (h - l)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let uniform = |rng: &mut ChaCha8Rng, a: f64, b: f64| a + (b - a) * rng.random::<f64>();

    let swarm = params.swarm_size;
    let mut x = vec![vec![0.0; dims]; swarm];
    let mut v = vec![vec![0.0; dims]; swarm];
    for (i, (xi, vi)) in x.iter_mut().zip(v.iter_mut()).enumerate() {
        match (i, warm_start) {
            (0, Some(w)) => {
                if w.len() != n {
                    return Err(Error::invalid("warm start size differs from region count"));
                }
                for (d, p) in w.positions().iter().enumerate() {
                    xi[2 * d] = p.x.clamp(lo[2 * d], hi[2 * d]);
                    xi[2 * d + 1] = p.y.clamp(lo[2 * d + 1], hi[2 * d + 1]);
                }
            }
            _ => {
                for _ in 0..=params.init_retries {
                    for d in 0..dims {
                        xi[d] = uniform(&mut rng, lo[d], hi[d]);
                    }
                    if feasible(xi) {
                        break;
                    }
                }
            }
        }
        for d in 0..dims {
            vi[d] = uniform(&mut rng, -vmax[d], vmax[d]);
        }
    }

    let mut evaluations = 0;
    let mut score = |pts: &[Vec<f64>]| -> Result<Vec<f64>> {
        let idx: Vec<usize> = (0..pts.len()).filter(|&i| feasible(&pts[i])).collect();
        let geoms = idx
            .iter()
            .map(|&i| to_geometry(&pts[i], element_gain))
            .collect::<Result<Vec<_>>>()?;
        let vals = objective.evaluate_batch(&geoms)?;
        evaluations += geoms.len();
        let mut out = vec![f64::NEG_INFINITY; pts.len()];
        for (i, val) in idx.into_iter().zip(vals) {
            out[i] = if val.is_nan() { f64::NEG_INFINITY } else { val };
        }
        Ok(out)
    };

    let mut pbest = x.clone();
    let mut pbest_val = score(&x)?;
    let mut gbest = 0;
    for i in 1..swarm {
        if pbest_val[i] > pbest_val[gbest] {
            gbest = i;
        }
    }
    if pbest_val[gbest] == f64::NEG_INFINITY {
        return Err(Error::NoFeasibleParticle {
            retries: params.init_retries,
        });
    }
    let mut g_pos = pbest[gbest].clone();
    let mut g_val = pbest_val[gbest];
    let mut trace = Vec::with_capacity(params.iterations + 1);
    trace.push(g_val);

    for _ in 0..params.iterations {
        for i in 0..swarm {
            for d in 0..dims {
                if vmax[d] == 0.0 {
                    continue;
                }
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let vel = params.inertia * v[i][d]
                    + params.cognitive * r1 * (pbest[i][d] - x[i][d])
                    + params.social * r2 * (g_pos[d] - x[i][d]);
                v[i][d] = vel.clamp(-vmax[d], vmax[d]);
                let pos = x[i][d] + v[i][d];
                if pos < lo[d] || pos > hi[d] {
                    x[i][d] = pos.clamp(lo[d], hi[d]);
                    v[i][d] = 0.0;
                } else {
                    x[i][d] = pos;
                }
            }
        }
        let vals = score(&x)?;
        for i in 0..swarm {
            if vals[i] > pbest_val[i] {
                pbest_val[i] = vals[i];
                pbest[i].copy_from_slice(&x[i]);
            }
            if vals[i] > g_val {
                g_val = vals[i];
                g_pos.copy_from_slice(&x[i]);
            }
        }
        trace.push(g_val);
    }

    Ok(PsoOutcome {
        geometry: to_geometry(&g_pos, element_gain)?,
        objective: g_val,
        trace,
        evaluations,
    })
}
