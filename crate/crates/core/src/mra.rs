//! Minimum-redundancy arrays on a Δ-grid and their 2D permuted extension.
//!
//! A ruler is a sorted set of integer marks starting at 0. Its redundancy is
//! the number of mark pairs whose separation repeats an earlier pair:
//! `M(M−1)/2 − distinct separations`. A ruler with zero redundancy is a
//! Golomb ruler (a perfect MRA).

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Position};

pub const DEFAULT_NODE_BUDGET: u64 = 200_000_000;

/// Result of a ruler search. `complete` is false when the node budget ran out
/// before the search space was exhausted, in which case `marks` is the best
/// ruler seen so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RulerOutcome {
    pub marks: Vec<u32>,
    pub redundancy: usize,
    pub complete: bool,
    pub nodes: u64,
}

impl RulerOutcome {
    pub fn aperture(&self) -> u32 {
        *self.marks.last().unwrap_or(&0)
    }
}

struct Search {
    n_marks: usize,
    max_lag: usize,
    total_pairs: usize,
    budget: u64,
    nodes: u64,
    marks: Vec<u32>,
    lag_count: Vec<u32>,
    distinct: usize,
    best: Option<(usize, u32, Vec<u32>)>,
    exhausted: bool,
}

impl Search {
    fn place(&mut self, p: u32) {
        for &q in &self.marks {
            let lag = (p - q) as usize;
            if self.lag_count[lag] == 0 {
                self.distinct += 1;
            }
            self.lag_count[lag] += 1;
        }
        self.marks.push(p);
    }

    fn unplace(&mut self) {
        let p = self.marks.pop().expect("unplace on empty ruler");
        for &q in &self.marks {
            let lag = (p - q) as usize;
            self.lag_count[lag] -= 1;
            if self.lag_count[lag] == 0 {
                self.distinct -= 1;
            }
        }
    }

    /// Best `(redundancy, aperture)` any completion of the current prefix can reach.
    fn optimistic(&self) -> (usize, u32) {
        let c = self.marks.len();
        let last = *self.marks.last().unwrap() as usize;
        let remaining = self.n_marks - c;
        let future_pairs = self.total_pairs - c * (c - 1) / 2;
        // Distinct separations never exceed the final aperture.
        let reachable = (self.distinct + future_pairs).min(self.max_lag);
        let aperture = (last + remaining).max(reachable);
        (self.total_pairs - reachable, aperture as u32)
    }

    fn dfs(&mut self) {
        if self.exhausted {
            return;
        }
        let c = self.marks.len();
        if c == self.n_marks {
            self.leaf();
            return;
        }
        if let Some((br, ba, bm)) = &self.best {
            let opt = self.optimistic();
            // Equal keys can still win on lexicographic order, but only while
            // the prefix is not already past the incumbent's.
            if opt > (*br, *ba) || (opt == (*br, *ba) && self.marks[..] >= bm[..c]) {
                return;
            }
        }
        let last = *self.marks.last().unwrap();
        let remaining = (self.n_marks - c) as u32;
        let hi = self.max_lag as u32 + 1 - remaining;
        for p in last + 1..=hi {
            if self.nodes >= self.budget {
                self.exhausted = true;
                return;
            }
            self.nodes += 1;
            self.place(p);
            self.dfs();
            self.unplace();
            if self.exhausted {
                return;
            }
        }
    }

    fn leaf(&mut self) {
        let m = &self.marks;
        let n = m.len();
        // Mirror symmetry: of a ruler and its reflection keep the one whose
        // first gap is not larger than its last gap.
        if n >= 3 && m[1] - m[0] > m[n - 1] - m[n - 2] {
            return;
        }
        let key = (self.total_pairs - self.distinct, m[n - 1]);
        let better = match &self.best {
            None => true,
            Some((br, ba, bm)) => key < (*br, *ba) || (key == (*br, *ba) && m < bm),
        };
        if better {
            self.best = Some((key.0, key.1, m.clone()));
        }
    }
}

/// Branch-and-bound search for the `marks`-mark ruler on `slots` grid points
/// (positions `0..slots`) with the fewest repeated separations. Ties go to the
/// shorter aperture, then to the lexicographically smallest mark vector.
pub fn search_ruler(marks: usize, slots: usize, node_budget: u64) -> Result<RulerOutcome> {
    if marks < 2 {
        return Err(Error::invalid("a ruler needs at least two marks"));
    }
    if slots < marks {
        return Err(Error::invalid("slot budget smaller than the mark count"));
    }
    let total_pairs = marks * (marks - 1) / 2;
    let mut s = Search {
        n_marks: marks,
        max_lag: slots - 1,
        total_pairs,
        budget: node_budget,
        nodes: 0,
        marks: Vec::with_capacity(marks),
        lag_count: vec![0; slots],
        distinct: 0,
        best: None,
        exhausted: false,
    };
    if let Some(g) = greedy_golomb(marks, slots) {
        s.best = Some((0, g[marks - 1], g));
    }
    s.place(0);
    s.dfs();
    match s.best {
        Some((redundancy, _, marks)) => Ok(RulerOutcome {
            marks,
            redundancy,
            complete: !s.exhausted,
            nodes: s.nodes,
        }),
        None => Err(Error::SearchBudget {
            budget: node_budget,
        }),
    }
}

/// Greedy Golomb ruler: each mark is the smallest position keeping every
/// separation distinct. Used as the initial incumbent when it fits.
fn greedy_golomb(marks: usize, slots: usize) -> Option<Vec<u32>> {
    let mut used = vec![false; slots];
    let mut out: Vec<u32> = vec![0];
    let mut p = 0u32;
    while out.len() < marks {
        p += 1;
        if p as usize >= slots {
            return None;
        }
        // New separations p − q are mutually distinct, so only clashes with
        // existing ones matter.
        if out.iter().all(|&q| !used[(p - q) as usize]) {
            for &q in &out {
                used[(p - q) as usize] = true;
            }
            out.push(p);
        }
    }
    Some(out)
}

/// Like [`search_ruler`] but fails when the budget is exhausted before the
/// optimum is proven.
pub fn mra_marks(marks: usize, slots: usize, node_budget: u64) -> Result<Vec<u32>> {
    let out = search_ruler(marks, slots, node_budget)?;
    if !out.complete {
        return Err(Error::SearchBudget {
            budget: node_budget,
        });
    }
    Ok(out.marks)
}

/// Linear array at `x = mark·pitch`.
pub fn ruler_geometry(marks: &[u32], pitch: f64) -> Result<ArrayGeometry> {
    let positions = marks
        .iter()
        .map(|&m| Position::new(m as f64 * pitch, 0.0))
        .collect();
    ArrayGeometry::new_checked(positions, 1.0)
}

/// Minimum-redundancy linear array with `antennas` elements on `slots`
/// half-wavelength grid points, using the default node budget.
pub fn make_mra(antennas: usize, slots: usize) -> Result<ArrayGeometry> {
    let marks = mra_marks(antennas, slots, DEFAULT_NODE_BUDGET)?;
    ruler_geometry(&marks, crate::geometry::DEFAULT_PITCH)
}

/// 2D permuted MRA: antenna `i` sits at `(marks[i], marks[perm[i]])·pitch`.
///
/// Without a permutation the one maximizing the minimum pairwise distance is
/// chosen (see [`best_permutation`]).
pub fn make_2d_pmra(marks: &[u32], permutation: Option<&[usize]>, pitch: f64) -> Result<ArrayGeometry> {
    let n = marks.len();
    if n == 0 {
        return Err(Error::invalid("no marks"));
    }
    let mut sorted = marks.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("duplicate marks"));
    }
    let perm = match permutation {
        Some(p) => {
            if !is_permutation(p, n) {
                return Err(Error::invalid("permutation is not a bijection on 0..M"));
            }
            p.to_vec()
        }
        None => best_permutation(marks, PERMUTATION_SEED),
    };
    let positions: Vec<Position> = (0..n)
        .map(|i| Position::new(marks[i] as f64 * pitch, marks[perm[i]] as f64 * pitch))
        .collect();
    ArrayGeometry::new_checked(positions, 1.0)
}

const PERMUTATION_SEED: u64 = 0x504d_5241;
const EXHAUSTIVE_LIMIT: usize = 10;

fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &i in p {
        if i >= n || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

/// `(min squared distance, pairs attaining it)` in mark units.
fn spread(marks: &[u32], perm: &[usize]) -> (u64, usize) {
    let n = marks.len();
    let mut best = u64::MAX;
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            let dx = marks[i] as i64 - marks[j] as i64;
            let dy = marks[perm[i]] as i64 - marks[perm[j]] as i64;
            let d = (dx * dx + dy * dy) as u64;
            if d < best {
                best = d;
                count = 1;
            } else if d == best {
                count += 1;
            }
        }
    }
    (best, count)
}

fn better(a: (u64, usize), b: (u64, usize)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Permutation maximizing the minimum pairwise distance of the 2D layout
/// (secondary: fewest pairs at that distance). Exhaustive in lexicographic
/// order for up to 10 marks, so ties resolve to the smallest permutation;
/// simulated annealing with a fixed seed above that.
pub fn best_permutation(marks: &[u32], seed: u64) -> Vec<usize> {
    let n = marks.len();
    let mut perm: Vec<usize> = (0..n).collect();
    if n <= EXHAUSTIVE_LIMIT {
        let mut best = perm.clone();
        let mut best_score = spread(marks, &perm);
        while next_permutation(&mut perm) {
            let s = spread(marks, &perm);
            if better(s, best_score) {
                best_score = s;
                best.copy_from_slice(&perm);
            }
        }
        return best;
    }
    anneal(marks, seed)
}

fn anneal(marks: &[u32], seed: u64) -> Vec<usize> {
    let n = marks.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let energy = |s: (u64, usize)| -(s.0 as f64) + s.1 as f64 / (n * n) as f64;
    let mut best: Vec<usize> = (0..n).collect();
    let mut best_score = spread(marks, &best);
    const RESTARTS: usize = 8;
    const STEPS: usize = 40_000;
    let scale = (*marks.iter().max().unwrap_or(&1)).max(1) as f64;
    for _ in 0..RESTARTS {
        let mut cur: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            cur.swap(i, j);
        }
        let mut cur_score = spread(marks, &cur);
        let t0 = scale;
        let t1 = 1e-3;
        for step in 0..STEPS {
            let t = t0 * libm::pow(t1 / t0, step as f64 / STEPS as f64);
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            if i == j {
                continue;
            }
            cur.swap(i, j);
            let s = spread(marks, &cur);
            let de = energy(s) - energy(cur_score);
            if de <= 0.0 || rng.random::<f64>() < libm::exp(-de / t) {
                cur_score = s;
                if better(s, best_score) || (s == best_score && cur < best) {
                    best_score = s;
                    best.copy_from_slice(&cur);
                }
            } else {
                cur.swap(i, j);
            }
        }
    }
    best
}

/// Minimum pairwise distance of the 2D layout in mark units.
pub fn permuted_min_distance(marks: &[u32], perm: &[usize]) -> f64 {
    libm::sqrt(spread(marks, perm).0 as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::spacing_multiset;

    #[test]
    fn four_marks_on_seven_slots() {
        assert_eq!(mra_marks(4, 7, 1_000_000).unwrap(), vec![0, 1, 4, 6]);
    }

    #[test]
    fn two_marks() {
        assert_eq!(mra_marks(2, 2, 10).unwrap(), vec![0, 1]);
    }

    #[test]
    fn tight_slots_force_repeats() {
        // Four marks on four slots can only be a ULA.
        let out = search_ruler(4, 4, 1_000).unwrap();
        assert_eq!(out.marks, vec![0, 1, 2, 3]);
        assert_eq!(out.redundancy, 3);
    }

    #[test]
    fn budget_exhaustion() {
        assert!(matches!(mra_marks(8, 41, 5), Err(Error::SearchBudget { .. })));
        let partial = search_ruler(8, 41, 50).unwrap();
        assert!(!partial.complete);
    }

    #[test]
    fn make_mra_geometry_is_perfect() {
        let g = make_mra(4, 7).unwrap();
        let s = spacing_multiset(&g, Some(0.5)).unwrap();
        assert_eq!(s.redundancy(), 0);
        assert_eq!(g.aperture_length(), 3.0);
    }

    #[test]
    fn pmra_identity_and_explicit() {
        let id = make_2d_pmra(&[0, 1, 3], Some(&[0, 1, 2]), 1.0).unwrap();
        assert_eq!(
            id.positions(),
            &[Position::new(0.0, 0.0), Position::new(1.0, 1.0), Position::new(3.0, 3.0)]
        );
        let p = make_2d_pmra(&[0, 1, 3], Some(&[2, 0, 1]), 1.0).unwrap();
        assert_eq!(
            p.positions(),
            &[Position::new(0.0, 3.0), Position::new(1.0, 0.0), Position::new(3.0, 1.0)]
        );
    }

    #[test]
    fn pmra_errors() {
        assert!(make_2d_pmra(&[0, 1, 1], None, 1.0).is_err());
        assert!(make_2d_pmra(&[0, 1, 3], Some(&[0, 0, 1]), 1.0).is_err());
        assert!(matches!(
            make_2d_pmra(&[0, 1, 3], Some(&[0, 1, 2]), 0.3),
            Err(Error::CouplingViolation { .. })
        ));
    }

    #[test]
    fn exhaustive_permutation_beats_identity() {
        let marks = [0, 1, 4, 9, 15, 22, 32, 34];
        let id: Vec<usize> = (0..marks.len()).collect();
        let best = best_permutation(&marks, 0);
        assert!(permuted_min_distance(&marks, &best) > permuted_min_distance(&marks, &id));
    }

    #[test]
    fn next_permutation_enumerates_all() {
        let mut p = vec![0, 1, 2, 3];
        let mut n = 1;
        while next_permutation(&mut p) {
            n += 1;
        }
        assert_eq!(n, 24);
        assert_eq!(p, vec![3, 2, 1, 0]);
    }
}
