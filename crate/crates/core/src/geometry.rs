//! Antenna array geometries in wavelength units.
//!
//! Coordinates are `(x, y, z)` in wavelengths with `z = 0`; linear arrays also
//! have `y = 0`. Every antenna carries the same scalar power gain.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

/// Mutual-coupling rule: no two antennas closer than half a wavelength.
pub const MIN_SPACING: f64 = 0.5;

/// Default grid pitch Δ in wavelengths.
pub const DEFAULT_PITCH: f64 = 0.5;

const GRID_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Position { x, y, z: 0.0 }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        libm::sqrt(dx * dx + dy * dy + dz * dz)
    }

    fn cmp_lex(&self, other: &Position) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then(self.y.total_cmp(&other.y))
            .then(self.z.total_cmp(&other.z))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrayGeometry {
    positions: Vec<Position>,
    element_gain: f64,
}

impl ArrayGeometry {
    /// Wraps raw positions. Only finiteness and the gain are checked here;
    /// spacing and aperture rules are reported by [`validate`].
    pub fn new(positions: Vec<Position>, element_gain: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("geometry needs at least one antenna"));
        }
        if positions
            .iter()
            .any(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()))
        {
            return Err(Error::invalid("non-finite antenna coordinate"));
        }
        if !(element_gain.is_finite() && element_gain >= 1.0) {
            return Err(Error::invalid(format!(
                "element gain must be finite and >= 1, got {element_gain}"
            )));
        }
        Ok(ArrayGeometry {
            positions,
            element_gain,
        })
    }

    /// Like [`ArrayGeometry::new`] but also rejects duplicates and spacings
    /// below [`MIN_SPACING`].
    pub fn new_checked(positions: Vec<Position>, element_gain: f64) -> Result<Self> {
        let g = Self::new(positions, element_gain)?;
        g.check_spacing()?;
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn element_gain(&self) -> f64 {
        self.element_gain
    }

    /// Returns a copy with a different per-antenna gain.
    pub fn with_element_gain(&self, element_gain: f64) -> Result<Self> {
        Self::new(self.positions.clone(), element_gain)
    }

    /// `M·G`, the quantity that sets the link budget.
    pub fn total_gain(&self) -> f64 {
        self.len() as f64 * self.element_gain
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        ArrayGeometry {
            positions: self
                .positions
                .iter()
                .map(|p| Position {
                    x: p.x + dx,
                    y: p.y + dy,
                    z: p.z,
                })
                .collect(),
            element_gain: self.element_gain,
        }
    }

    /// Shifts the array so its bounding box is centered on the origin.
    pub fn centered(&self) -> Self {
        let (x0, x1, y0, y1) = self.bounds();
        self.translated(-(x0 + x1) / 2.0, -(y0 + y1) / 2.0)
    }

    /// `(min_x, max_x, min_y, max_y)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.positions.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), p| (a.min(p.x), b.max(p.x), c.min(p.y), d.max(p.y)),
        )
    }

    /// Horizontal aperture, the distance between the outermost x coordinates.
    pub fn aperture_length(&self) -> f64 {
        let (x0, x1, _, _) = self.bounds();
        x1 - x0
    }

    pub fn is_linear(&self) -> bool {
        self.positions.iter().all(|p| p.y == 0.0 && p.z == 0.0)
    }

    /// Smallest pairwise distance, or `+∞` for a single antenna.
    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.positions.iter().enumerate() {
            for b in &self.positions[i + 1..] {
                best = best.min(a.distance(b));
            }
        }
        best
    }

    /// Positions sorted lexicographically by `(x, y, z)`.
    pub fn sorted_positions(&self) -> Vec<Position> {
        let mut p = self.positions.clone();
        p.sort_by(Position::cmp_lex);
        p
    }

    /// Lexicographic order on sorted positions, used for deterministic tie-breaks.
    pub fn cmp_lex(&self, other: &ArrayGeometry) -> Ordering {
        let a = self.sorted_positions();
        let b = other.sorted_positions();
        for (p, q) in a.iter().zip(&b) {
            match p.cmp_lex(q) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        a.len().cmp(&b.len())
    }

    fn check_spacing(&self) -> Result<()> {
        for (i, a) in self.positions.iter().enumerate() {
            for (j, b) in self.positions.iter().enumerate().skip(i + 1) {
                let d = a.distance(b);
                if d == 0.0 {
                    return Err(Error::DuplicatePosition { first: i, second: j });
                }
                if d < MIN_SPACING {
                    return Err(Error::CouplingViolation {
                        first: i,
                        second: j,
                        distance: d,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Uniform linear array along x, origin-anchored: `x = m·spacing`.
pub fn make_ula(antennas: usize, spacing: f64) -> Result<ArrayGeometry> {
    if antennas == 0 {
        return Err(Error::invalid("ULA needs at least one antenna"));
    }
    if !spacing.is_finite() {
        return Err(Error::invalid("non-finite spacing"));
    }
    if antennas > 1 && spacing < MIN_SPACING {
        return Err(Error::CouplingViolation {
            first: 0,
            second: 1,
            distance: spacing,
        });
    }
    let positions = (0..antennas)
        .map(|m| Position::new(m as f64 * spacing, 0.0))
        .collect();
    ArrayGeometry::new(positions, 1.0)
}

/// Rectangular `horizontal × vertical` grid in the x–y plane, origin-anchored.
///
/// Antenna order is row by row: index `v·horizontal + h`.
pub fn make_upa(
    horizontal: usize,
    vertical: usize,
    spacing_h: f64,
    spacing_v: f64,
) -> Result<ArrayGeometry> {
    if horizontal == 0 || vertical == 0 {
        return Err(Error::invalid("UPA needs at least one antenna per axis"));
    }
    for (n, s) in [(horizontal, spacing_h), (vertical, spacing_v)] {
        if !s.is_finite() {
            return Err(Error::invalid("non-finite spacing"));
        }
        if n > 1 && s < MIN_SPACING {
            return Err(Error::CouplingViolation {
                first: 0,
                second: 1,
                distance: s,
            });
        }
    }
    let mut positions = Vec::with_capacity(horizontal * vertical);
    for v in 0..vertical {
        for h in 0..horizontal {
            positions.push(Position::new(h as f64 * spacing_h, v as f64 * spacing_v));
        }
    }
    ArrayGeometry::new(positions, 1.0)
}

/// Axis-aligned placement region in wavelengths (`z` is always 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApertureBox {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl ApertureBox {
    pub const fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        ApertureBox { x, y }
    }

    /// `[0, length] × {0}`.
    pub const fn linear(length: f64) -> Self {
        ApertureBox::new((0.0, length), (0.0, 0.0))
    }

    pub const fn square(side: f64) -> Self {
        ApertureBox::new((0.0, side), (0.0, side))
    }

    pub fn contains(&self, p: &Position) -> bool {
        p.z == 0.0
            && p.x >= self.x.0 - GRID_TOL
            && p.x <= self.x.1 + GRID_TOL
            && p.y >= self.y.0 - GRID_TOL
            && p.y <= self.y.1 + GRID_TOL
    }

    pub fn contains_box(&self, other: &ApertureBox) -> bool {
        other.x.0 >= self.x.0 - GRID_TOL
            && other.x.1 <= self.x.1 + GRID_TOL
            && other.y.0 >= self.y.0 - GRID_TOL
            && other.y.1 <= self.y.1 + GRID_TOL
    }

    pub fn width(&self) -> f64 {
        self.x.1 - self.x.0
    }

    pub fn height(&self) -> f64 {
        self.y.1 - self.y.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Duplicate { first: usize, second: usize },
    Coupling { first: usize, second: usize, distance: f64 },
    OutOfBox { index: usize, position: Position },
}

/// Lists every rule the geometry breaks; empty means valid.
pub fn validate(geometry: &ArrayGeometry, aperture: &ApertureBox) -> Vec<Violation> {
    let mut report = Vec::new();
    let p = geometry.positions();
    for (i, a) in p.iter().enumerate() {
        for (j, b) in p.iter().enumerate().skip(i + 1) {
            let d = a.distance(b);
            if d == 0.0 {
                report.push(Violation::Duplicate { first: i, second: j });
            } else if d < MIN_SPACING {
                report.push(Violation::Coupling {
                    first: i,
                    second: j,
                    distance: d,
                });
            }
        }
    }
    for (i, a) in p.iter().enumerate() {
        if !aperture.contains(a) {
            report.push(Violation::OutOfBox {
                index: i,
                position: *a,
            });
        }
    }
    report
}

/// One distinct pairwise separation and how often it occurs.
///
/// Displacements are sign-normalized (`dx > 0`, or `dx == 0` and `dy ≥ 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct SpacingEntry {
    pub dx: f64,
    pub dy: f64,
    /// Separation in grid steps when the multiset was quantized.
    pub steps: Option<(i64, i64)>,
    pub count: usize,
}

/// Co-array of an array: distinct pairwise separations with multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacingMultiset {
    pub pitch: Option<f64>,
    pub entries: Vec<SpacingEntry>,
}

impl SpacingMultiset {
    pub fn total_pairs(&self) -> usize {
        self.entries.iter().map(|e| e.count).sum()
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    /// Pairs whose separation already occurred: `M(M−1)/2 − distinct`.
    pub fn redundancy(&self) -> usize {
        self.total_pairs() - self.distinct()
    }

    /// Occurrences of a horizontal separation of `steps` grid pitches.
    pub fn count_steps(&self, steps: i64) -> usize {
        self.entries
            .iter()
            .find(|e| e.steps == Some((steps, 0)))
            .map_or(0, |e| e.count)
    }
}

fn normalized(dx: f64, dy: f64) -> (f64, f64) {
    if dx < 0.0 || (dx == 0.0 && dy < 0.0) {
        (-dx, -dy)
    } else {
        (dx, dy)
    }
}

/// Pairwise separation multiset. With a pitch every separation must be an
/// integer number of steps (within 1e−9 steps); without one, separations are
/// grouped when they agree to 1e−9 wavelengths.
pub fn spacing_multiset(geometry: &ArrayGeometry, pitch: Option<f64>) -> Result<SpacingMultiset> {
    let p = geometry.positions();
    let mut raw: Vec<(f64, f64)> = Vec::with_capacity(p.len() * p.len().saturating_sub(1) / 2);
    for (i, a) in p.iter().enumerate() {
        for b in &p[i + 1..] {
            raw.push(normalized(b.x - a.x, b.y - a.y));
        }
    }
    let entries = match pitch {
        Some(pitch) => {
            if !(pitch.is_finite() && pitch > 0.0) {
                return Err(Error::invalid("pitch must be positive"));
            }
            let mut steps: Vec<(i64, i64)> = Vec::with_capacity(raw.len());
            for &(dx, dy) in &raw {
                let mut q = [0i64; 2];
                for (slot, d) in q.iter_mut().zip([dx, dy]) {
                    let s = d / pitch;
                    let r = libm::round(s);
                    if (s - r).abs() > GRID_TOL {
                        return Err(Error::GridMismatch {
                            separation: libm::sqrt(dx * dx + dy * dy),
                            pitch,
                        });
                    }
                    *slot = r as i64;
                }
                steps.push((q[0], q[1]));
            }
            steps.sort_unstable();
            let mut entries: Vec<SpacingEntry> = Vec::new();
            for s in steps {
                match entries.last_mut() {
                    Some(e) if e.steps == Some(s) => e.count += 1,
                    _ => entries.push(SpacingEntry {
                        dx: s.0 as f64 * pitch,
                        dy: s.1 as f64 * pitch,
                        steps: Some(s),
                        count: 1,
                    }),
                }
            }
            entries
        }
        None => {
            raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            let mut entries: Vec<SpacingEntry> = Vec::new();
            for (dx, dy) in raw {
                match entries.last_mut() {
                    Some(e) if (e.dx - dx).abs() <= GRID_TOL && (e.dy - dy).abs() <= GRID_TOL => {
                        e.count += 1
                    }
                    _ => entries.push(SpacingEntry {
                        dx,
                        dy,
                        steps: None,
                        count: 1,
                    }),
                }
            }
            entries
        }
    };
    Ok(SpacingMultiset { pitch, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn ula_positions_and_aperture() {
        let g = make_ula(8, 0.5).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.aperture_length(), 3.5);
        let single = make_ula(1, 0.5).unwrap();
        assert_eq!(single.positions(), &[Position::new(0.0, 0.0)]);
        assert!(matches!(make_ula(4, 0.3), Err(Error::CouplingViolation { .. })));
    }

    #[test]
    fn ula_spacing_multiset() {
        let g = make_ula(4, 1.0).unwrap();
        let s = spacing_multiset(&g, Some(0.5)).unwrap();
        assert_eq!(s.count_steps(2), 3);
        assert_eq!(s.count_steps(4), 2);
        assert_eq!(s.count_steps(6), 1);
        assert_eq!(s.redundancy(), 3);
        assert_eq!(s.total_pairs(), 6);
    }

    #[test]
    fn golomb_marks_have_no_redundancy() {
        let p = [0.0, 1.0, 4.0, 6.0].iter().map(|&m| Position::new(m * 0.5, 0.0)).collect();
        let g = ArrayGeometry::new(p, 1.0).unwrap();
        let s = spacing_multiset(&g, Some(0.5)).unwrap();
        assert_eq!(s.redundancy(), 0);
        for k in 1..=6 {
            assert_eq!(s.count_steps(k), 1);
        }
    }

    #[test]
    fn single_antenna_has_empty_multiset() {
        let g = make_ula(1, 0.5).unwrap();
        let s = spacing_multiset(&g, Some(0.5)).unwrap();
        assert!(s.entries.is_empty());
        assert_eq!(s.redundancy(), 0);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let g = ArrayGeometry::new(vec![Position::new(0.0, 0.0), Position::new(0.75, 0.0)], 1.0).unwrap();
        assert!(matches!(spacing_multiset(&g, Some(0.5)), Err(Error::GridMismatch { .. })));
        let s = spacing_multiset(&g, None).unwrap();
        assert_eq!(s.distinct(), 1);
    }

    #[test]
    fn planar_multiset_counts_displacements() {
        let g = make_upa(2, 2, 0.5, 0.5).unwrap();
        let s = spacing_multiset(&g, Some(0.5)).unwrap();
        assert_eq!(s.total_pairs(), 6);
        // (1,0)x2, (0,1)x2, (1,1), (1,-1)
        assert_eq!(s.distinct(), 4);
    }

    #[test]
    fn upa_sizes() {
        let g = make_upa(4, 4, 0.5, 0.5).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(g.bounds(), (0.0, 1.5, 0.0, 1.5));
        assert_eq!(make_upa(8, 8, 0.5, 0.5).unwrap().len(), 64);
        let sparse = make_upa(4, 4, 20.0 / 3.0, 20.0 / 3.0).unwrap();
        let (_, x1, _, y1) = sparse.bounds();
        assert!((x1 - 20.0).abs() < 1e-12 && (y1 - 20.0).abs() < 1e-12);
    }

    #[test]
    fn validate_reports() {
        let ula = make_ula(8, 0.5).unwrap();
        assert!(validate(&ula, &ApertureBox::linear(20.0)).is_empty());

        let close = ArrayGeometry::new(vec![Position::new(0.0, 0.0), Position::new(0.3, 0.0)], 1.0).unwrap();
        let r = validate(&close, &ApertureBox::linear(20.0));
        assert!(matches!(r.as_slice(), [Violation::Coupling { first: 0, second: 1, .. }]));

        let out = ArrayGeometry::new(vec![Position::new(0.0, 0.0), Position::new(21.0, 0.0)], 1.0).unwrap();
        let r = validate(&out, &ApertureBox::linear(20.0));
        assert!(matches!(r.as_slice(), [Violation::OutOfBox { index: 1, .. }]));

        let dup = ArrayGeometry::new(vec![Position::new(1.0, 0.0); 2], 1.0).unwrap();
        assert!(matches!(validate(&dup, &ApertureBox::linear(20.0)).as_slice(), [Violation::Duplicate { .. }]));
    }

    #[test]
    fn centering_and_gain() {
        let g = make_ula(3, 1.0).unwrap().centered();
        assert_eq!(g.bounds().0, -1.0);
        assert!(g.with_element_gain(0.5).is_err());
        assert_eq!(g.with_element_gain(4.0).unwrap().total_gain(), 12.0);
    }
}
