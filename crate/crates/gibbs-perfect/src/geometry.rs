//! Box lattice over `[0, L)^d`, box neighbourhoods and point configurations.
//!
//! The domain is cut into boxes of side `r` (the interaction range). Boxes on
//! the upper faces are clipped to the domain, so they may be thinner than `r`.
//! Box sets are `BTreeSet<BoxIndex>`, which iterates in lexicographic order.

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("point {0:?} lies outside the domain")]
    OutsideDomain(Vec<f64>),
    #[error("point has dimension {got}, lattice has dimension {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("duplicate point {0:?}")]
    DuplicatePoint(Vec<f64>),
    #[error("box {0:?} is not a member of the given set")]
    NotInSet(Vec<usize>),
}

/// Index of one box; coordinate `i` counts boxes along axis `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoxIndex(pub Vec<usize>);

impl BoxIndex {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for BoxIndex {
    fn from(c: Vec<usize>) -> Self {
        BoxIndex(c)
    }
}

pub type BoxSet = BTreeSet<BoxIndex>;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxLattice {
    dim: usize,
    length: f64,
    range: f64,
    per_axis: usize,
}

impl BoxLattice {
    pub fn new(dim: usize, length: f64, range: f64) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::InvalidLattice("dimension must be positive".into()));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(GeometryError::InvalidLattice(format!("side length {length} must be positive")));
        }
        if !(range.is_finite() && range > 0.0) {
            return Err(GeometryError::InvalidLattice(format!("range {range} must be positive")));
        }
        let per_axis = (length / range).ceil();
        if per_axis > 1e9 {
            return Err(GeometryError::InvalidLattice("too many boxes per axis".into()));
        }
        let per_axis = (per_axis as usize).max(1);
        let total = (per_axis as f64).powi(dim as i32);
        if total > 1e8 {
            return Err(GeometryError::InvalidLattice(format!("{total} boxes is more than this crate handles")));
        }
        Ok(BoxLattice { dim, length, range, per_axis })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    /// Boxes per axis, `ceil(L / r)`.
    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    pub fn num_boxes(&self) -> usize {
        self.per_axis.pow(self.dim as u32)
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim && point.iter().all(|&x| x >= 0.0 && x < self.length)
    }

    pub fn is_valid(&self, v: &BoxIndex) -> bool {
        v.0.len() == self.dim && v.0.iter().all(|&c| c < self.per_axis)
    }

    /// All boxes, in lexicographic order.
    pub fn all_boxes(&self) -> BoxSet {
        (0..self.num_boxes()).map(|id| self.from_linear(id)).collect()
    }

    pub fn box_of(&self, point: &[f64]) -> Result<BoxIndex, GeometryError> {
        if point.len() != self.dim {
            return Err(GeometryError::DimensionMismatch { got: point.len(), want: self.dim });
        }
        if !self.contains(point) {
            return Err(GeometryError::OutsideDomain(point.to_vec()));
        }
        Ok(BoxIndex(point.iter().map(|&x| self.axis_cell(x)).collect()))
    }

    // floor(x / r), clamped in case rounding pushes a point just below L into box N.
    fn axis_cell(&self, x: f64) -> usize {
        ((x / self.range).floor() as usize).min(self.per_axis - 1)
    }

    /// Row-major id; the first axis is most significant so ids sort like indices.
    pub fn linear(&self, v: &BoxIndex) -> usize {
        v.0.iter().fold(0, |acc, &c| acc * self.per_axis + c)
    }

    pub fn from_linear(&self, mut id: usize) -> BoxIndex {
        let mut c = vec![0; self.dim];
        for slot in c.iter_mut().rev() {
            *slot = id % self.per_axis;
            id /= self.per_axis;
        }
        BoxIndex(c)
    }

    /// Linear id of the box holding `point`; the point must lie in the domain.
    pub fn linear_of_point(&self, point: &[f64]) -> usize {
        point.iter().fold(0, |acc, &x| acc * self.per_axis + self.axis_cell(x))
    }

    /// Lower corner and clipped extent of box `v` along each axis.
    pub fn box_bounds(&self, v: &BoxIndex) -> (Vec<f64>, Vec<f64>) {
        let lo: Vec<f64> = v.0.iter().map(|&c| c as f64 * self.range).collect();
        let ext = lo.iter().map(|&a| ((a + self.range).min(self.length) - a).max(0.0)).collect();
        (lo, ext)
    }

    pub fn box_volume(&self, v: &BoxIndex) -> f64 {
        self.box_bounds(v).1.iter().product()
    }

    /// Euclidean distance from `point` to the closed box `v`.
    pub fn distance_to_box(&self, point: &[f64], v: &BoxIndex) -> f64 {
        let (lo, ext) = self.box_bounds(v);
        let mut s = 0.0;
        for i in 0..self.dim {
            let d = if point[i] < lo[i] {
                lo[i] - point[i]
            } else if point[i] > lo[i] + ext[i] {
                point[i] - lo[i] - ext[i]
            } else {
                0.0
            };
            s += d * d;
        }
        s.sqrt()
    }
}

/// Valid indices within l-infinity distance `k` of `v`.
pub fn ball(lattice: &BoxLattice, v: &BoxIndex, k: usize) -> BoxSet {
    let n = lattice.per_axis();
    let ranges: Vec<(usize, usize)> =
        v.0.iter().map(|&c| (c.saturating_sub(k), c.saturating_add(k).min(n - 1))).collect();
    let mut out = BoxSet::new();
    let mut cur: Vec<usize> = ranges.iter().map(|r| r.0).collect();
    loop {
        out.insert(BoxIndex(cur.clone()));
        // odometer increment, last axis fastest
        let mut axis = cur.len();
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if cur[axis] < ranges[axis].1 {
                cur[axis] += 1;
                for (j, slot) in cur.iter_mut().enumerate().skip(axis + 1) {
                    *slot = ranges[j].0;
                }
                break;
            }
        }
    }
}

/// Outer boundary: boxes adjacent to `s` but not in it.
pub fn boundary(lattice: &BoxLattice, s: &BoxSet) -> BoxSet {
    let mut out = BoxSet::new();
    for v in s {
        for w in ball(lattice, v, 1) {
            if !s.contains(&w) {
                out.insert(w);
            }
        }
    }
    out
}

/// `Q = {v} ∪ (ball(v, radius) \ S)`.
pub fn update_set(lattice: &BoxLattice, s: &BoxSet, v: &BoxIndex, radius: usize) -> Result<BoxSet, GeometryError> {
    if !s.contains(v) {
        return Err(GeometryError::NotInSet(v.0.clone()));
    }
    let mut q: BoxSet = ball(lattice, v, radius).into_iter().filter(|w| !s.contains(w)).collect();
    q.insert(v.clone());
    Ok(q)
}

/// Sum of clipped box volumes.
pub fn region_volume(lattice: &BoxLattice, s: &BoxSet) -> f64 {
    s.iter().map(|v| lattice.box_volume(v)).sum()
}

/// Points of `config` whose box lies in `s`, in their original order.
pub fn restrict(config: &PointConfiguration, lattice: &BoxLattice, s: &BoxSet) -> PointConfiguration {
    let mut out = PointConfiguration::new(config.dim());
    for p in config.iter() {
        if let Ok(v) = lattice.box_of(p) {
            if s.contains(&v) {
                out.push_unchecked(p);
            }
        }
    }
    out
}

/// Finite point set stored as a flat coordinate buffer.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointConfiguration {
    dim: usize,
    coords: Vec<f64>,
}

impl PointConfiguration {
    pub fn new(dim: usize) -> Self {
        PointConfiguration { dim, coords: Vec::new() }
    }

    /// Builds a configuration inside the lattice domain, rejecting duplicates.
    pub fn from_points<P: AsRef<[f64]>>(
        lattice: &BoxLattice,
        points: impl IntoIterator<Item = P>,
    ) -> Result<Self, GeometryError> {
        let mut c = PointConfiguration::new(lattice.dim());
        for p in points {
            let p = p.as_ref();
            if p.len() != lattice.dim() {
                return Err(GeometryError::DimensionMismatch { got: p.len(), want: lattice.dim() });
            }
            if !lattice.contains(p) {
                return Err(GeometryError::OutsideDomain(p.to_vec()));
            }
            c.push(p)?;
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim.max(1))
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        self.iter().any(|q| q == p)
    }

    pub fn push(&mut self, p: &[f64]) -> Result<(), GeometryError> {
        if p.len() != self.dim {
            return Err(GeometryError::DimensionMismatch { got: p.len(), want: self.dim });
        }
        if self.contains_point(p) {
            return Err(GeometryError::DuplicatePoint(p.to_vec()));
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    /// Appends without the duplicate scan. Samplers use this for fresh
    /// continuous draws, where a duplicate has probability zero.
    pub fn push_unchecked(&mut self, p: &[f64]) {
        debug_assert_eq!(p.len(), self.dim);
        self.coords.extend_from_slice(p);
    }

    pub fn extend_from(&mut self, other: &PointConfiguration) {
        self.coords.extend_from_slice(&other.coords);
    }

    pub fn clear(&mut self) {
        self.coords.clear();
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.iter().map(|p| p.to_vec()).collect()
    }
}

/// Points bucketed by box, for constant-time access to a box's contents.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxedConfiguration {
    dim: usize,
    per_box: Vec<Vec<f64>>,
}

impl BoxedConfiguration {
    pub fn new(lattice: &BoxLattice) -> Self {
        BoxedConfiguration { dim: lattice.dim(), per_box: vec![Vec::new(); lattice.num_boxes()] }
    }

    pub fn from_configuration(lattice: &BoxLattice, config: &PointConfiguration) -> Result<Self, GeometryError> {
        let mut b = BoxedConfiguration::new(lattice);
        for p in config.iter() {
            let v = lattice.box_of(p)?;
            b.per_box[lattice.linear(&v)].extend_from_slice(p);
        }
        Ok(b)
    }

    pub fn in_box(&self, id: usize) -> &[f64] {
        &self.per_box[id]
    }

    pub fn count_in_box(&self, id: usize) -> usize {
        self.per_box[id].len() / self.dim
    }

    /// Replaces the contents of one box.
    pub fn set_box(&mut self, id: usize, coords: Vec<f64>) {
        self.per_box[id] = coords;
    }

    pub fn clear_box(&mut self, id: usize) {
        self.per_box[id].clear();
    }

    pub fn push(&mut self, id: usize, p: &[f64]) {
        self.per_box[id].extend_from_slice(p);
    }

    /// Appends the flat coordinates of every point in `set` to `out`.
    pub fn collect_into(&self, lattice: &BoxLattice, set: &BoxSet, out: &mut Vec<f64>) {
        for v in set {
            out.extend_from_slice(&self.per_box[lattice.linear(v)]);
        }
    }

    pub fn restrict(&self, lattice: &BoxLattice, set: &BoxSet) -> PointConfiguration {
        let mut out = PointConfiguration::new(self.dim);
        self.collect_into(lattice, set, &mut out.coords);
        out
    }

    pub fn len(&self) -> usize {
        self.per_box.iter().map(|b| b.len()).sum::<usize>() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.per_box.iter().all(|b| b.is_empty())
    }

    /// All points, box by box in index order.
    pub fn to_configuration(&self) -> PointConfiguration {
        let mut out = PointConfiguration::new(self.dim);
        for b in &self.per_box {
            out.coords.extend_from_slice(b);
        }
        out
    }
}

pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}
