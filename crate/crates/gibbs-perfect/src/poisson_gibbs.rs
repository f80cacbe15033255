//! Poisson point processes on box regions, the exact rejection sampler for
//! conditional Gibbs measures, and empty-set coins built on it.

use thiserror::Error;

use crate::geometry::{boundary as outer_boundary, BoxLattice, BoxSet, PointConfiguration};
use crate::model::{boltzmann, PairPotential};
use crate::rng::RngStream;

/// Rejection rounds allowed before a conditional draw is abandoned.
pub const REJECTION_CAP: u64 = 1_000_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GibbsError {
    #[error("negative or non-finite activity {0}")]
    BadActivity(f64),
    #[error("boundary point {0:?} lies inside the region being resampled")]
    BoundaryInsideRegion(Vec<f64>),
    #[error("rejection sampler gave up after {0} rounds (activity times volume too large?)")]
    IterationCap(u64),
}

/// A union of lattice boxes prepared for fast uniform sampling.
#[derive(Debug, Clone)]
pub struct Region {
    dim: usize,
    lows: Vec<f64>,
    exts: Vec<f64>,
    cum: Vec<f64>,
    volume: f64,
}

impl Region {
    pub fn new(lattice: &BoxLattice, set: &BoxSet) -> Self {
        let mut r = Region { dim: lattice.dim(), lows: vec![], exts: vec![], cum: vec![], volume: 0.0 };
        for v in set {
            let (lo, ext) = lattice.box_bounds(v);
            let vol: f64 = ext.iter().product();
            if vol <= 0.0 {
                continue;
            }
            r.volume += vol;
            r.lows.extend(lo);
            r.exts.extend(ext);
            r.cum.push(r.volume);
        }
        r
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn is_empty(&self) -> bool {
        self.cum.is_empty()
    }

    /// Box chosen proportionally to clipped volume, then a uniform point in it.
    #[inline]
    pub fn uniform_point(&self, rng: &mut RngStream, out: &mut Vec<f64>) {
        let b = if self.cum.len() == 1 {
            0
        } else {
            let u = rng.uniform() * self.volume;
            self.cum.partition_point(|&c| c <= u).min(self.cum.len() - 1)
        };
        let d = self.dim;
        for i in 0..d {
            let lo = self.lows[b * d + i];
            let x = lo + rng.uniform() * self.exts[b * d + i];
            // guard the half-open upper face against rounding
            let hi = lo + self.exts[b * d + i];
            out.push(if x < hi { x } else { lo });
        }
    }
}

/// Poisson variate by counting exponential inter-arrival gaps in `[0, mean]`
/// (as a running product of uniforms). Means of 30 or more are split into
/// independent pieces so the product never underflows.
pub fn poisson_count(mean: f64, rng: &mut RngStream) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let pieces = (mean / 30.0).ceil().max(1.0);
    let part = mean / pieces;
    let limit = (-part).exp();
    let mut total = 0;
    for _ in 0..pieces as usize {
        let mut prod = rng.uniform_open0();
        while prod > limit {
            total += 1;
            prod *= rng.uniform_open0();
        }
    }
    total
}

/// Poisson process of intensity `lambda` on the union of `set`'s boxes.
pub fn sample_poisson(lattice: &BoxLattice, set: &BoxSet, lambda: f64, rng: &mut RngStream) -> PointConfiguration {
    let region = Region::new(lattice, set);
    let mut out = PointConfiguration::new(lattice.dim());
    if lambda <= 0.0 || region.is_empty() {
        return out;
    }
    let n = poisson_count(lambda * region.volume(), rng);
    let mut buf = Vec::with_capacity(lattice.dim());
    for _ in 0..n {
        buf.clear();
        region.uniform_point(rng, &mut buf);
        out.push_unchecked(&buf);
    }
    out
}

/// The Gibbs measure on a box region given a fixed outside configuration,
/// prepared for repeated exact draws by rejection from the Poisson process.
#[derive(Debug, Clone)]
pub struct ConditionalGibbs {
    phi: PairPotential,
    lambda: f64,
    region: Region,
    dim: usize,
    // boundary points from the outer boundary boxes only
    boundary: Vec<f64>,
    scratch: Vec<f64>,
}

impl ConditionalGibbs {
    /// `boundary` may hold points anywhere outside the region; only those in
    /// boxes adjacent to it are kept.
    pub fn new(
        phi: &PairPotential,
        lambda: f64,
        lattice: &BoxLattice,
        set: &BoxSet,
        boundary: &PointConfiguration,
    ) -> Result<Self, GibbsError> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(GibbsError::BadActivity(lambda));
        }
        let ring = outer_boundary(lattice, set);
        let mut kept = Vec::new();
        for p in boundary.iter() {
            let Ok(v) = lattice.box_of(p) else { continue };
            if set.contains(&v) {
                return Err(GibbsError::BoundaryInsideRegion(p.to_vec()));
            }
            if ring.contains(&v) {
                kept.extend_from_slice(p);
            }
        }
        Ok(Self::from_parts(phi, lambda, Region::new(lattice, set), kept))
    }

    /// Trusted constructor: `boundary` is a flat list of points outside the
    /// region, already restricted to where they can interact.
    pub fn from_parts(phi: &PairPotential, lambda: f64, region: Region, boundary: Vec<f64>) -> Self {
        let dim = region.dim;
        ConditionalGibbs { phi: *phi, lambda, region, dim, boundary, scratch: Vec::new() }
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    // One proposal. Returns Some(accepted) with the proposal in `scratch`.
    // Points are placed one at a time and a hard-core overlap rejects at
    // once; the remaining points would not change the outcome.
    #[inline]
    fn propose(&mut self, rng: &mut RngStream, n: usize) -> bool {
        let d = self.dim;
        self.scratch.clear();
        let mut energy = 0.0;
        for i in 0..n {
            self.region.uniform_point(rng, &mut self.scratch);
            let (prev, cur) = self.scratch.split_at(i * d);
            for q in prev.chunks_exact(d) {
                energy += self.phi.at_distance(dist(q, cur));
            }
            for q in self.boundary.chunks_exact(d) {
                energy += self.phi.at_distance(dist(q, cur));
            }
            if energy == f64::INFINITY {
                return false;
            }
        }
        let w = boltzmann(energy);
        assert!((0.0..=1.0).contains(&w), "acceptance weight {w} outside [0, 1]");
        w == 1.0 || rng.bernoulli(w)
    }

    /// Exact draw; the result is left in `out` as a flat coordinate list.
    pub fn draw_into(&mut self, rng: &mut RngStream, out: &mut Vec<f64>) -> Result<(), GibbsError> {
        out.clear();
        if self.lambda == 0.0 || self.region.is_empty() {
            return Ok(());
        }
        let mean = self.lambda * self.region.volume();
        for _ in 0..REJECTION_CAP {
            let n = poisson_count(mean, rng);
            if n == 0 {
                return Ok(());
            }
            if self.propose(rng, n) {
                out.extend_from_slice(&self.scratch);
                return Ok(());
            }
        }
        Err(GibbsError::IterationCap(REJECTION_CAP))
    }

    /// One bit that is 1 exactly when a fresh exact draw is empty.
    pub fn empty_coin(&mut self, rng: &mut RngStream) -> Result<bool, GibbsError> {
        if self.lambda == 0.0 || self.region.is_empty() {
            return Ok(true);
        }
        let mean = self.lambda * self.region.volume();
        let lone_point_free = self.boundary.is_empty();
        for _ in 0..REJECTION_CAP {
            let n = poisson_count(mean, rng);
            if n == 0 {
                return Ok(true);
            }
            // a single point with nothing to interact with has weight 1
            if n == 1 && lone_point_free {
                return Ok(false);
            }
            if self.propose(rng, n) {
                return Ok(false);
            }
        }
        Err(GibbsError::IterationCap(REJECTION_CAP))
    }
}

#[inline]
fn dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        let t = a[i] - b[i];
        s += t * t;
    }
    s.sqrt()
}

/// Exact sample of the Gibbs measure on the boxes `q` given `boundary`.
pub fn sample_conditional_gibbs(
    phi: &PairPotential,
    lambda: f64,
    lattice: &BoxLattice,
    q: &BoxSet,
    boundary: &PointConfiguration,
    rng: &mut RngStream,
) -> Result<PointConfiguration, GibbsError> {
    let mut g = ConditionalGibbs::new(phi, lambda, lattice, q, boundary)?;
    let mut buf = Vec::new();
    g.draw_into(rng, &mut buf)?;
    let mut out = PointConfiguration::new(lattice.dim());
    for p in buf.chunks_exact(lattice.dim()) {
        out.push_unchecked(p);
    }
    Ok(out)
}

/// Bit with success probability `1 / Z` of the conditional Gibbs measure.
pub fn empty_set_coin(
    phi: &PairPotential,
    lambda: f64,
    lattice: &BoxLattice,
    q: &BoxSet,
    boundary: &PointConfiguration,
    rng: &mut RngStream,
) -> Result<bool, GibbsError> {
    ConditionalGibbs::new(phi, lambda, lattice, q, boundary)?.empty_coin(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::is_feasible;

    fn line(len: f64) -> BoxLattice {
        BoxLattice::new(1, len, 1.0).unwrap()
    }

    #[test]
    fn zero_activity_is_empty() {
        let l = line(2.0);
        let mut rng = RngStream::new(1);
        assert!(sample_poisson(&l, &l.all_boxes(), 0.0, &mut rng).is_empty());
        let hs = PairPotential::hard_sphere(1.0);
        let e = PointConfiguration::new(1);
        assert!(sample_conditional_gibbs(&hs, 0.0, &l, &l.all_boxes(), &e, &mut rng).unwrap().is_empty());
        assert!(empty_set_coin(&hs, 0.0, &l, &l.all_boxes(), &e, &mut rng).unwrap());
    }

    #[test]
    fn poisson_mean_and_variance() {
        let l = BoxLattice::new(2, 2.0, 1.0).unwrap();
        let mut rng = RngStream::new(11);
        let n = 100_000;
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..n {
            let c = sample_poisson(&l, &l.all_boxes(), 1.0, &mut rng);
            assert!(c.iter().all(|p| l.contains(p)));
            let k = c.len() as f64;
            s += k;
            s2 += k * k;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!((mean - 4.0).abs() < 4.0 * (4.0f64 / n as f64).sqrt(), "{mean}");
        assert!((var / mean - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn large_mean_counts() {
        let mut rng = RngStream::new(3);
        let n = 20_000;
        let mean: f64 = (0..n).map(|_| poisson_count(75.0, &mut rng) as f64).sum::<f64>() / n as f64;
        assert!((mean - 75.0).abs() < 4.0 * (75.0 / n as f64).sqrt());
    }

    #[test]
    fn blocked_region_is_always_empty() {
        let l = line(3.0);
        let hs = PairPotential::hard_sphere(1.0);
        let q: BoxSet = [crate::geometry::BoxIndex(vec![1])].into();
        // the two boundary rods exclude all of [1, 2) except the single point 1.5
        let b = PointConfiguration::from_points(&l, [[0.5], [2.5]]).unwrap();
        let mut rng = RngStream::new(5);
        for _ in 0..2000 {
            assert!(sample_conditional_gibbs(&hs, 2.0, &l, &q, &b, &mut rng).unwrap().is_empty());
            assert!(empty_set_coin(&hs, 2.0, &l, &q, &b, &mut rng).unwrap());
        }
    }

    #[test]
    fn boundary_inside_region_rejected() {
        let l = line(2.0);
        let hs = PairPotential::hard_sphere(1.0);
        let b = PointConfiguration::from_points(&l, [[0.5]]).unwrap();
        let mut rng = RngStream::new(5);
        assert!(sample_conditional_gibbs(&hs, 1.0, &l, &l.all_boxes(), &b, &mut rng).is_err());
    }

    #[test]
    fn empty_coin_mean_hard_rods() {
        let l = line(2.0);
        let hs = PairPotential::hard_sphere(1.0);
        let mut g = ConditionalGibbs::new(&hs, 1.0, &l, &l.all_boxes(), &PointConfiguration::new(1)).unwrap();
        let mut rng = RngStream::new(9);
        let n = 100_000;
        let hits = (0..n).filter(|_| g.empty_coin(&mut rng).unwrap()).count() as f64;
        let p = 1.0 / 3.5;
        assert!((hits / n as f64 - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt());
    }

    #[test]
    fn draws_are_feasible_and_in_region() {
        let l = BoxLattice::new(2, 3.0, 1.0).unwrap();
        let hs = PairPotential::hard_sphere(1.0);
        let q = crate::geometry::ball(&l, &crate::geometry::BoxIndex(vec![1, 1]), 0);
        let b = PointConfiguration::from_points(&l, [[0.3, 0.3], [2.7, 1.5]]).unwrap();
        let mut rng = RngStream::new(2);
        for _ in 0..2000 {
            let y = sample_conditional_gibbs(&hs, 1.5, &l, &q, &b, &mut rng).unwrap();
            assert!(is_feasible(&hs, &y));
            for p in y.iter() {
                assert!(q.contains(&l.box_of(p).unwrap()));
                for z in b.iter() {
                    assert!(crate::geometry::distance(p, z) >= 1.0);
                }
            }
        }
    }

    #[test]
    fn far_boundary_points_do_not_change_draws() {
        let l = line(6.0);
        let st = PairPotential::strauss(1.0, 0.8);
        let q: BoxSet = [crate::geometry::BoxIndex(vec![2])].into();
        let near = PointConfiguration::from_points(&l, [[1.5]]).unwrap();
        let mut more = near.clone();
        more.push(&[5.5]).unwrap();
        let mut a = RngStream::new(4);
        let mut b = RngStream::new(4);
        for _ in 0..500 {
            let x = sample_conditional_gibbs(&st, 1.0, &l, &q, &near, &mut a).unwrap();
            let y = sample_conditional_gibbs(&st, 1.0, &l, &q, &more, &mut b).unwrap();
            assert_eq!(x, y);
        }
    }
}
