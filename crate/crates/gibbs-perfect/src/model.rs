//! Pair potentials, energies, and a brute-force partition-function oracle.
//!
//! The oracle deliberately shares nothing with the samplers except
//! [`potential_eval`]: it integrates the grand-canonical series directly with
//! a composite midpoint rule so it can be used to check them.

use thiserror::Error;

use crate::geometry::{distance, BoxLattice, BoxSet, PointConfiguration};

#[derive(Debug, Clone, Copy)]
pub enum PotentialKind {
    /// `+inf` below the range, 0 at or beyond it.
    HardSphere,
    /// `beta` below the range.
    Strauss { beta: f64 },
    /// Any radial profile evaluated for distances below the range; must be
    /// non-negative (possibly infinite).
    Radial { profile: fn(f64) -> f64 },
}

impl PartialEq for PotentialKind {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (PotentialKind::HardSphere, PotentialKind::HardSphere) => true,
            (PotentialKind::Strauss { beta: a }, PotentialKind::Strauss { beta: b }) => a == b,
            (PotentialKind::Radial { profile: a }, PotentialKind::Radial { profile: b }) => {
                std::ptr::fn_addr_eq(*a, *b)
            }
            _ => false,
        }
    }
}

/// Symmetric, repulsive pair interaction of finite range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPotential {
    pub range: f64,
    pub kind: PotentialKind,
}

impl PairPotential {
    pub fn hard_sphere(range: f64) -> Self {
        PairPotential { range, kind: PotentialKind::HardSphere }
    }

    pub fn strauss(range: f64, beta: f64) -> Self {
        PairPotential { range, kind: PotentialKind::Strauss { beta } }
    }

    pub fn is_hard_sphere(&self) -> bool {
        matches!(self.kind, PotentialKind::HardSphere)
    }

    /// Value at distance `dist`; distance exactly `range` does not interact.
    #[inline]
    pub fn at_distance(&self, dist: f64) -> f64 {
        if dist >= self.range {
            return 0.0;
        }
        match self.kind {
            PotentialKind::HardSphere => f64::INFINITY,
            PotentialKind::Strauss { beta } => beta,
            PotentialKind::Radial { profile } => profile(dist),
        }
    }

    /// A lower bound on the potential between two points closer than the
    /// range, used for truncation bounds.
    pub fn min_within_range(&self) -> f64 {
        match self.kind {
            PotentialKind::HardSphere => f64::INFINITY,
            PotentialKind::Strauss { beta } => beta,
            PotentialKind::Radial { .. } => 0.0,
        }
    }
}

/// `exp(-energy)` with `exp(-inf) = 0` exactly.
#[inline]
pub fn boltzmann(energy: f64) -> f64 {
    if energy == f64::INFINITY {
        0.0
    } else {
        (-energy).exp()
    }
}

pub fn potential_eval(phi: &PairPotential, x: &[f64], y: &[f64]) -> f64 {
    phi.at_distance(distance(x, y))
}

/// Sum of the potential over unordered pairs.
pub fn hamiltonian(phi: &PairPotential, config: &PointConfiguration) -> f64 {
    let mut h = 0.0;
    for i in 0..config.len() {
        for j in i + 1..config.len() {
            h += potential_eval(phi, config.get(i), config.get(j));
            if h == f64::INFINITY {
                return h;
            }
        }
    }
    h
}

/// Sum of the potential over all pairs with one point from each set.
pub fn cross_energy(phi: &PairPotential, a: &PointConfiguration, b: &PointConfiguration) -> f64 {
    let mut h = 0.0;
    for x in a.iter() {
        for y in b.iter() {
            h += potential_eval(phi, x, y);
            if h == f64::INFINITY {
                return h;
            }
        }
    }
    h
}

pub fn is_feasible(phi: &PairPotential, config: &PointConfiguration) -> bool {
    hamiltonian(phi, config) < f64::INFINITY
}

/// A Gibbs point process on a box domain: lattice, potential and activity.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsModel {
    pub lattice: BoxLattice,
    pub potential: PairPotential,
    pub lambda: f64,
}

impl GibbsModel {
    pub fn new(lattice: BoxLattice, potential: PairPotential, lambda: f64) -> Result<Self, OracleError> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(OracleError::Invalid(format!("activity {lambda} must be finite and non-negative")));
        }
        if potential.range.to_bits() != lattice.range().to_bits() {
            return Err(OracleError::Invalid("box side must equal the potential range".into()));
        }
        Ok(GibbsModel { lattice, potential, lambda })
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn range(&self) -> f64 {
        self.lattice.range()
    }
}

/// Base activity together with a conditioning boundary configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Activity {
    pub lambda: f64,
    pub boundary: PointConfiguration,
}

impl Activity {
    pub fn new(lambda: f64, dim: usize) -> Self {
        Activity { lambda, boundary: PointConfiguration::new(dim) }
    }

    pub fn with_boundary(lambda: f64, boundary: PointConfiguration) -> Self {
        Activity { lambda, boundary }
    }

    /// `lambda * exp(-sum over the boundary of phi(x, y))`.
    pub fn at(&self, phi: &PairPotential, y: &[f64]) -> f64 {
        let mut e = 0.0;
        for x in self.boundary.iter() {
            e += potential_eval(phi, x, y);
        }
        self.lambda * boltzmann(e)
    }
}

/// Union of disjoint axis-aligned boxes given as `(lower, upper)` corners.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRegion {
    pub boxes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl OracleRegion {
    pub fn cuboid(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        OracleRegion { boxes: vec![(lower, upper)] }
    }

    pub fn from_boxes(lattice: &BoxLattice, set: &BoxSet) -> Self {
        let boxes = set
            .iter()
            .map(|v| {
                let (lo, ext) = lattice.box_bounds(v);
                let hi = lo.iter().zip(&ext).map(|(a, e)| a + e).collect();
                (lo, hi)
            })
            .collect();
        OracleRegion { boxes }
    }

    pub fn volume(&self) -> f64 {
        self.boxes.iter().map(|(lo, hi)| lo.iter().zip(hi).map(|(a, b)| b - a).product::<f64>()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Largest particle number the oracle may integrate.
    pub max_particles: usize,
    /// Starting panel count per axis of each region box; doubled until the
    /// tolerance is met or the evaluation budget runs out.
    pub panels_per_axis: usize,
    /// Absolute error target on `Z`.
    pub tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { max_particles: 12, panels_per_axis: 32, tolerance: 1e-3 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid oracle input: {0}")]
    Invalid(String),
    #[error("truncation tail {tail:.3e} above tolerance even at {max_particles} particles")]
    TailTooLarge { tail: f64, max_particles: usize },
    #[error("tolerance {tolerance:.3e} unreachable: error estimate {estimate:.3e} at {panels} panels per axis")]
    Unreachable { tolerance: f64, estimate: f64, panels: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub z: f64,
    pub error_bound: f64,
    /// `terms[k]` is the k-particle contribution to `Z`.
    pub terms: Vec<f64>,
    /// Panel count that produced each term.
    pub panels: Vec<usize>,
}

// Integrand evaluations allowed for one term at one resolution.
const EVAL_BUDGET: f64 = 3e8;

struct Cells {
    mids: Vec<f64>,
    weight: Vec<f64>,
    dim: usize,
}

fn build_cells(phi: &PairPotential, act: &Activity, region: &OracleRegion, panels: usize) -> Cells {
    let dim = act.boundary.dim().max(region.boxes.first().map_or(1, |b| b.0.len()));
    let mut mids = Vec::new();
    let mut weight = Vec::new();
    for (lo, hi) in &region.boxes {
        let h: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a) / panels as f64).collect();
        let cell_vol: f64 = h.iter().product();
        let count = panels.pow(dim as u32);
        let mut mid = vec![0.0; dim];
        for id in 0..count {
            let mut rem = id;
            for axis in (0..dim).rev() {
                let c = rem % panels;
                rem /= panels;
                mid[axis] = lo[axis] + (c as f64 + 0.5) * h[axis];
            }
            let w = act.at(phi, &mid) * cell_vol;
            if w > 0.0 {
                mids.extend_from_slice(&mid);
                weight.push(w);
            }
        }
    }
    Cells { mids, weight, dim }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut c = 1.0;
    for i in 0..k {
        c *= (n - i) as f64 / (i + 1) as f64;
    }
    c
}

// Sum over strictly increasing k-tuples of cells: the midpoint rule on the
// ordered simplex, which equals the k-fold integral divided by k!.
fn term_sum(phi: &PairPotential, cells: &Cells, k: usize) -> f64 {
    fn rec(phi: &PairPotential, cells: &Cells, start: usize, left: usize, chosen: &mut Vec<usize>, acc: f64) -> f64 {
        if left == 0 {
            return acc;
        }
        let n = cells.weight.len();
        let d = cells.dim;
        let mut total = 0.0;
        for c in start..=(n - left) {
            let x = &cells.mids[c * d..(c + 1) * d];
            let mut e = 0.0;
            for &p in chosen.iter() {
                e += potential_eval(phi, &cells.mids[p * d..(p + 1) * d], x);
            }
            let f = boltzmann(e);
            if f == 0.0 {
                continue;
            }
            chosen.push(c);
            total += rec(phi, cells, c + 1, left - 1, chosen, acc * cells.weight[c] * f);
            chosen.pop();
        }
        total
    }
    if k > cells.weight.len() {
        return 0.0;
    }
    rec(phi, cells, 0, k, &mut Vec::with_capacity(k), 1.0)
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

// Upper bound on the k-particle term. Cubes of side r/sqrt(d) have diameter
// r, so any two points in one cube interact with at least
// `min_within_range`; spreading k points over W cubes forces at least the
// balanced number of such pairs.
fn term_upper_bound(phi: &PairPotential, lambda: f64, region: &OracleRegion, k: usize) -> f64 {
    let vol = region.volume();
    if k == 0 {
        return 1.0;
    }
    let d = region.boxes.first().map_or(1, |b| b.0.len()) as f64;
    let side = phi.range / d.sqrt();
    let windows: f64 = region
        .boxes
        .iter()
        .map(|(lo, hi)| lo.iter().zip(hi).map(|(a, b)| ((b - a) / side).ceil().max(1.0)).product::<f64>())
        .sum();
    let w = windows.max(1.0);
    let m = phi.min_within_range();
    let kf = k as f64;
    let q = (kf / w).floor();
    let rem = kf - q * w;
    let pairs = rem * (q + 1.0) * q / 2.0 + (w - rem) * q * (q - 1.0) / 2.0;
    let log_poisson = kf * (lambda * vol).ln() - ln_factorial(k);
    if pairs == 0.0 {
        return log_poisson.exp();
    }
    if m == f64::INFINITY {
        return 0.0;
    }
    (log_poisson - m * pairs).exp()
}

/// Truncation level and the bound on everything above it.
fn truncation(phi: &PairPotential, lambda: f64, region: &OracleRegion, spec: &QuadratureSpec) -> (usize, f64) {
    let tail_from = |k0: usize| -> f64 {
        let mut s = 0.0;
        let mut k = k0;
        loop {
            let b = term_upper_bound(phi, lambda, region, k);
            s += b;
            if (b == 0.0 || b < 1e-18 * s.max(1e-300)) && k > k0 + 3 {
                break;
            }
            // past the Poisson mode the bounds decay at least geometrically
            if k > k0 + 400 {
                break;
            }
            k += 1;
        }
        s
    };
    let mut k = 0;
    loop {
        let tail = tail_from(k + 1);
        if tail <= spec.tolerance / 4.0 || k >= spec.max_particles {
            return (k, tail);
        }
        k += 1;
    }
}

/// Partition function of the region under boundary-conditioned activity.
pub fn partition_oracle(
    phi: &PairPotential,
    act: &Activity,
    region: &OracleRegion,
    spec: &QuadratureSpec,
) -> Result<OracleResult, OracleError> {
    if spec.panels_per_axis == 0 {
        return Err(OracleError::Invalid("panels_per_axis must be at least 1".into()));
    }
    if !(act.lambda >= 0.0 && act.lambda.is_finite()) {
        return Err(OracleError::Invalid(format!("activity {} must be finite and non-negative", act.lambda)));
    }
    if act.lambda == 0.0 || region.volume() == 0.0 {
        return Ok(OracleResult { z: 1.0, error_bound: 0.0, terms: vec![1.0], panels: vec![0] });
    }
    let (kmax, tail) = truncation(phi, act.lambda, region, spec);
    if tail > spec.tolerance / 4.0 {
        return Err(OracleError::TailTooLarge { tail, max_particles: spec.max_particles });
    }
    let dim = region.boxes[0].0.len();
    let nboxes = region.boxes.len();
    let budget_left = spec.tolerance - tail;
    let mut terms = vec![1.0];
    let mut panels_used = vec![0];
    let mut errors = Vec::new();
    for k in 1..=kmax {
        if term_upper_bound(phi, act.lambda, region, k) == 0.0 {
            terms.push(0.0);
            panels_used.push(0);
            errors.push(0.0);
            continue;
        }
        // Each term gets an equal share of the error budget.
        let share = budget_left / kmax as f64;
        let mut p = spec.panels_per_axis.max(2);
        let mut coarse = term_sum(phi, &build_cells(phi, act, region, p / 2), k);
        loop {
            let cells_fine = (nboxes * p.pow(dim as u32)) as f64;
            let fine = term_sum(phi, &build_cells(phi, act, region, p), k);
            let est = (fine - coarse).abs();
            if est <= share {
                terms.push(fine);
                panels_used.push(p);
                errors.push(est);
                break;
            }
            let next_cost = binomial((cells_fine * 2f64.powi(dim as i32)) as usize, k);
            if next_cost > EVAL_BUDGET {
                return Err(OracleError::Unreachable { tolerance: spec.tolerance, estimate: est, panels: p });
            }
            coarse = fine;
            p *= 2;
        }
    }
    let z: f64 = terms.iter().sum();
    let error_bound = errors.iter().sum::<f64>() + tail;
    Ok(OracleResult { z, error_bound, terms, panels: panels_used })
}

/// Particle-count distribution `P(k) = term_k / Z`, truncated where the
/// oracle truncates.
pub fn count_pmf_oracle(
    phi: &PairPotential,
    act: &Activity,
    region: &OracleRegion,
    spec: &QuadratureSpec,
) -> Result<Vec<f64>, OracleError> {
    let res = partition_oracle(phi, act, region, spec)?;
    let mut pmf: Vec<f64> = res.terms.iter().map(|t| t / res.z).collect();
    while pmf.len() > 1 && *pmf.last().unwrap() == 0.0 {
        pmf.pop();
    }
    Ok(pmf)
}
