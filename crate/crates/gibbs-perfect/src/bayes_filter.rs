//! Bayes filter corrections and the filter coin that gates each resampling
//! step.
//!
//! Two corrections are available. The hard-sphere correction compares
//! grid-discretised partition functions, minimised over discretised
//! configurations of the boxes that are neither correct nor resampled. The
//! mixing correction scales the partition-function ratio by a constant that
//! is valid whenever the model has `(a, b)` strong spatial mixing.
//!
//! Either way the filter probability is a ratio `p / q` of products of
//! empty-set probabilities and explicit constants, drawn exactly with
//! [`sample_ratio`].

use thiserror::Error;

use crate::bernoulli_factory::{sample_ratio, And, Coin, CoinOracle, ConstantCoin, FactoryError};
use crate::geometry::{
    boundary, update_set, BoxIndex, BoxLattice, BoxSet, BoxedConfiguration, GeometryError, PointConfiguration,
};
use crate::model::{GibbsModel, PotentialKind};
use crate::poisson_gibbs::{ConditionalGibbs, GibbsError, Region};
use crate::rng::RngStream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilterError {
    #[error("invalid filter parameters: {0}")]
    Invalid(String),
    #[error(
        "{what} needs {points} grid points but the enumeration budget is {budget}; \
         use the ssm filter mode for this instance"
    )]
    Budget { what: &'static str, points: f64, budget: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Factory(#[from] FactoryError),
}

impl From<GibbsError> for FilterError {
    fn from(e: GibbsError) -> Self {
        FilterError::Factory(FactoryError::Gibbs(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterMode {
    /// Grid correction for hard spheres with slack `epsilon`.
    HardSphere { epsilon: f64 },
    /// Correction from declared `(a, b)` strong spatial mixing.
    Ssm { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    pub mode: FilterMode,
    /// Update radius in boxes.
    pub radius: usize,
    /// Most grid points any brute-force enumeration may visit.
    pub enumeration_budget: usize,
    /// Overrides both grid pitches. Outputs are then not exact.
    pub unsafe_delta: Option<f64>,
    /// Test hook: halves the correction whenever the current configuration
    /// has points in the resampled boxes other than the chosen one. That
    /// makes the correction depend on boxes it must not see.
    pub bias_hook: bool,
}

impl FilterParams {
    pub fn hard_sphere(epsilon: f64, radius: usize) -> Self {
        FilterParams {
            mode: FilterMode::HardSphere { epsilon },
            radius,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
            unsafe_delta: None,
            bias_hook: false,
        }
    }

    pub fn ssm(a: f64, b: f64, radius: usize) -> Self {
        FilterParams {
            mode: FilterMode::Ssm { a, b },
            radius,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
            unsafe_delta: None,
            bias_hook: false,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.unsafe_delta.is_none() && !self.bias_hook
    }
}

pub const DEFAULT_ENUMERATION_BUDGET: usize = 24;

// Candidate grids larger than this are refused before being listed.
const RAW_GRID_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpacing {
    /// Pitch of the grid that discretises outside configurations.
    pub delta1: f64,
    /// Pitch of the grid that discretises the partition functions.
    pub delta2: f64,
}

/// Grid pitches small enough for the hard-sphere correction to be valid.
pub fn grid_spacings(epsilon: f64, radius: usize, r: f64, lambda: f64, d: usize) -> GridSpacing {
    if lambda == 0.0 {
        return GridSpacing { delta1: r / 2.0, delta2: r / 2.0 };
    }
    let df = d as f64;
    let di = d as i32;
    let l = radius as f64;
    let outer = (2.0 * l + 3.0).powi(di) * r.powi(di);
    let inner = (2.0 * l + 1.0).powi(di) * r.powi(di);
    let delta1 =
        (epsilon / 2.0) / (4f64.powi(di) / r * df.powf((df + 3.0) / 2.0) * outer * lambda * (lambda * inner).exp());
    let m = 2f64.powi(di) * outer * (delta1.powi(-di) + df.powf(df / 2.0) * r.powi(-di)) + outer;
    let delta2 = (epsilon / 4.0)
        / (df.powf(1.5)
            * 2f64.powi(di)
            * (1.0 / r).max(r.powi(di - 1))
            * lambda.max(lambda * lambda)
            * m
            * (lambda * outer).exp());
    GridSpacing { delta1, delta2 }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsmConstants {
    /// Scale applied to the partition-function ratio, in (0, 1].
    pub scale: f64,
    pub a_prime: f64,
    pub b_prime: f64,
    /// Gap bound using the worst-case box volume `(2l+1)^d r^d`.
    pub eps_gap: f64,
}

pub fn ssm_constant(a: f64, b: f64, radius: usize, r: f64, lambda: f64, d: usize) -> SsmConstants {
    let di = d as i32;
    let l = radius as f64;
    let k = 3f64.powi(di)
        * r.powi(di)
        * (2.0 * b * r).exp()
        * (lambda * r.powi(di) + (lambda * 3f64.powi(di) * r.powi(di)).exp());
    let scale = (-a * k * (-b * r * l).exp()).exp();
    let inner = (2.0 * l + 1.0).powi(di) * r.powi(di);
    SsmConstants {
        scale,
        a_prime: 2.0 * a * k + 1.0,
        b_prime: (b * r).min(1.0),
        eps_gap: -(-(-l).exp()).exp_m1() * (-2.0 * lambda * inner).exp(),
    }
}

/// Smallest integer above `max((1 + 7r)/2, 16 a' b'^2)`, and at least 2.
pub fn recommended_radius(a: f64, b: f64, r: f64, lambda: f64, d: usize) -> usize {
    let c = ssm_constant(a, b, 2, r, lambda, d);
    let t = ((1.0 + 7.0 * r) / 2.0).max(16.0 * c.a_prime * c.b_prime * c.b_prime);
    (t.floor() as usize).saturating_add(1).max(2)
}

fn lattice_contains_boxes(lattice: &BoxLattice, set: &BoxSet) -> bool {
    set.iter().all(|v| lattice.is_valid(v))
}

// Boundary points relevant to `set`: those lying in boxes of its outer ring.
fn ring_points(lattice: &BoxLattice, set: &BoxSet, pts: &[f64]) -> Vec<f64> {
    let ring = boundary(lattice, set);
    let d = lattice.dim();
    let mut out = Vec::new();
    for p in pts.chunks_exact(d) {
        if let Ok(v) = lattice.box_of(p) {
            if ring.contains(&v) {
                out.extend_from_slice(p);
            }
        }
    }
    out
}

// Grid indices i with lo <= i*delta, i*delta < hi_open and i*delta <= hi_closed.
fn grid_range(lo: f64, hi_open: f64, hi_closed: f64, delta: f64) -> Option<(i64, i64)> {
    let mut a = (lo / delta).ceil() as i64;
    while (a - 1) as f64 * delta >= lo {
        a -= 1;
    }
    while (a as f64) * delta < lo {
        a += 1;
    }
    let top = hi_open.min(hi_closed);
    let mut b = (top / delta).floor() as i64 + 1;
    while b as f64 * delta >= hi_open || b as f64 * delta > hi_closed {
        b -= 1;
    }
    while ((b + 1) as f64) * delta < hi_open && ((b + 1) as f64) * delta <= hi_closed {
        b += 1;
    }
    (b >= a).then_some((a, b))
}

// Smallest index gap m with m * delta >= r.
fn min_index_gap(delta: f64, r: f64) -> i64 {
    let mut m = ((r / delta).ceil() as i64).max(1);
    while m > 1 && ((m - 1) as f64) * delta >= r {
        m -= 1;
    }
    while (m as f64) * delta < r {
        m += 1;
    }
    m
}

// One dimension: the allowed set splits into intervals more than r apart,
// and on n consecutive grid points the k-subsets with index gaps >= m number
// C(n - (k-1)(m-1), k).
fn zhat_line(lattice: &BoxLattice, set: &BoxSet, bnd: &[f64], delta: f64, lambda: f64) -> f64 {
    let r = lattice.range();
    let w = lambda * delta;
    let m = min_index_gap(delta, r);
    let cells: Vec<usize> = set.iter().map(|v| v.0[0]).collect();
    let mut total = 1.0;
    let mut i = 0;
    while i < cells.len() {
        let mut j = i;
        while j + 1 < cells.len() && cells[j + 1] == cells[j] + 1 {
            j += 1;
        }
        let start = cells[i] as f64 * r;
        let end = ((cells[j] + 1) as f64 * r).min(lattice.length());
        let mut lo = start;
        let mut hi_closed = f64::INFINITY;
        for &y in bnd {
            if y < start {
                lo = lo.max(y + r);
            } else if y >= end {
                hi_closed = hi_closed.min(y - r);
            }
        }
        if let Some((a, b)) = grid_range(lo, end, hi_closed, delta) {
            let n = (b - a + 1) as f64;
            let mut z = 1.0;
            let mut k = 1.0;
            loop {
                let slots = n - (k - 1.0) * (m - 1) as f64;
                if slots < k {
                    break;
                }
                let mut c = 1.0;
                for t in 0..k as usize {
                    c *= (slots - t as f64) / (t as f64 + 1.0);
                }
                z += w.powi(k as i32) * c;
                k += 1.0;
            }
            total *= z;
        }
        i = j + 1;
    }
    total
}

// Grid points of the boxes of `set` that no boundary point excludes.
fn free_grid_points(
    lattice: &BoxLattice,
    set: &BoxSet,
    bnd: &[f64],
    delta: f64,
    budget: usize,
    what: &'static str,
) -> Result<Vec<(Vec<i64>, Vec<f64>)>, FilterError> {
    let d = lattice.dim();
    let r = lattice.range();
    let mut raw = 0.0;
    let mut ranges = Vec::new();
    for v in set {
        let (lo, ext) = lattice.box_bounds(v);
        let mut axes = Vec::with_capacity(d);
        let mut count = 1.0;
        for i in 0..d {
            match grid_range(lo[i], lo[i] + ext[i], f64::INFINITY, delta) {
                Some((a, b)) => {
                    count *= (b - a + 1) as f64;
                    axes.push((a, b));
                }
                None => {
                    count = 0.0;
                    break;
                }
            }
        }
        raw += count;
        if count > 0.0 {
            ranges.push(axes);
        }
    }
    if raw > RAW_GRID_LIMIT.max(budget as f64) {
        return Err(FilterError::Budget { what, points: raw, budget });
    }
    let mut out = Vec::new();
    for axes in ranges {
        let mut idx: Vec<i64> = axes.iter().map(|a| a.0).collect();
        'odometer: loop {
            let x: Vec<f64> = idx.iter().map(|&i| i as f64 * delta).collect();
            let blocked = bnd.chunks_exact(d).any(|y| crate::geometry::distance(&x, y) < r);
            if !blocked {
                out.push((idx.clone(), x));
                if out.len() > budget {
                    return Err(FilterError::Budget { what, points: raw, budget });
                }
            }
            let mut axis = d;
            loop {
                if axis == 0 {
                    break 'odometer;
                }
                axis -= 1;
                if idx[axis] < axes[axis].1 {
                    idx[axis] += 1;
                    for j in axis + 1..d {
                        idx[j] = axes[j].0;
                    }
                    break;
                }
            }
        }
    }
    Ok(out)
}

// Grid-grid separation from index differences, so results do not depend on
// where the grid points sit.
fn grid_separated(a: &[i64], b: &[i64], delta: f64, r: f64) -> bool {
    let s: f64 = a.iter().zip(b).map(|(x, y)| ((x - y) as f64 * delta).powi(2)).sum();
    s.sqrt() >= r
}

fn zhat_enumerate(
    lattice: &BoxLattice,
    set: &BoxSet,
    bnd: &[f64],
    delta: f64,
    lambda: f64,
    budget: usize,
) -> Result<f64, FilterError> {
    let pts = free_grid_points(lattice, set, bnd, delta, budget, "grid partition function")?;
    let w = lambda * delta.powi(lattice.dim() as i32);
    let r = lattice.range();
    fn rec(pts: &[(Vec<i64>, Vec<f64>)], start: usize, chosen: &mut Vec<usize>, w: f64, delta: f64, r: f64) -> f64 {
        let mut total = 1.0;
        for j in start..pts.len() {
            if chosen.iter().all(|&c| grid_separated(&pts[c].0, &pts[j].0, delta, r)) {
                chosen.push(j);
                total += w * rec(pts, j + 1, chosen, w, delta, r);
                chosen.pop();
            }
        }
        total
    }
    Ok(rec(&pts, 0, &mut Vec::new(), w, delta, r))
}

/// Grid approximation of the hard-sphere partition function of the boxes
/// `set` given boundary points `eta`: sum over grid subsets `g` of
/// `(lambda delta^d)^|g|`, restricted to subsets that are hard-core
/// compatible with each other and with `eta` on the outer ring of `set`.
///
/// One-dimensional instances are summed in closed form; higher dimensions
/// enumerate and fail when the grid exceeds `budget`.
pub fn approx_partition_hs(
    lattice: &BoxLattice,
    set: &BoxSet,
    eta: &PointConfiguration,
    delta: f64,
    lambda: f64,
    budget: usize,
) -> Result<f64, FilterError> {
    zhat(lattice, set, eta.coords(), delta, lambda, budget)
}

fn zhat(
    lattice: &BoxLattice,
    set: &BoxSet,
    eta: &[f64],
    delta: f64,
    lambda: f64,
    budget: usize,
) -> Result<f64, FilterError> {
    if !(delta > 0.0) {
        return Err(FilterError::Invalid(format!("grid pitch {delta} must be positive")));
    }
    if !lattice_contains_boxes(lattice, set) {
        return Err(FilterError::Invalid("region has boxes outside the lattice".into()));
    }
    if lambda == 0.0 || set.is_empty() {
        return Ok(1.0);
    }
    let bnd = ring_points(lattice, set, eta);
    if lattice.dim() == 1 {
        Ok(zhat_line(lattice, set, &bnd, delta, lambda))
    } else {
        zhat_enumerate(lattice, set, &bnd, delta, lambda, budget)
    }
}

/// Brute-force version of [`approx_partition_hs`] in any dimension; used to
/// check the one-dimensional closed form.
pub fn approx_partition_hs_enumerated(
    lattice: &BoxLattice,
    set: &BoxSet,
    eta: &PointConfiguration,
    delta: f64,
    lambda: f64,
    budget: usize,
) -> Result<f64, FilterError> {
    if lambda == 0.0 || set.is_empty() {
        return Ok(1.0);
    }
    let bnd = ring_points(lattice, set, eta.coords());
    zhat_enumerate(lattice, set, &bnd, delta, lambda, budget)
}

/// The resampled set, its outer ring, and the part of the domain that is
/// neither correct nor resampled.
struct StepSets {
    q: BoxSet,
    q_minus_v: BoxSet,
    dq: BoxSet,
    hidden_ring: BoxSet,
}

fn step_sets(lattice: &BoxLattice, s: &BoxSet, v: &BoxIndex, radius: usize) -> Result<StepSets, FilterError> {
    let q = update_set(lattice, s, v, radius)?;
    let mut q_minus_v = q.clone();
    q_minus_v.remove(v);
    let dq = boundary(lattice, &q);
    let hidden_ring = dq.iter().filter(|w| !s.contains(*w)).cloned().collect();
    Ok(StepSets { q, q_minus_v, dq, hidden_ring })
}

fn spacing_for(model: &GibbsModel, params: &FilterParams, epsilon: f64) -> GridSpacing {
    match params.unsafe_delta {
        Some(h) => GridSpacing { delta1: h, delta2: h },
        None => grid_spacings(epsilon, params.radius, model.range(), model.lambda, model.dim()),
    }
}

fn check_params(model: &GibbsModel, params: &FilterParams) -> Result<(), FilterError> {
    if params.radius < 1 {
        return Err(FilterError::Invalid("update radius must be at least 1".into()));
    }
    if let Some(h) = params.unsafe_delta {
        if !(h > 0.0 && h.is_finite()) {
            return Err(FilterError::Invalid(format!("grid pitch override {h} must be positive")));
        }
    }
    match params.mode {
        FilterMode::HardSphere { epsilon } => {
            if !(epsilon > 0.0 && epsilon.is_finite()) {
                return Err(FilterError::Invalid(format!("epsilon {epsilon} must be positive")));
            }
            if !model.potential.is_hard_sphere() {
                return Err(FilterError::Invalid("the hard-sphere filter needs the hard-sphere potential".into()));
            }
        }
        FilterMode::Ssm { a, b } => {
            if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                return Err(FilterError::Invalid(format!("mixing constants a={a}, b={b} must be positive")));
            }
        }
    }
    Ok(())
}

/// Hard-sphere correction for the correct set `s` and chosen box `v`, given
/// the current configuration. Only points in the boxes of `s` are read.
pub fn hs_correction(
    model: &GibbsModel,
    params: &FilterParams,
    s: &BoxSet,
    v: &BoxIndex,
    eta: &BoxedConfiguration,
) -> Result<f64, FilterError> {
    check_params(model, params)?;
    let FilterMode::HardSphere { epsilon } = params.mode else {
        return Err(FilterError::Invalid("hard-sphere correction called in ssm mode".into()));
    };
    let lattice = &model.lattice;
    let sets = step_sets(lattice, s, v, params.radius)?;
    hs_correction_inner(model, params, epsilon, s, v, &sets, eta)
}

fn hs_correction_inner(
    model: &GibbsModel,
    params: &FilterParams,
    epsilon: f64,
    s: &BoxSet,
    v: &BoxIndex,
    sets: &StepSets,
    eta: &BoxedConfiguration,
) -> Result<f64, FilterError> {
    let lattice = &model.lattice;
    let d = lattice.dim();
    let r = lattice.range();
    let lambda = model.lambda;
    let budget = params.enumeration_budget;
    let prefactor = (-epsilon).exp();
    if lambda == 0.0 {
        return Ok(prefactor);
    }
    let spacing = spacing_for(model, params, epsilon);

    let mut eta_s = Vec::new();
    eta.collect_into(lattice, s, &mut eta_s);
    let mut s_minus_v = s.clone();
    s_minus_v.remove(v);
    let mut eta_s_minus_v = Vec::new();
    eta.collect_into(lattice, &s_minus_v, &mut eta_s_minus_v);

    // Candidate grid points of the hidden ring; those at distance >= r from
    // the resampled boxes cannot change either grid partition function.
    let near_q = |x: &[f64]| sets.q.iter().any(|w| lattice.distance_to_box(x, w) < r);
    let candidates: Vec<Vec<f64>> =
        free_grid_points(lattice, &sets.hidden_ring, &[], spacing.delta1, usize::MAX, "boundary grid")
            .map_err(|e| match e {
                FilterError::Budget { points, .. } => FilterError::Budget { what: "boundary grid", points, budget },
                other => other,
            })?
            .into_iter()
            .map(|(_, x)| x)
            .filter(|x| near_q(x))
            .collect();
    if candidates.len() > budget {
        return Err(FilterError::Budget { what: "boundary grid", points: candidates.len() as f64, budget });
    }

    let ratio = |gamma: &[f64]| -> Result<f64, FilterError> {
        let mut num_b = gamma.to_vec();
        num_b.extend_from_slice(&eta_s);
        let mut den_b = gamma.to_vec();
        den_b.extend_from_slice(&eta_s_minus_v);
        let num = zhat(lattice, &sets.q_minus_v, &num_b, spacing.delta2, lambda, budget)?;
        let den = zhat(lattice, &sets.q, &den_b, spacing.delta2, lambda, budget)?;
        Ok(num / den)
    };

    // Subsets of candidates whose pairwise distances are at least
    // r - 2 sqrt(d) delta1; this contains every rounded feasible pattern.
    let sep = r - 2.0 * (d as f64).sqrt() * spacing.delta1;
    let mut best = f64::INFINITY;
    let mut stack: Vec<usize> = Vec::new();
    let mut gamma: Vec<f64> = Vec::new();
    fn walk(
        cands: &[Vec<f64>],
        start: usize,
        sep: f64,
        stack: &mut Vec<usize>,
        gamma: &mut Vec<f64>,
        best: &mut f64,
        ratio: &dyn Fn(&[f64]) -> Result<f64, FilterError>,
    ) -> Result<(), FilterError> {
        *best = best.min(ratio(gamma)?);
        for j in start..cands.len() {
            if stack.iter().all(|&c| crate::geometry::distance(&cands[c], &cands[j]) >= sep) {
                stack.push(j);
                gamma.extend_from_slice(&cands[j]);
                walk(cands, j + 1, sep, stack, gamma, best, ratio)?;
                gamma.truncate(gamma.len() - cands[j].len());
                stack.pop();
            }
        }
        Ok(())
    }
    walk(&candidates, 0, sep, &mut stack, &mut gamma, &mut best, &ratio)?;
    let kappa = prefactor * best;

    if params.unsafe_delta.is_none() {
        // every grid sum is at most (1 + lambda delta^d)^(grid size)
        let mut grid = 0.0;
        for w in &sets.q {
            let (lo, ext) = lattice.box_bounds(w);
            grid += (0..d)
                .map(|i| {
                    grid_range(lo[i], lo[i] + ext[i], f64::INFINITY, spacing.delta2)
                        .map_or(0.0, |(a, b)| (b - a + 1) as f64)
                })
                .product::<f64>();
        }
        let floor = prefactor * (-grid * (lambda * spacing.delta2.powi(d as i32)).ln_1p()).exp();
        assert!(kappa >= floor * (1.0 - 1e-9), "correction {kappa} below its floor {floor}");
    }
    Ok(kappa)
}

/// One filter decision plus its cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterDraw {
    pub accept: bool,
    /// Draws of the numerator and denominator coins.
    pub coin_draws: u64,
    /// The correction that scaled the numerator coin.
    pub correction: f64,
}

fn gibbs_coin(model: &GibbsModel, region: &BoxSet, bnd_boxes: &BoxSet, eta: &BoxedConfiguration) -> ConditionalGibbs {
    let lattice = &model.lattice;
    let ring = boundary(lattice, region);
    let mut pts = Vec::new();
    for w in bnd_boxes.intersection(&ring) {
        pts.extend_from_slice(eta.in_box(lattice.linear(w)));
    }
    ConditionalGibbs::from_parts(&model.potential, model.lambda, Region::new(lattice, region), pts)
}

struct EmptyCoin(ConditionalGibbs);

impl Coin for EmptyCoin {
    fn flip(&mut self, rng: &mut RngStream) -> Result<bool, FactoryError> {
        Ok(self.0.empty_coin(rng)?)
    }
}

fn has_points(model: &GibbsModel, set: &BoxSet, eta: &BoxedConfiguration) -> bool {
    set.iter().any(|w| eta.count_in_box(model.lattice.linear(w)) > 0)
}

fn with_v(set: &BoxSet, v: &BoxIndex) -> BoxSet {
    let mut out = set.clone();
    out.insert(v.clone());
    out
}

/// Upper bound on the partition function of one box with no boundary.
/// In one dimension every pair in a box interacts, so hard spheres allow
/// at most one point and Strauss pairs always pay `beta`.
pub fn box_partition_bound(model: &GibbsModel, volume: f64) -> f64 {
    let x = model.lambda * volume;
    if model.dim() != 1 {
        return x.exp();
    }
    match model.potential.kind {
        PotentialKind::HardSphere => 1.0 + x,
        PotentialKind::Strauss { beta } => {
            // exact series up to the point where Poisson terms are negligible,
            // with the remaining Poisson mass added as a bound on the rest
            let (mut term, mut z, mut poisson, mut k) = (1.0f64, 1.0f64, 1.0f64, 0u32);
            while term > 1e-18 * poisson || (k as f64) < x {
                k += 1;
                term *= x / k as f64;
                poisson += term;
                z += term * (-beta * (k as f64) * (k as f64 - 1.0) / 2.0).exp();
            }
            (z + (x.exp() - poisson).max(0.0)) * (1.0 + 1e-12)
        }
        PotentialKind::Radial { .. } => x.exp(),
    }
}

/// Certified lower bound on the empty-set probability of the boxes `set`
/// under any boundary condition. Boundary points and pair terms across boxes
/// only lower the weights, so the product of single-box bounds holds.
pub fn empty_lower_bound(model: &GibbsModel, set: &BoxSet) -> f64 {
    let lattice = &model.lattice;
    let z: f64 = if model.dim() == 1 && model.potential.kind == PotentialKind::HardSphere {
        // hard rods on each maximal run of adjacent boxes have a closed form
        let mut z = 1.0;
        let mut run = 0.0;
        let mut prev: Option<usize> = None;
        for w in set {
            let i = w.coords()[0];
            if prev.is_some_and(|p| p + 1 != i) {
                z *= rod_partition(model.lambda, run, model.range());
                run = 0.0;
            }
            run += lattice.box_volume(w);
            prev = Some(i);
        }
        z * rod_partition(model.lambda, run, model.range()) * (1.0 + 1e-12)
    } else {
        set.iter().map(|w| box_partition_bound(model, lattice.box_volume(w))).product()
    };
    (1.0 - 1e-12) / z
}

/// Partition function of hard rods of length `r` with centres in an
/// interval of length `len`.
fn rod_partition(lambda: f64, len: f64, r: f64) -> f64 {
    let mut z = 1.0;
    let mut k = 1u32;
    loop {
        let free = len - (k as f64 - 1.0) * r;
        if free <= 0.0 {
            return z;
        }
        let mut term = 1.0;
        for j in 1..=k {
            term *= lambda * free / j as f64;
        }
        z += term;
        k += 1;
    }
}

/// Filter coin of the hard-sphere correction.
pub fn hs_filter_coin(
    model: &GibbsModel,
    params: &FilterParams,
    s: &BoxSet,
    v: &BoxIndex,
    eta: &BoxedConfiguration,
    rng: &mut RngStream,
) -> Result<FilterDraw, FilterError> {
    check_params(model, params)?;
    let FilterMode::HardSphere { epsilon } = params.mode else {
        return Err(FilterError::Invalid("hard-sphere filter called in ssm mode".into()));
    };
    let sets = step_sets(&model.lattice, s, v, params.radius)?;
    let mut kappa = hs_correction_inner(model, params, epsilon, s, v, &sets, eta)?;
    if params.bias_hook && has_points(model, &sets.q_minus_v, eta) {
        kappa *= 0.5;
    }
    let numer_const = (-epsilon).exp() * kappa;
    let mut p = CoinOracle::new(And(
        ConstantCoin(numer_const),
        EmptyCoin(gibbs_coin(model, &sets.q_minus_v, &with_v(&sets.dq, v), eta)),
    ));
    let mut q = CoinOracle::new(EmptyCoin(gibbs_coin(model, &sets.q, &sets.dq, eta)));
    // p <= exp(-epsilon) q
    let gap = -(-epsilon).exp_m1() * empty_lower_bound(model, &sets.q);
    let accept = sample_ratio(&mut p, &mut q, gap, rng)?;
    Ok(FilterDraw { accept, coin_draws: p.draws() + q.draws(), correction: kappa })
}

/// Filter coin of the strong-spatial-mixing correction.
pub fn repulsive_filter_coin(
    model: &GibbsModel,
    params: &FilterParams,
    s: &BoxSet,
    v: &BoxIndex,
    eta: &BoxedConfiguration,
    rng: &mut RngStream,
) -> Result<FilterDraw, FilterError> {
    check_params(model, params)?;
    let FilterMode::Ssm { a, b } = params.mode else {
        return Err(FilterError::Invalid("ssm filter called in hard-sphere mode".into()));
    };
    let lattice = &model.lattice;
    let sets = step_sets(lattice, s, v, params.radius)?;
    let consts = ssm_constant(a, b, params.radius, model.range(), model.lambda, model.dim());
    let mut scale = consts.scale;
    if params.bias_hook && has_points(model, &sets.q_minus_v, eta) {
        scale *= 0.5;
    }
    let tail = (-(-(params.radius as f64)).exp()).exp();
    let dq_s: BoxSet = sets.dq.intersection(s).cloned().collect();
    let mut p = CoinOracle::new(And(
        ConstantCoin(tail * scale),
        And(
            EmptyCoin(gibbs_coin(model, &sets.q, &dq_s, eta)),
            EmptyCoin(gibbs_coin(model, &sets.q_minus_v, &with_v(&sets.dq, v), eta)),
        ),
    ));
    let mut q = CoinOracle::new(And(
        EmptyCoin(gibbs_coin(model, &sets.q_minus_v, &with_v(&dq_s, v), eta)),
        EmptyCoin(gibbs_coin(model, &sets.q, &sets.dq, eta)),
    ));
    // p <= exp(-exp(-l)) q when the declared mixing holds
    let gap = -(-(-(params.radius as f64)).exp()).exp_m1()
        * empty_lower_bound(model, &sets.q)
        * empty_lower_bound(model, &sets.q_minus_v);
    let accept = sample_ratio(&mut p, &mut q, gap, rng)?;
    Ok(FilterDraw { accept, coin_draws: p.draws() + q.draws(), correction: scale })
}

/// Filter coin for whichever mode `params` selects.
pub fn filter_coin(
    model: &GibbsModel,
    params: &FilterParams,
    s: &BoxSet,
    v: &BoxIndex,
    eta: &BoxedConfiguration,
    rng: &mut RngStream,
) -> Result<FilterDraw, FilterError> {
    match params.mode {
        FilterMode::HardSphere { .. } => hs_filter_coin(model, params, s, v, eta, rng),
        FilterMode::Ssm { .. } => repulsive_filter_coin(model, params, s, v, eta, rng),
    }
}

/// The correction the filter coin would use for `(s, v, eta)`, hooks
/// included. A valid correction reads `eta` only inside the boxes of `s`.
pub fn filter_correction(
    model: &GibbsModel,
    params: &FilterParams,
    s: &BoxSet,
    v: &BoxIndex,
    eta: &BoxedConfiguration,
) -> Result<f64, FilterError> {
    check_params(model, params)?;
    let sets = step_sets(&model.lattice, s, v, params.radius)?;
    let mut c = match params.mode {
        FilterMode::HardSphere { epsilon } => hs_correction_inner(model, params, epsilon, s, v, &sets, eta)?,
        FilterMode::Ssm { a, b } => ssm_constant(a, b, params.radius, model.range(), model.lambda, model.dim()).scale,
    };
    if params.bias_hook && has_points(model, &sets.q_minus_v, eta) {
        c *= 0.5;
    }
    Ok(c)
}

/// Checks parameters once before a run.
pub fn validate_params(model: &GibbsModel, params: &FilterParams) -> Result<(), FilterError> {
    check_params(model, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PairPotential;

    fn line(len: f64) -> BoxLattice {
        BoxLattice::new(1, len, 1.0).unwrap()
    }

    fn boxes(c: &[usize]) -> BoxSet {
        c.iter().map(|&i| BoxIndex(vec![i])).collect()
    }

    fn hs_model(len: f64, lambda: f64) -> GibbsModel {
        GibbsModel::new(line(len), PairPotential::hard_sphere(1.0), lambda).unwrap()
    }

    #[test]
    fn spacing_examples() {
        let g = grid_spacings(1.0, 1, 1.0, 1.0, 1);
        assert!((g.delta1 - 1.0 / (40.0 * 1f64.exp().powi(3))).abs() < 1e-15);
        let h = grid_spacings(0.5, 1, 1.0, 1.0, 1);
        assert_eq!(h.delta1, g.delta1 / 2.0);
        for d in 1..4 {
            let g = grid_spacings(0.3, 2, 0.7, 1.3, d);
            assert!(g.delta1 > 0.0 && g.delta2 > 0.0);
        }
        assert_eq!(grid_spacings(0.5, 2, 1.0, 0.0, 2), GridSpacing { delta1: 0.5, delta2: 0.5 });
    }

    #[test]
    fn ssm_examples() {
        let c = ssm_constant(1.0, 1.0, 3, 1.0, 1.0, 1);
        let e = 1f64.exp();
        assert!((c.scale.ln() + 3.0 / e * (1.0 + e.powi(3))).abs() < 1e-9);
        assert_eq!(ssm_constant(0.0, 1.0, 3, 1.0, 1.0, 1).scale, 1.0);
        let mut last = 0.0;
        for l in 1..=10 {
            let s = ssm_constant(0.5, 0.5, l, 1.0, 1.0, 1).scale;
            assert!(s > last && s <= 1.0);
            last = s;
        }
        assert!(ssm_constant(0.5, 0.5, 3, 1.0, 1.0, 1).scale > ssm_constant(0.6, 0.5, 3, 1.0, 1.0, 1).scale);
        assert!(ssm_constant(0.5, 0.5, 3, 1.0, 1.0, 1).scale > ssm_constant(0.5, 0.5, 3, 1.0, 1.1, 1).scale);
    }

    #[test]
    fn radius_examples() {
        assert_eq!(recommended_radius(1e-9, 0.1, 1.0, 1.0, 1), 5);
        let mut last = 0;
        for a in [0.001, 0.01, 0.1, 1.0, 10.0] {
            let l = recommended_radius(a, 0.5, 1.0, 1.0, 1);
            assert!(l >= last && l >= 2);
            last = l;
        }
        assert!(recommended_radius(1e-9, 0.1, 0.1, 1.0, 1) >= 2);
    }

    #[test]
    fn zhat_examples() {
        let l = line(2.0);
        let none = PointConfiguration::new(1);
        assert_eq!(approx_partition_hs(&l, &l.all_boxes(), &none, 0.05, 0.0, 24).unwrap(), 1.0);
        // a region holding a single grid point
        let tiny = BoxLattice::new(1, 0.3, 1.0).unwrap();
        let z = approx_partition_hs(&tiny, &tiny.all_boxes(), &none, 0.5, 2.0, 24).unwrap();
        assert!((z - (1.0 + 2.0 * 0.5)).abs() < 1e-12, "{z}");
        let z = approx_partition_hs(&l, &l.all_boxes(), &none, 0.05, 1.0, 24).unwrap();
        assert!((z / 3.5).ln().abs() < 0.25, "{z}");
        assert!((z - 3.525).abs() < 1e-9, "{z}");
    }

    #[test]
    fn zhat_closed_form_matches_enumeration() {
        let l = line(4.0);
        let cases: Vec<(Vec<usize>, Vec<f64>, f64)> = vec![
            (vec![0, 1], vec![], 0.2),
            (vec![1, 2], vec![0.55, 3.2], 0.2),
            (vec![0, 2], vec![1.5], 0.25),
            (vec![1], vec![0.3, 2.99], 0.125),
            (vec![0, 1, 3], vec![2.5], 0.3),
            (vec![2], vec![1.0, 3.0], 0.25),
        ];
        for (set, bnd, delta) in cases {
            let s = boxes(&set);
            let eta = PointConfiguration::from_points(&l, bnd.iter().map(|x| [*x])).unwrap();
            let a = approx_partition_hs(&l, &s, &eta, delta, 1.3, 64).unwrap();
            let b = approx_partition_hs_enumerated(&l, &s, &eta, delta, 1.3, 64).unwrap();
            assert!((a - b).abs() < 1e-12 * b, "{set:?} {bnd:?}: {a} vs {b}");
        }
    }

    #[test]
    fn zhat_budget_error() {
        let l = BoxLattice::new(2, 2.0, 1.0).unwrap();
        let err = approx_partition_hs(&l, &l.all_boxes(), &PointConfiguration::new(2), 0.1, 1.0, 24).unwrap_err();
        assert!(matches!(err, FilterError::Budget { .. }));
        assert!(err.to_string().contains("ssm"));
    }

    #[test]
    fn correction_zero_activity() {
        let m = hs_model(2.0, 0.0);
        let p = FilterParams::hard_sphere(0.5, 2);
        let eta = BoxedConfiguration::new(&m.lattice);
        let k = hs_correction(&m, &p, &m.lattice.all_boxes(), &BoxIndex(vec![0]), &eta).unwrap();
        assert_eq!(k, (-0.5f64).exp());
    }

    #[test]
    fn correction_degenerate_minimisation() {
        let m = hs_model(2.0, 1.0);
        let p = FilterParams::hard_sphere(0.5, 2);
        let eta = BoxedConfiguration::new(&m.lattice);
        let s = m.lattice.all_boxes();
        let k = hs_correction(&m, &p, &s, &BoxIndex(vec![0]), &eta).unwrap();
        let g = grid_spacings(0.5, 2, 1.0, 1.0, 1);
        let z = approx_partition_hs(&m.lattice, &boxes(&[0]), &PointConfiguration::new(1), g.delta2, 1.0, 24).unwrap();
        assert_eq!(k, (-0.5f64).exp() / z);
        assert!(k > 0.0 && k <= (-0.5f64).exp());
    }

    #[test]
    fn correction_ignores_points_outside_correct_set() {
        let m = hs_model(3.0, 0.7);
        let mut p = FilterParams::hard_sphere(0.5, 2);
        p.unsafe_delta = Some(0.4);
        let s = boxes(&[1, 2]);
        let v = BoxIndex(vec![1]);
        let base = PointConfiguration::from_points(&m.lattice, [[2.6]]).unwrap();
        let mut far = base.clone();
        far.push(&[0.4]).unwrap();
        let a = BoxedConfiguration::from_configuration(&m.lattice, &base).unwrap();
        let b = BoxedConfiguration::from_configuration(&m.lattice, &far).unwrap();
        let ka = hs_correction(&m, &p, &s, &v, &a).unwrap();
        let kb = hs_correction(&m, &p, &s, &v, &b).unwrap();
        assert_eq!(ka.to_bits(), kb.to_bits());
    }

    #[test]
    fn correction_budget_error_on_hidden_ring() {
        // S = {0}, radius 1 on five boxes leaves box 2 hidden and adjacent
        let m = hs_model(5.0, 1.0);
        let p = FilterParams::hard_sphere(0.5, 1);
        let eta = BoxedConfiguration::new(&m.lattice);
        let err = hs_correction(&m, &p, &boxes(&[0]), &BoxIndex(vec![0]), &eta).unwrap_err();
        assert!(matches!(err, FilterError::Budget { .. }), "{err}");
    }

    #[test]
    fn hs_coin_zero_activity() {
        let m = hs_model(2.0, 0.0);
        let p = FilterParams::hard_sphere(0.5, 2);
        let eta = BoxedConfiguration::new(&m.lattice);
        let s = m.lattice.all_boxes();
        let mut rng = RngStream::new(3);
        let n = 10_000;
        let mut hits = 0;
        for _ in 0..n {
            hits += hs_filter_coin(&m, &p, &s, &BoxIndex(vec![1]), &eta, &mut rng).unwrap().accept as usize;
        }
        let want = (-1f64).exp();
        assert!((hits as f64 / n as f64 - want).abs() < 4.0 * (want * (1.0 - want) / n as f64).sqrt());
    }

    #[test]
    fn ssm_coin_zero_activity_and_free_potential() {
        let mut rng = RngStream::new(4);
        for (lambda, phi) in [(0.0, PairPotential::hard_sphere(1.0)), (1.0, PairPotential::strauss(1.0, 0.0))] {
            let m = GibbsModel::new(line(3.0), phi, lambda).unwrap();
            let p = FilterParams::ssm(0.01, 0.5, 2);
            let eta = BoxedConfiguration::new(&m.lattice);
            let s = boxes(&[1, 2]);
            let c = ssm_constant(0.01, 0.5, 2, 1.0, lambda, 1).scale;
            let want = (-(-2f64).exp()).exp() * c;
            let n = 10_000;
            let hits = (0..n)
                .filter(|_| repulsive_filter_coin(&m, &p, &s, &BoxIndex(vec![1]), &eta, &mut rng).unwrap().accept)
                .count();
            assert!((hits as f64 / n as f64 - want).abs() < 4.0 * (want * (1.0 - want) / n as f64).sqrt());
        }
    }

    #[test]
    fn box_bounds() {
        let m = hs_model(2.0, 0.5);
        assert_eq!(box_partition_bound(&m, 1.0), 1.5);
        let st = GibbsModel::new(line(2.0), PairPotential::strauss(1.0, 0.0), 0.7).unwrap();
        assert!((box_partition_bound(&st, 1.0) - 0.7f64.exp()).abs() < 1e-9);
        let st = GibbsModel::new(line(2.0), PairPotential::strauss(1.0, 2f64.ln()), 1.0).unwrap();
        // 1 + 1 + 1/4 + 1/48 + ...
        let want: f64 =
            (0..30).map(|k| (1..=k).map(|j| 1.0 / j as f64).product::<f64>() * 0.5f64.powi(k * (k - 1) / 2)).sum();
        let got = box_partition_bound(&st, 1.0);
        assert!(got >= want && got < want * (1.0 + 1e-9), "{got} {want}");
        let sq = GibbsModel::new(BoxLattice::new(2, 2.0, 1.0).unwrap(), PairPotential::hard_sphere(1.0), 0.5).unwrap();
        assert_eq!(box_partition_bound(&sq, 1.0), 0.5f64.exp());
    }

    #[test]
    fn mode_and_potential_must_agree() {
        let m = GibbsModel::new(line(2.0), PairPotential::strauss(1.0, 0.5), 1.0).unwrap();
        let p = FilterParams::hard_sphere(0.5, 2);
        assert!(validate_params(&m, &p).is_err());
    }

    #[test]
    fn recommended_radius_saturates_instead_of_overflowing() {
        assert_eq!(recommended_radius(0.001, 0.1, 1.0, 6.0, 2), usize::MAX);
        let l = BoxLattice::new(2, 3.0, 1.0).unwrap();
        assert_eq!(crate::geometry::ball(&l, &BoxIndex(vec![1, 1]), usize::MAX).len(), 9);
    }
}
