//! Statistical checks and the scaling benchmark.
//!
//! Batches run on a rayon pool capped by `GIBBS_PERFECT_THREADS`; run `i`
//! always uses seed `seed + i`, and results come back in index order, so the
//! thread count never changes an outcome.

use std::hint::black_box;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bayes_filter::filter_correction;
use crate::geometry::{distance, BoxIndex, BoxLattice, BoxSet, BoxedConfiguration, PointConfiguration};
use crate::model::{
    boltzmann, hamiltonian, partition_oracle, Activity, GibbsModel, OracleError, OracleRegion, PairPotential,
    QuadratureSpec,
};
use crate::poisson_gibbs::poisson_count;
use crate::rng::RngStream;
use crate::sampler::{run, RunDiagnostics, SamplerConfig, SamplerError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("too few samples: {0}")]
    TooFewSamples(String),
    #[error("no critical value for {dof} degrees of freedom at alpha {alpha}")]
    NoCriticalValue { dof: usize, alpha: f64 },
    #[error("global rejection acceptance {0:e} is below the floor 1e-4")]
    AcceptanceFloor(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

// Upper quantiles of chi-square with 1..=8 degrees of freedom.
const CHI2_01: [f64; 8] = [6.635, 9.210, 11.345, 13.277, 15.086, 16.812, 18.475, 20.090];
const CHI2_001: [f64; 8] = [10.828, 13.816, 16.266, 18.467, 20.515, 22.458, 24.322, 26.124];

pub const MAX_DOF: usize = 8;

/// Critical value for `alpha` in {0.01, 0.001}. Zero degrees of freedom
/// has no statistic to exceed, so any value passes.
pub fn chi2_critical(dof: usize, alpha: f64) -> Result<f64, HarnessError> {
    if dof == 0 {
        return Ok(f64::INFINITY);
    }
    let table = if alpha == 0.01 {
        &CHI2_01
    } else if alpha == 0.001 {
        &CHI2_001
    } else {
        return Err(HarnessError::NoCriticalValue { dof, alpha });
    };
    table.get(dof - 1).copied().ok_or(HarnessError::NoCriticalValue { dof, alpha })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofReport {
    pub statistic: f64,
    pub dof: usize,
    pub threshold: f64,
    pub pass: bool,
    /// Observed counts per merged bin; one row per sample set.
    pub observed: Vec<Vec<u64>>,
    pub expected: Vec<Vec<f64>>,
    /// Lower edge of each merged bin, in the binned statistic's units.
    pub bin_lower: Vec<f64>,
}

// Greedy left-to-right merge so that every bin reaches `need`; a short
// remainder joins the last bin. Returns index ranges.
fn merge_bins(weights: &[f64], need: f64) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if acc >= need {
            out.push((start, i + 1));
            start = i + 1;
            acc = 0.0;
        }
    }
    if start < weights.len() {
        match out.last_mut() {
            Some(last) => last.1 = weights.len(),
            None => out.push((0, weights.len())),
        }
    }
    out
}

/// Pearson goodness of fit of per-sample point counts against a count pmf.
/// Counts beyond the pmf's support go to a tail bin of the remaining mass.
pub fn gof_counts(counts: &[usize], pmf: &[f64], alpha: f64) -> Result<GofReport, HarnessError> {
    let n = counts.len();
    if n == 0 {
        return Err(HarnessError::TooFewSamples("no samples".into()));
    }
    if pmf.is_empty() || pmf.iter().any(|p| !(*p >= 0.0)) {
        return Err(HarnessError::Invalid("pmf must be non-empty and non-negative".into()));
    }
    let mut probs = pmf.to_vec();
    probs.push((1.0 - pmf.iter().sum::<f64>()).max(0.0));
    let k = probs.len();
    let mut obs = vec![0u64; k];
    for &c in counts {
        obs[c.min(k - 1)] += 1;
    }
    let expected: Vec<f64> = probs.iter().map(|p| p * n as f64).collect();
    let bins = merge_bins(&expected, 5.0);
    let o: Vec<u64> = bins.iter().map(|&(a, b)| obs[a..b].iter().sum()).collect();
    let e: Vec<f64> = bins.iter().map(|&(a, b)| expected[a..b].iter().sum()).collect();
    if bins.len() == 1 && probs.iter().filter(|p| **p > 1e-12).count() > 1 {
        return Err(HarnessError::TooFewSamples(format!("{n} samples leave a single bin with 5 expected counts")));
    }
    if e.iter().any(|x| *x < 5.0) && bins.len() > 1 {
        return Err(HarnessError::TooFewSamples(format!("{n} samples cannot fill bins of 5 expected counts")));
    }
    let statistic: f64 = o.iter().zip(&e).map(|(o, e)| (*o as f64 - e).powi(2) / e).sum();
    let dof = bins.len() - 1;
    let threshold = chi2_critical(dof, alpha)?;
    Ok(GofReport {
        statistic,
        dof,
        threshold,
        pass: statistic < threshold,
        observed: vec![o],
        expected: vec![e],
        bin_lower: bins.iter().map(|b| b.0 as f64).collect(),
    })
}

pub fn gof_test(samples: &[PointConfiguration], pmf: &[f64], alpha: f64) -> Result<GofReport, HarnessError> {
    let counts: Vec<usize> = samples.iter().map(|s| s.len()).collect();
    gof_counts(&counts, pmf, alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoSampleStatistic {
    CountPmf,
    MinPairDistance,
}

/// Smallest pairwise distance; `inf` with fewer than two points.
pub fn min_pair_distance(x: &PointConfiguration) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            best = best.min(distance(x.get(i), x.get(j)));
        }
    }
    best
}

fn statistic_of(x: &PointConfiguration, stat: TwoSampleStatistic) -> f64 {
    match stat {
        TwoSampleStatistic::CountPmf => x.len() as f64,
        TwoSampleStatistic::MinPairDistance => min_pair_distance(x),
    }
}

// Distance bins per homogeneity test, before merging.
const DISTANCE_BINS: usize = 8;

/// Chi-square homogeneity test of a binned statistic between two batches.
/// Counts bin by value; distances bin at pooled quantiles, with a separate
/// bin for samples that have fewer than two points.
pub fn two_sample_test(
    a: &[PointConfiguration],
    b: &[PointConfiguration],
    stat: TwoSampleStatistic,
    alpha: f64,
) -> Result<GofReport, HarnessError> {
    if a.is_empty() || b.is_empty() {
        return Err(HarnessError::TooFewSamples("both batches must be non-empty".into()));
    }
    let va: Vec<f64> = a.iter().map(|x| statistic_of(x, stat)).collect();
    let vb: Vec<f64> = b.iter().map(|x| statistic_of(x, stat)).collect();
    let mut pooled: Vec<f64> = va.iter().chain(&vb).copied().filter(|v| v.is_finite()).collect();
    pooled.sort_by(f64::total_cmp);
    pooled.dedup();
    // lower edges; a value falls in the last bin whose edge it reaches
    let mut edges: Vec<f64> = match stat {
        TwoSampleStatistic::CountPmf => pooled.clone(),
        TwoSampleStatistic::MinPairDistance => {
            let all: Vec<f64> = {
                let mut v: Vec<f64> = va.iter().chain(&vb).copied().filter(|v| v.is_finite()).collect();
                v.sort_by(f64::total_cmp);
                v
            };
            let mut e: Vec<f64> =
                (0..DISTANCE_BINS).filter_map(|i| all.get(i * all.len() / DISTANCE_BINS).copied()).collect();
            e.dedup();
            e
        }
    };
    let has_inf = va.iter().chain(&vb).any(|v| v.is_infinite());
    if edges.is_empty() || has_inf {
        edges.push(f64::INFINITY);
    }
    if edges[0].is_finite() {
        edges[0] = f64::NEG_INFINITY;
    }
    let bin_of = |v: f64| edges.iter().rposition(|e| v >= *e).unwrap_or(0);
    let k = edges.len();
    let mut oa = vec![0u64; k];
    let mut ob = vec![0u64; k];
    for &v in &va {
        oa[bin_of(v)] += 1;
    }
    for &v in &vb {
        ob[bin_of(v)] += 1;
    }
    let (na, nb) = (va.len() as f64, vb.len() as f64);
    let n = na + nb;
    // column totals scaled so the smaller row's expected count is compared to 5
    let scale = na.min(nb) / n;
    let cols: Vec<f64> = (0..k).map(|i| (oa[i] + ob[i]) as f64 * scale).collect();
    let mut bins = merge_bins(&cols, 5.0);
    while bins.len() > MAX_DOF + 1 {
        // join the lightest adjacent pair
        let j = (0..bins.len() - 1)
            .min_by(|&x, &y| {
                let w = |i: usize| cols[bins[i].0..bins[i + 1].1].iter().sum::<f64>();
                w(x).total_cmp(&w(y))
            })
            .unwrap();
        bins[j].1 = bins[j + 1].1;
        bins.remove(j + 1);
    }
    let sum = |o: &[u64], r: (usize, usize)| o[r.0..r.1].iter().sum::<u64>();
    let obs_a: Vec<u64> = bins.iter().map(|&r| sum(&oa, r)).collect();
    let obs_b: Vec<u64> = bins.iter().map(|&r| sum(&ob, r)).collect();
    let col: Vec<f64> = obs_a.iter().zip(&obs_b).map(|(x, y)| (x + y) as f64).collect();
    let exp_a: Vec<f64> = col.iter().map(|c| c * na / n).collect();
    let exp_b: Vec<f64> = col.iter().map(|c| c * nb / n).collect();
    if bins.len() > 1 && exp_a.iter().chain(&exp_b).any(|e| *e < 5.0) {
        return Err(HarnessError::TooFewSamples("batches cannot fill bins of 5 expected counts".into()));
    }
    let mut statistic = 0.0;
    for i in 0..bins.len() {
        statistic += (obs_a[i] as f64 - exp_a[i]).powi(2) / exp_a[i];
        statistic += (obs_b[i] as f64 - exp_b[i]).powi(2) / exp_b[i];
    }
    let dof = bins.len() - 1;
    let threshold = chi2_critical(dof, alpha)?;
    Ok(GofReport {
        statistic,
        dof,
        threshold,
        pass: statistic < threshold,
        observed: vec![obs_a, obs_b],
        expected: vec![exp_a, exp_b],
        bin_lower: bins.iter().map(|r| if r.0 == 0 { f64::NEG_INFINITY } else { edges[r.0] }).collect(),
    })
}

pub const BASELINE_ACCEPTANCE_FLOOR: f64 = 1e-4;

/// Exact sample by rejection on the whole domain: Poisson proposals are
/// kept with probability `exp(-H)`. Written independently of the sampler's
/// conditional draws.
pub fn global_rejection_baseline(model: &GibbsModel, rng: &mut RngStream) -> Result<PointConfiguration, HarnessError> {
    let lattice = &model.lattice;
    let vol = lattice.volume();
    let floor = (-model.lambda * vol).exp();
    if floor < BASELINE_ACCEPTANCE_FLOOR {
        return Err(HarnessError::AcceptanceFloor(floor));
    }
    let d = lattice.dim();
    let mut p = vec![0.0; d];
    loop {
        let n = poisson_count(model.lambda * vol, rng);
        let mut x = PointConfiguration::new(d);
        for _ in 0..n {
            for c in p.iter_mut() {
                *c = rng.uniform() * lattice.length();
            }
            x.push_unchecked(&p);
        }
        let w = boltzmann(hamiltonian(&model.potential, &x));
        if w == 1.0 || (w > 0.0 && rng.bernoulli(w)) {
            return Ok(x);
        }
    }
}

fn pool() -> rayon::ThreadPool {
    let threads = std::env::var("GIBBS_PERFECT_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool")
}

/// `n` sampler runs with seeds `seed, seed + 1, ...`, in seed order, each
/// with its own outcome.
pub fn run_batch_each(
    config: &SamplerConfig,
    n: usize,
    seed: u64,
) -> Vec<Result<(PointConfiguration, RunDiagnostics), SamplerError>> {
    pool().install(|| (0..n).into_par_iter().map(|i| run(config, seed.wrapping_add(i as u64))).collect())
}

/// Like [`run_batch_each`], failing on the first aborted run.
pub fn run_batch(
    config: &SamplerConfig,
    n: usize,
    seed: u64,
) -> Result<Vec<(PointConfiguration, RunDiagnostics)>, HarnessError> {
    run_batch_each(config, n, seed).into_iter().map(|r| r.map_err(HarnessError::from)).collect()
}

/// `n` baseline samples with seeds `seed, seed + 1, ...`.
pub fn baseline_batch(model: &GibbsModel, n: usize, seed: u64) -> Result<Vec<PointConfiguration>, HarnessError> {
    let out: Vec<_> = pool().install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| global_rejection_baseline(model, &mut RngStream::new(seed.wrapping_add(i as u64))))
            .collect()
    });
    out.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    /// Oracle unchanged by a boundary point at distance `2r`.
    pub markov_far_equal: bool,
    /// Oracle reduced (or unchanged for a potential that is zero in range)
    /// by a boundary point at distance `r/2`.
    pub markov_near_ok: bool,
    /// The filter correction did not change when points outside the
    /// incorrect boxes were removed, over random incorrect sets.
    pub correction_measurable: bool,
    pub occupancy_mean: f64,
    pub occupancy_bound: f64,
    pub occupancy_ok: bool,
    pub pass: bool,
}

const MEASURABILITY_TRIALS: usize = 50;

/// Spatial-Markov checks of the oracle on `[0, r)`, the Poisson domination
/// check on `runs` sampler outputs, and a measurability check of the filter
/// correction on some of those outputs.
pub fn invariance_checks(config: &SamplerConfig, runs: usize, seed: u64) -> Result<InvarianceReport, HarnessError> {
    let model = &config.model;
    let r = model.range();
    let phi = model.potential;
    let region = OracleRegion::cuboid(vec![0.0], vec![r]);
    let spec = QuadratureSpec::default();
    let z = |bnd: &[f64]| -> Result<f64, HarnessError> {
        let line = BoxLattice::new(1, 4.0 * r, r).map_err(|e| HarnessError::Invalid(e.to_string()))?;
        let pts = PointConfiguration::from_points(&line, bnd.iter().map(|x| [*x]))
            .map_err(|e| HarnessError::Invalid(e.to_string()))?;
        Ok(partition_oracle(&phi, &Activity::with_boundary(model.lambda, pts), &region, &spec)?.z)
    };
    let z0 = z(&[])?;
    let far = z(&[3.0 * r])?;
    let near = z(&[1.5 * r])?;
    let interacts = model.lambda > 0.0 && phi.min_within_range() > 0.0;
    let markov_far_equal = far.to_bits() == z0.to_bits();
    let markov_near_ok = if interacts { near < z0 } else { near <= z0 };

    let outs = run_batch(config, runs, seed)?;
    let boxes = model.lattice.num_boxes() as f64;
    let cell = r.powi(model.dim() as i32);
    let occupancy_mean = outs.iter().map(|(x, _)| x.len() as f64 / boxes).sum::<f64>() / runs.max(1) as f64;
    let mean_bound = model.lambda * cell;
    let occupancy_bound = mean_bound + 4.0 * (mean_bound / runs.max(1) as f64).sqrt();
    let occupancy_ok = occupancy_mean <= occupancy_bound;

    let lattice = &model.lattice;
    let all: Vec<BoxIndex> = lattice.all_boxes().into_iter().collect();
    let mut rng = RngStream::new(seed ^ 0x6d65_6173);
    let mut correction_measurable = true;
    for (x, _) in outs.iter().take(MEASURABILITY_TRIALS) {
        let s: BoxSet = loop {
            let s: BoxSet = all.iter().filter(|_| rng.fair_bit()).cloned().collect();
            if !s.is_empty() {
                break s;
            }
        };
        let v = s.iter().nth(rng.index(s.len())).cloned().expect("non-empty");
        let full =
            BoxedConfiguration::from_configuration(lattice, x).map_err(|e| HarnessError::Invalid(e.to_string()))?;
        let inside = BoxedConfiguration::from_configuration(lattice, &full.restrict(lattice, &s))
            .map_err(|e| HarnessError::Invalid(e.to_string()))?;
        let a = filter_correction(model, &config.filter, &s, &v, &full).map(f64::to_bits);
        let b = filter_correction(model, &config.filter, &s, &v, &inside).map(f64::to_bits);
        correction_measurable &= a == b;
    }
    Ok(InvarianceReport {
        markov_far_equal,
        markov_near_ok,
        correction_measurable,
        occupancy_mean,
        occupancy_bound,
        occupancy_ok,
        pass: markov_far_equal && markov_near_ok && correction_measurable && occupancy_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeReport {
    pub length: f64,
    pub volume: f64,
    pub median_wall_seconds: f64,
    pub mean_wall_seconds: f64,
    pub mean_iterations: f64,
    pub time_per_volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub sizes: Vec<SizeReport>,
    /// Largest over smallest time per volume.
    pub ratio: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Stand-in for a sampler whose cost grows with the square of the volume;
/// used to check that the benchmark notices.
fn quadratic_stub(model: &GibbsModel) -> RunDiagnostics {
    let n = model.lattice.num_boxes();
    let mut acc = 0u64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..20_000u64 {
                acc = acc.wrapping_mul(6364136223846793005).wrapping_add((i * n + j) as u64 ^ k);
            }
        }
    }
    black_box(acc);
    RunDiagnostics { iterations: n as u64, accepts: n as u64, ..Default::default() }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Times `runs` sequential runs per domain length and compares median wall
/// time per unit volume across sizes.
pub fn scaling_benchmark(
    base: &SamplerConfig,
    lengths: &[f64],
    runs: usize,
    seed: u64,
    bound: f64,
    quadratic: bool,
) -> Result<ScalingReport, HarnessError> {
    if lengths.is_empty() || lengths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(HarnessError::Invalid("lengths must be non-empty and strictly increasing".into()));
    }
    if runs == 0 {
        return Err(HarnessError::Invalid("need at least one run per size".into()));
    }
    let mut sizes = Vec::new();
    for &len in lengths {
        let lattice = BoxLattice::new(base.model.dim(), len, base.model.range())
            .map_err(|e| HarnessError::Invalid(e.to_string()))?;
        let model = GibbsModel::new(lattice, base.model.potential, base.model.lambda)?;
        let cfg = SamplerConfig { model, ..base.clone() };
        let mut walls = Vec::with_capacity(runs);
        let mut iters = 0.0;
        for i in 0..runs {
            let t0 = Instant::now();
            let d = if quadratic { quadratic_stub(&cfg.model) } else { run(&cfg, seed.wrapping_add(i as u64))?.1 };
            walls.push(t0.elapsed().as_secs_f64());
            iters += d.iterations as f64;
        }
        let volume = cfg.model.lattice.volume();
        let mean_wall = walls.iter().sum::<f64>() / runs as f64;
        let med = median(&mut walls);
        sizes.push(SizeReport {
            length: len,
            volume,
            median_wall_seconds: med,
            mean_wall_seconds: mean_wall,
            mean_iterations: iters / runs as f64,
            time_per_volume: med / volume,
        });
    }
    let tpv: Vec<f64> = sizes.iter().map(|s| s.time_per_volume).collect();
    let hi = tpv.iter().copied().fold(f64::MIN, f64::max);
    let lo = tpv.iter().copied().fold(f64::MAX, f64::min);
    let ratio = if sizes.len() == 1 { 1.0 } else { hi / lo };
    Ok(ScalingReport { sizes, ratio, bound, pass: ratio <= bound })
}

/// Hard-sphere potential helper for callers that only know the range.
pub fn hard_sphere_model(dim: usize, length: f64, range: f64, lambda: f64) -> Result<GibbsModel, HarnessError> {
    let lattice = BoxLattice::new(dim, length, range).map_err(|e| HarnessError::Invalid(e.to_string()))?;
    Ok(GibbsModel::new(lattice, PairPotential::hard_sphere(range), lambda)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes_filter::FilterParams;

    fn draw_counts(pmf: &[f64], n: usize, seed: u64) -> Vec<usize> {
        let mut rng = RngStream::new(seed);
        (0..n)
            .map(|_| {
                let u = rng.uniform();
                let mut acc = 0.0;
                pmf.iter()
                    .position(|p| {
                        acc += p;
                        u < acc
                    })
                    .unwrap_or(pmf.len() - 1)
            })
            .collect()
    }

    const HARD_RODS: [f64; 3] = [2.0 / 7.0, 4.0 / 7.0, 1.0 / 7.0];

    #[test]
    fn table_lookup() {
        assert_eq!(chi2_critical(2, 0.001).unwrap(), 13.816);
        assert_eq!(chi2_critical(8, 0.01).unwrap(), 20.090);
        assert!(chi2_critical(9, 0.01).is_err());
        assert!(chi2_critical(2, 0.05).is_err());
    }

    #[test]
    fn gof_calibration_and_power() {
        let r = gof_counts(&draw_counts(&HARD_RODS, 10_000, 1), &HARD_RODS, 0.001).unwrap();
        assert!(r.pass && r.dof == 2, "{r:?}");
        let r = gof_counts(&draw_counts(&[0.5, 0.4, 0.1], 10_000, 2), &HARD_RODS, 0.001).unwrap();
        assert!(!r.pass, "{r:?}");
    }

    #[test]
    fn gof_meta_calibration() {
        let fails = (0..100)
            .filter(|i| !gof_counts(&draw_counts(&HARD_RODS, 2000, 100 + i), &HARD_RODS, 0.01).unwrap().pass)
            .count();
        assert!(fails <= 5, "{fails}");
    }

    #[test]
    fn gof_degenerate_and_small() {
        let r = gof_counts(&[0; 20], &[1.0], 0.001).unwrap();
        assert_eq!((r.statistic, r.dof, r.pass), (0.0, 0, true));
        assert!(matches!(gof_counts(&[0, 1], &HARD_RODS, 0.001), Err(HarnessError::TooFewSamples(_))));
        assert!(gof_counts(&[], &HARD_RODS, 0.001).is_err());
    }

    #[test]
    fn gof_tail_merging() {
        let pmf = [0.4, 0.4, 0.15, 0.04, 0.01];
        let r = gof_counts(&draw_counts(&pmf, 200, 3), &pmf, 0.01).unwrap();
        assert!(r.expected[0].iter().all(|e| *e >= 5.0));
        assert_eq!(r.observed[0].iter().sum::<u64>(), 200);
    }

    #[test]
    fn two_sample_identical_batches() {
        let m = hard_sphere_model(1, 3.0, 1.0, 1.0).unwrap();
        let a = baseline_batch(&m, 300, 1).unwrap();
        for stat in [TwoSampleStatistic::CountPmf, TwoSampleStatistic::MinPairDistance] {
            let r = two_sample_test(&a, &a, stat, 0.001).unwrap();
            assert_eq!(r.statistic, 0.0);
        }
    }

    #[test]
    fn two_sample_detects_shift() {
        let a = baseline_batch(&hard_sphere_model(1, 3.0, 1.0, 1.0).unwrap(), 2000, 1).unwrap();
        let b = baseline_batch(&hard_sphere_model(1, 3.0, 1.0, 2.0).unwrap(), 2000, 9000).unwrap();
        assert!(!two_sample_test(&a, &b, TwoSampleStatistic::CountPmf, 0.001).unwrap().pass);
    }

    #[test]
    fn baseline_examples() {
        let mut rng = RngStream::new(5);
        assert!(global_rejection_baseline(&hard_sphere_model(1, 4.0, 1.0, 0.0).unwrap(), &mut rng).unwrap().is_empty());
        let m = hard_sphere_model(1, 2.0, 1.0, 1.0).unwrap();
        let a = baseline_batch(&m, 50, 7).unwrap();
        let b = baseline_batch(&m, 50, 7).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            global_rejection_baseline(&hard_sphere_model(1, 10.0, 1.0, 1.0).unwrap(), &mut rng),
            Err(HarnessError::AcceptanceFloor(_))
        ));
        let r = gof_test(&baseline_batch(&m, 10_000, 11).unwrap(), &HARD_RODS, 0.001).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn scaling_single_length_and_stub() {
        let m = hard_sphere_model(1, 4.0, 1.0, 0.0).unwrap();
        let cfg = SamplerConfig::new(m, FilterParams::ssm(0.01, 1.0, 2));
        let r = scaling_benchmark(&cfg, &[4.0], 3, 1, 2.0, false).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert!(r.pass);
        let r = scaling_benchmark(&cfg, &[8.0, 32.0], 3, 1, 2.0, true).unwrap();
        assert!(!r.pass, "{r:?}");
        assert!(scaling_benchmark(&cfg, &[4.0, 4.0], 3, 1, 2.0, false).is_err());
    }

    #[test]
    fn invariance_on_small_instance() {
        let m = hard_sphere_model(1, 3.0, 1.0, 0.5).unwrap();
        let cfg = SamplerConfig::new(m, FilterParams::ssm(0.01, 1.0, 2));
        let r = invariance_checks(&cfg, 200, 3).unwrap();
        assert!(r.pass, "{r:?}");
        let mut biased = cfg.clone();
        biased.filter.bias_hook = true;
        let r = invariance_checks(&biased, 200, 3).unwrap();
        assert!(!r.correction_measurable && !r.pass, "{r:?}");
    }
}
