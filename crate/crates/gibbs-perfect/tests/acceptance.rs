//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::Command;
use std::time::Instant;

use gibbs_perfect::bayes_filter::{
    approx_partition_hs, grid_spacings, hs_correction, recommended_radius, FilterParams,
};
use gibbs_perfect::bernoulli_factory::{huber_double, sample_ratio, CoinOracle, ConstantCoin};
use gibbs_perfect::geometry::{BoxSet, BoxedConfiguration};
use gibbs_perfect::harness::{
    baseline_batch, gof_test, hard_sphere_model, invariance_checks, run_batch, scaling_benchmark, two_sample_test,
    TwoSampleStatistic,
};
use gibbs_perfect::model::{
    boltzmann, count_pmf_oracle, cross_energy, hamiltonian, is_feasible, partition_oracle, Activity, GibbsModel,
    OracleRegion, QuadratureSpec,
};
use gibbs_perfect::poisson_gibbs::sample_poisson;
use gibbs_perfect::sampler::{step, SamplerConfig, SamplerState};
use gibbs_perfect::{BoxIndex, BoxLattice, PairPotential, PointConfiguration, RngStream};

const ALPHA: f64 = 1e-3;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn line_instance() -> SamplerConfig {
    SamplerConfig::new(hard_sphere_model(1, 2.0, 1.0, 1.0).unwrap(), FilterParams::hard_sphere(0.5, 2))
}

/// Hard rods on an interval, summed directly: the k-rod term is
/// `lambda^k (len - (k-1) r)^k / k!`.
fn rod_pmf(lambda: f64, len: f64, r: f64) -> Vec<f64> {
    let mut terms = vec![1.0];
    for k in 1.. {
        let free = len - (k as f64 - 1.0) * r;
        if free <= 0.0 {
            break;
        }
        let fact: f64 = (1..=k).map(|j| j as f64).product();
        terms.push((lambda * free).powi(k) / fact);
    }
    let z: f64 = terms.iter().sum();
    terms.iter().map(|t| t / z).collect()
}

fn exact_distribution() -> Outcome {
    let pmf = rod_pmf(1.0, 2.0, 1.0);
    let oracle = count_pmf_oracle(
        &PairPotential::hard_sphere(1.0),
        &Activity::new(1.0, 1),
        &OracleRegion::cuboid(vec![0.0], vec![2.0]),
        &QuadratureSpec::default(),
    )
    .map_err(|e| e.to_string())?;
    let agree = pmf.len() == oracle.len() && pmf.iter().zip(&oracle).all(|(a, b)| (a - b).abs() < 1e-3);
    let xs: Vec<_> =
        run_batch(&line_instance(), 10_000, 1).map_err(|e| e.to_string())?.into_iter().map(|r| r.0).collect();
    let g = gof_test(&xs, &pmf, ALPHA).map_err(|e| e.to_string())?;
    check(
        agree && g.pass && g.dof == 2,
        format!("pmf {pmf:.6?}, oracle agrees={agree}, chi2 {:.3} on {} dof < {:.2}", g.statistic, g.dof, g.threshold),
    )
}

fn cross_sampler() -> Outcome {
    let model = hard_sphere_model(2, 3.0, 1.0, 0.2).unwrap();
    let cfg = SamplerConfig::new(model.clone(), FilterParams::ssm(0.001, 0.1, 2));
    let ours: Vec<_> = run_batch(&cfg, 5000, 2).map_err(|e| e.to_string())?.into_iter().map(|r| r.0).collect();
    let base = baseline_batch(&model, 5000, 2 + (1 << 40)).map_err(|e| e.to_string())?;
    let c = two_sample_test(&ours, &base, TwoSampleStatistic::CountPmf, ALPHA).map_err(|e| e.to_string())?;
    let m = two_sample_test(&ours, &base, TwoSampleStatistic::MinPairDistance, ALPHA).map_err(|e| e.to_string())?;
    check(
        c.pass && m.pass,
        format!(
            "count chi2 {:.2} < {:.2}; min-distance chi2 {:.2} < {:.2}",
            c.statistic, c.threshold, m.statistic, m.threshold
        ),
    )
}

fn strauss() -> Outcome {
    let phi = PairPotential::strauss(1.0, std::f64::consts::LN_2);
    let model = GibbsModel::new(BoxLattice::new(1, 2.0, 1.0).unwrap(), phi, 1.0).unwrap();
    let radius = recommended_radius(0.001, 0.1, 1.0, 1.0, 1);
    let pmf = count_pmf_oracle(
        &phi,
        &Activity::new(1.0, 1),
        &OracleRegion::cuboid(vec![0.0], vec![2.0]),
        &QuadratureSpec { tolerance: 5e-3, ..Default::default() },
    )
    .map_err(|e| e.to_string())?;
    let cfg = SamplerConfig::new(model, FilterParams::ssm(0.001, 0.1, radius));
    let xs: Vec<_> = run_batch(&cfg, 10_000, 3).map_err(|e| e.to_string())?.into_iter().map(|r| r.0).collect();
    let g = gof_test(&xs, &pmf, ALPHA).map_err(|e| e.to_string())?;
    check(g.pass, format!("radius {radius}, chi2 {:.3} on {} dof < {:.2}", g.statistic, g.dof, g.threshold))
}

fn factories() -> Outcome {
    let n = 100_000;
    let mut rng = RngStream::new(4);
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    let mut cells = 0;
    for qi in 2..=10 {
        let q = qi as f64 / 10.0;
        for pi in 0..=(qi - 2) {
            let p = pi as f64 / 10.0;
            let target = p / q;
            let (mut pc, mut qc) = (ConstantCoin(p), ConstantCoin(q));
            let mut hits = 0;
            for _ in 0..n {
                hits += sample_ratio(&mut pc, &mut qc, q - p, &mut rng).map_err(|e| e.to_string())? as usize;
            }
            let tol = 4.0 * (target * (1.0 - target) / n as f64).sqrt();
            let err = (hits as f64 / n as f64 - target).abs();
            // a deterministic target must come out exactly
            if err > tol || (tol == 0.0 && err != 0.0) {
                bad.push((p, q));
            }
            if tol > 0.0 {
                worst = worst.max(err / tol);
            }
            cells += 1;
        }
    }
    for (rho, eps) in [(0.2, 0.2), (0.45, 0.05)] {
        let mut coin = ConstantCoin(rho);
        let mut hits = 0;
        for _ in 0..n {
            hits += huber_double(&mut coin, eps, &mut rng).map_err(|e| e.to_string())?.0 as usize;
        }
        let t = 2.0 * rho;
        let tol = 4.0 * (t * (1.0 - t) / n as f64).sqrt();
        let err = (hits as f64 / n as f64 - t).abs();
        if err > tol {
            bad.push((rho, eps));
        }
        worst = worst.max(err / tol);
    }
    check(
        bad.is_empty(),
        format!("{cells} ratio cells + 2 doubling cells, worst error {worst:.2} of 4 sigma, failing {bad:?}"),
    )
}

fn cost_law() -> Outcome {
    let gaps = [0.4, 0.2, 0.1];
    let n = 20_000;
    let mut rng = RngStream::new(5);
    let mut means = Vec::new();
    for &gap in &gaps {
        let q = 0.6;
        let (mut p, mut qc) = (CoinOracle::new(ConstantCoin(q - gap)), CoinOracle::new(ConstantCoin(q)));
        for _ in 0..n {
            sample_ratio(&mut p, &mut qc, gap, &mut rng).map_err(|e| e.to_string())?;
        }
        means.push((p.draws() + qc.draws()) as f64 / n as f64);
    }
    let xs: Vec<f64> = gaps.iter().map(|g| (1.0 / g).ln()).collect();
    let ys: Vec<f64> = means.iter().map(|m| m.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    check(slope <= 2.5, format!("mean draws {means:.1?} at gaps {gaps:?}, fitted exponent {slope:.3}"))
}

fn termination() -> Outcome {
    let cfg = line_instance();
    let runs = run_batch(&cfg, 1000, 6).map_err(|e| e.to_string())?;
    let mean = runs.iter().map(|r| r.1.iterations as f64).sum::<f64>() / runs.len() as f64;
    let bound = 3.0 * cfg.model.lattice.num_boxes() as f64;
    check(mean <= bound, format!("mean T {mean:.3} <= {bound}"))
}

fn scaling() -> Outcome {
    let base = SamplerConfig::new(hard_sphere_model(1, 16.0, 1.0, 0.5).unwrap(), FilterParams::ssm(0.001, 0.1, 2));
    let r = scaling_benchmark(&base, &[16.0, 32.0, 64.0], 20, 7, 2.0, false).map_err(|e| e.to_string())?;
    let per: Vec<String> = r
        .sizes
        .iter()
        .map(|s| {
            format!(
                "L={} median {:.3} ms/vol mean {:.3} ms/vol",
                s.length,
                s.time_per_volume * 1e3,
                s.mean_wall_seconds / s.volume * 1e3
            )
        })
        .collect();
    check(r.pass, format!("ratio {:.2} (bound 2); {}", r.ratio, per.join(", ")))
}

fn markov_equalities(notes: &mut Vec<String>) -> bool {
    let spec = QuadratureSpec { tolerance: 1e-2, ..Default::default() };
    let region = OracleRegion::cuboid(vec![0.0], vec![1.0]);
    let mut ok = true;
    for phi in [PairPotential::hard_sphere(1.0), PairPotential::strauss(1.0, 0.7)] {
        let z = |pts: &[f64]| {
            let mut b = PointConfiguration::new(1);
            for &p in pts {
                b.push(&[p]).unwrap();
            }
            partition_oracle(&phi, &Activity::with_boundary(1.0, b), &region, &spec).unwrap().z
        };
        let (free, far, near) = (z(&[]), z(&[3.0]), z(&[1.5]));
        ok &= free.to_bits() == far.to_bits() && near < free;
    }
    notes.push(format!("spatial Markov {ok}"));
    ok
}

fn measurability(notes: &mut Vec<String>) -> bool {
    // the grid correction is affordable only where the update ball covers
    // the window
    let cfg = line_instance();
    let (model, params) = (cfg.model.clone(), cfg.filter);
    let lattice = &model.lattice;
    let mut rng = RngStream::new(8);
    let mut ok = true;
    let mut trials = 0;
    for (x, _) in run_batch(&cfg, 100, 80).unwrap() {
        let eta = BoxedConfiguration::from_configuration(lattice, &x).unwrap();
        for _ in 0..5 {
            let s: BoxSet = lattice.all_boxes().into_iter().filter(|_| rng.uniform() < 0.4).collect();
            if s.is_empty() {
                continue;
            }
            let v = s.iter().nth(rng.index(s.len())).unwrap().clone();
            // redraw everything outside the incorrect boxes
            let mut moved = BoxedConfiguration::from_configuration(lattice, &eta.restrict(lattice, &s)).unwrap();
            let outside: BoxSet = lattice.all_boxes().difference(&s).cloned().collect();
            let extra = sample_poisson(lattice, &outside, 1.0, &mut rng);
            for p in extra.iter() {
                moved.push(lattice.linear_of_point(p), p);
            }
            let a = hs_correction(&model, &params, &s, &v, &eta);
            let b = hs_correction(&model, &params, &s, &v, &moved);
            ok &= match (a, b) {
                (Ok(a), Ok(b)) => a.to_bits() == b.to_bits(),
                _ => false,
            };
            trials += 1;
        }
    }
    let inv = invariance_checks(&line_instance(), 1000, 81).map(|r| r.correction_measurable && r.pass).unwrap_or(false);
    notes.push(format!("correction bit-identical over {trials} perturbations {ok}, invariance report {inv}"));
    ok && inv
}

fn feasibility(notes: &mut Vec<String>) -> bool {
    let configs = [
        SamplerConfig::new(hard_sphere_model(1, 8.0, 1.0, 0.5).unwrap(), FilterParams::ssm(0.001, 0.1, 2)),
        SamplerConfig::new(hard_sphere_model(2, 3.0, 1.0, 0.2).unwrap(), FilterParams::ssm(0.001, 0.1, 2)),
        line_instance(),
    ];
    let mut steps = 0;
    let mut ok = true;
    for (i, cfg) in configs.iter().enumerate() {
        let mut seed = 100 * i as u64;
        let mut state = SamplerState::start(&cfg.model, seed);
        for _ in 0..3400 {
            if state.is_done() {
                seed += 1;
                state = SamplerState::start(&cfg.model, seed);
            }
            if step(&mut state, cfg).is_err() {
                ok = false;
                break;
            }
            steps += 1;
            ok &= is_feasible(&cfg.model.potential, &state.x.to_configuration());
        }
    }
    notes.push(format!("feasible after each of {steps} steps {ok}"));
    ok && steps >= 10_000
}

fn weights_in_unit_interval(notes: &mut Vec<String>) -> bool {
    let lattice = BoxLattice::new(1, 5.0, 1.0).unwrap();
    let inner: BoxSet = [1, 2, 3].into_iter().map(|i| BoxIndex(vec![i])).collect();
    let outer: BoxSet = [0, 4].into_iter().map(|i| BoxIndex(vec![i])).collect();
    let mut rng = RngStream::new(9);
    let mut ok = true;
    for phi in [PairPotential::hard_sphere(1.0), PairPotential::strauss(1.0, 0.7)] {
        for _ in 0..10_000 {
            let y = sample_poisson(&lattice, &inner, 1.0, &mut rng);
            let b = sample_poisson(&lattice, &outer, 1.0, &mut rng);
            let w = boltzmann(hamiltonian(&phi, &y) + cross_energy(&phi, &y, &b));
            ok &= (0.0..=1.0).contains(&w);
        }
    }
    notes.push(format!("rejection weights in [0,1] {ok}"));
    ok
}

fn grid_partition(notes: &mut Vec<String>) -> bool {
    // the window [0,2) with boundary points placed in the rest of a longer strip
    let lattice = BoxLattice::new(1, 4.0, 1.0).unwrap();
    let window: BoxSet = [0, 1].into_iter().map(|i| BoxIndex(vec![i])).collect();
    let eps = 0.5;
    let g = grid_spacings(eps, 2, 1.0, 1.0, 1);
    let phi = PairPotential::hard_sphere(1.0);
    let spec = QuadratureSpec::default();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for bnd in [vec![], vec![2.4], vec![2.9], vec![2.05, 3.5], vec![3.2]] {
        let eta = PointConfiguration::from_points(&lattice, bnd.iter().map(|&p| [p])).unwrap();
        let zhat = approx_partition_hs(&lattice, &window, &eta, g.delta2, 1.0, 24).unwrap();
        let z = partition_oracle(
            &phi,
            &Activity::with_boundary(1.0, eta),
            &OracleRegion::cuboid(vec![0.0], vec![2.0]),
            &spec,
        )
        .unwrap();
        let gap = (zhat / z.z).ln().abs();
        // the oracle is itself only good to its error bound
        ok &= zhat >= 1.0 && gap <= eps / 2.0 + z.error_bound / z.z;
        worst = worst.max(gap);
    }
    notes.push(format!("grid Z >= 1 and |log(grid Z / Z)| <= {worst:.2e} (limit {})", eps / 2.0));
    ok
}

fn invariants() -> Outcome {
    let mut notes = Vec::new();
    let ok = [
        markov_equalities(&mut notes),
        measurability(&mut notes),
        feasibility(&mut notes),
        weights_in_unit_interval(&mut notes),
        grid_partition(&mut notes),
    ]
    .iter()
    .all(|&b| b);
    check(ok, notes.join("; "))
}

fn cli_output(args: &[&str]) -> Vec<u8> {
    let o = Command::new(env!("CARGO_BIN_EXE_gibbs-perfect")).args(args).output().expect("binary runs");
    let mut bytes = o.status.code().unwrap_or(-1).to_string().into_bytes();
    bytes.extend(o.stdout);
    bytes
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("gibbs-perfect-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let out = dir.join("samples.jsonl");
    let sample = [
        "sample",
        "--dim",
        "2",
        "--length",
        "3",
        "--range",
        "1",
        "--lambda",
        "0.2",
        "--mode",
        "ssm:0.001,0.1",
        "--radius",
        "2",
        "--samples",
        "200",
        "--seed",
        "17",
        "--out",
        out.to_str().unwrap(),
    ];
    cli_output(&sample);
    let first = std::fs::read(&out).map_err(|e| e.to_string())?;
    cli_output(&sample);
    let second = std::fs::read(&out).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_dir_all(&dir);
    let validate = [
        "validate",
        "--dim",
        "1",
        "--length",
        "2",
        "--range",
        "1",
        "--lambda",
        "1",
        "--mode",
        "hs:0.5",
        "--radius",
        "2",
        "--samples",
        "2000",
        "--seed",
        "3",
    ];
    let (va, vb) = (cli_output(&validate), cli_output(&validate));
    let cfg = line_instance();
    let (la, lb) = (run_batch(&cfg, 200, 5).unwrap(), run_batch(&cfg, 200, 5).unwrap());
    let same_lib = la.iter().zip(&lb).all(|(a, b)| a.0 == b.0 && a.1.coin_draws == b.1.coin_draws);
    check(
        !first.is_empty() && first == second && va == vb && same_lib,
        format!(
            "sample {} bytes identical {}, validate report identical {}, library batch identical {same_lib}",
            first.len(),
            first == second,
            va == vb
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("exact distribution on [0,2)", exact_distribution),
        ("agreement with global rejection in 2d", cross_sampler),
        ("Strauss distribution", strauss),
        ("factory exactness", factories),
        ("factory cost law", cost_law),
        ("mean step count", termination),
        ("linear scaling", scaling),
        ("structural invariants", invariants),
        ("determinism", determinism),
    ];
    // `cargo test --test acceptance -- 3 7` runs only those criteria
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let t0 = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} {tag}: {name} [{:.1}s] {detail}", i + 1, t0.elapsed().as_secs_f64());
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
