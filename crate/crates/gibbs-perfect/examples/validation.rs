//! Checking the sampler: oracle goodness of fit, a rejection baseline
//! and the structural invariants.
use gibbs_perfect::bayes_filter::FilterParams;
use gibbs_perfect::harness::{
    baseline_batch, gof_test, hard_sphere_model, invariance_checks, run_batch, two_sample_test, TwoSampleStatistic,
};
use gibbs_perfect::model::{count_pmf_oracle, Activity, OracleRegion, QuadratureSpec};
use gibbs_perfect::sampler::SamplerConfig;
use gibbs_perfect::PairPotential;

fn main() {
    let model = hard_sphere_model(1, 2.0, 1.0, 1.0).unwrap();
    let config = SamplerConfig::new(model, FilterParams::hard_sphere(0.5, 2));
    let pmf = count_pmf_oracle(
        &PairPotential::hard_sphere(1.0),
        &Activity::new(1.0, 1),
        &OracleRegion::cuboid(vec![0.0], vec![2.0]),
        &QuadratureSpec::default(),
    )
    .unwrap();
    let xs: Vec<_> = run_batch(&config, 2000, 1).unwrap().into_iter().map(|(x, _)| x).collect();
    let gof = gof_test(&xs, &pmf, 1e-3).unwrap();
    println!(
        "oracle fit: chi2 {:.2} on {} dof (threshold {:.2}) pass={}",
        gof.statistic, gof.dof, gof.threshold, gof.pass
    );

    let plane = hard_sphere_model(2, 3.0, 1.0, 0.2).unwrap();
    let plane_cfg = SamplerConfig::new(plane.clone(), FilterParams::ssm(0.001, 0.1, 2));
    let ours: Vec<_> = run_batch(&plane_cfg, 500, 2).unwrap().into_iter().map(|(x, _)| x).collect();
    let base = baseline_batch(&plane, 500, 1 << 40).unwrap();
    for stat in [TwoSampleStatistic::CountPmf, TwoSampleStatistic::MinPairDistance] {
        let r = two_sample_test(&ours, &base, stat, 1e-3).unwrap();
        println!("vs rejection baseline, {stat:?}: chi2 {:.2} pass={}", r.statistic, r.pass);
    }

    let inv = invariance_checks(&config, 200, 9).unwrap();
    println!("invariants: {inv:?}");
}
