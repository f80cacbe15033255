//! Soft repulsion: Strauss draws and their count distribution.
use gibbs_perfect::bayes_filter::{recommended_radius, FilterParams};
use gibbs_perfect::harness::run_batch;
use gibbs_perfect::model::GibbsModel;
use gibbs_perfect::sampler::SamplerConfig;
use gibbs_perfect::{BoxLattice, PairPotential};

fn main() {
    let (a, b) = (0.001, 0.1);
    let radius = recommended_radius(a, b, 1.0, 1.0, 1);
    let model = GibbsModel::new(
        BoxLattice::new(1, 2.0, 1.0).unwrap(),
        PairPotential::strauss(1.0, std::f64::consts::LN_2),
        1.0,
    )
    .unwrap();
    let config = SamplerConfig::new(model, FilterParams::ssm(a, b, radius));
    let n = 400;
    let out = run_batch(&config, n, 5).unwrap();
    let mut hist = [0usize; 5];
    for (x, _) in &out {
        hist[x.len().min(4)] += 1;
    }
    println!("update radius {radius}; count frequencies over {n} runs:");
    for (k, c) in hist.iter().enumerate() {
        println!("  {k}{} {:.3}", if k == 4 { "+" } else { " " }, *c as f64 / n as f64);
    }
}
