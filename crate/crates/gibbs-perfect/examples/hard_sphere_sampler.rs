//! Exact hard-sphere draws on a strip, with run diagnostics.
use gibbs_perfect::bayes_filter::FilterParams;
use gibbs_perfect::harness::{hard_sphere_model, min_pair_distance};
use gibbs_perfect::sampler::{run, SamplerConfig};

fn main() {
    let model = hard_sphere_model(1, 12.0, 1.0, 0.5).unwrap();
    let config = SamplerConfig::new(model, FilterParams::ssm(0.001, 0.1, 2));
    for seed in 0..3 {
        let (x, d) = run(&config, seed).unwrap();
        let mut pts: Vec<f64> = x.iter().map(|p| p[0]).collect();
        pts.sort_by(f64::total_cmp);
        println!(
            "seed {seed}: {} points, closest pair {:.3}, {} steps ({} rejects), {} coin draws",
            x.len(),
            min_pair_distance(&x),
            d.iterations,
            d.rejects,
            d.coin_draws
        );
        println!("  {pts:.2?}");
    }

    // The grid-based filter on a window it can afford.
    let small = hard_sphere_model(1, 2.0, 1.0, 1.0).unwrap();
    let (x, d) = run(&SamplerConfig::new(small, FilterParams::hard_sphere(0.5, 2)), 11).unwrap();
    println!("on [0,2) with the grid filter: {:?} after {} steps", x.to_vecs(), d.iterations);
}
