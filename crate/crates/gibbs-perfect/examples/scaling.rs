//! Wall time per unit volume over growing strips.
use gibbs_perfect::bayes_filter::FilterParams;
use gibbs_perfect::harness::{hard_sphere_model, scaling_benchmark};
use gibbs_perfect::sampler::SamplerConfig;

fn main() {
    let base = SamplerConfig::new(hard_sphere_model(1, 8.0, 1.0, 0.5).unwrap(), FilterParams::ssm(0.001, 0.1, 2));
    let report = scaling_benchmark(&base, &[8.0, 16.0, 32.0], 20, 1, 3.0, false).unwrap();
    for s in &report.sizes {
        println!(
            "L={:>4}: median {:>8.3} ms, mean {:>8.3} ms, {:>6.1} steps, {:.4} ms per unit volume",
            s.length,
            s.median_wall_seconds * 1e3,
            s.mean_wall_seconds * 1e3,
            s.mean_iterations,
            s.time_per_volume * 1e3
        );
    }
    println!("ratio {:.2} (bound {}) pass={}", report.ratio, report.bound, report.pass);
}
