//! Poisson draws, exact conditional Gibbs draws and empty-set coins.
use gibbs_perfect::poisson_gibbs::{empty_set_coin, sample_conditional_gibbs, sample_poisson};
use gibbs_perfect::{BoxLattice, PairPotential, PointConfiguration, RngStream};

fn main() {
    let lattice = BoxLattice::new(1, 2.0, 1.0).unwrap();
    let all = lattice.all_boxes();
    let hs = PairPotential::hard_sphere(1.0);
    let mut rng = RngStream::new(7);

    let n = 20_000;
    let mean = (0..n).map(|_| sample_poisson(&lattice, &all, 1.0, &mut rng).len()).sum::<usize>() as f64 / n as f64;
    println!("Poisson(2) count mean over {n}: {mean:.3}");

    let none = PointConfiguration::new(1);
    let mut hist = [0usize; 4];
    for _ in 0..n {
        let x = sample_conditional_gibbs(&hs, 1.0, &lattice, &all, &none, &mut rng).unwrap();
        hist[x.len().min(3)] += 1;
    }
    let freq: Vec<f64> = hist.iter().map(|&c| c as f64 / n as f64).collect();
    println!("hard-rod counts: {freq:.4?}  (exact 2/7, 4/7, 1/7)");

    let empties = (0..n).filter(|_| empty_set_coin(&hs, 1.0, &lattice, &all, &none, &mut rng).unwrap()).count();
    println!("empty coin mean {:.4} vs 1/Z = {:.4}", empties as f64 / n as f64, 1.0 / 3.5);
}
