//! Brute-force partition functions and count distributions on small windows.
use gibbs_perfect::model::{count_pmf_oracle, partition_oracle, Activity, OracleRegion, QuadratureSpec};
use gibbs_perfect::{PairPotential, PointConfiguration};

fn main() {
    let window = OracleRegion::cuboid(vec![0.0], vec![2.0]);
    let quad = QuadratureSpec { tolerance: 5e-3, ..Default::default() };

    let hs = PairPotential::hard_sphere(1.0);
    let z = partition_oracle(&hs, &Activity::new(1.0, 1), &window, &quad).unwrap();
    println!("hard rods on [0,2), lambda 1: Z = {:.6} (+- {:.1e})", z.z, z.error_bound);
    let pmf = count_pmf_oracle(&hs, &Activity::new(1.0, 1), &window, &quad).unwrap();
    println!("count pmf: {pmf:.6?}");

    let strauss = PairPotential::strauss(1.0, std::f64::consts::LN_2);
    let z = partition_oracle(&strauss, &Activity::new(1.0, 1), &window, &quad).unwrap();
    println!("strauss beta=ln2: Z = {:.5}, per-count terms {:.4?}", z.z, z.terms);

    // A boundary point at 2.5 blocks [1.5, 2) for hard rods
    let mut eta = PointConfiguration::new(1);
    eta.push(&[2.5]).unwrap();
    let z = partition_oracle(&hs, &Activity::with_boundary(1.0, eta), &window, &quad).unwrap();
    println!("with a boundary point at 2.5: Z = {:.6}", z.z);
}
