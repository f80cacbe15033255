//! The filter side of a step: grid pitches, the grid approximation of Z,
//! corrections and the coin that gates a resample.
use gibbs_perfect::bayes_filter::{
    approx_partition_hs, filter_coin, grid_spacings, hs_correction, recommended_radius, ssm_constant, FilterParams,
};
use gibbs_perfect::geometry::BoxedConfiguration;
use gibbs_perfect::model::GibbsModel;
use gibbs_perfect::{BoxIndex, BoxLattice, PairPotential, PointConfiguration, RngStream};

fn main() {
    let g = grid_spacings(0.5, 2, 1.0, 1.0, 1);
    println!("grid pitches for eps=0.5: {:.3e} and {:.3e}", g.delta1, g.delta2);

    let lattice = BoxLattice::new(1, 2.0, 1.0).unwrap();
    let all = lattice.all_boxes();
    let none = PointConfiguration::new(1);
    let zhat = approx_partition_hs(&lattice, &all, &none, g.delta2, 1.0, 24).unwrap();
    println!("grid Z on [0,2): {zhat:.5} (exact 3.5)");

    let model = GibbsModel::new(lattice.clone(), PairPotential::hard_sphere(1.0), 1.0).unwrap();
    let params = FilterParams::hard_sphere(0.5, 2);
    let eta =
        BoxedConfiguration::from_configuration(&lattice, &PointConfiguration::from_points(&lattice, [[1.7]]).unwrap())
            .unwrap();
    let v = BoxIndex(vec![0]);
    let only_v = [v.clone()].into_iter().collect();
    let kappa = hs_correction(&model, &params, &only_v, &v, &eta).unwrap();
    println!("hard-sphere correction for box 0 with a point at 1.7: {kappa:.4}");

    let mut rng = RngStream::new(3);
    let n = 2000;
    let acc = (0..n).filter(|_| filter_coin(&model, &params, &only_v, &v, &eta, &mut rng).unwrap().accept).count();
    println!("filter coin accepts {:.3} of the time", acc as f64 / n as f64);

    let c = ssm_constant(0.001, 0.1, 5, 1.0, 1.0, 1);
    println!("mixing correction at radius 5: {:.4}, gap {:.2e}", c.scale, c.eps_gap);
    println!("recommended radius for a=0.001 b=0.1: {}", recommended_radius(0.001, 0.1, 1.0, 1.0, 1));
}
