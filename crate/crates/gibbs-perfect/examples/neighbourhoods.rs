//! Box lattice basics: which boxes a step touches.
use gibbs_perfect::geometry::{ball, boundary, update_set};
use gibbs_perfect::{BoxIndex, BoxLattice};

fn main() {
    let lattice = BoxLattice::new(2, 6.0, 1.0).expect("valid lattice");
    println!("{} boxes of side {}", lattice.num_boxes(), lattice.range());

    let v = BoxIndex(vec![2, 3]);
    let b = ball(&lattice, &v, 1);
    println!("ball of radius 1 around {:?}: {} boxes", v.coords(), b.len());
    println!("its boundary: {} boxes", boundary(&lattice, &b).len());

    // With every box incorrect the update set is just the chosen box.
    let all = lattice.all_boxes();
    let q = update_set(&lattice, &all, &v, 2).unwrap();
    println!("update set with everything incorrect: {:?}", q.iter().map(|w| w.coords().to_vec()).collect::<Vec<_>>());

    // Once only v is incorrect it grows to the whole ball.
    let only_v = [v.clone()].into_iter().collect();
    let q = update_set(&lattice, &only_v, &v, 2).unwrap();
    println!("update set with only v incorrect: {} boxes", q.len());

    let p = [5.5, 0.2];
    println!("point {p:?} lies in box {:?}", lattice.box_of(&p).unwrap().coords());
}
