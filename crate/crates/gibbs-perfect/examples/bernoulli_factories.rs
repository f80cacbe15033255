//! Coins from coins: averaging, doubling and ratios of unknown biases.
use gibbs_perfect::bernoulli_factory::{
    average_coin, double_coin, ratio_from_gap_coin, sample_ratio, Coin, CoinOracle, ConstantCoin,
};
use gibbs_perfect::RngStream;

fn mean(coin: &mut impl Coin, n: usize, rng: &mut RngStream) -> f64 {
    (0..n).filter(|_| coin.flip(rng).unwrap()).count() as f64 / n as f64
}

fn main() {
    let mut rng = RngStream::new(1);
    let n = 100_000;

    let mut avg = average_coin(ConstantCoin(0.3), ConstantCoin(0.7));
    println!("(1 - (q - p)) / 2 with p=0.3 q=0.7: {:.4}", mean(&mut avg, n, &mut rng));

    let mut dbl = double_coin(ConstantCoin(0.2), 0.2).unwrap();
    println!("doubling 0.2: {:.4}", mean(&mut dbl, n, &mut rng));

    let mut ratio = ratio_from_gap_coin(ConstantCoin(0.2), ConstantCoin(0.4));
    println!("p/q from p=0.2 and gap 0.4: {:.4}", mean(&mut ratio, n, &mut rng));

    // The same ratio from the two coins alone, counting their draws.
    let (mut p, mut q) = (CoinOracle::new(ConstantCoin(0.2)), CoinOracle::new(ConstantCoin(0.6)));
    let hits = (0..n).filter(|_| sample_ratio(&mut p, &mut q, 0.4, &mut rng).unwrap()).count();
    println!(
        "sample_ratio: {:.4}, {:.1} sub-coin draws per bit",
        hits as f64 / n as f64,
        (p.draws() + q.draws()) as f64 / n as f64
    );
}
