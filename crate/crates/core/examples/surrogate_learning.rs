//! Feeds the surrogate ratings from a designer who only cares about coupling
//! and watches the weights move.

use antdesign::fitness::{combined_score, MetricVector, WeightVector};
use antdesign::surrogate::SurrogateModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let taste = WeightVector::new(0.8, 0.1, 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut model = SurrogateModel::new();
    let mut weights = WeightVector::INITIAL;

    println!(" n   a0       a1       a2       a3      | wCbo  wNac  wAtmr");
    for n in 1..=15 {
        let m = MetricVector::new(rng.random(), rng.random_range(0.0..3.0), rng.random_range(0.0..2.0));
        let rating = (100.0 * combined_score(&m, &taste)).round() as i64;
        model.record_evaluation(m, rating).unwrap();
        weights = model.weights(weights);
        let a = model.coefficients();
        println!(
            "{n:>2}  {:>7.2}  {:>7.2}  {:>7.2}  {:>7.2}  | {:.2}  {:.2}  {:.2}",
            a[0], a[1], a[2], a[3], weights.cbo(), weights.nac(), weights.atmr()
        );
    }
    let probe = MetricVector::new(0.2, 0.5, 0.3);
    println!("predicted rating for {probe:?}: {:.1}", model.predict(&probe));
}
