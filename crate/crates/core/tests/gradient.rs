use monoplane::data::LabeledPattern;
use monoplane::perceptron::{cost, cost_gradient, WeightVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(rng: &mut ChaCha8Rng) -> (WeightVector, Vec<LabeledPattern>, f64) {
    let n = rng.gen_range(2..12);
    let p = rng.gen_range(3..30);
    let w = WeightVector::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
    let set = (0..p)
        .map(|mu| {
            let x: Vec<f64> = (1..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            LabeledPattern::new(mu + 1, &x, if rng.gen_bool(0.5) { 1 } else { -1 })
        })
        .collect();
    (w, set, rng.gen_range(0.1..5.0))
}

fn central_difference(w: &WeightVector, set: &[LabeledPattern], t: f64, i: usize) -> f64 {
    let eps = 1e-6;
    let mut plus = w.components().to_vec();
    let mut minus = plus.clone();
    plus[i] += eps;
    minus[i] -= eps;
    let ep = cost(&WeightVector::new(plus).unwrap(), set, t).unwrap();
    let em = cost(&WeightVector::new(minus).unwrap(), set, t).unwrap();
    (ep - em) / (2.0 * eps)
}

/// Relative error per component, with the denominator floored at a
/// thousandth of the largest component so vanishing entries compare on
/// an absolute scale.
#[test]
fn hundred_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (w, set, t) = instance(&mut rng);
        let analytic = cost_gradient(&w, &set, t).unwrap();
        let scale = analytic.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        for (i, a) in analytic.iter().enumerate() {
            let n = central_difference(&w, &set, t, i);
            let rel = (a - n).abs() / a.abs().max(n.abs()).max(1e-3 * scale);
            worst = worst.max(rel);
        }
    }
    assert!(worst < 1e-5, "max relative error {worst}");
}

#[test]
fn limits_of_the_cost() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let (w, set, _) = instance(&mut rng);
        let half = set.len() as f64 / 2.0;
        assert!((cost(&w, &set, 1e12).unwrap() - half).abs() < 1e-9);
    }
    let w = WeightVector::new(vec![0.0, 1.0]).unwrap();
    let t = 0.01;
    let wrong = [LabeledPattern::new(1, &[-0.5], 1)];
    let right = [LabeledPattern::new(1, &[0.5], 1)];
    assert!((cost(&w, &wrong, t).unwrap() - 1.0).abs() < 1e-8);
    assert!(cost(&w, &right, t).unwrap() < 1e-8);
}
