use mgsr_core::expr::{
    parse_prefix, protected_div, protected_log10, PROTECTED_DIV_EPS, random_erc, random_tree, ComplexityMeasure, ExprTree, Function,
    Method, Palette,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn palette() -> Palette {
    Palette::new(Function::ALL.to_vec(), 4).unwrap().with_erc(true, (-4.0, 4.0)).unwrap()
}

fn tree(seed: u64, depth: usize, full: bool) -> ExprTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = if full { Method::Full } else { Method::Grow };
    random_tree(&palette(), depth, &mut rng, m).unwrap()
}

/// Node counts of every subtree, summed by explicit enumeration.
fn ec_by_subtrees(t: &ExprTree) -> usize {
    (0..t.node_count()).map(|i| t.subtree(i).unwrap().node_count()).sum()
}

/// A value drawn from a mix of ordinary, tiny, huge and special magnitudes.
fn awkward(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..6) {
        0 => rng.random_range(-10.0..10.0),
        1 => rng.random_range(-1e-12..1e-12),
        2 => rng.random_range(-1e300..1e300),
        3 => 0.0,
        4 => -0.0,
        _ => [f64::MIN_POSITIVE, -f64::MIN_POSITIVE, f64::MAX, -f64::MAX, 5e-324][rng.random_range(0..5)],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn complexity_bounds(seed in any::<u64>(), depth in 1usize..8, full in any::<bool>()) {
        let t = tree(seed, depth, full);
        let ec = t.expressional_complexity();
        prop_assert_eq!(ec, ec_by_subtrees(&t));
        prop_assert!(ec >= t.node_count());
        prop_assert_eq!(ec == t.node_count(), t.is_leaf());
        prop_assert!(ec <= t.node_count() * t.depth());
        prop_assert_eq!(ComplexityMeasure::Expressional.of(&t), ec);
        prop_assert_eq!(ComplexityMeasure::NodeCount.of(&t), t.node_count());
        prop_assert!(t.depth() <= depth);
        if full {
            prop_assert_eq!(t.depth(), depth);
        }
    }

    #[test]
    fn prefix_text_round_trips(seed in any::<u64>(), depth in 1usize..7) {
        let t = tree(seed, depth, false);
        let text = t.to_string();
        let back = parse_prefix(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(back.canonical_key(), t.canonical_key());
    }

    #[test]
    fn evaluation_is_pure_and_rowwise(seed in any::<u64>(), depth in 1usize..6) {
        let t = tree(seed, depth, seed % 2 == 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(9));
        let x = DMatrix::from_fn(25, 4, |_, _| rng.random_range(-5.0..5.0));
        let a = t.eval(&x).unwrap();
        let b = t.eval(&x).unwrap();
        for r in 0..x.nrows() {
            let row: Vec<f64> = x.row(r).iter().copied().collect();
            let s = t.eval_row(&row);
            prop_assert!(a[r].to_bits() == b[r].to_bits());
            prop_assert!(a[r].to_bits() == s.to_bits() || (a[r].is_nan() && s.is_nan()), "row {r}: {} vs {s}", a[r]);
        }
    }

    #[test]
    fn generation_is_reproducible(seed in any::<u64>(), depth in 1usize..7) {
        prop_assert_eq!(tree(seed, depth, false), tree(seed, depth, false));
        let t = tree(seed, depth, false);
        prop_assert!(t.validate(4).is_ok());
    }
}

#[test]
fn protected_functions_stay_finite() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100_000 {
        let (a, b) = (awkward(&mut rng), awkward(&mut rng));
        let q = protected_div(a, b);
        assert!(q.is_finite(), "{a} / {b} gave {q}");
        if b.abs() >= PROTECTED_DIV_EPS && (a / b).is_finite() {
            assert_eq!(q, a / b);
        }
        let l = protected_log10(a);
        assert!(l.is_finite(), "log10({a}) gave {l}");
        if a != 0.0 {
            assert_eq!(l, a.abs().log10());
        }
        let s = Function::PSqrt.apply(&[a]);
        assert!(s.is_finite() && s >= 0.0);
    }
}

#[test]
fn erc_draws_cover_the_range_uniformly() {
    let p = palette();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 100_000;
    let draws: Vec<f64> = (0..n).map(|_| random_erc(&p, &mut rng)).collect();
    assert!(draws.iter().all(|v| (-4.0..=4.0).contains(v)));
    let mean = draws.iter().sum::<f64>() / n as f64;
    let var = draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    // U(-4, 4): mean 0, variance 64/12; standard error of the mean ≈ 0.0073.
    assert!(mean.abs() < 0.03, "mean {mean}");
    assert!((var - 64.0 / 12.0).abs() < 0.06, "variance {var}");
}
