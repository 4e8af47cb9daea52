mod common;

use lilaw_core::metrics::{
    auprc_binary, auroc_binary, fit_temperature, macro_ovr_auroc, mean_nll, top_k_accuracy, Positive,
    ScoredFlags,
};
use lilaw_core::nn::{softmax_rows, Matrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Twice the pairwise win count: 2 per strict win, 1 per tie.
fn pairwise_wins2(scores: &[f64], pos: &[bool]) -> (u64, u64, u64) {
    let (mut w2, mut p, mut n) = (0u64, 0u64, 0u64);
    for i in 0..scores.len() {
        if pos[i] {
            p += 1;
        } else {
            n += 1;
        }
        if !pos[i] {
            continue;
        }
        for j in 0..scores.len() {
            if pos[j] {
                continue;
            }
            if scores[i] > scores[j] {
                w2 += 2;
            } else if scores[i] == scores[j] {
                w2 += 1;
            }
        }
    }
    (w2, p, n)
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Average precision as an exact fraction: the mean, over positives, of the
/// precision at that positive's score threshold (ties included).
fn average_precision_exact(scores: &[f64], pos: &[bool]) -> (u128, u128) {
    let (mut num, mut den) = (0u128, 1u128);
    let n_pos = pos.iter().filter(|&&b| b).count() as u128;
    for i in (0..scores.len()).filter(|&i| pos[i]) {
        let at_or_above: Vec<usize> = (0..scores.len()).filter(|&j| scores[j] >= scores[i]).collect();
        let tp = at_or_above.iter().filter(|&&j| pos[j]).count() as u128;
        let all = at_or_above.len() as u128;
        // num/den += tp/all
        num = num * all + tp * den;
        den *= all;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    (num, den * n_pos)
}

fn random_case(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<bool>) {
    loop {
        let n = rng.random_range(2..=50);
        let tied = rng.random_bool(0.5);
        let rate = rng.random_range(0.05..0.95);
        let scores: Vec<f64> = (0..n)
            .map(|_| {
                if tied {
                    rng.random_range(0..5) as f64 * 0.25
                } else {
                    rng.random_range(-3.0..3.0)
                }
            })
            .collect();
        let flags: Vec<bool> = (0..n).map(|_| rng.random_bool(rate)).collect();
        if flags.iter().any(|&f| f) && flags.iter().any(|&f| !f) {
            return (scores, flags);
        }
    }
}

#[test]
fn binary_metrics_match_brute_force_on_random_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..1000 {
        let (scores, flags) = random_case(&mut rng);
        let sf = ScoredFlags::new(scores.clone(), flags.clone()).unwrap();
        for positive in [Positive::Clean, Positive::Mislabeled] {
            let pos: Vec<bool> = flags.iter().map(|&f| f == (positive == Positive::Clean)).collect();
            let (w2, p, n) = pairwise_wins2(&scores, &pos);
            let expected = w2 as f64 / (2 * p * n) as f64;
            assert_eq!(auroc_binary(&sf, positive).unwrap(), expected, "case {case}");

            let (num, den) = average_precision_exact(&scores, &pos);
            let got = auprc_binary(&sf, positive).unwrap();
            // the exact fraction rounds to within a few ulps of the summed value
            let exact = num as f64 / den as f64;
            assert!((got - exact).abs() <= 8.0 * f64::EPSILON, "case {case}: {got} vs {num}/{den}");
        }
    }
}

fn scored_flags_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    (2usize..40)
        .prop_flat_map(|n| (prop::collection::vec(-5.0f64..5.0, n), prop::collection::vec(any::<bool>(), n)))
        .prop_filter("both classes", |(_, f)| f.iter().any(|&b| b) && f.iter().any(|&b| !b))
}

proptest! {
    #[test]
    fn ranking_metrics_invariant_under_increasing_maps((scores, flags) in scored_flags_strategy()) {
        let mapped: Vec<f64> = scores.iter().map(|&s| 3.0 * s.powi(3) + 1.0).collect();
        let a = ScoredFlags::new(scores, flags.clone()).unwrap();
        let b = ScoredFlags::new(mapped, flags).unwrap();
        prop_assert_eq!(auroc_binary(&a, Positive::Clean).unwrap(), auroc_binary(&b, Positive::Clean).unwrap());
        prop_assert_eq!(auprc_binary(&a, Positive::Clean).unwrap(), auprc_binary(&b, Positive::Clean).unwrap());
    }

    #[test]
    fn negated_scores_complement_auroc((scores, flags) in scored_flags_strategy()) {
        let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
        let a = auroc_binary(&ScoredFlags::new(scores, flags.clone()).unwrap(), Positive::Clean).unwrap();
        let b = auroc_binary(&ScoredFlags::new(neg, flags).unwrap(), Positive::Clean).unwrap();
        prop_assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn swapping_positive_class_complements_auroc((scores, flags) in scored_flags_strategy()) {
        let sf = ScoredFlags::new(scores, flags).unwrap();
        let a = auroc_binary(&sf, Positive::Clean).unwrap();
        let b = auroc_binary(&sf, Positive::Mislabeled).unwrap();
        prop_assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn auprc_bounded_by_worst_ranking((scores, flags) in scored_flags_strategy()) {
        let sf = ScoredFlags::new(scores, flags.clone()).unwrap();
        let ap = auprc_binary(&sf, Positive::Clean).unwrap();
        let p = flags.iter().filter(|&&f| f).count();
        let n = flags.len() - p;
        // minimum when every positive ranks below every negative
        let worst = (1..=p).map(|i| i as f64 / (n + i) as f64).sum::<f64>() / p as f64;
        prop_assert!(ap >= worst - 1e-12 && ap <= 1.0 + 1e-12);
    }

    #[test]
    fn top_k_matches_sort_oracle(
        (rows, labels) in (1usize..20, 2usize..8).prop_flat_map(|(n, c)| (
            prop::collection::vec(prop::collection::vec(-3i32..3, c), n),
            prop::collection::vec(0..c, n),
        ))
    ) {
        let c = rows[0].len();
        let logits = Matrix::from_rows(&rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect::<Vec<_>>()).unwrap();
        let mut prev = 0.0;
        for k in 1..=c {
            let mut hits = 0;
            for (row, &y) in rows.iter().zip(&labels) {
                let mut order: Vec<usize> = (0..c).collect();
                // stable sort keeps the lower index first among equal logits
                order.sort_by(|&a, &b| row[b].cmp(&row[a]));
                if order[..k].contains(&y) {
                    hits += 1;
                }
            }
            let got = top_k_accuracy(&logits, &labels, k).unwrap();
            prop_assert_eq!(got, 100.0 * hits as f64 / rows.len() as f64);
            prop_assert!(got >= prev);
            prev = got;
        }
        prop_assert_eq!(prev, 100.0);
    }

    #[test]
    fn macro_auroc_matches_per_class_pairwise(
        (rows, labels) in (4usize..30, 2usize..6).prop_flat_map(|(n, c)| (
            prop::collection::vec(prop::collection::vec(-2.0f64..2.0, c), n),
            prop::collection::vec(0..c, n),
        ))
    ) {
        let c = rows[0].len();
        let probs = softmax_rows(&Matrix::from_rows(&rows).unwrap()).unwrap();
        let present: Vec<usize> = (0..c).filter(|k| labels.contains(k)).collect();
        prop_assume!(present.len() >= 2);
        let mut total = 0.0;
        for &k in &present {
            let scores: Vec<f64> = (0..labels.len()).map(|i| probs.get(i, k)).collect();
            let pos: Vec<bool> = labels.iter().map(|&y| y == k).collect();
            let (w2, p, n) = pairwise_wins2(&scores, &pos);
            total += w2 as f64 / (2 * p * n) as f64;
        }
        let expected = total / present.len() as f64;
        prop_assert!((macro_ovr_auroc(&probs, &labels).unwrap() - expected).abs() < 1e-12);
    }
}

#[test]
fn random_scores_give_chance_level_metrics() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 20_000;
    let scores: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let flags: Vec<bool> = (0..n).map(|_| rng.random_bool(0.3)).collect();
    let prevalence = flags.iter().filter(|&&f| f).count() as f64 / n as f64;
    let sf = ScoredFlags::new(scores, flags).unwrap();
    assert!((auroc_binary(&sf, Positive::Clean).unwrap() - 0.5).abs() < 0.02);
    assert!((auprc_binary(&sf, Positive::Clean).unwrap() - prevalence).abs() < 0.02);
}

#[test]
fn fitted_temperature_recovers_generating_scale() {
    // labels drawn from softmax(z / 2.5) are best explained by t close to 2.5
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 20_000;
    let c = 4;
    let mut data = Vec::with_capacity(n * c);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let z: Vec<f64> = (0..c).map(|_| rng.random_range(-6.0..6.0)).collect();
        let p = common::naive_softmax(&z.iter().map(|v| v / 2.5).collect::<Vec<_>>());
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut y = c - 1;
        for (k, pk) in p.iter().enumerate() {
            acc += pk;
            if u < acc {
                y = k;
                break;
            }
        }
        data.extend(z);
        labels.push(y);
    }
    let logits = Matrix::from_vec(n, c, data).unwrap();
    let t = fit_temperature(&logits, &labels).unwrap().value();
    assert!((t - 2.5).abs() < 0.15, "fitted {t}");
    let best = mean_nll(&logits, &labels, t).unwrap();
    for probe in [0.5, 1.0, 2.0, 3.0, 5.0] {
        assert!(best <= mean_nll(&logits, &labels, probe).unwrap() + 1e-9);
    }
}
