use std::collections::BTreeSet;

use oexnrule::data::{add_contrived_features, draw_bootstrap, split, Dataset};
use oexnrule::ensemble::aggregate_votes;
use oexnrule::metrics::{accuracy, brier_score, cohen_kappa};
use oexnrule::neighbors::{
    exnrule_chain, exnrule_predict, knn_predict, minkowski_distance, nearest_rows, wknn_predict, DistanceSpec,
};
use proptest::prelude::*;

/// Literal nested argmin over the remaining candidates, visiting candidates
/// in (row, position) order and keeping the first strict minimum.
fn brute_force_chain(points: &[Vec<f64>], candidates: &[usize], x0: &[f64], k: usize) -> Vec<usize> {
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let mut order: Vec<(usize, usize)> = candidates.iter().enumerate().map(|(pos, &row)| (row, pos)).collect();
    order.sort();
    let mut used = vec![false; candidates.len()];
    let mut current = x0.to_vec();
    let mut chain = Vec::new();
    for _ in 0..k {
        let mut best: Option<(f64, usize, usize)> = None;
        for &(row, pos) in &order {
            if used[pos] {
                continue;
            }
            let d = dist(&current, &points[row]);
            if best.is_none_or(|(bd, _, _)| d < bd) {
                best = Some((d, row, pos));
            }
        }
        let (_, row, pos) = best.unwrap();
        used[pos] = true;
        chain.push(row);
        current = points[row].clone();
    }
    chain
}

fn dataset_strategy(max_n: usize, max_p: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<u8>)> {
    (2..=max_n, 1..=max_p).prop_flat_map(|(n, p)| {
        (
            prop::collection::vec(prop::collection::vec(-10.0f64..10.0, p), n),
            prop::collection::vec(0u8..=1, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn chain_matches_brute_force(
        (rows, labels) in dataset_strategy(30, 5),
        k in 1usize..=5,
        seed in any::<u64>(),
    ) {
        let n = rows.len();
        prop_assume!(k <= n);
        let ds = Dataset::from_rows(&rows, labels).unwrap();
        let p = ds.n_features();
        let x0: Vec<f64> = (0..p).map(|j| ((seed >> (j * 8)) % 200) as f64 / 10.0 - 10.0).collect();
        let candidates: Vec<usize> = (0..n).collect();
        let chain = exnrule_chain((&ds).into(), &candidates, &x0, k, DistanceSpec::EUCLIDEAN).unwrap();
        prop_assert_eq!(&chain.indices, &brute_force_chain(&rows, &candidates, &x0, k));

        let distinct: BTreeSet<usize> = chain.positions.iter().copied().collect();
        prop_assert_eq!(distinct.len(), k);
        let first = rows.iter().map(|r| minkowski_distance(r, &x0, DistanceSpec::EUCLIDEAN).unwrap()).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(chain.step_distances[0], first);
    }

    #[test]
    fn chain_matches_brute_force_on_bootstrap_multisets(
        (rows, labels) in dataset_strategy(20, 4),
        k in 1usize..=5,
        seed in any::<u64>(),
    ) {
        prop_assume!(k <= rows.len());
        let ds = Dataset::from_rows(&rows, labels).unwrap();
        let sample = draw_bootstrap(&ds, ds.n_features(), seed).unwrap();
        let x0 = vec![0.5; ds.n_features()];
        let chain = exnrule_chain((&ds).into(), &sample.in_bag, &x0, k, DistanceSpec::EUCLIDEAN).unwrap();
        prop_assert_eq!(chain.indices, brute_force_chain(&rows, &sample.in_bag, &x0, k));
    }

    #[test]
    fn k1_rules_agree((rows, labels) in dataset_strategy(25, 4), q in 1.0f64..4.0) {
        let ds = Dataset::from_rows(&rows, labels).unwrap();
        let spec = DistanceSpec::new(q).unwrap();
        let x0 = vec![0.25; ds.n_features()];
        let a = exnrule_predict((&ds).into(), &x0, 1, spec).unwrap().label;
        let b = knn_predict((&ds).into(), &x0, 1, spec).unwrap().label;
        let c = wknn_predict((&ds).into(), &x0, 1, spec).unwrap().label;
        prop_assert_eq!(a, b);
        prop_assert_eq!(b, c);
    }

    #[test]
    fn triangle_inequality(
        a in prop::collection::vec(-100.0f64..100.0, 4),
        b in prop::collection::vec(-100.0f64..100.0, 4),
        c in prop::collection::vec(-100.0f64..100.0, 4),
        q in 1.0f64..6.0,
    ) {
        let spec = DistanceSpec::new(q).unwrap();
        let d = |x: &[f64], y: &[f64]| minkowski_distance(x, y, spec).unwrap();
        let ab = d(&a, &b);
        let bc = d(&b, &c);
        let ac = d(&a, &c);
        prop_assert!(ac <= (ab + bc) * (1.0 + 1e-9) + 1e-12);
        prop_assert_eq!(ab, d(&b, &a));
        prop_assert_eq!(d(&a, &a), 0.0);
    }

    #[test]
    fn predictions_survive_row_permutation(
        (rows, labels) in dataset_strategy(20, 3),
        k in 1usize..=4,
        shift in 1usize..19,
    ) {
        let n = rows.len();
        prop_assume!(k <= n);
        let ds = Dataset::from_rows(&rows, labels.clone()).unwrap();
        // skip instances with tied distances anywhere along the way
        let x0 = vec![0.123; ds.n_features()];
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let shuffled = ds.select_rows(&perm);
        let spec = DistanceSpec::EUCLIDEAN;
        let mut all_d: Vec<f64> = rows.iter().map(|r| spec.eval(r, &x0)).collect();
        for i in 0..n { for j in (i + 1)..n { all_d.push(spec.eval(&rows[i], &rows[j])); } }
        all_d.sort_by(f64::total_cmp);
        prop_assume!(all_d.windows(2).all(|w| w[0] != w[1]));

        let a = exnrule_chain((&ds).into(), &(0..n).collect::<Vec<_>>(), &x0, k, spec).unwrap();
        let b = exnrule_chain((&shuffled).into(), &(0..n).collect::<Vec<_>>(), &x0, k, spec).unwrap();
        let remapped: Vec<usize> = b.indices.iter().map(|&i| perm[i]).collect();
        prop_assert_eq!(a.indices, remapped);
        let ka: Vec<usize> = nearest_rows(ds.features(), &x0, k, spec).unwrap().iter().map(|p| p.1).collect();
        let kb: Vec<usize> = nearest_rows(shuffled.features(), &x0, k, spec).unwrap().iter().map(|p| perm[p.1]).collect();
        prop_assert_eq!(ka, kb);
        prop_assert_eq!(
            wknn_predict((&ds).into(), &x0, k, spec).unwrap().label,
            wknn_predict((&shuffled).into(), &x0, k, spec).unwrap().label
        );
    }

    #[test]
    fn split_partitions_rows(n in 8usize..80, frac in 0.2f64..0.8, seed in any::<u64>()) {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
        let ds = Dataset::from_rows(&rows, labels).unwrap();
        let sp = split(&ds, frac, seed).unwrap();
        let train: BTreeSet<usize> = sp.train_rows.iter().copied().collect();
        let test: BTreeSet<usize> = sp.test_rows.iter().copied().collect();
        prop_assert!(train.is_disjoint(&test));
        prop_assert_eq!(train.len() + test.len(), n);
        prop_assert_eq!(train.len(), (frac * n as f64).round() as usize);
        prop_assert_eq!(sp.train_rows, split(&ds, frac, seed).unwrap().train_rows);
    }

    #[test]
    fn bootstrap_sets_are_complementary(n in 1usize..60, p in 1usize..10, seed in any::<u64>()) {
        let ds = Dataset::new(vec![0.0; n * p], p, vec![0; n], vec![]).unwrap();
        let p_prime = 1 + (seed as usize % p);
        let s = draw_bootstrap(&ds, p_prime, seed).unwrap();
        prop_assert_eq!(s.in_bag.len(), n);
        let bag: BTreeSet<usize> = s.in_bag.iter().copied().collect();
        let oob: BTreeSet<usize> = s.oob.iter().copied().collect();
        prop_assert!(bag.is_disjoint(&oob));
        prop_assert_eq!(bag.len() + oob.len(), n);
        prop_assert!(s.oob.windows(2).all(|w| w[0] < w[1]));
        let cols: BTreeSet<usize> = s.feature_subset.iter().copied().collect();
        prop_assert_eq!(cols.len(), p_prime);
        prop_assert!(cols.iter().all(|&c| c < p));
        prop_assert_eq!(s, draw_bootstrap(&ds, p_prime, seed).unwrap());
    }

    #[test]
    fn contrived_prefix_is_untouched((rows, labels) in dataset_strategy(15, 4), count in 1usize..5, seed in any::<u64>()) {
        let ds = Dataset::from_rows(&rows, labels).unwrap();
        let out = add_contrived_features(&ds, count, seed).unwrap();
        for (i, row) in rows.iter().enumerate() {
            let prefix = &out.row(i)[..row.len()];
            prop_assert!(prefix.iter().zip(row).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }

    #[test]
    fn metric_invariants(pairs in prop::collection::vec((0u8..=1, 0u8..=1), 1..60)) {
        let (t, p): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
        let k = cohen_kappa(&t, &p).unwrap();
        prop_assert!((-1.0..=1.0).contains(&k));
        prop_assert_eq!(k, cohen_kappa(&p, &t).unwrap());
        prop_assert_eq!(accuracy(&t, &t).unwrap(), 1.0);
        let probs: Vec<f64> = t.iter().map(|&y| f64::from(y)).collect();
        prop_assert_eq!(brier_score(&t, &probs).unwrap(), 0.0);
    }

    #[test]
    fn flipping_a_vote_to_one_never_lowers_the_share(votes in prop::collection::vec(0u8..=1, 1..130), at in any::<prop::sample::Index>()) {
        let i = at.index(votes.len());
        prop_assume!(votes[i] == 0);
        let before = aggregate_votes(&votes);
        let mut flipped = votes.clone();
        flipped[i] = 1;
        let after = aggregate_votes(&flipped);
        prop_assert!(after.fraction >= before.fraction);
        prop_assert!(after.label >= before.label);
    }
}
