//! Per-origin ranking of models by MASE.

use std::collections::BTreeMap;

use super::prequential::OriginRecord;

/// Ranks `mases` ascending with average ties. `None` entries rank last
/// (`mases.len()`).
pub fn rank_values(mases: &[Option<f64>]) -> Vec<f64> {
    let k = mases.len();
    let mut order: Vec<(usize, f64)> = mases
        .iter()
        .enumerate()
        .filter_map(|(i, m)| m.map(|v| (i, v)))
        .collect();
    order.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut ranks = vec![k as f64; k];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && order[j + 1].1 == order[i].1 {
            j += 1;
        }
        // Positions i..=j (0-based) share the mean of ranks i+1..=j+1.
        let avg = (i + j + 2) as f64 / 2.0;
        for &(idx, _) in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Ranks for one origin's records (one per model).
pub fn rank_per_origin(records: &[&OriginRecord]) -> Vec<f64> {
    let mases: Vec<Option<f64>> = records
        .iter()
        .map(|r| if r.is_valid() { r.mase } else { None })
        .collect();
    rank_values(&mases)
}

/// Rank of every record within its (series, horizon, train size) group,
/// aligned with `records`.
pub fn assign_ranks(records: &[OriginRecord]) -> Vec<f64> {
    let mut groups: BTreeMap<(&str, usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        groups
            .entry((r.series_id.as_str(), r.horizon, r.train_size))
            .or_default()
            .push(i);
    }
    let mut ranks = vec![0.0; records.len()];
    for idx in groups.values() {
        let group: Vec<&OriginRecord> = idx.iter().map(|&i| &records[i]).collect();
        for (&i, r) in idx.iter().zip(rank_per_origin(&group)) {
            ranks[i] = r;
        }
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_cases() {
        assert_eq!(rank_values(&[Some(0.5), Some(0.9), Some(0.7)]), vec![1.0, 3.0, 2.0]);
        assert_eq!(rank_values(&[Some(0.5), Some(0.5)]), vec![1.5, 1.5]);
        assert_eq!(rank_values(&[Some(0.5), None, Some(0.1)]), vec![2.0, 3.0, 1.0]);
    }

    proptest! {
        #[test]
        fn rank_sum_identity(v in proptest::collection::vec(0u8..6, 1..12)) {
            let m: Vec<Option<f64>> = v.iter().map(|&x| Some(x as f64)).collect();
            let k = m.len() as f64;
            let sum: f64 = rank_values(&m).iter().sum();
            prop_assert!((sum - k * (k + 1.0) / 2.0).abs() < 1e-9);
        }

        #[test]
        fn ranks_invariant_under_monotone_maps(v in proptest::collection::vec(0.0f64..5.0, 2..10)) {
            let a: Vec<Option<f64>> = v.iter().map(|&x| Some(x)).collect();
            let b: Vec<Option<f64>> = v.iter().map(|&x| Some((x * 3.0).exp() + 1.0)).collect();
            prop_assert_eq!(rank_values(&a), rank_values(&b));
        }
    }
}
