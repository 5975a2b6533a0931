use super::scores::ScoreVector;

/// One row of a ranking. `rank` starts at 1; `index` is the feature's
/// position in the score vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedFeature {
    pub rank: usize,
    pub index: usize,
    pub score: f64,
}

/// Feature indices ordered by descending |score|, ties by ascending index.
/// Infinite sentinels come first; NaN, which valid score vectors never
/// contain, would sort last.
pub fn rank_order(scores: &[f64]) -> Vec<usize> {
    let magnitude = |s: f64| if s.is_nan() { -1.0 } else { s.abs() };
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        magnitude(scores[b])
            .total_cmp(&magnitude(scores[a]))
            .then(a.cmp(&b))
    });
    order
}

pub fn rank_features(scores: &ScoreVector) -> Vec<RankedFeature> {
    rank_order(scores.scores.as_slice())
        .into_iter()
        .enumerate()
        .map(|(r, index)| RankedFeature {
            rank: r + 1,
            index,
            score: scores.scores[index],
        })
        .collect()
}
