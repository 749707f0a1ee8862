use serde::Serialize;

use super::point::Point2;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoopMatching {
    /// `(index into first list, index into second list)`, in the order they were chosen.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_first: Vec<usize>,
    pub unmatched_second: Vec<usize>,
}

/// Greedy nearest-centroid pairing: repeatedly takes the closest remaining pair. Distance
/// ties break by index, so the result is deterministic.
pub fn match_loops(first: &[Point2], second: &[Point2]) -> LoopMatching {
    let mut candidates: Vec<(f64, usize, usize)> = first
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| second.iter().enumerate().map(move |(j, &b)| (a.distance(b), i, j)))
        .collect();
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    let mut used_first = vec![false; first.len()];
    let mut used_second = vec![false; second.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in candidates {
        if !used_first[i] && !used_second[j] {
            used_first[i] = true;
            used_second[j] = true;
            pairs.push((i, j));
        }
    }
    LoopMatching {
        pairs,
        unmatched_first: (0..first.len()).filter(|&i| !used_first[i]).collect(),
        unmatched_second: (0..second.len()).filter(|&j| !used_second[j]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn single_pair_forced() {
        let m = match_loops(&[p(0.0, 0.0)], &[p(50.0, 50.0)]);
        assert_eq!(m.pairs, vec![(0, 0)]);
        assert!(m.unmatched_first.is_empty() && m.unmatched_second.is_empty());
    }

    #[test]
    fn separated_pairs_by_proximity() {
        let m = match_loops(&[p(0.0, 0.0), p(100.0, 0.0)], &[p(99.0, 1.0), p(1.0, -1.0)]);
        let mut pairs = m.pairs.clone();
        pairs.sort();
        assert_eq!(pairs, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn branching_leaves_one_unmatched() {
        let m = match_loops(&[p(-5.0, 0.0), p(5.0, 0.0)], &[p(4.0, 0.0)]);
        assert_eq!(m.pairs, vec![(1, 0)]);
        assert_eq!(m.unmatched_first, vec![0]);
    }

    #[test]
    fn empty_inputs() {
        assert_eq!(match_loops(&[], &[]), LoopMatching::default());
        let m = match_loops(&[], &[p(0.0, 0.0)]);
        assert_eq!(m.unmatched_second, vec![0]);
    }
}
