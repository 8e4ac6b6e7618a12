use super::SquaredDistanceMatrix;

/// For each target point, up to `K` source indices ordered by ascending
/// distance, ties broken by lower index. A point never lists itself.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NeighborTable {
    neighbors: Vec<Vec<usize>>,
}

impl NeighborTable {
    pub fn from_lists(neighbors: Vec<Vec<usize>>) -> Self {
        Self { neighbors }
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn neighbors(&self, target: usize) -> &[usize] {
        &self.neighbors[target]
    }

    pub fn lists(&self) -> &[Vec<usize>] {
        &self.neighbors
    }

    pub fn num_edges(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum()
    }

    /// Directed `(target, source)` pairs, targets ascending, sources in
    /// neighbor order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(t, ns)| ns.iter().map(move |&s| (t, s)))
            .collect()
    }
}

/// Selects the `min(K, n - 1)` nearest sources of every point.
pub fn knn_edges(d2: &SquaredDistanceMatrix, k: usize) -> NeighborTable {
    let n = d2.len();
    let take = k.min(n.saturating_sub(1));
    let mut neighbors = Vec::with_capacity(n);
    let mut candidates: Vec<usize> = Vec::with_capacity(n);
    for target in 0..n {
        if take == 0 {
            neighbors.push(Vec::new());
            continue;
        }
        let row = d2.row(target);
        candidates.clear();
        candidates.extend((0..n).filter(|&s| s != target));
        let order = |a: &usize, b: &usize| row[*a].total_cmp(&row[*b]).then(a.cmp(b));
        if take < candidates.len() {
            candidates.select_nth_unstable_by(take - 1, order);
            candidates.truncate(take);
        }
        candidates.sort_unstable_by(order);
        neighbors.push(candidates.clone());
    }
    NeighborTable { neighbors }
}
