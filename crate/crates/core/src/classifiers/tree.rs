//! Unpruned binary decision tree with information-gain splits on numeric
//! thresholds.

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf {
        class: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DecisionTree {
    nodes: Vec<Node>,
}

fn entropy(counts: &[usize], total: usize) -> f64 {
    let total = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &v) in counts.iter().enumerate() {
        if v > counts[best] {
            best = c;
        }
    }
    best
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

impl DecisionTree {
    /// Grows a tree on `rows` (all the same width) with class codes `labels`.
    /// Nodes stop splitting when pure, when no split leaves `min_leaf`
    /// instances on both sides, or when no split has positive gain.
    pub(crate) fn fit(
        rows: &[Vec<f64>],
        labels: &[usize],
        n_classes: usize,
        min_leaf: usize,
    ) -> Self {
        let min_leaf = min_leaf.max(1);
        let width = rows.first().map_or(0, Vec::len);
        let mut nodes = Vec::new();
        // (node slot, instance indices)
        let mut stack: Vec<(usize, Vec<usize>)> = Vec::new();
        nodes.push(Node::Leaf { class: 0 });
        stack.push((0, (0..rows.len()).collect()));

        let mut order: Vec<usize> = Vec::with_capacity(rows.len());
        while let Some((slot, idx)) = stack.pop() {
            let mut counts = vec![0usize; n_classes];
            for &i in &idx {
                counts[labels[i]] += 1;
            }
            let leaf_class = majority(&counts);
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            if pure || idx.len() < 2 * min_leaf {
                nodes[slot] = Node::Leaf { class: leaf_class };
                continue;
            }
            let parent_entropy = entropy(&counts, idx.len());
            let n = idx.len();
            let mut best: Option<BestSplit> = None;
            for feature in 0..width {
                order.clear();
                order.extend_from_slice(&idx);
                order.sort_by(|&a, &b| rows[a][feature].total_cmp(&rows[b][feature]));
                let mut left = vec![0usize; n_classes];
                let mut right = counts.clone();
                for p in 1..n {
                    let moved = labels[order[p - 1]];
                    left[moved] += 1;
                    right[moved] -= 1;
                    if p < min_leaf || n - p < min_leaf {
                        continue;
                    }
                    let lo = rows[order[p - 1]][feature];
                    let hi = rows[order[p]][feature];
                    if lo == hi {
                        continue;
                    }
                    let child = (p as f64 * entropy(&left, p)
                        + (n - p) as f64 * entropy(&right, n - p))
                        / n as f64;
                    let gain = parent_entropy - child;
                    if best.as_ref().is_none_or(|b| gain > b.gain) {
                        let mut threshold = 0.5 * (lo + hi);
                        if threshold >= hi {
                            threshold = lo;
                        }
                        best = Some(BestSplit {
                            gain,
                            feature,
                            threshold,
                        });
                    }
                }
            }
            match best {
                Some(split) if split.gain > 1e-12 => {
                    let (l, r): (Vec<usize>, Vec<usize>) = idx
                        .iter()
                        .partition(|&&i| rows[i][split.feature] <= split.threshold);
                    let left = nodes.len();
                    nodes.push(Node::Leaf { class: leaf_class });
                    let right = nodes.len();
                    nodes.push(Node::Leaf { class: leaf_class });
                    nodes[slot] = Node::Split {
                        feature: split.feature,
                        threshold: split.threshold,
                        left,
                        right,
                    };
                    stack.push((right, r));
                    stack.push((left, l));
                }
                _ => nodes[slot] = Node::Leaf { class: leaf_class },
            }
        }
        Self { nodes }
    }

    pub(crate) fn predict(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { class } => return class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    #[cfg(test)]
    fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn learns_a_threshold() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![(i % 3) as f64, i as f64]).collect();
        let labels: Vec<usize> = (0..10).map(|i| usize::from(i >= 4)).collect();
        let tree = DecisionTree::fit(&rows, &labels, 2, 2);
        assert_eq!(tree.n_nodes(), 3);
        for (row, &y) in rows.iter().zip(&labels) {
            assert_eq!(tree.predict(row), y);
        }
        assert_eq!(tree.predict(&[0.0, 3.4]), 0);
        assert_eq!(tree.predict(&[0.0, 3.6]), 1);
    }

    #[test]
    fn pure_or_tiny_nodes_are_leaves() {
        let rows = vec![vec![1.0], vec![2.0], vec![3.0]];
        let tree = DecisionTree::fit(&rows, &[1, 1, 1], 2, 2);
        assert_eq!(tree.n_nodes(), 1);
        assert_eq!(tree.predict(&[100.0]), 1);
        let tree = DecisionTree::fit(&rows, &[0, 1, 1], 2, 2);
        assert_eq!(tree.n_nodes(), 1);
    }

    #[test]
    fn xor_needs_depth() {
        let rows = vec![
            vec![0.0, 0.0],
            vec![0.0, 0.1],
            vec![1.0, 1.0],
            vec![1.0, 1.1],
            vec![0.0, 1.0],
            vec![0.0, 1.1],
            vec![1.0, 0.0],
            vec![1.0, 0.1],
        ];
        let labels = [0, 0, 0, 0, 1, 1, 1, 1];
        // XOR has zero gain at the root for either axis, so no split is taken.
        let tree = DecisionTree::fit(&rows, &labels, 2, 2);
        assert_eq!(tree.n_nodes(), 1);
    }
}
