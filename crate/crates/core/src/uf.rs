//! A small disjoint-set forest used by pullbacks and wiring-diagram composition.

#[derive(Debug, Clone)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            // path halving
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Renumbers arbitrary labels by order of first occurrence.
///
/// Returns the relabelled sequence and the number of distinct labels.
pub(crate) fn renumber_by_first_occurrence(labels: &[usize]) -> (Vec<usize>, usize) {
    let bound = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut ids: Vec<usize> = vec![usize::MAX; bound];
    let mut next = 0;
    let out = labels
        .iter()
        .map(|&l| {
            if ids[l] == usize::MAX {
                ids[l] = next;
                next += 1;
            }
            ids[l]
        })
        .collect();
    (out, next)
}
