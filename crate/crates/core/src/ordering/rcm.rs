use std::collections::VecDeque;

use crate::sparse::{Permutation, SparsityPattern};

struct Graph {
    adj: SparsityPattern,
}

impl Graph {
    fn new(p: &SparsityPattern) -> Self {
        // undirected, self loops removed
        let sym = p.symmetrize();
        let adj = SparsityPattern::from_positions(
            sym.n(),
            (0..sym.n()).flat_map(|i| {
                sym.row(i)
                    .iter()
                    .filter(move |&&j| j != i)
                    .map(move |&j| (i, j))
            }),
        )
        .expect("positions in range");
        Self { adj }
    }

    fn degree(&self, v: usize) -> usize {
        self.adj.row_nnz(v)
    }

    /// BFS level structure rooted at `root`: returns the last level and the
    /// eccentricity of `root`. `mark` holds the stamp of the current search.
    fn level_structure(
        &self,
        root: usize,
        mark: &mut [usize],
        stamp: usize,
    ) -> (Vec<usize>, usize) {
        let mut frontier = vec![root];
        mark[root] = stamp;
        let mut depth = 0;
        loop {
            let mut next = Vec::new();
            for &v in &frontier {
                for &w in self.adj.row(v) {
                    if mark[w] != stamp {
                        mark[w] = stamp;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                return (frontier, depth);
            }
            depth += 1;
            frontier = next;
        }
    }
}

fn min_degree(g: &Graph, vs: impl IntoIterator<Item = usize>) -> usize {
    vs.into_iter()
        .min_by_key(|&v| (g.degree(v), v))
        .expect("nonempty vertex set")
}

/// Reverse Cuthill-McKee ordering of the symmetrized pattern.
///
/// Components are visited in order of their smallest vertex. Each BFS starts
/// at a pseudo-peripheral vertex found by restarting from a minimum-degree
/// vertex of the deepest level until the eccentricity stops growing;
/// neighbors are enqueued by ascending degree, ties broken by index.
pub fn rcm_order(p: &SparsityPattern) -> Permutation {
    let n = p.n();
    let g = Graph::new(p);
    let mut visited = vec![false; n];
    let mut mark = vec![usize::MAX; n];
    let mut stamp = 0;
    let mut order = Vec::with_capacity(n);

    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // component vertices
        stamp += 1;
        let mut comp = vec![seed];
        mark[seed] = stamp;
        let mut k = 0;
        while k < comp.len() {
            let v = comp[k];
            k += 1;
            for &w in g.adj.row(v) {
                if mark[w] != stamp {
                    mark[w] = stamp;
                    comp.push(w);
                }
            }
        }

        let mut root = min_degree(&g, comp.iter().copied());
        stamp += 1;
        let (mut last, mut ecc) = g.level_structure(root, &mut mark, stamp);
        loop {
            let cand = min_degree(&g, last.iter().copied());
            stamp += 1;
            let (cand_last, cand_ecc) = g.level_structure(cand, &mut mark, stamp);
            if cand_ecc > ecc {
                root = cand;
                last = cand_last;
                ecc = cand_ecc;
            } else {
                break;
            }
        }

        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        let mut nbrs = Vec::new();
        while let Some(v) = queue.pop_front() {
            order.push(v);
            nbrs.clear();
            nbrs.extend(g.adj.row(v).iter().copied().filter(|&w| !visited[w]));
            nbrs.sort_unstable_by_key(|&w| (g.degree(w), w));
            for &w in &nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    Permutation::new(order).expect("every vertex visited once")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph() {
        let p = SparsityPattern::from_positions(4, (0..3).flat_map(|i| [(i, i + 1), (i + 1, i)]))
            .unwrap();
        let r = rcm_order(&p);
        let q = p.permute_symmetric(&r).unwrap();
        assert_eq!(q.bandwidth(), 1);
        assert_eq!(r.perm(), &[3, 2, 1, 0]);
    }

    #[test]
    fn isolated_vertices_reverse_natural() {
        let r = rcm_order(&SparsityPattern::empty(2));
        assert_eq!(r.perm(), &[1, 0]);
    }

    #[test]
    fn scrambled_path_recovers_bandwidth_one() {
        let order = [5, 2, 7, 0, 3, 6, 1, 4];
        let pos = order.windows(2).flat_map(|w| [(w[0], w[1]), (w[1], w[0])]);
        let p = SparsityPattern::from_positions(8, pos).unwrap();
        assert!(p.bandwidth() > 1);
        assert_eq!(p.permute_symmetric(&rcm_order(&p)).unwrap().bandwidth(), 1);
    }
}
