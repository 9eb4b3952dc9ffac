//! Invariant subspaces of a superoperator read off its sparsity pattern.

use faer::{c64, MatRef};

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of the graph with an edge `k -- l` whenever
/// `mat[(k, l)]` or `mat[(l, k)]` is exactly nonzero. Each component is an
/// invariant subspace; components are sorted internally and ordered by their
/// smallest index.
pub fn components(mat: MatRef<'_, c64>) -> Vec<Vec<usize>> {
    let n = mat.nrows();
    assert_eq!(mat.ncols(), n);
    let mut parent: Vec<usize> = (0..n).collect();
    for c in 0..n {
        for r in 0..n {
            if r != c && mat[(r, c)] != c64::new(0.0, 0.0) {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for k in 0..n {
        let root = find(&mut parent, k);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(k);
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use faer::Mat;

    #[test]
    fn splits_block_diagonal_pattern() {
        let mut m = Mat::<c64>::zeros(5, 5);
        m[(0, 3)] = c64::new(1.0, 0.0);
        m[(4, 1)] = c64::new(0.0, 2.0);
        m[(2, 2)] = c64::new(3.0, 0.0);
        assert_eq!(
            components(m.as_ref()),
            vec![vec![0, 3], vec![1, 4], vec![2]]
        );
    }

    #[test]
    fn chains_merge() {
        let mut m = Mat::<c64>::zeros(4, 4);
        m[(0, 1)] = c64::new(1.0, 0.0);
        m[(2, 1)] = c64::new(1.0, 0.0);
        m[(3, 2)] = c64::new(1.0, 0.0);
        assert_eq!(components(m.as_ref()), vec![vec![0, 1, 2, 3]]);
    }
}
