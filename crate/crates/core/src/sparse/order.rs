use super::CsrMatrix;
use std::collections::VecDeque;

/// Reverse Cuthill–McKee ordering; returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut nbrs = Vec::new();
    while order.len() < n {
        // lowest-degree unvisited node seeds the next component
        let seed = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| degree[i]).unwrap();
        let start = pseudo_peripheral(a, seed, &visited);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            nbrs.clear();
            nbrs.extend(a.row(v).0.iter().copied().filter(|&j| !visited[j]));
            nbrs.sort_by_key(|&j| (degree[j], j));
            for &j in &nbrs {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(a: &CsrMatrix, root: usize, blocked: &[bool]) -> (Vec<usize>, usize) {
    let mut level = vec![usize::MAX; a.dim()];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut last = root;
    while let Some(v) = queue.pop_front() {
        last = v;
        for &j in a.row(v).0 {
            if !blocked[j] && level[j] == usize::MAX {
                level[j] = level[v] + 1;
                queue.push_back(j);
            }
        }
    }
    (level, last)
}

fn pseudo_peripheral(a: &CsrMatrix, seed: usize, blocked: &[bool]) -> usize {
    let mut root = seed;
    let (mut level, mut far) = bfs_levels(a, root, blocked);
    for _ in 0..8 {
        let ecc = level[far];
        let (l2, f2) = bfs_levels(a, far, blocked);
        if l2[f2] <= ecc {
            break;
        }
        root = far;
        level = l2;
        far = f2;
    }
    root
}

/// Sum over rows of the distance from the first stored column to the diagonal.
pub fn envelope_size(a: &CsrMatrix) -> usize {
    (0..a.dim())
        .map(|i| i - a.row(i).0.first().copied().unwrap_or(i).min(i))
        .sum()
}
