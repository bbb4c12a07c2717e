use std::collections::VecDeque;

use nalgebra_sparse::CsrMatrix;

fn bfs_levels(a: &CsrMatrix<f64>, start: usize, seen: &mut [bool]) -> (Vec<usize>, Vec<usize>) {
    let mut order = vec![start];
    let mut depth = vec![0usize; 1];
    seen[start] = true;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        let d = depth[head];
        head += 1;
        for &w in a.row(v).col_indices() {
            if !seen[w] {
                seen[w] = true;
                order.push(w);
                depth.push(d + 1);
            }
        }
    }
    (order, depth)
}

/// Reverse Cuthill–McKee ordering of a structurally symmetric matrix.
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix<f64>) -> Vec<usize> {
    let n = a.nrows();
    let degree: Vec<usize> = (0..n).map(|v| a.row(v).nnz()).collect();
    let mut placed = vec![false; n];
    let mut perm = Vec::with_capacity(n);
    while perm.len() < n {
        // Pseudo-peripheral start within the next component.
        let seed = (0..n)
            .filter(|&v| !placed[v])
            .min_by_key(|&v| degree[v])
            .expect("unplaced vertex");
        let mut start = seed;
        let mut best = None;
        for _ in 0..4 {
            let mut seen = placed.clone();
            let (order, depth) = bfs_levels(a, start, &mut seen);
            let ecc = *depth.last().expect("start is visited");
            if best.is_some_and(|b| ecc <= b) {
                break;
            }
            best = Some(ecc);
            let far = order
                .iter()
                .zip(&depth)
                .filter(|(_, &d)| d == ecc)
                .map(|(&v, _)| v)
                .min_by_key(|&v| degree[v])
                .expect("last level is nonempty");
            if far == start {
                break;
            }
            start = far;
        }
        let mut queue = VecDeque::from([start]);
        placed[start] = true;
        while let Some(v) = queue.pop_front() {
            perm.push(v);
            let mut next: Vec<usize> = a.row(v).col_indices().iter().copied().filter(|&w| !placed[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                placed[w] = true;
                queue.push_back(w);
            }
        }
    }
    perm.reverse();
    perm
}
