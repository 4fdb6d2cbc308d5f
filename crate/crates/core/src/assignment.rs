//! Dense maximum-weight perfect assignment.
//!
//! The solver is the shortest-augmenting-path form of the Hungarian method
//! with row/column potentials, O(n³). After the optimum is found, the dual
//! potentials identify the tight edges, and the matching is walked towards the
//! lexicographically smallest optimal permutation inside that tight subgraph.

/// Result of [`max_weight_assignment`]: `perm[i]` is the column assigned to row `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub perm: Vec<usize>,
    pub value: f64,
}

/// Maximizes `Σ_i w[i][perm[i]]` over all permutations of a square matrix
/// given in row-major order. Among optimal permutations the lexicographically
/// smallest one (up to rounding in the tight-edge test) is returned.
pub fn max_weight_assignment(weights: &[f64], n: usize) -> Assignment {
    assert_eq!(weights.len(), n * n, "weight matrix must be n×n");
    if n == 0 {
        return Assignment {
            perm: Vec::new(),
            value: 0.0,
        };
    }
    let scale = weights.iter().fold(0.0_f64, |m, w| m.max(w.abs())).max(f64::MIN_POSITIVE);
    // minimize cost = -w
    let cost = |i: usize, j: usize| -weights[i * n + j];

    // 1-indexed potentials, p[j] = row matched to column j (0 = none)
    let mut u = vec![0.0_f64; n + 1];
    let mut v = vec![0.0_f64; n + 1];
    let mut p = vec![0_usize; n + 1];
    let mut way = vec![0_usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0_usize; n];
    for j in 1..=n {
        perm[p[j] - 1] = j - 1;
    }

    let tol = 64.0 * f64::EPSILON * scale * n as f64;
    let tight = |i: usize, j: usize| cost(i, j) - u[i + 1] - v[j + 1] <= tol;
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| perm[i] == j || tight(i, j)).collect())
        .collect();
    lexicographic_refine(&adj, &mut perm);

    let value = perm.iter().enumerate().map(|(i, &j)| weights[i * n + j]).sum();
    Assignment { perm, value }
}

/// Turns a perfect matching of the bipartite graph `adj` (row -> sorted
/// columns) into the lexicographically smallest perfect matching.
fn lexicographic_refine(adj: &[Vec<usize>], perm: &mut [usize]) {
    let n = perm.len();
    let mut owner = vec![0_usize; n];
    for (i, &j) in perm.iter().enumerate() {
        owner[j] = i;
    }
    let mut row_fixed = vec![false; n];
    let mut col_fixed = vec![false; n];
    for i in 0..n {
        for &j in &adj[i] {
            if col_fixed[j] {
                continue;
            }
            if perm[i] == j {
                break;
            }
            // row `owner[j]` must move to another column, ending at the column freed by i
            let target = perm[i];
            let start = owner[j];
            if let Some(path) = alternating_path(adj, perm, &owner, &row_fixed, &col_fixed, i, start, j, target) {
                for (r, c) in path {
                    perm[r] = c;
                    owner[c] = r;
                }
                perm[i] = j;
                owner[j] = i;
                break;
            }
        }
        row_fixed[i] = true;
        col_fixed[perm[i]] = true;
    }
}

/// BFS for an alternating path that reassigns `start` (currently on `banned_col`)
/// so that `target` becomes occupied. Returns the new (row, col) pairs.
#[allow(clippy::too_many_arguments)]
fn alternating_path(
    adj: &[Vec<usize>],
    perm: &[usize],
    owner: &[usize],
    row_fixed: &[bool],
    col_fixed: &[bool],
    skip_row: usize,
    start: usize,
    banned_col: usize,
    target: usize,
) -> Option<Vec<(usize, usize)>> {
    let n = perm.len();
    let mut prev_row: Vec<Option<usize>> = vec![None; n];
    let mut via_col: Vec<Option<usize>> = vec![None; n];
    let mut seen_row = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    seen_row[start] = true;
    queue.push_back(start);
    while let Some(r) = queue.pop_front() {
        for &c in &adj[r] {
            if c == banned_col || col_fixed[c] || c == perm[r] {
                continue;
            }
            if c == target {
                let mut out = vec![(r, c)];
                let mut cur = r;
                while let (Some(pr), Some(pc)) = (prev_row[cur], via_col[cur]) {
                    out.push((pr, pc));
                    cur = pr;
                }
                return Some(out);
            }
            let r2 = owner[c];
            if r2 == skip_row || row_fixed[r2] || seen_row[r2] {
                continue;
            }
            seen_row[r2] = true;
            prev_row[r2] = Some(r);
            via_col[r2] = Some(c);
            queue.push_back(r2);
        }
    }
    None
}
