//! Sparse LDLᵀ factorization for symmetric positive definite matrices.
//!
//! Up-looking factorization driven by the elimination tree, preceded by a
//! reverse Cuthill-McKee reordering to limit fill.

use std::collections::VecDeque;

use super::sparse::SparseSym;
use crate::error::{Error, Result};

/// Relative pivot threshold: a pivot `d_k <= PIVOT_TOL * max_i A_ii` is
/// rejected as non-SPD.
pub const PIVOT_TOL: f64 = 1e-12;

/// `P A Pᵀ = L D Lᵀ` with unit lower-triangular `L` stored by columns.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
}

impl SpdFactor {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz_l(&self) -> usize {
        self.lx.len()
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: b.len() });
        }
        let mut y: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        self.solve_permuted_in_place(&mut y);
        let mut x = vec![0.0; self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        Ok(x)
    }

    fn solve_permuted_in_place(&self, y: &mut [f64]) {
        for j in 0..self.n {
            let yj = y[j];
            if yj != 0.0 {
                for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                    y[self.row_idx[p]] -= self.lx[p] * yj;
                }
            }
        }
        for (yj, dj) in y.iter_mut().zip(&self.d) {
            *yj /= dj;
        }
        for j in (0..self.n).rev() {
            let mut s = y[j];
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                s -= self.lx[p] * y[self.row_idx[p]];
            }
            y[j] = s;
        }
    }
}

/// Reverse Cuthill-McKee ordering of the adjacency graph of `a`.
/// Returns `perm` with `perm[new] = old`.
pub fn rcm_ordering(a: &SparseSym) -> Vec<usize> {
    let n = a.n();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));

    // BFS from `start` over unvisited vertices; returns the eccentricity and
    // a minimum-degree vertex of the last level.
    let far_vertex = |start: usize, visited: &[bool]| -> (usize, usize) {
        let mut seen = visited.to_vec();
        let mut q = VecDeque::new();
        q.push_back((start, 0usize));
        seen[start] = true;
        let (mut ecc, mut best) = (0usize, start);
        while let Some((v, l)) = q.pop_front() {
            if l > ecc || (l == ecc && (degree[v], v) < (degree[best], best)) {
                ecc = l;
                best = v;
            }
            for &w in a.row(v).0 {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back((w, l + 1));
                }
            }
        }
        (best, ecc)
    };

    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        // pseudo-peripheral start node
        let mut start = seed;
        let (mut cand, mut ecc) = far_vertex(start, &visited);
        for _ in 0..8 {
            let (next, e2) = far_vertex(cand, &visited);
            if e2 <= ecc {
                break;
            }
            start = cand;
            ecc = e2;
            cand = next;
        }
        let mut q = VecDeque::new();
        q.push_back(start);
        visited[start] = true;
        let mut nbrs = Vec::new();
        while let Some(v) = q.pop_front() {
            order.push(v);
            nbrs.clear();
            nbrs.extend(a.row(v).0.iter().copied().filter(|&w| !visited[w]));
            nbrs.sort_by_key(|&w| (degree[w], w));
            for &w in &nbrs {
                visited[w] = true;
                q.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Factor a symmetric positive definite matrix.
pub fn factor_spd(a: &SparseSym) -> Result<SpdFactor> {
    let perm = rcm_ordering(a);
    factor_spd_with_ordering(a, perm)
}

/// Factor with an explicit ordering `perm[new] = old`.
pub fn factor_spd_with_ordering(a: &SparseSym, perm: Vec<usize>) -> Result<SpdFactor> {
    let n = a.n();
    assert_eq!(perm.len(), n);
    let mut inv = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let max_diag = (0..n).map(|i| a.get(i, i)).fold(0.0f64, f64::max);
    let tol = PIVOT_TOL * max_diag;

    // permuted rows, entries with column <= row (lower triangle = upper of column k)
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    for &old in perm.iter() {
        let (cols, vals) = a.row(old);
        let k = inv[old];
        let mut r: Vec<(usize, f64)> = cols
            .iter()
            .zip(vals)
            .map(|(&c, &v)| (inv[c], v))
            .filter(|&(c, _)| c <= k)
            .collect();
        r.sort_by_key(|&(c, _)| c);
        rows.push(r);
    }

    // symbolic: elimination tree and column counts
    const NONE: usize = usize::MAX;
    let mut parent = vec![NONE; n];
    let mut flag = vec![NONE; n];
    let mut lnz = vec![0usize; n];
    for k in 0..n {
        flag[k] = k;
        for &(i0, _) in &rows[k] {
            let mut i = i0;
            if i >= k {
                continue;
            }
            while flag[i] != k {
                if parent[i] == NONE {
                    parent[i] = k;
                }
                lnz[i] += 1;
                flag[i] = k;
                i = parent[i];
            }
        }
    }
    let mut col_ptr = vec![0usize; n + 1];
    for k in 0..n {
        col_ptr[k + 1] = col_ptr[k] + lnz[k];
    }
    let nnz = col_ptr[n];
    let mut row_idx = vec![0usize; nnz];
    let mut lx = vec![0.0; nnz];
    let mut d = vec![0.0; n];

    // numeric
    let mut y = vec![0.0; n];
    let mut pattern = vec![0usize; n];
    flag.iter_mut().for_each(|f| *f = NONE);
    lnz.iter_mut().for_each(|c| *c = 0);
    for k in 0..n {
        let mut top = n;
        flag[k] = k;
        for &(i0, v) in &rows[k] {
            y[i0] += v;
            let mut i = i0;
            let mut len = 0;
            while flag[i] != k {
                pattern[len] = i;
                len += 1;
                flag[i] = k;
                i = parent[i];
            }
            while len > 0 {
                top -= 1;
                len -= 1;
                pattern[top] = pattern[len];
            }
        }
        let mut dk = y[k];
        y[k] = 0.0;
        for t in top..n {
            let i = pattern[t];
            let yi = y[i];
            y[i] = 0.0;
            let start = col_ptr[i];
            for p in start..start + lnz[i] {
                y[row_idx[p]] -= lx[p] * yi;
            }
            let lki = yi / d[i];
            dk -= lki * yi;
            let p = start + lnz[i];
            row_idx[p] = k;
            lx[p] = lki;
            lnz[i] += 1;
        }
        if !(dk > tol) {
            return Err(Error::NotSpd { row: perm[k], pivot: dk });
        }
        d[k] = dk;
    }

    Ok(SpdFactor { n, perm, col_ptr, row_idx, lx, d })
}
