//! Reachability probabilities in Markov chains by elimination per SCC.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph;

/// Components larger than this are solved iteratively.
const DENSE_LIMIT: usize = 400;
const GS_TOLERANCE: f64 = 1e-14;
const GS_MAX_SWEEPS: usize = 1_000_000;

/// Probability of reaching a `target` state from each state. `rows[s]` is
/// the distribution of state `s`; rows of target states are ignored.
pub fn reach_probabilities(rows: &[&[(f64, usize)]], target: &[bool]) -> Vec<f64> {
    let n = rows.len();
    let mut pred = vec![Vec::new(); n];
    for (s, row) in rows.iter().enumerate() {
        if !target[s] {
            for &(_, t) in row.iter() {
                pred[t].push(s);
            }
        }
    }
    let start: Vec<usize> = (0..n).filter(|&s| target[s]).collect();
    let useful = graph::reachable(n, &start, |s| pred[s].clone());
    let mut x: Vec<f64> = (0..n).map(|s| if target[s] { 1.0 } else { 0.0 }).collect();
    let maybe: Vec<bool> = (0..n).map(|s| useful[s] && !target[s]).collect();
    let comps = graph::sccs(n, &maybe, |s| rows[s].iter().map(|e| e.1).filter(|&t| maybe[t]).collect::<Vec<_>>());
    let mut pos = vec![usize::MAX; n];
    for comp in &comps {
        for (i, &s) in comp.iter().enumerate() {
            pos[s] = i;
        }
        let in_comp = |t: usize| pos[t] != usize::MAX && comp.get(pos[t]) == Some(&t);
        let k = comp.len();
        // b = probability mass leaving the component, weighted by known values
        let b: Vec<f64> = comp.iter().map(|&s| rows[s].iter().filter(|e| !in_comp(e.1)).map(|&(p, t)| p * x[t]).sum()).collect();
        if k <= DENSE_LIMIT {
            let mut a = vec![vec![0.0; k + 1]; k];
            for (i, &s) in comp.iter().enumerate() {
                a[i][i] = 1.0;
                for &(p, t) in rows[s].iter() {
                    if in_comp(t) {
                        a[i][pos[t]] -= p;
                    }
                }
                a[i][k] = b[i];
            }
            let sol = gauss(a);
            for (i, &s) in comp.iter().enumerate() {
                x[s] = sol[i].clamp(0.0, 1.0);
            }
        } else {
            for _ in 0..GS_MAX_SWEEPS {
                let mut delta: f64 = 0.0;
                for (i, &s) in comp.iter().enumerate() {
                    let inner: f64 = rows[s].iter().filter(|e| in_comp(e.1)).map(|&(p, t)| p * x[t]).sum();
                    let nv = b[i] + inner;
                    delta = delta.max((nv - x[s]).abs());
                    x[s] = nv;
                }
                if delta < GS_TOLERANCE {
                    break;
                }
            }
        }
        for &s in comp {
            pos[s] = usize::MAX;
        }
    }
    x
}

/// Solves the augmented system `a` by Gaussian elimination with partial
/// pivoting.
fn gauss(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let k = a.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap_or(col);
        a.swap(col, piv);
        let d = a[col][col];
        if d.abs() < 1e-300 {
            continue;
        }
        for row in col + 1..k {
            let f = a[row][col] / d;
            if f != 0.0 {
                for c in col..=k {
                    a[row][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| a[i][j] * x[j]).sum();
        x[i] = if a[i][i].abs() < 1e-300 { 0.0 } else { (a[i][k] - s) / a[i][i] };
    }
    x
}
