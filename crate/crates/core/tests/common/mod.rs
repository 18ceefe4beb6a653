//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the operator builders or the eigensolver of the crate under test.

#![allow(dead_code, clippy::needless_range_loop)]

use std::io::Write;

/// Real dense matrix, row-major.
pub type Real = Vec<Vec<f64>>;

fn digits(mut index: usize, n: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

fn index_of(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

fn all_arrangements(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (k, &head) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut tail in all_arrangements(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Total symmetrizer on `subset`, built by averaging digit shuffles.
pub fn symmetrizer(n: usize, d: usize, subset: &[usize]) -> Real {
    let dim = d.pow(n as u32);
    let arrangements = all_arrangements(subset);
    let weight = 1.0 / arrangements.len() as f64;
    let mut out = vec![vec![0.0; dim]; dim];
    for col in 0..dim {
        let src = digits(col, n, d);
        for arrangement in &arrangements {
            let mut dst = src.clone();
            for (&from, &to) in subset.iter().zip(arrangement) {
                dst[to] = src[from];
            }
            out[index_of(&dst, d)][col] += weight;
        }
    }
    out
}

pub fn matmul(a: &Real, b: &Real) -> Real {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik != 0.0 {
                for j in 0..n {
                    out[i][j] += aik * b[k][j];
                }
            }
        }
    }
    out
}

/// `S_{N+M}(0,1) S_N(2) - S_N(1) S_{N+M}(0,2)`.
pub fn identification_operator(inputs: usize, copies: usize, d: usize) -> Real {
    let n = inputs + 2 * copies;
    let input: Vec<usize> = (0..inputs).collect();
    let first: Vec<usize> = (inputs..inputs + copies).collect();
    let second: Vec<usize> = (inputs + copies..n).collect();
    let join = |a: &[usize], b: &[usize]| a.iter().chain(b).copied().collect::<Vec<_>>();
    let left = matmul(&symmetrizer(n, d, &join(&input, &first)), &symmetrizer(n, d, &second));
    let right = matmul(&symmetrizer(n, d, &first), &symmetrizer(n, d, &join(&input, &second)));
    left.iter()
        .zip(&right)
        .map(|(l, r)| l.iter().zip(r).map(|(x, y)| x - y).collect())
        .collect()
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(matrix: &Real) -> Vec<f64> {
    let n = matrix.len();
    let mut a = matrix.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (1..=k).fold(1, |acc, i| acc * (n - k + i) / i)
}

pub fn sym_dim(n: u64, d: u64) -> u64 {
    binomial(n + d - 1, d - 1)
}

/// `U(d)` irrep dimension of a Young diagram by the hook-content formula.
pub fn hook_content_dim(rows: &[usize], d: usize) -> f64 {
    let cols = |j: usize| rows.iter().filter(|&&r| r > j).count();
    let mut value = 1.0;
    for (i, &len) in rows.iter().enumerate() {
        for j in 0..len {
            let hook = (len - j - 1) + (cols(j) - i - 1) + 1;
            value *= (d as f64 + j as f64 - i as f64) / hook as f64;
        }
    }
    value
}

/// Writes a line straight to stderr so it survives the harness's output capture.
pub fn report(line: &str) {
    let _ = writeln!(std::io::stderr(), "{line}");
}
