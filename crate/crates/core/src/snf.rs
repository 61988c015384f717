//! Smith normal form and exact rank over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Dense integer matrix stored row by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Matrix product, `None` on overflow.
    pub fn checked_mul(&self, other: &IntMatrix) -> Option<IntMatrix> {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0i64;
                for k in 0..self.cols {
                    acc = acc.checked_add(self.get(i, k).checked_mul(other.get(k, j))?)?;
                }
                out.set(i, j, acc);
            }
        }
        Some(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    fn to_big(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// Positive diagonal entries `d₁ | d₂ | … | d_r`.
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
}

/// Diagonalizes `m` by unimodular row and column operations.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let mut a = m.to_big();
    let (rows, cols) = (m.rows(), m.cols());
    let mut factors = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = min_abs_nonzero(&a, t, t..rows, t..cols) else {
            break;
        };
        a.swap(t, pi);
        swap_cols(&mut a, t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    sub_row(&mut a, i, t, &q);
                    clean &= a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    sub_col(&mut a, j, t, &q);
                    clean &= a[t][j].is_zero();
                }
            }
            if !clean {
                // a remainder smaller than the pivot is left in row or column t
                let (pi, pj) = min_abs_in_cross(&a, t);
                a.swap(t, pi);
                swap_cols(&mut a, t, pj);
                continue;
            }
            let offender = (t + 1..rows).find_map(|i| {
                (t + 1..cols)
                    .find(|&j| !a[i][j].is_multiple_of(&a[t][t]))
                    .map(|_| i)
            });
            match offender {
                Some(i) => add_row(&mut a, t, i),
                None => break,
            }
        }
        factors.push(a[t][t].abs());
        t += 1;
    }
    SmithForm {
        rank: factors.len(),
        invariant_factors: factors,
    }
}

fn min_abs_nonzero(
    a: &[Vec<BigInt>],
    _t: usize,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            if a[i][j].is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[i][j].abs() >= a[bi][bj].abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

fn min_abs_in_cross(a: &[Vec<BigInt>], t: usize) -> (usize, usize) {
    let mut best = (t, t);
    for i in t + 1..a.len() {
        if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
            best = (i, t);
        }
    }
    for j in t + 1..a[t].len() {
        if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
            best = (t, j);
        }
    }
    best
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    if i != j {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }
}

/// row[i] -= q * row[t]
fn sub_row(a: &mut [Vec<BigInt>], i: usize, t: usize, q: &BigInt) {
    let pivot_row = a[t].clone();
    for (x, p) in a[i].iter_mut().zip(&pivot_row) {
        *x -= q * p;
    }
}

/// col[j] -= q * col[t]
fn sub_col(a: &mut [Vec<BigInt>], j: usize, t: usize, q: &BigInt) {
    for row in a.iter_mut() {
        let p = row[t].clone();
        row[j] -= q * p;
    }
}

/// row[t] += row[i]
fn add_row(a: &mut [Vec<BigInt>], t: usize, i: usize) {
    let src = a[i].clone();
    for (x, s) in a[t].iter_mut().zip(&src) {
        *x += s;
    }
}

/// Rank over the rationals by fraction-free (Bareiss) elimination.
pub fn rational_rank(m: &IntMatrix) -> usize {
    let mut a = m.to_big();
    let (rows, cols) = (m.rows(), m.cols());
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                let v = (&a[rank][c] * &a[r][k] - &a[r][c] * &a[rank][k]) / &prev;
                a[r][k] = v;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors(rows: &[Vec<i64>]) -> (Vec<i64>, usize) {
        let s = smith_normal_form(&IntMatrix::from_rows(rows));
        let f = s
            .invariant_factors
            .iter()
            .map(|d| i64::try_from(d).unwrap())
            .collect();
        (f, s.rank)
    }

    #[test]
    fn two_by_two() {
        assert_eq!(factors(&[vec![2, 4], vec![6, 8]]), (vec![2, 4], 2));
    }

    #[test]
    fn identity_and_zero() {
        let id = IntMatrix::identity(3).to_rows();
        assert_eq!(factors(&id), (vec![1, 1, 1], 3));
        assert_eq!(factors(&[vec![0, 0], vec![0, 0], vec![0, 0]]), (vec![], 0));
    }

    #[test]
    fn divisibility_fixup() {
        // diag(2, 3) is equivalent to diag(1, 6)
        assert_eq!(factors(&[vec![2, 0], vec![0, 3]]), (vec![1, 6], 2));
        assert_eq!(
            factors(&[vec![4, 0, 0], vec![0, 6, 0], vec![0, 0, 10]]),
            (vec![2, 2, 60], 3)
        );
    }

    #[test]
    fn rational_rank_matches_snf_rank() {
        let m = IntMatrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(rational_rank(&m), 2);
        assert_eq!(smith_normal_form(&m).rank, 2);
        assert_eq!(rational_rank(&IntMatrix::zeros(2, 5)), 0);
    }
}
