//! Helpers shared by the integration tests: random covers and nerves, and a
//! brute-force Smith-normal-form oracle.

#![allow(dead_code)]

use std::f64::consts::PI;

use cech_monopole::cochain::{coboundary, coboundary_matrix, Cochain, CochainValues};
use cech_monopole::cover::{build_cover, CapCover, CoefficientTag};
use cech_monopole::geometry::Vec3;
use cech_monopole::nerve::{nerve, Nerve};
use cech_monopole::snf::{smith_normal_form, IntMatrix};
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RANDOM_NERVE_SAMPLES: usize = 20_000;

/// Two to six caps with random centers and radii.
pub fn random_cover(seed: u64) -> CapCover {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=6);
    let spec: Vec<(Vec3, f64)> = (0..n)
        .map(|_| {
            let z: f64 = rng.random_range(-1.0..1.0);
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            let s = (1.0 - z * z).sqrt();
            (
                Vec3::new(s * phi.cos(), s * phi.sin(), z),
                rng.random_range(0.15 * PI..0.85 * PI),
            )
        })
        .collect();
    build_cover(&spec, CoefficientTag::Integer).expect("valid random cover")
}

pub fn random_nerve(seed: u64) -> Nerve {
    let cover = random_cover(seed);
    let dim = cover.len() - 1;
    nerve(&cover, dim, RANDOM_NERVE_SAMPLES, seed).expect("nerve of a random cover")
}

/// Whether `δδc = 0` for a random integer cochain in every degree, and the coboundary
/// matrices compose to zero.
pub fn delta_squared_vanishes(n: &Nerve, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for p in 0..n.dimension().saturating_sub(1) {
        let values = (0..n.count(p))
            .map(|_| rng.random_range(-50..=50))
            .collect();
        let c = Cochain::new(n, p, CochainValues::Integer(values)).unwrap();
        let dd = coboundary(&coboundary(&c, n).unwrap(), n).unwrap();
        match dd.values() {
            CochainValues::Integer(v) if v.iter().all(|&x| x == 0) => {}
            _ => return false,
        }
        let product = coboundary_matrix(n, p + 1)
            .unwrap()
            .checked_mul(&coboundary_matrix(n, p).unwrap())
            .unwrap();
        if !product.is_zero() {
            return false;
        }
    }
    true
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    (k - 1..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// gcd of all `k × k` minors.
pub fn minors_gcd(rows: &[Vec<i64>], k: usize) -> i128 {
    let (r, c) = (rows.len(), rows[0].len());
    let mut g = 0i128;
    for rs in subsets(r, k) {
        for cs in subsets(c, k) {
            let m = rs
                .iter()
                .map(|&i| cs.iter().map(|&j| rows[i][j] as i128).collect())
                .collect();
            g = g.gcd(&determinant(m));
        }
    }
    g
}

/// Whether `d₁⋯d_k` equals the gcd of the `k × k` minors for every `k`.
pub fn snf_matches_minors(rows: &[Vec<i64>]) -> bool {
    let snf = smith_normal_form(&IntMatrix::from_rows(rows));
    let factors: Vec<i128> = snf
        .invariant_factors
        .iter()
        .map(|d| d.to_i128().unwrap())
        .collect();
    if factors.windows(2).any(|w| w[1] % w[0] != 0) || factors.iter().any(|&d| d <= 0) {
        return false;
    }
    let mut product = 1i128;
    for k in 1..=rows.len().min(rows[0].len()) {
        let g = minors_gcd(rows, k);
        if k <= snf.rank {
            product *= factors[k - 1];
            if g != product {
                return false;
            }
        } else if g != 0 {
            return false;
        }
    }
    true
}

/// Random integer matrix of at most 6 × 6 with small entries, often rank deficient.
pub fn random_matrix(seed: u64) -> Vec<Vec<i64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (r, c) = (rng.random_range(1..=6), rng.random_range(1..=6));
    let sparse = rng.random_bool(0.5);
    (0..r)
        .map(|_| {
            (0..c)
                .map(|_| {
                    if sparse && rng.random_bool(0.5) {
                        0
                    } else {
                        rng.random_range(-9..=9)
                    }
                })
                .collect()
        })
        .collect()
}
