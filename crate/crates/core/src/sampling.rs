//! Neighbour search over sample sets and connected components of sampled regions.

use std::collections::{HashMap, VecDeque};

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;

use crate::geometry::Vec3;

/// Neighbours per sample in the proximity graph.
pub const KNN: usize = 8;

/// Edges longer than this multiple of the lattice spacing are not joined.
pub const LINK_FACTOR: f64 = 2.5;

type Cell = (i32, i32, i32);

/// Uniform-grid bucket index over a fixed set of points.
pub struct PointIndex {
    cell: f64,
    grid: HashMap<Cell, Vec<u32>>,
    points: Vec<Vec3>,
}

impl PointIndex {
    pub fn new(points: Vec<Vec3>, cell: f64) -> Self {
        let mut grid: HashMap<Cell, Vec<u32>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            grid.entry(key(p, cell)).or_default().push(i as u32);
        }
        Self { cell, grid, points }
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn visit_within(&self, x: &Vec3, radius: f64, mut f: impl FnMut(u32, f64)) {
        let reach = (radius / self.cell).ceil() as i32;
        let (cx, cy, cz) = key(x, self.cell);
        for dx in -reach..=reach {
            for dy in -reach..=reach {
                for dz in -reach..=reach {
                    if let Some(bucket) = self.grid.get(&(cx + dx, cy + dy, cz + dz)) {
                        for &j in bucket {
                            let d = (self.points[j as usize] - x).norm();
                            if d <= radius {
                                f(j, d);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Closest point within `radius` (chordal distance), ties broken by index.
    pub fn nearest(&self, x: &Vec3, radius: f64) -> Option<(u32, f64)> {
        let mut best: Option<(u32, f64)> = None;
        self.visit_within(x, radius, |j, d| match best {
            Some((bj, bd)) if d > bd || (d == bd && j > bj) => {}
            _ => best = Some((j, d)),
        });
        best
    }

    /// Up to `k` nearest other points within `radius`, closest first.
    pub fn k_nearest(&self, i: usize, k: usize, radius: f64) -> Vec<u32> {
        let x = self.points[i];
        let mut found: Vec<(f64, u32)> = Vec::new();
        self.visit_within(&x, radius, |j, d| {
            if j as usize != i {
                found.push((d, j));
            }
        });
        found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        found.truncate(k);
        found.into_iter().map(|(_, j)| j).collect()
    }
}

fn key(p: &Vec3, cell: f64) -> Cell {
    (
        (p.x / cell).floor() as i32,
        (p.y / cell).floor() as i32,
        (p.z / cell).floor() as i32,
    )
}

/// Symmetrized k-nearest-neighbour graph with a length cutoff.
pub fn knn_graph(index: &PointIndex, k: usize, cutoff: f64) -> Vec<Vec<u32>> {
    let directed: Vec<Vec<u32>> = (0..index.len())
        .into_par_iter()
        .map(|i| index.k_nearest(i, k, cutoff))
        .collect();
    let mut adj = directed.clone();
    for (i, nbrs) in directed.iter().enumerate() {
        for &j in nbrs {
            adj[j as usize].push(i as u32);
        }
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Connected components of a graph. Labels are numbered in order of first appearance.
pub fn components(adj: &[Vec<u32>]) -> (Vec<u32>, usize) {
    let n = adj.len();
    let mut uf = UnionFind::<usize>::new(n);
    for (i, nbrs) in adj.iter().enumerate() {
        for &j in nbrs {
            uf.union(i, j as usize);
        }
    }
    let mut relabel: HashMap<usize, u32> = HashMap::new();
    let labels = (0..n)
        .map(|i| {
            let root = uf.find(i);
            let next = relabel.len() as u32;
            *relabel.entry(root).or_insert(next)
        })
        .collect();
    (labels, relabel.len())
}

/// Breadth-first spanning forest. Returns the visiting order and each node's parent
/// (`None` for roots). Neighbour pairs rejected by `accept` are not used.
pub fn bfs_forest(
    adj: &[Vec<u32>],
    roots: &[usize],
    mut accept: impl FnMut(usize, usize) -> bool,
) -> (Vec<usize>, Vec<Option<usize>>) {
    let n = adj.len();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    for &r in roots {
        if !seen[r] {
            seen[r] = true;
            queue.push_back(r);
        }
    }
    while let Some(i) = queue.pop_front() {
        order.push(i);
        for &j in &adj[i] {
            let j = j as usize;
            if !seen[j] && accept(i, j) {
                seen[j] = true;
                parent[j] = Some(i);
                queue.push_back(j);
            }
        }
    }
    (order, parent)
}
