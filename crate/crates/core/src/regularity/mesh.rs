use std::collections::HashMap;

use petgraph::unionfind::UnionFind;

use crate::coxeter::{enumerate_strata, CoxeterType, RootSystem};
use crate::error::{Error, Result};

/// Membership slack for mesh vertices, both for the chamber and the ball.
pub const MESH_TOL: f64 = 1e-12;

/// Grid points of the closed chamber inside the ball of radius `a`, with
/// extra points on every face and on the sphere, joined when closer than
/// `√n·h`.
#[derive(Clone, Debug)]
pub struct ChamberMesh {
    pub ty: CoxeterType,
    pub a: f64,
    pub h: f64,
    pub vertices: Vec<Vec<f64>>,
    pub edges: Vec<(usize, usize)>,
    /// Distance from each vertex to the nearest wall of the chamber.
    pub wall_distance: Vec<f64>,
}

impl ChamberMesh {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Uniform bucketing of points by cell of side `cell`.
pub(crate) struct SpatialHash {
    cell: f64,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl SpatialHash {
    pub(crate) fn new(cell: f64) -> Self {
        SpatialHash {
            cell,
            buckets: HashMap::new(),
        }
    }

    fn key(&self, x: &[f64]) -> Vec<i64> {
        x.iter().map(|v| (v / self.cell).floor() as i64).collect()
    }

    pub(crate) fn insert(&mut self, i: usize, x: &[f64]) {
        let k = self.key(x);
        self.buckets.entry(k).or_default().push(i);
    }

    /// Indices in the `3ⁿ` cells around `x`: every point within `cell` of
    /// `x` is among them.
    pub(crate) fn candidates(&self, x: &[f64]) -> Vec<usize> {
        let base = self.key(x);
        let n = base.len();
        let mut out = Vec::new();
        let mut offset = vec![-1i64; n];
        loop {
            let k: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
            if let Some(v) = self.buckets.get(&k) {
                out.extend_from_slice(v);
            }
            let mut i = 0;
            while i < n && offset[i] == 1 {
                offset[i] = -1;
                i += 1;
            }
            if i == n {
                break;
            }
            offset[i] += 1;
        }
        out
    }
}

/// Integer vectors `j` with `|j|·h ≤ a`, visited with a running sum of
/// squares so that the corners of the cube are skipped.
fn ball_lattice(dim: usize, a: f64, h: f64, mut f: impl FnMut(&[i64])) {
    let m = (a / h).ceil() as i64;
    let lim = (a / h) * (a / h) * (1.0 + 1e-12);
    fn rec(j: &mut Vec<i64>, dim: usize, m: i64, sq: f64, lim: f64, f: &mut dyn FnMut(&[i64])) {
        if j.len() == dim {
            f(j);
            return;
        }
        for v in -m..=m {
            let s = sq + (v * v) as f64;
            if s > lim {
                continue;
            }
            j.push(v);
            rec(j, dim, m, s, lim, f);
            j.pop();
        }
    }
    rec(&mut Vec::with_capacity(dim), dim, m, 0.0, lim, &mut f);
}

struct Builder<'a> {
    rs: &'a RootSystem,
    a: f64,
    dedup: SpatialHash,
    merge: f64,
    vertices: Vec<Vec<f64>>,
}

impl Builder<'_> {
    fn push(&mut self, x: Vec<f64>) {
        if !self.rs.chamber_contains(&x, MESH_TOL) || norm(&x) > self.a + MESH_TOL {
            return;
        }
        if self
            .dedup
            .candidates(&x)
            .iter()
            .any(|&i| dist(&self.vertices[i], &x) < self.merge)
        {
            return;
        }
        self.dedup.insert(self.vertices.len(), &x);
        self.vertices.push(x);
    }
}

fn mesh_once(rs: &RootSystem, a: f64, h: f64) -> ChamberMesh {
    let n = rs.dim();
    let mut b = Builder {
        rs,
        a,
        dedup: SpatialHash::new(h),
        merge: 1e-6 * h,
        vertices: Vec::new(),
    };
    b.push(vec![0.0; n]);
    ball_lattice(n, a, h, |j| b.push(j.iter().map(|&v| v as f64 * h).collect()));
    for s in enumerate_strata(rs) {
        if s.walls.is_empty() || s.dim == 0 {
            continue;
        }
        ball_lattice(s.dim, a, h, |j| {
            let c: Vec<f64> = j.iter().map(|&v| v as f64 * h).collect();
            b.push(s.point(&c));
        });
    }
    let inner: Vec<Vec<f64>> = b
        .vertices
        .iter()
        .filter(|x| {
            let r = norm(x);
            r > a - h && r > 0.0
        })
        .cloned()
        .collect();
    for x in inner {
        let r = norm(&x);
        b.push(x.iter().map(|v| v * a / r).collect());
    }
    let vertices = b.vertices;

    let radius = (n as f64).sqrt() * h * (1.0 + 1e-9);
    let mut grid = SpatialHash::new(radius);
    for (i, x) in vertices.iter().enumerate() {
        grid.insert(i, x);
    }
    let mut edges = Vec::new();
    for (i, x) in vertices.iter().enumerate() {
        for j in grid.candidates(x) {
            if j > i && dist(x, &vertices[j]) <= radius {
                edges.push((i, j));
            }
        }
    }
    edges.sort_unstable();
    let walls: Vec<&[f64]> = (0..rs.rank()).map(|i| rs.simple_root(i)).collect();
    let wall_distance = vertices
        .iter()
        .map(|x| {
            walls
                .iter()
                .map(|w| w.iter().zip(x).map(|(p, q)| p * q).sum::<f64>().max(0.0))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    ChamberMesh {
        ty: rs.coxeter_type(),
        a,
        h,
        vertices,
        edges,
        wall_distance,
    }
}

fn is_connected(m: &ChamberMesh) -> bool {
    let mut uf = UnionFind::new(m.len());
    for &(i, j) in &m.edges {
        uf.union(i, j);
    }
    let mut labels = uf.into_labeling();
    labels.sort_unstable();
    labels.dedup();
    labels.len() == 1
}

/// Meshes `C̄ ∩ {|x| ≤ a}` at pitch `h`. A disconnected mesh is rebuilt
/// once at pitch `h/2`.
pub fn build_chamber_mesh(rs: &RootSystem, a: f64, h: f64) -> Result<ChamberMesh> {
    if !(a > 0.0 && h > 0.0 && h <= a / 4.0) {
        return Err(Error::Usage(format!(
            "mesh needs a > 0 and 0 < h ≤ a/4 (a = {a}, h = {h})"
        )));
    }
    let m = mesh_once(rs, a, h);
    if is_connected(&m) {
        return Ok(m);
    }
    let m = mesh_once(rs, a, h / 2.0);
    if is_connected(&m) {
        return Ok(m);
    }
    Err(Error::Convergence(format!(
        "chamber mesh of {} stays disconnected at pitch {}",
        rs.coxeter_type(),
        h / 2.0
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::build_root_system;

    #[test]
    fn spatial_hash_finds_neighbours() {
        let mut g = SpatialHash::new(1.0);
        let pts = [vec![0.1, 0.1], vec![0.9, 1.2], vec![2.5, 0.0]];
        for (i, p) in pts.iter().enumerate() {
            g.insert(i, p);
        }
        let c = g.candidates(&[0.5, 0.5]);
        assert!(c.contains(&0) && c.contains(&1) && !c.contains(&2));
    }

    #[test]
    fn b2_mesh_has_wall_points() {
        let rs = build_root_system("B2".parse().unwrap()).unwrap();
        let m = build_chamber_mesh(&rs, 1.0, 0.1).unwrap();
        let on_diag = m
            .vertices
            .iter()
            .filter(|x| (x[0] - x[1]).abs() < 1e-12 && x[0] > 0.0)
            .count();
        assert!(on_diag >= 7);
        assert!(m.vertices.iter().any(|x| (norm(x) - 1.0).abs() < 1e-12));
    }
}
