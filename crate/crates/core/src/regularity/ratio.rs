use std::collections::HashSet;

use petgraph::algo::{astar, dijkstra};
use petgraph::graph::{NodeIndex, UnGraph};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mesh::{build_chamber_mesh, dist, ChamberMesh, SpatialHash};
use crate::coxeter::{CoxeterType, RootSystem};
use crate::error::{Error, Result};
use crate::invariants::InvariantBasis;
use crate::rng::{stream_id, stream_rng};

/// Share of random pairs drawn with both ends near a wall.
pub const NEAR_BOUNDARY_FRACTION: f64 = 0.5;

/// Random pairs closer in the image than this many local image edge
/// lengths are redrawn: the mesh cannot resolve their geodesic.
pub const RESOLUTION_FACTOR: f64 = 4.0;

/// Vertices whose images are within this many local image spacings of each
/// other are also joined, so that every vertex sees image directions all
/// around it and not only the images of the mesh stencil.
pub const IMAGE_LINK_FACTOR: f64 = 3.0;

/// At most this many image links per vertex, nearest first.
pub const MAX_IMAGE_LINKS: usize = 128;

/// The chamber mesh carried to the image by `P`, weighted by Euclidean
/// distance between images, with extra links between vertices whose images
/// are close (see [`IMAGE_LINK_FACTOR`]).
#[derive(Clone, Debug)]
pub struct ImageGraph {
    pub ty: CoxeterType,
    pub h: f64,
    pub points: Vec<Vec<f64>>,
    pub graph: UnGraph<(), f64>,
    /// Vertices within `2h` of a wall.
    pub near_boundary: Vec<usize>,
    /// Longest image edge at each vertex.
    pub spacing: Vec<f64>,
}

impl ImageGraph {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Vertex whose image is closest to `p`.
    pub fn nearest_vertex(&self, p: &[f64]) -> usize {
        (0..self.points.len())
            .min_by(|&i, &j| dist(&self.points[i], p).total_cmp(&dist(&self.points[j], p)))
            .unwrap_or(0)
    }
}

/// Fails if two distinct mesh vertices have the same image.
pub fn image_graph(mesh: &ChamberMesh, basis: &InvariantBasis) -> Result<ImageGraph> {
    let n = basis.dim();
    let num = basis.numeric();
    let points: Vec<Vec<f64>> = mesh.vertices.par_iter().map(|x| num.eval(x, n)).collect();
    let mut graph = UnGraph::with_capacity(points.len(), mesh.edges.len());
    for _ in 0..points.len() {
        graph.add_node(());
    }
    for &(i, j) in &mesh.edges {
        let w = dist(&points[i], &points[j]);
        if w <= 0.0 {
            return Err(Error::Verification(format!(
                "mesh vertices {:?} and {:?} have the same image",
                mesh.vertices[i], mesh.vertices[j]
            )));
        }
        graph.add_edge(NodeIndex::new(i), NodeIndex::new(j), w);
    }
    let mut spacing = vec![0.0f64; points.len()];
    for &(i, j) in &mesh.edges {
        let w = dist(&points[i], &points[j]);
        spacing[i] = spacing[i].max(w);
        spacing[j] = spacing[j].max(w);
    }
    let reach = IMAGE_LINK_FACTOR * spacing.iter().copied().fold(0.0, f64::max);
    if reach > 0.0 {
        let mut hash = SpatialHash::new(reach);
        for (i, p) in points.iter().enumerate() {
            hash.insert(i, p);
        }
        let (pts, sp) = (&points, &spacing);
        let mesh_edges: HashSet<(usize, usize)> = mesh.edges.iter().copied().collect();
        let mut extra: Vec<(usize, usize, f64)> = (0..points.len())
            .into_par_iter()
            .flat_map_iter(|i| {
                let r = IMAGE_LINK_FACTOR * sp[i];
                let mut near: Vec<(usize, f64)> = hash
                    .candidates(&pts[i])
                    .into_iter()
                    .filter(|&j| j != i)
                    .map(|j| (j, dist(&pts[i], &pts[j])))
                    .filter(|&(_, w)| w > 0.0 && w <= r)
                    .collect();
                near.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
                near.truncate(MAX_IMAGE_LINKS);
                near.into_iter().map(move |(j, w)| (i.min(j), i.max(j), w))
            })
            .filter(|(i, j, _)| !mesh_edges.contains(&(*i, *j)))
            .collect();
        extra.sort_by_key(|e| (e.0, e.1));
        extra.dedup_by(|a, b| (a.0, a.1) == (b.0, b.1));
        for (i, j, w) in extra {
            graph.add_edge(NodeIndex::new(i), NodeIndex::new(j), w);
        }
    }
    let near_boundary = (0..mesh.len())
        .filter(|&i| mesh.wall_distance[i] <= 2.0 * mesh.h)
        .collect();
    Ok(ImageGraph {
        ty: mesh.ty,
        h: mesh.h,
        points,
        graph,
        near_boundary,
        spacing,
    })
}

#[derive(Clone, Debug)]
pub enum PairSpec {
    /// Seeded pairs, [`NEAR_BOUNDARY_FRACTION`] of them near the walls, all
    /// resolved by the mesh (see [`RESOLUTION_FACTOR`]).
    Random(usize),
    Explicit(Vec<(usize, usize)>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PairRecord {
    pub u: usize,
    pub v: usize,
    pub euclid: f64,
    pub geodesic: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RefinementRow {
    pub h: f64,
    pub vertices: usize,
    pub max_ratio: f64,
    pub p99_ratio: f64,
}

/// Ratios of graph geodesic to Euclidean distance in the image. The maximum
/// is an empirical lower bound for the regularity constant.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RatioReport {
    #[serde(rename = "type")]
    pub ty: CoxeterType,
    pub pairs: usize,
    pub h: f64,
    pub max_ratio: f64,
    pub p99_ratio: f64,
    pub min_ratio: f64,
    pub worst: Option<PairRecord>,
    pub table: Vec<RefinementRow>,
    /// `|max(h/2) − max(h)| / max(h)` when a refinement was run.
    pub refinement_change: Option<f64>,
    #[serde(skip)]
    pub records: Vec<PairRecord>,
}

/// Random pairs share their first vertex in groups of this size, so that
/// one shortest-path tree serves a whole group.
pub const PAIRS_PER_SOURCE: usize = 50;

/// Seeded pairs grouped by source: [`NEAR_BOUNDARY_FRACTION`] of them join
/// two near-wall vertices, the rest two arbitrary vertices.
fn draw_pairs(g: &ImageGraph, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = stream_rng(seed, stream_id(&format!("pairs:{}", g.ty), 0));
    let all: Vec<usize> = (0..g.len()).collect();
    let near = &g.near_boundary;
    let n_near = if near.len() >= 2 {
        (count as f64 * NEAR_BOUNDARY_FRACTION).round() as usize
    } else {
        0
    };
    let mut out = Vec::with_capacity(count);
    if all.len() < 2 {
        return out;
    }
    let resolved = |u: usize, v: usize| {
        u != v
            && dist(&g.points[u], &g.points[v])
                >= RESOLUTION_FACTOR * g.spacing[u].max(g.spacing[v])
    };
    for (pool, quota) in [(near.as_slice(), n_near), (all.as_slice(), count)] {
        let mut misses = 0;
        while out.len() < quota && misses < 1000 {
            let u = pool[rng.random_range(0..pool.len())];
            let before = out.len();
            let mut tries = 0;
            while out.len() < quota
                && out.len() - before < PAIRS_PER_SOURCE
                && tries < 20 * PAIRS_PER_SOURCE
            {
                tries += 1;
                let v = pool[rng.random_range(0..pool.len())];
                if resolved(u, v) {
                    out.push((u, v));
                }
            }
            if out.len() == before {
                misses += 1;
            }
        }
    }
    out
}

/// Shortest-path lengths from `u` to each of `targets`.
fn geodesics(g: &ImageGraph, u: usize, targets: &[usize]) -> Vec<Option<f64>> {
    if let [v] = targets {
        let goal = NodeIndex::new(*v);
        let target = &g.points[*v];
        let d = astar(
            &g.graph,
            NodeIndex::new(u),
            |x| x == goal,
            |e| *e.weight(),
            |x| dist(&g.points[x.index()], target),
        )
        .map(|(len, _)| len);
        return vec![d];
    }
    let tree = dijkstra(&g.graph, NodeIndex::new(u), None, |e| *e.weight());
    targets.iter().map(|v| tree.get(&NodeIndex::new(*v)).copied()).collect()
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[i]
}

pub fn whitney_ratio(g: &ImageGraph, pairs: &PairSpec, seed: u64) -> Result<RatioReport> {
    let list = match pairs {
        PairSpec::Random(c) => draw_pairs(g, *c, seed),
        PairSpec::Explicit(v) => v.clone(),
    };
    if let Some(&(u, v)) = list.iter().find(|&&(u, v)| u >= g.len() || v >= g.len()) {
        return Err(Error::Usage(format!("pair ({u}, {v}) outside the graph")));
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for &(u, v) in &list {
        match groups.last_mut() {
            Some((s, t)) if *s == u => t.push(v),
            _ => groups.push((u, vec![v])),
        }
    }
    let records: Vec<PairRecord> = groups
        .par_iter()
        .map(|(u, targets)| {
            geodesics(g, *u, targets)
                .into_iter()
                .zip(targets)
                .map(|(geo, &v)| {
                    let geo = geo.ok_or_else(|| {
                        Error::Verification(format!("vertices {u} and {v} are not connected"))
                    })?;
                    let euclid = dist(&g.points[*u], &g.points[v]);
                    Ok(PairRecord {
                        u: *u,
                        v,
                        euclid,
                        geodesic: geo,
                        ratio: if euclid > 0.0 { geo / euclid } else { 1.0 },
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    let worst = records.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio)).cloned();
    let max_ratio = ratios.last().copied().unwrap_or(f64::NAN);
    let p99_ratio = percentile(&ratios, 0.99);
    Ok(RatioReport {
        ty: g.ty,
        pairs: records.len(),
        h: g.h,
        max_ratio,
        p99_ratio,
        min_ratio: ratios.first().copied().unwrap_or(f64::NAN),
        worst,
        table: vec![RefinementRow {
            h: g.h,
            vertices: g.len(),
            max_ratio,
            p99_ratio,
        }],
        refinement_change: None,
        records,
    })
}

/// [`whitney_ratio`] on meshes of pitch `h` and `h/2`; the report is the one
/// at pitch `h` with both rows in its table.
pub fn whitney_study(
    basis: &InvariantBasis,
    rs: &RootSystem,
    a: f64,
    h: f64,
    pairs: usize,
    seed: u64,
) -> Result<RatioReport> {
    let coarse = image_graph(&build_chamber_mesh(rs, a, h)?, basis)?;
    let mut rep = whitney_ratio(&coarse, &PairSpec::Random(pairs), seed)?;
    let fine = image_graph(&build_chamber_mesh(rs, a, h / 2.0)?, basis)?;
    let fine_rep = whitney_ratio(&fine, &PairSpec::Random(pairs), seed)?;
    rep.table.extend(fine_rep.table);
    rep.refinement_change = Some((fine_rep.max_ratio - rep.max_ratio).abs() / rep.max_ratio);
    Ok(rep)
}
