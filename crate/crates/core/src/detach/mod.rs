//! Detaching overlapping loops by local refinement.
//!
//! Loops of a greedy basis share edges on their way back to the origin. A
//! *merging site* is a vertex where two or more bundles of loops enter from
//! different edges and leave together along one outgoing edge. Each site is
//! resolved by rerouting all but one bundle through a fresh corridor inside
//! the fan between the outgoing edge and its ingoing edge. That moves the
//! merge one step towards the origin; the driver repeats until loops only
//! meet at the origin.

mod ops;
mod sites;
#[cfg(test)]
mod tests;

pub use ops::{fan_planarity, place_split_vertex, placement_is_valid, split_target, split_targets, OpKind, OpRecord, Placement, MAX_HALVINGS};
pub use sites::{Bundle, MergingSite};

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::LoopSystem;
use crate::mesh::{MeshError, Rotation, TriMesh};
use sites::LoopState;

#[derive(Debug, Error)]
pub enum DetachError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("invalid loop system: {0}")]
    InvalidSystem(String),
    #[error("loops {0} and {1} coincide; the system is not a cut graph")]
    CoincidentLoops(usize, usize),
    #[error("loops through vertex {0} do not share a common path to the origin")]
    NotCommonSuffix(usize),
    #[error("vertex {0} is not a merging site")]
    NotASite(usize),
    #[error("edge split needs a fan with interior edges (vertex {0})")]
    EmptyEdgeFan(usize),
    #[error("triangle split needs a single-triangle fan (vertex {0})")]
    NotSingleTriangle(usize),
    #[error("ingoing and outgoing edges coincide at vertex {0}")]
    SameEdges(usize),
    #[error("no flip-free position for the vertex split at {vertex} after {MAX_HALVINGS} halvings")]
    PlacementFailed { vertex: usize },
    #[error("zero-area triangle {triangle} in fan")]
    DegenerateFan { triangle: usize },
    #[error("estimated mesh memory {bytes} B exceeds the cap of {cap} B")]
    MemoryCap { bytes: usize, cap: usize },
    #[error("operation limit of {0} reached")]
    OperationLimit(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    EdgeSplit,
    VertexSplit,
    TriangleSplit,
    Hybrid,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::EdgeSplit => "edge",
            Strategy::VertexSplit => "vertex",
            Strategy::TriangleSplit => "triangle",
            Strategy::Hybrid => "hybrid",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edge" => Ok(Strategy::EdgeSplit),
            "vertex" => Ok(Strategy::VertexSplit),
            "triangle" => Ok(Strategy::TriangleSplit),
            "hybrid" => Ok(Strategy::Hybrid),
            _ => Err(format!("unknown strategy {s:?} (expected edge|vertex|triangle|hybrid)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineConfig {
    pub strategy: Strategy,
    /// Hybrid only: a fan is flat enough for a vertex split when its
    /// normal spread is at most this many degrees.
    pub planarity_threshold_deg: f64,
    /// Initial interpolation weight towards the median spoke for the split
    /// copy.
    pub lambda_init: f64,
    /// Abort when the estimated mesh footprint passes this many bytes.
    pub mem_cap_bytes: Option<usize>,
    /// Abort after this many operators.
    pub max_operations: Option<usize>,
    /// Keep a per-operator log in the report.
    pub record_ops: bool,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig {
            strategy: Strategy::Hybrid,
            planarity_threshold_deg: 5.0,
            lambda_init: 0.75,
            mem_cap_bytes: None,
            max_operations: None,
            record_ops: false,
        }
    }
}

impl RefineConfig {
    pub fn with_strategy(strategy: Strategy) -> Self {
        RefineConfig { strategy, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), DetachError> {
        if !(0.0..180.0).contains(&self.planarity_threshold_deg) {
            return Err(DetachError::Config(format!(
                "planarity threshold {} not in [0, 180)",
                self.planarity_threshold_deg
            )));
        }
        if !(self.lambda_init > 0.0 && self.lambda_init < 1.0) {
            return Err(DetachError::Config(format!("lambda {} not in (0, 1)", self.lambda_init)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub strategy: Option<Strategy>,
    pub vertex_splits: usize,
    /// Edge-split fans (each may split several edges).
    pub edge_splits: usize,
    pub triangle_splits: usize,
    /// Vertex splits that failed placement and were redone as edge splits.
    pub vertex_to_edge_fallbacks: usize,
    pub new_vertices: usize,
    pub new_triangles: usize,
    /// Queue extractions that found a merging site.
    pub sites_processed: usize,
    pub merging_valence_max: usize,
    pub merging_valence_avg: f64,
    /// Share of vertex splits among all operators, in percent.
    pub vertex_split_pct: f64,
    /// Share of edge splits among all operators, in percent.
    pub edge_split_pct: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ops: Vec<OpRecord>,
}

impl RefinementReport {
    pub fn operations(&self) -> usize {
        self.vertex_splits + self.edge_splits + self.triangle_splits
    }

    fn finish(&mut self, valence_sum: usize) {
        if self.sites_processed > 0 {
            self.merging_valence_avg = valence_sum as f64 / self.sites_processed as f64;
        }
        let ops = self.operations();
        if ops > 0 {
            self.vertex_split_pct = 100.0 * self.vertex_splits as f64 / ops as f64;
            self.edge_split_pct = 100.0 * self.edge_splits as f64 / ops as f64;
        }
    }
}

/// Mesh plus loop state, mutated one bundle at a time.
#[derive(Clone, Debug)]
pub struct Detacher {
    mesh: TriMesh,
    state: LoopState,
}

impl Detacher {
    pub fn new(mesh: TriMesh, system: &LoopSystem) -> Result<Self, DetachError> {
        let state = LoopState::new(&mesh, system)?;
        Ok(Detacher { mesh, state })
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn origin(&self) -> usize {
        self.state.origin
    }

    pub fn system(&self) -> LoopSystem {
        self.state.to_system(&self.mesh)
    }

    pub fn into_parts(self) -> (TriMesh, LoopSystem) {
        let system = self.state.to_system(&self.mesh);
        (self.mesh, system)
    }

    pub fn site_at(&self, v: usize) -> Result<Option<MergingSite>, DetachError> {
        self.state.site_at(&self.mesh, v)
    }

    pub fn sites(&self) -> Result<Vec<MergingSite>, DetachError> {
        self.state.all_sites(&self.mesh)
    }

    fn finish_op(&mut self, kind: OpKind, site: &MergingSite, side: Rotation, corridor: Vec<usize>, fan_edges: usize, before: (usize, usize)) -> OpRecord {
        let b = site.bundle_on(side);
        let loops = b.loops.clone();
        self.state.reroute(&loops, site.vertex, b.from, site.out, &corridor);
        if cfg!(debug_assertions) {
            let mut touched = vec![site.vertex, site.out, b.from];
            touched.extend(&corridor);
            for v in touched {
                self.mesh.check_vertex(v).expect("refinement kept the mesh manifold");
            }
        }
        OpRecord {
            kind,
            vertex: site.vertex,
            fan_edges,
            added_vertices: self.mesh.num_vertices() - before.0,
            added_triangles: self.mesh.num_triangles() - before.1,
        }
    }

    fn counts(&self) -> (usize, usize) {
        (self.mesh.num_vertices(), self.mesh.num_triangles())
    }

    /// Reroutes the bundle on `side` through the midpoints of the fan's
    /// interior edges.
    pub fn edge_split(&mut self, site: &MergingSite, side: Rotation) -> Result<OpRecord, DetachError> {
        let fan = site.fan(&self.mesh, side)?;
        let before = self.counts();
        // corridor comes back ordered from `out` to `from`
        let corridor = ops::edge_split_fan(&mut self.mesh, &fan)?;
        Ok(self.finish_op(OpKind::EdgeSplit, site, side, corridor, fan.spokes.len(), before))
    }

    /// Splits the site vertex along the edges bounding the fan on `side`.
    pub fn vertex_split(&mut self, site: &MergingSite, side: Rotation, lambda_init: f64) -> Result<OpRecord, DetachError> {
        let fan = site.fan(&self.mesh, side)?;
        let placement = place_split_vertex(&self.mesh, &fan, lambda_init)?;
        let before = self.counts();
        let nv = ops::vertex_split_fan(&mut self.mesh, &fan, placement.position);
        Ok(self.finish_op(OpKind::VertexSplit, site, side, vec![nv], fan.spokes.len(), before))
    }

    /// Splits the single triangle between the outgoing edge and the nearest
    /// ingoing edge on `side`.
    pub fn triangle_split(&mut self, site: &MergingSite, side: Rotation) -> Result<OpRecord, DetachError> {
        let fan = site.fan(&self.mesh, side)?;
        let before = self.counts();
        let nv = ops::triangle_split_fan(&mut self.mesh, &fan)?;
        Ok(self.finish_op(OpKind::TriangleSplit, site, side, vec![nv], 0, before))
    }

    /// Side with the fewest interior edges (at least one); ties go CCW.
    fn smaller_edge_fan(&self, site: &MergingSite) -> Result<Option<Rotation>, DetachError> {
        let ccw = site.fan(&self.mesh, Rotation::Ccw)?.spokes.len();
        let cw = site.fan(&self.mesh, Rotation::Cw)?.spokes.len();
        Ok(match (ccw, cw) {
            (0, 0) => None,
            (0, _) => Some(Rotation::Cw),
            (_, 0) => Some(Rotation::Ccw),
            (a, b) if b < a => Some(Rotation::Cw),
            _ => Some(Rotation::Ccw),
        })
    }

    /// Edge split on the smaller fan; a triangle split when both fans are
    /// single triangles.
    fn edge_split_best(&mut self, site: &MergingSite) -> Result<OpRecord, DetachError> {
        match self.smaller_edge_fan(site)? {
            Some(side) => self.edge_split(site, side),
            None => self.triangle_split(site, Rotation::Ccw),
        }
    }

    /// Sides ordered by (planarity, fan size, CCW first).
    fn sides_by_flatness(&self, site: &MergingSite) -> Result<[(Rotation, f64); 2], DetachError> {
        let mut sides = [Rotation::Ccw, Rotation::Cw].map(|s| (s, f64::INFINITY, 0usize));
        for s in &mut sides {
            let fan = site.fan(&self.mesh, s.0)?;
            s.1 = fan_planarity(&self.mesh, &fan).unwrap_or(f64::INFINITY);
            s.2 = fan.triangles.len();
        }
        if sides[1].1 < sides[0].1 || (sides[1].1 == sides[0].1 && sides[1].2 < sides[0].2) {
            sides.swap(0, 1);
        }
        Ok([(sides[0].0, sides[0].1), (sides[1].0, sides[1].1)])
    }

    /// Hybrid rule: vertex split on the flatter fan when it is within the
    /// planarity threshold, otherwise (or when placement fails) an edge
    /// split on the smaller fan.
    pub fn hybrid(&mut self, site: &MergingSite, config: &RefineConfig) -> Result<(OpRecord, bool), DetachError> {
        let [(side, flatness), _] = self.sides_by_flatness(site)?;
        if flatness <= config.planarity_threshold_deg {
            match self.vertex_split(site, side, config.lambda_init) {
                Ok(r) => return Ok((r, false)),
                Err(DetachError::PlacementFailed { .. }) => return Ok((self.edge_split_best(site)?, true)),
                Err(e) => return Err(e),
            }
        }
        Ok((self.edge_split_best(site)?, false))
    }

    /// Detaches one bundle at `site` according to the configured strategy.
    /// Returns the operator record and whether a vertex split fell back.
    pub fn detach_one(&mut self, site: &MergingSite, config: &RefineConfig) -> Result<(OpRecord, bool), DetachError> {
        match config.strategy {
            Strategy::EdgeSplit => Ok((self.edge_split_best(site)?, false)),
            Strategy::TriangleSplit => {
                for side in [Rotation::Ccw, Rotation::Cw] {
                    if site.fan(&self.mesh, side)?.triangles.len() == 1 {
                        return Ok((self.triangle_split(site, side)?, false));
                    }
                }
                Ok((self.edge_split_best(site)?, false))
            }
            Strategy::VertexSplit => {
                let [(first, _), (second, _)] = self.sides_by_flatness(site)?;
                match self.vertex_split(site, first, config.lambda_init) {
                    Err(DetachError::PlacementFailed { .. }) => Ok((self.vertex_split(site, second, config.lambda_init)?, false)),
                    other => Ok((other?, false)),
                }
            }
            Strategy::Hybrid => self.hybrid(site, config),
        }
    }

    fn estimated_bytes(&self) -> usize {
        // positions + adjacency lists + triangles
        self.mesh.num_vertices() * (24 + 24 + 6 * 8) + self.mesh.num_triangles() * (24 + 3 * 8)
    }

    /// Runs the queue until no merging site other than the origin remains.
    pub fn run(&mut self, config: &RefineConfig) -> Result<RefinementReport, DetachError> {
        config.validate()?;
        let mut report = RefinementReport { strategy: Some(config.strategy), ..Default::default() };
        let (v0, t0) = self.counts();
        let mut queue: VecDeque<usize> = VecDeque::new();
        let mut queued = vec![false; self.mesh.num_vertices()];
        for s in self.sites()? {
            queued[s.vertex] = true;
            queue.push_back(s.vertex);
        }
        let mut valence_sum = 0;
        while let Some(w) = queue.pop_front() {
            queued[w] = false;
            let Some(mut site) = self.site_at(w)? else { continue };
            report.sites_processed += 1;
            valence_sum += site.valence;
            report.merging_valence_max = report.merging_valence_max.max(site.valence);
            let out = site.out;
            loop {
                let (rec, fell_back) = self.detach_one(&site, config)?;
                match rec.kind {
                    OpKind::EdgeSplit => report.edge_splits += 1,
                    OpKind::VertexSplit => report.vertex_splits += 1,
                    OpKind::TriangleSplit => report.triangle_splits += 1,
                }
                report.vertex_to_edge_fallbacks += usize::from(fell_back);
                if config.record_ops {
                    report.ops.push(rec);
                }
                if let Some(cap) = config.max_operations {
                    if report.operations() >= cap {
                        return Err(DetachError::OperationLimit(cap));
                    }
                }
                match self.site_at(w)? {
                    Some(s) => site = s,
                    None => break,
                }
            }
            if let Some(cap) = config.mem_cap_bytes {
                let bytes = self.estimated_bytes();
                if bytes > cap {
                    return Err(DetachError::MemoryCap { bytes, cap });
                }
            }
            if queued.len() < self.mesh.num_vertices() {
                queued.resize(self.mesh.num_vertices(), false);
            }
            if out != self.state.origin && !queued[out] && self.site_at(out)?.is_some() {
                queued[out] = true;
                queue.push_back(out);
            }
        }
        let (v1, t1) = self.counts();
        report.new_vertices = v1 - v0;
        report.new_triangles = t1 - t0;
        report.finish(valence_sum);
        Ok(report)
    }
}

/// Every merging site of `system` on `mesh`, in vertex order. Empty iff the
/// loops already meet only at the origin.
pub fn find_merging_sites(mesh: &TriMesh, system: &LoopSystem) -> Result<Vec<MergingSite>, DetachError> {
    LoopState::new(mesh, system)?.all_sites(mesh)
}

fn with_detacher<T>(
    mesh: &mut TriMesh,
    system: &mut LoopSystem,
    f: impl FnOnce(&mut Detacher) -> Result<T, DetachError>,
) -> Result<T, DetachError> {
    let mut d = Detacher::new(std::mem::take(mesh), system)?;
    let res = f(&mut d);
    let (m, s) = d.into_parts();
    *mesh = m;
    if res.is_ok() {
        *system = s;
    }
    res
}

/// Edge split of the fan on `side` at `site`.
pub fn detach_edge_split(mesh: &mut TriMesh, system: &mut LoopSystem, site: &MergingSite, side: Rotation) -> Result<OpRecord, DetachError> {
    with_detacher(mesh, system, |d| d.edge_split(site, side))
}

/// Vertex split of the site along the fan on `side`.
pub fn detach_vertex_split(
    mesh: &mut TriMesh,
    system: &mut LoopSystem,
    site: &MergingSite,
    side: Rotation,
    lambda_init: f64,
) -> Result<OpRecord, DetachError> {
    with_detacher(mesh, system, |d| d.vertex_split(site, side, lambda_init))
}

/// Triangle split on whichever side has a single-triangle fan (CCW first).
pub fn detach_triangle_split(mesh: &mut TriMesh, system: &mut LoopSystem, site: &MergingSite) -> Result<OpRecord, DetachError> {
    with_detacher(mesh, system, |d| {
        for side in [Rotation::Ccw, Rotation::Cw] {
            if site.fan(d.mesh(), side)?.triangles.len() == 1 {
                return d.triangle_split(site, side);
            }
        }
        Err(DetachError::NotSingleTriangle(site.vertex))
    })
}

/// One hybrid step at `site`.
pub fn detach_site_hybrid(mesh: &mut TriMesh, system: &mut LoopSystem, site: &MergingSite, config: &RefineConfig) -> Result<OpRecord, DetachError> {
    with_detacher(mesh, system, |d| d.hybrid(site, config).map(|r| r.0))
}

/// Refines a copy of `mesh` until the loops of `system` only meet at the
/// origin.
pub fn detach_all(mesh: &TriMesh, system: &LoopSystem, config: &RefineConfig) -> Result<(TriMesh, LoopSystem, RefinementReport), DetachError> {
    let mut d = Detacher::new(mesh.clone(), system)?;
    let report = d.run(config)?;
    let (m, s) = d.into_parts();
    Ok((m, s, report))
}

/// True when every pair of loops shares no vertex but the origin and no edge.
pub fn loops_are_disjoint(system: &LoopSystem) -> bool {
    use std::collections::HashSet;
    let mut seen_v: HashSet<usize> = HashSet::new();
    let mut seen_e = HashSet::new();
    for l in &system.loops {
        let inner: HashSet<usize> = l.vertices[1..l.vertices.len().saturating_sub(1)].iter().copied().collect();
        if inner.len() + 2 != l.vertices.len() {
            return false;
        }
        for v in inner {
            if v == system.origin || !seen_v.insert(v) {
                return false;
            }
        }
        for e in l.edges() {
            if !seen_e.insert(e) {
                return false;
            }
        }
    }
    true
}
