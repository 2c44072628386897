//! Mesh growth, sampled Hausdorff distance and the per-run summary row.

mod bvh;

pub use bvh::Bvh;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detach::RefinementReport;
use crate::geom::{self, Vec3};
use crate::mesh::TriMesh;
use crate::par::{self, Execution};

pub const DEFAULT_SAMPLE_DENSITY: f64 = 10.0;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("mesh has no triangles")]
    Empty,
    #[error("mesh has zero total area")]
    ZeroArea,
    #[error("sample density must be positive and finite, got {0}")]
    BadDensity(f64),
}

/// Symmetric sampled Hausdorff distance, normalized by the bounding-box
/// diagonal of the first mesh.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HausdorffResult {
    pub max: f64,
    /// Mean over the samples of both meshes.
    pub avg: f64,
    pub samples: usize,
}

/// Random points on the surface: about `density` per average triangle area,
/// spread over triangles in proportion to their area, plus every vertex.
pub fn sample_surface(mesh: &TriMesh, density: f64, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let avg = mesh.total_area() / mesh.num_triangles() as f64;
    let mut pts: Vec<Vec3> = mesh.positions().to_vec();
    for t in 0..mesh.num_triangles() {
        let expect = density * mesh.triangle_area(t) / avg;
        let mut k = expect.floor() as usize;
        if rng.random::<f64>() < expect - k as f64 {
            k += 1;
        }
        let [a, b, c] = mesh.triangle_positions(t);
        let (ab, ac) = (geom::sub(b, a), geom::sub(c, a));
        for _ in 0..k {
            let (mut r1, mut r2) = (rng.random::<f64>(), rng.random::<f64>());
            if r1 + r2 > 1.0 {
                r1 = 1.0 - r1;
                r2 = 1.0 - r2;
            }
            pts.push(geom::add(a, geom::add(geom::scale(ab, r1), geom::scale(ac, r2))));
        }
    }
    pts
}

fn check(mesh: &TriMesh) -> Result<(), MetricsError> {
    if mesh.num_triangles() == 0 {
        return Err(MetricsError::Empty);
    }
    if mesh.total_area() <= 0.0 {
        return Err(MetricsError::ZeroArea);
    }
    Ok(())
}

/// Symmetric sampled Hausdorff distance between `a` and `b`.
pub fn hausdorff(a: &TriMesh, b: &TriMesh, density: f64, seed: u64, exec: Execution) -> Result<HausdorffResult, MetricsError> {
    check(a)?;
    check(b)?;
    if !(density > 0.0 && density.is_finite()) {
        return Err(MetricsError::BadDensity(density));
    }
    let diag = a.bbox_diagonal();
    let (ta, tb) = (Bvh::new(a), Bvh::new(b));
    let sa = sample_surface(a, density, seed);
    let sb = sample_surface(b, density, seed.wrapping_add(1));
    let mut d = par::map_slice(exec, &sa, |p| tb.distance(*p));
    d.extend(par::map_slice(exec, &sb, |p| ta.distance(*p)));
    let max = d.iter().copied().fold(0.0, f64::max);
    let avg = d.iter().sum::<f64>() / d.len() as f64;
    Ok(HausdorffResult { max: max / diag, avg: avg.min(max) / diag, samples: d.len() })
}

/// Percentage of vertices added relative to `before`.
pub fn growth_percent(v_before: usize, v_after: usize) -> f64 {
    100.0 * (v_after as f64 - v_before as f64) / v_before as f64
}

pub fn growth_stats(before: &TriMesh, after: &TriMesh) -> f64 {
    growth_percent(before.num_vertices(), after.num_vertices())
}

/// Peak resident set size of this process in MiB, where the platform
/// reports it.
pub fn peak_memory_mb() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0)
}

/// One row of the per-model results table.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub model: String,
    pub v: usize,
    pub t: usize,
    pub genus: usize,
    pub strategy: String,
    pub v_after: Option<usize>,
    pub t_after: Option<usize>,
    pub growth_pct: Option<f64>,
    pub val_max: Option<usize>,
    pub val_avg: Option<f64>,
    pub cop_deg: f64,
    pub vsplit_pct: Option<f64>,
    pub esplit_pct: Option<f64>,
    pub h_max: Option<f64>,
    pub h_avg: Option<f64>,
    pub runtime_s: f64,
    pub peak_mem_mb: Option<f64>,
}

pub const TABLE_HEADER: &str =
    "model,V,T,genus,strategy,V',T',growth%,val_max,val_avg,cop_deg,vsplit_pct,esplit_pct,H_max,H_avg,runtime_s,peak_mem_mb";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or(String::new(), |x| x.to_string())
}

impl TableRow {
    /// Fills the refinement columns from a finished run.
    #[allow(clippy::too_many_arguments)]
    pub fn from_run(
        model: &str,
        before: &TriMesh,
        genus: usize,
        after: &TriMesh,
        report: &RefinementReport,
        cop_deg: f64,
        h: Option<HausdorffResult>,
        runtime_s: f64,
    ) -> Self {
        TableRow {
            model: model.to_string(),
            v: before.num_vertices(),
            t: before.num_triangles(),
            genus,
            strategy: report.strategy.map_or("", |s| s.name()).to_string(),
            v_after: Some(after.num_vertices()),
            t_after: Some(after.num_triangles()),
            growth_pct: Some(growth_stats(before, after)),
            val_max: Some(report.merging_valence_max),
            val_avg: Some(report.merging_valence_avg),
            cop_deg,
            vsplit_pct: Some(report.vertex_split_pct),
            esplit_pct: Some(report.edge_split_pct),
            h_max: h.map(|h| h.max),
            h_avg: h.map(|h| h.avg),
            runtime_s,
            peak_mem_mb: peak_memory_mb(),
        }
    }

    pub fn to_csv(&self) -> String {
        [
            csv_field(&self.model),
            self.v.to_string(),
            self.t.to_string(),
            self.genus.to_string(),
            csv_field(&self.strategy),
            opt(&self.v_after),
            opt(&self.t_after),
            opt(&self.growth_pct),
            opt(&self.val_max),
            opt(&self.val_avg),
            self.cop_deg.to_string(),
            opt(&self.vsplit_pct),
            opt(&self.esplit_pct),
            opt(&self.h_max),
            opt(&self.h_avg),
            self.runtime_s.to_string(),
            opt(&self.peak_mem_mb),
        ]
        .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn self_distance_is_zero() {
        let m = synth::polycube_chain(2, 2).unwrap();
        let h = hausdorff(&m, &m, 10.0, 7, Execution::Sequential).unwrap();
        assert_eq!((h.max, h.avg), (0.0, 0.0));
        assert!(h.samples > m.num_vertices());
    }

    #[test]
    fn growth_arithmetic() {
        assert_eq!(growth_percent(1000, 10_000), 900.0);
        assert_eq!(growth_percent(5, 5), 0.0);
    }

    #[test]
    fn csv_row_has_all_columns() {
        let row = TableRow { model: "a,b".into(), ..Default::default() };
        let line = row.to_csv();
        assert!(line.starts_with("\"a,b\","));
        assert_eq!(line.matches(',').count() - 1, TABLE_HEADER.matches(',').count());
    }

    #[test]
    fn rejects_bad_density() {
        let m = synth::tetrahedron();
        assert_eq!(hausdorff(&m, &m, 0.0, 1, Execution::Sequential), Err(MetricsError::BadDensity(0.0)));
    }
}
