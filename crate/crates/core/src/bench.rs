//! Growth sweeps over synthetic polycube chains.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::basis::{basis_for, RootChoice, GLOBAL_VERTEX_CAP};
use crate::detach::{detach_all, RefineConfig, Strategy};
use crate::metrics::growth_percent;
use crate::par::{self, Execution};
use crate::synth;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub genus_min: usize,
    pub genus_max: usize,
    pub cells_per_edge: usize,
    pub strategies: Vec<Strategy>,
    /// Shared settings; the strategy field is replaced per job.
    pub refine: RefineConfig,
    /// Basis root; an index is taken modulo the vertex count.
    pub root: RootChoice,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig {
            genus_min: 1,
            genus_max: 20,
            cells_per_edge: 1,
            strategies: vec![Strategy::VertexSplit, Strategy::Hybrid, Strategy::EdgeSplit],
            refine: RefineConfig::default(),
            root: RootChoice::Random(0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub genus: usize,
    pub strategy: Strategy,
    pub v: usize,
    pub t: usize,
    pub v_after: Option<usize>,
    pub t_after: Option<usize>,
    pub growth_pct: Option<f64>,
    pub vertex_splits: usize,
    pub edge_splits: usize,
    pub triangle_splits: usize,
    pub runtime_s: f64,
    /// `ok`, or the error that ended the run.
    pub status: String,
}

pub const GROWTH_HEADER: &str =
    "genus,strategy,V,T,V',T',growth%,vertex_splits,edge_splits,triangle_splits,runtime_s,status";

impl GrowthRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn to_csv(&self) -> String {
        let o = |v: Option<String>| v.unwrap_or_default();
        let status = if self.status.contains([',', '"']) {
            format!("\"{}\"", self.status.replace('"', "\"\""))
        } else {
            self.status.clone()
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.genus,
            self.strategy.name(),
            self.v,
            self.t,
            o(self.v_after.map(|x| x.to_string())),
            o(self.t_after.map(|x| x.to_string())),
            o(self.growth_pct.map(|x| x.to_string())),
            self.vertex_splits,
            self.edge_splits,
            self.triangle_splits,
            self.runtime_s,
            status
        )
    }
}

/// Generates, computes a basis for and refines one chain.
pub fn growth_run(genus: usize, strategy: Strategy, cfg: &GrowthConfig) -> GrowthRow {
    let start = Instant::now();
    let mut row = GrowthRow {
        genus,
        strategy,
        v: 0,
        t: 0,
        v_after: None,
        t_after: None,
        growth_pct: None,
        vertex_splits: 0,
        edge_splits: 0,
        triangle_splits: 0,
        runtime_s: 0.0,
        status: "ok".into(),
    };
    let result = (|| -> Result<(), String> {
        let mesh = synth::polycube_chain(genus, cfg.cells_per_edge).map_err(|e| e.to_string())?;
        row.v = mesh.num_vertices();
        row.t = mesh.num_triangles();
        let root = match cfg.root {
            RootChoice::Index(i) => RootChoice::Index(i % mesh.num_vertices()),
            r => r,
        };
        let system =
            basis_for(&mesh, root, GLOBAL_VERTEX_CAP, Execution::Sequential).map_err(|e| e.to_string())?;
        let refine = RefineConfig { strategy, ..cfg.refine.clone() };
        let (out, _, report) = detach_all(&mesh, &system, &refine).map_err(|e| e.to_string())?;
        row.v_after = Some(out.num_vertices());
        row.t_after = Some(out.num_triangles());
        row.growth_pct = Some(growth_percent(mesh.num_vertices(), out.num_vertices()));
        row.vertex_splits = report.vertex_splits;
        row.edge_splits = report.edge_splits;
        row.triangle_splits = report.triangle_splits;
        Ok(())
    })();
    if let Err(e) = result {
        log::warn!("genus {genus} {}: {e}", strategy.name());
        row.status = e;
    }
    row.runtime_s = start.elapsed().as_secs_f64();
    row
}

/// Runs every (genus, strategy) pair. Failed runs become rows with an error
/// status; the sweep continues.
pub fn growth_bench(cfg: &GrowthConfig, exec: Execution) -> Vec<GrowthRow> {
    let jobs: Vec<(usize, Strategy)> = (cfg.genus_min..=cfg.genus_max)
        .flat_map(|g| cfg.strategies.iter().map(move |&s| (g, s)))
        .collect();
    par::map_slice(exec, &jobs, |&(g, s)| growth_run(g, s, cfg))
}

/// Least-squares slope of `ln y` against `ln x` over the points where both
/// are positive. `None` with fewer than two such points.
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_of_power_law() {
        let xs: Vec<f64> = (1..=20).map(|x| x as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(2.5)).collect();
        assert!((fit_exponent(&xs, &ys).unwrap() - 2.5).abs() < 1e-12);
        assert_eq!(fit_exponent(&[1.0], &[1.0]), None);
    }

    #[test]
    fn failed_run_is_recorded() {
        let cfg = GrowthConfig {
            refine: RefineConfig { max_operations: Some(1), ..Default::default() },
            ..Default::default()
        };
        let row = growth_run(3, Strategy::EdgeSplit, &cfg);
        assert!(!row.is_ok());
        assert!(row.v > 0 && row.v_after.is_none());
    }
}
