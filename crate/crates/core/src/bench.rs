//! Grid-vs-grid experiments: solve one problem on several grids and tabulate
//! node counts, error norms, and Péclet statistics side by side.

use crate::error::{Error, Result};
use crate::gridgen::Grid1D;
use crate::numfmt::g17;
use crate::solver::{error_norms, solve, TransportProblem};

/// One row of a [`BenchReport`]. Metric fields are `None` when the grid
/// could not be built or solved; the error message says why.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchEntry {
    pub label: String,
    pub node_count: Option<usize>,
    pub linf: Option<f64>,
    pub l2w: Option<f64>,
    pub max_peclet: Option<f64>,
    pub min_step: Option<f64>,
    pub max_step: Option<f64>,
    pub error: Option<String>,
}

impl BenchEntry {
    /// Entry for a grid that never materialized.
    pub fn failed(label: impl Into<String>, error: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            node_count: None,
            linf: None,
            l2w: None,
            max_peclet: None,
            min_step: None,
            max_step: None,
            error: Some(error.into()),
        }
    }
}

/// Comparison table plus an echo of the problem it was computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub problem: TransportProblem,
    pub entries: Vec<BenchEntry>,
}

impl BenchReport {
    /// Serialize as `label,node_count,linf,l2w,max_peclet,min_step,max_step`
    /// CSV; unavailable metrics render as `ERR`.
    pub fn to_csv(&self) -> String {
        fn cell(v: Option<f64>) -> String {
            v.map(g17).unwrap_or_else(|| "ERR".to_string())
        }
        let mut out = String::from("label,node_count,linf,l2w,max_peclet,min_step,max_step\n");
        for e in &self.entries {
            let count = e
                .node_count
                .map(|n| n.to_string())
                .unwrap_or_else(|| "ERR".to_string());
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                e.label,
                count,
                cell(e.linf),
                cell(e.l2w),
                cell(e.max_peclet),
                cell(e.min_step),
                cell(e.max_step)
            ));
        }
        out
    }
}

/// Metrics for one labeled grid. Solver failures land in the entry's error
/// field; the grid-shape metrics are always filled.
pub fn entry_for(prob: &TransportProblem, label: impl Into<String>, grid: &Grid1D) -> BenchEntry {
    let max_peclet = grid
        .steps()
        .map(|h| prob.b.abs() * h / (2.0 * prob.mu))
        .fold(0.0_f64, f64::max);
    let mut entry = BenchEntry {
        label: label.into(),
        node_count: Some(grid.len()),
        linf: None,
        l2w: None,
        max_peclet: Some(max_peclet),
        min_step: Some(grid.min_step()),
        max_step: Some(grid.max_step()),
        error: None,
    };
    match solve(prob, grid) {
        Ok(sol) => {
            let norms = error_norms(&sol, prob);
            entry.linf = Some(norms.linf);
            entry.l2w = Some(norms.l2w);
        }
        Err(e) => entry.error = Some(e.to_string()),
    }
    entry
}

/// Solve `prob` on every labeled grid. Solver errors are recorded per entry
/// and do not abort the report; entry order follows the input order.
pub fn compare(prob: &TransportProblem, grids: &[(String, Grid1D)]) -> Result<BenchReport> {
    if grids.is_empty() {
        return Err(Error::invalid("no grids to compare"));
    }
    let entries = grids
        .iter()
        .map(|(label, grid)| entry_for(prob, label, grid))
        .collect();
    Ok(BenchReport {
        problem: *prob,
        entries,
    })
}

/// One level of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub linf: f64,
    /// `log2(linf_prev / linf)`; `None` on the first level, NaN when either
    /// error sits at the round-off floor.
    pub observed_order: Option<f64>,
}

/// Errors below this are round-off, not discretization; order estimates
/// from them are meaningless.
const ROUNDOFF_FLOOR: f64 = 1e-13;

/// Uniform-grid convergence study: halve `h` per level and record the
/// observed order between consecutive levels. Starts below the Péclet limit
/// so the asymptotic first-order regime is visible from the first halving.
pub fn convergence_study(
    prob: &TransportProblem,
    h0: f64,
    levels: usize,
) -> Result<Vec<ConvergenceRow>> {
    if levels < 2 {
        return Err(Error::invalid("need at least 2 levels"));
    }
    if !(h0 > 0.0) || !h0.is_finite() {
        return Err(Error::invalid("non-positive h0"));
    }
    if prob.b.abs() * h0 / (2.0 * prob.mu) >= 1.0 {
        return Err(Error::PecletLimitExceeded);
    }

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels);
    for level in 0..levels {
        let h = h0 / (1u64 << level) as f64;
        let grid = crate::gridgen::uniform_grid(prob.lo, prob.hi, h)?;
        let sol = solve(prob, &grid)?;
        let linf = error_norms(&sol, prob).linf;
        let observed_order = rows.last().map(|prev| {
            if prev.linf <= ROUNDOFF_FLOOR || linf <= ROUNDOFF_FLOOR {
                f64::NAN
            } else {
                (prev.linf / linf).log2()
            }
        });
        rows.push(ConvergenceRow {
            h,
            linf,
            observed_order,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridgen::{calibrate, generate_boundary_layer_grid, uniform_grid};

    fn paper_problem() -> TransportProblem {
        TransportProblem::new(1.0, 100.0, 0.0, 1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn compare_pure_diffusion_is_exact() {
        let p = TransportProblem::new(1.0, 1e-30, 0.0, 1.0, 0.0, 1.0).unwrap();
        let grid = uniform_grid(0.0, 1.0, 0.1).unwrap();
        let report = compare(&p, &[("uniform".to_string(), grid)]).unwrap();
        assert_eq!(report.entries.len(), 1);
        assert!(report.entries[0].linf.unwrap() < 1e-12);
        assert!(report.entries[0].error.is_none());
    }

    #[test]
    fn compare_is_deterministic_and_label_independent() {
        let p = paper_problem();
        let grid = uniform_grid(0.0, 1.0, 0.02).unwrap();
        let grids = vec![
            ("first".to_string(), grid.clone()),
            ("second".to_string(), grid),
        ];
        let r1 = compare(&p, &grids).unwrap();
        let r2 = compare(&p, &grids).unwrap();
        assert_eq!(r1.to_csv(), r2.to_csv());
        let a = &r1.entries[0];
        let b = &r1.entries[1];
        assert_eq!(a.linf, b.linf);
        assert_eq!(a.l2w, b.l2w);
        assert_eq!(a.max_peclet, b.max_peclet);
        assert_eq!(a.node_count, b.node_count);
    }

    #[test]
    fn compare_isolates_per_entry_failures() {
        let p = paper_problem();
        let good = uniform_grid(0.0, 1.0, 0.1).unwrap();
        // 2 nodes: no interior rows, so the solve fails for this entry only
        let bad = Grid1D::new(vec![0.0, 1.0]).unwrap();
        let report = compare(
            &p,
            &[("good".to_string(), good), ("bad".to_string(), bad)],
        )
        .unwrap();
        assert!(report.entries[0].error.is_none());
        assert!(report.entries[0].linf.is_some());
        assert_eq!(
            report.entries[1].error.as_deref(),
            Some("no interior nodes")
        );
        assert!(report.entries[1].linf.is_none());
        assert_eq!(report.entries[1].node_count, Some(2));
        let csv = report.to_csv();
        assert!(csv.lines().nth(2).unwrap().contains("ERR"));
    }

    #[test]
    fn compare_rejects_empty_input() {
        assert!(compare(&paper_problem(), &[]).is_err());
    }

    #[test]
    fn adaptive_entry_peclet_split() {
        let p = paper_problem();
        let spec = calibrate(100.0, 1.0, 0.1, 0.8).unwrap();
        let grid = generate_boundary_layer_grid(&spec, 0.0, 1.0).unwrap();
        // below xi the report sees the coarse Péclet number
        let entry = entry_for(&p, "adaptive", &grid);
        assert!((entry.max_peclet.unwrap() - 5.0).abs() < 1e-12);
        // restricted to the refined region the bound is 1
        let refined_max = grid
            .nodes()
            .windows(2)
            .filter(|w| w[0] >= 0.8)
            .map(|w| p.b * (w[1] - w[0]) / (2.0 * p.mu))
            .fold(0.0_f64, f64::max);
        assert!(refined_max <= 1.0 + 1e-12);
    }

    #[test]
    fn convergence_study_shape() {
        let p = paper_problem();
        let rows = convergence_study(&p, 0.005, 2).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].observed_order.is_none());
        assert!(rows[1].observed_order.is_some());
        assert!((rows[1].h - 0.0025).abs() < 1e-18);
    }

    #[test]
    fn convergence_study_requires_peclet_margin() {
        let p = paper_problem();
        // Pe(0.02) = 1 exactly: not a clean starting point
        assert_eq!(
            convergence_study(&p, 0.02, 3),
            Err(Error::PecletLimitExceeded)
        );
        assert!(convergence_study(&p, 0.005, 1).is_err());
    }

    #[test]
    fn convergence_study_pure_diffusion_reports_nan() {
        let p = TransportProblem::new(1.0, 1e-30, 0.0, 1.0, 0.0, 1.0).unwrap();
        let rows = convergence_study(&p, 0.25, 3).unwrap();
        for row in &rows {
            assert!(row.linf < 1e-12);
        }
        assert!(rows[1].observed_order.unwrap().is_nan());
        assert!(rows[2].observed_order.unwrap().is_nan());
    }

    #[test]
    fn report_csv_header() {
        let p = paper_problem();
        let grid = uniform_grid(0.0, 1.0, 0.5).unwrap();
        let report = compare(&p, &[("g".to_string(), grid)]).unwrap();
        assert!(report
            .to_csv()
            .starts_with("label,node_count,linf,l2w,max_peclet,min_step,max_step\n"));
    }
}
