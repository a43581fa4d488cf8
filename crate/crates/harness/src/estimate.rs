//! Per-agent smoothness reports by both estimators.

use decentral_core::smoothness::SmoothnessReport;

use crate::config::Config;
use crate::data;
use crate::error::{HarnessError, Result};
use crate::output::Output;

pub struct EstimateRow {
    pub scheme: String,
    pub exact: SmoothnessReport<f64>,
    pub grad_diff: SmoothnessReport<f64>,
}

/// `[estimate] radius, trials, eps`. The grad-diff estimator reuses the exact
/// `μ_i`, since it only bounds `L_i`.
pub fn run_estimate(cfg: &Config, out: &Output) -> Result<Vec<EstimateRow>> {
    let radius = cfg.number_or("estimate", "radius", 1.0)?;
    let trials = cfg.count_or("estimate", "trials", 10_000)?;
    let eps = cfg.number_or("estimate", "eps", 1e-6)?;
    let loaded = data::load(cfg)?;
    let mut rows = Vec::new();
    for scheme in data::schemes(cfg, out.seed)? {
        let parts = scheme.parts(&loaded.data)?;
        let locals = data::local_objectives(&loaded, &parts)?;
        let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
        let exact = SmoothnessReport::exact(&locals, &sizes).map_err(HarnessError::core("exact smoothness"))?;
        let grad_diff = SmoothnessReport::grad_diff(&locals, &sizes, exact.per_agent_mu.clone(), radius, trials, eps, out.seed)
            .map_err(HarnessError::core("grad-diff smoothness"))?;
        let mut csv = exact.to_csv();
        csv.extend(grad_diff.to_csv().lines().skip(1).map(|l| format!("{l}\n")));
        out.write(&format!("smoothness_{}.csv", scheme.name()), &out.stamp(&csv))?;
        rows.push(EstimateRow { scheme: scheme.name().into(), exact, grad_diff });
    }
    let mut summary = String::from("scheme,agents,aggregate_l_exact,aggregate_l_grad_diff\n");
    for r in &rows {
        summary.push_str(&format!("{},{},{:e},{:e}\n", r.scheme, r.exact.per_agent_l.len(), r.exact.aggregate_l, r.grad_diff.aggregate_l));
    }
    out.write("estimate_summary.csv", &out.stamp(&summary))?;
    Ok(rows)
}
