//! Dataset loading and partition specs shared by `train` and `estimate-l`.

use std::path::PathBuf;

use decentral_core::ingest::{logistic_objective, parse_libsvm, partition, Dataset, PartitionSpec};
use decentral_core::problem::{Objective, ProblemInstance, QuadraticObjective};
use decentral_core::smoothness::SmoothnessReport;

use crate::config::{parse_number, Config};
use crate::error::{HarnessError, Result};

pub struct LoadedData {
    pub path: PathBuf,
    pub data: Dataset<f64>,
    pub reg: f64,
}

pub fn load(cfg: &Config) -> Result<LoadedData> {
    let path = cfg.path("data", "path")?;
    let text = std::fs::read_to_string(&path).map_err(HarnessError::io(&path))?;
    let mut data = parse_libsvm::<f64>(&text).map_err(HarnessError::core(path.display().to_string()))?;
    if let Some(d) = cfg.number("data", "dim")? {
        let d = d as usize;
        if d < data.dim {
            return Err(HarnessError::Config(format!("[data] dim {d} is below the largest index {}", data.dim)));
        }
        data.dim = d;
    }
    let reg = cfg.number_or("data", "reg", 1.0 / data.samples.len().max(1) as f64)?;
    Ok(LoadedData { path, data, reg })
}

/// A partition scheme by name; `none` keeps the whole dataset on one agent.
#[derive(Clone, Debug)]
pub enum Scheme {
    Whole,
    Split(PartitionSpec),
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Whole => "none",
            Scheme::Split(s) => s.name(),
        }
    }

    pub fn parts(&self, data: &Dataset<f64>) -> Result<Vec<Vec<usize>>> {
        match self {
            Scheme::Whole => Ok(vec![(0..data.samples.len()).collect()]),
            Scheme::Split(s) => partition(&data.samples, s).map_err(HarnessError::core(format!("partition {}", s.name()))),
        }
    }
}

/// `[partition] schemes`, `agents`, `alpha`. Random schemes use `seed`.
pub fn schemes(cfg: &Config, seed: u64) -> Result<Vec<Scheme>> {
    let n = cfg.count_or("partition", "agents", 2)?;
    let alpha = cfg.number_or("partition", "alpha", 0.5)?;
    let names = cfg.list("partition", "schemes").unwrap_or_else(|| vec!["by_label".into()]);
    names
        .iter()
        .map(|s| {
            Ok(match s.as_str() {
                "none" => Scheme::Whole,
                "by_label" => Scheme::Split(PartitionSpec::ByLabel { n }),
                "by_feature_norm" => Scheme::Split(PartitionSpec::ByFeatureNorm { n }),
                "by_max_eigenvalue" => Scheme::Split(PartitionSpec::ByMaxEigenvalue { n }),
                "dirichlet" => Scheme::Split(PartitionSpec::Dirichlet { alpha, n, seed }),
                "uniform" => Scheme::Split(PartitionSpec::Uniform { n, seed }),
                other => return Err(HarnessError::Config(format!("unknown partition scheme '{other}'"))),
            })
        })
        .collect()
}

pub fn local_objectives(d: &LoadedData, parts: &[Vec<usize>]) -> Result<Vec<Objective<f64>>> {
    parts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if p.is_empty() {
                return Err(HarnessError::Config(format!("agent {i} received no samples")));
            }
            logistic_objective(&d.data.samples, p, d.data.dim, d.reg).map(Objective::from).map_err(HarnessError::core(format!("agent {i}")))
        })
        .collect()
}

/// Instance with exact per-agent constants.
pub fn exact_instance(locals: Vec<Objective<f64>>, sizes: Vec<usize>) -> Result<(ProblemInstance<f64>, SmoothnessReport<f64>)> {
    let rep = SmoothnessReport::exact(&locals, &sizes).map_err(HarnessError::core("exact smoothness"))?;
    let inst = ProblemInstance::new(locals, sizes, rep.per_agent_mu.clone(), rep.per_agent_l.clone()).map_err(HarnessError::core("instance"))?;
    Ok((inst, rep))
}

/// `[quadratic] curvatures = a:b, c:d` gives one diagonal agent per entry;
/// optional `centers` shifts each agent's minimizer to `c·𝟙`.
pub fn quadratic_locals(cfg: &Config) -> Result<Vec<Objective<f64>>> {
    let diags = cfg
        .list("quadratic", "curvatures")
        .ok_or_else(|| HarnessError::Config("[quadratic] needs curvatures".into()))?
        .iter()
        .map(|a| a.split(':').map(parse_number).collect::<Result<Vec<f64>>>())
        .collect::<Result<Vec<_>>>()?;
    let centers = cfg.numbers("quadratic", "centers")?.unwrap_or_else(|| vec![0.0; diags.len()]);
    if centers.len() != diags.len() || diags.iter().any(|d| d.len() != diags[0].len()) {
        return Err(HarnessError::Config("[quadratic] curvatures and centers disagree in shape".into()));
    }
    diags
        .iter()
        .zip(&centers)
        .map(|(d, &c)| {
            QuadraticObjective::diagonal(d, &vec![c; d.len()]).map(Objective::from).map_err(HarnessError::core("quadratic agent"))
        })
        .collect()
}
