//! Logistic and quadratic training runs with iterations-to-threshold.

use rayon::prelude::*;

use decentral_core::algorithms::{run, Method, MethodConfig, Threshold};
use decentral_core::ingest::{manifest_csv, mean_label_tv};
use decentral_core::linalg::{norm2, Mat};
use decentral_core::problem::{Oracle, ProblemInstance};
use decentral_core::smoothness::SmoothnessReport;

use crate::config::Config;
use crate::data::{self, Scheme};
use crate::error::{HarnessError, Result};
use crate::output::Output;

#[derive(Clone, Debug)]
pub struct TrainSettings {
    pub methods: Vec<Method>,
    pub steps: usize,
    /// Loss gap counted as reached.
    pub gap_tol: f64,
    pub switch: Threshold<f64>,
    pub participation: f64,
    /// Self weight `θ` in `W = θI + (1−θ)(1/N)𝟙𝟙ᵀ`.
    pub laziness: f64,
    pub reference_iters: usize,
    pub reference_tol: f64,
}

impl TrainSettings {
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let sec = "train";
        let methods = cfg
            .list(sec, "methods")
            .unwrap_or_else(|| vec!["gd".into(), "algorithm1".into(), "dgd".into()])
            .iter()
            .map(|m| Method::parse(m).map_err(|e| HarnessError::Config(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let switch = match (cfg.number(sec, "epsilon")?, cfg.number(sec, "epsilon_rel")?) {
            (Some(_), Some(_)) => return Err(HarnessError::Config("[train] set epsilon or epsilon_rel, not both".into())),
            (Some(0.0), None) => Threshold::Never,
            (Some(e), None) => Threshold::Absolute(e),
            (None, Some(c)) => Threshold::Relative(c),
            (None, None) => Threshold::Relative(1e-3),
        };
        let participation = cfg.number_or(sec, "participation", 1.0)?;
        if !(participation > 0.0 && participation <= 1.0) {
            return Err(HarnessError::Config(format!("[train] participation {participation} outside (0, 1]")));
        }
        Ok(Self {
            methods,
            steps: cfg.count_or(sec, "steps", 2000)?,
            gap_tol: cfg.number_or(sec, "threshold", 1e-4)?,
            switch,
            participation,
            laziness: cfg.number_or(sec, "laziness", 0.0)?,
            reference_iters: cfg.count_or(sec, "reference_iters", 100_000)?,
            reference_tol: cfg.number_or(sec, "reference_tol", 1e-10)?,
        })
    }
}

/// GD at `α = 1/L` on the global objective until `‖∇f‖ ≤ tol`.
pub fn reference_optimum(inst: &ProblemInstance<f64>, max_iters: usize, tol: f64) -> Result<(f64, usize)> {
    let f = inst.global_objective();
    let lbar = decentral_core::smoothness::aggregate_l(inst.ells(), inst.sizes()).map_err(HarnessError::core("aggregate L"))?;
    let mut x = vec![0.0; inst.dim()];
    let mut used = 0;
    for k in 0..max_iters {
        let g = f.eval_grad(&x).map_err(HarnessError::core("reference"))?;
        used = k;
        if norm2(&g) <= tol {
            break;
        }
        x.iter_mut().zip(&g).for_each(|(xi, gi)| *xi -= gi / lbar);
        used = k + 1;
    }
    Ok((f.eval_loss(&x).map_err(HarnessError::core("reference"))?, used))
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub scheme: String,
    pub method: Method,
    pub sizes: Vec<usize>,
    pub ells: Vec<f64>,
    pub aggregate_l: f64,
    pub label_tv: Option<f64>,
    pub f_star: f64,
    pub reference_iters: usize,
    /// First iteration with `f − f* ≤ gap_tol`.
    pub iterations_to_tol: Option<usize>,
    pub switch_iteration: Option<usize>,
    pub final_gap: f64,
    pub gaps: Vec<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct TrainReport {
    pub runs: Vec<RunSummary>,
}

impl TrainReport {
    pub fn get(&self, scheme: &str, method: Method) -> Option<&RunSummary> {
        self.runs.iter().find(|r| r.scheme == scheme && r.method == method)
    }
}

struct Prepared {
    scheme: String,
    inst: ProblemInstance<f64>,
    rep: SmoothnessReport<f64>,
    label_tv: Option<f64>,
    manifest: Option<String>,
}

fn prepare(cfg: &Config, seed: u64) -> Result<Vec<Prepared>> {
    if cfg.has_section("quadratic") {
        let locals = data::quadratic_locals(cfg)?;
        let sizes = vec![1; locals.len()];
        let (inst, rep) = data::exact_instance(locals, sizes)?;
        return Ok(vec![Prepared { scheme: "given".into(), inst, rep, label_tv: None, manifest: None }]);
    }
    let loaded = data::load(cfg)?;
    data::schemes(cfg, seed)?
        .into_iter()
        .map(|s: Scheme| {
            let parts = s.parts(&loaded.data)?;
            let locals = data::local_objectives(&loaded, &parts)?;
            let (inst, rep) = data::exact_instance(locals, parts.iter().map(Vec::len).collect())?;
            Ok(Prepared {
                scheme: s.name().into(),
                inst,
                rep,
                label_tv: Some(mean_label_tv(&loaded.data.samples, &parts)),
                manifest: Some(manifest_csv(&parts)),
            })
        })
        .collect()
}

fn config_for(s: &TrainSettings, method: Method, n: usize, seed: u64) -> MethodConfig<f64> {
    let mut c = MethodConfig::new(method, s.steps).without_iterates().with_threshold(s.switch);
    if s.participation < 1.0 {
        c = c.with_participation(s.participation, seed);
    }
    if s.laziness != 0.0 && matches!(method, Method::Dgd | Method::GradientTracking) {
        let off = (1.0 - s.laziness) / n as f64;
        c = c.with_mixing(Mat::from_fn(n, n, |i, j| if i == j { s.laziness + off } else { off }));
    }
    c
}

pub fn run_train(cfg: &Config, out: &Output) -> Result<TrainReport> {
    let settings = TrainSettings::from_config(cfg)?;
    let prepared = prepare(cfg, out.seed)?;
    let refs = prepared
        .par_iter()
        .map(|p| reference_optimum(&p.inst, settings.reference_iters, settings.reference_tol))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, Method)> = (0..prepared.len()).flat_map(|i| settings.methods.iter().map(move |&m| (i, m))).collect();
    let runs = jobs
        .par_iter()
        .map(|&(i, method)| {
            let p = &prepared[i];
            let (f_star, used) = refs[i];
            let trace = run(&p.inst, &config_for(&settings, method, p.inst.agents(), out.seed))
                .map_err(HarnessError::core(format!("{} {}", p.scheme, method.name())))?;
            let gaps: Vec<f64> = trace.losses.iter().map(|l| l - f_star).collect();
            let summary = RunSummary {
                scheme: p.scheme.clone(),
                method,
                sizes: p.inst.sizes().to_vec(),
                ells: p.rep.per_agent_l.clone(),
                aggregate_l: p.rep.aggregate_l,
                label_tv: p.label_tv,
                f_star,
                reference_iters: used,
                iterations_to_tol: trace.iterations_to(f_star, settings.gap_tol),
                switch_iteration: trace.switch_iteration,
                final_gap: *gaps.last().unwrap_or(&f64::NAN),
                gaps,
            };
            Ok((summary, trace.to_csv()))
        })
        .collect::<Result<Vec<_>>>()?;

    for p in &prepared {
        if let Some(m) = &p.manifest {
            out.write(&format!("manifest_{}.csv", p.scheme), &out.stamp(m))?;
        }
        out.write(&format!("smoothness_{}.csv", p.scheme), &out.stamp(&p.rep.to_csv()))?;
    }
    let mut summary = String::from(
        "scheme,method,agents,sizes,ells,aggregate_l,label_tv,f_star,reference_iters,threshold,iterations_to_threshold,switch_iteration,final_gap\n",
    );
    let join = |v: Vec<String>| v.join(";");
    for (r, csv) in &runs {
        out.write(&format!("trace_{}_{}.csv", r.scheme, r.method.name()), &out.stamp(csv))?;
        summary.push_str(&format!(
            "{},{},{},{},{},{:e},{},{:e},{},{:e},{},{},{:e}\n",
            r.scheme,
            r.method.name(),
            r.sizes.len(),
            join(r.sizes.iter().map(|s| s.to_string()).collect()),
            join(r.ells.iter().map(|l| format!("{l:e}")).collect()),
            r.aggregate_l,
            r.label_tv.map(|t| format!("{t:.6}")).unwrap_or_default(),
            r.f_star,
            r.reference_iters,
            settings.gap_tol,
            r.iterations_to_tol.map(|k| k.to_string()).unwrap_or_default(),
            r.switch_iteration.map(|k| k.to_string()).unwrap_or_default(),
            r.final_gap
        ));
    }
    out.write("train_summary.csv", &out.stamp(&summary))?;
    Ok(TrainReport { runs: runs.into_iter().map(|(r, _)| r).collect() })
}
