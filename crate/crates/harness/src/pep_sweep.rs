//! PEP sweeps: ratio tables over agent classes and worst-case curves over K.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use decentral_core::pep::{assemble_sdp, AgentClass, PepObjective, PepProblem};
use decentral_core::sdp::{certify, sdpa, SolveOptions, SolveStatus};

use crate::config::{parse_number, Config};
use crate::error::{HarnessError, Result};
use crate::output::Output;

/// Tolerance the certificate is checked at.
pub const CERT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Pairs,
    Agents,
    Curve,
}

#[derive(Clone, Debug)]
pub struct SweepSettings {
    pub mode: Mode,
    pub mu: f64,
    pub k: usize,
    pub objective: PepObjective,
    pub radius0: f64,
    pub radius_stars: Vec<f64>,
    /// Switch used for the Algorithm 1 side of a ratio.
    pub switch: Option<usize>,
    pub pairs: Vec<(f64, f64)>,
    pub agents: Vec<usize>,
    pub low_l: f64,
    pub high_l: f64,
    /// Algorithm 1 schedules drawn in curve mode, next to GD.
    pub switches: Vec<Option<usize>>,
    pub opts: SolveOptions<f64>,
}

fn parse_switch(s: &str) -> Result<Option<usize>> {
    match s.trim() {
        "none" | "never" => Ok(None),
        v => v.parse().map(Some).map_err(|_| HarnessError::Config(format!("switch '{v}' is neither a count nor 'none'"))),
    }
}

fn parse_objective(s: &str) -> Result<PepObjective> {
    match s {
        "mean_sq_distance" => Ok(PepObjective::MeanSqDistance),
        "function_gap" => Ok(PepObjective::FunctionGap),
        other => Err(HarnessError::Config(format!("unknown objective '{other}'"))),
    }
}

pub fn objective_name(o: PepObjective) -> &'static str {
    match o {
        PepObjective::MeanSqDistance => "mean_sq_distance",
        PepObjective::FunctionGap => "function_gap",
    }
}

fn switch_name(s: Option<usize>) -> String {
    s.map_or_else(|| "none".to_string(), |v| v.to_string())
}

impl SweepSettings {
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let sec = "pep";
        if !cfg.has_section(sec) {
            return Err(HarnessError::Config("missing [pep] section".into()));
        }
        let mode = match cfg.str_or(sec, "mode", "pairs") {
            "pairs" => Mode::Pairs,
            "agents" => Mode::Agents,
            "curve" => Mode::Curve,
            other => return Err(HarnessError::Config(format!("unknown pep mode '{other}'"))),
        };
        let radius0 = cfg.number_or(sec, "radius0", 1.0)?;
        let pairs = cfg
            .list(sec, "pairs")
            .unwrap_or_default()
            .iter()
            .map(|p| {
                let (a, b) = p.split_once(':').ok_or_else(|| HarnessError::Config(format!("pair '{p}' is not L1:L2")))?;
                Ok((parse_number(a)?, parse_number(b)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let switches = cfg.list(sec, "switches").unwrap_or_default().iter().map(|s| parse_switch(s)).collect::<Result<Vec<_>>>()?;
        let s = Self {
            mode,
            mu: cfg.number_or(sec, "mu", 0.1)?,
            k: cfg.count_or(sec, "k", 5)?,
            objective: parse_objective(cfg.str_or(sec, "objective", "mean_sq_distance"))?,
            radius0,
            radius_stars: cfg.numbers(sec, "radius_star")?.unwrap_or_else(|| vec![radius0]),
            switch: parse_switch(cfg.str_or(sec, "switch", "none"))?,
            pairs,
            agents: cfg.counts(sec, "agents")?.unwrap_or_default(),
            low_l: cfg.number_or(sec, "low_l", 1.0 / 3.0)?,
            high_l: cfg.number_or(sec, "high_l", 3.0)?,
            switches,
            opts: SolveOptions {
                tol_gap: cfg.number_or(sec, "tol", 1e-8)?,
                tol_feas: cfg.number_or(sec, "tol", 1e-8)?,
                max_iters: cfg.count_or(sec, "max_iters", 100)?,
            },
        };
        match s.mode {
            Mode::Pairs if s.pairs.is_empty() => Err(HarnessError::Config("pairs mode needs [pep] pairs".into())),
            Mode::Agents if s.agents.is_empty() => Err(HarnessError::Config("agents mode needs [pep] agents".into())),
            _ if s.k == 0 => Err(HarnessError::Config("[pep] k must be at least 1".into())),
            _ => Ok(s),
        }
    }

    /// `(label, classes)` per sweep point.
    pub fn points(&self) -> Vec<(String, Vec<f64>)> {
        match self.mode {
            Mode::Pairs | Mode::Curve if !self.pairs.is_empty() => {
                self.pairs.iter().map(|&(a, b)| (format!("L={}:{}", short(a), short(b)), vec![a, b])).collect()
            }
            Mode::Curve => vec![(format!("L={}:{}", short(self.low_l), short(self.high_l)), vec![self.low_l, self.high_l])],
            Mode::Agents => self
                .agents
                .iter()
                .map(|&n| (format!("N={n}"), (0..n).map(|i| if i < n / 2 { self.low_l } else { self.high_l }).collect()))
                .collect(),
            Mode::Pairs => Vec::new(),
        }
    }

    pub fn problem(&self, ells: &[f64], k: usize, radius_star: f64) -> PepProblem<f64> {
        let classes = ells.iter().map(|&l| AgentClass { mu: self.mu, l }).collect();
        PepProblem::new(k, classes, self.radius0, self.objective).with_radius_star(radius_star)
    }
}

fn short(v: f64) -> String {
    let s = format!("{v:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveRecord {
    pub value: f64,
    pub status: Option<SolveStatus>,
    pub duality_gap: f64,
    pub max_violation: f64,
    pub min_eigenvalue: f64,
    pub certified: bool,
    pub iterations: usize,
    pub seconds: f64,
    pub error: Option<String>,
}

impl SolveRecord {
    /// Certified at [`CERT_TOL`] with a usable status.
    pub fn ok(&self) -> bool {
        self.error.is_none() && self.certified && matches!(self.status, Some(SolveStatus::Optimal | SolveStatus::NumericalLimit))
    }

    fn status_name(&self) -> String {
        match (&self.error, self.status) {
            (Some(_), _) => "error".into(),
            (None, Some(s)) => serde_json::to_value(s).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            (None, None) => "none".into(),
        }
    }
}

pub fn solve_pep(problem: &PepProblem<f64>, opts: &SolveOptions<f64>) -> SolveRecord {
    let t = Instant::now();
    let failed = |e: String| SolveRecord {
        value: f64::NAN,
        status: None,
        duality_gap: f64::NAN,
        max_violation: f64::NAN,
        min_eigenvalue: f64::NAN,
        certified: false,
        iterations: 0,
        seconds: t.elapsed().as_secs_f64(),
        error: Some(e),
    };
    let prog = match assemble_sdp(problem) {
        Ok(p) => p,
        Err(e) => return failed(e.to_string()),
    };
    match prog.solve(opts) {
        Err(e) => failed(e.to_string()),
        Ok(sol) => {
            let report = certify(&prog.sdp, &sol, CERT_TOL, CERT_TOL);
            SolveRecord {
                value: sol.primal_value,
                status: Some(sol.status),
                duality_gap: report.duality_gap,
                max_violation: report.max_violation,
                min_eigenvalue: report.min_eigenvalue,
                certified: report.passed,
                iterations: sol.iterations,
                seconds: t.elapsed().as_secs_f64(),
                error: None,
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub point: String,
    pub ells: Vec<f64>,
    pub radius_star: f64,
    pub algorithm1: SolveRecord,
    pub gd: SolveRecord,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveRow {
    pub point: String,
    pub radius_star: f64,
    /// `gd` or the Algorithm 1 switch (`none` for never).
    pub schedule: String,
    pub k: usize,
    pub record: SolveRecord,
}

#[derive(Clone, Debug, Default)]
pub struct SweepReport {
    pub ratios: Vec<RatioRow>,
    pub curves: Vec<CurveRow>,
}

impl SweepReport {
    pub fn failures(&self) -> usize {
        self.ratios.iter().filter(|r| !(r.algorithm1.ok() && r.gd.ok())).count() + self.curves.iter().filter(|c| !c.record.ok()).count()
    }

    pub fn curve(&self, schedule: &str, radius_star: f64) -> Vec<&CurveRow> {
        let mut v: Vec<&CurveRow> = self.curves.iter().filter(|c| c.schedule == schedule && c.radius_star == radius_star).collect();
        v.sort_by_key(|c| c.k);
        v
    }
}

const RECORD_HEADER: &str = "status,value,duality_gap,max_violation,min_eigenvalue,certified,iterations,seconds";

fn record_cols(r: &SolveRecord) -> String {
    format!(
        "{},{:e},{:e},{:e},{:e},{},{},{:.3}",
        r.status_name(),
        r.value,
        r.duality_gap,
        r.max_violation,
        r.min_eigenvalue,
        u8::from(r.certified),
        r.iterations,
        r.seconds
    )
}

pub fn run(settings: &SweepSettings, out: &Output) -> Result<SweepReport> {
    let points = settings.points();
    let mut report = SweepReport::default();
    match settings.mode {
        Mode::Pairs | Mode::Agents => {
            let jobs: Vec<(String, Vec<f64>, f64)> = points
                .iter()
                .flat_map(|(label, ells)| settings.radius_stars.iter().map(move |&r| (label.clone(), ells.clone(), r)))
                .collect();
            report.ratios = jobs
                .into_par_iter()
                .map(|(point, ells, radius_star)| {
                    let a1 = settings.problem(&ells, settings.k, radius_star).with_switch(settings.switch);
                    let gd = a1.centralized();
                    let (algorithm1, gd) = (solve_pep(&a1, &settings.opts), solve_pep(&gd, &settings.opts));
                    let ratio = algorithm1.value / gd.value;
                    RatioRow { point, ells, radius_star, algorithm1, gd, ratio }
                })
                .collect();
            let mut csv = format!(
                "mode,point,n,ells,radius_star,k,objective,switch,ratio,{},{}\n",
                RECORD_HEADER.split(',').map(|c| format!("a1_{c}")).collect::<Vec<_>>().join(","),
                RECORD_HEADER.split(',').map(|c| format!("gd_{c}")).collect::<Vec<_>>().join(",")
            );
            for r in &report.ratios {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{:e},{},{}\n",
                    serde_json::to_value(settings.mode).unwrap().as_str().unwrap(),
                    r.point,
                    r.ells.len(),
                    r.ells.iter().map(|l| short(*l)).collect::<Vec<_>>().join(";"),
                    r.radius_star,
                    settings.k,
                    objective_name(settings.objective),
                    switch_name(settings.switch),
                    r.ratio,
                    record_cols(&r.algorithm1),
                    record_cols(&r.gd)
                ));
            }
            out.write("pep_sweep.csv", &out.stamp(&csv))?;
        }
        Mode::Curve => {
            let mut schedules: Vec<(String, Option<Option<usize>>)> = vec![("gd".into(), None)];
            schedules.extend(settings.switches.iter().map(|&s| (switch_name(s), Some(s))));
            let mut jobs = Vec::new();
            for (label, ells) in &points {
                for &r in &settings.radius_stars {
                    for (name, sched) in &schedules {
                        for k in 1..=settings.k {
                            jobs.push((label.clone(), ells.clone(), r, name.clone(), *sched, k));
                        }
                    }
                }
            }
            report.curves = jobs
                .into_par_iter()
                .map(|(point, ells, radius_star, schedule, sched, k)| {
                    let base = settings.problem(&ells, k, radius_star);
                    let problem = match sched {
                        None => base.centralized(),
                        Some(s) => base.with_switch(s),
                    };
                    CurveRow { point, radius_star, schedule, k, record: solve_pep(&problem, &settings.opts) }
                })
                .collect();
            let mut csv = format!("point,radius_star,objective,schedule,k,{RECORD_HEADER}\n");
            for c in &report.curves {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    c.point,
                    c.radius_star,
                    objective_name(settings.objective),
                    c.schedule,
                    c.k,
                    record_cols(&c.record)
                ));
            }
            out.write("pep_curves.csv", &out.stamp(&csv))?;
        }
    }
    Ok(report)
}

/// Writes the Algorithm 1 and GD programs of every point as SDPA files plus
/// their constraint metadata. Returns the file stems written.
pub fn export(settings: &SweepSettings, out: &Output) -> Result<Vec<String>> {
    let mut stems = Vec::new();
    for (idx, (_, ells)) in settings.points().iter().enumerate() {
        for &r in &settings.radius_stars {
            let a1 = settings.problem(ells, settings.k, r).with_switch(settings.switch);
            for (tag, p) in [("algorithm1", a1.clone()), ("gd", a1.centralized())] {
                let prog = assemble_sdp(&p).map_err(HarnessError::core(format!("point {idx}")))?;
                let stem = format!("point{idx}_r{}_{tag}", short(r));
                out.write(&format!("{stem}.dat-s"), &sdpa::write(&prog.sdp))?;
                out.write(&format!("{stem}.jsonl"), &prog.metadata_jsonl())?;
                stems.push(stem);
            }
        }
    }
    Ok(stems)
}
