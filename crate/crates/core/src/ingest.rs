//! LIBSVM text datasets and their partition across agents.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::problem::{CsrMatrix, LogisticObjective};
use crate::scalar::Scalar;

/// One labelled sparse sample. Indices are 1-based, as in the file.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample<T> {
    pub label: i8,
    pub indices: Vec<usize>,
    pub values: Vec<T>,
}

impl<T: Scalar> Sample<T> {
    pub fn norm_sq(&self) -> T {
        self.values.iter().map(|&v| v * v).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    /// Largest eigenvalue of `a aᵀ` by power iteration on the sparse outer
    /// product. It has rank one, so this equals `‖a‖²`; the ordering check in
    /// the tests relies on the two being computed independently.
    pub fn outer_max_eigenvalue(&self) -> T {
        if self.values.is_empty() {
            return T::zero();
        }
        // start from the support indicator; fall back to `a` when orthogonal
        let mut v: Vec<T> = vec![T::one(); self.values.len()];
        let mut lambda = T::zero();
        for _ in 0..3 {
            let at_v: T = self.values.iter().zip(&v).map(|(&a, &x)| a * x).sum();
            if at_v == T::zero() {
                v = self.values.clone();
                continue;
            }
            let w: Vec<T> = self.values.iter().map(|&a| a * at_v).collect();
            let nv: T = v.iter().map(|&x| x * x).sum::<T>().sqrt();
            let nw: T = w.iter().map(|&x| x * x).sum::<T>().sqrt();
            lambda = nw / nv;
            v = w;
        }
        lambda
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    pub samples: Vec<Sample<T>>,
    /// Largest feature index seen in the file.
    pub dim: usize,
}

fn parse_label(tok: &str, line: usize) -> Result<i8> {
    match tok {
        "+1" | "1" | "+1.0" | "1.0" => Ok(1),
        "-1" | "\u{2212}1" | "-1.0" => Ok(-1),
        _ => Err(Error::Parse { line, msg: format!("label must be +1 or -1, got '{tok}'") }),
    }
}

pub fn parse_libsvm<T: Scalar>(text: &str) -> Result<Dataset<T>> {
    let mut samples = Vec::new();
    let mut dim = 0;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        let label = parse_label(toks.next().unwrap_or(""), line)?;
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for tok in toks {
            let (i, v) = tok
                .split_once(':')
                .ok_or_else(|| Error::Parse { line, msg: format!("expected idx:val, got '{tok}'") })?;
            let idx: usize = i
                .parse()
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::Parse { line, msg: format!("bad feature index '{i}'") })?;
            let val: f64 = v.parse().map_err(|_| Error::Parse { line, msg: format!("bad feature value '{v}'") })?;
            if indices.last().is_some_and(|&last| idx <= last) {
                return Err(Error::Parse { line, msg: format!("feature index {idx} not increasing") });
            }
            indices.push(idx);
            values.push(T::c(val));
            dim = dim.max(idx);
        }
        samples.push(Sample { label, indices, values });
    }
    Ok(Dataset { samples, dim })
}

pub fn serialize<T: Scalar>(samples: &[Sample<T>]) -> String {
    let mut out = String::new();
    for s in samples {
        out.push_str(if s.label > 0 { "+1" } else { "-1" });
        for (&i, &v) in s.indices.iter().zip(&s.values) {
            // `{}` on f64 prints the shortest string that reparses exactly
            let _ = write!(out, " {i}:{}", v.to_f64_lossy());
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum PartitionSpec {
    ByLabel { n: usize },
    ByFeatureNorm { n: usize },
    ByMaxEigenvalue { n: usize },
    Dirichlet { alpha: f64, n: usize, seed: u64 },
    Uniform { n: usize, seed: u64 },
}

impl PartitionSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ByLabel { .. } => "by_label",
            Self::ByFeatureNorm { .. } => "by_feature_norm",
            Self::ByMaxEigenvalue { .. } => "by_max_eigenvalue",
            Self::Dirichlet { .. } => "dirichlet",
            Self::Uniform { .. } => "uniform",
        }
    }
}

/// Contiguous split of `order` into `n` nearly equal runs, smaller keys first.
fn split_sorted(order: Vec<usize>, n: usize) -> Vec<Vec<usize>> {
    let total = order.len();
    (0..n).map(|a| order[a * total / n..(a + 1) * total / n].to_vec()).collect()
}

/// Keys rounded to 12 significant digits, so values that agree up to
/// rounding noise count as ties.
fn quantize(k: f64) -> f64 {
    if k == 0.0 {
        // also folds -0.0, which an empty sum produces
        return 0.0;
    }
    if !k.is_finite() {
        return k;
    }
    let scale = 10f64.powi(11 - k.abs().log10().floor() as i32);
    (k * scale).round() / scale
}

fn sorted_by_key<T: Scalar>(keys: Vec<T>) -> Vec<usize> {
    let keys: Vec<f64> = keys.into_iter().map(|k| quantize(k.to_f64_lossy())).collect();
    let mut order: Vec<usize> = (0..keys.len()).collect();
    // stable: ties keep sample order
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    order
}

fn check_agents(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Config("partition needs at least one agent".into()));
    }
    Ok(())
}

/// Splits sample indices into disjoint parts, one per agent.
pub fn partition<T: Scalar>(samples: &[Sample<T>], spec: &PartitionSpec) -> Result<Vec<Vec<usize>>> {
    if samples.is_empty() {
        return Err(Error::Config("cannot partition an empty dataset".into()));
    }
    match *spec {
        PartitionSpec::ByLabel { n } => {
            // +1 first, then -1
            let mut groups: BTreeMap<i8, Vec<usize>> = BTreeMap::new();
            for (j, s) in samples.iter().enumerate() {
                groups.entry(-s.label).or_default().push(j);
            }
            if groups.len() != n {
                return Err(Error::Config(format!("by_label with {n} agents but {} distinct labels", groups.len())));
            }
            Ok(groups.into_values().collect())
        }
        PartitionSpec::ByFeatureNorm { n } => {
            check_agents(n)?;
            Ok(split_sorted(sorted_by_key(samples.iter().map(|s| s.norm()).collect()), n))
        }
        PartitionSpec::ByMaxEigenvalue { n } => {
            check_agents(n)?;
            Ok(split_sorted(sorted_by_key(samples.iter().map(|s| s.outer_max_eigenvalue()).collect()), n))
        }
        PartitionSpec::Uniform { n, seed } => {
            check_agents(n)?;
            let mut order: Vec<usize> = (0..samples.len()).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let mut parts = split_sorted(order, n);
            parts.iter_mut().for_each(|p| p.sort_unstable());
            Ok(parts)
        }
        PartitionSpec::Dirichlet { alpha, n, seed } => {
            check_agents(n)?;
            if !(alpha > 0.0) {
                return Err(Error::Config(format!("dirichlet alpha must be positive, got {alpha}")));
            }
            let gamma = Gamma::new(alpha, 1.0).map_err(|e| Error::Config(e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut by_class: BTreeMap<i8, Vec<usize>> = BTreeMap::new();
            for (j, s) in samples.iter().enumerate() {
                by_class.entry(-s.label).or_default().push(j);
            }
            let mut parts = vec![Vec::new(); n];
            for (_, mut members) in by_class {
                let mut w: Vec<f64> = (0..n).map(|_| gamma.sample(&mut rng)).collect();
                let sum: f64 = w.iter().sum();
                if !(sum > 0.0) {
                    // every draw underflowed: give the class to one agent
                    w = vec![0.0; n];
                    w[members.len() % n] = 1.0;
                } else {
                    w.iter_mut().for_each(|v| *v /= sum);
                }
                members.shuffle(&mut rng);
                let total = members.len();
                let mut start = 0;
                let mut acc = 0.0;
                for (a, &wa) in w.iter().enumerate() {
                    acc += wa;
                    let end = if a + 1 == n { total } else { ((acc * total as f64).round() as usize).min(total) };
                    parts[a].extend_from_slice(&members[start..end.max(start)]);
                    start = end.max(start);
                }
            }
            parts.iter_mut().for_each(|p| p.sort_unstable());
            Ok(parts)
        }
    }
}

/// CSV `sample_index,agent_id`, one row per sample in index order.
pub fn manifest_csv(parts: &[Vec<usize>]) -> String {
    let mut rows: Vec<(usize, usize)> = parts.iter().enumerate().flat_map(|(a, p)| p.iter().map(move |&j| (j, a))).collect();
    rows.sort_unstable();
    let mut out = String::from("sample_index,agent_id\n");
    for (j, a) in rows {
        let _ = writeln!(out, "{j},{a}");
    }
    out
}

/// Logistic loss over the selected samples in a `dim`-dimensional model.
pub fn logistic_objective<T: Scalar>(samples: &[Sample<T>], select: &[usize], dim: usize, reg: T) -> Result<LogisticObjective<T>> {
    let rows: Vec<Vec<(usize, T)>> = select
        .iter()
        .map(|&j| samples[j].indices.iter().zip(&samples[j].values).map(|(&i, &v)| (i - 1, v)).collect())
        .collect();
    let labels = select.iter().map(|&j| T::c(samples[j].label as f64)).collect();
    LogisticObjective::new(CsrMatrix::from_rows(dim, &rows)?, labels, reg)
}

/// Per-agent label histograms (fractions over the sorted label set). Empty
/// parts are skipped.
pub fn label_histograms<T: Scalar>(samples: &[Sample<T>], parts: &[Vec<usize>]) -> Vec<Vec<f64>> {
    let labels: Vec<i8> = {
        let mut l: Vec<i8> = samples.iter().map(|s| s.label).collect();
        l.sort_unstable();
        l.dedup();
        l
    };
    parts
        .iter()
        .filter(|p| !p.is_empty())
        .map(|p| {
            labels
                .iter()
                .map(|&lab| p.iter().filter(|&&j| samples[j].label == lab).count() as f64 / p.len() as f64)
                .collect()
        })
        .collect()
}

/// Mean pairwise total-variation distance between agent label histograms.
pub fn mean_label_tv<T: Scalar>(samples: &[Sample<T>], parts: &[Vec<usize>]) -> f64 {
    let h = label_histograms(samples, parts);
    let mut sum = 0.0;
    let mut count = 0;
    for a in 0..h.len() {
        for b in a + 1..h.len() {
            sum += 0.5 * h[a].iter().zip(&h[b]).map(|(x, y)| (x - y).abs()).sum::<f64>();
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}
