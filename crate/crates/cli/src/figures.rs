//! Figure data pipelines: each figure becomes one or more CSV tables, with
//! optional SVG charts of the same data.

use std::fmt::Write;
use std::str::FromStr;

use anyhow::{bail, Result};
use hubo_gas::analysis::{
    constructed_resources, family_instance, five_four_instance, formulate, gate_counts_closed_form,
    qubit_counts, term_count, tgate_totals, StrategyParams,
};
use hubo_gas::circuit::Decomposition;
use hubo_gas::gas::{cdf_at, median_rotations, normalize_objective, success_cdf, GasConfig, GasProblem, GasTrace};
use hubo_gas::problems::{GcpInstance, Strategy};
use hubo_gas::Error;
use rayon::prelude::*;

use crate::svg::{Chart, Series, Style};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Qubits,
    Terms,
    Tgates,
    TgatesTotal,
    Convergence,
    Cdf,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Qubits => "qubits",
            FigureId::Terms => "terms",
            FigureId::Tgates => "tgates",
            FigureId::TgatesTotal => "tgates_total",
            FigureId::Convergence => "convergence",
            FigureId::Cdf => "cdf",
        }
    }

    fn is_sweep(self) -> bool {
        matches!(self, FigureId::Qubits | FigureId::Terms | FigureId::Tgates | FigureId::TgatesTotal)
    }
}

impl FromStr for FigureId {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "qubits" => FigureId::Qubits,
            "terms" => FigureId::Terms,
            "tgates" => FigureId::Tgates,
            "tgates_total" | "tgates-total" => FigureId::TgatesTotal,
            "convergence" => FigureId::Convergence,
            "cdf" => FigureId::Cdf,
            _ => bail!("unknown figure `{s}` (qubits, terms, tgates, tgates_total, convergence, cdf)"),
        })
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub figure: FigureId,
    /// Vertex counts of the sweep family (sweep figures).
    pub sizes: Vec<usize>,
    pub strategies: Vec<Strategy>,
    /// Instance for the search figures.
    pub instance: GcpInstance,
    pub trials: usize,
    pub gas: GasConfig,
    /// Budget constant: a run counts as fast when it converges within `⌈√N⌉·C`.
    pub budget_c: u64,
}

pub const DEFAULT_SIZES: [usize; 4] = [8, 16, 24, 32];
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_BUDGET_C: u64 = 4;

impl ExperimentSpec {
    pub fn new(figure: FigureId) -> Self {
        let strategies = if figure.is_sweep() {
            Strategy::ALL.to_vec()
        } else {
            vec![Strategy::Qubo, Strategy::Or, Strategy::Pf]
        };
        Self {
            figure,
            sizes: DEFAULT_SIZES.to_vec(),
            strategies,
            instance: five_four_instance(),
            trials: DEFAULT_TRIALS,
            gas: GasConfig::default(),
            budget_c: DEFAULT_BUDGET_C,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() {
            bail!("no strategies selected");
        }
        if self.figure.is_sweep() {
            if self.sizes.is_empty() {
                bail!("figure {} needs at least one V", self.figure.name());
            }
            for &v in &self.sizes {
                family_instance(v)?;
            }
        } else if self.trials == 0 {
            bail!("figure {} needs trials > 0", self.figure.name());
        }
        Ok(())
    }
}

/// One generated file.
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

pub fn generate(spec: &ExperimentSpec, svg: bool) -> Result<Vec<Artifact>> {
    spec.validate()?;
    let (tables, charts) = match spec.figure {
        FigureId::Qubits => qubits(spec),
        FigureId::Terms => terms(spec)?,
        FigureId::Tgates => tgates(spec, false)?,
        FigureId::TgatesTotal => tgates(spec, true)?,
        FigureId::Convergence | FigureId::Cdf => search(spec)?,
    };
    let mut out: Vec<Artifact> = tables
        .into_iter()
        .map(|(name, contents)| Artifact { name, contents })
        .collect();
    if svg {
        out.extend(charts.into_iter().map(|(name, c)| Artifact { name, contents: c.render() }));
    }
    Ok(out)
}

type Outputs = (Vec<(String, String)>, Vec<(String, Chart)>);

fn family_params(spec: &ExperimentSpec) -> Vec<(usize, GcpInstance, StrategyParams)> {
    spec.sizes
        .iter()
        .map(|&v| {
            let g = family_instance(v).expect("validated");
            let p = StrategyParams::from_instance(&g);
            (v, g, p)
        })
        .collect()
}

fn color_of(s: Strategy) -> usize {
    Strategy::ALL.iter().position(|&t| t == s).unwrap_or(0)
}

/// Leading-order qubit count: `VI`, `V log2 I` or `V (log2 I + 1)`.
fn qubit_bound(p: &StrategyParams, s: Strategy) -> f64 {
    let (v, lg) = (p.v as f64, (p.i as f64).log2());
    match s {
        Strategy::Qubo => v * p.i as f64,
        Strategy::Or => v * (lg + 1.0),
        _ => v * lg,
    }
}

fn qubits(spec: &ExperimentSpec) -> Outputs {
    let mut csv = String::from("V,I,E,strategy,n,m,m_log2_max,total,bound\n");
    let mut chart = Chart::new("Qubits", "V", "n + m");
    for (v, _, p) in family_params(spec) {
        for &s in &spec.strategies {
            let q = qubit_counts(&p, s);
            let bound = qubit_bound(&p, s);
            let _ = writeln!(csv, "{v},{},{},{s},{},{},{},{},{bound:.4}", p.i, p.e, q.n, q.m, q.m_log2_max, q.total());
        }
    }
    for &s in &spec.strategies {
        let fam = family_params(spec);
        let actual = fam.iter().map(|(v, _, p)| (*v as f64, qubit_counts(p, s).total() as f64)).collect();
        let bound = fam.iter().map(|(v, _, p)| (*v as f64, qubit_bound(p, s))).collect();
        chart.series.push(Series { name: s.to_string(), points: actual, style: Style::Markers, color: color_of(s) });
        chart.series.push(Series { name: format!("{s} bound"), points: bound, style: Style::Line, color: color_of(s) });
    }
    (vec![("qubits.csv".into(), csv)], vec![("qubits.svg".into(), chart)])
}

/// Sweep points in parallel, rows back in (V, strategy) order.
fn sweep<T: Send>(
    spec: &ExperimentSpec,
    f: impl Fn(&GcpInstance, &StrategyParams, Strategy) -> Result<T> + Sync,
) -> Result<Vec<(usize, StrategyParams, Strategy, T)>> {
    let fam = family_params(spec);
    let jobs: Vec<_> = fam
        .iter()
        .flat_map(|(v, g, p)| spec.strategies.iter().map(move |&s| (*v, g, p, s)))
        .collect();
    jobs.into_par_iter()
        .map(|(v, g, p, s)| Ok((v, p.clone(), s, f(g, p, s)?)))
        .collect()
}

fn terms(spec: &ExperimentSpec) -> Result<Outputs> {
    let rows = sweep(spec, |g, _, s| Ok(term_count(g, s)?))?;
    let mut csv = String::from("V,I,E,strategy,terms\n");
    for (v, p, s, t) in &rows {
        let _ = writeln!(csv, "{v},{},{},{s},{t}", p.i, p.e);
    }
    let mut chart = Chart::new("Terms", "V", "terms");
    for &s in &spec.strategies {
        let pts = rows.iter().filter(|r| r.2 == s).map(|r| (r.0 as f64, r.3 as f64)).collect();
        chart.series.push(Series { name: s.to_string(), points: pts, style: Style::Line, color: color_of(s) });
    }
    Ok((vec![("terms.csv".into(), csv)], vec![("terms.svg".into(), chart)]))
}

struct TRow {
    n: usize,
    closed: Option<(u64, u64)>,
    built: (u64, u64),
}

fn tgates(spec: &ExperimentSpec, totals: bool) -> Result<Outputs> {
    let rows = sweep(spec, |g, p, s| {
        let closed = match gate_counts_closed_form(p, s) {
            Ok(r) => Some((r.t_count_toffoli, r.t_count_rtof)),
            Err(Error::NoClosedForm(_)) => None,
            Err(e) => return Err(e.into()),
        };
        let (built, _) = constructed_resources(g, s)?;
        Ok(TRow { n: built.n, closed, built: (built.t_count_toffoli, built.t_count_rtof) })
    })?;
    let decomps = [(Decomposition::Toffoli, "toffoli"), (Decomposition::Rtof, "rtof")];
    let pick = |pair: (u64, u64), d: Decomposition| if d == Decomposition::Toffoli { pair.0 } else { pair.1 };
    let mut csv = if totals {
        String::from("V,I,strategy,decomp,n,t_per_ay,total\n")
    } else {
        String::from("V,I,strategy,decomp,t_closed,t_constructed\n")
    };
    for (v, p, s, r) in &rows {
        for (d, dn) in decomps {
            let built = pick(r.built, d);
            if totals {
                let _ = writeln!(csv, "{v},{},{s},{dn},{},{built},{:.6e}", p.i, r.n, tgate_totals(built, r.n));
            } else {
                let closed = r.closed.map_or(String::new(), |c| pick(c, d).to_string());
                let _ = writeln!(csv, "{v},{},{s},{dn},{closed},{built}", p.i);
            }
        }
    }
    let (name, title) = if totals { ("tgates_total", "Total T gates") } else { ("tgates", "T gates per A_y") };
    let mut chart = Chart::new(title, "V", "T gates (Toffoli)");
    chart.log_y = true;
    for &s in &spec.strategies {
        let pts = rows
            .iter()
            .filter(|r| r.2 == s)
            .map(|r| {
                let t = r.3.built.0;
                (r.0 as f64, if totals { tgate_totals(t, r.3.n) } else { t as f64 })
            })
            .collect();
        chart.series.push(Series { name: s.to_string(), points: pts, style: Style::Line, color: color_of(s) });
    }
    Ok((vec![(format!("{name}.csv"), csv)], vec![(format!("{name}.svg"), chart)]))
}

/// Rows of `trial,step,cum_rotations,y,value_normalized`, optionally
/// prefixed by a strategy column.
pub fn trace_rows(out: &mut String, prefix: Option<&str>, traces: &[GasTrace], min: i64, max: i64) {
    for (trial, t) in traces.iter().enumerate() {
        for (step, s) in t.steps.iter().enumerate() {
            if let Some(p) = prefix {
                let _ = write!(out, "{p},");
            }
            let _ = writeln!(
                out,
                "{trial},{step},{},{},{}",
                s.cumulative_rotations,
                s.threshold,
                normalize_objective(s.threshold, min, max)
            );
        }
    }
}

pub fn cdf_rows(out: &mut String, prefix: Option<&str>, traces: &[GasTrace]) {
    for (r, f) in success_cdf(traces) {
        if let Some(p) = prefix {
            let _ = write!(out, "{p},");
        }
        let _ = writeln!(out, "{r},{f}");
    }
}

/// `⌈√N⌉ · C`.
pub fn fast_budget(num_vars: usize, c: u64) -> u64 {
    ((num_vars as f64 / 2.0).exp2().ceil() as u64) * c
}

pub struct SearchResult {
    pub strategy: Strategy,
    pub problem: GasProblem,
    pub traces: Vec<GasTrace>,
}

pub fn run_search(inst: &GcpInstance, s: Strategy, cfg: &GasConfig, trials: usize) -> Result<SearchResult> {
    let problem = GasProblem::from_formulation(&formulate(inst, s)?)?;
    let traces = problem.run_trials(cfg, trials)?;
    Ok(SearchResult { strategy: s, problem, traces })
}

pub fn summary_header() -> &'static str {
    "strategy,n,trials,converged,median_rotations,budget,within_budget\n"
}

pub fn summary_row(out: &mut String, r: &SearchResult, budget_c: u64) {
    let n = r.problem.num_vars();
    let budget = fast_budget(n, budget_c);
    let cdf = success_cdf(&r.traces);
    let converged = r.traces.iter().filter(|t| t.converged_at.is_some()).count();
    let median = median_rotations(&r.traces).map_or(String::new(), |m| m.to_string());
    let _ = writeln!(
        out,
        "{},{n},{},{converged},{median},{budget},{}",
        r.strategy,
        r.traces.len(),
        cdf_at(&cdf, budget)
    );
}

fn search(spec: &ExperimentSpec) -> Result<Outputs> {
    let results = spec
        .strategies
        .iter()
        .map(|&s| run_search(&spec.instance, s, &spec.gas, spec.trials))
        .collect::<Result<Vec<_>>>()?;
    let mut summary = String::from(summary_header());
    for r in &results {
        summary_row(&mut summary, r, spec.budget_c);
    }
    if spec.figure == FigureId::Convergence {
        let mut csv = String::from("strategy,trial,step,cum_rotations,y,value_normalized\n");
        let mut chart = Chart::new("Threshold vs rotations", "cumulative rotations", "normalized threshold");
        chart.dedup_legend = true;
        for r in &results {
            let (lo, hi) = (r.problem.min(), r.problem.max());
            trace_rows(&mut csv, Some(r.strategy.name()), &r.traces, lo, hi);
            for t in &r.traces {
                chart.series.push(Series {
                    name: r.strategy.to_string(),
                    points: t.normalized(lo, hi).into_iter().map(|(x, y)| (x as f64, y)).collect(),
                    style: Style::Step,
                    color: color_of(r.strategy),
                });
            }
        }
        return Ok((
            vec![("convergence.csv".into(), csv), ("convergence_summary.csv".into(), summary)],
            vec![("convergence.svg".into(), chart)],
        ));
    }
    let mut csv = String::from("strategy,rotations,fraction\n");
    let mut chart = Chart::new("Rotations to optimum", "cumulative rotations", "fraction converged");
    for r in &results {
        cdf_rows(&mut csv, Some(r.strategy.name()), &r.traces);
        let mut pts: Vec<(f64, f64)> = success_cdf(&r.traces).into_iter().map(|(x, f)| (x as f64, f)).collect();
        // carry the final level to the longest run so curves end together
        let right = results.iter().flat_map(|q| &q.traces).filter_map(|t| t.converged_at).max().unwrap_or(0) as f64;
        if let Some(&(_, f)) = pts.last() {
            pts.push((right, f));
        }
        chart.series.push(Series { name: r.strategy.to_string(), points: pts, style: Style::Step, color: color_of(r.strategy) });
    }
    Ok((
        vec![("cdf.csv".into(), csv), ("cdf_summary.csv".into(), summary)],
        vec![("cdf.svg".into(), chart)],
    ))
}
