//! `hubo-gas`: formulate, synthesize, count, simulate and search from the
//! command line. Every command writes its outputs plus `manifest.json` into
//! the output directory.

mod config;
mod figures;
mod output;
mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hubo_gas::boolpoly::{value_register_width, ScheduledPolynomial};
use hubo_gas::circuit::{cancel_x, count_resources, synthesize_auto, synthesize_scheduled, Circuit, Decomposition};
use hubo_gas::encoding::{CodeKind, IndexCode};
use hubo_gas::gas::{marked_probability, Backend, GasConfig, GasProblem, InitialThreshold};
use hubo_gas::problems::{
    gcp_hubo, gcp_hubo_or_with, gcp_qubo, tsp_hubo, tsp_qubo, Formulation, GcpInstance, GcpPenalties, OrOptions,
    Strategy, TspInstance, TspPenalties,
};
use hubo_gas::simulator::{verify_oracle, StateVector};

use config::{parse_list, parse_ratio, parse_sizes, ConfigFile};
use figures::{ExperimentSpec, FigureId, SearchResult};
use output::Run;

#[derive(Parser)]
#[command(name = "hubo-gas", version, about = "QUBO/HUBO formulations and Grover adaptive search workbench")]
struct Cli {
    /// Directory for outputs and manifest.json.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Index codes.
    #[command(subcommand)]
    Encode(EncodeCmd),
    /// Build an objective polynomial from an instance file.
    Formulate(FormulateArgs),
    /// Synthesize the state-preparation circuit `A_y` for a polynomial.
    Synth(SynthArgs),
    /// Gate and T-gate counts of a circuit dump.
    Count(CountArgs),
    #[command(subcommand)]
    Simulate(SimulateCmd),
    #[command(subcommand)]
    Gas(GasCmd),
    /// Data (and optional SVG) for one figure.
    Figure(FigureArgs),
}

#[derive(Subcommand)]
enum EncodeCmd {
    /// Print and save the codeword table.
    Show {
        /// asc, dsc, pf, or, qubo, or a code name (one-hot, gray-pf, even-or).
        #[arg(long)]
        code: String,
        #[arg(long)]
        indices: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemKind {
    Gcp,
    Tsp,
}

#[derive(Args, Clone)]
struct ProblemArgs {
    #[arg(long, value_enum)]
    problem: ProblemKind,
    #[arg(long)]
    strategy: Strategy,
    /// Instance file: `V I` then `u v` lines, or `N` then upper-triangular weights.
    #[arg(long = "in")]
    input: PathBuf,
    /// Override a penalty weight, e.g. `--penalty unused=3`.
    #[arg(long = "penalty")]
    penalties: Vec<String>,
    /// Penalty weights large enough that every minimizer is feasible.
    #[arg(long)]
    dominating: bool,
    /// Keep the even-weight constraint indicators factored.
    #[arg(long)]
    factored_constraints: bool,
}

#[derive(Args)]
struct FormulateArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Output polynomial file (default `<problem>_<strategy>.poly`).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    poly: PathBuf,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    y: i64,
    /// Value register width; checked against the polynomial's range.
    #[arg(long)]
    m: Option<usize>,
    /// Run the X-cancellation pass.
    #[arg(long)]
    cancel_x: bool,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, default_value = "toffoli")]
    decomp: Decomposition,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum SimulateCmd {
    /// Check the value register holds `E(x) - y` for every input.
    VerifyOracle {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        y: i64,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Key distribution after `L` Grover iterations.
    Grover {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        y: i64,
        #[arg(long = "L", default_value_t = 1)]
        l: u64,
        #[arg(long)]
        m: Option<usize>,
    },
}

#[derive(Subcommand)]
enum GasCmd {
    /// Seeded adaptive-search trials on one formulation.
    Run(GasRunArgs),
}

/// Search settings shared by `gas run` and the search figures; each falls back
/// to the config file, then to the default.
#[derive(Args, Clone, Default)]
struct SearchArgs {
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Total rotation budget per trial.
    #[arg(long)]
    budget: Option<u64>,
    /// Constant C of the `⌈√N⌉·C` convergence budget reported in summaries.
    #[arg(long)]
    budget_c: Option<u64>,
    #[arg(long)]
    backend: Option<Backend>,
    /// Rotation schedule growth, e.g. `8/7`.
    #[arg(long)]
    growth: Option<String>,
    /// Fixed initial threshold instead of one random sample.
    #[arg(long, allow_hyphen_values = true)]
    initial: Option<i64>,
    /// Experiment file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct GasRunArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct FigureArgs {
    /// qubits, terms, tgates, tgates_total, convergence or cdf.
    #[arg(long)]
    figure: Option<String>,
    /// Family sizes: `8,16,32` or `8..32:8`.
    #[arg(long = "v")]
    sizes: Option<String>,
    /// Comma-separated strategies.
    #[arg(long)]
    strategies: Option<String>,
    /// Graph for the search figures (default: the 5-vertex, 4-color house graph).
    #[arg(long)]
    instance: Option<PathBuf>,
    #[command(flatten)]
    search: SearchArgs,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let dir = cli.out_dir.as_path();
    match cli.cmd {
        Cmd::Encode(EncodeCmd::Show { code, indices }) => encode_show(dir, &code, indices),
        Cmd::Formulate(a) => formulate(dir, a),
        Cmd::Synth(a) => synth(dir, a),
        Cmd::Count(a) => count(dir, a),
        Cmd::Simulate(SimulateCmd::VerifyOracle { poly, y, m }) => simulate_verify(dir, &poly, y, m),
        Cmd::Simulate(SimulateCmd::Grover { poly, y, l, m }) => simulate_grover(dir, &poly, y, l, m),
        Cmd::Gas(GasCmd::Run(a)) => gas_run(dir, a),
        Cmd::Figure(a) => figure(dir, a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn code_kind(name: &str) -> Result<CodeKind> {
    if let Ok(s) = name.parse::<Strategy>() {
        return Ok(s.code_kind());
    }
    [CodeKind::OneHot, CodeKind::Asc, CodeKind::Dsc, CodeKind::GrayPf, CodeKind::EvenOr]
        .into_iter()
        .find(|k| k.name() == name)
        .ok_or_else(|| anyhow!("unknown code `{name}`"))
}

fn encode_show(dir: &Path, name: &str, indices: usize) -> Result<()> {
    let kind = code_kind(name)?;
    let code = IndexCode::new(kind, indices)?;
    let table = code.table();
    print!("{table}");
    let mut csv = String::from("index,bits,delta\n");
    for line in table.lines().skip(2) {
        csv.push_str(&line.replace('\t', ","));
        csv.push('\n');
    }
    let mut run = Run::new(dir, "encode show")?;
    run.set("code", kind).set("indices", indices);
    run.write(&format!("code_{}_{indices}.csv", kind.name()), &csv)?;
    run.finish()?;
    Ok(())
}

fn apply_gcp_penalties(p: &mut GcpPenalties, overrides: &[String]) -> Result<()> {
    for o in overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| anyhow!("penalty `{o}` is not name=value"))?;
        let v: i64 = v.trim().parse()?;
        match k.trim() {
            "qubo" => p.qubo = v,
            "unused" => p.unused = v,
            "or_parity" => p.or_parity = v,
            "or_unused" => p.or_unused = v,
            other => bail!("unknown coloring penalty `{other}` (qubo, unused, or_parity, or_unused)"),
        }
    }
    Ok(())
}

fn apply_tsp_penalties(p: &mut TspPenalties, overrides: &[String]) -> Result<()> {
    for o in overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| anyhow!("penalty `{o}` is not name=value"))?;
        let v: i64 = v.trim().parse()?;
        match k.trim() {
            "city_once" => p.city_once = v,
            "slot_once" => p.slot_once = v,
            "hubo_slot_once" => p.hubo_slot_once = v,
            "hubo_unused" => p.hubo_unused = v,
            other => bail!("unknown salesman penalty `{other}` (city_once, slot_once, hubo_slot_once, hubo_unused)"),
        }
    }
    Ok(())
}

fn build_formulation(a: &ProblemArgs) -> Result<Formulation> {
    let text = read(&a.input)?;
    Ok(match a.problem {
        ProblemKind::Gcp => {
            let mut g: GcpInstance = text.parse()?;
            if a.dominating {
                g.penalties = GcpPenalties::dominating(g.max_degree());
            }
            apply_gcp_penalties(&mut g.penalties, &a.penalties)?;
            match a.strategy {
                Strategy::Qubo => gcp_qubo(&g)?,
                Strategy::Or => gcp_hubo_or_with(&g, OrOptions { factored_constraints: a.factored_constraints })?,
                s => gcp_hubo(&g, s)?,
            }
        }
        ProblemKind::Tsp => {
            let mut t: TspInstance = text.parse()?;
            if a.dominating {
                t.penalties = TspPenalties::dominating(&t);
            }
            apply_tsp_penalties(&mut t.penalties, &a.penalties)?;
            match a.strategy {
                Strategy::Qubo => tsp_qubo(&t)?,
                Strategy::Or => bail!("the even-weight strategy is only defined for coloring"),
                s => tsp_hubo(&t, s)?,
            }
        }
    })
}

fn record_problem(run: &mut Run, a: &ProblemArgs) {
    let problem = match a.problem {
        ProblemKind::Gcp => "gcp",
        ProblemKind::Tsp => "tsp",
    };
    run.set("problem", problem)
        .set("strategy", a.strategy)
        .set("in", a.input.display())
        .set("penalties", a.penalties.join(";"))
        .set("dominating", a.dominating)
        .set("factored_constraints", a.factored_constraints);
}

fn formulate(dir: &Path, a: FormulateArgs) -> Result<()> {
    let f = build_formulation(&a.problem)?;
    let poly = f.scheduled();
    let mut run = Run::new(dir, "formulate")?;
    record_problem(&mut run, &a.problem);
    let name = a.out.unwrap_or_else(|| {
        let p = match a.problem.problem {
            ProblemKind::Gcp => "gcp",
            ProblemKind::Tsp => "tsp",
        };
        format!("{p}_{}.poly", a.problem.strategy)
    });
    let path = run.write(&name, &poly.to_string())?;
    run.finish()?;
    println!(
        "{} variables, {} terms, degree {} -> {}",
        f.num_vars(),
        poly.polynomial().terms().len(),
        poly.polynomial().degree(),
        path.display()
    );
    Ok(())
}

fn load_poly(path: &Path) -> Result<ScheduledPolynomial> {
    read(path)?.parse().with_context(|| format!("parsing {}", path.display()))
}

fn synth(dir: &Path, a: SynthArgs) -> Result<()> {
    let poly = load_poly(&a.poly)?;
    let mut circ = match a.m {
        Some(m) => synthesize_scheduled(&poly, a.y, m)?,
        None => synthesize_auto(&poly, a.y)?,
    };
    if a.cancel_x {
        circ = cancel_x(&circ);
    }
    let mut run = Run::new(dir, "synth")?;
    run.set("poly", a.poly.display())
        .set("y", a.y)
        .set("m", circ.num_value())
        .set("cancel_x", a.cancel_x);
    let path = run.write(a.out.as_deref().unwrap_or("circuit.txt"), &circ.dump())?;
    run.finish()?;
    println!(
        "n = {}, m = {}, {} phase blocks, {} X -> {}",
        circ.num_key(),
        circ.num_value(),
        circ.phase_blocks().count(),
        circ.x_count(),
        path.display()
    );
    Ok(())
}

fn count(dir: &Path, a: CountArgs) -> Result<()> {
    let circ: Circuit = read(&a.circuit)?.parse()?;
    let r = count_resources(&circ);
    let mut csv = String::from("metric,value\n");
    let mut row = |k: &str, v: String| {
        let _ = writeln!(csv, "{k},{v}");
    };
    row("n", r.n.to_string());
    row("m", r.m.to_string());
    row("total_qubits", r.total_qubits().to_string());
    row("ancilla", r.ancilla.to_string());
    row("h", r.h_count.to_string());
    row("x", r.x_count.to_string());
    for (k, c) in &r.ckr_histogram {
        row(&format!("c{k}r"), c.to_string());
    }
    row("t_toffoli", r.t_count_toffoli.to_string());
    row("t_rtof", r.t_count_rtof.to_string());
    row("t", r.t_count(a.decomp).to_string());
    print!("{csv}");
    let mut run = Run::new(dir, "count")?;
    run.set("circuit", a.circuit.display()).set("decomp", format!("{:?}", a.decomp).to_lowercase());
    run.write(a.out.as_deref().unwrap_or("resources.csv"), &csv)?;
    run.finish()?;
    Ok(())
}

/// Width that holds every `E(x) - y`.
fn sim_width(poly: &ScheduledPolynomial, y: i64, m: Option<usize>) -> Result<usize> {
    if let Some(m) = m {
        return Ok(m);
    }
    let (lo, hi) = poly.polynomial().bounds()?;
    Ok(value_register_width(lo - y, hi - y))
}

fn simulate_verify(dir: &Path, path: &Path, y: i64, m: Option<usize>) -> Result<()> {
    let poly = load_poly(path)?;
    let m = sim_width(&poly, y, m)?;
    let report = verify_oracle(&poly, y, m)?;
    let mut csv = String::from("inputs_checked,passed,x,expected,got\n");
    let (x, e, g) = match &report.counterexample {
        Some(c) => (c.x.to_string(), c.expected.to_string(), c.got.to_string()),
        None => Default::default(),
    };
    let _ = writeln!(csv, "{},{},{x},{e},{g}", report.inputs_checked, report.passed());
    let mut run = Run::new(dir, "simulate verify-oracle")?;
    run.set("poly", path.display()).set("y", y).set("m", m);
    run.write("oracle.csv", &csv)?;
    run.finish()?;
    if !report.passed() {
        bail!("oracle mismatch at x = {x}: expected {e}, got {g}");
    }
    println!("oracle verified on {} inputs (m = {m})", report.inputs_checked);
    Ok(())
}

fn simulate_grover(dir: &Path, path: &Path, y: i64, l: u64, m: Option<usize>) -> Result<()> {
    let poly = load_poly(path)?;
    let m = sim_width(&poly, y, m)?;
    let n = poly.polynomial().num_vars();
    let circ = hubo_gas::circuit::synthesize_unchecked(&poly, y, m)?;
    let mut state = StateVector::zero(n, m)?;
    state.apply(&circ)?;
    for _ in 0..l {
        state.grover_step(&circ)?;
    }
    let probs = state.key_probabilities();
    let values = poly.polynomial().compile()?;
    let mut csv = String::from("x,bits,value,marked,probability\n");
    let (mut pm, mut t) = (0.0, 0u64);
    for (x, p) in probs.iter().enumerate() {
        let v = values.eval(x as u64);
        let marked = v < y;
        if marked {
            pm += p;
            t += 1;
        }
        let bits: String = (0..n).map(|j| if x >> j & 1 == 1 { '1' } else { '0' }).collect();
        let _ = writeln!(csv, "{x},{bits},{v},{},{p:.12}", marked as u8);
    }
    let mut run = Run::new(dir, "simulate grover")?;
    run.set("poly", path.display()).set("y", y).set("L", l).set("m", m);
    run.write(&format!("grover_L{l}.csv"), &csv)?;
    run.finish()?;
    println!(
        "P(marked) = {pm:.9} (closed form {:.9}), {t} of {} marked",
        marked_probability(1 << n, t, l),
        probs.len()
    );
    Ok(())
}

/// Flag, else config key, else default.
fn pick<T: std::str::FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str, default: T) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    Ok(match flag {
        Some(v) => v,
        None => cfg.parsed(key)?.unwrap_or(default),
    })
}

struct SearchSettings {
    cfg: GasConfig,
    trials: usize,
    budget_c: u64,
    svg: bool,
}

fn search_settings(s: &SearchArgs, file: &ConfigFile) -> Result<SearchSettings> {
    let base = GasConfig::default();
    let growth = match s.growth.as_deref().or(file.get("growth")) {
        Some(g) => parse_ratio(g)?,
        None => base.growth,
    };
    let initial = match s.initial {
        Some(y) => Some(y),
        None => file.parsed("initial")?,
    };
    let cfg = GasConfig {
        growth,
        max_total_rotations: pick(s.budget, file, "budget", base.max_total_rotations)?,
        seed: pick(s.seed, file, "seed", base.seed)?,
        backend: pick(s.backend, file, "backend", base.backend)?,
        initial_threshold: initial.map_or(InitialThreshold::FromRandomSample, InitialThreshold::Fixed),
    };
    Ok(SearchSettings {
        cfg,
        trials: pick(s.trials, file, "trials", figures::DEFAULT_TRIALS)?,
        budget_c: pick(s.budget_c, file, "budget_c", figures::DEFAULT_BUDGET_C)?,
        svg: s.svg || file.parsed("svg")?.unwrap_or(false),
    })
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    path.map_or(Ok(ConfigFile::default()), ConfigFile::load)
}

fn record_search(run: &mut Run, s: &SearchSettings) {
    run.seed(s.cfg.seed)
        .set("trials", s.trials)
        .set("budget", s.cfg.max_total_rotations)
        .set("budget_c", s.budget_c)
        .set("backend", format!("{:?}", s.cfg.backend).to_lowercase())
        .set("growth", s.cfg.growth)
        .set("initial", format!("{:?}", s.cfg.initial_threshold));
}

fn gas_run(dir: &Path, a: GasRunArgs) -> Result<()> {
    let file = load_config(a.search.config.as_deref())?;
    let s = search_settings(&a.search, &file)?;
    let form = build_formulation(&a.problem)?;
    let problem = GasProblem::from_formulation(&form)?;
    let traces = problem.run_trials(&s.cfg, s.trials)?;
    let result = SearchResult { strategy: form.strategy(), problem, traces };
    let (lo, hi) = (result.problem.min(), result.problem.max());

    let mut trace = String::from("trial,step,cum_rotations,y,value_normalized\n");
    figures::trace_rows(&mut trace, None, &result.traces, lo, hi);
    let mut cdf = String::from("rotations,fraction\n");
    figures::cdf_rows(&mut cdf, None, &result.traces);
    let mut summary = String::from(figures::summary_header());
    figures::summary_row(&mut summary, &result, s.budget_c);

    let mut run = Run::new(dir, "gas run")?;
    record_problem(&mut run, &a.problem);
    record_search(&mut run, &s);
    run.write("trace.csv", &trace)?;
    run.write("cdf.csv", &cdf)?;
    run.write("summary.csv", &summary)?;
    if s.svg {
        let mut chart = svg::Chart::new("Rotations to optimum", "cumulative rotations", "fraction converged");
        chart.series.push(svg::Series {
            name: result.strategy.to_string(),
            points: hubo_gas::gas::success_cdf(&result.traces).into_iter().map(|(r, f)| (r as f64, f)).collect(),
            style: svg::Style::Step,
            color: 0,
        });
        run.write("cdf.svg", &chart.render())?;
    }
    run.finish()?;
    print!("{summary}");
    Ok(())
}

fn figure(dir: &Path, a: FigureArgs) -> Result<()> {
    let file = load_config(a.search.config.as_deref())?;
    let known = [
        "figure", "v", "strategies", "instance", "trials", "seed", "budget", "budget_c", "backend", "growth",
        "initial", "svg",
    ];
    if let Some(k) = file.keys().find(|k| !known.contains(k)) {
        bail!("unknown config key `{k}`");
    }
    let id: FigureId = a
        .figure
        .as_deref()
        .or(file.get("figure"))
        .ok_or_else(|| anyhow!("no figure given (--figure or `figure =` in the config)"))?
        .parse()?;
    let s = search_settings(&a.search, &file)?;
    let mut spec = ExperimentSpec::new(id);
    if let Some(v) = a.sizes.as_deref().or(file.get("v")) {
        spec.sizes = parse_sizes(v)?;
    }
    if let Some(list) = a.strategies.as_deref().or(file.get("strategies")) {
        spec.strategies = parse_list(list)?;
    }
    let instance = a.instance.clone().or_else(|| file.get("instance").map(PathBuf::from));
    if let Some(path) = &instance {
        spec.instance = read(path)?.parse()?;
    }
    spec.trials = s.trials;
    spec.gas = s.cfg.clone();
    spec.budget_c = s.budget_c;

    let artifacts = figures::generate(&spec, s.svg)?;
    let mut run = Run::new(dir, "figure")?;
    run.set("figure", id.name())
        .set("strategies", spec.strategies.iter().map(|s| s.name()).collect::<Vec<_>>().join(","))
        .set("svg", s.svg);
    if let Some(c) = &a.search.config {
        run.set("config", c.display());
    }
    match id {
        FigureId::Convergence | FigureId::Cdf => {
            record_search(&mut run, &s);
            run.set("instance", instance.map_or("house graph (5, 4)".into(), |p| p.display().to_string()));
        }
        _ => {
            run.set("v", spec.sizes.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
        }
    }
    for art in &artifacts {
        let path = run.write(&art.name, &art.contents)?;
        println!("wrote {}", path.display());
    }
    run.finish()?;
    Ok(())
}
