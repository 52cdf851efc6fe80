//! The experiment registry: named computations over the thermal-machine
//! library, each with a parameter schema, defaults and a tabular result.

use std::collections::BTreeMap;

use qthermo_core::dissipators::{BathKind, BathSpec};
use qthermo_core::nonmarkov::{self, AncillaBathSpec, CouplingRegime};
use qthermo_core::otto::{self, OttoSpec};
use qthermo_core::state::DensityMatrix;
use qthermo_core::{carnot, infoflow, slow_driving, ControlProtocol};
use rayon::prelude::*;

use crate::table::{Cell, Table};

/// Output format of the primary file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// CLI failure modes, ordered by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration (unknown experiment, bad parameter, IO).
    Config(String),
    /// The underlying computation rejected the inputs.
    Domain(qthermo_core::Error),
    /// A numerical tolerance was not met.
    Accuracy(qthermo_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Domain(_) => 1,
            CliError::Accuracy(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Domain(e) | CliError::Accuracy(e) => write!(f, "{e}"),
        }
    }
}

impl From<qthermo_core::Error> for CliError {
    fn from(e: qthermo_core::Error) -> Self {
        match e {
            qthermo_core::Error::Accuracy(_) => CliError::Accuracy(e),
            _ => CliError::Domain(e),
        }
    }
}

/// One tunable parameter of an experiment.
pub struct ParamSpec {
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

/// A named experiment.
pub struct Experiment {
    pub name: &'static str,
    pub about: &'static str,
    pub details: &'static str,
    pub params: &'static [ParamSpec],
    pub default_mesh: usize,
    pub mesh_help: &'static str,
    pub default_format: Format,
    pub run: fn(&Config) -> Result<Table, CliError>,
}

/// Resolved run configuration: defaults overlaid with `--param` values.
pub struct Config {
    pub values: BTreeMap<String, String>,
    pub mesh: usize,
    pub jobs: usize,
}

impl Config {
    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        let raw = self.values.get(key).expect("key comes from the schema");
        raw.parse::<f64>().map_err(|_| {
            CliError::Config(format!("parameter {key}={raw} is not a number"))
        })
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let raw = self.values.get(key).expect("key comes from the schema");
        raw.split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| {
                    CliError::Config(format!(
                        "parameter {key}={raw} is not a comma-separated number list"
                    ))
                })
            })
            .collect()
    }

    /// Builds a worker pool honoring the requested parallelism degree;
    /// 0 lets the runtime pick. Row order never depends on the pool.
    fn pool(&self) -> Result<rayon::ThreadPool, CliError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| CliError::Config(format!("cannot build worker pool: {e}")))
    }
}

/// Uniform grid `0, step, ..., y_max` with `mesh` intervals.
fn uniform_grid(y_max: f64, mesh: usize) -> Vec<f64> {
    (0..=mesh).map(|i| y_max * i as f64 / mesh as f64).collect()
}

fn regime_label(regime: CouplingRegime) -> &'static str {
    match regime {
        CouplingRegime::PeakThenBelowMarkovian => "peak_then_below_memoryless",
        CouplingRegime::PeakAboveMarkovian => "peak_above_memoryless",
        CouplingRegime::MonotoneGrowth => "monotone_growth",
    }
}

fn run_quasi_otto(_cfg: &Config) -> Result<Table, CliError> {
    let (xi, q_star) = carnot::quasi_otto_constants();
    let gap_over_t = (q_star / (1.0 - q_star)).ln();
    let mut t = Table::new(vec!["xi", "q_star", "gap_over_t"]);
    t.push(vec![Cell::Num(xi), Cell::Num(q_star), Cell::Num(gap_over_t)]);
    Ok(t)
}

fn run_rescaling(cfg: &Config) -> Result<Table, CliError> {
    let alpha_c = cfg.f64("alpha_c")?;
    let alpha_h = cfg.f64("alpha_h")?;
    let tau_c = cfg.f64("tau_c")?;
    let tau_h = cfg.f64("tau_h")?;
    let t_cold = cfg.f64("t_cold")?;
    let t_hot = cfg.f64("t_hot")?;
    if t_cold <= 0.0 || t_hot <= 0.0 {
        return Err(CliError::Config("temperatures must be positive".into()));
    }
    let (beta_c, beta_h) = (1.0 / t_cold, 1.0 / t_hot);
    let (lambda_c, lambda_h) =
        carnot::optimal_rescaling(alpha_c, alpha_h, tau_c, tau_h, beta_c, beta_h)?;
    let eta_carnot = 1.0 - beta_h / beta_c;
    let eta_star =
        carnot::rescaled_efficiency(alpha_c, alpha_h, lambda_c, lambda_h, eta_carnot);
    let power = carnot::rescaled_power(
        alpha_c, alpha_h, tau_c, tau_h, beta_c, beta_h, lambda_c, lambda_h,
    );
    let mut t = Table::new(vec![
        "lambda_c",
        "lambda_h",
        "eta_at_max_power",
        "eta_carnot",
        "eta_curzon_ahlborn",
        "power_per_unit_heat_per_time",
    ]);
    t.push(vec![
        Cell::Num(lambda_c),
        Cell::Num(lambda_h),
        Cell::Num(eta_star),
        Cell::Num(eta_carnot),
        Cell::Num(1.0 - (t_cold / t_hot).sqrt()),
        Cell::Num(power),
    ]);
    Ok(t)
}

fn run_shape(cfg: &Config) -> Result<Table, CliError> {
    let q0 = cfg.f64("q0")?;
    let q1 = cfg.f64("q1")?;
    let shape = carnot::optimal_shape(q0, q1)?;
    let mut t = Table::new(vec![
        "protocol",
        "smoothing_k",
        "shape_functional",
        "excess_over_infimum",
    ]);
    t.push(vec![
        Cell::Text("cosine_branch".into()),
        Cell::Int(0),
        Cell::Num(shape.f_min),
        Cell::Num(0.0),
    ]);
    for (k, protocol) in &shape.smoothed {
        let value = carnot::shape_functional(protocol)?;
        t.push(vec![
            Cell::Text("capped".into()),
            Cell::Int(*k as u64),
            Cell::Num(value),
            Cell::Num(value - shape.f_min),
        ]);
    }
    Ok(t)
}

fn run_carnot_nm_sweep(cfg: &Config) -> Result<Table, CliError> {
    let c_list = cfg.f64_list("c")?;
    let y_max = cfg.f64("y_max")?;
    if y_max <= 0.0 {
        return Err(CliError::Config("y_max must be positive".into()));
    }
    let rows = nonmarkov::carnot_power_sweep(&c_list, &uniform_grid(y_max, cfg.mesh))?;
    let mut t = Table::new(vec!["c", "y", "power_ratio", "regime"]);
    for row in rows {
        t.push(vec![
            Cell::Num(row.c),
            Cell::Num(row.y),
            Cell::Num(row.power_ratio),
            Cell::Text(regime_label(row.regime).into()),
        ]);
    }
    Ok(t)
}

fn otto_spec_from(cfg: &Config, tau_c: f64, tau_h: f64) -> Result<OttoSpec, CliError> {
    Ok(OttoSpec::new(
        cfg.f64("eps1")?,
        cfg.f64("eps2")?,
        cfg.f64("beta_c")?,
        cfg.f64("beta_h")?,
        tau_c,
        tau_h,
    )?)
}

fn run_otto_exact(cfg: &Config) -> Result<Table, CliError> {
    let tau_c = cfg.f64("tau_c")?;
    let tau_h = cfg.f64("tau_h")?;
    let rate = cfg.f64("rate")?;
    if rate <= 0.0 {
        return Err(CliError::Config("rate must be positive".into()));
    }
    let y = cfg.f64("y")?;
    let spec = otto_spec_from(cfg, tau_c, tau_h)?;
    let profile = |t: f64| {
        if y < 0.0 {
            (-rate * t).exp()
        } else {
            nonmarkov::relaxation_profile(rate * t, y)
        }
    };
    let power = otto::exact_power(&spec, profile, profile)?;
    let (u, v) = (profile(tau_c), profile(tau_h));
    let g = otto::thermalization_factor(u, v);
    let work = power * (tau_c + tau_h);
    let q_abs = spec.eps2 * (spec.p_c() - spec.p_h()) * g;
    let mut t = Table::new(vec![
        "power_energy_per_time",
        "work_per_cycle_energy",
        "heat_absorbed_energy",
        "eta",
        "eta_otto_ideal",
        "eta_carnot",
        "memory_cold",
        "memory_hot",
    ]);
    t.push(vec![
        Cell::Num(power),
        Cell::Num(work),
        Cell::Num(q_abs),
        Cell::Num(if q_abs > 0.0 { work / q_abs } else { f64::NAN }),
        Cell::Num(spec.eta_otto()),
        Cell::Num(spec.eta_carnot()),
        Cell::Num(u),
        Cell::Num(v),
    ]);
    Ok(t)
}

fn run_otto_nm_sweep(cfg: &Config) -> Result<Table, CliError> {
    let y_max = cfg.f64("y_max")?;
    if y_max <= 0.0 {
        return Err(CliError::Config("y_max must be positive".into()));
    }
    // the sweep spec fixes the per-cycle work scale; durations are
    // re-optimized per coupling, so the seeded values are irrelevant
    let spec = otto_spec_from(cfg, 1.0, 1.0)?;
    let grid = uniform_grid(y_max, cfg.mesh);
    let rows: Result<Vec<_>, qthermo_core::Error> = cfg.pool()?.install(|| {
        grid.par_iter()
            .map(|&y| nonmarkov::otto_max_sweep(&spec, &[y]).map(|mut v| v.remove(0)))
            .collect()
    });
    let mut t = Table::new(vec!["y", "tau_star_1_over_gamma", "power_ratio"]);
    for row in rows? {
        t.push(vec![
            Cell::Num(row.y),
            Cell::Num(row.tau_star),
            Cell::Num(row.power_ratio),
        ]);
    }
    Ok(t)
}

fn run_blp_sweep(cfg: &Config) -> Result<Table, CliError> {
    let y_max = cfg.f64("y_max")?;
    let t_max = cfg.f64("t_max")?;
    let temperature = cfg.f64("temperature")?;
    let p1 = cfg.f64("p1")?;
    let p2 = cfg.f64("p2")?;
    if y_max <= 0.0 {
        return Err(CliError::Config("y_max must be positive".into()));
    }
    let grid = uniform_grid(y_max, cfg.mesh);
    let rows: Result<Vec<_>, CliError> = cfg.pool()?.install(|| {
        grid.par_iter()
            .map(|&y| {
                let spec = AncillaBathSpec::new(temperature, 1.0, 1.0, y, 1.0)?;
                let n = infoflow::blp_measure(&spec, p1, p2, t_max, 10_000)?;
                Ok(vec![Cell::Num(y), Cell::Num(n)])
            })
            .collect()
    });
    let mut t = Table::new(vec!["y", "backflow"]);
    for row in rows? {
        t.push(row);
    }
    Ok(t)
}

fn run_free_energy_trace(cfg: &Config) -> Result<Table, CliError> {
    let temperature = cfg.f64("temperature")?;
    let p0 = cfg.f64("p0")?;
    let y = cfg.f64("y")?;
    let t_max = cfg.f64("t_max")?;
    if y < 0.0 {
        return Err(CliError::Config("y must be nonnegative".into()));
    }
    let spec = AncillaBathSpec::new(temperature, 1.0, 1.0, y, 1.0)?;
    let rho0 = DensityMatrix::from_ground_population(p0)?;
    let trace = infoflow::free_energy_trace(&spec, &rho0, t_max, cfg.mesh)?;
    let mut t = Table::new(vec![
        "time_1_over_gamma",
        "f_total_gap_units",
        "f_system_gap_units",
        "f_ancilla_gap_units",
        "mutual_info_gap_units",
    ]);
    for i in 0..trace.times.len() {
        t.push(vec![
            Cell::Num(trace.times[i]),
            Cell::Num(trace.f_total[i]),
            Cell::Num(trace.f_s[i]),
            Cell::Num(trace.f_a[i]),
            Cell::Num(trace.mi[i]),
        ]);
    }
    Ok(t)
}

fn stroke_inputs(cfg: &Config) -> Result<(ControlProtocol, BathSpec, Vec<f64>), CliError> {
    let q0 = cfg.f64("q0")?;
    let q1 = cfg.f64("q1")?;
    let temperature = cfg.f64("temperature")?;
    let rate = cfg.f64("rate")?;
    let taus = cfg.f64_list("taus")?;
    let protocol = ControlProtocol::smoothstep(q0, q1, 1.0)?;
    let bath = BathSpec::new(temperature, rate, BathKind::Reset)?;
    Ok((protocol, bath, taus))
}

fn run_sd_accuracy(cfg: &Config) -> Result<Table, CliError> {
    let (protocol, bath, taus) = stroke_inputs(cfg)?;
    let rows = slow_driving::sd_accuracy_scan(&protocol, &bath, &taus)?;
    let mut t = Table::new(vec!["tau_1_over_gamma", "max_residual"]);
    for (tau, residual) in rows {
        t.push(vec![Cell::Num(tau), Cell::Num(residual)]);
    }
    Ok(t)
}

fn run_dissipation_scaling(cfg: &Config) -> Result<Table, CliError> {
    let (protocol, bath, taus) = stroke_inputs(cfg)?;
    let mut t =
        Table::new(vec!["tau_1_over_gamma", "entropy_production_kb", "sigma_product_kb_over_gamma"]);
    for tau in taus {
        let report = slow_driving::dissipation_report(&protocol, &bath, tau)?;
        t.push(vec![
            Cell::Num(tau),
            Cell::Num(report.delta_s_irr),
            Cell::Num(report.sigma),
        ]);
    }
    Ok(t)
}

/// The experiment registry, in presentation order.
pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        name: "carnot-quasi-otto",
        about: "constants of the coalescing-endpoint power optimum",
        details: "Maximizes the slow-driving power bound over a shrinking \
                  population window and reports the optimum: the power \
                  constant xi, the optimal ground population q_star and the \
                  gap-to-temperature ratio ln(q_star/(1-q_star)).",
        params: &[],
        default_mesh: 0,
        mesh_help: "unused",
        default_format: Format::Json,
        run: run_quasi_otto,
    },
    Experiment {
        name: "carnot-rescaling",
        about: "power-optimal stroke-duration rescaling of a slow cycle",
        details: "Given the per-stroke dissipation ratios alpha and base \
                  durations, computes the closed-form duration rescaling \
                  that maximizes cycle power, with the resulting efficiency \
                  against the reversible and square-root-temperature bounds.",
        params: &[
            ParamSpec { key: "alpha_c", default: "0.1", help: "cold dissipation ratio (> 0)" },
            ParamSpec { key: "alpha_h", default: "-0.1", help: "hot dissipation ratio (< 0)" },
            ParamSpec { key: "tau_c", default: "1", help: "base cold duration" },
            ParamSpec { key: "tau_h", default: "1", help: "base hot duration" },
            ParamSpec { key: "t_cold", default: "1", help: "cold temperature" },
            ParamSpec { key: "t_hot", default: "2", help: "hot temperature" },
        ],
        default_mesh: 0,
        mesh_help: "unused",
        default_format: Format::Json,
        run: run_rescaling,
    },
    Experiment {
        name: "carnot-shape",
        about: "optimal stroke shape and its admissible approximants",
        details: "Builds the cosine protocol branch minimizing the \
                  shape functional between two endpoint populations, then \
                  evaluates the functional on endpoint-capped versions with \
                  increasing smoothing index k, showing convergence to the \
                  infimum omega^2.",
        params: &[
            ParamSpec { key: "q0", default: "0.6", help: "initial ground population" },
            ParamSpec { key: "q1", default: "0.92", help: "final ground population" },
        ],
        default_mesh: 0,
        mesh_help: "unused",
        default_format: Format::Csv,
        run: run_shape,
    },
    Experiment {
        name: "carnot-nm-sweep",
        about: "slow-cycle power ratio of the composite bath vs coupling",
        details: "Sweeps the dimensionless qubit-ancilla coupling y for each \
                  reset-rate ratio c and reports the quasistatic power ratio \
                  relative to the memoryless bath (the inverse dissipation \
                  amplitude), with each curve classified as peaked-then-below, \
                  peaked-above, or monotonically growing.",
        params: &[
            ParamSpec { key: "c", default: "0.3,1,3", help: "rate ratios (comma list)" },
            ParamSpec { key: "y_max", default: "3", help: "upper end of the coupling grid" },
        ],
        default_mesh: 60,
        mesh_help: "number of coupling-grid intervals",
        default_format: Format::Csv,
        run: run_carnot_nm_sweep,
    },
    Experiment {
        name: "otto-exact",
        about: "exact finite-time power of one partial-thermalization cycle",
        details: "Evaluates the closed-form steady-cycle power for the \
                  two-gap cycle with incomplete thermalization on both \
                  strokes, for either the memoryless exponential relaxation \
                  (y < 0) or the composite-bath profile at coupling y, and \
                  reports heats, efficiency and the per-stroke memory factors. \
                  Energies inherit the units of the gap inputs; times are \
                  absolute (the rate parameter sets the relaxation scale).",
        params: &[
            ParamSpec { key: "eps1", default: "1", help: "cold-stroke gap (work medium)" },
            ParamSpec { key: "eps2", default: "2", help: "hot-stroke gap" },
            ParamSpec { key: "beta_c", default: "1.2", help: "cold inverse temperature" },
            ParamSpec { key: "beta_h", default: "0.3", help: "hot inverse temperature" },
            ParamSpec { key: "tau_c", default: "3", help: "cold stroke duration" },
            ParamSpec { key: "tau_h", default: "3", help: "hot stroke duration" },
            ParamSpec { key: "rate", default: "1", help: "bath reset rate" },
            ParamSpec {
                key: "y",
                default: "-1",
                help: "ancilla coupling; negative selects exponential relaxation",
            },
        ],
        default_mesh: 0,
        mesh_help: "unused",
        default_format: Format::Json,
        run: run_otto_exact,
    },
    Experiment {
        name: "otto-nm-sweep",
        about: "maximum-power boost of the two-gap cycle vs ancilla coupling",
        details: "For each coupling y, maximizes the symmetric-duration \
                  cycle power over the stroke duration and reports the \
                  optimal duration and the power ratio against the \
                  memoryless optimum (attained at vanishing duration; a \
                  zero optimal duration marks that supremum).",
        params: &[
            ParamSpec { key: "eps1", default: "1", help: "cold-stroke gap" },
            ParamSpec { key: "eps2", default: "2", help: "hot-stroke gap" },
            ParamSpec { key: "beta_c", default: "1.2", help: "cold inverse temperature" },
            ParamSpec { key: "beta_h", default: "0.3", help: "hot inverse temperature" },
            ParamSpec { key: "y_max", default: "4", help: "upper end of the coupling grid" },
        ],
        default_mesh: 40,
        mesh_help: "number of coupling-grid intervals",
        default_format: Format::Csv,
        run: run_otto_nm_sweep,
    },
    Experiment {
        name: "blp-sweep",
        about: "trace-distance backflow measure vs ancilla coupling",
        details: "Sweeps the coupling y at resonance with equal reset rates \
                  and reports the accumulated positive increments of the \
                  trace distance between two initially diagonal system \
                  states: zero below an onset coupling, then monotonically \
                  growing.",
        params: &[
            ParamSpec { key: "y_max", default: "4", help: "upper end of the coupling grid" },
            ParamSpec { key: "t_max", default: "15", help: "observation window (1/Gamma)" },
            ParamSpec { key: "temperature", default: "2", help: "bath temperature (gap units)" },
            ParamSpec { key: "p1", default: "1", help: "first initial ground population" },
            ParamSpec { key: "p2", default: "0", help: "second initial ground population" },
        ],
        default_mesh: 40,
        mesh_help: "number of coupling-grid intervals",
        default_format: Format::Csv,
        run: run_blp_sweep,
    },
    Experiment {
        name: "free-energy-trace",
        about: "free-energy decomposition of the joint relaxation",
        details: "Propagates a diagonal system state times a thermal \
                  ancilla under the resonant composite-bath generator and \
                  samples the joint distance to equilibrium split into \
                  system excess, ancilla excess and mutual information \
                  (all in qubit-gap energy units; the three parts sum to \
                  the total at every time).",
        params: &[
            ParamSpec { key: "temperature", default: "2.5", help: "bath temperature (gap units)" },
            ParamSpec { key: "p0", default: "0.7", help: "initial system ground population" },
            ParamSpec { key: "y", default: "2", help: "qubit-ancilla coupling" },
            ParamSpec { key: "t_max", default: "10", help: "trace length (1/Gamma)" },
        ],
        default_mesh: 1000,
        mesh_help: "number of time steps",
        default_format: Format::Csv,
        run: run_free_energy_trace,
    },
    Experiment {
        name: "sd-accuracy",
        about: "first-order expansion residual vs stroke duration",
        details: "Drives one isothermal stroke at several durations and \
                  reports the max-norm deviation between the exact driven \
                  state and the first-order slow-driving expansion; the \
                  residual falls roughly fourfold per duration doubling.",
        params: &[
            ParamSpec { key: "q0", default: "0.6", help: "initial ground population" },
            ParamSpec { key: "q1", default: "0.92", help: "final ground population" },
            ParamSpec { key: "temperature", default: "0.4166666666666667", help: "bath temperature" },
            ParamSpec { key: "rate", default: "1", help: "bath reset rate" },
            ParamSpec { key: "taus", default: "20,40,80", help: "stroke durations (comma list)" },
        ],
        default_mesh: 0,
        mesh_help: "unused",
        default_format: Format::Csv,
        run: run_sd_accuracy,
    },
    Experiment {
        name: "dissipation-scaling",
        about: "entropy production and its duration-invariant coefficient",
        details: "Computes the irreversible entropy production of one \
                  driven stroke at several durations from the exact \
                  trajectory; the product sigma = entropy * duration is \
                  constant in the slow-driving regime.",
        params: &[
            ParamSpec { key: "q0", default: "0.6", help: "initial ground population" },
            ParamSpec { key: "q1", default: "0.92", help: "final ground population" },
            ParamSpec { key: "temperature", default: "0.4166666666666667", help: "bath temperature" },
            ParamSpec { key: "rate", default: "1", help: "bath reset rate" },
            ParamSpec { key: "taus", default: "20,40,80,160", help: "stroke durations (comma list)" },
        ],
        default_mesh: 0,
        mesh_help: "unused",
        default_format: Format::Csv,
        run: run_dissipation_scaling,
    },
];

/// Looks up an experiment by name.
pub fn find(name: &str) -> Option<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

/// Overlays `--param key=value` pairs onto the schema defaults,
/// rejecting unknown keys.
pub fn resolve_params(
    exp: &Experiment,
    overrides: &[String],
) -> Result<BTreeMap<String, String>, CliError> {
    let mut values: BTreeMap<String, String> = exp
        .params
        .iter()
        .map(|p| (p.key.to_string(), p.default.to_string()))
        .collect();
    for item in overrides {
        let (key, value) = item.split_once('=').ok_or_else(|| {
            CliError::Config(format!("--param {item} is not of the form key=value"))
        })?;
        if !values.contains_key(key) {
            let known: Vec<&str> = exp.params.iter().map(|p| p.key).collect();
            return Err(CliError::Config(format!(
                "unknown parameter {key} for {}; valid keys: {}",
                exp.name,
                if known.is_empty() { "(none)".to_string() } else { known.join(", ") }
            )));
        }
        values.insert(key.to_string(), value.to_string());
    }
    Ok(values)
}
