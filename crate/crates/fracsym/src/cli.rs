//! Batch front door: flat key-value configs, command dispatch, CSV exports.
//!
//! Config format: `section.key = value` lines, `#` comments, no ecosystem
//! dependency. Unknown keys are errors (no silent typo tolerance); every
//! referenced field is validated before any computation starts. Grid CSVs
//! are written with 17 significant digits so re-reading loses nothing, and
//! identical configs produce byte-identical output.

use crate::fracderiv::{FracOrder, TimeGrid};
use crate::solutions::{classical_limit, eval_grid, Generator, SolutionError, SolutionSpec};
use crate::specfun::SpecFunError;
use crate::symmetry::{self, classify_with, CaseSpec, SymmetryError};
use crate::verify::{
    invariant_surface_check_full, pde_residual_full, Grid2D, ResidualReport, VerifyError,
};
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

/// Subcommands of the batch driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    Eval,
    Verify,
    Reduce,
    Export,
}

impl Command {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "classify" => Some(Self::Classify),
            "eval" => Some(Self::Eval),
            "verify" => Some(Self::Verify),
            "reduce" => Some(Self::Reduce),
            "export" => Some(Self::Export),
            _ => None,
        }
    }
}

/// Which residual the verify command runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyCheck {
    Pde,
    Surface,
}

/// Tolerances in force; every report prints them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub classify_threshold: f64,
    pub foxh_rel: f64,
    pub foxh_abs: f64,
    pub quad_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            classify_threshold: symmetry::CLASSIFY_THRESHOLD,
            foxh_rel: 1e-9,
            foxh_abs: 1e-12,
            quad_rel: 1e-10,
        }
    }
}

impl fmt::Display for Tolerances {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tolerance.classify_threshold = {:e}", self.classify_threshold)?;
        writeln!(f, "tolerance.foxh_rel = {:e}", self.foxh_rel)?;
        writeln!(f, "tolerance.foxh_abs = {:e}", self.foxh_abs)?;
        writeln!(f, "tolerance.quad_rel = {:e}", self.quad_rel)
    }
}

/// A parsed and validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub case: CaseSpec,
    pub solution: Option<SolutionSpec>,
    pub grid: Grid2D,
    pub alpha: f64,
    pub classify_input: Option<PathBuf>,
    pub verify_check: VerifyCheck,
    pub verify_max_residual: Option<f64>,
    pub per_node: bool,
    pub output: Option<PathBuf>,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "config line {n}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn cfg_err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError { line, message: message.into() }
}

/// Top-level error with the process exit code mapping.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2: configuration or input-file problems.
    Config(ConfigError),
    /// Exit 3: domain violations.
    Domain(String),
    /// Exit 4: a configured tolerance was not met.
    Tolerance(String),
    /// Exit 5: internal numeric failure (quadrature/series).
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Domain(_) => 3,
            Self::Tolerance(_) => 4,
            Self::Numeric(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(e) => write!(f, "{e}"),
            Self::Domain(m) => write!(f, "domain error: {m}"),
            Self::Tolerance(m) => write!(f, "tolerance failure: {m}"),
            Self::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<SolutionError> for CliError {
    fn from(e: SolutionError) -> Self {
        match &e {
            SolutionError::SpecFun(
                SpecFunError::QuadratureTolerance { .. } | SpecFunError::SeriesNoConvergence { .. },
            ) => Self::Numeric(e.to_string()),
            _ => Self::Domain(e.to_string()),
        }
    }
}

impl From<SymmetryError> for CliError {
    fn from(e: SymmetryError) -> Self {
        match &e {
            SymmetryError::QuadratureFailed(_) => Self::Numeric(e.to_string()),
            _ => Self::Domain(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Solution(s) => s.into(),
            VerifyError::Symmetry(s) => s.into(),
            VerifyError::FracDeriv(d) => Self::Domain(d.to_string()),
            other => Self::Domain(other.to_string()),
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "case.id",
    "case.lambda1",
    "case.lambda2",
    "case.lambda3",
    "case.epsilon",
    "solution.generator",
    "solution.alpha",
    "solution.n",
    "solution.s",
    "solution.epsilon",
    "solution.coeffs",
    "grid.omega_min",
    "grid.domega",
    "grid.omega_count",
    "grid.dt",
    "grid.t_count",
    "grid.guard_fraction",
    "classify.input",
    "verify.check",
    "verify.max_residual",
    "verify.pernode",
    "output.path",
    "tolerance.classify_threshold",
    "tolerance.foxh_rel",
    "tolerance.foxh_abs",
    "tolerance.quad_rel",
];

struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    fn get(&self, key: &str) -> Option<&(usize, String)> {
        self.entries.get(key)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| cfg_err(Some(*line), format!("`{key}` expects a number, got `{v}`"))),
        }
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some((line, v)) => v
                .parse::<usize>()
                .map_err(|_| cfg_err(Some(*line), format!("`{key}` expects a nonnegative integer, got `{v}`"))),
        }
    }

    fn sign_or(&self, key: &str, default: i8) -> Result<i8, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some((line, v)) => match v.trim_start_matches('+').parse::<i8>() {
                Ok(1) => Ok(1),
                Ok(-1) => Ok(-1),
                _ => Err(cfg_err(Some(*line), format!("`{key}` expects +1 or -1, got `{v}`"))),
            },
        }
    }

    fn string(&self, key: &str) -> Option<String> {
        self.get(key).map(|(_, v)| v.clone())
    }

    fn require_line(&self, key: &str) -> Result<(usize, String), ConfigError> {
        self.get(key)
            .cloned()
            .ok_or_else(|| cfg_err(None, format!("missing required key `{key}`")))
    }

    fn coeff_list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((line, v)) => {
                let parts: Result<Vec<f64>, _> =
                    v.split(',').map(|p| p.trim().parse::<f64>()).collect();
                parts
                    .map(Some)
                    .map_err(|_| cfg_err(Some(*line), format!("`{key}` expects a comma list of numbers, got `{v}`")))
            }
        }
    }
}

fn parse_raw(text: &str) -> Result<RawConfig, ConfigError> {
    let mut entries = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| cfg_err(Some(line_no), format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(cfg_err(Some(line_no), format!("unknown key `{key}`")));
        }
        if entries.insert(key.clone(), (line_no, value)).is_some() {
            return Err(cfg_err(Some(line_no), format!("duplicate key `{key}`")));
        }
    }
    Ok(RawConfig { entries })
}

/// Parse and validate a config for the given command (fail-fast: every field
/// the command references is checked here, before any computation).
pub fn parse_config(command: Command, text: &str) -> Result<RunConfig, ConfigError> {
    let raw = parse_raw(text)?;

    let tolerances = Tolerances {
        classify_threshold: raw.f64_or("tolerance.classify_threshold", symmetry::CLASSIFY_THRESHOLD)?,
        foxh_rel: raw.f64_or("tolerance.foxh_rel", 1e-9)?,
        foxh_abs: raw.f64_or("tolerance.foxh_abs", 1e-12)?,
        quad_rel: raw.f64_or("tolerance.quad_rel", 1e-10)?,
    };

    // solution.alpha is referenced by eval/verify/reduce/export
    let alpha = raw.f64_or("solution.alpha", 1.0)?;
    let order = match raw.get("solution.n") {
        None => FracOrder::new(alpha).map_err(|e| cfg_err(None, e.to_string()))?,
        Some((line, v)) => {
            let n: u32 = v
                .parse()
                .map_err(|_| cfg_err(Some(*line), format!("`solution.n` expects an integer, got `{v}`")))?;
            FracOrder::with_bracket(alpha, n).map_err(|e| cfg_err(Some(*line), e.to_string()))?
        }
    };

    // case: generator implies the family when a solution is referenced
    let generator = match raw.string("solution.generator") {
        Some(g) => Some(Generator::parse(&g).ok_or_else(|| {
            let line = raw.get("solution.generator").map(|(l, _)| *l);
            cfg_err(line, format!("`solution.generator` expects V1..V7, got `{g}`"))
        })?),
        None => None,
    };
    let case_id = match raw.get("case.id") {
        Some((line, v)) => v
            .parse::<u8>()
            .map_err(|_| cfg_err(Some(*line), format!("`case.id` expects 1..8, got `{v}`")))?,
        None => match generator {
            Some(g) => g.family_case(),
            // classify never references the case; commands that do must name it
            None if command == Command::Classify => 1,
            None => return Err(cfg_err(None, "missing required key `case.id` (or `solution.generator`)")),
        },
    };
    let case = CaseSpec::new(
        case_id,
        raw.f64_or("case.lambda1", 0.0)?,
        raw.f64_or("case.lambda2", 0.0)?,
        raw.f64_or("case.lambda3", 0.0)?,
        raw.sign_or("case.epsilon", 1)?,
    )
    .map_err(|e| cfg_err(None, e.to_string()))?;

    let needs_solution = matches!(command, Command::Eval | Command::Verify | Command::Reduce);
    let solution = if needs_solution {
        let (gline, _) = raw.require_line("solution.generator")?;
        let generator = generator.expect("checked above");
        let s = raw.f64_or("solution.s", 0.0)?;
        let epsilon = raw.sign_or("solution.epsilon", 1)?;
        let coeffs = raw
            .coeff_list("solution.coeffs")?
            .ok_or_else(|| cfg_err(None, "missing required key `solution.coeffs`"))?;
        Some(
            SolutionSpec::new(generator, order, s, epsilon, coeffs, case)
                .map_err(|e| cfg_err(Some(gline), e.to_string()))?,
        )
    } else {
        None
    };

    let time = TimeGrid::new(raw.f64_or("grid.dt", 0.01)?, raw.usize_or("grid.t_count", 101)?)
        .map_err(|e| cfg_err(None, e.to_string()))?;
    let grid = Grid2D::new(
        raw.f64_or("grid.omega_min", 1.0)?,
        raw.f64_or("grid.domega", 0.01)?,
        raw.usize_or("grid.omega_count", 21)?,
        time,
        raw.f64_or("grid.guard_fraction", 0.05)?,
    )
    .map_err(|e| cfg_err(None, e.to_string()))?;

    let classify_input = raw.string("classify.input").map(PathBuf::from);
    if command == Command::Classify && classify_input.is_none() {
        return Err(cfg_err(None, "missing required key `classify.input`"));
    }

    let verify_check = match raw.get("verify.check") {
        None => VerifyCheck::Pde,
        Some((line, v)) => match v.as_str() {
            "pde" => VerifyCheck::Pde,
            "surface" => VerifyCheck::Surface,
            other => {
                return Err(cfg_err(Some(*line), format!("`verify.check` expects pde|surface, got `{other}`")))
            }
        },
    };
    let per_node = match raw.get("verify.pernode") {
        None => false,
        Some((line, v)) => match v.as_str() {
            "true" => true,
            "false" => false,
            other => return Err(cfg_err(Some(*line), format!("`verify.pernode` expects true|false, got `{other}`"))),
        },
    };

    Ok(RunConfig {
        command,
        case,
        solution,
        grid,
        alpha,
        classify_input,
        verify_check,
        verify_max_residual: raw.f64("verify.max_residual")?,
        per_node,
        output: raw.string("output.path").map(PathBuf::from),
        tolerances,
    })
}

/// What a run produced: report text for stdout plus files already written.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOutput {
    pub stdout: String,
    pub files_written: Vec<PathBuf>,
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Numeric(format!("writing {}: {e}", path.display())))
}

/// Read (omega, c) samples from a two-column CSV (optional header line).
pub fn read_samples_csv(text: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 2 {
            return Err(CliError::Config(cfg_err(
                Some(idx + 1),
                format!("samples CSV needs 2 columns, got {}", cols.len()),
            )));
        }
        match (cols[0].parse::<f64>(), cols[1].parse::<f64>()) {
            (Ok(w), Ok(c)) => out.push((w, c)),
            _ if idx == 0 => continue, // header
            _ => {
                return Err(CliError::Config(cfg_err(
                    Some(idx + 1),
                    format!("cannot parse `{line}` as numbers"),
                )))
            }
        }
    }
    Ok(out)
}

fn residual_report_text(report: &ResidualReport, tol: &Tolerances) -> String {
    let mut s = String::new();
    s.push_str(&report.to_string());
    s.push_str("tolerances in force:\n");
    s.push_str(&tol.to_string());
    s
}

/// Execute a validated config. `out` overrides `output.path`.
pub fn run(config: &RunConfig, out: Option<&Path>) -> Result<RunOutput, CliError> {
    let out_path: Option<PathBuf> = out.map(Path::to_path_buf).or_else(|| config.output.clone());
    match config.command {
        Command::Classify => run_classify(config),
        Command::Eval => run_eval(config, out_path.as_deref()),
        Command::Verify => run_verify(config, out_path.as_deref()),
        Command::Reduce => run_reduce(config, out_path.as_deref()),
        Command::Export => run_export(config, out_path.as_deref()),
    }
}

fn run_classify(config: &RunConfig) -> Result<RunOutput, CliError> {
    let path = config.classify_input.as_ref().expect("validated");
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::Config(cfg_err(None, format!("cannot read classify.input {}: {e}", path.display())))
    })?;
    let samples = read_samples_csv(&text)?;
    let m = classify_with(&samples, config.tolerances.classify_threshold)?;
    let mut s = String::new();
    s.push_str(&format!("case = {}\n", m.case_id));
    if let Some(l2) = m.lambda2 {
        s.push_str(&format!("lambda2 = {}\n", fmt17(l2)));
    }
    if let Some(l3) = m.lambda3 {
        s.push_str(&format!("lambda3 = {}\n", fmt17(l3)));
    }
    if let Some(eps) = m.epsilon {
        s.push_str(&format!("epsilon = {eps:+}\n"));
    }
    s.push_str(&format!("fit_residual = {}\n", fmt17(m.fit_residual)));
    for c in &m.candidates {
        s.push_str(&format!(
            "candidate = case {} residual {}\n",
            c.case_id,
            fmt17(c.fit_residual)
        ));
    }
    s.push_str(&format!(
        "threshold = {:e}\n",
        config.tolerances.classify_threshold
    ));
    Ok(RunOutput { stdout: s, files_written: vec![] })
}

fn check_grid_domain(config: &RunConfig) -> Result<&SolutionSpec, CliError> {
    let spec = config.solution.as_ref().expect("validated");
    for w in config.grid.omegas() {
        if let Err(e) = spec.prefactor(w) {
            return Err(e.into());
        }
    }
    Ok(spec)
}

fn run_eval(config: &RunConfig, out: Option<&Path>) -> Result<RunOutput, CliError> {
    let spec = check_grid_domain(config)?;
    let omegas = config.grid.omegas();
    let times = config.grid.times();
    let samples = eval_grid(spec, &omegas, &times)?;
    let mut csv = String::from("omega,t,u\n");
    for (i, &w) in omegas.iter().enumerate() {
        for (j, &t) in times.iter().enumerate() {
            csv.push_str(&format!("{},{},{}\n", fmt17(w), fmt17(t), fmt17(samples.values[i][j])));
        }
    }
    match out {
        Some(path) => {
            write_text(path, &csv)?;
            Ok(RunOutput {
                stdout: format!(
                    "wrote {} ({} nodes{})\n",
                    path.display(),
                    omegas.len() * times.len(),
                    if samples.singular_origin { ", singular origin replaced by 0" } else { "" }
                ),
                files_written: vec![path.to_path_buf()],
            })
        }
        None => Ok(RunOutput { stdout: csv, files_written: vec![] }),
    }
}

fn run_verify(config: &RunConfig, out: Option<&Path>) -> Result<RunOutput, CliError> {
    let spec = check_grid_domain(config)?;
    let keep_nodes = config.per_node && out.is_some();
    let report = match config.verify_check {
        VerifyCheck::Pde => pde_residual_full(spec, &config.case, &config.grid, keep_nodes)?,
        VerifyCheck::Surface => {
            let gen = spec.invariant_generator()?;
            invariant_surface_check_full(&gen, spec, &config.grid, keep_nodes)?
        }
    };
    let mut files = Vec::new();
    if let (Some(path), Some(nodes)) = (out, report.per_node.as_ref()) {
        let mut csv = String::from("omega,t,residual\n");
        for n in nodes {
            csv.push_str(&format!("{},{},{}\n", fmt17(n.omega), fmt17(n.t), fmt17(n.residual)));
        }
        write_text(path, &csv)?;
        files.push(path.to_path_buf());
    }
    let text = residual_report_text(&report, &config.tolerances);
    if let Some(bound) = config.verify_max_residual {
        if report.max_residual > bound {
            return Err(CliError::Tolerance(format!(
                "max_residual {:e} exceeds verify.max_residual {:e}\n{text}",
                report.max_residual, bound
            )));
        }
    }
    Ok(RunOutput { stdout: text, files_written: files })
}

fn run_reduce(config: &RunConfig, out: Option<&Path>) -> Result<RunOutput, CliError> {
    let spec = check_grid_domain(config)?;
    let alpha = spec.order.alpha();
    if alpha != 1.0 && alpha != 2.0 {
        return Err(CliError::Domain(format!(
            "reduce compares classical limits; solution.alpha must be 1 or 2, got {alpha}"
        )));
    }
    let omegas = config.grid.omegas();
    let times = config.grid.times();
    let mut body = String::from("omega,t,general,classical\n");
    let mut max_dev = 0.0f64;
    for &w in &omegas {
        for &t in &times {
            if t == 0.0 {
                continue;
            }
            let general = crate::solutions::eval_solution(spec, w, t)?;
            let classical = classical_limit(spec, w, t)?;
            max_dev = max_dev.max((general - classical).abs());
            body.push_str(&format!(
                "{},{},{},{}\n",
                fmt17(w),
                fmt17(t),
                fmt17(general),
                fmt17(classical)
            ));
        }
    }
    let summary = format!("max_deviation = {}\n", fmt17(max_dev));
    match out {
        Some(path) => {
            write_text(path, &body)?;
            Ok(RunOutput {
                stdout: format!("wrote {}\n{summary}", path.display()),
                files_written: vec![path.to_path_buf()],
            })
        }
        None => Ok(RunOutput { stdout: format!("{body}{summary}"), files_written: vec![] }),
    }
}

fn run_export(config: &RunConfig, out: Option<&Path>) -> Result<RunOutput, CliError> {
    let gens = symmetry::generators(&config.case, self_alpha(config))?;
    let mut s = String::new();
    s.push_str(&format!("case = {}\n", config.case.case_id));
    s.push_str(&format!("cbar = {}\n", symmetry::family_formula(config.case.case_id)));
    s.push_str(&format!("alpha = {}\n", fmt17(self_alpha(config))));
    for g in &gens {
        s.push_str(&format!("generator.{} = {}\n", g.tag, g.tag.formula()));
    }
    match out {
        Some(path) => {
            write_text(path, &s)?;
            Ok(RunOutput { stdout: format!("wrote {}\n", path.display()), files_written: vec![path.to_path_buf()] })
        }
        None => Ok(RunOutput { stdout: s, files_written: vec![] }),
    }
}

fn self_alpha(config: &RunConfig) -> f64 {
    config.solution.as_ref().map(|s| s.order.alpha()).unwrap_or(config.alpha)
}

/// Cap the rayon pool from FRACSYM_THREADS (0 or unset = auto). Safe to call
/// more than once; later calls are no-ops.
pub fn init_threads_from_env() {
    if let Ok(v) = std::env::var("FRACSYM_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}
