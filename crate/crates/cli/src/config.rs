//! Line-oriented run configuration.
//!
//! ```text
//! # comments run to the end of the line
//! [grid]
//! shape 512
//! [solver]
//! t_end 1.0e0
//! scheme engquist-osher
//! [generators]
//! lambda 1.0e0
//! [flux]
//! family directional-burgers
//! direction 1.0e0
//! [initial]
//! mode 1  0.0e0 -5.0e-1
//! [noise]
//! seed 7
//! g 1 1  2.5e-1 0.0e0
//! ```
//!
//! Every real number must be written with an explicit exponent. Generator
//! vectors are embedded so a file fully determines its run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use apcl::ap::{read_polynomial, FreqIndex, GeneratorSet, TrigPolynomial};
use apcl::flux::FluxModel;
use apcl::longtime::Observable;
use apcl::noise::NoiseModel;
use apcl::num_complex::Complex64;
use apcl::solver::{Scheme, SolverConfig};

use crate::CliError;

const SECTIONS: [&str; 9] = [
    "grid",
    "solver",
    "generators",
    "flux",
    "initial",
    "initial_b",
    "noise",
    "observables",
    "experiment",
];

/// Columns of the observable stream (time is always first).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    Observable(Observable),
    EntropyMin,
}

impl Column {
    pub fn name(self) -> &'static str {
        match self {
            Column::Observable(o) => o.name(),
            Column::EntropyMin => "entropy_min",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConvergenceMode {
    Resolution,
    Viscosity,
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub seeds: Vec<u64>,
    pub paths: usize,
    pub t_burn: Option<f64>,
    pub deltas: Vec<f64>,
    pub shells: Vec<u32>,
    pub scan_window: f64,
    pub xi_points: usize,
    pub radii: Vec<f64>,
    pub offset: Vec<f64>,
    pub points_per_unit: f64,
    pub mode: ConvergenceMode,
    pub resolutions: Vec<usize>,
    pub epsilons: Vec<f64>,
}

impl Default for Experiment {
    fn default() -> Self {
        Experiment {
            seeds: (0..10).collect(),
            paths: 200,
            t_burn: None,
            deltas: vec![1e-3, 2e-3, 5e-3, 1e-2, 2e-2],
            shells: vec![1, 2],
            scan_window: 2.0,
            xi_points: 100_000,
            radii: vec![125.0, 1000.0, 8000.0],
            offset: Vec::new(),
            points_per_unit: 32.0,
            mode: ConvergenceMode::Resolution,
            resolutions: vec![128, 256, 512],
            epsilons: vec![0.04, 0.02, 0.01, 0.005],
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub gens: Arc<GeneratorSet>,
    pub flux: FluxModel,
    pub initial: TrigPolynomial,
    pub initial_b: Option<TrigPolynomial>,
    pub columns: Vec<Column>,
    pub experiment: Experiment,
}

struct Line<'a> {
    no: usize,
    key: &'a str,
    args: Vec<&'a str>,
}

impl Line<'_> {
    fn err(&self, message: impl Into<String>) -> CliError {
        CliError::ConfigParse {
            line: self.no,
            message: message.into(),
        }
    }

    fn one(&self) -> Result<&str, CliError> {
        match self.args.as_slice() {
            [a] => Ok(a),
            _ => Err(self.err(format!("{} takes exactly one value", self.key))),
        }
    }

    fn float(&self) -> Result<f64, CliError> {
        parse_float(self.one()?).map_err(|m| self.err(m))
    }

    fn floats(&self) -> Result<Vec<f64>, CliError> {
        self.args.iter().map(|a| parse_float(a).map_err(|m| self.err(m))).collect()
    }

    fn int<T: std::str::FromStr>(&self) -> Result<T, CliError> {
        let a = self.one()?;
        a.parse().map_err(|_| self.err(format!("expected an integer, got {a:?}")))
    }

    fn ints<T: std::str::FromStr>(&self) -> Result<Vec<T>, CliError> {
        self.args
            .iter()
            .map(|a| a.parse().map_err(|_| self.err(format!("expected an integer, got {a:?}"))))
            .collect()
    }

    fn unknown(&self, section: &str) -> CliError {
        self.err(format!("unknown key {:?} in [{section}]", self.key))
    }
}

/// Parses a decimal float with a mandatory exponent (`1.5e0`, `-2E-3`).
pub fn parse_float(s: &str) -> Result<f64, String> {
    if !s.contains(['e', 'E']) {
        return Err(format!("number {s:?} needs an explicit exponent"));
    }
    let v: f64 = s.parse().map_err(|_| format!("malformed number {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("number {s:?} is not finite"));
    }
    Ok(v)
}

fn split_sections(text: &str) -> Result<BTreeMap<&'static str, Vec<Line<'_>>>, CliError> {
    let mut out: BTreeMap<&'static str, Vec<Line<'_>>> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = SECTIONS.iter().find(|s| **s == name.trim()).ok_or(CliError::ConfigParse {
                line: no,
                message: format!("unknown section [{name}]"),
            })?;
            if out.contains_key(name) {
                return Err(CliError::ConfigParse {
                    line: no,
                    message: format!("section [{name}] appears twice"),
                });
            }
            out.insert(name, Vec::new());
            current = Some(name);
            continue;
        }
        let section = current.ok_or(CliError::ConfigParse {
            line: no,
            message: "entry before the first section".into(),
        })?;
        let mut words = line.split_whitespace();
        let key = words.next().unwrap_or_default();
        out.get_mut(section).unwrap().push(Line {
            no,
            key,
            args: words.collect(),
        });
    }
    Ok(out)
}

fn missing(section: &str) -> CliError {
    CliError::ConfigParse {
        line: 0,
        message: format!("missing section [{section}]"),
    }
}

/// Parses `text`; `base` resolves relative `file` entries.
pub fn parse_config(text: &str, base: &Path) -> Result<RunConfig, CliError> {
    let sections = split_sections(text)?;
    let empty = Vec::new();
    let get = |name: &str| sections.get(name).unwrap_or(&empty);

    let mut shape = None;
    for l in get("grid") {
        match l.key {
            "shape" => shape = Some(l.ints::<usize>()?),
            _ => return Err(l.unknown("grid")),
        }
    }
    let shape = shape.ok_or_else(|| missing("grid"))?;

    let mut lambdas = Vec::new();
    let mut tolerance = apcl::ap::DEFAULT_INDEPENDENCE_TOLERANCE;
    let mut bound = apcl::ap::DEFAULT_SEARCH_BOUND;
    let mut gen_line = 0;
    for l in get("generators") {
        gen_line = l.no;
        match l.key {
            "lambda" => lambdas.push(l.floats()?),
            "tolerance" => tolerance = l.float()?,
            "search_bound" => bound = l.int()?,
            _ => return Err(l.unknown("generators")),
        }
    }
    if lambdas.is_empty() {
        return Err(missing("generators"));
    }
    let gens = Arc::new(GeneratorSet::validate(lambdas, tolerance, bound).map_err(|e| CliError::ConfigParse {
        line: gen_line,
        message: e.to_string(),
    })?);
    if gens.rank() != shape.len() {
        return Err(CliError::ConfigParse {
            line: gen_line,
            message: format!("{} generators but grid rank {}", gens.rank(), shape.len()),
        });
    }

    let mut solver = SolverConfig::new(shape, 1.0);
    solver.snapshot_stride = 0;
    let mut saw_t_end = false;
    for l in get("solver") {
        match l.key {
            "cfl" => solver.cfl = l.float()?,
            "t_end" => {
                solver.t_end = l.float()?;
                saw_t_end = true;
            }
            "epsilon" => solver.epsilon = l.float()?,
            "scheme" => solver.scheme = l.one()?.parse::<Scheme>().map_err(|e| l.err(e.to_string()))?,
            "snapshot_stride" => solver.snapshot_stride = l.int()?,
            "observe_stride" => solver.observe_stride = l.int()?,
            "sobolev_s" => solver.sobolev_s = l.float()?,
            "entropy_alphas" => solver.entropy_alphas = l.floats()?,
            "window" => solver.window = Some(l.float()?),
            "dt" => solver.dt = Some(l.float()?),
            _ => return Err(l.unknown("solver")),
        }
    }
    if !saw_t_end {
        return Err(CliError::ConfigParse {
            line: 0,
            message: "[solver] needs t_end".into(),
        });
    }

    let flux = parse_flux(get("flux"), gens.ambient_dim())?;
    // an empty [initial] section is the zero function
    let initial = match sections.get("initial") {
        Some(lines) => parse_poly(lines, &gens, base)?.unwrap_or_else(|| TrigPolynomial::zero(gens.clone())),
        None => return Err(missing("initial")),
    };
    let initial_b = match sections.get("initial_b") {
        Some(lines) => Some(parse_poly(lines, &gens, base)?.unwrap_or_else(|| TrigPolynomial::zero(gens.clone()))),
        None => None,
    };

    let (noise, seed) = parse_noise(get("noise"), &gens)?;
    solver.noise = noise;
    solver.seed = seed;

    let mut columns = vec![
        Column::Observable(Observable::L1),
        Column::Observable(Observable::L2),
        Column::Observable(Observable::Mean),
        Column::Observable(Observable::Hs),
        Column::EntropyMin,
    ];
    for l in get("observables") {
        match l.key {
            "columns" => {
                columns = l
                    .args
                    .iter()
                    .map(|a| match *a {
                        "entropy_min" => Ok(Column::EntropyMin),
                        other => other.parse().map(Column::Observable).map_err(|e| l.err(e.to_string())),
                    })
                    .collect::<Result<_, _>>()?;
            }
            _ => return Err(l.unknown("observables")),
        }
    }

    let experiment = parse_experiment(get("experiment"))?;
    solver.validate().map_err(|e| CliError::ConfigParse {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(RunConfig {
        solver,
        gens,
        flux,
        initial,
        initial_b,
        columns,
        experiment,
    })
}

fn parse_flux(lines: &[Line<'_>], dim: usize) -> Result<FluxModel, CliError> {
    let mut family = None;
    let mut vector = None;
    let mut coeffs: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut last = 0;
    for l in lines {
        last = l.no;
        match l.key {
            "family" => family = Some((l.one()?.to_string(), l.no)),
            "velocity" | "direction" => vector = Some(l.floats()?),
            // coeff k c₁ … c_N: vector coefficient of ξᵏ
            "coeff" => {
                let (k, rest) = l.args.split_first().ok_or_else(|| l.err("coeff needs a degree"))?;
                let k: usize = k.parse().map_err(|_| l.err(format!("bad degree {k:?}")))?;
                let c = rest
                    .iter()
                    .map(|a| parse_float(a).map_err(|m| l.err(m)))
                    .collect::<Result<Vec<_>, _>>()?;
                coeffs.insert(k, c);
            }
            _ => return Err(l.unknown("flux")),
        }
    }
    let (family, fline) = family.ok_or_else(|| missing("flux"))?;
    let err = |message: String| CliError::ConfigParse { line: fline, message };
    let fm = match family.as_str() {
        "linear" => FluxModel::linear(vector.ok_or_else(|| err("linear flux needs velocity".into()))?),
        "directional-burgers" => {
            FluxModel::directional_burgers(vector.ok_or_else(|| err("burgers flux needs direction".into()))?)
        }
        "custom-polynomial" => {
            let degree = coeffs.keys().next_back().copied().ok_or_else(|| err("no coeff lines".into()))?;
            let all = (0..=degree)
                .map(|k| coeffs.get(&k).cloned().unwrap_or_else(|| vec![0.0; dim]))
                .collect();
            FluxModel::polynomial(all)
        }
        other => return Err(err(format!("unknown flux family {other:?}"))),
    }
    .map_err(|e| CliError::ConfigParse {
        line: last,
        message: e.to_string(),
    })?;
    if fm.ambient_dim() != dim {
        return Err(err(format!("flux lives in dimension {}, generators in {dim}", fm.ambient_dim())));
    }
    Ok(fm)
}

/// `mode n₁ … n_P re im` adds `c e_n + conj(c) e_{−n}`; `file PATH` reads a
/// serialized polynomial.
fn parse_poly(
    lines: &[Line<'_>],
    gens: &Arc<GeneratorSet>,
    base: &Path,
) -> Result<Option<TrigPolynomial>, CliError> {
    if lines.is_empty() {
        return Ok(None);
    }
    let p = gens.rank();
    let mut modes = Vec::new();
    let mut from_file: Option<TrigPolynomial> = None;
    for l in lines {
        match l.key {
            "mode" => modes.push(parse_mode(l, p)?),
            "file" => {
                let path: PathBuf = base.join(l.one()?);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| l.err(format!("cannot read {}: {e}", path.display())))?;
                let poly = read_polynomial(&text).map_err(|e| l.err(e.to_string()))?;
                if **poly.gens() != **gens {
                    return Err(l.err("polynomial file uses different generators"));
                }
                from_file = Some(poly);
            }
            _ => return Err(l.unknown("initial")),
        }
    }
    let line = lines[0].no;
    let mut poly = TrigPolynomial::from_real_modes(gens.clone(), modes)
        .map_err(|e| CliError::ConfigParse { line, message: e.to_string() })?;
    if let Some(f) = from_file {
        poly = poly.add(&f).map_err(|e| CliError::ConfigParse { line, message: e.to_string() })?;
    }
    Ok(Some(poly))
}

fn parse_mode(l: &Line<'_>, p: usize) -> Result<(FreqIndex, Complex64), CliError> {
    if l.args.len() != p + 2 {
        return Err(l.err(format!("expected {p} indices and re im")));
    }
    let n = l.args[..p]
        .iter()
        .map(|a| a.parse::<i32>().map_err(|_| l.err(format!("bad index {a:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let re = parse_float(l.args[p]).map_err(|m| l.err(m))?;
    let im = parse_float(l.args[p + 1]).map_err(|m| l.err(m))?;
    Ok((FreqIndex(n), Complex64::new(re, im)))
}

/// `K n` fixes the number of modes; `g k n₁ … n_P re im` adds a term to mode `k` (1-based).
fn parse_noise(lines: &[Line<'_>], gens: &Arc<GeneratorSet>) -> Result<(Option<NoiseModel>, u64), CliError> {
    let mut seed = 0;
    let mut k_decl = None;
    let mut terms: BTreeMap<usize, Vec<(FreqIndex, Complex64)>> = BTreeMap::new();
    let mut first = 0;
    for l in lines {
        if first == 0 {
            first = l.no;
        }
        match l.key {
            "seed" => seed = l.int()?,
            "K" => k_decl = Some((l.int::<usize>()?, l.no)),
            "g" => {
                let (k, rest) = l.args.split_first().ok_or_else(|| l.err("g needs a mode number"))?;
                let k: usize = k.parse().map_err(|_| l.err(format!("bad mode number {k:?}")))?;
                if k == 0 {
                    return Err(l.err("mode numbers start at 1"));
                }
                let sub = Line {
                    no: l.no,
                    key: l.key,
                    args: rest.to_vec(),
                };
                terms.entry(k).or_default().push(parse_mode(&sub, gens.rank())?);
            }
            _ => return Err(l.unknown("noise")),
        }
    }
    let k_max = terms.keys().next_back().copied().unwrap_or(0);
    let k = match k_decl {
        Some((k, line)) if k != k_max || terms.len() != k => {
            return Err(CliError::ConfigParse {
                line,
                message: format!("K = {k} but modes 1..={k_max} are given ({} distinct)", terms.len()),
            })
        }
        Some((k, _)) => k,
        None if terms.len() != k_max => {
            return Err(CliError::ConfigParse {
                line: first,
                message: "noise modes must be numbered 1..K without gaps".into(),
            })
        }
        None => k_max,
    };
    if k == 0 {
        return Ok((None, seed));
    }
    let modes = terms
        .into_values()
        .map(|t| TrigPolynomial::from_real_modes(gens.clone(), t))
        .collect::<Result<Vec<_>, _>>()
        .and_then(NoiseModel::build)
        .map_err(|e| CliError::ConfigParse {
            line: first,
            message: e.to_string(),
        })?;
    Ok((Some(modes), seed))
}

fn parse_experiment(lines: &[Line<'_>]) -> Result<Experiment, CliError> {
    let mut e = Experiment::default();
    for l in lines {
        match l.key {
            "seeds" => e.seeds = l.ints()?,
            "paths" => e.paths = l.int()?,
            "t_burn" => e.t_burn = Some(l.float()?),
            "deltas" => e.deltas = l.floats()?,
            "shells" => e.shells = l.ints()?,
            "scan_window" => e.scan_window = l.float()?,
            "xi_points" => e.xi_points = l.int()?,
            "radii" => e.radii = l.floats()?,
            "offset" => e.offset = l.floats()?,
            "points_per_unit" => e.points_per_unit = l.float()?,
            "mode" => {
                e.mode = match l.one()? {
                    "resolution" => ConvergenceMode::Resolution,
                    "viscosity" => ConvergenceMode::Viscosity,
                    other => return Err(l.err(format!("unknown convergence mode {other:?}"))),
                }
            }
            "resolutions" => e.resolutions = l.ints()?,
            "epsilons" => e.epsilons = l.floats()?,
            _ => return Err(l.unknown("experiment")),
        }
    }
    if e.seeds.is_empty() {
        return Err(CliError::ConfigParse {
            line: 0,
            message: "[experiment] seeds is empty".into(),
        });
    }
    Ok(e)
}
