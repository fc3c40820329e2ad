//! Flat `key = value` experiment files. Lists are comma separated, `#`
//! starts a comment, unknown and repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use trace_shape_core::mesh::{make_disk, make_square};
use trace_shape_core::trace_solver::SolverConfig;
use trace_shape_core::{MeshDomain, Point, YoungFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Constant,
    Window,
    Hole,
    SweepAlpha,
    Blowup,
    Capacity,
    Continuity,
    Symmetrize,
    YoungCheck,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Constant,
        Command::Window,
        Command::Hole,
        Command::SweepAlpha,
        Command::Blowup,
        Command::Capacity,
        Command::Continuity,
        Command::Symmetrize,
        Command::YoungCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Constant => "constant",
            Command::Window => "window",
            Command::Hole => "hole",
            Command::SweepAlpha => "sweep-alpha",
            Command::Blowup => "blowup",
            Command::Capacity => "capacity",
            Command::Continuity => "continuity",
            Command::Symmetrize => "symmetrize",
            Command::YoungCheck => "young-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainSpec {
    Disk { radius: f64, h: f64 },
    Square { side: f64, h: f64 },
}

impl DomainSpec {
    pub fn h(&self) -> f64 {
        match *self {
            DomainSpec::Disk { h, .. } | DomainSpec::Square { h, .. } => h,
        }
    }

    pub fn build(&self) -> trace_shape_core::Result<Arc<MeshDomain>> {
        Ok(Arc::new(match *self {
            DomainSpec::Disk { radius, h } => make_disk(radius, h)?,
            DomainSpec::Square { side, h } => make_square(side, h)?,
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Translate,
    Dilate,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: Command,
    pub domain: DomainSpec,
    pub g: YoungFunction,
    pub h: YoungFunction,
    pub alphas: Vec<f64>,
    pub eps: Vec<f64>,
    pub solver: SolverConfig,
    /// Space dimension for the compatibility check.
    pub dimension: u32,
    pub box_radius: f64,
    /// Obstacle radii for `capacity`; 0 means a single clamped vertex.
    pub radii: Vec<f64>,
    pub relaxed: bool,
    pub family: Family,
    pub half_side: f64,
    pub steps: usize,
    pub fields: Vec<String>,
    pub axis: Point,
    /// Also run the contiguous-arc oracle for `window`.
    pub oracle: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError { line, message: message.into() }
}

const KEYS: &[&str] = &[
    "command", "domain", "radius", "side", "h", "G", "H", "alpha", "eps", "seed", "max_iters", "tol_rel", "eps_reg",
    "step0", "armijo_c", "armijo_shrink", "N", "box_radius", "radii", "relaxed", "family", "half_side", "steps",
    "fields", "axis", "oracle",
];

struct Entries(BTreeMap<String, (usize, String)>);

impl Entries {
    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.0.get(key)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => {
                v.parse().map(Some).map_err(|_| err(Some(*line), format!("cannot parse {key} = {v}")))
            }
        }
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        match self.raw(key) {
            None => Ok(Vec::new()),
            Some((line, v)) => v
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| err(Some(*line), format!("cannot parse {key} entry '{}'", s.trim()))))
                .collect(),
        }
    }

    fn young(&self, key: &str) -> Result<Option<YoungFunction>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => YoungFunction::parse(v).map(Some).map_err(|e| err(Some(*line), format!("{key}: {e}"))),
        }
    }
}

fn tokenize(text: &str) -> Result<Entries, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| err(Some(i + 1), "expected key = value"))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(err(Some(i + 1), format!("unknown key '{k}'")));
        }
        if v.is_empty() {
            return Err(err(Some(i + 1), format!("empty value for '{k}'")));
        }
        if map.insert(k.to_string(), (i + 1, v.to_string())).is_some() {
            return Err(err(Some(i + 1), format!("duplicate key '{k}'")));
        }
    }
    Ok(Entries(map))
}

fn required<T>(v: Option<T>, key: &str, command: Command) -> Result<T, ConfigError> {
    v.ok_or_else(|| err(None, format!("'{}' needs key '{key}'", command.name())))
}

pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let e = tokenize(text)?;
    let name: String = e.get("command")?.ok_or_else(|| err(None, "missing key 'command'"))?;
    let command = Command::ALL
        .into_iter()
        .find(|c| c.name() == name)
        .ok_or_else(|| err(e.raw("command").map(|r| r.0), format!("unknown command '{name}'")))?;

    let h: f64 = e.or("h", 0.1)?;
    if !(h > 0.0) {
        return Err(err(e.raw("h").map(|r| r.0), "h must be positive"));
    }
    let domain = match e.or("domain", "disk".to_string())?.as_str() {
        "disk" => DomainSpec::Disk { radius: e.or("radius", 1.0)?, h },
        "square" => DomainSpec::Square { side: e.or("side", 1.0)?, h },
        other => return Err(err(e.raw("domain").map(|r| r.0), format!("unknown domain '{other}'"))),
    };

    let g = match e.young("G")? {
        Some(g) => g,
        None if command == Command::Symmetrize => YoungFunction::power(2.0),
        None => return Err(err(None, "missing key 'G'")),
    };
    let hh = e.young("H")?.unwrap_or_else(|| g.clone());

    let defaults = SolverConfig::default();
    let solver = SolverConfig {
        eps_reg: e.or("eps_reg", defaults.eps_reg)?,
        step0: e.or("step0", defaults.step0)?,
        armijo_c: e.or("armijo_c", defaults.armijo_c)?,
        armijo_shrink: e.or("armijo_shrink", defaults.armijo_shrink)?,
        max_iters: e.or("max_iters", defaults.max_iters)?,
        tol_rel: e.or("tol_rel", defaults.tol_rel)?,
        seed: e.or("seed", defaults.seed)?,
    };
    solver.validate().map_err(|x| err(None, x.to_string()))?;

    let alphas = e.list("alpha")?;
    let eps = e.list("eps")?;
    let radii = e.list("radii")?;
    match command {
        Command::Window | Command::Hole | Command::SweepAlpha | Command::Blowup if alphas.is_empty() => {
            return Err(err(None, format!("'{}' needs key 'alpha'", command.name())))
        }
        Command::Blowup if alphas.len() != 1 => return Err(err(None, "'blowup' takes a single alpha")),
        Command::Blowup if eps.is_empty() => required(None::<()>, "eps", command)?,
        Command::Capacity if radii.is_empty() => required(None::<()>, "radii", command)?,
        Command::Symmetrize if !matches!(domain, DomainSpec::Disk { .. }) => {
            return Err(err(None, "'symmetrize' needs domain = disk"))
        }
        _ => {}
    }
    if radii.iter().any(|r| !(*r >= 0.0)) {
        return Err(err(e.raw("radii").map(|r| r.0), "radii must be nonnegative"));
    }

    let family = match e.or("family", "translate".to_string())?.as_str() {
        "translate" => Family::Translate,
        "dilate" => Family::Dilate,
        other => return Err(err(e.raw("family").map(|r| r.0), format!("unknown family '{other}'"))),
    };
    let axis = match e.list("axis")?.as_slice() {
        [] => [1.0, 0.0],
        [x, y] if x.hypot(*y) > 0.0 => [*x, *y],
        _ => return Err(err(e.raw("axis").map(|r| r.0), "axis must be a nonzero pair x, y")),
    };
    let fields = match e.raw("fields") {
        None => Vec::new(),
        Some((_, v)) => v.split(',').map(|s| s.trim().to_string()).collect(),
    };

    Ok(ExperimentConfig {
        command,
        domain,
        g,
        h: hh,
        alphas,
        eps,
        solver,
        dimension: e.or("N", 2)?,
        box_radius: e.or("box_radius", 2.0)?,
        radii,
        relaxed: e.or("relaxed", false)?,
        family,
        half_side: e.or("half_side", 0.2)?,
        steps: e.or("steps", 4)?,
        fields,
        axis,
        oracle: e.or("oracle", false)?,
    })
}
