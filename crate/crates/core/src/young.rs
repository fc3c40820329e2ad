//! Young functions: evaluation, derivatives, Lieberman growth indices,
//! Legendre conjugates, the Orlicz–Sobolev conjugate and the trace
//! compatibility test `H << Ψ`.
//!
//! Functions are described by a [`YoungExpr`] tree and promoted to a
//! validated [`YoungFunction`] once their growth indices satisfy
//! `1 < g⁻ ≤ g⁺ < ∞`.
//!
//! Expression grammar (whitespace insensitive):
//!
//! ```text
//! expr  := pow(p) | powlog(p,a,b) | powdivlog(p,a,b)
//!        | compose(expr,expr) | max(expr,...) | sum(term,...)
//! term  := [coef '*'] expr
//! ```
//!
//! `pow(p)` is `tᵖ/p`, so that `g(t) = tᵖ⁻¹`; `powlog(p,a,b)` is
//! `tᵖ(a|log t| + b)` and `powdivlog(p,a,b)` is `tᵖ/(a log(t+e) + b)`.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, integrate_panel};

/// Lower end of the index-estimation grid.
pub const GRID_MIN: f64 = 1e-6;
/// Upper end of the index-estimation grid.
pub const GRID_MAX: f64 = 1e6;
/// Number of log-spaced grid points.
pub const GRID_POINTS: usize = 600;

const DELTA2_CAP: f64 = 1e3;

/// Parametric family tree of a Young function.
#[derive(Debug, Clone, PartialEq)]
pub enum YoungExpr {
    Power { p: f64 },
    PowerLog { p: f64, a: f64, b: f64 },
    PowerDivLog { p: f64, a: f64, b: f64 },
    /// `outer ∘ inner`
    Compose(Box<YoungExpr>, Box<YoungExpr>),
    /// Non-negative linear combination.
    Sum(Vec<(f64, YoungExpr)>),
    Max(Vec<YoungExpr>),
}

impl YoungExpr {
    pub fn power(p: f64) -> Self {
        YoungExpr::Power { p }
    }

    /// `G(t)` without a domain check; `t` must be non-negative.
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            YoungExpr::Power { p } => t.powf(*p) / p,
            YoungExpr::PowerLog { p, a, b } => t.powf(*p) * (a * t.ln().abs() + b),
            YoungExpr::PowerDivLog { p, a, b } => t.powf(*p) / (a * (t + E).ln() + b),
            YoungExpr::Compose(outer, inner) => outer.value(inner.value(t)),
            YoungExpr::Sum(terms) => terms.iter().map(|(c, g)| c * g.value(t)).sum(),
            YoungExpr::Max(parts) => parts.iter().map(|g| g.value(t)).fold(0.0, f64::max),
        }
    }

    /// `g(t) = G'(t)` (right derivative at kinks) without a domain check.
    pub fn deriv(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            YoungExpr::Power { p } => t.powf(p - 1.0),
            YoungExpr::PowerLog { p, a, b } => {
                let l = t.ln();
                let sign = if l < 0.0 { -1.0 } else { 1.0 };
                t.powf(p - 1.0) * (p * (a * l.abs() + b) + a * sign)
            }
            YoungExpr::PowerDivLog { p, a, b } => {
                let d = a * (t + E).ln() + b;
                p * t.powf(p - 1.0) / d - t.powf(*p) * a / ((t + E) * d * d)
            }
            YoungExpr::Compose(outer, inner) => outer.deriv(inner.value(t)) * inner.deriv(t),
            YoungExpr::Sum(terms) => terms.iter().map(|(c, g)| c * g.deriv(t)).sum(),
            YoungExpr::Max(parts) => {
                let mut best = f64::NEG_INFINITY;
                let mut slope = 0.0;
                for g in parts {
                    let v = g.value(t);
                    let d = g.deriv(t);
                    if v > best || (v == best && d > slope) {
                        best = v;
                        slope = d;
                    }
                }
                slope
            }
        }
    }

    /// `G⁻¹(y)` by bisection on the monotone `value`, relative tolerance 1e-14.
    pub fn inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        if self.value(hi) < y {
            while self.value(hi) < y {
                lo = hi;
                hi *= 2.0;
                if !hi.is_finite() {
                    return f64::INFINITY;
                }
            }
        } else {
            while self.value(hi * 0.5) >= y && hi > f64::MIN_POSITIVE {
                hi *= 0.5;
            }
            lo = hi * 0.5;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.value(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

impl fmt::Display for YoungExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            YoungExpr::Power { p } => write!(f, "pow({p})"),
            YoungExpr::PowerLog { p, a, b } => write!(f, "powlog({p},{a},{b})"),
            YoungExpr::PowerDivLog { p, a, b } => write!(f, "powdivlog({p},{a},{b})"),
            YoungExpr::Compose(o, i) => write!(f, "compose({o},{i})"),
            YoungExpr::Sum(terms) => {
                write!(f, "sum(")?;
                for (k, (c, g)) in terms.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}*{g}")?;
                }
                write!(f, ")")
            }
            YoungExpr::Max(parts) => {
                write!(f, "max(")?;
                for (k, g) in parts.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for YoungExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a function name"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || b"+-.eE".contains(&self.src[self.pos]))
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let v: f64 = text.parse().map_err(|_| Error::Parse {
            pos: start,
            msg: format!("bad number '{text}'"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse { pos: start, msg: "non-finite number".into() });
        }
        Ok(v)
    }

    fn numbers(&mut self, n: usize) -> Result<Vec<f64>> {
        self.eat(b'(')?;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            if k > 0 {
                self.eat(b',')?;
            }
            out.push(self.number()?);
        }
        self.eat(b')')?;
        Ok(out)
    }

    fn expr(&mut self) -> Result<YoungExpr> {
        let at = self.pos;
        let name = self.ident()?;
        let e = match name.as_str() {
            "pow" => {
                let v = self.numbers(1)?;
                YoungExpr::Power { p: v[0] }
            }
            "powlog" => {
                let v = self.numbers(3)?;
                YoungExpr::PowerLog { p: v[0], a: v[1], b: v[2] }
            }
            "powdivlog" => {
                let v = self.numbers(3)?;
                YoungExpr::PowerDivLog { p: v[0], a: v[1], b: v[2] }
            }
            "compose" => {
                self.eat(b'(')?;
                let outer = self.expr()?;
                self.eat(b',')?;
                let inner = self.expr()?;
                self.eat(b')')?;
                YoungExpr::Compose(Box::new(outer), Box::new(inner))
            }
            "max" => {
                self.eat(b'(')?;
                let mut parts = vec![self.expr()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    parts.push(self.expr()?);
                }
                self.eat(b')')?;
                YoungExpr::Max(parts)
            }
            "sum" => {
                self.eat(b'(')?;
                let mut terms = vec![self.term()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                self.eat(b')')?;
                YoungExpr::Sum(terms)
            }
            other => {
                return Err(Error::Parse { pos: at, msg: format!("unknown family '{other}'") })
            }
        };
        check_parameters(&e).map_err(|msg| Error::Parse { pos: at, msg })?;
        Ok(e)
    }

    fn term(&mut self) -> Result<(f64, YoungExpr)> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let c = self.number()?;
                self.eat(b'*')?;
                Ok((c, self.expr()?))
            }
            _ => Ok((1.0, self.expr()?)),
        }
    }
}

fn check_parameters(e: &YoungExpr) -> std::result::Result<(), String> {
    match e {
        YoungExpr::Power { p } if *p < 1.0 => Err(format!("pow exponent {p} < 1")),
        YoungExpr::PowerLog { p, a, b } | YoungExpr::PowerDivLog { p, a, b } => {
            if *p <= 1.0 || *a <= 0.0 || *b <= 0.0 {
                Err(format!("need p>1, a>0, b>0 (got {p}, {a}, {b})"))
            } else {
                Ok(())
            }
        }
        YoungExpr::Sum(terms) if terms.iter().any(|(c, _)| *c < 0.0) => {
            Err("negative coefficient in sum".into())
        }
        YoungExpr::Sum(terms) if terms.iter().all(|(c, _)| *c == 0.0) => {
            Err("all coefficients zero".into())
        }
        _ => Ok(()),
    }
}

/// Numerically estimated Lieberman bounds of `tG'(t)/G(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthIndices {
    pub g_minus: f64,
    pub g_plus: f64,
    /// Doubling condition verdict; `false` iff `g_plus` is the `+∞` sentinel.
    pub delta2: bool,
}

/// Log-spaced sample grid on `[GRID_MIN, GRID_MAX]`.
pub fn sample_grid() -> Vec<f64> {
    log_grid(GRID_MIN, GRID_MAX, GRID_POINTS)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

fn growth_ratio(g: &YoungExpr, t: f64) -> f64 {
    t * g.deriv(t) / g.value(t)
}

/// inf/sup of `tG'(t)/G(t)` on the sample grid, refined around the extremal
/// grid points until stable to 1e-3. `Power(p)` returns `(p, p)` exactly.
pub fn growth_indices(g: &YoungExpr) -> GrowthIndices {
    if let YoungExpr::Power { p } = g {
        return GrowthIndices { g_minus: *p, g_plus: *p, delta2: true };
    }
    let grid = sample_grid();
    let ratios: Vec<f64> = grid.iter().map(|&t| growth_ratio(g, t)).collect();
    if ratios.iter().any(|r| !r.is_finite() || *r > DELTA2_CAP) {
        let g_minus = ratios.iter().copied().filter(|r| r.is_finite()).fold(f64::INFINITY, f64::min);
        return GrowthIndices { g_minus, g_plus: f64::INFINITY, delta2: false };
    }
    let (imin, _) = ratios.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &r)| {
        if r < acc.1 {
            (i, r)
        } else {
            acc
        }
    });
    let (imax, _) = ratios.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &r)| {
        if r > acc.1 {
            (i, r)
        } else {
            acc
        }
    });
    let g_minus = refine_extremum(g, &grid, imin, ratios[imin], false);
    let g_plus = refine_extremum(g, &grid, imax, ratios[imax], true);
    let delta2 = g_plus.is_finite() && g_plus <= DELTA2_CAP;
    GrowthIndices { g_minus, g_plus: if delta2 { g_plus } else { f64::INFINITY }, delta2 }
}

fn refine_extremum(g: &YoungExpr, grid: &[f64], idx: usize, start: f64, want_max: bool) -> f64 {
    let mut lo = grid[idx.saturating_sub(1)];
    let mut hi = grid[(idx + 1).min(grid.len() - 1)];
    let mut best = start;
    for _ in 0..12 {
        let local = log_grid(lo, hi, 65);
        let mut next = best;
        let mut arg = 0;
        for (k, &t) in local.iter().enumerate() {
            let r = growth_ratio(g, t);
            if (want_max && r > next) || (!want_max && r < next) {
                next = r;
                arg = k;
            }
        }
        let change = (next - best).abs();
        best = next;
        lo = local[arg.saturating_sub(1)];
        hi = local[(arg + 1).min(local.len() - 1)];
        if change < 1e-3 {
            break;
        }
    }
    best
}

/// A Young function whose growth indices satisfy `1 < g⁻ ≤ g⁺ < ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct YoungFunction {
    expr: YoungExpr,
    indices: GrowthIndices,
}

impl YoungFunction {
    pub fn new(expr: YoungExpr) -> Result<Self> {
        let grid = sample_grid();
        let mut prev = 0.0;
        for &t in &grid {
            let v = expr.value(t);
            if !v.is_finite() || v <= prev {
                return Err(Error::Inadmissible(format!(
                    "{expr} is not strictly increasing and positive at t={t:e}"
                )));
            }
            prev = v;
        }
        let lo = grid[0];
        let hi = grid[grid.len() - 1];
        if expr.value(lo) / lo >= 1.0 || expr.value(hi) / hi <= 1.0 {
            return Err(Error::Inadmissible(format!(
                "{expr}: G(t)/t must vanish at 0 and blow up at infinity"
            )));
        }
        let indices = growth_indices(&expr);
        if !indices.delta2 {
            return Err(Error::Inadmissible(format!("{expr} fails the doubling condition")));
        }
        if indices.g_minus <= 1.0 {
            return Err(Error::Inadmissible(format!(
                "{expr} has lower index {} <= 1",
                indices.g_minus
            )));
        }
        Ok(Self { expr, indices })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(s.parse()?)
    }

    pub fn power(p: f64) -> Self {
        Self::new(YoungExpr::power(p)).expect("power with p > 1 is admissible")
    }

    pub fn expr(&self) -> &YoungExpr {
        &self.expr
    }

    pub fn indices(&self) -> GrowthIndices {
        self.indices
    }

    /// Homogeneous exponent when the function is a bare power.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.expr {
            YoungExpr::Power { p } => Some(p),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        check_arg(t)?;
        Ok(self.expr.value(t))
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        check_arg(t)?;
        Ok(self.expr.deriv(t))
    }

    /// Unchecked `G(t)` for hot loops; `t` must be non-negative.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        self.expr.value(t)
    }

    /// Unchecked `g(t)`.
    #[inline]
    pub fn deriv(&self, t: f64) -> f64 {
        self.expr.deriv(t)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        self.expr.inverse(y)
    }

    /// Largest negative second difference of `G` on the sample grid,
    /// relative to the local function value. Zero for convex functions.
    pub fn convexity_defect(&self) -> f64 {
        let grid = sample_grid();
        grid.windows(3)
            .map(|w| {
                let (a, b, c) = (w[0], w[1], w[2]);
                let lam = (c - b) / (c - a);
                let chord = lam * self.value(a) + (1.0 - lam) * self.value(c);
                let gap = self.value(b) - chord;
                if gap > 0.0 {
                    gap / self.value(b)
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }

    /// `sup G(2t)/G(t)` over the sample grid.
    pub fn doubling_constant(&self) -> f64 {
        sample_grid().iter().map(|&t| self.value(2.0 * t) / self.value(t)).fold(0.0, f64::max)
    }
}

impl fmt::Display for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

impl FromStr for YoungFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

fn check_arg(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        Err(Error::Domain(format!("Young functions are defined on [0, ∞), got {t}")))
    } else {
        Ok(())
    }
}

/// Public entry point mirroring [`YoungFunction::eval`].
pub fn eval(g: &YoungFunction, t: f64) -> Result<f64> {
    g.eval(t)
}

/// Public entry point mirroring [`YoungFunction::derivative`].
pub fn derivative(g: &YoungFunction, t: f64) -> Result<f64> {
    g.derivative(t)
}

/// A Young function together with an evaluator for its complementary
/// function `G̃(t) = sup_s {st − G(s)}`.
#[derive(Debug, Clone)]
pub struct ConjugatePair {
    primal: YoungFunction,
}

impl ConjugatePair {
    pub fn primal(&self) -> &YoungFunction {
        &self.primal
    }

    /// Maximizer `s` of `st − G(s)`, i.e. the root of `g(s) = t`.
    pub fn argmax(&self, t: f64) -> Result<f64> {
        check_arg(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        let g = self.primal.expr();
        let mut lo = 0.0;
        let mut hi = 1.0;
        while g.deriv(hi) < t {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Numeric(format!("g is bounded below {t}; not invertible")));
            }
        }
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if g.deriv(mid) < t {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn dual_eval(&self, t: f64) -> Result<f64> {
        let s = self.argmax(t)?;
        Ok((s * t - self.primal.value(s)).max(0.0))
    }
}

pub fn conjugate(g: &YoungFunction) -> Result<ConjugatePair> {
    if g.indices().g_minus <= 1.0 {
        return Err(Error::Inadmissible("conjugate requires g⁻ > 1".into()));
    }
    Ok(ConjugatePair { primal: g.clone() })
}

/// `(G*)⁻¹(t) = ∫₀ᵗ G⁻¹(s)/s^{1+1/N} ds`, integrated in `x = ln s` with
/// unit Gauss–Legendre panels. Fails when the integral diverges at 0.
pub fn sobolev_conjugate_inverse(g: &YoungFunction, n: u32, t: f64) -> Result<f64> {
    check_arg(t)?;
    if n < 2 {
        return Err(Error::Domain(format!("dimension must be >= 2, got {n}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let rule = gauss_legendre(12);
    let inv_n = 1.0 / n as f64;
    let f = |x: f64| g.inverse(x.exp()) * (-x * inv_n).exp();
    let mut total = 0.0;
    let mut top = t.ln();
    loop {
        let bottom = top - 1.0;
        let piece = integrate_panel(&rule, bottom, top, f);
        total += piece;
        top = bottom;
        if piece <= 1e-16 * total && top < -1.0 {
            return Ok(total);
        }
        if top < -700.0 {
            let (f0, f1) = (f(top), f(top + 1.0));
            let rate = if f0 > 0.0 && f1 > 0.0 { (f1 / f0).ln() } else { f64::INFINITY };
            if rate > 1e-3 {
                return Ok(total + f0 / rate);
            }
            return Err(Error::ConditionViolated(format!(
                "∫₀ G⁻¹(s)/s^(1+1/{n}) ds diverges at 0 for {g} (integrand decay rate {rate:.3e})"
            )));
        }
    }
}

/// Outcome of the `H << Ψ` test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compatibility {
    Compatible,
    Incompatible,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct CompatibilityReport {
    pub verdict: Compatibility,
    /// `(t, Ψ⁻¹(t)/H⁻¹(t))` at `t = 10^k`.
    pub samples: Vec<(f64, f64)>,
    /// True when `(G*)⁻¹` was integrated from 1 because the integral from 0 diverges.
    pub tail_only: bool,
}

const COMPAT_TOL: f64 = 1e-3;

/// Decides `H << Ψ`, `Ψ = (G*)^{(N−1)/N}`, through the inverse-ratio limit
/// `Ψ⁻¹(t)/H⁻¹(t) → 0`: compatible when the ratio falls below 1e-3 and keeps
/// decreasing over three decades, incompatible when it does not decay over
/// the last twenty sampled decades.
pub fn check_trace_compatibility(g: &YoungFunction, h: &YoungExpr, n: u32) -> Result<CompatibilityReport> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension must be >= 2, got {n}")));
    }
    let nf = n as f64;
    let expo = nf / (nf - 1.0);
    let tail_only = sobolev_conjugate_inverse(g, n, 1.0).is_err();
    let base = if tail_only { 0.0 } else { sobolev_conjugate_inverse(g, n, 1.0)? };
    let rule = gauss_legendre(12);
    let f = |x: f64| g.inverse(x.exp()) * (-x / nf).exp();

    // decades of t such that s = t^{N/(N-1)} stays below 1e300
    let kmax = ((300.0 / expo).floor() as usize).min(300);
    let mut samples = Vec::with_capacity(kmax);
    let mut cumulative = base;
    let mut x_prev = 0.0;
    for k in 1..=kmax {
        let t = 10f64.powi(k as i32);
        let x_next = expo * t.ln();
        let panels = ((x_next - x_prev).ceil() as usize).max(1);
        let w = (x_next - x_prev) / panels as f64;
        for j in 0..panels {
            let a = x_prev + w * j as f64;
            cumulative += integrate_panel(&rule, a, a + w, f);
        }
        x_prev = x_next;
        let hinv = h.inverse(t);
        if !hinv.is_finite() || hinv <= 0.0 {
            break;
        }
        samples.push((t, cumulative / hinv));
    }
    let verdict = classify_ratio(&samples);
    Ok(CompatibilityReport { verdict, samples, tail_only })
}

fn classify_ratio(samples: &[(f64, f64)]) -> Compatibility {
    let r: Vec<f64> = samples.iter().map(|s| s.1).collect();
    if r.len() < 24 {
        return Compatibility::Inconclusive;
    }
    for k in 0..r.len().saturating_sub(3) {
        if r[k] < COMPAT_TOL {
            let decays = r[k..].windows(2).all(|w| w[1] <= w[0]);
            let window = r[k..k + 4].windows(2).all(|w| w[1] < w[0]);
            if decays && window {
                return Compatibility::Compatible;
            }
            break;
        }
    }
    let tail = &r[r.len() - 20..];
    if tail.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9)) {
        return Compatibility::Incompatible;
    }
    Compatibility::Inconclusive
}
