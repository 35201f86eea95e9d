//! Meridian curves `α(s) = (x(s), 0, y(s), 0)`.
//!
//! A profile is either a pair of expressions in `s` (user supplied or one of
//! the built-in families) or an arclength reparametrization of another
//! profile. Everything downstream consumes order-3 jets of `x` and `y`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, ParseError, Result};
use crate::expr::{parse_expr, parse_expr_with_params, Expr, Params};
use crate::jet::Jet3;

/// Unit-speed tolerance on `|x′² + y′² − 1|`.
pub const UNIT_SPEED_TOL: f64 = 1e-8;

/// Number of samples used when checking the unit-speed invariant.
pub const UNIT_SPEED_SAMPLES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!("degenerate interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.lo && s <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.lo >= self.lo && other.hi <= self.hi
    }

    /// `n` evenly spaced points including both ends.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![0.5 * (self.lo + self.hi)];
        }
        (0..n)
            .map(|i| self.lo + self.len() * i as f64 / (n - 1) as f64)
            .collect()
    }

    /// `n` cell-centred points, strictly inside the interval.
    pub fn midpoints(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| self.lo + self.len() * (i as f64 + 0.5) / n as f64)
            .collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Circle,
    LogSpiral,
    Line,
    Vranceanu,
}

impl FamilyKind {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "circle" => FamilyKind::Circle,
            "logspiral" => FamilyKind::LogSpiral,
            "line" => FamilyKind::Line,
            "vranceanu" => FamilyKind::Vranceanu,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Circle => "circle",
            FamilyKind::LogSpiral => "logspiral",
            FamilyKind::Line => "line",
            FamilyKind::Vranceanu => "vranceanu",
        }
    }

    fn allowed_params(self) -> &'static [&'static str] {
        match self {
            FamilyKind::Circle => &["lambda", "b0", "d"],
            FamilyKind::LogSpiral => &["mu", "s0"],
            FamilyKind::Line => &["p", "q", "u", "v"],
            FamilyKind::Vranceanu => &["k"],
        }
    }
}

/// A built-in meridian family with resolved parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// `λ (cos(b₀s + d), sin(b₀s + d))`; unit speed iff `b₀²λ² = 1`.
    Circle { lambda: f64, b0: f64, d: f64 },
    /// `λ (s + s₀)(cos(μ ln(s + s₀)), sin(μ ln(s + s₀)))`, `λ = 1/√(1 + μ²)`.
    #[serde(rename = "logspiral")]
    LogSpiral { mu: f64, s0: f64 },
    /// `(p + u s, q + v s)` with `u² + v² = 1`.
    Line { p: f64, q: f64, u: f64, v: f64 },
    /// `e^{ks}(cos s, sin s)`; not unit speed.
    Vranceanu { k: f64 },
}

/// Tolerance on the unit-speed constraints of circle and line families.
const FAMILY_CONSTRAINT_TOL: f64 = 1e-12;

impl Family {
    pub fn kind(&self) -> FamilyKind {
        match self {
            Family::Circle { .. } => FamilyKind::Circle,
            Family::LogSpiral { .. } => FamilyKind::LogSpiral,
            Family::Line { .. } => FamilyKind::Line,
            Family::Vranceanu { .. } => FamilyKind::Vranceanu,
        }
    }

    /// Resolves named parameters, applying defaults and constraint checks.
    pub fn from_params(kind: FamilyKind, params: &Params) -> Result<Self> {
        for key in params.keys() {
            if !kind.allowed_params().contains(&key.as_str()) {
                return Err(Error::Family(format!(
                    "unknown parameter `{key}` for {} (expected {:?})",
                    kind.name(),
                    kind.allowed_params()
                )));
            }
        }
        for (key, v) in params {
            if !v.is_finite() {
                return Err(Error::Family(format!("parameter `{key}` is not finite")));
            }
        }
        let get = |k: &str| params.get(k).copied();
        let require = |k: &str| {
            get(k).ok_or_else(|| {
                Error::Family(format!("{} requires parameter `{k}`", kind.name()))
            })
        };
        Ok(match kind {
            FamilyKind::Circle => {
                let lambda = require("lambda")?;
                if lambda == 0.0 {
                    return Err(Error::Family("circle requires lambda != 0".into()));
                }
                Family::Circle {
                    lambda,
                    b0: get("b0").unwrap_or(1.0 / lambda),
                    d: get("d").unwrap_or(0.0),
                }
            }
            FamilyKind::LogSpiral => Family::LogSpiral {
                mu: require("mu")?,
                s0: get("s0").unwrap_or(1.0),
            },
            FamilyKind::Line => {
                let (u, v) = (require("u")?, require("v")?);
                if (u * u + v * v - 1.0).abs() > FAMILY_CONSTRAINT_TOL {
                    return Err(Error::Family(format!(
                        "line direction must be unit: u² + v² = {}",
                        u * u + v * v
                    )));
                }
                Family::Line {
                    p: get("p").unwrap_or(0.0),
                    q: get("q").unwrap_or(0.0),
                    u,
                    v,
                }
            }
            FamilyKind::Vranceanu => Family::Vranceanu { k: require("k")? },
        })
    }

    /// The flat circle family; rejects `b₀²λ² ≠ 1`.
    pub fn flat(lambda: f64, b0: f64, d: f64) -> Result<Self> {
        if lambda == 0.0 || (b0 * b0 * lambda * lambda - 1.0).abs() > FAMILY_CONSTRAINT_TOL {
            return Err(Error::Family(format!(
                "flat family requires b0²λ² = 1, got {}",
                b0 * b0 * lambda * lambda
            )));
        }
        Ok(Family::Circle { lambda, b0, d })
    }

    pub fn is_unit_speed(&self) -> bool {
        match *self {
            Family::Circle { lambda, b0, .. } => {
                (b0 * b0 * lambda * lambda - 1.0).abs() <= FAMILY_CONSTRAINT_TOL
            }
            Family::LogSpiral { .. } | Family::Line { .. } => true,
            Family::Vranceanu { .. } => false,
        }
    }

    pub fn default_domain(&self) -> Interval {
        match *self {
            Family::Circle { b0, .. } => Interval {
                lo: 0.0,
                hi: 2.0 * PI / b0.abs().max(1e-300),
            },
            Family::LogSpiral { s0, .. } => {
                let lo = if s0 >= 0.5 { 0.0 } else { 0.5 - s0 };
                Interval { lo, hi: lo + 2.0 }
            }
            Family::Line { .. } => Interval { lo: 0.5, hi: 2.0 },
            Family::Vranceanu { .. } => Interval { lo: -1.0, hi: 1.0 },
        }
    }

    fn check_domain(&self, domain: &Interval) -> Result<()> {
        if let Family::LogSpiral { s0, .. } = *self {
            if domain.lo + s0 <= 0.0 {
                return Err(Error::Family(format!(
                    "logspiral needs s + s0 > 0 on the domain, got s0 = {s0} with s from {}",
                    domain.lo
                )));
            }
        }
        Ok(())
    }

    fn params(&self) -> Params {
        let pairs: Vec<(&str, f64)> = match *self {
            Family::Circle { lambda, b0, d } => vec![("lambda", lambda), ("b0", b0), ("d", d)],
            Family::LogSpiral { mu, s0 } => {
                vec![("mu", mu), ("s0", s0), ("lambda", 1.0 / (1.0 + mu * mu).sqrt())]
            }
            Family::Line { p, q, u, v } => vec![("p", p), ("q", q), ("u", u), ("v", v)],
            Family::Vranceanu { k } => vec![("k", k)],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    fn expressions(&self) -> (&'static str, &'static str) {
        match self {
            Family::Circle { .. } => ("lambda*cos(b0*s+d)", "lambda*sin(b0*s+d)"),
            Family::LogSpiral { .. } => (
                "lambda*(s+s0)*cos(mu*ln(s+s0))",
                "lambda*(s+s0)*sin(mu*ln(s+s0))",
            ),
            Family::Line { .. } => ("p+u*s", "q+v*s"),
            Family::Vranceanu { .. } => ("exp(k*s)*cos(s)", "exp(k*s)*sin(s)"),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Family::Circle { lambda, b0, d } => format!("circle(lambda={lambda},b0={b0},d={d})"),
            Family::LogSpiral { mu, s0 } => format!("logspiral(mu={mu},s0={s0})"),
            Family::Line { p, q, u, v } => format!("line(p={p},q={q},u={u},v={v})"),
            Family::Vranceanu { k } => format!("vranceanu(k={k})"),
        }
    }

    pub fn profile(&self) -> ProfileCurve {
        self.profile_on(self.default_domain())
            .expect("default domain satisfies family constraints")
    }

    pub fn profile_on(&self, domain: Interval) -> Result<ProfileCurve> {
        self.check_domain(&domain)?;
        let params = self.params();
        let names: Vec<&str> = params.keys().map(String::as_str).collect();
        let (xs, ys) = self.expressions();
        let x = parse_expr_with_params(xs, &names).expect("built-in expression parses");
        let y = parse_expr_with_params(ys, &names).expect("built-in expression parses");
        Ok(ProfileCurve {
            source: Source::Expr { x, y, params },
            domain,
            label: self.label(),
            unit_speed: self.is_unit_speed(),
            family: Some(*self),
        })
    }

    /// Polar form `(u(s), θ(s))` with `x = u cos θ`, `y = u sin θ`, when the
    /// family has one.
    pub fn polar(&self) -> Option<PolarProfile> {
        match *self {
            Family::Circle { lambda, b0, d } => Some(PolarProfile::new(
                move |_| lambda,
                move |s| b0 * s + d,
            )),
            Family::Vranceanu { k } => Some(PolarProfile::new(move |s| (k * s).exp(), |s| s)),
            Family::LogSpiral { mu, s0 } => {
                let lambda = 1.0 / (1.0 + mu * mu).sqrt();
                Some(PolarProfile::new(
                    move |s| lambda * (s + s0),
                    move |s| mu * (s + s0).ln(),
                ))
            }
            Family::Line { .. } => None,
        }
    }
}

/// Convenience wrapper: resolve parameters and build the default-domain profile.
pub fn make_family(kind: FamilyKind, params: &Params) -> Result<ProfileCurve> {
    Ok(Family::from_params(kind, params)?.profile())
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A meridian written as `u(s)·(cos θ(s), sin θ(s))`.
#[derive(Clone)]
pub struct PolarProfile {
    pub radius: ScalarFn,
    pub angle: ScalarFn,
}

impl PolarProfile {
    pub fn new(
        radius: impl Fn(f64) -> f64 + Send + Sync + 'static,
        angle: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            radius: Arc::new(radius),
            angle: Arc::new(angle),
        }
    }

    pub fn xy(&self, s: f64) -> (f64, f64) {
        let (u, th) = ((self.radius)(s), (self.angle)(s));
        (u * th.cos(), u * th.sin())
    }
}

impl fmt::Debug for PolarProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PolarProfile")
    }
}

#[derive(Clone, Debug)]
enum Source {
    Expr { x: Expr, y: Expr, params: Params },
    Reparam(Arc<Reparam>),
}

/// The meridian `α(s) = (x(s), 0, y(s), 0)` on a closed parameter interval.
#[derive(Clone, Debug)]
pub struct ProfileCurve {
    source: Source,
    domain: Interval,
    label: String,
    unit_speed: bool,
    family: Option<Family>,
}

impl ProfileCurve {
    /// A profile from user expressions. The unit-speed flag is detected
    /// numerically on the domain.
    pub fn from_exprs(x: Expr, y: Expr, params: Params, domain: Interval) -> Result<Self> {
        let label = format!("expr(x={x};y={y})");
        let mut p = ProfileCurve {
            source: Source::Expr { x, y, params },
            domain,
            label,
            unit_speed: false,
            family: None,
        };
        p.unit_speed = p.unit_speed_residual(UNIT_SPEED_SAMPLES)? <= UNIT_SPEED_TOL;
        Ok(p)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_unit_speed(&self) -> bool {
        self.unit_speed
    }

    pub fn family(&self) -> Option<&Family> {
        self.family.as_ref()
    }

    /// Same curve on a different parameter interval.
    pub fn with_domain(&self, domain: Interval) -> Result<Self> {
        if let Some(f) = &self.family {
            f.check_domain(&domain)?;
        }
        if let Source::Reparam(r) = &self.source {
            if !r.domain().contains_interval(&domain) {
                return Err(Error::Config(format!(
                    "reparametrized profile is only defined on {}",
                    r.domain()
                )));
            }
        }
        let mut p = self.clone();
        p.domain = domain;
        if p.family.is_none() && matches!(p.source, Source::Expr { .. }) {
            p.unit_speed = p.unit_speed_residual(UNIT_SPEED_SAMPLES)? <= UNIT_SPEED_TOL;
        }
        Ok(p)
    }

    /// Jets of `x` and `y` at `s`. Expression profiles evaluate wherever the
    /// formula is defined; reparametrized ones only on their domain.
    pub fn jets(&self, s: f64) -> Result<(Jet3, Jet3)> {
        match &self.source {
            Source::Expr { x, y, params } => Ok((x.eval_jet(s, params)?, y.eval_jet(s, params)?)),
            Source::Reparam(r) => r.jets(s),
        }
    }

    pub fn point(&self, s: f64) -> Result<(f64, f64)> {
        match &self.source {
            Source::Expr { x, y, params } => Ok((x.eval(s, params)?, y.eval(s, params)?)),
            Source::Reparam(r) => r.jets(s).map(|(x, y)| (x.value, y.value)),
        }
    }

    pub fn speed(&self, s: f64) -> Result<f64> {
        let (x, y) = self.jets(s)?;
        Ok((x.d1 * x.d1 + y.d1 * y.d1).sqrt())
    }

    /// Max `|x′² + y′² − 1|` over `n` evenly spaced samples of the domain.
    pub fn unit_speed_residual(&self, n: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for s in self.domain.linspace(n) {
            let (x, y) = self.jets(s)?;
            worst = worst.max((x.d1 * x.d1 + y.d1 * y.d1 - 1.0).abs());
        }
        Ok(worst)
    }
}

/// Parses `family:name(k=v,...)` or `expr:x=<expr>;y=<expr>;s=<lo>:<hi>`.
///
/// A bare `name(k=v,...)` is accepted as a family spec. Error offsets refer
/// to the full input string.
pub fn parse_profile_spec(text: &str) -> Result<ProfileCurve> {
    if let Some(rest) = text.strip_prefix("expr:") {
        return parse_expr_spec(rest, "expr:".len());
    }
    let (body, base) = match text.strip_prefix("family:") {
        Some(rest) => (rest, "family:".len()),
        None => (text, 0),
    };
    Ok(parse_family_spec(body, base)?.profile())
}

/// Parses `name(k=v,...)`; `base` is added to error offsets.
pub fn parse_family_spec(body: &str, base: usize) -> Result<Family> {
    let open = body.find('(');
    let name_end = open.unwrap_or(body.len());
    let name = body[..name_end].trim();
    let kind = FamilyKind::from_name(name).ok_or_else(|| {
        ParseError::new(base, format!("unknown profile family `{name}`"))
    })?;
    let mut params = Params::new();
    if let Some(open) = open {
        let close = body
            .rfind(')')
            .ok_or_else(|| ParseError::new(base + body.len(), "unbalanced `(` in family spec"))?;
        if close < open || !body[close + 1..].trim().is_empty() {
            return Err(ParseError::new(base + close + 1, "trailing characters after `)`").into());
        }
        let inner = &body[open + 1..close];
        let mut offset = base + open + 1;
        let empty = inner.trim().is_empty();
        for item in inner.split(',').filter(|_| !empty) {
            if item.trim().is_empty() {
                return Err(ParseError::new(offset, "empty parameter slot").into());
            }
            let eq = item.find('=').ok_or_else(|| {
                ParseError::new(offset, format!("expected `name=value`, found `{}`", item.trim()))
            })?;
            let key = item[..eq].trim().to_string();
            let value = parse_constant(&item[eq + 1..], offset + eq + 1)?;
            if params.insert(key.clone(), value).is_some() {
                return Err(ParseError::new(offset, format!("duplicate parameter `{key}`")).into());
            }
            offset += item.len() + 1;
        }
    }
    Family::from_params(kind, &params)
}

/// Parses `lo:hi` where both ends are constant expressions (`0:2*pi`).
pub fn parse_interval(text: &str) -> Result<Interval> {
    let colon = text
        .find(':')
        .ok_or_else(|| ParseError::new(text.len(), "expected <lo>:<hi>"))?;
    let lo = parse_constant(&text[..colon], 0)?;
    let hi = parse_constant(&text[colon + 1..], colon + 1)?;
    Interval::new(lo, hi)
}

/// A constant-valued expression such as `1/2` or `-pi`.
fn parse_constant(text: &str, base: usize) -> Result<f64> {
    let e = parse_expr(text).map_err(|e| ParseError::new(base + e.offset, e.message))?;
    if e.depends_on_s() {
        return Err(ParseError::new(base, "parameter values must not depend on s").into());
    }
    e.eval(0.0, &Params::new())
}

fn parse_expr_spec(body: &str, base: usize) -> Result<ProfileCurve> {
    let mut x = None;
    let mut y = None;
    let mut domain = None;
    let mut offset = base;
    for part in body.split(';') {
        let eq = part
            .find('=')
            .ok_or_else(|| ParseError::new(offset, "expected `key=value` in expr spec"))?;
        let key = part[..eq].trim();
        let value = &part[eq + 1..];
        let vbase = offset + eq + 1;
        match key {
            "x" | "y" => {
                let e = parse_expr(value).map_err(|e| ParseError::new(vbase + e.offset, e.message))?;
                if key == "x" {
                    x = Some(e);
                } else {
                    y = Some(e);
                }
            }
            "s" => {
                let colon = value
                    .find(':')
                    .ok_or_else(|| ParseError::new(vbase, "expected s=<lo>:<hi>"))?;
                let lo = parse_constant(&value[..colon], vbase)?;
                let hi = parse_constant(&value[colon + 1..], vbase + colon + 1)?;
                domain = Some(Interval::new(lo, hi).map_err(|_| {
                    ParseError::new(vbase, format!("empty s range {lo}:{hi}"))
                })?);
            }
            other => {
                return Err(ParseError::new(offset, format!("unknown key `{other}` in expr spec")).into())
            }
        }
        offset += part.len() + 1;
    }
    let end = base + body.len();
    let x = x.ok_or_else(|| ParseError::new(end, "expr spec is missing x=..."))?;
    let y = y.ok_or_else(|| ParseError::new(end, "expr spec is missing y=..."))?;
    let domain = domain.ok_or_else(|| ParseError::new(end, "expr spec is missing s=<lo>:<hi>"))?;
    ProfileCurve::from_exprs(x, y, Params::new(), domain)
}

/// Segments of the σ(s) lookup table.
const REPARAM_NODES: usize = 64;
const SIMPSON_TOL: f64 = 1e-14;
const SIMPSON_MAX_DEPTH: u32 = 40;
/// Speeds at or below this are treated as a singular parametrization.
const MIN_SPEED: f64 = 1e-12;

/// Arclength reparametrization of a profile: the result is unit speed on
/// `[0, L]` where `L` is the length of `p` over `range`.
pub fn arclength_reparametrize(p: &ProfileCurve, range: Interval) -> Result<ProfileCurve> {
    let r = Reparam::build(p.clone(), range)?;
    let domain = r.domain();
    Ok(ProfileCurve {
        label: format!("arclength({} on {range})", p.label),
        source: Source::Reparam(Arc::new(r)),
        domain,
        unit_speed: true,
        family: None,
    })
}

#[derive(Debug)]
struct Reparam {
    base: ProfileCurve,
    nodes: Vec<f64>,
    sigma: Vec<f64>,
}

impl Reparam {
    fn build(base: ProfileCurve, range: Interval) -> Result<Self> {
        let nodes = range.linspace(REPARAM_NODES + 1);
        let mut probe = nodes.clone();
        probe.extend(range.midpoints(4 * REPARAM_NODES));
        for &s in &probe {
            let v = base.speed(s)?;
            if v.is_nan() || v <= MIN_SPEED {
                return Err(Error::Reparametrization(format!("degenerate speed {v:e} at s = {s}")));
            }
        }
        let mut sigma = Vec::with_capacity(nodes.len());
        sigma.push(0.0);
        for w in nodes.windows(2) {
            let seg = integrate_speed(&base, w[0], w[1])?;
            sigma.push(sigma.last().unwrap() + seg);
        }
        Ok(Self { base, nodes, sigma })
    }

    fn length(&self) -> f64 {
        *self.sigma.last().unwrap()
    }

    fn domain(&self) -> Interval {
        Interval {
            lo: 0.0,
            hi: self.length(),
        }
    }

    fn arclength_at(&self, k: usize, s: f64) -> Result<f64> {
        Ok(self.sigma[k] + integrate_speed(&self.base, self.nodes[k], s)?)
    }

    /// Solves σ(s) = u by safeguarded secant/Newton steps inside a bracketing segment.
    fn invert(&self, u: f64) -> Result<f64> {
        let tol = 1e-12 * self.length();
        if u < -tol || u > self.length() + tol {
            return Err(Error::OutOfRange {
                name: "arclength",
                value: u,
                lo: 0.0,
                hi: self.length(),
            });
        }
        let u = u.clamp(0.0, self.length());
        let k = match self.sigma.partition_point(|&v| v <= u) {
            0 => 0,
            i => (i - 1).min(self.nodes.len() - 2),
        };
        let (mut lo, mut hi) = (self.nodes[k], self.nodes[k + 1]);
        let (slo, shi) = (self.sigma[k], self.sigma[k + 1]);
        if u <= slo {
            return Ok(lo);
        }
        if u >= shi {
            return Ok(hi);
        }
        // secant start
        let mut s = lo + (hi - lo) * (u - slo) / (shi - slo);
        for _ in 0..100 {
            let g = self.arclength_at(k, s)? - u;
            if g > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let step = g / self.base.speed(s)?;
            let mut next = s - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - s).abs() <= 4.0 * f64::EPSILON * s.abs().max(1.0) || hi - lo <= 4.0 * f64::EPSILON * s.abs().max(1.0) {
                return Ok(next);
            }
            s = next;
        }
        Err(Error::Reparametrization(format!("inversion did not converge at u = {u}")))
    }

    fn jets(&self, u: f64) -> Result<(Jet3, Jet3)> {
        let s = self.invert(u)?;
        let (x, y) = self.base.jets(s)?;
        let v2 = x.d1 * x.d1 + y.d1 * y.d1;
        let v = v2.sqrt();
        if v.is_nan() || v <= MIN_SPEED {
            return Err(Error::Reparametrization(format!("degenerate speed at s = {s}")));
        }
        // derivatives of the speed with respect to the original parameter
        let dv = (x.d1 * x.d2 + y.d1 * y.d2) / v;
        let ddv = (x.d2 * x.d2 + x.d1 * x.d3 + y.d2 * y.d2 + y.d1 * y.d3 - dv * dv) / v;
        // jet of s(u)
        let s_of_u = Jet3::new(
            s,
            1.0 / v,
            -dv / (v2 * v),
            -ddv / (v2 * v2) + 3.0 * dv * dv / (v2 * v2 * v),
        );
        Ok((
            s_of_u.compose(x.as_array()),
            s_of_u.compose(y.as_array()),
        ))
    }
}

fn integrate_speed(p: &ProfileCurve, a: f64, b: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let f = |s: f64| p.speed(s);
    let (fa, fm, fb) = (f(a)?, f(0.5 * (a + b))?, f(b)?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    adaptive_simpson(&f, a, b, fa, fm, fb, whole, SIMPSON_TOL, SIMPSON_MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}
