//! Bicomplex numbers `x1 + x2 i + x3 j + x4 ij` (`i² = j² = −1`, `ij = ji`),
//! their 4×4 real matrix image, and group-structure checks for rotation
//! surfaces viewed as subsets of the hyperquadric `x1 x4 = x2 x3`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::Matrix4;
use serde::Serialize;

use crate::error::{Error, ParseError, Result};
use crate::exterior::Vec4;
use crate::profile::PolarProfile;

/// Relative tolerance for the group axioms and the polar-form rules.
pub const GROUP_TOL: f64 = 1e-10;
/// Relative tolerance for the matrix pattern and hyperquadric membership.
pub const PATTERN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Bicomplex {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conjugation {
    /// `(x1 − x2 i) + (x3 − x4 i) j`
    T1,
    /// `(x1 + x2 i) − (x3 + x4 i) j`
    T2,
    /// `(x1 − x2 i) − (x3 − x4 i) j`
    T3,
}

impl FromStr for Conjugation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t1" => Ok(Conjugation::T1),
            "t2" => Ok(Conjugation::T2),
            "t3" => Ok(Conjugation::T3),
            other => Err(Error::Config(format!(
                "unknown conjugation `{other}` (expected t1, t2 or t3)"
            ))),
        }
    }
}

impl Bicomplex {
    pub const ONE: Bicomplex = Bicomplex::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Bicomplex = Bicomplex::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Bicomplex = Bicomplex::new(0.0, 0.0, 1.0, 0.0);
    pub const IJ: Bicomplex = Bicomplex::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        Self { x1, x2, x3, x4 }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x1, self.x2, self.x3, self.x4]
    }

    /// Largest component magnitude.
    pub fn scale(self) -> f64 {
        self.to_array().iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn norm(self) -> f64 {
        self.to_array().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    pub fn conjugate(self, which: Conjugation) -> Self {
        let Bicomplex { x1, x2, x3, x4 } = self;
        match which {
            Conjugation::T1 => Self::new(x1, -x2, x3, -x4),
            Conjugation::T2 => Self::new(x1, x2, -x3, -x4),
            Conjugation::T3 => Self::new(x1, -x2, -x3, x4),
        }
    }

    /// `g(x)`, the image in the matrix algebra.
    pub fn to_matrix(self) -> Matrix4<f64> {
        let Bicomplex { x1, x2, x3, x4 } = self;
        #[rustfmt::skip]
        let m = Matrix4::new(
            x1, -x2, -x3,  x4,
            x2,  x1, -x4, -x3,
            x3, -x4,  x1, -x2,
            x4,  x3,  x2,  x1,
        );
        m
    }

    /// Inverse of [`to_matrix`](Self::to_matrix); the matrix must have the
    /// bicomplex pattern within `1e-12` (relative to its largest entry).
    pub fn from_matrix(m: &Matrix4<f64>) -> Result<Self> {
        let x = Self::new(m[(0, 0)], m[(1, 0)], m[(2, 0)], m[(3, 0)]);
        let dev = (x.to_matrix() - m).amax();
        if dev > PATTERN_TOL * m.amax().max(1.0) {
            return Err(Error::NotBicomplexMatrix(dev));
        }
        Ok(x)
    }

    /// `|x1 x4 − x2 x3| / scale²` (0 for the zero element).
    pub fn hyperquadric_residual(self) -> f64 {
        let s = self.scale();
        if s == 0.0 {
            return 0.0;
        }
        (self.x1 * self.x4 - self.x2 * self.x3).abs() / (s * s)
    }

    /// Nonzero with `x1 x4 = x2 x3` to `1e-12` relative.
    pub fn in_hyperquadric(self) -> bool {
        self.scale() > 0.0 && self.hyperquadric_residual() <= PATTERN_TOL
    }

    /// Inverse through the matrix image; zero divisors are rejected when
    /// `|det g(x)| < 1e-12 · scale⁴`.
    pub fn inverse(self) -> Result<Self> {
        let m = self.to_matrix();
        let s = self.scale();
        let det = m.determinant();
        let singular = || Error::ZeroDivisor(self.to_string());
        if s == 0.0 || det.abs() < PATTERN_TOL * s.powi(4) {
            return Err(singular());
        }
        let inv = m.try_inverse().ok_or_else(singular)?;
        let x = Self::new(inv[(0, 0)], inv[(1, 0)], inv[(2, 0)], inv[(3, 0)]);
        // the inverse of a pattern matrix keeps the pattern
        let dev = (x.to_matrix() - inv).amax();
        debug_assert!(dev <= 1e-8 * inv.amax().max(1.0), "inverse lost the pattern: {dev:e}");
        Ok(x)
    }
}

pub fn bc_add(x: Bicomplex, y: Bicomplex) -> Bicomplex {
    x + y
}

pub fn bc_scale(lambda: f64, x: Bicomplex) -> Bicomplex {
    x * lambda
}

pub fn bc_mul(x: Bicomplex, y: Bicomplex) -> Bicomplex {
    x * y
}

pub fn bc_inverse(x: Bicomplex) -> Result<Bicomplex> {
    x.inverse()
}

impl From<Vec4> for Bicomplex {
    fn from(v: Vec4) -> Self {
        Self::from_array(v.0)
    }
}

impl From<Bicomplex> for Vec4 {
    fn from(x: Bicomplex) -> Self {
        Vec4(x.to_array())
    }
}

impl Add for Bicomplex {
    type Output = Bicomplex;
    fn add(self, o: Bicomplex) -> Bicomplex {
        Self::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3, self.x4 + o.x4)
    }
}

impl Sub for Bicomplex {
    type Output = Bicomplex;
    fn sub(self, o: Bicomplex) -> Bicomplex {
        Self::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3, self.x4 - o.x4)
    }
}

impl Neg for Bicomplex {
    type Output = Bicomplex;
    fn neg(self) -> Bicomplex {
        self * -1.0
    }
}

impl Mul<f64> for Bicomplex {
    type Output = Bicomplex;
    fn mul(self, k: f64) -> Bicomplex {
        Self::new(self.x1 * k, self.x2 * k, self.x3 * k, self.x4 * k)
    }
}

impl Mul for Bicomplex {
    type Output = Bicomplex;
    fn mul(self, y: Bicomplex) -> Bicomplex {
        let Bicomplex { x1, x2, x3, x4 } = self;
        let Bicomplex {
            x1: y1,
            x2: y2,
            x3: y3,
            x4: y4,
        } = y;
        Self::new(
            x1 * y1 - x2 * y2 - x3 * y3 + x4 * y4,
            x1 * y2 + x2 * y1 - x3 * y4 - x4 * y3,
            x1 * y3 + x3 * y1 - x2 * y4 - x4 * y2,
            x1 * y4 + x4 * y1 + x2 * y3 + x3 * y2,
        )
    }
}

/// Canonical `a+bi+cj+dij` with all four terms and shortest round-trip
/// coefficients.
impl fmt::Display for Bicomplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let clean = |v: f64| if v == 0.0 { 0.0 } else { v };
        write!(f, "{}", clean(self.x1))?;
        for (v, unit) in [(self.x2, "i"), (self.x3, "j"), (self.x4, "ij")] {
            let v = clean(v);
            if v.is_sign_negative() {
                write!(f, "-{}{unit}", -v)?;
            } else {
                write!(f, "+{v}{unit}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Bicomplex {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, ParseError> {
        parse_bicomplex(s)
    }
}

/// Parses literals such as `1+2i-3j+0.5ij`, `-ij`, `2.5e-3j`. Terms may be
/// omitted or repeated (repeats add up); whitespace is ignored.
pub fn parse_bicomplex(text: &str) -> std::result::Result<Bicomplex, ParseError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let mut out = [0.0; 4];
    let mut terms = 0;
    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(ParseError::new(pos, "empty bicomplex literal"));
    }
    while pos < bytes.len() {
        let mut sign = 1.0;
        if bytes[pos] == b'+' || bytes[pos] == b'-' {
            if bytes[pos] == b'-' {
                sign = -1.0;
            }
            pos += 1;
            skip_ws(&mut pos);
        } else if terms > 0 {
            return Err(ParseError::new(pos, "expected `+` or `-` between terms"));
        }
        let start = pos;
        while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'.') {
            pos += 1;
        }
        if pos > start
            && pos < bytes.len()
            && (bytes[pos] == b'e' || bytes[pos] == b'E')
        {
            let mut q = pos + 1;
            if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                q += 1;
            }
            if q < bytes.len() && bytes[q].is_ascii_digit() {
                while q < bytes.len() && bytes[q].is_ascii_digit() {
                    q += 1;
                }
                pos = q;
            }
        }
        let coef = if pos > start {
            text[start..pos]
                .parse::<f64>()
                .map_err(|_| ParseError::new(start, format!("bad number `{}`", &text[start..pos])))?
        } else {
            1.0
        };
        skip_ws(&mut pos);
        let rest = &text[pos..];
        let (slot, len) = if rest.starts_with("ij") {
            (3, 2)
        } else if rest.starts_with('i') {
            (1, 1)
        } else if rest.starts_with('j') {
            (2, 1)
        } else {
            (0, 0)
        };
        if len == 0 && pos == start {
            return Err(ParseError::new(pos, "expected a number or one of i, j, ij"));
        }
        out[slot] += sign * coef;
        pos += len;
        terms += 1;
        skip_ws(&mut pos);
    }
    Ok(Bicomplex::from_array(out))
}

/// Points used by the group checks: every pair from `s_nodes × t_nodes`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupGrid {
    pub s_nodes: Vec<f64>,
    pub t_nodes: Vec<f64>,
}

impl GroupGrid {
    pub fn new(s_nodes: Vec<f64>, t_nodes: Vec<f64>) -> Self {
        Self { s_nodes, t_nodes }
    }

    fn points(&self) -> Vec<(f64, f64)> {
        self.s_nodes
            .iter()
            .flat_map(|&s| self.t_nodes.iter().map(move |&t| (s, t)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupCheckReport {
    pub points: usize,
    pub pairs: usize,
    /// `max ‖X(s1,t1) X(s2,t2) − X(s1+s2, t1+t2)‖`
    pub closure_residual: f64,
    /// `max ‖X(s,t) X(−s,−t) − 1‖`
    pub inverse_residual: f64,
    /// `‖X(0,0) − 1‖`
    pub identity_residual: f64,
    /// `max ‖inverse(X(s,t)) − X(−s,−t)‖` through the matrix image.
    pub inverse_formula_residual: f64,
    /// `max |x1 x4 − x2 x3| / scale²` over the sampled points.
    pub hyperquadric_residual: f64,
    pub closure_pass: bool,
    pub inverse_pass: bool,
    pub identity_pass: bool,
    pub pass: bool,
    /// Evaluation failures (domain errors, zero divisors), first few only.
    pub errors: Vec<String>,
}

const MAX_REPORTED_ERRORS: usize = 8;

/// Checks closure, inverses and identity of the surface map on `grid`.
/// A residual passes when it is at most `1e-10 · max(1, scale)` where
/// scale is the largest component magnitude involved.
pub fn group_axiom_check(
    map: &(dyn Fn(f64, f64) -> Result<Bicomplex> + Sync),
    grid: &GroupGrid,
) -> GroupCheckReport {
    let pts = grid.points();
    let mut rep = GroupCheckReport {
        points: pts.len(),
        pairs: pts.len() * pts.len(),
        closure_residual: 0.0,
        inverse_residual: 0.0,
        identity_residual: 0.0,
        inverse_formula_residual: 0.0,
        hyperquadric_residual: 0.0,
        closure_pass: true,
        inverse_pass: true,
        identity_pass: true,
        pass: true,
        errors: Vec::new(),
    };
    let mut errors = Vec::new();
    let eval = |s: f64, t: f64, errors: &mut Vec<String>| -> Option<Bicomplex> {
        match map(s, t) {
            Ok(x) if x.is_finite() => Some(x),
            Ok(_) => {
                errors.push(format!("non-finite value at (s, t) = ({s}, {t})"));
                None
            }
            Err(e) => {
                errors.push(format!("at (s, t) = ({s}, {t}): {e}"));
                None
            }
        }
    };
    let within = |res: f64, scale: f64| res <= GROUP_TOL * scale.max(1.0);

    match eval(0.0, 0.0, &mut errors) {
        Some(e) => {
            rep.identity_residual = (e - Bicomplex::ONE).norm();
            rep.identity_pass = within(rep.identity_residual, e.scale());
        }
        None => rep.identity_pass = false,
    }

    let values: Vec<Option<Bicomplex>> = pts.iter().map(|&(s, t)| eval(s, t, &mut errors)).collect();
    for (&(s, t), x) in pts.iter().zip(&values) {
        let (Some(x), Some(xm)) = (*x, eval(-s, -t, &mut errors)) else {
            rep.inverse_pass = false;
            continue;
        };
        rep.hyperquadric_residual = rep.hyperquadric_residual.max(x.hyperquadric_residual());
        let prod = x * xm;
        let r = (prod - Bicomplex::ONE).norm();
        rep.inverse_residual = rep.inverse_residual.max(r);
        rep.inverse_pass &= within(r, x.scale().max(xm.scale()).max(prod.scale()));
        match x.inverse() {
            Ok(inv) => {
                rep.inverse_formula_residual = rep.inverse_formula_residual.max((inv - xm).norm());
            }
            Err(e) => {
                errors.push(e.to_string());
                rep.inverse_pass = false;
            }
        }
    }

    for (p, x) in pts.iter().zip(&values) {
        for (q, y) in pts.iter().zip(&values) {
            let (Some(x), Some(y)) = (*x, *y) else {
                rep.closure_pass = false;
                continue;
            };
            let Some(sum) = eval(p.0 + q.0, p.1 + q.1, &mut errors) else {
                rep.closure_pass = false;
                continue;
            };
            let prod = x * y;
            let r = (prod - sum).norm();
            rep.closure_residual = rep.closure_residual.max(r);
            let scale = x.scale().max(y.scale()).max(sum.scale()).max(prod.scale());
            rep.closure_pass &= within(r, scale);
        }
    }
    rep.pass = rep.closure_pass && rep.inverse_pass && rep.identity_pass;
    errors.truncate(MAX_REPORTED_ERRORS);
    rep.errors = errors;
    rep
}

/// Residuals of the four addition/inversion identities a profile `(x, y)`
/// must satisfy for the rotation surface to be closed under the product:
/// `x(s1)x(s2) − y(s1)y(s2) = x(s1+s2)`, `x(s1)y(s2) + x(s2)y(s1) = y(s1+s2)`,
/// `x(s)/r² = x(−s)`, `−y(s)/r² = y(−s)`.
pub fn profile_group_identities(
    xy: &dyn Fn(f64) -> Result<(f64, f64)>,
    s_nodes: &[f64],
) -> Result<[f64; 4]> {
    let mut out = [0.0f64; 4];
    for &s1 in s_nodes {
        let (x1, y1) = xy(s1)?;
        let (xm, ym) = xy(-s1)?;
        let r2 = x1 * x1 + y1 * y1;
        out[2] = out[2].max((x1 / r2 - xm).abs());
        out[3] = out[3].max((-y1 / r2 - ym).abs());
        for &s2 in s_nodes {
            let (x2, y2) = xy(s2)?;
            let (xs, ys) = xy(s1 + s2)?;
            out[0] = out[0].max((x1 * x2 - y1 * y2 - xs).abs());
            out[1] = out[1].max((x1 * y2 + x2 * y1 - ys).abs());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LieVerdict {
    pub pass: bool,
    /// The rule that decided the verdict.
    pub rule: String,
    /// `max |u(s1+s2) − u(s1) u(s2)|`
    pub multiplicative_residual: f64,
    pub u_positive: bool,
    /// `max |θ(s1+s2) − θ(s1) − θ(s2)|` reduced mod 2π.
    pub angle_additivity_residual: f64,
    /// Whether `u` is constant on the samples.
    pub u_constant: Option<f64>,
    /// Verdict of [`group_axiom_check`] on the same surface, when supplied.
    pub group_check_pass: Option<bool>,
    pub agree: Option<bool>,
}

fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Syntactic subgroup verdict for a meridian in polar form
/// `u(s)(cos θ(s), sin θ(s))`: pass iff `u` is a positive homomorphism
/// `(ℝ, +) → (ℝ⁺, ·)` and `θ` is additive mod 2π on the sampled sums.
pub fn lie_subgroup_verdict(polar: &PolarProfile, s_nodes: &[f64]) -> LieVerdict {
    let u = |s: f64| (polar.radius)(s);
    let th = |s: f64| (polar.angle)(s);
    let mut mult: f64 = 0.0;
    let mut add: f64 = 0.0;
    let mut positive = true;
    let mut finite = true;
    let u0 = s_nodes.first().map_or(1.0, |&s| u(s));
    let mut constant = true;
    for &s1 in s_nodes {
        let (u1, t1) = (u(s1), th(s1));
        positive &= u1 > 0.0;
        constant &= (u1 - u0).abs() <= GROUP_TOL * u0.abs().max(1.0);
        for &s2 in s_nodes {
            let (u2, t2) = (u(s2), th(s2));
            let (us, ts) = (u(s1 + s2), th(s1 + s2));
            if !(us.is_finite() && ts.is_finite() && u1.is_finite() && u2.is_finite()) {
                finite = false;
                continue;
            }
            let scale = u1.abs().max(u2.abs()).max(us.abs()).max(1.0);
            mult = mult.max((us - u1 * u2).abs() / scale);
            add = add.max(wrap_angle(ts - t1 - t2).abs());
        }
    }
    let mult_ok = finite && mult <= GROUP_TOL;
    let angle_ok = finite && add <= GROUP_TOL;
    let (pass, rule) = if !finite {
        (false, "profile not evaluable at all sampled sums".to_string())
    } else if constant && (u0 - 1.0).abs() <= GROUP_TOL && angle_ok {
        (true, "unit radius: u ≡ 1 and θ linear".to_string())
    } else if constant && (u0 + 1.0).abs() <= GROUP_TOL {
        (false, "antipodal radius: u ≡ −1 violates closure".to_string())
    } else if constant && (u0.abs() - 1.0).abs() > GROUP_TOL {
        (false, format!("constant radius: |u| ≡ {} but a subgroup forces a unit circle", u0.abs()))
    } else if !(mult_ok && positive) {
        (false, "exponential radius fails: u is not a homomorphism (ℝ,+) → (ℝ⁺,·)".to_string())
    } else if !angle_ok {
        (false, "θ is not linear (mod 2π) on the sampled sums".to_string())
    } else {
        (true, "exponential radius: u a homomorphism (ℝ,+) → (ℝ⁺,·) and θ linear".to_string())
    };
    LieVerdict {
        pass,
        rule,
        multiplicative_residual: mult,
        u_positive: positive,
        angle_additivity_residual: add,
        u_constant: constant.then_some(u0),
        group_check_pass: None,
        agree: None,
    }
}

impl LieVerdict {
    pub fn cross_check(mut self, group: &GroupCheckReport) -> Self {
        self.group_check_pass = Some(group.pass);
        self.agree = Some(group.pass == self.pass);
        self
    }
}
