//! Command implementations behind the CLI (and the Python bindings).
//!
//! Each `cmd_*` function takes a validated configuration and returns a
//! serializable report; the front ends only parse arguments and write files.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::bicomplex::{
    group_axiom_check, lie_subgroup_verdict, parse_bicomplex, profile_group_identities, Bicomplex,
    Conjugation, GroupCheckReport, GroupGrid, LieVerdict,
};
use crate::error::{Error, Result};
use crate::exterior::{pluecker_residual, Bivector4};
use crate::numeric::{
    gaussian_curvature_numeric, gram_schmidt_frame, laplacian_numeric, numeric_jets, JET_STEP,
    LAPLACIAN_STEP,
};
use crate::pointwise::{
    classify_flat, first_kind_test, mu_branch_diagnostics, second_kind_fit, FirstKindResult,
    GaussSampleSet, LaplacianSource, MuBranchDiagnostics, PointwiseFit, FlatVerdict,
    Thresholds,
};
use crate::profile::{arclength_reparametrize, parse_profile_spec, Interval, PolarProfile, ProfileCurve};
use crate::report::Tabular;
use crate::surface::{rotate, RotationSurface, DEFAULT_RHO_MIN, FULL_TURN};

pub const DEFAULT_GRID: (usize, usize) = (16, 16);
pub const DEFAULT_GROUP_GRID: (usize, usize) = (5, 5);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceChoice {
    Closed,
    Numeric,
}

/// Settings shared by `analyze`, `classify` and `laplacian`.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisConfig {
    pub profile: String,
    /// Overrides the profile's own domain.
    pub s_range: Option<Interval>,
    /// Defaults to one full turn.
    pub t_range: Option<Interval>,
    /// `(rows, cols)` = number of `s` and `t` nodes.
    pub grid: (usize, usize),
    /// Step of the Laplacian oracle.
    pub step: f64,
    pub thresholds: Thresholds,
    /// Which `ΔG` the classifier fits.
    pub source: SourceChoice,
    pub rho_min: f64,
}

impl AnalysisConfig {
    pub fn new(profile: impl Into<String>) -> Self {
        Self {
            profile: profile.into(),
            s_range: None,
            t_range: None,
            grid: DEFAULT_GRID,
            step: LAPLACIAN_STEP,
            thresholds: Thresholds::default(),
            source: SourceChoice::Numeric,
            rho_min: DEFAULT_RHO_MIN,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.0 < 2 || self.grid.1 < 2 {
            return Err(Error::Config(format!(
                "grid counts must be at least 2, got {}x{}",
                self.grid.0, self.grid.1
            )));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config(format!("step must be positive, got {}", self.step)));
        }
        let t = &self.thresholds;
        if !(t.residual > 0.0 && t.c_norm > 0.0 && t.harmonic > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(())
    }

    fn laplacian_source(&self) -> LaplacianSource {
        match self.source {
            SourceChoice::Closed => LaplacianSource::Closed,
            SourceChoice::Numeric => LaplacianSource::Numeric { h: self.step },
        }
    }

    fn t_nodes(&self) -> Vec<f64> {
        self.t_range.unwrap_or(FULL_TURN).midpoints(self.grid.1)
    }
}

/// How the configured profile became a surface.
#[derive(Clone, Debug, Serialize)]
pub struct SurfaceInfo {
    pub spec: String,
    pub label: String,
    pub s_range: Interval,
    pub t_range: Interval,
    pub unit_speed_input: bool,
    /// Set when a non-unit-speed profile was replaced by its arclength
    /// reparametrization; `s_range` then refers to arclength.
    pub reparametrized: bool,
}

/// Parses the profile, applies range overrides and reparametrizes by
/// arclength when the profile is not unit speed.
pub fn build_surface(cfg: &AnalysisConfig) -> Result<(RotationSurface, SurfaceInfo)> {
    cfg.validate()?;
    let mut profile = parse_profile_spec(&cfg.profile)?;
    if let Some(s) = cfg.s_range {
        profile = profile.with_domain(s)?;
    }
    let unit_speed_input = profile.is_unit_speed();
    if !unit_speed_input {
        profile = arclength_reparametrize(&profile, profile.domain())?;
    }
    let s_range = profile.domain();
    let t_range = cfg.t_range.unwrap_or(FULL_TURN);
    let info = SurfaceInfo {
        spec: cfg.profile.clone(),
        label: profile.label().to_string(),
        s_range,
        t_range,
        unit_speed_input,
        reparametrized: !unit_speed_input,
    };
    let surf = RotationSurface::with_ranges(profile, s_range, cfg.t_range, cfg.rho_min)?;
    Ok((surf, info))
}

fn grid_points(surf: &RotationSurface, cfg: &AnalysisConfig) -> Vec<(f64, f64)> {
    let s_nodes = surf.s_range().midpoints(cfg.grid.0);
    cfg.t_nodes()
        .into_iter()
        .flat_map(|t| s_nodes.iter().map(move |&s| (s, t)))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PointRecord {
    pub s: f64,
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub da: f64,
    pub db: f64,
    pub dc: f64,
    pub k_closed: f64,
    pub k_numeric: f64,
    pub k_discrepancy: f64,
    pub gauss_residual: f64,
    pub codazzi_residual: f64,
    pub frame_gram_deviation: f64,
    pub gauss_map_pluecker: f64,
    pub hyperquadric_residual: f64,
    pub delta_g_closed: Bivector4,
    pub delta_g_numeric: Bivector4,
    pub delta_g_discrepancy: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AnalyzeSummary {
    pub points: usize,
    pub max_abs_k_closed: f64,
    pub max_abs_k_numeric: f64,
    pub max_k_discrepancy: f64,
    pub max_gauss_residual: f64,
    pub max_codazzi_residual: f64,
    pub max_frame_gram_deviation: f64,
    pub max_gauss_map_pluecker: f64,
    pub max_hyperquadric_residual: f64,
    pub max_delta_g_discrepancy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeReport {
    pub config: AnalysisConfig,
    pub surface: SurfaceInfo,
    pub points: Vec<PointRecord>,
    pub summary: AnalyzeSummary,
}

fn analyze_point(surf: &RotationSurface, s: f64, t: f64, h: f64) -> Result<PointRecord> {
    let inv = surf.invariants(s)?;
    let (gauss_residual, codazzi_residual) = surf.gauss_codazzi_residual(s)?;
    let k_closed = surf.gaussian_curvature(s)?;
    let frame = surf.closed_frame(s, t)?;
    let jets = numeric_jets(surf, s, t, JET_STEP)?;
    let k_numeric = gaussian_curvature_numeric(&jets, &gram_schmidt_frame(&jets)?)?;
    let delta_g_closed = surf.laplacian_gauss_closed_fixed(s, t)?;
    let delta_g_numeric = laplacian_numeric(surf, s, t, h)?;
    let g = crate::exterior::wedge(&frame.e(0), &frame.e(1));
    Ok(PointRecord {
        s,
        t,
        a: inv.a,
        b: inv.b,
        c: inv.c,
        da: inv.da,
        db: inv.db,
        dc: inv.dc,
        k_closed,
        k_numeric,
        k_discrepancy: (k_closed - k_numeric).abs(),
        gauss_residual,
        codazzi_residual,
        frame_gram_deviation: frame.gram_deviation(),
        gauss_map_pluecker: pluecker_residual(&g).abs(),
        hyperquadric_residual: Bicomplex::from(surf.embed(s, t)?).hyperquadric_residual(),
        delta_g_closed,
        delta_g_numeric,
        delta_g_discrepancy: (delta_g_closed - delta_g_numeric).norm(),
    })
}

/// Closed form against the numerical oracle on the configured grid.
pub fn cmd_analyze(cfg: &AnalysisConfig) -> Result<AnalyzeReport> {
    let (surf, info) = build_surface(cfg)?;
    let points = grid_points(&surf, cfg)
        .par_iter()
        .map(|&(s, t)| analyze_point(&surf, s, t, cfg.step))
        .collect::<Result<Vec<_>>>()?;
    let mut sm = AnalyzeSummary {
        points: points.len(),
        ..Default::default()
    };
    for p in &points {
        sm.max_abs_k_closed = sm.max_abs_k_closed.max(p.k_closed.abs());
        sm.max_abs_k_numeric = sm.max_abs_k_numeric.max(p.k_numeric.abs());
        sm.max_k_discrepancy = sm.max_k_discrepancy.max(p.k_discrepancy);
        sm.max_gauss_residual = sm.max_gauss_residual.max(p.gauss_residual);
        sm.max_codazzi_residual = sm.max_codazzi_residual.max(p.codazzi_residual);
        sm.max_frame_gram_deviation = sm.max_frame_gram_deviation.max(p.frame_gram_deviation);
        sm.max_gauss_map_pluecker = sm.max_gauss_map_pluecker.max(p.gauss_map_pluecker);
        sm.max_hyperquadric_residual = sm.max_hyperquadric_residual.max(p.hyperquadric_residual);
        sm.max_delta_g_discrepancy = sm.max_delta_g_discrepancy.max(p.delta_g_discrepancy);
    }
    Ok(AnalyzeReport {
        config: cfg.clone(),
        surface: info,
        points,
        summary: sm,
    })
}

fn bivector_columns(prefix: &str) -> Vec<String> {
    crate::exterior::BASIS_LABELS
        .iter()
        .map(|l| format!("{prefix}_{l}"))
        .collect()
}

impl Tabular for AnalyzeReport {
    fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = [
            "s", "t", "a", "b", "c", "da", "db", "dc", "k_closed", "k_numeric", "k_discrepancy",
            "gauss_residual", "codazzi_residual", "frame_gram_deviation", "gauss_map_pluecker",
            "hyperquadric_residual",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        h.extend(bivector_columns("delta_g_closed"));
        h.extend(bivector_columns("delta_g_numeric"));
        h.push("delta_g_discrepancy".into());
        h
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .map(|p| {
                let mut r = vec![
                    p.s, p.t, p.a, p.b, p.c, p.da, p.db, p.dc, p.k_closed, p.k_numeric,
                    p.k_discrepancy, p.gauss_residual, p.codazzi_residual,
                    p.frame_gram_deviation, p.gauss_map_pluecker, p.hyperquadric_residual,
                ];
                r.extend(p.delta_g_closed.0);
                r.extend(p.delta_g_numeric.0);
                r.push(p.delta_g_discrepancy);
                r
            })
            .collect()
    }
}

/// The flat-surface cross-check, or why it does not apply.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FlatCheck {
    Applied(Box<FlatVerdict>),
    NotApplicable { reason: String },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub config: AnalysisConfig,
    pub surface: SurfaceInfo,
    pub samples: usize,
    pub classification: PointwiseFit,
    pub f_stats: FStats,
    pub first_kind: FirstKindResult,
    pub flat_check: FlatCheck,
    pub mu_branch: Option<MuBranchDiagnostics>,
    /// `(s, t)` of every sample, aligned with `classification.f_samples`.
    pub sample_points: Vec<[f64; 2]>,
}

/// Fits `ΔG = f (G + C)` on the grid and cross-checks flat surfaces
/// against the structural classification.
pub fn cmd_classify(cfg: &AnalysisConfig) -> Result<ClassifyReport> {
    let (surf, info) = build_surface(cfg)?;
    let set = GaussSampleSet::from_surface(
        &surf,
        &surf.s_range().midpoints(cfg.grid.0),
        &cfg.t_nodes(),
        cfg.laplacian_source(),
    )?;
    let thr = cfg.thresholds;
    let fit = second_kind_fit(&set, &thr)?;
    let first_kind = first_kind_test(&set, &thr);
    let flat_check = match classify_flat(&surf, &set, &thr) {
        Ok(v) => FlatCheck::Applied(Box::new(v)),
        Err(Error::NotFlat(k)) => FlatCheck::NotApplicable {
            reason: format!("surface is not flat (max |K| = {k:e})"),
        },
        Err(e) => return Err(e),
    };
    let mu_branch = mu_branch_diagnostics(&surf, &set, &fit)?;
    let n = fit.f_samples.len().max(1) as f64;
    let (min, max) = fit.f_range();
    let f_stats = FStats {
        min,
        max,
        mean: fit.f_samples.iter().sum::<f64>() / n,
    };
    Ok(ClassifyReport {
        config: cfg.clone(),
        surface: info,
        samples: set.len(),
        sample_points: set.samples().iter().map(|s| [s.s, s.t]).collect(),
        classification: fit,
        f_stats,
        first_kind,
        flat_check,
        mu_branch,
    })
}

impl Tabular for ClassifyReport {
    fn header(&self) -> Vec<String> {
        vec!["s".into(), "t".into(), "f".into()]
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.sample_points
            .iter()
            .zip(&self.classification.f_samples)
            .map(|(p, &f)| vec![p[0], p[1], f])
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LaplacianRecord {
    pub s: f64,
    pub t: f64,
    pub closed: Bivector4,
    pub numeric: Bivector4,
    pub error: f64,
    /// Error of the oracle at half the step.
    pub error_half_step: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LaplacianReport {
    pub config: AnalysisConfig,
    pub surface: SurfaceInfo,
    pub points: Vec<LaplacianRecord>,
    pub max_error: f64,
    pub max_error_half_step: f64,
    /// `max_error / max_error_half_step`; about 4 for a second-order stencil.
    pub convergence_ratio: f64,
}

/// Closed-form `ΔG` against the oracle at step `h` and `h/2`.
pub fn cmd_laplacian(cfg: &AnalysisConfig) -> Result<LaplacianReport> {
    let (surf, info) = build_surface(cfg)?;
    let h = cfg.step;
    let points = grid_points(&surf, cfg)
        .par_iter()
        .map(|&(s, t)| {
            let closed = surf.laplacian_gauss_closed_fixed(s, t)?;
            let numeric = laplacian_numeric(&surf, s, t, h)?;
            let half = laplacian_numeric(&surf, s, t, 0.5 * h)?;
            Ok(LaplacianRecord {
                s,
                t,
                closed,
                numeric,
                error: (numeric - closed).norm(),
                error_half_step: (half - closed).norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_error = points.iter().map(|p| p.error).fold(0.0, f64::max);
    let max_error_half_step = points.iter().map(|p| p.error_half_step).fold(0.0, f64::max);
    Ok(LaplacianReport {
        config: cfg.clone(),
        surface: info,
        points,
        max_error,
        max_error_half_step,
        convergence_ratio: max_error / max_error_half_step,
    })
}

impl Tabular for LaplacianReport {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["s".to_string(), "t".to_string()];
        h.extend(bivector_columns("closed"));
        h.extend(bivector_columns("numeric"));
        h.extend(["error".to_string(), "error_half_step".to_string()]);
        h
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .map(|p| {
                let mut r = vec![p.s, p.t];
                r.extend(p.closed.0);
                r.extend(p.numeric.0);
                r.extend([p.error, p.error_half_step]);
                r
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupCheckConfig {
    /// `clifford`, a family spec (`circle(lambda=2)`, `family:...`) or an
    /// `expr:` spec.
    pub surface: String,
    pub s_range: Interval,
    pub t_range: Interval,
    pub grid: (usize, usize),
}

impl GroupCheckConfig {
    pub fn new(surface: impl Into<String>) -> Self {
        Self {
            surface: surface.into(),
            s_range: Interval { lo: -1.0, hi: 1.0 },
            t_range: Interval { lo: -PI, hi: PI },
            grid: DEFAULT_GROUP_GRID,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupReport {
    pub config: GroupCheckConfig,
    pub label: String,
    pub grid: GroupGrid,
    pub group: GroupCheckReport,
    /// Residuals of the four profile identities (addition laws and
    /// inversion) or the evaluation error that stopped them.
    pub profile_identities: std::result::Result<[f64; 4], String>,
    /// Present when the meridian has a polar form `u(s)(cos θ, sin θ)`.
    pub lie_subgroup: Option<LieVerdict>,
}

type XyFn = Box<dyn Fn(f64) -> Result<(f64, f64)> + Send + Sync>;

/// Polar form `u(s)(cos θ(s), sin θ(s))` of a group-check surface spec.
pub fn polar_form(spec: &str) -> Result<PolarProfile> {
    if spec.trim() == "clifford" {
        return Ok(PolarProfile::new(|_| 1.0, |s| s));
    }
    let profile = parse_profile_spec(spec)?;
    profile
        .family()
        .and_then(|f| f.polar())
        .ok_or_else(|| Error::NotPolar(profile.label().to_string()))
}

fn resolve_group_surface(spec: &str) -> Result<(String, XyFn, Option<PolarProfile>)> {
    let label = if spec.trim() == "clifford" {
        "clifford torus".to_string()
    } else {
        parse_profile_spec(spec)?.label().to_string()
    };
    // the raw formula, evaluated wherever it is defined: group checks need
    // sums and negatives of parameters far outside any default domain
    match polar_form(spec) {
        Ok(p) => {
            let q = p.clone();
            Ok((label, Box::new(move |s| Ok(q.xy(s))), Some(p)))
        }
        Err(Error::NotPolar(_)) => {
            let profile: ProfileCurve = parse_profile_spec(spec)?;
            Ok((label, Box::new(move |s| profile.point(s)), None))
        }
        Err(e) => Err(e),
    }
}

/// Subgroup axioms of the surface inside the hyperquadric.
pub fn cmd_group_check(cfg: &GroupCheckConfig) -> Result<GroupReport> {
    if cfg.grid.0 < 1 || cfg.grid.1 < 1 {
        return Err(Error::Config("group-check grid must be non-empty".into()));
    }
    let (label, xy, polar) = resolve_group_surface(&cfg.surface)?;
    let grid = GroupGrid::new(cfg.s_range.linspace(cfg.grid.0), cfg.t_range.linspace(cfg.grid.1));
    let map = |s: f64, t: f64| -> Result<Bicomplex> {
        let (x, y) = xy(s)?;
        Ok(rotate(x, y, t).into())
    };
    let group = group_axiom_check(&map, &grid);
    let profile_identities = profile_group_identities(&xy, &grid.s_nodes).map_err(|e| e.to_string());
    let lie_subgroup = polar.map(|p| lie_subgroup_verdict(&p, &grid.s_nodes).cross_check(&group));
    Ok(GroupReport {
        config: cfg.clone(),
        label,
        grid,
        group,
        profile_identities,
        lie_subgroup,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum BicomplexOp {
    Mul(String, String),
    Inv(String),
    Conj(String, String),
    Matrix(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct BicomplexReport {
    pub op: &'static str,
    pub inputs: Vec<String>,
    /// Canonical `a+bi+cj+dij` text.
    pub result: String,
    pub value: Bicomplex,
    pub matrix: Option<[[f64; 4]; 4]>,
}

impl BicomplexReport {
    /// What the calculator prints in text mode.
    pub fn text(&self) -> String {
        match self.matrix {
            Some(m) => m
                .iter()
                .map(|row| row.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join("\n"),
            None => self.result.clone(),
        }
    }
}

fn literal(text: &str) -> Result<Bicomplex> {
    Ok(parse_bicomplex(text)?)
}

pub fn cmd_bicomplex(op: &BicomplexOp) -> Result<BicomplexReport> {
    let (name, inputs, value, matrix) = match op {
        BicomplexOp::Mul(a, b) => ("mul", vec![a.clone(), b.clone()], literal(a)? * literal(b)?, None),
        BicomplexOp::Inv(a) => ("inv", vec![a.clone()], literal(a)?.inverse()?, None),
        BicomplexOp::Conj(a, which) => {
            let c: Conjugation = which.parse()?;
            ("conj", vec![a.clone(), which.clone()], literal(a)?.conjugate(c), None)
        }
        BicomplexOp::Matrix(a) => {
            let x = literal(a)?;
            let m = x.to_matrix();
            // adding +0 turns the -0 entries of negated zeros into 0
            let rows = std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)] + 0.0));
            ("matrix", vec![a.clone()], x, Some(rows))
        }
    };
    Ok(BicomplexReport {
        op: name,
        inputs,
        result: value.to_string(),
        value,
        matrix,
    })
}
