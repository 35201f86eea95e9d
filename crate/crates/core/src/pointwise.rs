//! Pointwise 1-type test `ΔG = f (G + C)` on sampled Gauss map data.
//!
//! The fitter is generic (any set of `(G, ΔG)` pairs); the rotation-surface
//! specific pieces are the grid sampler, the structural classification of
//! flat surfaces and the post-fit diagnostics for the `a = 1/(s + s0)` branch.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{biv_inner, pluecker_residual, wedge, Bivector4};
use crate::numeric::{gauss_map_at, laplacian_numeric, LAPLACIAN_STEP};
use crate::surface::RotationSurface;

/// Minimum number of samples for [`second_kind_fit`]: six unknowns in `C`
/// plus one scale.
pub const MIN_FIT_SAMPLES: usize = 7;
pub const MAX_ITERATIONS: usize = 200;
pub const CONVERGENCE_TOL: f64 = 1e-12;
/// Samples whose Gauss map deviates from unit simple by more than this are rejected.
pub const SAMPLE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    /// Normalized residual below which `ΔG = f (G + C)` is accepted.
    pub residual: f64,
    /// `‖C‖` below which the fit counts as first kind.
    pub c_norm: f64,
    /// Relative `‖ΔG‖` floor (times `max ‖G‖`) for harmonic / excluded samples.
    pub harmonic: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            residual: 1e-3,
            c_norm: 1e-4,
            harmonic: 1e-6,
        }
    }
}

/// Where `ΔG` comes from when sampling a rotation surface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum LaplacianSource {
    /// The closed-form expression in invariants `a, b, c`.
    Closed,
    /// The finite-difference Laplace–Beltrami oracle with step `h`.
    Numeric { h: f64 },
}

impl Default for LaplacianSource {
    fn default() -> Self {
        LaplacianSource::Numeric { h: LAPLACIAN_STEP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussSample {
    pub id: usize,
    pub s: f64,
    pub t: f64,
    pub g: Bivector4,
    pub delta_g: Bivector4,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussSampleSet {
    samples: Vec<GaussSample>,
}

impl GaussSampleSet {
    /// Validates that every `G` is a unit simple bivector.
    pub fn new(samples: Vec<GaussSample>) -> Result<Self> {
        for (k, smp) in samples.iter().enumerate() {
            let unit = (smp.g.norm() - 1.0).abs();
            let simple = pluecker_residual(&smp.g).abs();
            if !(unit <= SAMPLE_TOL && simple <= SAMPLE_TOL && smp.delta_g.is_finite()) {
                return Err(Error::InvalidSample {
                    index: k,
                    reason: format!("|‖G‖ − 1| = {unit:e}, Plücker residual {simple:e}"),
                });
            }
        }
        Ok(Self { samples })
    }

    /// Samples on the tensor grid `s_nodes × t_nodes`, `s` varying fastest.
    pub fn from_surface(
        surf: &RotationSurface,
        s_nodes: &[f64],
        t_nodes: &[f64],
        source: LaplacianSource,
    ) -> Result<Self> {
        let points: Vec<(f64, f64)> = t_nodes
            .iter()
            .flat_map(|&t| s_nodes.iter().map(move |&s| (s, t)))
            .collect();
        let samples = points
            .par_iter()
            .enumerate()
            .map(|(id, &(s, t))| {
                let (g, delta_g) = match source {
                    LaplacianSource::Closed => {
                        let f = surf.closed_frame(s, t)?;
                        (wedge(&f.e(0), &f.e(1)), surf.laplacian_gauss_closed_fixed(s, t)?)
                    }
                    LaplacianSource::Numeric { h } => {
                        (gauss_map_at(surf, s, t, h)?, laplacian_numeric(surf, s, t, h)?)
                    }
                };
                Ok(GaussSample {
                    id,
                    s,
                    t,
                    g,
                    delta_g,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples)
    }

    /// Cell-centred `n_s × n_t` grid over the surface ranges (full turn in `t`
    /// when the surface has no `t` range).
    pub fn from_grid(
        surf: &RotationSurface,
        n_s: usize,
        n_t: usize,
        source: LaplacianSource,
    ) -> Result<Self> {
        let t_range = surf.t_range().unwrap_or(crate::surface::FULL_TURN);
        Self::from_surface(
            surf,
            &surf.s_range().midpoints(n_s),
            &t_range.midpoints(n_t),
            source,
        )
    }

    pub fn samples(&self) -> &[GaussSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Same samples in a different order.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            samples: order.iter().map(|&k| self.samples[k]).collect(),
        }
    }

    fn harmonic_floor(&self, thr: &Thresholds) -> f64 {
        let scale = self.samples.iter().map(|s| s.g.norm()).fold(0.0, f64::max);
        thr.harmonic * scale
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    First,
    Second,
    Harmonic,
    None,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::First => "first",
            Kind::Second => "second",
            Kind::Harmonic => "harmonic",
            Kind::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstKindResult {
    pub holds: bool,
    pub f_samples: Vec<f64>,
    /// Largest `‖ΔG − ⟨ΔG, G⟩ G‖ / ‖ΔG‖` over non-vacuous samples.
    pub max_relative_defect: f64,
}

/// `ΔG_i ∥ G_i` at every sample, with `f_i = ⟨ΔG_i, G_i⟩`.
pub fn first_kind_test(set: &GaussSampleSet, thr: &Thresholds) -> FirstKindResult {
    let floor = set.harmonic_floor(thr);
    let mut worst: f64 = 0.0;
    let f_samples = set
        .samples
        .iter()
        .map(|smp| {
            let n = smp.delta_g.norm();
            if n <= floor {
                return 0.0;
            }
            let f = biv_inner(&smp.delta_g, &smp.g);
            worst = worst.max((smp.delta_g - smp.g * f).norm() / n);
            f
        })
        .collect();
    FirstKindResult {
        holds: worst <= thr.residual,
        f_samples,
        max_relative_defect: worst,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointwiseFit {
    pub kind: Kind,
    #[serde(rename = "C")]
    pub c: Bivector4,
    /// One value per sample in set order; 0 at excluded samples.
    pub f_samples: Vec<f64>,
    /// `√(Σ‖ΔG_i − f_i (G_i + C)‖² / Σ‖ΔG_i‖²)` over fitted samples.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Samples with `‖ΔG‖` under the harmonic floor, left out of the fit.
    pub excluded: usize,
    /// Which start produced the reported fit: `"zero"` or `"mean"`.
    pub start: &'static str,
    pub diagnostic: Option<String>,
    pub thresholds: Thresholds,
}

impl PointwiseFit {
    pub fn f_range(&self) -> (f64, f64) {
        self.f_samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &f| (lo.min(f), hi.max(f)))
    }
}

struct Als {
    c: Bivector4,
    f: Vec<f64>,
    residual: f64,
    iterations: usize,
    converged: bool,
}

fn optimal_f(active: &[&GaussSample], c: &Bivector4) -> Vec<f64> {
    active
        .iter()
        .map(|smp| {
            let v = smp.g + *c;
            let n2 = v.norm_sq();
            if n2 > 0.0 {
                biv_inner(&smp.delta_g, &v) / n2
            } else {
                0.0
            }
        })
        .collect()
}

fn objective(active: &[&GaussSample], f: &[f64], c: &Bivector4, total: f64) -> f64 {
    let r: f64 = active
        .iter()
        .zip(f)
        .map(|(smp, &fi)| (smp.delta_g - (smp.g + *c) * fi).norm_sq())
        .sum();
    (r / total).sqrt()
}

fn alternating_least_squares(active: &[&GaussSample], start: Bivector4) -> Als {
    let total: f64 = active.iter().map(|s| s.delta_g.norm_sq()).sum();
    let mut c = start;
    let mut f = optimal_f(active, &c);
    let mut residual = objective(active, &f, &c, total);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let denom: f64 = f.iter().map(|x| x * x).sum();
        if denom == 0.0 {
            break;
        }
        let mut num = Bivector4::ZERO;
        for (smp, &fi) in active.iter().zip(&f) {
            num += (smp.delta_g - smp.g * fi) * fi;
        }
        c = num * (1.0 / denom);
        f = optimal_f(active, &c);
        let next = objective(active, &f, &c, total);
        let change = (residual - next).abs();
        residual = next;
        if change < CONVERGENCE_TOL {
            converged = true;
            break;
        }
    }
    Als {
        c,
        f,
        residual,
        iterations,
        converged,
    }
}

/// `C = mean(ΔG_i / ⟨ΔG_i, G_i⟩ − G_i)` over samples where the projection is
/// well away from zero.
fn mean_start(active: &[&GaussSample]) -> Option<Bivector4> {
    let mut acc = Bivector4::ZERO;
    let mut n = 0usize;
    for smp in active {
        let p = biv_inner(&smp.delta_g, &smp.g);
        if p.abs() > 1e-3 * smp.delta_g.norm() {
            acc += smp.delta_g * (1.0 / p) - smp.g;
            n += 1;
        }
    }
    (n > 0).then(|| acc * (1.0 / n as f64))
}

/// Fits `f_i` and a constant `C` and classifies the result.
pub fn second_kind_fit(set: &GaussSampleSet, thr: &Thresholds) -> Result<PointwiseFit> {
    if set.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            got: set.len(),
            need: MIN_FIT_SAMPLES,
        });
    }
    let floor = set.harmonic_floor(thr);
    let mut fit = PointwiseFit {
        kind: Kind::None,
        c: Bivector4::ZERO,
        f_samples: vec![0.0; set.len()],
        residual: 0.0,
        iterations: 0,
        converged: true,
        excluded: 0,
        start: "zero",
        diagnostic: None,
        thresholds: *thr,
    };
    let (active_idx, active): (Vec<usize>, Vec<&GaussSample>) = set
        .samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.delta_g.norm() > floor)
        .unzip();
    fit.excluded = set.len() - active.len();
    if active.is_empty() {
        fit.kind = Kind::Harmonic;
        return Ok(fit);
    }
    if active.len() < MIN_FIT_SAMPLES {
        fit.diagnostic = Some(format!(
            "only {} of {} samples have ΔG above the harmonic floor",
            active.len(),
            set.len()
        ));
        return Ok(fit);
    }

    let mut best = alternating_least_squares(&active, Bivector4::ZERO);
    if let Some(c0) = mean_start(&active) {
        let retry = alternating_least_squares(&active, c0);
        if retry.residual < best.residual {
            best = retry;
            fit.start = "mean";
        }
    }
    for (k, &i) in active_idx.iter().enumerate() {
        fit.f_samples[i] = best.f[k];
    }
    fit.c = best.c;
    fit.residual = best.residual;
    fit.iterations = best.iterations;
    fit.converged = best.converged;
    fit.kind = if best.residual > thr.residual {
        Kind::None
    } else if best.c.norm() <= thr.c_norm {
        Kind::First
    } else {
        Kind::Second
    };
    if !best.converged && fit.kind == Kind::None {
        fit.diagnostic = Some(format!(
            "alternating least squares stopped after {MAX_ITERATIONS} iterations"
        ));
    }
    Ok(fit)
}

/// Structural reading of a flat rotation surface against the flat
/// classification: the circle family with `b0²λ² = 1` or a planar meridian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum FlatClass {
    /// `a ≡ 0`, `b ≡ c ≡ b0`: the circle profile, first kind with `f = 4 b0²`.
    CircleFamily { b0: f64 },
    /// `b ≡ c ≡ 0`: part of a plane.
    TotallyGeodesic,
    /// Any other flat profile (the `a = 1/(s + s0)`, `μ ≠ 0` branch).
    Excluded,
}

impl FlatClass {
    pub fn expected_kind(self) -> Kind {
        match self {
            FlatClass::CircleFamily { .. } => Kind::First,
            FlatClass::TotallyGeodesic => Kind::Harmonic,
            FlatClass::Excluded => Kind::None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatVerdict {
    pub max_abs_k: f64,
    pub structural: FlatClass,
    pub fit: PointwiseFit,
    pub agree: bool,
}

/// Tolerance on `|K|`, `|a|` and `|b − c|` for the structural reading.
pub const STRUCTURE_TOL: f64 = 1e-8;

/// Structural class from the invariants sampled at `s_nodes`.
pub fn flat_class(surf: &RotationSurface, s_nodes: &[f64]) -> Result<(f64, FlatClass)> {
    let inv = s_nodes
        .iter()
        .map(|&s| surf.invariants(s))
        .collect::<Result<Vec<_>>>()?;
    let max_k = inv
        .iter()
        .map(|v| (v.b * v.c - v.b * v.b).abs())
        .fold(0.0, f64::max);
    if max_k > STRUCTURE_TOL {
        return Err(Error::NotFlat(max_k));
    }
    let max = |g: &dyn Fn(&crate::surface::InvariantTriple) -> f64| {
        inv.iter().map(|v| g(v).abs()).fold(0.0, f64::max)
    };
    let b0 = inv.first().map_or(0.0, |v| v.b);
    let class = if max(&|v| v.b) <= STRUCTURE_TOL && max(&|v| v.c) <= STRUCTURE_TOL {
        FlatClass::TotallyGeodesic
    } else if max(&|v| v.a) <= STRUCTURE_TOL
        && max(&|v| v.b - b0) <= STRUCTURE_TOL
        && max(&|v| v.c - b0) <= STRUCTURE_TOL
    {
        FlatClass::CircleFamily { b0 }
    } else {
        FlatClass::Excluded
    };
    Ok((max_k, class))
}

/// Runs the numeric fit on `set` and compares it with the structural class
/// of `surf` on the set's `s` values. Non-flat surfaces are rejected.
pub fn classify_flat(
    surf: &RotationSurface,
    set: &GaussSampleSet,
    thr: &Thresholds,
) -> Result<FlatVerdict> {
    let mut s_nodes: Vec<f64> = set.samples.iter().map(|s| s.s).collect();
    s_nodes.sort_by(f64::total_cmp);
    s_nodes.dedup();
    let (max_abs_k, structural) = flat_class(surf, &s_nodes)?;
    let fit = second_kind_fit(set, thr)?;
    Ok(FlatVerdict {
        max_abs_k,
        agree: fit.kind == structural.expected_kind(),
        structural,
        fit,
    })
}

/// Residuals of the relations the `a = 1/(s + s0)`, `b = c = μ a` branch
/// forces on a hypothetical `(f, C)`, evaluated for a fitted `C` in the
/// closed frame. Each entry is a maximum over samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MuBranchDiagnostics {
    pub mu: f64,
    /// `⟨C, e1∧e4⟩`, `⟨C, e2∧e3⟩`, `⟨C, e3∧e4⟩` must vanish.
    pub normal_components: f64,
    /// `⟨C, e1∧e3⟩ + ⟨C, e2∧e4⟩ = 0`.
    pub antisymmetry: f64,
    /// `2a ⟨C, e1∧e3⟩ + μ a ⟨C, e1∧e2⟩ = 0`.
    pub derivative_relation: f64,
    /// `f = 4 (1 + μ²) a²` against the fitted `f`.
    pub f_formula: f64,
    /// `μ a³`, which the branch analysis shows must vanish.
    pub mu_a_cubed: f64,
}

/// Returns `None` when the surface is not on the `b = c = μ a`, `a ≠ 0` branch.
pub fn mu_branch_diagnostics(
    surf: &RotationSurface,
    set: &GaussSampleSet,
    fit: &PointwiseFit,
) -> Result<Option<MuBranchDiagnostics>> {
    let mut d = MuBranchDiagnostics {
        mu: f64::NAN,
        normal_components: 0.0,
        antisymmetry: 0.0,
        derivative_relation: 0.0,
        f_formula: 0.0,
        mu_a_cubed: 0.0,
    };
    for (smp, &f) in set.samples.iter().zip(&fit.f_samples) {
        let inv = surf.invariants(smp.s)?;
        if inv.a.abs() <= STRUCTURE_TOL || (inv.b - inv.c).abs() > STRUCTURE_TOL {
            return Ok(None);
        }
        let mu = inv.b / inv.a;
        if d.mu.is_nan() {
            d.mu = mu;
        } else if (mu - d.mu).abs() > 1e-6 * d.mu.abs().max(1.0) {
            return Ok(None);
        }
        let fr = surf.closed_frame(smp.s, smp.t)?;
        let cc = |i: usize, j: usize| biv_inner(&fit.c, &wedge(&fr.e(i), &fr.e(j)));
        let a = inv.a;
        d.normal_components = d
            .normal_components
            .max(cc(0, 3).abs())
            .max(cc(1, 2).abs())
            .max(cc(2, 3).abs());
        d.antisymmetry = d.antisymmetry.max((cc(0, 2) + cc(1, 3)).abs());
        d.derivative_relation = d
            .derivative_relation
            .max((2.0 * a * cc(0, 2) + mu * a * cc(0, 1)).abs());
        d.f_formula = d.f_formula.max((f - 4.0 * (1.0 + mu * mu) * a * a).abs());
        d.mu_a_cubed = d.mu_a_cubed.max((mu * a * a * a).abs());
    }
    Ok((!d.mu.is_nan()).then_some(d))
}
