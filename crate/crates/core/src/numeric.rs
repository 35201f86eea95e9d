//! Numerical differential geometry of arbitrary immersions `X(s,t)` in E⁴.
//!
//! Nothing here uses the closed-form rotation-surface formulas; it is the
//! oracle those formulas are checked against. Partials come from central
//! differences, frames from Gram–Schmidt, the second fundamental form from
//! normal projection of second partials, and the Laplacian of the Gauss map
//! from the coordinate Laplace–Beltrami operator
//!
//! ```text
//! Δf = −g^{αβ} (∂_α ∂_β f − Γ^γ_{αβ} ∂_γ f),   Γ^γ_{αβ} = g^{γδ} ⟨X_αβ, X_δ⟩
//! ```
//!
//! with the positive sign convention (a round sphere's coordinate functions
//! are eigenfunctions with positive eigenvalue).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{wedge, Bivector4, Frame, Vec4};
use crate::profile::Interval;
use crate::surface::{rotate, RotationSurface, SecondFundamental};

/// Default step for [`numeric_jets`].
pub const JET_STEP: f64 = 1e-4;
/// Default step for [`laplacian_numeric`].
pub const LAPLACIAN_STEP: f64 = 1e-3;
/// Smallest accepted metric determinant `EG − F²`.
pub const MIN_METRIC_DET: f64 = 1e-12;

/// A surface map `(s, t) ↦ X(s, t) ∈ E⁴`.
pub trait Immersion: Sync {
    fn position(&self, s: f64, t: f64) -> Result<Vec4>;

    /// Parameter interval in `s`; `None` means unbounded.
    fn s_domain(&self) -> Option<Interval> {
        None
    }

    fn t_domain(&self) -> Option<Interval> {
        None
    }

    /// Exact first partials `(X_s, X_t)` when the map can supply them.
    /// The Laplacian oracle builds the Gauss map at its stencil nodes from
    /// these; without them it falls back to central differences.
    fn tangents(&self, _s: f64, _t: f64) -> Option<Result<(Vec4, Vec4)>> {
        None
    }
}

/// An immersion given by a closure.
pub struct FnImmersion<F> {
    map: F,
    s_domain: Option<Interval>,
    t_domain: Option<Interval>,
}

impl<F> FnImmersion<F>
where
    F: Fn(f64, f64) -> Vec4 + Sync,
{
    pub fn new(map: F) -> Self {
        Self {
            map,
            s_domain: None,
            t_domain: None,
        }
    }

    pub fn with_domains(map: F, s_domain: Option<Interval>, t_domain: Option<Interval>) -> Self {
        Self {
            map,
            s_domain,
            t_domain,
        }
    }
}

impl<F> Immersion for FnImmersion<F>
where
    F: Fn(f64, f64) -> Vec4 + Sync,
{
    fn position(&self, s: f64, t: f64) -> Result<Vec4> {
        Ok((self.map)(s, t))
    }

    fn s_domain(&self) -> Option<Interval> {
        self.s_domain
    }

    fn t_domain(&self) -> Option<Interval> {
        self.t_domain
    }
}

impl Immersion for RotationSurface {
    fn position(&self, s: f64, t: f64) -> Result<Vec4> {
        let (x, y) = self.profile().point(s)?;
        Ok(rotate(x, y, t))
    }

    fn s_domain(&self) -> Option<Interval> {
        Some(self.profile().domain())
    }

    fn tangents(&self, s: f64, t: f64) -> Option<Result<(Vec4, Vec4)>> {
        Some(self.profile().jets(s).map(|(x, y)| {
            let (st, ct) = t.sin_cos();
            (
                rotate(x.d1, y.d1, t),
                Vec4::new(-x.value * st, x.value * ct, -y.value * st, y.value * ct),
            )
        }))
    }
}

/// Position and coordinate partials at `(s, t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImmersionSample {
    pub s: f64,
    pub t: f64,
    pub position: Vec4,
    pub xs: Vec4,
    pub xt: Vec4,
    pub xss: Vec4,
    pub xst: Vec4,
    pub xtt: Vec4,
}

/// First fundamental form in `(s, t)` coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricComponents {
    /// `⟨X_s, X_s⟩`
    pub e: f64,
    /// `⟨X_s, X_t⟩`
    pub f: f64,
    /// `⟨X_t, X_t⟩`
    pub g: f64,
    pub det: f64,
}

impl MetricComponents {
    pub fn from_tangents(xs: &Vec4, xt: &Vec4) -> Self {
        let (e, f, g) = (xs.dot(xs), xs.dot(xt), xt.dot(xt));
        Self {
            e,
            f,
            g,
            det: e * g - f * f,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.e > 0.0 && self.det > MIN_METRIC_DET) {
            return Err(Error::DegenerateMetric(self.det));
        }
        Ok(())
    }

    /// `[[g^ss, g^st], [g^ts, g^tt]]`.
    pub fn inverse(&self) -> [[f64; 2]; 2] {
        let k = 1.0 / self.det;
        [[self.g * k, -self.f * k], [-self.f * k, self.e * k]]
    }
}

impl ImmersionSample {
    pub fn metric(&self) -> MetricComponents {
        MetricComponents::from_tangents(&self.xs, &self.xt)
    }
}

fn check_stencil<X: Immersion + ?Sized>(x: &X, s: f64, t: f64, reach: f64) -> Result<()> {
    if let Some(d) = x.s_domain() {
        if s - reach < d.lo || s + reach > d.hi {
            return Err(Error::OutOfRange {
                name: "s stencil",
                value: s,
                lo: d.lo + reach,
                hi: d.hi - reach,
            });
        }
    }
    if let Some(d) = x.t_domain() {
        if t - reach < d.lo || t + reach > d.hi {
            return Err(Error::OutOfRange {
                name: "t stencil",
                value: t,
                lo: d.lo + reach,
                hi: d.hi - reach,
            });
        }
    }
    Ok(())
}

/// Second-order central differences for all first and second partials.
pub fn numeric_jets<X: Immersion + ?Sized>(x: &X, s: f64, t: f64, h: f64) -> Result<ImmersionSample> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Config(format!("step must be positive, got {h}")));
    }
    check_stencil(x, s, t, h)?;
    let p = |ds: f64, dt: f64| x.position(s + ds, t + dt);
    let c = p(0.0, 0.0)?;
    let (sp, sm) = (p(h, 0.0)?, p(-h, 0.0)?);
    let (tp, tm) = (p(0.0, h)?, p(0.0, -h)?);
    let (pp, pm, mp, mm) = (p(h, h)?, p(h, -h)?, p(-h, h)?, p(-h, -h)?);
    let sample = ImmersionSample {
        s,
        t,
        position: c,
        xs: (sp - sm) * (0.5 / h),
        xt: (tp - tm) * (0.5 / h),
        xss: (sp - c * 2.0 + sm) * (1.0 / (h * h)),
        xtt: (tp - c * 2.0 + tm) * (1.0 / (h * h)),
        xst: (pp - pm - mp + mm) * (0.25 / (h * h)),
    };
    sample.metric().check()?;
    Ok(sample)
}

/// Orthonormal tangent pair: `e1 ∝ X_t`, `e2` the unit residual of `X_s`.
fn tangent_pair(xs: &Vec4, xt: &Vec4) -> Result<(Vec4, Vec4)> {
    MetricComponents::from_tangents(xs, xt).check()?;
    let e1 = xt.normalized();
    let e2 = (*xs - e1 * e1.dot(xs)).normalized();
    Ok((e1, e2))
}

/// Tangent pair from the sample, normals completed from the standard basis
/// (largest residual first), and `e4` signed so the frame is positively
/// oriented.
pub fn gram_schmidt_frame(sample: &ImmersionSample) -> Result<Frame> {
    let (e1, e2) = tangent_pair(&sample.xs, &sample.xt)?;
    let project = |v: Vec4, basis: &[Vec4]| basis.iter().fold(v, |acc, b| acc - *b * b.dot(&acc));
    let mut basis = vec![e1, e2];
    for _ in 0..2 {
        let best = (0..4)
            .map(|k| project(Vec4::basis(k), &basis))
            .max_by(|a, b| a.norm_sq().total_cmp(&b.norm_sq()))
            .unwrap();
        // re-project once more for numerical orthogonality
        let best = project(best, &basis);
        basis.push(best.normalized());
    }
    let mut frame = Frame([basis[0], basis[1], basis[2], basis[3]]);
    if frame.orientation() < 0.0 {
        frame.0[3] = -frame.0[3];
    }
    Ok(frame)
}

/// Replaces the normal pair of `frame` with the projections of `e3_ref`,
/// `e4_ref` onto its normal plane, orthonormalized in that order.
pub fn align_normals(frame: &Frame, e3_ref: &Vec4, e4_ref: &Vec4) -> Result<Frame> {
    let (n1, n2) = (frame.e(2), frame.e(3));
    let onto_normal = |v: &Vec4| n1 * n1.dot(v) + n2 * n2.dot(v);
    let e3 = onto_normal(e3_ref);
    if e3.norm() < 1e-8 {
        return Err(Error::Config("reference normal is tangent to the surface".into()));
    }
    let e3 = e3.normalized();
    let e4 = onto_normal(e4_ref);
    let e4 = e4 - e3 * e3.dot(&e4);
    if e4.norm() < 1e-8 {
        return Err(Error::Config("reference normals are parallel in the normal plane".into()));
    }
    Ok(Frame([frame.e(0), frame.e(1), e3, e4.normalized()]))
}

/// Coordinates `(α^s, α^t)` of the tangent frame vectors `e1`, `e2`.
fn tangent_coordinates(sample: &ImmersionSample, frame: &Frame) -> Result<[[f64; 2]; 2]> {
    let m = sample.metric();
    m.check()?;
    let inv = m.inverse();
    Ok(std::array::from_fn(|i| {
        let e = frame.e(i);
        let rhs = [e.dot(&sample.xs), e.dot(&sample.xt)];
        [
            inv[0][0] * rhs[0] + inv[0][1] * rhs[1],
            inv[1][0] * rhs[0] + inv[1][1] * rhs[1],
        ]
    }))
}

/// `h^r_ik = ⟨X_μν α_i^μ α_k^ν, e_r⟩` for `r = 3, 4`; symmetric by construction.
pub fn second_fundamental_numeric(sample: &ImmersionSample, frame: &Frame) -> Result<SecondFundamental> {
    let alpha = tangent_coordinates(sample, frame)?;
    let second = |i: usize, k: usize| {
        let (a, b) = (alpha[i], alpha[k]);
        sample.xss * (a[0] * b[0])
            + sample.xst * (a[0] * b[1] + a[1] * b[0])
            + sample.xtt * (a[1] * b[1])
    };
    let mut h = SecondFundamental::default();
    for i in 0..2 {
        for k in i..2 {
            let v = second(i, k);
            let (h3, h4) = (v.dot(&frame.e(2)), v.dot(&frame.e(3)));
            h.h3[i][k] = h3;
            h.h3[k][i] = h3;
            h.h4[i][k] = h4;
            h.h4[k][i] = h4;
        }
    }
    Ok(h)
}

/// Gauss equation for an orthonormal tangent pair: `K = det h³ + det h⁴`.
pub fn gaussian_curvature_numeric(sample: &ImmersionSample, frame: &Frame) -> Result<f64> {
    Ok(second_fundamental_numeric(sample, frame)?.gaussian_curvature())
}

/// `G = e1 ∧ e2`.
pub fn gauss_map(_sample: &ImmersionSample, frame: &Frame) -> Bivector4 {
    wedge(&frame.e(0), &frame.e(1))
}

fn tangents_at<X: Immersion + ?Sized>(x: &X, s: f64, t: f64, h: f64) -> Result<(Vec4, Vec4)> {
    if let Some(exact) = x.tangents(s, t) {
        return exact;
    }
    let xs = (x.position(s + h, t)? - x.position(s - h, t)?) * (0.5 / h);
    let xt = (x.position(s, t + h)? - x.position(s, t - h)?) * (0.5 / h);
    Ok((xs, xt))
}

/// Gauss map from (exact or differenced) first partials.
pub fn gauss_map_at<X: Immersion + ?Sized>(x: &X, s: f64, t: f64, h: f64) -> Result<Bivector4> {
    let (xs, xt) = tangents_at(x, s, t, h)?;
    let (e1, e2) = tangent_pair(&xs, &xt)?;
    Ok(wedge(&e1, &e2))
}

/// Metric, its inverse and `⟨X_αβ, X_δ⟩` at the stencil centre.
struct LocalGeometry {
    inv: [[f64; 2]; 2],
    /// `christoffel[α][β][γ] = Γ^γ_{αβ}`
    christoffel: [[[f64; 2]; 2]; 2],
}

fn local_geometry<X: Immersion + ?Sized>(x: &X, s: f64, t: f64, h: f64) -> Result<LocalGeometry> {
    let (xs, xt) = tangents_at(x, s, t, h)?;
    let (xss, xst, xtt) = if x.tangents(s, t).is_some() {
        let (sp, _) = tangents_at(x, s + h, t, h)?;
        let (sm, _) = tangents_at(x, s - h, t, h)?;
        let (tps, tpt) = tangents_at(x, s, t + h, h)?;
        let (tms, tmt) = tangents_at(x, s, t - h, h)?;
        (
            (sp - sm) * (0.5 / h),
            (tps - tms) * (0.5 / h),
            (tpt - tmt) * (0.5 / h),
        )
    } else {
        let j = numeric_jets(x, s, t, h)?;
        (j.xss, j.xst, j.xtt)
    };
    let metric = MetricComponents::from_tangents(&xs, &xt);
    metric.check()?;
    let inv = metric.inverse();
    let d = [xs, xt];
    let second = [[xss, xst], [xst, xtt]];
    let mut christoffel = [[[0.0; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let lowered = [second[a][b].dot(&d[0]), second[a][b].dot(&d[1])];
            for g in 0..2 {
                christoffel[a][b][g] = inv[g][0] * lowered[0] + inv[g][1] * lowered[1];
            }
        }
    }
    Ok(LocalGeometry { inv, christoffel })
}

/// Laplace–Beltrami operator applied componentwise to a vector-valued field.
fn laplace_beltrami<X, const N: usize>(
    x: &X,
    field: impl Fn(f64, f64) -> Result<[f64; N]>,
    s: f64,
    t: f64,
    h: f64,
) -> Result<[f64; N]>
where
    X: Immersion + ?Sized,
{
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Config(format!("step must be positive, got {h}")));
    }
    // field nodes sit at ±h, and their fallback tangents reach another h
    check_stencil(x, s, t, 2.0 * h)?;
    let geo = local_geometry(x, s, t, h)?;
    let f = |ds: f64, dt: f64| field(s + ds, t + dt);
    let c = f(0.0, 0.0)?;
    let (sp, sm, tp, tm) = (f(h, 0.0)?, f(-h, 0.0)?, f(0.0, h)?, f(0.0, -h)?);
    let (pp, pm, mp, mm) = (f(h, h)?, f(h, -h)?, f(-h, h)?, f(-h, -h)?);
    let h2 = h * h;
    let mut out = [0.0; N];
    for n in 0..N {
        let grad = [(sp[n] - sm[n]) / (2.0 * h), (tp[n] - tm[n]) / (2.0 * h)];
        let fss = (sp[n] - 2.0 * c[n] + sm[n]) / h2;
        let ftt = (tp[n] - 2.0 * c[n] + tm[n]) / h2;
        let fst = (pp[n] - pm[n] - mp[n] + mm[n]) / (4.0 * h2);
        let hess = [[fss, fst], [fst, ftt]];
        let acc: f64 = (0..4)
            .map(|k| {
                let (a, b) = (k / 2, k % 2);
                let gamma = &geo.christoffel[a][b];
                geo.inv[a][b] * (hess[a][b] - gamma[0] * grad[0] - gamma[1] * grad[1])
            })
            .sum();
        out[n] = -acc;
    }
    Ok(out)
}

/// `ΔG` at `(s, t)` in the fixed basis, by finite differences with step `h`.
pub fn laplacian_numeric<X: Immersion + ?Sized>(x: &X, s: f64, t: f64, h: f64) -> Result<Bivector4> {
    let out = laplace_beltrami(x, |a, b| Ok(gauss_map_at(x, a, b, h)?.0), s, t, h)?;
    Ok(Bivector4(out))
}

/// Laplace–Beltrami of a scalar function on the surface.
pub fn laplacian_scalar_numeric<X: Immersion + ?Sized>(
    x: &X,
    f: impl Fn(f64, f64) -> f64,
    s: f64,
    t: f64,
    h: f64,
) -> Result<f64> {
    Ok(laplace_beltrami(x, |a, b| Ok([f(a, b)]), s, t, h)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::pluecker_residual;
    use crate::profile::parse_profile_spec;
    use crate::surface::{clifford_torus, FULL_TURN};

    fn surf(spec: &str) -> RotationSurface {
        RotationSurface::new(parse_profile_spec(spec).unwrap()).unwrap()
    }

    fn sphere(r: f64) -> FnImmersion<impl Fn(f64, f64) -> Vec4 + Sync> {
        FnImmersion::new(move |s: f64, t: f64| {
            Vec4::new(r * s.cos() * t.cos(), r * s.cos() * t.sin(), r * s.sin(), 0.0)
        })
    }

    #[test]
    fn clifford_tangent_at_origin() {
        let j = numeric_jets(&clifford_torus(), 0.5, 0.0, 1e-4).unwrap();
        // X_t at t = 0 is (0, cos s, 0, sin s)
        let expect = Vec4::new(0.0, 0.5f64.cos(), 0.0, 0.5f64.sin());
        assert!((j.xt - expect).max_abs() <= 1e-8);
    }

    #[test]
    fn affine_map_has_no_second_partials() {
        let a = FnImmersion::new(|s: f64, t: f64| {
            Vec4::new(1.0 + 2.0 * s - t, 0.5 * t, 3.0 - s, s + t)
        });
        let j = numeric_jets(&a, 0.3, -0.7, 1e-4).unwrap();
        for v in [j.xss, j.xst, j.xtt] {
            assert!(v.max_abs() <= 1e-6);
        }
        let frame = gram_schmidt_frame(&j).unwrap();
        let h = second_fundamental_numeric(&j, &frame).unwrap();
        assert!(h.max_abs_diff(&SecondFundamental::default()) <= 1e-6);
        assert!(laplacian_numeric(&a, 0.3, -0.7, 1e-3).unwrap().norm() <= 1e-6);
    }

    #[test]
    fn rotation_surface_metric() {
        let sf = surf("line(p=1,q=0,u=0,v=1)");
        let j = numeric_jets(&sf, 1.2, 0.4, 1e-4).unwrap();
        let m = j.metric();
        assert!((m.e - 1.0).abs() <= 1e-8);
        assert!(m.f.abs() <= 1e-8);
        assert!((m.g - (1.0 + 1.2 * 1.2)).abs() <= 1e-7);
    }

    #[test]
    fn frame_matches_closed_form_after_alignment() {
        let sf = surf("logspiral(mu=0.8,s0=1)");
        for (s, t) in [(0.3, 0.1), (1.4, 2.5), (0.9, -1.0)] {
            let j = numeric_jets(&sf, s, t, 1e-4).unwrap();
            let f = gram_schmidt_frame(&j).unwrap();
            assert!(f.gram_deviation() <= 1e-12);
            assert!(f.orientation() > 0.0);
            for n in [f.e(2), f.e(3)] {
                assert!(n.dot(&j.xs).abs() <= 1e-10 && n.dot(&j.xt).abs() <= 1e-10);
            }
            let closed = sf.closed_frame(s, t).unwrap();
            let aligned = align_normals(&f, &closed.e(2), &closed.e(3)).unwrap();
            for i in 0..4 {
                // tangents inherit the O(h²) truncation of the differenced partials
                assert!((aligned.e(i) - closed.e(i)).max_abs() <= 1e-8, "e{} at ({s},{t})", i + 1);
            }
            let h_num = second_fundamental_numeric(&j, &aligned).unwrap();
            let h_closed = sf.second_fundamental(s).unwrap();
            assert!(h_num.max_abs_diff(&h_closed) <= 1e-5);
        }
    }

    #[test]
    fn sphere_curvature() {
        for r in [0.5, 1.0, 3.0] {
            let sp = sphere(r);
            let j = numeric_jets(&sp, 0.4, 1.0, 1e-4).unwrap();
            let k = gaussian_curvature_numeric(&j, &gram_schmidt_frame(&j).unwrap()).unwrap();
            assert!((k - 1.0 / (r * r)).abs() <= 1e-5, "r = {r}: {k}");
        }
    }

    #[test]
    fn gauss_map_is_unit_simple() {
        let sf = surf("circle(lambda=2)");
        let j = numeric_jets(&sf, 1.0, 0.7, 1e-4).unwrap();
        let g = gauss_map(&j, &gram_schmidt_frame(&j).unwrap());
        assert!((g.norm() - 1.0).abs() <= 1e-10);
        assert!(pluecker_residual(&g).abs() <= 1e-10);
        // hand frame on the unit circle at (0, 0): e1 = ε2, e2 = ε3
        let c = FnImmersion::new(|s: f64, t: f64| rotate(s.cos(), s.sin(), t));
        let j = numeric_jets(&c, 0.0, 0.0, 1e-4).unwrap();
        let g = gauss_map(&j, &gram_schmidt_frame(&j).unwrap());
        assert!((g - Bivector4::basis(1, 2)).norm() <= 1e-8);
    }

    #[test]
    fn scalar_laplacian_matches_frame_form() {
        // On a rotation surface e1 = ∂t / r, e2 = ∂s, ∇_{e1} e1 = −a e2, ∇_{e2} e2 = 0,
        // so the frame definition reads Δf = −(f_ss + f_tt / r² + a f_s).
        let sf = surf("logspiral(mu=1.3,s0=1)");
        let f = |s: f64, t: f64| (2.0 * s).sin() * t.cos() + s * s;
        let (s, t): (f64, f64) = (0.9, 0.6);
        let inv = sf.invariants(s).unwrap();
        let (x, y) = sf.profile().point(s).unwrap();
        let r2 = x * x + y * y;
        let fs = 2.0 * (2.0f64 * s).cos() * t.cos() + 2.0 * s;
        let fss = -4.0 * (2.0f64 * s).sin() * t.cos() + 2.0;
        let ftt = -(2.0f64 * s).sin() * t.cos();
        let frame_form = -(fss + ftt / r2 + inv.a * fs);
        let coord = laplacian_scalar_numeric(&sf, f, s, t, 1e-3).unwrap();
        assert!((coord - frame_form).abs() <= 1e-5, "{coord} vs {frame_form}");
    }

    #[test]
    fn sphere_laplacian_sign() {
        // Δ of the height function on S²(r) is +2/r² times itself
        let sp = sphere(2.0);
        let z = |s: f64, _t: f64| 2.0 * s.sin();
        let v = laplacian_scalar_numeric(&sp, z, 0.5, 0.3, 1e-3).unwrap();
        assert!((v - 0.5 * z(0.5, 0.3)).abs() <= 1e-5);
    }

    #[test]
    fn stencil_and_metric_errors() {
        let c = clifford_torus();
        assert!(matches!(numeric_jets(&c, 0.0, 0.0, 1e-4), Err(Error::OutOfRange { .. })));
        assert!(matches!(laplacian_numeric(&c, 1e-3, 0.0, 1e-3), Err(Error::OutOfRange { .. })));
        assert!(numeric_jets(&c, 1.0, 0.0, 0.0).is_err());
        let degenerate = FnImmersion::new(|s: f64, _t: f64| Vec4::new(s, 0.0, 0.0, 0.0));
        assert!(matches!(
            numeric_jets(&degenerate, 0.0, 0.0, 1e-4),
            Err(Error::DegenerateMetric(_))
        ));
    }

    fn max_laplacian_error(sf: &RotationSurface, pts: &[(f64, f64)], h: f64) -> f64 {
        pts.iter()
            .map(|&(s, t)| {
                let num = laplacian_numeric(sf, s, t, h).unwrap();
                let closed = sf.laplacian_gauss_closed_fixed(s, t).unwrap();
                (num - closed).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn laplacian_oracle_converges() {
        for spec in [
            "circle(lambda=1)",
            "logspiral(mu=0.5)",
            "logspiral(mu=2)",
            "line(p=1,q=0,u=0,v=1)",
        ] {
            let sf = surf(spec);
            let d = sf.s_range();
            let pts: Vec<_> = (1..8)
                .map(|k| (d.lo + d.len() * k as f64 / 8.0, 0.37 * k as f64))
                .collect();
            let e1 = max_laplacian_error(&sf, &pts, 1e-3);
            let e2 = max_laplacian_error(&sf, &pts, 5e-4);
            assert!(e1 <= 1e-4, "{spec}: {e1}");
            assert!(e1 / e2 >= 3.0, "{spec}: ratio {}", e1 / e2);
        }
    }

    #[test]
    fn clifford_laplacian_is_four_g() {
        let c = clifford_torus();
        let v = laplacian_numeric(&c, 1.0, 2.0, 1e-3).unwrap();
        let g = gauss_map_at(&c, 1.0, 2.0, 1e-3).unwrap();
        assert!((v - g * 4.0).norm() <= 1e-4);
    }

    #[test]
    fn curvature_oracle_matches_closed_form() {
        for spec in ["circle(lambda=2)", "logspiral(mu=1)", "line(p=1,q=0,u=0,v=1)"] {
            let sf = surf(spec);
            let d = sf.s_range();
            for s in Interval::new(d.lo + 0.01, d.hi - 0.01).unwrap().linspace(20) {
                for t in FULL_TURN.linspace(20) {
                    let j = numeric_jets(&sf, s, t, 1e-4).unwrap();
                    let k = gaussian_curvature_numeric(&j, &gram_schmidt_frame(&j).unwrap()).unwrap();
                    assert!((k - sf.gaussian_curvature(s).unwrap()).abs() <= 1e-6, "{spec} at {s}");
                }
            }
        }
    }

    #[test]
    fn raw_vranceanu_is_flat() {
        let v = FnImmersion::new(|s: f64, t: f64| {
            let e = (0.3 * s).exp();
            rotate(e * s.cos(), e * s.sin(), t)
        });
        for s in [-0.8, 0.0, 0.5, 1.2] {
            let j = numeric_jets(&v, s, 0.4, 1e-4).unwrap();
            let k = gaussian_curvature_numeric(&j, &gram_schmidt_frame(&j).unwrap()).unwrap();
            assert!(k.abs() <= 1e-5, "{k}");
        }
    }

    #[test]
    fn jets_match_analytic_partials() {
        for spec in ["circle(lambda=1)", "logspiral(mu=1)", "line(p=1,q=0,u=0,v=1)"] {
            let sf = surf(spec);
            let s = sf.s_range().lo + 0.4;
            let j = numeric_jets(&sf, s, 0.9, 1e-4).unwrap();
            let (xs, xt) = sf.tangents(s, 0.9).unwrap().unwrap();
            assert!((j.xs - xs).max_abs() <= 1e-7 && (j.xt - xt).max_abs() <= 1e-7, "{spec}");
        }
    }
}
