//! Closed-form geometry of `X(s,t) = (x cos t, x sin t, y cos t, y sin t)`.
//!
//! With `r² = x² + y²` and a unit-speed meridian, the adapted frame is
//! `e1 = X_t / r`, `e2 = X_s`, and everything else is expressed through
//!
//! ```text
//! a = (x x′ + y y′) / r²,   b = (x y′ − x′ y) / r²,   c = x′ y″ − x″ y′.
//! ```

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{frame_biv_to_fixed, Bivector4, Frame, FrameBivector, Vec4, BASIS_PAIRS};
use crate::jet::Jet3;
use crate::profile::{Family, Interval, ProfileCurve, UNIT_SPEED_SAMPLES, UNIT_SPEED_TOL};

/// Default floor on `x² + y²`.
pub const DEFAULT_RHO_MIN: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct RotationSurface {
    profile: ProfileCurve,
    s_range: Interval,
    /// `None` means the whole real line (the surface is 2π-periodic in t).
    t_range: Option<Interval>,
    rho_min: f64,
}

/// `a, b, c` and their `s`-derivatives at one parameter value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct InvariantTriple {
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub da: f64,
    pub db: f64,
    pub dc: f64,
}

/// Coefficients `h^r_ij` for the normals `e3` (`h3`) and `e4` (`h4`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SecondFundamental {
    pub h3: [[f64; 2]; 2],
    pub h4: [[f64; 2]; 2],
}

impl SecondFundamental {
    pub fn gaussian_curvature(&self) -> f64 {
        det2(&self.h3) + det2(&self.h4)
    }

    pub fn max_abs_diff(&self, other: &SecondFundamental) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.h3[i][j] - other.h3[i][j]).abs());
                m = m.max((self.h4[i][j] - other.h4[i][j]).abs());
            }
        }
        m
    }
}

fn det2(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// `ω_AB = coef[AB][0] ω1 + coef[AB][1] ω2` for the six pairs in
/// `(12, 13, 14, 23, 24, 34)` order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ConnectionForms(pub [[f64; 2]; 6]);

impl ConnectionForms {
    /// `ω_AB(e_k)` for any `A, B` (antisymmetric), `k ∈ {0, 1}`.
    pub fn eval(&self, a: usize, b: usize, k: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let slot = BASIS_PAIRS.iter().position(|&p| p == (lo, hi)).unwrap();
        sign * self.0[slot][k]
    }
}

impl RotationSurface {
    /// Surface over the whole profile domain with the default radius floor.
    pub fn new(profile: ProfileCurve) -> Result<Self> {
        let s_range = profile.domain();
        Self::with_ranges(profile, s_range, None, DEFAULT_RHO_MIN)
    }

    pub fn with_ranges(
        profile: ProfileCurve,
        s_range: Interval,
        t_range: Option<Interval>,
        rho_min: f64,
    ) -> Result<Self> {
        if !profile.domain().contains_interval(&s_range) {
            return Err(Error::Config(format!(
                "s range {s_range} leaves the profile domain {}",
                profile.domain()
            )));
        }
        let samples = s_range.linspace(UNIT_SPEED_SAMPLES);
        let mut speed_residual: f64 = 0.0;
        for &s in &samples {
            let (x, y) = profile.jets(s)?;
            speed_residual = speed_residual.max((x.d1 * x.d1 + y.d1 * y.d1 - 1.0).abs());
            let radius_sq = x.value * x.value + y.value * y.value;
            if radius_sq < rho_min {
                return Err(Error::DegenerateRadius { s, radius_sq });
            }
        }
        if speed_residual > UNIT_SPEED_TOL {
            return Err(Error::NotUnitSpeed {
                residual: speed_residual,
            });
        }
        Ok(Self {
            profile,
            s_range,
            t_range,
            rho_min,
        })
    }

    pub fn profile(&self) -> &ProfileCurve {
        &self.profile
    }

    pub fn s_range(&self) -> Interval {
        self.s_range
    }

    pub fn t_range(&self) -> Option<Interval> {
        self.t_range
    }

    pub fn rho_min(&self) -> f64 {
        self.rho_min
    }

    fn check_params(&self, s: f64, t: f64) -> Result<()> {
        if !self.s_range.contains(s) {
            return Err(Error::OutOfRange {
                name: "s",
                value: s,
                lo: self.s_range.lo,
                hi: self.s_range.hi,
            });
        }
        if let Some(tr) = self.t_range {
            if !tr.contains(t) {
                return Err(Error::OutOfRange {
                    name: "t",
                    value: t,
                    lo: tr.lo,
                    hi: tr.hi,
                });
            }
        }
        Ok(())
    }

    /// Profile jets with the radius floor enforced.
    pub(crate) fn jets(&self, s: f64) -> Result<(Jet3, Jet3)> {
        let (x, y) = self.profile.jets(s)?;
        let radius_sq = x.value * x.value + y.value * y.value;
        if radius_sq.is_nan() || radius_sq < self.rho_min {
            return Err(Error::DegenerateRadius { s, radius_sq });
        }
        Ok((x, y))
    }

    pub fn embed(&self, s: f64, t: f64) -> Result<Vec4> {
        self.check_params(s, t)?;
        let (x, y) = self.profile.point(s)?;
        Ok(rotate(x, y, t))
    }

    /// The orthonormal frame `(e1, e2, e3, e4)`; `e1, e2` tangent.
    pub fn closed_frame(&self, s: f64, t: f64) -> Result<Frame> {
        self.check_params(s, t)?;
        let (x, y) = self.jets(s)?;
        let (x, y, dx, dy) = (x.value, y.value, x.d1, y.d1);
        let r = (x * x + y * y).sqrt();
        let (st, ct) = t.sin_cos();
        Ok(Frame([
            Vec4::new(-x * st, x * ct, -y * st, y * ct) * (1.0 / r),
            Vec4::new(dx * ct, dx * st, dy * ct, dy * st),
            Vec4::new(-dy * ct, -dy * st, dx * ct, dx * st),
            Vec4::new(-y * st, y * ct, x * st, -x * ct) * (1.0 / r),
        ]))
    }

    pub fn invariants(&self, s: f64) -> Result<InvariantTriple> {
        if !self.s_range.contains(s) {
            return Err(Error::OutOfRange {
                name: "s",
                value: s,
                lo: self.s_range.lo,
                hi: self.s_range.hi,
            });
        }
        let (x, y) = self.jets(s)?;
        Ok(invariants_from_jets(s, &x, &y))
    }

    pub fn second_fundamental(&self, s: f64) -> Result<SecondFundamental> {
        let InvariantTriple { b, c, .. } = self.invariants(s)?;
        Ok(SecondFundamental {
            h3: [[b, 0.0], [0.0, c]],
            h4: [[0.0, -b], [-b, 0.0]],
        })
    }

    pub fn connection_forms(&self, s: f64) -> Result<ConnectionForms> {
        let InvariantTriple { a, b, c, .. } = self.invariants(s)?;
        Ok(ConnectionForms([
            [-a, 0.0], // ω12
            [b, 0.0],  // ω13
            [0.0, -b], // ω14
            [0.0, c],  // ω23
            [-b, 0.0], // ω24
            [-a, 0.0], // ω34
        ]))
    }

    /// `K = b c − b²`.
    pub fn gaussian_curvature(&self, s: f64) -> Result<f64> {
        let InvariantTriple { b, c, .. } = self.invariants(s)?;
        Ok(b * c - b * b)
    }

    /// `(|a′ + a² − b² + bc|, |b′ + 2ab − ac|)`.
    pub fn gauss_codazzi_residual(&self, s: f64) -> Result<(f64, f64)> {
        let InvariantTriple {
            a, b, c, da, db, ..
        } = self.invariants(s)?;
        Ok((
            (da + a * a - b * b + b * c).abs(),
            (db + 2.0 * a * b - a * c).abs(),
        ))
    }

    /// `ΔG` in the moving basis; the `e1∧e4` and `e2∧e3` slots are zero.
    pub fn laplacian_gauss_closed(&self, s: f64) -> Result<FrameBivector> {
        let InvariantTriple {
            a, b, c, db, dc, ..
        } = self.invariants(s)?;
        Ok(FrameBivector([
            3.0 * b * b + c * c,
            2.0 * a * b - a * c - dc,
            0.0,
            0.0,
            -3.0 * a * b - db,
            2.0 * b * b - 2.0 * b * c,
        ]))
    }

    /// The closed-form `ΔG` expressed in the fixed basis at `(s, t)`.
    pub fn laplacian_gauss_closed_fixed(&self, s: f64, t: f64) -> Result<Bivector4> {
        let fb = self.laplacian_gauss_closed(s)?;
        frame_biv_to_fixed(&fb, &self.closed_frame(s, t)?)
    }

    /// `∇̃_{e_k} e_A = Σ_B ω_AB(e_k) e_B`, indexed `[k][A]` for `k ∈ {e1, e2}`.
    pub fn frame_derivatives_closed(&self, s: f64, t: f64) -> Result<[[Vec4; 4]; 2]> {
        let frame = self.closed_frame(s, t)?;
        let w = self.connection_forms(s)?;
        Ok(std::array::from_fn(|k| {
            std::array::from_fn(|a| {
                (0..4).fold(Vec4::ZERO, |acc, b| acc + frame.e(b) * w.eval(a, b, k))
            })
        }))
    }

    /// Finite-difference directional derivatives of the closed frame along
    /// `e1 = ∂_t / r` and `e2 = ∂_s`, indexed like [`Self::frame_derivatives_closed`].
    pub fn frame_derivatives_numeric(&self, s: f64, t: f64, h: f64) -> Result<[[Vec4; 4]; 2]> {
        let (x, y) = self.profile.point(s)?;
        let r = (x * x + y * y).sqrt();
        let fs_p = self.closed_frame(s + h, t)?;
        let fs_m = self.closed_frame(s - h, t)?;
        let ft_p = self.closed_frame(s, t + h)?;
        let ft_m = self.closed_frame(s, t - h)?;
        Ok([
            std::array::from_fn(|a| (ft_p.e(a) - ft_m.e(a)) * (1.0 / (2.0 * h * r))),
            std::array::from_fn(|a| (fs_p.e(a) - fs_m.e(a)) * (1.0 / (2.0 * h))),
        ])
    }
}

/// `(x cos t, x sin t, y cos t, y sin t)`.
pub fn rotate(x: f64, y: f64, t: f64) -> Vec4 {
    let (st, ct) = t.sin_cos();
    Vec4::new(x * ct, x * st, y * ct, y * st)
}

/// The invariants from order-3 jets of a unit-speed meridian.
pub fn invariants_from_jets(s: f64, x: &Jet3, y: &Jet3) -> InvariantTriple {
    let (x0, x1, x2, x3) = (x.value, x.d1, x.d2, x.d3);
    let (y0, y1, y2, y3) = (y.value, y.d1, y.d2, y.d3);
    let r2 = x0 * x0 + y0 * y0;
    let radial = x0 * x1 + y0 * y1;
    let areal = x0 * y1 - x1 * y0;
    // d/ds of the two numerators
    let d_radial = x1 * x1 + x0 * x2 + y1 * y1 + y0 * y2;
    let d_areal = x0 * y2 - x2 * y0;
    let d_r2 = 2.0 * radial;
    InvariantTriple {
        s,
        a: radial / r2,
        b: areal / r2,
        c: x1 * y2 - x2 * y1,
        da: (d_radial * r2 - radial * d_r2) / (r2 * r2),
        db: (d_areal * r2 - areal * d_r2) / (r2 * r2),
        dc: x1 * y3 - x3 * y1,
    }
}

/// The flat family `λ(cos(b₀s + d), sin(b₀s + d))` with `b₀²λ² = 1`.
pub fn flat_family(lambda: f64, b0: f64, d: f64) -> Result<RotationSurface> {
    RotationSurface::new(Family::flat(lambda, b0, d)?.profile())
}

/// The Clifford torus `flat_family(1, 1, 0)`.
pub fn clifford_torus() -> RotationSurface {
    flat_family(1.0, 1.0, 0.0).expect("unit circle satisfies b0²λ² = 1")
}

/// Default t range for grid sweeps.
pub const FULL_TURN: Interval = Interval { lo: 0.0, hi: 2.0 * PI };
