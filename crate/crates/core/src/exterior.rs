//! Fixed-basis linear algebra of E⁴ and Λ²(E⁴).
//!
//! Bivectors are stored in the lexicographic basis
//! `(E12, E13, E14, E23, E24, E34)` with `Ekl = εk ∧ εl`. Every report and
//! file format in the crate uses this order.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index pairs `(k, l)` of the bivector basis, in storage order.
pub const BASIS_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Labels matching [`BASIS_PAIRS`], used in CSV headers.
pub const BASIS_LABELS: [&str; 6] = ["12", "13", "14", "23", "24", "34"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec4(pub [f64; 4]);

impl Vec4 {
    pub const ZERO: Vec4 = Vec4([0.0; 4]);

    pub const fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        Vec4([x1, x2, x3, x4])
    }

    /// Standard basis vector `ε_{k+1}`.
    pub fn basis(k: usize) -> Self {
        let mut v = [0.0; 4];
        v[k] = 1.0;
        Vec4(v)
    }

    pub fn dot(&self, other: &Vec4) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> Vec4 {
        *self * (1.0 / self.norm())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Index<usize> for Vec4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec4 {
    type Output = Vec4;
    fn add(self, o: Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for Vec4 {
    type Output = Vec4;
    fn sub(self, o: Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for Vec4 {
    type Output = Vec4;
    fn neg(self) -> Vec4 {
        Vec4(self.0.map(|c| -c))
    }
}

impl Mul<f64> for Vec4 {
    type Output = Vec4;
    fn mul(self, k: f64) -> Vec4 {
        Vec4(self.0.map(|c| c * k))
    }
}

impl Mul<Vec4> for f64 {
    type Output = Vec4;
    fn mul(self, v: Vec4) -> Vec4 {
        v * self
    }
}

/// An element of Λ²(E⁴) in the fixed basis.
///
/// Decomposability is not tracked in the type; use [`pluecker_residual`]
/// where a simple bivector is required.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Bivector4(pub [f64; 6]);

impl Bivector4 {
    pub const ZERO: Bivector4 = Bivector4([0.0; 6]);

    /// Basis bivector `ε_{k+1} ∧ ε_{l+1}` for `k < l`.
    pub fn basis(k: usize, l: usize) -> Self {
        let slot = BASIS_PAIRS
            .iter()
            .position(|&p| p == (k, l))
            .expect("basis bivector needs k < l < 4");
        let mut c = [0.0; 6];
        c[slot] = 1.0;
        Bivector4(c)
    }

    pub fn norm_sq(&self) -> f64 {
        biv_inner(self, self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn components(&self) -> &[f64; 6] {
        &self.0
    }
}

impl Index<usize> for Bivector4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Bivector4 {
    type Output = Bivector4;
    fn add(self, o: Bivector4) -> Bivector4 {
        Bivector4(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl AddAssign for Bivector4 {
    fn add_assign(&mut self, o: Bivector4) {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a += b;
        }
    }
}

impl Sub for Bivector4 {
    type Output = Bivector4;
    fn sub(self, o: Bivector4) -> Bivector4 {
        Bivector4(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for Bivector4 {
    type Output = Bivector4;
    fn neg(self) -> Bivector4 {
        Bivector4(self.0.map(|c| -c))
    }
}

impl Mul<f64> for Bivector4 {
    type Output = Bivector4;
    fn mul(self, k: f64) -> Bivector4 {
        Bivector4(self.0.map(|c| c * k))
    }
}

impl Mul<Bivector4> for f64 {
    type Output = Bivector4;
    fn mul(self, b: Bivector4) -> Bivector4 {
        b * self
    }
}

impl fmt::Display for Bivector4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.0;
        write!(
            f,
            "[{}, {}, {}, {}, {}, {}]",
            c[0], c[1], c[2], c[3], c[4], c[5]
        )
    }
}

/// An orthonormal frame `(e1, e2, e3, e4)` at a surface point.
///
/// `e1, e2` are tangent and `e3, e4` normal for every frame produced by the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame(pub [Vec4; 4]);

impl Frame {
    pub fn identity() -> Self {
        Frame(std::array::from_fn(Vec4::basis))
    }

    pub fn e(&self, i: usize) -> Vec4 {
        self.0[i]
    }

    /// Max |⟨e_i, e_j⟩ − δ_ij|.
    pub fn gram_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((self.0[i].dot(&self.0[j]) - target).abs());
            }
        }
        dev
    }

    /// Determinant of the matrix whose rows are the frame vectors.
    pub fn orientation(&self) -> f64 {
        let m = nalgebra::Matrix4::from_fn(|r, c| self.0[r][c]);
        m.determinant()
    }
}

/// Coefficients against the moving basis
/// `(e1∧e2, e1∧e3, e1∧e4, e2∧e3, e2∧e4, e3∧e4)` of some frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FrameBivector(pub [f64; 6]);

impl FrameBivector {
    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        let slot = BASIS_PAIRS
            .iter()
            .position(|&p| p == (i, j))
            .expect("frame bivector slot needs i < j < 4");
        self.0[slot]
    }
}

pub fn wedge(u: &Vec4, v: &Vec4) -> Bivector4 {
    Bivector4(BASIS_PAIRS.map(|(k, l)| u[k] * v[l] - u[l] * v[k]))
}

/// Induced inner product on Λ²(E⁴); the basis `Ekl` is orthonormal.
pub fn biv_inner(p: &Bivector4, q: &Bivector4) -> f64 {
    p.0.iter().zip(q.0.iter()).map(|(a, b)| a * b).sum()
}

/// `p12 p34 − p13 p24 + p14 p23`; zero exactly for simple bivectors.
pub fn pluecker_residual(p: &Bivector4) -> f64 {
    let c = &p.0;
    c[0] * c[5] - c[1] * c[4] + c[2] * c[3]
}

/// Tolerance on the Gram deviation accepted by [`frame_biv_to_fixed`].
pub const FRAME_ORTHONORMAL_TOL: f64 = 1e-10;

/// Expresses moving-frame coefficients in the fixed basis: `Σ fb_ij e_i ∧ e_j`.
pub fn frame_biv_to_fixed(fb: &FrameBivector, frame: &Frame) -> Result<Bivector4> {
    let dev = frame.gram_deviation();
    if dev > FRAME_ORTHONORMAL_TOL {
        return Err(Error::FrameNotOrthonormal(dev));
    }
    let mut out = Bivector4::ZERO;
    for (slot, &(i, j)) in BASIS_PAIRS.iter().enumerate() {
        if fb.0[slot] != 0.0 {
            out += wedge(&frame.0[i], &frame.0[j]) * fb.0[slot];
        }
    }
    Ok(out)
}
