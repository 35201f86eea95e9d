//! Truncated Taylor jets: a value and its first three derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// `(f, f′, f″, f‴)` at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet3 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet3 {
    pub const fn new(value: f64, d1: f64, d2: f64, d3: f64) -> Self {
        Self { value, d1, d2, d3 }
    }

    pub const fn constant(value: f64) -> Self {
        Self::new(value, 0.0, 0.0, 0.0)
    }

    /// The independent variable itself, `s ↦ (s, 1, 0, 0)`.
    pub const fn variable(s: f64) -> Self {
        Self::new(s, 1.0, 0.0, 0.0)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.value, self.d1, self.d2, self.d3]
    }

    pub fn is_constant(&self) -> bool {
        self.d1 == 0.0 && self.d2 == 0.0 && self.d3 == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|c| c.is_finite())
    }

    /// Chain rule to third order: `outer` holds `(g, g′, g″, g‴)` evaluated
    /// at `self.value`, the result is the jet of `g ∘ self`.
    pub fn compose(&self, outer: [f64; 4]) -> Jet3 {
        let [g0, g1, g2, g3] = outer;
        let (f1, f2, f3) = (self.d1, self.d2, self.d3);
        Jet3 {
            value: g0,
            d1: g1 * f1,
            d2: g2 * f1 * f1 + g1 * f2,
            d3: g3 * f1 * f1 * f1 + 3.0 * g2 * f1 * f2 + g1 * f3,
        }
    }

    pub fn sin(self) -> Jet3 {
        let (s, c) = self.value.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(self) -> Jet3 {
        let (s, c) = self.value.sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn exp(self) -> Jet3 {
        let e = self.value.exp();
        self.compose([e, e, e, e])
    }

    /// Natural log; caller guarantees `value > 0`.
    pub fn ln(self) -> Jet3 {
        let x = self.value;
        self.compose([x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)])
    }

    /// Square root; caller guarantees `value > 0`.
    pub fn sqrt(self) -> Jet3 {
        let x = self.value;
        let r = x.sqrt();
        self.compose([r, 0.5 / r, -0.25 / (r * x), 0.375 / (r * x * x)])
    }

    pub fn recip(self) -> Jet3 {
        let x = self.value;
        let r = 1.0 / x;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    /// `self^p` for a constant real exponent. For non-integer `p` the caller
    /// guarantees `value > 0`.
    pub fn powf(self, p: f64) -> Jet3 {
        let x = self.value;
        let d = |k: i32| -> f64 {
            // falling factorial p (p-1) ... (p-k+1) · x^(p-k)
            let mut coef = 1.0;
            for m in 0..k {
                coef *= p - m as f64;
            }
            if coef == 0.0 {
                0.0
            } else if p.fract() == 0.0 {
                coef * x.powi(p as i32 - k)
            } else {
                coef * x.powf(p - k as f64)
            }
        };
        self.compose([d(0), d(1), d(2), d(3)])
    }

    /// `self^e` with a non-constant exponent, via `exp(e · ln self)`.
    pub fn pow(self, e: Jet3) -> Jet3 {
        if e.is_constant() {
            self.powf(e.value)
        } else {
            (e * self.ln()).exp()
        }
    }
}

impl From<f64> for Jet3 {
    fn from(v: f64) -> Self {
        Jet3::constant(v)
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, o: Jet3) -> Jet3 {
        Jet3::new(
            self.value + o.value,
            self.d1 + o.d1,
            self.d2 + o.d2,
            self.d3 + o.d3,
        )
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, o: Jet3) -> Jet3 {
        Jet3::new(
            self.value - o.value,
            self.d1 - o.d1,
            self.d2 - o.d2,
            self.d3 - o.d3,
        )
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3::new(-self.value, -self.d1, -self.d2, -self.d3)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, o: Jet3) -> Jet3 {
        let (f0, f1, f2, f3) = (self.value, self.d1, self.d2, self.d3);
        let (g0, g1, g2, g3) = (o.value, o.d1, o.d2, o.d3);
        Jet3 {
            value: f0 * g0,
            d1: f1 * g0 + f0 * g1,
            d2: f2 * g0 + 2.0 * f1 * g1 + f0 * g2,
            d3: f3 * g0 + 3.0 * f2 * g1 + 3.0 * f1 * g2 + f0 * g3,
        }
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, k: f64) -> Jet3 {
        Jet3::new(self.value * k, self.d1 * k, self.d2 * k, self.d3 * k)
    }
}

impl Div for Jet3 {
    type Output = Jet3;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet3) -> Jet3 {
        self * o.recip()
    }
}
