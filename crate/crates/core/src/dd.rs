//! Double-double arithmetic (about 32 significant digits) for building and
//! re-evaluating generator matrices whose products must close up exactly.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    const LN2: Dd = Dd {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };

    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqr(self) -> Dd {
        self * self
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = ((self.hi - p) - e + self.lo) / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, r);
        Dd { hi, lo }
    }

    pub fn exp(self) -> Dd {
        if self.hi.abs() > 708.0 {
            return Dd::from(self.hi.exp());
        }
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = self - Dd::LN2 * Dd::from(k);
        // exp(r) = (exp(r / 16))^16 with a Taylor series for the small argument.
        let s = r * Dd::from(1.0 / 16.0);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for n in 1..=30 {
            term = term * s / Dd::from(f64::from(n));
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..4 {
            sum = sum.sqr();
        }
        sum * Dd::from(2f64.powi(k as i32))
    }

    pub fn ln(self) -> Dd {
        // Newton iteration on exp(y) = x, starting from the f64 logarithm.
        let mut y = Dd::from(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::ONE;
        }
        y
    }

    pub fn cosh(self) -> Dd {
        let e = self.exp();
        (e + Dd::ONE / e) * Dd::from(0.5)
    }

    pub fn sinh(self) -> Dd {
        if self.hi.abs() < 1e-3 {
            // Series avoids cancellation: x + x^3/6 + x^5/120 + x^7/5040.
            let x2 = self.sqr();
            let mut term = self;
            let mut sum = self;
            for n in 1..=6 {
                term = term * x2 / Dd::from(f64::from((2 * n) * (2 * n + 1)));
                sum = sum + term;
            }
            return sum;
        }
        let e = self.exp();
        (e - Dd::ONE / e) * Dd::from(0.5)
    }

    pub fn acosh(self) -> Dd {
        (self + (self.sqr() - Dd::ONE).sqrt()).ln()
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::from(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::from(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from(q3)
    }
}

/// A 2x2 matrix in double-double, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DdMat(pub [Dd; 4]);

impl DdMat {
    pub const IDENTITY: DdMat = DdMat([Dd::ONE, Dd::ZERO, Dd::ZERO, Dd::ONE]);

    pub fn from_f64(m: [f64; 4]) -> DdMat {
        DdMat(m.map(Dd::from))
    }

    pub fn to_f64(self) -> [f64; 4] {
        self.0.map(Dd::to_f64)
    }

    pub fn det(&self) -> Dd {
        let [a, b, c, d] = self.0;
        a * d - b * c
    }

    pub fn trace(&self) -> Dd {
        self.0[0] + self.0[3]
    }

    pub fn mul(&self, o: &DdMat) -> DdMat {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        DdMat([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    pub fn inverse(&self) -> DdMat {
        let [a, b, c, d] = self.0;
        let det = self.det();
        DdMat([d / det, -b / det, -c / det, a / det])
    }

    /// Rescales to determinant `+-1`.
    pub fn normalized(&self) -> DdMat {
        let s = Dd::ONE / self.det().abs().sqrt();
        DdMat(self.0.map(|x| x * s))
    }

    pub fn product(factors: &[DdMat]) -> DdMat {
        factors.iter().fold(DdMat::IDENTITY, |acc, f| acc.mul(f))
    }

    /// Translation by `length` along the imaginary axis.
    pub fn diagonal(length: Dd) -> DdMat {
        let e = (length * Dd::from(0.5)).exp();
        DdMat([e, Dd::ZERO, Dd::ZERO, Dd::ONE / e])
    }

    /// Translation by `s` along the geodesic from `-1` to `1`.
    pub fn unit_circle_translation(s: Dd) -> DdMat {
        let h = s * Dd::from(0.5);
        let (c, sh) = (h.cosh(), h.sinh());
        DdMat([c, sh, sh, c])
    }
}
