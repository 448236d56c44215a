//! Upper half-plane geometry: points, orientation-preserving isometries and
//! translation lengths.
//!
//! Elements of PSL(2,R) are stored as normalized real 2x2 matrices with the
//! sign fixed so that the first entry of magnitude above [`SIGN_TOL`] is
//! positive. Every product renormalizes the determinant back to one.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::DdMat;
use crate::error::{Error, Result};

/// Tolerance on traces and determinants.
pub const TRACE_TOL: f64 = 1e-12;
/// Magnitude below which an entry is ignored when fixing the PSL sign.
pub const SIGN_TOL: f64 = 1e-12;
/// Tolerance used when reading matrices from decimal text.
pub const INPUT_DET_TOL: f64 = 1e-9;

/// A point `x + iy` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    x: f64,
    y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain(format!(
                "point ({x}, {y}) is not in the upper half-plane"
            )));
        }
        Ok(Self { x, y })
    }

    /// The point `i`.
    pub fn i() -> Self {
        Self { x: 0.0, y: 1.0 }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub(crate) fn from_complex_unchecked(z: Complex64) -> Self {
        Self { x: z.re, y: z.im }
    }
}

/// Hyperbolic distance in the upper half-plane.
///
/// Evaluated as `2 asinh(|z - w| / (2 sqrt(y v)))`, which is the same
/// quantity as `cosh^2(d/2) = |z - conj(w)|^2 / (4 y v)` without the
/// cancellation that formula suffers for nearby points.
pub fn hyperbolic_distance(z: &Point, w: &Point) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    let chord = (dx * dx + dy * dy).sqrt();
    2.0 * (chord / (2.0 * (z.y * w.y).sqrt())).asinh()
}

/// `cosh` of the hyperbolic distance, useful when only comparisons are needed.
pub fn cosh_distance(z: &Point, w: &Point) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    1.0 + (dx * dx + dy * dy) / (2.0 * z.y * w.y)
}

/// An element of PSL(2,R), stored row-major as `[a, b, c, d]`.
#[derive(Clone, Copy, PartialEq)]
pub struct MoebiusElement {
    m: [f64; 4],
}

impl fmt::Debug for MoebiusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.m;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

/// Trace classification of an isometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IsometryKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryClass {
    pub kind: IsometryKind,
    /// Translation length; zero unless `kind` is hyperbolic.
    pub length: f64,
}

fn canonical_sign(mut m: [f64; 4]) -> [f64; 4] {
    if let Some(lead) = m.iter().copied().find(|x| x.abs() > SIGN_TOL) {
        if lead < 0.0 {
            for x in &mut m {
                *x = -*x;
            }
        }
    }
    m
}

impl MoebiusElement {
    pub const IDENTITY: Self = Self {
        m: [1.0, 0.0, 0.0, 1.0],
    };

    /// Builds an element from entries with positive determinant, rescaling
    /// the determinant to one.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::Domain(format!(
                "matrix [[{a}, {b}], [{c}, {d}]] has non-positive determinant {det}"
            )));
        }
        Ok(Self::normalized([a, b, c, d]))
    }

    /// Builds an element whose determinant must already be one (up to
    /// [`INPUT_DET_TOL`]).
    pub fn from_unit_det(entries: [f64; 4]) -> Result<Self> {
        let [a, b, c, d] = entries;
        let det = a * d - b * c;
        if !((det - 1.0).abs() <= INPUT_DET_TOL) {
            return Err(Error::Schema(format!(
                "determinant {det} is not 1 (tolerance {INPUT_DET_TOL:e})"
            )));
        }
        Ok(Self::normalized(entries))
    }

    pub(crate) fn normalized(m: [f64; 4]) -> Self {
        let det = m[0] * m[3] - m[1] * m[2];
        let s = det.abs().sqrt().recip();
        Self {
            m: canonical_sign([m[0] * s, m[1] * s, m[2] * s, m[3] * s]),
        }
    }

    /// Translation along the imaginary axis by hyperbolic distance `length`.
    pub fn diagonal(length: f64) -> Self {
        let h = 0.5 * length;
        Self {
            m: canonical_sign([h.exp(), 0.0, 0.0, (-h).exp()]),
        }
    }

    /// Rotation by `angle` about the point `i`.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = (0.5 * angle).sin_cos();
        Self::normalized([c, s, -s, c])
    }

    pub fn entries(&self) -> [f64; 4] {
        self.m
    }

    pub fn determinant(&self) -> f64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    pub fn trace(&self) -> f64 {
        self.m[0] + self.m[3]
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = self.m;
        Self {
            m: canonical_sign([d, -b, -c, a]),
        }
    }

    /// Product with determinant renormalization.
    pub fn compose(&self, other: &Self) -> Self {
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = other.m;
        Self::normalized([
            a * e + b * g,
            a * f + b * h,
            c * e + d * g,
            c * f + d * h,
        ])
    }

    /// `self * other * self^-1`.
    pub fn conjugate(&self, other: &Self) -> Self {
        self.compose(other).compose(&self.inverse())
    }

    /// `self^m` by repeated squaring in double-double arithmetic, rounded
    /// once at the end. Negative powers invert.
    pub fn pow(&self, m: i64) -> Self {
        let start = if m < 0 { self.inverse() } else { *self };
        let mut base = DdMat::from_f64(start.m);
        let mut e = m.unsigned_abs();
        let mut acc = DdMat::IDENTITY;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        Self {
            m: canonical_sign(acc.normalized().to_f64()),
        }
    }

    /// Möbius action `z -> (az + b) / (cz + d)`.
    pub fn act(&self, z: &Point) -> Point {
        let [a, b, c, d] = self.m;
        let zc = z.to_complex();
        let w = (zc * a + b) / (zc * c + d);
        // Orientation-preserving maps keep the half-plane; clamp round-off.
        Point::from_complex_unchecked(Complex64::new(w.re, w.im.max(f64::MIN_POSITIVE)))
    }

    /// Max-norm distance to `+Id` or `-Id`, whichever is closer.
    pub fn identity_residual(&self) -> f64 {
        let [a, b, c, d] = self.m;
        let plus = (a - 1.0).abs().max(b.abs()).max(c.abs()).max((d - 1.0).abs());
        let minus = (a + 1.0).abs().max(b.abs()).max(c.abs()).max((d + 1.0).abs());
        plus.min(minus)
    }

    pub fn is_identity(&self) -> bool {
        self.identity_residual() <= TRACE_TOL
    }

    pub fn classify(&self) -> IsometryClass {
        classify(self)
    }

    /// `cosh d(i, g i)`; equals half the squared Frobenius norm.
    pub fn cosh_displacement_at_i(&self) -> f64 {
        let [a, b, c, d] = self.m;
        0.5 * (a * a + b * b + c * c + d * d)
    }

    /// `d(i, g i)`.
    pub fn displacement_at_i(&self) -> f64 {
        self.cosh_displacement_at_i().max(1.0).acosh()
    }

    /// Fixed points on the boundary of a hyperbolic element, as
    /// `(repelling, attracting)`; `None` stands for the point at infinity.
    pub fn fixed_points(&self) -> Option<(Option<f64>, Option<f64>)> {
        let [a, b, c, d] = self.m;
        let tr = a + d;
        if tr.abs() <= 2.0 + TRACE_TOL {
            return None;
        }
        let disc = (tr * tr - 4.0).sqrt();
        // Eigenvalue of larger modulus belongs to the attracting point.
        let big = 0.5 * (tr.abs() + disc) * tr.signum();
        let small = 0.5 * (tr.abs() - disc) * tr.signum();
        let fixed_for = |lambda: f64| -> Option<f64> {
            // (a - lambda) x + b = 0 with eigenvector (x, 1), or (x, 0) if c = 0.
            if c.abs() > SIGN_TOL {
                Some((lambda - d) / c)
            } else if (a - lambda).abs() > SIGN_TOL {
                Some(-b / (a - lambda))
            } else {
                None
            }
        };
        if c.abs() <= SIGN_TOL {
            // Upper triangular: one fixed point is infinity.
            let finite = -b / (a - d);
            return if a.abs() > d.abs() {
                Some((Some(finite), None))
            } else {
                Some((None, Some(finite)))
            };
        }
        Some((fixed_for(small), fixed_for(big)))
    }

    /// Real power `g^s` for hyperbolic `g`, sharing its axis and direction.
    pub fn real_power(&self, s: f64) -> Result<Self> {
        let class = classify(self);
        if class.kind != IsometryKind::Hyperbolic {
            return Err(Error::Domain("real power of a non-hyperbolic element".into()));
        }
        let axis = AxisFrame::of(self)?;
        Ok(axis.translation(s * class.length))
    }
}

impl Mul for MoebiusElement {
    type Output = MoebiusElement;

    fn mul(self, rhs: Self) -> Self::Output {
        self.compose(&rhs)
    }
}

impl Mul for &MoebiusElement {
    type Output = MoebiusElement;

    fn mul(self, rhs: Self) -> Self::Output {
        self.compose(rhs)
    }
}

/// An isometry carrying the imaginary axis (oriented upward) onto the axis
/// of a hyperbolic element (oriented from repelling to attracting point).
#[derive(Debug, Clone, Copy)]
pub struct AxisFrame {
    frame: MoebiusElement,
}

impl AxisFrame {
    pub fn of(g: &MoebiusElement) -> Result<Self> {
        let (rep, att) = g.fixed_points().ok_or_else(|| {
            Error::Domain("axis requested for a non-hyperbolic element".into())
        })?;
        let frame = match (rep, att) {
            // z -> (a z - r) / (z - 1) or (a z + r) / (z + 1): 0 -> r, infinity -> a.
            (Some(r), Some(a)) if a > r => MoebiusElement::normalized([a, r, 1.0, 1.0]),
            (Some(r), Some(a)) => MoebiusElement::normalized([a, -r, 1.0, -1.0]),
            (Some(r), None) => MoebiusElement::normalized([1.0, r, 0.0, 1.0]),
            (None, Some(a)) => MoebiusElement::normalized([a, -1.0, 1.0, 0.0]),
            (None, None) => unreachable!("hyperbolic elements have two fixed points"),
        };
        Ok(Self { frame })
    }

    pub fn frame(&self) -> &MoebiusElement {
        &self.frame
    }

    /// Translation by signed distance `s` along the axis.
    pub fn translation(&self, s: f64) -> MoebiusElement {
        self.frame
            .compose(&MoebiusElement::diagonal(s))
            .compose(&self.frame.inverse())
    }
}

/// Trace classification.
pub fn classify(g: &MoebiusElement) -> IsometryClass {
    let tr = g.trace().abs();
    if tr > 2.0 + TRACE_TOL {
        return IsometryClass {
            kind: IsometryKind::Hyperbolic,
            length: 2.0 * (0.5 * tr).acosh(),
        };
    }
    let kind = if g.is_identity() {
        IsometryKind::Identity
    } else if tr >= 2.0 - TRACE_TOL {
        IsometryKind::Parabolic
    } else {
        IsometryKind::Elliptic
    };
    IsometryClass { kind, length: 0.0 }
}

/// `l(g^m)` for hyperbolic `g`.
pub fn translation_length_power(g: &MoebiusElement, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("power must be positive".into()));
    }
    let class = classify(g);
    if class.kind != IsometryKind::Hyperbolic {
        return Err(Error::Domain(format!(
            "translation length of a {:?} element",
            class.kind
        )));
    }
    Ok(f64::from(m) * class.length)
}

/// Hyperbolic distance from `z` to the axis of a hyperbolic element.
pub fn distance_to_axis(g: &MoebiusElement, z: &Point) -> Result<f64> {
    let (rep, att) = g
        .fixed_points()
        .ok_or_else(|| Error::Domain("axis of a non-hyperbolic element".into()))?;
    Ok(axis_distance(rep, att, z))
}

/// Distance from `z` to the geodesic with the given boundary endpoints.
pub(crate) fn axis_distance(p: Option<f64>, q: Option<f64>, z: &Point) -> f64 {
    let (x, y) = (z.x, z.y);
    let sinh_d = match (p, q) {
        (Some(p), Some(q)) => ((x - p) * (x - q) + y * y).abs() / (y * (p - q).abs()),
        (Some(p), None) | (None, Some(p)) => (x - p).abs() / y,
        (None, None) => 0.0,
    };
    sinh_d.asinh()
}
