//! Dirichlet fundamental polygons centred at `i`, computed in the Klein disk.
//!
//! The half-plane of points closer to `i` than to `h i` is the Euclidean
//! half-plane `u . k <= tanh(D / 2)` in Klein coordinates `k`, where `D` is
//! the displacement of `h` and `u` the direction of `h i` seen from the
//! origin. Clipping a large square by these half-planes gives a convex
//! polygon containing the true domain; the two agree exactly when the
//! polygon area equals `4 pi (g - 1)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::moebius::{MoebiusElement, Point};

type V2 = [f64; 2];

const INSIDE_TOL: f64 = 1e-13;
const DUP_TOL: f64 = 1e-11;

/// Klein disk coordinates of a point of the upper half-plane.
pub fn to_klein(z: &Point) -> V2 {
    let zc = z.to_complex();
    let w = (zc - Complex64::i()) / (zc + Complex64::i());
    let s = 2.0 / (1.0 + w.norm_sqr());
    [s * w.re, s * w.im]
}

/// Klein coordinates of a boundary point, `None` standing for infinity.
pub fn boundary_to_klein(x: Option<f64>) -> V2 {
    match x {
        None => [1.0, 0.0],
        Some(x) => {
            let w = (Complex64::new(x, 0.0) - Complex64::i()) / (Complex64::new(x, 0.0) + Complex64::i());
            [w.re, w.im]
        }
    }
}

fn klein_to_poincare(k: V2) -> Complex64 {
    let r2 = k[0] * k[0] + k[1] * k[1];
    let s = 1.0 / (1.0 + (1.0 - r2).max(0.0).sqrt());
    Complex64::new(k[0] * s, k[1] * s)
}

#[derive(Debug, Clone, Copy)]
struct HalfPlane {
    normal: V2,
    offset: f64,
    label: usize,
}

impl HalfPlane {
    fn value(&self, k: V2) -> f64 {
        self.normal[0] * k[0] + self.normal[1] * k[1] - self.offset
    }
}

/// Half-plane of points closer to `i` than to `h i`; `None` for the identity.
fn bisector(h: &MoebiusElement, label: usize) -> Option<HalfPlane> {
    let dist = h.displacement_at_i();
    if dist < 1e-9 {
        return None;
    }
    let k = to_klein(&h.act(&Point::i()));
    let r = (k[0] * k[0] + k[1] * k[1]).sqrt();
    Some(HalfPlane {
        normal: [k[0] / r, k[1] / r],
        offset: (0.5 * dist).tanh(),
        label,
    })
}

#[derive(Debug, Clone, Copy)]
struct Vertex {
    at: V2,
    /// Label of the edge from this vertex to the next one.
    edge: usize,
}

const FRAME: usize = usize::MAX;

fn clip(poly: &[Vertex], hp: &HalfPlane) -> Vec<Vertex> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let cur = poly[i];
        let nxt = poly[(i + 1) % n];
        let (fc, fn_) = (hp.value(cur.at), hp.value(nxt.at));
        let (cin, nin) = (fc <= INSIDE_TOL, fn_ <= INSIDE_TOL);
        let cross = || {
            let t = fc / (fc - fn_);
            [
                cur.at[0] + t * (nxt.at[0] - cur.at[0]),
                cur.at[1] + t * (nxt.at[1] - cur.at[1]),
            ]
        };
        match (cin, nin) {
            (true, true) => out.push(cur),
            (true, false) => {
                out.push(cur);
                out.push(Vertex { at: cross(), edge: hp.label });
            }
            (false, true) => out.push(Vertex { at: cross(), edge: cur.edge }),
            (false, false) => {}
        }
    }
    dedup(out)
}

fn dedup(poly: Vec<Vertex>) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = Vec::with_capacity(poly.len());
    for v in poly {
        match out.last_mut() {
            Some(last) if dist2(last.at, v.at) < DUP_TOL * DUP_TOL => last.edge = v.edge,
            _ => out.push(v),
        }
    }
    while out.len() > 1 && dist2(out[0].at, out[out.len() - 1].at) < DUP_TOL * DUP_TOL {
        out.pop();
    }
    out
}

fn dist2(a: V2, b: V2) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// A convex polygon cut out by bisectors, with edge provenance.
#[derive(Debug, Clone)]
pub struct DirichletDomain {
    vertices: Vec<Vertex>,
}

impl DirichletDomain {
    /// Clips by the bisectors of `elements` (labelled by position).
    /// Elements farther than twice the current circumradius are skipped,
    /// as their bisectors cannot meet the polygon.
    pub fn from_elements(elements: &[MoebiusElement]) -> Self {
        let mut planes: Vec<(f64, HalfPlane)> = elements
            .iter()
            .enumerate()
            .filter_map(|(i, h)| bisector(h, i).map(|p| (h.displacement_at_i(), p)))
            .collect();
        planes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.label.cmp(&b.1.label)));
        let s = 4.0;
        let mut poly = vec![
            Vertex { at: [-s, -s], edge: FRAME },
            Vertex { at: [s, -s], edge: FRAME },
            Vertex { at: [s, s], edge: FRAME },
            Vertex { at: [-s, s], edge: FRAME },
        ];
        for (dist, hp) in &planes {
            let dom = DirichletDomain { vertices: poly.clone() };
            if dom.is_bounded() && *dist > 2.0 * dom.covering_radius() + 1e-9 {
                break;
            }
            poly = clip(&poly, hp);
            if poly.is_empty() {
                break;
            }
        }
        Self { vertices: poly }
    }

    /// True when every vertex lies strictly inside the unit disk.
    pub fn is_bounded(&self) -> bool {
        self.vertices.len() >= 3
            && self
                .vertices
                .iter()
                .all(|v| v.at[0] * v.at[0] + v.at[1] * v.at[1] < 1.0 - 1e-12)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Vertices as points of the upper half-plane.
    pub fn vertices(&self) -> Vec<Point> {
        self.vertices
            .iter()
            .map(|v| {
                let w = klein_to_poincare(v.at);
                let z = Complex64::i() * (Complex64::new(1.0, 0.0) + w) / (Complex64::new(1.0, 0.0) - w);
                Point::from_complex_unchecked(z)
            })
            .collect()
    }

    /// Largest distance from `i` to a point of the polygon.
    pub fn covering_radius(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| {
                let r = (v.at[0] * v.at[0] + v.at[1] * v.at[1]).sqrt();
                if r >= 1.0 {
                    f64::INFINITY
                } else {
                    r.atanh()
                }
            })
            .fold(0.0, f64::max)
    }

    /// Hyperbolic area by Gauss–Bonnet, infinite when unbounded.
    pub fn area(&self) -> f64 {
        if !self.is_bounded() {
            return f64::INFINITY;
        }
        let n = self.vertices.len();
        let pts: Vec<Complex64> = self.vertices.iter().map(|v| klein_to_poincare(v.at)).collect();
        let mut angle_sum = 0.0;
        for i in 0..n {
            let p = pts[i];
            let to_origin = |z: Complex64| (z - p) / (Complex64::new(1.0, 0.0) - p.conj() * z);
            let a = to_origin(pts[(i + n - 1) % n]);
            let b = to_origin(pts[(i + 1) % n]);
            let mut ang = (b / a).arg().abs();
            if ang > PI {
                ang = 2.0 * PI - ang;
            }
            angle_sum += ang;
        }
        (n as f64 - 2.0) * PI - angle_sum
    }

    /// Labels (indices into the clipping elements) of the polygon edges.
    pub fn face_labels(&self) -> Vec<usize> {
        let mut labels: Vec<usize> = self
            .vertices
            .iter()
            .map(|v| v.edge)
            .filter(|&e| e != FRAME)
            .collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    /// Whether the geodesic with boundary endpoints `p`, `q` meets the
    /// polygon, allowing a Euclidean slack `tol` in the Klein disk.
    pub fn meets_geodesic(&self, p: Option<f64>, q: Option<f64>, tol: f64) -> bool {
        let (a, b) = (boundary_to_klein(p), boundary_to_klein(q));
        let n = [-(b[1] - a[1]), b[0] - a[0]];
        let len = (n[0] * n[0] + n[1] * n[1]).sqrt();
        let side = |v: V2| (n[0] * (v[0] - a[0]) + n[1] * (v[1] - a[1])) / len;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            let s = side(v.at);
            lo = lo.min(s);
            hi = hi.max(s);
        }
        lo <= tol && hi >= -tol
    }
}
