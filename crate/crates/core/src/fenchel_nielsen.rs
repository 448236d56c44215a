//! Genus-2 groups from Fenchel–Nielsen coordinates.
//!
//! The surface is cut along three curves into two pairs of pants. The first
//! pants group is generated by `A1, A2` with `A1 A2 A3 = 1`, where the axes of
//! `A1` and `A2` are joined by a common perpendicular of length `d12` fixed by
//! the right-angled hexagon identity
//!
//! ```text
//! cosh d12 = (cosh(l3/2) + cosh(l1/2) cosh(l2/2)) / (sinh(l1/2) sinh(l2/2)).
//! ```
//!
//! The second pants is the mirror image of the first (reflected across the
//! axis of `A1`) and is glued back with a translation by `theta_i / 2pi` of
//! the boundary length along each curve. Reflections are orientation
//! reversing, so they are handled as raw determinant `-1` matrices.

use crate::dd::{Dd, DdMat};
use crate::error::{Error, Result};
use crate::group::{GroupPresentation, Word};
use crate::moebius::classify;

/// Lengths and twist angles of the three gluing curves. A twist of `2 pi`
/// is a full Dehn twist.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FnParams {
    pub lengths: [f64; 3],
    pub twists: [f64; 3],
}

impl FnParams {
    pub fn new(l1: f64, l2: f64, l3: f64, t1: f64, t2: f64, t3: f64) -> Self {
        Self {
            lengths: [l1, l2, l3],
            twists: [t1, t2, t3],
        }
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        match v {
            [l1, l2, l3, t1, t2, t3] => Ok(Self::new(*l1, *l2, *l3, *t1, *t2, *t3)),
            _ => Err(Error::Domain(format!(
                "expected six Fenchel-Nielsen parameters, got {}",
                v.len()
            ))),
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        let [a, b, c] = self.lengths;
        let [d, e, f] = self.twists;
        [a, b, c, d, e, f]
    }
}

const REFLECT_IMAG: DdMat = DdMat([Dd { hi: -1.0, lo: 0.0 }, Dd::ZERO, Dd::ZERO, Dd::ONE]);

/// A frame carrying the upward imaginary axis onto the oriented axis of a
/// hyperbolic matrix, and the translation length.
fn axis_frame(m: &DdMat) -> Result<(DdMat, Dd)> {
    let [_, _, c, d] = m.0;
    let tr = m.trace();
    let t = tr.abs();
    if !(t.hi > 2.0) || c.hi.abs() < 1e-300 {
        return Err(Error::Construction("degenerate axis in gluing".into()));
    }
    let disc = (tr.sqr() - Dd::from(4.0)).sqrt();
    let sign = Dd::from(tr.hi.signum());
    let big = (t + disc) * Dd::from(0.5) * sign;
    let small = (t - disc) * Dd::from(0.5) * sign;
    let rep = (small - d) / c;
    let att = (big - d) / c;
    let frame = if att.hi > rep.hi {
        DdMat([att, rep, Dd::ONE, Dd::ONE])
    } else {
        DdMat([att, -rep, Dd::ONE, -Dd::ONE])
    };
    let length = (t * Dd::from(0.5)).acosh() * Dd::from(2.0);
    Ok((frame.normalized(), length))
}

fn reflection_across(m: &DdMat) -> Result<DdMat> {
    let (f, _) = axis_frame(m)?;
    Ok(DdMat::product(&[f, REFLECT_IMAG, f.inverse()]))
}

/// `m^s` for real `s`, along the axis of `m`.
fn real_power(m: &DdMat, s: Dd) -> Result<DdMat> {
    let (f, length) = axis_frame(m)?;
    Ok(DdMat::product(&[f, DdMat::diagonal(s * length), f.inverse()]))
}

/// Relator of the presentation returned by [`build_genus2_from_fn`], with
/// generators `(A1, B2, t2, t3)`.
pub const FN_RELATOR: [i32; 8] = [1, 3, 2, -3, 4, -2, -1, -4];

/// Words in the generators representing the three gluing curves.
pub fn boundary_words() -> [Word; 3] {
    [
        Word::reduce([1]),
        Word::reduce([3, 2, -3]),
        Word::reduce([4, -2, -1, -4]),
    ]
}

/// Builds the genus-2 group with the given lengths and twists.
///
/// Generators are `A1` (first curve), `B2` (mirror copy of `A2` in the
/// second pants) and the gluing maps `t2, t3` carrying the second copies of
/// curves 2 and 3 onto the first. The group is finally conjugated so the
/// base point `i` sits midway along the perpendicular between curves 1 and 2.
pub fn build_genus2_from_fn(p: &FnParams) -> Result<GroupPresentation> {
    let [l1, l2, l3] = p.lengths;
    if p.lengths.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(Error::Domain(format!("curve lengths must be positive, got {:?}", p.lengths)));
    }
    if p.twists.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain("twists must be finite".into()));
    }
    let half = |l: f64| Dd::from(l) * Dd::from(0.5);
    let (h1, h2, h3) = (half(l1), half(l2), half(l3));
    let cosh_d = (h3.cosh() + h1.cosh() * h2.cosh()) / (h1.sinh() * h2.sinh());
    if !(cosh_d.hi >= 1.0) || !cosh_d.hi.is_finite() {
        return Err(Error::Construction(format!("hexagon side has cosh {}", cosh_d.hi)));
    }
    let d12 = cosh_d.acosh();

    let a1 = DdMat::diagonal(Dd::from(l1));
    let td = DdMat::unit_circle_translation(d12);
    let target = 2.0 * h3.to_f64().cosh();
    let a2 = [l2, -l2]
        .into_iter()
        .map(|l| DdMat::product(&[td, DdMat::diagonal(Dd::from(l)), td.inverse()]))
        .min_by(|x, y| {
            let ex = (a1.mul(x).trace().to_f64().abs() - target).abs();
            let ey = (a1.mul(y).trace().to_f64().abs() - target).abs();
            ex.total_cmp(&ey)
        })
        .expect("two orientations");
    let a3 = a1.mul(&a2).inverse();
    let residual = (a1.mul(&a2).trace().to_f64().abs() - target).abs();
    if residual > 1e-9 * target.max(1.0) {
        return Err(Error::Construction(format!(
            "third boundary trace off by {residual:.3e}"
        )));
    }

    let r1 = REFLECT_IMAG;
    let r2 = reflection_across(&a2)?;
    let r3 = reflection_across(&a3)?;
    let turns = |theta: f64| Dd::from(theta) / (Dd::PI * Dd::from(2.0));
    let tw1 = DdMat::diagonal(turns(p.twists[0]) * Dd::from(l1));
    let tw2 = real_power(&a2, turns(p.twists[1]))?;
    let tw3 = real_power(&a3, turns(p.twists[2]))?;
    let tw1_inv = tw1.inverse();

    let b2 = DdMat::product(&[tw1, r1, a2, r1, tw1_inv]);
    let t2 = DdMat::product(&[tw2, r2, r1, tw1_inv]);
    let t3 = DdMat::product(&[tw3, r3, r1, tw1_inv]);

    let center = DdMat::unit_circle_translation(d12 * Dd::from(0.5));
    let (m, m_inv) = (center.inverse(), center);
    let generators: Vec<DdMat> = [a1, b2, t2, t3]
        .iter()
        .map(|g| DdMat::product(&[m, *g, m_inv]).normalized())
        .collect();
    let [l1s, l2s, l3s] = p.lengths;
    let label = format!(
        "fn({l1s},{l2s},{l3s},{},{},{})",
        p.twists[0], p.twists[1], p.twists[2]
    );
    let relator = Word::new(FN_RELATOR.to_vec())?;
    let group = GroupPresentation::new_precise(label, 2, generators, vec![relator]).map_err(|e| match e {
        Error::RelatorViolation { index, residual } => Error::Invariant(format!(
            "relator {index} residual {residual:.3e} after gluing"
        )),
        other => other,
    })?;
    for (w, l) in boundary_words().iter().zip(p.lengths) {
        let got = classify(&group.evaluate(w)).length;
        if (got - l).abs() > 1e-9 * l.max(1.0) {
            return Err(Error::Invariant(format!(
                "boundary word {w} has length {got}, expected {l}"
            )));
        }
    }
    Ok(group)
}

/// Two congruent pants with all cuffs of length 2, glued without twist.
pub fn builtin_pants_double() -> GroupPresentation {
    build_genus2_from_fn(&FnParams::new(2.0, 2.0, 2.0, 0.0, 0.0, 0.0))
        .expect("symmetric gluing is valid")
        .with_label("pants-double")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_traces_and_relator() {
        for p in [
            FnParams::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0),
            FnParams::new(0.3, 2.0, 2.0, 0.0, 0.0, 0.0),
            FnParams::new(1.0, 2.0, 2.0, 0.7, -1.1, 2.5),
            FnParams::new(0.25, 2.0, 2.0, 0.0, 0.0, 0.0),
        ] {
            let g = build_genus2_from_fn(&p).unwrap();
            let res = g.evaluate(&g.relators()[0]).identity_residual();
            assert!(res < 1e-9, "{p:?}: {res}");
            for (w, l) in boundary_words().iter().zip(p.lengths) {
                let tr = g.evaluate(w).trace().abs();
                assert!((tr - 2.0 * (0.5 * l).cosh()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_nonpositive_lengths() {
        assert!(matches!(
            build_genus2_from_fn(&FnParams::new(0.0, 1.0, 1.0, 0.0, 0.0, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(build_genus2_from_fn(&FnParams::new(-1.0, 1.0, 1.0, 0.0, 0.0, 0.0)).is_err());
    }
}
