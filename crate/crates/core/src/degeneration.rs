//! Pinching families of genus-2 surfaces and the envelopes that bound
//! their Selberg zeta values as a curve is pinched.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detlap::SpectralConstants;
use crate::error::{Error, Result};
use crate::extended_log::{ExtendedLog, SATURATION_EXPONENT};
use crate::fenchel_nielsen::{build_genus2_from_fn, FnParams};
use crate::group::GroupPresentation;
use crate::spectrum::{enumerate_spectrum, EnumerationOptions, DEFAULT_BUDGET};
use crate::zeta::{selberg_zeta_log, zeta_ratio_log};

/// `|tau| = e^{-2 pi^2 / l}`.
pub fn tau_coordinate(ell: f64) -> Result<f64> {
    if !(ell > 0.0) || !ell.is_finite() {
        return Err(Error::Domain(format!("pinching length must be positive, got {ell}")));
    }
    Ok((-2.0 * PI * PI / ell).exp())
}

/// Inverse of [`tau_coordinate`].
pub fn tau_to_ell(tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Domain(format!("tau must lie in (0, 1), got {tau}")));
    }
    Ok(-2.0 * PI * PI / tau.ln())
}

/// A one-parameter family obtained by setting some Fenchel–Nielsen lengths
/// of a base surface to each value of a decreasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub base_fn: FnParams,
    /// 1-based indices of the pinched curves.
    pub pinch_indices: Vec<usize>,
    pub ell_grid: Vec<f64>,
    pub n_values: Vec<u32>,
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        if self.pinch_indices.is_empty() {
            return Err(Error::Domain("at least one curve must be pinched".into()));
        }
        let mut seen = [false; 3];
        for &i in &self.pinch_indices {
            if !(1..=3).contains(&i) || std::mem::replace(&mut seen[i - 1], true) {
                return Err(Error::Domain(format!("bad pinch indices {:?}", self.pinch_indices)));
            }
        }
        if self.ell_grid.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::Domain("pinching lengths must be positive".into()));
        }
        if self.ell_grid.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Domain(format!(
                "pinching grid must be strictly decreasing, got {:?}",
                self.ell_grid
            )));
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(Error::Domain(format!("weights must be at least 2, got {n}")));
        }
        Ok(())
    }

    /// Pinched lengths of each member, in grid order.
    pub fn pinched_lengths(&self) -> Vec<Vec<f64>> {
        self.ell_grid
            .iter()
            .map(|&l| vec![l; self.pinch_indices.len()])
            .collect()
    }

    fn member_params(&self, ell: f64) -> FnParams {
        let mut p = self.base_fn.to_array();
        for &i in &self.pinch_indices {
            p[i - 1] = ell;
        }
        FnParams::from_slice(&p).expect("six parameters")
    }
}

/// Builds one surface per grid value, in grid order.
pub fn make_pinching_family(spec: &FamilySpec) -> Result<Vec<GroupPresentation>> {
    spec.validate()?;
    spec.ell_grid
        .iter()
        .map(|&ell| {
            let g = build_genus2_from_fn(&spec.member_params(ell))?;
            let label = format!("{} pinch{:?}={ell}", g.label(), spec.pinch_indices);
            Ok(g.with_label(label))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EnvelopeKind {
    #[serde(rename = "MT1_UPPER")]
    Mt1Upper,
    #[serde(rename = "COR2_LOWER")]
    Cor2Lower,
    #[serde(rename = "COR2_UPPER")]
    Cor2Upper,
    #[serde(rename = "ZX2")]
    Zx2,
    #[serde(rename = "ZX1")]
    Zx1,
    #[serde(rename = "MU_POLE")]
    MuPole,
    #[serde(rename = "PROP3_LOWER")]
    Prop3Lower,
    #[serde(rename = "PROP3_UPPER")]
    Prop3Upper,
    #[serde(rename = "COR4")]
    Cor4,
    #[serde(rename = "COR6")]
    Cor6,
}

impl EnvelopeKind {
    pub const ALL: [EnvelopeKind; 10] = [
        EnvelopeKind::Mt1Upper,
        EnvelopeKind::Cor2Lower,
        EnvelopeKind::Cor2Upper,
        EnvelopeKind::Zx2,
        EnvelopeKind::Zx1,
        EnvelopeKind::MuPole,
        EnvelopeKind::Prop3Lower,
        EnvelopeKind::Prop3Upper,
        EnvelopeKind::Cor4,
        EnvelopeKind::Cor6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnvelopeKind::Mt1Upper => "MT1_UPPER",
            EnvelopeKind::Cor2Lower => "COR2_LOWER",
            EnvelopeKind::Cor2Upper => "COR2_UPPER",
            EnvelopeKind::Zx2 => "ZX2",
            EnvelopeKind::Zx1 => "ZX1",
            EnvelopeKind::MuPole => "MU_POLE",
            EnvelopeKind::Prop3Lower => "PROP3_LOWER",
            EnvelopeKind::Prop3Upper => "PROP3_UPPER",
            EnvelopeKind::Cor4 => "COR4",
            EnvelopeKind::Cor6 => "COR6",
        }
    }

    /// Whether the envelope depends on the weight `n`.
    pub fn needs_weight(self) -> bool {
        !matches!(self, EnvelopeKind::Cor2Lower | EnvelopeKind::Zx2 | EnvelopeKind::Zx1)
    }
}

impl fmt::Display for EnvelopeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvelopeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnvelopeKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown envelope kind {s:?}")))
    }
}

/// Pinched lengths, given directly or through their `tau` coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pinch {
    Ell(Vec<f64>),
    Tau(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeParams {
    pub g: u32,
    pub n: Option<u32>,
    pub pinch: Pinch,
}

impl EnvelopeParams {
    pub fn ell(g: u32, n: Option<u32>, ells: &[f64]) -> Self {
        Self {
            g,
            n,
            pinch: Pinch::Ell(ells.to_vec()),
        }
    }

    fn lengths(&self) -> Result<Vec<f64>> {
        match &self.pinch {
            Pinch::Ell(v) => {
                for &l in v {
                    tau_coordinate(l)?;
                }
                Ok(v.clone())
            }
            Pinch::Tau(v) => v.iter().map(|&t| tau_to_ell(t)).collect(),
        }
    }
}

/// `finite + sum_j exp(inner_j)`, kept as its largest inner exponent when that is too big.
fn assemble(finite: f64, inners: &[f64]) -> ExtendedLog {
    let max = inners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if inners.is_empty() {
        return ExtendedLog::finite(finite);
    }
    let lse = max + inners.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
    if lse > SATURATION_EXPONENT {
        return ExtendedLog::Saturated(lse);
    }
    ExtendedLog::finite(finite + lse.exp())
}

/// Natural log of the right-hand side of the selected estimate, with all
/// unspecified constants set to 1.
pub fn envelope(kind: EnvelopeKind, params: &EnvelopeParams) -> Result<ExtendedLog> {
    let ells = params.lengths()?;
    let g = params.g;
    if g < 2 {
        return Err(Error::Domain(format!("genus must be at least 2, got {g}")));
    }
    let n = match (kind.needs_weight(), params.n) {
        (true, Some(n)) if n >= 2 => f64::from(n),
        (true, other) => {
            return Err(Error::Domain(format!("{kind} needs a weight n >= 2, got {other:?}")));
        }
        (false, _) => 0.0,
    };
    let gm1 = f64::from(g - 1);
    // -log |tau_j|
    let big_l: Vec<f64> = ells.iter().map(|l| 2.0 * PI * PI / l).collect();
    let poly = (4.0 * n * n - 4.0 * n - 3.0).ln();
    let c_tilde_inner = |lj: f64| 80.0 * gm1 * lj / PI + lj.ln();
    let sum = |f: &dyn Fn(usize) -> f64| (0..ells.len()).map(f).sum::<f64>();
    let mumford = |n: u32| -> Result<f64> {
        let cn = SpectralConstants::new(g, n)?;
        let c1 = SpectralConstants::new(g, 1)?;
        let nf = f64::from(n);
        Ok(f64::from(g) * nf * nf + cn.log_c_gn - (6.0 * nf * nf - 6.0 * nf + 1.0) * c1.log_c_gn)
    };
    let value = match kind {
        EnvelopeKind::Mt1Upper => {
            let inners: Vec<f64> = ells.iter().map(|l| 160.0 * PI * gm1 / l - 2.0 * l.ln()).collect();
            assemble(poly, &inners)
        }
        EnvelopeKind::Cor2Lower => ExtendedLog::finite(sum(&|j| 3.0 * big_l[j].ln() - big_l[j] / 6.0)),
        EnvelopeKind::Cor2Upper => {
            let inners: Vec<f64> = big_l.iter().map(|&lj| c_tilde_inner(lj)).collect();
            assemble(poly + sum(&|j| 3.0 * big_l[j].ln() - big_l[j] / 6.0), &inners)
        }
        EnvelopeKind::Zx2 => ExtendedLog::finite(sum(&|j| -PI * PI / (3.0 * ells[j]) - 3.0 * ells[j].ln())),
        EnvelopeKind::Zx1 => ExtendedLog::finite(sum(&|j| -PI * PI / (3.0 * ells[j]) - ells[j].ln())),
        EnvelopeKind::MuPole => ExtendedLog::finite(sum(&|j| 0.5 * n * (n - 1.0) * big_l[j])),
        EnvelopeKind::Prop3Lower | EnvelopeKind::Prop3Upper => {
            let base = mumford(n as u32)?;
            let e = 6.0 * n * n - 6.0 * n - 2.0;
            let local = sum(&|j| 2.0 * n * (n - 1.0) * big_l[j] - e * big_l[j].ln());
            if kind == EnvelopeKind::Prop3Lower {
                ExtendedLog::finite(base + local)
            } else {
                let inners: Vec<f64> = big_l.iter().map(|&lj| c_tilde_inner(lj)).collect();
                assemble(poly + base + local, &inners)
            }
        }
        EnvelopeKind::Cor4 => {
            let e = 6.0 * n * n - 6.0 * n + 1.0;
            let local = sum(&|j| (2.0 * n * (n - 1.0) + 1.0 / 6.0) * big_l[j] - e * big_l[j].ln());
            let inners: Vec<f64> = big_l.iter().map(|&lj| c_tilde_inner(lj)).collect();
            assemble(poly + f64::from(g) * n * n + local, &inners)
        }
        EnvelopeKind::Cor6 => ExtendedLog::finite(2.0 * n.ln()),
    };
    Ok(value)
}

/// Settings for the enumeration and zeta evaluations inside [`check_bounds`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub max_depth: usize,
    pub budget: usize,
    pub k_max: u32,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            max_depth: 200,
            budget: DEFAULT_BUDGET,
            k_max: 40,
        }
    }
}

/// Outcome of the bound checks for one family member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub label: String,
    pub ell: Vec<f64>,
    pub tau_abs: Vec<f64>,
    pub valid: bool,
    pub note: Option<String>,
    pub systole: Option<f64>,
    pub log_z2: Option<f64>,
    pub log_zn: BTreeMap<u32, f64>,
    pub envelope_logs: BTreeMap<u32, BTreeMap<EnvelopeKind, ExtendedLog>>,
    pub lower_ok: BTreeMap<u32, bool>,
    pub upper_ok: BTreeMap<u32, bool>,
}

struct ZetaData {
    systole: Option<f64>,
    log_z2: f64,
    log_zn: BTreeMap<u32, f64>,
    ratios: BTreeMap<u32, f64>,
}

fn member_zeta(group: &GroupPresentation, n_values: &[u32], cutoff: f64, opts: &CheckOptions) -> Result<ZetaData> {
    let spec = enumerate_spectrum(group, &EnumerationOptions { cutoff, max_depth: opts.max_depth, budget: opts.budget })?;
    spec.require_stabilized()?;
    let log_z2 = selberg_zeta_log(&spec, 2.0, opts.k_max)?.log_value;
    let mut log_zn = BTreeMap::new();
    let mut ratios = BTreeMap::new();
    for &n in n_values {
        log_zn.insert(n, selberg_zeta_log(&spec, f64::from(n), opts.k_max)?.log_value);
        ratios.insert(n, zeta_ratio_log(&spec, n, opts.k_max)?);
    }
    Ok(ZetaData {
        systole: spec.systole(),
        log_z2,
        log_zn,
        ratios,
    })
}

/// Evaluates both sides of the zeta bounds for each member, given the
/// lengths of its pinched curves (possibly none). Members whose spectrum
/// cannot be certified give records marked invalid.
pub fn check_bounds(
    family: &[GroupPresentation],
    pinched: &[Vec<f64>],
    n_values: &[u32],
    cutoffs: &[f64],
    opts: &CheckOptions,
) -> Result<Vec<BoundRecord>> {
    if pinched.len() != family.len() {
        return Err(Error::Domain(format!(
            "{} surfaces but {} lists of pinched lengths",
            family.len(),
            pinched.len()
        )));
    }
    if !(cutoffs.len() == 1 || cutoffs.len() == family.len()) {
        return Err(Error::Domain(format!("need 1 or {} cutoffs, got {}", family.len(), cutoffs.len())));
    }
    if let Some(n) = n_values.iter().find(|&&n| n < 2) {
        return Err(Error::Domain(format!("weights must be at least 2, got {n}")));
    }
    let cutoff_at = |i: usize| if cutoffs.len() == 1 { cutoffs[0] } else { cutoffs[i] };
    family
        .par_iter()
        .enumerate()
        .map(|(i, group)| -> Result<BoundRecord> {
            let genus = group.genus();
            let ell = pinched[i].clone();
            let tau_abs = ell.iter().map(|&l| tau_coordinate(l)).collect::<Result<Vec<_>>>()?;
            let mut envelope_logs = BTreeMap::new();
            for &n in n_values {
                let params = EnvelopeParams::ell(genus, Some(n), &ell);
                let mut per_kind = BTreeMap::new();
                for kind in EnvelopeKind::ALL {
                    per_kind.insert(kind, envelope(kind, &params)?);
                }
                envelope_logs.insert(n, per_kind);
            }
            let mut record = BoundRecord {
                label: group.label().to_string(),
                ell,
                tau_abs,
                valid: false,
                note: None,
                systole: None,
                log_z2: None,
                log_zn: BTreeMap::new(),
                envelope_logs,
                lower_ok: BTreeMap::new(),
                upper_ok: BTreeMap::new(),
            };
            match member_zeta(group, n_values, cutoff_at(i), opts) {
                Ok(z) => {
                    record.valid = true;
                    record.systole = z.systole;
                    record.log_z2 = Some(z.log_z2);
                    for (&n, &r) in &z.ratios {
                        record.lower_ok.insert(n, r >= 0.0);
                        let mt1 = record.envelope_logs[&n][&EnvelopeKind::Mt1Upper];
                        record.upper_ok.insert(n, mt1.bounds(r));
                    }
                    record.log_zn = z.log_zn;
                }
                Err(e) => record.note = Some(e.to_string()),
            }
            Ok(record)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tau_round_trip() {
        assert_relative_eq!(tau_coordinate(2.0 * PI * PI / 10f64.ln()).unwrap(), 0.1, max_relative = 1e-14);
        let mut prev = 1.0;
        for l in [3.0, 1.0, 0.5, 0.1] {
            let t = tau_coordinate(l).unwrap();
            assert!(t < prev && t > 0.0);
            prev = t;
            assert_relative_eq!(tau_to_ell(t).unwrap(), l, max_relative = 1e-12);
        }
        assert!(tau_coordinate(0.0).is_err());
        assert!(tau_to_ell(1.0).is_err());
    }

    #[test]
    fn simple_envelopes() {
        let zx2 = envelope(EnvelopeKind::Zx2, &EnvelopeParams::ell(2, None, &[1.0])).unwrap();
        assert_relative_eq!(zx2.finite_value().unwrap(), -PI * PI / 3.0, max_relative = 1e-15);
        let sat = envelope(EnvelopeKind::Mt1Upper, &EnvelopeParams::ell(2, Some(3), &[0.05])).unwrap();
        match sat {
            ExtendedLog::Saturated(inner) => {
                assert_relative_eq!(inner, 160.0 * PI / 0.05 - 2.0 * 0.05f64.ln(), max_relative = 1e-14)
            }
            other => panic!("expected saturation, got {other:?}"),
        }
        let fin = envelope(EnvelopeKind::Mt1Upper, &EnvelopeParams::ell(2, Some(3), &[3.0])).unwrap();
        let expect = 21f64.ln() + (160.0 * PI / 3.0).exp() / 9.0;
        assert_relative_eq!(fin.finite_value().unwrap(), expect, max_relative = 1e-13);
        assert!(envelope(EnvelopeKind::MuPole, &EnvelopeParams::ell(2, None, &[1.0])).is_err());
        assert!("NOPE".parse::<EnvelopeKind>().is_err());
        assert_eq!("zx2".parse::<EnvelopeKind>().unwrap(), EnvelopeKind::Zx2);
    }

    #[test]
    fn tau_and_ell_inputs_agree() {
        let ells = [0.7, 1.3];
        let taus: Vec<f64> = ells.iter().map(|&l| tau_coordinate(l).unwrap()).collect();
        for kind in EnvelopeKind::ALL {
            let a = envelope(kind, &EnvelopeParams::ell(2, Some(3), &ells)).unwrap();
            let b = envelope(kind, &EnvelopeParams { g: 2, n: Some(3), pinch: Pinch::Tau(taus.clone()) }).unwrap();
            match (a, b) {
                (ExtendedLog::Finite(x), ExtendedLog::Finite(y)) | (ExtendedLog::Saturated(x), ExtendedLog::Saturated(y)) => {
                    assert_relative_eq!(x, y, max_relative = 1e-10)
                }
                _ => panic!("{kind}: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn family_validation() {
        let mut spec = FamilySpec {
            base_fn: FnParams::new(1.0, 2.0, 2.0, 0.0, 0.0, 0.0),
            pinch_indices: vec![1],
            ell_grid: vec![],
            n_values: vec![2],
        };
        assert!(make_pinching_family(&spec).unwrap().is_empty());
        spec.ell_grid = vec![1.0, 1.0];
        assert!(make_pinching_family(&spec).is_err());
        spec.ell_grid = vec![1.0, 0.5];
        spec.pinch_indices = vec![4];
        assert!(make_pinching_family(&spec).is_err());
    }
}
