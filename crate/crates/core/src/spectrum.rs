//! Primitive length spectra of Fuchsian groups.
//!
//! For surface groups the enumeration is organised around a Dirichlet
//! domain `D` centred at `i`, certified by its Gauss–Bonnet area. Every
//! conjugacy class of length at most `L` has a representative whose axis
//! meets `D`; following that axis across translates of `D` shows such
//! representatives lie within distance `2 rho + L` of `i` in the word
//! metric of the face pairings, where `rho` is the covering radius. Two
//! such representatives are conjugate through an element of displacement at
//! most `2 rho + L / 2`. The element ball is therefore grown with the face
//! pairings as alphabet and pruned at the larger of those radii plus the
//! growth needed to reach every conjugator.
//!
//! Groups without a bounded domain (for example cyclic ones) fall back to
//! a plain word ball in the given generators with every element tried as a
//! conjugator.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::{round, Alphabet, Ball};
use crate::dd::DdMat;
use crate::dirichlet::DirichletDomain;
use crate::error::{Error, Result};
use crate::extended_log::ExtendedLog;
use crate::group::{GroupPresentation, Word};
use crate::moebius::{MoebiusElement, TRACE_TOL};

/// Lengths closer than this are one spectrum entry.
pub const LENGTH_CLUSTER_TOL: f64 = 1e-9;
/// Default cap on the number of enumerated group elements.
pub const DEFAULT_BUDGET: usize = 4_000_000;

const AREA_REL_TOL: f64 = 1e-7;
const RADIUS_SLACK: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationOptions {
    pub cutoff: f64,
    pub max_depth: usize,
    pub budget: usize,
}

impl EnumerationOptions {
    pub fn new(cutoff: f64, max_depth: usize) -> Self {
        Self {
            cutoff,
            max_depth,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub length: f64,
    /// Number of oriented primitive classes with this length.
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugacyClass {
    pub canonical: Word,
    pub representative: MoebiusElement,
    pub length: f64,
    pub primitive: bool,
    pub power_index: u32,
}

/// How the enumeration was carried out.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EnumerationDiagnostics {
    pub elements: usize,
    pub face_pairings: usize,
    pub covering_radius: Option<f64>,
    pub domain_area: Option<f64>,
    pub prune_radius: Option<f64>,
    pub exhausted: bool,
    /// Multiplicity parity per entry at the last two depths agreed.
    pub parity_stable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LengthSpectrum {
    entries: Vec<SpectrumEntry>,
    cutoff: f64,
    word_depth: usize,
    stabilized: bool,
    genus: u32,
    classes: Vec<ConjugacyClass>,
    diagnostics: EnumerationDiagnostics,
}

impl LengthSpectrum {
    /// A synthetic spectrum, treated as stabilized.
    pub fn from_entries(entries: Vec<SpectrumEntry>, cutoff: f64, genus: u32) -> Result<Self> {
        if !(cutoff > 0.0) {
            return Err(Error::Domain("cutoff must be positive".into()));
        }
        for w in entries.windows(2) {
            if !(w[1].length > w[0].length + LENGTH_CLUSTER_TOL) {
                return Err(Error::Domain("spectrum lengths must be strictly increasing".into()));
            }
        }
        if let Some(e) = entries
            .iter()
            .find(|e| !(e.length > 0.0 && e.length <= cutoff) || e.multiplicity == 0)
        {
            return Err(Error::Domain(format!("invalid spectrum entry {e:?}")));
        }
        Ok(Self {
            entries,
            cutoff,
            word_depth: 0,
            stabilized: true,
            genus,
            classes: Vec::new(),
            diagnostics: EnumerationDiagnostics::default(),
        })
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn word_depth(&self) -> usize {
        self.word_depth
    }

    pub fn stabilized(&self) -> bool {
        self.stabilized
    }

    /// Genus of the underlying surface, 0 when there is none.
    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// All classes found, including imprimitive ones.
    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn diagnostics(&self) -> &EnumerationDiagnostics {
        &self.diagnostics
    }

    /// The systole, if any geodesic lies below the cutoff.
    pub fn systole(&self) -> Option<f64> {
        self.entries.first().map(|e| e.length)
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| u64::from(e.multiplicity)).sum()
    }

    /// Fails with [`Error::Unstabilized`] unless the certificate holds.
    pub fn require_stabilized(&self) -> Result<()> {
        if self.stabilized {
            Ok(())
        } else {
            Err(Error::Unstabilized {
                depth: self.word_depth,
            })
        }
    }

    pub fn same_entries(&self, other: &Self) -> bool {
        same_entries(&self.entries, &other.entries)
    }
}

fn same_entries(a: &[SpectrumEntry], b: &[SpectrumEntry]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.multiplicity == y.multiplicity && (x.length - y.length).abs() <= LENGTH_CLUSTER_TOL
        })
}

/// Number of oriented primitive geodesics of length at most `u`.
pub fn count_geodesics(spec: &LengthSpectrum, u: f64) -> Result<u64> {
    if u > spec.cutoff {
        return Err(Error::Range(format!(
            "u = {u} exceeds the spectrum cutoff {}",
            spec.cutoff
        )));
    }
    Ok(spec
        .entries
        .iter()
        .take_while(|e| e.length <= u + LENGTH_CLUSTER_TOL)
        .map(|e| u64::from(e.multiplicity))
        .sum())
}

/// Log of the prime-geodesic envelope `exp(80 pi (g - 1) / l_X + u)`.
pub fn pgt_log_bound(genus: u32, systole: f64, u: f64) -> Result<ExtendedLog> {
    if genus < 2 || !(systole > 0.0) || !(u >= 0.0) {
        return Err(Error::Domain(format!(
            "pgt bound needs g >= 2, l_X > 0, u >= 0 (got {genus}, {systole}, {u})"
        )));
    }
    Ok(ExtendedLog::finite(pgt_exponent(genus, systole) + u))
}

pub(crate) fn pgt_exponent(genus: u32, systole: f64) -> f64 {
    80.0 * PI * f64::from(genus - 1) / systole
}

fn cyclic_canonical(w: &Word) -> Word {
    let mut l = w.letters().to_vec();
    while l.len() >= 2 && l[0] == -l[l.len() - 1] {
        l.pop();
        l.remove(0);
    }
    let n = l.len();
    if n == 0 {
        return Word::default();
    }
    let ranks: Vec<u32> = l.iter().map(|&x| Word::letter_rank(x)).collect();
    let best = (0..n)
        .min_by(|&a, &b| {
            (0..n)
                .map(|i| ranks[(a + i) % n])
                .cmp((0..n).map(|i| ranks[(b + i) % n]))
        })
        .expect("non-empty");
    Word::reduce((0..n).map(|i| l[(best + i) % n]))
}

struct Setting<'a> {
    ball: &'a Ball,
    alphabet: &'a Alphabet,
    domain: Option<&'a DirichletDomain>,
    cutoff: f64,
    conj_cosh: f64,
}

struct Found {
    entries: Vec<SpectrumEntry>,
    classes: Vec<ConjugacyClass>,
}

fn spectrum_at(set: &Setting<'_>, depth_limit: u32) -> Result<Found> {
    let ball = set.ball;
    let nodes = &ball.nodes;
    let trace_cut = 2.0 * (0.5 * set.cutoff).cosh() * (1.0 + 1e-12);
    let mut candidates: Vec<(f64, usize)> = nodes
        .par_iter()
        .enumerate()
        .filter_map(|(i, n)| {
            if n.depth > depth_limit {
                return None;
            }
            let tr = n.g.trace().abs();
            if tr <= 2.0 + TRACE_TOL || tr > trace_cut {
                return None;
            }
            if let Some(dom) = set.domain {
                let (p, q) = n.g.fixed_points()?;
                if !dom.meets_geodesic(p, q, 1e-7) {
                    return None;
                }
            }
            Some((n.g.classify().length, i))
        })
        .filter(|(l, _)| *l <= set.cutoff + LENGTH_CLUSTER_TOL)
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut cand_of = vec![u32::MAX; nodes.len()];
    for (ci, &(_, ni)) in candidates.iter().enumerate() {
        cand_of[ni] = ci as u32;
    }
    let conjugators: Vec<usize> = (0..nodes.len())
        .filter(|&i| nodes[i].depth <= depth_limit && nodes[i].cosh_disp <= set.conj_cosh)
        .collect();

    let mut class_of = vec![u32::MAX; candidates.len()];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for ci in 0..candidates.len() {
        if class_of[ci] != u32::MAX {
            continue;
        }
        let cid = members.len() as u32;
        let h = nodes[candidates[ci].1].p;
        let mut found: Vec<usize> = conjugators
            .par_iter()
            .filter_map(|&k| {
                let kp = &nodes[k].p;
                let c = round(&kp.mul(&h).mul(&kp.inverse()));
                let j = ball.find(&c)?;
                let cj = cand_of[j];
                (cj != u32::MAX && nodes[j].depth <= depth_limit).then_some(cj as usize)
            })
            .collect();
        found.push(ci);
        found.sort_unstable();
        found.dedup();
        for &cj in &found {
            if class_of[cj] != u32::MAX && class_of[cj] != cid {
                return Err(Error::Invariant(format!(
                    "conjugacy scan merged two classes at length {}",
                    candidates[cj].0
                )));
            }
            class_of[cj] = cid;
        }
        members.push(found);
    }

    let min_len = candidates.first().map(|c| c.0).unwrap_or(f64::INFINITY);
    let classes: Vec<ConjugacyClass> = members
        .par_iter()
        .map(|mem| {
            // The member closest to the base point has the best-conditioned matrix.
            let best = *mem
                .iter()
                .min_by(|&&x, &&y| {
                    nodes[candidates[x].1]
                        .cosh_disp
                        .total_cmp(&nodes[candidates[y].1].cosh_disp)
                        .then(x.cmp(&y))
                })
                .expect("class has members");
            let rep = nodes[candidates[best].1].g;
            let length = rep.classify().length;
            let mut power_index = 1;
            let max_m = ((length + LENGTH_CLUSTER_TOL) / min_len).floor() as u32;
            for m in 2..=max_m {
                if let Ok(root) = rep.real_power(1.0 / f64::from(m)) {
                    if let Some(j) = ball.find(&root) {
                        if cand_of[j] != u32::MAX && nodes[j].depth <= depth_limit {
                            power_index = m;
                        }
                    }
                }
            }
            let canonical = mem
                .iter()
                .map(|&cj| cyclic_canonical(&ball.word(candidates[cj].1, set.alphabet)))
                .min_by(|a, b| a.shortlex_cmp(b))
                .expect("class has members");
            ConjugacyClass {
                canonical,
                representative: rep,
                length,
                primitive: power_index == 1,
                power_index,
            }
        })
        .collect();
    let mut classes = classes;
    classes.sort_by(|a, b| {
        a.length
            .total_cmp(&b.length)
            .then_with(|| a.canonical.shortlex_cmp(&b.canonical))
    });

    let mut entries: Vec<SpectrumEntry> = Vec::new();
    for c in classes.iter().filter(|c| c.primitive) {
        match entries.last_mut() {
            Some(e) if c.length - e.length <= LENGTH_CLUSTER_TOL => e.multiplicity += 1,
            _ => entries.push(SpectrumEntry {
                length: c.length,
                multiplicity: 1,
            }),
        }
    }
    Ok(Found { entries, classes })
}

pub(crate) fn generator_alphabet(group: &GroupPresentation) -> Alphabet {
    let letters = group.alphabet();
    Alphabet::new(
        letters.iter().map(|&l| group.letter_precise(l)).collect(),
        letters.iter().map(|&l| Word::reduce([l])).collect(),
    )
}

/// Certified Dirichlet domain of a surface group together with a ball of
/// elements large enough to carve it.
struct DomainData {
    domain: DirichletDomain,
    alphabet: Alphabet,
}

fn certified_domain(group: &GroupPresentation, budget: usize) -> Result<DomainData> {
    let gens = generator_alphabet(group);
    let expected = 4.0 * PI * f64::from(group.genus() - 1);
    // Start from a short unpruned word ball, then regrow with the face
    // pairings of the current polygon (plus the generators) inside twice
    // its covering radius until the area matches.
    let mut alphabet = gens.clone();
    let mut ball = Ball::grow(&gens, f64::INFINITY, 3, budget)?;
    let mut last_area = f64::INFINITY;
    for _ in 0..24 {
        let elements: Vec<MoebiusElement> = ball.nodes.iter().map(|n| n.g).collect();
        let domain = DirichletDomain::from_elements(&elements);
        last_area = domain.area();
        let labels = domain.face_labels();
        let mut next = Alphabet::new(
            labels.iter().map(|&i| ball.nodes[i].p).collect(),
            labels.iter().map(|&i| ball.word(i, &alphabet)).collect(),
        );
        if domain.is_bounded() && (last_area - expected).abs() <= AREA_REL_TOL * expected {
            // Re-evaluate the face pairings from their words at extended
            // precision so that their products close up to rounding.
            let precise: Vec<DdMat> = next.words.iter().map(|w| group.evaluate_dd(w)).collect();
            let next = Alphabet::new(precise, next.words);
            if next.inverse_of.iter().any(Option::is_none) {
                return Err(Error::Invariant("face pairings are not closed under inversion".into()));
            }
            let domain = DirichletDomain::from_elements(&next.elements);
            return Ok(DomainData {
                domain,
                alphabet: next,
            });
        }
        if domain.is_bounded() {
            next.extend(&gens);
            let radius = 2.0 * domain.covering_radius() + 0.5;
            ball = Ball::grow(&next, radius.cosh(), usize::MAX, budget)?;
        } else {
            next.extend(&gens);
            ball = Ball::grow(&next, f64::INFINITY, 3, budget)?;
        }
        alphabet = next;
    }
    Err(Error::SearchFailure(format!(
        "no Dirichlet domain of area {expected} found (last area {last_area})"
    )))
}

/// Enumerates the oriented primitive length spectrum up to `opts.cutoff`.
pub fn enumerate_spectrum(group: &GroupPresentation, opts: &EnumerationOptions) -> Result<LengthSpectrum> {
    if !(opts.cutoff > 0.0) || !opts.cutoff.is_finite() {
        return Err(Error::Domain(format!("cutoff must be positive, got {}", opts.cutoff)));
    }
    if opts.max_depth < 1 {
        return Err(Error::Domain("max_depth must be at least 1".into()));
    }
    let cutoff = opts.cutoff;
    let mut diagnostics = EnumerationDiagnostics::default();
    let (alphabet, domain, prune_cosh, conj_cosh) = if group.is_surface() {
        let data = certified_domain(group, opts.budget)?;
        let rho = data.domain.covering_radius();
        let conj = 2.0 * rho + 0.5 * cutoff + RADIUS_SLACK;
        let prune = (2.0 * rho + cutoff).max(conj + rho) + RADIUS_SLACK;
        diagnostics.covering_radius = Some(rho);
        diagnostics.domain_area = Some(data.domain.area());
        diagnostics.prune_radius = Some(prune);
        diagnostics.face_pairings = data.alphabet.elements.len();
        (data.alphabet, Some(data.domain), prune.cosh(), conj.cosh())
    } else {
        (generator_alphabet(group), None, f64::INFINITY, f64::INFINITY)
    };
    let ball = Ball::grow(&alphabet, prune_cosh, opts.max_depth, opts.budget)?;
    diagnostics.elements = ball.len();
    diagnostics.exhausted = ball.exhausted;
    let setting = Setting {
        ball: &ball,
        alphabet: &alphabet,
        domain: domain.as_ref(),
        cutoff,
        conj_cosh,
    };
    let depth = (ball.layers.len() - 1) as u32;
    let last = spectrum_at(&setting, depth)?;
    let (stabilized, parity_stable) = if ball.exhausted || depth == 0 {
        (true, true)
    } else {
        let prev = spectrum_at(&setting, depth - 1)?;
        let parity = prev.entries.len() == last.entries.len()
            && prev
                .entries
                .iter()
                .zip(&last.entries)
                .all(|(a, b)| a.multiplicity % 2 == b.multiplicity % 2);
        (same_entries(&prev.entries, &last.entries), parity)
    };
    diagnostics.parity_stable = parity_stable;
    Ok(LengthSpectrum {
        entries: last.entries,
        cutoff,
        word_depth: depth as usize,
        stabilized,
        genus: group.genus(),
        classes: last.classes,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{builtin_octagon, cyclic_group};

    #[test]
    fn cyclic_toy_group() {
        let g = cyclic_group(1.0).unwrap();
        let s = enumerate_spectrum(&g, &EnumerationOptions::new(3.5, 6)).unwrap();
        assert_eq!(s.entries().len(), 1);
        assert!((s.entries()[0].length - 1.0).abs() < 1e-12);
        assert_eq!(s.entries()[0].multiplicity, 2);
        assert!(s.stabilized());
        // powers 2 and 3 in both orientations, flagged imprimitive
        let imprimitive: Vec<u32> = s.classes().iter().filter(|c| !c.primitive).map(|c| c.power_index).collect();
        assert_eq!(imprimitive, vec![2, 2, 3, 3]);
        assert_eq!(count_geodesics(&s, 1.0).unwrap(), 2);
        assert_eq!(count_geodesics(&s, 0.5).unwrap(), 0);
        assert!(count_geodesics(&s, 4.0).is_err());
    }

    #[test]
    fn octagon_systole_cluster() {
        let g = builtin_octagon();
        let s = enumerate_spectrum(&g, &EnumerationOptions::new(3.1, 12)).unwrap();
        assert!(s.stabilized());
        assert_eq!(s.entries().len(), 1);
        let sys = 2.0 * (1.0 + 2f64.sqrt()).acosh();
        assert!((s.entries()[0].length - sys).abs() < 1e-9);
        assert!((s.diagnostics().domain_area.unwrap() - 4.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn canonical_rotation() {
        let w = Word::new(vec![2, -1, 3, 1, -2]).unwrap();
        assert_eq!(cyclic_canonical(&w).letters(), &[3]);
        let w = Word::new(vec![2, -1, 3, 3, -2]).unwrap();
        assert_eq!(cyclic_canonical(&w).letters(), &[-1, 3, 3]);
        let w = Word::new(vec![2, 1]).unwrap();
        assert_eq!(cyclic_canonical(&w).letters(), &[1, 2]);
    }

    #[test]
    fn pgt_bound_arithmetic() {
        let b = pgt_log_bound(2, 3.0, 5.0).unwrap().finite_value().unwrap();
        assert!((b - (80.0 * PI / 3.0 + 5.0)).abs() < 1e-12);
        let d = pgt_log_bound(2, 1.3, 1.0).unwrap().finite_value().unwrap()
            - pgt_log_bound(2, 1.3, 0.0).unwrap().finite_value().unwrap();
        assert_eq!(d, 1.0);
    }

    #[test]
    fn synthetic_spectrum_validation() {
        let e = |l, m| SpectrumEntry { length: l, multiplicity: m };
        assert!(LengthSpectrum::from_entries(vec![e(1.0, 2), e(2.0, 4)], 3.0, 2).is_ok());
        assert!(LengthSpectrum::from_entries(vec![e(2.0, 2), e(1.0, 4)], 3.0, 2).is_err());
        assert!(LengthSpectrum::from_entries(vec![e(4.0, 2)], 3.0, 2).is_err());
    }
}
