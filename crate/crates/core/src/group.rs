//! Finitely presented Fuchsian groups: generator matrices plus relator words.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dd::{Dd, DdMat};
use crate::error::{Error, Result};
use crate::moebius::{classify, IsometryKind, MoebiusElement};

/// Entrywise tolerance for relator evaluation.
pub const RELATOR_TOL: f64 = 1e-9;

/// A freely reduced word in the generators; letter `k > 0` is generator
/// `k - 1`, letter `-k` its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word {
    letters: Vec<i32>,
}

impl Word {
    /// Validates that `letters` is nonzero and freely reduced.
    pub fn new(letters: Vec<i32>) -> Result<Self> {
        if letters.contains(&0) {
            return Err(Error::Schema("letter 0 is not a generator index".into()));
        }
        if letters.windows(2).any(|w| w[0] == -w[1]) {
            return Err(Error::Schema(format!("word {letters:?} is not freely reduced")));
        }
        Ok(Self { letters })
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            if l == 0 {
                continue;
            }
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self { letters: out }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    /// Position of a letter in the order `1, -1, 2, -2, ...`.
    pub fn letter_rank(l: i32) -> u32 {
        let k = l.unsigned_abs();
        2 * (k - 1) + u32::from(l < 0)
    }

    /// Shortlex comparison with letters ordered `1, -1, 2, -2, ...`.
    pub fn shortlex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            self.letters
                .iter()
                .map(|&l| Self::letter_rank(l))
                .cmp(other.letters.iter().map(|&l| Self::letter_rank(l)))
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Generators, relators and metadata of a Fuchsian group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPresentation {
    generators: Vec<MoebiusElement>,
    relators: Vec<Word>,
    genus: u32,
    label: String,
    /// Extended-precision generators, when the constructor had them.
    precise: Option<Vec<DdMat>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GroupFile {
    label: String,
    genus: u32,
    generators: Vec<[f64; 4]>,
    relators: Vec<Vec<i32>>,
}

impl GroupPresentation {
    /// Validated surface-group presentation: genus at least 2, hyperbolic
    /// generators and relators evaluating to `±Id`.
    pub fn new(
        label: impl Into<String>,
        genus: u32,
        generators: Vec<MoebiusElement>,
        relators: Vec<Word>,
    ) -> Result<Self> {
        if genus < 2 {
            return Err(Error::Schema(format!("genus {genus} < 2")));
        }
        let group = Self {
            generators,
            relators,
            genus,
            label: label.into(),
            precise: None,
        };
        group.validate()?;
        Ok(group)
    }

    /// Like [`GroupPresentation::new`], from double-double generators.
    pub(crate) fn new_precise(
        label: impl Into<String>,
        genus: u32,
        precise: Vec<DdMat>,
        relators: Vec<Word>,
    ) -> Result<Self> {
        let generators = precise
            .iter()
            .map(|m| MoebiusElement::normalized(m.to_f64()))
            .collect();
        let mut group = Self::new(label, genus, generators, relators)?;
        group.precise = Some(precise);
        Ok(group)
    }

    /// A group with no relators and no surface structure, used for small
    /// synthetic checks (e.g. a cyclic group). Genus is reported as 0.
    pub fn free(label: impl Into<String>, generators: Vec<MoebiusElement>) -> Result<Self> {
        let group = Self {
            generators,
            relators: Vec::new(),
            genus: 0,
            label: label.into(),
            precise: None,
        };
        group.validate()?;
        Ok(group)
    }

    fn validate(&self) -> Result<()> {
        if self.generators.is_empty() {
            return Err(Error::Schema("no generators".into()));
        }
        for (i, g) in self.generators.iter().enumerate() {
            let [a, b, c, d] = g.entries();
            let scale = (a * d).abs() + (b * c).abs();
            if (g.determinant() - 1.0).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::Schema(format!("generator {i} does not have unit determinant")));
            }
            if classify(g).kind != IsometryKind::Hyperbolic {
                return Err(Error::Schema(format!(
                    "generator {i} is {:?}, expected hyperbolic",
                    classify(g).kind
                )));
            }
        }
        let n = self.generators.len() as u32;
        for (index, r) in self.relators.iter().enumerate() {
            if let Some(bad) = r.letters().iter().find(|l| l.unsigned_abs() > n) {
                return Err(Error::Schema(format!("relator {index} uses unknown generator {bad}")));
            }
            let residual = self.evaluate(r).identity_residual();
            if residual > RELATOR_TOL {
                return Err(Error::RelatorViolation { index, residual });
            }
        }
        Ok(())
    }

    pub fn generators(&self) -> &[MoebiusElement] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// True for presentations of closed surfaces (genus at least 2).
    pub fn is_surface(&self) -> bool {
        self.genus >= 2
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// The generator or inverse named by a signed letter.
    pub fn letter(&self, l: i32) -> MoebiusElement {
        let g = self.generators[(l.unsigned_abs() - 1) as usize];
        if l < 0 {
            g.inverse()
        } else {
            g
        }
    }

    pub fn evaluate(&self, w: &Word) -> MoebiusElement {
        w.letters()
            .iter()
            .fold(MoebiusElement::IDENTITY, |acc, &l| acc.compose(&self.letter(l)))
    }

    pub(crate) fn letter_precise(&self, l: i32) -> DdMat {
        let k = (l.unsigned_abs() - 1) as usize;
        let g = match &self.precise {
            Some(p) => p[k],
            None => DdMat::from_f64(self.generators[k].entries()),
        };
        if l < 0 {
            g.inverse()
        } else {
            g
        }
    }

    /// Evaluates `w` in double-double arithmetic.
    pub(crate) fn evaluate_dd(&self, w: &Word) -> DdMat {
        w.letters()
            .iter()
            .fold(DdMat::IDENTITY, |acc, &l| acc.mul(&self.letter_precise(l)))
            .normalized()
    }

    /// Letters `1, -1, 2, -2, ...` in rank order.
    pub fn alphabet(&self) -> Vec<i32> {
        (1..=self.generators.len() as i32).flat_map(|k| [k, -k]).collect()
    }

    /// Conjugates every generator by `m`, i.e. moves the basepoint `m^-1 i` to `i`.
    pub fn conjugated_by(&self, m: &MoebiusElement) -> Result<Self> {
        let group = Self {
            generators: self.generators.iter().map(|g| m.conjugate(g)).collect(),
            relators: self.relators.clone(),
            genus: self.genus,
            label: self.label.clone(),
            precise: None,
        };
        group.validate()?;
        Ok(group)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GroupFile =
            serde_json::from_str(text).map_err(|e| Error::Schema(format!("malformed group file: {e}")))?;
        let generators = file
            .generators
            .iter()
            .enumerate()
            .map(|(i, entries)| {
                MoebiusElement::from_unit_det(*entries)
                    .map_err(|e| Error::Schema(format!("generator {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let relators = file
            .relators
            .into_iter()
            .enumerate()
            .map(|(i, r)| Word::new(r).map_err(|e| Error::Schema(format!("relator {i}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if file.genus == 0 && relators.is_empty() {
            return Self::free(file.label, generators);
        }
        Self::new(file.label, file.genus, generators, relators)
    }

    pub fn to_json(&self) -> String {
        let file = GroupFile {
            label: self.label.clone(),
            genus: self.genus,
            generators: self.generators.iter().map(|g| g.entries()).collect(),
            relators: self.relators.iter().map(|r| r.letters().to_vec()).collect(),
        };
        serde_json::to_string_pretty(&file).expect("group files always serialize")
    }
}

/// Genus-2 group from the side pairings of the regular octagon with
/// interior angles `pi/4`, centered at `i`.
///
/// Generator `k` translates along the diameter at angle `k pi/4` by twice
/// the inradius `r`, where `cosh r = cot(pi/8) = 1 + sqrt 2`.
pub fn builtin_octagon() -> GroupPresentation {
    let two = Dd::from(2.0);
    let sqrt2 = two.sqrt();
    let half = Dd::from(0.5);
    // e^r for the inradius r
    let e = Dd::ONE + sqrt2 + (two + two * sqrt2).sqrt();
    let translate = DdMat([e, Dd::ZERO, Dd::ZERO, Dd::ONE / e]);
    let c8 = (two + sqrt2).sqrt() * half;
    let s8 = (two - sqrt2).sqrt() * half;
    let half_angles = [(Dd::ONE, Dd::ZERO), (c8, s8), (sqrt2 * half, sqrt2 * half), (s8, c8)];
    let generators = half_angles
        .iter()
        .map(|&(c, s)| DdMat::product(&[DdMat([c, s, -s, c]), translate, DdMat([c, -s, s, c])]))
        .collect();
    let relator = Word::new(vec![1, -2, 3, -4, -1, 2, -3, 4]).expect("reduced");
    GroupPresentation::new_precise("octagon", 2, generators, vec![relator])
        .expect("octagon presentation is valid")
}

/// A cyclic group generated by the translation of length `length` along the
/// imaginary axis.
pub fn cyclic_group(length: f64) -> Result<GroupPresentation> {
    if !(length > 0.0) {
        return Err(Error::Domain("cyclic generator length must be positive".into()));
    }
    GroupPresentation::free(format!("cyclic({length})"), vec![MoebiusElement::diagonal(length)])
}
