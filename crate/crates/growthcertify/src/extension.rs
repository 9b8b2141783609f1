//! Split extensions `F_n ⋊_Φ Z^d` with verified commuting automorphisms.
//!
//! Elements are normal forms `(w, k)` with multiplication
//! `(w1, k1)·(w2, k2) = (w1·Φ^{k1}(w2), k1 + k2)`; equality of normal forms
//! is equality of group elements.

use std::fmt;

use thiserror::Error;

use crate::laws::Realization;
use crate::word::{Word, WordError};

/// Cap on automorphism power components; iterated automorphisms blow up word
/// length, so overruns fail loudly.
pub const EXPONENT_CAP: i64 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtError {
    #[error("claimed inverse fails on generator {generator}: residue `{residue}`")]
    NotInverse { generator: usize, residue: Word },
    #[error("automorphisms {i} and {j} do not commute on generator {generator}")]
    NotCommuting { i: usize, j: usize, generator: usize },
    #[error("automorphism rank {0} does not match kernel rank {1}")]
    AutomorphismRank(usize, usize),
    #[error("image list has length {0}, expected kernel rank {1}")]
    ImageCount(usize, usize),
    #[error("shift vector has length {0}, expected {1}")]
    ShiftDimension(usize, usize),
    #[error("automorphism power component {0} exceeds the exponent cap {EXPONENT_CAP}")]
    ExponentCapExceeded(i64),
    #[error("generating set must be nonempty")]
    EmptyGeneratingSet,
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// An automorphism of `F_n` given by generator images, verified invertible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeAutomorphism {
    rank: usize,
    images: Vec<Word>,
    inverse_images: Vec<Word>,
}

fn substitute(rank: usize, images: &[Word], w: &Word) -> Word {
    let mut out = Word::identity(rank);
    for l in w.letters() {
        let img = if l.inverse {
            images[l.index].invert()
        } else {
            images[l.index].clone()
        };
        out = out.multiply(&img).expect("uniform rank");
    }
    out
}

impl FreeAutomorphism {
    /// Accepts exactly the pairs whose two-sided composition is the identity
    /// on every generator.
    pub fn new(images: Vec<Word>, inverse_images: Vec<Word>) -> Result<Self, ExtError> {
        let rank = images.len();
        if inverse_images.len() != rank {
            return Err(ExtError::ImageCount(inverse_images.len(), rank));
        }
        for w in images.iter().chain(inverse_images.iter()) {
            if w.rank() != rank {
                return Err(ExtError::AutomorphismRank(w.rank(), rank));
            }
        }
        for g in 0..rank {
            let gen = Word::generator(rank, g);
            for (first, second) in [(&images, &inverse_images), (&inverse_images, &images)] {
                let round_trip = substitute(rank, second, &substitute(rank, first, &gen));
                if round_trip != gen {
                    let residue = round_trip.multiply(&gen.invert()).expect("uniform rank");
                    return Err(ExtError::NotInverse { generator: g, residue });
                }
            }
        }
        Ok(FreeAutomorphism { rank, images, inverse_images })
    }

    pub fn identity(rank: usize) -> Self {
        let images: Vec<Word> = (0..rank).map(|g| Word::generator(rank, g)).collect();
        FreeAutomorphism { rank, images: images.clone(), inverse_images: images }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> &[Word] {
        &self.inverse_images
    }

    pub fn apply(&self, w: &Word) -> Word {
        substitute(self.rank, &self.images, w)
    }

    pub fn apply_inverse(&self, w: &Word) -> Word {
        substitute(self.rank, &self.inverse_images, w)
    }
}

/// Normal form `(kernel word, shift vector)` for an element of `F_n ⋊ Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtElement {
    word: Word,
    shift: Vec<i64>,
}

impl ExtElement {
    pub fn kernel_word(&self) -> &Word {
        &self.word
    }

    pub fn shift(&self) -> &[i64] {
        &self.shift
    }

    /// The projection `E → Z^d`.
    pub fn project(&self) -> Vec<i64> {
        self.shift.clone()
    }

    pub fn in_kernel(&self) -> bool {
        self.shift.iter().all(|&k| k == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_identity() && self.in_kernel()
    }
}

impl fmt::Display for ExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {:?})", self.word, self.shift)
    }
}

/// The group `F_n ⋊_Φ Z^d` for a verified tuple of commuting automorphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionGroup {
    kernel_rank: usize,
    auts: Vec<FreeAutomorphism>,
}

impl ExtensionGroup {
    pub fn new(kernel_rank: usize, auts: Vec<FreeAutomorphism>) -> Result<Self, ExtError> {
        for a in &auts {
            if a.rank() != kernel_rank {
                return Err(ExtError::AutomorphismRank(a.rank(), kernel_rank));
            }
        }
        for i in 0..auts.len() {
            for j in (i + 1)..auts.len() {
                for g in 0..kernel_rank {
                    let gen = Word::generator(kernel_rank, g);
                    if auts[i].apply(&auts[j].apply(&gen)) != auts[j].apply(&auts[i].apply(&gen)) {
                        return Err(ExtError::NotCommuting { i, j, generator: g });
                    }
                }
            }
        }
        Ok(ExtensionGroup { kernel_rank, auts })
    }

    pub fn kernel_rank(&self) -> usize {
        self.kernel_rank
    }

    /// The abelianization rank `d`.
    pub fn dim(&self) -> usize {
        self.auts.len()
    }

    pub fn automorphisms(&self) -> &[FreeAutomorphism] {
        &self.auts
    }

    /// Applies `Φ^k = φ_1^{k_1} ∘ … ∘ φ_d^{k_d}`; order-independent because
    /// the tuple commutes.
    pub fn apply_power(&self, shift: &[i64], w: &Word) -> Result<Word, ExtError> {
        if shift.len() != self.dim() {
            return Err(ExtError::ShiftDimension(shift.len(), self.dim()));
        }
        let mut out = w.clone();
        for (aut, &k) in self.auts.iter().zip(shift) {
            if k.abs() > EXPONENT_CAP {
                return Err(ExtError::ExponentCapExceeded(k));
            }
            for _ in 0..k.unsigned_abs() {
                out = if k > 0 { aut.apply(&out) } else { aut.apply_inverse(&out) };
            }
        }
        Ok(out)
    }

    pub fn identity(&self) -> ExtElement {
        ExtElement {
            word: Word::identity(self.kernel_rank),
            shift: vec![0; self.dim()],
        }
    }

    pub fn element(&self, word: Word, shift: Vec<i64>) -> Result<ExtElement, ExtError> {
        if word.rank() != self.kernel_rank {
            return Err(ExtError::AutomorphismRank(word.rank(), self.kernel_rank));
        }
        if shift.len() != self.dim() {
            return Err(ExtError::ShiftDimension(shift.len(), self.dim()));
        }
        Ok(ExtElement { word, shift })
    }

    pub fn kernel_element(&self, word: Word) -> Result<ExtElement, ExtError> {
        self.element(word, vec![0; self.dim()])
    }

    /// `(w1, k1)·(w2, k2) = (w1·Φ^{k1}(w2), k1 + k2)`.
    pub fn multiply(&self, x: &ExtElement, y: &ExtElement) -> Result<ExtElement, ExtError> {
        let twisted = self.apply_power(&x.shift, &y.word)?;
        Ok(ExtElement {
            word: x.word.multiply(&twisted)?,
            shift: x.shift.iter().zip(&y.shift).map(|(a, b)| a + b).collect(),
        })
    }

    /// `(w, k)^-1 = (Φ^{-k}(w^-1), -k)`.
    pub fn invert(&self, x: &ExtElement) -> Result<ExtElement, ExtError> {
        let neg: Vec<i64> = x.shift.iter().map(|k| -k).collect();
        Ok(ExtElement {
            word: self.apply_power(&neg, &x.word.invert())?,
            shift: neg,
        })
    }

    /// `g · x · g^-1`.
    pub fn conjugate(&self, g: &ExtElement, x: &ExtElement) -> Result<ExtElement, ExtError> {
        self.multiply(&self.multiply(g, x)?, &self.invert(g)?)
    }

    /// `x · y · x^-1 · y^-1`.
    pub fn commutator(&self, x: &ExtElement, y: &ExtElement) -> Result<ExtElement, ExtError> {
        self.multiply(
            &self.multiply(x, y)?,
            &self.multiply(&self.invert(x)?, &self.invert(y)?)?,
        )
    }
}

/// A name-tagged finite generating set `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingSet {
    items: Vec<(String, ExtElement)>,
}

impl GeneratingSet {
    pub fn new(items: Vec<(String, ExtElement)>) -> Result<Self, ExtError> {
        if items.is_empty() {
            return Err(ExtError::EmptyGeneratingSet);
        }
        let mut seen = std::collections::HashSet::new();
        for (name, _) in &items {
            if !seen.insert(name.clone()) {
                return Err(ExtError::DuplicateName(name.clone()));
            }
        }
        Ok(GeneratingSet { items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, ExtElement)> {
        self.items.iter()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.items[i].0
    }

    pub fn element(&self, i: usize) -> &ExtElement {
        &self.items[i].1
    }

    pub fn elements(&self) -> Vec<ExtElement> {
        self.items.iter().map(|(_, e)| e.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.items.iter().position(|(n, _)| n == name)
    }
}

/// Extension elements as a law realization.
///
/// Panics if a product pushes an automorphism power past [`EXPONENT_CAP`];
/// ball radii used for law checking stay far below it.
pub struct ExtRealization<'a> {
    pub group: &'a ExtensionGroup,
}

impl Realization for ExtRealization<'_> {
    type Elem = ExtElement;
    fn identity(&self) -> ExtElement {
        self.group.identity()
    }
    fn multiply(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        self.group.multiply(a, b).expect("shift within exponent cap")
    }
    fn invert(&self, a: &ExtElement) -> ExtElement {
        self.group.invert(a).expect("shift within exponent cap")
    }
}
