//! Group laws: words in abstract variables, evaluable over any realization.
//!
//! A law of arity `m` is a freely reduced word in variables `x1 … xm`; a
//! group satisfies it when every substitution evaluates to the identity.
//! The text format is 1-based: `x1 x2 X1 X2` is the commutator law.

use std::collections::HashSet;
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

use crate::word::{Letter, Word, WordError};

/// Global cap on constructed law lengths; `n!` constructors explode and must
/// fail loudly instead of hanging.
pub const LAW_LENGTH_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LawError {
    #[error("law evaluation arity mismatch: law needs {arity}, got {got}")]
    ArityMismatch { arity: usize, got: usize },
    #[error("law length {0} exceeds cap {LAW_LENGTH_CAP}")]
    Overflow(usize),
    #[error("ball enumeration exceeded the element cap {0}")]
    ElementCapExceeded(usize),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A word in abstract variables `x1 … xm`, evaluable over any group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupLaw {
    /// Body word; its rank is the arity.
    body: Word,
}

impl GroupLaw {
    pub fn new(arity: usize, body: Word) -> Self {
        assert_eq!(body.rank(), arity, "body rank must equal arity");
        GroupLaw { body }
    }

    /// Parses the `x1 X2 …` law format; arity is the largest variable index
    /// unless a larger one is given.
    pub fn parse(text: &str, min_arity: usize) -> Result<Self, LawError> {
        // Parse at a generous rank first to discover the max variable index.
        let probe = Word::parse(text, usize::MAX >> 1)?;
        let arity = probe
            .letters()
            .iter()
            .map(|l| l.index + 1)
            .max()
            .unwrap_or(0)
            .max(min_arity)
            .max(1);
        Ok(GroupLaw { body: Word::from_letters(arity, probe.letters().iter().copied()) })
    }

    /// The commutator law `[x1, x2]`.
    pub fn commutator() -> Self {
        GroupLaw::parse("x1 x2 X1 X2", 2).unwrap()
    }

    /// The arity-1 power law `x1^e`.
    pub fn power(exponent: u64) -> Result<Self, LawError> {
        let e = usize::try_from(exponent).map_err(|_| LawError::Overflow(usize::MAX))?;
        if e > LAW_LENGTH_CAP {
            return Err(LawError::Overflow(e));
        }
        Ok(GroupLaw {
            body: Word::from_letters(1, std::iter::repeat(Letter::new(0, false)).take(e)),
        })
    }

    pub fn trivial(arity: usize) -> Self {
        GroupLaw { body: Word::identity(arity.max(1)) }
    }

    pub fn arity(&self) -> usize {
        self.body.rank()
    }

    pub fn body(&self) -> &Word {
        &self.body
    }

    pub fn len(&self) -> usize {
        self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    /// A law whose body reduced to the empty word holds everywhere and
    /// certifies nothing.
    pub fn is_degenerate(&self) -> bool {
        self.body.is_identity()
    }

    /// Substitutes `tuple` for the variables and multiplies out in `r`.
    pub fn eval<R: Realization>(&self, tuple: &[R::Elem], r: &R) -> Result<R::Elem, LawError> {
        if tuple.len() != self.arity() {
            return Err(LawError::ArityMismatch { arity: self.arity(), got: tuple.len() });
        }
        let mut acc = r.identity();
        for l in self.body.letters() {
            let factor = if l.inverse {
                r.invert(&tuple[l.index])
            } else {
                tuple[l.index].clone()
            };
            acc = r.multiply(&acc, &factor);
        }
        Ok(acc)
    }
}

impl fmt::Display for GroupLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.body.letters().iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let x = if l.inverse { 'X' } else { 'x' };
            write!(f, "{}{}", x, l.index + 1)?;
        }
        Ok(())
    }
}

/// Blockwise substitution `w_K ∘ w_Q`: arity `n·m`, and evaluating the
/// composite equals evaluating `w_K` on blockwise `w_Q` evaluations.
pub fn compose_laws(outer: &GroupLaw, inner: &GroupLaw) -> Result<GroupLaw, LawError> {
    let n = outer.arity();
    let m = inner.arity();
    let arity = n
        .checked_mul(m)
        .filter(|&a| a <= LAW_LENGTH_CAP)
        .ok_or(LawError::Overflow(usize::MAX))?;
    let bound = outer
        .len()
        .checked_mul(inner.len())
        .ok_or(LawError::Overflow(usize::MAX))?;
    if bound > LAW_LENGTH_CAP {
        return Err(LawError::Overflow(bound));
    }
    let mut letters = Vec::with_capacity(bound);
    for l in outer.body.letters() {
        let block = l.index * m;
        if l.inverse {
            for il in inner.body.letters().iter().rev() {
                letters.push(Letter::new(block + il.index, !il.inverse));
            }
        } else {
            for il in inner.body.letters() {
                letters.push(Letter::new(block + il.index, il.inverse));
            }
        }
    }
    Ok(GroupLaw { body: Word::from_letters(arity, letters) })
}

fn factorial(n: u64) -> Option<u64> {
    (1..=n).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

/// `w ∘ x^{n!}`: the law a group satisfies when a subgroup of index at most
/// `n` satisfies `w`.  Recorded length is at most `n!·|w|`.
pub fn finite_index_law(w: &GroupLaw, n: u64) -> Result<GroupLaw, LawError> {
    assert!(n >= 1, "index bound must be positive");
    let f = factorial(n).ok_or(LawError::Overflow(usize::MAX))?;
    compose_laws(w, &GroupLaw::power(f)?)
}

/// `[w(x1..xm), w(y1..ym)]` of arity `2m`.
pub fn commutator_of_laws(w: &GroupLaw) -> Result<GroupLaw, LawError> {
    compose_laws(&GroupLaw::commutator(), w)
}

/// The derived-length-`c` law on `2^c` variables; length at most `4^c`.
pub fn nested_commutator_law(c: u32) -> Result<GroupLaw, LawError> {
    assert!(c >= 1, "derived length must be positive");
    let mut law = GroupLaw::commutator();
    for _ in 1..c {
        law = commutator_of_laws(&law)?;
    }
    Ok(law)
}

/// The metabelian law `[[x1,x2],[x3,x4]]`.
pub fn metabelian_law() -> GroupLaw {
    nested_commutator_law(2).unwrap()
}

/// A group presented operationally: identity, multiplication, inversion,
/// decidable equality through `Eq`.
pub trait Realization {
    type Elem: Clone + Eq + Ord + Hash + fmt::Debug;
    fn identity(&self) -> Self::Elem;
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn invert(&self, a: &Self::Elem) -> Self::Elem;
}

/// Free-group words as a realization.
pub struct FreeRealization {
    pub rank: usize,
}

impl Realization for FreeRealization {
    type Elem = Word;
    fn identity(&self) -> Word {
        Word::identity(self.rank)
    }
    fn multiply(&self, a: &Word, b: &Word) -> Word {
        a.multiply(b).expect("uniform rank")
    }
    fn invert(&self, a: &Word) -> Word {
        a.invert()
    }
}

/// Permutation of `0..degree`, as the image table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(pub Vec<u8>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u8).collect())
    }

    /// Permutation from one cycle, e.g. `cycle(3, &[0, 1])` is a transposition.
    pub fn cycle(degree: usize, points: &[u8]) -> Self {
        let mut img: Vec<u8> = (0..degree as u8).collect();
        for w in points.windows(2) {
            img[w[0] as usize] = w[1];
        }
        if let (Some(&first), Some(&last)) = (points.first(), points.last()) {
            img[last as usize] = first;
        }
        Perm(img)
    }
}

/// Permutations of at most 8 points; the finite/torsion test realization.
pub struct PermRealization {
    pub degree: usize,
}

impl PermRealization {
    pub fn new(degree: usize) -> Self {
        assert!(degree <= 8, "permutation realization capped at 8 points");
        PermRealization { degree }
    }
}

impl Realization for PermRealization {
    type Elem = Perm;
    fn identity(&self) -> Perm {
        Perm::identity(self.degree)
    }
    fn multiply(&self, a: &Perm, b: &Perm) -> Perm {
        // (a·b)(i) = a(b(i))
        Perm(b.0.iter().map(|&i| a.0[i as usize]).collect())
    }
    fn invert(&self, a: &Perm) -> Perm {
        let mut img = vec![0u8; a.0.len()];
        for (i, &j) in a.0.iter().enumerate() {
            img[j as usize] = i as u8;
        }
        Perm(img)
    }
}

/// The lattice `Z^d` under addition; used to check laws in the abelianized
/// quotient of an extension.
pub struct ShiftLattice {
    pub dim: usize,
}

impl Realization for ShiftLattice {
    type Elem = Vec<i64>;
    fn identity(&self) -> Vec<i64> {
        vec![0; self.dim]
    }
    fn multiply(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
    fn invert(&self, a: &Vec<i64>) -> Vec<i64> {
        a.iter().map(|x| -x).collect()
    }
}

/// Outcome of [`check_law_on_ball`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LawCheck<E> {
    Holds,
    Counterexample(Vec<E>),
}

impl<E> LawCheck<E> {
    pub fn holds(&self) -> bool {
        matches!(self, LawCheck::Holds)
    }
}

/// Deterministic ball of radius `radius` in `⟨generators⟩`, sorted by the
/// element order; errors past `cap` elements.
pub fn enumerate_realization_ball<R: Realization>(
    r: &R,
    generators: &[R::Elem],
    radius: usize,
    cap: usize,
) -> Result<Vec<R::Elem>, LawError> {
    let mut steps: Vec<R::Elem> = Vec::new();
    for g in generators {
        steps.push(g.clone());
        steps.push(r.invert(g));
    }
    let mut seen: HashSet<R::Elem> = HashSet::new();
    seen.insert(r.identity());
    let mut frontier = vec![r.identity()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in &frontier {
            for s in &steps {
                let y = r.multiply(x, s);
                if seen.insert(y.clone()) {
                    if seen.len() > cap {
                        return Err(LawError::ElementCapExceeded(cap));
                    }
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let mut ball: Vec<R::Elem> = seen.into_iter().collect();
    ball.sort();
    Ok(ball)
}

/// Evaluates `law` on every arity-tuple from the radius-`radius` ball of
/// `⟨generators⟩`, in lexicographic tuple order over the sorted ball, and
/// reports the first violating tuple.
///
/// Sampled verification, not proof: a law can hold on a ball and fail deeper.
pub fn check_law_on_ball<R: Realization>(
    r: &R,
    generators: &[R::Elem],
    law: &GroupLaw,
    radius: usize,
    cap: usize,
) -> Result<LawCheck<R::Elem>, LawError> {
    if law.is_degenerate() {
        return Ok(LawCheck::Holds);
    }
    let ball = enumerate_realization_ball(r, generators, radius, cap)?;
    if ball.is_empty() {
        return Ok(LawCheck::Holds);
    }
    if let Some(inner) = split_commutator_shape(law) {
        return check_commutator_shape(r, &ball, law, &inner);
    }
    let id = r.identity();
    let m = law.arity();
    let mut idx = vec![0usize; m];
    loop {
        let tuple: Vec<R::Elem> = idx.iter().map(|&i| ball[i].clone()).collect();
        if law.eval(&tuple, r)? != id {
            return Ok(LawCheck::Counterexample(tuple));
        }
        // Lexicographic odometer, most significant digit first.
        let mut pos = m;
        loop {
            if pos == 0 {
                return Ok(LawCheck::Holds);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < ball.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Detects bodies of the exact shape `u(x1..xm) · u(x_{m+1}..x_{2m}) · u^-1 ·
/// (shifted u)^-1`, i.e. `[u(x̄), u(ȳ)]` as produced by [`commutator_of_laws`].
fn split_commutator_shape(law: &GroupLaw) -> Option<GroupLaw> {
    let body = law.body.letters();
    if law.arity() % 2 != 0 || body.len() % 4 != 0 || body.is_empty() {
        return None;
    }
    let m = law.arity() / 2;
    let q = body.len() / 4;
    let (s1, rest) = body.split_at(q);
    let (s2, rest) = rest.split_at(q);
    let (s3, s4) = rest.split_at(q);
    if s1.iter().any(|l| l.index >= m) {
        return None;
    }
    let shifted_ok = s1
        .iter()
        .zip(s2)
        .all(|(a, b)| b.index == a.index + m && b.inverse == a.inverse);
    let inv_ok = |seg: &[Letter], of: &[Letter]| {
        seg.iter()
            .zip(of.iter().rev())
            .all(|(a, b)| a.index == b.index && a.inverse != b.inverse)
    };
    if shifted_ok && inv_ok(s3, s1) && inv_ok(s4, s2) {
        Some(GroupLaw { body: Word::from_letters(m, s1.iter().copied()) })
    } else {
        None
    }
}

/// Exhaustive check of `[inner(x̄), inner(ȳ)]` over the ball, factored through
/// the (usually few) distinct values of `inner`.  Visits the same tuple set as
/// the brute-force path and reports the same lexicographically first
/// counterexample.
fn check_commutator_shape<R: Realization>(
    r: &R,
    ball: &[R::Elem],
    law: &GroupLaw,
    inner: &GroupLaw,
) -> Result<LawCheck<R::Elem>, LawError> {
    let m = inner.arity();
    let id = r.identity();
    // Values of the inner law on every m-tuple, in lexicographic tuple order.
    let mut values: Vec<R::Elem> = Vec::new();
    let mut idx = vec![0usize; m];
    'outer: loop {
        let tuple: Vec<R::Elem> = idx.iter().map(|&i| ball[i].clone()).collect();
        values.push(inner.eval(&tuple, r)?);
        let mut pos = m;
        loop {
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < ball.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
    // Distinct values with their first (lex-least) occurrence index.
    let mut first_of: Vec<(R::Elem, usize)> = Vec::new();
    let mut seen: HashSet<R::Elem> = HashSet::new();
    for (i, v) in values.iter().enumerate() {
        if seen.insert(v.clone()) {
            first_of.push((v.clone(), i));
        }
    }
    // Commutation table over distinct values only.
    let mut bad_first: std::collections::HashMap<R::Elem, usize> = Default::default();
    for (u, _) in &first_of {
        let mut best: Option<usize> = None;
        for (v, vi) in &first_of {
            let uv = r.multiply(u, v);
            let vu = r.multiply(v, u);
            if uv != vu {
                best = Some(best.map_or(*vi, |b: usize| b.min(*vi)));
            }
        }
        if let Some(b) = best {
            bad_first.insert(u.clone(), b);
        }
    }
    if bad_first.is_empty() {
        return Ok(LawCheck::Holds);
    }
    // Lexicographically first violating (x̄, ȳ): first x̄ whose value fails
    // against something, paired with the first ȳ whose value it fails against.
    // Non-commuting is symmetric, so any value in the table fails against the
    // recorded minimum index.
    for (xi, u) in values.iter().enumerate() {
        if let Some(&first_bad) = bad_first.get(u) {
            // first_bad is the least ȳ-index among values u fails against;
            // recompute exactly: scan values in order for the first failure.
            let mut yi = first_bad;
            loop {
                let v = &values[yi];
                if r.multiply(u, v) != r.multiply(v, u) {
                    break;
                }
                yi += 1;
            }
            let mut tuple = tuple_of_index(ball, m, xi);
            tuple.extend(tuple_of_index(ball, m, yi));
            debug_assert!(law.eval(&tuple, r)? != id);
            return Ok(LawCheck::Counterexample(tuple));
        }
    }
    unreachable!("non-empty bad table must surface a violation")
}

fn tuple_of_index<E: Clone>(ball: &[E], m: usize, mut flat: usize) -> Vec<E> {
    let mut digits = vec![0usize; m];
    for pos in (0..m).rev() {
        digits[pos] = flat % ball.len();
        flat /= ball.len();
    }
    digits.into_iter().map(|i| ball[i].clone()).collect()
}
