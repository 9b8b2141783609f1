//! The certification dichotomy: for `H = ⟨T⟩ ≤ F_n ⋊ Z^d`, either a short
//! free basis of a rank-2 free subgroup (with an entropy lower bound), or an
//! explicit group law that `H` satisfies.
//!
//! Every verdict is re-verified by an independent mechanism before it is
//! returned: free bases through folded-graph classification, law certificates
//! by exhaustive checking on a generator ball.

use std::fmt;

use thiserror::Error;

use crate::extension::{ExtElement, ExtError, ExtRealization, ExtensionGroup, GeneratingSet};
use crate::laws::{
    check_law_on_ball, commutator_of_laws, enumerate_realization_ball, metabelian_law, GroupLaw,
    LawError, ShiftLattice,
};
use crate::stallings::{classify, SubgroupClass, SubgroupGraph, StallingsError};
use crate::word::{Word, WordError};

/// Element cap for verification balls; radius-3 balls over ≤ 4 generators
/// stay far below this.
pub const VERIFY_ELEMENT_CAP: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("internal verification failed: {0}")]
    VerificationFailed(String),
    #[error("the law already fails in the abelian quotient on shifts {witness:?}")]
    QuotientLawFails { witness: Vec<Vec<i64>> },
    #[error("chain reached k = {max_k} without stabilizing or turning non-abelian")]
    ChainCapExceeded { max_k: usize },
    #[error("element outside the kernel where a kernel element is required")]
    NotInKernel,
    #[error("generator name `{0}` is absent from the target generating set")]
    UnknownName(String),
    #[error(transparent)]
    Ext(#[from] ExtError),
    #[error(transparent)]
    Law(#[from] LawError),
    #[error(transparent)]
    Stallings(#[from] StallingsError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A product of named generators and their inverses; the T-expression of a
/// certified element.  `(i, true)` is the inverse of generator `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenExpr(pub Vec<(usize, bool)>);

impl GenExpr {
    pub fn t_length(&self) -> usize {
        self.0.len()
    }

    pub fn inverse(&self) -> GenExpr {
        GenExpr(self.0.iter().rev().map(|&(i, inv)| (i, !inv)).collect())
    }

    pub fn concat(&self, other: &GenExpr) -> GenExpr {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        GenExpr(v)
    }

    pub fn evaluate(
        &self,
        group: &ExtensionGroup,
        t: &GeneratingSet,
    ) -> Result<ExtElement, CertifyError> {
        let mut acc = group.identity();
        for &(i, inv) in &self.0 {
            let g = t.element(i);
            let factor = if inv { group.invert(g)? } else { g.clone() };
            acc = group.multiply(&acc, &factor)?;
        }
        Ok(acc)
    }

    pub fn display<'a>(&'a self, t: &'a GeneratingSet) -> impl fmt::Display + 'a {
        ExprDisplay(self, t)
    }
}

struct ExprDisplay<'a>(&'a GenExpr, &'a GeneratingSet);

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 .0.is_empty() {
            return write!(f, "e");
        }
        for (k, &(i, inv)) in self.0 .0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", self.1.name(i), if inv { "^-1" } else { "" })?;
        }
        Ok(())
    }
}

/// How a law certificate accounts for the structure of `⟨T⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawStructure {
    Abelian,
    CyclicByAbelian,
    MetabelianNormalClosure,
}

impl LawStructure {
    pub fn tag(&self) -> &'static str {
        match self {
            LawStructure::Abelian => "abelian",
            LawStructure::CyclicByAbelian => "cyclic_by_abelian",
            LawStructure::MetabelianNormalClosure => "metabelian_normal_closure",
        }
    }
}

/// A certified rank-2 free basis inside the kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeBasisCert {
    pub u: ExtElement,
    pub v: ExtElement,
    pub u_expr: GenExpr,
    pub v_expr: GenExpr,
    pub t_length_u: usize,
    pub t_length_v: usize,
    /// `ln(3) / max(t_length_u, t_length_v)`.
    pub entropy_lower: f64,
}

impl FreeBasisCert {
    pub fn max_t_length(&self) -> usize {
        self.t_length_u.max(self.t_length_v)
    }
}

/// A certified law together with the structural reason it holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawCert {
    pub law: GroupLaw,
    pub structure: LawStructure,
    /// In the cyclic branches, the primitive root whose cyclic subgroup is
    /// normalized by `⟨T⟩`.
    pub normal_generator: Option<Word>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    FreeBasis(FreeBasisCert),
    LawCertificate(LawCert),
}

impl Verdict {
    pub fn is_free_basis(&self) -> bool {
        matches!(self, Verdict::FreeBasis(_))
    }
}

/// Replayable log of a certification run.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchTrace {
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceStep {
    BuiltW { count: usize, nontrivial: usize },
    Classified { tag: &'static str },
    ConjugateTested { generator: usize, commutes: bool },
    ChainLevel { k: usize, tag: &'static str },
    Verified { kind: &'static str },
}

#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    /// Radius of the generator ball used to re-check law certificates.
    pub verify_radius: usize,
    pub verify_cap: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { verify_radius: 3, verify_cap: VERIFY_ELEMENT_CAP }
    }
}

/// A candidate element with its T-expression.
#[derive(Debug, Clone)]
struct Witness {
    elem: ExtElement,
    expr: GenExpr,
}

fn build_commutator_witnesses(
    group: &ExtensionGroup,
    t: &GeneratingSet,
) -> Result<Vec<Witness>, CertifyError> {
    let mut out = Vec::new();
    for i in 0..t.len() {
        for j in (i + 1)..t.len() {
            let elem = group.commutator(t.element(i), t.element(j))?;
            out.push(Witness {
                elem,
                expr: GenExpr(vec![(i, false), (j, false), (i, true), (j, true)]),
            });
        }
    }
    Ok(out)
}

fn conjugate_witness(
    group: &ExtensionGroup,
    t: &GeneratingSet,
    generator: usize,
    w: &Witness,
) -> Result<Witness, CertifyError> {
    let g = t.element(generator);
    Ok(Witness {
        elem: group.conjugate(g, &w.elem)?,
        expr: GenExpr(vec![(generator, false)])
            .concat(&w.expr)
            .concat(&GenExpr(vec![(generator, true)])),
    })
}

/// Builds a FreeBasis verdict and re-verifies it by folding: the two kernel
/// words must classify as non-abelian free of rank 2.
fn free_basis_verdict(
    group: &ExtensionGroup,
    u: &Witness,
    v: &Witness,
    trace: &mut Vec<TraceStep>,
) -> Result<Verdict, CertifyError> {
    if !u.elem.in_kernel() || !v.elem.in_kernel() {
        return Err(CertifyError::VerificationFailed(
            "free-basis witnesses must lie in the kernel".into(),
        ));
    }
    let words = [u.elem.kernel_word().clone(), v.elem.kernel_word().clone()];
    match classify(group.kernel_rank(), &words)? {
        SubgroupClass::NonAbelianFree { rank: 2, .. } => {}
        other => {
            return Err(CertifyError::VerificationFailed(format!(
                "claimed free pair classifies as {}",
                other.tag()
            )));
        }
    }
    trace.push(TraceStep::Verified { kind: "stallings_rank_2" });
    let (tu, tv) = (u.expr.t_length(), v.expr.t_length());
    Ok(Verdict::FreeBasis(FreeBasisCert {
        u: u.elem.clone(),
        v: v.elem.clone(),
        u_expr: u.expr.clone(),
        v_expr: v.expr.clone(),
        t_length_u: tu,
        t_length_v: tv,
        entropy_lower: 3f64.ln() / tu.max(tv) as f64,
    }))
}

/// Builds a LawCertificate verdict and re-verifies the law exhaustively on
/// the radius-`opts.verify_radius` ball of `⟨T⟩`.
fn law_verdict(
    group: &ExtensionGroup,
    t: &GeneratingSet,
    law: GroupLaw,
    structure: LawStructure,
    normal_generator: Option<Word>,
    opts: &CertifyOptions,
    trace: &mut Vec<TraceStep>,
) -> Result<Verdict, CertifyError> {
    let r = ExtRealization { group };
    let check = check_law_on_ball(&r, &t.elements(), &law, opts.verify_radius, opts.verify_cap)?;
    if let crate::laws::LawCheck::Counterexample(tuple) = check {
        return Err(CertifyError::VerificationFailed(format!(
            "claimed law fails on the radius-{} ball at {:?}",
            opts.verify_radius, tuple
        )));
    }
    trace.push(TraceStep::Verified { kind: "law_on_ball" });
    Ok(Verdict::LawCertificate(LawCert { law, structure, normal_generator }))
}

/// Core dichotomy shared by the commutator and general-law entry points:
/// classify `⟨W⟩` inside the kernel and branch.
///
/// `abelian_law` is emitted when `W` is trivial; `cyclic_law`/`cyclic_structure`
/// when every `W`-generator's conjugates commute with it.
#[allow(clippy::too_many_arguments)]
fn dichotomy(
    group: &ExtensionGroup,
    t: &GeneratingSet,
    witnesses: &[Witness],
    abelian_law: GroupLaw,
    cyclic_law: GroupLaw,
    cyclic_structure: LawStructure,
    opts: &CertifyOptions,
    trace: &mut Vec<TraceStep>,
) -> Result<Verdict, CertifyError> {
    for w in witnesses {
        if !w.elem.in_kernel() {
            return Err(CertifyError::NotInKernel);
        }
    }
    let nontrivial: Vec<&Witness> =
        witnesses.iter().filter(|w| !w.elem.is_identity()).collect();
    trace.push(TraceStep::BuiltW { count: witnesses.len(), nontrivial: nontrivial.len() });
    let words: Vec<Word> =
        nontrivial.iter().map(|w| w.elem.kernel_word().clone()).collect();
    let class = classify(group.kernel_rank(), &words)?;
    trace.push(TraceStep::Classified { tag: class.tag() });
    match class {
        SubgroupClass::Trivial => {
            law_verdict(group, t, abelian_law, LawStructure::Abelian, None, opts, trace)
        }
        SubgroupClass::NonAbelianFree { .. } => {
            // Any non-commuting pair of W freely generates a rank-2 subgroup.
            for a in 0..nontrivial.len() {
                for b in (a + 1)..nontrivial.len() {
                    let (u, v) = (nontrivial[a], nontrivial[b]);
                    if !u.elem.kernel_word().commutes(v.elem.kernel_word())? {
                        return free_basis_verdict(group, u, v, trace);
                    }
                }
            }
            Err(CertifyError::VerificationFailed(
                "non-abelian classification but W is pairwise commuting".into(),
            ))
        }
        SubgroupClass::InfiniteCyclic(_) => {
            // First nontrivial witness in deterministic order.
            let a = nontrivial[0];
            for g in 0..t.len() {
                let conj = conjugate_witness(group, t, g, a)?;
                let ok = a.elem.kernel_word().commutes(conj.elem.kernel_word())?;
                trace.push(TraceStep::ConjugateTested { generator: g, commutes: ok });
                if !ok {
                    return free_basis_verdict(group, a, &conj, trace);
                }
            }
            // Every conjugate commutes: ⟨T⟩ normalizes the maximal cyclic
            // subgroup containing a.
            let dec = a.elem.kernel_word().primitive_root()?;
            let root = dec.root.conjugated_by(&dec.conjugator)?;
            law_verdict(group, t, cyclic_law, cyclic_structure, Some(root), opts, trace)
        }
    }
}

/// Certifies the dichotomy for `⟨T⟩` from pairwise commutators: either a
/// rank-2 free basis of T-length at most 6, or a law certificate.
pub fn two_free_certify(
    group: &ExtensionGroup,
    t: &GeneratingSet,
) -> Result<(Verdict, SearchTrace), CertifyError> {
    two_free_certify_with(group, t, &CertifyOptions::default())
}

pub fn two_free_certify_with(
    group: &ExtensionGroup,
    t: &GeneratingSet,
    opts: &CertifyOptions,
) -> Result<(Verdict, SearchTrace), CertifyError> {
    let mut trace = Vec::new();
    let witnesses = build_commutator_witnesses(group, t)?;
    let verdict = dichotomy(
        group,
        t,
        &witnesses,
        GroupLaw::commutator(),
        metabelian_law(),
        LawStructure::CyclicByAbelian,
        opts,
        &mut trace,
    )?;
    Ok((verdict, SearchTrace { steps: trace }))
}

/// Evaluates `law` on all tuples whose entries are generator projections or
/// zero; complete for `Z^d` by linearity in each variable.
fn quotient_law_holds(
    group: &ExtensionGroup,
    t: &GeneratingSet,
    law: &GroupLaw,
) -> Result<Option<Vec<Vec<i64>>>, CertifyError> {
    let lattice = ShiftLattice { dim: group.dim() };
    let zero = vec![0i64; group.dim()];
    for slot in 0..law.arity() {
        for i in 0..t.len() {
            for sign in [1i64, -1] {
                let entry: Vec<i64> =
                    t.element(i).project().iter().map(|&k| sign * k).collect();
                let mut tuple = vec![zero.clone(); law.arity()];
                tuple[slot] = entry;
                if law.eval(&tuple, &lattice)? != zero {
                    return Ok(Some(tuple));
                }
            }
        }
    }
    Ok(None)
}

/// The law-parameterized dichotomy: `W = {w_L(t̄) | t̄ ∈ T^m}`.  Requires the
/// law to hold in the abelian quotient, so that `W` lies in the kernel.
pub fn law_certify_general(
    group: &ExtensionGroup,
    t: &GeneratingSet,
    law: &GroupLaw,
) -> Result<(Verdict, SearchTrace), CertifyError> {
    law_certify_general_with(group, t, law, &CertifyOptions::default())
}

pub fn law_certify_general_with(
    group: &ExtensionGroup,
    t: &GeneratingSet,
    law: &GroupLaw,
    opts: &CertifyOptions,
) -> Result<(Verdict, SearchTrace), CertifyError> {
    if law == &GroupLaw::commutator() {
        return two_free_certify_with(group, t, opts);
    }
    if let Some(witness) = quotient_law_holds(group, t, law)? {
        return Err(CertifyError::QuotientLawFails { witness });
    }
    let mut trace = Vec::new();
    let m = law.arity();
    let realization = ExtRealization { group };
    let mut witnesses = Vec::new();
    // Lexicographic tuple order over the generator indices.
    let mut idx = vec![0usize; m];
    loop {
        let tuple: Vec<ExtElement> = idx.iter().map(|&i| t.element(i).clone()).collect();
        let elem = law.eval(&tuple, &realization)?;
        let mut expr = Vec::new();
        for l in law.body().letters() {
            expr.push((idx[l.index], l.inverse));
        }
        witnesses.push(Witness { elem, expr: GenExpr(expr) });
        let mut pos = m;
        loop {
            if pos == 0 {
                let verdict = dichotomy(
                    group,
                    t,
                    &witnesses,
                    law.clone(),
                    commutator_of_laws(law)?,
                    LawStructure::MetabelianNormalClosure,
                    opts,
                    &mut trace,
                )?;
                return Ok((verdict, SearchTrace { steps: trace }));
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < t.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Outcome of the iterated conjugation chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainOutcome {
    NonAbelian,
    StabilizedCyclic,
    StabilizedTrivial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    /// Level at which the chain event (non-abelian or stabilization) occurred.
    pub k_stop: usize,
    /// Classification of `U_0 … U_{k_stop}`.
    pub levels: Vec<SubgroupClass>,
    pub outcome: ChainOutcome,
}

/// Kernel words generating `U_k = ⟨c w c^-1 : w ∈ W, |c|_T ≤ k⟩`.
fn chain_level_generators(
    group: &ExtensionGroup,
    t: &GeneratingSet,
    w: &[ExtElement],
    k: usize,
) -> Result<Vec<Word>, CertifyError> {
    let r = ExtRealization { group };
    let conjugators =
        enumerate_realization_ball(&r, &t.elements(), k, VERIFY_ELEMENT_CAP)?;
    let mut words = std::collections::BTreeSet::new();
    for c in &conjugators {
        for x in w {
            let conj = group.conjugate(c, x)?;
            if !conj.in_kernel() {
                return Err(CertifyError::NotInKernel);
            }
            if !conj.is_identity() {
                words.insert(conj.kernel_word().clone());
            }
        }
    }
    Ok(words.into_iter().collect())
}

/// Runs the chain `U_0 ⊆ U_1 ⊆ …` of subgroups generated by conjugates of
/// `W` by T-words of length ≤ k, stopping at the first non-abelian level or
/// the first stabilization `U_k = U_{k+1}`.
///
/// Torsion-freeness guarantees one of the two events by `k = 2`; failing to
/// stop within `max_k` is reported as an error.
pub fn iterated_chain(
    group: &ExtensionGroup,
    t: &GeneratingSet,
    w: &[ExtElement],
    max_k: usize,
) -> Result<ChainReport, CertifyError> {
    assert!(max_k >= 2, "max_k must be at least 2");
    for x in w {
        if !x.in_kernel() {
            return Err(CertifyError::NotInKernel);
        }
    }
    let mut levels = Vec::new();
    let mut current = chain_level_generators(group, t, w, 0)?;
    for k in 0..=max_k {
        let class = classify(group.kernel_rank(), &current)?;
        levels.push(class.clone());
        if matches!(class, SubgroupClass::NonAbelianFree { .. }) {
            return Ok(ChainReport { k_stop: k, levels, outcome: ChainOutcome::NonAbelian });
        }
        let next = chain_level_generators(group, t, w, k + 1)?;
        // U_k ⊆ U_{k+1} holds by construction; equality needs the reverse.
        let stabilized = if current.is_empty() {
            next.is_empty()
        } else {
            let graph = SubgroupGraph::build(group.kernel_rank(), &current)?;
            next.iter().try_fold(true, |acc, g| {
                graph.contains(g).map(|c| acc && c)
            })?
        };
        if stabilized {
            let outcome = match class {
                SubgroupClass::Trivial => ChainOutcome::StabilizedTrivial,
                SubgroupClass::InfiniteCyclic(_) => ChainOutcome::StabilizedCyclic,
                SubgroupClass::NonAbelianFree { .. } => unreachable!("handled above"),
            };
            return Ok(ChainReport { k_stop: k, levels, outcome });
        }
        current = next;
    }
    Err(CertifyError::ChainCapExceeded { max_k })
}

/// Transports a free-basis verdict along a generating-set correspondence:
/// the same T-expressions, re-evaluated over `source` generators matched by
/// name, then re-verified by folding in the source kernel.
pub fn lift_basis(
    source_group: &ExtensionGroup,
    source: &GeneratingSet,
    image: &GeneratingSet,
    verdict: &Verdict,
) -> Result<Verdict, CertifyError> {
    let cert = match verdict {
        Verdict::FreeBasis(c) => c,
        Verdict::LawCertificate(_) => {
            return Err(CertifyError::VerificationFailed(
                "only free-basis verdicts lift".into(),
            ));
        }
    };
    let translate = |expr: &GenExpr| -> Result<GenExpr, CertifyError> {
        expr.0
            .iter()
            .map(|&(i, inv)| {
                let name = image.name(i);
                source
                    .index_of(name)
                    .map(|j| (j, inv))
                    .ok_or_else(|| CertifyError::UnknownName(name.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(GenExpr)
    };
    let u_expr = translate(&cert.u_expr)?;
    let v_expr = translate(&cert.v_expr)?;
    let u = u_expr.evaluate(source_group, source)?;
    let v = v_expr.evaluate(source_group, source)?;
    if !u.in_kernel() || !v.in_kernel() {
        return Err(CertifyError::VerificationFailed(
            "lifted pair leaves the kernel; cannot re-verify by folding".into(),
        ));
    }
    let mut trace = Vec::new();
    free_basis_verdict(
        source_group,
        &Witness { elem: u, expr: u_expr },
        &Witness { elem: v, expr: v_expr },
        &mut trace,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::FreeAutomorphism;

    fn w2(s: &str) -> Word {
        Word::parse(s, 2).unwrap()
    }

    fn fib_group() -> ExtensionGroup {
        let aut =
            FreeAutomorphism::new(vec![w2("b"), w2("ab")], vec![w2("bA"), w2("a")]).unwrap();
        ExtensionGroup::new(2, vec![aut]).unwrap()
    }

    fn fib_generators(e: &ExtensionGroup) -> GeneratingSet {
        GeneratingSet::new(vec![
            ("t".into(), e.element(Word::identity(2), vec![1]).unwrap()),
            ("x".into(), e.element(w2("a"), vec![0]).unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn fibonacci_instance_yields_short_free_basis() {
        let e = fib_group();
        let t = fib_generators(&e);
        let (verdict, trace) = two_free_certify(&e, &t).unwrap();
        let cert = match verdict {
            Verdict::FreeBasis(c) => c,
            other => panic!("expected free basis, got {other:?}"),
        };
        assert_eq!(cert.u.kernel_word(), &w2("bA"));
        assert_eq!(cert.v.kernel_word(), &w2("a"));
        assert_eq!(cert.t_length_u, 4);
        assert_eq!(cert.t_length_v, 6);
        assert!(cert.entropy_lower >= 0.1831);
        assert_eq!(cert.u_expr.evaluate(&e, &t).unwrap(), cert.u);
        assert_eq!(cert.v_expr.evaluate(&e, &t).unwrap(), cert.v);
        assert_eq!(format!("{}", cert.u_expr.display(&t)), "t x t^-1 x^-1");
        assert!(trace
            .steps
            .iter()
            .any(|s| matches!(s, TraceStep::Verified { kind: "stallings_rank_2" })));
    }

    #[test]
    fn identity_automorphism_instance_is_abelian() {
        let e = ExtensionGroup::new(2, vec![FreeAutomorphism::identity(2)]).unwrap();
        let t = GeneratingSet::new(vec![
            ("x".into(), e.element(w2("a"), vec![0]).unwrap()),
            ("t".into(), e.element(Word::identity(2), vec![1]).unwrap()),
        ])
        .unwrap();
        let (verdict, _) = two_free_certify(&e, &t).unwrap();
        match verdict {
            Verdict::LawCertificate(c) => {
                assert_eq!(c.structure, LawStructure::Abelian);
                assert_eq!(c.law, GroupLaw::commutator());
                assert_eq!(c.normal_generator, None);
            }
            other => panic!("expected law certificate, got {other:?}"),
        }
    }

    #[test]
    fn klein_instance_is_cyclic_by_abelian() {
        // a → a^-1, b → b^-1 is an involution; ⟨(a,0), (e,1)⟩ is the
        // fundamental group of the Klein bottle.
        let inv =
            FreeAutomorphism::new(vec![w2("A"), w2("B")], vec![w2("A"), w2("B")]).unwrap();
        let e = ExtensionGroup::new(2, vec![inv]).unwrap();
        let t = GeneratingSet::new(vec![
            ("x".into(), e.element(w2("a"), vec![0]).unwrap()),
            ("t".into(), e.element(Word::identity(2), vec![1]).unwrap()),
        ])
        .unwrap();
        let (verdict, _) = two_free_certify(&e, &t).unwrap();
        match verdict {
            Verdict::LawCertificate(c) => {
                assert_eq!(c.structure, LawStructure::CyclicByAbelian);
                assert_eq!(c.law, metabelian_law());
                assert_eq!(c.normal_generator, Some(w2("a")));
            }
            other => panic!("expected law certificate, got {other:?}"),
        }
    }

    #[test]
    fn commutator_law_delegates_to_the_pairwise_path() {
        let e = fib_group();
        let t = fib_generators(&e);
        let direct = two_free_certify(&e, &t).unwrap().0;
        let via_law = law_certify_general(&e, &t, &GroupLaw::commutator()).unwrap().0;
        assert_eq!(direct, via_law);
    }

    #[test]
    fn square_commutator_law_gives_longer_basis() {
        let e = fib_group();
        let t = fib_generators(&e);
        let law = GroupLaw::parse("x1 x1 x2 x2 X1 X1 X2 X2", 2).unwrap();
        let (verdict, _) = law_certify_general(&e, &t, &law).unwrap();
        match verdict {
            Verdict::FreeBasis(c) => {
                assert!(c.max_t_length() <= law.len() + 2, "bound |w_L| + 2 = 10");
            }
            other => panic!("expected free basis, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_law_certifies_itself() {
        let e = fib_group();
        let t = fib_generators(&e);
        let law = GroupLaw::trivial(1);
        let (verdict, _) = law_certify_general(&e, &t, &law).unwrap();
        match verdict {
            Verdict::LawCertificate(c) => assert_eq!(c.structure, LawStructure::Abelian),
            other => panic!("expected law certificate, got {other:?}"),
        }
    }

    #[test]
    fn quotient_violating_law_is_rejected() {
        let e = fib_group();
        let t = fib_generators(&e);
        // x1^2 fails on the shift of t in Z.
        let law = GroupLaw::parse("x1 x1", 1).unwrap();
        assert!(matches!(
            law_certify_general(&e, &t, &law),
            Err(CertifyError::QuotientLawFails { .. })
        ));
    }

    #[test]
    fn chain_detects_non_abelian_at_level_one() {
        let e = fib_group();
        let t = fib_generators(&e);
        let w = vec![e.element(w2("bA"), vec![0]).unwrap()];
        let report = iterated_chain(&e, &t, &w, 4).unwrap();
        assert_eq!(report.outcome, ChainOutcome::NonAbelian);
        assert_eq!(report.k_stop, 1);
        assert_eq!(report.levels[0].tag(), "infinite_cyclic");
    }

    #[test]
    fn chain_stabilizes_on_self_conjugation() {
        let e = fib_group();
        let t = GeneratingSet::new(vec![(
            "x".into(),
            e.element(w2("a"), vec![0]).unwrap(),
        )])
        .unwrap();
        let w = vec![e.element(w2("a"), vec![0]).unwrap()];
        let report = iterated_chain(&e, &t, &w, 4).unwrap();
        assert_eq!(report.outcome, ChainOutcome::StabilizedCyclic);
        assert_eq!(report.k_stop, 0);
    }

    #[test]
    fn chain_on_empty_seed_is_trivial() {
        let e = fib_group();
        let t = fib_generators(&e);
        let report = iterated_chain(&e, &t, &[], 4).unwrap();
        assert_eq!(report.outcome, ChainOutcome::StabilizedTrivial);
        assert_eq!(report.k_stop, 0);
        assert_eq!(report.levels, vec![SubgroupClass::Trivial]);
    }

    #[test]
    fn identity_lift_preserves_the_verdict() {
        let e = fib_group();
        let t = fib_generators(&e);
        let (verdict, _) = two_free_certify(&e, &t).unwrap();
        let lifted = lift_basis(&e, &t, &t, &verdict).unwrap();
        assert_eq!(lifted, verdict);
    }

    #[test]
    fn lift_matches_generators_by_name_not_position() {
        let e = fib_group();
        let t = fib_generators(&e);
        let (verdict, _) = two_free_certify(&e, &t).unwrap();
        // Same generators listed in the opposite order.
        let swapped = GeneratingSet::new(vec![
            ("x".into(), t.element(1).clone()),
            ("t".into(), t.element(0).clone()),
        ])
        .unwrap();
        let lifted = lift_basis(&e, &swapped, &t, &verdict).unwrap();
        match (&lifted, &verdict) {
            (Verdict::FreeBasis(l), Verdict::FreeBasis(o)) => {
                assert_eq!(l.u, o.u);
                assert_eq!(l.v, o.v);
                assert_eq!(l.u_expr, GenExpr(vec![(1, false), (0, false), (1, true), (0, true)]));
            }
            _ => panic!("expected free bases"),
        }
    }

    #[test]
    fn lift_across_forgotten_z_factor() {
        // Source: F2 ⋊ Z^2 with (Fibonacci, identity) action; image: the
        // Fibonacci F2 ⋊ Z obtained by forgetting the second factor.
        let aut =
            FreeAutomorphism::new(vec![w2("b"), w2("ab")], vec![w2("bA"), w2("a")]).unwrap();
        let src =
            ExtensionGroup::new(2, vec![aut, FreeAutomorphism::identity(2)]).unwrap();
        let src_t = GeneratingSet::new(vec![
            ("t".into(), src.element(Word::identity(2), vec![1, 1]).unwrap()),
            ("x".into(), src.element(w2("a"), vec![0, 0]).unwrap()),
        ])
        .unwrap();
        let img = fib_group();
        let img_t = fib_generators(&img);
        let (verdict, _) = two_free_certify(&img, &img_t).unwrap();
        let lifted = lift_basis(&src, &src_t, &img_t, &verdict).unwrap();
        match lifted {
            Verdict::FreeBasis(c) => {
                assert!(c.u.in_kernel() && c.v.in_kernel());
                assert_eq!(c.max_t_length(), 6);
            }
            other => panic!("expected free basis, got {other:?}"),
        }
    }
}
