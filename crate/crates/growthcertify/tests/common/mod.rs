//! Shared deterministic instance corpus and helpers for the integration
//! suites.

#![allow(dead_code)]

use std::sync::OnceLock;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use growthcertify::certify::{two_free_certify, SearchTrace, Verdict};
use growthcertify::extension::{ExtensionGroup, FreeAutomorphism, GeneratingSet};
use growthcertify::word::{Letter, Word};

pub const CORPUS_SEED: u64 = 0x6f72_6269_745f_3031;

/// Elementary Nielsen transformation of a free-group basis.
#[derive(Debug, Clone, Copy)]
pub enum NielsenMove {
    Swap(usize, usize),
    Invert(usize),
    /// `a_i ↦ a_i a_j`, `i ≠ j`.
    RightMult(usize, usize),
}

pub fn move_automorphism(rank: usize, m: NielsenMove) -> FreeAutomorphism {
    let gen = |i: usize| Word::generator(rank, i);
    let mut images: Vec<Word> = (0..rank).map(gen).collect();
    let mut inverse_images = images.clone();
    match m {
        NielsenMove::Swap(i, j) => {
            images.swap(i, j);
            inverse_images.swap(i, j);
        }
        NielsenMove::Invert(i) => {
            images[i] = gen(i).invert();
            inverse_images[i] = gen(i).invert();
        }
        NielsenMove::RightMult(i, j) => {
            assert_ne!(i, j);
            images[i] = gen(i).multiply(&gen(j)).unwrap();
            inverse_images[i] = gen(i).multiply(&gen(j).invert()).unwrap();
        }
    }
    FreeAutomorphism::new(images, inverse_images).unwrap()
}

/// `(f ∘ g)(x) = f(g(x))`, verified on construction.
pub fn compose_automorphisms(f: &FreeAutomorphism, g: &FreeAutomorphism) -> FreeAutomorphism {
    let images = g.images().iter().map(|w| f.apply(w)).collect();
    let inverse_images = f.inverse_images().iter().map(|w| g.apply_inverse(w)).collect();
    FreeAutomorphism::new(images, inverse_images).unwrap()
}

pub fn random_move(rank: usize, rng: &mut impl Rng) -> NielsenMove {
    let i = rng.gen_range(0..rank);
    let mut j = rng.gen_range(0..rank - 1);
    if j >= i {
        j += 1;
    }
    match rng.gen_range(0..3) {
        0 => NielsenMove::Swap(i, j),
        1 => NielsenMove::Invert(i),
        _ => NielsenMove::RightMult(i, j),
    }
}

pub fn random_automorphism(rank: usize, moves: usize, rng: &mut impl Rng) -> FreeAutomorphism {
    let mut aut = FreeAutomorphism::identity(rank);
    for _ in 0..moves {
        aut = compose_automorphisms(&move_automorphism(rank, random_move(rank, rng)), &aut);
    }
    aut
}

pub fn random_word(rank: usize, max_len: usize, rng: &mut impl Rng) -> Word {
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len)
        .map(|_| Letter::new(rng.gen_range(0..rank), rng.gen()))
        .collect::<Vec<_>>();
    Word::from_letters(rank, letters)
}

/// One corpus entry: a split extension with a named generating set.
pub struct Instance {
    pub group: ExtensionGroup,
    pub t: GeneratingSet,
    pub family: &'static str,
}

fn named(items: Vec<growthcertify::extension::ExtElement>) -> GeneratingSet {
    let items = items
        .into_iter()
        .enumerate()
        .map(|(i, e)| (format!("g{i}"), e))
        .collect();
    GeneratingSet::new(items).unwrap()
}

pub fn fibonacci_instance() -> Instance {
    let w = |s: &str| Word::parse(s, 2).unwrap();
    let aut = FreeAutomorphism::new(vec![w("b"), w("ab")], vec![w("bA"), w("a")]).unwrap();
    let group = ExtensionGroup::new(2, vec![aut]).unwrap();
    let t = GeneratingSet::new(vec![
        ("t".into(), group.element(Word::identity(2), vec![1]).unwrap()),
        ("x".into(), group.element(w("a"), vec![0]).unwrap()),
    ])
    .unwrap();
    Instance { group, t, family: "fibonacci" }
}

pub fn identity_instance() -> Instance {
    let group = ExtensionGroup::new(2, vec![FreeAutomorphism::identity(2)]).unwrap();
    let t = GeneratingSet::new(vec![
        ("x".into(), group.element(Word::parse("a", 2).unwrap(), vec![0]).unwrap()),
        ("t".into(), group.element(Word::identity(2), vec![1]).unwrap()),
    ])
    .unwrap();
    Instance { group, t, family: "identity" }
}

pub fn klein_instance() -> Instance {
    let w = |s: &str| Word::parse(s, 2).unwrap();
    let aut = FreeAutomorphism::new(vec![w("A"), w("B")], vec![w("A"), w("B")]).unwrap();
    let group = ExtensionGroup::new(2, vec![aut]).unwrap();
    let t = GeneratingSet::new(vec![
        ("x".into(), group.element(w("a"), vec![0]).unwrap()),
        ("t".into(), group.element(Word::identity(2), vec![1]).unwrap()),
    ])
    .unwrap();
    Instance { group, t, family: "klein" }
}

fn random_instance(rng: &mut impl Rng) -> Instance {
    let rank = rng.gen_range(2..=3);
    let dim = rng.gen_range(1..=2);
    let aut = random_automorphism(rank, rng.gen_range(1..=4), rng);
    let mut auts = vec![aut.clone()];
    let mut max_shift = 2i64;
    if dim == 2 {
        // A commuting partner: the identity or a power of the first.  With
        // two nontrivial actions, keep shifts at ±1 to bound word growth.
        if rng.gen() {
            auts.push(FreeAutomorphism::identity(rank));
        } else {
            auts.push(compose_automorphisms(&aut, &aut));
            max_shift = 1;
        }
    }
    let group = ExtensionGroup::new(rank, auts).unwrap();
    let count = rng.gen_range(2..=4);
    let mut items = Vec::new();
    for i in 0..count {
        let word = random_word(rank, 4, rng);
        let shift: Vec<i64> = if i == 0 {
            // Keep at least one generator off the kernel.
            (0..dim).map(|_| rng.gen_range(1..=max_shift)).collect()
        } else {
            (0..dim).map(|_| rng.gen_range(-max_shift..=max_shift)).collect()
        };
        items.push(group.element(word, shift).unwrap());
    }
    Instance { group, t: named(items), family: "random" }
}

fn abelian_instance(rng: &mut impl Rng) -> Instance {
    let rank = rng.gen_range(2..=3);
    let dim = rng.gen_range(1..=2);
    let auts = (0..dim).map(|_| FreeAutomorphism::identity(rank)).collect();
    let group = ExtensionGroup::new(rank, auts).unwrap();
    // All kernel parts are powers of one root, so everything commutes.
    let mut root = random_word(rank, 3, rng);
    if root.is_identity() {
        root = Word::generator(rank, 0);
    }
    let count = rng.gen_range(2..=4);
    let items = (0..count)
        .map(|_| {
            let word = root.pow(rng.gen_range(-2..=2));
            let shift = (0..dim).map(|_| rng.gen_range(-2..=2)).collect();
            group.element(word, shift).unwrap()
        })
        .collect();
    Instance { group, t: named(items), family: "abelian" }
}

fn klein_like_instance(rng: &mut impl Rng) -> Instance {
    let rank = rng.gen_range(2..=3);
    // Invert every generator: an involution that conjugates each cyclic
    // subgroup onto itself.
    let images: Vec<Word> = (0..rank).map(|i| Word::generator(rank, i).invert()).collect();
    let aut = FreeAutomorphism::new(images.clone(), images).unwrap();
    let group = ExtensionGroup::new(rank, vec![aut]).unwrap();
    let g = rng.gen_range(0..rank);
    let p = rng.gen_range(1..=2);
    let items = vec![
        group.element(Word::generator(rank, g).pow(p), vec![0]).unwrap(),
        group.element(Word::identity(rank), vec![rng.gen_range(1..=2)]).unwrap(),
    ];
    Instance { group, t: named(items), family: "klein_like" }
}

fn build_corpus() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut out = vec![fibonacci_instance(), identity_instance(), klein_instance()];
    for _ in 0..60 {
        out.push(random_instance(&mut rng));
    }
    for _ in 0..20 {
        out.push(abelian_instance(&mut rng));
    }
    for _ in 0..20 {
        out.push(klein_like_instance(&mut rng));
    }
    out
}

static CORPUS: OnceLock<Vec<Instance>> = OnceLock::new();

pub fn corpus() -> &'static [Instance] {
    CORPUS.get_or_init(build_corpus)
}

static VERDICTS: OnceLock<Vec<(Verdict, SearchTrace)>> = OnceLock::new();

/// Memoized certification verdicts for the whole corpus, in corpus order.
pub fn corpus_verdicts() -> &'static [(Verdict, SearchTrace)] {
    VERDICTS.get_or_init(|| {
        corpus()
            .iter()
            .map(|inst| two_free_certify(&inst.group, &inst.t).expect("total dichotomy"))
            .collect()
    })
}
