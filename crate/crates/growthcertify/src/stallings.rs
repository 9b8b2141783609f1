//! Folded Stallings core graphs for finitely generated subgroups of `F_n`.
//!
//! A [`SubgroupGraph`] is the folded, core, canonically relabeled graph whose
//! basepoint loops spell out exactly the elements of the subgroup.  Rank is
//! the first Betti number `|E| - |V| + 1`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::word::{Letter, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StallingsError {
    #[error("rank mismatch: graph over F_{0}, word over F_{1}")]
    RankMismatch(usize, usize),
}

/// Folded core graph with basepoint `0` and edges labeled by generator index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupGraph {
    rank_ambient: usize,
    /// `out[v][label] = head`: reading `label` at `v` moves to `head`.
    out: Vec<BTreeMap<usize, usize>>,
    /// `inn[v][label] = tail`: reading `label^-1` at `v` moves to `tail`.
    inn: Vec<BTreeMap<usize, usize>>,
}

/// Trichotomy of a finitely generated subgroup of a free group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgroupClass {
    Trivial,
    InfiniteCyclic(Word),
    NonAbelianFree { rank: usize, basis: Vec<Word> },
}

impl SubgroupClass {
    pub fn tag(&self) -> &'static str {
        match self {
            SubgroupClass::Trivial => "trivial",
            SubgroupClass::InfiniteCyclic(_) => "infinite_cyclic",
            SubgroupClass::NonAbelianFree { .. } => "non_abelian_free",
        }
    }
}

/// Union-find based folder: near-linear in the total input length.
struct Folder {
    parent: Vec<usize>,
    out: Vec<HashMap<usize, usize>>,
    inn: Vec<HashMap<usize, usize>>,
}

impl Folder {
    fn new() -> Self {
        Folder {
            parent: vec![0],
            out: vec![HashMap::new()],
            inn: vec![HashMap::new()],
        }
    }

    fn fresh(&mut self) -> usize {
        let v = self.parent.len();
        self.parent.push(v);
        self.out.push(HashMap::new());
        self.inn.push(HashMap::new());
        v
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn add_edge(&mut self, u: usize, label: usize, v: usize) {
        let u = self.find(u);
        let v = self.find(v);
        if let Some(&w) = self.out[u].get(&label) {
            let w = self.find(w);
            if w != v {
                self.unify(w, v);
            }
            return;
        }
        self.out[u].insert(label, v);
        if let Some(&t) = self.inn[v].get(&label) {
            let t = self.find(t);
            if t != u {
                self.unify(t, u);
            }
        } else {
            self.inn[v].insert(label, u);
        }
    }

    fn unify(&mut self, a: usize, b: usize) {
        let mut stack = vec![(a, b)];
        while let Some((a, b)) = stack.pop() {
            let a = self.find(a);
            let b = self.find(b);
            if a == b {
                continue;
            }
            // Keep the basepoint's root, otherwise merge small into large.
            let (win, lose) = if a == 0 {
                (a, b)
            } else if b == 0 {
                (b, a)
            } else if self.out[a].len() + self.inn[a].len()
                >= self.out[b].len() + self.inn[b].len()
            {
                (a, b)
            } else {
                (b, a)
            };
            self.parent[lose] = win;
            let out_edges: Vec<_> = self.out[lose].drain().collect();
            let inn_edges: Vec<_> = self.inn[lose].drain().collect();
            for (label, head) in out_edges {
                match self.out[win].get(&label) {
                    Some(&h) => stack.push((h, head)),
                    None => {
                        self.out[win].insert(label, head);
                    }
                }
            }
            for (label, tail) in inn_edges {
                match self.inn[win].get(&label) {
                    Some(&t) => stack.push((t, tail)),
                    None => {
                        self.inn[win].insert(label, tail);
                    }
                }
            }
        }
    }
}

impl SubgroupGraph {
    /// Builds the folded core graph of the subgroup generated by `generators`.
    ///
    /// Identity words are skipped; the empty set yields the one-vertex graph.
    pub fn build(rank: usize, generators: &[Word]) -> Result<Self, StallingsError> {
        let mut folder = Folder::new();
        for g in generators {
            if g.rank() != rank {
                return Err(StallingsError::RankMismatch(rank, g.rank()));
            }
            if g.is_identity() {
                continue;
            }
            // Lay out a loop at the basepoint, folding as we go.
            let mut cur = 0usize;
            let letters = g.letters();
            for (i, l) in letters.iter().enumerate() {
                let last = i + 1 == letters.len();
                let next = if last { 0 } else { folder.fresh() };
                if l.inverse {
                    folder.add_edge(next, l.index, cur);
                } else {
                    folder.add_edge(cur, l.index, next);
                }
                cur = folder.find(next);
            }
        }
        Ok(Self::finish(rank, folder))
    }

    fn finish(rank: usize, mut folder: Folder) -> Self {
        // Collect live vertices reachable from the basepoint.
        let base = folder.find(0);
        let mut index: HashMap<usize, usize> = HashMap::new();
        index.insert(base, 0);
        let mut order = vec![base];
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let nbrs: Vec<usize> = folder.out[v]
                .values()
                .chain(folder.inn[v].values())
                .copied()
                .collect();
            for w in nbrs {
                let w = folder.find(w);
                if !index.contains_key(&w) {
                    index.insert(w, order.len());
                    order.push(w);
                }
            }
        }
        let n = order.len();
        let mut out: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
        let mut inn: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
        for (i, &v) in order.iter().enumerate() {
            let targets: Vec<(usize, usize)> =
                folder.out[v].iter().map(|(&l, &h)| (l, h)).collect();
            for (l, h) in targets {
                let j = index[&folder.find(h)];
                out[i].insert(l, j);
                inn[j].insert(l, i);
            }
        }
        let mut graph = SubgroupGraph { rank_ambient: rank, out, inn };
        graph.trim_to_core();
        graph.canonicalize();
        graph
    }

    /// Removes degree-1 non-basepoint vertices until only the core remains.
    fn trim_to_core(&mut self) {
        loop {
            let mut removed = false;
            for v in 1..self.out.len() {
                if self.out[v].len() + self.inn[v].len() == 1 {
                    let out_edge = self.out[v].iter().next().map(|(&l, &h)| (l, h));
                    if let Some((l, h)) = out_edge {
                        self.out[v].clear();
                        self.inn[h].remove(&l);
                    } else if let Some((&l, &t)) = self.inn[v].iter().next() {
                        self.inn[v].clear();
                        self.out[t].remove(&l);
                    }
                    removed = true;
                }
            }
            if !removed {
                break;
            }
        }
        // Compact away isolated non-basepoint vertices.
        let live: Vec<usize> = (0..self.out.len())
            .filter(|&v| v == 0 || self.out[v].len() + self.inn[v].len() > 0)
            .collect();
        let relabel: HashMap<usize, usize> =
            live.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let remap = |maps: &[BTreeMap<usize, usize>]| {
            live.iter()
                .map(|&v| {
                    maps[v]
                        .iter()
                        .map(|(&l, &w)| (l, relabel[&w]))
                        .collect::<BTreeMap<_, _>>()
                })
                .collect::<Vec<_>>()
        };
        self.out = remap(&self.out);
        self.inn = remap(&self.inn);
    }

    /// Breadth-first relabeling from the basepoint with label-ordered edge
    /// traversal; makes graph equality a canonical-form test.
    fn canonicalize(&mut self) {
        let n = self.out.len();
        let mut new_id = vec![usize::MAX; n];
        new_id[0] = 0;
        let mut next = 1;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for (_, &h) in self.out[v].iter() {
                if new_id[h] == usize::MAX {
                    new_id[h] = next;
                    next += 1;
                    queue.push_back(h);
                }
            }
            for (_, &t) in self.inn[v].iter() {
                if new_id[t] == usize::MAX {
                    new_id[t] = next;
                    next += 1;
                    queue.push_back(t);
                }
            }
        }
        debug_assert_eq!(next, n, "graph must be connected");
        let remap = |maps: &[BTreeMap<usize, usize>]| {
            let mut fresh = vec![BTreeMap::new(); n];
            for (v, m) in maps.iter().enumerate() {
                for (&l, &w) in m {
                    fresh[new_id[v]].insert(l, new_id[w]);
                }
            }
            fresh
        };
        self.out = remap(&self.out);
        self.inn = remap(&self.inn);
    }

    pub fn rank_ambient(&self) -> usize {
        self.rank_ambient
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(|m| m.len()).sum()
    }

    /// First Betti number `|E| - |V| + 1`; the free rank of the subgroup.
    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    /// True iff `w` traces a loop at the basepoint.
    pub fn contains(&self, w: &Word) -> Result<bool, StallingsError> {
        if w.rank() != self.rank_ambient {
            return Err(StallingsError::RankMismatch(self.rank_ambient, w.rank()));
        }
        let mut cur = 0usize;
        for l in w.letters() {
            let step = if l.inverse {
                self.inn[cur].get(&l.index)
            } else {
                self.out[cur].get(&l.index)
            };
            match step {
                Some(&v) => cur = v,
                None => return Ok(false),
            }
        }
        Ok(cur == 0)
    }

    /// A free basis of the subgroup, one word per non-tree edge of a
    /// breadth-first spanning tree.
    pub fn free_basis(&self) -> Vec<Word> {
        let n = self.vertex_count();
        // path[v]: reduced word labeling the tree path basepoint -> v.
        let mut path: Vec<Option<Word>> = vec![None; n];
        path[0] = Some(Word::identity(self.rank_ambient));
        let mut tree: std::collections::HashSet<(usize, usize, usize)> =
            std::collections::HashSet::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            let pv = path[v].clone().unwrap();
            for (&l, &h) in self.out[v].iter() {
                if path[h].is_none() {
                    let step = Word::from_letters(self.rank_ambient, [Letter::new(l, false)]);
                    path[h] = Some(pv.multiply(&step).unwrap());
                    tree.insert((v, l, h));
                    queue.push_back(h);
                }
            }
            for (&l, &t) in self.inn[v].iter() {
                if path[t].is_none() {
                    let step = Word::from_letters(self.rank_ambient, [Letter::new(l, true)]);
                    path[t] = Some(pv.multiply(&step).unwrap());
                    tree.insert((t, l, v));
                    queue.push_back(t);
                }
            }
        }
        let mut basis = Vec::new();
        for v in 0..n {
            for (&l, &h) in self.out[v].iter() {
                if tree.contains(&(v, l, h)) {
                    continue;
                }
                let step = Word::from_letters(self.rank_ambient, [Letter::new(l, false)]);
                let word = path[v]
                    .clone()
                    .unwrap()
                    .multiply(&step)
                    .unwrap()
                    .multiply(&path[h].clone().unwrap().invert())
                    .unwrap();
                basis.push(word);
            }
        }
        basis
    }

    /// Debug listing, one `v --label--> w` line per edge.
    pub fn dot(&self) -> String {
        let mut s = String::new();
        for (v, m) in self.out.iter().enumerate() {
            for (&l, &w) in m {
                let _ = writeln!(s, "{v} --{l}--> {w}");
            }
        }
        s
    }
}

/// Builds the graph of `⟨generators⟩` and classifies it as trivial, infinite
/// cyclic, or non-abelian free with an extracted basis.
pub fn classify(rank: usize, generators: &[Word]) -> Result<SubgroupClass, StallingsError> {
    let graph = SubgroupGraph::build(rank, generators)?;
    Ok(classify_graph(&graph))
}

pub fn classify_graph(graph: &SubgroupGraph) -> SubgroupClass {
    match graph.rank() {
        0 => SubgroupClass::Trivial,
        1 => {
            let basis = graph.free_basis();
            SubgroupClass::InfiniteCyclic(basis.into_iter().next().unwrap())
        }
        r => SubgroupClass::NonAbelianFree { rank: r, basis: graph.free_basis() },
    }
}

/// Brute-force membership for small instances: every product of at most
/// `max_factors` generators or inverse generators, reduced and compared.
/// Test oracle; exponential.
pub fn membership_oracle(
    rank: usize,
    generators: &[Word],
    w: &Word,
    max_factors: usize,
) -> Result<bool, WordError> {
    let mut seen = std::collections::HashSet::new();
    let mut frontier = vec![Word::identity(rank)];
    seen.insert(Word::identity(rank));
    let mut steps: Vec<Word> = Vec::new();
    for g in generators {
        steps.push(g.clone());
        steps.push(g.invert());
    }
    for _ in 0..max_factors {
        let mut next = Vec::new();
        for u in &frontier {
            for s in &steps {
                let p = u.multiply(s)?;
                if seen.insert(p.clone()) {
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    Ok(seen.contains(w))
}
