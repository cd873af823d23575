//! Pfaffian words as edge-labelled graphs: vertex `i` for each index, an edge
//! `i - j` labelled with the raw exponent of `X_{i,j}`. A graph stands for the
//! Reynolds image of any of its labelings.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beg::{beg_compressed, solve_degree, DegreeSolution};
use crate::error::{Error, Result};
use crate::poly::{parse_rational, Polynomial, Rational};
use crate::sl2::PfaffianWord;
use crate::weyl::{next_permutation, partitions, WeylGroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub exp: u32,
}

impl Edge {
    /// The displayed weight: `exp/2`, rounded up for odd exponents.
    pub fn rounded_label(&self) -> u32 {
        self.exp.div_ceil(2)
    }

    pub fn is_odd(&self) -> bool {
        self.exp % 2 == 1
    }
}

/// Edges sorted by `(i, j)` with `i < j`, one per pair, positive exponents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GraphSpec {
    edges: Vec<Edge>,
}

impl GraphSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Normalizes orientation and merges repeated pairs by adding exponents.
    pub fn new(edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut map: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for e in edges {
            if e.i == e.j || e.i == 0 || e.j == 0 {
                return Err(Error::Parse { pos: 0, msg: format!("invalid edge ({}, {})", e.i, e.j) });
            }
            let key = (e.i.min(e.j), e.i.max(e.j));
            *map.entry(key).or_default() += e.exp;
        }
        Ok(GraphSpec {
            edges: map.into_iter().filter(|&(_, exp)| exp > 0).map(|((i, j), exp)| Edge { i, j, exp }).collect(),
        })
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Vertices incident to an edge, ascending.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.edges.iter().flat_map(|e| [e.i, e.j]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices().len()
    }

    /// x/y-degree of the associated polynomial.
    pub fn degree(&self) -> usize {
        2 * self.edges.iter().map(|e| e.exp as usize).sum::<usize>()
    }

    /// A path on `k` vertices `1..=k` with every edge carrying `exp`.
    pub fn path(k: usize, exp: u32) -> Self {
        GraphSpec { edges: (1..k).map(|i| Edge { i, j: i + 1, exp }).collect() }
    }

    /// Renames vertices to `1..=k` keeping their order (no sign change).
    pub fn compact(&self) -> Self {
        let verts = self.vertices();
        let pos = |v: usize| verts.binary_search(&v).unwrap() + 1;
        GraphSpec { edges: self.edges.iter().map(|e| Edge { i: pos(e.i), j: pos(e.j), exp: e.exp }).collect() }
    }

    /// Places `other` on fresh vertices after those of `self`.
    pub fn disjoint_union(&self, other: &GraphSpec) -> GraphSpec {
        let a = self.compact();
        let shift = a.vertex_count();
        let mut edges = a.edges;
        edges.extend(other.compact().edges.iter().map(|e| Edge { i: e.i + shift, j: e.j + shift, exp: e.exp }));
        GraphSpec::new(edges).expect("shifted edges are valid")
    }

    /// The pfaffian word of this labeling at rank `rank`.
    pub fn word(&self, rank: usize) -> Result<PfaffianWord> {
        if let Some(&max) = self.vertices().last() {
            if max > rank {
                return Err(Error::GraphTooLarge { vertices: max, rank });
            }
        }
        let pairs: Vec<_> = self.edges.iter().map(|e| ((e.i, e.j), e.exp)).collect();
        PfaffianWord::from_pairs(rank.max(2), &pairs)
    }

    /// Canonical labeling: the lexicographically least edge list over all
    /// relabelings of the compacted vertex set, with the sign relating the
    /// two Reynolds images (`R(canonical) = sign · R(self)`).
    pub fn canonical(&self) -> (GraphSpec, i8) {
        let g = self.compact();
        let k = g.vertex_count();
        if k == 0 {
            return (g, 1);
        }
        let mut sigma: Vec<usize> = (0..k).collect();
        let mut best: Option<(GraphSpec, i8)> = None;
        loop {
            let mut sign = 1i8;
            let edges = g.edges.iter().map(|e| {
                let (a, b) = (sigma[e.i - 1] + 1, sigma[e.j - 1] + 1);
                if a > b && e.exp % 2 == 1 {
                    sign = -sign;
                }
                Edge { i: a.min(b), j: a.max(b), exp: e.exp }
            });
            let cand = GraphSpec::new(edges.collect::<Vec<_>>()).expect("relabeled edges are valid");
            if best.as_ref().is_none_or(|(b, _)| cand.edges < b.edges) {
                best = Some((cand, sign));
            }
            if !next_permutation(&mut sigma) {
                break;
            }
        }
        best.expect("at least one labeling")
    }
}

impl<'de> Deserialize<'de> for GraphSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            edges: Vec<Edge>,
        }
        let raw = Raw::deserialize(d)?;
        GraphSpec::new(raw.edges).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.edges.is_empty() {
            return write!(f, "(empty)");
        }
        for (k, e) in self.edges.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}-{}:{}", e.i, e.j, e.exp)?;
        }
        Ok(())
    }
}

pub fn graph_of(word: &PfaffianWord) -> GraphSpec {
    GraphSpec::new(word.entries().into_iter().map(|((i, j), exp)| Edge { i, j, exp })).expect("word pairs are valid")
}

/// Reynolds image of the compacted labeling of `g` in the group `w`.
pub fn polynomial_of(g: &GraphSpec, w: &WeylGroup) -> Result<Polynomial> {
    let vc = g.vertex_count();
    if vc > w.rank() {
        return Err(Error::GraphTooLarge { vertices: vc, rank: w.rank() });
    }
    w.reynolds(&g.compact().word(w.rank())?.expand())
}

/// `Σ c_k · Γ_k`, each graph standing for its Reynolds image.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphCombination {
    terms: BTreeMap<GraphSpec, Rational>,
}

impl GraphCombination {
    pub fn single(g: GraphSpec) -> Self {
        let mut c = Self::default();
        c.add(g, Rational::one());
        c
    }

    /// Adds `coeff · g` after canonicalizing `g`.
    pub fn add(&mut self, g: GraphSpec, coeff: Rational) {
        let (canon, sign) = g.canonical();
        let coeff = if sign < 0 { -coeff } else { coeff };
        let e = self.terms.entry(canon.clone()).or_insert_with(Rational::zero);
        *e += coeff;
        if e.is_zero() {
            self.terms.remove(&canon);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GraphSpec, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_vertices(&self) -> usize {
        self.terms.keys().map(|g| g.vertex_count()).max().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next().map(|g| g.degree())
    }

    pub fn contains(&self, g: &GraphSpec) -> bool {
        self.terms.contains_key(&g.canonical().0)
    }

    /// The combination of the words of a solution vector.
    pub fn from_words(terms: &[(Rational, PfaffianWord)]) -> Self {
        let mut c = Self::default();
        for (coeff, w) in terms {
            c.add(graph_of(w), coeff.clone());
        }
        c
    }

    /// Graph-level composition: every pair of terms placed side by side.
    pub fn disjoint_union(&self, other: &GraphCombination) -> GraphCombination {
        let mut out = GraphCombination::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add(a.disjoint_union(b), ca * cb);
            }
        }
        out
    }

    /// `Σ c_k · word(Γ_k)` before symmetrization, at rank `rank`.
    pub fn raw_polynomial(&self, rank: usize) -> Result<Polynomial> {
        let mut acc = Polynomial::zero(rank);
        for (g, c) in &self.terms {
            if g.vertex_count() > rank {
                return Err(Error::GraphTooLarge { vertices: g.vertex_count(), rank });
            }
            acc = acc.try_add(&g.word(rank)?.expand().scale(c))?;
        }
        Ok(acc)
    }

    pub fn polynomial(&self, w: &WeylGroup) -> Result<Polynomial> {
        w.reynolds(&self.raw_polynomial(w.rank())?)
    }

    /// True iff the combination solves the equation for `w`.
    pub fn solves(&self, w: &WeylGroup) -> Result<bool> {
        Ok(beg_compressed(w, &self.raw_polynomial(w.rank())?)?.is_empty())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    edges: Vec<Edge>,
    coeff: String,
}

impl Serialize for GraphCombination {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermJson> =
            self.terms.iter().map(|(g, c)| TermJson { edges: g.edges.clone(), coeff: c.to_string() }).collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GraphCombination {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<TermJson>::deserialize(d)?;
        let mut out = GraphCombination::default();
        for t in raw {
            let g = GraphSpec::new(t.edges).map_err(serde::de::Error::custom)?;
            let c = parse_rational(&t.coeff).ok_or_else(|| serde::de::Error::custom(format!("bad coefficient {:?}", t.coeff)))?;
            out.add(g, c);
        }
        Ok(out)
    }
}

impl fmt::Display for GraphCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (g, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) [{g}]")?;
        }
        Ok(())
    }
}

/// One linear graph per partition of `n`: a part of size `j ≥ 2` becomes a
/// path on `j` vertices with exponent-2 edges, parts of size 1 add nothing.
pub fn partition_graphs(n: usize) -> Vec<(Vec<usize>, GraphSpec)> {
    partitions(n)
        .into_iter()
        .map(|parts| {
            let g = parts.iter().filter(|&&p| p >= 2).fold(GraphSpec::empty(), |acc, &p| acc.disjoint_union(&GraphSpec::path(p, 2)));
            (parts, g)
        })
        .collect()
}

/// `R_n(P·Q)` for polynomials on disjoint index sets, lifted to the rank of `w`.
pub fn compose(a: &Polynomial, b: &Polynomial, w: &WeylGroup) -> Result<Polynomial> {
    let indices = |p: &Polynomial| p.terms().fold(0u32, |m, (mono, _)| m | mono.index_mask());
    if indices(a) & indices(b) != 0 {
        return Err(Error::OverlappingIndices);
    }
    let (a, b) = (a.with_rank(w.rank())?, b.with_rank(w.rank())?);
    w.reynolds(&a.try_mul(&b)?)
}

/// Result of the search at degree `4(n − 1)`.
#[derive(Debug, Clone)]
pub struct SimpleGraphResult {
    pub degree: usize,
    pub candidates: usize,
    pub solutions: Vec<GraphCombination>,
}

impl SimpleGraphResult {
    /// The combination when the solution space is one-dimensional.
    pub fn unique(&self) -> Option<&GraphCombination> {
        match self.solutions.as_slice() {
            [one] => Some(one),
            _ => None,
        }
    }
}

fn graphs_of_solution(sol: &DegreeSolution) -> Vec<GraphCombination> {
    sol.combinations().iter().map(|terms| GraphCombination::from_words(terms)).collect()
}

/// Solves the equation for `w` in degree `4(n − 1)` over every invariant
/// hw-0 candidate of that degree and reports the solutions as graphs.
pub fn simple_graph_search(w: &WeylGroup) -> Result<SimpleGraphResult> {
    let d = 4 * (w.rank() - 1);
    let sol = solve_degree(w, d)?;
    Ok(SimpleGraphResult { degree: d, candidates: sol.candidates.len(), solutions: graphs_of_solution(&sol) })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CatalogEntry {
    pub partition: Vec<usize>,
    pub degree: usize,
    pub combination: GraphCombination,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DegreeCount {
    pub degree: usize,
    pub catalog: usize,
    pub solver: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Catalog {
    pub group: WeylGroup,
    pub entries: Vec<CatalogEntry>,
    pub counts: Vec<DegreeCount>,
    /// The simple graph of each rank `2..=n` that was found unique.
    pub simple_graphs: BTreeMap<usize, GraphCombination>,
}

impl Catalog {
    pub fn all_verified(&self) -> bool {
        self.entries.iter().all(|e| e.verified)
    }

    pub fn counts_match(&self) -> bool {
        self.counts.iter().all(|c| c.catalog == c.solver)
    }
}

/// For each partition of `n`, the disjoint union of the simple graphs of its
/// parts, verified against the equation at rank `n`, next to the solver's
/// dimension in each degree that occurs.
pub fn catalog(w: &WeylGroup) -> Result<Catalog> {
    let n = w.rank();
    let mut simple = BTreeMap::new();
    for k in 2..=n {
        let res = simple_graph_search(&w.with_rank(k)?)?;
        if let Some(g) = res.unique() {
            simple.insert(k, g.clone());
        }
    }
    let mut entries = Vec::new();
    for parts in partitions(n) {
        let mut comb = GraphCombination::single(GraphSpec::empty());
        let mut ok = true;
        for &p in parts.iter().filter(|&&p| p >= 2) {
            match simple.get(&p) {
                Some(g) => comb = comb.disjoint_union(g),
                None => ok = false,
            }
        }
        if !ok {
            continue;
        }
        let degree = comb.degree().unwrap_or(0);
        entries.push(CatalogEntry { partition: parts, degree, combination: comb, verified: false });
    }
    let verdicts: Vec<bool> = entries
        .par_iter()
        .map(|e| Ok(!e.combination.polynomial(w)?.is_zero() && e.combination.solves(w)?))
        .collect::<Result<_>>()?;
    for (e, v) in entries.iter_mut().zip(verdicts) {
        e.verified = v;
    }
    let mut degrees: Vec<usize> = entries.iter().map(|e| e.degree).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let counts = degrees
        .into_iter()
        .map(|d| {
            Ok(DegreeCount {
                degree: d,
                catalog: entries.iter().filter(|e| e.degree == d).count(),
                solver: solve_degree(w, d)?.dimension(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(Catalog { group: *w, entries, counts, simple_graphs: simple })
}
