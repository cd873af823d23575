//! The diagonal sl₂ triple, weights, and the highest-weight-0 subspace
//! generated by the pfaffian quadratics `X_{i,j} = x_i y_j − y_i x_j`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Indexer, RowReducer, SparseVec};
use crate::poly::{binomial, Monomial, Polynomial, Rational, VarId, MAX_RANK};
use crate::weyl::{next_permutation, WeylGroup};

/// `E = ½ x·x`, `F = −½ y·y`, `H = −x·y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sl2Triple {
    pub e: Polynomial,
    pub f: Polynomial,
    pub h: Polynomial,
}

impl Sl2Triple {
    pub fn new(rank: usize) -> Result<Self> {
        if !(2..=MAX_RANK).contains(&rank) {
            return Err(Error::RankOutOfRange(rank));
        }
        let half = Rational::new(1.into(), 2.into());
        let mut e = Polynomial::zero(rank);
        let mut f = Polynomial::zero(rank);
        let mut h = Polynomial::zero(rank);
        for i in 1..=rank {
            e.add_term(Monomial::from_pairs(&[(VarId::x(i), 2)]), half.clone());
            f.add_term(Monomial::from_pairs(&[(VarId::y(i), 2)]), -half.clone());
            h.add_term(Monomial::from_pairs(&[(VarId::x(i), 1), (VarId::y(i), 1)]), -Rational::one());
        }
        Ok(Sl2Triple { e, f, h })
    }

    pub fn rank(&self) -> usize {
        self.e.rank()
    }

    /// True iff `{E,p} = {F,p} = {H,p} = 0`.
    pub fn is_hw0(&self, p: &Polynomial) -> Result<bool> {
        for g in [&self.h, &self.e, &self.f] {
            if !g.poisson_bracket(p)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// H-weight of a polynomial: `deg_x − deg_y` when every term agrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    Pure(i64),
    Mixed,
}

/// The zero polynomial is reported as weight 0.
pub fn weight_of(p: &Polynomial) -> Weight {
    let mut weights = p.terms().map(|(m, _)| {
        m.block_degree(crate::poly::Block::X) as i64 - m.block_degree(crate::poly::Block::Y) as i64
    });
    let Some(w) = weights.next() else {
        return Weight::Pure(0);
    };
    if weights.all(|v| v == w) {
        Weight::Pure(w)
    } else {
        Weight::Mixed
    }
}

/// Dimension of the highest-weight-0 part of `S(d)` in rank `n`.
pub fn hw0_dim_formula(n: usize, d: usize) -> u128 {
    if d % 2 == 1 {
        return 0;
    }
    let (l, n) = (d as u32 / 2, n as u32);
    let a = binomial(l + n - 1, n - 1);
    let b = binomial(l + n, n - 1);
    let c = if l + n >= 2 { binomial(l + n - 2, n - 1) } else { 0 };
    a * a - b * c
}

/// Index pairs `(i, j)`, `1 ≤ i < j ≤ n`, in lexicographic order.
pub fn index_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect()
}

/// A product `∏ X_{i,j}^{b_{i,j}}`, stored as an exponent vector over
/// [`index_pairs`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PfaffianWord {
    rank: usize,
    exps: Vec<u32>,
}

impl PfaffianWord {
    pub fn one(rank: usize) -> Self {
        PfaffianWord { rank, exps: vec![0; rank * (rank - 1) / 2] }
    }

    pub fn from_pairs(rank: usize, pairs: &[((usize, usize), u32)]) -> Result<Self> {
        if !(2..=MAX_RANK).contains(&rank) {
            return Err(Error::RankOutOfRange(rank));
        }
        let mut w = Self::one(rank);
        for &((i, j), e) in pairs {
            let (i, j) = if i < j { (i, j) } else { (j, i) };
            if i == j || i == 0 {
                return Err(Error::Parse { pos: 0, msg: format!("invalid pair ({i},{j})") });
            }
            if j > rank {
                return Err(Error::IndexOutOfRange { index: j, rank });
            }
            let k = pair_index(rank, i, j);
            w.exps[k] += e;
        }
        Ok(w)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn exponent(&self, i: usize, j: usize) -> u32 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.exps[pair_index(self.rank, i, j)]
    }

    /// Nonzero `((i, j), b)` entries in pair order.
    pub fn entries(&self) -> Vec<((usize, usize), u32)> {
        index_pairs(self.rank)
            .into_iter()
            .zip(&self.exps)
            .filter(|(_, &e)| e > 0)
            .map(|(p, &e)| (p, e))
            .collect()
    }

    /// x/y-degree of the expansion, `2·Σ b`.
    pub fn degree(&self) -> usize {
        2 * self.exps.iter().sum::<u32>() as usize
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Bitmask of vertices with odd degree in the multigraph of the word.
    pub fn odd_vertices(&self) -> u32 {
        let mut mask = 0;
        for ((i, j), e) in index_pairs(self.rank).into_iter().zip(&self.exps) {
            if e % 2 == 1 {
                mask ^= 1 << (i - 1);
                mask ^= 1 << (j - 1);
            }
        }
        mask
    }

    /// The same word read at another rank.
    pub fn with_rank(&self, rank: usize) -> Result<Self> {
        Self::from_pairs(rank, &self.entries())
    }

    /// Relabels indices by the 0-based permutation `sigma`, returning the
    /// word and the sign `ε` with `ε·expand(result) = g·expand(self)` for the
    /// permutation `g` sending index `i` to `sigma[i]`.
    pub fn relabel(&self, sigma: &[usize]) -> (PfaffianWord, i8) {
        let mut out = Self::one(self.rank);
        let mut sign = 1i8;
        for ((i, j), e) in self.entries() {
            let (a, b) = (sigma[i - 1] + 1, sigma[j - 1] + 1);
            if a > b && e % 2 == 1 {
                sign = -sign;
            }
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            out.exps[pair_index(self.rank, a, b)] += e;
        }
        (out, sign)
    }

    /// The lexicographically greatest relabeling and its sign.
    pub fn orbit_canonical(&self) -> (PfaffianWord, i8) {
        let mut sigma: Vec<usize> = (0..self.rank).collect();
        let mut best = (self.clone(), 1i8);
        loop {
            let cand = self.relabel(&sigma);
            if cand.0.exps > best.0.exps {
                best = cand;
            }
            if !next_permutation(&mut sigma) {
                break;
            }
        }
        best
    }

    /// Expands the product into a polynomial in x, y.
    pub fn expand(&self) -> Polynomial {
        let mut acc = Polynomial::one(self.rank);
        for ((i, j), b) in self.entries() {
            acc = &acc * &pfaffian_power(self.rank, i, j, b);
        }
        acc
    }

    /// Parses `X[1,2]^4 * X[1,3]^2`; `1` is the empty word.
    pub fn parse(text: &str, rank: usize) -> Result<Self> {
        let t = text.trim();
        if t == "1" {
            return Self::from_pairs(rank, &[]);
        }
        let mut pairs = Vec::new();
        let mut offset = 0;
        for factor in t.split('*') {
            let err = |msg: &str| Error::Parse { pos: offset, msg: format!("{msg} in {factor:?}") };
            let f: String = factor.chars().filter(|c| !c.is_whitespace()).collect();
            let rest = f.strip_prefix("X[").ok_or_else(|| err("expected X[i,j]"))?;
            let (inner, tail) = rest.split_once(']').ok_or_else(|| err("missing ']'"))?;
            let (i, j) = inner.split_once(',').ok_or_else(|| err("expected i,j"))?;
            let i: usize = i.parse().map_err(|_| err("bad index"))?;
            let j: usize = j.parse().map_err(|_| err("bad index"))?;
            let e: u32 = if tail.is_empty() {
                1
            } else {
                tail.strip_prefix('^').ok_or_else(|| err("expected '^'"))?.parse().map_err(|_| err("bad exponent"))?
            };
            if i == j || i == 0 || j == 0 {
                return Err(err("indices must be distinct and positive"));
            }
            pairs.push(((i, j), e));
            offset += factor.len() + 1;
        }
        Self::from_pairs(rank, &pairs)
    }
}

impl fmt::Display for PfaffianWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries = self.entries();
        if entries.is_empty() {
            return write!(f, "1");
        }
        for (k, ((i, j), e)) in entries.into_iter().enumerate() {
            if k > 0 {
                write!(f, " * ")?;
            }
            if e == 1 {
                write!(f, "X[{i},{j}]")?;
            } else {
                write!(f, "X[{i},{j}]^{e}")?;
            }
        }
        Ok(())
    }
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    // pairs (1,2..n), (2,3..n), ... ; i < j, 1-based
    (i - 1) * (2 * n - i) / 2 + (j - i - 1)
}

/// `X_{i,j}^b` by the binomial theorem.
fn pfaffian_power(rank: usize, i: usize, j: usize, b: u32) -> Polynomial {
    let mut out = Polynomial::zero(rank);
    for k in 0..=b {
        let m = Monomial::from_pairs(&[
            (VarId::x(i), b - k),
            (VarId::y(j), b - k),
            (VarId::y(i), k),
            (VarId::x(j), k),
        ]);
        let mut c = BigInt::from(binomial(b, k));
        if k % 2 == 1 {
            c = -c;
        }
        out.add_term(m, BigRational::from_integer(c));
    }
    out
}

/// All words with `Σ b = half_degree`, in decreasing lexicographic order of
/// exponent vectors.
pub fn words_of_degree(rank: usize, half_degree: usize) -> Vec<PfaffianWord> {
    let k = rank * (rank - 1) / 2;
    let mut out = Vec::new();
    fn rec(pos: usize, rest: u32, cur: &mut Vec<u32>, rank: usize, out: &mut Vec<PfaffianWord>) {
        if pos + 1 == cur.len() {
            cur[pos] = rest;
            out.push(PfaffianWord { rank, exps: cur.clone() });
            return;
        }
        for e in (0..=rest).rev() {
            cur[pos] = e;
            rec(pos + 1, rest - e, cur, rank, out);
        }
        cur[pos] = 0;
    }
    rec(0, half_degree as u32, &mut vec![0; k], rank, &mut out);
    out
}

/// A basis of (a subspace of) the highest-weight-0 polynomials of one degree,
/// with the pfaffian word each vector came from.
#[derive(Debug, Clone)]
pub struct Hw0Basis {
    pub rank: usize,
    pub degree: usize,
    pub words: Vec<PfaffianWord>,
    pub vectors: Vec<Polynomial>,
}

impl Hw0Basis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

fn sparse_of(p: &Polynomial, idx: &mut Indexer<Monomial>) -> SparseVec {
    p.terms().map(|(m, c)| (idx.index(*m), c.clone())).collect()
}

/// Greedy basis of the hw-0 space of degree `d` in rank `n`, chosen from
/// expanded pfaffian words in decreasing lexicographic order.
pub fn hw0_basis(n: usize, d: usize) -> Result<Hw0Basis> {
    if !(2..=MAX_RANK).contains(&n) {
        return Err(Error::RankOutOfRange(n));
    }
    let mut basis = Hw0Basis { rank: n, degree: d, words: Vec::new(), vectors: Vec::new() };
    if d % 2 == 1 {
        return Ok(basis);
    }
    let target = hw0_dim_formula(n, d) as usize;
    let mut idx = Indexer::default();
    let mut reducer = RowReducer::new();
    for word in words_of_degree(n, d / 2) {
        if basis.len() == target {
            break;
        }
        let v = word.expand();
        if reducer.add_row(sparse_of(&v, &mut idx)) {
            basis.words.push(word);
            basis.vectors.push(v);
        }
    }
    Ok(basis)
}

/// Orbit representatives of words of degree `d` whose Reynolds image is not
/// killed by the sign changes of `w`, in decreasing lexicographic order.
pub fn invariant_candidate_words(w: &WeylGroup, d: usize) -> Vec<PfaffianWord> {
    if d % 2 == 1 {
        return Vec::new();
    }
    let mut seen = HashSet::new();
    for word in words_of_degree(w.rank(), d / 2) {
        if w.kills_parity(word.odd_vertices()) {
            continue;
        }
        seen.insert(word.orbit_canonical().0);
    }
    let mut reps: Vec<_> = seen.into_iter().collect();
    reps.sort_by(|a, b| b.exps.cmp(&a.exps));
    reps
}

/// Basis of the invariant hw-0 space `S^W_sl2(d)` made of Reynolds images of
/// orbit-representative words, chosen greedily.
pub fn invariant_hw0_basis(w: &WeylGroup, d: usize) -> Result<Hw0Basis> {
    let n = w.rank();
    let mut basis = Hw0Basis { rank: n, degree: d, words: Vec::new(), vectors: Vec::new() };
    let mut idx = Indexer::default();
    let mut reducer = RowReducer::new();
    for word in invariant_candidate_words(w, d) {
        let expanded = word.expand();
        let compressed = w.reynolds_compressed(&expanded)?;
        let row: SparseVec = compressed.into_iter().map(|(m, c)| (idx.index(m), c)).collect();
        if reducer.add_row(row) {
            basis.vectors.push(w.reynolds(&expanded)?);
            basis.words.push(word);
        }
    }
    Ok(basis)
}

/// A rational combination of words, printed as `c * word + ...`.
pub fn format_combination(terms: &[(Rational, &PfaffianWord)]) -> String {
    let mut out = String::new();
    for (c, word) in terms.iter().filter(|(c, _)| !c.is_zero()) {
        let neg = c.is_negative();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        if a.is_one() {
            out.push_str(&word.to_string());
        } else {
            out.push_str(&format!("{a} * {word}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Parses the output of [`format_combination`].
pub fn parse_combination(text: &str, rank: usize) -> Result<Vec<(Rational, PfaffianWord)>> {
    let mut out = Vec::new();
    let mut sign = Rational::one();
    let mut s = text.trim();
    if s == "0" {
        return Ok(out);
    }
    if let Some(rest) = s.strip_prefix('-') {
        sign = -sign;
        s = rest.trim_start();
    }
    loop {
        let next = [" + ", " - "].iter().filter_map(|sep| s.find(sep).map(|p| (p, *sep))).min();
        let (chunk, tail) = match next {
            Some((p, sep)) => (&s[..p], Some((sep, &s[p + 3..]))),
            None => (s, None),
        };
        let (coeff, word) = match chunk.split_once('*') {
            Some((c, rest)) if !c.trim().starts_with('X') => {
                let c = crate::poly::parse_rational(c)
                    .ok_or_else(|| Error::Parse { pos: 0, msg: format!("bad coefficient {c:?}") })?;
                (c, rest)
            }
            _ => (Rational::one(), chunk),
        };
        out.push((sign * coeff, PfaffianWord::parse(word, rank)?));
        match tail {
            Some((sep, rest)) => {
                sign = if sep == " - " { -Rational::one() } else { Rational::one() };
                s = rest;
            }
            None => break,
        }
    }
    Ok(out)
}

/// Sum of `c · expand(word)`.
pub fn expand_combination(rank: usize, terms: &[(Rational, PfaffianWord)]) -> Polynomial {
    let mut acc = Polynomial::zero(rank);
    for (c, w) in terms {
        acc = &acc + &w.expand().scale(c);
    }
    acc
}

/// Converts the coefficient map of a combination into the ordered form used
/// for display.
pub fn combination_from_map(map: &BTreeMap<PfaffianWord, Rational>) -> Vec<(Rational, PfaffianWord)> {
    map.iter().filter(|(_, c)| !c.is_zero()).map(|(w, c)| (c.clone(), w.clone())).collect()
}
