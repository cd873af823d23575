//! Weyl groups of type B and D as signed permutations acting diagonally on
//! the x/y variables, plus the Reynolds projection and the partition counts
//! that give the expected HH₀ dimensions.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{Block, Monomial, Polynomial, Rational, MAX_RANK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    B,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeylGroup {
    family: Family,
    rank: usize,
}

/// A signed permutation `g` acting by `(g·x)_i = s_i x_{π(i)}`, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    /// `perm` is 1-based (a permutation of `1..=n`), `signs` entries are ±1.
    pub fn new(perm: &[usize], signs: &[i8]) -> Result<Self> {
        let n = perm.len();
        if n == 0 || n > MAX_RANK {
            return Err(Error::RankOutOfRange(n));
        }
        if signs.len() != n {
            return Err(Error::RankMismatch(n, signs.len()));
        }
        let mut seen = [false; MAX_RANK];
        for &p in perm {
            if p == 0 || p > n || seen[p - 1] {
                return Err(Error::Inconsistent(format!("{perm:?} is not a permutation")));
            }
            seen[p - 1] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Inconsistent(format!("{signs:?} are not signs")));
        }
        Ok(SignedPermutation {
            perm: perm.iter().map(|p| p - 1).collect(),
            signs: signs.to_vec(),
        })
    }

    pub fn identity(n: usize) -> Self {
        SignedPermutation { perm: (0..n).collect(), signs: vec![1; n] }
    }

    /// The sign change `s_j` (1-based).
    pub fn sign_change(n: usize, j: usize) -> Self {
        let mut g = Self::identity(n);
        g.signs[j - 1] = -1;
        g
    }

    /// The transposition of indices `i` and `j` (1-based).
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut g = Self::identity(n);
        g.perm.swap(i - 1, j - 1);
        g
    }

    pub fn rank(&self) -> usize {
        self.perm.len()
    }

    /// 1-based image `π(i)`.
    pub fn perm(&self) -> Vec<usize> {
        self.perm.iter().map(|p| p + 1).collect()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign_product(&self) -> i8 {
        self.signs.iter().product()
    }

    /// The matrix product `self · other`, so that
    /// `other.act(self.act(p)) == self.compose(other).act(p)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch(self.rank(), other.rank()));
        }
        let n = self.rank();
        let perm = (0..n).map(|i| other.perm[self.perm[i]]).collect();
        let signs = (0..n).map(|i| self.signs[i] * other.signs[self.perm[i]]).collect();
        Ok(SignedPermutation { perm, signs })
    }

    /// `g·P(x, y) = P(gx, gy)`; z and t are fixed.
    pub fn act(&self, p: &Polynomial) -> Result<Polynomial> {
        if p.rank() != self.rank() {
            return Err(Error::RankMismatch(p.rank(), self.rank()));
        }
        Ok(p.map_monomials(|m| self.act_monomial(m)))
    }

    /// Image of a monomial together with a flag telling whether it is negated.
    pub fn act_monomial(&self, m: &Monomial) -> (Monomial, bool) {
        let mut out = *m;
        let mut negate = false;
        for i in 0..self.rank() {
            out.set(Block::X, i, 0);
            out.set(Block::Y, i, 0);
        }
        for i in 0..self.rank() {
            let (a, b) = (m.get(Block::X, i), m.get(Block::Y, i));
            let j = self.perm[i];
            out.set(Block::X, j, a);
            out.set(Block::Y, j, b);
            if self.signs[i] < 0 && (a + b) % 2 == 1 {
                negate = !negate;
            }
        }
        (out, negate)
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rank() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let s = if self.signs[i] < 0 { "-" } else { "" };
            write!(f, "{s}{}", self.perm[i] + 1)?;
        }
        write!(f, "]")
    }
}

impl WeylGroup {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        if !(2..=MAX_RANK).contains(&rank) {
            return Err(Error::RankOutOfRange(rank));
        }
        Ok(WeylGroup { family, rank })
    }

    pub fn b(rank: usize) -> Result<Self> {
        Self::new(Family::B, rank)
    }

    pub fn d(rank: usize) -> Result<Self> {
        Self::new(Family::D, rank)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The same family at another rank.
    pub fn with_rank(&self, rank: usize) -> Result<Self> {
        Self::new(self.family, rank)
    }

    pub fn order(&self) -> u64 {
        let fact: u64 = (1..=self.rank as u64).product();
        match self.family {
            Family::B => fact << self.rank,
            Family::D => fact << (self.rank - 1),
        }
    }

    pub fn contains(&self, g: &SignedPermutation) -> bool {
        g.rank() == self.rank && (self.family == Family::B || g.sign_product() == 1)
    }

    /// Lazily enumerates every element once: permutations in lexicographic
    /// order, each followed by its admissible sign patterns.
    pub fn elements(&self) -> Elements {
        Elements {
            family: self.family,
            perm: (0..self.rank).collect(),
            mask: 0,
            done: false,
        }
    }

    /// True iff some pure sign change in the group sends the x/y part of `m`
    /// to its negative, in which case the Reynolds image of `m` vanishes.
    pub fn sign_kill_test(&self, m: &Monomial) -> bool {
        self.kills_parity(m.xy_parity_mask())
    }

    /// The kill predicate on a parity vector of pair-degrees.
    /// B: any odd entry. D: the entries are not all equal.
    #[inline]
    pub fn kills_parity(&self, mask: u32) -> bool {
        match self.family {
            Family::B => mask != 0,
            Family::D => mask != 0 && mask != (1u32 << self.rank) - 1,
        }
    }

    /// The Reynolds operator, linear over ℂ[z, t].
    pub fn reynolds(&self, p: &Polynomial) -> Result<Polynomial> {
        if p.rank() != self.rank {
            return Err(Error::RankMismatch(p.rank(), self.rank));
        }
        let mut grouped: HashMap<(Monomial, Monomial), Rational> = HashMap::new();
        for (m, c) in p.terms() {
            if self.sign_kill_test(m) {
                continue;
            }
            let (xy, zt) = m.split_xy_zt();
            let (canon, size) = canonical_pairs(&xy, Block::X, Block::Y, self.rank);
            *grouped.entry((canon, zt)).or_insert_with(Rational::zero) +=
                c / Rational::from_integer(BigInt::from(size));
        }
        let mut out = Polynomial::zero(self.rank);
        for ((canon, zt), c) in grouped {
            if c.is_zero() {
                continue;
            }
            for_each_orbit_member(&canon, Block::X, Block::Y, self.rank, |m| {
                out.add_term(m.mul(&zt), c.clone());
            });
        }
        Ok(out)
    }

    /// Coefficients of the canonical orbit representatives in `R(p)` for an
    /// x/y polynomial `p`; two invariants agree iff these maps agree.
    pub fn reynolds_compressed(&self, p: &Polynomial) -> Result<HashMap<Monomial, Rational>> {
        if p.rank() != self.rank {
            return Err(Error::RankMismatch(p.rank(), self.rank));
        }
        if !p.is_xy_only() {
            return Err(Error::NotXyPolynomial);
        }
        let mut grouped: HashMap<Monomial, Rational> = HashMap::new();
        for (m, c) in p.terms() {
            if self.sign_kill_test(m) {
                continue;
            }
            let (canon, size) = canonical_pairs(m, Block::X, Block::Y, self.rank);
            *grouped.entry(canon).or_insert_with(Rational::zero) +=
                c / Rational::from_integer(BigInt::from(size));
        }
        grouped.retain(|_, c| !c.is_zero());
        Ok(grouped)
    }

    /// dim HH₀ of the invariant Weyl algebra: π(n) for B, π̃(n) for D.
    pub fn hh0_dimension(&self) -> u64 {
        match self.family {
            Family::B => partition_count(self.rank),
            Family::D => even_part_partition_count(self.rank),
        }
    }
}

impl fmt::Display for WeylGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.family {
            Family::B => 'B',
            Family::D => 'D',
        };
        write!(f, "{c}{}", self.rank)
    }
}

impl FromStr for WeylGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownGroup(s.to_string());
        let t = s.trim();
        let mut chars = t.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('B') => Family::B,
            Some('D') => Family::D,
            _ => return Err(bad()),
        };
        let rank: usize = chars.as_str().parse().map_err(|_| bad())?;
        WeylGroup::new(family, rank).map_err(|_| bad())
    }
}

impl serde::Serialize for WeylGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for WeylGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub struct Elements {
    family: Family,
    perm: Vec<usize>,
    mask: u32,
    done: bool,
}

impl Iterator for Elements {
    type Item = SignedPermutation;

    fn next(&mut self) -> Option<SignedPermutation> {
        let n = self.perm.len();
        loop {
            if self.done {
                return None;
            }
            let mask = self.mask;
            let perm = self.perm.clone();
            if mask + 1 < (1u32 << n) {
                self.mask += 1;
            } else {
                self.mask = 0;
                self.done = !next_permutation(&mut self.perm);
            }
            if self.family == Family::D && mask.count_ones() % 2 == 1 {
                continue;
            }
            let signs = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            return Some(SignedPermutation { perm, signs });
        }
    }
}

/// Rearranges into the next lexicographic permutation; false when `v` was the last.
pub(crate) fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Canonical representative of the orbit of `m` under permutations of the
/// indices acting on the `(a, b)` block pair, and the orbit size. The
/// representative has its pairs sorted in decreasing order. Other blocks are
/// left untouched.
pub(crate) fn canonical_pairs(m: &Monomial, a: Block, b: Block, n: usize) -> (Monomial, u64) {
    let mut pairs = [(0u8, 0u8); MAX_RANK];
    for (i, p) in pairs.iter_mut().enumerate().take(n) {
        *p = (m.get(a, i), m.get(b, i));
    }
    let pairs = &mut pairs[..n];
    pairs.sort_unstable_by(|x, y| y.cmp(x));
    let mut out = *m;
    let mut size = factorial(n);
    let mut run = 1u64;
    for i in 0..n {
        out.set(a, i, pairs[i].0);
        out.set(b, i, pairs[i].1);
        if i > 0 && pairs[i] == pairs[i - 1] {
            run += 1;
            size /= run;
        } else {
            run = 1;
        }
    }
    (out, size)
}

/// Calls `f` once for every distinct relabeling of the `(a, b)` pairs of `m`.
pub(crate) fn for_each_orbit_member(m: &Monomial, a: Block, b: Block, n: usize, mut f: impl FnMut(&Monomial)) {
    let mut pairs: Vec<(u8, u8)> = (0..n).map(|i| (m.get(a, i), m.get(b, i))).collect();
    pairs.sort_unstable();
    let mut out = *m;
    loop {
        for (i, &(x, y)) in pairs.iter().enumerate() {
            out.set(a, i, x);
            out.set(b, i, y);
        }
        f(&out);
        if !next_permutation(&mut pairs) {
            break;
        }
    }
}

/// All partitions of `n` as weakly decreasing part lists, in reverse lexicographic order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=max.min(rest)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// π(n).
pub fn partition_count(n: usize) -> u64 {
    partitions(n).len() as u64
}

/// π̃(n): partitions of `n` with an even number of parts.
pub fn even_part_partition_count(n: usize) -> u64 {
    partitions(n).iter().filter(|p| p.len() % 2 == 0).count() as u64
}

/// Sum of `g·p` over the whole group divided by its order, by plain enumeration.
pub fn reynolds_by_enumeration(w: &WeylGroup, p: &Polynomial) -> Result<Polynomial> {
    let mut acc = Polynomial::zero(p.rank());
    for g in w.elements() {
        acc = acc.try_add(&g.act(p)?)?;
    }
    Ok(acc.scale(&(Rational::one() / Rational::from_integer(BigInt::from(w.order())))))
}
