//! Exact sparse polynomials over the rationals in the four variable blocks
//! `x1..xn, y1..yn, z1..zn, t1..tn`.
//!
//! Monomials are packed exponent arrays with a fixed slot per variable, so a
//! polynomial can be re-read at a larger rank without re-indexing. Terms are
//! kept in a `BTreeMap` ordered by graded lexicographic order (total degree
//! first, then exponents compared in the order `x1..xn, y1..yn, z1..zn,
//! t1..tn`), which makes printing and equality canonical.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Largest supported rank.
pub const MAX_RANK: usize = 8;
const SLOTS: usize = 4 * MAX_RANK;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    X = 0,
    Y = 1,
    Z = 2,
    T = 3,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::X, Block::Y, Block::Z, Block::T];

    pub fn letter(self) -> char {
        match self {
            Block::X => 'x',
            Block::Y => 'y',
            Block::Z => 'z',
            Block::T => 't',
        }
    }

    fn from_letter(c: char) -> Option<Block> {
        match c {
            'x' => Some(Block::X),
            'y' => Some(Block::Y),
            'z' => Some(Block::Z),
            't' => Some(Block::T),
            _ => None,
        }
    }
}

/// A variable: block letter plus a 1-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    pub block: Block,
    pub index: usize,
}

impl VarId {
    pub fn new(block: Block, index: usize) -> Result<Self> {
        if index == 0 || index > MAX_RANK {
            return Err(Error::IndexOutOfRange { index, rank: MAX_RANK });
        }
        Ok(VarId { block, index })
    }

    pub fn x(i: usize) -> Self {
        Self::new(Block::X, i).expect("index in range")
    }
    pub fn y(i: usize) -> Self {
        Self::new(Block::Y, i).expect("index in range")
    }
    pub fn z(i: usize) -> Self {
        Self::new(Block::Z, i).expect("index in range")
    }
    pub fn t(i: usize) -> Self {
        Self::new(Block::T, i).expect("index in range")
    }

    #[inline]
    fn slot(self) -> usize {
        self.block as usize * MAX_RANK + self.index - 1
    }

    fn from_slot(slot: usize) -> Self {
        VarId {
            block: Block::ALL[slot / MAX_RANK],
            index: slot % MAX_RANK + 1,
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.block.letter(), self.index)
    }
}

/// A monomial as a packed exponent vector. Zero exponents are simply zero
/// slots, so equal monomials always compare equal.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u8; SLOTS],
}

impl Default for Monomial {
    fn default() -> Self {
        Self::one()
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { exps: [0; SLOTS] }
    }

    pub fn var(v: VarId) -> Self {
        Self::one().with_exponent(v, 1)
    }

    /// Builds a monomial from `(variable, exponent)` pairs; repeated variables add up.
    pub fn from_pairs(pairs: &[(VarId, u32)]) -> Self {
        let mut m = Self::one();
        for &(v, e) in pairs {
            let cur = m.exponent(v);
            m = m.with_exponent(v, cur + e);
        }
        m
    }

    pub fn with_exponent(mut self, v: VarId, e: u32) -> Self {
        self.exps[v.slot()] = u8::try_from(e).expect("exponent exceeds 255");
        self
    }

    #[inline]
    pub fn exponent(&self, v: VarId) -> u32 {
        self.exps[v.slot()] as u32
    }

    #[inline]
    pub(crate) fn get(&self, block: Block, i0: usize) -> u8 {
        self.exps[block as usize * MAX_RANK + i0]
    }

    #[inline]
    pub(crate) fn set(&mut self, block: Block, i0: usize, e: u8) {
        self.exps[block as usize * MAX_RANK + i0] = e;
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn block_degree(&self, block: Block) -> u32 {
        let start = block as usize * MAX_RANK;
        self.exps[start..start + MAX_RANK].iter().map(|&e| e as u32).sum()
    }

    pub fn xy_degree(&self) -> u32 {
        self.block_degree(Block::X) + self.block_degree(Block::Y)
    }

    pub fn zt_degree(&self) -> u32 {
        self.block_degree(Block::Z) + self.block_degree(Block::T)
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Largest variable index appearing (0 for the constant monomial).
    pub fn max_index(&self) -> usize {
        (0..SLOTS)
            .filter(|&s| self.exps[s] != 0)
            .map(|s| s % MAX_RANK + 1)
            .max()
            .unwrap_or(0)
    }

    /// Set of 1-based indices touched by the monomial, as a bitmask (bit `i-1`).
    pub fn index_mask(&self) -> u32 {
        let mut mask = 0u32;
        for s in 0..SLOTS {
            if self.exps[s] != 0 {
                mask |= 1 << (s % MAX_RANK);
            }
        }
        mask
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for (a, b) in out.exps.iter_mut().zip(other.exps.iter()) {
            *a = a.checked_add(*b).expect("exponent exceeds 255");
        }
        out
    }

    /// The x/y part and the z/t part.
    pub fn split_xy_zt(&self) -> (Monomial, Monomial) {
        let mut xy = *self;
        let mut zt = *self;
        for s in 0..2 * MAX_RANK {
            zt.exps[s] = 0;
        }
        for s in 2 * MAX_RANK..SLOTS {
            xy.exps[s] = 0;
        }
        (xy, zt)
    }

    pub fn is_xy_only(&self) -> bool {
        self.zt_degree() == 0
    }

    pub fn is_zt_only(&self) -> bool {
        self.xy_degree() == 0
    }

    /// Bitmask of indices `i` with `deg_{x_i} + deg_{y_i}` odd.
    #[inline]
    pub fn xy_parity_mask(&self) -> u32 {
        let mut mask = 0;
        for i in 0..MAX_RANK {
            if (self.exps[i] ^ self.exps[MAX_RANK + i]) & 1 == 1 {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Bitmask of indices `i` with `deg_{z_i} + deg_{t_i}` odd.
    #[inline]
    pub fn zt_parity_mask(&self) -> u32 {
        let mut mask = 0;
        for i in 0..MAX_RANK {
            if (self.exps[2 * MAX_RANK + i] ^ self.exps[3 * MAX_RANK + i]) & 1 == 1 {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Derivative exponent bookkeeping: returns `(e, m / v)` or `None` if `v` is absent.
    pub fn divide_var(&self, v: VarId) -> Option<(u32, Monomial)> {
        let e = self.exps[v.slot()];
        if e == 0 {
            return None;
        }
        let mut out = *self;
        out.exps[v.slot()] = e - 1;
        Some((e as u32, out))
    }

    /// Iterates over `(variable, exponent)` for nonzero exponents, in slot order.
    pub fn vars(&self) -> impl Iterator<Item = (VarId, u32)> + '_ {
        (0..SLOTS)
            .filter(|&s| self.exps[s] != 0)
            .map(|s| (VarId::from_slot(s), self.exps[s] as u32))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Monomial({self})")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, e) in self.vars() {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Binomial coefficient as `u128`; exact for every argument this crate uses.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Expands `m(x + z, y + t)` for an x/y monomial `m`, calling `emit` with each
/// resulting monomial and its (positive) integer multiplicity.
pub(crate) fn for_each_shift_term(m: &Monomial, mut emit: impl FnMut(Monomial, u128)) {
    let mut factors: Vec<(Block, usize, u8)> = Vec::new();
    for i in 0..MAX_RANK {
        for block in [Block::X, Block::Y] {
            let e = m.get(block, i);
            if e > 0 {
                factors.push((block, i, e));
            }
        }
    }
    fn rec(
        factors: &[(Block, usize, u8)],
        cur: &mut Monomial,
        mult: u128,
        emit: &mut impl FnMut(Monomial, u128),
    ) {
        let Some(&(block, i, e)) = factors.first() else {
            emit(*cur, mult);
            return;
        };
        let partner = if block == Block::X { Block::Z } else { Block::T };
        for k in 0..=e {
            cur.set(block, i, k);
            cur.set(partner, i, e - k);
            rec(&factors[1..], cur, mult * binomial(e as u32, k as u32), emit);
        }
        cur.set(block, i, 0);
        cur.set(partner, i, 0);
    }
    let mut cur = Monomial::one();
    rec(&factors, &mut cur, 1, &mut emit);
}

/// Exact sparse polynomial over the rationals in rank `n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    rank: usize,
    terms: BTreeMap<Monomial, Rational>,
}

fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 || rank > MAX_RANK {
        Err(Error::RankOutOfRange(rank))
    } else {
        Ok(())
    }
}

impl Polynomial {
    pub fn zero(rank: usize) -> Self {
        check_rank(rank).expect("rank within 1..=MAX_RANK");
        Polynomial { rank, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize) -> Self {
        Self::constant(rank, Rational::one())
    }

    pub fn constant(rank: usize, c: Rational) -> Self {
        Self::monomial(rank, Monomial::one(), c)
    }

    pub fn monomial(rank: usize, m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(rank);
        assert!(m.max_index() <= rank, "monomial index exceeds rank");
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn var(rank: usize, v: VarId) -> Result<Self> {
        check_rank(rank)?;
        if v.index > rank {
            return Err(Error::IndexOutOfRange { index: v.index, rank });
        }
        Ok(Self::monomial(rank, Monomial::var(v), Rational::one()))
    }

    /// Builds a polynomial from arbitrary (possibly repeated or zero) terms.
    pub fn from_terms(rank: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Result<Self> {
        check_rank(rank)?;
        let mut p = Polynomial { rank, terms: BTreeMap::new() };
        for (m, c) in terms {
            if m.max_index() > rank {
                return Err(Error::IndexOutOfRange { index: m.max_index(), rank });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Same polynomial viewed in a different rank; fails if a variable would fall outside.
    pub fn with_rank(&self, rank: usize) -> Result<Self> {
        check_rank(rank)?;
        let max = self.terms.keys().map(|m| m.max_index()).max().unwrap_or(0);
        if max > rank {
            return Err(Error::IndexOutOfRange { index: max, rank });
        }
        Ok(Polynomial { rank, terms: self.terms.clone() })
    }

    fn same_rank(&self, other: &Self) -> Result<()> {
        if self.rank != other.rank {
            Err(Error::RankMismatch(self.rank, other.rank))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_rank(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_rank(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_rank(other)?;
        let mut acc: std::collections::HashMap<Monomial, Rational> = std::collections::HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        Ok(Polynomial {
            rank: self.rank,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.rank);
        }
        Polynomial {
            rank: self.rank,
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.rank);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Maximum total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// `Some(d)` when every term has total degree `d` (zero counts as homogeneous of any degree: `None`).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.degree());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_xy_only(&self) -> bool {
        self.terms.keys().all(|m| m.is_xy_only())
    }

    pub fn is_zt_free(&self) -> bool {
        self.is_xy_only()
    }

    /// Drops every term that contains a variable selected by `kill`
    /// (substituting zero for those variables).
    pub fn substitute_zero(&self, kill: impl Fn(VarId) -> bool) -> Self {
        Polynomial {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.vars().all(|(v, _)| !kill(v)))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Applies `f` to every monomial, which must return a signed monomial.
    pub(crate) fn map_monomials(&self, mut f: impl FnMut(&Monomial) -> (Monomial, bool)) -> Self {
        let mut out = Self::zero(self.rank);
        for (m, c) in &self.terms {
            let (m2, negate) = f(m);
            out.add_term(m2, if negate { -c.clone() } else { c.clone() });
        }
        out
    }

    /// Partial derivative with respect to `v`.
    pub fn derivative(&self, v: VarId) -> Self {
        let mut out = Self::zero(self.rank);
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.divide_var(v) {
                out.add_term(rest, c * Rational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// The standard symplectic bracket `{P, Q} = ∇ₓP·∇_yQ − ∇_yP·∇ₓQ`.
    /// Only x/y are differentiated; z/t behave as constants.
    pub fn poisson_bracket(&self, other: &Self) -> Result<Self> {
        self.same_rank(other)?;
        let mut acc: std::collections::HashMap<Monomial, Rational> = std::collections::HashMap::new();
        for i in 1..=self.rank {
            let (xi, yi) = (VarId::x(i), VarId::y(i));
            for (ma, ca) in &self.terms {
                let da_x = ma.divide_var(xi);
                let da_y = ma.divide_var(yi);
                if da_x.is_none() && da_y.is_none() {
                    continue;
                }
                for (mb, cb) in &other.terms {
                    if let (Some((ea, ra)), Some((eb, rb))) = (da_x, mb.divide_var(yi)) {
                        let c = ca * cb * Rational::from_integer(BigInt::from(ea * eb));
                        *acc.entry(ra.mul(&rb)).or_insert_with(Rational::zero) += c;
                    }
                    if let (Some((ea, ra)), Some((eb, rb))) = (da_y, mb.divide_var(xi)) {
                        let c = ca * cb * Rational::from_integer(BigInt::from(ea * eb));
                        *acc.entry(ra.mul(&rb)).or_insert_with(Rational::zero) -= c;
                    }
                }
            }
        }
        Ok(Polynomial {
            rank: self.rank,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    /// `P(x + z, y + t)`, expanded.
    pub fn shift_substitute(&self) -> Result<Self> {
        if !self.is_xy_only() {
            return Err(Error::NotXyPolynomial);
        }
        let mut acc: std::collections::HashMap<Monomial, Rational> = std::collections::HashMap::new();
        for (m, c) in &self.terms {
            for_each_shift_term(m, |mm, mult| {
                *acc.entry(mm).or_insert_with(Rational::zero) += c * Rational::from_integer(BigInt::from(mult));
            });
        }
        Ok(Polynomial {
            rank: self.rank,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    /// Coefficient (a polynomial in x/y) of the exact z/t monomial `m` when
    /// `self` is read as a polynomial in z, t over ℚ[x, y].
    pub fn coefficient_of(&self, m: &Monomial) -> Result<Self> {
        if !m.is_zt_only() {
            return Err(Error::NotZtMonomial);
        }
        let mut out = Self::zero(self.rank);
        for (mono, c) in &self.terms {
            let (xy, zt) = mono.split_xy_zt();
            if zt == *m {
                out.add_term(xy, c.clone());
            }
        }
        Ok(out)
    }

    /// Parses the text grammar `c * v1^e1 * ... ± ...` with variables
    /// `x1..xn, y1..yn, z1..zn, t1..tn` and integer or `p/q` coefficients.
    pub fn parse(text: &str, rank: usize) -> Result<Self> {
        check_rank(rank)?;
        Parser::new(text, rank).polynomial()
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[n={}]({self})", self.rank)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a} * {m}")?;
            }
        }
        Ok(())
    }
}

fn binop(a: &Polynomial, b: &Polynomial, op: fn(&Polynomial, &Polynomial) -> Result<Polynomial>) -> Polynomial {
    op(a, b).unwrap_or_else(|e| panic!("{e}"))
}

/// Operator impls panic on rank mismatch; use the `try_*` methods to get a `Result`.
impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        binop(self, rhs, Polynomial::try_add)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        binop(self, rhs, Polynomial::try_sub)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        binop(self, rhs, Polynomial::try_mul)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Parses `p/q` or an integer into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    rank: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, rank: usize) -> Self {
        Parser { src: text.as_bytes(), pos: 0, rank }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn polynomial(&mut self) -> Result<Polynomial> {
        let mut out = Polynomial::zero(self.rank);
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None if first => return self.err("empty polynomial"),
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    Rational::one()
                }
                Some(b'-') => {
                    self.pos += 1;
                    -Rational::one()
                }
                Some(_) if first => Rational::one(),
                Some(c) => return self.err(format!("expected '+' or '-', found {:?}", c as char)),
            };
            first = false;
            let (m, c) = self.term()?;
            out.add_term(m, sign * c);
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Monomial, Rational)> {
        let mut coeff = Rational::one();
        let mut mono = Monomial::one();
        let mut need_factor = true;
        while need_factor {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let num = self.digits().unwrap();
                    let mut value = Rational::from_integer(num.parse::<BigInt>().unwrap());
                    if self.peek() == Some(b'/') {
                        self.pos += 1;
                        let Some(den) = self.digits() else {
                            return self.err("expected denominator");
                        };
                        let den: BigInt = den.parse().unwrap();
                        if den.is_zero() {
                            return self.err("zero denominator");
                        }
                        value /= Rational::from_integer(den);
                    }
                    coeff *= value;
                }
                Some(c) if Block::from_letter(c as char).is_some() => {
                    let block = Block::from_letter(c as char).unwrap();
                    self.pos += 1;
                    if !self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
                        return self.err("expected variable index");
                    }
                    let index: usize = self.digits().unwrap().parse().map_err(|_| Error::Parse {
                        pos: self.pos,
                        msg: "bad index".into(),
                    })?;
                    if index == 0 || index > self.rank {
                        return Err(Error::IndexOutOfRange { index, rank: self.rank });
                    }
                    let mut e = 1u32;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        let Some(d) = self.digits() else {
                            return self.err("expected exponent");
                        };
                        e = d.parse().map_err(|_| Error::Parse { pos: self.pos, msg: "bad exponent".into() })?;
                    }
                    let v = VarId { block, index };
                    let cur = mono.exponent(v);
                    if cur + e > u8::MAX as u32 {
                        return self.err("exponent too large");
                    }
                    mono = mono.with_exponent(v, cur + e);
                }
                Some(c) => return self.err(format!("unexpected {:?}", c as char)),
                None => return self.err("unexpected end of input"),
            }
            need_factor = self.peek() == Some(b'*');
            if need_factor {
                self.pos += 1;
            }
        }
        Ok((mono, coeff))
    }
}
