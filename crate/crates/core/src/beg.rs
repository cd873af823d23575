//! The operator `E_n(P) = R_n((z·y − t·x) P(x + z, y + t))`, its restricted
//! forms, and the per-degree solver built on it.
//!
//! For an x/y polynomial `w`, write `F_w = (z·y − t·x)·w(x + z, y + t)`.
//! Averaging `w` over the diagonal action and then over the x/y action is the
//! same as averaging `F_w` over `W × W`, one copy acting on x/y and the other
//! on z/t, so `E_n(R_n(w)) = R_xy R_zt (F_w)`. Every orbit of that product
//! action has a canonical representative (pairs sorted in each block), and
//! the coefficient of that representative in `E_n(R_n(w))` is the sum of the
//! coefficients of `F_w` over the orbit divided by its size. The map
//! `w ↦ (representative ↦ coefficient)` is what [`beg_compressed`] computes;
//! it vanishes exactly when `E_n(R_n(w))` does.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kernel, rref, Indexer, SparseVec};
use crate::poly::{binomial, for_each_shift_term, Block, Monomial, Polynomial, Rational, VarId};
use crate::sl2::{format_combination, invariant_hw0_basis, Hw0Basis, PfaffianWord, Sl2Triple};
use crate::weyl::{canonical_pairs, for_each_orbit_member, WeylGroup};

/// `z·y − t·x = Σ z_i y_i − t_i x_i`.
pub fn bilinear_factor(rank: usize) -> Polynomial {
    let mut out = Polynomial::zero(rank);
    for i in 1..=rank {
        out.add_term(Monomial::from_pairs(&[(VarId::z(i), 1), (VarId::y(i), 1)]), Rational::one());
        out.add_term(Monomial::from_pairs(&[(VarId::t(i), 1), (VarId::x(i), 1)]), -Rational::one());
    }
    out
}

fn check(w: &WeylGroup, p: &Polynomial) -> Result<()> {
    if p.rank() != w.rank() {
        return Err(Error::RankMismatch(p.rank(), w.rank()));
    }
    if !p.is_xy_only() {
        return Err(Error::NotXyPolynomial);
    }
    Ok(())
}

/// `E_n(p)` straight from the definition, with the Reynolds operator acting on
/// x/y only.
pub fn beg_apply(w: &WeylGroup, p: &Polynomial) -> Result<Polynomial> {
    check(w, p)?;
    let f = bilinear_factor(w.rank()).try_mul(&p.shift_substitute()?)?;
    w.reynolds(&f)
}

/// `E_n(p)` with `x = 0` and `t_2 = … = t_n = 0`.
pub fn beg_int(w: &WeylGroup, p: &Polynomial) -> Result<Polynomial> {
    let e = beg_apply(w, p)?;
    Ok(e.substitute_zero(|v| v.block == Block::X || (v.block == Block::T && v.index > 1)))
}

/// `E_n(p)` with `x = 0`, `y_2 = … = y_n = 0`, `t_2 = … = t_n = 0`, by
/// substituting into the full operator.
pub fn beg_prime_direct(w: &WeylGroup, p: &Polynomial) -> Result<Polynomial> {
    let e = beg_apply(w, p)?;
    Ok(e.substitute_zero(|v| match v.block {
        Block::X => true,
        Block::Y | Block::T => v.index > 1,
        Block::Z => false,
    }))
}

/// The restricted operator for an invariant `p`, without forming `E_n(p)`.
///
/// After the substitution only the group elements sending index `i` to `1`
/// with sign `s` matter, and they are equidistributed over `(i, s)`, so
/// `E'(p) = (1/n) Σ_i ½ Σ_s s·y_1·z_i·p(z; t_1 e_1 + s y_1 e_i)`. The same
/// formula holds for B and D.
pub fn beg_prime(w: &WeylGroup, p: &Polynomial) -> Result<Polynomial> {
    check(w, p)?;
    let n = w.rank();
    let inv_n = Rational::new(BigInt::one(), BigInt::from(n));
    let mut out = Polynomial::zero(n);
    for (m, c) in p.terms() {
        let b: Vec<u8> = (0..n).map(|i| m.get(Block::Y, i)).collect();
        let mut base = Monomial::one();
        for i in 0..n {
            base.set(Block::Z, i, m.get(Block::X, i));
        }
        let c = c * &inv_n;
        let support: Vec<usize> = (1..n).filter(|&i| b[i] > 0).collect();
        match support.as_slice() {
            [] => {
                // i = 1: (t_1 + s y_1)^{b_1}, keep odd powers of s
                let b1 = b[0] as u32;
                for k in (1..=b1).step_by(2) {
                    let mut mono = base;
                    mono.set(Block::Z, 0, base.get(Block::Z, 0) + 1);
                    mono.set(Block::Y, 0, (k + 1) as u8);
                    mono.set(Block::T, 0, (b1 - k) as u8);
                    out.add_term(mono, &c * Rational::from_integer(BigInt::from(binomial(b1, k))));
                }
            }
            &[i] if b[i] % 2 == 1 => {
                let mut mono = base;
                mono.set(Block::Z, i, base.get(Block::Z, i) + 1);
                mono.set(Block::Y, 0, b[i] + 1);
                mono.set(Block::T, 0, b[0]);
                out.add_term(mono, c.clone());
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Coefficients of `z_1 t_1`, `t_1²` and `z_1²` in `E_n(p)`.
pub fn sl2_coefficients(w: &WeylGroup, p: &Polynomial) -> Result<(Polynomial, Polynomial, Polynomial)> {
    let e = beg_apply(w, p)?;
    let z1t1 = Monomial::from_pairs(&[(VarId::z(1), 1), (VarId::t(1), 1)]);
    let t1sq = Monomial::from_pairs(&[(VarId::t(1), 2)]);
    let z1sq = Monomial::from_pairs(&[(VarId::z(1), 2)]);
    Ok((e.coefficient_of(&z1t1)?, e.coefficient_of(&t1sq)?, e.coefficient_of(&z1sq)?))
}

/// The three bracket polynomials `{H,p}, {E,p}, {F,p}` scaled by `1/n`; the
/// signs relating them to [`sl2_coefficients`] are fixed in the tests.
pub fn sl2_brackets(p: &Polynomial) -> Result<(Polynomial, Polynomial, Polynomial)> {
    let t = Sl2Triple::new(p.rank())?;
    let inv_n = Rational::new(BigInt::one(), BigInt::from(p.rank()));
    Ok((
        t.h.poisson_bracket(p)?.scale(&inv_n),
        t.e.poisson_bracket(p)?.scale(&inv_n),
        t.f.poisson_bracket(p)?.scale(&inv_n),
    ))
}

/// Compressed form of `E_n(R_n(w))`: canonical `(x/y, z/t)` representative
/// (as one monomial) mapped to its coefficient.
pub type Compressed = BTreeMap<Monomial, Rational>;

/// Computes [`Compressed`] for `E_n(R_n(w))`, where `w` is any x/y polynomial.
pub fn beg_compressed(w: &WeylGroup, poly: &Polynomial) -> Result<Compressed> {
    check(w, poly)?;
    let n = w.rank();
    // scale to integer coefficients
    let mut denom = BigInt::one();
    for (_, c) in poly.terms() {
        denom = denom.lcm(c.denom());
    }
    let mut terms = Vec::with_capacity(poly.len());
    for (m, c) in poly.terms() {
        let v = (c * Rational::from_integer(denom.clone())).to_integer();
        terms.push((*m, v.to_i128().ok_or(Error::Overflow)?));
    }

    let mut acc: HashMap<Monomial, (i128, u64)> = HashMap::new();
    let mut failed = false;
    for (m, c) in terms {
        let pm = m.xy_parity_mask();
        // px ^ pz = pm, and both masks must survive after flipping one common bit
        if w.kills_parity(pm) {
            continue;
        }
        for_each_shift_term(&m, |mm, mult| {
            if failed {
                return;
            }
            let px = mm.xy_parity_mask();
            let pz = mm.zt_parity_mask();
            let Some(base) = i128::try_from(mult).ok().and_then(|mult| mult.checked_mul(c)) else {
                failed = true;
                return;
            };
            for i in 0..n {
                let bit = 1u32 << i;
                if w.kills_parity(px ^ bit) || w.kills_parity(pz ^ bit) {
                    continue;
                }
                for (a, b, sign) in [(Block::Z, Block::Y, 1i128), (Block::T, Block::X, -1)] {
                    let mut prod = mm;
                    prod.set(a, i, mm.get(a, i) + 1);
                    prod.set(b, i, mm.get(b, i) + 1);
                    let (kx, sx) = canonical_pairs(&prod, Block::X, Block::Y, n);
                    let (key, sz) = canonical_pairs(&kx, Block::Z, Block::T, n);
                    let e = acc.entry(key).or_insert((0, sx * sz));
                    match e.0.checked_add(sign * base) {
                        Some(v) => e.0 = v,
                        None => failed = true,
                    }
                }
            }
        });
        if failed {
            return Err(Error::Overflow);
        }
    }
    let mut out = Compressed::new();
    for (key, (sum, size)) in acc {
        if sum == 0 {
            continue;
        }
        out.insert(key, Rational::new(BigInt::from(sum), BigInt::from(size) * &denom));
    }
    Ok(out)
}

/// Rebuilds `E_n(R_n(w))` from its compressed form.
pub fn expand_compressed(w: &WeylGroup, c: &Compressed) -> Polynomial {
    let n = w.rank();
    let mut out = Polynomial::zero(n);
    for (key, coeff) in c {
        let (xy, zt) = key.split_xy_zt();
        let mut zs = Vec::new();
        for_each_orbit_member(&zt, Block::Z, Block::T, n, |m| zs.push(*m));
        for_each_orbit_member(&xy, Block::X, Block::Y, n, |mx| {
            for mz in &zs {
                out.add_term(mx.mul(mz), coeff.clone());
            }
        });
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Discard candidates with the cheap restricted equation before the full check.
    pub prefilter: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { prefilter: true }
    }
}

/// Solutions of the equation among the invariant hw-0 candidates of one degree.
#[derive(Debug, Clone)]
pub struct DegreeSolution {
    pub group: WeylGroup,
    pub degree: usize,
    pub candidates: Hw0Basis,
    /// Reduced row-echelon coordinates over `candidates.words`.
    pub solutions: Vec<Vec<Rational>>,
}

impl DegreeSolution {
    pub fn dimension(&self) -> usize {
        self.solutions.len()
    }

    /// Solutions as invariant polynomials.
    pub fn polynomials(&self) -> Vec<Polynomial> {
        self.solutions
            .iter()
            .map(|v| {
                let mut acc = Polynomial::zero(self.group.rank());
                for (c, p) in v.iter().zip(&self.candidates.vectors) {
                    if !c.is_zero() {
                        acc = &acc + &p.scale(c);
                    }
                }
                acc
            })
            .collect()
    }

    /// Solutions as `(coefficient, word)` lists; each word stands for its Reynolds image.
    pub fn combinations(&self) -> Vec<Vec<(Rational, PfaffianWord)>> {
        self.solutions
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&self.candidates.words)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, w)| (c.clone(), w.clone()))
                    .collect()
            })
            .collect()
    }

    pub fn strings(&self) -> Vec<String> {
        self.combinations()
            .iter()
            .map(|terms| {
                let refs: Vec<_> = terms.iter().map(|(c, w)| (c.clone(), w)).collect();
                format_combination(&refs)
            })
            .collect()
    }
}

fn to_sparse(map: &BTreeMap<Monomial, Rational>, idx: &mut Indexer<Monomial>) -> SparseVec {
    map.iter().map(|(m, c)| (idx.index(*m), c.clone())).collect()
}

fn poly_map(p: &Polynomial) -> BTreeMap<Monomial, Rational> {
    p.terms().map(|(m, c)| (*m, c.clone())).collect()
}

pub fn solve_degree(w: &WeylGroup, d: usize) -> Result<DegreeSolution> {
    solve_degree_with(w, d, SolveOptions::default())
}

pub fn solve_degree_with(w: &WeylGroup, d: usize, opts: SolveOptions) -> Result<DegreeSolution> {
    let basis = invariant_hw0_basis(w, d)?;
    solve_over(w, basis, opts)
}

/// Solves over an explicit list of candidate words (their Reynolds images must
/// be independent).
pub fn solve_over(w: &WeylGroup, basis: Hw0Basis, opts: SolveOptions) -> Result<DegreeSolution> {
    let k = basis.len();
    let d = basis.degree;
    let identity = || -> Vec<Vec<Rational>> {
        (0..k)
            .map(|j| (0..k).map(|i| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect()
    };
    let stage1 = if opts.prefilter && k > 0 {
        let primes: Vec<BTreeMap<Monomial, Rational>> = basis
            .vectors
            .par_iter()
            .map(|v| beg_prime(w, v).map(|p| poly_map(&p)))
            .collect::<Result<_>>()?;
        let mut idx = Indexer::default();
        let cols: Vec<SparseVec> = primes.iter().map(|m| to_sparse(m, &mut idx)).collect();
        kernel(&cols)
    } else {
        identity()
    };
    if stage1.is_empty() {
        return Ok(DegreeSolution { group: *w, degree: d, candidates: basis, solutions: Vec::new() });
    }
    let needed: Vec<usize> = (0..k).filter(|&j| stage1.iter().any(|v| !v[j].is_zero())).collect();
    let words: Vec<Polynomial> = needed.iter().map(|&j| basis.words[j].expand()).collect();
    let compressed: Vec<Compressed> =
        words.par_iter().map(|p| beg_compressed(w, p)).collect::<Result<_>>()?;
    let mut by_column: HashMap<usize, &Compressed> = HashMap::new();
    for (j, c) in needed.iter().zip(&compressed) {
        by_column.insert(*j, c);
    }
    let mut idx = Indexer::default();
    let cols: Vec<SparseVec> = stage1
        .iter()
        .map(|v| {
            let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
            for (j, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (m, x) in by_column[&j] {
                    let e = acc.entry(*m).or_insert_with(Rational::zero);
                    *e += c * x;
                }
            }
            acc.retain(|_, x| !x.is_zero());
            to_sparse(&acc, &mut idx)
        })
        .collect();
    let mu = kernel(&cols);
    let solutions: Vec<Vec<Rational>> = mu
        .iter()
        .map(|coeffs| {
            let mut v = vec![Rational::zero(); k];
            for (c, base) in coeffs.iter().zip(&stage1) {
                if c.is_zero() {
                    continue;
                }
                for (x, b) in v.iter_mut().zip(base) {
                    *x += c * b;
                }
            }
            v
        })
        .collect();
    Ok(DegreeSolution { group: *w, degree: d, candidates: basis, solutions: rref(solutions) })
}

/// One degree of a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub degree: usize,
    pub candidates: usize,
    pub solutions: usize,
    pub basis: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub group: WeylGroup,
    pub max_degree: usize,
    pub degrees_searched: Vec<usize>,
    pub degrees: Vec<DegreeReport>,
    pub solution_degrees: Vec<usize>,
    pub hp0: usize,
    pub hh0: u64,
    pub elapsed_ms: u64,
}

/// One degree beyond the conjectured top degree `4(n − 1)`.
pub fn default_max_degree(rank: usize) -> usize {
    4 * (rank - 1) + 4
}

pub fn hp0_report(w: &WeylGroup, max_degree: usize) -> Result<SolutionReport> {
    hp0_report_with(w, max_degree, SolveOptions::default())
}

/// Solves every even degree up to `max_degree` and collects the dimensions.
/// Each solution is re-checked to be annihilated by the sl₂ triple.
pub fn hp0_report_with(w: &WeylGroup, max_degree: usize, opts: SolveOptions) -> Result<SolutionReport> {
    if max_degree % 2 == 1 {
        return Err(Error::OddDegree(max_degree));
    }
    let start = Instant::now();
    let triple = Sl2Triple::new(w.rank())?;
    let mut degrees = Vec::new();
    for d in (0..=max_degree).step_by(2) {
        let sol = solve_degree_with(w, d, opts)?;
        for p in sol.polynomials() {
            if !triple.is_hw0(&p)? {
                return Err(Error::Inconsistent(format!("degree {d} solution is not annihilated by sl2")));
            }
        }
        degrees.push(DegreeReport {
            degree: d,
            candidates: sol.candidates.len(),
            solutions: sol.dimension(),
            basis: sol.strings(),
        });
    }
    let solution_degrees = degrees.iter().filter(|r| r.solutions > 0).map(|r| r.degree).collect();
    Ok(SolutionReport {
        group: *w,
        max_degree,
        degrees_searched: (0..=max_degree).step_by(2).collect(),
        hp0: degrees.iter().map(|r| r.solutions).sum(),
        degrees,
        solution_degrees,
        hh0: w.hh0_dimension(),
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}
