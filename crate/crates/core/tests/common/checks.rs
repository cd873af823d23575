//! Checks shared by the acceptance runner and the oracle tests. Each returns
//! a short detail string on success and a description of the mismatch otherwise.

use std::collections::{BTreeMap, HashMap};

use hp0_core::beg::{beg_apply, beg_compressed, beg_prime_direct, sl2_brackets, sl2_coefficients};
use hp0_core::linalg::{rank, Indexer, SparseVec};
use hp0_core::sl2::{hw0_basis, hw0_dim_formula, invariant_hw0_basis, words_of_degree, Sl2Triple};
use hp0_core::{Monomial, Polynomial, Rational, VarId, WeylGroup};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::*;

pub type Check = Result<String, String>;

pub fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

const P61: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P61 as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn to_mod(c: &Rational) -> u64 {
    let p = num_bigint::BigInt::from(P61);
    let r = |x: &num_bigint::BigInt| -> u64 {
        let m = ((x % &p) + &p) % &p;
        m.try_into().unwrap()
    };
    mulmod(r(c.numer()), powmod(r(c.denom()), P61 - 2))
}

/// Rank modulo 2^61 − 1 of sparse integer columns; a lower bound for the
/// rational rank, equal to it outside a negligible set of primes.
fn rank_mod_p(cols: Vec<BTreeMap<usize, u64>>) -> usize {
    let mut pivots: HashMap<usize, BTreeMap<usize, u64>> = HashMap::new();
    for mut v in cols {
        while let Some(c) = v.keys().copied().find(|c| pivots.contains_key(c)) {
            let f = v[&c];
            for (k, pv) in &pivots[&c] {
                let e = v.entry(*k).or_insert(0);
                *e = (*e + P61 - mulmod(f, *pv)) % P61;
                if *e == 0 {
                    v.remove(k);
                }
            }
        }
        if let Some((&c, &lead)) = v.iter().next() {
            let inv = powmod(lead, P61 - 2);
            for x in v.values_mut() {
                *x = mulmod(*x, inv);
            }
            pivots.insert(c, v);
        }
    }
    pivots.len()
}

/// Dimension of `{p ∈ S(d) : {E,p} = {F,p} = {H,p} = 0}` by linear algebra on all of `S(d)`.
pub fn brute_force_hw0_dim(n: usize, d: u32) -> usize {
    let t = Sl2Triple::new(n).unwrap();
    let monos = xy_monomials(n, d);
    let mut idx: HashMap<(usize, Monomial), usize> = HashMap::new();
    let cols: Vec<BTreeMap<usize, u64>> = monos
        .iter()
        .map(|m| {
            let p = Polynomial::monomial(n, *m, q(1));
            let mut col = BTreeMap::new();
            for (k, g) in [&t.e, &t.f, &t.h].into_iter().enumerate() {
                for (mono, c) in g.poisson_bracket(&p).unwrap().terms() {
                    let next = idx.len();
                    let i = *idx.entry((k, *mono)).or_insert(next);
                    col.insert(i, to_mod(c));
                }
            }
            col
        })
        .collect();
    monos.len() - rank_mod_p(cols)
}

pub fn sparse(polys: &[Polynomial]) -> Vec<SparseVec> {
    let mut idx = Indexer::default();
    polys.iter().map(|p| p.terms().map(|(m, c)| (idx.index(*m), c.clone())).collect()).collect()
}

pub fn poincare(max_rank: usize, max_degree: usize) -> Check {
    let mut checked = 0;
    for n in 2..=max_rank {
        for d in 0..=max_degree {
            let brute = brute_force_hw0_dim(n, d as u32);
            let formula = hw0_dim_formula(n, d) as usize;
            let basis = hw0_basis(n, d).map_err(|e| e.to_string())?;
            ensure(brute == formula && basis.len() == formula, || {
                format!("n={n} d={d}: brute force {brute}, formula {formula}, basis {}", basis.len())
            })?;
            let t = Sl2Triple::new(n).unwrap();
            for v in &basis.vectors {
                ensure(t.is_hw0(v).unwrap(), || format!("n={n} d={d}: basis vector not hw-0"))?;
            }
            ensure(rank(&sparse(&basis.vectors)) == formula, || format!("n={n} d={d}: basis dependent"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (n, d) pairs"))
}

pub fn pfaffian_relation() -> Check {
    let rel = &(&(&pf(1, 2, 4) * &pf(3, 4, 4)) - &(&pf(1, 3, 4) * &pf(2, 4, 4))) + &(&pf(2, 3, 4) * &pf(1, 4, 4));
    ensure(rel.is_zero(), || format!("relation expands to {rel}"))?;
    let b = hw0_basis(4, 4).map_err(|e| e.to_string())?;
    ensure(b.len() == 20, || format!("|hw0_basis(4,4)| = {}", b.len()))?;
    Ok("relation = 0, |hw0_basis(4,4)| = 20".into())
}

/// Sign `s` with `a = s·b`, if one exists and `b ≠ 0`.
fn sign_between(a: &Polynomial, b: &Polynomial) -> Option<i8> {
    if b.is_zero() {
        return None;
    }
    if a == b {
        Some(1)
    } else if (a + b).is_zero() {
        Some(-1)
    } else {
        Some(0)
    }
}

/// Fixes the sign of each of the three coefficients at rank 2 and checks 20
/// random invariants at ranks 2 and 3 against it.
pub fn sl2_coefficient_signs(seed: u64) -> Result<[i8; 3], String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let group = |rng: &mut StdRng, n: usize| {
        if rng.gen_bool(0.5) {
            WeylGroup::b(n).unwrap()
        } else {
            WeylGroup::d(n).unwrap()
        }
    };
    let split = |w: &WeylGroup, p: &Polynomial| -> Result<([Polynomial; 3], [Polynomial; 3]), String> {
        let (a, b, c) = sl2_coefficients(w, p).map_err(|e| e.to_string())?;
        let (h, e, f) = sl2_brackets(p).map_err(|e| e.to_string())?;
        Ok(([a, b, c], [h, e, f]))
    };
    let mut pattern = [0i8; 3];
    let mut tries = 0;
    while pattern.contains(&0) {
        tries += 1;
        ensure(tries < 50, || "could not fix the sign pattern at n = 2".into())?;
        let w = group(&mut rng, 2);
        let d = 2 * rng.gen_range(1..=3);
        let p = random_invariant(&mut rng, &w, d);
        let (coef, br) = split(&w, &p)?;
        for k in 0..3 {
            match sign_between(&coef[k], &br[k]) {
                Some(0) => return Err(format!("component {k} is not ±bracket at n = 2 for {p}")),
                Some(s) if pattern[k] == 0 => pattern[k] = s,
                Some(s) if s != pattern[k] => return Err(format!("component {k} changes sign at n = 2")),
                _ => {}
            }
        }
    }
    for k in 0..20 {
        let n = if k < 10 { 2 } else { 3 };
        let w = group(&mut rng, n);
        let d = 2 * rng.gen_range(1..=3);
        let p = random_invariant(&mut rng, &w, d);
        let (coef, br) = split(&w, &p)?;
        for j in 0..3 {
            let expected = if pattern[j] > 0 { br[j].clone() } else { -&br[j] };
            ensure(coef[j] == expected, || format!("sample {k} ({w}, degree {d}) component {j} differs"))?;
        }
    }
    Ok(pattern)
}

pub fn pattern_string(p: [i8; 3]) -> String {
    let s = |x: i8| if x > 0 { '+' } else { '-' };
    format!("z1t1 {}{{H,P}}/n, t1^2 {}{{E,P}}/n, z1^2 {}{{F,P}}/n", s(p[0]), s(p[1]), s(p[2]))
}

fn m(pairs: &[(VarId, u32)]) -> Monomial {
    Monomial::from_pairs(pairs)
}

fn restricted_coefficient(p: &Polynomial, mono: &Monomial) -> Result<Rational, String> {
    let b3 = WeylGroup::b(3).unwrap();
    let r = b3.reynolds(p).map_err(|e| e.to_string())?;
    Ok(beg_prime_direct(&b3, &r).map_err(|e| e.to_string())?.coefficient(mono))
}

/// Coefficients of the distinguished monomials in the restricted operator at rank 3.
pub fn witness_coefficients() -> Check {
    let (x, y) = (pf(1, 2, 3), pf(2, 3, 3));
    let mut seen = Vec::new();
    for j in [2u32, 3] {
        let mj = m(&[(VarId::z(1), 1), (VarId::t(1), 1), (VarId::y(1), 2 * j), (VarId::z(3), 2 * j)]);
        let c = restricted_coefficient(&x.pow(2 * j), &mj)?;
        ensure(c == qq(2 * j as i64, 9), || format!("case 1, j={j}: got {c}"))?;
        seen.push(format!("j={j}:{c}"));
    }
    for (j, l) in [(2u32, 1u32), (2, 2), (3, 1)] {
        let mjl = m(&[
            (VarId::z(1), 1),
            (VarId::t(1), 1),
            (VarId::y(1), 2 * j + 2 * l),
            (VarId::z(3), 2 * j),
            (VarId::z(2), 2 * l),
        ]);
        let expected = if j == l {
            qq(4 * j as i64, 9)
        } else if l == 1 {
            qq(j as i64, 9)
        } else {
            qq((j + l) as i64, 9)
        };
        let c = restricted_coefficient(&(&x.pow(2 * j) * &y.pow(2 * l)), &mjl)?;
        ensure(c == expected, || format!("case 2, (j,l)=({j},{l}): got {c}, expected {expected}"))?;
        seen.push(format!("({j},{l}):{c}"));
    }
    Ok(seen.join(" "))
}

fn span_equal(a: &[Polynomial], b: &[Polynomial]) -> bool {
    let all: Vec<Polynomial> = a.iter().chain(b).cloned().collect();
    let r = rank(&sparse(&all));
    r == rank(&sparse(a)) && r == rank(&sparse(b))
}

/// Invariant hw-0 space of degree `d` spanned by Reynolds images of the
/// plain hw-0 basis, with no orbit reduction.
fn invariant_space_oracle(w: &WeylGroup, d: usize) -> Vec<Polynomial> {
    let basis = hw0_basis(w.rank(), d).unwrap();
    basis.vectors.iter().map(|v| w.reynolds(v).unwrap()).filter(|p| !p.is_zero()).collect()
}

pub fn same_spaces_b3_d3() -> Check {
    let (b3, d3) = (WeylGroup::b(3).unwrap(), WeylGroup::d(3).unwrap());
    let mut dims = Vec::new();
    for d in (0..=8).step_by(2) {
        let vb = invariant_hw0_basis(&b3, d).unwrap().vectors;
        let vd = invariant_hw0_basis(&d3, d).unwrap().vectors;
        let oracle = invariant_space_oracle(&b3, d);
        ensure(span_equal(&vb, &vd), || format!("degree {d}: B3 and D3 spaces differ"))?;
        ensure(span_equal(&vb, &oracle) && vb.len() == rank(&sparse(&oracle)), || {
            format!("degree {d}: orbit-reduced basis disagrees with the Reynolds image of S(d)")
        })?;
        for v in &vb {
            let (pb, pd) = (beg_prime_direct(&b3, v).unwrap(), beg_prime_direct(&d3, v).unwrap());
            ensure(pb == pd, || format!("degree {d}: restricted equations differ"))?;
        }
        dims.push(vb.len().to_string());
    }
    Ok(format!("dims {}", dims.join(",")))
}

pub fn rank4_degree6() -> Check {
    let (b4, d4) = (WeylGroup::b(4).unwrap(), WeylGroup::d(4).unwrap());
    let nb = invariant_hw0_basis(&b4, 6).unwrap().len();
    let nd = invariant_hw0_basis(&d4, 6).unwrap().len();
    let ob = rank(&sparse(&invariant_space_oracle(&b4, 6)));
    let od = rank(&sparse(&invariant_space_oracle(&d4, 6)));
    ensure((nb, nd, ob, od) == (0, 1, 0, 1), || format!("B4 {nb} (oracle {ob}), D4 {nd} (oracle {od})"))?;
    Ok("B4 0, D4 1".into())
}

/// D3 solutions that are B3-invariant solve for B3, and dimensions compare.
pub fn d_solutions_solve_b(max_degree: usize) -> Check {
    use hp0_core::beg::solve_degree;
    let (b3, d3) = (WeylGroup::b(3).unwrap(), WeylGroup::d(3).unwrap());
    let mut tested = 0;
    for d in (0..=max_degree).step_by(2) {
        let sd = solve_degree(&d3, d).unwrap();
        let sb = solve_degree(&b3, d).unwrap();
        ensure(sd.dimension() <= sb.dimension(), || format!("degree {d}: D3 {} > B3 {}", sd.dimension(), sb.dimension()))?;
        for p in sd.polynomials() {
            if b3.reynolds(&p).unwrap() == p {
                ensure(beg_apply(&b3, &p).unwrap().is_zero(), || format!("degree {d}: D3 solution fails for B3"))?;
                tested += 1;
            }
        }
    }
    Ok(format!("{tested} B-invariant D3 solutions"))
}

pub fn nonvanishing_persists() -> Check {
    let mut tested = 0;
    for n in 2..=3 {
        for half in 0..=4 {
            for word in words_of_degree(n, half) {
                let p = word.expand();
                for w in [WeylGroup::b(n).unwrap(), WeylGroup::d(n).unwrap()] {
                    if w.reynolds(&p).unwrap().is_zero() {
                        continue;
                    }
                    let up = w.with_rank(n + 1).unwrap();
                    let r = up.reynolds(&p.with_rank(n + 1).unwrap()).unwrap();
                    ensure(!r.is_zero(), || format!("{word} vanishes after passing from {w} to {up}"))?;
                    tested += 1;
                }
            }
        }
    }
    Ok(format!("{tested} words"))
}

pub fn solutions_persist() -> Check {
    let x2 = pf(1, 2, 2).pow(2);
    for n in 2..=4 {
        let w = WeylGroup::b(n).unwrap();
        let p = x2.with_rank(n).unwrap();
        ensure(!w.reynolds(&p).unwrap().is_zero(), || format!("R{n}(X^2) = 0"))?;
        ensure(beg_compressed(&w, &p).unwrap().is_empty(), || format!("R{n}(X^2) fails for B{n}"))?;
    }
    let b3 = WeylGroup::b(3).unwrap();
    ensure(beg_apply(&b3, &b3.reynolds(&x2.with_rank(3).unwrap()).unwrap()).unwrap().is_zero(), || {
        "R3(X^2) fails the direct check".into()
    })?;
    Ok("R_n(X^2) solves B_n for n = 2, 3, 4".into())
}

pub fn composition_rank4() -> Check {
    use hp0_core::graph::compose;
    let b4 = WeylGroup::b(4).unwrap();
    let p = compose(&pf(1, 2, 4).pow(2), &pf(3, 4, 4).pow(2), &b4).map_err(|e| e.to_string())?;
    ensure(!p.is_zero(), || "composition is zero".into())?;
    ensure(beg_apply(&b4, &p).unwrap().is_zero(), || "composition fails for B4".into())?;
    Ok("R4(X12^2 X34^2) solves B4".into())
}

/// `{R3(X^{2p}), R3(X^{2q})} = (8/3) p q R3(X^{2p−1} Y^{2q−1} Z)` with the pairs (1,2), (2,3), (3,1).
pub fn bracket_formula() -> Check {
    let b3 = WeylGroup::b(3).unwrap();
    let (x, y, z) = (pf(1, 2, 3), pf(2, 3, 3), pf(3, 1, 3));
    let r = |p: &Polynomial| b3.reynolds(p).unwrap();
    for (p, qv) in [(1u32, 1u32), (1, 2), (2, 2)] {
        let lhs = r(&x.pow(2 * p)).poisson_bracket(&r(&x.pow(2 * qv))).unwrap();
        let rhs = r(&(&(&x.pow(2 * p - 1) * &y.pow(2 * qv - 1)) * &z)).scale(&qq(8 * (p * qv) as i64, 3));
        ensure(lhs == rhs, || format!("(p,q)=({p},{qv}): lhs {lhs}, rhs {rhs}"))?;
    }
    let (p, qv, rr) = (1u32, 2u32, 1u32);
    let base = |a: u32, b: u32, c: u32| r(&(&(&x.pow(a) * &y.pow(b)) * &z.pow(c)));
    let lhs = &base(2 * p - 1, 2 * qv - 1, 1) * &r(&x.pow(2 * rr));
    let rhs = (&(&base(2 * p + 2 * rr - 1, 2 * qv - 1, 1) + &base(2 * p - 1, 2 * qv + 2 * rr - 1, 1))
        + &base(2 * p - 1, 2 * qv - 1, 2 * rr + 1))
        .scale(&qq(1, 3));
    ensure(lhs == rhs, || "product identity at (1,2,1) fails".into())?;
    Ok("(1,1) (1,2) (2,2) and product identity".into())
}

/// `{P, Q}` is antisymmetric, satisfies Jacobi and Leibniz on a few fixed invariants.
pub fn bracket_axioms(seed: u64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let w = WeylGroup::b(3).unwrap();
    for _ in 0..5 {
        let [a, b, c] = [0; 3].map(|_| {
            let d = 2 * rng.gen_range(1..=2);
            random_invariant(&mut rng, &w, d)
        });
        let br = |u: &Polynomial, v: &Polynomial| u.poisson_bracket(v).unwrap();
        ensure((&br(&a, &b) + &br(&b, &a)).is_zero(), || "antisymmetry".into())?;
        let jac = &(&br(&a, &br(&b, &c)) + &br(&b, &br(&c, &a))) + &br(&c, &br(&a, &b));
        ensure(jac.is_zero(), || "Jacobi".into())?;
        ensure(br(&a, &(&b * &c)) == &(&br(&a, &b) * &c) + &(&b * &br(&a, &c)), || "Leibniz".into())?;
        for p in [&a, &b, &c] {
            ensure(&w.reynolds(p).unwrap() == p, || "Reynolds not idempotent".into())?;
        }
        let raw = random_xy(&mut rng, 3, 4);
        let once = w.reynolds(&raw).unwrap();
        ensure(w.reynolds(&once).unwrap() == once, || "Reynolds not idempotent".into())?;
    }
    Ok("5 random triples".into())
}

fn random_xy(rng: &mut StdRng, n: usize, d: u32) -> Polynomial {
    let monos = xy_monomials(n, d);
    let mut acc = Polynomial::zero(n);
    for _ in 0..4 {
        acc = &acc + &Polynomial::monomial(n, monos[rng.gen_range(0..monos.len())], q(rng.gen_range(-3..=3)));
    }
    acc
}
