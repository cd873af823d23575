#![allow(dead_code)]

pub mod checks;

use hp0_core::{Monomial, Polynomial, Rational, VarId, WeylGroup};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn qq(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn poly(s: &str, n: usize) -> Polynomial {
    Polynomial::parse(s, n).unwrap()
}

/// `x_i y_j − y_i x_j`, written out by hand.
pub fn pf(i: usize, j: usize, n: usize) -> Polynomial {
    poly(&format!("x{i}*y{j} - y{i}*x{j}"), n)
}

fn xy_monomial(a: &[u32], b: &[u32]) -> Monomial {
    let mut pairs = Vec::new();
    for (i, (&ea, &eb)) in a.iter().zip(b).enumerate() {
        pairs.push((VarId::x(i + 1), ea));
        pairs.push((VarId::y(i + 1), eb));
    }
    Monomial::from_pairs(&pairs)
}

/// Every x/y monomial of total degree `d` in rank `n`.
pub fn xy_monomials(n: usize, d: u32) -> Vec<Monomial> {
    fn rec(slots: usize, rest: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in 0..=rest {
            cur.push(e);
            rec(slots - 1, rest - e, cur, out);
            cur.pop();
        }
    }
    let mut vecs = Vec::new();
    rec(2 * n, d, &mut Vec::new(), &mut vecs);
    vecs.iter().map(|v| xy_monomial(&v[..n], &v[n..])).collect()
}

/// A nonzero invariant of `w` in even degree `d`, from a few random monomials.
pub fn random_invariant(rng: &mut StdRng, w: &WeylGroup, d: u32) -> Polynomial {
    let n = w.rank();
    loop {
        let mut acc = Polynomial::zero(n);
        for _ in 0..rng.gen_range(1..=3) {
            let mut e = vec![0u32; 2 * n];
            for _ in 0..d {
                e[rng.gen_range(0..2 * n)] += 1;
            }
            let c = q(rng.gen_range(1..=4) * if rng.gen_bool(0.5) { 1 } else { -1 });
            acc = &acc + &Polynomial::monomial(n, xy_monomial(&e[..n], &e[n..]), c);
        }
        let r = w.reynolds(&acc).unwrap();
        if !r.is_zero() {
            return r;
        }
    }
}

/// Random x/y polynomials of rank `n`: up to `terms` monomials with small exponents.
pub fn arb_xy_poly(n: usize, terms: usize, max_exp: u32) -> impl Strategy<Value = Polynomial> {
    let mono = (prop::collection::vec(0..=max_exp, n), prop::collection::vec(0..=max_exp, n), -5i64..=5);
    prop::collection::vec(mono, 0..=terms).prop_map(move |ts| {
        let mut acc = Polynomial::zero(n);
        for (a, b, c) in ts {
            acc = &acc + &Polynomial::monomial(n, xy_monomial(&a, &b), q(c));
        }
        acc
    })
}

/// Random homogeneous x/y polynomials of degree `d`.
pub fn arb_homogeneous(n: usize, d: u32, terms: usize) -> impl Strategy<Value = Polynomial> {
    let mono = (prop::collection::vec(0..2 * n, d as usize), -5i64..=5);
    prop::collection::vec(mono, 1..=terms).prop_map(move |ts| {
        let mut acc = Polynomial::zero(n);
        for (slots, c) in ts {
            let mut e = vec![0u32; 2 * n];
            for s in slots {
                e[s] += 1;
            }
            acc = &acc + &Polynomial::monomial(n, xy_monomial(&e[..n], &e[n..]), q(c));
        }
        acc
    })
}
