//! Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::checks::*;
use common::*;
use hp0_core::beg::{beg_apply, hp0_report, SolutionReport};
use hp0_core::graph::{catalog, simple_graph_search};
use hp0_core::weyl::{partition_count, even_part_partition_count};
use hp0_core::{Polynomial, WeylGroup};

const SMALL_LIMIT: Duration = Duration::from_secs(5);
const RANK3_LIMIT: Duration = Duration::from_secs(120);
const RANK4_LIMIT: Duration = Duration::from_secs(3600);
type Criterion = fn() -> Check;

const SIGN_SEED: u64 = 20;
const AXIOM_SEED: u64 = 7;

fn report(group: &str, max_degree: usize) -> Result<(SolutionReport, Duration), String> {
    let w: WeylGroup = group.parse().map_err(|e: hp0_core::Error| e.to_string())?;
    let start = Instant::now();
    let r = hp0_report(&w, max_degree).map_err(|e| e.to_string())?;
    Ok((r, start.elapsed()))
}

fn headline(group: &str, hp0: usize, degrees: &[usize], limit: Duration) -> Result<(SolutionReport, String), String> {
    let (r, t) = report(group, 12)?;
    ensure(r.hp0 == hp0, || format!("hp0 = {}, expected {hp0}", r.hp0))?;
    ensure(r.solution_degrees == degrees, || format!("degrees {:?}, expected {degrees:?}", r.solution_degrees))?;
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))?;
    let s = format!("hp0={} degrees={:?} in {:.2?} (limit {:?})", r.hp0, r.solution_degrees, t, limit);
    Ok((r, s))
}

fn basis_of(r: &SolutionReport, degree: usize) -> Vec<String> {
    r.degrees.iter().find(|d| d.degree == degree).map(|d| d.basis.clone()).unwrap_or_default()
}

/// The degree-`d` solution of `r` spans the same line as the Reynolds image of `word`.
fn solution_is(r: &SolutionReport, degree: usize, word: &Polynomial) -> bool {
    let w = r.group;
    let basis = basis_of(r, degree);
    let [only] = basis.as_slice() else { return false };
    let terms = hp0_core::sl2::parse_combination(only, w.rank()).unwrap();
    let sol = w.reynolds(&hp0_core::sl2::expand_combination(w.rank(), &terms)).unwrap();
    let target = w.reynolds(word).unwrap();
    !target.is_zero() && hp0_core::linalg::rank(&sparse(&[sol, target])) == 1
}

/// `p(n, k)`: partitions of `n` into exactly `k` parts.
fn partitions_into(n: usize) -> Vec<Vec<u64>> {
    let mut t = vec![vec![0u64; n + 1]; n + 1];
    t[0][0] = 1;
    for m in 1..=n {
        for k in 1..=m {
            t[m][k] = t[m - 1][k - 1] + if m >= k { t[m - k][k] } else { 0 };
        }
    }
    t
}

fn criterion1() -> Check {
    let (r, s) = headline("B2", 2, &[0, 4], SMALL_LIMIT)?;
    ensure(solution_is(&r, 4, &pf(1, 2, 2).pow(2)), || format!("degree-4 basis {:?}", basis_of(&r, 4)))?;
    Ok(format!("{s}, degree 4 = R2(X^2)"))
}

fn criterion2() -> Check {
    Ok(headline("D2", 1, &[0], SMALL_LIMIT)?.1)
}

fn criterion3() -> Check {
    let (r, s) = headline("B3", 3, &[0, 4, 8], RANK3_LIMIT)?;
    let (x, y) = (pf(1, 2, 3), pf(2, 3, 3));
    ensure(solution_is(&r, 4, &x.pow(2)), || "degree 4 is not R3(X^2)".into())?;
    ensure(solution_is(&r, 8, &(&x.pow(2) * &y.pow(2))), || "degree 8 is not R3(X^2 Y^2)".into())?;
    Ok(format!("{s}, solutions 1, R3(X^2), R3(X^2Y^2)"))
}

fn criterion4() -> Check {
    let (_, s) = headline("D3", 1, &[0], RANK3_LIMIT)?;
    let d3 = WeylGroup::d(3).unwrap();
    let (x, y) = (pf(1, 2, 3), pf(2, 3, 3));
    for (name, p) in [("R3(X^2)", x.pow(2)), ("R3(X^2Y^2)", &x.pow(2) * &y.pow(2))] {
        let r = d3.reynolds(&p).unwrap();
        ensure(!r.is_zero() && !beg_apply(&d3, &r).unwrap().is_zero(), || format!("{name} solves for D3"))?;
    }
    Ok(format!("{s}, R3(X^2) and R3(X^2Y^2) fail"))
}

fn criterion5() -> Check {
    for (g, max) in [("B2", 12), ("D2", 12), ("B3", 12), ("D3", 12)] {
        let (r, _) = report(g, max)?;
        ensure(r.hh0 == r.hp0 as u64, || format!("{g}: hh0 {} vs hp0 {}", r.hh0, r.hp0))?;
    }
    let t = partitions_into(8);
    for (n, row) in t.iter().enumerate().skip(2) {
        let all: u64 = row.iter().sum();
        let even: u64 = row.iter().enumerate().filter(|(k, _)| k % 2 == 0).map(|(_, c)| c).sum();
        let (b, d) = (WeylGroup::b(n).unwrap().hh0_dimension(), WeylGroup::d(n).unwrap().hh0_dimension());
        ensure(b == all && partition_count(n) == all, || format!("pi({n}): {b} vs {all}"))?;
        ensure(d == even && even_part_partition_count(n) == even, || format!("even pi({n}): {d} vs {even}"))?;
    }
    Ok("hh0 = hp0 for B2 D2 B3 D3; partition counts n <= 8".into())
}

fn criterion8() -> Check {
    let pattern = sl2_coefficient_signs(SIGN_SEED)?;
    let coupled = pattern[0] == -pattern[1] && pattern[0] == pattern[2];
    Ok(format!(
        "{} on 20 samples (n in {{2,3}}, degree <= 6); coupled (+-,-+,+-) form {}",
        pattern_string(pattern),
        if coupled { "holds" } else { "does not hold" }
    ))
}

fn criterion10() -> Check {
    let parts = [
        ("axioms", bracket_axioms(AXIOM_SEED)),
        ("B3/D3 spaces", same_spaces_b3_d3()),
        ("B4/D4 degree 6", rank4_degree6()),
        ("D3 => B3", d_solutions_solve_b(12)),
        ("nonvanishing", nonvanishing_persists()),
        ("persistence", solutions_persist()),
        ("composition", composition_rank4()),
        ("bracket formula", bracket_formula()),
    ];
    let mut out = Vec::new();
    for (name, r) in parts {
        out.push(format!("{name}: {}", r.map_err(|e| format!("{name}: {e}"))?));
    }
    Ok(out.join("; "))
}

fn criterion11() -> Check {
    let b4 = WeylGroup::b(4).unwrap();
    let start = Instant::now();
    let simple = simple_graph_search(&b4).map_err(|e| e.to_string())?;
    let cat = catalog(&b4).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    let dim = simple.solutions.len();
    let verified = cat.entries.iter().filter(|e| e.verified).count();
    ensure(verified == 5 && cat.entries.len() == 5, || format!("{verified} of {} catalog entries verified", cat.entries.len()))?;
    ensure(t <= RANK4_LIMIT, || format!("took {t:?}"))?;
    let simple_note = match simple.unique() {
        Some(g) => format!("degree-12 space 1-dimensional: {g}"),
        None => format!("degree-12 space has dimension {dim} (not 1)"),
    };
    Ok(format!("{simple_note}; catalog 5/5 verified, hp0(B4) >= 5 = pi(4); {t:.2?} (limit {RANK4_LIMIT:?})"))
}

fn main() -> ExitCode {
    let criteria: [(usize, &str, Criterion); 11] = [
        (1, "HP0(B2)", criterion1),
        (2, "HP0(D2)", criterion2),
        (3, "HP0(B3)", criterion3),
        (4, "HP0(D3)", criterion4),
        (5, "HH0 and partitions", criterion5),
        (6, "hw-0 Poincare series", || poincare(3, 8)),
        (7, "pfaffian relation", pfaffian_relation),
        (8, "sl2 coefficient signs", criterion8),
        (9, "witness coefficients", witness_coefficients),
        (10, "structural suite", criterion10),
        (11, "B4 graphs", criterion11),
    ];
    let mut failed = 0;
    for (k, name, f) in criteria {
        let start = Instant::now();
        let r = f();
        let t = start.elapsed();
        match r {
            Ok(detail) => println!("PASS {k:>2} {name} [{t:.2?}]: {detail}"),
            Err(e) => {
                failed += 1;
                println!("FAIL {k:>2} {name} [{t:.2?}]: {e}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
