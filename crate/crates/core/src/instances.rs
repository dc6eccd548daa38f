//! Built-in algebras with named modules, and catalogs generated from lists of
//! indecomposables.

use std::sync::Arc;

use num::BigRational;

use crate::algebra::{a2_preprojective, deformed_preprojective_linear, three_vertex_example, two_loop_commuting, AlgebraPresentation};
use crate::error::{Error, Result};
use crate::ext::ExtSpace;
use crate::field::Rationals;
use crate::module::{RationalModule, RepModule};

pub type Named = (String, RationalModule);

/// An algebra with its simples `𝒮` and a list of indecomposables of `𝒞(𝒮)`.
#[derive(Debug, Clone)]
pub struct BuiltinInstance {
    pub name: String,
    pub algebra: Arc<AlgebraPresentation>,
    pub simples: Vec<Named>,
    pub indecomposables: Vec<Named>,
}

fn named(name: &str, m: RationalModule) -> Named {
    (name.to_string(), m)
}

/// `S1, S2, P1, P2` over the A₂ preprojective algebra; `P1` has `a ≠ 0`, `P2` has `a* ≠ 0`.
pub fn a2_instance() -> BuiltinInstance {
    let alg = Arc::new(a2_preprojective());
    let f = Rationals;
    let s1 = RepModule::vertex_simple(alg.clone(), f, 0).expect("vertex");
    let s2 = RepModule::vertex_simple(alg.clone(), f, 1).expect("vertex");
    let p1 = RepModule::from_integer_matrices(&alg, &[1, 1], &[("a", &[&[1]])]).expect("module");
    let p2 = RepModule::from_integer_matrices(&alg, &[1, 1], &[("a*", &[&[1]])]).expect("module");
    BuiltinInstance {
        name: "a2-preprojective".into(),
        algebra: alg,
        simples: vec![named("S1", s1.clone()), named("S2", s2.clone())],
        indecomposables: vec![named("S1", s1), named("S2", s2), named("P1", p1), named("P2", p2)],
    }
}

/// Nilpotent commuting pairs of size at most 3 over the two-loop commuting algebra.
pub fn two_loop_instance() -> BuiltinInstance {
    let alg = Arc::new(two_loop_commuting());
    let f = Rationals;
    let s = RepModule::vertex_simple(alg.clone(), f, 0).expect("vertex");
    let n2: &[&[i64]] = &[&[0, 1], &[0, 0]];
    let neg2: &[&[i64]] = &[&[0, -1], &[0, 0]];
    let j: &[&[i64]] = &[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]];
    let j2: &[&[i64]] = &[&[0, 0, 1], &[0, 0, 0], &[0, 0, 0]];
    let e12: &[&[i64]] = &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]];
    let e13 = j2;
    let e23: &[&[i64]] = &[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0]];
    let e32: &[&[i64]] = &[&[0, 0, 0], &[0, 0, 0], &[0, 1, 0]];
    let mk = |name: &str, d: usize, pairs: &[(&str, &[&[i64]])]| named(name, RepModule::from_integer_matrices(&alg, &[d], pairs).expect("commuting pair"));
    let indecomposables = vec![
        named("S", s.clone()),
        mk("(N,0)", 2, &[("a", n2)]),
        mk("(0,N)", 2, &[("a*", n2)]),
        mk("(N,N)", 2, &[("a", n2), ("a*", n2)]),
        mk("(N,-N)", 2, &[("a", n2), ("a*", neg2)]),
        mk("(J,0)", 3, &[("a", j)]),
        mk("(0,J)", 3, &[("a*", j)]),
        mk("(J,J^2)", 3, &[("a", j), ("a*", j2)]),
        mk("(E12,E13)", 3, &[("a", e12), ("a*", e13)]),
        mk("(E13,E12)", 3, &[("a", e13), ("a*", e12)]),
        mk("(E13,E23)", 3, &[("a", e13), ("a*", e23)]),
        mk("(E12,E32)", 3, &[("a", e12), ("a*", e32)]),
    ];
    BuiltinInstance {
        name: "two-loop-commuting".into(),
        algebra: alg,
        simples: vec![named("S", s)],
        indecomposables,
    }
}

fn r(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// First of the candidate matrix assignments that satisfies the relations.
fn first_module(alg: &Arc<AlgebraPresentation>, dims: &[usize], candidates: &[Vec<(&str, &[&[i64]])>]) -> Result<RationalModule> {
    let mut last = Error::InvalidRelation {
        index: 0,
        reason: "no candidate".into(),
    };
    for c in candidates {
        match RepModule::from_integer_matrices(alg, dims, c) {
            Ok(m) => return Ok(m),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Deformed A₂ preprojective with weight `(1, −1)`: its one simple `T` of dimension `(1,1)`.
pub fn deformed_a2_instance() -> BuiltinInstance {
    let alg = Arc::new(deformed_preprojective_linear(&[r(1), r(-1)]));
    let one: &[&[i64]] = &[&[1]];
    let neg: &[&[i64]] = &[&[-1]];
    let t = first_module(
        &alg,
        &[1, 1],
        &[vec![("a1", one), ("a1*", neg)], vec![("a1", one), ("a1*", one)]],
    )
    .expect("deformed simple");
    BuiltinInstance {
        name: "deformed-a2".into(),
        algebra: alg,
        simples: vec![named("T", t.clone())],
        indecomposables: vec![named("T", t)],
    }
}

/// Deformed A₃ preprojective with weight `(1, −1, 0)`: simples `T` of dimension
/// `(1,1,0)` and `S3`, plus the middle terms of nonzero extensions between them.
pub fn deformed_a3_instance() -> BuiltinInstance {
    let alg = Arc::new(deformed_preprojective_linear(&[r(1), r(-1), r(0)]));
    let one: &[&[i64]] = &[&[1]];
    let neg: &[&[i64]] = &[&[-1]];
    let t = first_module(
        &alg,
        &[1, 1, 0],
        &[vec![("a1", one), ("a1*", neg)], vec![("a1", one), ("a1*", one)]],
    )
    .expect("deformed simple");
    let s3 = RepModule::vertex_simple(alg.clone(), Rationals, 2).expect("vertex");
    let mut indecomposables = vec![named("T", t.clone()), named("S3", s3.clone())];
    for ((xn, x), (yn, y)) in [(("T", &t), ("S3", &s3)), (("S3", &s3), ("T", &t))] {
        let ext = ExtSpace::new(x, y).expect("ext");
        for i in 0..ext.dim() {
            let l = ext.middle_term(&ext.basis_class(i)).expect("middle term").module;
            indecomposables.push((format!("E{}({xn},{yn})", i + 1), l));
        }
    }
    BuiltinInstance {
        name: "deformed-a3".into(),
        algebra: alg,
        simples: vec![named("T", t), named("S3", s3)],
        indecomposables,
    }
}

/// The 3-vertex example with `𝒮 = {S2, S3}`: `S2, S3` and the two uniserials of length 2.
pub fn three_vertex_s23_instance() -> BuiltinInstance {
    let alg = Arc::new(three_vertex_example());
    let f = Rationals;
    let s2 = RepModule::vertex_simple(alg.clone(), f, 1).expect("vertex");
    let s3 = RepModule::vertex_simple(alg.clone(), f, 2).expect("vertex");
    let b = RepModule::from_integer_matrices(&alg, &[0, 1, 1], &[("b", &[&[1]])]).expect("module");
    let bs = RepModule::from_integer_matrices(&alg, &[0, 1, 1], &[("b*", &[&[1]])]).expect("module");
    BuiltinInstance {
        name: "three-vertex-s23".into(),
        algebra: alg,
        simples: vec![named("S2", s2.clone()), named("S3", s3.clone())],
        indecomposables: vec![named("S2", s2), named("S3", s3), named("U_b", b), named("U_b*", bs)],
    }
}

/// The 3-vertex example with `𝒮 = {S1, S3}`; these two have no extensions either way.
pub fn three_vertex_s13_instance() -> BuiltinInstance {
    let alg = Arc::new(three_vertex_example());
    let f = Rationals;
    let s1 = RepModule::vertex_simple(alg.clone(), f, 0).expect("vertex");
    let s3 = RepModule::vertex_simple(alg.clone(), f, 2).expect("vertex");
    BuiltinInstance {
        name: "three-vertex-s13".into(),
        algebra: alg,
        simples: vec![named("S1", s1.clone()), named("S3", s3.clone())],
        indecomposables: vec![named("S1", s1), named("S3", s3)],
    }
}

/// The 3-vertex example with all three vertex simples.
pub fn three_vertex_full_instance() -> BuiltinInstance {
    let alg = Arc::new(three_vertex_example());
    let simples: Vec<Named> = (0..3)
        .map(|i| named(&format!("S{}", i + 1), RepModule::vertex_simple(alg.clone(), Rationals, i).expect("vertex")))
        .collect();
    BuiltinInstance {
        name: "three-vertex-full".into(),
        algebra: alg,
        indecomposables: simples.clone(),
        simples,
    }
}

fn sum_label(parts: &[(usize, usize)], names: &[&str]) -> String {
    let pieces: Vec<String> = parts
        .iter()
        .map(|&(i, k)| if k == 1 { names[i].to_string() } else { format!("{}^{k}", names[i]) })
        .collect();
    pieces.join("+")
}

/// All nonzero direct sums of `indecomposables` accepted by `keep`, which sees the
/// running dimension vector and prunes as soon as it returns `false` on a partial sum.
fn direct_sums(indecomposables: &[Named], keep: &dyn Fn(&[usize], bool) -> bool) -> Result<Vec<Named>> {
    let Some((_, first)) = indecomposables.first() else {
        return Ok(Vec::new());
    };
    let zero = RepModule::zero(first.algebra().clone(), Rationals);
    let names: Vec<&str> = indecomposables.iter().map(|(n, _)| n.as_str()).collect();
    let mut out = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        ind: &[Named],
        names: &[&str],
        keep: &dyn Fn(&[usize], bool) -> bool,
        start: usize,
        cur: &RationalModule,
        parts: &mut Vec<(usize, usize)>,
        out: &mut Vec<Named>,
    ) -> Result<()> {
        if !parts.is_empty() && keep(cur.dims(), true) {
            out.push((sum_label(parts, names), cur.clone()));
        }
        for i in start..ind.len() {
            if ind[i].1.is_zero() {
                continue;
            }
            let next = cur.direct_sum(&ind[i].1)?;
            if !keep(next.dims(), false) {
                continue;
            }
            match parts.last_mut() {
                Some((j, k)) if *j == i => *k += 1,
                _ => parts.push((i, 1)),
            }
            rec(ind, names, keep, i, &next, parts, out)?;
            match parts.last_mut() {
                Some((_, k)) if *k > 1 => *k -= 1,
                _ => {
                    parts.pop();
                }
            }
        }
        Ok(())
    }
    rec(indecomposables, &names, keep, 0, &zero, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// Every direct sum of `indecomposables` with dimension vector exactly `dims`.
pub fn direct_sum_catalog(indecomposables: &[Named], dims: &[usize]) -> Result<Vec<Named>> {
    direct_sums(indecomposables, &|d, complete| {
        d.iter().zip(dims).all(|(a, b)| a <= b) && (!complete || d == dims)
    })
}

/// Every nonzero direct sum of `indecomposables` of total dimension at most `max_total`.
pub fn direct_sums_up_to(indecomposables: &[Named], max_total: usize) -> Result<Vec<Named>> {
    direct_sums(indecomposables, &|d, _| d.iter().sum::<usize>() <= max_total)
}
