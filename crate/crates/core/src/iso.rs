//! Deterministic isomorphism testing.
//!
//! After cheap invariants agree, the search looks for an invertible element of
//! `Hom(M, N)`. The product of per-vertex determinants of `Σ c_i φ_i` has total
//! degree `Σ d_i`, so it is nonzero on some point of the grid `{0..=Σ d_i}^k` if it
//! is nonzero at all. Points are visited in order of Hamming weight.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::hom::{hom_basis, hom_dim, HomBasis};
use crate::module::{ModuleMap, RepModule};

/// Upper bound on grid points visited over a prime field before giving up.
const EXHAUSTIVE_LIMIT: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoResult<E> {
    Isomorphic(ModuleMap<E>),
    NotIsomorphic(String),
}

impl<E> IsoResult<E> {
    pub fn is_yes(&self) -> bool {
        matches!(self, IsoResult::Isomorphic(_))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IsoOptions {
    /// Try this many seeded random combinations before the grid search.
    pub random_trials: usize,
    pub seed: u64,
}

/// Invariants that must agree for isomorphic modules.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IsoInvariants {
    pub dims: Vec<usize>,
    pub arrow_ranks: Vec<usize>,
    pub end_dim: usize,
}

pub fn invariants<F: Field>(m: &RepModule<F>) -> Result<IsoInvariants> {
    Ok(IsoInvariants {
        dims: m.dims().to_vec(),
        arrow_ranks: m.matrices().iter().map(|x| x.rank(m.field())).collect(),
        end_dim: hom_dim(m, m)?,
    })
}

pub fn is_isomorphic<F: Field>(m: &RepModule<F>, n: &RepModule<F>) -> Result<IsoResult<F::Elem>> {
    is_isomorphic_with(m, n, IsoOptions::default())
}

pub fn is_isomorphic_with<F: Field>(m: &RepModule<F>, n: &RepModule<F>, opts: IsoOptions) -> Result<IsoResult<F::Elem>> {
    if m.dims() != n.dims() {
        return Ok(IsoResult::NotIsomorphic("dimension vectors differ".into()));
    }
    if m == n {
        return Ok(IsoResult::Isomorphic(m.identity_map()));
    }
    let f = m.field();
    for (k, (a, b)) in m.matrices().iter().zip(n.matrices()).enumerate() {
        if a.rank(f) != b.rank(f) {
            return Ok(IsoResult::NotIsomorphic(format!("rank of arrow {k} differs")));
        }
    }
    let hmn = hom_basis(m, n)?;
    let hnm = hom_dim(n, m)?;
    let em = hom_dim(m, m)?;
    let en = hom_dim(n, n)?;
    if !(hmn.dim() == hnm && hnm == em && em == en) {
        return Ok(IsoResult::NotIsomorphic(format!(
            "Hom dimensions differ: Hom(M,N)={}, Hom(N,M)={}, End(M)={}, End(N)={}",
            hmn.dim(),
            hnm,
            em,
            en
        )));
    }
    match find_invertible(&hmn, opts)? {
        Some(w) => Ok(IsoResult::Isomorphic(w)),
        None => Ok(IsoResult::NotIsomorphic("no invertible homomorphism".into())),
    }
}

/// Searches `Hom(M, N)` for an element that is bijective at every vertex.
pub fn find_invertible<F: Field>(hom: &HomBasis<F>, opts: IsoOptions) -> Result<Option<ModuleMap<F::Elem>>> {
    let f = hom.source.field();
    let total = hom.source.total_dim();
    if total == 0 {
        return Ok(Some(hom.source.identity_map()));
    }
    let k = hom.dim();
    if k == 0 {
        return Ok(None);
    }
    let test = |coeffs: &[F::Elem]| {
        let phi = hom.combination(coeffs);
        if phi.is_invertible(f) {
            Some(phi)
        } else {
            None
        }
    };

    if opts.random_trials > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let side = grid_side(f, total);
        for _ in 0..opts.random_trials {
            let c: Vec<F::Elem> = (0..k).map(|_| f.from_i64(rng.gen_range(0..side as i64))).collect();
            if let Some(phi) = test(&c) {
                return Ok(Some(phi));
            }
        }
    }

    let side = grid_side(f, total);
    if side < total + 1 {
        // prime field smaller than the degree bound: only exhaustive search is sound
        let p = side as u128;
        if p.checked_pow(k as u32).is_none_or(|n| n > EXHAUSTIVE_LIMIT) {
            return Err(Error::PrimeTooSmall {
                prime: f.kind().characteristic(),
                hom_dim: k,
            });
        }
    }
    Ok(grid_search(f, k, side, &test))
}

/// Number of usable grid values: `Σ d_i + 1`, capped by the field size.
fn grid_side<F: Field>(f: &F, total: usize) -> usize {
    match f.kind().characteristic() {
        0 => total + 1,
        p => (total as u64 + 1).min(p) as usize,
    }
}

/// Visits `{0..side}^k` by increasing number of nonzero coordinates.
fn grid_search<F: Field, T>(f: &F, k: usize, side: usize, test: &dyn Fn(&[F::Elem]) -> Option<T>) -> Option<T> {
    let values: Vec<F::Elem> = (0..side).map(|v| f.from_i64(v as i64)).collect();
    for weight in 1..=k {
        let mut support: Vec<usize> = (0..weight).collect();
        loop {
            // all nonzero assignments on this support
            let mut digits = vec![1usize; weight];
            loop {
                let mut c = vec![f.zero(); k];
                for (&pos, &d) in support.iter().zip(&digits) {
                    c[pos] = values[d].clone();
                }
                if let Some(t) = test(&c) {
                    return Some(t);
                }
                let mut i = 0;
                while i < weight {
                    digits[i] += 1;
                    if digits[i] < side {
                        break;
                    }
                    digits[i] = 1;
                    i += 1;
                }
                if i == weight {
                    break;
                }
            }
            if !next_combination(&mut support, k) {
                break;
            }
        }
    }
    None
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Element of `Hom(S, Q)` of maximal rank found on the grid, preferring injective ones.
pub fn find_injective<F: Field>(hom: &HomBasis<F>) -> Result<Option<ModuleMap<F::Elem>>> {
    let f = hom.source.field();
    if hom.dim() == 0 {
        return Ok(None);
    }
    for phi in &hom.basis {
        if phi.is_injective(f) {
            return Ok(Some(phi.clone()));
        }
    }
    let total = hom.source.total_dim();
    let side = grid_side(f, total);
    let test = |c: &[F::Elem]| {
        let phi = hom.combination(c);
        if phi.is_injective(f) {
            Some(phi)
        } else {
            None
        }
    };
    if side < total + 1 {
        let p = side as u128;
        if p.checked_pow(hom.dim() as u32).is_none_or(|n| n > EXHAUSTIVE_LIMIT) {
            return Err(Error::PrimeTooSmall {
                prime: f.kind().characteristic(),
                hom_dim: hom.dim(),
            });
        }
    }
    Ok(grid_search(f, hom.dim(), side, &test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{a2_preprojective, two_loop_commuting};
    use crate::field::{PrimeField, Rationals};
    use std::sync::Arc;

    #[test]
    fn small_examples() {
        let alg = Arc::new(a2_preprojective());
        let f = Rationals;
        let s1 = RepModule::vertex_simple(alg.clone(), f, 0).unwrap();
        let s2 = RepModule::vertex_simple(alg.clone(), f, 1).unwrap();
        let p1 = RepModule::from_integer_matrices(&alg, &[1, 1], &[("a", &[&[1]])]).unwrap();
        match is_isomorphic(&p1, &p1).unwrap() {
            IsoResult::Isomorphic(w) => assert_eq!(w, p1.identity_map()),
            other => panic!("{other:?}"),
        }
        assert!(!is_isomorphic(&s1, &s2).unwrap().is_yes());
        let s12 = s1.direct_sum(&s2).unwrap();
        assert!(!is_isomorphic(&p1, &s12).unwrap().is_yes());
    }

    #[test]
    fn conjugates_are_isomorphic() {
        let alg = Arc::new(two_loop_commuting());
        let m = RepModule::from_integer_matrices(
            &alg,
            &[3],
            &[("a", &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]), ("a*", &[&[0, 0, 1], &[0, 0, 0], &[0, 0, 0]])],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let c = m.random_conjugate(&mut rng);
            match is_isomorphic(&m, &c).unwrap() {
                IsoResult::Isomorphic(w) => assert!(m.is_homomorphism(&c, &w)),
                other => panic!("{other:?}"),
            }
        }
        // scaling the second loop gives an isomorphic module; swapping roles does not in general
        let n = RepModule::from_integer_matrices(
            &alg,
            &[3],
            &[("a", &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]), ("a*", &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]])],
        )
        .unwrap();
        assert!(!is_isomorphic(&m, &n).unwrap().is_yes());
    }

    #[test]
    fn prime_field_small_grid() {
        let alg = Arc::new(a2_preprojective());
        let f = PrimeField::new(2).unwrap();
        let s1 = RepModule::vertex_simple(alg.clone(), f, 0).unwrap();
        let s2 = RepModule::vertex_simple(alg.clone(), f, 1).unwrap();
        let m = s1.direct_sum(&s2).unwrap();
        let g = vec![
            crate::matrix::Matrix::from_i64(&f, &[&[1]]),
            crate::matrix::Matrix::from_i64(&f, &[&[1]]),
        ];
        let c = m.conjugate(&g).unwrap();
        assert!(is_isomorphic(&m, &c).unwrap().is_yes());
    }

    #[test]
    fn combinations_enumerate() {
        let mut c = vec![0, 1];
        let mut n = 1;
        while next_combination(&mut c, 4) {
            n += 1;
        }
        assert_eq!(n, 6);
    }
}
