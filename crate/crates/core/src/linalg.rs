//! Row reduction, kernels, canonical subspaces and subspace enumeration over F_q.

use num::BigRational;

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField};
use crate::matrix::Matrix;

/// Brings `m` into reduced row echelon form in place and returns the pivot columns.
pub fn rref<F: Field>(f: &F, m: &mut Matrix<F::Elem>) -> Vec<usize> {
    let (rows, cols) = m.shape();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !f.is_zero(m.get(i, c))) else {
            continue;
        };
        m.swap_rows(r, p);
        let inv = f.inv(m.get(r, c));
        if !f.is_one(&inv) {
            for x in m.row_mut(r)[c..].iter_mut() {
                *x = f.mul(x, &inv);
            }
        }
        let pivot_row: Vec<F::Elem> = m.row(r).to_vec();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = m.get(i, c).clone();
            if f.is_zero(&factor) {
                continue;
            }
            let row = m.row_mut(i);
            for j in c..cols {
                let t = f.mul(&factor, &pivot_row[j]);
                row[j] = f.sub(&row[j], &t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Result of solving `A x = b` (or `A x = 0`).
#[derive(Debug, Clone)]
pub struct KernelSolution<E> {
    pub rank: usize,
    /// Kernel of `A` as a canonical subspace of the column space.
    pub kernel: Subspace<E>,
    /// `Some(x)` when a right-hand side was supplied and the system is consistent.
    pub particular: Option<Vec<E>>,
    /// `false` when a right-hand side was supplied and the system has no solution.
    pub consistent: bool,
}

pub fn kernel_solve<F: Field>(
    f: &F,
    a: &Matrix<F::Elem>,
    rhs: Option<&[F::Elem]>,
) -> KernelSolution<F::Elem> {
    let (rows, cols) = a.shape();
    let mut m = match rhs {
        Some(b) => {
            assert_eq!(b.len(), rows, "right-hand side length");
            a.hstack(&Matrix::from_vec(rows, 1, b.to_vec()))
        }
        None => a.clone(),
    };
    let all_pivots = rref(f, &mut m);
    let pivots: Vec<usize> = all_pivots.iter().copied().filter(|&c| c < cols).collect();
    let consistent = rhs.is_none() || all_pivots.len() == pivots.len();
    let rank = pivots.len();

    let mut basis = Vec::new();
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![f.zero(); cols];
        v[free] = f.one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = f.neg(m.get(r, free));
        }
        basis.push(v);
    }
    let kernel = Subspace::from_vectors(f, cols, basis);

    let particular = if rhs.is_some() && consistent {
        let mut x = vec![f.zero(); cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = m.get(r, cols).clone();
        }
        Some(x)
    } else {
        None
    };
    KernelSolution {
        rank,
        kernel,
        particular,
        consistent,
    }
}

/// A subspace of `F^n` stored by its reduced row echelon basis; two equal
/// subspaces have identical representations, so `==` and `Hash` are subspace equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace<E> {
    ambient: usize,
    basis: Matrix<E>,
    pivots: Vec<usize>,
}

impl<E: Clone> Subspace<E> {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::from_vec(0, ambient, Vec::new()),
            pivots: Vec::new(),
        }
    }

    pub fn full<F: Field<Elem = E>>(f: &F, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(f, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Canonical span of the rows of `m`.
    pub fn from_rows<F: Field<Elem = E>>(f: &F, mut m: Matrix<E>) -> Self {
        let ambient = m.cols();
        let pivots = rref(f, &mut m);
        let basis = m.submatrix(0..pivots.len(), 0..ambient);
        Subspace {
            ambient,
            basis,
            pivots,
        }
    }

    pub fn from_vectors<F: Field<Elem = E>>(f: &F, ambient: usize, vectors: Vec<Vec<E>>) -> Self {
        Subspace::from_rows(f, Matrix::from_rows(vectors, ambient))
    }

    /// Wraps a matrix already known to be in reduced echelon form with nonzero rows.
    fn from_echelon_unchecked(basis: Matrix<E>, pivots: Vec<usize>) -> Self {
        Subspace {
            ambient: basis.cols(),
            basis,
            pivots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis(&self) -> &Matrix<E> {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<E>> {
        (0..self.dim()).map(|r| self.basis.row(r).to_vec()).collect()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Columns that are not pivots; the matching unit vectors span a complement.
    pub fn non_pivots(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&c| !is_pivot[c]).collect()
    }

    /// Subtracts the echelon basis from `v`, leaving zeros at all pivot positions.
    pub fn reduce<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Vec<E> {
        let mut out = v.to_vec();
        for (r, &p) in self.pivots.iter().enumerate() {
            let factor = out[p].clone();
            if f.is_zero(&factor) {
                continue;
            }
            for (o, b) in out.iter_mut().zip(self.basis.row(r)) {
                let t = f.mul(&factor, b);
                *o = f.sub(o, &t);
            }
        }
        out
    }

    pub fn contains<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> bool {
        self.reduce(f, v).iter().all(|x| f.is_zero(x))
    }

    pub fn contains_subspace<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> bool {
        (0..other.dim()).all(|r| self.contains(f, other.basis.row(r)))
    }

    /// Coordinates of `v` in the echelon basis; `v` must lie in the subspace.
    pub fn coordinates(&self, v: &[E]) -> Vec<E> {
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }

    pub fn sum<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        Subspace::from_rows(f, self.basis.vstack(&other.basis))
    }

    /// Image under a linear map given as a matrix acting on column vectors.
    pub fn image<F: Field<Elem = E>>(&self, f: &F, map: &Matrix<E>) -> Self {
        let vectors = (0..self.dim())
            .map(|r| map.apply(f, self.basis.row(r)))
            .collect();
        Subspace::from_vectors(f, map.rows(), vectors)
    }

    pub fn intersection<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        // Solve sum a_i u_i = sum b_j w_j via the kernel of [U^T | -W^T].
        let n = self.ambient;
        let k1 = self.dim();
        let k2 = other.dim();
        let mut sys = Matrix::zeros(f, n, k1 + k2);
        for i in 0..k1 {
            for c in 0..n {
                sys.set(c, i, self.basis.get(i, c).clone());
            }
        }
        for j in 0..k2 {
            for c in 0..n {
                sys.set(c, k1 + j, f.neg(other.basis.get(j, c)));
            }
        }
        let sol = kernel_solve(f, &sys, None);
        let vectors = sol
            .kernel
            .basis_vectors()
            .into_iter()
            .map(|coef| {
                let mut v = vec![f.zero(); n];
                for (i, a) in coef[..k1].iter().enumerate() {
                    for (c, x) in v.iter_mut().enumerate() {
                        f.mul_add_assign(x, a, self.basis.get(i, c));
                    }
                }
                v
            })
            .collect();
        Subspace::from_vectors(f, n, vectors)
    }

    /// Re-canonicalizes (identity on canonical input).
    pub fn canonicalize<F: Field<Elem = E>>(&self, f: &F) -> Self {
        Subspace::from_rows(f, self.basis.clone())
    }
}

/// Gaussian binomial coefficient [n choose k]_q.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// Entrywise reduction of a rational matrix modulo `p`.
pub fn reduce_mod_p(m: &Matrix<BigRational>, p: u64) -> Result<Matrix<u64>> {
    let f = PrimeField::new(p)?;
    m.try_map(|x| f.from_rational(x))
}

/// Streaming enumeration of the `k`-dimensional subspaces of `F_q^n`, one
/// reduced echelon representative per subspace.
pub fn enumerate_subspaces(n: usize, k: usize, q: u64) -> Result<SubspaceIter> {
    let field = PrimeField::new(q)?;
    if k > n {
        return Err(Error::DimensionMismatch(format!(
            "subspace dimension {k} exceeds ambient dimension {n}"
        )));
    }
    Ok(SubspaceIter::new(field, n, k))
}

/// All pivot patterns (strictly increasing column lists) for `k`-dimensional
/// subspaces of an `n`-dimensional space; enumeration can be partitioned by these.
pub fn pivot_patterns(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for c in start..n {
            if n - c < k - cur.len() {
                break;
            }
            cur.push(c);
            rec(c + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub struct SubspaceIter {
    field: PrimeField,
    n: usize,
    patterns: Vec<Vec<usize>>,
    pattern_idx: usize,
    free: Vec<(usize, usize)>,
    counter: Vec<u64>,
    exhausted_pattern: bool,
}

impl SubspaceIter {
    fn new(field: PrimeField, n: usize, k: usize) -> Self {
        Self::with_patterns(field, n, pivot_patterns(n, k))
    }

    /// Restricts enumeration to the given pivot patterns.
    pub fn with_patterns(field: PrimeField, n: usize, patterns: Vec<Vec<usize>>) -> Self {
        let mut it = SubspaceIter {
            field,
            n,
            patterns,
            pattern_idx: 0,
            free: Vec::new(),
            counter: Vec::new(),
            exhausted_pattern: true,
        };
        it.load_pattern();
        it
    }

    fn load_pattern(&mut self) {
        self.free.clear();
        self.counter.clear();
        let Some(pattern) = self.patterns.get(self.pattern_idx) else {
            return;
        };
        for (r, &p) in pattern.iter().enumerate() {
            for c in p + 1..self.n {
                if !pattern.contains(&c) {
                    self.free.push((r, c));
                }
            }
        }
        self.counter = vec![0; self.free.len()];
        self.exhausted_pattern = false;
    }

    fn advance(&mut self) {
        let q = self.field.modulus();
        for slot in self.counter.iter_mut() {
            *slot += 1;
            if *slot < q {
                return;
            }
            *slot = 0;
        }
        self.exhausted_pattern = true;
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace<u64>;

    fn next(&mut self) -> Option<Subspace<u64>> {
        loop {
            if self.pattern_idx >= self.patterns.len() {
                return None;
            }
            if self.exhausted_pattern {
                self.pattern_idx += 1;
                self.load_pattern();
                continue;
            }
            let pattern = &self.patterns[self.pattern_idx];
            let mut m = Matrix::zeros(&self.field, pattern.len(), self.n);
            for (r, &p) in pattern.iter().enumerate() {
                m.set(r, p, 1);
            }
            for (&(r, c), &v) in self.free.iter().zip(&self.counter) {
                m.set(r, c, v);
            }
            let pivots = pattern.clone();
            self.advance();
            return Some(Subspace::from_echelon_unchecked(m, pivots));
        }
    }
}
