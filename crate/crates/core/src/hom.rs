//! Homomorphism spaces, computed as the kernel of the intertwiner system
//! `φ_{t(α)} X_α − Y_α φ_{s(α)} = 0`.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::kernel_solve;
use crate::matrix::Matrix;
use crate::module::{ModuleMap, RepModule};

/// Coordinates of a per-vertex tuple `(φ_i)` with `φ_i: X_i -> Y_i`, stored row-major
/// per vertex in vertex order.
pub(crate) fn vertex_offsets(x: &[usize], y: &[usize]) -> (Vec<usize>, usize) {
    let mut offsets = Vec::with_capacity(x.len());
    let mut total = 0;
    for (a, b) in x.iter().zip(y) {
        offsets.push(total);
        total += a * b;
    }
    (offsets, total)
}

/// Coordinates of an arrow tuple `(d(α))` with `d(α): X_{s(α)} -> Y_{t(α)}`.
pub(crate) fn arrow_offsets<F: Field>(x: &RepModule<F>, y: &RepModule<F>) -> (Vec<usize>, usize) {
    let mut offsets = Vec::new();
    let mut total = 0;
    for a in x.algebra().quiver().arrows() {
        offsets.push(total);
        total += y.dims()[a.target] * x.dims()[a.source];
    }
    (offsets, total)
}

/// Matrix of `φ ↦ (φ_{t(α)} X_α − Y_α φ_{s(α)})_α`. Its kernel is `Hom(X, Y)` and its
/// image is the space of trivial extension tuples.
pub(crate) fn coboundary_matrix<F: Field>(x: &RepModule<F>, y: &RepModule<F>) -> Matrix<F::Elem> {
    let f = x.field();
    let (xd, yd) = (x.dims(), y.dims());
    let (voff, vtotal) = vertex_offsets(xd, yd);
    let (aoff, atotal) = arrow_offsets(x, y);
    let mut m = Matrix::zeros(f, atotal, vtotal);
    for (k, a) in x.algebra().quiver().arrows().iter().enumerate() {
        let (s, t) = (a.source, a.target);
        let xa = x.matrix(k);
        let ya = y.matrix(k);
        for r in 0..yd[t] {
            for c in 0..xd[s] {
                let row = aoff[k] + r * xd[s] + c;
                // φ_t[r][j] X[j][c]
                for j in 0..xd[t] {
                    let v = xa.get(j, c);
                    if !f.is_zero(v) {
                        let col = voff[t] + r * xd[t] + j;
                        let cur = f.add(m.get(row, col), v);
                        m.set(row, col, cur);
                    }
                }
                // − Y[r][j] φ_s[j][c]
                for j in 0..yd[s] {
                    let v = ya.get(r, j);
                    if !f.is_zero(v) {
                        let col = voff[s] + j * xd[s] + c;
                        let cur = f.sub(m.get(row, col), v);
                        m.set(row, col, cur);
                    }
                }
            }
        }
    }
    m
}

pub(crate) fn tuple_to_map<F: Field>(f: &F, x: &[usize], y: &[usize], v: &[F::Elem]) -> ModuleMap<F::Elem> {
    let (offsets, _) = vertex_offsets(x, y);
    ModuleMap::new(
        x.iter()
            .zip(y)
            .zip(offsets)
            .map(|((&xi, &yi), off)| {
                if xi * yi == 0 {
                    Matrix::zeros(f, yi, xi)
                } else {
                    Matrix::from_vec(yi, xi, v[off..off + xi * yi].to_vec())
                }
            })
            .collect(),
    )
}

/// Basis of `Hom_A(source, target)`.
#[derive(Debug, Clone)]
pub struct HomBasis<F: Field> {
    pub source: RepModule<F>,
    pub target: RepModule<F>,
    pub basis: Vec<ModuleMap<F::Elem>>,
}

impl<F: Field> HomBasis<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn combination(&self, coeffs: &[F::Elem]) -> ModuleMap<F::Elem> {
        let f = self.source.field();
        let template = self.source.zero_map_to(&self.target);
        ModuleMap::linear_combination(f, &self.basis, coeffs, &template)
    }
}

pub fn hom_basis<F: Field>(source: &RepModule<F>, target: &RepModule<F>) -> Result<HomBasis<F>> {
    check_compatible(source, target)?;
    let f = source.field();
    let sys = coboundary_matrix(source, target);
    let sol = kernel_solve(f, &sys, None);
    let basis = sol
        .kernel
        .basis_vectors()
        .iter()
        .map(|v| tuple_to_map(f, source.dims(), target.dims(), v))
        .collect();
    Ok(HomBasis {
        source: source.clone(),
        target: target.clone(),
        basis,
    })
}

/// `dim Hom(source, target)` without materializing the basis.
pub fn hom_dim<F: Field>(source: &RepModule<F>, target: &RepModule<F>) -> Result<usize> {
    check_compatible(source, target)?;
    let sys = coboundary_matrix(source, target);
    Ok(sys.cols() - sys.rank(source.field()))
}

pub(crate) fn check_compatible<F: Field>(a: &RepModule<F>, b: &RepModule<F>) -> Result<()> {
    if a.algebra() != b.algebra() {
        return Err(Error::ModuleMismatch("modules over different algebras".into()));
    }
    if a.field().kind() != b.field().kind() {
        return Err(Error::ModuleMismatch(format!(
            "modules over different fields ({} vs {})",
            a.field().kind(),
            b.field().kind()
        )));
    }
    Ok(())
}
