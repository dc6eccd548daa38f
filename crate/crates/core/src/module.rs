//! Modules over an algebra presentation: points of the representation variety
//! `E_d(A)`, module maps, submodules and subquotients.

use std::fmt;
use std::sync::Arc;

use num::BigRational;
use rand::Rng;

use crate::algebra::{evaluate_path, AlgebraPresentation};
use crate::error::{Error, Result};
use crate::field::{Field, PrimeField, Rationals};
use crate::linalg::Subspace;
use crate::matrix::Matrix;

/// A representation `(k^d, X)` satisfying every relation of its algebra.
#[derive(Clone)]
pub struct RepModule<F: Field> {
    algebra: Arc<AlgebraPresentation>,
    field: F,
    dims: Vec<usize>,
    matrices: Vec<Matrix<F::Elem>>,
}

pub type RationalModule = RepModule<Rationals>;
pub type FpModule = RepModule<PrimeField>;

impl<F: Field> PartialEq for RepModule<F> {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims
            && self.matrices == other.matrices
            && (Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra)
    }
}

impl<F: Field> fmt::Debug for RepModule<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RepModule(dims {:?}", self.dims)?;
        for (a, m) in self.algebra.quiver().arrows().iter().zip(&self.matrices) {
            write!(f, ", {}: {:?}", a.name, m)?;
        }
        write!(f, ")")
    }
}

/// Validates shapes and relations and returns the module.
pub fn check_module<F: Field>(
    algebra: Arc<AlgebraPresentation>,
    field: F,
    dims: Vec<usize>,
    matrices: Vec<Matrix<F::Elem>>,
) -> Result<RepModule<F>> {
    let quiver = algebra.quiver();
    if dims.len() != quiver.vertex_count() {
        return Err(Error::DimensionMismatch(format!(
            "dimension vector has {} entries for {} vertices",
            dims.len(),
            quiver.vertex_count()
        )));
    }
    if matrices.len() != quiver.arrows().len() {
        return Err(Error::DimensionMismatch(format!(
            "{} matrices for {} arrows",
            matrices.len(),
            quiver.arrows().len()
        )));
    }
    for (a, m) in quiver.arrows().iter().zip(&matrices) {
        if m.shape() != (dims[a.target], dims[a.source]) {
            return Err(Error::DimensionMismatch(format!(
                "arrow {} has a {}x{} matrix, expected {}x{}",
                a.name,
                m.rows(),
                m.cols(),
                dims[a.target],
                dims[a.source]
            )));
        }
    }
    for (index, rel) in algebra.relations().iter().enumerate() {
        let mut residue = Matrix::zeros(&field, dims[rel.target()], dims[rel.source()]);
        for (coeff, path) in rel.terms() {
            let c = field.from_rational(coeff)?;
            let value = evaluate_path(&field, quiver, &matrices, &dims, path)?;
            residue = residue.add(&field, &value.scale(&field, &c));
        }
        for r in 0..residue.rows() {
            for c in 0..residue.cols() {
                if !field.is_zero(residue.get(r, c)) {
                    return Err(Error::RelationViolated {
                        index,
                        row: r,
                        col: c,
                        residue: field.format(residue.get(r, c)),
                    });
                }
            }
        }
    }
    Ok(RepModule {
        algebra,
        field,
        dims,
        matrices,
    })
}

impl<F: Field> RepModule<F> {
    pub fn algebra(&self) -> &Arc<AlgebraPresentation> {
        &self.algebra
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn matrices(&self) -> &[Matrix<F::Elem>] {
        &self.matrices
    }

    pub fn matrix(&self, arrow: usize) -> &Matrix<F::Elem> {
        &self.matrices[arrow]
    }

    pub fn zero(algebra: Arc<AlgebraPresentation>, field: F) -> Self {
        let n = algebra.vertex_count();
        let matrices = algebra
            .quiver()
            .arrows()
            .iter()
            .map(|_| Matrix::zeros(&field, 0, 0))
            .collect();
        RepModule {
            algebra,
            field,
            dims: vec![0; n],
            matrices,
        }
    }

    /// The one-dimensional module at `vertex` with all arrows acting by zero;
    /// `None` when some relation has a nonzero vertex term there.
    pub fn vertex_simple(algebra: Arc<AlgebraPresentation>, field: F, vertex: usize) -> Result<Self> {
        let mut dims = vec![0; algebra.vertex_count()];
        dims[vertex] = 1;
        let matrices = algebra
            .quiver()
            .arrows()
            .iter()
            .map(|a| Matrix::zeros(&field, dims[a.target], dims[a.source]))
            .collect();
        check_module(algebra, field, dims, matrices)
    }

    fn same_context(&self, other: &Self) -> Result<()> {
        if !(Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra) {
            return Err(Error::ModuleMismatch("modules over different algebras".into()));
        }
        if self.field.kind() != other.field.kind() {
            return Err(Error::ModuleMismatch(format!(
                "modules over different fields ({} vs {})",
                self.field.kind(),
                other.field.kind()
            )));
        }
        Ok(())
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        let f = &self.field;
        let dims = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| Matrix::block_diag(f, a, b))
            .collect();
        Ok(RepModule {
            algebra: self.algebra.clone(),
            field: f.clone(),
            dims,
            matrices,
        })
    }

    /// Base change `X_α ↦ g_t X_α g_s⁻¹` by a per-vertex invertible family.
    pub fn conjugate(&self, g: &[Matrix<F::Elem>]) -> Result<Self> {
        let f = &self.field;
        let inverses = g
            .iter()
            .zip(&self.dims)
            .map(|(m, &d)| {
                if m.shape() != (d, d) {
                    return Err(Error::DimensionMismatch("conjugating family shape".into()));
                }
                m.inverse(f)
                    .ok_or_else(|| Error::DimensionMismatch("conjugating matrix is singular".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let matrices = self
            .algebra
            .quiver()
            .arrows()
            .iter()
            .zip(&self.matrices)
            .map(|(a, x)| g[a.target].dot(f, x).dot(f, &inverses[a.source]))
            .collect();
        Ok(RepModule {
            algebra: self.algebra.clone(),
            field: f.clone(),
            dims: self.dims.clone(),
            matrices,
        })
    }

    pub fn zero_witness(&self) -> SubmoduleWitness<F::Elem> {
        SubmoduleWitness {
            spaces: self.dims.iter().map(|&d| Subspace::zero(d)).collect(),
        }
    }

    pub fn full_witness(&self) -> SubmoduleWitness<F::Elem> {
        SubmoduleWitness {
            spaces: self
                .dims
                .iter()
                .map(|&d| Subspace::full(&self.field, d))
                .collect(),
        }
    }

    /// Checks `X_α(U_{s(α)}) ⊆ U_{t(α)}` for every arrow.
    pub fn is_stable(&self, spaces: &[Subspace<F::Elem>]) -> Result<()> {
        if spaces.len() != self.dims.len()
            || spaces.iter().zip(&self.dims).any(|(s, &d)| s.ambient_dim() != d)
        {
            return Err(Error::DimensionMismatch("witness does not match the module".into()));
        }
        for (a, x) in self.algebra.quiver().arrows().iter().zip(&self.matrices) {
            let src = &spaces[a.source];
            let tgt = &spaces[a.target];
            for r in 0..src.dim() {
                let image = x.apply(&self.field, src.basis().row(r));
                if !tgt.contains(&self.field, &image) {
                    return Err(Error::NotArrowStable(a.name.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn witness(&self, spaces: Vec<Subspace<F::Elem>>) -> Result<SubmoduleWitness<F::Elem>> {
        self.is_stable(&spaces)?;
        Ok(SubmoduleWitness { spaces })
    }

    /// Induced submodule and quotient together with the inclusion and projection.
    /// Quotient coordinates are the non-pivot positions of each echelon basis.
    pub fn sub_quotient(&self, witness: &SubmoduleWitness<F::Elem>) -> Result<SubQuotient<F>> {
        self.is_stable(&witness.spaces)?;
        let f = &self.field;
        let spaces = &witness.spaces;
        let complements: Vec<Vec<usize>> = spaces.iter().map(|s| s.non_pivots()).collect();
        let sub_dims: Vec<usize> = spaces.iter().map(|s| s.dim()).collect();
        let quo_dims: Vec<usize> = complements.iter().map(|c| c.len()).collect();

        let mut sub_mats = Vec::new();
        let mut quo_mats = Vec::new();
        for (a, x) in self.algebra.quiver().arrows().iter().zip(&self.matrices) {
            let (s, t) = (a.source, a.target);
            let mut sm = Matrix::zeros(f, sub_dims[t], sub_dims[s]);
            for j in 0..sub_dims[s] {
                let image = x.apply(f, spaces[s].basis().row(j));
                for (i, c) in spaces[t].coordinates(&image).into_iter().enumerate() {
                    sm.set(i, j, c);
                }
            }
            sub_mats.push(sm);
            let mut qm = Matrix::zeros(f, quo_dims[t], quo_dims[s]);
            for (j, &col) in complements[s].iter().enumerate() {
                let image = x.column(col);
                let reduced = spaces[t].reduce(f, &image);
                for (i, &row) in complements[t].iter().enumerate() {
                    qm.set(i, j, reduced[row].clone());
                }
            }
            quo_mats.push(qm);
        }

        let inclusion = ModuleMap {
            components: spaces.iter().map(|s| s.basis().transpose()).collect(),
        };
        let projection = ModuleMap {
            components: spaces
                .iter()
                .zip(&complements)
                .zip(&self.dims)
                .map(|((s, comp), &d)| {
                    let mut p = Matrix::zeros(f, comp.len(), d);
                    for k in 0..d {
                        let mut e = vec![f.zero(); d];
                        e[k] = f.one();
                        let reduced = s.reduce(f, &e);
                        for (i, &row) in comp.iter().enumerate() {
                            p.set(i, k, reduced[row].clone());
                        }
                    }
                    p
                })
                .collect(),
        };
        let section = ModuleMap {
            components: complements
                .iter()
                .zip(&self.dims)
                .map(|(comp, &d)| {
                    let mut m = Matrix::zeros(f, d, comp.len());
                    for (j, &row) in comp.iter().enumerate() {
                        m.set(row, j, f.one());
                    }
                    m
                })
                .collect(),
        };
        Ok(SubQuotient {
            sub: RepModule {
                algebra: self.algebra.clone(),
                field: f.clone(),
                dims: sub_dims,
                matrices: sub_mats,
            },
            quotient: RepModule {
                algebra: self.algebra.clone(),
                field: f.clone(),
                dims: quo_dims,
                matrices: quo_mats,
            },
            inclusion,
            projection,
            section,
        })
    }

    /// Kernel of a module map out of `self`, as a submodule witness.
    pub fn kernel_witness(&self, map: &ModuleMap<F::Elem>) -> SubmoduleWitness<F::Elem> {
        let f = &self.field;
        SubmoduleWitness {
            spaces: map
                .components
                .iter()
                .map(|m| crate::linalg::kernel_solve(f, m, None).kernel)
                .collect(),
        }
    }

    /// Image of a module map into `self`, as a submodule witness.
    pub fn image_witness(&self, map: &ModuleMap<F::Elem>) -> SubmoduleWitness<F::Elem> {
        let f = &self.field;
        SubmoduleWitness {
            spaces: map
                .components
                .iter()
                .map(|m| Subspace::from_rows(f, m.transpose()))
                .collect(),
        }
    }

    pub fn identity_map(&self) -> ModuleMap<F::Elem> {
        ModuleMap {
            components: self
                .dims
                .iter()
                .map(|&d| Matrix::identity(&self.field, d))
                .collect(),
        }
    }

    pub fn zero_map_to(&self, target: &Self) -> ModuleMap<F::Elem> {
        ModuleMap {
            components: self
                .dims
                .iter()
                .zip(&target.dims)
                .map(|(&s, &t)| Matrix::zeros(&self.field, t, s))
                .collect(),
        }
    }

    /// Whether `map: self -> target` intertwines the arrow actions.
    pub fn is_homomorphism(&self, target: &Self, map: &ModuleMap<F::Elem>) -> bool {
        let f = &self.field;
        if map.components.len() != self.dims.len() {
            return false;
        }
        for (i, m) in map.components.iter().enumerate() {
            if m.shape() != (target.dims[i], self.dims[i]) {
                return false;
            }
        }
        self.algebra
            .quiver()
            .arrows()
            .iter()
            .enumerate()
            .all(|(k, a)| {
                let lhs = map.components[a.target].dot(f, &self.matrices[k]);
                let rhs = target.matrices[k].dot(f, &map.components[a.source]);
                lhs == rhs
            })
    }
}

impl RepModule<Rationals> {
    /// Convenience constructor from integer matrices given per arrow name;
    /// arrows not listed act by zero.
    pub fn from_integer_matrices(
        algebra: &Arc<AlgebraPresentation>,
        dims: &[usize],
        entries: &[(&str, &[&[i64]])],
    ) -> Result<Self> {
        let f = Rationals;
        let quiver = algebra.quiver();
        let mut matrices: Vec<Matrix<BigRational>> = quiver
            .arrows()
            .iter()
            .map(|a| Matrix::zeros(&f, dims.get(a.target).copied().unwrap_or(0), dims.get(a.source).copied().unwrap_or(0)))
            .collect();
        for (name, rows) in entries {
            let idx = quiver.arrow_index(name)?;
            matrices[idx] = if rows.is_empty() {
                Matrix::zeros(&f, 0, 0)
            } else {
                Matrix::from_i64(&f, rows)
            };
        }
        check_module(algebra.clone(), f, dims.to_vec(), matrices)
    }

    /// Reduction modulo `p`; fails when an entry or relation coefficient has a
    /// denominator divisible by `p`.
    pub fn reduce_mod(&self, p: u64) -> Result<RepModule<PrimeField>> {
        let fp = PrimeField::new(p)?;
        let matrices = self
            .matrices
            .iter()
            .map(|m| m.try_map(|x| fp.from_rational(x)))
            .collect::<Result<Vec<_>>>()?;
        check_module(self.algebra.clone(), fp, self.dims.clone(), matrices)
    }

    /// Random base change with small integer entries (used by invariance checks).
    pub fn random_conjugate<R: Rng>(&self, rng: &mut R) -> Self {
        let f = Rationals;
        loop {
            let g: Vec<Matrix<BigRational>> = self
                .dims
                .iter()
                .map(|&d| {
                    let data = (0..d * d).map(|_| f.from_i64(rng.gen_range(-2..=2))).collect();
                    Matrix::from_vec(d, d, data)
                })
                .collect();
            if let Ok(m) = self.conjugate(&g) {
                return m;
            }
        }
    }
}

/// Per-vertex family of subspaces closed under the arrow maps.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubmoduleWitness<E> {
    spaces: Vec<Subspace<E>>,
}

impl<E: Clone> SubmoduleWitness<E> {
    pub fn spaces(&self) -> &[Subspace<E>] {
        &self.spaces
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.dim()).collect()
    }

    pub fn into_spaces(self) -> Vec<Subspace<E>> {
        self.spaces
    }

    pub fn contains<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> bool {
        self.spaces
            .iter()
            .zip(&other.spaces)
            .all(|(a, b)| a.contains_subspace(f, b))
    }

    pub fn sum<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        SubmoduleWitness {
            spaces: self
                .spaces
                .iter()
                .zip(&other.spaces)
                .map(|(a, b)| a.sum(f, b))
                .collect(),
        }
    }

    /// Pushes a witness along a module map (e.g. from a submodule into its ambient module).
    pub fn map_forward<F: Field<Elem = E>>(&self, f: &F, map: &ModuleMap<E>) -> Self {
        SubmoduleWitness {
            spaces: self
                .spaces
                .iter()
                .zip(&map.components)
                .map(|(s, m)| s.image(f, m))
                .collect(),
        }
    }
}

/// Linear maps between modules, one matrix per vertex (`target_dim x source_dim`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModuleMap<E> {
    pub components: Vec<Matrix<E>>,
}

impl<E: Clone> ModuleMap<E> {
    pub fn new(components: Vec<Matrix<E>>) -> Self {
        ModuleMap { components }
    }

    /// `self ∘ other`
    pub fn compose<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        ModuleMap {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.dot(f, b))
                .collect(),
        }
    }

    pub fn ranks<F: Field<Elem = E>>(&self, f: &F) -> Vec<usize> {
        self.components.iter().map(|m| m.rank(f)).collect()
    }

    pub fn is_injective<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.components.iter().all(|m| m.rank(f) == m.cols())
    }

    pub fn is_surjective<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.components.iter().all(|m| m.rank(f) == m.rows())
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.components.iter().all(|m| m.is_zero(f))
    }

    pub fn is_invertible<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.components
            .iter()
            .all(|m| m.rows() == m.cols() && m.rank(f) == m.rows())
    }

    pub fn linear_combination<F: Field<Elem = E>>(f: &F, maps: &[Self], coeffs: &[E], template: &Self) -> Self {
        let mut components: Vec<Matrix<E>> = template
            .components
            .iter()
            .map(|m| Matrix::zeros(f, m.rows(), m.cols()))
            .collect();
        for (map, c) in maps.iter().zip(coeffs) {
            if f.is_zero(c) {
                continue;
            }
            for (acc, m) in components.iter_mut().zip(&map.components) {
                *acc = acc.add(f, &m.scale(f, c));
            }
        }
        ModuleMap { components }
    }
}

pub struct SubQuotient<F: Field> {
    pub sub: RepModule<F>,
    pub quotient: RepModule<F>,
    pub inclusion: ModuleMap<F::Elem>,
    pub projection: ModuleMap<F::Elem>,
    /// Linear (not necessarily module) section of the projection given by the
    /// quotient's complement coordinates.
    pub section: ModuleMap<F::Elem>,
}
