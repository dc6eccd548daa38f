//! `Ext¹(X, Y)` through the space `D(X, Y)` of arrow tuples whose block matrices
//! `L(d)_α = [[Y_α, d(α)], [0, X_α]]` satisfy the relations, modulo the trivial
//! tuples `φ_{t(α)} X_α − Y_α φ_{s(α)}`.

use crate::algebra::{evaluate_path, Path};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::hom::{arrow_offsets, check_compatible, coboundary_matrix};
use crate::linalg::{kernel_solve, Subspace};
use crate::matrix::Matrix;
use crate::module::{check_module, ModuleMap, RepModule};

/// An extension space with a fixed complement `E(X,Y)` of the trivial tuples.
#[derive(Debug, Clone)]
pub struct ExtSpace<F: Field> {
    x: RepModule<F>,
    y: RepModule<F>,
    offsets: Vec<usize>,
    ambient: usize,
    d_space: Subspace<F::Elem>,
    trivial: Subspace<F::Elem>,
    /// Indices of the `D`-basis rows spanning the complement.
    complement: Vec<usize>,
    /// Last `m` rows of the inverse of `[trivial | complement]` in `D`-coordinates.
    projector: Matrix<F::Elem>,
}

/// An element of `Ext¹(X, Y)` in complement coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtClass<E> {
    pub coords: Vec<E>,
}

/// Which side of an extension a module map acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportSide {
    /// `Y -> Y′`, acting by `d(α) ↦ f_{t(α)} d(α)`.
    Pushout,
    /// `X′ -> X`, acting by `d(α) ↦ d(α) g_{s(α)}`.
    Pullback,
}

/// Realized extension `0 -> Y -> L -> X -> 0`.
#[derive(Debug, Clone)]
pub struct MiddleTerm<F: Field> {
    pub module: RepModule<F>,
    pub inclusion: ModuleMap<F::Elem>,
    pub projection: ModuleMap<F::Elem>,
}

/// Linear system whose kernel is `D(X, Y)`: for each relation, the off-diagonal
/// block of `Σ λ L(d)_p` is `Σ_k Y_{α1..α(k-1)} d(α_k) X_{α(k+1)..αm}`.
fn relation_system<F: Field>(x: &RepModule<F>, y: &RepModule<F>, offsets: &[usize], ambient: usize) -> Result<Matrix<F::Elem>> {
    let f = x.field();
    let alg = x.algebra();
    let quiver = alg.quiver();
    let (xd, yd) = (x.dims(), y.dims());
    let mut rows: Vec<Vec<F::Elem>> = Vec::new();
    for rel in alg.relations() {
        let (rs, rt) = (rel.source(), rel.target());
        let nrows = yd[rt] * xd[rs];
        let base = rows.len();
        rows.extend((0..nrows).map(|_| vec![f.zero(); ambient]));
        for (coeff, path) in rel.terms() {
            let arrows = match path {
                Path::Vertex(_) => continue,
                Path::Arrows(a) => a,
            };
            let c = f.from_rational(coeff)?;
            for k in 0..arrows.len() {
                let alpha = &quiver.arrows()[arrows[k]];
                let ypre = if k == 0 {
                    Matrix::identity(f, yd[rt])
                } else {
                    evaluate_path(f, quiver, y.matrices(), yd, &Path::Arrows(arrows[..k].to_vec()))?
                };
                let xsuf = if k + 1 == arrows.len() {
                    Matrix::identity(f, xd[rs])
                } else {
                    evaluate_path(f, quiver, x.matrices(), xd, &Path::Arrows(arrows[k + 1..].to_vec()))?
                };
                let (ta, sa) = (alpha.target, alpha.source);
                let off = offsets[arrows[k]];
                for r in 0..yd[rt] {
                    for a in 0..yd[ta] {
                        let ya = ypre.get(r, a);
                        if f.is_zero(ya) {
                            continue;
                        }
                        let cya = f.mul(&c, ya);
                        for b in 0..xd[sa] {
                            let col = off + a * xd[sa] + b;
                            for cc in 0..xd[rs] {
                                let xb = xsuf.get(b, cc);
                                if f.is_zero(xb) {
                                    continue;
                                }
                                let row = &mut rows[base + r * xd[rs] + cc];
                                f.mul_add_assign(&mut row[col], &cya, xb);
                            }
                        }
                    }
                }
            }
        }
    }
    let n = rows.len();
    Ok(Matrix::from_rows(rows, ambient).submatrix(0..n, 0..ambient))
}

impl<F: Field> ExtSpace<F> {
    /// Computes `D(X,Y)`, the trivial tuples and a deterministic complement.
    pub fn new(x: &RepModule<F>, y: &RepModule<F>) -> Result<Self> {
        check_compatible(x, y)?;
        let f = x.field();
        let (offsets, ambient) = arrow_offsets(x, y);
        let system = relation_system(x, y, &offsets, ambient)?;
        let d_space = kernel_solve(f, &system, None).kernel;
        let cob = coboundary_matrix(x, y);
        let trivial = Subspace::from_rows(f, cob.transpose());
        debug_assert!(d_space.contains_subspace(f, &trivial));

        let dim_d = d_space.dim();
        let k = trivial.dim();
        // trivial basis in D-coordinates, then greedy unit vectors
        let mut columns: Vec<Vec<F::Elem>> = (0..k)
            .map(|r| d_space.coordinates(trivial.basis().row(r)))
            .collect();
        let mut span = Subspace::from_vectors(f, dim_d, columns.clone());
        let mut complement = Vec::new();
        for j in 0..dim_d {
            if span.dim() == dim_d {
                break;
            }
            let mut e = vec![f.zero(); dim_d];
            e[j] = f.one();
            if !span.contains(f, &e) {
                columns.push(e.clone());
                span = span.sum(f, &Subspace::from_vectors(f, dim_d, vec![e]));
                complement.push(j);
            }
        }
        let m = complement.len();
        let square = Matrix::from_rows(columns, dim_d).transpose();
        let projector = if dim_d == 0 {
            Matrix::zeros(f, 0, 0)
        } else {
            square
                .inverse(f)
                .expect("trivial part and complement form a basis")
                .submatrix(k..k + m, 0..dim_d)
        };
        Ok(ExtSpace {
            x: x.clone(),
            y: y.clone(),
            offsets,
            ambient,
            d_space,
            trivial,
            complement,
            projector,
        })
    }

    pub fn x(&self) -> &RepModule<F> {
        &self.x
    }

    pub fn y(&self) -> &RepModule<F> {
        &self.y
    }

    pub fn field(&self) -> &F {
        self.x.field()
    }

    /// `dim Ext¹(X, Y)`.
    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    pub fn d_dim(&self) -> usize {
        self.d_space.dim()
    }

    pub fn trivial_dim(&self) -> usize {
        self.trivial.dim()
    }

    pub fn d_space(&self) -> &Subspace<F::Elem> {
        &self.d_space
    }

    pub fn trivial_space(&self) -> &Subspace<F::Elem> {
        &self.trivial
    }

    pub fn zero_class(&self) -> ExtClass<F::Elem> {
        ExtClass {
            coords: vec![self.field().zero(); self.dim()],
        }
    }

    pub fn basis_class(&self, i: usize) -> ExtClass<F::Elem> {
        let f = self.field();
        let mut coords = vec![f.zero(); self.dim()];
        coords[i] = f.one();
        ExtClass { coords }
    }

    pub fn class(&self, coords: Vec<F::Elem>) -> Result<ExtClass<F::Elem>> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "class has {} coordinates, Ext space has dimension {}",
                coords.len(),
                self.dim()
            )));
        }
        Ok(ExtClass { coords })
    }

    /// Tuple `d` in `E(X,Y)` representing the class.
    pub fn representative(&self, class: &ExtClass<F::Elem>) -> Vec<F::Elem> {
        let f = self.field();
        let mut d = vec![f.zero(); self.ambient];
        for (c, &j) in class.coords.iter().zip(&self.complement) {
            if f.is_zero(c) {
                continue;
            }
            for (acc, b) in d.iter_mut().zip(self.d_space.basis().row(j)) {
                f.mul_add_assign(acc, c, b);
            }
        }
        d
    }

    /// Class of an arbitrary tuple in `D(X,Y)`.
    pub fn class_of(&self, d: &[F::Elem]) -> Result<ExtClass<F::Elem>> {
        let f = self.field();
        if d.len() != self.ambient || !self.d_space.contains(f, d) {
            return Err(Error::DimensionMismatch("tuple does not lie in D(X,Y)".into()));
        }
        let coords = self.d_space.coordinates(d);
        Ok(ExtClass {
            coords: if self.dim() == 0 {
                Vec::new()
            } else {
                self.projector.apply(f, &coords)
            },
        })
    }

    /// Per-arrow blocks `d(α)` of a tuple.
    pub fn blocks(&self, d: &[F::Elem]) -> Vec<Matrix<F::Elem>> {
        let f = self.field();
        self.x
            .algebra()
            .quiver()
            .arrows()
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let (r, c) = (self.y.dims()[a.target], self.x.dims()[a.source]);
                if r * c == 0 {
                    Matrix::zeros(f, r, c)
                } else {
                    Matrix::from_vec(r, c, d[self.offsets[k]..self.offsets[k] + r * c].to_vec())
                }
            })
            .collect()
    }

    fn flatten(&self, blocks: &[Matrix<F::Elem>]) -> Vec<F::Elem> {
        let mut out = Vec::with_capacity(self.ambient);
        for b in blocks {
            out.extend_from_slice(b.data());
        }
        out
    }

    /// `L(d)` with its inclusion of `Y` and projection onto `X`.
    pub fn middle_term(&self, class: &ExtClass<F::Elem>) -> Result<MiddleTerm<F>> {
        self.middle_term_of_tuple(&self.representative(class))
    }

    pub fn middle_term_of_tuple(&self, d: &[F::Elem]) -> Result<MiddleTerm<F>> {
        let f = self.field();
        let (xd, yd) = (self.x.dims(), self.y.dims());
        let blocks = self.blocks(d);
        let dims: Vec<usize> = xd.iter().zip(yd).map(|(a, b)| a + b).collect();
        let matrices = self
            .x
            .algebra()
            .quiver()
            .arrows()
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let (s, t) = (a.source, a.target);
                let mut m = Matrix::zeros(f, dims[t], dims[s]);
                let ya = self.y.matrix(k);
                for r in 0..yd[t] {
                    for c in 0..yd[s] {
                        m.set(r, c, ya.get(r, c).clone());
                    }
                    for c in 0..xd[s] {
                        m.set(r, yd[s] + c, blocks[k].get(r, c).clone());
                    }
                }
                let xa = self.x.matrix(k);
                for r in 0..xd[t] {
                    for c in 0..xd[s] {
                        m.set(yd[t] + r, yd[s] + c, xa.get(r, c).clone());
                    }
                }
                m
            })
            .collect();
        let module = check_module(self.x.algebra().clone(), f.clone(), dims.clone(), matrices)?;
        let inclusion = ModuleMap::new(
            (0..dims.len())
                .map(|i| {
                    let mut m = Matrix::zeros(f, dims[i], yd[i]);
                    for r in 0..yd[i] {
                        m.set(r, r, f.one());
                    }
                    m
                })
                .collect(),
        );
        let projection = ModuleMap::new(
            (0..dims.len())
                .map(|i| {
                    let mut m = Matrix::zeros(f, xd[i], dims[i]);
                    for r in 0..xd[i] {
                        m.set(r, yd[i] + r, f.one());
                    }
                    m
                })
                .collect(),
        );
        Ok(MiddleTerm {
            module,
            inclusion,
            projection,
        })
    }

    /// Transports a class into `target` along `map` (pushout: `Y -> target.Y`;
    /// pullback: `target.X -> X`).
    pub fn transport(
        &self,
        class: &ExtClass<F::Elem>,
        map: &ModuleMap<F::Elem>,
        side: TransportSide,
        target: &ExtSpace<F>,
    ) -> Result<ExtClass<F::Elem>> {
        self.check_transport(map, side, target)?;
        let f = self.field();
        let blocks = self.blocks(&self.representative(class));
        let arrows = self.x.algebra().quiver().arrows();
        let moved: Vec<Matrix<F::Elem>> = blocks
            .iter()
            .zip(arrows)
            .map(|(b, a)| match side {
                TransportSide::Pushout => map.components[a.target].dot(f, b),
                TransportSide::Pullback => b.dot(f, &map.components[a.source]),
            })
            .collect();
        target.class_of(&target.flatten(&moved))
    }

    fn check_transport(&self, map: &ModuleMap<F::Elem>, side: TransportSide, target: &ExtSpace<F>) -> Result<()> {
        let n = self.x.dims().len();
        if map.components.len() != n {
            return Err(Error::ModuleMismatch("map has the wrong number of components".into()));
        }
        let ok = match side {
            TransportSide::Pushout => {
                target.x.dims() == self.x.dims()
                    && target.x.matrices() == self.x.matrices()
                    && (0..n).all(|i| map.components[i].shape() == (target.y.dims()[i], self.y.dims()[i]))
            }
            TransportSide::Pullback => {
                target.y.dims() == self.y.dims()
                    && target.y.matrices() == self.y.matrices()
                    && (0..n).all(|i| map.components[i].shape() == (self.x.dims()[i], target.x.dims()[i]))
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ModuleMismatch(format!("endpoint mismatch for {side:?}")))
        }
    }

    /// Matrix of the transport in complement coordinates (columns: classes of `self`).
    pub fn transport_matrix(&self, map: &ModuleMap<F::Elem>, side: TransportSide, target: &ExtSpace<F>) -> Result<Matrix<F::Elem>> {
        let f = self.field();
        let mut out = Matrix::zeros(f, target.dim(), self.dim());
        for j in 0..self.dim() {
            let image = self.transport(&self.basis_class(j), map, side, target)?;
            for (i, v) in image.coords.into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        Ok(out)
    }
}

/// `dim Ext¹(X, Y)`.
pub fn ext_dim<F: Field>(x: &RepModule<F>, y: &RepModule<F>) -> Result<usize> {
    Ok(ExtSpace::new(x, y)?.dim())
}

/// A linear map into (or out of) a direct sum whose first summand is singled out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMap<E> {
    pub matrix: Matrix<E>,
    /// Size of the first summand: rows for `β`, columns for `β′`.
    pub first: usize,
}

impl<E: Clone> SplitMap<E> {
    /// `dim {ε : (ε, 0, …, 0) ∈ Im}` for a map into a sum whose first summand has `first` rows.
    pub fn first_summand_image_dim<F: Field<Elem = E>>(&self, f: &F) -> usize {
        let rows = self.matrix.rows();
        let cols = self.matrix.cols();
        let rest = self.matrix.submatrix(self.first..rows, 0..cols);
        let kernel = kernel_solve(f, &rest, None).kernel;
        if kernel.dim() == 0 {
            return 0;
        }
        let head = self.matrix.submatrix(0..self.first, 0..cols);
        head.dot(f, &kernel.basis().transpose()).rank(f)
    }

    /// `dim p₀(Ker)` for a map out of a sum whose first summand has `first` columns.
    pub fn projected_kernel_dim<F: Field<Elem = E>>(&self, f: &F) -> usize {
        let kernel = kernel_solve(f, &self.matrix, None).kernel;
        if kernel.dim() == 0 || self.first == 0 {
            return 0;
        }
        kernel.basis().submatrix(0..kernel.dim(), 0..self.first).rank(f)
    }
}

fn stack_rows<F: Field>(f: &F, blocks: &[Matrix<F::Elem>], cols: usize) -> Matrix<F::Elem> {
    blocks
        .iter()
        .fold(Matrix::zeros(f, 0, cols), |acc, b| acc.vstack(b))
}

/// `β_{N₁,M₁}: Ext¹(N,M₁) → Ext¹(N,M) ⊕ Ext¹(N₁,M₁)`, `ε ↦ (ι_M ∘ ε, ε ∘ ι_N)`.
/// `m1` and `n1` are the submodules with their inclusions into `m` and `n`.
pub fn beta_map<F: Field>(
    n: &RepModule<F>,
    n1: (&RepModule<F>, &ModuleMap<F::Elem>),
    m: &RepModule<F>,
    m1: (&RepModule<F>, &ModuleMap<F::Elem>),
) -> Result<SplitMap<F::Elem>> {
    let f = n.field();
    let source = ExtSpace::new(n, m1.0)?;
    let first = ExtSpace::new(n, m)?;
    let second = ExtSpace::new(n1.0, m1.0)?;
    let push = source.transport_matrix(m1.1, TransportSide::Pushout, &first)?;
    let pull = source.transport_matrix(n1.1, TransportSide::Pullback, &second)?;
    Ok(SplitMap {
        matrix: stack_rows(f, &[push, pull], source.dim()),
        first: first.dim(),
    })
}

/// `β′_{M₁,N₁}: Ext¹(M,N) ⊕ Ext¹(M₁,N₁) → Ext¹(M₁,N)`, `(ε, ε′) ↦ ε ∘ ι_M − ι_N ∘ ε′`.
pub fn beta_prime_map<F: Field>(
    m: &RepModule<F>,
    m1: (&RepModule<F>, &ModuleMap<F::Elem>),
    n: &RepModule<F>,
    n1: (&RepModule<F>, &ModuleMap<F::Elem>),
) -> Result<SplitMap<F::Elem>> {
    let f = m.field();
    let first = ExtSpace::new(m, n)?;
    let second = ExtSpace::new(m1.0, n1.0)?;
    let target = ExtSpace::new(m1.0, n)?;
    let pull = first.transport_matrix(m1.1, TransportSide::Pullback, &target)?;
    let push = second.transport_matrix(n1.1, TransportSide::Pushout, &target)?;
    Ok(SplitMap {
        matrix: pull.hstack(&push.scale(f, &f.neg(&f.one()))),
        first: first.dim(),
    })
}

/// One step of a flag, `M_k` with its inclusion into `M_{k-1}` (identity-free for `k = 0`).
#[derive(Debug, Clone)]
pub struct FlagStep<F: Field> {
    pub module: RepModule<F>,
    pub into_previous: Option<ModuleMap<F::Elem>>,
}

/// Flag `β` and `β′` for flags `M = M_0 ⊇ … ⊇ M_m = 0` and `N = N_0 ⊇ … ⊇ N_m = 0`
/// of the same length `m`:
/// `β((ε_k)) _k = ι_{M,k+1} ∘ ε_k − ε_{k−1} ∘ ι_{N,k}` on `⊕ Ext¹(N_k, M_{k+1})`, and
/// `β′((η_k))_k = η_k ∘ ι_{M,k+1} − ι_{N,k+1} ∘ η_{k+1}` on `⊕ Ext¹(M_k, N_k)`, the
/// last component being `η_{m−2} ∘ ι_{M,m−1}`. Sums run over `k = 0..m−2`.
pub fn beta_flag_maps<F: Field>(
    mflag: &[FlagStep<F>],
    nflag: &[FlagStep<F>],
) -> Result<(SplitMap<F::Elem>, SplitMap<F::Elem>)> {
    if mflag.len() != nflag.len() || mflag.is_empty() {
        return Err(Error::InvalidFlagType("flags must have the same positive length".into()));
    }
    let f = mflag[0].module.field();
    let len = mflag.len() - 1; // m
    if len < 2 {
        let z = Matrix::zeros(f, 0, 0);
        return Ok((SplitMap { matrix: z.clone(), first: 0 }, SplitMap { matrix: z, first: 0 }));
    }
    let blocks = len - 1; // k = 0..=m-2
    let incl = |flag: &[FlagStep<F>], k: usize| -> Result<ModuleMap<F::Elem>> {
        flag[k]
            .into_previous
            .clone()
            .ok_or_else(|| Error::InvalidFlagType(format!("missing inclusion at step {k}")))
    };

    // β
    let src: Vec<ExtSpace<F>> = (0..blocks)
        .map(|k| ExtSpace::new(&nflag[k].module, &mflag[k + 1].module))
        .collect::<Result<_>>()?;
    let tgt: Vec<ExtSpace<F>> = (0..blocks)
        .map(|k| ExtSpace::new(&nflag[k].module, &mflag[k].module))
        .collect::<Result<_>>()?;
    let src_off = offsets(src.iter().map(|s| s.dim()));
    let tgt_off = offsets(tgt.iter().map(|s| s.dim()));
    let mut beta = Matrix::zeros(f, *tgt_off.last().unwrap(), *src_off.last().unwrap());
    for k in 0..blocks {
        let push = src[k].transport_matrix(&incl(mflag, k + 1)?, TransportSide::Pushout, &tgt[k])?;
        place(f, &mut beta, tgt_off[k], src_off[k], &push, false);
        if k >= 1 {
            let pull = src[k - 1].transport_matrix(&incl(nflag, k)?, TransportSide::Pullback, &tgt[k])?;
            place(f, &mut beta, tgt_off[k], src_off[k - 1], &pull, true);
        }
    }

    // β′
    let psrc: Vec<ExtSpace<F>> = (0..blocks)
        .map(|k| ExtSpace::new(&mflag[k].module, &nflag[k].module))
        .collect::<Result<_>>()?;
    let ptgt: Vec<ExtSpace<F>> = (0..blocks)
        .map(|k| ExtSpace::new(&mflag[k + 1].module, &nflag[k].module))
        .collect::<Result<_>>()?;
    let psrc_off = offsets(psrc.iter().map(|s| s.dim()));
    let ptgt_off = offsets(ptgt.iter().map(|s| s.dim()));
    let mut beta_prime = Matrix::zeros(f, *ptgt_off.last().unwrap(), *psrc_off.last().unwrap());
    for k in 0..blocks {
        let pull = psrc[k].transport_matrix(&incl(mflag, k + 1)?, TransportSide::Pullback, &ptgt[k])?;
        place(f, &mut beta_prime, ptgt_off[k], psrc_off[k], &pull, false);
        if k + 1 < blocks {
            let push = psrc[k + 1].transport_matrix(&incl(nflag, k + 1)?, TransportSide::Pushout, &ptgt[k])?;
            place(f, &mut beta_prime, ptgt_off[k], psrc_off[k + 1], &push, true);
        }
    }
    Ok((
        SplitMap {
            matrix: beta,
            first: tgt[0].dim(),
        },
        SplitMap {
            matrix: beta_prime,
            first: psrc[0].dim(),
        },
    ))
}

fn offsets(dims: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut out = vec![0];
    for d in dims {
        out.push(out.last().unwrap() + d);
    }
    out
}

fn place<F: Field>(f: &F, m: &mut Matrix<F::Elem>, r0: usize, c0: usize, block: &Matrix<F::Elem>, negate: bool) {
    for r in 0..block.rows() {
        for c in 0..block.cols() {
            let v = if negate { f.neg(block.get(r, c)) } else { block.get(r, c).clone() };
            let cur = f.add(m.get(r0 + r, c0 + c), &v);
            m.set(r0 + r, c0 + c, cur);
        }
    }
}
