//! Point counts over prime fields: quiver Grassmannians, composition-series
//! flags, projectivized Ext strata by middle term, and the correction locus
//! `ℙEF^g`. Also good-prime screening.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::{ExtSpace, FlagStep, SplitMap, TransportSide};
use crate::field::{primes, Field, PrimeField};
use crate::hom::{hom_basis, hom_dim};
use crate::iso::{invariants, is_isomorphic, is_isomorphic_with, IsoInvariants, IsoOptions, IsoResult};
use crate::linalg::{enumerate_subspaces, Subspace};
use crate::matrix::Matrix;
use crate::module::{FpModule, ModuleMap, RationalModule, RepModule, SubmoduleWitness};

/// Number of points of `Gr_e(M)`.
pub fn count_grassmannian(m: &FpModule, e: &[usize]) -> Result<u64> {
    let mut n = 0u64;
    for_each_submodule(m, e, &mut |_| {
        n += 1;
        Ok(())
    })?;
    Ok(n)
}

/// Degree bound `Σ e_i (d_i − e_i)` for Grassmannian counts.
pub fn grassmannian_degree_bound(dims: &[usize], e: &[usize]) -> usize {
    dims.iter().zip(e).map(|(d, k)| k * (d - k)).sum()
}

/// Calls `visit` on every submodule of `m` with dimension vector `e`.
pub fn for_each_submodule(
    m: &FpModule,
    e: &[usize],
    visit: &mut dyn FnMut(&SubmoduleWitness<u64>) -> Result<()>,
) -> Result<()> {
    let dims = m.dims();
    if e.len() != dims.len() || e.iter().zip(dims).any(|(a, b)| a > b) {
        return Err(Error::DimensionMismatch(format!(
            "dimension vector {e:?} does not fit inside {dims:?}"
        )));
    }
    let q = m.field().modulus();
    let mut chosen: Vec<Subspace<u64>> = Vec::with_capacity(dims.len());
    submodule_rec(m, e, q, &mut chosen, visit)
}

fn submodule_rec(
    m: &FpModule,
    e: &[usize],
    q: u64,
    chosen: &mut Vec<Subspace<u64>>,
    visit: &mut dyn FnMut(&SubmoduleWitness<u64>) -> Result<()>,
) -> Result<()> {
    let v = chosen.len();
    if v == e.len() {
        let w = m.witness(chosen.clone())?;
        return visit(&w);
    }
    for u in enumerate_subspaces(m.dims()[v], e[v], q)? {
        chosen.push(u);
        if partial_stable(m, chosen) {
            submodule_rec(m, e, q, chosen, visit)?;
        }
        chosen.pop();
    }
    Ok(())
}

/// Stability of arrows whose endpoints are both among the chosen vertices and
/// one of which is the most recent.
fn partial_stable(m: &FpModule, chosen: &[Subspace<u64>]) -> bool {
    let f = m.field();
    let v = chosen.len() - 1;
    for (k, a) in m.algebra().quiver().arrows().iter().enumerate() {
        if a.source.max(a.target) != v {
            continue;
        }
        let (src, tgt) = (&chosen[a.source], &chosen[a.target]);
        for r in 0..src.dim() {
            let image = m.matrix(k).apply(f, src.basis().row(r));
            if !tgt.contains(f, &image) {
                return false;
            }
        }
    }
    true
}

/// A composition-series type: `V^{k−1}/V^k ≅ S_{j_k}` when `c_k` is set, else `V^k = V^{k−1}`.
/// Indices refer to a list of simples; `j_1` is the top factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlagType {
    pub j: Vec<usize>,
    pub c: Vec<bool>,
}

impl FlagType {
    pub fn full(j: Vec<usize>) -> Self {
        let c = vec![true; j.len()];
        FlagType { j, c }
    }

    pub fn new(j: Vec<usize>, c: Vec<bool>) -> Result<Self> {
        if j.len() != c.len() {
            return Err(Error::InvalidFlagType(format!(
                "j has length {} but c has length {}",
                j.len(),
                c.len()
            )));
        }
        Ok(FlagType { j, c })
    }

    pub fn len(&self) -> usize {
        self.j.len()
    }

    pub fn is_empty(&self) -> bool {
        self.j.is_empty()
    }

    /// Simples actually used, top first.
    pub fn active(&self) -> Vec<usize> {
        self.j
            .iter()
            .zip(&self.c)
            .filter(|(_, &c)| c)
            .map(|(&j, _)| j)
            .collect()
    }

    /// `Σ c_k dim S_{j_k}`.
    pub fn content(&self, simple_dims: &[Vec<usize>], vertices: usize) -> Result<Vec<usize>> {
        let mut d = vec![0; vertices];
        for j in self.active() {
            let s = simple_dims
                .get(j)
                .ok_or_else(|| Error::InvalidFlagType(format!("simple index {j} out of range")))?;
            for (a, b) in d.iter_mut().zip(s) {
                *a += b;
            }
        }
        Ok(d)
    }
}

impl fmt::Display for FlagType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j: Vec<String> = self.j.iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "({})", j.join(","))?;
        if self.c.iter().any(|c| !c) {
            let c: Vec<&str> = self.c.iter().map(|&c| if c { "1" } else { "0" }).collect();
            write!(f, "[{}]", c.join(""))?;
        }
        Ok(())
    }
}

/// Degree bound `Σ d_i (d_i − 1) / 2` for flag counts.
pub fn flag_degree_bound(dims: &[usize]) -> usize {
    dims.iter().map(|d| d * d.saturating_sub(1) / 2).sum()
}

fn check_flag_type(m: &FpModule, simples: &[FpModule], t: &FlagType) -> Result<()> {
    let sd: Vec<Vec<usize>> = simples.iter().map(|s| s.dims().to_vec()).collect();
    let content = t.content(&sd, m.dims().len())?;
    if content != m.dims() {
        return Err(Error::InvalidFlagType(format!(
            "type {t} has factor content {content:?}, module has dimension vector {:?}",
            m.dims()
        )));
    }
    Ok(())
}

/// Kernels of the surjections `v -> s`, one per kernel.
fn surjection_kernels(v: &FpModule, s: &FpModule) -> Result<Vec<SubmoduleWitness<u64>>> {
    let f = v.field();
    if s.dims().iter().zip(v.dims()).any(|(a, b)| a > b) {
        return Ok(Vec::new());
    }
    let hom = hom_basis(v, s)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for coeffs in projective_points(f.modulus(), hom.dim()) {
        let phi = hom.combination(&coeffs);
        if !phi.is_surjective(f) {
            continue;
        }
        let ker = v.kernel_witness(&phi);
        if seen.insert(ker.clone()) {
            out.push(ker);
        }
    }
    Ok(out)
}

/// Vectors of `F_q^m` whose first nonzero entry is 1: one per line.
pub fn projective_points(q: u64, m: usize) -> impl Iterator<Item = Vec<u64>> {
    (0..m).flat_map(move |lead| {
        let free = m - lead - 1;
        let total = (q as u128).pow(free as u32);
        (0..total).map(move |mut idx| {
            let mut v = vec![0u64; m];
            v[lead] = 1;
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = (idx % q as u128) as u64;
                idx /= q as u128;
            }
            v
        })
    })
}

/// Number of flags of type `t` in `m`. Subflag counts are shared between
/// isomorphic kernels.
pub fn count_flags(m: &FpModule, simples: &[FpModule], t: &FlagType) -> Result<u64> {
    check_flag_type(m, simples, t)?;
    let j = t.active();
    let mut counter = FlagCounter {
        simples,
        j: &j,
        memo: HashMap::new(),
    };
    counter.count(m, 0)
}

type MemoKey = (usize, IsoInvariants);

struct FlagCounter<'a> {
    simples: &'a [FpModule],
    j: &'a [usize],
    memo: HashMap<MemoKey, Vec<(FpModule, u64)>>,
}

impl FlagCounter<'_> {
    fn count(&mut self, v: &FpModule, pos: usize) -> Result<u64> {
        if pos == self.j.len() {
            return Ok(u64::from(v.is_zero()));
        }
        let key = (pos, invariants(v)?);
        if let Some(bucket) = self.memo.get(&key) {
            for (rep, n) in bucket {
                if let Ok(IsoResult::Isomorphic(_)) = is_isomorphic(rep, v) {
                    return Ok(*n);
                }
            }
        }
        let mut total = 0u64;
        for ker in surjection_kernels(v, &self.simples[self.j[pos]])? {
            let sub = v.sub_quotient(&ker)?.sub;
            total += self.count(&sub, pos + 1)?;
        }
        self.memo.entry(key).or_default().push((v.clone(), total));
        Ok(total)
    }
}

/// All flags of type `t`, each as the chain `V^0 = M ⊇ V^1 ⊇ … ⊇ V^m = 0` in the
/// coordinates of `m` (repeated entries at `c_k = 0` steps).
pub fn enumerate_flags(m: &FpModule, simples: &[FpModule], t: &FlagType) -> Result<Vec<Vec<SubmoduleWitness<u64>>>> {
    check_flag_type(m, simples, t)?;
    let mut out = Vec::new();
    let full = m.full_witness();
    let id = m.identity_map();
    flags_rec(m, simples, t, 0, m, &id, vec![full], &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn flags_rec(
    ambient: &FpModule,
    simples: &[FpModule],
    t: &FlagType,
    k: usize,
    v: &FpModule,
    into_ambient: &ModuleMap<u64>,
    chain: Vec<SubmoduleWitness<u64>>,
    out: &mut Vec<Vec<SubmoduleWitness<u64>>>,
) -> Result<()> {
    let f = ambient.field();
    if k == t.len() {
        if v.is_zero() {
            out.push(chain);
        }
        return Ok(());
    }
    if !t.c[k] {
        let mut next = chain;
        next.push(next.last().unwrap().clone());
        return flags_rec(ambient, simples, t, k + 1, v, into_ambient, next, out);
    }
    for ker in surjection_kernels(v, &simples[t.j[k]])? {
        let sq = v.sub_quotient(&ker)?;
        let composite = into_ambient.compose(f, &sq.inclusion);
        let in_ambient = sq.sub.full_witness().map_forward(f, &composite);
        let mut next = chain.clone();
        next.push(in_ambient);
        flags_rec(ambient, simples, t, k + 1, &sq.sub, &composite, next, out)?;
    }
    Ok(())
}

/// Modules `M_k` of a chain of submodules with the inclusions `M_k -> M_{k−1}`.
pub fn flag_steps<F: Field>(m: &RepModule<F>, chain: &[SubmoduleWitness<F::Elem>]) -> Result<Vec<FlagStep<F>>> {
    let f = m.field();
    let mut out = Vec::with_capacity(chain.len());
    for (k, w) in chain.iter().enumerate() {
        let module = m.sub_quotient(w)?.sub;
        let into_previous = if k == 0 {
            None
        } else {
            let prev = &chain[k - 1];
            let comps = w
                .spaces()
                .iter()
                .zip(prev.spaces())
                .map(|(u, p)| {
                    let mut mat = Matrix::zeros(f, p.dim(), u.dim());
                    for c in 0..u.dim() {
                        let row = u.basis().row(c);
                        if !p.contains(f, row) {
                            return Err(Error::InvalidFlagType("chain is not nested".into()));
                        }
                        for (r, v) in p.coordinates(row).into_iter().enumerate() {
                            mat.set(r, c, v);
                        }
                    }
                    Ok(mat)
                })
                .collect::<Result<Vec<_>>>()?;
            Some(ModuleMap::new(comps))
        };
        out.push(FlagStep { module, into_previous });
    }
    Ok(out)
}

/// `(q^w − 1)/(q − 1)`
pub fn projective_count(q: u64, w: usize) -> u64 {
    (0..w).map(|i| q.pow(i as u32)).sum()
}

/// Points of `ℙEF^g_e(N, M)`: over submodule pairs `M₁ ⊆ M`, `N₁ ⊆ N` with
/// `dim M₁ + dim N₁ = e`, the classes `ε ∈ ℙExt¹(N,M)` with `(ε,0) ∈ Im β_{N₁,M₁}`,
/// each carrying an affine space of lifts `L₁` (a torsor under `Hom(N₁, M/M₁)`).
pub fn count_efg(n: &FpModule, m: &FpModule, e: &[usize]) -> Result<u64> {
    let q = m.field().modulus();
    let mut total = 0u64;
    efg_terms(n, m, e, &mut |w, h| {
        total += projective_count(q, w) * q.pow(h as u32);
    })?;
    Ok(total)
}

/// Calls `term(w, h)` for every submodule pair with `w > 0`.
pub fn efg_terms(n: &FpModule, m: &FpModule, e: &[usize], term: &mut dyn FnMut(usize, usize)) -> Result<()> {
    let f = m.field();
    if e.len() != m.dims().len() {
        return Err(Error::DimensionMismatch("dimension vector length".into()));
    }
    let ext_nm = ExtSpace::new(n, m)?;
    if ext_nm.dim() == 0 {
        return Ok(());
    }
    for e1 in dims_below(m.dims()) {
        let Some(e2) = e.iter().zip(&e1).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        if e2.iter().zip(n.dims()).any(|(a, b)| a > b) {
            continue;
        }
        let mut m1s = Vec::new();
        for_each_submodule(m, &e1, &mut |w| {
            m1s.push(m.sub_quotient(w)?);
            Ok(())
        })?;
        let mut n1s = Vec::new();
        for_each_submodule(n, &e2, &mut |w| {
            n1s.push(n.sub_quotient(w)?);
            Ok(())
        })?;
        for m1 in &m1s {
            let ext_n_m1 = ExtSpace::new(n, &m1.sub)?;
            if ext_n_m1.dim() == 0 {
                continue;
            }
            let push = ext_n_m1.transport_matrix(&m1.inclusion, TransportSide::Pushout, &ext_nm)?;
            for n1 in &n1s {
                let ext_n1_m1 = ExtSpace::new(&n1.sub, &m1.sub)?;
                let pull = ext_n_m1.transport_matrix(&n1.inclusion, TransportSide::Pullback, &ext_n1_m1)?;
                let split = SplitMap {
                    matrix: push.vstack(&pull),
                    first: push.rows(),
                };
                let w = split.first_summand_image_dim(f);
                if w == 0 {
                    continue;
                }
                let h = hom_dim(&n1.sub, &m1.quotient)?;
                term(w, h);
            }
        }
    }
    Ok(())
}

/// Degree bound for `count_efg`: the larger of `Σ m_i n_i + dim Ext¹(N,M) + dim Hom(M,N)`
/// and the dimension estimate `max_{e₁+e₂=e} [dim Gr_{e₁}(M) + dim Gr_{e₂}(N) + Σ e₂_i (m_i − e₁_i)] + dim Ext¹(N,M) − 1`.
pub fn efg_degree_bound(m_dims: &[usize], n_dims: &[usize], e: &[usize], ext_nm: usize, hom_mn: usize) -> usize {
    let coarse: usize = m_dims.iter().zip(n_dims).map(|(a, b)| a * b).sum::<usize>() + ext_nm + hom_mn;
    let mut fine = 0;
    for e1 in dims_below(m_dims) {
        let Some(e2) = e.iter().zip(&e1).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        if e2.iter().zip(n_dims).any(|(a, b)| a > b) {
            continue;
        }
        let lifts: usize = e2.iter().zip(m_dims).zip(&e1).map(|((b, m), a)| b * (m - a)).sum();
        let d = grassmannian_degree_bound(m_dims, &e1) + grassmannian_degree_bound(n_dims, &e2) + lifts;
        fine = fine.max(d);
    }
    coarse.max(fine + ext_nm.saturating_sub(1))
}

/// All dimension vectors `e ≤ d` componentwise, in lexicographic order.
pub fn dims_below(d: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &di in d {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (0..=di).map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

/// Identifies modules over `F_p` with members of a catalog, using Hom-dimension
/// profiles as a filter and an isomorphism witness as proof.
pub struct CatalogMatcher {
    members: Vec<(String, FpModule)>,
    profiles: Vec<Vec<usize>>,
    iso: IsoOptions,
}

impl CatalogMatcher {
    pub fn new(members: Vec<(String, FpModule)>) -> Result<Self> {
        let mut matcher = CatalogMatcher {
            members,
            profiles: Vec::new(),
            iso: IsoOptions::default(),
        };
        let profiles = matcher
            .members
            .iter()
            .map(|(_, m)| matcher.profile(m))
            .collect::<Result<Vec<_>>>()?;
        matcher.profiles = profiles;
        Ok(matcher)
    }

    /// Enables the seeded randomized fast path of the isomorphism test.
    pub fn with_iso_options(mut self, iso: IsoOptions) -> Self {
        self.iso = iso;
        self
    }

    pub fn members(&self) -> &[(String, FpModule)] {
        &self.members
    }

    fn profile(&self, l: &FpModule) -> Result<Vec<usize>> {
        let mut p = l.dims().to_vec();
        for (_, c) in &self.members {
            if c.dims() == l.dims() {
                p.push(hom_dim(c, l)?);
                p.push(hom_dim(l, c)?);
            }
        }
        Ok(p)
    }

    /// Index of the catalog member isomorphic to `l`.
    pub fn identify(&self, l: &FpModule) -> Result<usize> {
        let p = self.profile(l)?;
        for (i, (_, c)) in self.members.iter().enumerate() {
            if self.profiles[i] != p {
                continue;
            }
            if is_isomorphic_with(c, l, self.iso)?.is_yes() {
                return Ok(i);
            }
        }
        Err(Error::CatalogIncomplete {
            middle_term: format!("{l:?}"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrataMode {
    /// One representative per line of `Ext¹(X,Y)`.
    Projective,
    /// Every nonzero class (the cone minus the origin).
    Cone,
}

/// Per-catalog-member counts of Ext classes by middle term.
pub fn stratify_ext_classes(x: &FpModule, y: &FpModule, matcher: &CatalogMatcher, mode: StrataMode) -> Result<Vec<u64>> {
    let ext = ExtSpace::new(x, y)?;
    let q = x.field().modulus();
    let mut counts = vec![0u64; matcher.members.len()];
    let m = ext.dim();
    let classify = |coords: Vec<u64>, counts: &mut Vec<u64>| -> Result<()> {
        let l = ext.middle_term(&ext.class(coords)?)?.module;
        counts[matcher.identify(&l)?] += 1;
        Ok(())
    };
    match mode {
        StrataMode::Projective => {
            for v in projective_points(q, m) {
                classify(v, &mut counts)?;
            }
            let total: u64 = counts.iter().sum();
            debug_assert_eq!(total, projective_count(q, m));
        }
        StrataMode::Cone => {
            let total = (q as u128).pow(m as u32);
            for mut idx in 1..total {
                let mut v = vec![0u64; m];
                for slot in v.iter_mut() {
                    *slot = (idx % q as u128) as u64;
                    idx /= q as u128;
                }
                classify(v, &mut counts)?;
            }
        }
    }
    Ok(counts)
}

/// Screens primes at which a set of rational modules keeps all pairwise Hom and
/// Ext¹ dimensions, so reductions count the reductions of the rational objects.
pub struct PrimeScreen {
    modules: Vec<RationalModule>,
    rational: Vec<(usize, usize)>,
    cache: HashMap<u64, bool>,
}

impl PrimeScreen {
    pub fn new(modules: Vec<RationalModule>) -> Result<Self> {
        let mut rational = Vec::new();
        for a in &modules {
            for b in &modules {
                rational.push((hom_dim(a, b)?, crate::ext::ext_dim(a, b)?));
            }
        }
        Ok(PrimeScreen {
            modules,
            rational,
            cache: HashMap::new(),
        })
    }

    pub fn is_good(&mut self, p: u64) -> Result<bool> {
        if let Some(&g) = self.cache.get(&p) {
            return Ok(g);
        }
        let good = self.check(p)?;
        self.cache.insert(p, good);
        Ok(good)
    }

    fn check(&self, p: u64) -> Result<bool> {
        let mut reduced = Vec::new();
        for m in &self.modules {
            match m.reduce_mod(p) {
                Ok(r) => reduced.push(r),
                Err(Error::BadPrime { .. }) | Err(Error::RelationViolated { .. }) => return Ok(false),
                Err(e) => return Err(e),
            }
        }
        let mut idx = 0;
        for a in &reduced {
            for b in &reduced {
                if (hom_dim(a, b)?, crate::ext::ext_dim(a, b)?) != self.rational[idx] {
                    return Ok(false);
                }
                idx += 1;
            }
        }
        Ok(true)
    }

    /// The smallest `count` good primes, or a check of an explicit list.
    pub fn select(&mut self, count: usize, explicit: Option<&[u64]>, label: &str) -> Result<Vec<u64>> {
        if let Some(list) = explicit {
            let mut out = Vec::new();
            for &p in list {
                PrimeField::new(p)?;
                if self.is_good(p)? {
                    out.push(p);
                } else {
                    log::warn!("{label}: skipping bad prime {p}");
                }
            }
            if out.len() < count {
                return Err(Error::NotEnoughSamples {
                    label: label.to_string(),
                    have: out.len(),
                    need: count,
                });
            }
            return Ok(out);
        }
        let mut out = Vec::new();
        for p in primes().take(MAX_PRIMES) {
            if self.is_good(p)? {
                out.push(p);
                if out.len() == count {
                    return Ok(out);
                }
            }
        }
        Err(Error::PrimesExhausted(label.to_string()))
    }
}

const MAX_PRIMES: usize = 200;
