//! Brute-force oracle for the A₂ preprojective algebra over small prime fields.
//! Everything is enumerated from sets of vectors; nothing here goes through the
//! library's linear algebra.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

pub type Vector = Vec<u64>;
pub type Mat = Vec<Vec<u64>>;
pub type Space = BTreeSet<Vector>;

/// A representation with `a: 1 -> 2` and `b = a*: 2 -> 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct A2Mod {
    pub d: [usize; 2],
    pub a: Mat,
    pub b: Mat,
}

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![0; c]; r]
}

pub fn mul(p: u64, x: &Mat, y: &Mat, inner: usize, rows: usize, cols: usize) -> Mat {
    let mut out = zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let mut s = 0;
            for k in 0..inner {
                s = (s + x[i][k] * y[k][j]) % p;
            }
            out[i][j] = s;
        }
    }
    out
}

fn apply(p: u64, m: &Mat, v: &[u64]) -> Vector {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b % p).sum::<u64>() % p).collect()
}

fn is_zero(m: &Mat) -> bool {
    m.iter().all(|r| r.iter().all(|&x| x == 0))
}

impl A2Mod {
    pub fn new(d: [usize; 2], a: Mat, b: Mat) -> Self {
        A2Mod { d, a, b }
    }

    pub fn s1() -> Self {
        A2Mod::new([1, 0], zeros(0, 1), zeros(1, 0))
    }

    pub fn s2() -> Self {
        A2Mod::new([0, 1], zeros(1, 0), zeros(0, 1))
    }

    pub fn p1() -> Self {
        A2Mod::new([1, 1], vec![vec![1]], vec![vec![0]])
    }

    pub fn p2() -> Self {
        A2Mod::new([1, 1], vec![vec![0]], vec![vec![1]])
    }

    pub fn sum(&self, o: &Self) -> Self {
        let blk = |x: &Mat, y: &Mat, r1: usize, c1: usize, r2: usize, c2: usize| {
            let mut m = zeros(r1 + r2, c1 + c2);
            for i in 0..r1 {
                for j in 0..c1 {
                    m[i][j] = x[i][j];
                }
            }
            for i in 0..r2 {
                for j in 0..c2 {
                    m[r1 + i][c1 + j] = y[i][j];
                }
            }
            m
        };
        A2Mod {
            d: [self.d[0] + o.d[0], self.d[1] + o.d[1]],
            a: blk(&self.a, &o.a, self.d[1], self.d[0], o.d[1], o.d[0]),
            b: blk(&self.b, &o.b, self.d[0], self.d[1], o.d[0], o.d[1]),
        }
    }

    pub fn satisfies_relations(&self, p: u64) -> bool {
        let ba = mul(p, &self.b, &self.a, self.d[1], self.d[0], self.d[0]);
        let ab = mul(p, &self.a, &self.b, self.d[0], self.d[1], self.d[1]);
        is_zero(&ba) && is_zero(&ab)
    }
}

pub fn all_vectors(p: u64, n: usize) -> Vec<Vector> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..p).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn all_matrices(p: u64, r: usize, c: usize) -> Vec<Mat> {
    all_vectors(p, r * c)
        .into_iter()
        .map(|v| (0..r).map(|i| v[i * c..(i + 1) * c].to_vec()).collect())
        .collect()
}

fn span_with(p: u64, s: &Space, v: &[u64]) -> Space {
    let mut out = s.clone();
    for w in s {
        for c in 0..p {
            out.insert(w.iter().zip(v).map(|(a, b)| (a + c * b) % p).collect());
        }
    }
    out
}

/// Every subspace of `F_p^n`, as its full set of vectors.
pub fn all_subspaces(p: u64, n: usize) -> Vec<Space> {
    let zero: Space = [vec![0; n]].into_iter().collect();
    let vectors = all_vectors(p, n);
    let mut seen: HashSet<Space> = HashSet::new();
    let mut frontier = vec![zero.clone()];
    seen.insert(zero);
    while let Some(s) = frontier.pop() {
        for v in &vectors {
            if !s.contains(v) {
                let t = span_with(p, &s, v);
                if seen.insert(t.clone()) {
                    frontier.push(t);
                }
            }
        }
    }
    seen.into_iter().collect()
}

fn dim_of(p: u64, s: &Space) -> usize {
    let mut n = s.len();
    let mut d = 0;
    while n > 1 {
        n /= p as usize;
        d += 1;
    }
    d
}

/// Submodules as pairs of vertex subspaces stable under both arrows.
pub fn submodules(p: u64, m: &A2Mod) -> Vec<(Space, Space)> {
    let s1 = all_subspaces(p, m.d[0]);
    let s2 = all_subspaces(p, m.d[1]);
    let mut out = Vec::new();
    for u1 in &s1 {
        for u2 in &s2 {
            let a_ok = u1.iter().all(|v| u2.contains(&apply(p, &m.a, v)));
            let b_ok = u2.iter().all(|v| u1.contains(&apply(p, &m.b, v)));
            if a_ok && b_ok {
                out.push((u1.clone(), u2.clone()));
            }
        }
    }
    out
}

pub fn sub_dims(p: u64, s: &(Space, Space)) -> [usize; 2] {
    [dim_of(p, &s.0), dim_of(p, &s.1)]
}

pub fn grassmannian(p: u64, m: &A2Mod, e: [usize; 2]) -> u64 {
    submodules(p, m).iter().filter(|s| sub_dims(p, s) == e).count() as u64
}

/// Chains `M = V^0 ⊋ V^1 ⊋ … ⊋ 0` whose successive quotients are the vertex simples `j`.
pub fn flags(p: u64, m: &A2Mod, j: &[usize]) -> u64 {
    let subs = submodules(p, m);
    let full = subs
        .iter()
        .find(|s| sub_dims(p, s) == m.d)
        .expect("whole module")
        .clone();
    fn rec(p: u64, subs: &[(Space, Space)], cur: &(Space, Space), j: &[usize]) -> u64 {
        let Some((&v, rest)) = j.split_first() else {
            return u64::from(cur.0.len() == 1 && cur.1.len() == 1);
        };
        let mut want = sub_dims(p, cur);
        if want[v] == 0 {
            return 0;
        }
        want[v] -= 1;
        let mut total = 0;
        for s in subs {
            if sub_dims(p, s) == want && s.0.is_subset(&cur.0) && s.1.is_subset(&cur.1) {
                total += rec(p, subs, s, rest);
            }
        }
        total
    }
    rec(p, &subs, &full, j)
}

/// A tuple in `D(X, Y)`: the `a` block is `y_2 × x_1`, the `b` block `y_1 × x_2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tuple {
    pub a: Mat,
    pub b: Mat,
}

pub fn middle(x: &A2Mod, y: &A2Mod, t: &Tuple) -> A2Mod {
    let d = [y.d[0] + x.d[0], y.d[1] + x.d[1]];
    let mut a = zeros(d[1], d[0]);
    let mut b = zeros(d[0], d[1]);
    for i in 0..y.d[1] {
        for j in 0..y.d[0] {
            a[i][j] = y.a[i][j];
        }
        for j in 0..x.d[0] {
            a[i][y.d[0] + j] = t.a[i][j];
        }
    }
    for i in 0..x.d[1] {
        for j in 0..x.d[0] {
            a[y.d[1] + i][y.d[0] + j] = x.a[i][j];
        }
    }
    for i in 0..y.d[0] {
        for j in 0..y.d[1] {
            b[i][j] = y.b[i][j];
        }
        for j in 0..x.d[1] {
            b[i][y.d[1] + j] = t.b[i][j];
        }
    }
    for i in 0..x.d[0] {
        for j in 0..x.d[1] {
            b[y.d[0] + i][y.d[1] + j] = x.b[i][j];
        }
    }
    A2Mod { d, a, b }
}

/// Tuples whose middle term satisfies the relations.
pub fn d_space(p: u64, x: &A2Mod, y: &A2Mod) -> Vec<Tuple> {
    let mut out = Vec::new();
    for a in all_matrices(p, y.d[1], x.d[0]) {
        for b in all_matrices(p, y.d[0], x.d[1]) {
            let t = Tuple { a: a.clone(), b };
            if middle(x, y, &t).satisfies_relations(p) {
                out.push(t);
            }
        }
    }
    out
}

fn sub(p: u64, x: &Mat, y: &Mat) -> Mat {
    x.iter()
        .zip(y)
        .map(|(r, s)| r.iter().zip(s).map(|(a, b)| (a + p - b) % p).collect())
        .collect()
}

fn add(p: u64, x: &Mat, y: &Mat) -> Mat {
    x.iter()
        .zip(y)
        .map(|(r, s)| r.iter().zip(s).map(|(a, b)| (a + b) % p).collect())
        .collect()
}

/// Coboundaries `(φ_2 X_a − Y_a φ_1, φ_1 X_b − Y_b φ_2)`.
pub fn trivial_space(p: u64, x: &A2Mod, y: &A2Mod) -> HashSet<Tuple> {
    let mut out = HashSet::new();
    for f1 in all_matrices(p, y.d[0], x.d[0]) {
        for f2 in all_matrices(p, y.d[1], x.d[1]) {
            let a = sub(
                p,
                &mul(p, &f2, &x.a, x.d[1], y.d[1], x.d[0]),
                &mul(p, &y.a, &f1, y.d[0], y.d[1], x.d[0]),
            );
            let b = sub(
                p,
                &mul(p, &f1, &x.b, x.d[0], y.d[0], x.d[1]),
                &mul(p, &y.b, &f2, y.d[1], y.d[0], x.d[1]),
            );
            out.insert(Tuple { a, b });
        }
    }
    out
}

pub fn ext_size(p: u64, x: &A2Mod, y: &A2Mod) -> (usize, usize) {
    (d_space(p, x, y).len(), trivial_space(p, x, y).len())
}

pub fn is_isomorphic(p: u64, x: &A2Mod, y: &A2Mod) -> bool {
    if x.d != y.d {
        return false;
    }
    let inv = |g: &Mat, n: usize| -> bool {
        // invertible iff only the zero vector is killed
        all_vectors(p, n).iter().filter(|v| apply(p, g, v).iter().all(|&c| c == 0)).count() == 1
    };
    for g1 in all_matrices(p, x.d[0], x.d[0]) {
        if !inv(&g1, x.d[0]) {
            continue;
        }
        for g2 in all_matrices(p, x.d[1], x.d[1]) {
            if !inv(&g2, x.d[1]) {
                continue;
            }
            let ok_a = mul(p, &g2, &x.a, x.d[1], x.d[1], x.d[0]) == mul(p, &y.a, &g1, y.d[0], y.d[1], y.d[0]);
            let ok_b = mul(p, &g1, &x.b, x.d[0], x.d[0], x.d[1]) == mul(p, &y.b, &g2, y.d[1], y.d[0], y.d[1]);
            if ok_a && ok_b {
                return true;
            }
        }
    }
    false
}

/// Number of points of `ℙExt¹(X,Y)` with middle term isomorphic to each catalog member.
pub fn strata(p: u64, x: &A2Mod, y: &A2Mod, catalog: &[A2Mod]) -> Vec<u64> {
    let triv = trivial_space(p, x, y);
    let mut counts = vec![0u64; catalog.len()];
    for t in d_space(p, x, y) {
        if triv.contains(&t) {
            continue;
        }
        let l = middle(x, y, &t);
        let i = catalog.iter().position(|c| is_isomorphic(p, c, &l)).expect("catalog covers the middle term");
        counts[i] += 1;
    }
    let per_point = triv.len() as u64 * (p - 1);
    counts.iter().map(|c| {
        assert_eq!(c % per_point, 0);
        c / per_point
    }).collect()
}

/// The submodule `{(m1, m2)}` of `M` given by a subspace of `M`'s coordinates
/// `(M_1, M_2)`, transported through the inclusion `M → L = M ⊕ N` on the `M` block.
fn restrict_to_m(l_sub: &(Space, Space), m: &A2Mod, n: &A2Mod) -> (Space, Space) {
    let take = |s: &Space, mdim: usize, ndim: usize| -> Space {
        s.iter()
            .filter(|v| v[mdim..mdim + ndim].iter().all(|&c| c == 0))
            .map(|v| v[..mdim].to_vec())
            .collect()
    };
    (take(&l_sub.0, m.d[0], n.d[0]), take(&l_sub.1, m.d[1], n.d[1]))
}

fn project_to_n(l_sub: &(Space, Space), m: &A2Mod) -> (Space, Space) {
    (
        l_sub.0.iter().map(|v| v[m.d[0]..].to_vec()).collect(),
        l_sub.1.iter().map(|v| v[m.d[1]..].to_vec()).collect(),
    )
}

fn basis_of(p: u64, s: &Space, n: usize) -> Vec<Vector> {
    let mut b: Vec<Vector> = Vec::new();
    let mut span: Space = [vec![0; n]].into_iter().collect();
    for v in s {
        if !span.contains(v) {
            span = span_with(p, &span, v);
            b.push(v.clone());
        }
    }
    b
}

/// Submodule of `X` given by vertex subspaces, as a module with its inclusion matrices.
fn as_module(p: u64, x: &A2Mod, s: &(Space, Space)) -> (A2Mod, Mat, Mat) {
    let b1 = basis_of(p, &s.0, x.d[0]);
    let b2 = basis_of(p, &s.1, x.d[1]);
    let (k1, k2) = (b1.len(), b2.len());
    // inclusion matrices: columns are basis vectors
    let i1: Mat = (0..x.d[0]).map(|r| b1.iter().map(|v| v[r]).collect()).collect();
    let i2: Mat = (0..x.d[1]).map(|r| b2.iter().map(|v| v[r]).collect()).collect();
    // coordinates of a vector of the subspace in the chosen basis, by search
    let coords = |basis: &[Vector], v: &Vector| -> Vector {
        all_vectors(p, basis.len())
            .into_iter()
            .find(|c| {
                let mut w = vec![0; v.len()];
                for (ci, bv) in c.iter().zip(basis) {
                    for (wj, bj) in w.iter_mut().zip(bv) {
                        *wj = (*wj + ci * bj) % p;
                    }
                }
                &w == v
            })
            .expect("vector lies in the subspace")
    };
    let mut a = zeros(k2, k1);
    for (j, v) in b1.iter().enumerate() {
        let c = coords(&b2, &apply(p, &x.a, v));
        for i in 0..k2 {
            a[i][j] = c[i];
        }
    }
    let mut b = zeros(k1, k2);
    for (j, v) in b2.iter().enumerate() {
        let c = coords(&b1, &apply(p, &x.b, v));
        for i in 0..k1 {
            b[i][j] = c[i];
        }
    }
    (A2Mod { d: [k1, k2], a, b }, i1, i2)
}

/// `χ`-free count of `EF^g_e(N, M)`: pairs `(ε, L₁)` with `ε ∈ ℙExt¹(N,M)`, `L₁` a
/// submodule of the middle term of dimension `e`, and `ε` in the image of
/// `Ext¹(N, M₁)` by pushout along `M₁ ⊆ M` through classes whose pullback to `N₁` splits.
pub fn efg(p: u64, n: &A2Mod, m: &A2Mod, e: [usize; 2]) -> u64 {
    let triv_nm = trivial_space(p, n, m);
    let mut total = 0u64;
    let mut w_cache: Vec<((Space, Space, Space, Space), HashSet<Tuple>)> = Vec::new();
    for t in d_space(p, n, m) {
        if triv_nm.contains(&t) {
            continue;
        }
        let l = middle(n, m, &t);
        for l1 in submodules(p, &l) {
            if sub_dims(p, &l1) != e {
                continue;
            }
            let m1 = restrict_to_m(&l1, m, n);
            let n1 = project_to_n(&l1, m);
            let key = (m1.0.clone(), m1.1.clone(), n1.0.clone(), n1.1.clone());
            let w = match w_cache.iter().find(|(k, _)| *k == key) {
                Some((_, w)) => w.clone(),
                None => {
                    let w = image_set(p, n, m, &m1, &n1, &triv_nm);
                    w_cache.push((key, w.clone()));
                    w
                }
            };
            if w.contains(&t) {
                total += 1;
            }
        }
    }
    let per_point = triv_nm.len() as u64 * (p - 1);
    assert_eq!(total % per_point, 0);
    total / per_point
}

/// All tuples of `D(N, M)` whose class is a pushout of some `ε″ ∈ Ext¹(N, M₁)` with
/// split pullback to `N₁`.
fn image_set(p: u64, n: &A2Mod, m: &A2Mod, m1: &(Space, Space), n1: &(Space, Space), triv_nm: &HashSet<Tuple>) -> HashSet<Tuple> {
    let (m1m, f1, f2) = as_module(p, m, m1);
    let (n1m, g1, g2) = as_module(p, n, n1);
    let triv_n1m1 = trivial_space(p, &n1m, &m1m);
    let mut out = HashSet::new();
    for t in d_space(p, n, &m1m) {
        // pullback along g: N₁ → N is d·g_s
        let pulled = Tuple {
            a: mul(p, &t.a, &g1, n.d[0], m1m.d[1], n1m.d[0]),
            b: mul(p, &t.b, &g2, n.d[1], m1m.d[0], n1m.d[1]),
        };
        if !triv_n1m1.contains(&pulled) {
            continue;
        }
        // pushout along f: M₁ → M is f_t·d
        let pushed = Tuple {
            a: mul(p, &f2, &t.a, m1m.d[1], m.d[1], n.d[0]),
            b: mul(p, &f1, &t.b, m1m.d[0], m.d[0], n.d[1]),
        };
        for c in triv_nm {
            out.insert(Tuple {
                a: add(p, &pushed.a, &c.a),
                b: add(p, &pushed.b, &c.b),
            });
        }
    }
    out
}
