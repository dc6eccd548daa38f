//! Quivers, paths, relations and algebra presentations `A = kQ/<R>`.
//!
//! Paths compose with the leftmost arrow applied last: the path `[a1, a2, ..., am]`
//! evaluates to `X_{a1} X_{a2} ... X_{am}`, so `am` acts first. Admissibility of
//! the relation ideal is not assumed.

use std::collections::HashSet;
use std::fmt;

use num::{BigRational, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{format_rational, rational, Field};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
}

impl Quiver {
    /// Builds a quiver from vertex ids and `(arrow, from, to)` triples.
    pub fn new<V, A>(vertices: V, arrows: A) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        A: IntoIterator<Item = (String, String, String)>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        if vertices.is_empty() {
            return Err(Error::InvalidQuiver("a quiver needs at least one vertex".into()));
        }
        let mut seen = HashSet::new();
        for v in &vertices {
            if !seen.insert(v.as_str()) {
                return Err(Error::InvalidQuiver(format!("duplicate vertex id {v:?}")));
            }
        }
        let lookup = |v: &str| {
            vertices
                .iter()
                .position(|x| x == v)
                .ok_or_else(|| Error::InvalidQuiver(format!("dangling arrow endpoint {v:?}")))
        };
        let mut names = HashSet::new();
        let mut out = Vec::new();
        for (name, from, to) in arrows {
            if !names.insert(name.clone()) {
                return Err(Error::InvalidQuiver(format!("duplicate arrow id {name:?}")));
            }
            out.push(Arrow {
                source: lookup(&from)?,
                target: lookup(&to)?,
                name,
            });
        }
        Ok(Quiver {
            vertices,
            arrows: out,
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v == id)
            .ok_or_else(|| Error::UnknownName(format!("vertex {id:?}")))
    }

    pub fn arrow_index(&self, name: &str) -> Result<usize> {
        self.arrows
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownName(format!("arrow {name:?}")))
    }

    pub fn has_loops(&self) -> bool {
        self.arrows.iter().any(|a| a.source == a.target)
    }
}

/// A path: a vertex (length 0) or a sequence of arrow indices, leftmost applied last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Path {
    Vertex(usize),
    Arrows(Vec<usize>),
}

impl Path {
    pub fn len(&self) -> usize {
        match self {
            Path::Vertex(_) => 0,
            Path::Arrows(a) => a.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks composability and returns `(source, target)`.
    pub fn endpoints(&self, quiver: &Quiver) -> Result<(usize, usize)> {
        match self {
            Path::Vertex(v) => {
                if *v >= quiver.vertex_count() {
                    return Err(Error::InvalidQuiver(format!("vertex index {v} out of range")));
                }
                Ok((*v, *v))
            }
            Path::Arrows(arrows) => {
                if arrows.is_empty() {
                    return Err(Error::InvalidQuiver("empty arrow path".into()));
                }
                for &a in arrows {
                    if a >= quiver.arrows.len() {
                        return Err(Error::InvalidQuiver(format!("arrow index {a} out of range")));
                    }
                }
                for w in arrows.windows(2) {
                    let (left, right) = (&quiver.arrows[w[0]], &quiver.arrows[w[1]]);
                    if left.source != right.target {
                        return Err(Error::InvalidQuiver(format!(
                            "non-composable path: {} does not start where {} ends",
                            left.name, right.name
                        )));
                    }
                }
                let first = &quiver.arrows[arrows[0]];
                let last = &quiver.arrows[*arrows.last().unwrap()];
                Ok((last.source, first.target))
            }
        }
    }

    pub fn display(&self, quiver: &Quiver) -> String {
        match self {
            Path::Vertex(v) => format!("e_{}", quiver.vertices[*v]),
            Path::Arrows(a) => a
                .iter()
                .map(|&i| quiver.arrows[i].name.as_str())
                .collect::<Vec<_>>()
                .join("·"),
        }
    }
}

/// Name-based path description, resolved against a quiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathSpec {
    Vertex(String),
    Arrows(Vec<String>),
}

impl PathSpec {
    pub fn arrows(names: &[&str]) -> Self {
        PathSpec::Arrows(names.iter().map(|s| s.to_string()).collect())
    }

    pub fn vertex(v: &str) -> Self {
        PathSpec::Vertex(v.to_string())
    }

    pub fn resolve(&self, quiver: &Quiver) -> Result<Path> {
        match self {
            PathSpec::Vertex(v) => Ok(Path::Vertex(quiver.vertex_index(v)?)),
            PathSpec::Arrows(names) => Ok(Path::Arrows(
                names
                    .iter()
                    .map(|n| quiver.arrow_index(n))
                    .collect::<Result<_>>()?,
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    terms: Vec<(BigRational, Path)>,
    source: usize,
    target: usize,
}

impl Relation {
    pub fn terms(&self) -> &[(BigRational, Path)] {
        &self.terms
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn display(&self, quiver: &Quiver) -> String {
        self.terms
            .iter()
            .map(|(c, p)| format!("({})·{}", format_rational(c), p.display(quiver)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSpec {
    pub terms: Vec<(BigRational, PathSpec)>,
}

impl RelationSpec {
    pub fn new(terms: Vec<(BigRational, PathSpec)>) -> Self {
        RelationSpec { terms }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraPresentation {
    quiver: Quiver,
    relations: Vec<Relation>,
}

/// Checks every relation against the quiver and assembles the presentation.
pub fn validate_presentation(quiver: Quiver, relations: Vec<RelationSpec>) -> Result<AlgebraPresentation> {
    let mut out = Vec::with_capacity(relations.len());
    for (index, spec) in relations.into_iter().enumerate() {
        let err = |reason: String| Error::InvalidRelation { index, reason };
        if spec.terms.is_empty() {
            return Err(err("empty relation".into()));
        }
        let mut terms = Vec::new();
        let mut endpoints = None;
        for (coeff, path) in spec.terms {
            if coeff.is_zero() {
                return Err(err("zero coefficient".into()));
            }
            let path = path.resolve(&quiver).map_err(|e| err(e.to_string()))?;
            let ends = path.endpoints(&quiver).map_err(|e| err(e.to_string()))?;
            match endpoints {
                None => endpoints = Some(ends),
                Some(prev) if prev != ends => {
                    return Err(err("mixed endpoints: all paths must share one source and one target".into()))
                }
                _ => {}
            }
            terms.push((coeff, path));
        }
        let (source, target) = endpoints.unwrap();
        out.push(Relation {
            terms,
            source,
            target,
        });
    }
    Ok(AlgebraPresentation {
        quiver,
        relations: out,
    })
}

impl AlgebraPresentation {
    pub fn path_algebra(quiver: Quiver) -> Self {
        AlgebraPresentation {
            quiver,
            relations: Vec::new(),
        }
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn vertex_count(&self) -> usize {
        self.quiver.vertex_count()
    }

    pub fn arrow_count(&self) -> usize {
        self.quiver.arrows.len()
    }
}

impl fmt::Display for AlgebraPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices: {}", self.quiver.vertices.join(", "))?;
        for a in &self.quiver.arrows {
            writeln!(
                f,
                "arrow {}: {} -> {}",
                a.name, self.quiver.vertices[a.source], self.quiver.vertices[a.target]
            )?;
        }
        for (i, r) in self.relations.iter().enumerate() {
            writeln!(f, "relation {i}: {}", r.display(&self.quiver))?;
        }
        Ok(())
    }
}

/// Evaluates `x_p` for a path, given one matrix per arrow (`dims[t] x dims[s]`).
pub fn evaluate_path<F: Field>(
    f: &F,
    quiver: &Quiver,
    matrices: &[Matrix<F::Elem>],
    dims: &[usize],
    path: &Path,
) -> Result<Matrix<F::Elem>> {
    match path {
        Path::Vertex(v) => Ok(Matrix::identity(f, dims[*v])),
        Path::Arrows(arrows) => {
            let mut acc: Option<Matrix<F::Elem>> = None;
            for &a in arrows {
                let m = &matrices[a];
                let arrow = &quiver.arrows[a];
                if m.shape() != (dims[arrow.target], dims[arrow.source]) {
                    return Err(Error::DimensionMismatch(format!(
                        "arrow {} has a {}x{} matrix, expected {}x{}",
                        arrow.name,
                        m.rows(),
                        m.cols(),
                        dims[arrow.target],
                        dims[arrow.source]
                    )));
                }
                acc = Some(match acc {
                    None => m.clone(),
                    Some(prev) => prev.mul(f, m)?,
                });
            }
            Ok(acc.expect("nonempty path"))
        }
    }
}

/// The (deformed) preprojective algebra of a loop-free quiver: the double quiver
/// with one relation per vertex `e_i (Σ αα* − α*α) e_i − λ_i e_i`. Reverse arrows
/// are named by appending `*`.
pub fn build_preprojective(base: &Quiver, weight: &[BigRational]) -> Result<AlgebraPresentation> {
    if base.has_loops() {
        return Err(Error::InvalidQuiver("preprojective construction needs a loop-free quiver".into()));
    }
    if weight.len() != base.vertex_count() {
        return Err(Error::DimensionMismatch(format!(
            "weight has {} entries for {} vertices",
            weight.len(),
            base.vertex_count()
        )));
    }
    let mut arrows = Vec::new();
    for a in &base.arrows {
        arrows.push((
            a.name.clone(),
            base.vertices[a.source].clone(),
            base.vertices[a.target].clone(),
        ));
    }
    for a in &base.arrows {
        arrows.push((
            format!("{}*", a.name),
            base.vertices[a.target].clone(),
            base.vertices[a.source].clone(),
        ));
    }
    let double = Quiver::new(base.vertices.clone(), arrows)?;
    let mut relations = Vec::new();
    for (i, vertex) in base.vertices.iter().enumerate() {
        let mut terms = Vec::new();
        for a in &base.arrows {
            let star = format!("{}*", a.name);
            if a.target == i {
                terms.push((rational(1), PathSpec::Arrows(vec![a.name.clone(), star.clone()])));
            }
            if a.source == i {
                terms.push((rational(-1), PathSpec::Arrows(vec![star, a.name.clone()])));
            }
        }
        if !weight[i].is_zero() {
            terms.push((-weight[i].clone(), PathSpec::Vertex(vertex.clone())));
        }
        if !terms.is_empty() {
            relations.push(RelationSpec::new(terms));
        }
    }
    validate_presentation(double, relations)
}

fn arrow(name: &str, from: &str, to: &str) -> (String, String, String) {
    (name.to_string(), from.to_string(), to.to_string())
}

/// Linear quiver `1 -> 2 -> ... -> n` with arrows `a1, a2, ...`.
pub fn linear_quiver(n: usize) -> Quiver {
    let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let arrows = (1..n)
        .map(|i| arrow(&format!("a{i}"), &i.to_string(), &(i + 1).to_string()))
        .collect::<Vec<_>>();
    Quiver::new(vertices, arrows).expect("linear quiver is valid")
}

/// Preprojective algebra of type A_2: arrows `a: 1 -> 2`, `a*: 2 -> 1`, relations
/// `a a* = 0` at vertex 2 and `a* a = 0` at vertex 1.
pub fn a2_preprojective() -> AlgebraPresentation {
    let base = Quiver::new(["1", "2"], vec![arrow("a", "1", "2")]).expect("valid");
    build_preprojective(&base, &[rational(0), rational(0)]).expect("valid")
}

/// One vertex with two loops `a`, `a*` and the commutativity relation `a a* − a* a`.
pub fn two_loop_commuting() -> AlgebraPresentation {
    let q = Quiver::new(["1"], vec![arrow("a", "1", "1"), arrow("a*", "1", "1")]).expect("valid");
    validate_presentation(
        q,
        vec![RelationSpec::new(vec![
            (rational(1), PathSpec::arrows(&["a", "a*"])),
            (rational(-1), PathSpec::arrows(&["a*", "a"])),
        ])],
    )
    .expect("valid")
}

/// Deformed preprojective algebra of the linear quiver with `weight.len()` vertices.
pub fn deformed_preprojective_linear(weight: &[BigRational]) -> AlgebraPresentation {
    build_preprojective(&linear_quiver(weight.len()), weight).expect("valid")
}

/// Quiver `1 --a--> 2`, `2 --b--> 3`, `3 --b*--> 2` with `b b* − b* b` split per
/// vertex into `b b* = 0` (at 3) and `b* b = 0` (at 2).
pub fn three_vertex_example() -> AlgebraPresentation {
    let q = Quiver::new(
        ["1", "2", "3"],
        vec![arrow("a", "1", "2"), arrow("b", "2", "3"), arrow("b*", "3", "2")],
    )
    .expect("valid");
    validate_presentation(
        q,
        vec![
            RelationSpec::new(vec![(rational(1), PathSpec::arrows(&["b", "b*"]))]),
            RelationSpec::new(vec![(rational(-1), PathSpec::arrows(&["b*", "b"]))]),
        ],
    )
    .expect("valid")
}
