//! TOML input files for algebras, modules and catalogs.
//!
//! Algebra file:
//!
//! ```toml
//! vertices = ["1", "2"]
//!
//! [[arrows]]
//! name = "a"
//! from = "1"
//! to = "2"
//!
//! [[relations]]
//! terms = [{ coeff = "1", path = ["a", "b"] }, { coeff = "-1/2", path = "vertex:2" }]
//! ```
//!
//! A path `[α₁, …, α_m]` denotes `x_{α₁}⋯x_{α_m}`: the leftmost arrow is applied
//! last, so consecutive arrows must satisfy `target(α_{k+1}) = source(α_k)`.
//! A `[preprojective]` table with `weights = ["0", "0"]` replaces `[[relations]]`:
//! the arrows listed are then the base quiver, and the file describes its double
//! quiver with arrows `α*` and one relation `Σ(αα* − α*α) − λ_i e_i` per vertex.
//!
//! Module file (omitted arrows act by zero; a matrix for `α: i → j` has
//! `dims[j]` rows and `dims[i]` columns; entries are integers or `"p/q"` strings):
//!
//! ```toml
//! name = "P1"
//! dims = [1, 1]
//! [matrices]
//! a = [[1]]
//! ```
//!
//! Catalog file: a list of `[[modules]]`, each either defined inline like a module
//! file or as `sum = ["S1", "S2"]` of earlier entries, optionally `simple = true`.
//! `max_sum_dim = n` at top level adds every direct sum of the inline entries of
//! total dimension at most `n`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::algebra::{build_preprojective, validate_presentation, AlgebraPresentation, PathSpec, Quiver, RelationSpec};
use crate::error::{Error, Result};
use crate::field::{format_rational, parse_rational, Rationals};
use crate::instances::{direct_sums_up_to, Named};
use crate::matrix::Matrix;
use crate::module::{check_module, RationalModule};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub arrows: Vec<ArrowEntry>,
    #[serde(default)]
    pub relations: Vec<RelationEntry>,
    pub preprojective: Option<PreprojectiveEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowEntry {
    pub name: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationEntry {
    pub terms: Vec<TermEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub coeff: Scalar,
    pub path: PathEntry,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathEntry {
    Arrows(Vec<String>),
    /// `"vertex:v"`
    Vertex(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprojectiveEntry {
    pub weights: Vec<Scalar>,
}

/// An exact rational written as an integer or a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

impl Scalar {
    pub fn value(&self) -> Result<BigRational> {
        match self {
            Scalar::Int(n) => Ok(BigRational::from_integer((*n).into())),
            Scalar::Text(s) => parse_rational(s),
        }
    }

    fn from_rational(r: &BigRational) -> Self {
        match (r.is_integer(), r.to_integer().try_into()) {
            (true, Ok(n)) => Scalar::Int(n),
            _ => Scalar::Text(format_rational(r)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleFile {
    #[serde(default)]
    pub name: Option<String>,
    pub dims: Vec<usize>,
    #[serde(default)]
    pub matrices: BTreeMap<String, Vec<Vec<Scalar>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogFile {
    #[serde(default)]
    pub max_sum_dim: Option<usize>,
    #[serde(default)]
    pub modules: Vec<CatalogEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub name: String,
    #[serde(default)]
    pub simple: bool,
    #[serde(default)]
    pub dims: Option<Vec<usize>>,
    #[serde(default)]
    pub matrices: BTreeMap<String, Vec<Vec<Scalar>>>,
    #[serde(default)]
    pub sum: Option<Vec<String>>,
}

/// Modules read from a catalog file.
#[derive(Debug, Clone)]
pub struct Catalog {
    /// Every module, in file order, followed by generated sums.
    pub members: Vec<Named>,
    /// Entries marked `simple = true`.
    pub simples: Vec<Named>,
}

impl Catalog {
    pub fn get(&self, name: &str) -> Option<&Named> {
        self.members.iter().find(|(n, _)| n == name)
    }
}

fn parse_err(what: &str, e: toml::de::Error) -> Error {
    Error::Parse(format!("{what}: {}", e.message()))
}

pub fn parse_algebra(text: &str) -> Result<AlgebraPresentation> {
    let file: AlgebraFile = toml::from_str(text).map_err(|e| parse_err("algebra file", e))?;
    algebra_from_file(&file)
}

pub fn algebra_from_file(file: &AlgebraFile) -> Result<AlgebraPresentation> {
    let quiver = Quiver::new(
        file.vertices.clone(),
        file.arrows.iter().map(|a| (a.name.clone(), a.from.clone(), a.to.clone())),
    )?;
    if let Some(pre) = &file.preprojective {
        if !file.relations.is_empty() {
            return Err(Error::Parse("give either [preprojective] or [[relations]], not both".into()));
        }
        let weights = pre.weights.iter().map(Scalar::value).collect::<Result<Vec<_>>>()?;
        return build_preprojective(&quiver, &weights);
    }
    let mut relations = Vec::new();
    for r in &file.relations {
        let mut terms = Vec::new();
        for t in &r.terms {
            let path = match &t.path {
                PathEntry::Arrows(names) => PathSpec::Arrows(names.clone()),
                PathEntry::Vertex(s) => match s.strip_prefix("vertex:") {
                    Some(v) => PathSpec::Vertex(v.trim().to_string()),
                    None => return Err(Error::Parse(format!("path {s:?} is neither an arrow list nor \"vertex:v\""))),
                },
            };
            terms.push((t.coeff.value()?, path));
        }
        relations.push(RelationSpec::new(terms));
    }
    validate_presentation(quiver, relations)
}

fn build_matrices(
    algebra: &AlgebraPresentation,
    dims: &[usize],
    given: &BTreeMap<String, Vec<Vec<Scalar>>>,
) -> Result<Vec<Matrix<BigRational>>> {
    let quiver = algebra.quiver();
    if dims.len() != quiver.vertex_count() {
        return Err(Error::DimensionMismatch(format!(
            "dimension vector has {} entries for {} vertices",
            dims.len(),
            quiver.vertex_count()
        )));
    }
    for name in given.keys() {
        quiver.arrow_index(name)?;
    }
    let f = Rationals;
    quiver
        .arrows()
        .iter()
        .map(|a| {
            let (rows, cols) = (dims[a.target], dims[a.source]);
            let Some(entries) = given.get(&a.name) else {
                return Ok(Matrix::zeros(&f, rows, cols));
            };
            let shape_err = || {
                Error::DimensionMismatch(format!("matrix for arrow {} must be {rows}x{cols}", a.name))
            };
            if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
                return Err(shape_err());
            }
            let data = entries
                .iter()
                .map(|r| r.iter().map(Scalar::value).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(Matrix::from_rows(data, cols))
        })
        .collect()
}

pub fn parse_module(algebra: &Arc<AlgebraPresentation>, text: &str) -> Result<Named> {
    let file: ModuleFile = toml::from_str(text).map_err(|e| parse_err("module file", e))?;
    let mats = build_matrices(algebra, &file.dims, &file.matrices)?;
    let m = check_module(algebra.clone(), Rationals, file.dims.clone(), mats)?;
    Ok((file.name.unwrap_or_else(|| "M".into()), m))
}

/// Serializes a module in the module file format.
pub fn module_to_toml(name: &str, m: &RationalModule) -> String {
    let quiver = m.algebra().quiver();
    let mut matrices = BTreeMap::new();
    for (a, x) in quiver.arrows().iter().zip(m.matrices()) {
        if x.rows() * x.cols() == 0 || x.is_zero(&Rationals) {
            continue;
        }
        let rows = (0..x.rows())
            .map(|i| (0..x.cols()).map(|j| Scalar::from_rational(x.get(i, j))).collect())
            .collect();
        matrices.insert(a.name.clone(), rows);
    }
    let file = ModuleFile {
        name: Some(name.to_string()),
        dims: m.dims().to_vec(),
        matrices,
    };
    toml::to_string(&file).expect("module files always serialize")
}

pub fn parse_catalog(algebra: &Arc<AlgebraPresentation>, text: &str) -> Result<Catalog> {
    let file: CatalogFile = toml::from_str(text).map_err(|e| parse_err("catalog file", e))?;
    let mut members: Vec<Named> = Vec::new();
    let mut simples = Vec::new();
    let mut inline = Vec::new();
    for entry in &file.modules {
        if members.iter().any(|(n, _)| n == &entry.name) {
            return Err(Error::Parse(format!("duplicate catalog entry {:?}", entry.name)));
        }
        let module = match (&entry.sum, &entry.dims) {
            (Some(parts), None) if entry.matrices.is_empty() => {
                let mut acc: Option<RationalModule> = None;
                for p in parts {
                    let (_, part) = members
                        .iter()
                        .find(|(n, _)| n == p)
                        .ok_or_else(|| Error::UnknownName(format!("summand {p:?} of {:?}", entry.name)))?;
                    acc = Some(match acc {
                        None => part.clone(),
                        Some(a) => a.direct_sum(part)?,
                    });
                }
                acc.ok_or_else(|| Error::Parse(format!("empty sum for {:?}", entry.name)))?
            }
            (None, Some(dims)) => {
                let mats = build_matrices(algebra, dims, &entry.matrices)?;
                let m = check_module(algebra.clone(), Rationals, dims.clone(), mats)?;
                inline.push((entry.name.clone(), m.clone()));
                m
            }
            _ => {
                return Err(Error::Parse(format!(
                    "catalog entry {:?} needs either dims (and matrices) or sum",
                    entry.name
                )))
            }
        };
        if entry.simple {
            simples.push((entry.name.clone(), module.clone()));
        }
        members.push((entry.name.clone(), module));
    }
    if let Some(max) = file.max_sum_dim {
        for (name, m) in direct_sums_up_to(&inline, max)? {
            if !members.iter().any(|(n, _)| *n == name) {
                members.push((name, m));
            }
        }
    }
    Ok(Catalog { members, simples })
}
