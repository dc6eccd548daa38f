//! Evaluation forms `δ_M` as finite tables of Euler characteristics, grouping of
//! modules into strata `⟨L⟩`, and the multiplicativity law `δ_{M⊕N} = δ_M · δ_N`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::count::{count_flags, count_grassmannian, dims_below, flag_degree_bound, grassmannian_degree_bound, FlagType, PrimeScreen};
use crate::error::{Error, Result};
use crate::euler::{interpolate_euler, CountSeries, EulerValue};
use crate::module::{FpModule, RationalModule};

/// How primes and degree bounds are chosen for a counting task.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PrimePolicy {
    /// Use exactly these primes (bad ones are skipped) instead of the smallest good ones.
    pub primes: Option<Vec<u64>>,
    /// Replace every computed degree bound.
    pub degree_bound: Option<usize>,
}

impl PrimePolicy {
    pub fn bound(&self, computed: usize) -> usize {
        self.degree_bound.unwrap_or(computed)
    }
}

/// Selects `need` good primes and runs `count` at each of them in parallel.
/// Returns the primes and, per prime, the counts of every series.
pub fn sample_counts(
    need: usize,
    screen: &mut PrimeScreen,
    policy: &PrimePolicy,
    label: &str,
    count: &(dyn Fn(u64) -> Result<Vec<u64>> + Sync),
) -> Result<(Vec<u64>, Vec<Vec<u64>>)> {
    let primes = screen.select(need, policy.primes.as_deref(), label)?;
    let counts = primes.par_iter().map(|&p| count(p)).collect::<Result<Vec<_>>>()?;
    Ok((primes, counts))
}

/// Counts several series over the same good primes and interpolates each.
/// `count(p)` returns the count of series `i` over `F_p` at index `i`.
pub fn euler_values(
    labels: &[String],
    bounds: &[usize],
    screen: &mut PrimeScreen,
    policy: &PrimePolicy,
    count: &(dyn Fn(u64) -> Result<Vec<u64>> + Sync),
) -> Result<Vec<EulerValue>> {
    if labels.is_empty() {
        return Ok(Vec::new());
    }
    let bounds: Vec<usize> = bounds.iter().map(|&b| policy.bound(b)).collect();
    let need = bounds.iter().max().map_or(0, |b| b + 2);
    let (primes, counts) = sample_counts(need, screen, policy, &labels[0], count)?;
    labels
        .iter()
        .zip(&bounds)
        .enumerate()
        .map(|(i, (l, &b))| {
            let samples = primes.iter().zip(&counts).map(|(&p, c)| (p, c[i])).collect();
            interpolate_euler(&CountSeries::with_samples(l.clone(), b, samples))
        })
        .collect()
}

/// All orderings `j` of simples whose dimension vectors add up to `d`, in lexicographic order.
pub fn enumerate_flag_types(d: &[usize], simple_dims: &[Vec<usize>]) -> Vec<FlagType> {
    fn rec(rest: &mut Vec<usize>, sd: &[Vec<usize>], cur: &mut Vec<usize>, out: &mut Vec<FlagType>) {
        if rest.iter().all(|&x| x == 0) {
            out.push(FlagType::full(cur.clone()));
            return;
        }
        for (i, s) in sd.iter().enumerate() {
            if s.iter().all(|&x| x == 0) || s.iter().zip(rest.iter()).any(|(a, b)| a > b) {
                continue;
            }
            for (r, a) in rest.iter_mut().zip(s) {
                *r -= a;
            }
            cur.push(i);
            rec(rest, sd, cur, out);
            cur.pop();
            for (r, a) in rest.iter_mut().zip(s) {
                *r += a;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut d.to_vec(), simple_dims, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignatureMode {
    Flag,
    Grassmann,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaSignature {
    pub label: String,
    pub mode: SignatureMode,
    pub dims: Vec<usize>,
    /// Type (flag mode) or dimension vector (grassmann mode) ↦ Euler characteristic.
    pub table: BTreeMap<String, i64>,
    pub values: Vec<EulerValue>,
}

impl DeltaSignature {
    pub fn get(&self, key: &str) -> i64 {
        self.table.get(key).copied().unwrap_or(0)
    }

    /// Same mode, same dimension vector, same table.
    pub fn same_class(&self, other: &Self) -> bool {
        self.mode == other.mode && self.dims == other.dims && self.table == other.table
    }
}

pub fn dims_key(e: &[usize]) -> String {
    let parts: Vec<String> = e.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Flag-mode (every full type for `dims(M)`) or grassmann-mode (every `e ≤ dims(M)`)
/// signature of a characteristic-zero module.
pub fn delta_signature(
    label: &str,
    m: &RationalModule,
    simples: &[RationalModule],
    mode: SignatureMode,
    policy: &PrimePolicy,
) -> Result<DeltaSignature> {
    let dims = m.dims().to_vec();
    let mut screen_modules = vec![m.clone()];
    if mode == SignatureMode::Flag {
        screen_modules.extend(simples.iter().cloned());
    }
    let mut screen = PrimeScreen::new(screen_modules)?;
    let (keys, values) = match mode {
        SignatureMode::Flag => {
            let sd: Vec<Vec<usize>> = simples.iter().map(|s| s.dims().to_vec()).collect();
            let types = enumerate_flag_types(&dims, &sd);
            let keys: Vec<String> = types.iter().map(|t| t.to_string()).collect();
            let labels: Vec<String> = keys.iter().map(|k| format!("Phi_{k}({label})")).collect();
            let bounds = vec![flag_degree_bound(&dims); types.len()];
            let values = euler_values(&labels, &bounds, &mut screen, policy, &|p| {
                let mp = m.reduce_mod(p)?;
                let sp = simples.iter().map(|s| s.reduce_mod(p)).collect::<Result<Vec<FpModule>>>()?;
                types.iter().map(|t| count_flags(&mp, &sp, t)).collect()
            })?;
            (keys, values)
        }
        SignatureMode::Grassmann => {
            let es = dims_below(&dims);
            let keys: Vec<String> = es.iter().map(|e| dims_key(e)).collect();
            let labels: Vec<String> = keys.iter().map(|k| format!("Gr_{k}({label})")).collect();
            let bounds: Vec<usize> = es.iter().map(|e| grassmannian_degree_bound(&dims, e)).collect();
            let values = euler_values(&labels, &bounds, &mut screen, policy, &|p| {
                let mp = m.reduce_mod(p)?;
                es.iter().map(|e| count_grassmannian(&mp, e)).collect()
            })?;
            (keys, values)
        }
    };
    let table = keys.iter().cloned().zip(values.iter().map(|v| v.value)).collect();
    Ok(DeltaSignature {
        label: label.to_string(),
        mode,
        dims,
        table,
        values,
    })
}

/// Groups signatures by exact table equality; classes are listed by first member.
pub fn stratify_by_signature(signatures: &[DeltaSignature]) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, s) in signatures.iter().enumerate() {
        match classes.iter_mut().find(|c| signatures[c[0]].same_class(s)) {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    classes
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiplicativityRow {
    pub flag_type: String,
    pub sum_value: i64,
    pub product_value: i64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiplicativityReport {
    pub rows: Vec<MultiplicativityRow>,
    pub pass: bool,
}

/// Compares `χ(Φ_{j,M⊕N})` with `Σ_{c′+c″=1} χ(Φ_{j,c′,M}) χ(Φ_{j,c″,N})` for every type
/// `j` of `M ⊕ N`, given the three flag-mode signatures.
pub fn check_delta_multiplicativity(
    sum: &DeltaSignature,
    m: &DeltaSignature,
    n: &DeltaSignature,
    simple_dims: &[Vec<usize>],
) -> Result<MultiplicativityReport> {
    if sum.mode != SignatureMode::Flag || m.mode != SignatureMode::Flag || n.mode != SignatureMode::Flag {
        return Err(Error::InvalidFlagType("multiplicativity needs flag-mode signatures".into()));
    }
    let vertices = sum.dims.len();
    let mut rows = Vec::new();
    for t in enumerate_flag_types(&sum.dims, simple_dims) {
        let len = t.len();
        let mut product = 0i64;
        for mask in 0u64..(1u64 << len) {
            let c1: Vec<bool> = (0..len).map(|k| mask >> k & 1 == 1).collect();
            let c2: Vec<bool> = c1.iter().map(|c| !c).collect();
            let t1 = FlagType::new(t.j.clone(), c1)?;
            if t1.content(simple_dims, vertices)? != m.dims {
                continue;
            }
            let t2 = FlagType::new(t.j.clone(), c2)?;
            let k1 = FlagType::full(t1.active()).to_string();
            let k2 = FlagType::full(t2.active()).to_string();
            product += m.get(&k1) * n.get(&k2);
        }
        let key = t.to_string();
        let s = sum.get(&key);
        rows.push(MultiplicativityRow {
            flag_type: key,
            sum_value: s,
            product_value: product,
            pass: s == product,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(MultiplicativityReport { rows, pass })
}
