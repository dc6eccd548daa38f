//! End-to-end checks of the two multiplication formulas as exact integer identities,
//! and the built-in Ext-symmetry audit suite.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num::BigRational;
use serde::Serialize;

use crate::algebra::AlgebraPresentation;
use crate::count::{
    count_efg, dims_below, efg_degree_bound, projective_count, stratify_ext_classes, CatalogMatcher, PrimeScreen, StrataMode,
};
use crate::error::{Error, Result};
use crate::euler::{interpolate_euler, CountSeries, EulerValue};
use crate::ext::ext_dim;
use crate::forms::{
    check_delta_multiplicativity, delta_signature, dims_key, euler_values, sample_counts, stratify_by_signature, DeltaSignature,
    MultiplicativityReport, PrimePolicy, SignatureMode,
};
use crate::hom::hom_dim;
use crate::instances::{self, direct_sum_catalog, direct_sums_up_to, BuiltinInstance, Named};
use crate::matrix::Matrix;
use crate::module::{FpModule, RationalModule};
use crate::iso::IsoOptions;
use crate::series::{composition_series, ext_symmetry_audit, AuditReport, Membership};

/// An algebra, a set of simples `𝒮` and a catalog of modules used to name middle terms.
#[derive(Debug, Clone)]
pub struct Instance {
    pub algebra: Arc<AlgebraPresentation>,
    pub simples: Vec<Named>,
    pub catalog: Vec<Named>,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub policy: PrimePolicy,
    /// Run even when the Ext-symmetry audit fails.
    pub allow_asymmetric: bool,
    /// Seed for randomized isomorphism trials when naming middle terms.
    pub iso_seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// Grassmannian form, with the `EF^g` correction.
    Formula1,
    /// Flag form, strata from both directions.
    Formula2,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityRow {
    /// Flag type `(j_1,…)` or dimension vector `(e_1,…)`.
    pub key: String,
    pub lhs: i64,
    pub rhs: i64,
    /// `χ(ℙEF^g_e(N,M))`, included in `rhs` (formula1 only).
    pub efg: Option<i64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StratumRow {
    /// Name of the first catalog member of the class.
    pub class: String,
    pub members: Vec<String>,
    /// `χ(ℙExt¹(M,N)_{⟨L⟩})`.
    pub chi_mn: i64,
    /// `χ(ℙExt¹(N,M)_{⟨L⟩})`; always 0 for formula1.
    pub chi_nm: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceSummary {
    pub vertices: Vec<String>,
    pub arrows: Vec<String>,
    pub relations: Vec<String>,
    pub simples: Vec<String>,
    pub m: String,
    pub n: String,
    pub catalog: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub formula: Formula,
    pub instance: InstanceSummary,
    pub ext_mn: usize,
    pub ext_nm: usize,
    pub audit: AuditReport,
    pub rows: Vec<IdentityRow>,
    pub strata: Vec<StratumRow>,
    /// Per-prime stratum counts added up to `[dim Ext¹]_q` in every direction.
    pub strata_totals_ok: bool,
    pub euler_values: Vec<EulerValue>,
    pub pass: bool,
}

/// Stratum counts of `ℙExt¹(X,Y)` by catalog member, over several primes.
#[derive(Debug, Clone, Serialize)]
pub struct StrataTable {
    pub ext_dim: usize,
    pub dims: Vec<usize>,
    pub members: Vec<String>,
    pub primes: Vec<u64>,
    /// `counts[k][i]`: classes with middle term member `i` over `F_{primes[k]}`.
    pub counts: Vec<Vec<u64>>,
    pub chi: Vec<i64>,
    pub values: Vec<EulerValue>,
    pub totals_ok: bool,
}

impl StrataTable {
    fn occurring(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.members.len()).filter(|&i| self.counts.iter().any(|c| c[i] > 0))
    }
}

type ModKey = (Vec<usize>, Vec<Matrix<BigRational>>);

fn key(m: &RationalModule) -> ModKey {
    (m.dims().to_vec(), m.matrices().to_vec())
}

/// Verifies many pairs over one instance, caching signatures and strata.
pub struct Verifier {
    instance: Instance,
    options: VerifyOptions,
    signatures: Mutex<HashMap<(ModKey, SignatureMode), DeltaSignature>>,
    strata: Mutex<HashMap<(ModKey, ModKey), StrataTable>>,
}

impl Verifier {
    pub fn new(instance: Instance, options: VerifyOptions) -> Result<Self> {
        for (name, m) in instance.simples.iter().chain(&instance.catalog) {
            if !Arc::ptr_eq(m.algebra(), &instance.algebra) && **m.algebra() != *instance.algebra {
                return Err(Error::ModuleMismatch(format!("{name} is over a different algebra")));
            }
        }
        Ok(Verifier {
            instance,
            options,
            signatures: Mutex::new(HashMap::new()),
            strata: Mutex::new(HashMap::new()),
        })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    fn simple_modules(&self) -> Vec<RationalModule> {
        self.instance.simples.iter().map(|(_, s)| s.clone()).collect()
    }

    fn simple_dims(&self) -> Vec<Vec<usize>> {
        self.instance.simples.iter().map(|(_, s)| s.dims().to_vec()).collect()
    }

    pub fn signature(&self, label: &str, m: &RationalModule, mode: SignatureMode) -> Result<DeltaSignature> {
        let k = (key(m), mode);
        if let Some(s) = self.signatures.lock().expect("cache lock").get(&k) {
            let mut s = s.clone();
            s.label = label.to_string();
            return Ok(s);
        }
        let s = delta_signature(label, m, &self.simple_modules(), mode, &self.options.policy)?;
        self.signatures.lock().expect("cache lock").insert(k, s.clone());
        Ok(s)
    }

    /// Counts `ℙExt¹(X,Y)` by middle term over good primes and interpolates each stratum.
    pub fn strata(&self, x: &Named, y: &Named) -> Result<StrataTable> {
        let k = (key(&x.1), key(&y.1));
        if let Some(t) = self.strata.lock().expect("cache lock").get(&k) {
            return Ok(t.clone());
        }
        let t = self.compute_strata(x, y)?;
        self.strata.lock().expect("cache lock").insert(k, t.clone());
        Ok(t)
    }

    fn compute_strata(&self, (xn, x): &Named, (yn, y): &Named) -> Result<StrataTable> {
        let m = ext_dim(x, y)?;
        let dims: Vec<usize> = x.dims().iter().zip(y.dims()).map(|(a, b)| a + b).collect();
        let members: Vec<&Named> = self.instance.catalog.iter().filter(|(_, c)| c.dims() == dims).collect();
        let names: Vec<String> = members.iter().map(|(n, _)| n.clone()).collect();
        if m == 0 {
            return Ok(StrataTable {
                ext_dim: 0,
                dims,
                chi: vec![0; names.len()],
                members: names,
                primes: Vec::new(),
                counts: Vec::new(),
                values: Vec::new(),
                totals_ok: true,
            });
        }
        if members.is_empty() {
            return Err(Error::CatalogIncomplete {
                middle_term: format!("of dimension vector {}", dims_key(&dims)),
            });
        }
        let mut screen_modules = vec![x.clone(), y.clone()];
        screen_modules.extend(members.iter().map(|(_, c)| c.clone()));
        let mut screen = PrimeScreen::new(screen_modules)?;
        let policy = &self.options.policy;
        let bound = policy.bound(m - 1);
        let label = format!("PExt({xn},{yn})");
        let iso = match self.options.iso_seed {
            Some(seed) => IsoOptions { random_trials: 16, seed },
            None => IsoOptions::default(),
        };
        let (primes, counts) = sample_counts(bound + 2, &mut screen, policy, &label, &|p| {
            let xp = x.reduce_mod(p)?;
            let yp = y.reduce_mod(p)?;
            let catalog = members
                .iter()
                .map(|(n, c)| Ok((n.clone(), c.reduce_mod(p)?)))
                .collect::<Result<Vec<(String, FpModule)>>>()?;
            let matcher = CatalogMatcher::new(catalog)?.with_iso_options(iso);
            stratify_ext_classes(&xp, &yp, &matcher, StrataMode::Projective)
        })?;
        let totals_ok = primes
            .iter()
            .zip(&counts)
            .all(|(&p, c)| c.iter().sum::<u64>() == projective_count(p, m));
        let values = names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let samples = primes.iter().zip(&counts).map(|(&p, c)| (p, c[i])).collect();
                interpolate_euler(&CountSeries::with_samples(format!("{label}_<{n}>"), bound, samples))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StrataTable {
            ext_dim: m,
            dims,
            chi: values.iter().map(|v| v.value).collect(),
            members: names,
            primes,
            counts,
            values,
            totals_ok,
        })
    }

    /// Membership in `𝒞(𝒮)` and the advisory symmetry audit for the pairs involved.
    fn preflight(&self, m: &Named, n: &Named) -> Result<AuditReport> {
        let simples = self.simple_modules();
        for (name, x) in [m, n] {
            if let Membership::NotInCategory = composition_series(x, &simples)? {
                return Err(Error::NotInCategory(name.clone()));
            }
        }
        let s = &self.instance.simples;
        let mut pairs = vec![(m.clone(), n.clone()), (m.clone(), m.clone()), (n.clone(), n.clone())];
        for i in 0..s.len() {
            for j in i..s.len() {
                pairs.push((s[i].clone(), s[j].clone()));
            }
        }
        let audit = ext_symmetry_audit(s, &pairs)?;
        if !audit.pass && !self.options.allow_asymmetric {
            let row = audit.rows.iter().find(|r| !r.symmetric).expect("failing row");
            return Err(Error::Asymmetric(format!(
                "Ext¹({},{}) has dimension {} but Ext¹({},{}) has dimension {}",
                row.left, row.right, row.ext_lr, row.right, row.left, row.ext_rl
            )));
        }
        Ok(audit)
    }

    fn summary(&self, m: &Named, n: &Named) -> InstanceSummary {
        let alg = &self.instance.algebra;
        let q = alg.quiver();
        InstanceSummary {
            vertices: q.vertices().to_vec(),
            arrows: q
                .arrows()
                .iter()
                .map(|a| format!("{}: {} -> {}", a.name, q.vertices()[a.source], q.vertices()[a.target]))
                .collect(),
            relations: alg.relations().iter().map(|r| r.display(q)).collect(),
            simples: self.instance.simples.iter().map(|(n, _)| n.clone()).collect(),
            m: m.0.clone(),
            n: n.0.clone(),
            catalog: self.instance.catalog.iter().map(|(n, _)| n.clone()).collect(),
        }
    }

    /// Groups the occurring members of both tables into signature classes and sums
    /// their Euler characteristics per class.
    fn classes(
        &self,
        mn: &StrataTable,
        nm: Option<&StrataTable>,
        mode: SignatureMode,
        values: &mut Vec<EulerValue>,
    ) -> Result<Vec<(StratumRow, DeltaSignature)>> {
        let mut occurring: Vec<usize> = mn.occurring().collect();
        if let Some(t) = nm {
            for i in t.occurring() {
                if !occurring.contains(&i) {
                    occurring.push(i);
                }
            }
        }
        occurring.sort_unstable();
        let members: Vec<&Named> = self
            .instance
            .catalog
            .iter()
            .filter(|(_, c)| c.dims() == mn.dims)
            .collect();
        let mut sigs = Vec::new();
        for &i in &occurring {
            let (name, l) = members[i];
            sigs.push(self.signature(name, l, mode)?);
        }
        let mut out = Vec::new();
        for class in stratify_by_signature(&sigs) {
            let idx: Vec<usize> = class.iter().map(|&c| occurring[c]).collect();
            let chi_mn = idx.iter().map(|&i| mn.chi[i]).sum();
            let chi_nm = nm.map_or(0, |t| idx.iter().map(|&i| t.chi[i]).sum());
            let rep = sigs[class[0]].clone();
            values.extend(rep.values.iter().cloned());
            out.push((
                StratumRow {
                    class: mn.members[idx[0]].clone(),
                    members: idx.iter().map(|&i| mn.members[i].clone()).collect(),
                    chi_mn,
                    chi_nm,
                },
                rep,
            ));
        }
        Ok(out)
    }

    /// Flag form: `dim Ext¹(M,N) · χ(Φ_{j,M⊕N}) = Σ_L (χ(ℙExt¹(M,N)_L) + χ(ℙExt¹(N,M)_L)) · χ(Φ_{j,L})`.
    pub fn verify_formula2(&self, m: &Named, n: &Named) -> Result<VerificationReport> {
        let audit = self.preflight(m, n)?;
        let ext_mn = ext_dim(&m.1, &n.1)?;
        let ext_nm = ext_dim(&n.1, &m.1)?;
        let sum = m.1.direct_sum(&n.1)?;
        let sum_sig = self.signature(&format!("{}+{}", m.0, n.0), &sum, SignatureMode::Flag)?;
        let mut values = sum_sig.values.clone();
        let mn = self.strata(m, n)?;
        let nm = self.strata(n, m)?;
        values.extend(mn.values.iter().cloned());
        values.extend(nm.values.iter().cloned());
        let classes = self.classes(&mn, Some(&nm), SignatureMode::Flag, &mut values)?;
        let rows = sum_sig
            .table
            .iter()
            .map(|(k, &v)| {
                let lhs = ext_mn as i64 * v;
                let rhs = classes.iter().map(|(row, sig)| (row.chi_mn + row.chi_nm) * sig.get(k)).sum();
                IdentityRow {
                    key: k.clone(),
                    lhs,
                    rhs,
                    efg: None,
                    pass: lhs == rhs,
                }
            })
            .collect::<Vec<_>>();
        let strata_totals_ok = mn.totals_ok && nm.totals_ok;
        let pass = rows.iter().all(|r| r.pass) && strata_totals_ok && values.iter().all(|v| v.is_verified());
        Ok(VerificationReport {
            formula: Formula::Formula2,
            instance: self.summary(m, n),
            ext_mn,
            ext_nm,
            audit,
            rows,
            strata: classes.into_iter().map(|(r, _)| r).collect(),
            strata_totals_ok,
            euler_values: values,
            pass,
        })
    }

    /// Grassmannian form: `dim Ext¹(M,N) · Σ χ(Gr_{e1} M) χ(Gr_{e2} N) =
    /// Σ_L χ(ℙExt¹(M,N)_L) · χ(Gr_e L) + χ(ℙEF^g_e(N,M))` for every `e`.
    pub fn verify_formula1(&self, m: &Named, n: &Named) -> Result<VerificationReport> {
        let audit = self.preflight(m, n)?;
        let (mm, nn) = (&m.1, &n.1);
        let ext_mn = ext_dim(mm, nn)?;
        let ext_nm = ext_dim(nn, mm)?;
        let gm = self.signature(&m.0, mm, SignatureMode::Grassmann)?;
        let gn = self.signature(&n.0, nn, SignatureMode::Grassmann)?;
        let mut values = gm.values.clone();
        values.extend(gn.values.iter().cloned());
        let mn = self.strata(m, n)?;
        values.extend(mn.values.iter().cloned());
        let classes = self.classes(&mn, None, SignatureMode::Grassmann, &mut values)?;

        let dims: Vec<usize> = mm.dims().iter().zip(nn.dims()).map(|(a, b)| a + b).collect();
        let es = dims_below(&dims);
        let efg: Vec<i64> = if ext_nm == 0 {
            vec![0; es.len()]
        } else {
            let hom_mn = hom_dim(mm, nn)?;
            let labels: Vec<String> = es.iter().map(|e| format!("PEFg_{}({},{})", dims_key(e), n.0, m.0)).collect();
            let bounds: Vec<usize> = es
                .iter()
                .map(|e| efg_degree_bound(mm.dims(), nn.dims(), e, ext_nm, hom_mn))
                .collect();
            let mut screen = PrimeScreen::new(vec![mm.clone(), nn.clone()])?;
            let v = euler_values(&labels, &bounds, &mut screen, &self.options.policy, &|p| {
                let mp = mm.reduce_mod(p)?;
                let np = nn.reduce_mod(p)?;
                es.iter().map(|e| count_efg(&np, &mp, e)).collect()
            })?;
            let out = v.iter().map(|x| x.value).collect();
            values.extend(v);
            out
        };

        let mut rows = Vec::new();
        for (e, efg_e) in es.iter().zip(efg) {
            let mut prod = 0i64;
            for e1 in dims_below(mm.dims()) {
                let Some(e2) = e.iter().zip(&e1).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>() else {
                    continue;
                };
                if e2.iter().zip(nn.dims()).any(|(a, b)| a > b) {
                    continue;
                }
                prod += gm.get(&dims_key(&e1)) * gn.get(&dims_key(&e2));
            }
            let k = dims_key(e);
            let lhs = ext_mn as i64 * prod;
            let rhs = classes.iter().map(|(row, sig)| row.chi_mn * sig.get(&k)).sum::<i64>() + efg_e;
            rows.push(IdentityRow {
                key: k,
                lhs,
                rhs,
                efg: Some(efg_e),
                pass: lhs == rhs,
            });
        }
        let strata_totals_ok = mn.totals_ok;
        let pass = rows.iter().all(|r| r.pass) && strata_totals_ok && values.iter().all(|v| v.is_verified());
        Ok(VerificationReport {
            formula: Formula::Formula1,
            instance: self.summary(m, n),
            ext_mn,
            ext_nm,
            audit,
            rows,
            strata: classes.into_iter().map(|(r, _)| r).collect(),
            strata_totals_ok,
            euler_values: values,
            pass,
        })
    }

    /// `δ_{M⊕N} = δ_M · δ_N` on every flag type of `M ⊕ N`.
    pub fn multiplicativity(&self, m: &Named, n: &Named) -> Result<MultiplicativityReport> {
        let sum = m.1.direct_sum(&n.1)?;
        let s = self.signature(&format!("{}+{}", m.0, n.0), &sum, SignatureMode::Flag)?;
        let a = self.signature(&m.0, &m.1, SignatureMode::Flag)?;
        let b = self.signature(&n.0, &n.1, SignatureMode::Flag)?;
        check_delta_multiplicativity(&s, &a, &b, &self.simple_dims())
    }
}

pub fn verify_formula2(instance: Instance, m: &Named, n: &Named, options: VerifyOptions) -> Result<VerificationReport> {
    Verifier::new(instance, options)?.verify_formula2(m, n)
}

pub fn verify_formula1(instance: Instance, m: &Named, n: &Named, options: VerifyOptions) -> Result<VerificationReport> {
    Verifier::new(instance, options)?.verify_formula1(m, n)
}

/// One built-in audit: which instance, which module sizes, and what to run.
#[derive(Debug, Clone)]
pub struct AuditCase {
    pub instance: BuiltinInstance,
    /// Modules are all direct sums of the indecomposables up to this total dimension.
    pub max_module_dim: usize,
    /// Only pairs with `dim M + dim N` at most this are audited.
    pub max_pair_dim: usize,
    /// Whether the audit is expected to find symmetric dimensions everywhere.
    pub expect_symmetric: bool,
    /// Run both formulas and multiplicativity on pairs up to this total dimension.
    pub formulas_up_to: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct AuditConfig {
    pub cases: Vec<AuditCase>,
    pub options: VerifyOptions,
}

impl AuditConfig {
    /// Examples I to IV at the sizes used by the self-test.
    pub fn builtin() -> Self {
        let case = |instance, max_module_dim, max_pair_dim, expect_symmetric, formulas_up_to| AuditCase {
            instance,
            max_module_dim,
            max_pair_dim,
            expect_symmetric,
            formulas_up_to,
        };
        AuditConfig {
            cases: vec![
                case(instances::a2_instance(), 4, 4, true, Some(3)),
                case(instances::two_loop_instance(), 3, 6, true, None),
                case(instances::deformed_a2_instance(), 4, 4, true, Some(4)),
                case(instances::deformed_a3_instance(), 4, 4, true, None),
                case(instances::three_vertex_s13_instance(), 3, 3, true, None),
                case(instances::three_vertex_s23_instance(), 3, 6, true, Some(3)),
                case(instances::three_vertex_full_instance(), 1, 2, false, None),
            ],
            options: VerifyOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub instance: String,
    pub pairs: usize,
    pub symmetric: bool,
    pub expect_symmetric: bool,
    pub asymmetric_pairs: Vec<(String, String, usize, usize)>,
    pub formula_checks: usize,
    pub formula_failures: Vec<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub cases: Vec<CaseReport>,
    pub pass: bool,
}

/// Runs the configured audits. An empty configuration passes.
pub fn run_audit_suite(config: &AuditConfig) -> Result<SuiteReport> {
    let mut cases = Vec::new();
    for case in &config.cases {
        cases.push(run_case(case, &config.options)?);
    }
    let pass = cases.iter().all(|c| c.pass);
    Ok(SuiteReport { cases, pass })
}

fn run_case(case: &AuditCase, options: &VerifyOptions) -> Result<CaseReport> {
    let inst = &case.instance;
    let modules = direct_sums_up_to(&inst.indecomposables, case.max_module_dim)?;
    let mut pairs = Vec::new();
    for a in &modules {
        for b in &modules {
            if a.1.total_dim() + b.1.total_dim() <= case.max_pair_dim {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    let audit = ext_symmetry_audit(&inst.simples, &pairs)?;
    let asymmetric_pairs: Vec<_> = audit
        .rows
        .iter()
        .filter(|r| !r.symmetric)
        .map(|r| (r.left.clone(), r.right.clone(), r.ext_lr, r.ext_rl))
        .collect();

    let mut formula_checks = 0;
    let mut formula_failures = Vec::new();
    if let Some(limit) = case.formulas_up_to {
        let mut catalog = Vec::new();
        let mut seen: Vec<Vec<usize>> = Vec::new();
        for (a, b) in &pairs {
            let d: Vec<usize> = a.1.dims().iter().zip(b.1.dims()).map(|(x, y)| x + y).collect();
            if a.1.total_dim() + b.1.total_dim() <= limit && !seen.contains(&d) {
                catalog.extend(direct_sum_catalog(&inst.indecomposables, &d)?);
                seen.push(d);
            }
        }
        let verifier = Verifier::new(
            Instance {
                algebra: inst.algebra.clone(),
                simples: inst.simples.clone(),
                catalog,
            },
            options.clone(),
        )?;
        for (a, b) in pairs.iter().filter(|(a, b)| a.1.total_dim() + b.1.total_dim() <= limit) {
            formula_checks += 1;
            let tag = format!("({},{})", a.0, b.0);
            match verifier.verify_formula2(a, b) {
                Ok(r) if r.pass => {}
                Ok(_) => formula_failures.push(format!("formula2 {tag}")),
                Err(e) => formula_failures.push(format!("formula2 {tag}: {e}")),
            }
            match verifier.verify_formula1(a, b) {
                Ok(r) if r.pass => {}
                Ok(_) => formula_failures.push(format!("formula1 {tag}")),
                Err(e) => formula_failures.push(format!("formula1 {tag}: {e}")),
            }
            match verifier.multiplicativity(a, b) {
                Ok(r) if r.pass => {}
                Ok(_) => formula_failures.push(format!("multiplicativity {tag}")),
                Err(e) => formula_failures.push(format!("multiplicativity {tag}: {e}")),
            }
        }
    }
    let pass = audit.pass == case.expect_symmetric && formula_failures.is_empty();
    Ok(CaseReport {
        instance: inst.name.clone(),
        pairs: pairs.len(),
        symmetric: audit.pass,
        expect_symmetric: case.expect_symmetric,
        asymmetric_pairs,
        formula_checks,
        formula_failures,
        pass,
    })
}
