//! Plain-text renderings of the reports.

use std::fmt::Write;

use serde::Serialize;

use extsym::algebra::AlgebraPresentation;
use extsym::euler::EulerValue;
use extsym::forms::{DeltaSignature, MultiplicativityReport};
use extsym::series::AuditReport;
use extsym::verify::{Formula, StrataTable, SuiteReport, VerificationReport};

#[derive(Serialize)]
pub struct ArrowRow {
    pub name: String,
    pub from: String,
    pub to: String,
}

#[derive(Serialize)]
pub struct AlgebraReport {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowRow>,
    pub relations: Vec<String>,
}

impl AlgebraReport {
    pub fn new(alg: &AlgebraPresentation) -> Self {
        let q = alg.quiver();
        AlgebraReport {
            vertices: q.vertices().to_vec(),
            arrows: q
                .arrows()
                .iter()
                .map(|a| ArrowRow {
                    name: a.name.clone(),
                    from: q.vertices()[a.source].clone(),
                    to: q.vertices()[a.target].clone(),
                })
                .collect(),
            relations: alg.relations().iter().map(|r| r.display(q)).collect(),
        }
    }
}

pub fn mark(pass: bool) -> &'static str {
    if pass {
        "ok"
    } else {
        "FAIL"
    }
}

pub fn algebra(r: &AlgebraReport) -> String {
    let mut s = format!("vertices: {}\n", r.vertices.join(", "));
    for a in &r.arrows {
        let _ = writeln!(s, "arrow {}: {} -> {}", a.name, a.from, a.to);
    }
    for (i, rel) in r.relations.iter().enumerate() {
        let _ = writeln!(s, "relation {i}: {rel}");
    }
    s
}

fn unverified(values: &[EulerValue]) -> String {
    let mut s = String::new();
    for v in values.iter().filter(|v| !v.is_verified()) {
        let _ = writeln!(s, "  consistency check failed for {}: {:?}", v.label, v.consistency);
    }
    s
}

pub fn signature(sig: &DeltaSignature) -> String {
    let mut s = format!("{} (dims {:?}, {:?} mode)\n", sig.label, sig.dims, sig.mode);
    for (k, v) in &sig.table {
        let _ = writeln!(s, "  {k}: {v}");
    }
    s + &unverified(&sig.values)
}

pub fn multiplicativity(r: &MultiplicativityReport) -> String {
    let mut s = String::from("type: chi(sum) vs product\n");
    for row in &r.rows {
        let _ = writeln!(s, "  {}: {} vs {} {}", row.flag_type, row.sum_value, row.product_value, mark(row.pass));
    }
    s
}

pub fn strata(t: &StrataTable) -> String {
    let mut s = format!("dim Ext1 = {}, middle terms of dimension vector {:?}\n", t.ext_dim, t.dims);
    for (k, p) in t.primes.iter().enumerate() {
        let _ = writeln!(s, "  q={p}: {:?}", t.counts[k]);
    }
    for (name, chi) in t.members.iter().zip(&t.chi) {
        if *chi != 0 {
            let _ = writeln!(s, "  chi <{name}> = {chi}");
        }
    }
    let _ = writeln!(s, "  totals match [dim Ext1]_q: {}", mark(t.totals_ok));
    s + &unverified(&t.values)
}

#[derive(Serialize)]
pub struct CatalogAudit {
    pub audit: AuditReport,
    /// Catalog members outside the subcategory of the simples.
    pub skipped: Vec<String>,
}

pub fn catalog_audit(r: &CatalogAudit) -> String {
    let mut s = String::new();
    if !r.skipped.is_empty() {
        let _ = writeln!(s, "not in the subcategory, skipped: {}", r.skipped.join(", "));
    }
    s + &audit(&r.audit)
}

pub fn audit(r: &AuditReport) -> String {
    let mut s = String::new();
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    let asym: Vec<_> = r.rows.iter().filter(|x| !x.symmetric).collect();
    let _ = writeln!(s, "{} pairs audited, {} asymmetric", r.rows.len(), asym.len());
    for x in asym {
        let _ = writeln!(
            s,
            "  Ext1({l},{r}) = {} but Ext1({r},{l}) = {}",
            x.ext_lr,
            x.ext_rl,
            l = x.left,
            r = x.right
        );
    }
    s
}

pub fn suite(r: &SuiteReport) -> String {
    let mut s = String::new();
    for c in &r.cases {
        let _ = writeln!(
            s,
            "{}: {} pairs, symmetric {} (expected {}), {} formula checks, {}",
            c.instance,
            c.pairs,
            c.symmetric,
            c.expect_symmetric,
            c.formula_checks,
            mark(c.pass)
        );
        for (l, r, a, b) in &c.asymmetric_pairs {
            let _ = writeln!(s, "  Ext1({l},{r}) = {a}, Ext1({r},{l}) = {b}");
        }
        for f in &c.formula_failures {
            let _ = writeln!(s, "  failure: {f}");
        }
    }
    s
}

pub fn verification(r: &VerificationReport) -> String {
    let name = match r.formula {
        Formula::Formula1 => "Grassmannian form",
        Formula::Formula2 => "flag form",
    };
    let (m, n) = (&r.instance.m, &r.instance.n);
    let mut s = format!(
        "{name} for M={m}, N={n}\ndim Ext1(M,N) = {}, dim Ext1(N,M) = {}\n",
        r.ext_mn, r.ext_nm
    );
    for st in &r.strata {
        let _ = writeln!(s, "  <{}>: {} + {}", st.class, st.chi_mn, st.chi_nm);
    }
    for row in &r.rows {
        let efg = row.efg.map(|e| format!(" (EF^g {e})")).unwrap_or_default();
        let _ = writeln!(s, "  {}: {} = {}{efg} {}", row.key, row.lhs, row.rhs, mark(row.pass));
    }
    if !r.strata_totals_ok {
        s.push_str("  stratum counts do not add up\n");
    }
    s + &unverified(&r.euler_values)
}
