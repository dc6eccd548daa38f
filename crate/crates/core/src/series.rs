//! Composition series with factors in a given set of simples, and Ext-symmetry audits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::ext_dim;
use crate::field::Field;
use crate::hom::{hom_basis, hom_dim};
use crate::iso::find_injective;
use crate::module::{RepModule, SubmoduleWitness};

/// A composition series `0 = U_0 ⊂ U_1 ⊂ … ⊂ U_n = M`, listed from the bottom, with
/// `U_k / U_{k−1} ≅ S_{factors[k−1]}`.
#[derive(Debug, Clone)]
pub struct CompositionSeries<E> {
    pub factors: Vec<usize>,
    pub chain: Vec<SubmoduleWitness<E>>,
}

#[derive(Debug, Clone)]
pub enum Membership<E> {
    Series(CompositionSeries<E>),
    NotInCategory,
}

/// Greedy socle-first series: embed some simple into the current quotient, pull the
/// image back, repeat. Fails only when no member of `simples` embeds into a nonzero
/// quotient, which by Jordan–Hölder means `M` is not built from them.
pub fn composition_series<F: Field>(m: &RepModule<F>, simples: &[RepModule<F>]) -> Result<Membership<F::Elem>> {
    let f = m.field();
    let mut current = m.zero_witness();
    let mut chain = vec![current.clone()];
    let mut factors = Vec::new();
    loop {
        let sq = m.sub_quotient(&current)?;
        if sq.quotient.is_zero() {
            break;
        }
        let mut found = None;
        for (i, s) in simples.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            let hom = hom_basis(s, &sq.quotient)?;
            if let Some(phi) = find_injective(&hom)? {
                found = Some((i, phi));
                break;
            }
        }
        let Some((i, phi)) = found else {
            return Ok(Membership::NotInCategory);
        };
        let image = sq.quotient.image_witness(&phi);
        let lifted = image.map_forward(f, &sq.section);
        current = current.sum(f, &lifted);
        m.is_stable(current.spaces())?;
        chain.push(current.clone());
        factors.push(i);
    }
    Ok(Membership::Series(CompositionSeries { factors, chain }))
}

/// Sanity check on a would-be simple: its endomorphism algebra is one-dimensional.
pub fn looks_simple<F: Field>(s: &RepModule<F>) -> Result<bool> {
    Ok(!s.is_zero() && hom_dim(s, s)? == 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditRow {
    pub left: String,
    pub right: String,
    pub ext_lr: usize,
    pub ext_rl: usize,
    pub symmetric: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

/// Compares `dim Ext¹(M,N)` with `dim Ext¹(N,M)` for each pair after checking that
/// every module has composition factors in `simples`.
pub fn ext_symmetry_audit<F: Field>(
    simples: &[(String, RepModule<F>)],
    pairs: &[((String, RepModule<F>), (String, RepModule<F>))],
) -> Result<AuditReport> {
    let mut warnings = Vec::new();
    for (name, s) in simples {
        if !looks_simple(s)? {
            let msg = format!("{name} has an endomorphism algebra of dimension other than 1; it may not be simple");
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }
    let bare: Vec<RepModule<F>> = simples.iter().map(|(_, s)| s.clone()).collect();
    let mut rows = Vec::new();
    for ((ln, l), (rn, r)) in pairs {
        for (name, module) in [(ln, l), (rn, r)] {
            if let Membership::NotInCategory = composition_series(module, &bare)? {
                return Err(Error::NotInCategory(name.clone()));
            }
        }
        let ext_lr = ext_dim(l, r)?;
        let ext_rl = ext_dim(r, l)?;
        rows.push(AuditRow {
            left: ln.clone(),
            right: rn.clone(),
            ext_lr,
            ext_rl,
            symmetric: ext_lr == ext_rl,
        });
    }
    let pass = rows.iter().all(|r| r.symmetric);
    Ok(AuditReport { rows, warnings, pass })
}
