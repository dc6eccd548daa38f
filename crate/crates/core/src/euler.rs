//! Euler characteristics from point counts: exact interpolation in `q`,
//! evaluation at `q = 1`, and an extra-sample consistency check.

use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{format_rational, rational_to_integer};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSeries {
    pub label: String,
    /// `(q, count)` with distinct primes `q`.
    pub samples: Vec<(u64, u64)>,
    pub degree_bound: usize,
}

impl CountSeries {
    pub fn new(label: impl Into<String>, degree_bound: usize) -> Self {
        CountSeries {
            label: label.into(),
            samples: Vec::new(),
            degree_bound,
        }
    }

    pub fn with_samples(label: impl Into<String>, degree_bound: usize, samples: Vec<(u64, u64)>) -> Self {
        CountSeries {
            label: label.into(),
            samples,
            degree_bound,
        }
    }

    pub fn push(&mut self, q: u64, count: u64) {
        self.samples.push((q, count));
    }

    /// Samples needed: `degree_bound + 1` to interpolate, one more to check.
    pub fn required_samples(&self) -> usize {
        self.degree_bound + 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Consistency {
    Verified,
    Failed { prime: u64, expected: String, observed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerValue {
    pub label: String,
    pub value: i64,
    /// Coefficients of the interpolated polynomial, constant term first, as `p/q` strings.
    pub polynomial: Vec<String>,
    pub degree_bound: usize,
    pub samples: Vec<(u64, u64)>,
    pub consistency: Consistency,
}

impl EulerValue {
    pub fn is_verified(&self) -> bool {
        self.consistency == Consistency::Verified
    }
}

/// Interpolates, checks the remaining samples and evaluates at 1. Inconsistent
/// series are reported through [`Consistency::Failed`]; use [`interpolate_euler`]
/// to turn that into an error.
pub fn interpolate(series: &CountSeries) -> Result<EulerValue> {
    let need = series.required_samples();
    if series.samples.len() < need {
        return Err(Error::NotEnoughSamples {
            label: series.label.clone(),
            have: series.samples.len(),
            need,
        });
    }
    let mut seen = std::collections::HashSet::new();
    for (q, _) in &series.samples {
        if !seen.insert(*q) {
            return Err(Error::Parse(format!("{}: repeated sample prime {q}", series.label)));
        }
    }
    let n = series.degree_bound + 1;
    let points: Vec<(BigRational, BigRational)> = series.samples[..n]
        .iter()
        .map(|&(q, c)| (int(q), int(c)))
        .collect();
    let coeffs = newton_to_monomial(&points);
    let mut consistency = Consistency::Verified;
    for &(q, c) in &series.samples[n..] {
        let v = evaluate(&coeffs, &int(q));
        if v != int(c) {
            consistency = Consistency::Failed {
                prime: q,
                expected: format_rational(&v),
                observed: c,
            };
            break;
        }
    }
    let at_one = evaluate(&coeffs, &BigRational::one());
    let Some(value) = rational_to_integer(&at_one).and_then(|i| i64::try_from(i).ok()) else {
        // an inconsistent series is reported as such even when its value is fractional
        if let Consistency::Failed {
            prime,
            expected,
            observed,
        } = consistency
        {
            return Err(Error::Consistency {
                label: series.label.clone(),
                prime,
                expected,
                observed,
            });
        }
        return Err(Error::NonIntegerEuler(format!("{}: {}", series.label, format_rational(&at_one))));
    };
    Ok(EulerValue {
        label: series.label.clone(),
        value,
        polynomial: coeffs.iter().map(format_rational).collect(),
        degree_bound: series.degree_bound,
        samples: series.samples.clone(),
        consistency,
    })
}

/// Like [`interpolate`], but a failed consistency check is an error.
pub fn interpolate_euler(series: &CountSeries) -> Result<EulerValue> {
    let v = interpolate(series)?;
    match &v.consistency {
        Consistency::Verified => Ok(v),
        Consistency::Failed {
            prime,
            expected,
            observed,
        } => Err(Error::Consistency {
            label: series.label.clone(),
            prime: *prime,
            expected: expected.clone(),
            observed: *observed,
        }),
    }
}

/// Divides every sample of a cone count by `q − 1`.
pub fn projectivize_series(series: &CountSeries) -> Result<CountSeries> {
    let mut samples = Vec::with_capacity(series.samples.len());
    for &(q, c) in &series.samples {
        if c % (q - 1) != 0 {
            return Err(Error::NotDivisible { prime: q, count: c });
        }
        samples.push((q, c / (q - 1)));
    }
    Ok(CountSeries {
        label: format!("P({})", series.label),
        samples,
        degree_bound: series.degree_bound.saturating_sub(1),
    })
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn evaluate(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Newton divided differences, expanded to monomial coefficients.
fn newton_to_monomial(points: &[(BigRational, BigRational)]) -> Vec<BigRational> {
    let n = points.len();
    let xs: Vec<BigRational> = points.iter().map(|p| p.0.clone()).collect();
    let mut dd: Vec<BigRational> = points.iter().map(|p| p.1.clone()).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    // Horner on the Newton form: p = dd0 + (x-x0)(dd1 + (x-x1)(...))
    let mut coeffs = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        // coeffs <- coeffs * (x - x_i) + dd_i
        let mut next = vec![BigRational::zero(); n];
        for k in 0..n {
            if coeffs[k].is_zero() {
                continue;
            }
            if k + 1 < n {
                next[k + 1] = &next[k + 1] + &coeffs[k];
            }
            next[k] = &next[k] - &coeffs[k] * &xs[i];
        }
        next[0] = &next[0] + &dd[i];
        coeffs = next;
    }
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    coeffs
}
