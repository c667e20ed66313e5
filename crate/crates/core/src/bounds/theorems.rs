//! Posterior bound reports. Each report computes both sides exactly as
//! defined on this machine; inequalities whose constants belong to a
//! universal machine are recorded as measured only.

use std::f64::consts::LN_2;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::complexity::Complexity;
use crate::error::{LabError, Result};
use crate::kstar::kstar_upper;
use crate::measures::{MeasureRegistry, Predictor, Semimeasure};
use crate::rational::{self, Rational};
use crate::report::{BoundReport, Value};
use crate::strings;

use super::{deficiency, divergence, expected_distance_sum, DistanceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    /// Conditional complexity plus the complexity of the past length.
    T1,
    /// Deficiency conservation.
    T4,
    /// Condition-monotone complexity plus the complexity of the deficiency.
    T7,
    /// Future deviation under the conditional bound.
    C2,
    /// Future deviation under the condition-monotone bound.
    C9,
}

impl Theorem {
    pub const ALL: [Theorem; 5] = [Theorem::T1, Theorem::T4, Theorem::T7, Theorem::C2, Theorem::C9];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::T1 => "t1",
            Theorem::T4 => "t4",
            Theorem::T7 => "t7",
            Theorem::C2 => "c2",
            Theorem::C9 => "c9",
        }
    }
}

impl FromStr for Theorem {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == s.to_ascii_lowercase())
            .ok_or_else(|| LabError::InvalidArgument(format!("unknown theorem {s:?}")))
    }
}

fn as_bits(x: &[u8], alphabet: usize) -> Vec<u8> {
    if alphabet == 2 {
        x.to_vec()
    } else {
        strings::encode_blocks(x, alphabet)
    }
}

fn ln2_scaled(c: Complexity) -> Value {
    match c {
        Complexity::Finite(n) => Value::real(n as f64 * LN_2),
        Complexity::Infinite => Value::Infinite,
    }
}

/// Report(s) for one theorem at registry entry `index`, past `x` and future
/// `y`. For the two corollaries only `ℓ(y)` matters: it is the length of the
/// future window.
pub fn theorem_report(
    which: Theorem,
    registry: &MeasureRegistry,
    predictor: &Predictor,
    index: usize,
    x: &[u8],
    y: &[u8],
) -> Result<Vec<BoundReport>> {
    let mu = registry.get(index)?;
    let alphabet = registry.alphabet();
    let code = registry.code(index)?;
    let est = predictor.estimator();
    let b = est.budget();
    let xy = [x, y].concat();
    let mu_x = mu.prob(x);
    let mu_xy = mu.prob(&xy);
    if mu_xy.is_zero() {
        return Err(LabError::NullCondition(strings::show(&xy)));
    }
    let x_bits = as_bits(x, alphabet);
    let tag = format!("measure={index} x={} y={}", strings::show(x), strings::show(y));
    let d_x = deficiency(mu, predictor, x)?;
    let k_ceil_d = est.k_int(d_x.ceil_value, None)?.value;

    let posterior_log_ratio = || -> Result<(Rational, f64)> {
        let xi_x = predictor.prob(x);
        let xi_xy = predictor.prob(&xy);
        let r = (&mu_xy / &mu_x) * (xi_x / xi_xy);
        let l = rational::log2(&r);
        Ok((r, l))
    };

    let report = match which {
        Theorem::T1 => {
            let (_, lhs) = posterior_log_ratio()?;
            let k_cond = est.k_upper(&code, Some(&x_bits))?.value;
            let k_len = est.k_int(x.len() as i64, None)?.value;
            vec![BoundReport::measured("t1", Value::real(lhs), k_cond.plus(k_len).into())
                .term("k_code_given_x", k_cond)
                .term("k_len_x", k_len)]
        }
        Theorem::T4 => {
            let (ratio, lhs) = posterior_log_ratio()?;
            let d_xy = deficiency(mu, predictor, &xy)?;
            // Ratio form of d(x) - d(xy); equal to the posterior ratio exactly.
            let conserved = &d_x.ratio / &d_xy.ratio;
            let k_code = est.k_upper(&code, None)?.value;
            vec![
                BoundReport::asserted(
                    "t4.identity",
                    Value::Exact((&ratio - &conserved).abs()),
                    Value::Exact(Rational::zero()),
                )
                .term("posterior_ratio", Value::Exact(ratio))
                .term("deficiency_ratio", Value::Exact(conserved))
                .term("log2_posterior_ratio", Value::real(lhs))
                .term("deficiency_difference", Value::real(d_x.value - d_xy.value)),
                BoundReport::measured("t4", Value::real(lhs), k_code.plus(k_ceil_d).into())
                    .term("k_code", k_code)
                    .term("k_ceil_deficiency", k_ceil_d)
                    .term("ceil_deficiency", Value::int(d_x.ceil_value)),
            ]
        }
        Theorem::T7 => {
            let (_, lhs) = posterior_log_ratio()?;
            let k_star = kstar_upper(est, &code, &x_bits)?.value;
            let k_cond = est.k_upper(&code, Some(&x_bits))?.value;
            let k_len = est.k_int(x.len() as i64, None)?.value;
            vec![BoundReport::measured("t7", Value::real(lhs), k_star.plus(k_ceil_d).into())
                .term("kstar_code_given_x", k_star)
                .term("k_ceil_deficiency", k_ceil_d)
                .term("ceil_deficiency", Value::int(d_x.ceil_value))
                .term("t1_rhs", k_cond.plus(k_len))]
        }
        Theorem::C2 | Theorem::C9 => {
            if mu_x.is_zero() {
                return Err(LabError::NullCondition(strings::show(x)));
            }
            let n = x.len() + y.len();
            let kind = DistanceKind::SquaredDiff;
            let lhs = expected_distance_sum(mu, predictor, x, n, &kind)?;
            let div = divergence(mu, predictor, x, n)?;
            if which == Theorem::C2 {
                let k_cond = est.k_upper(&code, Some(&x_bits))?.value;
                let k_len = est.k_int(x.len() as i64, None)?.value;
                vec![BoundReport::measured("c2", Value::real(lhs), ln2_scaled(k_cond.plus(k_len)))
                    .term("divergence", Value::real(div))
                    .term("k_code_given_x", k_cond)
                    .term("k_len_x", k_len)]
            } else {
                let mut best = Complexity::Infinite;
                for i in 0..=x.len() {
                    let c = est
                        .k_upper(&code, Some(&as_bits(&x[..i], alphabet)))?
                        .value
                        .plus(est.k_int(i as i64, None)?.value);
                    best = best.min(c);
                }
                vec![BoundReport::measured("c9", Value::real(lhs), ln2_scaled(best.plus(k_ceil_d)))
                    .term("divergence", Value::real(div))
                    .term("min_prefix_complexity", best)
                    .term("k_ceil_deficiency", k_ceil_d)]
            }
        }
    };
    Ok(report
        .into_iter()
        .map(|r| r.budgets(b.max_len, b.max_steps).note(tag.clone()))
        .collect())
}

/// Whether every complexity in the report was witnessed.
pub fn fully_witnessed(report: &BoundReport) -> bool {
    !matches!(report.rhs, Value::Infinite) && report.rhs_terms.iter().all(|(_, v)| !matches!(v, Value::Infinite))
}
