//! Sequence files for `limit`.
//!
//! ```json
//! { "terms": ["1", "1 + x", "1 + x + x^2"], "moduli": { "0": 1, "1": 2 }, "window": 3 }
//! ```
//!
//! Terms past the end of the list repeat the last one. Without `radius`,
//! `moduli` maps a radius exponent `k` to the index `N_k` past which terms
//! are within `x^k` of each other. With `radius`, the keys are the swing
//! levels `1, 2, …` of that radius and the r-limit is computed instead.

use std::collections::BTreeMap;

use betaspace::laurent::{cauchy_limit, eval_expression, sequence, ExponentModulus, LimitCheck};
use betaspace::level::{r_limit_series, RLimitCheck};
use betaspace::{LaurentSeries, PrecisionBudget};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{CliError, Output};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceFile {
    terms: Vec<String>,
    moduli: BTreeMap<i64, usize>,
    #[serde(default)]
    radius: Option<String>,
    #[serde(default = "default_window")]
    window: usize,
}

fn default_window() -> usize {
    3
}

#[derive(Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    Cauchy,
    RLimit,
}

pub fn limit(text: &str, budget: &PrecisionBudget) -> Result<Output, CliError> {
    let file: SequenceFile =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("sequence file: {e}")))?;
    if file.terms.is_empty() || file.moduli.is_empty() {
        return Err(CliError::Input(
            "sequence file needs terms and moduli".into(),
        ));
    }
    let terms = file
        .terms
        .iter()
        .map(|t| eval_expression(t, budget))
        .collect::<Result<Vec<LaurentSeries>, _>>()?;
    let last = terms.len() - 1;
    let (mode, value) = match &file.radius {
        None => {
            let seq = sequence(move |n| terms[n.min(last)].clone());
            let (&first, _) = file.moduli.first_key_value().expect("nonempty");
            let (&final_exponent, _) = file.moduli.last_key_value().expect("nonempty");
            let check = LimitCheck {
                first_exponent: first,
                last_exponent: final_exponent,
                window: file.window,
            };
            let moduli = ExponentModulus::table(file.moduli.clone());
            (Mode::Cauchy, cauchy_limit(&seq, &moduli, &check, budget)?)
        }
        Some(r) => {
            let r = eval_expression(r, budget)?;
            if file.moduli.keys().any(|&k| k < 1) {
                return Err(CliError::Input(
                    "r-limit moduli are keyed by level 1, 2, …".into(),
                ));
            }
            let levels: Vec<usize> = file.moduli.values().copied().collect();
            let seq = |n: usize| terms[n.min(last)].clone();
            let modulus = |k: usize| levels[(k - 1).min(levels.len() - 1)];
            let check = RLimitCheck {
                levels: levels.len(),
                window: file.window,
            };
            (
                Mode::RLimit,
                r_limit_series(&seq, &r, &modulus, &check, budget)?,
            )
        }
    };
    let shown = value.display(budget.horizon).to_string();
    let structured = json!({ "mode": mode, "horizon": budget.horizon, "limit": shown });
    Ok(Output::new(format!("{shown}\n"), &structured, true))
}
