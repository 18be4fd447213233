//! The evaluation report: per-target rows, aggregates, and serial formats.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use tokenizer_data::canon;

use crate::measures::unlearning_score;
use crate::score::harmonic_mean;
use crate::{MetricError, Result};

/// Per-target metric row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetRow {
    pub target_id: String,
    pub efficacy: f64,
    /// `None` for targets without generalization prompts, rendered as an
    /// empty CSV cell and a JSON null.
    pub generalization: Option<f64>,
}

/// One split's full evaluation: per-target scores, their aggregates, and
/// attack-resistance results when an attack pass ran.
///
/// Every aggregate is recomputable from the components; `validate` enforces
/// the match, so a hand-edited report fails loading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalReport {
    /// Seed of the forget/retain split this evaluation ran under.
    pub split_seed: u64,
    /// Candidate cap of every Score@k in the report.
    pub k: usize,
    /// Digests of the inputs (dataset, checkpoint, engine config) for audit.
    pub config_digests: BTreeMap<String, String>,
    pub per_target: Vec<TargetRow>,
    pub mean_efficacy: f64,
    /// Mean over targets that have generalization prompts; `None` when no
    /// target has any.
    pub mean_generalization: Option<f64>,
    pub specificity: f64,
    /// Harmonic mean of mean efficacy, specificity, and mean generalization
    /// (the last only when present).
    pub unlearning_score: f64,
    /// Per-attack resistance scores, keyed by attack name.
    pub attack_resistances: Option<BTreeMap<String, f64>>,
    /// Harmonic mean of the attack resistances.
    pub resistance_score: Option<f64>,
}

fn check_fraction(what: &str, v: f64) -> Result<()> {
    if !v.is_finite() || !(0.0..=1.0).contains(&v) {
        return Err(MetricError::InvalidScore { what: what.into(), value: v });
    }
    Ok(())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

impl EvalReport {
    /// Assembles a report from components, computing every aggregate.
    pub fn new(
        split_seed: u64,
        k: usize,
        config_digests: BTreeMap<String, String>,
        per_target: Vec<TargetRow>,
        specificity: f64,
    ) -> Result<Self> {
        if per_target.is_empty() {
            return Err(MetricError::EmptyReport);
        }
        let effs: Vec<f64> = per_target.iter().map(|r| r.efficacy).collect();
        let gens: Vec<f64> = per_target.iter().filter_map(|r| r.generalization).collect();
        let mean_efficacy = mean(&effs);
        let mean_generalization = if gens.is_empty() { None } else { Some(mean(&gens)) };
        let score = unlearning_score(mean_efficacy, specificity, mean_generalization)?;
        let report = Self {
            split_seed,
            k,
            config_digests,
            per_target,
            mean_efficacy,
            mean_generalization,
            specificity,
            unlearning_score: score,
            attack_resistances: None,
            resistance_score: None,
        };
        report.validate()?;
        Ok(report)
    }

    /// Attaches attack resistances and computes their harmonic mean.
    pub fn with_attacks(mut self, resistances: BTreeMap<String, f64>) -> Result<Self> {
        let values: Vec<f64> = resistances.values().copied().collect();
        self.resistance_score = Some(harmonic_mean(&values)?);
        self.attack_resistances = Some(resistances);
        self.validate()?;
        Ok(self)
    }

    /// Checks that every score is a fraction and that every stored aggregate
    /// matches recomputation from its components.
    pub fn validate(&self) -> Result<()> {
        if self.per_target.is_empty() {
            return Err(MetricError::EmptyReport);
        }
        for row in &self.per_target {
            check_fraction(&format!("efficacy[{}]", row.target_id), row.efficacy)?;
            if let Some(g) = row.generalization {
                check_fraction(&format!("generalization[{}]", row.target_id), g)?;
            }
        }
        check_fraction("specificity", self.specificity)?;
        check_fraction("mean_efficacy", self.mean_efficacy)?;

        let effs: Vec<f64> = self.per_target.iter().map(|r| r.efficacy).collect();
        let recomputed_eff = mean(&effs);
        if (recomputed_eff - self.mean_efficacy).abs() > 1e-12 {
            return Err(MetricError::AggregateMismatch {
                what: "mean_efficacy".into(),
                stored: self.mean_efficacy,
                recomputed: recomputed_eff,
            });
        }
        let gens: Vec<f64> = self.per_target.iter().filter_map(|r| r.generalization).collect();
        let recomputed_gen = if gens.is_empty() { None } else { Some(mean(&gens)) };
        match (self.mean_generalization, recomputed_gen) {
            (Some(stored), Some(re)) if (stored - re).abs() > 1e-12 => {
                return Err(MetricError::AggregateMismatch {
                    what: "mean_generalization".into(),
                    stored,
                    recomputed: re,
                });
            }
            (Some(stored), None) => {
                return Err(MetricError::AggregateMismatch {
                    what: "mean_generalization".into(),
                    stored,
                    recomputed: f64::NAN,
                });
            }
            (None, Some(re)) => {
                return Err(MetricError::AggregateMismatch {
                    what: "mean_generalization".into(),
                    stored: f64::NAN,
                    recomputed: re,
                });
            }
            _ => {}
        }
        let re_score =
            unlearning_score(self.mean_efficacy, self.specificity, self.mean_generalization)?;
        if (re_score - self.unlearning_score).abs() > 1e-12 {
            return Err(MetricError::AggregateMismatch {
                what: "unlearning_score".into(),
                stored: self.unlearning_score,
                recomputed: re_score,
            });
        }
        match (&self.attack_resistances, self.resistance_score) {
            (Some(map), Some(stored)) => {
                let values: Vec<f64> = map.values().copied().collect();
                let re = harmonic_mean(&values)?;
                if (re - stored).abs() > 1e-12 {
                    return Err(MetricError::AggregateMismatch {
                        what: "resistance_score".into(),
                        stored,
                        recomputed: re,
                    });
                }
            }
            (None, None) => {}
            (Some(_), None) | (None, Some(_)) => {
                return Err(MetricError::AggregateMismatch {
                    what: "resistance_score".into(),
                    stored: self.resistance_score.unwrap_or(f64::NAN),
                    recomputed: f64::NAN,
                });
            }
        }
        Ok(())
    }

    /// Canonical JSON rendering.
    pub fn to_canonical_json(&self) -> Result<String> {
        Ok(canon::to_canonical_json(self)?)
    }

    /// Parses and validates a report file.
    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text)?;
        report.validate()?;
        Ok(report)
    }

    /// Flat CSV: a header, one row per target, and one summary row. Floats
    /// use shortest round-trip formatting; absent values are empty cells.
    pub fn to_csv(&self) -> String {
        let fmt = |v: f64| format!("{v}");
        let opt = |v: Option<f64>| v.map(&fmt).unwrap_or_default();
        let mut out = String::from(
            "row,target_id,efficacy,generalization,specificity,unlearning_score,resistance_score\n",
        );
        for r in &self.per_target {
            out.push_str(&format!(
                "target,{},{},{},,,\n",
                r.target_id,
                fmt(r.efficacy),
                opt(r.generalization)
            ));
        }
        out.push_str(&format!(
            "summary,,{},{},{},{},{}\n",
            fmt(self.mean_efficacy),
            opt(self.mean_generalization),
            fmt(self.specificity),
            fmt(self.unlearning_score),
            opt(self.resistance_score)
        ));
        out
    }
}

/// Mean and standard deviation of one metric across split seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSummary {
    pub per_split: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); zero for a single
    /// split.
    pub std: f64,
}

/// Aggregates one metric's per-split values into mean and sample standard
/// deviation.
pub fn aggregate_splits(values: &[f64]) -> Result<SplitSummary> {
    if values.is_empty() {
        return Err(MetricError::EmptyAggregate);
    }
    for &v in values {
        check_fraction("split value", v)?;
    }
    let m = mean(values);
    let std = if values.len() < 2 {
        0.0
    } else {
        let var =
            values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64;
        var.sqrt()
    };
    Ok(SplitSummary { per_split: values.to_vec(), mean: m, std })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<TargetRow> {
        vec![
            TargetRow { target_id: "forget-000".into(), efficacy: 1.0, generalization: Some(0.9) },
            TargetRow { target_id: "forget-001".into(), efficacy: 0.8, generalization: Some(0.7) },
        ]
    }

    #[test]
    fn aggregates_are_computed_from_rows() {
        let r = EvalReport::new(3, 20, BTreeMap::new(), rows(), 0.75).unwrap();
        assert_eq!(r.mean_efficacy, 0.9);
        assert_eq!(r.mean_generalization, Some(0.8));
        let expect = crate::harmonic_mean(&[0.9, 0.75, 0.8]).unwrap();
        assert_eq!(r.unlearning_score, expect);
    }

    #[test]
    fn tampered_aggregate_fails_validation() {
        let mut r = EvalReport::new(3, 20, BTreeMap::new(), rows(), 0.75).unwrap();
        r.mean_efficacy = 0.95;
        assert!(matches!(r.validate(), Err(MetricError::AggregateMismatch { .. })));
    }

    #[test]
    fn json_roundtrip_preserves_the_report() {
        let r = EvalReport::new(5, 20, BTreeMap::new(), rows(), 0.5).unwrap();
        let text = r.to_canonical_json().unwrap();
        assert!(text.ends_with('\n'));
        let back = EvalReport::from_json(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_has_one_row_per_target_plus_header_and_summary() {
        let r = EvalReport::new(1, 20, BTreeMap::new(), rows(), 0.75).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2 + rows().len());
        assert!(lines[0].starts_with("row,target_id"));
        assert!(lines[1].starts_with("target,forget-000,1,0.9,,,"));
        assert!(lines.last().unwrap().starts_with("summary,,"));
    }

    #[test]
    fn attack_attachment_computes_the_resistance_harmonic_mean() {
        let mut resist = BTreeMap::new();
        resist.insert("logit_lens".to_string(), 0.9);
        resist.insert("delta".to_string(), 0.8);
        resist.insert("perturbation".to_string(), 1.0);
        let r = EvalReport::new(0, 20, BTreeMap::new(), rows(), 0.75)
            .unwrap()
            .with_attacks(resist.clone())
            .unwrap();
        let values: Vec<f64> = resist.values().copied().collect();
        assert_eq!(r.resistance_score, Some(crate::harmonic_mean(&values).unwrap()));
    }

    #[test]
    fn report_rejects_non_finite_or_out_of_range_scores() {
        let bad = vec![TargetRow {
            target_id: "forget-000".into(),
            efficacy: f64::NAN,
            generalization: None,
        }];
        assert!(EvalReport::new(0, 20, BTreeMap::new(), bad, 0.5).is_err());
        assert!(EvalReport::new(0, 20, BTreeMap::new(), rows(), 1.5).is_err());
    }

    #[test]
    fn empty_row_list_is_rejected() {
        assert!(matches!(
            EvalReport::new(0, 20, BTreeMap::new(), vec![], 0.5),
            Err(MetricError::EmptyReport)
        ));
    }

    #[test]
    fn split_aggregation_reports_sample_deviation() {
        let s = aggregate_splits(&[0.8, 0.9, 1.0]).unwrap();
        assert!((s.mean - 0.9).abs() < 1e-12);
        assert!((s.std - 0.1).abs() < 1e-12);
        let single = aggregate_splits(&[0.7]).unwrap();
        assert_eq!(single.std, 0.0);
        assert!(aggregate_splits(&[]).is_err());
    }
}
