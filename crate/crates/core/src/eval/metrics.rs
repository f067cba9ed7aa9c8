use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EvalError;

/// Square count matrix; rows are gold labels, columns are predictions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(labels: &[&str], counts: Vec<Vec<u64>>) -> Result<Self, EvalError> {
        let k = labels.len();
        if k == 0 {
            return Err(EvalError::Empty);
        }
        if counts.len() != k || counts.iter().any(|row| row.len() != k) {
            return Err(EvalError::MatrixShape { labels: k });
        }
        Ok(Self {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            counts,
        })
    }

    pub fn tally(pred: &[&str], gold: &[&str], labels: &[&str]) -> Result<Self, EvalError> {
        if pred.len() != gold.len() {
            return Err(EvalError::LengthMismatch {
                left: pred.len(),
                right: gold.len(),
            });
        }
        let index = |l: &str| {
            labels
                .iter()
                .position(|&x| x == l)
                .ok_or_else(|| EvalError::UnknownLabel(l.to_string()))
        };
        let k = labels.len();
        let mut counts = vec![vec![0u64; k]; k];
        for (&p, &g) in pred.iter().zip(gold) {
            counts[index(g)?][index(p)?] += 1;
        }
        Self::new(labels, counts)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn class(&self, i: usize) -> ClassMetrics {
        let tp = self.counts[i][i];
        let gold: u64 = self.counts[i].iter().sum();
        let predicted: u64 = self.counts.iter().map(|row| row[i]).sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, gold);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ClassMetrics {
            label: self.labels[i].clone(),
            precision,
            recall,
            f1,
            support: gold,
            predicted,
        }
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold count.
    pub support: u64,
    pub predicted: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierReport {
    pub n: u64,
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub per_class: Vec<ClassMetrics>,
    pub positive: ClassMetrics,
    /// Unweighted mean over classes seen in gold or predictions.
    pub macro_avg: Averages,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub by_grade: BTreeMap<String, ClassifierReport>,
}

impl ClassifierReport {
    pub fn from_confusion(confusion: ConfusionMatrix, positive: &str) -> Result<Self, EvalError> {
        let pos = confusion
            .index_of(positive)
            .ok_or_else(|| EvalError::UnknownLabel(positive.to_string()))?;
        let n = confusion.total();
        let correct: u64 = (0..confusion.labels.len()).map(|i| confusion.counts[i][i]).sum();
        let per_class: Vec<_> = (0..confusion.labels.len()).map(|i| confusion.class(i)).collect();
        let seen: Vec<_> = per_class.iter().filter(|c| c.support + c.predicted > 0).collect();
        let mean = |f: fn(&ClassMetrics) -> f64| {
            if seen.is_empty() {
                0.0
            } else {
                seen.iter().map(|c| f(c)).sum::<f64>() / seen.len() as f64
            }
        };
        let macro_avg = Averages {
            precision: mean(|c| c.precision),
            recall: mean(|c| c.recall),
            f1: mean(|c| c.f1),
        };
        Ok(Self {
            n,
            accuracy: ratio(correct, n),
            positive: per_class[pos].clone(),
            per_class,
            macro_avg,
            confusion,
            by_grade: BTreeMap::new(),
        })
    }
}

/// Precision, recall and F1 for `pred` against `gold`. With `grades`, the
/// same report is repeated for each grade slice.
pub fn classifier_metrics(
    pred: &[&str],
    gold: &[&str],
    labels: &[&str],
    positive: &str,
    grades: Option<&[&str]>,
) -> Result<ClassifierReport, EvalError> {
    let mut report = ClassifierReport::from_confusion(ConfusionMatrix::tally(pred, gold, labels)?, positive)?;
    if let Some(grades) = grades {
        if grades.len() != gold.len() {
            return Err(EvalError::LengthMismatch {
                left: grades.len(),
                right: gold.len(),
            });
        }
        let mut slices: BTreeMap<&str, (Vec<&str>, Vec<&str>)> = BTreeMap::new();
        for ((&g, &p), &y) in grades.iter().zip(pred).zip(gold) {
            let e = slices.entry(g).or_default();
            e.0.push(p);
            e.1.push(y);
        }
        for (grade, (p, y)) in slices {
            let slice = ClassifierReport::from_confusion(ConfusionMatrix::tally(&p, &y, labels)?, positive)?;
            report.by_grade.insert(grade.to_string(), slice);
        }
    }
    Ok(report)
}
