//! Error measures and support detection scores.

use tubal_core::{Norm, Result, Tensor3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub fro: f64,
    pub inf: f64,
    pub l1: f64,
    pub l112: f64,
}

pub fn norms(a: &Tensor3) -> Norms {
    Norms {
        fro: a.norm(Norm::Frobenius),
        inf: a.norm(Norm::Max),
        l1: a.norm(Norm::L1),
        l112: a.norm(Norm::L112),
    }
}

/// Confusion counts and derived scores of a detected support against a mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportScores {
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 { 0.0 } else { num as f64 / den as f64 }
}

/// Entries with `|s| > rel_threshold * max|s|` count as detected, nonzero
/// mask entries as true support. An all-zero `s` detects nothing.
pub fn support_scores(s: &Tensor3, mask: &Tensor3, rel_threshold: f64) -> Result<SupportScores> {
    if s.shape() != mask.shape() {
        return Err(tubal_core::Error::ShapeMismatch { op: "support_scores", expected: s.shape(), found: mask.shape() });
    }
    let cut = rel_threshold * s.norm(Norm::Max);
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (&v, &m) in s.as_slice().iter().zip(mask.as_slice()) {
        match (v.abs() > cut && v != 0.0, m != 0.0) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f_measure = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
    Ok(SupportScores { true_pos: tp, false_pos: fp, false_neg: fn_, precision, recall, f_measure })
}
