use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub qwk: f64,
    pub n: usize,
    pub label_range: (i64, i64),
    /// Expected disagreement was zero, so the ratio was undefined and the
    /// value was set by convention: 1.0 if observed disagreement is also
    /// zero, else 0.0.
    pub degenerate: bool,
}

/// Quadratic weighted kappa of two raters over the labels `range.0..=range.1`.
pub fn qwk(a: &[i64], b: &[i64], range: (i64, i64)) -> Result<AgreementReport, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(EvalError::Empty);
    }
    let (lo, hi) = range;
    if lo > hi {
        return Err(EvalError::BadRange { min: lo, max: hi });
    }
    if let Some(&v) = a.iter().chain(b).find(|&&v| v < lo || v > hi) {
        return Err(EvalError::OutOfRange { value: v, min: lo, max: hi });
    }

    let r = (hi - lo + 1) as usize;
    let n = a.len();
    let mut observed = vec![0.0f64; r * r];
    let mut rows = vec![0.0f64; r];
    let mut cols = vec![0.0f64; r];
    for (&x, &y) in a.iter().zip(b) {
        let (i, j) = ((x - lo) as usize, (y - lo) as usize);
        observed[i * r + j] += 1.0;
        rows[i] += 1.0;
        cols[j] += 1.0;
    }

    let denom = if r > 1 { ((r - 1) * (r - 1)) as f64 } else { 1.0 };
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..r {
        for j in 0..r {
            let d = i as f64 - j as f64;
            let w = d * d / denom;
            num += w * observed[i * r + j];
            den += w * rows[i] * cols[j] / n as f64;
        }
    }

    let (value, degenerate) = if den == 0.0 {
        (if num == 0.0 { 1.0 } else { 0.0 }, true)
    } else {
        (1.0 - num / den, false)
    };
    Ok(AgreementReport {
        qwk: value,
        n,
        label_range: range,
        degenerate,
    })
}

/// [`qwk`] over the smallest range covering both raters.
pub fn qwk_observed(a: &[i64], b: &[i64]) -> Result<AgreementReport, EvalError> {
    let lo = a.iter().chain(b).copied().min().ok_or(EvalError::Empty)?;
    let hi = a.iter().chain(b).copied().max().ok_or(EvalError::Empty)?;
    qwk(a, b, (lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_and_reversed() {
        let x = [1, 2, 3, 4, 2, 3];
        assert_eq!(qwk(&x, &x, (1, 4)).unwrap().qwk, 1.0);
        // O is the anti-diagonal, E is uniform 1/4, w = (i-j)^2 / 9:
        // sum wO = 20/9, sum wE = 40/36, so kappa = 1 - 2 = -1.
        let r = qwk(&[1, 2, 3, 4], &[4, 3, 2, 1], (1, 4)).unwrap();
        assert!((r.qwk - -1.0).abs() < 1e-15, "{}", r.qwk);
    }

    #[test]
    fn one_off_in_a_hundred() {
        let a: Vec<i64> = (0..100).map(|i| 1 + i % 4).collect();
        let mut b = a.clone();
        b[0] += 1;
        assert!(qwk(&a, &b, (1, 4)).unwrap().qwk > 0.9);
    }

    #[test]
    fn degenerate_cases() {
        let r = qwk(&[2, 2, 2], &[2, 2, 2], (1, 4)).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.qwk, 1.0);
        let r = qwk(&[2, 2], &[3, 3], (1, 4)).unwrap();
        assert_eq!(r.qwk, 0.0);
        assert_eq!(qwk(&[1], &[1], (1, 1)).unwrap().qwk, 1.0);
    }

    #[test]
    fn errors() {
        assert_eq!(qwk(&[1], &[1, 2], (1, 4)).unwrap_err(), EvalError::LengthMismatch { left: 1, right: 2 });
        assert_eq!(qwk(&[], &[], (1, 4)).unwrap_err(), EvalError::Empty);
        assert!(matches!(qwk(&[5], &[1], (1, 4)), Err(EvalError::OutOfRange { value: 5, .. })));
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(pairs in proptest::collection::vec((0i64..5, 0i64..5), 1..60)) {
            let (a, b): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
            let ab = qwk(&a, &b, (0, 4)).unwrap().qwk;
            let ba = qwk(&b, &a, (0, 4)).unwrap().qwk;
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&ab));
            let self_k = qwk(&a, &a, (0, 4)).unwrap();
            prop_assert!((self_k.qwk - 1.0).abs() < 1e-12);
        }
    }
}
