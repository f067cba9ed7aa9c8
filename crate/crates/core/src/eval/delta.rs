use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::feedback::EfLevel;
use crate::scoring::EvidenceScore;

/// One old/new draft pair, keyed by the EF the old draft received.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaInput {
    pub old_ef: EfLevel,
    pub old_npe: f64,
    pub new_npe: f64,
    pub old_spc: f64,
    pub new_spc: f64,
}

impl DeltaInput {
    pub fn from_scores(old_ef: EfLevel, old: &EvidenceScore, new: &EvidenceScore) -> Self {
        Self {
            old_ef,
            old_npe: old.npe as f64,
            new_npe: new.npe as f64,
            old_spc: old.spc as f64,
            new_spc: new.spc as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub old_ef: EfLevel,
    pub n: usize,
    pub mean_old_npe: f64,
    pub mean_new_npe: f64,
    /// `None` when the old mean is zero.
    pub delta_npe_pct: Option<f64>,
    pub mean_old_spc: f64,
    pub mean_new_spc: f64,
    pub delta_spc_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DeltaReport {
    pub rows: Vec<DeltaRow>,
}

/// `(new - old) / old * 100`, or `None` for a zero baseline.
pub fn delta_pct(mean_old: f64, mean_new: f64) -> Option<f64> {
    (mean_old != 0.0).then(|| (mean_new - mean_old) / mean_old * 100.0)
}

pub fn round_sig(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32 + 1;
    let scale = 10f64.powi(digits as i32 - magnitude);
    (x * scale).round() / scale
}

/// Signed percentage at three significant figures, e.g. `+128%`.
pub fn format_pct(pct: Option<f64>) -> String {
    match pct {
        None => "n/a".into(),
        Some(p) => {
            let r = round_sig(p, 3);
            let sign = if r > 0.0 { "+" } else { "" };
            format!("{sign}{}%", fmt_sig(r, 3))
        }
    }
}

fn fmt_sig(x: f64, digits: u32) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32 + 1;
    let decimals = (digits as i32 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Group by old-draft EF and compare means. Levels with no pairs get no row.
pub fn delta_analysis(pairs: &[DeltaInput]) -> DeltaReport {
    let mut groups: BTreeMap<EfLevel, Vec<&DeltaInput>> = BTreeMap::new();
    for p in pairs {
        groups.entry(p.old_ef).or_default().push(p);
    }
    let rows = groups
        .into_iter()
        .map(|(old_ef, g)| {
            let n = g.len();
            let mean = |f: fn(&DeltaInput) -> f64| g.iter().map(|p| f(p)).sum::<f64>() / n as f64;
            let (on, nn) = (mean(|p| p.old_npe), mean(|p| p.new_npe));
            let (os, ns) = (mean(|p| p.old_spc), mean(|p| p.new_spc));
            DeltaRow {
                old_ef,
                n,
                mean_old_npe: on,
                mean_new_npe: nn,
                delta_npe_pct: delta_pct(on, nn),
                mean_old_spc: os,
                mean_new_spc: ns,
                delta_spc_pct: delta_pct(os, ns),
            }
        })
        .collect();
    DeltaReport { rows }
}

impl DeltaReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<4} {:>5} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
            "EF", "n", "NPE old", "NPE new", "dNPE", "SPC old", "SPC new", "dSPC"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<4} {:>5} {:>8.2} {:>8.2} {:>8} {:>8.2} {:>8.2} {:>8}",
                r.old_ef.as_str(),
                r.n,
                r.mean_old_npe,
                r.mean_new_npe,
                format_pct(r.delta_npe_pct),
                r.mean_old_spc,
                r.mean_new_spc,
                format_pct(r.delta_spc_pct)
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn input(ef: EfLevel, npe: (f64, f64), spc: (f64, f64)) -> DeltaInput {
        DeltaInput {
            old_ef: ef,
            old_npe: npe.0,
            new_npe: npe.1,
            old_spc: spc.0,
            new_spc: spc.1,
        }
    }

    #[test]
    fn reported_ef1_gain() {
        let r = delta_analysis(&[input(EfLevel::Ef1, (1.09, 2.49), (3.0, 3.0))]);
        assert_eq!(format_pct(r.rows[0].delta_npe_pct), "+128%");
        assert_eq!(format_pct(r.rows[0].delta_spc_pct), "0%");
    }

    #[test]
    fn formatting() {
        assert_eq!(format_pct(Some(1.9801)), "+1.98%");
        assert_eq!(format_pct(Some(-11.27)), "-11.3%");
        assert_eq!(format_pct(Some(55.0)), "+55.0%");
        assert_eq!(format_pct(None), "n/a");
        assert_eq!(round_sig(999.7, 3), 1000.0);
    }

    #[test]
    fn groups_and_omits() {
        let r = delta_analysis(&[
            input(EfLevel::Ef3, (4.0, 4.0), (6.0, 9.0)),
            input(EfLevel::Ef1, (1.0, 2.0), (0.0, 1.0)),
            input(EfLevel::Ef1, (2.0, 3.0), (0.0, 1.0)),
        ]);
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.rows[0].old_ef, EfLevel::Ef1);
        assert_eq!(r.rows[0].n, 2);
        assert!((r.rows[0].delta_npe_pct.unwrap() - 200.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.rows[0].delta_spc_pct, None);
        assert!(delta_analysis(&[]).rows.is_empty());
    }

    proptest! {
        #[test]
        fn scale_invariant(xs in proptest::collection::vec((0.1f64..10.0, 0.0f64..10.0), 1..20), c in 0.01f64..100.0) {
            let base: Vec<_> = xs.iter().map(|&(o, n)| input(EfLevel::Ef2, (o, n), (o, n))).collect();
            let scaled: Vec<_> = xs.iter().map(|&(o, n)| input(EfLevel::Ef2, (o * c, n * c), (o * c, n * c))).collect();
            let a = delta_analysis(&base).rows[0].delta_npe_pct.unwrap();
            let b = delta_analysis(&scaled).rows[0].delta_npe_pct.unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }
}
