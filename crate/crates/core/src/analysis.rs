//! Post-processing of memory-experiment counts: per-round rates, likelihood
//! intervals, threshold crossings and exponential scaling fits.

use crate::arch::{CodeVariant, MemoryBasis};
use crate::noise::Bias;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Likelihood-ratio factor defining the confidence interval.
pub const LIKELIHOOD_FACTOR: f64 = 1000.0;

/// Per-round logical error targets of the Quop regimes.
pub const QUOP_TARGETS: [(&str, f64); 3] = [("MegaQuop", 1e-6), ("GigaQuop", 1e-9), ("TeraQuop", 1e-12)];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("shot failure probability {0} outside [0, 1/2]")]
    BadProbability(f64),
    #[error("rounds must be at least 1")]
    NoRounds,
    #[error("{failures} failures exceed {shots} shots")]
    FailuresExceedShots { failures: u64, shots: u64 },
    #[error("need at least {needed} distances, got {got}")]
    TooFewDistances { needed: usize, got: usize },
    #[error("distance {d} has only {got} usable points, need {needed}")]
    TooFewPoints { d: u32, got: usize, needed: usize },
    #[error("distance {d} has two points at p = {p}")]
    DuplicatePoint { d: u32, p: f64 },
    #[error("curves for d = {d_low} and d = {d_high} do not cross in the sampled range")]
    NoCrossing { d_low: u32, d_high: u32 },
    #[error("logical error rate does not decrease with distance (slope {slope}); refusing to extrapolate")]
    AboveThreshold { slope: f64 },
    #[error("point at d = {d} has no failures; its rate cannot be fitted")]
    ZeroRate { d: u32 },
    #[error("csv: {0}")]
    Csv(String),
}

/// Convert a whole-experiment failure probability to a per-round one,
/// assuming independent rounds: `(1 - (1 - 2P)^(1/R)) / 2`.
pub fn per_round_rate(p_shot: f64, rounds: u32) -> Result<f64, AnalysisError> {
    if !(0.0..=0.5).contains(&p_shot) {
        return Err(AnalysisError::BadProbability(p_shot));
    }
    if rounds == 0 {
        return Err(AnalysisError::NoRounds);
    }
    Ok(0.5 * (1.0 - (1.0 - 2.0 * p_shot).powf(1.0 / rounds as f64)))
}

fn log_likelihood(k: u64, n: u64, p: f64) -> f64 {
    let a = if k == 0 { 0.0 } else { k as f64 * p.ln() };
    let b = if k == n { 0.0 } else { (n - k) as f64 * (-p).ln_1p() };
    a + b
}

/// Interval of `p` whose binomial likelihood is within `factor` of the
/// maximum at `k/n`, each end found by bisection. `n = 0` gives `[0, 1]`.
pub fn binomial_interval(failures: u64, shots: u64, factor: f64) -> Result<(f64, f64), AnalysisError> {
    if failures > shots {
        return Err(AnalysisError::FailuresExceedShots { failures, shots });
    }
    if shots == 0 {
        return Ok((0.0, 1.0));
    }
    let (k, n) = (failures, shots);
    let mle = k as f64 / n as f64;
    let cut = log_likelihood(k, n, mle) - factor.ln();
    let inside = |p: f64| log_likelihood(k, n, p) >= cut;
    let bisect = |mut good: f64, mut bad: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (good + bad);
            if mid == good || mid == bad {
                break;
            }
            if inside(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    };
    let low = if k == 0 { 0.0 } else { bisect(mle, 0.0) };
    let high = if k == n { 1.0 } else { bisect(mle, 1.0) };
    Ok((low, high))
}

/// One `(p, d)` point of a logical-error curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub p: f64,
    pub d: u32,
    pub shots: u64,
    pub failures: u64,
    pub pl_round: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl CurvePoint {
    /// Per-round rate and interval from raw counts; shot-level interval
    /// ends are mapped through [`per_round_rate`] (clamped at 1/2).
    pub fn from_counts(p: f64, d: u32, rounds: u32, shots: u64, failures: u64) -> Result<Self, AnalysisError> {
        let (lo, hi) = binomial_interval(failures, shots, LIKELIHOOD_FACTOR)?;
        let mle = if shots == 0 { 0.0 } else { failures as f64 / shots as f64 };
        let conv = |x: f64| per_round_rate(x.min(0.5), rounds);
        Ok(CurvePoint { p, d, shots, failures, pl_round: conv(mle)?, ci_low: conv(lo)?, ci_high: conv(hi)? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub d_low: u32,
    pub d_high: u32,
    pub p: f64,
    /// Crossing range when both curves move to their interval ends.
    pub p_min: f64,
    pub p_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdEstimate {
    pub p_th: f64,
    /// Larger of the half-spread of the pairwise crossings and the widest
    /// interval-propagated half-range.
    pub uncertainty: f64,
    pub crossings: Vec<Crossing>,
}

impl ThresholdEstimate {
    /// True when the two estimates agree within their combined uncertainty
    /// (added in quadrature).
    pub fn agrees_with(&self, other: &ThresholdEstimate) -> bool {
        (self.p_th - other.p_th).abs() <= self.uncertainty.hypot(other.uncertainty)
    }
}

/// Piecewise-linear `ln pL` against `ln p`.
struct LogCurve {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl LogCurve {
    fn at(&self, x: f64) -> f64 {
        let i = self.x.partition_point(|&v| v < x).clamp(1, self.x.len() - 1);
        let (x0, x1, y0, y1) = (self.x[i - 1], self.x[i], self.y[i - 1], self.y[i]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// First point where `high - low` turns from negative to non-negative,
/// exact for piecewise-linear curves on the merged grid.
fn crossing(low: &LogCurve, high: &LogCurve) -> Option<f64> {
    let lo = low.x[0].max(high.x[0]);
    let hi = low.x[low.x.len() - 1].min(high.x[high.x.len() - 1]);
    let mut grid: Vec<f64> = low.x.iter().chain(&high.x).copied().filter(|&x| x >= lo && x <= hi).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let g = |x: f64| high.at(x) - low.at(x);
    for w in grid.windows(2) {
        let (g0, g1) = (g(w[0]), g(w[1]));
        if g0 < 0.0 && g1 >= 0.0 {
            return Some(w[0] + (w[1] - w[0]) * g0 / (g0 - g1));
        }
    }
    None
}

fn log_curve(points: &[&CurvePoint], value: impl Fn(&CurvePoint) -> f64) -> LogCurve {
    LogCurve { x: points.iter().map(|c| c.p.ln()).collect(), y: points.iter().map(|c| value(c).max(f64::MIN_POSITIVE).ln()).collect() }
}

/// Threshold from the crossings of consecutive-distance curves.
///
/// Points without failures carry no slope information and are dropped.
/// Each remaining curve needs at least three points.
pub fn threshold_estimate(points: &[CurvePoint]) -> Result<ThresholdEstimate, AnalysisError> {
    let mut by_d: BTreeMap<u32, Vec<&CurvePoint>> = BTreeMap::new();
    for c in points.iter().filter(|c| c.failures > 0 && c.pl_round > 0.0) {
        by_d.entry(c.d).or_default().push(c);
    }
    for c in points {
        by_d.entry(c.d).or_default();
    }
    if by_d.len() < 2 {
        return Err(AnalysisError::TooFewDistances { needed: 2, got: by_d.len() });
    }
    for (&d, curve) in by_d.iter_mut() {
        curve.sort_by(|a, b| a.p.total_cmp(&b.p));
        if let Some(w) = curve.windows(2).find(|w| w[0].p == w[1].p) {
            return Err(AnalysisError::DuplicatePoint { d, p: w[0].p });
        }
        if curve.len() < 3 {
            return Err(AnalysisError::TooFewPoints { d, got: curve.len(), needed: 3 });
        }
    }
    let ds: Vec<u32> = by_d.keys().copied().collect();
    let mut crossings = Vec::new();
    for w in ds.windows(2) {
        let (a, b) = (&by_d[&w[0]], &by_d[&w[1]]);
        let mid = crossing(&log_curve(a, |c| c.pl_round), &log_curve(b, |c| c.pl_round))
            .ok_or(AnalysisError::NoCrossing { d_low: w[0], d_high: w[1] })?;
        // Small d pessimistic and large d optimistic pushes the crossing
        // right; the opposite pushes it left.
        let span_lo = a[0].p.ln().max(b[0].p.ln());
        let span_hi = a[a.len() - 1].p.ln().min(b[b.len() - 1].p.ln());
        let right = crossing(&log_curve(a, |c| c.ci_high), &log_curve(b, |c| c.ci_low)).unwrap_or(span_hi);
        let left = crossing(&log_curve(a, |c| c.ci_low), &log_curve(b, |c| c.ci_high)).unwrap_or(span_lo);
        crossings.push(Crossing {
            d_low: w[0],
            d_high: w[1],
            p: mid.exp(),
            p_min: left.min(mid).exp(),
            p_max: right.max(mid).exp(),
        });
    }
    let n = crossings.len() as f64;
    let p_th = crossings.iter().map(|c| c.p).sum::<f64>() / n;
    let max = crossings.iter().map(|c| c.p).fold(f64::MIN, f64::max);
    let min = crossings.iter().map(|c| c.p).fold(f64::MAX, f64::min);
    let propagated = crossings.iter().map(|c| 0.5 * (c.p_max - c.p_min)).fold(0.0, f64::max);
    Ok(ThresholdEstimate { p_th, uncertainty: (0.5 * (max - min)).max(propagated), crossings })
}

/// Least-squares line `ln pL = intercept + slope * d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// `ln pL - fit` for each input point, in input order.
    pub residuals: Vec<f64>,
}

impl ScalingFit {
    pub fn fit(points: &[(u32, f64)]) -> Result<Self, AnalysisError> {
        let mut distinct: Vec<u32> = points.iter().map(|&(d, _)| d).collect();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < 2 {
            return Err(AnalysisError::TooFewDistances { needed: 2, got: distinct.len() });
        }
        if let Some(&(d, _)) = points.iter().find(|&&(_, pl)| !(pl > 0.0)) {
            return Err(AnalysisError::ZeroRate { d });
        }
        let n = points.len() as f64;
        let mx = points.iter().map(|&(d, _)| d as f64).sum::<f64>() / n;
        let my = points.iter().map(|&(_, pl)| pl.ln()).sum::<f64>() / n;
        let sxy: f64 = points.iter().map(|&(d, pl)| (d as f64 - mx) * (pl.ln() - my)).sum();
        let sxx: f64 = points.iter().map(|&(d, _)| (d as f64 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let residuals = points.iter().map(|&(d, pl)| pl.ln() - (intercept + slope * d as f64)).collect();
        Ok(ScalingFit { slope, intercept, residuals })
    }

    pub fn predict(&self, d: u32) -> f64 {
        (self.intercept + self.slope * d as f64).exp()
    }

    /// Smallest odd distance (at least 3) whose predicted rate is at or
    /// below `target`.
    pub fn distance_for(&self, target: f64) -> Result<u32, AnalysisError> {
        if self.slope >= 0.0 {
            return Err(AnalysisError::AboveThreshold { slope: self.slope });
        }
        let x = (target.ln() - self.intercept) / self.slope;
        // Forgive rounding when the target sits exactly on an integer.
        let mut d = (x - 1e-9 * x.abs().max(1.0)).ceil().max(3.0) as u32;
        if d % 2 == 0 {
            d += 1;
        }
        Ok(d)
    }
}

/// Fit `(d, pL)` points and return the required distance for each target.
pub fn fit_and_project(points: &[(u32, f64)], targets: &[f64]) -> Result<(ScalingFit, Vec<u32>), AnalysisError> {
    let fit = ScalingFit::fit(points)?;
    let ds = targets.iter().map(|&t| fit.distance_for(t)).collect::<Result<Vec<_>, _>>()?;
    Ok((fit, ds))
}

/// One CSV row of a memory sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub variant: CodeVariant,
    pub basis: MemoryBasis,
    pub nx: u32,
    pub ny: u32,
    pub d: u32,
    pub p: f64,
    pub eta: Bias,
    pub rounds: u32,
    pub shots: u64,
    pub failures: u64,
    pub pl_round: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl CurveRow {
    pub fn point(&self) -> CurvePoint {
        CurvePoint {
            p: self.p,
            d: self.d,
            shots: self.shots,
            failures: self.failures,
            pl_round: self.pl_round,
            ci_low: self.ci_low,
            ci_high: self.ci_high,
        }
    }
}

/// CSV text with each line of `comments` emitted first as `# ...`.
pub fn write_csv(rows: &[CurveRow], comments: &[String]) -> Result<String, AnalysisError> {
    let mut out = String::new();
    for c in comments {
        for line in c.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS).map_err(|e| AnalysisError::Csv(e.to_string()))?;
    }
    for r in rows {
        w.serialize(r).map_err(|e| AnalysisError::Csv(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| AnalysisError::Csv(e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).map_err(|e| AnalysisError::Csv(e.to_string()))?);
    Ok(out)
}

pub const CSV_COLUMNS: [&str; 13] =
    ["variant", "basis", "nx", "ny", "d", "p", "eta", "rounds", "shots", "failures", "pl_round", "ci_low", "ci_high"];

/// Parse CSV text, skipping `#` comment lines.
pub fn read_csv(text: &str) -> Result<Vec<CurveRow>, AnalysisError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| AnalysisError::Csv(e.to_string()))?;
    if header.iter().ne(CSV_COLUMNS) {
        return Err(AnalysisError::Csv(format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    r.deserialize().map(|row| row.map_err(|e| AnalysisError::Csv(e.to_string()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn per_round_fixed_points() {
        assert_eq!(per_round_rate(0.3, 1).unwrap(), 0.3);
        assert_eq!(per_round_rate(0.0, 9).unwrap(), 0.0);
        assert!((per_round_rate(0.5, 9).unwrap() - 0.5).abs() < 1e-15);
        assert!(per_round_rate(0.51, 2).is_err());
        assert!(per_round_rate(0.1, 0).is_err());
    }

    #[test]
    fn interval_edges() {
        assert_eq!(binomial_interval(0, 100, 1000.0).unwrap().0, 0.0);
        assert_eq!(binomial_interval(100, 100, 1000.0).unwrap().1, 1.0);
        assert!(binomial_interval(5, 4, 1000.0).is_err());
        // k = 0: (1-p)^n = 1/1000.
        let hi = binomial_interval(0, 100, 1000.0).unwrap().1;
        assert!((hi - (1.0 - 1000f64.powf(-0.01))).abs() < 1e-12);
    }

    #[test]
    fn interval_matches_grid_scan() {
        let (lo, hi) = binomial_interval(10, 1000, 1000.0).unwrap();
        assert!(lo < 0.01 && 0.01 < hi);
        // Independent scan of the likelihood ratio on a 1e-5 grid.
        let ratio = |p: f64| {
            let l = |q: f64| 10.0 * q.ln() + 990.0 * (1.0 - q).ln();
            (l(p) - l(0.01)).exp()
        };
        let grid: Vec<f64> = (1..100_000).map(|i| i as f64 * 1e-5).filter(|&p| ratio(p) >= 1e-3).collect();
        let (glo, ghi) = (grid[0], grid[grid.len() - 1]);
        assert!((lo - glo).abs() <= 1e-5, "{lo} vs {glo}");
        assert!((hi - ghi).abs() <= 1e-5, "{hi} vs {ghi}");
    }

    fn synthetic(p0: f64, ds: &[u32], ps: &[f64]) -> Vec<CurvePoint> {
        let mut out = Vec::new();
        for &d in ds {
            for &p in ps {
                let pl = (p / p0).powf((d as f64 + 1.0) / 2.0) * 0.03;
                out.push(CurvePoint { p, d, shots: 1, failures: 1, pl_round: pl, ci_low: pl * 0.99, ci_high: pl * 1.01 });
            }
        }
        out
    }

    #[test]
    fn synthetic_threshold_recovered() {
        let ps = [0.0012, 0.0015, 0.0017, 0.0020, 0.0023, 0.0026];
        let est = threshold_estimate(&synthetic(0.0018, &[3, 5, 7], &ps)).unwrap();
        assert_eq!(est.crossings.len(), 2);
        for c in &est.crossings {
            assert!((c.p - 0.0018).abs() < 1e-12, "{c:?}");
            assert!(c.p_min <= c.p && c.p <= c.p_max);
        }
        assert!((est.p_th - 0.0018).abs() < 1e-12);
        assert!(est.uncertainty > 0.0 && est.uncertainty < 1e-4);
    }

    #[test]
    fn threshold_rejections() {
        let ps = [0.0012, 0.0015, 0.0017];
        assert!(matches!(
            threshold_estimate(&synthetic(0.0018, &[3], &ps)),
            Err(AnalysisError::TooFewDistances { .. })
        ));
        assert!(matches!(
            threshold_estimate(&synthetic(0.0018, &[3, 5], &ps[..2])),
            Err(AnalysisError::TooFewPoints { .. })
        ));
        assert!(matches!(threshold_estimate(&synthetic(0.0018, &[3, 5], &ps)), Err(AnalysisError::NoCrossing { .. })));
        let mut dup = synthetic(0.0018, &[3, 5], &[0.001, 0.002, 0.003]);
        dup.push(dup[0]);
        assert!(matches!(threshold_estimate(&dup), Err(AnalysisError::DuplicatePoint { .. })));
    }

    #[test]
    fn agreement_uses_quadrature() {
        let a = ThresholdEstimate { p_th: 0.0018, uncertainty: 3e-5, crossings: vec![] };
        let b = ThresholdEstimate { p_th: 0.00184, uncertainty: 4e-5, crossings: vec![] };
        assert!(a.agrees_with(&b));
        let c = ThresholdEstimate { p_th: 0.00186, uncertainty: 4e-5, crossings: vec![] };
        assert!(!a.agrees_with(&c));
    }

    #[test]
    fn closed_form_projection() {
        let pts: Vec<(u32, f64)> = [3, 5, 7, 9].iter().map(|&d| (d, 10f64.powf(-(d as f64) / 5.0))).collect();
        let (fit, ds) = fit_and_project(&pts, &[1e-6]).unwrap();
        assert_eq!(ds, vec![31]);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn table_rows_from_synthetic_lines() {
        // log10 pL = a - b d, chosen so each target lands on a tabulated
        // distance with the next-smaller odd distance falling short.
        let targets: Vec<f64> = QUOP_TARGETS.iter().map(|t| t.1).collect();
        for (a, b, want) in [(-0.8, 0.75, [7, 11, 15]), (-1.8, 0.3, [15, 25, 35]), (-1.85, 0.12, [35, 61, 85])] {
            let pts: Vec<(u32, f64)> = [3, 5, 7].iter().map(|&d| (d, 10f64.powf(a - b * d as f64))).collect();
            assert_eq!(fit_and_project(&pts, &targets).unwrap().1, want.to_vec());
        }
    }

    #[test]
    fn projection_rejections() {
        assert!(matches!(ScalingFit::fit(&[(3, 0.1), (3, 0.2)]), Err(AnalysisError::TooFewDistances { .. })));
        assert!(matches!(ScalingFit::fit(&[(3, 0.1), (5, 0.0)]), Err(AnalysisError::ZeroRate { d: 5 })));
        assert!(matches!(fit_and_project(&[(3, 0.01), (5, 0.02)], &[1e-6]), Err(AnalysisError::AboveThreshold { .. })));
        assert!(matches!(fit_and_project(&[(3, 0.01), (5, 0.01)], &[1e-6]), Err(AnalysisError::AboveThreshold { .. })));
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            CurveRow {
                variant: CodeVariant::Xzzx,
                basis: MemoryBasis::H,
                nx: 2,
                ny: 3,
                d: 5,
                p: 0.0018,
                eta: Bias::Finite(100.0),
                rounds: 15,
                shots: 200_000,
                failures: 3_210,
                pl_round: 0.0010827,
                ci_low: 0.001,
                ci_high: 0.0012,
            },
            CurveRow { variant: CodeVariant::Css, basis: MemoryBasis::Z, eta: Bias::Infinite, ..rows_seed() },
        ];
        let text = write_csv(&rows, &["seed = 7".into(), "a\nb".into()]).unwrap();
        assert!(text.starts_with("# seed = 7\n# a\n# b\nvariant,basis,nx,ny,d,p,eta,rounds,shots,failures,pl_round,ci_low,ci_high\n"));
        assert!(text.contains("xzzx,H,2,3,5,0.0018,100,15,200000,3210,"));
        assert_eq!(read_csv(&text).unwrap(), rows);
        assert_eq!(read_csv(&write_csv(&[], &[]).unwrap()).unwrap(), vec![]);
        assert!(read_csv("d,p\n3,0.1\n").is_err());
    }

    fn rows_seed() -> CurveRow {
        CurveRow {
            variant: CodeVariant::Xzzx,
            basis: MemoryBasis::H,
            nx: 4,
            ny: 5,
            d: 3,
            p: 1e-4,
            eta: Bias::Finite(1.0),
            rounds: 9,
            shots: 10,
            failures: 0,
            pl_round: 0.0,
            ci_low: 0.0,
            ci_high: 0.07,
        }
    }

    proptest! {
        #[test]
        fn per_round_inverts(p in 0.0f64..0.5, r in 1u32..50) {
            let q = per_round_rate(p, r).unwrap();
            let back = 0.5 * (1.0 - (1.0 - 2.0 * q).powi(r as i32));
            prop_assert!((back - p).abs() < 1e-12);
            prop_assert!(per_round_rate((p + 0.01).min(0.5), r).unwrap() >= q);
            prop_assert!(per_round_rate(p, r + 1).unwrap() <= q + 1e-15);
        }

        #[test]
        fn interval_contains_mle(k in 0u64..200, extra in 0u64..2000) {
            let n = k + extra;
            prop_assume!(n > 0);
            let (lo, hi) = binomial_interval(k, n, 1000.0).unwrap();
            let mle = k as f64 / n as f64;
            prop_assert!(lo <= mle && mle <= hi);
            let point = CurvePoint::from_counts(0.001, 3, 9, n, k).unwrap();
            prop_assert!(point.ci_low <= point.pl_round && point.pl_round <= point.ci_high);
        }

        #[test]
        fn threshold_ignores_order(seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut pts = synthetic(0.002, &[3, 5, 7], &[0.0012, 0.0016, 0.0021, 0.0026]);
            let a = threshold_estimate(&pts).unwrap();
            pts.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(a, threshold_estimate(&pts).unwrap());
        }

        #[test]
        fn projection_is_odd_and_monotone(a in -3.0f64..0.0, b in 0.05f64..1.0) {
            let pts: Vec<(u32, f64)> = [3, 5, 7].iter().map(|&d| (d, 10f64.powf(a - b * d as f64))).collect();
            let (_, ds) = fit_and_project(&pts, &[1e-6, 1e-9, 1e-12]).unwrap();
            prop_assert!(ds.iter().all(|d| d % 2 == 1 && *d >= 3));
            prop_assert!(ds[0] <= ds[1] && ds[1] <= ds[2]);
        }
    }
}
