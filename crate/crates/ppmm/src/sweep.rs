//! Sensitivity sweeps: phi-indexed curve series ready for plotting.
//!
//! Every sweep emits `CurveSeries` values whose points carry an explicit
//! validity marker: phi values where identification fails become gap records
//! with a reason string instead of being silently dropped, so multi-series
//! output stays aligned.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identification::{identify, marginal_mean, Phi};
use crate::moments::ObservedSummary;
use crate::selection::lambda_coefficients;

/// An inclusive phi grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiGrid {
    points: Vec<Phi>,
}

impl PhiGrid {
    /// Grid from `start` to `stop` in steps of `step`, endpoints included.
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let bad = || Error::InvalidPhiGrid {
            spec: format!("{start}:{stop}:{step}"),
        };
        if !(start >= 0.0 && stop <= 1.0 && start < stop && step > 0.0 && step <= 1.0) {
            return Err(bad());
        }
        let count = ((stop - start) / step).round() as usize;
        if count == 0 {
            return Err(bad());
        }
        let mut points = Vec::with_capacity(count + 1);
        for i in 0..=count {
            // the divide form lands on clean decimals for decimal bounds
            let v = if i == count {
                stop
            } else {
                start + (i as f64 * (stop - start)) / count as f64
            };
            points.push(Phi::new(v.min(stop))?);
        }
        points.dedup_by(|a, b| (a.value() - b.value()).abs() < 1e-12);
        Ok(Self { points })
    }

    /// Parse a `start:stop:step` specification.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let bad = || Error::InvalidPhiGrid {
            spec: spec.to_string(),
        };
        if parts.len() != 3 {
            return Err(bad());
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        Self::new(nums[0], nums[1], nums[2])
    }

    pub fn points(&self) -> &[Phi] {
        &self.points
    }
}

impl Default for PhiGrid {
    /// 0 to 1 in steps of 0.01.
    fn default() -> Self {
        Self::new(0.0, 1.0, 0.01).expect("default grid is valid")
    }
}

/// Outcome levels at which odds-ratio curves are evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum YLevels {
    /// Respondent mean minus one SD, the mean, and plus one SD.
    MeanPlusMinusSd,
    Explicit(Vec<f64>),
}

/// Where the proxy is fixed while the outcome varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XFix {
    /// The overall proxy mean `pi mu_x^(1) + (1 - pi) mu_x^(0)`.
    OverallMean,
    Explicit(f64),
}

impl XFix {
    pub fn resolve(self, obs: &ObservedSummary) -> f64 {
        match self {
            XFix::OverallMean => obs.overall_mean_x(),
            XFix::Explicit(x) => x,
        }
    }
}

/// Provenance of a series: which mechanism, what was held fixed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesMetadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mechanism_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_level: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

/// One point of a series; `value: None` marks an explicit gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub abscissa: f64,
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// A named sequence of (abscissa, value) points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub name: String,
    pub abscissa_name: String,
    pub points: Vec<CurvePoint>,
    pub metadata: SeriesMetadata,
}

impl CurveSeries {
    /// The points that carry values, as (abscissa, value) pairs.
    pub fn valid_points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points
            .iter()
            .filter_map(|p| p.value.map(|v| (p.abscissa, v)))
    }

    /// Write as CSV with columns `abscissa,value,valid`; gap rows leave the
    /// value empty.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{},value,valid", self.abscissa_name)?;
        for p in &self.points {
            match p.value {
                Some(v) => writeln!(w, "{},{},true", p.abscissa, v)?,
                None => writeln!(w, "{},,false", p.abscissa)?,
            }
        }
        Ok(())
    }
}

fn fmt_level(v: f64) -> String {
    format!("{v:.4}")
}

/// Odds-ratio-versus-phi series, one per outcome level, at fixed proxy value.
///
/// Each point identifies the model at that phi, converts it to selection
/// coefficients, and evaluates the odds ratio for a `delta` increase in the
/// outcome. Identification failures become gaps.
pub fn sweep_or(
    obs: &ObservedSummary,
    mechanism_id: Option<&str>,
    grid: &PhiGrid,
    y_levels: &YLevels,
    x_fix: XFix,
    delta: f64,
) -> Result<Vec<CurveSeries>> {
    obs.validate()?;
    let x = x_fix.resolve(obs);
    let levels: Vec<f64> = match y_levels {
        YLevels::MeanPlusMinusSd => {
            let (m, s) = (obs.respondent.mu_y, obs.respondent.sd_y());
            vec![m - s, m, m + s]
        }
        YLevels::Explicit(v) => v.clone(),
    };

    let mut series = Vec::with_capacity(levels.len());
    for y in levels {
        let points = grid
            .points()
            .iter()
            .map(|phi| {
                let value = identify(obs, *phi)
                    .and_then(|m| lambda_coefficients(&m))
                    .map(|c| c.odds_ratio_y(x, y, delta));
                point_from(phi.value(), value)
            })
            .collect();
        series.push(CurveSeries {
            name: format!("or_y_{}", fmt_level(y)),
            abscissa_name: "phi".to_string(),
            points,
            metadata: SeriesMetadata {
                mechanism_id: mechanism_id.map(str::to_string),
                fixed_x: Some(x),
                y_level: Some(y),
                delta: Some(delta),
                phi: None,
            },
        });
    }
    Ok(series)
}

/// Nonresponse-probability-versus-outcome series, one per phi level, at
/// fixed proxy value. A phi at which identification fails yields an all-gap
/// series so the set stays aligned with the requested levels.
pub fn sweep_prob(
    obs: &ObservedSummary,
    mechanism_id: Option<&str>,
    phi_levels: &[Phi],
    y_grid: &[f64],
    x_fix: XFix,
) -> Result<Vec<CurveSeries>> {
    obs.validate()?;
    assert!(
        y_grid.windows(2).all(|w| w[1] > w[0]),
        "y grid must be strictly increasing"
    );
    let x = x_fix.resolve(obs);
    let mut series = Vec::with_capacity(phi_levels.len());
    for phi in phi_levels {
        let coeffs = identify(obs, *phi).and_then(|m| lambda_coefficients(&m));
        let points = match &coeffs {
            Ok(c) => y_grid
                .iter()
                .map(|y| CurvePoint {
                    abscissa: *y,
                    value: Some(c.prob_nonresponse(x, *y)),
                    reason: None,
                })
                .collect(),
            Err(e) => y_grid
                .iter()
                .map(|y| CurvePoint {
                    abscissa: *y,
                    value: None,
                    reason: Some(e.to_string()),
                })
                .collect(),
        };
        series.push(CurveSeries {
            name: format!("prob_phi_{}", fmt_level(phi.value())),
            abscissa_name: "y".to_string(),
            points,
            metadata: SeriesMetadata {
                mechanism_id: mechanism_id.map(str::to_string),
                fixed_x: Some(x),
                phi: Some(phi.value()),
                y_level: None,
                delta: None,
            },
        });
    }
    Ok(series)
}

/// Marginal-mean-versus-phi series.
pub fn sweep_mean(
    obs: &ObservedSummary,
    mechanism_id: Option<&str>,
    grid: &PhiGrid,
) -> Result<CurveSeries> {
    obs.validate()?;
    let points = grid
        .points()
        .iter()
        .map(|phi| point_from(phi.value(), identify(obs, *phi).map(|m| marginal_mean(&m))))
        .collect();
    Ok(CurveSeries {
        name: "marginal_mean".to_string(),
        abscissa_name: "phi".to_string(),
        points,
        metadata: SeriesMetadata {
            mechanism_id: mechanism_id.map(str::to_string),
            ..SeriesMetadata::default()
        },
    })
}

/// Default outcome grid for probability sweeps: respondent mean plus/minus
/// three SD in 121 steps.
pub fn default_y_grid(obs: &ObservedSummary) -> Vec<f64> {
    let (m, s) = (obs.respondent.mu_y, obs.respondent.sd_y());
    (0..=120)
        .map(|i| m - 3.0 * s + i as f64 * (6.0 * s / 120.0))
        .collect()
}

/// Default phi levels for probability sweeps.
pub fn default_phi_levels() -> Vec<Phi> {
    [0.0, 0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|v| Phi::new(*v).expect("static levels are valid"))
        .collect()
}

fn point_from(abscissa: f64, value: Result<f64>) -> CurvePoint {
    match value {
        Ok(v) => CurvePoint {
            abscissa,
            value: Some(v),
            reason: None,
        },
        Err(e) => CurvePoint {
            abscissa,
            value: None,
            reason: Some(e.to_string()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::builtin_mechanism;
    use crate::moments::PatternMoments;

    #[test]
    fn grid_hits_both_endpoints() {
        let g = PhiGrid::default();
        assert_eq!(g.points().len(), 101);
        assert_eq!(g.points()[0].value(), 0.0);
        assert_eq!(g.points()[100].value(), 1.0);
    }

    #[test]
    fn grid_parse_round_trips() {
        let g = PhiGrid::parse("0:1:0.1").unwrap();
        assert_eq!(g.points().len(), 11);
        assert!(PhiGrid::parse("0:1").is_err());
        assert!(PhiGrid::parse("0.5:0.2:0.1").is_err());
        assert!(PhiGrid::parse("x:y:z").is_err());
    }

    #[test]
    fn or_series_start_at_one() {
        for mech in ["1", "7", "16"] {
            let m = builtin_mechanism(mech).unwrap();
            let series = sweep_or(
                &m.observed_summary(),
                Some(&m.id),
                &PhiGrid::default(),
                &YLevels::MeanPlusMinusSd,
                XFix::OverallMean,
                1.0,
            )
            .unwrap();
            assert_eq!(series.len(), 3);
            for s in &series {
                let (phi0, v0) = s.valid_points().next().unwrap();
                assert_eq!(phi0, 0.0);
                assert!((v0 - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn or_headline_value_appears_on_the_grid() {
        let m = builtin_mechanism("10").unwrap();
        let series = sweep_or(
            &m.observed_summary(),
            Some(&m.id),
            &PhiGrid::default(),
            &YLevels::Explicit(vec![1.0]),
            XFix::OverallMean,
            1.0,
        )
        .unwrap();
        let v = series[0]
            .valid_points()
            .find(|(phi, _)| (*phi - 0.9).abs() < 1e-12)
            .unwrap()
            .1;
        assert!((v - 2.0).abs() < 0.15, "odds ratio at 0.9 was {v}");
    }

    #[test]
    fn or_low_outcome_curve_crosses_one_late_for_widening_variance() {
        let m = builtin_mechanism("16").unwrap();
        let obs = m.observed_summary();
        let grid = PhiGrid::new(0.0, 1.0, 0.001).unwrap();
        let series = sweep_or(
            &obs,
            Some(&m.id),
            &grid,
            &YLevels::Explicit(vec![0.0]),
            XFix::OverallMean,
            1.0,
        )
        .unwrap();
        let pts: Vec<(f64, f64)> = series[0].valid_points().collect();
        let crossings: Vec<f64> = pts
            .windows(2)
            .filter(|w| w[0].0 > 0.0 && (w[0].1 - 1.0).signum() != (w[1].1 - 1.0).signum())
            .map(|w| w[1].0)
            .collect();
        assert_eq!(crossings.len(), 1);
        assert!(crossings[0] > 0.85 && crossings[0] < 1.0);
    }

    #[test]
    fn prob_series_flat_at_phi_zero_and_bounded() {
        let m = builtin_mechanism("10").unwrap();
        let obs = m.observed_summary();
        let series = sweep_prob(
            &obs,
            Some(&m.id),
            &default_phi_levels(),
            &default_y_grid(&obs),
            XFix::OverallMean,
        )
        .unwrap();
        assert_eq!(series.len(), 5);
        let flat: Vec<f64> = series[0].valid_points().map(|(_, v)| v).collect();
        for v in &flat {
            assert!((v - flat[0]).abs() < 1e-12);
        }
        for s in &series {
            for (_, v) in s.valid_points() {
                assert!(v > 0.0 && v < 1.0);
            }
        }
    }

    #[test]
    fn prob_series_emits_all_gaps_for_invalid_phi() {
        let obs = crate::moments::ObservedSummary {
            respondent: PatternMoments::new(1.0, 1.0, 1.0, 1.0, 0.2),
            nonresp_mu_x: 1.0,
            nonresp_var_x: 0.5,
            pi: 0.75,
        };
        let series = sweep_prob(
            &obs,
            None,
            &default_phi_levels(),
            &default_y_grid(&obs),
            XFix::OverallMean,
        )
        .unwrap();
        // phi = 1 cannot identify this summary; its series is pure gaps
        let last = &series[4];
        assert!(last.points.iter().all(|p| p.value.is_none()));
        assert!(last.points[0].reason.as_ref().unwrap().contains("identification"));
        // phi = 0.5 still identifies
        assert!(series[2].points.iter().all(|p| p.value.is_some()));
    }

    #[test]
    fn mean_series_flat_when_proxy_moments_match() {
        let obs = crate::moments::ObservedSummary {
            respondent: PatternMoments::new(1.0, 2.0, 1.0, 1.0, 0.5),
            nonresp_mu_x: 1.0,
            nonresp_var_x: 1.0,
            pi: 0.75,
        };
        let s = sweep_mean(&obs, None, &PhiGrid::default()).unwrap();
        for (_, v) in s.valid_points() {
            assert!((v - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn mean_series_increasing_for_mechanism_10() {
        let m = builtin_mechanism("10").unwrap();
        let s = sweep_mean(&m.observed_summary(), Some(&m.id), &PhiGrid::default()).unwrap();
        let vals: Vec<f64> = s.valid_points().map(|(_, v)| v).collect();
        assert_eq!(vals.len(), 101);
        for w in vals.windows(2) {
            assert!(w[1] > w[0]);
        }
        // the phi = 0.5 point is the unit-multiplier linear shift
        let mid = s.valid_points().find(|(p, _)| *p == 0.5).unwrap().1;
        assert!((mid - 1.05).abs() < 1e-12);
    }

    #[test]
    fn mean_series_marks_gaps_beyond_the_validity_bound() {
        let obs = crate::moments::ObservedSummary {
            respondent: PatternMoments::new(1.0, 1.0, 1.0, 1.0, 0.2),
            nonresp_mu_x: 1.0,
            nonresp_var_x: 0.5,
            pi: 0.75,
        };
        let s = sweep_mean(&obs, None, &PhiGrid::default()).unwrap();
        let n_valid = s.valid_points().count();
        assert!(n_valid < s.points.len());
        // gaps sit at the top of the grid, values at the bottom
        assert!(s.points[0].value.is_some());
        assert!(s.points.last().unwrap().value.is_none());
    }

    #[test]
    fn series_csv_has_gap_rows() {
        let s = CurveSeries {
            name: "t".into(),
            abscissa_name: "phi".into(),
            points: vec![
                CurvePoint {
                    abscissa: 0.0,
                    value: Some(1.0),
                    reason: None,
                },
                CurvePoint {
                    abscissa: 0.5,
                    value: None,
                    reason: Some("nope".into()),
                },
            ],
            metadata: SeriesMetadata::default(),
        };
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "phi,value,valid\n0,1,true\n0.5,,false\n");
    }
}
