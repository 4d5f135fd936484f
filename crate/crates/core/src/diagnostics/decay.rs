use serde::{Deserialize, Serialize};

use super::SeriesRow;
use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 10;

/// `final / initial` of a nonnegative quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Ratio {
    /// Both ends are exactly zero.
    IdenticallyZero,
    Finite(f64),
    /// Zero at the start, nonzero at the end.
    Unbounded,
}

impl Ratio {
    pub fn of(num: f64, den: f64) -> Ratio {
        if den == 0.0 {
            if num == 0.0 {
                Ratio::IdenticallyZero
            } else {
                Ratio::Unbounded
            }
        } else {
            Ratio::Finite(num / den)
        }
    }

    /// Ratio as a number, with identically zero series counting as 0.
    pub fn value(&self) -> f64 {
        match *self {
            Ratio::IdenticallyZero => 0.0,
            Ratio::Finite(x) => x,
            Ratio::Unbounded => f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRatio {
    pub name: String,
    pub initial: f64,
    #[serde(rename = "final")]
    pub last: f64,
    pub ratio: Ratio,
}

/// Extremum over `[T/4, T/2]` against the extremum over `[T/2, T]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremumDrift {
    pub name: String,
    pub early: f64,
    pub late: f64,
    pub rel_change: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub t_final: f64,
    pub samples: usize,
    pub norm_ratios: Vec<NormRatio>,
    /// Least-squares slope of `ln Y` over `[T/2, T]`.
    pub y_slope: f64,
    pub e0: f64,
    /// `max_t [E(t) + cumV(t) - E(0)]`.
    pub energy_margin: f64,
    /// Share of each running integral accumulated after `T/2`.
    pub plateau_cum_v: Ratio,
    pub plateau_cum_ux2: Ratio,
    pub plateau_cum_pospart: Ratio,
    pub extremum_drift: Vec<ExtremumDrift>,
}

impl DecayReport {
    pub fn ratio(&self, name: &str) -> Option<&NormRatio> {
        self.norm_ratios.iter().find(|r| r.name == name)
    }

    pub fn max_extremum_drift(&self) -> f64 {
        self.extremum_drift
            .iter()
            .map(|d| d.rel_change)
            .fold(0.0, f64::max)
    }
}

pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

pub fn decay_report(series: &[SeriesRow]) -> Result<DecayReport> {
    if series.len() < MIN_SAMPLES {
        return Err(Error::Diagnostic(format!(
            "decay report needs at least {MIN_SAMPLES} samples, got {}",
            series.len()
        )));
    }
    let first = &series[0];
    let last = &series[series.len() - 1];
    let t_end = last.t;
    if !(t_end - first.t >= 0.5 * t_end) || t_end <= first.t {
        return Err(Error::Diagnostic(format!(
            "samples span [{}, {}], less than half the run",
            first.t, t_end
        )));
    }
    let half = 0.5 * t_end;
    let quarter = 0.25 * t_end;

    type Field = fn(&SeriesRow) -> f64;
    let norms: [(&str, Field); 10] = [
        ("n2_vm1", |r| r.n2_vm1),
        ("n2_u", |r| r.n2_u),
        ("n2_thm1", |r| r.n2_thm1),
        ("ninf_vm1", |r| r.ninf_vm1),
        ("ninf_u", |r| r.ninf_u),
        ("ninf_thm1", |r| r.ninf_thm1),
        ("g2_vx", |r| r.g2_vx),
        ("g2_ux", |r| r.g2_ux),
        ("g2_thx", |r| r.g2_thx),
        ("g2_grad", |r| r.gradient_norm()),
    ];
    let norm_ratios = norms
        .iter()
        .map(|(name, f)| NormRatio {
            name: name.to_string(),
            initial: f(first),
            last: f(last),
            ratio: Ratio::of(f(last), f(first)),
        })
        .collect();

    let late: Vec<(f64, f64)> = series
        .iter()
        .filter(|r| r.t >= half)
        .map(|r| (r.t, r.y_probe.ln()))
        .collect();
    let y_slope = least_squares_slope(&late)
        .ok_or_else(|| Error::Diagnostic("too few samples in [T/2, T] for the Y fit".into()))?;

    let e0 = first.energy;
    let energy_margin = series
        .iter()
        .map(|r| r.energy + r.cum_dissipation - e0)
        .fold(f64::NEG_INFINITY, f64::max);

    // running integral at the last sample not after T/2
    let at_half = |f: fn(&SeriesRow) -> f64| {
        series
            .iter()
            .take_while(|r| r.t <= half)
            .last()
            .map(f)
            .unwrap_or(0.0)
    };
    let plateau = |f: fn(&SeriesRow) -> f64| Ratio::of(f(last) - at_half(f), f(last));

    let window = |lo: f64, hi: f64| series.iter().filter(move |r| r.t >= lo && r.t <= hi);
    if window(quarter, half).next().is_none() || window(half, t_end).next().is_none() {
        return Err(Error::Diagnostic("empty extremum window".into()));
    }
    let drift = |name: &str, f: fn(&SeriesRow) -> f64, is_min: bool| {
        let pick = |lo, hi| {
            window(lo, hi).map(f).fold(
                if is_min {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                },
                |a, b| if is_min { a.min(b) } else { a.max(b) },
            )
        };
        let early = pick(quarter, half);
        let late = pick(half, t_end);
        ExtremumDrift {
            name: name.to_string(),
            early,
            late,
            rel_change: ((late - early) / early).abs(),
        }
    };
    let extremum_drift = vec![
        drift("vmin", |r| r.vmin, true),
        drift("vmax", |r| r.vmax, false),
        drift("thmin", |r| r.thmin, true),
        drift("thmax", |r| r.thmax, false),
    ];

    Ok(DecayReport {
        t_final: t_end,
        samples: series.len(),
        norm_ratios,
        y_slope,
        e0,
        energy_margin,
        plateau_cum_v: plateau(|r| r.cum_dissipation),
        plateau_cum_ux2: plateau(|r| r.cum_ux2),
        plateau_cum_pospart: plateau(|r| r.cum_pospart),
        extremum_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equilibrium_series(n: usize, r: f64) -> Vec<SeriesRow> {
        (0..n)
            .map(|k| {
                let t = k as f64;
                SeriesRow {
                    t,
                    vmin: 1.0,
                    vmax: 1.0,
                    thmin: 1.0,
                    thmax: 1.0,
                    y_probe: (-r * t).exp(),
                    ..SeriesRow::default()
                }
            })
            .collect()
    }

    #[test]
    fn equilibrium_trajectory() {
        let rep = decay_report(&equilibrium_series(21, 2.0)).unwrap();
        assert!(rep
            .norm_ratios
            .iter()
            .all(|r| r.ratio == Ratio::IdenticallyZero));
        assert_eq!(rep.energy_margin, 0.0);
        assert!((rep.y_slope + 2.0).abs() < 1e-12);
        assert_eq!(rep.plateau_cum_v, Ratio::IdenticallyZero);
        assert_eq!(rep.max_extremum_drift(), 0.0);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            decay_report(&equilibrium_series(3, 1.0)),
            Err(Error::Diagnostic(_))
        ));
    }

    #[test]
    fn short_span_is_rejected() {
        let mut s = equilibrium_series(12, 1.0);
        for (k, r) in s.iter_mut().enumerate() {
            r.t = 100.0 + k as f64;
        }
        assert!(decay_report(&s).is_err());
    }

    #[test]
    fn slope_of_a_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|k| (k as f64, 3.0 - 0.5 * k as f64)).collect();
        assert!((least_squares_slope(&pts).unwrap() + 0.5).abs() < 1e-14);
        assert!(least_squares_slope(&pts[..1]).is_none());
    }
}
