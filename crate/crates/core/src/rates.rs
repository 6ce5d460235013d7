//! Decay-model fits for recorded norm series and the predicted polynomial exponent.
//!
//! Exponential and power fits are linear least squares in `log v`. The
//! stretched fit profiles out the prefactor and rate for each trial exponent
//! and minimizes the residual over the exponent, so exact data are recovered
//! exactly whatever the window start.

use serde::{Deserialize, Serialize};

use crate::error::{param, LevyError, Result};

/// Share of the horizon discarded as transient by [`FitWindow::default_for`].
pub const DEFAULT_TRANSIENT: f64 = 0.2;

/// Largest relative increase between consecutive samples accepted by the stretched fit.
pub const MONOTONE_SLACK: f64 = 0.1;

/// `(k̄ - k) / (2 - γ)`.
pub fn predicted_q(k: f64, kbar: f64, gamma: f64) -> Result<f64> {
    if !(gamma < 2.0) {
        return param(format!("polynomial regime requires γ < 2, got γ = {gamma}"));
    }
    if !(kbar >= k && k >= 0.0) {
        return param(format!("the data weight must dominate the norm weight: need k̄ >= k >= 0, got k = {k}, k̄ = {kbar}"));
    }
    Ok((kbar - k) / (2.0 - gamma))
}

/// Closed time interval used by a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub lo: f64,
    pub hi: f64,
}

impl FitWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return param(format!("fit window needs lo < hi, got [{lo}, {hi}]"));
        }
        Ok(Self { lo, hi })
    }

    /// The recorded range minus its first [`DEFAULT_TRANSIENT`] share.
    pub fn default_for(t: &[f64]) -> Result<Self> {
        let (Some(&a), Some(&b)) = (t.first(), t.last()) else {
            return param("cannot fit an empty series");
        };
        Self::new(a + DEFAULT_TRANSIENT * (b - a), b)
    }

    fn contains(&self, t: f64) -> bool {
        t >= self.lo * (1.0 - 1e-12) - 1e-300 && t <= self.hi * (1.0 + 1e-12) + 1e-300
    }
}

/// Fitted decay law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "params", rename_all = "kebab-case")]
pub enum DecayModel {
    /// `K e^{-rate t}`.
    Exponential { rate: f64 },
    /// `K (1 + t)^{-exponent}`.
    Power { exponent: f64 },
    /// `K e^{-rate t^exponent}`.
    Stretched { exponent: f64, rate: f64 },
}

/// A fitted model with its prefactor, window and goodness of fit in `log v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    #[serde(flatten)]
    pub model: DecayModel,
    pub prefactor: f64,
    pub window: FitWindow,
    pub r2: f64,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub series_source: Option<String>,
}

impl DecayFit {
    /// Rate for exponential fits, exponent otherwise.
    pub fn exponent(&self) -> f64 {
        match self.model {
            DecayModel::Exponential { rate } => rate,
            DecayModel::Power { exponent } | DecayModel::Stretched { exponent, .. } => exponent,
        }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.series_source = Some(source.into());
        self
    }
}

/// Points of `(t, v)` inside the window, with `v` checked positive.
fn windowed(t: &[f64], v: &[f64], w: &FitWindow) -> Result<(Vec<f64>, Vec<f64>)> {
    if t.len() != v.len() {
        return Err(LevyError::Mismatch(format!("{} times but {} values", t.len(), v.len())));
    }
    let (mut ts, mut vs) = (Vec::new(), Vec::new());
    for (&a, &b) in t.iter().zip(v) {
        if w.contains(a) {
            if !(b > 0.0 && b.is_finite()) {
                return Err(LevyError::Fit(format!("nonpositive value {b} at t = {a} inside the window")));
            }
            ts.push(a);
            vs.push(b);
        }
    }
    if ts.len() < 3 {
        return Err(LevyError::Fit(format!(
            "only {} samples inside [{}, {}]; at least three are needed",
            ts.len(),
            w.lo,
            w.hi
        )));
    }
    Ok((ts, vs))
}

/// Least squares `y = a + b x`: `(a, b, rss, r2)`.
fn linear(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let rss: f64 = x.iter().zip(y).map(|(u, w)| (w - a - b * u).powi(2)).sum();
    // spread at rounding level counts as a flat series, which the line fits exactly
    let floor = n * (1e-13 * y.iter().fold(1.0f64, |m, v| m.max(v.abs()))).powi(2);
    let r2 = if syy > floor { 1.0 - rss / syy } else { 1.0 };
    (a, b, rss, r2)
}

/// `log v` against `t`; the rate is minus the slope.
pub fn fit_exponential(t: &[f64], v: &[f64], window: &FitWindow) -> Result<DecayFit> {
    let (ts, vs) = windowed(t, v, window)?;
    let lv: Vec<f64> = vs.iter().map(|x| x.ln()).collect();
    let (a, b, _, r2) = linear(&ts, &lv);
    Ok(DecayFit {
        model: DecayModel::Exponential { rate: -b },
        prefactor: a.exp(),
        window: *window,
        r2,
        points: ts.len(),
        series_source: None,
    })
}

/// `log v` against `log(1 + t)`; the exponent is minus the slope.
pub fn fit_power(t: &[f64], v: &[f64], window: &FitWindow) -> Result<DecayFit> {
    let (ts, vs) = windowed(t, v, window)?;
    if ts[0] <= -1.0 {
        return param("power fits need t > -1");
    }
    let lt: Vec<f64> = ts.iter().map(|x| x.ln_1p()).collect();
    let lv: Vec<f64> = vs.iter().map(|x| x.ln()).collect();
    let (a, b, _, r2) = linear(&lt, &lv);
    Ok(DecayFit {
        model: DecayModel::Power { exponent: -b },
        prefactor: a.exp(),
        window: *window,
        r2,
        points: ts.len(),
        series_source: None,
    })
}

/// Search interval for the stretch exponent.
const STRETCH_RANGE: (f64, f64) = (0.02, 4.0);

/// `log v = a - C t^β`: least squares in `(a, C)` for each `β`, then the
/// residual is minimized over `β` by a coarse scan and golden-section search.
pub fn fit_stretched(t: &[f64], v: &[f64], window: &FitWindow) -> Result<DecayFit> {
    let (ts, vs) = windowed(t, v, window)?;
    if ts[0] <= 0.0 {
        return param("stretched fits need a window with t > 0");
    }
    if vs[vs.len() - 1] >= vs[0] {
        return Err(LevyError::Fit(format!(
            "series does not decrease across the window: {} to {}",
            vs[0],
            vs[vs.len() - 1]
        )));
    }
    if let Some(w) = vs.windows(2).find(|w| w[1] > w[0] * (1.0 + MONOTONE_SLACK)) {
        return Err(LevyError::Fit(format!(
            "series is not decreasing on the window: {} rises to {}",
            w[0], w[1]
        )));
    }
    let lv: Vec<f64> = vs.iter().map(|x| x.ln()).collect();
    let profile = |beta: f64| -> (f64, f64, f64, f64) {
        let x: Vec<f64> = ts.iter().map(|s| s.powf(beta)).collect();
        linear(&x, &lv)
    };
    let rss = |beta: f64| profile(beta).2;
    let (lo, hi) = STRETCH_RANGE;
    let scan = 400;
    let grid: Vec<f64> = (0..=scan).map(|i| lo * (hi / lo).powf(i as f64 / scan as f64)).collect();
    let best = (0..=scan).min_by(|&i, &j| rss(grid[i]).total_cmp(&rss(grid[j]))).unwrap_or(0);
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(scan)]);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (rss(c), rss(d));
    while b - a > 1e-13 * b {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = rss(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = rss(d);
        }
    }
    let beta = 0.5 * (a + b);
    let (icpt, slope, _, r2) = profile(beta);
    Ok(DecayFit {
        model: DecayModel::Stretched {
            exponent: beta,
            rate: -slope,
        },
        prefactor: icpt.exp(),
        window: *window,
        r2,
        points: ts.len(),
        series_source: None,
    })
}

/// Sensitivity of a fitted exponent to moving the window start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowShift {
    pub base: f64,
    /// Exponent with the start moved earlier.
    pub earlier: f64,
    /// Exponent with the start moved later.
    pub later: f64,
    /// `max |Δ| / |base|` over the two shifts.
    pub max_relative_change: f64,
}

/// Refit with the window start moved by `±share` of the recorded horizon,
/// clamped to the recorded range and kept below the window end.
pub fn window_shift(
    fit: impl Fn(&[f64], &[f64], &FitWindow) -> Result<DecayFit>,
    t: &[f64],
    v: &[f64],
    window: &FitWindow,
    share: f64,
) -> Result<WindowShift> {
    let (Some(&t0), Some(&t1)) = (t.first(), t.last()) else {
        return param("cannot fit an empty series");
    };
    let delta = share * (t1 - t0);
    let base = fit(t, v, window)?.exponent();
    let earlier_w = FitWindow::new((window.lo - delta).max(t0), window.hi)?;
    let later_w = FitWindow::new((window.lo + delta).min(0.5 * (window.lo + window.hi)), window.hi)?;
    let earlier = fit(t, v, &earlier_w)?.exponent();
    let later = fit(t, v, &later_w)?.exponent();
    let scale = base.abs().max(1e-300);
    Ok(WindowShift {
        base,
        earlier,
        later,
        max_relative_change: ((earlier - base).abs().max((later - base).abs())) / scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_window_drops_the_transient() {
        let t: Vec<f64> = (0..=10).map(f64::from).collect();
        assert_eq!(FitWindow::default_for(&t).unwrap(), FitWindow { lo: 2.0, hi: 10.0 });
        assert!(FitWindow::default_for(&[]).is_err());
    }

    #[test]
    fn fit_json_layout() {
        let f = DecayFit {
            model: DecayModel::Exponential { rate: 0.5 },
            prefactor: 1.0,
            window: FitWindow { lo: 1.0, hi: 2.0 },
            r2: 1.0,
            points: 3,
            series_source: None,
        };
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.starts_with(r#"{"model":"exponential","params":{"rate":0.5}"#), "{s}");
    }
}
