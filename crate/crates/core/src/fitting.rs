//! Least-squares fits for the flow/disparity law
//! `f/g ~ a * ln((1 - lambda) * gamma) + b` and the flow/mobility law
//! `tau ~ a * f + b`.
//!
//! The flow/disparity law is fitted on the `ln x` axis. Writing it on the
//! `ln sqrt(x)` axis halves every x, which doubles the slope and leaves the
//! intercept and R² unchanged; [`FitResult::on_sqrt_axis`] does that
//! conversion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::SweepCell;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XYPoint {
    pub x: f64,
    pub y: f64,
}

impl XYPoint {
    pub fn new(x: f64, y: f64) -> Self {
        XYPoint { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

impl FitResult {
    /// The same line expressed against `x / 2`.
    pub fn on_sqrt_axis(&self) -> FitResult {
        FitResult { slope: 2.0 * self.slope, ..*self }
    }
}

/// Ordinary least squares `y = slope * x + intercept`.
///
/// R² is `1 - SS_res / SS_tot`, and 1 when every y is the same.
pub fn fit_linear(points: &[XYPoint]) -> Result<FitResult> {
    let n = points.len();
    if n < 2 {
        return Err(Error::SingularFit(format!("need at least 2 points, got {n}")));
    }
    if let Some(p) = points.iter().find(|p| !(p.x.is_finite() && p.y.is_finite())) {
        return Err(Error::InvalidArgument(format!("non-finite point ({}, {})", p.x, p.y)));
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.x).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.y).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p.x - mean_x, p.y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let x_scale = points.iter().map(|p| p.x.abs()).fold(0.0, f64::max).max(1.0);
    if sxx <= (f64::EPSILON * x_scale).powi(2) * nf {
        return Err(Error::SingularFit("x values are all identical".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        let ss_res: f64 = points
            .iter()
            .map(|p| (p.y - (slope * p.x + intercept)).powi(2))
            .sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(FitResult { slope, intercept, r_squared, n_points: n })
}

/// A sweep cell left out of a regression, and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub lambda: f64,
    pub gamma: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawPoints {
    pub points: Vec<XYPoint>,
    pub excluded: Vec<Exclusion>,
}

/// `x = ln((1 - lambda) * gamma)`, `y = mean_f / mean_g`. Cells where the
/// logarithm or the ratio is undefined are excluded and listed.
pub fn law5_points(cells: &[SweepCell]) -> LawPoints {
    let mut out = LawPoints { points: Vec::new(), excluded: Vec::new() };
    for c in cells {
        let product = (1.0 - c.lambda) * c.gamma;
        let reason = if !(product > 0.0) {
            Some(format!("(1 - lambda) * gamma = {product} has no logarithm"))
        } else if !(c.mean_g > 0.0) {
            Some(format!("mean_g = {} makes f/g undefined", c.mean_g))
        } else if !(c.mean_f.is_finite() && c.mean_g.is_finite()) {
            Some("non-finite cell metrics".to_string())
        } else {
            None
        };
        match reason {
            Some(reason) => out.excluded.push(Exclusion { lambda: c.lambda, gamma: c.gamma, reason }),
            None => out.points.push(XYPoint::new(product.ln(), c.mean_f / c.mean_g)),
        }
    }
    out
}

/// `x = mean_f`, `y = mean_tau`. Non-finite cells are excluded.
pub fn law6_points(cells: &[SweepCell]) -> LawPoints {
    let mut out = LawPoints { points: Vec::new(), excluded: Vec::new() };
    for c in cells {
        if c.mean_f.is_finite() && c.mean_tau.is_finite() {
            out.points.push(XYPoint::new(c.mean_f, c.mean_tau));
        } else {
            out.excluded.push(Exclusion {
                lambda: c.lambda,
                gamma: c.gamma,
                reason: "non-finite cell metrics".into(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(lambda: f64, gamma: f64, f: f64, g: f64, tau: f64) -> SweepCell {
        SweepCell {
            lambda,
            gamma,
            mean_g: g,
            mean_f: f,
            mean_tau: tau,
            std_g: 0.0,
            std_f: 0.0,
            std_tau: 0.0,
            replicates: 1,
        }
    }

    #[test]
    fn exact_line() {
        let pts: Vec<_> = (0..6).map(|i| XYPoint::new(i as f64, 2.0 * i as f64 + 1.0)).collect();
        let fit = fit_linear(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert_eq!(fit.r_squared, 1.0);
        assert_eq!(fit.n_points, 6);
    }

    #[test]
    fn zero_covariance() {
        let pts = [XYPoint::new(0.0, 0.0), XYPoint::new(1.0, 1.0), XYPoint::new(2.0, 0.0)];
        let fit = fit_linear(&pts).unwrap();
        assert!(fit.slope.abs() < 1e-15);
        assert!((fit.intercept - 1.0 / 3.0).abs() < 1e-15);
        assert!(fit.r_squared.abs() < 1e-15);
    }

    #[test]
    fn constant_y() {
        let pts = [XYPoint::new(0.0, 4.5), XYPoint::new(1.0, 4.5), XYPoint::new(3.0, 4.5)];
        let fit = fit_linear(&pts).unwrap();
        assert_eq!((fit.slope, fit.intercept, fit.r_squared), (0.0, 4.5, 1.0));
    }

    #[test]
    fn singular_inputs() {
        assert!(matches!(fit_linear(&[XYPoint::new(1.0, 1.0)]), Err(Error::SingularFit(_))));
        let same_x = [XYPoint::new(2.0, 1.0), XYPoint::new(2.0, 5.0)];
        assert!(matches!(fit_linear(&same_x), Err(Error::SingularFit(_))));
        let nan = [XYPoint::new(2.0, 1.0), XYPoint::new(f64::NAN, 5.0)];
        assert!(fit_linear(&nan).is_err());
    }

    #[test]
    fn law5_mapping() {
        let lp = law5_points(&[
            cell(0.0, 1.0, 0.8, 0.4, 0.0),
            cell(0.75, 0.5, 0.3, 0.36, 0.0),
            cell(0.3, 0.0, 0.3, 0.5, 0.0),
            cell(1.0, 0.5, 0.0, 0.0, 0.0),
        ]);
        assert_eq!(lp.points.len(), 2);
        assert_eq!(lp.points[0], XYPoint::new(0.0, 2.0));
        assert!((lp.points[1].x - 0.125f64.ln()).abs() < 1e-12);
        assert!((lp.points[1].x + 2.0794).abs() < 1e-4);
        assert!((lp.points[1].y - 0.8333).abs() < 1e-4);
        assert_eq!(lp.excluded.len(), 2);
        assert_eq!((lp.excluded[0].lambda, lp.excluded[0].gamma), (0.3, 0.0));
    }

    #[test]
    fn law6_mapping() {
        let lp = law6_points(&[cell(1.0, 0.5, 0.0, 0.0, 0.93)]);
        assert_eq!(lp.points, vec![XYPoint::new(0.0, 0.93)]);
        assert!(law6_points(&[]).points.is_empty());
    }

    #[test]
    fn sqrt_axis_doubles_slope() {
        let pts: Vec<_> = [0.1f64, 0.2, 0.4, 0.7, 1.0]
            .iter()
            .map(|&x| XYPoint::new(x.ln(), 0.5 * x.ln() + 2.0 + 0.01 * x.sin()))
            .collect();
        let fit = fit_linear(&pts).unwrap();
        let halved: Vec<_> = pts.iter().map(|p| XYPoint::new(p.x / 2.0, p.y)).collect();
        let direct = fit_linear(&halved).unwrap();
        let converted = fit.on_sqrt_axis();
        assert!((direct.slope - converted.slope).abs() < 1e-12);
        assert!((direct.intercept - converted.intercept).abs() < 1e-12);
        assert!((direct.r_squared - converted.r_squared).abs() < 1e-12);
    }
}
