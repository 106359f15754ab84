//! Verifiable claims about the pulse-train technique, each behind a common
//! trait and registered by name so the CLI can select one at runtime.

use std::f64::consts::PI;

use crate::analytic::{p2_max_bound, pair_transient_maxima, mixing_angles};
use crate::oracle::{bruteforce_optimal_angles, crosscheck_analytic_numeric};
use crate::Result;

/// Inputs shared by all claim checks.
#[derive(Clone, Copy, Debug)]
pub struct ClaimParams {
    pub pairs: usize,
    pub grid_points: Option<usize>,
    pub dt: Option<f64>,
}

impl ClaimParams {
    pub fn new(pairs: usize) -> Self {
        Self { pairs, grid_points: None, dt: None }
    }

    fn dt(&self) -> f64 {
        self.dt.unwrap_or(1.0 / 2000.0)
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub label: String,
    pub observed: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn within(label: impl Into<String>, observed: f64, tolerance: f64) -> Self {
        Self {
            label: label.into(),
            observed,
            tolerance,
            passed: observed.abs() <= tolerance,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClaimReport {
    pub claim: &'static str,
    pub checks: Vec<Check>,
}

impl ClaimReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// One verifiable claim, selected by name.
pub trait Claim: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, params: &ClaimParams) -> Result<ClaimReport>;
}

/// The numeric transient P2 maximum matches sin^2(pi / 4N).
struct P2MaxClaim;

impl Claim for P2MaxClaim {
    fn name(&self) -> &'static str {
        "p2max"
    }

    fn description(&self) -> &'static str {
        "numeric transient P2 maximum equals sin^2(pi/4N)"
    }

    fn run(&self, params: &ClaimParams) -> Result<ClaimReport> {
        let report = crosscheck_analytic_numeric(params.pairs, params.dt())?;
        Ok(ClaimReport {
            claim: self.name(),
            checks: vec![Check::within(
                format!(
                    "numeric P2 max {:.6} vs bound {:.6}",
                    report.p2_max_numeric, report.p2_max_analytic
                ),
                report.p2_max_deviation,
                1e-3,
            )],
        })
    }
}

/// The exhaustive scan recovers the (2k-1) pi / 4N schedule.
struct OptimalAnglesClaim;

impl Claim for OptimalAnglesClaim {
    fn name(&self) -> &'static str {
        "optimal-angles"
    }

    fn description(&self) -> &'static str {
        "exhaustive scan recovers theta_k = (2k-1) pi / 4N"
    }

    fn run(&self, params: &ClaimParams) -> Result<ClaimReport> {
        let grid_points = params.grid_points.unwrap_or(match params.pairs {
            3 => 180,
            _ => 720,
        });
        let result = bruteforce_optimal_angles(params.pairs, grid_points)?;
        let expected = mixing_angles(params.pairs)?;
        let mut checks = Vec::new();
        for (k, (got, want)) in result.angles.iter().zip(&expected).enumerate() {
            checks.push(Check::within(
                format!("theta_{} = {:.7} vs {:.7}", k + 1, got, want),
                got - want,
                result.cell,
            ));
        }
        let bound = p2_max_bound(params.pairs)?;
        checks.push(Check::within(
            format!("scan max P2 {:.6} vs bound {:.6}", result.max_p2, bound),
            result.max_p2 - bound,
            2.0 * result.cell * PI,
        ));
        Ok(ClaimReport { claim: self.name(), checks })
    }
}

/// Numeric integration agrees with the analytic cascade at pair boundaries.
struct CrosscheckClaim;

impl Claim for CrosscheckClaim {
    fn name(&self) -> &'static str {
        "crosscheck"
    }

    fn description(&self) -> &'static str {
        "integrated boundary populations match the analytic cascade"
    }

    fn run(&self, params: &ClaimParams) -> Result<ClaimReport> {
        let report = crosscheck_analytic_numeric(params.pairs, params.dt())?;
        let mut checks = Vec::new();
        for (i, d) in report.boundary_deviation.iter().enumerate() {
            checks.push(Check::within(
                format!("boundary P{} deviation {:.2e}", i + 1, d),
                *d,
                1e-4,
            ));
        }
        checks.push(Check::within(
            format!("P2 max deviation {:.2e}", report.p2_max_deviation),
            report.p2_max_deviation,
            1e-3,
        ));
        Ok(ClaimReport { claim: self.name(), checks })
    }
}

/// Every pair of the optimal schedule excites the same transient P2 maximum.
struct EqualMaximaClaim;

impl Claim for EqualMaximaClaim {
    fn name(&self) -> &'static str {
        "equal-maxima"
    }

    fn description(&self) -> &'static str {
        "per-pair transient P2 maxima are all equal"
    }

    fn run(&self, params: &ClaimParams) -> Result<ClaimReport> {
        let mut checks = Vec::new();
        let analytic = pair_transient_maxima(&mixing_angles(params.pairs)?)?;
        let bound = p2_max_bound(params.pairs)?;
        let spread_analytic = analytic
            .iter()
            .map(|m| (m - bound).abs())
            .fold(0.0f64, f64::max);
        checks.push(Check::within(
            format!("analytic per-pair spread {:.2e}", spread_analytic),
            spread_analytic,
            1e-10,
        ));
        let report = crosscheck_analytic_numeric(params.pairs, params.dt())?;
        let spread_numeric = report
            .per_pair_p2_max
            .iter()
            .map(|m| (m - report.p2_max_analytic).abs())
            .fold(0.0f64, f64::max);
        checks.push(Check::within(
            format!("numeric per-pair spread {:.2e}", spread_numeric),
            spread_numeric,
            1e-3,
        ));
        Ok(ClaimReport { claim: self.name(), checks })
    }
}

/// All registered claims, in a stable order.
pub fn registry() -> Vec<Box<dyn Claim>> {
    vec![
        Box::new(P2MaxClaim),
        Box::new(OptimalAnglesClaim),
        Box::new(CrosscheckClaim),
        Box::new(EqualMaximaClaim),
    ]
}

/// Finds a claim by its registered name.
pub fn lookup(name: &str) -> Option<Box<dyn Claim>> {
    registry().into_iter().find(|c| c.name() == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lists_all_claims() {
        let names: Vec<&str> = registry().iter().map(|c| c.name()).collect();
        assert_eq!(names, vec!["p2max", "optimal-angles", "crosscheck", "equal-maxima"]);
        assert!(lookup("p2max").is_some());
        assert!(lookup("bogus").is_none());
    }

    #[test]
    fn p2max_claim_passes_for_two_pairs() {
        let report = lookup("p2max").unwrap().run(&ClaimParams::new(2)).unwrap();
        assert!(report.passed(), "{:?}", report);
    }

    #[test]
    fn equal_maxima_claim_passes() {
        let report = lookup("equal-maxima").unwrap().run(&ClaimParams::new(2)).unwrap();
        assert!(report.passed(), "{:?}", report);
    }

    #[test]
    fn optimal_angles_claim_passes_on_a_coarse_grid() {
        let params = ClaimParams { pairs: 2, grid_points: Some(180), dt: None };
        let report = lookup("optimal-angles").unwrap().run(&params).unwrap();
        assert!(report.passed(), "{:?}", report);
    }
}
