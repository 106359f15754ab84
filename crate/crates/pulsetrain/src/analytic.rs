//! Closed-form results for the lossless, doubly-resonant, common-shape case:
//! the exact single-pair propagator, its cascade over a train, the optimal
//! mixing-angle schedule, and the transient middle-state population bound.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::model::{Propagator3, StateVector};
use crate::{Error, Result};

fn check_pair_args(theta: f64, area: f64) -> Result<()> {
    if !theta.is_finite() || !area.is_finite() {
        return Err(Error::invalid("theta and area must be finite"));
    }
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::invalid(format!("theta must be in [0, pi/2], got {theta}")));
    }
    if area < 0.0 {
        return Err(Error::invalid(format!("area must be >= 0, got {area}")));
    }
    Ok(())
}

/// Exact propagator of one coincident pump/Stokes pair with mixing angle
/// `theta` and rms pulse area `area`, valid for Gamma = 0. Unitary for all
/// arguments.
pub fn single_pair_propagator(theta: f64, area: f64) -> Result<Propagator3> {
    check_pair_args(theta, area)?;
    let (st, ct) = (theta.sin(), theta.cos());
    let s2t = (2.0 * theta).sin();
    let sa2 = (area / 2.0).sin();
    let ca2 = (area / 2.0).cos();
    let sa4sq = (area / 4.0).sin().powi(2);
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);
    Ok(Propagator3([
        [re(1.0 - 2.0 * st * st * sa4sq), im(-st * sa2), re(-s2t * sa4sq)],
        [im(-st * sa2), re(ca2), im(-ct * sa2)],
        [re(-s2t * sa4sq), im(-ct * sa2), re(1.0 - 2.0 * ct * ct * sa4sq)],
    ]))
}

/// Final populations of a single pair acting on the ground state (1,0,0):
/// P1 = [1 - 2 sin^2(theta) sin^2(A/4)]^2, P2 = sin^2(theta) sin^2(A/2),
/// P3 = sin^2(2 theta) sin^4(A/4).
pub fn single_pair_final_populations(theta: f64, area: f64) -> Result<(f64, f64, f64)> {
    check_pair_args(theta, area)?;
    let st2 = theta.sin().powi(2);
    let sa4sq = (area / 4.0).sin().powi(2);
    let p1 = (1.0 - 2.0 * st2 * sa4sq).powi(2);
    let p2 = st2 * (area / 2.0).sin().powi(2);
    let p3 = (2.0 * theta).sin().powi(2) * sa4sq * sa4sq;
    Ok((p1, p2, p3))
}

/// The mixing-angle schedule theta_k = (2k - 1) pi / (4N), k = 1..N.
/// Satisfies the anagram symmetry theta_{N+1-k} = pi/2 - theta_k.
pub fn mixing_angles(pairs: usize) -> Result<Vec<f64>> {
    if pairs == 0 {
        return Err(Error::invalid("pair count must be >= 1"));
    }
    Ok((1..=pairs)
        .map(|k| (2 * k - 1) as f64 * PI / (4.0 * pairs as f64))
        .collect())
}

/// Total propagator U(theta_N) ... U(theta_1) of a train in which every pair
/// carries the same rms area.
pub fn cascade(angles: &[f64], area: f64) -> Result<Propagator3> {
    if angles.is_empty() {
        return Err(Error::invalid("cascade requires at least one angle"));
    }
    let mut total = Propagator3::identity();
    for &theta in angles {
        total = single_pair_propagator(theta, area)?.mul(&total);
    }
    Ok(total)
}

/// States after each full pair, starting from (1,0,0): the k-th entry is
/// U(theta_k) ... U(theta_1) applied to the ground state.
pub fn partial_states(angles: &[f64], area: f64) -> Result<Vec<StateVector>> {
    let mut s = StateVector::ground();
    let mut out = Vec::with_capacity(angles.len());
    for &theta in angles {
        s = single_pair_propagator(theta, area)?.apply(&s);
        out.push(s);
    }
    Ok(out)
}

/// Transient middle-state maxima of a 2 pi train, one per pair: the P2
/// component of the state half-way through pair k (accumulated rms area pi),
/// starting from the ground state.
pub fn pair_transient_maxima(angles: &[f64]) -> Result<Vec<f64>> {
    let mut s = StateVector::ground();
    let mut out = Vec::with_capacity(angles.len());
    for &theta in angles {
        let mid = single_pair_propagator(theta, PI)?.apply(&s);
        out.push(mid.c2.norm_sqr());
        s = single_pair_propagator(theta, 2.0 * PI)?.apply(&s);
    }
    Ok(out)
}

/// Minimal achievable transient middle-state population for an N-pair train:
/// sin^2(pi / 4N).
pub fn p2_max_bound(pairs: usize) -> Result<f64> {
    if pairs == 0 {
        return Err(Error::invalid("pair count must be >= 1"));
    }
    Ok((PI / (4.0 * pairs as f64)).sin().powi(2))
}
