//! Direct numerical solution of i dc/dt = H(t) c with the non-Hermitian
//! Lambda-system Hamiltonian
//!
//!   H(t) = 1/2 [[0, Omega_p, 0], [Omega_p, -i Gamma, Omega_s], [0, Omega_s, 0]]
//!
//! using fixed-step classical RK4. Loss shows up as a shrinking norm; the
//! missing population is 1 - (P1 + P2 + P3).

use num_complex::Complex64;

use crate::model::{PulseShape, Sample, StateVector, TimeSeries, TrainSpec};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Rk4Fixed,
}

#[derive(Clone, Copy, Debug)]
pub struct IntegratorConfig {
    pub method: Method,
    pub dt: f64,
    pub record_stride: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64) -> Self {
        Self { method: Method::Rk4Fixed, dt, record_stride: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::invalid(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.record_stride == 0 {
            return Err(Error::invalid("record_stride must be >= 1"));
        }
        Ok(())
    }
}

/// The rotating-wave Hamiltonian at given envelope values, in hbar = 1 units.
pub fn hamiltonian_at(omega_p: f64, omega_s: f64, gamma: f64) -> Result<[[Complex64; 3]; 3]> {
    if !(omega_p.is_finite() && omega_s.is_finite()) || omega_p < 0.0 || omega_s < 0.0 {
        return Err(Error::invalid("envelopes must be finite and >= 0"));
    }
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::invalid(format!("gamma must be >= 0, got {gamma}")));
    }
    let z = Complex64::ZERO;
    let p = Complex64::new(omega_p / 2.0, 0.0);
    let s = Complex64::new(omega_s / 2.0, 0.0);
    let loss = Complex64::new(0.0, -gamma / 2.0);
    Ok([[z, p, z], [p, loss, s], [z, s, z]])
}

// Per-pair data hoisted out of the inner RK4 loop.
struct PairEnvelope {
    amp_p: f64,
    amp_s: f64,
    center: f64,
    shape: PulseShape,
}

struct Envelopes {
    pairs: Vec<PairEnvelope>,
}

impl Envelopes {
    fn build(train: &TrainSpec) -> Result<Self> {
        let mut pairs = Vec::with_capacity(train.pairs.len());
        for p in &train.pairs {
            let omega = p.peak_amplitude()?;
            pairs.push(PairEnvelope {
                amp_p: omega * p.theta.sin(),
                amp_s: omega * p.theta.cos(),
                center: p.center,
                shape: p.shape.clone(),
            });
        }
        Ok(Self { pairs })
    }

    fn at(&self, t: f64) -> (f64, f64) {
        let mut op = 0.0;
        let mut os = 0.0;
        for p in &self.pairs {
            let f = p.shape.value(t - p.center);
            op += p.amp_p * f;
            os += p.amp_s * f;
        }
        (op, os)
    }
}

type Amplitudes = [Complex64; 3];

#[inline]
fn deriv(env: &Envelopes, gamma: f64, t: f64, c: &Amplitudes) -> Amplitudes {
    let (op, os) = env.at(t);
    let i = Complex64::new(0.0, 1.0);
    [
        -i * 0.5 * op * c[1],
        -i * 0.5 * (op * c[0] + os * c[2]) - 0.5 * gamma * c[1],
        -i * 0.5 * os * c[1],
    ]
}

#[inline]
fn rk4_step(env: &Envelopes, gamma: f64, t: f64, h: f64, c: &Amplitudes) -> Amplitudes {
    let add = |a: &Amplitudes, k: &Amplitudes, w: f64| -> Amplitudes {
        [a[0] + k[0] * w, a[1] + k[1] * w, a[2] + k[2] * w]
    };
    let k1 = deriv(env, gamma, t, c);
    let k2 = deriv(env, gamma, t + h / 2.0, &add(c, &k1, h / 2.0));
    let k3 = deriv(env, gamma, t + h / 2.0, &add(c, &k2, h / 2.0));
    let k4 = deriv(env, gamma, t + h, &add(c, &k3, h));
    let mut out = *c;
    for i in 0..3 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrates the Schroedinger equation over the train's grid, sampling every
/// `record_stride` steps (the final step is always recorded).
pub fn evolve(train: &TrainSpec, config: &IntegratorConfig, initial: &StateVector) -> Result<TimeSeries> {
    train.validate()?;
    config.validate()?;
    if !initial.is_finite() {
        return Err(Error::invalid("initial state must be finite"));
    }
    if let Some(width) = train.min_width() {
        let max_dt = width / 100.0;
        if config.dt > max_dt {
            return Err(Error::GridTooCoarse { dt: config.dt, max: max_dt });
        }
    }

    let env = Envelopes::build(train)?;
    let gamma = train.gamma;
    let (t0, t1) = (train.grid.t_start, train.grid.t_end);
    let h = config.dt;
    let steps = ((t1 - t0) / h).ceil() as usize;

    let mut c: Amplitudes = [initial.c1, initial.c2, initial.c3];
    let mut rows = Vec::with_capacity(steps / config.record_stride + 2);
    let record = |rows: &mut Vec<Sample>, t: f64, c: &Amplitudes| {
        let (op, os) = env.at(t);
        let p = [c[0].norm_sqr(), c[1].norm_sqr(), c[2].norm_sqr()];
        rows.push(Sample {
            t,
            omega_p: op,
            omega_s: os,
            p1: p[0],
            p2: p[1],
            p3: p[2],
            norm_sq: p[0] + p[1] + p[2],
        });
    };

    record(&mut rows, t0, &c);
    let mut t = t0;
    for step in 1..=steps {
        // Shrink the last step so the series ends exactly at t_end.
        let h_step = if step == steps { t1 - t } else { h };
        c = rk4_step(&env, gamma, t, h_step, &c);
        t = if step == steps { t1 } else { t0 + step as f64 * h };
        if step % config.record_stride == 0 || step == steps {
            record(&mut rows, t, &c);
        }
    }
    Ok(TimeSeries { rows })
}

/// Global maximum of the P2 column, plus the maximum within each pair's
/// midpoint-bounded time window.
pub fn extract_p2_max(series: &TimeSeries, train: &TrainSpec) -> (f64, Vec<f64>) {
    let global = series.rows.iter().map(|r| r.p2).fold(0.0f64, f64::max);
    let per_pair = train
        .pair_windows()
        .iter()
        .map(|&(lo, hi)| {
            series
                .rows
                .iter()
                .filter(|r| r.t >= lo && r.t <= hi)
                .map(|r| r.p2)
                .fold(0.0f64, f64::max)
        })
        .collect();
    (global, per_pair)
}

/// Time at which P2 peaks inside each pair window.
pub fn p2_peak_times(series: &TimeSeries, train: &TrainSpec) -> Vec<f64> {
    train
        .pair_windows()
        .iter()
        .map(|&(lo, hi)| {
            series
                .rows
                .iter()
                .filter(|r| r.t >= lo && r.t <= hi)
                .max_by(|a, b| a.p2.total_cmp(&b.p2))
                .map(|r| r.t)
                .unwrap_or(lo)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{mixing_angles, partial_states, single_pair_propagator};
    use crate::designer::build_train;
    use crate::model::{PulsePair, SimulationGrid};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    const TWO_PI: f64 = 2.0 * PI;

    #[test]
    fn hamiltonian_trivial_cases() {
        let h = hamiltonian_at(0.0, 0.0, 0.0).unwrap();
        for row in &h {
            for e in row {
                assert_eq!(*e, Complex64::ZERO);
            }
        }
        let h = hamiltonian_at(2.0, 0.0, 0.0).unwrap();
        assert_eq!(h[0][1], Complex64::new(1.0, 0.0));
        assert_eq!(h[1][0], Complex64::new(1.0, 0.0));
        assert_eq!(h[1][2], Complex64::ZERO);
        let h = hamiltonian_at(1.0, 1.0, 2.0).unwrap();
        assert_eq!(h[1][1], Complex64::new(0.0, -1.0));
        assert!(hamiltonian_at(1.0, 1.0, -0.5).is_err());
    }

    fn gaussian_train(n: usize, gamma: f64) -> TrainSpec {
        let mut train = build_train(n, &PulseShape::Gaussian { width: 1.0 }, 6.0, TWO_PI, None).unwrap();
        train.gamma = gamma;
        train
    }

    #[test]
    fn empty_train_stays_put() {
        let train = TrainSpec {
            pairs: vec![],
            gamma: 0.5,
            grid: SimulationGrid { t_start: 0.0, t_end: 10.0, dt: 0.01 },
        };
        let series = evolve(&train, &IntegratorConfig::new(0.01), &StateVector::ground()).unwrap();
        let last = series.last().unwrap();
        assert_eq!((last.p1, last.p2, last.p3), (1.0, 0.0, 0.0));
    }

    #[test]
    fn single_pair_complete_transfer() {
        let train = gaussian_train(1, 0.0);
        let cfg = IntegratorConfig::new(1.0 / 2000.0);
        let series = evolve(&train, &cfg, &StateVector::ground()).unwrap();
        let last = series.last().unwrap();
        assert_abs_diff_eq!(last.p3, 1.0, epsilon = 1e-4);
        let (p2max, _) = extract_p2_max(&series, &train);
        assert_abs_diff_eq!(p2max, 0.5, epsilon = 1e-3);
        assert_abs_diff_eq!(last.norm_sq, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn single_pair_lossy_transfer() {
        let train = gaussian_train(1, 1.0);
        let cfg = IntegratorConfig::new(1.0 / 2000.0);
        let series = evolve(&train, &cfg, &StateVector::ground()).unwrap();
        // Frozen from an independent RK4 run: final P3 = 0.6326.
        assert_abs_diff_eq!(series.last().unwrap().p3, 0.63, epsilon = 0.02);
    }

    #[test]
    fn norm_decays_monotonically_with_loss() {
        let train = gaussian_train(2, 1.0);
        let cfg = IntegratorConfig::new(1.0 / 500.0);
        let series = evolve(&train, &cfg, &StateVector::ground()).unwrap();
        for w in series.rows.windows(2) {
            assert!(w[1].norm_sq <= w[0].norm_sq + 1e-9);
        }
    }

    #[test]
    fn grid_too_coarse_is_rejected() {
        let train = gaussian_train(1, 0.0);
        let cfg = IntegratorConfig::new(0.05);
        match evolve(&train, &cfg, &StateVector::ground()) {
            Err(Error::GridTooCoarse { .. }) => {}
            other => panic!("expected GridTooCoarse, got {other:?}"),
        }
    }

    #[test]
    fn boundary_populations_match_partial_cascades() {
        let n = 3;
        let train = gaussian_train(n, 0.0);
        let cfg = IntegratorConfig::new(1.0 / 2000.0);
        let series = evolve(&train, &cfg, &StateVector::ground()).unwrap();
        let states = partial_states(&mixing_angles(n).unwrap(), TWO_PI).unwrap();
        let windows = train.pair_windows();
        let mut prev_p3 = 0.0;
        for (k, (_, hi)) in windows.iter().enumerate() {
            let row = series
                .rows
                .iter()
                .min_by(|a, b| (a.t - hi).abs().total_cmp(&(b.t - hi).abs()))
                .unwrap();
            let [a1, a2, a3] = states[k].populations();
            assert_abs_diff_eq!(row.p1, a1, epsilon = 1e-4);
            assert_abs_diff_eq!(row.p2, a2, epsilon = 1e-4);
            assert_abs_diff_eq!(row.p3, a3, epsilon = 1e-4);
            assert!(row.p2 < 1e-4, "pair boundary P2 = {}", row.p2);
            assert!(row.p3 > prev_p3 - 1e-6, "stepwise transfer violated");
            prev_p3 = row.p3;
        }
    }

    #[test]
    fn rectangular_pulses_reproduce_boundary_populations() {
        let n = 2;
        let angles = mixing_angles(n).unwrap();
        let gauss = gaussian_train(n, 0.0);
        let rect = build_train(n, &PulseShape::Rect { duration: 1.0 }, 6.0, TWO_PI, None).unwrap();
        let cfg = IntegratorConfig::new(1.0 / 2000.0);
        let sg = evolve(&gauss, &cfg, &StateVector::ground()).unwrap();
        let sr = evolve(&rect, &cfg, &StateVector::ground()).unwrap();
        let states = partial_states(&angles, TWO_PI).unwrap();
        for (series, train) in [(&sg, &gauss), (&sr, &rect)] {
            for (k, (_, hi)) in train.pair_windows().iter().enumerate() {
                let row = series
                    .rows
                    .iter()
                    .min_by(|a, b| (a.t - hi).abs().total_cmp(&(b.t - hi).abs()))
                    .unwrap();
                let [a1, a2, a3] = states[k].populations();
                assert_abs_diff_eq!(row.p1, a1, epsilon = 1e-4);
                assert_abs_diff_eq!(row.p2, a2, epsilon = 1e-4);
                assert_abs_diff_eq!(row.p3, a3, epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn rectangular_single_pair_matches_propagator_element() {
        // theta = pi/6, rms area pi: rectangular envelopes make the analytic
        // propagator exact for the numeric run, so |c2| = |U21| = 0.5 when
        // starting from the ground state.
        let shape = PulseShape::Rect { duration: 1.0 };
        let train = TrainSpec {
            pairs: vec![PulsePair { theta: PI / 6.0, area: PI, center: 0.0, shape }],
            gamma: 0.0,
            grid: SimulationGrid { t_start: -2.0, t_end: 2.0, dt: 1.0 / 2000.0 },
        };
        let series = evolve(&train, &IntegratorConfig::new(1.0 / 2000.0), &StateVector::ground()).unwrap();
        let u = single_pair_propagator(PI / 6.0, PI).unwrap();
        assert_abs_diff_eq!(series.last().unwrap().p2, u.0[1][0].norm_sqr(), epsilon = 1e-6);
        assert_abs_diff_eq!(series.last().unwrap().p2, 0.25, epsilon = 1e-6);
    }

    #[test]
    fn extract_p2_max_on_zero_column() {
        let train = TrainSpec {
            pairs: vec![],
            gamma: 0.0,
            grid: SimulationGrid { t_start: 0.0, t_end: 10.0, dt: 0.01 },
        };
        let series = evolve(&train, &IntegratorConfig::new(0.01), &StateVector::ground()).unwrap();
        let (global, per_pair) = extract_p2_max(&series, &train);
        assert_eq!(global, 0.0);
        assert!(per_pair.is_empty());
    }

    #[test]
    fn boundary_error_converges_at_high_order() {
        // Wide spacing removes the pulse-overlap error floor so truncation
        // error dominates; halving the step then shrinks the boundary error
        // by well over the 4th-order factor of 16. At steps finer than ~T/400
        // the error bottoms out near machine precision instead.
        let n = 2;
        let angles = mixing_angles(n).unwrap();
        let train = build_train(n, &PulseShape::Gaussian { width: 1.0 }, 12.0, TWO_PI, None).unwrap();
        let states = partial_states(&angles, TWO_PI).unwrap();
        let dev = |dt: f64| {
            let series = evolve(&train, &IntegratorConfig::new(dt), &StateVector::ground()).unwrap();
            let mut worst = 0.0f64;
            for (k, &(_, hi)) in train.pair_windows().iter().enumerate() {
                let row = series
                    .rows
                    .iter()
                    .min_by(|a, b| (a.t - hi).abs().total_cmp(&(b.t - hi).abs()))
                    .unwrap();
                let [a1, a2, a3] = states[k].populations();
                worst = worst
                    .max((row.p1 - a1).abs())
                    .max((row.p2 - a2).abs())
                    .max((row.p3 - a3).abs());
            }
            worst
        };
        let coarse = dev(1.0 / 100.0);
        let fine = dev(1.0 / 200.0);
        assert!(coarse / fine > 12.0, "factor {} ({coarse:.2e} -> {fine:.2e})", coarse / fine);
    }

    #[test]
    fn two_pair_transient_maxima_are_equal() {
        let train = gaussian_train(2, 0.0);
        let cfg = IntegratorConfig::new(1.0 / 2000.0);
        let series = evolve(&train, &cfg, &StateVector::ground()).unwrap();
        let (global, per_pair) = extract_p2_max(&series, &train);
        assert_abs_diff_eq!(global, (PI / 8.0).sin().powi(2), epsilon = 1e-3);
        assert_eq!(per_pair.len(), 2);
        assert_abs_diff_eq!(per_pair[0], per_pair[1], epsilon = 1e-3);
    }
}
