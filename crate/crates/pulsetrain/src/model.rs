//! Shared domain types: state vectors, propagators, pulse shapes and train
//! specifications.
//!
//! All quantities use natural units: hbar = 1, times in units of a reference
//! pulse width T, Rabi frequencies and loss rates in units of 1/T.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Three complex probability amplitudes (c1, c2, c3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector {
    pub c1: Complex64,
    pub c2: Complex64,
    pub c3: Complex64,
}

impl StateVector {
    pub fn new(c1: Complex64, c2: Complex64, c3: Complex64) -> Self {
        Self { c1, c2, c3 }
    }

    /// The default initial condition: all population in state |1>.
    pub fn ground() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::ZERO, Complex64::ZERO)
    }

    /// Populations P_n = |c_n|^2.
    pub fn populations(&self) -> [f64; 3] {
        [self.c1.norm_sqr(), self.c2.norm_sqr(), self.c3.norm_sqr()]
    }

    pub fn norm_sq(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr() + self.c3.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        [self.c1, self.c2, self.c3]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Populations (P1, P2, P3) of a state vector.
pub fn state_populations(s: &StateVector) -> (f64, f64, f64) {
    let [p1, p2, p3] = s.populations();
    (p1, p2, p3)
}

/// Dense 3x3 complex evolution operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Propagator3(pub [[Complex64; 3]; 3]);

impl Propagator3 {
    pub fn identity() -> Self {
        let mut m = [[Complex64::ZERO; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        Self(m)
    }

    pub fn apply(&self, s: &StateVector) -> StateVector {
        let v = [s.c1, s.c2, s.c3];
        let mut out = [Complex64::ZERO; 3];
        for (row, o) in self.0.iter().zip(out.iter_mut()) {
            for (u, x) in row.iter().zip(v.iter()) {
                *o += u * x;
            }
        }
        StateVector::new(out[0], out[1], out[2])
    }

    /// Matrix product self * rhs.
    pub fn mul(&self, rhs: &Propagator3) -> Propagator3 {
        let mut m = [[Complex64::ZERO; 3]; 3];
        for (row, out_row) in self.0.iter().zip(m.iter_mut()) {
            for (j, o) in out_row.iter_mut().enumerate() {
                for (a, rhs_row) in row.iter().zip(rhs.0.iter()) {
                    *o += a * rhs_row[j];
                }
            }
        }
        Propagator3(m)
    }

    /// Max-norm of U^dagger U - I.
    pub fn unitarity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let mut e = Complex64::ZERO;
                for k in 0..3 {
                    e += self.0[k][i].conj() * self.0[k][j];
                }
                if i == j {
                    e -= Complex64::new(1.0, 0.0);
                }
                worst = worst.max(e.norm());
            }
        }
        worst
    }
}

/// Shared time dependence f(t) of a coincident pump/Stokes pair, evaluated
/// relative to the pair center. Gaussian uses exp(-(t/T)^2); Rect is 1 on
/// [-duration/2, duration/2]; Sampled interpolates (time, value) knots
/// linearly and is zero outside the knot span.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PulseShape {
    Gaussian { width: f64 },
    Rect { duration: f64 },
    Sampled { knots: Vec<(f64, f64)> },
}

impl PulseShape {
    pub fn validate(&self) -> Result<()> {
        match self {
            PulseShape::Gaussian { width } => {
                if !width.is_finite() || *width <= 0.0 {
                    return Err(Error::invalid(format!("gaussian width must be > 0, got {width}")));
                }
            }
            PulseShape::Rect { duration } => {
                if !duration.is_finite() || *duration <= 0.0 {
                    return Err(Error::invalid(format!("rect duration must be > 0, got {duration}")));
                }
            }
            PulseShape::Sampled { knots } => {
                if knots.len() < 2 {
                    return Err(Error::invalid("sampled shape needs at least 2 knots"));
                }
                for w in knots.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::invalid("sampled knot times must be strictly increasing"));
                    }
                }
                if knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite() || *v < 0.0) {
                    return Err(Error::invalid("sampled knot values must be finite and >= 0"));
                }
            }
        }
        Ok(())
    }

    /// f at offset `dt` from the pair center.
    pub fn value(&self, dt: f64) -> f64 {
        match self {
            PulseShape::Gaussian { width } => (-(dt / width).powi(2)).exp(),
            PulseShape::Rect { duration } => {
                // Midpoint value at the edges keeps node-based quadrature
                // exact for piecewise-constant integrands.
                let half = duration / 2.0;
                if dt.abs() < half {
                    1.0
                } else if dt.abs() == half {
                    0.5
                } else {
                    0.0
                }
            }
            PulseShape::Sampled { knots } => {
                let first = knots.first().unwrap();
                let last = knots.last().unwrap();
                if dt < first.0 || dt > last.0 {
                    return 0.0;
                }
                let idx = knots.partition_point(|(t, _)| *t <= dt);
                if idx == 0 {
                    return first.1;
                }
                if idx == knots.len() {
                    return last.1;
                }
                let (t0, v0) = knots[idx - 1];
                let (t1, v1) = knots[idx];
                v0 + (v1 - v0) * (dt - t0) / (t1 - t0)
            }
        }
    }

    /// Integral of f over all time (closed form for Gaussian and Rect,
    /// trapezoid over the knots for Sampled).
    pub fn integral(&self) -> f64 {
        match self {
            PulseShape::Gaussian { width } => width * std::f64::consts::PI.sqrt(),
            PulseShape::Rect { duration } => *duration,
            PulseShape::Sampled { knots } => knots
                .windows(2)
                .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
                .sum(),
        }
    }

    /// Characteristic time scale, used for step-size guards.
    pub fn characteristic_width(&self) -> f64 {
        match self {
            PulseShape::Gaussian { width } => *width,
            PulseShape::Rect { duration } => *duration,
            PulseShape::Sampled { knots } => knots.last().unwrap().0 - knots.first().unwrap().0,
        }
    }
}

/// One coincident pump/Stokes pair. The pump and Stokes peak amplitudes are
/// Omega*sin(theta) and Omega*cos(theta), where Omega is fixed by `area`
/// through the shape integral.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulsePair {
    pub theta: f64,
    pub area: f64,
    pub center: f64,
    pub shape: PulseShape,
}

impl PulsePair {
    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() || !(0.0..=std::f64::consts::FRAC_PI_2).contains(&self.theta) {
            return Err(Error::invalid(format!("theta must be in [0, pi/2], got {}", self.theta)));
        }
        if !self.area.is_finite() || self.area <= 0.0 {
            return Err(Error::invalid(format!("area must be > 0, got {}", self.area)));
        }
        if !self.center.is_finite() {
            return Err(Error::invalid("pair center must be finite"));
        }
        self.shape.validate()
    }

    /// Peak rms Rabi frequency Omega implied by area and shape.
    pub fn peak_amplitude(&self) -> Result<f64> {
        let integral = self.shape.integral();
        if integral <= 0.0 {
            return Err(Error::invalid("pulse shape has zero integral"));
        }
        Ok(self.area / integral)
    }
}

/// Simulation time window and step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl SimulationGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_end.is_finite() && self.dt.is_finite()) {
            return Err(Error::invalid("grid parameters must be finite"));
        }
        if self.t_start >= self.t_end {
            return Err(Error::invalid("grid requires t_start < t_end"));
        }
        if self.dt <= 0.0 {
            return Err(Error::invalid("grid requires dt > 0"));
        }
        if (self.t_end - self.t_start) / self.dt < 100.0 {
            return Err(Error::invalid("grid requires at least 100 steps"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.t_end - self.t_start) / self.dt).ceil() as usize
    }
}

/// An ordered train of pulse pairs plus the middle-state loss rate and the
/// simulation window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainSpec {
    pub pairs: Vec<PulsePair>,
    pub gamma: f64,
    pub grid: SimulationGrid,
}

impl TrainSpec {
    pub fn validate(&self) -> Result<()> {
        for pair in &self.pairs {
            pair.validate()?;
        }
        for w in self.pairs.windows(2) {
            if w[1].center <= w[0].center {
                return Err(Error::invalid("pair centers must be strictly increasing"));
            }
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::invalid(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        self.grid.validate()
    }

    /// Summed pump and Stokes Rabi envelopes at time t.
    pub fn envelopes_at(&self, t: f64) -> Result<(f64, f64)> {
        let mut pump = 0.0;
        let mut stokes = 0.0;
        for pair in &self.pairs {
            let omega = pair.peak_amplitude()?;
            let f = pair.shape.value(t - pair.center);
            pump += omega * pair.theta.sin() * f;
            stokes += omega * pair.theta.cos() * f;
        }
        Ok((pump, stokes))
    }

    /// Per-pair time windows: split at midpoints between consecutive centers,
    /// first window starting at t_start and last ending at t_end.
    pub fn pair_windows(&self) -> Vec<(f64, f64)> {
        let n = self.pairs.len();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let lo = if k == 0 {
                self.grid.t_start
            } else {
                0.5 * (self.pairs[k - 1].center + self.pairs[k].center)
            };
            let hi = if k + 1 == n {
                self.grid.t_end
            } else {
                0.5 * (self.pairs[k].center + self.pairs[k + 1].center)
            };
            out.push((lo, hi));
        }
        out
    }

    /// Narrowest characteristic pulse width across the train.
    pub fn min_width(&self) -> Option<f64> {
        self.pairs
            .iter()
            .map(|p| p.shape.characteristic_width())
            .min_by(|a, b| a.total_cmp(b))
    }
}

/// One sampled row of a simulation: time, envelopes, populations, norm^2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub omega_p: f64,
    pub omega_s: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub norm_sq: f64,
}

/// Sampled populations, Rabi envelopes and norm over a simulation window.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimeSeries {
    pub rows: Vec<Sample>,
}

impl TimeSeries {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.rows.last()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn populations_of_basis_state() {
        let s = StateVector::ground();
        assert_eq!(state_populations(&s), (1.0, 0.0, 0.0));
    }

    #[test]
    fn populations_of_mixed_state() {
        let s = StateVector::new(
            Complex64::new(0.5, 0.5),
            Complex64::ZERO,
            Complex64::new(0.5, -0.5),
        );
        let (p1, p2, p3) = state_populations(&s);
        assert_abs_diff_eq!(p1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p2, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p3, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn populations_ignore_global_phase() {
        let s = StateVector::new(Complex64::ZERO, Complex64::ZERO, Complex64::new(-1.0, 0.0));
        assert_eq!(state_populations(&s), (0.0, 0.0, 1.0));
    }

    #[test]
    fn identity_is_unitary() {
        assert_eq!(Propagator3::identity().unitarity_defect(), 0.0);
    }

    #[test]
    fn gaussian_integral_matches_closed_form() {
        let s = PulseShape::Gaussian { width: 2.0 };
        assert_abs_diff_eq!(s.integral(), 2.0 * std::f64::consts::PI.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn sampled_shape_interpolates_linearly() {
        let s = PulseShape::Sampled {
            knots: vec![(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)],
        };
        assert_abs_diff_eq!(s.value(-0.5), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.value(0.25), 0.75, epsilon = 1e-15);
        assert_eq!(s.value(2.0), 0.0);
        assert_abs_diff_eq!(s.integral(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_nonincreasing_centers() {
        let shape = PulseShape::Gaussian { width: 1.0 };
        let pair = |c: f64| PulsePair {
            theta: 0.5,
            area: 1.0,
            center: c,
            shape: shape.clone(),
        };
        let train = TrainSpec {
            pairs: vec![pair(1.0), pair(1.0)],
            gamma: 0.0,
            grid: SimulationGrid { t_start: -5.0, t_end: 6.0, dt: 0.01 },
        };
        assert!(train.validate().is_err());
    }

    #[test]
    fn rejects_negative_gamma() {
        let train = TrainSpec {
            pairs: vec![],
            gamma: -1.0,
            grid: SimulationGrid { t_start: 0.0, t_end: 10.0, dt: 0.01 },
        };
        assert!(train.validate().is_err());
    }

    #[test]
    fn pair_windows_split_at_midpoints() {
        let shape = PulseShape::Gaussian { width: 1.0 };
        let pair = |c: f64| PulsePair { theta: 0.5, area: 1.0, center: c, shape: shape.clone() };
        let train = TrainSpec {
            pairs: vec![pair(0.0), pair(6.0), pair(12.0)],
            gamma: 0.0,
            grid: SimulationGrid { t_start: -5.0, t_end: 17.0, dt: 0.01 },
        };
        assert_eq!(train.pair_windows(), vec![(-5.0, 3.0), (3.0, 9.0), (9.0, 17.0)]);
    }
}
