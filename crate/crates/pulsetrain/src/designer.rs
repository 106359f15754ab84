//! Construction of concrete pump/Stokes envelopes from high-level train
//! parameters, amplitude calibration against the requested rms area, and
//! quadrature checks of the realized areas.

use crate::analytic::mixing_angles;
use crate::model::{PulsePair, PulseShape, SimulationGrid, TrainSpec};
use crate::{Error, Result};

/// Peak rms amplitude Omega with Omega * integral(f) = area. For a Gaussian
/// of width T and area 2 pi this is 2 sqrt(pi) / T.
pub fn calibrate_amplitude(shape: &PulseShape, area: f64) -> Result<f64> {
    if !area.is_finite() || area <= 0.0 {
        return Err(Error::invalid(format!("area must be > 0, got {area}")));
    }
    shape.validate()?;
    let integral = shape.integral();
    if integral <= 0.0 {
        return Err(Error::invalid("pulse shape has zero integral"));
    }
    Ok(area / integral)
}

/// Builds an N-pair train with centers (k-1) * spacing, a common shape and
/// per-pair rms area. Angles default to the optimal schedule. The grid spans
/// 5 widths beyond the first and last centers with dt = width / 2000.
pub fn build_train(
    pairs: usize,
    shape: &PulseShape,
    spacing: f64,
    area: f64,
    angles: Option<&[f64]>,
) -> Result<TrainSpec> {
    if pairs == 0 {
        return Err(Error::invalid("pair count must be >= 1"));
    }
    shape.validate()?;
    calibrate_amplitude(shape, area)?;
    if !spacing.is_finite() || spacing <= 0.0 {
        return Err(Error::invalid(format!("spacing must be > 0, got {spacing}")));
    }
    let width = shape.characteristic_width();
    if pairs > 1 && spacing < 4.0 * width {
        return Err(Error::invalid(format!(
            "spacing {spacing} below the overlap guard of 4 widths ({})",
            4.0 * width
        )));
    }
    let angle_list: Vec<f64> = match angles {
        Some(a) => {
            if a.len() != pairs {
                return Err(Error::invalid(format!(
                    "expected {pairs} angles, got {}",
                    a.len()
                )));
            }
            a.to_vec()
        }
        None => mixing_angles(pairs)?,
    };
    let pair_list: Vec<PulsePair> = angle_list
        .iter()
        .enumerate()
        .map(|(k, &theta)| PulsePair {
            theta,
            area,
            center: k as f64 * spacing,
            shape: shape.clone(),
        })
        .collect();
    let t_start = -5.0 * width;
    let t_end = (pairs - 1) as f64 * spacing + 5.0 * width;
    let train = TrainSpec {
        pairs: pair_list,
        gamma: 0.0,
        grid: SimulationGrid { t_start, t_end, dt: width / 2000.0 },
    };
    train.validate()?;
    Ok(train)
}

/// Composite-Simpson quadrature of the rms envelope sqrt(Omega_p^2 + Omega_s^2)
/// over the midpoint-bounded window of pair `pair_index`, on the simulation
/// grid's step.
pub fn measure_rms_area(train: &TrainSpec, pair_index: usize) -> Result<f64> {
    train.validate()?;
    let windows = train.pair_windows();
    let (lo, hi) = *windows
        .get(pair_index)
        .ok_or_else(|| Error::invalid(format!("pair index {pair_index} out of range")))?;
    // Even interval count for Simpson.
    let mut n = ((hi - lo) / train.grid.dt).ceil() as usize;
    if n % 2 == 1 {
        n += 1;
    }
    n = n.max(2);
    let h = (hi - lo) / n as f64;
    let rms = |t: f64| -> Result<f64> {
        let (p, s) = train.envelopes_at(t)?;
        Ok((p * p + s * s).sqrt())
    };
    let mut acc = rms(lo)? + rms(hi)?;
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * rms(lo + i as f64 * h)?;
    }
    Ok(acc * h / 3.0)
}

/// Quadrature pump and Stokes areas (A_p, A_s) of one pair, over the same
/// window as `measure_rms_area`.
pub fn measure_component_areas(train: &TrainSpec, pair_index: usize) -> Result<(f64, f64)> {
    train.validate()?;
    let windows = train.pair_windows();
    let (lo, hi) = *windows
        .get(pair_index)
        .ok_or_else(|| Error::invalid(format!("pair index {pair_index} out of range")))?;
    let mut n = ((hi - lo) / train.grid.dt).ceil() as usize;
    if n % 2 == 1 {
        n += 1;
    }
    n = n.max(2);
    let h = (hi - lo) / n as f64;
    let mut ap = 0.0;
    let mut as_ = 0.0;
    for i in 0..=n {
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let (p, s) = train.envelopes_at(lo + i as f64 * h)?;
        ap += w * p;
        as_ += w * s;
    }
    Ok((ap * h / 3.0, as_ * h / 3.0))
}
