//! Irregular event scheduling shared by the event-based textures.
//!
//! Events sit on a regular grid of `eps` events per second; the `irreg_exp`
//! parameter adds Gaussian jitter with standard deviation
//! `0.1 * irreg_exp * 10^irreg_exp / eps`, so 0 is a perfect grid and 1 puts
//! the deviation at one full grid period.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Sorted onset times of scheduled events.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventSchedule {
    pub onsets: Vec<f64>,
    pub eps: f64,
    pub irreg_exp: f64,
}

/// Standard deviation of the onset jitter around the regular grid.
pub fn onset_jitter_sd(eps: f64, irreg_exp: f64) -> f64 {
    0.1 * irreg_exp * 10f64.powf(irreg_exp) / eps
}

fn check_args(eps: f64, irreg_exp: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    if !(0.0..=1.0).contains(&irreg_exp) {
        return Err(Error::invalid(format!(
            "irreg_exp must be in [0, 1], got {irreg_exp}"
        )));
    }
    Ok(())
}

/// Jittered onsets before boundary handling: one `(grid_index, time)` pair
/// per grid slot inside `[0, duration)`, where `time ~ Normal(k/eps, sd)`.
/// The raw times may fall outside the clip; [`schedule_events`] reflects and
/// sorts them.
pub fn schedule_events_raw(
    eps: f64,
    irreg_exp: f64,
    duration: f64,
    rng: &mut SeededRng,
) -> Result<Vec<(usize, f64)>> {
    check_args(eps, irreg_exp)?;
    if duration <= 0.0 {
        return Ok(vec![]);
    }
    let sd = onset_jitter_sd(eps, irreg_exp);
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let grid = k as f64 / eps;
        if grid >= duration {
            break;
        }
        out.push((k, grid + sd * rng.normal()));
        k += 1;
    }
    Ok(out)
}

/// Reflect a time into `[0, duration)`.
fn reflect(t: f64, duration: f64) -> f64 {
    let period = 2.0 * duration;
    let mut v = t.rem_euclid(period);
    if v >= duration {
        v = period - v;
    }
    if v >= duration {
        v = duration * (1.0 - 1e-12);
    }
    v
}

/// Schedule events in `[0, duration)`: jittered grid onsets, reflected into
/// range and sorted. An `irreg_exp` of 0 degenerates to the exact grid; a
/// duration too short for any event gives an empty schedule.
pub fn schedule_events(
    eps: f64,
    irreg_exp: f64,
    duration: f64,
    rng: &mut SeededRng,
) -> Result<EventSchedule> {
    let mut onsets: Vec<f64> = schedule_events_raw(eps, irreg_exp, duration, rng)?
        .into_iter()
        .map(|(_, t)| reflect(t, duration))
        .collect();
    onsets.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(EventSchedule {
        onsets,
        eps,
        irreg_exp,
    })
}
