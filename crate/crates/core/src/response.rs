//! Self-consistent steady-state cavity response per MLS state: damped
//! fixed-point solution of n = eps^2 / ((omega_ri(n) - omega_m)^2 +
//! (kappa/2)^2), hysteresis power sweeps, and 2D frequency-power maps.

use rayon::prelude::*;
use serde::Serialize;

use crate::eigenblocks::effective_frequency;
use crate::error::{Error, Result};
use crate::model::SystemSpec;

/// Measurement drive: amplitude eps and frequency omega_m, both MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    pub epsilon: f64,
    pub omega_m: f64,
}

impl DriveSpec {
    pub fn new(epsilon: f64, omega_m: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "drive amplitude must be finite and >= 0, got {epsilon}"
            )));
        }
        Ok(Self { epsilon, omega_m })
    }
}

/// Drive power in dB relative to eps_ref = kappa/2, so 0 dB drives one photon
/// in a resonant linear cavity: power_dB = 20 log10(eps / (kappa/2)).
pub fn db_to_epsilon(power_db: f64, kappa: f64) -> f64 {
    kappa / 2.0 * 10f64.powf(power_db / 20.0)
}

pub fn epsilon_to_db(epsilon: f64, kappa: f64) -> f64 {
    20.0 * (epsilon / (kappa / 2.0)).log10()
}

/// Photon number of a resonantly driven linear cavity, (2 eps / kappa)^2.
/// Upper bound for every fixed point; used to seed the high branch.
pub fn linear_ceiling(drive: &DriveSpec, kappa: f64) -> f64 {
    (2.0 * drive.epsilon / kappa).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Low,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepDirection {
    Up,
    Down,
}

/// Damped fixed-point iteration controls.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Damping factor: n <- (1-beta) n + beta F(n).
    pub beta: f64,
    pub max_iter: usize,
    /// Convergence when |F(n) - n| <= tol_scale * max(1, n).
    pub tol_scale: f64,
    /// Period-2 oscillation halves beta, at most this many times.
    pub max_beta_halvings: u32,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            beta: 0.5,
            max_iter: 100_000,
            tol_scale: 1e-10,
            max_beta_halvings: 4,
        }
    }
}

/// One converged (or flagged) steady-state solution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResponsePoint {
    pub n_photons: f64,
    /// Effective resonator frequency at the solution (MHz).
    pub omega_ri_at_n: f64,
    /// Which seed family produced this point.
    pub branch: Branch,
    pub converged: bool,
    /// Fixed-point defect |F(n) - n| at the returned n.
    pub residual: f64,
    pub iterations: usize,
}

/// Signed fixed-point defect F(n) - n of the steady-state equation.
pub fn fixed_point_defect(
    spec: &SystemSpec,
    level: usize,
    drive: &DriveSpec,
    n: f64,
) -> Result<f64> {
    let half_kappa = spec.kappa / 2.0;
    let w = effective_frequency(spec, level, n)?;
    let d = w - drive.omega_m;
    Ok(drive.epsilon * drive.epsilon / (d * d + half_kappa * half_kappa) - n)
}

/// Solve the steady-state photon number from the given initialization with a
/// damped fixed-point iteration. Non-convergence after the iteration cap is
/// reported through the `converged` flag, never silently.
pub fn steady_state_photons(
    spec: &SystemSpec,
    level: usize,
    drive: &DriveSpec,
    init: f64,
    opts: &SolverOptions,
) -> Result<ResponsePoint> {
    if level >= spec.num_levels() {
        return Err(Error::InvalidLevel {
            level,
            num_levels: spec.num_levels(),
        });
    }
    let ceiling = linear_ceiling(drive, spec.kappa);
    let branch = if init < ceiling / 2.0 { Branch::Low } else { Branch::High };

    if drive.epsilon == 0.0 {
        return Ok(ResponsePoint {
            n_photons: 0.0,
            omega_ri_at_n: effective_frequency(spec, level, 0.0)?,
            branch: Branch::Low,
            converged: true,
            residual: 0.0,
            iterations: 1,
        });
    }

    let half_kappa = spec.kappa / 2.0;
    let eps_sq = drive.epsilon * drive.epsilon;
    let mut n = init.max(0.0);
    let mut beta = opts.beta;
    let mut halvings = 0;
    let mut r_hist: [Option<f64>; 2] = [None, None];
    let mut last = (f64::NAN, f64::NAN); // (omega_ri, residual)

    for iter in 1..=opts.max_iter {
        let w = effective_frequency(spec, level, n)?;
        let f = eps_sq / ((w - drive.omega_m).powi(2) + half_kappa * half_kappa);
        let r = f - n;
        last = (w, r.abs());
        if r.abs() <= opts.tol_scale * n.max(1.0) {
            return Ok(ResponsePoint {
                n_photons: n,
                omega_ri_at_n: w,
                branch,
                converged: true,
                residual: r.abs(),
                iterations: iter,
            });
        }
        // period-2 oscillation: residual alternates sign without shrinking
        if let (Some(r1), Some(r2)) = (r_hist[0], r_hist[1]) {
            if halvings < opts.max_beta_halvings
                && r * r1 < 0.0
                && r * r2 > 0.0
                && r.abs() >= 0.9 * r2.abs()
            {
                beta *= 0.5;
                halvings += 1;
                r_hist = [None, None];
            } else {
                r_hist = [Some(r), r_hist[0]];
            }
        } else {
            r_hist = [Some(r), r_hist[0]];
        }
        n = (1.0 - beta) * n + beta * f;
    }

    Ok(ResponsePoint {
        n_photons: n,
        omega_ri_at_n: last.0,
        branch,
        converged: false,
        residual: last.1,
        iterations: opts.max_iter,
    })
}

/// A power sweep of one MLS state at fixed measurement frequency.
#[derive(Debug, Clone, Serialize)]
pub struct ResponseCurve {
    pub level: usize,
    pub omega_m: f64,
    pub direction: SweepDirection,
    /// Strictly increasing powers (dB relative to eps_ref = kappa/2).
    pub powers_db: Vec<f64>,
    /// One point per power, aligned with `powers_db`.
    pub points: Vec<ResponsePoint>,
}

impl ResponseCurve {
    /// Power at the largest upward jump of log n between adjacent grid
    /// points: the avalanche position on this grid.
    pub fn jump_power_db(&self) -> Option<f64> {
        let floor = 1e-12;
        let mut best = (f64::NEG_INFINITY, None);
        for k in 1..self.points.len() {
            let step = (self.points[k].n_photons.max(floor)).log10()
                - (self.points[k - 1].n_photons.max(floor)).log10();
            if step > best.0 {
                best = (step, Some(self.powers_db[k]));
            }
        }
        best.1
    }
}

/// Sweep powers sequentially, seeding each solve with the previous solution
/// (hysteresis protocol). `powers_db` must be strictly increasing; an up
/// sweep walks it forward from n = 0, a down sweep walks it backward from the
/// linear-cavity ceiling. Per-point non-convergence is flagged, never fatal.
pub fn power_sweep(
    spec: &SystemSpec,
    level: usize,
    omega_m: f64,
    powers_db: &[f64],
    direction: SweepDirection,
    opts: &SolverOptions,
) -> Result<ResponseCurve> {
    if powers_db.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSpec(
            "power grid must be strictly increasing".into(),
        ));
    }
    let order: Vec<usize> = match direction {
        SweepDirection::Up => (0..powers_db.len()).collect(),
        SweepDirection::Down => (0..powers_db.len()).rev().collect(),
    };
    let mut points: Vec<Option<ResponsePoint>> = vec![None; powers_db.len()];
    let mut seed = match direction {
        SweepDirection::Up => 0.0,
        SweepDirection::Down => {
            let eps = db_to_epsilon(*powers_db.last().unwrap(), spec.kappa);
            linear_ceiling(&DriveSpec::new(eps, omega_m)?, spec.kappa)
        }
    };
    for &k in &order {
        let drive = DriveSpec::new(db_to_epsilon(powers_db[k], spec.kappa), omega_m)?;
        let point = steady_state_photons(spec, level, &drive, seed, opts)?;
        seed = point.n_photons;
        points[k] = Some(point);
    }
    Ok(ResponseCurve {
        level,
        omega_m,
        direction,
        powers_db: powers_db.to_vec(),
        points: points.into_iter().map(Option::unwrap).collect(),
    })
}

/// 2D steady-state map over measurement frequency and power, plus the
/// effective-frequency ridge of an up sweep at omega_m = omega_r for overlay.
#[derive(Debug, Clone, Serialize)]
pub struct FrequencyPowerMap {
    pub level: usize,
    pub omega_m: Vec<f64>,
    pub powers_db: Vec<f64>,
    /// cells[power_index][omega_index], each solved from the low seed.
    pub cells: Vec<Vec<ResponsePoint>>,
    pub ridge: ResponseCurve,
}

pub fn frequency_power_map(
    spec: &SystemSpec,
    level: usize,
    omega_m: &[f64],
    powers_db: &[f64],
    opts: &SolverOptions,
) -> Result<FrequencyPowerMap> {
    if omega_m.is_empty() || powers_db.is_empty() {
        return Err(Error::InvalidSpec("map grids must be non-empty".into()));
    }
    let cells: Result<Vec<Vec<ResponsePoint>>> = powers_db
        .par_iter()
        .map(|&db| {
            omega_m
                .iter()
                .map(|&wm| {
                    let drive = DriveSpec::new(db_to_epsilon(db, spec.kappa), wm)?;
                    steady_state_photons(spec, level, &drive, 0.0, opts)
                })
                .collect()
        })
        .collect();
    let ridge = power_sweep(spec, level, spec.omega_r, powers_db, SweepDirection::Up, opts)?;
    Ok(FrequencyPowerMap {
        level,
        omega_m: omega_m.to_vec(),
        powers_db: powers_db.to_vec(),
        cells: cells?,
        ridge,
    })
}
