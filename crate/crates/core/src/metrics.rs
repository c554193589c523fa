//! Readout quality and QND-degradation figures: cavity pull, homodyne SNR,
//! and the dressed Purcell / decay / dephasing rate pairs with their leakage
//! companions. All rates are ratios to kappa, gamma_1 or gamma_phi.

use rayon::prelude::*;
use serde::Serialize;

use crate::dispersive::DispersiveCoefficients;
use crate::eigenblocks::{build_block, diagonalize, DressedBlock};
use crate::error::{Error, Result};
use crate::model::{lowering_elements, sigma_z_elements, SystemSpec};
use crate::response::{power_sweep, ResponseCurve, SolverOptions, SweepDirection};

/// Homodyne measurement configuration.
#[derive(Debug, Clone, Copy)]
pub struct SnrConfig {
    /// Measurement efficiency, in (0, 1].
    pub eta: f64,
    /// Qubit relaxation rate gamma_1 = 1/T_1 as an ordinary frequency (MHz);
    /// see [`gamma1_from_t1_us`].
    pub gamma_1: f64,
    /// kappa / (2 chi'), dimensionless; 1 is near the optimum.
    pub kappa_over_2chi: f64,
}

impl SnrConfig {
    pub fn new(eta: f64, gamma_1: f64, kappa_over_2chi: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidSpec(format!("eta must be in (0, 1], got {eta}")));
        }
        if gamma_1 <= 0.0 || kappa_over_2chi <= 0.0 {
            return Err(Error::InvalidSpec(
                "gamma_1 and kappa_over_2chi must be positive".into(),
            ));
        }
        Ok(Self { eta, gamma_1, kappa_over_2chi })
    }
}

/// Relaxation rate gamma_1 = 1/T_1 expressed as an ordinary frequency in MHz,
/// so that (2 pi gamma_1) * T_1 = 1 for T_1 in microseconds.
pub fn gamma1_from_t1_us(t1_us: f64) -> f64 {
    1.0 / (2.0 * std::f64::consts::PI * t1_us)
}

/// Difference in cavity pull between the logical states at mean photon
/// number n_bar: delta = chi' + zeta' * n_bar.
pub fn cavity_pull(coeffs: &DispersiveCoefficients, n_bar: f64) -> f64 {
    coeffs.chi_prime + coeffs.zeta_prime * n_bar
}

/// One point of an SNR curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SnrPoint {
    pub n_bar: f64,
    /// Cavity pull difference delta (MHz).
    pub delta: f64,
    /// Pointer-state separation |alpha_1 - alpha_0|^2.
    pub alpha_sep_sq: f64,
    pub snr: f64,
}

/// Homodyne SNR over a photon-number grid.
///
/// The drive sits at the midpoint of the two pulled cavity frequencies, so
/// each pointer state sees detuning +/- delta/2 and
/// |alpha_1 - alpha_0|^2 = n_bar delta^2 / ((delta/2)^2 + (kappa/2)^2),
/// with SNR = eta kappa |alpha_1 - alpha_0|^2 / gamma_1. At kappa = 2 chi
/// (chi = chi'/2, zeta' = 0) this reproduces SNR = 4 eta n_bar chi / gamma_1.
pub fn snr_curve(
    coeffs: &DispersiveCoefficients,
    cfg: &SnrConfig,
    n_bar_grid: &[f64],
) -> Vec<SnrPoint> {
    let kappa = cfg.kappa_over_2chi * 2.0 * coeffs.chi_prime.abs();
    n_bar_grid
        .iter()
        .map(|&n_bar| {
            let delta = cavity_pull(coeffs, n_bar);
            let denom = (delta / 2.0).powi(2) + (kappa / 2.0).powi(2);
            let alpha_sep_sq = if denom == 0.0 { 0.0 } else { n_bar * delta * delta / denom };
            SnrPoint {
                n_bar,
                delta,
                alpha_sep_sq,
                snr: cfg.eta * kappa * alpha_sep_sq / cfg.gamma_1,
            }
        })
        .collect()
}

/// Charge-noise spectrum, as the ratio S(detuning)/S(1 Hz).
pub trait NoiseSpectrum: Sync {
    fn spectral_ratio(&self, detuning_mhz: f64) -> Result<f64>;
}

/// 1/f spectrum: S(Delta)/S(1 Hz) = 1 Hz / |Delta|, e.g. 1e-9 at 1 GHz.
#[derive(Debug, Clone, Copy, Default)]
pub struct OneOverFNoise;

impl NoiseSpectrum for OneOverFNoise {
    fn spectral_ratio(&self, detuning_mhz: f64) -> Result<f64> {
        if detuning_mhz == 0.0 {
            return Err(Error::ZeroDetuningSpectrum);
        }
        Ok(1.0 / (detuning_mhz.abs() * 1e6))
    }
}

fn dressed_pair(spec: &SystemSpec, n: u64) -> Result<(DressedBlock, DressedBlock)> {
    let to = diagonalize(&build_block(spec, n as f64)?)?;
    let from = diagonalize(&build_block(spec, (n + 1) as f64)?)?;
    Ok((to, from))
}

fn require_qubit(spec: &SystemSpec) -> Result<()> {
    if spec.num_levels() < 2 {
        return Err(Error::InvalidLevel { level: 1, num_levels: spec.num_levels() });
    }
    Ok(())
}

/// Split |<final| op |bar(n,1)>|^2 into the label-0 term and the leakage sum
/// over final labels >= 2, given the image vector op|bar(n,1)> over the bare
/// basis of the final block.
fn main_and_leak(to: &DressedBlock, image: &[f64]) -> (f64, f64) {
    let dim = to.block.dim;
    let mut main = 0.0;
    let mut leak = 0.0;
    for label in 0..dim {
        if label == 1 {
            continue;
        }
        let v = to.labeled_vector(label);
        let amp: f64 = v.iter().zip(image).map(|(a, b)| a * b).sum();
        if label == 0 {
            main = amp * amp;
        } else {
            leak += amp * amp;
        }
    }
    (main, leak)
}

/// Purcell decay and leakage through photon loss:
/// gamma_kappa/kappa = |<bar(n,0)| a |bar(n,1)>|^2 and the corresponding sum
/// over final labels outside {0, 1}. At n -> 0 this tends to lambda_0^2.
pub fn purcell_rates(spec: &SystemSpec, n: u64) -> Result<(f64, f64)> {
    require_qubit(spec)?;
    let (to, from) = dressed_pair(spec, n)?;
    let a = lowering_elements(n + 1, spec.num_levels());
    let psi1 = from.labeled_vector(1);
    let image: Vec<f64> = (0..to.block.dim)
        .map(|j| a[j].iter().zip(&psi1).map(|(m, p)| m * p).sum())
        .collect();
    Ok(main_and_leak(&to, &image))
}

/// Dressed bare-decay rates: gamma_1d/gamma_1 = |<bar(n,0)| Sigma_- |bar(n,1)>|^2
/// plus the leakage sum, where Sigma_- lowers the MLS level at fixed photon
/// number and therefore also connects adjacent excitation blocks.
pub fn dressed_decay_rates(spec: &SystemSpec, n: u64) -> Result<(f64, f64)> {
    require_qubit(spec)?;
    let (to, from) = dressed_pair(spec, n)?;
    let g = &spec.mls.couplings;
    let psi1 = from.labeled_vector(1);
    let dim_from = from.block.dim;
    let image: Vec<f64> = (0..to.block.dim)
        .map(|j| {
            if j + 1 < dim_from {
                g[j] / g[0] * psi1[j + 1]
            } else {
                0.0
            }
        })
        .collect();
    Ok(main_and_leak(&to, &image))
}

/// Dressed dephasing rates from low-frequency noise up-converted by the
/// qubit-resonator dressing:
/// gamma_d/gamma_phi = |<bar(n+1,0)| Sigma_z |bar(n,1)>|^2 S(Dbar_10)/S(1 Hz),
/// with the leakage sum over final labels outside {0, 1}. Both sides live in
/// the block with N = n+1; Dbar_1i is the dressed gap between the connected
/// states. `charge_dispersions` lists eps_i (any common normalization).
pub fn dressed_dephasing_rates(
    spec: &SystemSpec,
    n: u64,
    charge_dispersions: &[f64],
    noise: &dyn NoiseSpectrum,
) -> Result<(f64, f64)> {
    require_qubit(spec)?;
    let block = diagonalize(&build_block(spec, (n + 1) as f64)?)?;
    let dim = block.block.dim;
    let sz = sigma_z_elements(spec.num_levels(), charge_dispersions)?;
    let psi1 = block.labeled_vector(1);
    let e1 = block.shifted_energy(1);
    let mut main = 0.0;
    let mut leak = 0.0;
    for label in 0..dim {
        if label == 1 {
            continue;
        }
        let v = block.labeled_vector(label);
        let amp: f64 = v
            .iter()
            .zip(&psi1)
            .zip(&sz)
            .map(|((a, b), s)| a * b * s)
            .sum();
        let gap = e1 - block.shifted_energy(label);
        let term = amp * amp * noise.spectral_ratio(gap)?;
        if label == 0 {
            main = term;
        } else {
            leak += term;
        }
    }
    Ok((main, leak))
}

/// One row of the rates-vs-power table; all rates are ratios.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateRow {
    pub power_db: f64,
    /// Steady-state photon number of state 1 from the up sweep.
    pub n_bar: f64,
    /// Photon number rounded to the integer block where the matrix elements
    /// are evaluated.
    pub n: u64,
    pub gamma_kappa: f64,
    pub gamma_kappa_leak: f64,
    pub gamma_1d: f64,
    pub gamma_1d_leak: f64,
    pub gamma_d: f64,
    pub gamma_d_leak: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateTable {
    pub omega_m: f64,
    pub rows: Vec<RateRow>,
    /// The state-1 up sweep used to map power to photon number.
    pub sweep: ResponseCurve,
}

/// Map each power to n = round(n_1) with a hysteresis up sweep of state 1,
/// then evaluate the three rate pairs at that block. Rates vary slowly on the
/// scale of one photon, so rounding to the nearest integer block is adequate.
pub fn rates_vs_power(
    spec: &SystemSpec,
    omega_m: f64,
    powers_db: &[f64],
    charge_dispersions: &[f64],
    noise: &dyn NoiseSpectrum,
    opts: &SolverOptions,
) -> Result<RateTable> {
    require_qubit(spec)?;
    let sweep = power_sweep(spec, 1, omega_m, powers_db, SweepDirection::Up, opts)?;
    let rows: Result<Vec<RateRow>> = sweep
        .points
        .par_iter()
        .zip(powers_db.par_iter())
        .map(|(point, &db)| {
            let n = point.n_photons.round() as u64;
            let (gk, gkl) = purcell_rates(spec, n)?;
            let (g1, g1l) = dressed_decay_rates(spec, n)?;
            let (gd, gdl) = dressed_dephasing_rates(spec, n, charge_dispersions, noise)?;
            Ok(RateRow {
                power_db: db,
                n_bar: point.n_photons,
                n,
                gamma_kappa: gk,
                gamma_kappa_leak: gkl,
                gamma_1d: g1,
                gamma_1d_leak: g1l,
                gamma_d: gd,
                gamma_d_leak: gdl,
                converged: point.converged,
            })
        })
        .collect();
    Ok(RateTable {
        omega_m,
        rows: rows?,
        sweep,
    })
}
