//! Physical parameterization of the qubit-resonator system and the bare
//! operators used by the other modules.
//!
//! All frequencies and rates are ordinary frequencies nu = omega/2pi in MHz.
//! Every formula in the library is dimensionally homogeneous in frequency, so
//! no 2pi factors appear internally.

use serde::Serialize;

use crate::error::{Error, Result};

/// An M-level system: level frequencies and nearest-neighbor ladder couplings.
///
/// `level_freqs[i]` is omega_i in MHz with omega_0 = 0 by convention;
/// `couplings[i]` is the coupling g_i of the i <-> i+1 transition to the
/// resonator mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MlsSpec {
    pub level_freqs: Vec<f64>,
    pub couplings: Vec<f64>,
}

impl MlsSpec {
    /// Build a generic ladder from explicit level frequencies and couplings.
    pub fn new(level_freqs: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        if level_freqs.is_empty() {
            return Err(Error::InvalidSpec("at least one level required".into()));
        }
        if couplings.len() + 1 != level_freqs.len() {
            return Err(Error::InvalidSpec(format!(
                "{} levels require {} couplings, got {}",
                level_freqs.len(),
                level_freqs.len() - 1,
                couplings.len()
            )));
        }
        if level_freqs[0] != 0.0 {
            return Err(Error::InvalidSpec("omega_0 must be 0".into()));
        }
        if level_freqs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec(
                "level frequencies must be strictly increasing".into(),
            ));
        }
        if couplings.iter().any(|&g| g < 0.0 || !g.is_finite()) {
            return Err(Error::InvalidSpec("couplings must be finite and >= 0".into()));
        }
        Ok(Self { level_freqs, couplings })
    }

    /// Transmon-style ladder with constant anharmonicity:
    /// omega_i = i*omega_10 + alpha*i*(i-1)/2 with alpha = omega_21 - omega_10,
    /// and couplings g_i = g0*sqrt(i+1).
    pub fn transmon(omega_10: f64, omega_21: f64, g0: f64, num_levels: usize) -> Result<Self> {
        if num_levels < 2 {
            return Err(Error::InvalidSpec("transmon ladder needs M >= 2".into()));
        }
        if omega_10 <= 0.0 || omega_21 <= 0.0 || g0 <= 0.0 {
            return Err(Error::InvalidSpec(
                "omega_10, omega_21 and g0 must be positive".into(),
            ));
        }
        let alpha = omega_21 - omega_10;
        let level_freqs = (0..num_levels)
            .map(|i| {
                let i = i as f64;
                i * omega_10 + alpha * i * (i - 1.0) / 2.0
            })
            .collect();
        let couplings = (0..num_levels - 1)
            .map(|i| g0 * ((i + 1) as f64).sqrt())
            .collect();
        Self::new(level_freqs, couplings)
    }

    pub fn num_levels(&self) -> usize {
        self.level_freqs.len()
    }

    /// Transition frequency omega_{i+1} - omega_i.
    pub fn transition(&self, i: usize) -> f64 {
        self.level_freqs[i + 1] - self.level_freqs[i]
    }
}

/// MLS plus the resonator it couples to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemSpec {
    pub mls: MlsSpec,
    /// Bare resonator frequency (MHz).
    pub omega_r: f64,
    /// Resonator decay rate kappa (MHz).
    pub kappa: f64,
}

impl SystemSpec {
    pub fn new(mls: MlsSpec, omega_r: f64, kappa: f64) -> Result<Self> {
        if omega_r <= 0.0 {
            return Err(Error::InvalidSpec("omega_r must be positive".into()));
        }
        if kappa <= 0.0 {
            return Err(Error::InvalidSpec("kappa must be positive".into()));
        }
        Ok(Self { mls, omega_r, kappa })
    }

    pub fn num_levels(&self) -> usize {
        self.mls.num_levels()
    }
}

/// Ladder detunings Delta_i = (omega_{i+1} - omega_i) - omega_r and the
/// dimensionless small parameters lambda_i = -g_i/Delta_i.
#[derive(Debug, Clone, PartialEq)]
pub struct Detunings {
    pub delta: Vec<f64>,
    pub lambda: Vec<f64>,
}

/// Compute all ladder detunings. Errors when any transition is exactly
/// resonant (Delta_i = 0), where the dispersive quantities are undefined.
pub fn detunings(spec: &SystemSpec) -> Result<Detunings> {
    let m = spec.num_levels();
    let mut delta = Vec::with_capacity(m.saturating_sub(1));
    let mut lambda = Vec::with_capacity(m.saturating_sub(1));
    for i in 0..m.saturating_sub(1) {
        let d = spec.mls.transition(i) - spec.omega_r;
        if d == 0.0 {
            return Err(Error::Resonance { index: i });
        }
        delta.push(d);
        lambda.push(-spec.mls.couplings[i] / d);
    }
    Ok(Detunings { delta, lambda })
}

/// Matrix elements of the photon lowering operator `a` between the bare bases
/// of adjacent excitation blocks, `<bare j, block n_from-1 | a | bare i, block
/// n_from>`. The bare state i of block N is |N-i, i>, so the element is
/// sqrt(n_from - i) on the diagonal (j = i) and zero elsewhere.
///
/// Returned as a `dim_to x dim_from` row-major matrix, where the block
/// dimensions follow the truncation rule dim(N) = min(M, N+1).
pub fn lowering_elements(n_from: u64, num_levels: usize) -> Vec<Vec<f64>> {
    assert!(n_from >= 1, "lowering needs at least one excitation");
    let dim_from = block_dim(n_from, num_levels);
    let dim_to = block_dim(n_from - 1, num_levels);
    let mut out = vec![vec![0.0; dim_from]; dim_to];
    for (i, row) in out.iter_mut().take(dim_from.min(dim_to)).enumerate() {
        row[i] = ((n_from - i as u64) as f64).sqrt();
    }
    out
}

/// MLS lowering operator Sigma_- = sum_i (g_i/g_0) |i><i+1| in the bare basis.
pub fn sigma_minus_elements(num_levels: usize, couplings: &[f64]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; num_levels]; num_levels];
    if num_levels < 2 {
        return out;
    }
    let g0 = couplings[0];
    for i in 0..num_levels - 1 {
        out[i][i + 1] = couplings[i] / g0;
    }
    out
}

/// Diagonal dephasing operator Sigma_z = sum_i (eps_i/eps_1) |i><i| in the
/// bare basis, with eps_i the charge dispersion of level i.
pub fn sigma_z_elements(num_levels: usize, charge_dispersions: &[f64]) -> Result<Vec<f64>> {
    if charge_dispersions.len() < num_levels {
        return Err(Error::InvalidSpec(format!(
            "need {} charge dispersions, got {}",
            num_levels,
            charge_dispersions.len()
        )));
    }
    let eps1 = charge_dispersions[1];
    if eps1 == 0.0 {
        return Err(Error::InvalidSpec("eps_1 must be nonzero".into()));
    }
    Ok(charge_dispersions[..num_levels]
        .iter()
        .map(|&e| e / eps1)
        .collect())
}

/// Default charge-dispersion table, as ratios eps_i/eps_1:
/// eps_i/eps_1 = 10^(6(i-1)/5) for i >= 1 and eps_0/eps_1 = 0.1.
///
/// The growth rate is anchored so that eps_6/eps_1 = 1e6. The eps_0 entry is
/// a placeholder (the dispersion keeps shrinking below level 1) and can be
/// overridden through the config.
pub fn default_charge_dispersions(num_levels: usize) -> Vec<f64> {
    (0..num_levels)
        .map(|i| {
            if i == 0 {
                0.1
            } else {
                10f64.powf(6.0 * (i as f64 - 1.0) / 5.0)
            }
        })
        .collect()
}

/// Dimension of the excitation block with integer total excitation `n_total`:
/// min(M, n_total + 1).
pub fn block_dim(n_total: u64, num_levels: usize) -> usize {
    (num_levels as u64).min(n_total + 1) as usize
}
