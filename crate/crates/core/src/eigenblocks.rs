//! Excitation-number blocks of the coupled Hamiltonian: construction,
//! diagonalization, dressed-state labeling, and effective resonator
//! frequencies.
//!
//! The coupled Hamiltonian conserves the total excitation number, so it is
//! block tridiagonal: the block with N total excitations is spanned by the
//! bare states |N-i, i> (photons, MLS level) for i = 0..dim-1 with
//! dim = min(M, N+1). Blocks are diagonalized exactly; energies are kept both
//! as absolute values and relative to the N*omega_r offset so that energy
//! differences between adjacent blocks stay accurate at N ~ 1e6 and beyond.

use crate::error::{Error, Result};
use crate::linalg::tridiag_eigen;
use crate::model::SystemSpec;

/// One excitation-number block of the system Hamiltonian, as a symmetric
/// tridiagonal matrix over the bare states |N-i, i>.
#[derive(Debug, Clone)]
pub struct ExcitationBlock {
    /// Total excitation number N (integer, or real >= M-1 for the analytic
    /// continuation used at large photon number).
    pub n_total: f64,
    pub dim: usize,
    /// Absolute diagonal entries (N-i)*omega_r + omega_i.
    pub diagonal: Vec<f64>,
    /// Off-diagonal couplings g_i * sqrt(N-i).
    pub offdiag: Vec<f64>,
    /// Diagonal with the common N*omega_r offset removed: omega_i - i*omega_r.
    pub shifted_diagonal: Vec<f64>,
    /// The removed offset N*omega_r.
    pub energy_shift: f64,
}

/// A diagonalized block with bare-state labels attached to the eigenpairs.
#[derive(Debug, Clone)]
pub struct DressedBlock {
    pub block: ExcitationBlock,
    /// Eigenvalues in ascending order, relative to `block.energy_shift`.
    pub shifted_energies: Vec<f64>,
    /// Row-major dim x dim matrix; column k is the unit eigenvector of
    /// `shifted_energies[k]` over the bare basis.
    pub vectors: Vec<f64>,
    /// Bare label i -> eigenpair index (a bijection on 0..dim-1).
    pub label_of: Vec<usize>,
}

impl DressedBlock {
    /// Absolute dressed energy of the eigenpair labeled `i`.
    pub fn energy(&self, i: usize) -> f64 {
        self.block.energy_shift + self.shifted_energies[self.label_of[i]]
    }

    /// Dressed energy labeled `i`, relative to the block's N*omega_r offset.
    pub fn shifted_energy(&self, i: usize) -> f64 {
        self.shifted_energies[self.label_of[i]]
    }

    /// Absolute energies listed by label.
    pub fn energies(&self) -> Vec<f64> {
        (0..self.block.dim).map(|i| self.energy(i)).collect()
    }

    /// Eigenvector labeled `i`, components over the bare basis.
    pub fn labeled_vector(&self, i: usize) -> Vec<f64> {
        let dim = self.block.dim;
        let col = self.label_of[i];
        (0..dim).map(|r| self.vectors[r * dim + col]).collect()
    }

    /// Squared overlap |<bare j | labeled i>|^2.
    pub fn overlap(&self, i: usize, bare: usize) -> f64 {
        let dim = self.block.dim;
        let v = self.vectors[bare * dim + self.label_of[i]];
        v * v
    }
}

/// Build the excitation block for total excitation `n_total`.
///
/// Integer `n_total` gives the truncated block of dimension min(M, N+1). A
/// non-integer `n_total` is accepted only at or above M-1, where all M basis
/// states carry nonnegative photon number and the entries g_i*sqrt(N-i)
/// continue smoothly in N.
pub fn build_block(spec: &SystemSpec, n_total: f64) -> Result<ExcitationBlock> {
    if !n_total.is_finite() || n_total < 0.0 {
        return Err(Error::InvalidSpec(format!(
            "n_total must be finite and >= 0, got {n_total}"
        )));
    }
    let m = spec.num_levels();
    let integer = n_total.fract() == 0.0;
    if !integer && n_total < (m - 1) as f64 {
        return Err(Error::NonIntegerBlock {
            n_total,
            threshold: (m - 1) as f64,
        });
    }
    let dim = if integer {
        (m as u64).min(n_total as u64 + 1) as usize
    } else {
        m
    };
    let shifted_diagonal: Vec<f64> = (0..dim)
        .map(|i| spec.mls.level_freqs[i] - i as f64 * spec.omega_r)
        .collect();
    let energy_shift = n_total * spec.omega_r;
    let diagonal = shifted_diagonal.iter().map(|&s| s + energy_shift).collect();
    let offdiag = (0..dim.saturating_sub(1))
        .map(|i| spec.mls.couplings[i] * (n_total - i as f64).sqrt())
        .collect();
    Ok(ExcitationBlock {
        n_total,
        dim,
        diagonal,
        offdiag,
        shifted_diagonal,
        energy_shift,
    })
}

/// Diagonalize a block and attach bare-state labels.
///
/// Labels follow the adiabatic branches: eigenvalues are sorted ascending and
/// matched to bare states by the rank of the bare energies, which is
/// independent of N. In the dispersive regime this coincides with assigning
/// each bare state the eigenvector of maximal overlap; at strong mixing it
/// keeps every labeled energy a smooth function of N, whereas the raw
/// maximal-overlap assignment hops between branches at avoided crossings.
pub fn diagonalize(block: &ExcitationBlock) -> Result<DressedBlock> {
    let dim = block.dim;
    let mut d = block.shifted_diagonal.clone();
    let mut e = block.offdiag.clone();
    e.push(0.0);
    let mut z = vec![0.0; dim * dim];
    for i in 0..dim {
        z[i * dim + i] = 1.0;
    }
    tridiag_eigen(&mut d, &mut e, &mut z)?;

    // label i <- rank of the bare diagonal entry i (stable in i)
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        block.shifted_diagonal[a]
            .partial_cmp(&block.shifted_diagonal[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut label_of = vec![0; dim];
    for (rank, &bare) in order.iter().enumerate() {
        label_of[bare] = rank;
    }

    Ok(DressedBlock {
        block: block.clone(),
        shifted_energies: d,
        vectors: z,
        label_of,
    })
}

fn validate_level(spec: &SystemSpec, i: usize) -> Result<()> {
    if i >= spec.num_levels() {
        return Err(Error::InvalidLevel {
            level: i,
            num_levels: spec.num_levels(),
        });
    }
    Ok(())
}

/// Dressed energy, relative to the (n+i)*omega_r offset, evaluated directly
/// on the block with N = n + i. Callers must ensure the block is valid.
fn shifted_dressed_energy(spec: &SystemSpec, n_tot: f64, i: usize) -> Result<f64> {
    let dressed = diagonalize(&build_block(spec, n_tot)?)?;
    Ok(dressed.shifted_energy(i))
}

/// Dressed energy E(n, i): the eigenvalue labeled `i` in the block with
/// N = n + i total excitations, in absolute MHz.
///
/// Real-valued n is evaluated by analytic continuation of the block entries
/// when N >= M-1; below that only integer blocks exist and non-integer n is
/// served by linear interpolation between the adjacent integers.
pub fn dressed_energy(spec: &SystemSpec, n: f64, i: usize) -> Result<f64> {
    validate_level(spec, i)?;
    if !n.is_finite() || n < 0.0 {
        return Err(Error::InvalidSpec(format!("n must be finite and >= 0, got {n}")));
    }
    let n_tot = n + i as f64;
    if n.fract() == 0.0 || n_tot >= (spec.num_levels() - 1) as f64 {
        Ok(shifted_dressed_energy(spec, n_tot, i)? + n_tot * spec.omega_r)
    } else {
        let lo = n.floor();
        let frac = n - lo;
        let e_lo = dressed_energy(spec, lo, i)?;
        let e_hi = dressed_energy(spec, lo + 1.0, i)?;
        Ok((1.0 - frac) * e_lo + frac * e_hi)
    }
}

/// Effective resonator frequency omega_ri(n) = E(n+1, i) - E(n, i).
///
/// Computed from energies relative to the N*omega_r offsets, so the result
/// stays accurate when the absolute energies are ~1e9 MHz.
pub fn effective_frequency(spec: &SystemSpec, i: usize, n: f64) -> Result<f64> {
    validate_level(spec, i)?;
    if !n.is_finite() || n < 0.0 {
        return Err(Error::InvalidSpec(format!("n must be finite and >= 0, got {n}")));
    }
    let n_tot = n + i as f64;
    if n.fract() == 0.0 || n_tot >= (spec.num_levels() - 1) as f64 {
        let lo = shifted_dressed_energy(spec, n_tot, i)?;
        let hi = shifted_dressed_energy(spec, n_tot + 1.0, i)?;
        Ok(spec.omega_r + hi - lo)
    } else {
        let lo = n.floor();
        let frac = n - lo;
        let w_lo = effective_frequency(spec, i, lo)?;
        let w_hi = effective_frequency(spec, i, lo + 1.0)?;
        Ok((1.0 - frac) * w_lo + frac * w_hi)
    }
}
