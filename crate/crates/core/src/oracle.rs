//! Independent brute-force references used to certify the main computation
//! paths: the closed-form two-level doublet spectrum, a dense product-basis
//! Hamiltonian for verifying the block structure, and a sign-change scan that
//! counts fixed points of the steady-state equation without iterating it.

use crate::error::Result;
use crate::model::SystemSpec;
use crate::response::DriveSpec;

/// Closed-form eigenvalues of the two-level excitation block with N total
/// excitations, relative to the N*omega_r offset, ordered by bare label:
/// returns (E_label0, E_label1).
///
/// The block is [[0, g*sqrt(N)], [g*sqrt(N), delta0]] in shifted units; the
/// label-0 branch is the one adiabatically connected to |N, 0>.
pub fn jc_shifted_doublet(delta0: f64, g0: f64, n_total: f64) -> (f64, f64) {
    if n_total == 0.0 {
        return (0.0, f64::NAN); // block is 1x1; only label 0 exists
    }
    let r = (delta0 * delta0 / 4.0 + g0 * g0 * n_total).sqrt();
    let center = delta0 / 2.0;
    if delta0 >= 0.0 {
        (center - r, center + r)
    } else {
        (center + r, center - r)
    }
}

/// Closed-form dressed energy E(n, i) for a two-level system, absolute MHz.
pub fn jc_dressed_energy(delta0: f64, g0: f64, omega_r: f64, n: f64, i: usize) -> f64 {
    let n_tot = n + i as f64;
    let (e0, e1) = jc_shifted_doublet(delta0, g0, n_tot);
    let shifted = if i == 0 { e0 } else { e1 };
    n_tot * omega_r + shifted
}

/// Dense coupled Hamiltonian in the product basis |p, i> with photon numbers
/// p = 0..=cutoff, row-major (cutoff+1)*M square matrix. Basis index p*M + i.
pub fn full_hamiltonian(spec: &SystemSpec, cutoff: usize) -> Vec<f64> {
    let m = spec.num_levels();
    let dim = (cutoff + 1) * m;
    let mut h = vec![0.0; dim * dim];
    for p in 0..=cutoff {
        for i in 0..m {
            let row = p * m + i;
            h[row * dim + row] = p as f64 * spec.omega_r + spec.mls.level_freqs[i];
            // g_i (a^dag |i><i+1| + a |i+1><i|)
            if i + 1 < m && p < cutoff {
                let col = (p + 1) * m + i; // <p+1, i| H |p, i+1> after transpose
                let val = spec.mls.couplings[i] * ((p + 1) as f64).sqrt();
                let row2 = p * m + (i + 1);
                h[col * dim + row2] = val;
                h[row2 * dim + col] = val;
            }
        }
    }
    h
}

/// Largest |matrix element| of `h` between states of different total
/// excitation number p + i. Zero certifies the block structure.
pub fn max_cross_block_element(h: &[f64], num_levels: usize, cutoff: usize) -> f64 {
    let m = num_levels;
    let dim = (cutoff + 1) * m;
    let mut worst = 0.0f64;
    for a in 0..dim {
        let (pa, ia) = (a / m, a % m);
        for b in 0..dim {
            let (pb, ib) = (b / m, b % m);
            if pa + ia != pb + ib {
                worst = worst.max(h[a * dim + b].abs());
            }
        }
    }
    worst
}

/// Extract the block with total excitation `n_total` from the dense
/// Hamiltonian, over bare states |n_total - i, i> in label order.
pub fn extract_block(h: &[f64], num_levels: usize, cutoff: usize, n_total: usize) -> Vec<Vec<f64>> {
    let m = num_levels;
    let dim = (cutoff + 1) * m;
    let states: Vec<usize> = (0..m)
        .filter(|&i| n_total >= i && n_total - i <= cutoff)
        .map(|i| (n_total - i) * m + i)
        .collect();
    states
        .iter()
        .map(|&a| states.iter().map(|&b| h[a * dim + b]).collect())
        .collect()
}

/// Largest |deviation| between a block extracted from the dense Hamiltonian
/// and the tridiagonal constructor's entries.
#[allow(clippy::needless_range_loop)]
pub fn block_matrix_deviation(sub: &[Vec<f64>], block: &crate::eigenblocks::ExcitationBlock) -> f64 {
    let mut worst = (sub.len() as isize - block.dim as isize).abs() as f64;
    for r in 0..block.dim.min(sub.len()) {
        for c in 0..block.dim.min(sub.len()) {
            let expect = if r == c {
                block.diagonal[r]
            } else if c == r + 1 {
                block.offdiag[r]
            } else if r == c + 1 {
                block.offdiag[c]
            } else {
                0.0
            };
            worst = worst.max((sub[r][c] - expect).abs());
        }
    }
    worst
}

/// All fixed points of n = eps^2 / ((omega_ri(n) - omega_m)^2 + (kappa/2)^2),
/// found by scanning the sign of the defect over a log-spaced grid and
/// bisecting each bracket. Independent of the damped-iteration solver.
pub fn scan_fixed_points(
    spec: &SystemSpec,
    level: usize,
    drive: &DriveSpec,
    grid_points: usize,
) -> Result<Vec<f64>> {
    let half_kappa = spec.kappa / 2.0;
    let ceiling = (drive.epsilon / half_kappa).powi(2);
    if drive.epsilon == 0.0 {
        return Ok(vec![0.0]);
    }
    let defect = |n: f64| -> Result<f64> {
        let w = crate::eigenblocks::effective_frequency(spec, level, n)?;
        let d = w - drive.omega_m;
        Ok(n - drive.epsilon * drive.epsilon / (d * d + half_kappa * half_kappa))
    };

    let n_lo: f64 = 1e-9;
    let n_hi = (4.0 * ceiling).max(10.0);
    let log_lo = n_lo.ln();
    let log_hi = n_hi.ln();
    let mut grid = Vec::with_capacity(grid_points + 1);
    grid.push(0.0);
    for k in 0..grid_points {
        let t = k as f64 / (grid_points - 1) as f64;
        grid.push((log_lo + t * (log_hi - log_lo)).exp());
    }

    let mut roots = Vec::new();
    let mut prev = defect(grid[0])?;
    for w in grid.windows(2) {
        let cur = defect(w[1])?;
        if prev == 0.0 {
            roots.push(w[0]);
        } else if (prev < 0.0) != (cur < 0.0) {
            let (mut a, mut b) = (w[0], w[1]);
            let negative_left = prev < 0.0;
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                let rm = defect(mid)?;
                if (rm < 0.0) == negative_left {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev = cur;
    }
    if prev == 0.0 {
        roots.push(*grid.last().unwrap());
    }
    Ok(roots)
}
