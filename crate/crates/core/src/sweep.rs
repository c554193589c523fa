//! Subcommand implementations: grid orchestration over the physics modules,
//! producing flat tables for serialization.

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::dispersive::{analytic_coefficients, chi_zeta_numeric, critical_photon_number};
use crate::error::Result;
use crate::metrics::{
    dressed_decay_rates, dressed_dephasing_rates, gamma1_from_t1_us, purcell_rates, rates_vs_power,
    snr_curve, OneOverFNoise, SnrConfig,
};
use crate::model::default_charge_dispersions;
use crate::oracle::{
    extract_block, full_hamiltonian, jc_shifted_doublet, max_cross_block_element, scan_fixed_points,
};
use crate::output::Table;
use crate::response::{
    db_to_epsilon, frequency_power_map, power_sweep, DriveSpec, SweepDirection,
};
use crate::{eigenblocks, model::SystemSpec};

pub struct CmdOutput {
    pub tables: Vec<Table>,
    /// False when any solver point in the run failed to converge.
    pub all_converged: bool,
}

fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![min];
    }
    (0..points)
        .map(|k| min + (max - min) * k as f64 / (points - 1) as f64)
        .collect()
}

fn power_grid(min_db: f64, max_db: f64, step_db: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let p = min_db + step_db * k as f64;
        if p > max_db + 1e-9 {
            break;
        }
        out.push(p);
        k += 1;
    }
    out
}

fn sign_product(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a.signum() * b.signum()
    }
}

/// Sweep chi', zeta' (analytic and numeric) over resonator frequency.
pub fn cmd_coeffs(cfg: &RunConfig) -> Result<CmdOutput> {
    let grid = linspace(
        cfg.coeffs.omega_r_min,
        cfg.coeffs.omega_r_max,
        cfg.coeffs.omega_r_points,
    );
    let rows: Result<Vec<Vec<f64>>> = grid
        .par_iter()
        .map(|&omega_r| {
            let mls = cfg.system.build_mls(cfg.system.num_levels)?;
            let spec = SystemSpec::new(mls, omega_r, cfg.system.kappa)?;
            let (chi_a, zeta_a, n_crit, masked) = match analytic_coefficients(&spec) {
                Ok(c) => (c.chi_prime, c.zeta_prime, c.n_crit, 0.0),
                Err(_) => (f64::NAN, f64::NAN, f64::NAN, 1.0),
            };
            let (chi_n, zeta_n, rms, ill) = match chi_zeta_numeric(&spec, cfg.coeffs.fit_n_max) {
                Ok(n) => (
                    n.chi_prime,
                    n.zeta_prime,
                    n.fit_residual_rms,
                    if n.ill_conditioned { 1.0 } else { 0.0 },
                ),
                Err(_) => (f64::NAN, f64::NAN, f64::NAN, 1.0),
            };
            Ok(vec![
                omega_r,
                chi_a,
                zeta_a,
                n_crit,
                chi_n,
                zeta_n,
                rms,
                ill,
                sign_product(chi_a, zeta_a),
                masked,
            ])
        })
        .collect();

    let mut table = Table::new(
        "coeffs",
        &[
            "omega_r",
            "chi_prime_analytic",
            "zeta_prime_analytic",
            "n_crit",
            "chi_prime_numeric",
            "zeta_prime_numeric",
            "fit_residual_rms",
            "ill_conditioned",
            "sign_product_analytic",
            "masked_analytic",
        ],
    );
    table.rows = rows?;
    Ok(CmdOutput {
        tables: vec![table],
        all_converged: true,
    })
}

/// Cavity pull and SNR for the same-sign, constant (zeta' = 0) and
/// opposite-sign scenarios, for each configured kappa/2chi' ratio.
pub fn cmd_snr(cfg: &RunConfig) -> Result<CmdOutput> {
    let build = |omega_r: f64| -> Result<_> {
        let mls = cfg.system.build_mls(cfg.system.num_levels)?;
        let spec = SystemSpec::new(mls, omega_r, cfg.system.kappa)?;
        analytic_coefficients(&spec)
    };
    let same = build(cfg.snr.omega_r_same)?;
    let opposite = build(cfg.snr.omega_r_opposite)?;
    let mut constant = same.clone();
    constant.zeta_prime = 0.0;
    let scenarios = [("same", &same), ("constant", &constant), ("opposite", &opposite)];

    let gamma_1 = gamma1_from_t1_us(cfg.snr.t1_us);
    let n_bar_max = cfg.snr.nbar_max_frac * same.n_crit;
    let n_bars = linspace(0.0, n_bar_max, cfg.snr.nbar_points);

    let mut columns: Vec<String> = vec!["n_bar".into()];
    for (tag, _) in &scenarios {
        columns.push(format!("delta_{tag}"));
    }
    for &ratio in &cfg.snr.kappa_ratios {
        for (tag, _) in &scenarios {
            columns.push(format!("snr_{tag}_{ratio}"));
        }
    }

    let mut curves = Vec::new();
    for &ratio in &cfg.snr.kappa_ratios {
        let snr_cfg = SnrConfig::new(cfg.snr.eta, gamma_1, ratio)?;
        for (_, coeffs) in &scenarios {
            curves.push(snr_curve(coeffs, &snr_cfg, &n_bars));
        }
    }

    let mut table = Table::new("snr", &columns.iter().map(|c| c.as_str()).collect::<Vec<_>>());
    for (row_idx, &n_bar) in n_bars.iter().enumerate() {
        let mut row = vec![n_bar];
        for (_, coeffs) in &scenarios {
            row.push(crate::metrics::cavity_pull(coeffs, n_bar));
        }
        for curve in &curves {
            row.push(curve[row_idx].snr);
        }
        table.push(row);
    }
    Ok(CmdOutput {
        tables: vec![table],
        all_converged: true,
    })
}

/// Hysteresis power sweeps (up and down) per level count and MLS state.
pub fn cmd_response(cfg: &RunConfig) -> Result<CmdOutput> {
    let powers = power_grid(
        cfg.response.power_min_db,
        cfg.response.power_max_db,
        cfg.response.power_step_db,
    );
    let opts = cfg.solver.options();
    let level_counts: Vec<usize> = if cfg.system.level_freqs.is_some() {
        vec![cfg.system.build_mls(cfg.system.num_levels)?.num_levels()]
    } else {
        cfg.response.num_levels_list.clone()
    };

    let mut tables = Vec::new();
    let mut all_converged = true;
    for &m in &level_counts {
        let spec = cfg.system.with_levels(m)?;
        let levels: Vec<usize> = cfg.response.levels.iter().copied().filter(|&i| i < m).collect();
        let sweeps: Result<Vec<_>> = levels
            .par_iter()
            .map(|&i| {
                let up = power_sweep(&spec, i, cfg.response.omega_m, &powers, SweepDirection::Up, &opts)?;
                let down =
                    power_sweep(&spec, i, cfg.response.omega_m, &powers, SweepDirection::Down, &opts)?;
                Ok((up, down))
            })
            .collect();
        let sweeps = sweeps?;

        let mut columns: Vec<String> = vec!["power_db".into()];
        for &i in &levels {
            for c in [
                format!("n_up_i{i}"),
                format!("omega_ri_up_i{i}"),
                format!("converged_up_i{i}"),
                format!("n_down_i{i}"),
                format!("omega_ri_down_i{i}"),
                format!("converged_down_i{i}"),
            ] {
                columns.push(c);
            }
        }
        let mut table = Table::new(
            format!("response_m{m}"),
            &columns.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
        );
        for (k, &p) in powers.iter().enumerate() {
            let mut row = vec![p];
            for (up, down) in &sweeps {
                for point in [&up.points[k], &down.points[k]] {
                    row.push(point.n_photons);
                    row.push(point.omega_ri_at_n);
                    row.push(if point.converged { 1.0 } else { 0.0 });
                    all_converged &= point.converged;
                }
            }
            table.push(row);
        }
        tables.push(table);
    }
    Ok(CmdOutput { tables, all_converged })
}

/// 2D photon-number maps over measurement frequency and power, with the
/// effective-frequency ridge and the power band of maximal state separation.
pub fn cmd_map(cfg: &RunConfig) -> Result<CmdOutput> {
    let omegas = linspace(cfg.map.omega_m_min, cfg.map.omega_m_max, cfg.map.omega_m_points);
    let powers = power_grid(cfg.map.power_min_db, cfg.map.power_max_db, cfg.map.power_step_db);
    let opts = cfg.solver.options();
    let spec = cfg.system.build_system()?;

    let mut tables = Vec::new();
    let mut all_converged = true;
    let mut grids = Vec::new();
    for &level in &cfg.map.levels {
        let map = frequency_power_map(&spec, level, &omegas, &powers, &opts)?;
        let mut table = Table::new(
            format!("map_i{level}"),
            &["power_db", "omega_m", "n", "omega_ri_at_n", "converged"],
        );
        for (pi, &p) in powers.iter().enumerate() {
            for (wi, &w) in omegas.iter().enumerate() {
                let cell = &map.cells[pi][wi];
                all_converged &= cell.converged;
                table.push(vec![
                    p,
                    w,
                    cell.n_photons,
                    cell.omega_ri_at_n,
                    if cell.converged { 1.0 } else { 0.0 },
                ]);
            }
        }
        tables.push(table);

        let mut ridge = Table::new(
            format!("map_ridge_i{level}"),
            &["power_db", "n", "omega_ri_at_n", "converged"],
        );
        for (k, &p) in powers.iter().enumerate() {
            let point = &map.ridge.points[k];
            all_converged &= point.converged;
            ridge.push(vec![
                p,
                point.n_photons,
                point.omega_ri_at_n,
                if point.converged { 1.0 } else { 0.0 },
            ]);
        }
        tables.push(ridge);
        grids.push((level, map));
    }

    // state-separation band, when both logical states were mapped: the
    // absolute difference keeps growing with power, so the peak flag follows
    // the photon-number ratio, which is what separates the S curves
    let g0 = grids.iter().find(|(l, _)| *l == 0);
    let g1 = grids.iter().find(|(l, _)| *l == 1);
    if let (Some((_, m0)), Some((_, m1))) = (g0, g1) {
        let mut table = Table::new(
            "map_separation",
            &["power_db", "max_n_diff", "max_n_ratio", "omega_m_at_max_ratio", "is_peak"],
        );
        let rows: Vec<(f64, f64, f64)> = powers
            .iter()
            .enumerate()
            .map(|(pi, _)| {
                let mut diff = 0.0f64;
                let mut ratio = 0.0f64;
                let mut at = omegas[0];
                for (wi, &omega) in omegas.iter().enumerate() {
                    let (a, b) = (m0.cells[pi][wi].n_photons, m1.cells[pi][wi].n_photons);
                    diff = diff.max((b - a).abs());
                    let r = a.max(b).max(1e-12) / a.min(b).max(1e-12);
                    if r > ratio {
                        ratio = r;
                        at = omega;
                    }
                }
                (diff, ratio, at)
            })
            .collect();
        let peak = rows
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        for (pi, &p) in powers.iter().enumerate() {
            let (diff, ratio, at) = rows[pi];
            table.push(vec![p, diff, ratio, at, if pi == peak { 1.0 } else { 0.0 }]);
        }
        tables.push(table);
    }
    Ok(CmdOutput { tables, all_converged })
}

/// QND-degradation rates along the state-1 up sweep.
pub fn cmd_rates(cfg: &RunConfig) -> Result<CmdOutput> {
    let spec = cfg.system.build_system()?;
    let powers = power_grid(
        cfg.rates.power_min_db,
        cfg.rates.power_max_db,
        cfg.rates.power_step_db,
    );
    let dispersions = cfg
        .rates
        .dispersions
        .clone()
        .unwrap_or_else(|| default_charge_dispersions(spec.num_levels()));
    let table_rates = rates_vs_power(
        &spec,
        cfg.rates.omega_m,
        &powers,
        &dispersions,
        &OneOverFNoise,
        &cfg.solver.options(),
    )?;

    let mut table = Table::new(
        "rates",
        &[
            "power_db",
            "n_bar",
            "n",
            "gamma_kappa",
            "gamma_kappa_leak",
            "gamma_1d",
            "gamma_1d_leak",
            "gamma_d",
            "gamma_d_leak",
            "converged",
        ],
    );
    let mut all_converged = true;
    for row in &table_rates.rows {
        all_converged &= row.converged;
        table.push(vec![
            row.power_db,
            row.n_bar,
            row.n as f64,
            row.gamma_kappa,
            row.gamma_kappa_leak,
            row.gamma_1d,
            row.gamma_1d_leak,
            row.gamma_d,
            row.gamma_d_leak,
            if row.converged { 1.0 } else { 0.0 },
        ]);
    }
    Ok(CmdOutput {
        tables: vec![table],
        all_converged,
    })
}

/// Brute-force reference outputs: closed-form two-level spectrum vs the
/// eigensolver, dense-Hamiltonian block structure, and fixed-point
/// multiplicity inside/outside the bistable window.
pub fn cmd_oracle(cfg: &RunConfig) -> Result<CmdOutput> {
    let mut tables = Vec::new();

    // two-level spectrum against the closed form
    let tls = cfg.system.with_levels(2)?;
    let delta0 = tls.mls.transition(0) - tls.omega_r;
    let g0 = tls.mls.couplings[0];
    let mut jc = Table::new(
        "oracle_jc",
        &["n_total", "e0_exact", "e1_exact", "e0_closed", "e1_closed", "max_rel_dev"],
    );
    for &n in &cfg.oracle.jc_photon_numbers {
        let dressed = eigenblocks::diagonalize(&eigenblocks::build_block(&tls, n)?)?;
        let (c0, c1) = jc_shifted_doublet(delta0, g0, n);
        let e0 = dressed.shifted_energy(0);
        let (e1, rel1) = if dressed.block.dim > 1 {
            let e1 = dressed.shifted_energy(1);
            (e1, (e1 - c1).abs() / c1.abs().max(1.0))
        } else {
            (f64::NAN, 0.0)
        };
        let rel0 = (e0 - c0).abs() / c0.abs().max(1.0);
        jc.push(vec![n, e0, e1, c0, c1, rel0.max(rel1)]);
    }
    tables.push(jc);

    // dense product-basis Hamiltonian: cross-block couplings and block match
    let small = cfg.system.with_levels(cfg.oracle.block_check_levels)?;
    let cutoff = cfg.oracle.block_check_cutoff;
    let h = full_hamiltonian(&small, cutoff);
    let cross = max_cross_block_element(&h, small.num_levels(), cutoff);
    let mut block_dev = 0.0f64;
    for n_total in 0..=cutoff {
        let sub = extract_block(&h, small.num_levels(), cutoff, n_total);
        let block = eigenblocks::build_block(&small, n_total as f64)?;
        for r in 0..block.dim {
            for c in 0..block.dim {
                let expect = if r == c {
                    block.diagonal[r]
                } else if c == r + 1 {
                    block.offdiag[r]
                } else if r == c + 1 {
                    block.offdiag[c]
                } else {
                    0.0
                };
                block_dev = block_dev.max((sub[r][c] - expect).abs());
            }
        }
    }
    let mut structure = Table::new(
        "oracle_block_structure",
        &["max_cross_block_element", "max_block_matrix_dev"],
    );
    structure.push(vec![cross, block_dev]);
    tables.push(structure);

    // fixed-point multiplicity inside and outside the bistable window
    let spec = cfg.system.build_system()?;
    let mut mult = Table::new(
        "oracle_multiplicity",
        &["power_db", "is_inside", "fixed_point_count", "n_min_root", "n_max_root"],
    );
    let mut powers: Vec<(f64, f64)> = vec![(cfg.oracle.power_db, 1.0)];
    for &p in &cfg.oracle.powers_outside_db {
        powers.push((p, 0.0));
    }
    for (p, inside) in powers {
        let drive = DriveSpec::new(db_to_epsilon(p, spec.kappa), cfg.response.omega_m)?;
        let roots = scan_fixed_points(&spec, cfg.oracle.level, &drive, cfg.oracle.scan_points)?;
        let lo = roots.first().copied().unwrap_or(f64::NAN);
        let hi = roots.last().copied().unwrap_or(f64::NAN);
        mult.push(vec![p, inside, roots.len() as f64, lo, hi]);
    }
    tables.push(mult);

    Ok(CmdOutput {
        tables,
        all_converged: true,
    })
}

/// Single-point helpers shared by tests and the smoke checks: evaluate the
/// three rate pairs directly at an integer photon number.
pub fn rates_at(
    spec: &SystemSpec,
    n: u64,
    dispersions: &[f64],
) -> Result<[f64; 6]> {
    let (gk, gkl) = purcell_rates(spec, n)?;
    let (g1, g1l) = dressed_decay_rates(spec, n)?;
    let (gd, gdl) = dressed_dephasing_rates(spec, n, dispersions, &OneOverFNoise)?;
    Ok([gk, gkl, g1, g1l, gd, gdl])
}

/// n_crit of the configured system at a given resonator frequency.
pub fn n_crit_at(cfg: &RunConfig, omega_r: f64) -> Result<f64> {
    let mls = cfg.system.build_mls(cfg.system.num_levels)?;
    let spec = SystemSpec::new(mls, omega_r, cfg.system.kappa)?;
    critical_photon_number(&spec)
}
