//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with the measured values. Run with
//! `cargo test --test acceptance -- --nocapture` to see every line.

use readout_core::dispersive::{analytic_coefficients, critical_photon_number};
use readout_core::eigenblocks::{build_block, diagonalize, effective_frequency};
use readout_core::metrics::{
    dressed_decay_rates, gamma1_from_t1_us, purcell_rates, rates_vs_power,
    snr_curve, OneOverFNoise, SnrConfig,
};
use readout_core::model::{default_charge_dispersions, detunings, MlsSpec, SystemSpec};
use readout_core::oracle::{jc_shifted_doublet, scan_fixed_points};
use readout_core::response::{
    db_to_epsilon, fixed_point_defect, power_sweep, DriveSpec, ResponseCurve, SolverOptions,
    SweepDirection,
};

const W10: f64 = 6000.0;
const W21: f64 = 5750.0;
const G0: f64 = 100.0;

fn system(m: usize, omega_r: f64, kappa: f64) -> SystemSpec {
    let mls = MlsSpec::transmon(W10, W21, G0, m).unwrap();
    SystemSpec::new(mls, omega_r, kappa).unwrap()
}

struct Criterion {
    name: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        if ok {
            self.notes.push(detail);
        } else {
            self.failures.push(detail);
        }
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("{}: PASS ({})", self.name, self.notes.join("; "));
        } else {
            println!(
                "{}: FAIL ({}){}",
                self.name,
                self.failures.join("; "),
                if self.notes.is_empty() {
                    String::new()
                } else {
                    format!(" [passing parts: {}]", self.notes.join("; "))
                }
            );
            panic!("{}: {}", self.name, self.failures.join("; "));
        }
    }
}

#[test]
fn criterion_01_tls_coefficient_identities() {
    let mut c = Criterion::new("criterion 1 (TLS coefficient identities)");
    let spec = system(2, 7000.0, 0.05);
    let coeffs = analytic_coefficients(&spec).unwrap();
    let chi0 = coeffs.chi[0];
    let l0sq = coeffs.lambda[0] * coeffs.lambda[0];
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    c.check(
        rel(coeffs.stark[0], -chi0) <= 1e-12,
        format!("S_0 = {} vs -chi_0 = {}", coeffs.stark[0], -chi0),
    );
    c.check(
        rel(coeffs.stark[1], chi0 * (1.0 - 2.0 * l0sq)) <= 1e-12,
        format!("S_1 = {}", coeffs.stark[1]),
    );
    c.check(
        rel(coeffs.kerr[0], chi0 * l0sq) <= 1e-12,
        format!("K_0 = {}", coeffs.kerr[0]),
    );
    c.check(
        rel(coeffs.kerr[1], -chi0 * l0sq) <= 1e-12,
        format!("K_1 = {}", coeffs.kerr[1]),
    );
    c.finish();
}

#[test]
fn criterion_02_jc_oracle() {
    let mut c = Criterion::new("criterion 2 (JC closed-form oracle)");
    let spec = system(2, 7000.0, 0.05);
    let delta0 = W10 - 7000.0;
    for n in [0.0, 1.0, 10.0, 1e3, 1e6] {
        let dressed = diagonalize(&build_block(&spec, n).unwrap()).unwrap();
        let (c0, c1) = jc_shifted_doublet(delta0, G0, n);
        let r0 = (dressed.shifted_energy(0) - c0).abs() / c0.abs().max(1.0);
        let r1 = if dressed.block.dim > 1 {
            (dressed.shifted_energy(1) - c1).abs() / c1.abs().max(1.0)
        } else {
            0.0
        };
        c.check(
            r0 <= 1e-9 && r1 <= 1e-9,
            format!("n={n}: rel dev ({r0:.2e}, {r1:.2e})"),
        );
    }
    c.finish();
}

#[test]
fn criterion_03_fig2_caption_anchors() {
    let mut c = Criterion::new("criterion 3 (dispersive anchor frequencies)");
    for (omega_r, n_crit_expect) in [(4515.0, 55.0), (7660.0, 70.0)] {
        let spec = system(6, omega_r, 0.05);
        let coeffs = analytic_coefficients(&spec).unwrap();
        let chi_abs = coeffs.chi_prime.abs();
        c.check(
            (chi_abs - 2.0).abs() <= 0.15 * 2.0,
            format!("|chi'| at {omega_r} = {chi_abs:.4} vs 2 MHz +/-15%"),
        );
        let n_crit = critical_photon_number(&spec).unwrap();
        c.check(
            (n_crit - n_crit_expect).abs() <= 0.10 * n_crit_expect,
            format!("n_crit at {omega_r} = {n_crit:.2} vs {n_crit_expect} +/-10%"),
        );
        let sign_ok = if omega_r == 4515.0 {
            coeffs.chi_prime.signum() == coeffs.zeta_prime.signum()
        } else {
            coeffs.chi_prime.signum() == -coeffs.zeta_prime.signum()
        };
        c.check(
            sign_ok,
            format!(
                "sign relation at {omega_r}: chi'={:.4}, zeta'={:.5}",
                coeffs.chi_prime, coeffs.zeta_prime
            ),
        );
    }
    c.finish();
}

#[test]
fn criterion_04_snr_improvement() {
    let mut c = Criterion::new("criterion 4 (same-sign SNR improvement)");
    let same = analytic_coefficients(&system(6, 4515.0, 0.05)).unwrap();
    let opposite = analytic_coefficients(&system(6, 7660.0, 0.05)).unwrap();
    let mut constant = same.clone();
    constant.zeta_prime = 0.0;
    let cfg = SnrConfig::new(1.0, gamma1_from_t1_us(1.0), 1.0).unwrap();
    let n_crit = same.n_crit;

    let at = |coeffs, n_bar: f64| snr_curve(coeffs, &cfg, &[n_bar])[0].snr;
    let n_star = 0.8 * n_crit;
    let ratio = at(&same, n_star) / at(&opposite, n_star);
    c.check(
        ratio >= 1.5,
        format!("SNR_same/SNR_opposite = {ratio:.3} at n_bar = 0.8 n_crit"),
    );

    let mut ordering = true;
    let mut where_broken = String::new();
    for k in 1..=200 {
        let n_bar = n_crit * k as f64 / 200.0;
        let (s, con, o) = (at(&same, n_bar), at(&constant, n_bar), at(&opposite, n_bar));
        if !(s > con && con > o) {
            ordering = false;
            where_broken = format!("at n_bar = {n_bar:.2}: {s:.2} / {con:.2} / {o:.2}");
            break;
        }
    }
    c.check(
        ordering,
        if ordering {
            "ordering same > constant > opposite on (0, n_crit]".to_string()
        } else {
            format!("ordering broken {where_broken}")
        },
    );
    c.finish();
}

#[test]
fn criterion_05_classical_crossover() {
    let mut c = Criterion::new("criterion 5 (effective frequency approaches bare)");
    let spec = system(6, 7000.0, 0.05);
    for i in [0usize, 1] {
        let w1 = effective_frequency(&spec, i, 1.0).unwrap();
        let w6 = effective_frequency(&spec, i, 1e6).unwrap();
        let ratio = (w6 - 7000.0).abs() / (w1 - 7000.0).abs();
        c.check(
            ratio < 1e-2,
            format!("state {i}: |w_r{i}(1e6)-w_r| / |w_r{i}(1)-w_r| = {ratio:.3e}"),
        );
    }
    c.finish();
}

fn up_sweep(spec: &SystemSpec, level: usize, powers: &[f64]) -> ResponseCurve {
    power_sweep(
        spec,
        level,
        spec.omega_r,
        powers,
        SweepDirection::Up,
        &SolverOptions::default(),
    )
    .unwrap()
}

fn grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    let mut v = Vec::new();
    let mut k = 0usize;
    loop {
        let p = min + step * k as f64;
        if p > max + 1e-9 {
            return v;
        }
        v.push(p);
        k += 1;
    }
}

#[test]
fn criterion_06_state_dependent_avalanche() {
    let mut c = Criterion::new("criterion 6 (state-dependent avalanche)");
    let powers = grid(40.0, 85.0, 0.25);
    let spec6 = system(6, 7000.0, 0.05);
    let up0 = up_sweep(&spec6, 0, &powers);
    let up1 = up_sweep(&spec6, 1, &powers);

    let ratios: Vec<f64> = up0
        .points
        .iter()
        .zip(&up1.points)
        .map(|(a, b)| {
            let (x, y) = (a.n_photons.max(1e-12), b.n_photons.max(1e-12));
            x.max(y) / x.min(y)
        })
        .collect();
    let window: Vec<f64> = powers
        .iter()
        .zip(&ratios)
        .filter(|(_, &r)| r >= 1e3)
        .map(|(&p, _)| p)
        .collect();
    if window.is_empty() {
        c.check(false, "no power window with n ratio >= 1e3".to_string());
    } else {
        let width = window.last().unwrap() - window.first().unwrap();
        c.check(
            (3.0..=8.0).contains(&width),
            format!(
                "ratio>=1e3 window [{}, {}] dB, width {width:.2} dB",
                window.first().unwrap(),
                window.last().unwrap()
            ),
        );
        let peak = ratios.iter().fold(0.0f64, |a, &b| a.max(b));
        c.check(peak >= 1e4, format!("peak ratio {peak:.3e}"));
    }

    let spec2 = system(2, 7000.0, 0.05);
    let j0 = up_sweep(&spec2, 0, &powers).jump_power_db().unwrap();
    let j1 = up_sweep(&spec2, 1, &powers).jump_power_db().unwrap();
    c.check(
        (j0 - j1).abs() <= 0.25 + 1e-9,
        format!("M=2 jump powers {j0} and {j1} dB"),
    );
    c.finish();
}

fn rates_system() -> SystemSpec {
    // dephasing needs the level whose charge dispersion reaches the 1e6
    // anchor, hence 7 levels; kappa = 1 walks the up sweep through the
    // photon-number range where the dressed rates peak
    system(7, 7000.0, 1.0)
}

#[test]
fn criterion_07_purcell_anchor() {
    let mut c = Criterion::new("criterion 7 (Purcell anchor and monotonicity)");
    let spec = system(6, 7000.0, 0.05);
    let lambda0_sq = {
        let d = detunings(&spec).unwrap();
        d.lambda[0] * d.lambda[0]
    };
    let (gk0, _) = purcell_rates(&spec, 0).unwrap();
    let rel = (gk0 - lambda0_sq).abs() / lambda0_sq;
    c.check(
        rel <= 1e-3,
        format!("gamma_kappa/kappa at n=0 = {gk0:.6e} vs lambda_0^2 = {lambda0_sq}: rel dev {rel:.3e}"),
    );

    let rspec = rates_system();
    let table = rates_vs_power(
        &rspec,
        7000.0,
        &grid(20.0, 55.0, 0.5),
        &default_charge_dispersions(7),
        &OneOverFNoise,
        &SolverOptions::default(),
    )
    .unwrap();
    let monotone = table
        .rows
        .windows(2)
        .all(|w| w[1].gamma_kappa <= w[0].gamma_kappa);
    c.check(
        monotone,
        "gamma_kappa/kappa column non-increasing on the up sweep".to_string(),
    );
    c.finish();
}

#[test]
fn criterion_08_dressed_decay() {
    let mut c = Criterion::new("criterion 8 (dressed decay and total error)");
    let spec = rates_system();
    let powers = grid(20.0, 55.0, 0.5);
    let sweep = up_sweep(&spec, 1, &powers);
    let n_top = sweep.points.last().unwrap().n_photons.round() as u64;
    let (g1d, g1dl) = dressed_decay_rates(&spec, n_top).unwrap();
    c.check(
        g1d < 1.0,
        format!("gamma_1d/gamma_1 = {g1d:.4} at highest power (n = {n_top})"),
    );
    c.check(
        g1d + g1dl > 1.0,
        format!("(gamma_1d + gamma_1d_leak)/gamma_1 = {:.4}", g1d + g1dl),
    );
    c.finish();
}

#[test]
fn criterion_09_dephasing_ranges() {
    let mut c = Criterion::new("criterion 9 (dressed dephasing ranges)");
    let spec = rates_system();
    let powers = grid(20.0, 55.0, 0.5);
    let table = rates_vs_power(
        &spec,
        7000.0,
        &powers,
        &default_charge_dispersions(7),
        &OneOverFNoise,
        &SolverOptions::default(),
    )
    .unwrap();

    // avalanche window: between the up-sweep jumps of the first and the last
    // state to avalanche (state 2 jumps before state 1, state 0 last)
    let j2 = up_sweep(&spec, 2, &powers).jump_power_db().unwrap();
    let j0 = up_sweep(&spec, 0, &powers).jump_power_db().unwrap();
    let (lo, hi) = (j2.min(j0), j2.max(j0));
    let in_window: Vec<_> = table
        .rows
        .iter()
        .filter(|r| r.power_db >= lo && r.power_db <= hi)
        .collect();
    assert!(!in_window.is_empty(), "empty avalanche window [{lo}, {hi}]");

    // the paper quotes the extent reached by the dressed rates, so the
    // attained maxima over the window are checked against the brackets
    let gd_max = in_window.iter().map(|r| r.gamma_d).fold(0.0f64, f64::max);
    let gdl_max = in_window
        .iter()
        .map(|r| r.gamma_d_leak)
        .fold(0.0f64, f64::max);
    c.check(
        (1e-1..=1e4).contains(&gd_max),
        format!("max gamma_d/gamma_phi over [{lo}, {hi}] dB = {gd_max:.3e} in [1e-1, 1e4]"),
    );
    c.check(
        (1.0..=1e5).contains(&gdl_max),
        format!("max gamma_d_leak/gamma_phi = {gdl_max:.3e} in [1, 1e5]"),
    );
    let top = table.rows.last().unwrap();
    c.check(
        top.gamma_d_leak > top.gamma_d,
        format!(
            "at highest power gamma_d_leak {:.3e} > gamma_d {:.3e}",
            top.gamma_d_leak, top.gamma_d
        ),
    );
    c.finish();
}

#[test]
fn criterion_10_solver_contract() {
    let mut c = Criterion::new("criterion 10 (solver contract and multiplicity)");
    let spec = system(6, 7000.0, 0.05);
    let opts = SolverOptions::default();
    let powers = grid(40.0, 85.0, 0.5);

    // every converged point satisfies the defect bound
    let mut checked = 0usize;
    let mut violations = 0usize;
    for level in [0usize, 1, 2] {
        for dir in [SweepDirection::Up, SweepDirection::Down] {
            let curve = power_sweep(&spec, level, 7000.0, &powers, dir, &opts).unwrap();
            for (point, &db) in curve.points.iter().zip(&curve.powers_db) {
                if point.converged {
                    let drive = DriveSpec::new(db_to_epsilon(db, spec.kappa), 7000.0).unwrap();
                    let defect = fixed_point_defect(&spec, level, &drive, point.n_photons)
                        .unwrap()
                        .abs();
                    checked += 1;
                    if defect > opts.tol_scale * point.n_photons.max(1.0) {
                        violations += 1;
                    }
                }
            }
        }
    }
    c.check(
        violations == 0 && checked > 0,
        format!("{checked} converged points, {violations} defect-bound violations"),
    );

    // hysteresis of state 2 defines the reported bistable window
    let up = power_sweep(&spec, 2, 7000.0, &powers, SweepDirection::Up, &opts).unwrap();
    let down = power_sweep(&spec, 2, 7000.0, &powers, SweepDirection::Down, &opts).unwrap();
    let bistable: Vec<f64> = powers
        .iter()
        .enumerate()
        .filter(|(k, _)| {
            let (a, b) = (up.points[*k].n_photons, down.points[*k].n_photons);
            (a - b).abs() > 0.5 * a.max(b).max(1.0)
        })
        .map(|(_, &p)| p)
        .collect();
    if bistable.is_empty() {
        c.check(false, "no bistable window detected".to_string());
    } else {
        let (lo, hi) = (bistable[0], *bistable.last().unwrap());
        c.notes
            .push(format!("bistable window of state 2: [{lo}, {hi}] dB"));
        let mid = 0.5 * (lo + hi);
        let inside = scan_fixed_points(
            &spec,
            2,
            &DriveSpec::new(db_to_epsilon(mid, spec.kappa), 7000.0).unwrap(),
            600,
        )
        .unwrap();
        c.check(
            inside.len() >= 2,
            format!("{} fixed points at {mid} dB (inside)", inside.len()),
        );
        for p in [lo - 4.0, hi + 4.0] {
            let outside = scan_fixed_points(
                &spec,
                2,
                &DriveSpec::new(db_to_epsilon(p, spec.kappa), 7000.0).unwrap(),
                600,
            )
            .unwrap();
            c.check(
                outside.len() == 1,
                format!("{} fixed point(s) at {p} dB (outside)", outside.len()),
            );
        }
    }
    c.finish();
}
