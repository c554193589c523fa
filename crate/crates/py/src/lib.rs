//! Python bindings for the readout-core library.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use readout_core::dispersive;
use readout_core::eigenblocks;
use readout_core::metrics;
use readout_core::model::{self, MlsSpec, SystemSpec};
use readout_core::oracle;
use readout_core::response::{self, DriveSpec, SolverOptions, SweepDirection};

fn err<T>(e: readout_core::Error) -> PyResult<T> {
    Err(PyValueError::new_err(e.to_string()))
}

/// A multilevel qubit coupled to a linear readout resonator.
#[pyclass(name = "System", skip_from_py_object)]
#[derive(Clone)]
struct PySystem {
    spec: SystemSpec,
}

#[pymethods]
impl PySystem {
    /// Transmon-style ladder: constant anharmonicity, couplings g0*sqrt(i+1).
    #[new]
    fn new(omega_10: f64, omega_21: f64, g0: f64, num_levels: usize, omega_r: f64, kappa: f64) -> PyResult<Self> {
        let mls = match MlsSpec::transmon(omega_10, omega_21, g0, num_levels) {
            Ok(m) => m,
            Err(e) => return err(e),
        };
        match SystemSpec::new(mls, omega_r, kappa) {
            Ok(spec) => Ok(Self { spec }),
            Err(e) => err(e),
        }
    }

    /// Build from explicit level frequencies and couplings.
    #[staticmethod]
    fn from_ladder(level_freqs: Vec<f64>, couplings: Vec<f64>, omega_r: f64, kappa: f64) -> PyResult<Self> {
        let mls = match MlsSpec::new(level_freqs, couplings) {
            Ok(m) => m,
            Err(e) => return err(e),
        };
        match SystemSpec::new(mls, omega_r, kappa) {
            Ok(spec) => Ok(Self { spec }),
            Err(e) => err(e),
        }
    }

    #[getter]
    fn num_levels(&self) -> usize {
        self.spec.num_levels()
    }

    #[getter]
    fn omega_r(&self) -> f64 {
        self.spec.omega_r
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.spec.kappa
    }

    #[getter]
    fn level_freqs(&self) -> Vec<f64> {
        self.spec.mls.level_freqs.clone()
    }

    #[getter]
    fn couplings(&self) -> Vec<f64> {
        self.spec.mls.couplings.clone()
    }

    /// Ladder detunings Delta_i = (omega_{i+1} - omega_i) - omega_r.
    fn detunings(&self) -> PyResult<(Vec<f64>, Vec<f64>)> {
        match model::detunings(&self.spec) {
            Ok(d) => Ok((d.delta, d.lambda)),
            Err(e) => err(e),
        }
    }

    /// Fourth-order dispersive coefficients.
    fn analytic_coefficients(&self) -> PyResult<PyCoefficients> {
        match dispersive::analytic_coefficients(&self.spec) {
            Ok(c) => Ok(PyCoefficients { inner: c }),
            Err(e) => err(e),
        }
    }

    /// chi' and zeta' extracted from exact dressed energies; returns
    /// (chi_prime, zeta_prime, ill_conditioned).
    #[pyo3(signature = (max_fit_n = 4))]
    fn numeric_coefficients(&self, max_fit_n: usize) -> PyResult<(f64, f64, bool)> {
        match dispersive::chi_zeta_numeric(&self.spec, max_fit_n) {
            Ok(n) => Ok((n.chi_prime, n.zeta_prime, n.ill_conditioned)),
            Err(e) => err(e),
        }
    }

    /// Critical photon number 1/(4 lambda_0^2).
    fn critical_photon_number(&self) -> PyResult<f64> {
        match dispersive::critical_photon_number(&self.spec) {
            Ok(n) => Ok(n),
            Err(e) => err(e),
        }
    }

    /// Dressed energy E(n, i) in MHz.
    fn dressed_energy(&self, n: f64, i: usize) -> PyResult<f64> {
        match eigenblocks::dressed_energy(&self.spec, n, i) {
            Ok(e) => Ok(e),
            Err(e) => err(e),
        }
    }

    /// Effective resonator frequency omega_ri(n) = E(n+1, i) - E(n, i).
    fn effective_frequency(&self, i: usize, n: f64) -> PyResult<f64> {
        match eigenblocks::effective_frequency(&self.spec, i, n) {
            Ok(w) => Ok(w),
            Err(e) => err(e),
        }
    }

    /// Steady-state photon number for state `i` driven at (epsilon, omega_m),
    /// from the given initialization. Returns (n, omega_ri, converged, residual).
    #[pyo3(signature = (i, epsilon, omega_m, init = 0.0))]
    fn steady_state(&self, i: usize, epsilon: f64, omega_m: f64, init: f64) -> PyResult<(f64, f64, bool, f64)> {
        let drive = match DriveSpec::new(epsilon, omega_m) {
            Ok(d) => d,
            Err(e) => return err(e),
        };
        match response::steady_state_photons(&self.spec, i, &drive, init, &SolverOptions::default()) {
            Ok(p) => Ok((p.n_photons, p.omega_ri_at_n, p.converged, p.residual)),
            Err(e) => err(e),
        }
    }

    /// Hysteresis power sweep; `powers_db` strictly increasing, direction
    /// "up" or "down". Returns per-power (n, omega_ri, converged).
    #[pyo3(signature = (i, omega_m, powers_db, direction = "up"))]
    fn power_sweep(
        &self,
        i: usize,
        omega_m: f64,
        powers_db: Vec<f64>,
        direction: &str,
    ) -> PyResult<Vec<(f64, f64, bool)>> {
        let dir = match direction {
            "up" => SweepDirection::Up,
            "down" => SweepDirection::Down,
            other => return Err(PyValueError::new_err(format!("direction must be up or down, got {other}"))),
        };
        match response::power_sweep(&self.spec, i, omega_m, &powers_db, dir, &SolverOptions::default()) {
            Ok(curve) => Ok(curve
                .points
                .iter()
                .map(|p| (p.n_photons, p.omega_ri_at_n, p.converged))
                .collect()),
            Err(e) => err(e),
        }
    }

    /// (gamma_kappa/kappa, leakage) at integer photon number n.
    fn purcell_rates(&self, n: u64) -> PyResult<(f64, f64)> {
        match metrics::purcell_rates(&self.spec, n) {
            Ok(r) => Ok(r),
            Err(e) => err(e),
        }
    }

    /// (gamma_1d/gamma_1, leakage) at integer photon number n.
    fn dressed_decay_rates(&self, n: u64) -> PyResult<(f64, f64)> {
        match metrics::dressed_decay_rates(&self.spec, n) {
            Ok(r) => Ok(r),
            Err(e) => err(e),
        }
    }

    /// (gamma_d/gamma_phi, leakage) at integer photon number n with a 1/f
    /// charge-noise spectrum; `dispersions` defaults to the built-in table.
    #[pyo3(signature = (n, dispersions = None))]
    fn dressed_dephasing_rates(&self, n: u64, dispersions: Option<Vec<f64>>) -> PyResult<(f64, f64)> {
        let table = dispersions.unwrap_or_else(|| model::default_charge_dispersions(self.spec.num_levels()));
        match metrics::dressed_dephasing_rates(&self.spec, n, &table, &metrics::OneOverFNoise) {
            Ok(r) => Ok(r),
            Err(e) => err(e),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "System(num_levels={}, omega_r={}, kappa={})",
            self.spec.num_levels(),
            self.spec.omega_r,
            self.spec.kappa
        )
    }
}

/// Dispersive expansion coefficients.
#[pyclass(name = "Coefficients", skip_from_py_object)]
#[derive(Clone)]
struct PyCoefficients {
    inner: dispersive::DispersiveCoefficients,
}

#[pymethods]
impl PyCoefficients {
    #[getter]
    fn chi(&self) -> Vec<f64> {
        self.inner.chi.clone()
    }

    #[getter]
    fn lambda_(&self) -> Vec<f64> {
        self.inner.lambda.clone()
    }

    #[getter]
    fn stark(&self) -> Vec<f64> {
        self.inner.stark.clone()
    }

    #[getter]
    fn kerr(&self) -> Vec<f64> {
        self.inner.kerr.clone()
    }

    #[getter]
    fn chi_prime(&self) -> f64 {
        self.inner.chi_prime
    }

    #[getter]
    fn zeta_prime(&self) -> f64 {
        self.inner.zeta_prime
    }

    #[getter]
    fn n_crit(&self) -> f64 {
        self.inner.n_crit
    }

    /// Cavity pull difference delta = chi' + zeta' * n_bar.
    fn cavity_pull(&self, n_bar: f64) -> f64 {
        metrics::cavity_pull(&self.inner, n_bar)
    }

    /// Homodyne SNR at photon number n_bar for efficiency eta, relaxation
    /// rate gamma_1 (ordinary MHz) and ratio kappa/(2 chi').
    fn snr(&self, n_bar: f64, eta: f64, gamma_1: f64, kappa_over_2chi: f64) -> PyResult<f64> {
        let cfg = match metrics::SnrConfig::new(eta, gamma_1, kappa_over_2chi) {
            Ok(c) => c,
            Err(e) => return err(e),
        };
        Ok(metrics::snr_curve(&self.inner, &cfg, &[n_bar])[0].snr)
    }

    fn __repr__(&self) -> String {
        format!(
            "Coefficients(chi_prime={}, zeta_prime={}, n_crit={})",
            self.inner.chi_prime, self.inner.zeta_prime, self.inner.n_crit
        )
    }
}

/// gamma_1 = 1/T_1 as an ordinary frequency in MHz, for T_1 in microseconds.
#[pyfunction]
fn gamma1_from_t1_us(t1_us: f64) -> f64 {
    metrics::gamma1_from_t1_us(t1_us)
}

/// Closed-form two-level doublet energies (relative to N*omega_r).
#[pyfunction]
fn jc_shifted_doublet(delta0: f64, g0: f64, n_total: f64) -> (f64, f64) {
    oracle::jc_shifted_doublet(delta0, g0, n_total)
}

/// Built-in charge-dispersion ratio table eps_i/eps_1.
#[pyfunction]
fn default_charge_dispersions(num_levels: usize) -> Vec<f64> {
    model::default_charge_dispersions(num_levels)
}

/// Drive amplitude (MHz) for a power in dB relative to eps_ref = kappa/2.
#[pyfunction]
fn db_to_epsilon(power_db: f64, kappa: f64) -> f64 {
    response::db_to_epsilon(power_db, kappa)
}

#[pymodule]
fn readout_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<PyCoefficients>()?;
    m.add_function(wrap_pyfunction!(gamma1_from_t1_us, m)?)?;
    m.add_function(wrap_pyfunction!(jc_shifted_doublet, m)?)?;
    m.add_function(wrap_pyfunction!(default_charge_dispersions, m)?)?;
    m.add_function(wrap_pyfunction!(db_to_epsilon, m)?)?;
    m.add("__version__", readout_core::VERSION)?;
    Ok(())
}
