#!/usr/bin/env python3
"""Smoke test for the readout_py extension module.

Builds nothing itself: run `cargo build -p readout-py --release` first, then
`python3 python/smoke_test.py`. The script locates the compiled cdylib in
target/, exposes it under the importable module name, and exercises the main
entry points against closed-form references.
"""

import math
import shutil
import sys
import sysconfig
import tempfile
from pathlib import Path


def load_module():
    repo = Path(__file__).resolve().parent.parent
    names = ["libreadout_py.so", "readout_py.so", "libreadout_py.dylib", "readout_py.dll"]
    candidates = [
        repo / "target" / profile / name
        for profile in ("release", "debug")
        for name in names
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("readout_py cdylib not found; run `cargo build -p readout-py --release` first")

    ext = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    stage = Path(tempfile.mkdtemp(prefix="readout_py_"))
    shutil.copy2(built, stage / f"readout_py{ext}")
    sys.path.insert(0, str(stage))
    import readout_py

    return readout_py


def approx(a, b, rel=1e-9, abs_tol=0.0):
    return abs(a - b) <= max(rel * max(abs(a), abs(b)), abs_tol)


def main():
    rp = load_module()
    print(f"readout_py {rp.__version__} loaded")

    sys6 = rp.System(6000.0, 5750.0, 100.0, 6, 7000.0, 0.05)
    print(f"built {sys6!r}")

    # ladder detunings
    delta, lam = sys6.detunings()
    assert approx(delta[0], -1000.0) and approx(lam[0], 0.1)

    # two-level coefficient identities
    tls = rp.System(6000.0, 5750.0, 100.0, 2, 7000.0, 0.05)
    c2 = tls.analytic_coefficients()
    chi0 = c2.chi[0]
    assert approx(c2.stark[0], -chi0) and approx(chi0, -10.0)
    assert approx(c2.kerr[1], 0.1)
    print(f"TLS identities ok (chi_0 = {chi0})")

    # six-level coefficients at the same-sign operating point
    same = rp.System(6000.0, 5750.0, 100.0, 6, 4515.0, 0.05).analytic_coefficients()
    assert approx(same.chi_prime, -2.6508639157033587, rel=1e-12)
    assert approx(same.n_crit, 55.130625, rel=1e-9)
    assert math.copysign(1, same.chi_prime) == math.copysign(1, same.zeta_prime)
    print(f"M=6 coefficients ok (chi' = {same.chi_prime:.6f}, n_crit = {same.n_crit:.2f})")

    # exact dressed energies against the closed-form doublet
    for n in (1.0, 10.0, 1e6):
        e0, e1 = rp.jc_shifted_doublet(-1000.0, 100.0, n)
        exact = tls.dressed_energy(n, 0) - n * 7000.0
        assert approx(exact, e0, rel=1e-9), (n, exact, e0)
    print("JC doublet ok")

    # effective frequency approaches the bare resonator at large n
    w1 = sys6.effective_frequency(1, 1.0)
    w_hi = sys6.effective_frequency(1, 1e6)
    assert abs(w_hi - 7000.0) < 0.02 * abs(w1 - 7000.0)
    print(f"effective frequency ok ({w1:.3f} -> {w_hi:.5f} MHz)")

    # linear cavity steady state on resonance: n = (2 eps / kappa)^2
    lin = rp.System.from_ladder([0.0, 6000.0], [0.0], 7000.0, 0.5)
    n, _, converged, _ = lin.steady_state(0, 2.0, 7000.0)
    assert converged and approx(n, (2 * 2.0 / 0.5) ** 2, rel=1e-7)
    print(f"linear-cavity steady state ok (n = {n:.6f})")

    # state-dependent avalanche: state 1 jumps before state 0
    powers = [40.0 + 0.5 * k for k in range(91)]
    curve0 = sys6.power_sweep(0, 7000.0, powers, "up")
    curve1 = sys6.power_sweep(1, 7000.0, powers, "up")
    ratio = max(
        max(a[0], b[0]) / max(min(a[0], b[0]), 1e-12)
        for a, b in zip(curve0, curve1)
    )
    assert ratio > 1e3, ratio
    print(f"avalanche separation ok (peak n ratio {ratio:.3e})")

    # rates: Purcell anchor and decay redistribution
    gk, gkl = sys6.purcell_rates(0)
    assert approx(gk, 0.009709662, rel=1e-5) and gkl == 0.0
    g1, g1l = sys6.dressed_decay_rates(100000)
    assert g1 < 1.0 < g1 + g1l
    sys7 = rp.System(6000.0, 5750.0, 100.0, 7, 7000.0, 1.0)
    gd, gdl = sys7.dressed_dephasing_rates(3000)
    assert gdl > gd > 0.1
    print(f"rates ok (gamma_kappa(0) = {gk:.6f}, gamma_d(3000) = {gd:.3f})")

    # SNR: same-sign beats opposite-sign
    gamma1 = rp.gamma1_from_t1_us(1.0)
    opp = rp.System(6000.0, 5750.0, 100.0, 6, 7660.0, 0.05).analytic_coefficients()
    nb = 0.8 * same.n_crit
    improvement = same.snr(nb, 1.0, gamma1, 1.0) / opp.snr(nb, 1.0, gamma1, 1.0)
    assert improvement > 1.5
    print(f"SNR improvement ok ({improvement:.2f}x at n_bar = {nb:.1f})")

    # default dispersion table anchor
    table = rp.default_charge_dispersions(7)
    assert approx(table[6], 1e6) and table[0] == 0.1

    print("smoke test PASSED")


if __name__ == "__main__":
    main()
