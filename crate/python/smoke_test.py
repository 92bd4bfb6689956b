"""Smoke test for the pyopuc extension module.

Build the module first (see README), then run:

    PYTHONPATH=python python3 python/smoke_test.py
"""

import cmath
import math

import pyopuc


def close(a, b, tol):
    assert abs(a - b) < tol, (a, b)


def main():
    # Bernstein–Szegő weight has α = (a, 0, 0, …)
    m = pyopuc.Measure.bernstein_szego(0.5)
    alphas = m.verblunsky(6).alphas
    close(alphas[0], 0.5, 1e-10)
    assert all(abs(a) < 1e-10 for a in alphas[1:])

    leb = pyopuc.Measure.lebesgue()
    close(leb.caratheodory(0.3 + 0.2j), 1.0, 1e-14)
    assert len(pyopuc.Measure.gallery_names()) == 6

    spec = '{"weight": {"preset": "lebesgue"}, "atoms": [[0.0, 1.0]]}'
    mixed = pyopuc.Measure.from_json(spec)
    close(mixed.total_mass(), 1.0, 1e-12)
    close(mixed.pure_point_mass(0.0), 0.5, 1e-4)

    v = pyopuc.Verblunsky([0.5, 1 / 3, 0.25])
    z = 0.4 - 0.3j
    close(v.m_tilde(z), z * v.schur(z), 1e-12)
    close(v.delta0d(0), math.sqrt(3) / 2, 1e-14)
    product, entropy = v.szego_theorem(3)
    close(product, math.exp(entropy), 1e-9)
    assert v.ratio_identity_residual(z) < 1e-11

    _, det = v.transfer(z, 3)
    close(det, z**3, 1e-12)

    rep = pyopuc.lyapunov_uniform_disk(0.5, 0.5, n_steps=500, n_samples=50, seed=7)
    assert rep.kotani_holds, rep
    again = pyopuc.lyapunov_uniform_disk(0.5, 0.5, n_steps=500, n_samples=50, seed=7)
    assert (rep.gamma2, rep.gamma) == (again.gamma2, again.gamma)

    close(pyopuc.cmv_green(pyopuc.Verblunsky([]), pyopuc.Verblunsky([]), 0.5), 0, 1e-15)

    try:
        leb.caratheodory(1.0)
    except pyopuc.OpucError as e:
        assert "unit disk" in str(e)
    else:
        raise AssertionError("boundary point accepted")
    try:
        pyopuc.Verblunsky([1.5])
    except ValueError:
        pass
    else:
        raise AssertionError("|alpha| >= 1 accepted")

    print("pyopuc smoke test passed")


if __name__ == "__main__":
    main()
