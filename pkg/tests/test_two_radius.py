"""Zero sets of the averaged eigenfunctions and two-radius certificates.

The line model makes everything explicit: sphere averages are cos(sqrt(-L) r),
so L-zeros and r-zeros sit at odd multiples of pi/2 and the mean value
property fails exactly off the 2*pi lattice.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from harmonic.density import make_euclidean
from harmonic.two_radius import (bad_radii, certify_pair, find_L_zeros,
                                 find_r_zeros, mvp_counterexample_demo)

E0 = make_euclidean(0)


def test_line_sphere_zeros_closed_form():
    zs = find_L_zeros(E0, 1.0, target="sphere", box=(-30 - 5j, 5 + 5j))
    got = np.sort(zs.values().real)
    expect = -np.array([1.5 * math.pi, 0.5 * math.pi]) ** 2
    assert zs.winding_total == 2
    assert len(zs.zeros) == 2
    assert np.max(np.abs(got - np.sort(expect))) < 1e-10
    for z in zs.zeros:
        assert z.multiplicity == 1
        assert z.residual < 1e-10
        assert abs(z.L.imag) < 1e-10


def test_mean_value_zeros_are_double():
    # cos(sqrt(-L) r) - 1 has double zeros at the 2*pi lattice; the trivial
    # L = 0 zero is excluded by the puncture.
    zs = find_L_zeros(E0, 1.0, target="mvp", box=(-50 - 5j, 5 + 5j))
    assert zs.winding_total == 2
    assert len(zs.zeros) == 1
    z = zs.zeros[0]
    assert z.multiplicity == 2
    assert abs(z.L - (-4 * math.pi**2)) < 1e-6  # double zero: sqrt accuracy
    assert all(abs(z.L) > 1.0 for z in zs.zeros)


def test_find_L_zeros_box_guard():
    with pytest.raises(ValueError, match="componentwise"):
        find_L_zeros(E0, 1.0, box=(5 + 8j, -60 - 8j))
    with pytest.raises(ValueError, match="target"):
        find_L_zeros(E0, 1.0, target="disk")


def test_find_r_zeros_odd_integers():
    L = -(math.pi / 2) ** 2
    zeros = find_r_zeros(E0, L, 10.0)
    assert np.max(np.abs(np.asarray(zeros) - [1, 3, 5, 7, 9])) < 1e-10


def test_find_r_zeros_radius_guard():
    with pytest.raises(ValueError, match="at most 50"):
        find_r_zeros(E0, -1.0, 60.0)


def test_bad_radii_line_are_odd_rationals():
    got = bad_radii(E0, 1.0)
    # default box reaches L = -60, i.e. denominators 1 and 3
    oracle = sorted({Fraction(2 * a + 1, 2 * b + 1)
                     for b in (0, 1) for a in range(0, 15)
                     if Fraction(2 * a + 1, 2 * b + 1) <= 10})
    assert len(got) == len(oracle)
    assert np.max(np.abs(np.asarray(got) - [float(q) for q in oracle])) < 1e-9


def test_certify_rejects_odd_ratio():
    cert = certify_pair(E0, 1.0, 3.0, box=(-30 - 8j, 5 + 8j))
    assert cert.verdict == "common-zero-found"
    assert abs(cert.witness - (-(math.pi / 2) ** 2)) < 1e-9
    assert cert.min_joint_residual < 1e-9
    assert any(abs(z - (-(math.pi / 2) ** 2)) < 1e-9 for z in cert.common)
    assert "box" in cert.note


def test_certify_accepts_irrational_ratio():
    cert = certify_pair(E0, 1.0, math.sqrt(2))
    assert cert.verdict == "no-common-zero-in-box"
    assert cert.witness is None
    assert cert.common == []
    # the closest near-coincidence stays far from an actual common zero
    assert cert.min_joint_residual > 0.1


def test_mean_value_counterexample_demo():
    demo = mvp_counterexample_demo()
    # the punchline: the mean value property at one radius does not force
    # harmonicity
    assert not demo["cos_is_harmonic"]
    assert demo["mvp_holds_at_2pi"]
    assert demo["mvp_fails_at_pi"]
    assert demo["residual_2pi"] < 1e-13
    assert demo["residual_linear"] < 1e-12
    assert demo["residual_pi"] > 1.0


def test_demo_is_deterministic():
    a = mvp_counterexample_demo(seed=7)
    b = mvp_counterexample_demo(seed=7)
    assert a == b
