import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from melnlab.basis import family, u
from melnlab.certify import (certify_family, isolate_zeros, theorem3_bound,
                             wronskian, wronskian_scaled)

XS = np.geomspace(0.1, 10.0, 50)


def printed_wronskians(name, k):
    """Closed-form Wronskians as printed in the certification proofs."""
    if name == "F2" and k == 1:
        return [
            lambda x: x**2 + x**4,
            lambda x: x**2 * (x**4 + x**2),
            lambda x: -4 * x**9 / (x**4 + x**2),
            lambda x: 32 * x**9 / (x**2 + x**4) ** 2,
        ]
    if name == "F3" and k == 1:
        return [
            lambda x: 1.0,
            lambda x: 2 * x,
            lambda x: 16 * x**3,
            lambda x: 48 * x * (1 - 3 * x**2 + 10 * x**4),
            lambda x: 1536 * x**3 * (9 + 2 * x**2) / (1 + x**2) ** 3,
        ]
    if name == "F4" and k == 2:
        return [
            lambda x: x**4,
            lambda x: 6 * x**13,
            lambda x: -48 * x**17,
            lambda x: 3072 * x**16,
            lambda x: 27648 * x**13 * (924 * x**12 - 25 * x**6 + 15),
            lambda x: (47775744 * x**24
                       * (2464 * x**18 + 42156 * x**12 + 3975 * x**6 + 3325)
                       / (x**6 + 1) ** 4),
        ]
    if name == "F5":
        return [
            lambda x: 1.0,
            lambda x: 2 * k * x ** (2 * k - 1),
            lambda x: 16 * k**3 * x ** (6 * k - 3),
            lambda x: 16 * k**3 * (8 * k**2 + 6 * k + 1) * x ** (10 * k - 5),
            lambda x: 768 * k**6 * (2 * k - 1) * (8 * k**2 + 6 * k + 1) * x ** (16 * k - 9),
            lambda x: -1536 * k**7 * (1 - 4 * k**2) ** 2 * (16 * k**2 - 1) * x ** (18 * k - 13),
            lambda x: (-12288 * k**9 * (2 * k + 1) ** 3 * (4 * k - 1) * (6 * k + 1)
                       * (-8 * k**2 + 2 * k + 1) ** 2 * x ** (24 * k - 18)),
            lambda x: (-589824 * k**12 * (2 * k + 1) ** 3 * (4 * k - 1) * (6 * k + 1)
                       * (-8 * k**2 + 2 * k + 1) ** 2 * x ** (24 * (k - 1))
                       * (48 * k**3 - 44 * k**2 + 12 * k - 1
                          + (2 * k + 1) ** 2 * (4 * k + 1) * (6 * k + 1) * (8 * k + 1)
                          * x ** (8 * k))),
        ]
    if name == "F1":
        return [
            lambda x: 1.0,
            lambda x: (4 * k + 1) * x ** (4 * k) + 1,
            lambda x: (2 * k * x ** (2 * (k - 1))
                       * (-(1 + 6 * k + 8 * k**2) * x ** (4 * k) + 2 * k - 1)),
        ]
    if name == "F2":
        return [
            lambda x: x**2 + x ** (4 * k),
            lambda x: (2 * k - 1) * (x ** (2 * k + 2) + x ** (6 * k)),
            lambda x: -4 * (2 * k - 1) ** 3 * x ** (8 * k + 1) / (x**2 + x ** (4 * k)),
            lambda x: (-16 * k * (2 * k - 1) ** 3 * x ** (8 * k - 3)
                       * ((k - 1) * (4 * k - 1) * x ** (4 * k - 2) + 1 - 3 * k)
                       / (x ** (4 * k - 2) + 1) ** 2),
        ]
    if name == "F6" and k == 2:
        p22 = lambda y: 15 - 175 * y + 12012 * y**2
        p42 = lambda y: 8008 * y**4 + 460390 * y**3 - 993711 * y**2 + 29800 * y - 6650
        return [
            lambda x: 1.0,
            lambda x: 4 * x**3,
            lambda x: 240 * x**11,
            lambda x: -11520 * x**14,
            lambda x: 1474560 * x**12,
            lambda x: 13271040 * x**8 * p22(x**6),
            lambda x: -183458856960 * x**18 * p42(x**6) / (x**6 + 1) ** 5,
        ]
    raise ValueError((name, k))


BATTERY = [("F2", 1), ("F3", 1), ("F4", 2), ("F5", 1), ("F5", 2), ("F5", 3),
           ("F1", 1), ("F1", 2), ("F2", 2), ("F2", 3), ("F6", 2)]


@pytest.mark.parametrize("name,k", BATTERY)
def test_wronskian_battery(name, k):
    fams = family(name, k)
    formulas = printed_wronskians(name, k)
    for s, formula in enumerate(formulas):
        for x in XS:
            det, well = wronskian(fams, float(x), s)
            want = formula(float(x))
            # determinants cannot beat conditioning; allow a tiny absolute
            # floor tied to the local formula magnitude
            tol = 1e-9 * max(abs(want), 1e-12)
            assert abs(det - want) <= tol, (name, k, s, x, det, want)


def test_spec_pinned_values():
    det, _ = wronskian(family("F1", 1), 1.0, 1)
    assert det == pytest.approx(6.0, rel=1e-12)           # (4k+1)x^4 + 1 at 1
    det, _ = wronskian(family("F2", 1), 1.0, 3)
    assert det == pytest.approx(8.0, rel=1e-9)            # 32/(1+1)^2


def test_wronskian_s0_is_first_function():
    fams = family("F3", 1)
    for x in (0.3, 1.7):
        det, _ = wronskian(fams, x, 0)
        assert det == pytest.approx(fams[0](x), rel=1e-14)


def test_swap_antisymmetry(rng):
    fams = family("F5", 2)
    swapped = [fams[1], fams[0]] + fams[2:]
    for x in np.geomspace(0.2, 5.0, 100):
        a, _ = wronskian(fams, float(x), 4)
        b, _ = wronskian(swapped, float(x), 4)
        assert a == pytest.approx(-b, rel=1e-10)


def test_scaled_wronskian_same_sign():
    fams = family("F6", 2)
    for x in np.geomspace(0.2, 5.0, 25):
        det, well = wronskian(fams, float(x), 6)
        scaled = wronskian_scaled(fams, float(x), 6)
        if well and det != 0.0:
            assert math.copysign(1, det) == math.copysign(1, scaled)


# -- zero isolation -----------------------------------------------------------


def test_isolate_simple_linear():
    rep = isolate_zeros(lambda x: x - 1.0, 0.5, 2.0)
    assert rep.count == 1
    assert rep.zeros[0].location == pytest.approx(1.0, abs=1e-12)
    assert rep.zeros[0].simple
    assert rep.exhaustive


def test_isolate_w2_of_f11():
    # printed W2 has its single simple zero where (8k^2+6k+1)x^{4k} = 2k-1
    fams = family("F1", 1)

    def w2(xs):
        return np.array([wronskian_scaled(fams, float(x), 2) for x in np.atleast_1d(xs)])

    rep = isolate_zeros(w2, 0.05, 5.0, initial=1024)
    assert rep.count == 1
    assert rep.zeros[0].simple
    assert rep.zeros[0].location == pytest.approx((1.0 / 15.0) ** 0.25, abs=1e-9)


def test_isolate_handles_wide_dynamic_range():
    # zeros of a polynomial whose magnitude spans ~30 decades over the window
    roots = [0.13, 0.5, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0]

    def f(x):
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        for r in roots:
            out = out * (x - r)
        return out * (1.0 + x**8)

    rep = isolate_zeros(f, 1e-6, 50.0, initial=8192)
    assert rep.count == len(roots)
    assert rep.exhaustive
    for z, r in zip(rep.zeros, roots):
        assert z.location == pytest.approx(r, rel=1e-9)
        assert z.simple


def test_near_double_zero_resolved_by_refinement():
    rep = isolate_zeros(lambda x: (x - 1.0) ** 2 - 1e-8, 0.5, 2.0, initial=2048)
    assert rep.count == 2
    assert all(abs(z.location - 1.0) < 2e-4 for z in rep.zeros)
    assert all(z.simple for z in rep.zeros)


def test_true_double_zero_withholds_exhaustiveness():
    rep = isolate_zeros(lambda x: (x - 1.0) ** 2, 0.5, 2.0, initial=2048)
    assert rep.count == 0
    assert not rep.exhaustive


def test_budget_flagging():
    rep = isolate_zeros(lambda x: np.sin(50.0 / x), 0.01, 1.0, budget=300, initial=128)
    assert rep.budget_used <= 1000
    assert not rep.exhaustive or rep.count > 0


# -- classification -----------------------------------------------------------


def test_theorem3_bound_units():
    assert theorem3_bound([0, 0, 0, 0]) == 3
    assert theorem3_bound([0, 0, 0, 1]) == 4
    # n = 5: nu = (1, 0, 2, 0, 1, 1)
    nu = [1, 0, 2, 0, 1, 1]
    expected = 5 + 1 + 1 + 2 * (0 + 2 + 0 + 1) + min(2 * 1, 0 + 1) + min(2 * 0, 1)
    assert theorem3_bound(nu) == expected == 14


@given(st.lists(st.integers(min_value=0, max_value=3), min_size=4, max_size=8),
       st.integers(min_value=0, max_value=7))
@settings(max_examples=80, deadline=None)
def test_theorem3_bound_monotone(nu, idx):
    nu = list(nu)
    bumped = list(nu)
    bumped[idx % len(nu)] += 1
    assert theorem3_bound(bumped) >= theorem3_bound(nu)


def test_certify_ect_family():
    verdict = certify_family(family("F2", 1), 0.1, 10.0, name="F2^1")
    assert verdict.classification == "ECT"
    assert verdict.zero_bound == 3
    assert all(v == 0 for v in verdict.nu)


def test_certify_accuracy_one_family():
    verdict = certify_family(family("F1", 1), 0.1, 10.0, name="F1^1")
    assert verdict.classification == "ET-accuracy-1"
    assert verdict.zero_bound == 3
    assert verdict.nu == (0, 0, 1)


def test_certify_f62_accuracy_one():
    verdict = certify_family(family("F6", 2), 0.1, 10.0, name="F6^2")
    assert verdict.classification == "ET-accuracy-1"
    assert verdict.zero_bound == 7
    assert verdict.nu == (0, 0, 0, 0, 0, 0, 1)


def test_staged_witness_generalizes_to_k3():
    from melnlab.certify import prop5_witness

    res = prop5_witness(3)
    assert res.succeeded and res.count >= 9
    assert res.stage1_report.simple_count == 4
    ladder = res.sign_ladder
    assert ladder["g(0)"] > 0 > ladder["g(1/2)"]
    assert abs(ladder["g(1)"]) < 1e-6 and ladder["gprime(1)"] < 0 < ladder["g(2)"]


def test_verdict_json_round(tmp_path):
    verdict = certify_family(family("F1", 1), 0.5, 2.0, name="F1^1")
    text = verdict.to_json()
    assert '"classification"' in text
