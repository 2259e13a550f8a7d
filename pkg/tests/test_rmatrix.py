"""Family evaluation, gauges, and spec serialization."""

import cmath
import math

import numpy as np
import pytest

from dynr import (
    CartanVector,
    GaugeRecord,
    PoleProximity,
    RMatrixSpec,
    SpecInvalid,
    ThetaParams,
    build_root_system,
    build_simple_lie_algebra,
    casimir,
    effective_coupling,
    eval_constant,
    eval_dlambda,
    eval_rmatrix,
    eval_spectral,
    family_phi,
    gauge_apply,
    pole_margin,
    rho_fn,
    sigma_w,
    spec_from_json,
    spec_to_json,
    trig_constant_fixture,
)

A1 = build_simple_lie_algebra(build_root_system("A", 1))
A2 = build_simple_lie_algebra(build_root_system("A", 2))
B2 = build_simple_lie_algebra(build_root_system("B", 2))


def _full_X(g):
    return tuple(range(g.root_system.n_roots))


def _lam_with_pairing(g, value):
    """A Cartan point with (alpha, lam) = value for the first simple root."""
    rs = g.root_system
    a = rs.roots[rs.simple_roots[0]]
    return CartanVector.of(a * (value / (a @ a)))


def _root_entry(g, r, root_idx):
    rs = g.root_system
    return r.data[g.root_basis_index(root_idx), g.root_basis_index(rs.neg(root_idx))]


# ---------------------------------------------------------------- validation

def test_rational_constant_requires_closed_X():
    rs = A1.root_system
    with pytest.raises(SpecInvalid):
        RMatrixSpec(algebra=A1, family="RationalConstant", X=[rs.positive_roots[0]])


def test_coupling_gates():
    with pytest.raises(SpecInvalid):
        RMatrixSpec(algebra=A1, family="RationalConstant", X=_full_X(A1), eps=2.0)
    with pytest.raises(SpecInvalid):
        RMatrixSpec(algebra=A1, family="TrigCotanh", eps=0.0)
    with pytest.raises(SpecInvalid):
        RMatrixSpec(algebra=A1, family="TrigSpectral", eps=2.0)


def test_tau_gates():
    with pytest.raises(SpecInvalid):
        RMatrixSpec(algebra=A1, family="EllipticSpectral")
    with pytest.raises(SpecInvalid):
        RMatrixSpec(algebra=A1, family="EllipticSpectral", tau=0.7)
    with pytest.raises(SpecInvalid):
        RMatrixSpec(algebra=A1, family="TrigCotanh", eps=1.0, tau=2j)


def test_X_family_gates():
    with pytest.raises(SpecInvalid):
        RMatrixSpec(algebra=A1, family="TrigCotanh", eps=1.0, X=[0])
    # degenerate family X must sit inside the simple roots of the polarization
    rs = A2.root_system
    nonsimple = [i for i in rs.positive_roots if i not in rs.simple_roots]
    with pytest.raises(SpecInvalid):
        RMatrixSpec(algebra=A2, family="TrigDegenerate", eps=1.0, X=nonsimple[:1])


def test_structural_gates():
    with pytest.raises(SpecInvalid):
        RMatrixSpec(algebra=A1, family="NoSuchFamily")
    with pytest.raises(SpecInvalid):
        RMatrixSpec(algebra=A2, family="TrigCotanh", eps=1.0, C=np.eye(2))
    rs = A2.root_system
    pol = list(rs.positive_roots)
    with pytest.raises(SpecInvalid):
        RMatrixSpec(algebra=A2, family="TrigCotanh", eps=1.0, polarization=pol[:1])
    bad = pol[:-1] + [rs.neg(pol[0])]
    with pytest.raises(SpecInvalid):
        RMatrixSpec(algebra=A2, family="TrigCotanh", eps=1.0, polarization=bad)
    with pytest.raises(SpecInvalid):
        RMatrixSpec(algebra=A1, family="TrigCotanh", eps=1.0, nu=CartanVector.of([1.0, 2.0]))


def test_gauge_family_gates():
    const = RMatrixSpec(algebra=A1, family="RationalConstant", X=_full_X(A1))
    with pytest.raises(SpecInvalid):
        gauge_apply(const, GaugeRecord(kind=2, psi=(np.zeros((1, 1)), np.array([1.0]))))
    with pytest.raises(SpecInvalid):
        gauge_apply(const, GaugeRecord(kind=4, scale=(1.0, 2.0)))
    # b = 1 passes on a constant family
    gauge_apply(const, GaugeRecord(kind=4, scale=(3.0, 1.0)))


def test_eval_dispatch_gates():
    const = RMatrixSpec(algebra=A1, family="RationalConstant", X=_full_X(A1))
    spectral = RMatrixSpec(algebra=A1, family="RationalSpectral", X=())
    lam = _lam_with_pairing(A1, 2.0)
    with pytest.raises(SpecInvalid):
        eval_spectral(const, lam, 0.3)
    with pytest.raises(SpecInvalid):
        eval_constant(spectral, lam)
    with pytest.raises(SpecInvalid):
        eval_dlambda(spectral, lam)  # missing z
    with pytest.raises(SpecInvalid):
        eval_dlambda(const, lam, z=0.3)
    with pytest.raises(SpecInvalid):
        eval_dlambda(const, lam, mode="symbolic")


# ---------------------------------------------------------------- hand values

def test_rational_constant_hand_value():
    spec = RMatrixSpec(algebra=A1, family="RationalConstant", X=_full_X(A1))
    lam = _lam_with_pairing(A1, 2.0)
    r = eval_constant(spec, lam)
    rs = A1.root_system
    pos = rs.positive_roots[0]
    assert _root_entry(A1, r, pos) == pytest.approx(0.5)
    assert _root_entry(A1, r, rs.neg(pos)) == pytest.approx(-0.5)
    assert np.allclose(r.data[:1, :1], 0.0)


def test_cotanh_hand_value():
    spec = RMatrixSpec(algebra=A1, family="TrigCotanh", eps=2.0)
    lam = _lam_with_pairing(A1, math.log(3.0))
    r = eval_constant(spec, lam)
    rs = A1.root_system
    pos = rs.positive_roots[0]
    # 1 + coth(ln 3) = 9/4, 1 - coth(ln 3) = -1/4, Cartan block eps/2 = 1
    assert _root_entry(A1, r, pos) == pytest.approx(9.0 / 4.0, abs=1e-13)
    assert _root_entry(A1, r, rs.neg(pos)) == pytest.approx(-1.0 / 4.0, abs=1e-13)
    assert r.data[0, 0] == pytest.approx(1.0)


def test_degenerate_with_empty_X_is_half_casimir_plus_positives():
    spec = RMatrixSpec(algebra=A2, family="TrigDegenerate", eps=1.0, X=())
    lam = CartanVector.of([0.37, -0.81])
    r = eval_constant(spec, lam)
    rs = A2.root_system
    want = np.zeros((A2.dim, A2.dim), dtype=complex)
    want[: rs.rank, : rs.rank] = 0.5 * np.eye(rs.rank)
    for p in rs.positive_roots:
        want[A2.root_basis_index(p), A2.root_basis_index(rs.neg(p))] = 1.0
    assert np.max(np.abs(r.data - want)) < 1e-14
    # no lam dependence when the span is empty
    r2 = eval_constant(spec, CartanVector.of([1.9, 0.4]))
    assert np.max(np.abs(r.data - r2.data)) == 0


def test_trig_spectral_empty_X_matches_fixture():
    spec = RMatrixSpec(algebra=A2, family="TrigSpectral", X=())
    lam = CartanVector.of([0.21, 0.53])
    for z in (0.4, 0.37 - 0.22j, -0.8 + 0.13j):
        got = eval_spectral(spec, lam, z)
        want = trig_constant_fixture(A2, z)
        assert np.max(np.abs(got.data - want.data)) < 1e-12


def test_rational_spectral_empty_X_is_casimir_over_z():
    spec = RMatrixSpec(algebra=B2, family="RationalSpectral", X=())
    lam = CartanVector.of([0.7, -0.2])
    for z in (0.5, 0.31 + 0.4j):
        got = eval_spectral(spec, lam, z)
        want = casimir(B2).scale(1.0 / z)
        assert np.max(np.abs(got.data - want.data)) < 1e-15


def test_elliptic_entries_are_theta_ratios():
    tau = 1j
    spec = RMatrixSpec(algebra=A1, family="EllipticSpectral", tau=tau)
    a = 0.43
    lam = _lam_with_pairing(A1, a)
    z = 0.27 - 0.31j
    r = eval_spectral(spec, lam, z)
    p = ThetaParams(tau=tau)
    rs = A1.root_system
    pos = rs.positive_roots[0]
    assert r.data[0, 0] == pytest.approx(rho_fn(z, p), rel=1e-13)
    assert _root_entry(A1, r, pos) == pytest.approx(sigma_w(-a, z, p), rel=1e-13)
    assert _root_entry(A1, r, rs.neg(pos)) == pytest.approx(sigma_w(a, z, p), rel=1e-13)


def test_trig_spectral_full_span_entries():
    spec = RMatrixSpec(algebra=A1, family="TrigSpectral", X=A1.root_system.simple_roots)
    a = 0.62
    lam = _lam_with_pairing(A1, a)
    z = 0.33 - 0.18j
    r = eval_spectral(spec, lam, z)
    rs = A1.root_system
    pos = rs.positive_roots[0]
    sz = cmath.sin(z)
    assert r.data[0, 0] == pytest.approx(cmath.cos(z) / sz, rel=1e-13)
    assert _root_entry(A1, r, pos) == pytest.approx(
        cmath.sin(a + z) / (cmath.sin(a) * sz), rel=1e-13
    )
    assert _root_entry(A1, r, rs.neg(pos)) == pytest.approx(
        cmath.sin(-a + z) / (cmath.sin(-a) * sz), rel=1e-13
    )


@pytest.mark.parametrize("family,kw", [
    ("RationalSpectral", {"X": ()}),
    ("TrigSpectral", {"X": ()}),
    ("EllipticSpectral", {"tau": 1j}),
])
def test_spectral_short_distance_limit(family, kw):
    """z r(lam, z) approaches the invariant tensor as z -> 0."""
    spec = RMatrixSpec(algebra=A2, family=family, **kw)
    # root pairings stay well clear of the coefficient pole lattice here
    lam = CartanVector.of([0.27, -0.38])
    z = 1e-3
    r = eval_spectral(spec, lam, z)
    om = casimir(A2)
    assert np.max(np.abs(z * r.data - om.data)) < 1e-2 * np.max(np.abs(om.data))


# ---------------------------------------------------------------- gauges

def _rand_lam(rank, seed):
    rng = np.random.default_rng(seed)
    return CartanVector.of(rng.uniform(-1.5, 1.5, rank) + 0.1j * rng.uniform(-1, 1, rank))


def test_gauge_kind1_adds_cartan_matrix():
    c = np.array([[0.0, 0.7], [-0.7, 0.0]])
    base = RMatrixSpec(algebra=A2, family="TrigCotanh", eps=1.0)
    gauged = gauge_apply(base, GaugeRecord(kind=1, c_matrix=c))
    lam = _rand_lam(2, 5)
    r0 = eval_constant(base, lam)
    r1 = eval_constant(gauged, lam)
    diff = r1.data - r0.data
    assert np.max(np.abs(diff[:2, :2] - c)) < 1e-14
    diff[:2, :2] = 0
    assert np.max(np.abs(diff)) == 0


def test_gauge_kind2_zero_Q_scales_root_lines():
    base = RMatrixSpec(algebra=A2, family="RationalSpectral", X=())
    v = np.array([0.4, -0.9])
    gauged = gauge_apply(base, GaugeRecord(kind=2, psi=(np.zeros((2, 2)), v)))
    lam = _rand_lam(2, 6)
    z = 0.37 - 0.2j
    r0 = eval_spectral(base, lam, z)
    r1 = eval_spectral(gauged, lam, z)
    rs = A2.root_system
    assert np.max(np.abs(r1.data[:2, :2] - r0.data[:2, :2])) == 0
    for p in range(rs.n_roots):
        want = _root_entry(A2, r0, p) * cmath.exp(z * (rs.roots[p] @ v))
        assert _root_entry(A2, r1, p) == pytest.approx(want, rel=1e-12)


def test_gauge_kind2_general_pointwise():
    base = RMatrixSpec(algebra=A1, family="EllipticSpectral", tau=2j)
    q = np.array([[0.31]])
    v = np.array([0.12 - 0.05j])
    gauged = gauge_apply(base, GaugeRecord(kind=2, psi=(q, v)))
    lam = _rand_lam(1, 7)
    z = 0.29 - 0.41j
    r0 = eval_spectral(base, lam, z)
    r1 = eval_spectral(gauged, lam, z)
    rs = A1.root_system
    grad = q @ lam.as_array() + v
    assert np.max(np.abs(r1.data[:1, :1] - (r0.data[:1, :1] + z * q))) < 1e-13
    for p in range(rs.n_roots):
        want = _root_entry(A1, r0, p) * cmath.exp(z * (rs.roots[p] @ grad))
        assert _root_entry(A1, r1, p) == pytest.approx(want, rel=1e-12)


def test_gauge_kind3_shifts_argument():
    shift = CartanVector.of([0.4, -0.25])
    base = RMatrixSpec(algebra=A2, family="TrigCotanh", eps=2.0)
    gauged = gauge_apply(base, GaugeRecord(kind=3, shift=shift))
    lam = _rand_lam(2, 8)
    got = eval_constant(gauged, lam)
    want = eval_constant(base, lam - shift)
    assert np.max(np.abs(got.data - want.data)) == 0
    # zero shift is the identity
    same = gauge_apply(base, GaugeRecord(kind=3, shift=CartanVector.zero(2)))
    assert np.max(np.abs(eval_constant(same, lam).data - eval_constant(base, lam).data)) == 0


def test_gauge_kind4_rescales_both_arguments():
    base = RMatrixSpec(algebra=A1, family="TrigSpectral", X=A1.root_system.simple_roots)
    a, b = 0.8, 1.7
    gauged = gauge_apply(base, GaugeRecord(kind=4, scale=(a, b)))
    lam = _rand_lam(1, 9)
    z = 0.23 - 0.11j
    got = eval_spectral(gauged, lam, z)
    want = eval_spectral(base, lam.scale(a), b * z).scale(a)
    assert np.max(np.abs(got.data - want.data)) < 1e-14


def test_gauge_kind4_halves_rational_spectral():
    base = RMatrixSpec(algebra=A1, family="RationalSpectral", X=())
    gauged = gauge_apply(base, GaugeRecord(kind=4, scale=(1.0, 2.0)))
    lam = _rand_lam(1, 10)
    z = 0.42
    got = eval_spectral(gauged, lam, z)
    want = casimir(A1).scale(1.0 / (2 * z))
    assert np.max(np.abs(got.data - want.data)) < 1e-15
    assert effective_coupling(gauged) == pytest.approx(0.5)


def test_effective_coupling_folding():
    const = RMatrixSpec(algebra=A1, family="RationalConstant", X=_full_X(A1))
    assert effective_coupling(const) == 0.0
    cot = RMatrixSpec(algebra=A1, family="TrigCotanh", eps=2.0)
    assert effective_coupling(cot) == 2.0
    cot4 = gauge_apply(cot, GaugeRecord(kind=4, scale=(2.0, 1.0)))
    assert effective_coupling(cot4) == 4.0
    spec = RMatrixSpec(algebra=A1, family="EllipticSpectral", tau=1j)
    assert effective_coupling(spec) == 1.0
    stacked = gauge_apply(
        gauge_apply(spec, GaugeRecord(kind=4, scale=(1.0, 2.0))),
        GaugeRecord(kind=4, scale=(3.0, 1.0)),
    )
    assert effective_coupling(stacked) == pytest.approx(1.5)


def test_eval_rmatrix_dispatches():
    const = RMatrixSpec(algebra=A1, family="RationalConstant", X=_full_X(A1))
    lam = _lam_with_pairing(A1, 2.0)
    assert np.array_equal(eval_rmatrix(const, lam).data, eval_constant(const, lam).data)
    spec = RMatrixSpec(algebra=A1, family="RationalSpectral", X=())
    assert np.array_equal(
        eval_rmatrix(spec, lam, 0.3).data, eval_spectral(spec, lam, 0.3).data
    )


# ---------------------------------------------------------------- derivatives

def _spec_zoo(algebra):
    rs = algebra.root_system
    full = tuple(range(rs.n_roots))
    zoo = [
        (RMatrixSpec(algebra=algebra, family="RationalConstant", X=full), None),
        (RMatrixSpec(algebra=algebra, family="TrigCotanh", eps=2.0), None),
        (RMatrixSpec(algebra=algebra, family="TrigDegenerate", eps=1.0,
                     X=rs.simple_roots[:1]), None),
        (RMatrixSpec(algebra=algebra, family="EllipticSpectral", tau=1j), 0.31 - 0.27j),
        (RMatrixSpec(algebra=algebra, family="TrigSpectral", X=rs.simple_roots), 0.41 - 0.15j),
        (RMatrixSpec(algebra=algebra, family="RationalSpectral", X=full), 0.52 + 0.2j),
    ]
    return zoo


@pytest.mark.parametrize("idx", range(6))
def test_dlambda_analytic_matches_finite_difference(idx):
    spec, z = _spec_zoo(A2)[idx]
    lam = CartanVector.of([0.83, -0.54])
    an = eval_dlambda(spec, lam, z, mode="analytic")
    fd = eval_dlambda(spec, lam, z, mode="finite-difference", fd_step=1e-5)
    scale = max(1.0, an.norm())
    assert np.max(np.abs(an.data - fd.data)) < 1e-6 * scale


def test_dlambda_constant_in_lam_is_zero():
    spec = RMatrixSpec(algebra=A2, family="TrigDegenerate", eps=1.0, X=())
    d = eval_dlambda(spec, CartanVector.of([0.3, 0.9]))
    assert d.norm() == 0.0


def test_dlambda_rational_hand_value():
    spec = RMatrixSpec(algebra=A1, family="RationalConstant", X=_full_X(A1))
    lam = _lam_with_pairing(A1, 2.0)
    d = eval_dlambda(spec, lam)
    rs = A1.root_system
    pos = rs.positive_roots[0]
    # d/dlam of 1/(a, lam) = -a / (a, lam)^2 = -a/4
    a = rs.roots[pos][0]
    e, f = A1.root_basis_index(pos), A1.root_basis_index(rs.neg(pos))
    assert d.data[0, e, f] == pytest.approx(-a / 4.0, abs=1e-14)
    assert d.data[0, f, e] == pytest.approx(a / 4.0, abs=1e-14)


def test_dlambda_threads_kind2_gauge():
    base = RMatrixSpec(algebra=A1, family="EllipticSpectral", tau=2j)
    q = np.array([[0.4]])
    v = np.array([0.2])
    gauged = gauge_apply(base, GaugeRecord(kind=2, psi=(q, v)))
    lam = CartanVector.of([0.67])
    z = 0.3 - 0.33j
    an = eval_dlambda(gauged, lam, z, mode="analytic")
    fd = eval_dlambda(gauged, lam, z, mode="finite-difference")
    assert np.max(np.abs(an.data - fd.data)) < 1e-6 * max(1.0, an.norm())


# ---------------------------------------------------------------- poles

def test_pole_proximity_raises():
    spec = RMatrixSpec(algebra=A1, family="RationalConstant", X=_full_X(A1))
    with pytest.raises(PoleProximity):
        eval_constant(spec, CartanVector.of([1e-12]))
    spectral = RMatrixSpec(algebra=A1, family="RationalSpectral", X=())
    with pytest.raises(PoleProximity):
        eval_spectral(spectral, CartanVector.of([0.5]), 1e-12)


def test_pole_margin_reports_distance():
    spec = RMatrixSpec(algebra=A1, family="RationalConstant", X=_full_X(A1))
    near = pole_margin(spec, CartanVector.of([0.01]))
    far = pole_margin(spec, CartanVector.of([1.0]))
    assert near < far
    assert near == pytest.approx(0.01 * math.sqrt(2.0), rel=1e-12)
    # spectral margin includes the z lattice
    sp = RMatrixSpec(algebra=A1, family="TrigSpectral", X=A1.root_system.simple_roots)
    assert pole_margin(sp, CartanVector.of([0.7]), 0.05) == pytest.approx(0.05, rel=1e-9)


def test_pole_margin_folds_gauge_arguments():
    base = RMatrixSpec(algebra=A1, family="RationalSpectral", X=())
    gauged = gauge_apply(base, GaugeRecord(kind=4, scale=(1.0, 10.0)))
    lam = CartanVector.of([0.5])
    assert pole_margin(gauged, lam, 0.03) == pytest.approx(0.3, rel=1e-12)


# ---------------------------------------------------------------- serialization

def _fancy_spec():
    c = np.array([[0.0, 0.3 + 0.1j], [-0.3 - 0.1j, 0.0]])
    spec = RMatrixSpec(
        algebra=A2,
        family="EllipticSpectral",
        tau=0.2 + 1.4j,
        nu=CartanVector.of([0.11, -0.07 + 0.02j]),
        C=c,
    )
    spec = gauge_apply(spec, GaugeRecord(kind=1, c_matrix=np.array([[0, 1j], [-1j, 0]])))
    spec = gauge_apply(spec, GaugeRecord(kind=2, psi=(np.eye(2) * 0.2, np.array([0.5, 0.1]))))
    spec = gauge_apply(spec, GaugeRecord(kind=3, shift=CartanVector.of([0.03, -0.2])))
    spec = gauge_apply(spec, GaugeRecord(kind=4, scale=(0.7, 1.3)))
    return spec


def test_serialization_round_trip():
    spec = _fancy_spec()
    doc = spec_to_json(spec)
    back = spec_from_json(doc, A2)
    assert spec_to_json(back) == doc
    lam = CartanVector.of([0.51, -0.38])
    z = 0.22 - 0.35j
    r0 = eval_spectral(spec, lam, z)
    r1 = eval_spectral(back, lam, z)
    assert np.max(np.abs(r0.data - r1.data)) == 0


def test_serialization_keeps_debug_fields():
    spec = RMatrixSpec(
        algebra=A1, family="RationalConstant", X=_full_X(A1),
        debug_flip_root=0, debug_scale_omega=2.0,
    )
    back = spec_from_json(spec_to_json(spec), A1)
    assert back.debug_flip_root == 0
    assert back.debug_scale_omega == 2.0 + 0j
    lam = _lam_with_pairing(A1, 2.0)
    assert np.array_equal(eval_constant(spec, lam).data, eval_constant(back, lam).data)


def test_serialization_algebra_mismatch():
    spec = RMatrixSpec(algebra=A1, family="RationalConstant", X=_full_X(A1))
    with pytest.raises(SpecInvalid):
        spec_from_json(spec_to_json(spec), A2)


def test_json_values_are_plain_types():
    import json

    doc = spec_to_json(_fancy_spec())
    json.dumps(doc)  # must not hit numpy scalars


# ---------------------------------------------------------------- family_phi

def test_family_phi_values():
    rs = A1.root_system
    pos = rs.positive_roots[0]
    rational = RMatrixSpec(algebra=A1, family="RationalConstant", X=_full_X(A1))
    lam = _lam_with_pairing(A1, 2.0)
    assert family_phi(rational, lam, pos) == pytest.approx(0.5)
    # identity-bearing part of the cotanh family drops the eps/2 shift
    cot = RMatrixSpec(algebra=A1, family="TrigCotanh", eps=2.0)
    lam2 = _lam_with_pairing(A1, math.log(2.0))
    assert family_phi(cot, lam2, pos) == pytest.approx(5.0 / 3.0, abs=1e-13)
    ell = RMatrixSpec(algebra=A1, family="EllipticSpectral", tau=1j)
    a = 0.37
    lam3 = _lam_with_pairing(A1, a)
    z = 0.21 - 0.4j
    want = sigma_w(-a, z, ThetaParams(tau=1j))
    assert family_phi(ell, lam3, pos, z=z) == pytest.approx(want, rel=1e-13)
