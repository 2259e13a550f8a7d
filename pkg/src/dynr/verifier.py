"""Residual computation, axiom checks, and cross-validation runs.

Everything here consumes an RMatrixSpec and produces either raw residual
tensors or a structured VerificationReport.  Sampling is seeded and
rejects points too close to coefficient poles, so reports are
reproducible byte for byte (modulo the wall-time field).
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    PoleProximity,
    RootSumNonzero,
    SamplingExhausted,
    SpecInvalid,
    SubalgebraInvalid,
)
from .lie_core import CartanVector, SimpleLieAlgebra, casimir, pairing
from .rmatrix import (
    SPECTRAL_FAMILIES,
    GaugeRecord,
    RMatrixSpec,
    effective_coupling,
    eval_constant,
    eval_dlambda,
    eval_rmatrix,
    eval_spectral,
    family_phi,
    gauge_apply,
    pole_margin,
    spec_to_json,
)
from .special_fn import ThetaParams, classical_series, rho_fn, sigma_w, sigma_w_dw
from .tensor_alg import Tensor2, Tensor3, act_diag, alt3, bracket_legs

__all__ = [
    "SamplePlan",
    "CheckResult",
    "VerificationReport",
    "LimitSchedule",
    "LimitComparison",
    "sample_lambda",
    "sample_spectral_point",
    "cdybe_residual_constant",
    "cdybe_residual_spectral",
    "cdybe_residual",
    "check_axioms",
    "extract_residue",
    "check_phi_triangle",
    "phi_ode_residual",
    "addition_identity_residual",
    "limit_compare",
    "reduce_pair_check",
    "affine_series_check",
    "affine_hat_spec",
    "spec_digest",
]

_ZERO_WEIGHT_TOL = 1e-12
_UNITARITY_TOL = 1e-11
_RESIDUE_TOL = 1e-8
_RESIDUAL_TOL_ANALYTIC = 1e-8
_RESIDUAL_TOL_FD = 1e-6
_SKEW_TOL = 1e-10
_RESIDUAL_WEIGHT_TOL = 1e-11
_CONTROL_THRESHOLD = 1e-3


@dataclass(frozen=True)
class SamplePlan:
    """Seeded sampling policy for verification runs.

    box bounds apply to both the real and imaginary part of every lambda
    coordinate; z_box likewise for each spectral point.  Points whose
    pole_margin falls below the floor are redrawn, up to max_resamples
    per requested sample.
    """

    seed: int = 42
    count: int = 10
    box: tuple = (-2.0, 2.0)
    z_box: tuple = (-0.6, 0.6)
    pole_margin: float = 0.1
    max_resamples: int = 500

    def __post_init__(self):
        if self.count < 1:
            raise SpecInvalid("sample count must be >= 1")
        if not self.pole_margin > 0:
            raise SpecInvalid("pole_margin must be positive")
        if len(self.box) != 2 or not self.box[0] < self.box[1]:
            raise SpecInvalid("box must be an increasing (lo, hi) pair")
        if len(self.z_box) != 2 or not self.z_box[0] < self.z_box[1]:
            raise SpecInvalid("z_box must be an increasing (lo, hi) pair")


@dataclass(frozen=True)
class CheckResult:
    name: str
    tolerance: float
    residuals: tuple
    n_samples: int

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    @property
    def passed(self) -> bool:
        return self.n_samples > 0 and self.max_residual <= self.tolerance


@dataclass
class VerificationReport:
    spec_id: str
    algebra_id: str
    seed: int
    checks: list
    samples_used: int
    wall_time: float
    version: int = 1

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self, include_timing: bool = True) -> dict:
        doc = {
            "version": self.version,
            "spec": self.spec_id,
            "algebra": self.algebra_id,
            "seed": self.seed,
            "samples_used": self.samples_used,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "tolerance": c.tolerance,
                    "max_residual": c.max_residual,
                    "n_samples": c.n_samples,
                    "pass": c.passed,
                }
                for c in self.checks
            ],
        }
        if include_timing:
            doc["wall_time"] = self.wall_time
        return doc


def spec_digest(spec: RMatrixSpec) -> str:
    """Short stable identifier: family name plus a hash of the spec JSON."""
    doc = json.dumps(spec_to_json(spec), sort_keys=True)
    h = hashlib.sha256(doc.encode()).hexdigest()[:12]
    return f"{spec.family}:{h}"


def _algebra_id(g: SimpleLieAlgebra) -> str:
    return f"{g.root_system.series}{g.root_system.rank}"


def _draw_vector(rng, rank: int, box, im_box=None) -> np.ndarray:
    lo, hi = box
    ilo, ihi = im_box if im_box is not None else box
    return rng.uniform(lo, hi, rank) + 1j * rng.uniform(ilo, ihi, rank)


def _lambda_im_box(spec: RMatrixSpec, plan: SamplePlan):
    # Theta-quotient coefficients grow double-exponentially in the imaginary
    # part of the root pairings while being quasi-periodic in them, so wide
    # imaginary sampling only inflates magnitudes without adding coverage.
    # Keep Im(lambda) at half the z_box scale for the elliptic family.
    if spec.family != "EllipticSpectral":
        return None
    lo, hi = plan.z_box
    return (0.5 * lo, 0.5 * hi)


def sample_lambda(spec: RMatrixSpec, plan: SamplePlan, rng) -> CartanVector:
    """One lambda from the plan box with pole margin at least the floor."""
    rank = spec.algebra.root_system.rank
    im_box = _lambda_im_box(spec, plan)
    for _ in range(plan.max_resamples):
        lam = CartanVector.of(_draw_vector(rng, rank, plan.box, im_box))
        if pole_margin(spec, lam) >= plan.pole_margin:
            return lam
    raise SamplingExhausted(
        f"no lambda with pole margin {plan.pole_margin} in {plan.max_resamples} draws"
    )


def sample_spectral_point(spec: RMatrixSpec, plan: SamplePlan, rng):
    """(lambda, (z1, z2, z3)) with every pairwise difference pole-free.

    Margins are enforced for +-z_ij so unitarity checks can evaluate the
    reflected arguments too.
    """
    rank = spec.algebra.root_system.rank
    im_box = _lambda_im_box(spec, plan)
    for _ in range(plan.max_resamples):
        lam = CartanVector.of(_draw_vector(rng, rank, plan.box, im_box))
        zs = [complex(w) for w in _draw_vector(rng, 3, plan.z_box)]
        diffs = (zs[0] - zs[1], zs[0] - zs[2], zs[1] - zs[2])
        margins = [pole_margin(spec, lam, d) for d in diffs]
        margins += [pole_margin(spec, lam, -d) for d in diffs]
        if min(margins) >= plan.pole_margin:
            return lam, tuple(zs)
    raise SamplingExhausted(
        f"no spectral point with pole margin {plan.pole_margin} "
        f"in {plan.max_resamples} draws"
    )


def cdybe_residual_constant(
    spec: RMatrixSpec,
    lam: CartanVector,
    mode: str = "analytic",
    fd_step: float = 1e-5,
) -> Tensor3:
    """Alt(dr) + [r12,r13] + [r12,r23] + [r13,r23] for a constant spec."""
    r = eval_constant(spec, lam)
    d = eval_dlambda(spec, lam, None, mode=mode, fd_step=fd_step)
    out = alt3(d)
    for placement in ("12-13", "12-23", "13-23"):
        out = out + bracket_legs(r, r, placement)
    return out


def cdybe_residual_spectral(
    spec: RMatrixSpec,
    lam: CartanVector,
    z1: complex,
    z2: complex,
    z3: complex,
    mode: str = "analytic",
    fd_step: float = 1e-5,
) -> Tensor3:
    """Spectral residual at the triple (z1, z2, z3).

    The symmetrized derivative term places the Cartan leg cyclically:
    x^(1) (dr)^{23}(z23) + x^(2) (dr)^{31}(z31) + x^(3) (dr)^{12}(z12),
    and the brackets pair the legs at the matching argument differences.
    """
    z12, z13, z23 = z1 - z2, z1 - z3, z2 - z3
    r12 = eval_spectral(spec, lam, z12)
    r13 = eval_spectral(spec, lam, z13)
    r23 = eval_spectral(spec, lam, z23)
    d23 = eval_dlambda(spec, lam, z23, mode=mode, fd_step=fd_step)
    d31 = eval_dlambda(spec, lam, -z13, mode=mode, fd_step=fd_step)
    d12 = eval_dlambda(spec, lam, z12, mode=mode, fd_step=fd_step)
    # (dr)^{31} carries r's legs at positions (3, 1) and the Cartan leg at
    # position 2, so output leg k reads input leg (2,0,1)[k]; (dr)^{12}
    # needs (1,2,0).  The two cycles are NOT interchangeable here.
    alt = (
        d23
        + d31.transpose_legs((2, 0, 1))
        + d12.transpose_legs((1, 2, 0))
    )
    out = alt + bracket_legs(r12, r13, "12-13")
    out = out + bracket_legs(r12, r23, "12-23")
    out = out + bracket_legs(r13, r23, "13-23")
    return out


def cdybe_residual(spec: RMatrixSpec, lam: CartanVector, zs=None, **kw) -> Tensor3:
    """Family-dispatching wrapper around the two residual assemblies."""
    if spec.family in SPECTRAL_FAMILIES:
        if zs is None:
            raise SpecInvalid("spectral spec needs a (z1, z2, z3) triple")
        return cdybe_residual_spectral(spec, lam, *zs, **kw)
    if zs is not None:
        raise SpecInvalid("constant spec takes no spectral points")
    return cdybe_residual_constant(spec, lam, **kw)


def extract_residue(
    spec: RMatrixSpec,
    lam: CartanVector,
    radius: float = 0.05,
    points: int = 16,
):
    """Contour average (1/M) sum_j z_j r(lam, z_j) over a circle at 0.

    Returns (residue tensor, eps estimate from projection onto the
    invariant tensor, sup deviation from that multiple).  Aliasing picks
    up only the z^{M-1} Laurent coefficient, negligible at this radius.
    """
    if spec.family not in SPECTRAL_FAMILIES:
        raise SpecInvalid("residue extraction needs a spectral family")
    if points < 4:
        raise SpecInvalid("need at least 4 contour points")
    g = spec.algebra
    acc = np.zeros((g.dim, g.dim), dtype=complex)
    for j in range(points):
        zj = radius * cmath.exp(2j * math.pi * j / points)
        acc += zj * eval_spectral(spec, lam, zj).data
    acc /= points
    omega = casimir(g).data
    eps_est = complex(np.vdot(omega, acc) / np.vdot(omega, omega))
    deviation = float(np.max(np.abs(acc - eps_est * omega)))
    return Tensor2(g, acc), eps_est, deviation


def check_phi_triangle(
    spec: RMatrixSpec,
    alpha: int,
    beta: int,
    gamma: int,
    lam: CartanVector,
    z_args=None,
) -> complex:
    """Left-hand side of the three-phi identity for roots summing to zero.

    Constant families: phi_a phi_b + phi_a phi_c + phi_c phi_b + eps^2/4
    (the eps = 0 case is the rational product identity).  Spectral
    families: phi_a(z13) phi_b(z23) + phi_b(z21) phi_c(z31)
    + phi_a(z12) phi_c(z32).
    """
    rs = spec.algebra.root_system
    total = [
        rs.coeffs[alpha][k] + rs.coeffs[beta][k] + rs.coeffs[gamma][k]
        for k in range(rs.rank)
    ]
    if any(c != 0 for c in total):
        raise RootSumNonzero(f"root triple {alpha},{beta},{gamma} does not sum to zero")
    spectral = spec.family in SPECTRAL_FAMILIES
    if not spectral:
        if z_args is not None:
            raise SpecInvalid("constant family takes no spectral arguments")
        pa = family_phi(spec, lam, alpha)
        pb = family_phi(spec, lam, beta)
        pc = family_phi(spec, lam, gamma)
        eps = effective_coupling(spec)
        return pa * pb + pa * pc + pc * pb + eps * eps / 4.0
    if z_args is None:
        z_args = (0.23 - 0.31j, -0.17 - 0.29j, 0.41 - 0.11j)
    z1, z2, z3 = (complex(w) for w in z_args)
    pa = lambda z: family_phi(spec, lam, alpha, z)
    pb = lambda z: family_phi(spec, lam, beta, z)
    pc = lambda z: family_phi(spec, lam, gamma, z)
    return (
        pa(z1 - z3) * pb(z2 - z3)
        + pb(z2 - z1) * pc(z3 - z1)
        + pa(z1 - z2) * pc(z3 - z2)
    )


def phi_ode_residual(
    spec: RMatrixSpec,
    alpha: int,
    lam: CartanVector,
    fd_step: float = 1e-6,
) -> float:
    """|phi'(a) + phi(a)^2 - (eps/2)^2| along the (alpha, lam) direction.

    phi' is a central finite difference of the identity-bearing phi with
    respect to a = (alpha, lam).  Constant ungauged families only.
    """
    if spec.family in SPECTRAL_FAMILIES:
        raise SpecInvalid("the phi ODE identity applies to constant families")
    if spec.gauge_stack:
        raise SpecInvalid("phi ODE identity is stated for ungauged specs")
    rs = spec.algebra.root_system
    root = np.asarray(rs.roots[alpha], dtype=float)
    step = fd_step * root / float(root @ root)
    lam_arr = lam.as_array()
    up = CartanVector.of(lam_arr + step)
    dn = CartanVector.of(lam_arr - step)
    d_phi = (family_phi(spec, up, alpha) - family_phi(spec, dn, alpha)) / (2 * fd_step)
    phi0 = family_phi(spec, lam, alpha)
    eps = effective_coupling(spec)
    return abs(d_phi + phi0 * phi0 - eps * eps / 4.0)


def addition_identity_residual(
    w: complex, u: complex, v: complex, params: ThetaParams
) -> complex:
    """Residual of the weighted addition law the elliptic family relies on.

    With t(z) = -rho(z) and mu(w, z) = -sigma_w(z):
    d mu/dw (w, u+v) - (t(u) + t(v)) mu(w, u+v) + mu(w, u) mu(w, v).
    """
    mu_d = -sigma_w_dw(w, u + v, params)
    t_sum = -(rho_fn(u, params) + rho_fn(v, params))
    return (
        mu_d
        - t_sum * (-sigma_w(w, u + v, params))
        + sigma_w(w, u, params) * sigma_w(w, v, params)
    )


def _residual_norms(spec, plan, rng, mode="analytic"):
    """Per-sample CDYBE residual norms plus the sampled points."""
    spectral = spec.family in SPECTRAL_FAMILIES
    norms, points = [], []
    for _ in range(plan.count):
        if spectral:
            lam, zs = sample_spectral_point(spec, plan, rng)
            res = cdybe_residual_spectral(spec, lam, *zs, mode=mode)
            points.append((lam, zs))
        else:
            lam = sample_lambda(spec, plan, rng)
            res = cdybe_residual_constant(spec, lam, mode=mode)
            points.append((lam, None))
        norms.append(res.norm())
    return norms, points


def _has_live_root_coefficient(spec, lam) -> bool:
    rs = spec.algebra.root_system
    z = 0.17 - 0.23j if spec.family in SPECTRAL_FAMILIES else None
    return any(
        abs(family_phi(spec, lam, p, z)) > 1e-12 for p in rs.positive_roots
    )


def check_axioms(spec: RMatrixSpec, plan: SamplePlan) -> VerificationReport:
    """Zero-weight, unitarity, residue, CDYBE, and symmetry checks.

    The negative-control entry re-runs the residual with one root
    coefficient sign-flipped and records threshold/residual, so its value
    is <= 1 exactly when the perturbation is loud; it is omitted for
    specs with no root coefficient to flip.
    """
    t0 = time.perf_counter()
    g = spec.algebra
    rs = g.root_system
    spectral = spec.family in SPECTRAL_FAMILIES
    rng = np.random.default_rng(plan.seed)
    eps = effective_coupling(spec)
    omega = casimir(g)

    zero_w, unit, resid, residue_dev, skew, res_weight = [], [], [], [], [], []
    first_point = None
    for _ in range(plan.count):
        if spectral:
            lam, zs = sample_spectral_point(spec, plan, rng)
            z12 = zs[0] - zs[1]
            r = eval_spectral(spec, lam, z12)
            refl = eval_spectral(spec, lam, -z12)
            unit.append((r + Tensor2(g, refl.data.T)).norm())
            _, eps_est, dev = extract_residue(spec, lam)
            residue_dev.append(max(dev, abs(eps_est - eps)))
            res = cdybe_residual_spectral(spec, lam, *zs)
            if first_point is None:
                first_point = (lam, zs)
        else:
            lam = sample_lambda(spec, plan, rng)
            r = eval_constant(spec, lam)
            unit.append((r + Tensor2(g, r.data.T) - omega.scale(eps)).norm())
            res = cdybe_residual_constant(spec, lam)
            skew.append((res + res.transpose_legs((1, 0, 2))).norm())
            if first_point is None:
                first_point = (lam, None)
        zero_w.append(max(act_diag(k, r).norm() for k in range(rs.rank)))
        res_weight.append(max(act_diag(k, res).norm() for k in range(rs.rank)))
        resid.append(res.norm())

    checks = [
        CheckResult("zero-weight", _ZERO_WEIGHT_TOL, tuple(zero_w), plan.count),
        CheckResult("unitarity", _UNITARITY_TOL, tuple(unit), plan.count),
        CheckResult("cdybe-residual", _RESIDUAL_TOL_ANALYTIC, tuple(resid), plan.count),
        CheckResult(
            "residual-weight-zero", _RESIDUAL_WEIGHT_TOL, tuple(res_weight), plan.count
        ),
    ]
    if spectral:
        checks.insert(
            2, CheckResult("residue", _RESIDUE_TOL, tuple(residue_dev), plan.count)
        )
    else:
        checks.append(
            CheckResult("residual-skew", _SKEW_TOL, tuple(skew), plan.count)
        )

    lam0 = first_point[0]
    if _has_live_root_coefficient(spec, lam0):
        flipped = replace(spec, debug_flip_root=int(rs.positive_roots[0]), validate=False)
        if spectral:
            control = cdybe_residual_spectral(flipped, lam0, *first_point[1]).norm()
        else:
            control = cdybe_residual_constant(flipped, lam0).norm()
        margin = _CONTROL_THRESHOLD / control if control > 0 else math.inf
        checks.append(CheckResult("negative-control-margin", 1.0, (margin,), 1))

    return VerificationReport(
        spec_id=spec_digest(spec),
        algebra_id=_algebra_id(g),
        seed=plan.seed,
        checks=checks,
        samples_used=plan.count,
        wall_time=time.perf_counter() - t0,
    )


@dataclass(frozen=True)
class LimitSchedule:
    """Parameter path for limit comparisons.

    parameter "tau": values are modular parameters substituted into an
    elliptic spec.  parameter "nu-ray": values are real weights t and the
    shift becomes base + t * ray.
    """

    parameter: str
    values: tuple
    base: Optional[CartanVector] = None
    ray: Optional[CartanVector] = None

    def __post_init__(self):
        if self.parameter not in ("tau", "nu-ray"):
            raise SpecInvalid(f"unknown schedule parameter {self.parameter!r}")
        if len(self.values) < 2:
            raise SpecInvalid("schedule needs at least two values")
        if self.parameter == "nu-ray" and (self.base is None or self.ray is None):
            raise SpecInvalid("nu-ray schedule needs base and ray vectors")


@dataclass(frozen=True)
class LimitComparison:
    cauchy: tuple
    final_deviation: Optional[float]
    n_samples: int

    @property
    def max_deviation(self) -> float:
        return self.final_deviation if self.final_deviation is not None else self.cauchy[-1]


def _spec_on_schedule(spec: RMatrixSpec, schedule: LimitSchedule, value) -> RMatrixSpec:
    if schedule.parameter == "tau":
        return replace(spec, tau=complex(value))
    shift = CartanVector.of(
        schedule.base.as_array() + float(value) * schedule.ray.as_array()
    )
    return replace(spec, nu=shift)


def limit_compare(
    spec_a: RMatrixSpec,
    schedule: LimitSchedule,
    spec_b: Optional[RMatrixSpec],
    plan: SamplePlan,
) -> LimitComparison:
    """Evaluate spec_a along the schedule; report Cauchy gaps and, when a
    target spec_b is given, the final sup deviation from it.

    Deviations are sup norms over a seeded sample grid valid for every
    scheduled spec (and the target).
    """
    staged = [_spec_on_schedule(spec_a, schedule, v) for v in schedule.values]
    probes = staged + ([spec_b] if spec_b is not None else [])
    spectral = {s.family in SPECTRAL_FAMILIES for s in probes}
    if len(spectral) != 1:
        raise SpecInvalid("cannot mix constant and spectral specs in a limit")
    spectral = spectral.pop()
    rng = np.random.default_rng(plan.seed)
    rank = spec_a.algebra.root_system.rank

    points = []
    for _ in range(plan.count):
        for _ in range(plan.max_resamples):
            lam = CartanVector.of(_draw_vector(rng, rank, plan.box))
            z = complex(_draw_vector(rng, 1, plan.z_box)[0]) if spectral else None
            if all(pole_margin(s, lam, z) >= plan.pole_margin for s in probes):
                points.append((lam, z))
                break
        else:
            raise SamplingExhausted("no sample point clears every scheduled spec")

    def sup_dev(sa, sb) -> float:
        out = 0.0
        for lam, z in points:
            d = (eval_rmatrix(sa, lam, z) - eval_rmatrix(sb, lam, z)).norm()
            out = max(out, d)
        return out

    cauchy = tuple(
        sup_dev(staged[i], staged[i + 1]) for i in range(len(staged) - 1)
    )
    final = sup_dev(staged[-1], spec_b) if spec_b is not None else None
    return LimitComparison(cauchy=cauchy, final_deviation=final, n_samples=len(points))


def _closure_of_pair_roots(rs, l_positive: Sequence[int]) -> tuple:
    pos = tuple(sorted(int(i) for i in set(l_positive)))
    for i in pos:
        if not rs.is_positive(i):
            raise SubalgebraInvalid(f"root index {i} is not positive")
    members = set(pos) | {rs.neg(i) for i in pos}
    for a in members:
        for b in members:
            s = rs.add(a, b)
            if s is not None and s not in members:
                raise SubalgebraInvalid(
                    "root set is not closed under addition; not a reductive subalgebra"
                )
    return tuple(sorted(members))


def reduce_pair_check(
    spec_tilde: RMatrixSpec,
    l_positive_roots: Sequence[int],
    plan: SamplePlan,
) -> VerificationReport:
    """Pair-reduction consistency run.

    Builds the projector part rho from the subalgebra's roots, splits the
    input as rest = r_tilde - rho, reassembles r_tilde = rest + rho from
    the pieces, and checks the reassembled function against the constant
    CDYBE; rho alone is checked at the tighter projector tolerance.
    """
    if spec_tilde.family in SPECTRAL_FAMILIES:
        raise SpecInvalid("pair reduction is stated for constant specs")
    g = spec_tilde.algebra
    members = _closure_of_pair_roots(g.root_system, l_positive_roots)
    rho_spec = RMatrixSpec(algebra=g, family="RationalConstant", X=members)

    t0 = time.perf_counter()
    rng = np.random.default_rng(plan.seed)
    sum_norms, rho_norms = [], []
    for _ in range(plan.count):
        for _ in range(plan.max_resamples):
            lam = CartanVector.of(
                _draw_vector(rng, g.root_system.rank, plan.box)
            )
            if (
                pole_margin(spec_tilde, lam) >= plan.pole_margin
                and pole_margin(rho_spec, lam) >= plan.pole_margin
            ):
                break
        else:
            raise SamplingExhausted("no lambda clears both the input and projector")

        rho_norms.append(cdybe_residual_constant(rho_spec, lam).norm())

        r_tilde = eval_constant(spec_tilde, lam)
        r_rho = eval_constant(rho_spec, lam)
        d_tilde = eval_dlambda(spec_tilde, lam)
        d_rho = eval_dlambda(rho_spec, lam)
        rest = r_tilde - r_rho
        d_rest = d_tilde - d_rho
        r_sum = rest + r_rho
        res = alt3(d_rest + d_rho)
        for placement in ("12-13", "12-23", "13-23"):
            res = res + bracket_legs(r_sum, r_sum, placement)
        sum_norms.append(res.norm())

    checks = [
        CheckResult("projector-cdybe", 1e-9, tuple(rho_norms), plan.count),
        CheckResult(
            "pair-sum-cdybe", _RESIDUAL_TOL_ANALYTIC, tuple(sum_norms), plan.count
        ),
    ]
    return VerificationReport(
        spec_id=spec_digest(spec_tilde),
        algebra_id=_algebra_id(g),
        seed=plan.seed,
        checks=checks,
        samples_used=plan.count,
        wall_time=time.perf_counter() - t0,
    )


def affine_hat_spec(algebra: SimpleLieAlgebra, tau: complex) -> RMatrixSpec:
    """Closed form of the loop-algebra series: a 1/(pi i) rescale (kind 4)
    of the elliptic spectral family at the same modular parameter."""
    base = RMatrixSpec(algebra=algebra, family="EllipticSpectral", tau=tau)
    return gauge_apply(base, GaugeRecord(kind=4, scale=(1.0 / (1j * math.pi), 1.0)))


def affine_series_check(
    lam: CartanVector,
    tau: complex,
    z: complex,
    n_terms: int,
    plan: Optional[SamplePlan] = None,
    algebra: Optional[SimpleLieAlgebra] = None,
) -> float:
    """Sup deviation between the truncated loop-algebra series and the
    closed-form evaluation, over all coefficient entries.

    The series route sums u^n (1 + coth(a + pi i tau n)) coefficientwise
    with u = e^{2 pi i z}; the closed route evaluates the kind-4 rescaled
    elliptic spec.  Raises ConvergenceFailure outside the series annulus.
    """
    if algebra is None:
        from .lie_core import build_root_system, build_simple_lie_algebra

        algebra = build_simple_lie_algebra(build_root_system("A", 1))
    rs = algebra.root_system
    if len(lam.coords) != rs.rank:
        raise SpecInvalid("lambda rank does not match the algebra")
    params = ThetaParams(tau=tau)
    u = cmath.exp(2j * math.pi * complex(z))

    data = np.zeros((algebra.dim, algebra.dim), dtype=complex)
    s0 = classical_series("rho-sum", u, 0.0, params, n_terms)
    for k in range(rs.rank):
        data[k, k] = s0
    for p in range(rs.n_roots):
        a = pairing(rs, lam, p)
        data[rs.rank + p, rs.rank + rs.neg(p)] = classical_series(
            "sigma-sum", u, a, params, n_terms
        )
    series_route = Tensor2(algebra, data)

    closed_route = eval_spectral(affine_hat_spec(algebra, tau), lam, complex(z))
    return (series_route - closed_route).norm()
