"""The r-matrix family catalog: specs, evaluation, derivatives, gauges.

Every family evaluates through one canonical shape: a Cartan coefficient
matrix M (for sum_ij M_ij x_i (x) x_j) plus one scalar coefficient per root
(for e_a (x) e_{-a}).  Constant families take a point of the Cartan dual;
spectral families take an extra complex argument z.  Gauge transformations
are stored as an ordered stack on the spec and folded in at evaluation
time, so a gauged spec evaluates exactly to the transformed function.

Analytic derivatives in the Cartan direction are threaded through the
gauge stack, so finite differences are only ever needed as an independent
cross-check.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .combinatorics import RootSubset, is_closed_subset
from .errors import PoleProximity, SpecInvalid, UnsupportedType
from .lie_core import CartanVector, SimpleLieAlgebra
from .special_fn import ThetaParams, coth_scaled, rho_fn, sigma_w, sigma_w_dw
from .tensor_alg import Tensor2, Tensor3

FAMILIES = (
    "RationalConstant",
    "TrigCotanh",
    "TrigDegenerate",
    "EllipticSpectral",
    "TrigSpectral",
    "RationalSpectral",
)
SPECTRAL_FAMILIES = ("EllipticSpectral", "TrigSpectral", "RationalSpectral")
_NEEDS_X = ("RationalConstant", "TrigDegenerate", "TrigSpectral", "RationalSpectral")
_POLE_THRESHOLD = 1e-8


def _as_complex_matrix(m, rank: int, name: str) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.shape != (rank, rank):
        raise SpecInvalid(f"{name} must be {rank}x{rank}, got {a.shape}")
    return a


@dataclass(frozen=True, eq=False)
class GaugeRecord:
    """One gauge transformation.

    kind 1: add a constant antisymmetric Cartan matrix (payload c_matrix).
    kind 2: diagonal shift z * Hess(psi) and factors e^{z L_a psi} on the
            root coefficients, psi(l) = l^T Q l / 2 + v^T l (payload psi).
    kind 3: shift the argument, l -> l - shift (payload shift).
    kind 4: r(l, z) -> a r(a l, b z) (payload scale = (a, b)).
    """

    kind: int
    c_matrix: Optional[np.ndarray] = None
    psi: Optional[tuple] = None
    shift: Optional[CartanVector] = None
    scale: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in (1, 2, 3, 4):
            raise SpecInvalid(f"gauge kind must be 1..4, got {self.kind}")
        if self.kind == 1:
            if self.c_matrix is None:
                raise SpecInvalid("kind-1 gauge needs c_matrix")
            c = np.asarray(self.c_matrix, dtype=complex)
            if np.max(np.abs(c + c.T)) > 1e-12:
                raise SpecInvalid("kind-1 matrix must be antisymmetric")
            object.__setattr__(self, "c_matrix", c)
        elif self.kind == 2:
            if self.psi is None:
                raise SpecInvalid("kind-2 gauge needs psi = (Q, v)")
            q = np.asarray(self.psi[0], dtype=complex)
            v = np.asarray(self.psi[1], dtype=complex)
            if q.ndim != 2 or q.shape[0] != q.shape[1] or v.shape != (q.shape[0],):
                raise SpecInvalid("psi payload shapes inconsistent")
            if np.max(np.abs(q - q.T)) > 1e-12:
                raise SpecInvalid("psi Hessian must be symmetric")
            object.__setattr__(self, "psi", (q, v))
        elif self.kind == 3:
            if self.shift is None:
                raise SpecInvalid("kind-3 gauge needs shift")
        else:
            if self.scale is None:
                raise SpecInvalid("kind-4 gauge needs scale = (a, b)")
            a, b = complex(self.scale[0]), complex(self.scale[1])
            if a == 0 or b == 0:
                raise SpecInvalid("kind-4 scale components must be nonzero")
            object.__setattr__(self, "scale", (a, b))


@dataclass(frozen=True, eq=False)
class RMatrixSpec:
    """Immutable description of one r-matrix, gauge stack included.

    X is a tuple of root indices: a closed subset for RationalConstant and
    RationalSpectral, a subset of the simple roots of the polarization for
    TrigDegenerate and TrigSpectral, and empty otherwise.  polarization is
    the positive-root index tuple (defaults to the standard one).  The two
    debug_* fields deliberately corrupt the evaluation and exist only to
    drive negative controls; validation rejects nothing about them.
    """

    algebra: SimpleLieAlgebra
    family: str
    eps: Optional[complex] = None
    nu: Optional[CartanVector] = None
    X: Optional[Sequence[int]] = None
    polarization: Optional[Sequence[int]] = None
    C: Optional[np.ndarray] = None
    psi_quad: Optional[tuple] = None
    tau: Optional[complex] = None
    gauge_stack: tuple = ()
    debug_flip_root: Optional[int] = None
    debug_scale_omega: complex = 1.0
    validate: bool = True

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecInvalid(f"unknown family {self.family!r}")
        rs = self.algebra.root_system
        rank = rs.rank

        members = self.X.members if isinstance(self.X, RootSubset) else (self.X or ())
        x = tuple(sorted(int(i) for i in members))
        object.__setattr__(self, "X", x)

        nu = self.nu if self.nu is not None else CartanVector.zero(rank)
        if len(nu.coords) != rank:
            raise SpecInvalid("nu has wrong dimension")
        object.__setattr__(self, "nu", nu)

        pol = tuple(sorted(int(i) for i in (self.polarization or rs.positive_roots)))
        object.__setattr__(self, "polarization", pol)

        c = _as_complex_matrix(self.C if self.C is not None else np.zeros((rank, rank)), rank, "C")
        object.__setattr__(self, "C", c)

        eps = self.eps
        if eps is None:
            eps = {"RationalConstant": 0.0}.get(self.family)
            if eps is None and self.family in SPECTRAL_FAMILIES:
                eps = 1.0
        if eps is None:
            raise SpecInvalid(f"{self.family} requires an explicit coupling eps")
        object.__setattr__(self, "eps", complex(eps))

        if self.psi_quad is not None:
            q = np.asarray(self.psi_quad[0], dtype=complex)
            v = np.asarray(self.psi_quad[1], dtype=complex)
            object.__setattr__(self, "psi_quad", (q, v))

        object.__setattr__(self, "tau", complex(self.tau) if self.tau is not None else None)
        object.__setattr__(self, "gauge_stack", tuple(self.gauge_stack))
        if self.validate:
            self._validate()
        # membership in the X-span, as a root subsystem (simple-subset families)
        span = frozenset()
        if self.family in ("TrigDegenerate", "TrigSpectral"):
            span = set(x) | {rs.neg(i) for i in x}
            grew = True
            while grew:
                grew = False
                for i in list(span):
                    for j in list(span):
                        s = rs.add(i, j)
                        if s is not None and s not in span:
                            span.add(s)
                            grew = True
            span = frozenset(span)
        object.__setattr__(self, "_span_set", span)
        object.__setattr__(self, "_pol_set", frozenset(pol))

    def _validate(self):
        rs = self.algebra.root_system
        for i in self.X:
            if not 0 <= i < rs.n_roots:
                raise SpecInvalid(f"root index {i} out of range")
        pol = set(self.polarization)
        if len(pol) * 2 != rs.n_roots:
            raise SpecInvalid("polarization must contain half of the roots")
        for i in pol:
            if rs.neg(i) in pol:
                raise SpecInvalid("polarization contains a root and its negative")
        for i in pol:
            for j in pol:
                s = rs.add(i, j)
                if s is not None and s not in pol:
                    raise SpecInvalid("polarization not closed under root addition")
        if self.family in ("RationalConstant", "RationalSpectral"):
            if not is_closed_subset(rs, self.X):
                raise SpecInvalid(f"{self.family} requires X closed under negation and addition")
        elif self.family in ("TrigDegenerate", "TrigSpectral"):
            simple_of_pol = {
                i for i in pol
                if not any(rs.add(j, k) == i for j in pol for k in pol)
            }
            if not set(self.X) <= simple_of_pol:
                raise SpecInvalid(f"{self.family} requires X inside the simple roots of the polarization")
        elif self.X:
            raise SpecInvalid(f"{self.family} takes no X")
        if self.family == "RationalConstant" and self.eps != 0:
            raise SpecInvalid("RationalConstant has zero coupling; eps must be 0")
        if self.family in ("TrigCotanh", "TrigDegenerate") and self.eps == 0:
            raise SpecInvalid(f"{self.family} requires eps != 0")
        if self.family in SPECTRAL_FAMILIES and self.eps != 1:
            raise SpecInvalid(f"{self.family} has base coupling 1; use a kind-4 gauge to rescale")
        if self.family == "EllipticSpectral":
            if self.tau is None or self.tau.imag <= 0:
                raise SpecInvalid("EllipticSpectral requires tau with Im tau > 0")
        elif self.tau is not None:
            raise SpecInvalid(f"{self.family} takes no tau")
        if np.max(np.abs(self.C + self.C.T)) > 1e-12:
            raise SpecInvalid("C must be antisymmetric")
        for g in self.gauge_stack:
            _check_gauge_against_family(self.family, g)

    @property
    def is_spectral(self) -> bool:
        return self.family in SPECTRAL_FAMILIES

    def theta_params(self) -> ThetaParams:
        return ThetaParams(tau=self.tau)


def _check_gauge_against_family(family: str, g: GaugeRecord):
    spectral = family in SPECTRAL_FAMILIES
    if g.kind == 2 and not spectral:
        raise SpecInvalid("kind-2 gauges apply to spectral families only")
    if g.kind == 4 and not spectral and complex(g.scale[1]) != 1:
        raise SpecInvalid("kind-4 gauge on a constant family must have b = 1")


def gauge_apply(spec: RMatrixSpec, g: GaugeRecord) -> RMatrixSpec:
    """Push one gauge record onto the spec's stack.

    The returned spec evaluates to the transformed function; the original
    is unchanged.
    """
    if not isinstance(g, GaugeRecord):
        raise SpecInvalid("gauge_apply expects a GaugeRecord")
    _check_gauge_against_family(spec.family, g)
    if g.kind == 2 and g.psi is not None and g.psi[0].shape[0] != spec.algebra.rank:
        raise SpecInvalid("psi dimension mismatch")
    if g.kind == 3 and len(g.shift.coords) != spec.algebra.rank:
        raise SpecInvalid("shift dimension mismatch")
    if g.kind == 1 and g.c_matrix.shape[0] != spec.algebra.rank:
        raise SpecInvalid("c_matrix dimension mismatch")
    return replace(spec, gauge_stack=spec.gauge_stack + (g,), validate=False)


def effective_coupling(spec: RMatrixSpec) -> complex:
    """Coupling constant of the evaluated function, gauge stack folded in.

    Base coupling is 0, eps, or 1 per family; each kind-4 record scales it
    by a/b (spectral) or a (constant); other kinds leave it alone.
    """
    eps = complex(spec.eps)
    for g in spec.gauge_stack:
        if g.kind == 4:
            a, b = g.scale
            eps *= a / b if spec.is_spectral else a
    return eps


def _require_margin(value: complex, what: str):
    if abs(value) < _POLE_THRESHOLD:
        raise PoleProximity(f"{what} magnitude {abs(value):.3e} below pole threshold")


def _base_eval(spec: RMatrixSpec, lam: np.ndarray, z: Optional[complex], want_d: bool):
    """Family formulas in canonical (M, phi, dphi) shape, debug knobs applied."""
    rs = spec.algebra.root_system
    rank, nr = rs.rank, rs.n_roots
    lamt = lam - spec.nu.as_array()
    pairings = rs.roots @ lamt  # (n_roots,)
    omega_scale = complex(spec.debug_scale_omega)
    eps = complex(spec.eps)
    m = spec.C.copy()
    phi = np.zeros(nr, dtype=complex)
    dphi = np.zeros((rank, nr), dtype=complex) if want_d else None
    fam = spec.family

    if fam == "RationalConstant":
        for p in spec.X:
            h = pairings[p]
            _require_margin(h, f"(root {p}, lam-nu)")
            phi[p] = 1.0 / h
            if want_d:
                dphi[:, p] = -rs.roots[p] / (h * h)
    elif fam in ("TrigCotanh", "TrigDegenerate"):
        m += omega_scale * (eps / 2) * np.eye(rank)
        half = eps / 2
        if fam == "TrigCotanh":
            cot_roots = range(nr)
        else:
            cot_roots = sorted(spec._span_set)
        phi += omega_scale * half
        for p in cot_roots:
            c = coth_scaled(eps, pairings[p])  # includes its own pole guard
            phi[p] += c
            if want_d:
                dphi[:, p] = (half * half - c * c) * rs.roots[p]
        if fam == "TrigDegenerate":
            for p in range(nr):
                if p not in spec._span_set:
                    phi[p] += half if p in spec._pol_set else -half
    elif fam == "EllipticSpectral":
        tp = spec.theta_params()
        m += omega_scale * rho_fn(z, tp) * np.eye(rank)
        for p in range(nr):
            w = -pairings[p]
            phi[p] = sigma_w(w, z, tp)
            if want_d:
                dphi[:, p] = sigma_w_dw(w, z, tp) * (-rs.roots[p])
    elif fam == "TrigSpectral":
        sz = cmath.sin(z)
        _require_margin(sz, "sin z")
        m += omega_scale * (cmath.cos(z) / sz) * np.eye(rank)
        for p in range(nr):
            if p in spec._span_set:
                sa = cmath.sin(pairings[p])
                _require_margin(sa, f"sin(root {p}, lam-nu)")
                phi[p] = cmath.sin(pairings[p] + z) / (sa * sz)
                if want_d:
                    dphi[:, p] = -rs.roots[p] / (sa * sa)
            else:
                sign = -1j if p in spec._pol_set else 1j
                phi[p] = cmath.exp(sign * z) / sz
    else:  # RationalSpectral
        _require_margin(z, "z")
        m += omega_scale * (1.0 / z) * np.eye(rank)
        phi += 1.0 / z
        for p in spec.X:
            h = pairings[p]
            _require_margin(h, f"(root {p}, lam-nu)")
            phi[p] += 1.0 / h
            if want_d:
                dphi[:, p] = -rs.roots[p] / (h * h)
    if spec.debug_flip_root is not None:
        phi[spec.debug_flip_root] *= -1
        if want_d:
            dphi[:, spec.debug_flip_root] *= -1
    return m, phi, dphi


def _evaluate(spec: RMatrixSpec, lam: np.ndarray, z: Optional[complex], idx: int, want_d: bool):
    if idx < 0:
        return _base_eval(spec, lam, z, want_d)
    g = spec.gauge_stack[idx]
    rs = spec.algebra.root_system
    if g.kind == 3:
        return _evaluate(spec, lam - g.shift.as_array(), z, idx - 1, want_d)
    if g.kind == 4:
        a, b = g.scale
        m, phi, dphi = _evaluate(spec, a * lam, (b * z if z is not None else None), idx - 1, want_d)
        return a * m, a * phi, (a * a * dphi if want_d else None)
    m, phi, dphi = _evaluate(spec, lam, z, idx - 1, want_d)
    if g.kind == 1:
        return m + g.c_matrix, phi, dphi
    # kind 2
    q, v = g.psi
    grad = q @ lam + v
    lvals = rs.roots @ grad  # L_a psi at the current lam, per root
    factors = np.exp(z * lvals)
    if want_d:
        qa = rs.roots @ q  # row p = Q a_p
        dphi = (dphi + phi[None, :] * (z * qa.T)) * factors[None, :]
    return m + z * q, phi * factors, dphi


def _assemble2(algebra: SimpleLieAlgebra, m: np.ndarray, phi: np.ndarray) -> Tensor2:
    rs = algebra.root_system
    data = np.zeros((algebra.dim, algebra.dim), dtype=complex)
    data[: rs.rank, : rs.rank] = m
    for p in range(rs.n_roots):
        data[algebra.root_basis_index(p), algebra.root_basis_index(rs.neg(p))] = phi[p]
    return Tensor2(algebra, data)


def eval_constant(spec: RMatrixSpec, lam: CartanVector) -> Tensor2:
    """Evaluate a constant-family spec at a Cartan point.

    Raises
    ------
    SpecInvalid for spectral tags; PoleProximity near coefficient poles.
    """
    if spec.is_spectral:
        raise SpecInvalid(f"{spec.family} needs eval_spectral")
    m, phi, _ = _evaluate(spec, lam.as_array(), None, len(spec.gauge_stack) - 1, False)
    return _assemble2(spec.algebra, m, phi)


def eval_spectral(spec: RMatrixSpec, lam: CartanVector, z: complex) -> Tensor2:
    """Evaluate a spectral-family spec at (lam, z)."""
    if not spec.is_spectral:
        raise SpecInvalid(f"{spec.family} needs eval_constant")
    m, phi, _ = _evaluate(spec, lam.as_array(), complex(z), len(spec.gauge_stack) - 1, False)
    return _assemble2(spec.algebra, m, phi)


def eval_rmatrix(spec: RMatrixSpec, lam: CartanVector, z: Optional[complex] = None) -> Tensor2:
    """Dispatch to eval_constant or eval_spectral by family."""
    return eval_spectral(spec, lam, z) if spec.is_spectral else eval_constant(spec, lam)


def eval_dlambda(
    spec: RMatrixSpec,
    lam: CartanVector,
    z: Optional[complex] = None,
    mode: str = "analytic",
    fd_step: float = 1e-5,
) -> Tensor3:
    """Cartan-direction derivative tensor sum_i x_i (x) dr/dx_i.

    The first leg lives in the Cartan span.  Analytic mode differentiates
    the closed-form coefficients (threaded through the gauge stack);
    finite-difference mode evaluates the full tensor at lam +- h e_i.

    Raises
    ------
    SpecInvalid on a bad mode or a missing/extra z; PoleProximity near
    poles (including within a finite-difference step).
    """
    if spec.is_spectral and z is None:
        raise SpecInvalid("spectral family requires z")
    if not spec.is_spectral and z is not None:
        raise SpecInvalid(f"{spec.family} takes no z")
    algebra = spec.algebra
    rs = algebra.root_system
    data = np.zeros((algebra.dim,) * 3, dtype=complex)
    if mode == "analytic":
        _, _, dphi = _evaluate(spec, lam.as_array(), z, len(spec.gauge_stack) - 1, True)
        for p in range(rs.n_roots):
            bi, bj = algebra.root_basis_index(p), algebra.root_basis_index(rs.neg(p))
            data[: rs.rank, bi, bj] = dphi[:, p]
        return Tensor3(algebra, data)
    if mode != "finite-difference":
        raise SpecInvalid(f"unknown mode {mode!r}")
    base = lam.as_array()
    for i in range(rs.rank):
        step = np.zeros(rs.rank, dtype=complex)
        step[i] = fd_step
        up = _evaluate(spec, base + step, z, len(spec.gauge_stack) - 1, False)
        dn = _evaluate(spec, base - step, z, len(spec.gauge_stack) - 1, False)
        mdiff = (up[0] - dn[0]) / (2 * fd_step)
        pdiff = (up[1] - dn[1]) / (2 * fd_step)
        data[i, : rs.rank, : rs.rank] = mdiff
        for p in range(rs.n_roots):
            data[i, algebra.root_basis_index(p), algebra.root_basis_index(rs.neg(p))] = pdiff[p]
    return Tensor3(algebra, data)


def family_phi(spec: RMatrixSpec, lam: CartanVector, alpha: int, z: Optional[complex] = None) -> complex:
    """The family's own phi_alpha coefficient (identity-bearing form).

    For the constant eps-families this excludes the eps/2 contribution of
    the Casimir term, matching the functions the scalar triangle and ODE
    identities quantify over; for every other family it is the full
    e_alpha (x) e_{-alpha} coefficient.
    """
    m, phi, _ = _evaluate(spec, lam.as_array(), z, len(spec.gauge_stack) - 1, False)
    val = phi[int(alpha)]
    if spec.family in ("TrigCotanh", "TrigDegenerate"):
        val = val - complex(spec.debug_scale_omega) * complex(spec.eps) / 2
    return complex(val)


def cartan_block(spec: RMatrixSpec, lam: CartanVector, z: Optional[complex] = None) -> np.ndarray:
    """The Cartan coefficient matrix M(lam[, z])."""
    m, _, _ = _evaluate(spec, lam.as_array(), z, len(spec.gauge_stack) - 1, False)
    return m


def _lattice_distance(w: complex, periods) -> float:
    """Distance from w to the lattice spanned by the given periods."""
    if len(periods) == 1:
        p = periods[0]
        t = (w / p).real
        return min(abs(w - round(t + d) * p) for d in (-1, 0, 1))
    p1, p2 = periods
    mat = np.array([[p1.real, p2.real], [p1.imag, p2.imag]])
    xy = np.linalg.solve(mat, [w.real, w.imag])
    best = math.inf
    for dx in (math.floor(xy[0]), math.floor(xy[0]) + 1):
        for dy in (math.floor(xy[1]), math.floor(xy[1]) + 1):
            best = min(best, abs(w - (dx * p1 + dy * p2)))
    return best


def pole_margin(spec: RMatrixSpec, lam: CartanVector, z: Optional[complex] = None) -> float:
    """Smallest distance of any coefficient denominator argument to its poles.

    Used by the sampling layer to reject points too close to a pole before
    evaluation; the gauge stack's argument changes are folded in.
    """
    lam_eff = lam.as_array()
    z_eff = complex(z) if z is not None else None
    for g in reversed(spec.gauge_stack):
        if g.kind == 3:
            lam_eff = lam_eff - g.shift.as_array()
        elif g.kind == 4:
            a, b = g.scale
            lam_eff = a * lam_eff
            if z_eff is not None:
                z_eff = b * z_eff
    rs = spec.algebra.root_system
    pairings = rs.roots @ (lam_eff - spec.nu.as_array())
    vals = [math.inf]
    fam = spec.family
    if fam == "RationalConstant":
        vals += [abs(pairings[p]) for p in spec.X]
    elif fam in ("TrigCotanh", "TrigDegenerate"):
        half = complex(spec.eps) / 2
        rel = range(rs.n_roots) if fam == "TrigCotanh" else sorted(spec._span_set)
        vals += [_lattice_distance(half * pairings[p], [1j * math.pi]) for p in rel]
    elif fam == "EllipticSpectral":
        periods = [1 + 0j, complex(spec.tau)]
        vals += [_lattice_distance(-pairings[p], periods) for p in range(rs.n_roots)]
        vals.append(_lattice_distance(z_eff, periods))
    elif fam == "TrigSpectral":
        vals += [_lattice_distance(pairings[p], [math.pi + 0j]) for p in sorted(spec._span_set)]
        vals.append(_lattice_distance(z_eff, [math.pi + 0j]))
    else:
        vals += [abs(pairings[p]) for p in spec.X]
        vals.append(abs(z_eff))
    return float(min(vals))


def trig_constant_fixture(algebra: SimpleLieAlgebra, z: complex, polarization: Optional[Sequence[int]] = None) -> Tensor2:
    """Reference trigonometric solution 2i (O_- e^{2iz} + O_+) / (e^{2iz} - 1).

    O_+- are the half-Casimirs of the given polarization (standard one by
    default).  Provided as an independent comparison fixture.
    """
    rs = algebra.root_system
    pol = set(int(i) for i in (polarization or rs.positive_roots))
    dim = algebra.dim
    omega_plus = np.zeros((dim, dim), dtype=complex)
    omega_minus = np.zeros((dim, dim), dtype=complex)
    for k in range(rs.rank):
        omega_plus[k, k] = 0.5
        omega_minus[k, k] = 0.5
    for p in range(rs.n_roots):
        target = omega_plus if p in pol else omega_minus
        target[algebra.root_basis_index(p), algebra.root_basis_index(rs.neg(p))] = 1.0
    e2 = cmath.exp(2j * complex(z))
    den = e2 - 1
    if abs(den) < _POLE_THRESHOLD:
        raise PoleProximity("z too close to the pole lattice of the fixture")
    return Tensor2(algebra, 2j * (omega_minus * e2 + omega_plus) / den)


# --- serialization ---------------------------------------------------------


def _c2j(c: complex):
    c = complex(c)
    return [c.real, c.imag]


def _j2c(v) -> complex:
    return complex(float(v[0]), float(v[1]))


def _mat2j(m: np.ndarray):
    return [[_c2j(x) for x in row] for row in np.asarray(m, dtype=complex)]


def _j2mat(rows) -> np.ndarray:
    return np.array([[_j2c(x) for x in row] for row in rows], dtype=complex)


def _gauge_to_json(g: GaugeRecord) -> dict:
    if g.kind == 1:
        return {"kind": 1, "c_matrix": _mat2j(g.c_matrix)}
    if g.kind == 2:
        return {"kind": 2, "psi": {"Q": _mat2j(g.psi[0]), "v": [_c2j(x) for x in g.psi[1]]}}
    if g.kind == 3:
        return {"kind": 3, "shift": [_c2j(x) for x in g.shift.coords]}
    return {"kind": 4, "scale": [_c2j(g.scale[0]), _c2j(g.scale[1])]}


def _gauge_from_json(d: dict) -> GaugeRecord:
    kind = int(d["kind"])
    if kind == 1:
        return GaugeRecord(kind=1, c_matrix=_j2mat(d["c_matrix"]))
    if kind == 2:
        return GaugeRecord(kind=2, psi=(_j2mat(d["psi"]["Q"]), np.array([_j2c(x) for x in d["psi"]["v"]])))
    if kind == 3:
        return GaugeRecord(kind=3, shift=CartanVector(tuple(_j2c(x) for x in d["shift"])))
    return GaugeRecord(kind=4, scale=(_j2c(d["scale"][0]), _j2c(d["scale"][1])))


def spec_to_json(spec: RMatrixSpec) -> dict:
    """Lossless JSON document for the spec (complex numbers as [re, im])."""
    rs = spec.algebra.root_system
    return {
        "version": 1,
        "algebra": {"series": rs.series, "rank": rs.rank},
        "family": spec.family,
        "eps": _c2j(spec.eps),
        "nu": [_c2j(x) for x in spec.nu.coords],
        "X": list(spec.X),
        "polarization": list(spec.polarization),
        "C": _mat2j(spec.C),
        "psi_quad": None
        if spec.psi_quad is None
        else {"Q": _mat2j(spec.psi_quad[0]), "v": [_c2j(x) for x in spec.psi_quad[1]]},
        "tau": None if spec.tau is None else _c2j(spec.tau),
        "gauge_stack": [_gauge_to_json(g) for g in spec.gauge_stack],
        "debug_flip_root": spec.debug_flip_root,
        "debug_scale_omega": _c2j(spec.debug_scale_omega),
    }


def spec_from_json(doc: dict, algebra: SimpleLieAlgebra) -> RMatrixSpec:
    """Rebuild a spec from spec_to_json output over a compatible algebra."""
    rs = algebra.root_system
    want = doc.get("algebra", {})
    if (want.get("series"), want.get("rank")) != (rs.series, rs.rank):
        raise SpecInvalid(
            f"document is for {want.get('series')}{want.get('rank')}, got {rs.series}{rs.rank}"
        )
    return RMatrixSpec(
        algebra=algebra,
        family=doc["family"],
        eps=_j2c(doc["eps"]),
        nu=CartanVector(tuple(_j2c(x) for x in doc["nu"])),
        X=tuple(int(i) for i in doc["X"]),
        polarization=tuple(int(i) for i in doc["polarization"]),
        C=_j2mat(doc["C"]),
        psi_quad=None
        if doc.get("psi_quad") is None
        else (_j2mat(doc["psi_quad"]["Q"]), np.array([_j2c(x) for x in doc["psi_quad"]["v"]])),
        tau=None if doc.get("tau") is None else _j2c(doc["tau"]),
        gauge_stack=tuple(_gauge_from_json(g) for g in doc.get("gauge_stack", ())),
        debug_flip_root=doc.get("debug_flip_root"),
        debug_scale_omega=_j2c(doc.get("debug_scale_omega", [1.0, 0.0])),
        validate=False,
    )
