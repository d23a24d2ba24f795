"""The local mirror model: xy = (u+1)^k over the Novikov field.

Points are sampled Novikov-coordinate tuples at finite truncation (the full
MaxSpec is never materialized).  Charts:

  g+ : (xi, eta) -> (x, y, u) = (xi, (1/xi)(1+eta)^k, eta)
  g- : (xi, eta) -> (xi (1+eta)^k, 1/xi, eta)

tropical projection  p_k(x,y,u) = (min(0, val x), min(0, val y), val u),
piecewise-affine base maps f+/f-, the transition
(xi-, eta-) -> (xi-(1+eta-)^k, eta-), and the induced wall-crossing
substitution on lattice series:  eta -> eta,  xi -> xi (1+eta)^k  (both
sides of the wall; which expansion of negative powers converges is decided
by the polygon).  Volume-form pullback and wall-crossing log-Jacobian
certificates are produced symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import sympy

from .errors import NonUnit, OnDivisor, PrecisionLoss
from .nodal import NodalPolygon, NodeFrame, TaggedHalfspace
from .novikov import NovikovScalar
from .polytopes import RationalPolygon
from .qmath import INF, Q, is_inf
from .series import ETA_EXP, XI_EXP, LatticeSeries, eta, xi
from .qmath import fmt_q


# -- points ---------------------------------------------------------------


@dataclass(frozen=True)
class NovikovPoint:
    """Ambient point of the local model at finite truncation."""

    x: NovikovScalar
    y: NovikovScalar
    u: NovikovScalar
    k: int

    def relation_defect(self) -> NovikovScalar:
        """x y - (u+1)^k; zero up to the common truncation on the model."""
        return self.x * self.y - (self.u + NovikovScalar.one()).power(self.k)

    def on_model(self) -> bool:
        d = self.relation_defect()
        return d.is_zero_up_to_truncation()


def _min0(value, exact: bool):
    """min(0, val) with honest precision handling: an inexact bound > 0
    still decides min = 0; an inexact bound <= 0 decides nothing."""
    if exact:
        return min(Q(0), value) if not is_inf(value) else Q(0)
    if value > 0:
        return Q(0)
    raise PrecisionLoss(
        f"min(0, val) undecidable: val only bounded below by {fmt_q(value)}"
    )


def pk_of_point(p: NovikovPoint):
    """(min(0, val x), min(0, val y), val u); PrecisionLoss when a min(0, .)
    decision needs more precision, NonUnit when u is not a unit."""
    vx, vy, vu = p.x.val(), p.y.val(), p.u.val()
    if not vu.exact or is_inf(vu.value):
        raise NonUnit("u must be a unit with definite valuation")
    return (_min0(vx.value, vx.exact), _min0(vy.value, vy.exact), vu.value)


def g_chart(side: str, k: int, xi_val: NovikovScalar, eta_val: NovikovScalar, cutoff=None) -> NovikovPoint:
    """Chart embeddings; xi, eta must be units."""
    for name, s in (("xi", xi_val), ("eta", eta_val)):
        v = s.val()
        if not v.exact or is_inf(v.value):
            raise NonUnit(f"{name} is not a unit at this truncation")
    if cutoff is None:
        hint = max(
            abs(xi_val.exact_val()), abs(eta_val.exact_val()), Q(1)
        )
        cutoff = 2 * (k + 1) * hint + 4
    one_eta_k = (eta_val + NovikovScalar.one()).power(k)
    inv_xi = xi_val.unit_inverse(Q(cutoff))
    if side == "+":
        return NovikovPoint(xi_val, (inv_xi * one_eta_k).truncate(cutoff), eta_val, k)
    if side == "-":
        return NovikovPoint(xi_val * one_eta_k, inv_xi, eta_val, k)
    raise ValueError(f"bad side {side!r}")


def f_base(side: str, k: int, v, u):
    """The piecewise-affine base maps covering p_k o g(side)."""
    v, u = Q(v), Q(u)
    if side == "+":
        if v <= 0:
            return (v, min(Q(0), k * u - v), u)
        return (Q(0), -v + min(k * u, Q(0)), u)
    if side == "-":
        if v <= 0:
            return (v + min(Q(0), k * u), Q(0), u)
        return (min(v + k * u, Q(0)), -v, u)
    raise ValueError(f"bad side {side!r}")


def transition_charts(k: int, xi_m: NovikovScalar, eta_m: NovikovScalar):
    """(xi-, eta-) -> (xi+, eta+) = (xi- (1+eta-)^k, eta-)."""
    w = eta_m + NovikovScalar.one()
    if w.is_zero_up_to_truncation():
        raise OnDivisor("eta = -1 up to truncation")
    return ((xi_m * w.power(k)), eta_m)


def trop_point(xi_val: NovikovScalar, eta_val: NovikovScalar):
    """Tropicalization of a chart point: (val xi, val eta)."""
    return (xi_val.exact_val(), eta_val.exact_val())


# -- wall crossing on series -------------------------------------------------


@dataclass(frozen=True)
class WallCrossSpec:
    """One wall crossing: multiplicity, side of the wall, output precision,
    and the reference polygon deciding convergence of expansions."""

    k: int
    side: str  # 'upper' or 'lower'
    cutoff: Fraction
    polygon: RationalPolygon

    def __post_init__(self):
        if self.side not in ("upper", "lower"):
            raise ValueError(f"bad side {self.side!r}")
        object.__setattr__(self, "cutoff", Q(self.cutoff))


def wall_cross_series(spec: WallCrossSpec, f: LatticeSeries, inverse: bool = False) -> LatticeSeries:
    """Apply eta -> eta, xi -> xi (1+eta)^k to a series.

    The formal formula is side-independent; the side enters through
    spec.polygon, which governs which geometric expansions of negative
    powers of (1+eta) converge.  The input's formal term list is
    reinterpreted over spec.polygon (exact series only, unless the input
    already lives there); `inverse=True` applies xi -> xi (1+eta)^{-k}.
    """
    if f.reference != spec.polygon:
        f = f.with_reference(spec.polygon)
    base = LatticeSeries.one(spec.polygon) + eta(spec.polygon)
    k = -spec.k if not inverse else spec.k
    # x^{e_1} = xi^{-1} picks up (1+eta)^{-k}; xi itself gets (1+eta)^{+k}
    images = [((1, 0), base, k), None]
    return f.substitute(images, spec.cutoff)


def wall_cross_iterated(spec: WallCrossSpec, f: LatticeSeries, times=None) -> LatticeSeries:
    """k-fold iteration of the multiplicity-1 crossing (factorization)."""
    times = spec.k if times is None else times
    unit_spec = WallCrossSpec(1, spec.side, spec.cutoff, spec.polygon)
    out = f
    for _ in range(times):
        out = wall_cross_series(unit_spec, out)
    return out


# -- the canonical node polygon P(a) ------------------------------------------


def polygon_Pa(k: int, a, frame: NodeFrame | None = None) -> NodalPolygon:
    """P(a): the valuation-cube polygon around a multiplicity-k node.

    In local coordinates: |u| <= a, v >= -a ('+' straight left edge), and
    v <= a in '-' chart coordinates (the sheared right edge).
    """
    a = Q(a)
    if a <= 0:
        raise ValueError("a must be positive")
    frame = frame or NodeFrame.standard(k)
    return NodalPolygon.from_tagged(
        frame,
        (
            TaggedHalfspace("+", (1, 0), -a),
            TaggedHalfspace("-", (-1, 0), -a),
            TaggedHalfspace("-", (0, 1), -a),
            TaggedHalfspace("-", (0, -1), -a),
        ),
    )


def pa_contains_trop(k: int, a, side: str, v, u) -> bool:
    """Membership of a chart tropical point in P(a) through the cube:
    j(f_side(v,u)) in [-a, 0]^4."""
    a = Q(a)
    x, y, c = f_base("+" if side == "+" else "-", k, v, u)
    coords = (x, y, min(Q(0), c), min(Q(0), -c))
    return all(-a <= t <= 0 for t in coords)


# -- symbolic volume certificates ----------------------------------------------


def volume_pullback_check(k: int, side: str):
    """g(side)^* (dx ^ du / (x u)) == dxi/xi ^ deta/eta, symbolically.

    Returns (True, certificate) or (False, residual).
    """
    xis, etas = sympy.symbols("xi eta", positive=True)
    if side == "+":
        x = xis
    elif side == "-":
        x = xis * (1 + etas) ** k
    else:
        raise ValueError(f"bad side {side!r}")
    u = etas
    # dx ^ du / (x u) expressed in the (xi, eta) basis:
    # dx = x_xi dxi + x_eta deta; du = deta
    coeff = sympy.simplify(sympy.diff(x, xis) / (x * u))
    # dx ^ du = x_xi dxi ^ deta, so the form is coeff * dxi ^ deta
    target = sympy.simplify(1 / (xis * etas))
    residual = sympy.simplify(coeff - target)
    ok = residual == 0
    cert = f"g{side}* (dx^du/(xu)) = ({sympy.simplify(coeff * xis * etas)}) * dxi/xi ^ deta/eta"
    return ok, cert


def wallcross_log_jacobian(k: int):
    """det of the log-coordinate Jacobian of (xi,eta) -> (xi(1+eta)^k, eta);
    returns (det == 1, certificate).  The off-diagonal d log(1+eta) entry
    contributes nothing because it pairs with d log eta alone."""
    l1, l2 = sympy.symbols("L1 L2", real=True)
    log_xi_new = l1 + k * sympy.log(1 + sympy.exp(l2))
    log_eta_new = l2
    jac = sympy.Matrix(
        [
            [sympy.diff(log_xi_new, l1), sympy.diff(log_xi_new, l2)],
            [sympy.diff(log_eta_new, l1), sympy.diff(log_eta_new, l2)],
        ]
    )
    det = sympy.simplify(jac.det())
    return det == 1, f"d log xi' ^ d log eta' = ({det}) d log xi ^ d log eta"
