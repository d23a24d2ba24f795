"""Named invariant suites behind `tropmirror check <suite>`.

Each suite returns a RunReport with one line per check; the acceptance test
module drives the same functions, so the CLI and the test suite cannot
drift apart.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction as Q

from .bv import bv_delta, cluster_delta_oracle, cluster_element, PolyVector
from .diagrams import EigenrayDiagram
from .errors import MonodromyObstruction, UnknownSuite
from .filtered import random_complex
from .gluing import (
    BoundaryEdge,
    cocycle_check,
    hartogs_extend,
    monodromy_transport,
    sample_unit,
    is_degenerate_sample,
    shear_mat,
    shear_mat_inv,
)
from .local_model import (
    WallCrossSpec,
    f_base,
    g_chart,
    pk_of_point,
    polygon_Pa,
    trop_point,
    volume_pullback_check,
    wall_cross_iterated,
    wall_cross_series,
    wallcross_log_jacobian,
)
from .nodal import NodalPolygon, NodeFrame, TaggedHalfspace
from .novikov import NovikovScalar
from .polytopes import RationalPolygon
from .qmath import NEG_INF, is_inf
from .reports import RunReport
from .series import LatticeSeries, eta, xi

UPPER = RationalPolygon.from_vertices([(-1, 1), (1, 1), (-1, 2), (1, 2)])
LOWER = RationalPolygon.from_vertices([(-1, -2), (1, -2), (-1, -1), (1, -1)])


def suite_wallcross(seed=0, k_max=5, cutoff=Q(8)) -> RunReport:
    """xi -> xi (1+eta)^k with exact binomial coefficients; k-fold
    factorization of the multiplicity-k crossing."""
    report = RunReport("check wallcross", "-", seed)
    one = LatticeSeries.one(UPPER)
    for k in range(1, k_max + 1):
        spec = WallCrossSpec(k, "upper", cutoff, UPPER)
        got = wall_cross_series(spec, xi(UPPER))
        expect = xi(UPPER) * (one + eta(UPPER)).power(k)
        ok = got.congruent(expect, cutoff) and is_inf(got.tail)
        witness = str(got) if k == 1 else f"binomial({k}) exact"
        report.add(f"wallcross-k{k}", ok, witness)
        if k >= 2:
            iterated = wall_cross_iterated(spec, xi(UPPER))
            report.add(
                f"factorization-k{k}",
                got.congruent(iterated, cutoff),
                f"{k}-fold iteration of k=1",
            )
        report.add(f"eta-fixed-k{k}", wall_cross_series(spec, eta(UPPER)).congruent(eta(UPPER)))
    return report


def suite_monodromy(seed=0, k_max=5, cutoff=Q(10)) -> RunReport:
    """The eta-expansion identity (1+eta)^k = eta^k (1+eta^{-1})^k and the
    around-the-node closure of xi up to the lattice relabel."""
    report = RunReport("check monodromy", "-", seed)
    one = LatticeSeries.one(UPPER)
    etainv = LatticeSeries.monomial((0, -1), UPPER)
    for k in range(1, k_max + 1):
        lhs = (one + eta(UPPER)).power(k)
        rhs = eta(UPPER).power(k) * (one + etainv).power(k)
        report.add(
            f"identity-k{k}",
            lhs.congruent(rhs),
            "1+a1.eta+... = eta^k(1+b1/eta+...) term-exact",
        )
        res = monodromy_transport(k, xi(UPPER), cutoff, UPPER, LOWER)
        report.add(
            f"loop-closure-k{k}",
            res.closes and not res.trivial,
            "transported xi = xi.eta^k (lattice relabel)",
        )
        res_eta = monodromy_transport(k, eta(UPPER), cutoff, UPPER, LOWER)
        report.add(f"loop-eta-k{k}", res_eta.trivial and res_eta.closes)
    return report


def _pa_edges(a):
    """The four geodesic edges of dP(a) for k = 1, in '+' coordinates."""
    a = Q(a)
    pa = polygon_Pa(1, a)
    left = RationalPolygon.from_vertices([(-a, -a), (-a, a)])
    top = RationalPolygon.from_vertices([(-a, a), (a, a)])
    bottom = RationalPolygon.from_vertices([(0, -a), (-a, -a)])
    right_plus = RationalPolygon.from_vertices([(a, a), (a, 0), (0, -a)])
    return pa, left, top, bottom, right_plus


def suite_hartogs(seed=0, cutoff=Q(8)) -> RunReport:
    """Boundary data of u and x on dP(1) extends; data violating the
    monodromy is rejected."""
    report = RunReport("check hartogs", "-", seed)
    k = 1
    pa, left, top, bottom, right_plus = _pa_edges(1)
    right_minus = right_plus.transform(shear_mat_inv(k))

    def edges_for(plus_expr, minus_expr):
        return [
            BoundaryEdge(left, "+", plus_expr(left)),
            BoundaryEdge(top, "+", plus_expr(top)),
            BoundaryEdge(bottom, "+", plus_expr(bottom)),
            BoundaryEdge(right_plus, "-", minus_expr(right_minus)),
        ]

    u_edges = edges_for(eta, eta)
    sec_u = hartogs_extend(u_edges, pa, cutoff)
    report.add("extend-u", sec_u.local_for(0).terms[0][0] == (0, 1), "u extends to eta")

    def x_minus(ref):
        return xi(ref) * (LatticeSeries.one(ref) + eta(ref)).power(k)

    sec_x = hartogs_extend(edges_for(xi, x_minus), pa, cutoff)
    report.add(
        "extend-x",
        sec_x.local_for(0).terms[0][0] == (-1, 0)
        and len(sec_x.local_for(1).terms) == 2,
        "x extends to (xi, xi(1+eta))",
    )
    sec_x2 = hartogs_extend(list(reversed(edges_for(xi, x_minus))), pa, cutoff)
    report.add(
        "uniqueness",
        sec_x.local_for(0).congruent(sec_x2.local_for(0)),
        "edge order does not change the extension",
    )
    try:
        hartogs_extend(edges_for(xi, xi), pa, cutoff)
        report.add("reject-untransported-xi", False)
    except MonodromyObstruction as exc:
        report.add("reject-untransported-xi", True, str(exc))
    return report


def _small_box(frame, v0, v1, u0, u1):
    return NodalPolygon.from_tagged(
        frame,
        (
            TaggedHalfspace("-", (1, 0), Q(v0)),
            TaggedHalfspace("-", (-1, 0), -Q(v1)),
            TaggedHalfspace("-", (0, 1), Q(u0)),
            TaggedHalfspace("-", (0, -1), -Q(u1)),
        ),
    )


def suite_cocycle(seed=0, samples=500, ks=(1, 2)) -> RunReport:
    """Sampled strong cocycle / independence / separation inside P(2)."""
    report = RunReport("check cocycle", "-", seed)
    rng = random.Random(seed)
    for k in ks:
        frame = NodeFrame.standard(k)
        diagram = EigenrayDiagram.standard(k)
        parent = polygon_Pa(k, 2)
        per_config = -(-samples // (3 * len(ks)))  # ceil: never undershoot
        configs = []
        for c in range(3):
            if c == 0:
                q1, q2 = polygon_Pa(k, 1), polygon_Pa(k, Q(3, 2))
            else:
                def rbox():
                    v0 = Q(rng.randint(-6, 2), 4)
                    u0 = Q(rng.randint(-6, 2), 4)
                    return _small_box(
                        frame,
                        v0,
                        v0 + Q(rng.randint(2, 8), 4),
                        u0,
                        u0 + Q(rng.randint(2, 8), 4),
                    )

                q1, q2 = rbox(), rbox()
            configs.append((q1, q2))
        for idx, (q1, q2) in enumerate(configs):
            rep = cocycle_check(
                q1, q2, parent, diagram, samples=per_config, seed=seed + idx
            )
            frac = rep.degenerate / max(1, rep.samples + rep.degenerate)
            report.add(
                f"cocycle-k{k}-cfg{idx}",
                rep.passed and frac < Q(1, 100),
                f"{rep.samples} samples, {rep.degenerate} degenerate",
            )
    return report


def suite_torsion(seed=7, instances=100, max_rank=6) -> RunReport:
    """boundary depth (minor route, over Lambda) = max torsion (elimination
    route, over the valuation ring) on random complexes."""
    report = RunReport("check torsion", "-", seed)
    rng = random.Random(seed)
    bad = 0
    witness = ""
    for i in range(instances):
        cx = random_complex(rng, max_rank=max_rank)
        t = cx.max_torsion(1)
        b = cx.boundary_depth(1)
        expected = Q(0) if t == NEG_INF else t
        if b != expected:
            bad += 1
            if not witness:
                witness = f"instance {i}: torsion {t} vs depth {b}"
    report.add(
        "torsion-equals-boundary-depth",
        bad == 0,
        witness or f"{instances} random complexes, ranks <= {max_rank}",
    )
    return report


def suite_bv(seed=0, n_values=(2, 3), span=3, delta_sq_samples=200) -> RunReport:
    """Delta(z^a (x) b) = z^a (x) iota_a b, and Delta^2 = 0 on random
    monomials."""
    report = RunReport("check bv", "-", seed)
    for n in n_values:
        # the identity is polygon-independent for exact monomials; a point
        # reference keeps the valuation bookkeeping cheap
        ref = RationalPolygon.point((0,) * n)
        bad = None
        for alpha in itertools.product(range(-span, span + 1), repeat=n):
            for size in range(n + 1):
                for idx in itertools.combinations(range(1, n + 1), size):
                    w = cluster_element(n, alpha, idx, ref)
                    if bv_delta(w) != cluster_delta_oracle(n, alpha, idx, ref):
                        bad = (alpha, idx)
        report.add(
            f"bv-identity-n{n}",
            bad is None,
            str(bad) if bad else f"all alpha in [-{span},{span}]^{n}, all basis wedges",
        )
    rng = random.Random(seed)
    bad2 = 0
    for _ in range(delta_sq_samples):
        n = rng.choice(n_values)
        ref = RationalPolygon.point((0,) * n)
        idx = tuple(sorted(rng.sample(range(1, n + 1), rng.randint(0, n))))
        alpha = tuple(rng.randint(-4, 4) for _ in range(n))
        coeff = NovikovScalar.monomial(Q(rng.randint(0, 3), 2), rng.randint(1, 7))
        w = PolyVector.monomial(n, alpha, idx, ref, coeff)
        if not bv_delta(bv_delta(w)).is_zero():
            bad2 += 1
    report.add("bv-delta-squared", bad2 == 0, f"{delta_sq_samples} random monomials")
    for k in range(1, 6):
        okp, certp = volume_pullback_check(k, "+")
        okm, certm = volume_pullback_check(k, "-")
        okj, certj = wallcross_log_jacobian(k)
        report.add(f"volume-pullback-k{k}", okp and okm, certp)
        report.add(f"log-jacobian-k{k}", okj, certj)
    return report


def suite_tropdiag(seed=0, samples_per_side=500, ks=(1, 2, 3)) -> RunReport:
    """pk o g = f on sampled valuation pairs; the defining relation
    x y = (u+1)^k on all samples; degenerate draws counted."""
    report = RunReport("check tropdiag", "-", seed)
    rng = random.Random(seed)
    for k in ks:
        for side in ("+", "-"):
            mismatches = 0
            degenerate = 0
            done = 0
            while done < samples_per_side:
                v = Q(rng.randint(-12, 12), 2)
                u = Q(rng.randint(-12, 12), 2)
                if u == 0 and v == 0:
                    continue
                xi_v = sample_unit(rng, v)
                eta_v = sample_unit(rng, u)
                if is_degenerate_sample(eta_v):
                    degenerate += 1
                    continue
                pt = g_chart(side, k, xi_v, eta_v, cutoff=abs(v) + k * abs(u) + 2)
                if not pt.on_model():
                    mismatches += 1
                if pk_of_point(pt) != f_base(side, k, *trop_point(xi_v, eta_v)):
                    mismatches += 1
                done += 1
            frac_ok = degenerate < max(1, done) / 100
            report.add(
                f"tropdiag-k{k}-side{side}",
                mismatches == 0 and frac_ok,
                f"{done} samples, {degenerate} degenerate",
            )
    return report


SUITES = {
    "wallcross": suite_wallcross,
    "monodromy": suite_monodromy,
    "hartogs": suite_hartogs,
    "cocycle": suite_cocycle,
    "torsion": suite_torsion,
    "bv": suite_bv,
    "tropdiag": suite_tropdiag,
}


def run_suite(name: str, seed: int = 0, **kwargs) -> RunReport:
    if name not in SUITES:
        raise UnknownSuite(
            f"unknown suite {name!r}; choose from {sorted(SUITES)}"
        )
    report = SUITES[name](seed=seed, **kwargs)
    report.seed = seed
    return report
