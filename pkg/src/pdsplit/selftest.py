"""Runtime self-check: the library's core invariants as executable
properties, each returning a pass/fail row.

Used by the ``selftest`` CLI subcommand.  ``inject_fault`` deliberately
corrupts a norm bound so the failure path is exercisable on demand.
"""

from __future__ import annotations

import numpy as np

from .blocks import (
    BlockLinearOp,
    BlockVector,
    SpaceSig,
    apply_adjoint,
    apply_block,
    lambda_conservative,
    lambda_power_iteration,
)
from .fbf import FbfConfig, SummableErrorSchedule, fbf_solve
from .operators import (
    AffineOperator,
    Ball,
    Box,
    Halfspace,
    IndicatorFunction,
    L1Norm,
    NormalCone,
    Point,
    QuadraticDistance,
    ScaledIdentity,
    SquaredNorm,
    ZeroFunction,
    ZeroOperator,
    conjugate_prox,
    shifted_inverse_resolvent,
    yosida,
)
from .probfile import parse_problem, serialize_problem
from .system import compute_beta, product_space_pair, solve_system

__all__ = ["run_selftest", "SELFTEST_NAMES"]

SELFTEST_NAMES = (
    "adjoint_identity",
    "norm_bound_validity",
    "power_bound_dominated",
    "firm_nonexpansiveness",
    "moreau_identity",
    "shifted_inverse_resolvent_identity",
    "yosida_lipschitz",
    "engine_equivalence",
    "error_schedule_determinism",
    "problem_file_roundtrip",
)


def _random_grid(rng, fault_factor=1.0):
    m, K = 2, 2
    dp = tuple(int(rng.integers(1, 4)) for _ in range(m))
    dd = tuple(int(rng.integers(1, 4)) for _ in range(K))
    sig = SpaceSig(dp, dd)
    entries = [
        [rng.standard_normal((dd[k], dp[i])) for i in range(m)] for k in range(K)
    ]
    L = BlockLinearOp(entries, sig)
    L.lambda_bound *= fault_factor
    return L


def _check_adjoint(rng, fault):
    worst = 0.0
    for _ in range(100):
        L = _random_grid(rng)
        x = BlockVector([rng.standard_normal(d) for d in L.sig.dims_primal])
        v = BlockVector([rng.standard_normal(d) for d in L.sig.dims_dual])
        lhs = apply_block(L, x).dot(v)
        rhs = x.dot(apply_adjoint(L, v))
        worst = max(worst, abs(lhs - rhs) / (1.0 + x.norm() * v.norm()))
    return worst <= 1e-10, f"max scaled defect {worst:.3e}"


def _check_norm_bound(rng, fault):
    worst = 0.0
    for _ in range(100):
        L = _random_grid(rng, fault_factor=0.5 if fault else 1.0)
        for lam in (L.lambda_bound, lambda_power_iteration(L)):
            x = BlockVector([rng.standard_normal(d) for d in L.sig.dims_primal])
            lhs = apply_block(L, x).norm() ** 2
            rhs = lam * x.norm() ** 2 * (1 + 1e-10)
            worst = max(worst, lhs - rhs)
    return worst <= 0.0, f"max bound excess {worst:.3e}"


def _check_power_dominated(rng, fault):
    worst = 0.0
    for _ in range(20):
        L = _random_grid(rng)
        worst = max(worst, lambda_power_iteration(L) - lambda_conservative(L))
    return worst <= 0.0, f"max excess over conservative {worst:.3e}"


def _catalog_resolvents(rng, d):
    M = rng.standard_normal((d, d))
    ops = [
        ZeroOperator(),
        ScaledIdentity(1.3),
        AffineOperator(M @ M.T / d + 0.1 * np.eye(d)),
        NormalCone(Box(-np.ones(d), np.ones(d))),
        NormalCone(Ball(np.zeros(d), 1.0)),
        NormalCone(Halfspace(np.ones(d), 1.0)),
        NormalCone(Point(np.zeros(d))),
        L1Norm(0.7).subdifferential(),
        QuadraticDistance(np.ones(d)).subdifferential(),
        SquaredNorm(0.4).subdifferential(),
    ]
    return ops


def _check_firm(rng, fault):
    worst = -np.inf
    d = 3
    for op in _catalog_resolvents(rng, d):
        for _ in range(100):
            gamma = float(rng.uniform(0.1, 3.0))
            x, y = rng.standard_normal(d), rng.standard_normal(d)
            jx, jy = op.resolvent(gamma, x), op.resolvent(gamma, y)
            diff = jx - jy
            lhs = float(diff @ diff)
            rhs = float((x - y) @ diff)
            worst = max(worst, lhs - rhs)
    return worst <= 1e-10, f"max firmness defect {worst:.3e}"


def _check_moreau(rng, fault):
    worst = 0.0
    fns = [ZeroFunction(), L1Norm(1.0), QuadraticDistance(np.ones(3)),
           SquaredNorm(0.5), IndicatorFunction(Box(-np.ones(3), np.ones(3)))]
    for fn in fns:
        for _ in range(100):
            gamma = float(rng.uniform(0.1, 3.0))
            x = rng.standard_normal(3)
            # unit-step split plus the scaled decomposition
            recon1 = fn.prox(1.0, x) + conjugate_prox(fn, 1.0, x)
            recon2 = fn.prox(gamma, x) + gamma * conjugate_prox(
                fn, 1.0 / gamma, x / gamma
            )
            worst = max(
                worst,
                float(np.max(np.abs(recon1 - x))),
                float(np.max(np.abs(recon2 - x))),
            )
    return worst <= 1e-12, f"max decomposition defect {worst:.3e}"


def _check_shifted_inverse(rng, fault):
    worst = 0.0
    for _ in range(100):
        gamma = float(rng.uniform(0.1, 3.0))
        c = float(rng.uniform(0.2, 2.0))
        x, r = rng.standard_normal(3), rng.standard_normal(3)
        # linear case: inverse of c*Id is Id/c, direct resolvent in closed form
        got = shifted_inverse_resolvent(ScaledIdentity(c), r, gamma, x)
        want = (x - gamma * r) / (1.0 + gamma / c)
        worst = max(worst, float(np.max(np.abs(got - want))))
        # inverse of the normal cone of {0} is the zero map
        got = shifted_inverse_resolvent(NormalCone(Point(np.zeros(3))), r, gamma, x)
        worst = max(worst, float(np.max(np.abs(got - (x - gamma * r)))))
    return worst <= 1e-10, f"max identity defect {worst:.3e}"


def _check_yosida(rng, fault):
    worst = 0.0
    B = NormalCone(Box(np.zeros(3), np.ones(3)))
    for _ in range(100):
        gamma = float(rng.uniform(0.1, 3.0))
        x, y = rng.standard_normal(3), rng.standard_normal(3)
        diff = yosida(B, gamma, x) - yosida(B, gamma, y)
        bound = np.linalg.norm(x - y) / gamma * (1 + 1e-10)
        worst = max(worst, float(np.linalg.norm(diff)) - bound)
    return worst <= 0.0, f"max Lipschitz excess {worst:.3e}"


def _check_engine_equivalence(rng, fault):
    from .operators import ScaledIdentityMap, ZeroMap
    from .system import CoupledInclusionProblem

    sig = SpaceSig((2, 1), (2,))
    L = BlockLinearOp(
        [[rng.standard_normal((2, 2)), rng.standard_normal((2, 1))]], sig
    )
    prob = CoupledInclusionProblem(
        sig,
        [NormalCone(Box(-np.ones(2), np.ones(2))), ScaledIdentity(0.5)],
        [ScaledIdentityMap(0.3), ZeroMap()],
        [ScaledIdentity(1.0)],
        [ScaledIdentityMap(0.2)],
        L,
        BlockVector([rng.standard_normal(2), rng.standard_normal(1)]),
        BlockVector([rng.standard_normal(2)]),
    )
    cfg = FbfConfig(max_iters=50, residual_tol=0.0, keep_iterates=True)
    rep = solve_system(prob, cfg)
    P, Q = product_space_pair(prob)
    tr = fbf_solve(
        P, Q, compute_beta(prob), BlockVector.zeros((2, 1, 2)),
        FbfConfig(max_iters=50, residual_tol=0.0, keep_iterates=True),
    )
    worst = max(
        (a - b).norm() for a, b in zip(rep.trace.iterates, tr.iterates)
    )
    return worst <= 1e-12, f"max iterate gap {worst:.3e}"


def _check_error_schedule(rng, fault):
    s1 = SummableErrorSchedule(1.0, 2.0, seed=11)
    s2 = SummableErrorSchedule(1.0, 2.0, seed=11)
    same = all(
        (s1.vec(n, slot, (2, 3)) - s2.vec(n, slot, (2, 3))).norm() == 0.0
        for n in range(20)
        for slot in range(3)
    )
    partial = sum(s1.norm_at(n) for n in range(100000))
    return (
        same and partial <= np.pi ** 2 / 6,
        f"deterministic={same}, partial sum {partial:.4f}",
    )


def _check_roundtrip(rng, fault):
    text = (
        "problem multivar_min\n"
        "primal_dims 1 1\n"
        "dual_dims 1\n"
        "op f 1 indicator_box lo=2 hi=3\n"
        "op f 2 indicator_box lo=0 hi=1\n"
        "op h 1 zero\nop h 2 zero\n"
        "op g 1 sqdist a=0\n"
        "op ell 1 none\n"
        "entry 1 1 scale 1\nentry 1 2 scale -1\n"
        "vec z 0 0\nvec r 0\n"
        "config gamma 0.2\n"
    )
    pf = parse_problem(text)
    again = parse_problem(serialize_problem(pf))
    ok = pf == again
    return ok, "parse/serialize/parse fixed point" if ok else "round trip drifted"


_CHECKS = (
    ("adjoint_identity", _check_adjoint),
    ("norm_bound_validity", _check_norm_bound),
    ("power_bound_dominated", _check_power_dominated),
    ("firm_nonexpansiveness", _check_firm),
    ("moreau_identity", _check_moreau),
    ("shifted_inverse_resolvent_identity", _check_shifted_inverse),
    ("yosida_lipschitz", _check_yosida),
    ("engine_equivalence", _check_engine_equivalence),
    ("error_schedule_determinism", _check_error_schedule),
    ("problem_file_roundtrip", _check_roundtrip),
)


def run_selftest(seed=0, inject_fault=False):
    """Run every property; returns a list of (name, passed, detail)."""
    rows = []
    for name, fn in _CHECKS:
        rng = np.random.default_rng(seed)
        try:
            passed, detail = fn(rng, inject_fault)
        except Exception as exc:  # a crash is a failure, not an abort
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        rows.append((name, bool(passed), detail))
    return rows
