"""Specialized solvers built on the coupled-inclusion machinery.

Four front-ends:

* ParallelSumProblem — one primal variable, K parallel-sum couplings
  (B_k parallel-sum S_k) composed with maps L_k, with a three-way partition
  of the S_k by how they are accessed (resolvent / Lipschitz map /
  Lipschitz inverse).  Solved by a literal partitioned iteration; an
  explicit lifting to a CoupledInclusionProblem exists to cross-check it.
* CommonZeroProblem — relaxation of finding a common zero of A and the
  B_k; a parallel-sum instance with identity couplings.
* MultivariateMinProblem — structured convex minimization over m blocks
  with infimal-convolution couplings; runs the system solver on
  subdifferentials and gradients.
* UnivariateMinProblem / FeasibilityRelaxation — single-variable convex
  minimization with general infimal convolutions, and its application to
  relaxing (possibly inconsistent) feasibility problems.
"""

from __future__ import annotations

import numpy as np

from .blocks import (
    BlockLinearOp,
    BlockVector,
    SpaceSig,
    entry_apply,
    entry_apply_adjoint,
    entry_norm_sq,
    normalize_entry,
)
from .fbf import FbfTrace, DivergenceError, gamma_for
from .operators import (
    ConvexFunction,
    IndicatorFunction,
    LipschitzOperator,
    MonotoneOperator,
    ParameterError,
    Point,
    SquaredNorm,
    ZeroFunction,
    ZeroMap,
    ZeroOperator,
    graph_distance,
)
from .system import (
    CoupledInclusionProblem,
    SolveReport,
    compute_beta,
    kkt_residual,
    solve_system,
)

__all__ = [
    "ParallelSumProblem",
    "lift_parallel_sum",
    "solve_parallel_sum",
    "CommonZeroProblem",
    "solve_common_zero",
    "check_consistency_theorem",
    "Smooth",
    "zero_smooth",
    "MultivariateMinProblem",
    "solve_multivariate_min",
    "evaluate_objectives",
    "check_qualification",
    "UnivariateMinProblem",
    "solve_univariate_min",
    "FeasibilityRelaxation",
    "solve_feasibility_relaxation",
    "relaxation_objective",
    "EvaluationError",
]


class EvaluationError(RuntimeError):
    """No finite evaluator is available for the requested quantity."""


def _fwd_entry(entry, x, dim_out):
    out = entry_apply(entry, x)
    return np.zeros(dim_out) if out is None else out


def _adj_entry(entry, v, dim_in):
    out = entry_apply_adjoint(entry, v)
    return np.zeros(dim_in) if out is None else out


# ---------------------------------------------------------------------------
# Parallel-sum couplings of a single primal variable


class ParallelSumProblem:
    """Find x with z in A x + sum_k L_k^* ((B_k psum S_k)(L_k x - r_k)) + C x.

    The K couplings are partitioned by index (0-based):

    * k < K1            S[k] is a MonotoneOperator (resolvent access);
    * K1 <= k < K2      S[k] is a LipschitzOperator evaluating S_k itself;
    * k >= K2           S[k] is a LipschitzOperator evaluating S_k^{-1}.
    """

    def __init__(self, dim, dual_dims, K1, K2, A, C, z, r, B, S, L):
        K = len(dual_dims)
        if not 0 <= K1 <= K2 <= K or K < 1:
            raise ParameterError(f"invalid partition 0 <= {K1} <= {K2} <= {K}")
        self.dim = int(dim)
        self.dual_dims = tuple(int(d) for d in dual_dims)
        self.K1, self.K2, self.K = int(K1), int(K2), K
        self.A = A
        self.C = C
        self.z = np.asarray(z, dtype=float).reshape(-1)
        self.r = [np.asarray(rk, dtype=float).reshape(-1) for rk in r]
        self.B = list(B)
        self.S = list(S)
        self.L = [normalize_entry(e) for e in L]
        if len(self.B) != K or len(self.S) != K or len(self.L) != K or len(self.r) != K:
            raise ParameterError("need K entries in each of r, B, S, L")


def lift_parallel_sum(p):
    """Embed the problem into the coupled-inclusion form by adding one
    auxiliary primal variable per coupling with indirect S access.

    Primal blocks are (x, y_1, ..., y_{K2}); the coupling grid stacks the
    L_k in the first column and -Id on the auxiliary diagonal.  Its norm
    bound 1 + sum_k ||L_k||^2 comes from the Cauchy-Schwarz estimate of the
    stacked operator, tighter than the entrywise sum.
    """
    K1, K2, K = p.K1, p.K2, p.K
    dims_primal = (p.dim,) + p.dual_dims[:K2]
    sig = SpaceSig(dims_primal, p.dual_dims)

    A = [p.A]
    C = [p.C]
    for k in range(K2):
        if k < K1:
            A.append(p.S[k])
            C.append(ZeroMap())
        else:
            A.append(ZeroOperator())
            C.append(p.S[k])
    Dinv = [ZeroMap() if k < K2 else p.S[k] for k in range(K)]

    entries = []
    for k in range(K):
        row = [None] * (K2 + 1)
        row[0] = p.L[k]
        if k < K2:
            row[k + 1] = -1.0
        entries.append(row)
    lam = 1.0 + sum(
        entry_norm_sq(p.L[k], p.dim, p.dual_dims[k]) for k in range(K)
    )
    L = BlockLinearOp(entries, sig, lambda_bound=lam)

    z = BlockVector([p.z] + [np.zeros(d) for d in p.dual_dims[:K2]])
    r = BlockVector(p.r)
    return CoupledInclusionProblem(sig, A, C, p.B, Dinv, L, z, r)


def _draw_psum_errors(errors, n, p, gamma):
    """Draw one product-space error triple over the lifted coordinates and
    split it into the slots of the partitioned iteration, zeroing the slots
    that the lifting forces to vanish."""
    K1, K2, K = p.K1, p.K2, p.K
    dims = (p.dim,) + p.dual_dims[:K2] + p.dual_dims
    m = K2 + 1
    a, b, c = errors(n, dims)
    a1, a2 = list(a.blocks[:m]), a.blocks[m:]
    b1 = list(b.blocks[:m])
    b2 = [-bk / gamma for bk in b.blocks[m:]]
    c1, c2 = list(c.blocks[:m]), c.blocks[m:]
    for k in range(K2):
        if k < K1:
            a1[k + 1] = np.zeros_like(a1[k + 1])
            c1[k + 1] = np.zeros_like(c1[k + 1])
        else:
            b1[k + 1] = np.zeros_like(b1[k + 1])
    return a1, a2, b1, b2, c1, c2


def solve_parallel_sum(p, cfg):
    """Literal partitioned iteration for ParallelSumProblem.

    Keeps the auxiliary variables and the three S-access regimes explicit,
    so every Lipschitz operator is used through forward evaluations only.
    Iterate-for-iterate this reproduces solve_system on the lifted problem,
    which the test suite checks.
    """
    K1, K2, K = p.K1, p.K2, p.K
    lifted = lift_parallel_sum(p)
    beta = compute_beta(lifted)
    cfg.check_against(beta)

    x = np.zeros(p.dim)
    y = [np.zeros(p.dual_dims[k]) for k in range(K2)]
    v = [np.zeros(d) for d in p.dual_dims]
    trace = FbfTrace()
    if cfg.keep_iterates:
        trace.iterates = [BlockVector([x] + y + v)]
    resid_primal = []
    resid_dual = []
    kkt_rows = []

    p11 = x
    p1 = list(y)
    p2 = list(v)
    for n in range(cfg.max_iters):
        gamma = gamma_for(cfg, beta, n)
        if cfg.errors is not None:
            a1, a2, b1, b2, c1, c2 = _draw_psum_errors(cfg.errors, n, p, gamma)
        else:
            a1 = a2 = b1 = b2 = c1 = c2 = None

        Lstar_v = np.zeros(p.dim)
        for k in range(K):
            Lstar_v += _adj_entry(p.L[k], v[k], p.dim)
        fwd = p.C(x) + Lstar_v
        if a1 is not None:
            fwd = fwd + a1[0]
        s11 = x - gamma * fwd
        p11 = p.A.resolvent(gamma, s11 + gamma * p.z)
        if b1 is not None:
            p11 = p11 + b1[0]

        s1 = [None] * K2
        p1 = [None] * K2
        for k in range(K2):
            if k < K1:
                s1[k] = y[k] + gamma * v[k]
                p1[k] = p.S[k].resolvent(gamma, s1[k])
                if b1 is not None:
                    p1[k] = p1[k] + b1[k + 1]
            else:
                fwd = p.S[k](y[k]) - v[k]
                if a1 is not None:
                    fwd = fwd + a1[k + 1]
                s1[k] = y[k] - gamma * fwd
                p1[k] = s1[k]

        Lp11 = [_fwd_entry(p.L[k], p11, p.dual_dims[k]) for k in range(K)]
        Lx = [_fwd_entry(p.L[k], x, p.dual_dims[k]) for k in range(K)]
        s2 = [None] * K
        p2 = [None] * K
        v_next = [None] * K
        for k in range(K):
            if k < K2:
                fwd = y[k] - Lx[k]
            else:
                fwd = p.S[k](v[k]) - Lx[k]
            if a2 is not None:
                fwd = fwd + a2[k]
            s2_k = v[k] - gamma * fwd
            inner = p.B[k].resolvent(1.0 / gamma, s2_k / gamma - p.r[k])
            back = p.r[k] + inner
            if b2 is not None:
                back = back + b2[k]
            p2_k = s2_k - gamma * back
            if k < K2:
                fwd2 = p1[k] - Lp11[k]
            else:
                fwd2 = p.S[k](p2_k) - Lp11[k]
            if c2 is not None:
                fwd2 = fwd2 + c2[k]
            q2_k = p2_k - gamma * fwd2
            s2[k] = s2_k
            p2[k] = p2_k
            v_next[k] = v[k] - s2_k + q2_k

        Lstar_p2 = np.zeros(p.dim)
        for k in range(K):
            Lstar_p2 += _adj_entry(p.L[k], p2[k], p.dim)
        fwd = p.C(p11) + Lstar_p2
        if c1 is not None:
            fwd = fwd + c1[0]
        q11 = p11 - gamma * fwd
        x_next = x - s11 + q11

        y_next = [None] * K2
        for k in range(K2):
            if k < K1:
                q1_k = p1[k] + gamma * p2[k]
            else:
                fwd = p.S[k](p1[k]) - p2[k]
                if c1 is not None:
                    fwd = fwd + c1[k + 1]
                q1_k = p1[k] - gamma * fwd
            y_next[k] = y[k] - s1[k] + q1_k

        rp = np.sqrt(
            float((x - p11) @ (x - p11))
            + sum(float((y[k] - p1[k]) @ (y[k] - p1[k])) for k in range(K2))
        )
        rd = np.sqrt(sum(float((v[k] - p2[k]) @ (v[k] - p2[k])) for k in range(K)))
        resid = float(np.hypot(rp, rd))
        resid_primal.append(float(rp))
        resid_dual.append(float(rd))
        trace.rows.append((n, gamma, resid))
        if cfg.kkt_every and n % cfg.kkt_every == 0:
            full = BlockVector([x] + y)
            kkt_rows.append((n, *kkt_residual(lifted, full, BlockVector(v))))

        wnorm = np.sqrt(
            float(x @ x)
            + sum(float(yk @ yk) for yk in y)
            + sum(float(vk @ vk) for vk in v)
        )
        if resid <= cfg.residual_tol * max(1.0, wnorm):
            trace.converged = True
            trace.iterations = n + 1
            break

        x, y, v = x_next, y_next, v_next
        if not (
            np.all(np.isfinite(x))
            and all(np.all(np.isfinite(yk)) for yk in y)
            and all(np.all(np.isfinite(vk)) for vk in v)
        ):
            raise DivergenceError(f"non-finite iterate at iteration {n}")
        if cfg.keep_iterates:
            trace.iterates.append(BlockVector([x] + y + v))
    else:
        trace.converged = False
        trace.iterations = cfg.max_iters

    trace.w = BlockVector([x] + y + v)
    trace.p = BlockVector([p11] + p1 + p2)
    kkt = kkt_residual(lifted, BlockVector([x] + y), BlockVector(v))
    report = SolveReport(
        BlockVector([x]), BlockVector(v), trace, kkt, kkt_rows,
        resid_primal, resid_dual,
    )
    report.aux = [yk.copy() for yk in y]
    return report


# ---------------------------------------------------------------------------
# Relaxed common-zero problems


class CommonZeroProblem:
    """Relaxation of finding a point in zer A and every zer B_k:
    0 in A x + sum_k (B_k psum S_k) x, with S_k maximally monotone,
    S_k^{-1} at most single-valued strictly monotone, S_k^{-1}0 = {0}."""

    def __init__(self, dim, A, B, S):
        if len(B) < 1 or len(B) != len(S):
            raise ParameterError("need K >= 1 operators in B and S")
        self.dim = int(dim)
        self.A = A
        self.B = list(B)
        self.S = list(S)
        self.K = len(B)


def _as_parallel_sum(p):
    K = p.K
    return ParallelSumProblem(
        dim=p.dim,
        dual_dims=(p.dim,) * K,
        K1=K,
        K2=K,
        A=p.A,
        C=ZeroMap(),
        z=np.zeros(p.dim),
        r=[np.zeros(p.dim) for _ in range(K)],
        B=p.B,
        S=p.S,
        L=[1.0] * K,
    )


def solve_common_zero(p, cfg):
    """Solve the relaxed common-zero inclusion.

    The instance is a parallel-sum problem with identity couplings and all
    S_k accessed by resolvent, so the forward Lipschitz bound reduces to
    sqrt(K + 1).
    """
    return solve_parallel_sum(_as_parallel_sum(p), cfg)


def check_consistency_theorem(p, x, tol):
    """True iff x is within tol of being a simultaneous zero of A and every
    B_k.  When the common zero set is nonempty, solutions of the relaxed
    inclusion are exactly its members, so converged outputs must pass."""
    x = np.asarray(x, dtype=float).reshape(-1)
    zero = np.zeros_like(x)
    if graph_distance(p.A, x, zero) > tol:
        return False
    return all(graph_distance(Bk, x, zero) <= tol for Bk in p.B)


# ---------------------------------------------------------------------------
# Multivariate structured minimization


class Smooth:
    """Differentiable convex function: a value evaluator plus its gradient
    (a LipschitzOperator).  conj, when given, evaluates the conjugate."""

    def __init__(self, value, gradient, conj=None, label="smooth"):
        self.value = value
        self.gradient = gradient
        self.conj = conj
        self.label = label

    def __call__(self, x):
        return self.value(x)


def zero_smooth():
    return Smooth(lambda x: 0.0, ZeroMap(), label="zero_smooth")


class MultivariateMinProblem:
    """Minimize sum_i f_i(x_i) + sum_k (g_k infconv ell_k)(sum_i L_ki x_i
    - r_k) + sum_i (h_i(x_i) - <x_i, z_i>).

    ell[k] is None for the exact-penalty coupling (the infimal convolution
    collapses to g_k and the dual smoothing term vanishes) or a SquaredNorm,
    whose conjugate gradient is linear.  h[i] is a Smooth (zero_smooth()
    when absent).
    """

    def __init__(self, sig, f, h, g, ell, z, r, L):
        if len(f) != sig.m or len(h) != sig.m:
            raise ParameterError(f"need {sig.m} functions in f and h")
        if len(g) != sig.K or len(ell) != sig.K:
            raise ParameterError(f"need {sig.K} functions in g and ell")
        for lk in ell:
            if lk is not None and not isinstance(lk, SquaredNorm):
                raise ParameterError(
                    "ell entries must be None or SquaredNorm couplings"
                )
        self.sig = sig
        self.f = list(f)
        self.h = list(h)
        self.g = list(g)
        self.ell = list(ell)
        self.z = z
        self.r = r
        self.L = L


def _ellstar_grad(lk):
    if lk is None:
        return ZeroMap()
    # conjugate of omega ||.||^2 is ||.||^2 / (4 omega); gradient v/(2 omega)
    return LipschitzOperator(
        lambda v, w=lk.omega: v / (2.0 * w), 1.0 / (2.0 * lk.omega), "ellstar_grad"
    )


def min_problem_to_system(p):
    A = [fn.subdifferential() for fn in p.f]
    C = [hi.gradient for hi in p.h]
    B = [gk.subdifferential() for gk in p.g]
    Dinv = [_ellstar_grad(lk) for lk in p.ell]
    return CoupledInclusionProblem(p.sig, A, C, B, Dinv, p.L, p.z, p.r)


def solve_multivariate_min(p, cfg):
    """Run the primal-dual iteration on subdifferentials and gradients; the
    backward steps become prox evaluations of the f_i and (rescaled) g_k."""
    return solve_system(min_problem_to_system(p), cfg)


def _infconv_value(g, ell, t):
    """(g infconv ell)(t) with ell None (collapses to g) or SquaredNorm
    (inner minimizer available through the prox of g)."""
    if ell is None:
        return g(t)
    w = ell.omega
    ystar = g.prox(1.0 / (2.0 * w), t)
    d = t - ystar
    return g(ystar) + w * float(d @ d)


def _conj_infconv_value(f, h, u, grid_half_width=10.0, grid_points=201):
    """(f* infconv h*)(u).  Exact when h is identically zero; otherwise a
    grid search with local polish in dims <= 2 (oracle-grade only)."""
    if isinstance(h.gradient, ZeroMap):
        return f.conjugate(u)
    if h.conj is None:
        raise EvaluationError("h has no conjugate evaluator")
    u = np.asarray(u, dtype=float).reshape(-1)
    n = u.size
    if n > 2:
        raise EvaluationError("infimal convolution evaluation limited to dims <= 2")
    axes = [np.linspace(-grid_half_width, grid_half_width, grid_points)] * n
    best = np.inf
    best_w = None
    for w in np.stack(np.meshgrid(*axes), axis=-1).reshape(-1, n):
        val = f.conjugate(w) + h.conj(u - w)
        if val < best:
            best, best_w = val, w
    if best_w is not None:
        step = grid_half_width / grid_points
        for _ in range(200):
            improved = False
            for delta in np.vstack([np.eye(n), -np.eye(n)]) * step:
                cand = best_w + delta
                val = f.conjugate(cand) + h.conj(u - cand)
                if val < best:
                    best, best_w, improved = val, cand, True
            if not improved:
                step *= 0.5
                if step < 1e-12:
                    break
    return best


def evaluate_objectives(p, x, v):
    """Primal and dual objective values at (x, v).

    The duality gap is their sum; it is nonnegative everywhere and vanishes
    at a primal-dual solution pair.  Indicator evaluations use a small
    feasibility tolerance, so converged near-feasible points come out
    finite; genuinely infeasible points give +inf.
    """
    from .blocks import apply_adjoint, apply_block

    primal = 0.0
    for i in range(p.sig.m):
        primal += p.f[i](x[i]) + p.h[i](x[i]) - float(x[i] @ p.z[i])
    Lx = apply_block(p.L, x)
    for k in range(p.sig.K):
        primal += _infconv_value(p.g[k], p.ell[k], Lx[k] - p.r[k])

    dual = 0.0
    Lstar_v = apply_adjoint(p.L, v)
    for i in range(p.sig.m):
        dual += _conj_infconv_value(p.f[i], p.h[i], p.z[i] - Lstar_v[i])
    for k in range(p.sig.K):
        dual += p.g[k].conjugate(v[k]) + float(v[k] @ p.r[k])
        if p.ell[k] is not None:
            dual += float(v[k] @ v[k]) / (4.0 * p.ell[k].omega)
    return float(primal), float(dual)


def check_qualification(p):
    """Mechanical sufficient conditions for the subdifferential sum rule
    behind the primal-dual correspondence.

    Checks only the two cases decidable from catalog flags and numerical
    rank: all f_i real-valued with each stacked row map surjective, or each
    coupling having a real-valued g_k or ell_k.  Anything else is reported
    as unknown, never as a failure.
    """
    if all(fn.real_valued for fn in p.f):
        surjective = True
        for k in range(p.sig.K):
            cols = []
            for i in range(p.sig.m):
                e = p.L.entries[k][i]
                dk, di = p.sig.dims_dual[k], p.sig.dims_primal[i]
                if e is None:
                    cols.append(np.zeros((dk, di)))
                elif isinstance(e, float):
                    cols.append(e * np.eye(dk))
                else:
                    cols.append(e)
            row = np.hstack(cols)
            sv = np.linalg.svd(row, compute_uv=False)
            if np.sum(sv > 1e-10) < p.sig.dims_dual[k]:
                surjective = False
                break
        if surjective:
            return "holds_by_iii"
    ok = True
    for k in range(p.sig.K):
        ell_real = p.ell[k] is not None  # SquaredNorm is real-valued
        if not (p.g[k].real_valued or ell_real):
            ok = False
            break
    if ok:
        return "holds_by_iv"
    return "unknown"


# ---------------------------------------------------------------------------
# Univariate structured minimization and feasibility relaxation


class UnivariateMinProblem:
    """Minimize f(x) + sum_k (g_k infconv phi_k)(L_k x - r_k) + h(x)
    - <x, z> over a single variable x.

    phi[k] role by 0-based partition index: k < K1 a ConvexFunction (prox
    access), K1 <= k < K2 a Smooth with Lipschitz gradient, k >= K2 a
    strongly convex SquaredNorm (conjugate gradient is linear).
    """

    def __init__(self, dim, dual_dims, K1, K2, f, h, g, phi, z, r, L):
        K = len(dual_dims)
        if not 0 <= K1 <= K2 <= K or K < 1:
            raise ParameterError(f"invalid partition 0 <= {K1} <= {K2} <= {K}")
        for k in range(K2, K):
            if not isinstance(phi[k], SquaredNorm):
                raise ParameterError(
                    "strongly convex phi entries must be SquaredNorm"
                )
        self.dim = int(dim)
        self.dual_dims = tuple(int(d) for d in dual_dims)
        self.K1, self.K2, self.K = int(K1), int(K2), K
        self.f = f
        self.h = h
        self.g = list(g)
        self.phi = list(phi)
        self.z = np.asarray(z, dtype=float).reshape(-1)
        self.r = [np.asarray(rk, dtype=float).reshape(-1) for rk in r]
        self.L = [normalize_entry(e) for e in L]


def univariate_to_parallel_sum(p):
    S = []
    for k in range(p.K):
        if k < p.K1:
            S.append(p.phi[k].subdifferential())
        elif k < p.K2:
            S.append(p.phi[k].gradient)
        else:
            S.append(_ellstar_grad(p.phi[k]))
    return ParallelSumProblem(
        dim=p.dim,
        dual_dims=p.dual_dims,
        K1=p.K1,
        K2=p.K2,
        A=p.f.subdifferential(),
        C=p.h.gradient,
        z=p.z,
        r=p.r,
        B=[gk.subdifferential() for gk in p.g],
        S=S,
        L=p.L,
    )


def solve_univariate_min(p, cfg):
    """Partitioned prox iteration: subdifferentials become prox steps and
    every differentiable phi_k enters through forward gradient steps."""
    return solve_parallel_sum(univariate_to_parallel_sum(p), cfg)


class FeasibilityRelaxation:
    """Minimize sum_k min_{y_k in C_k} phi_k(L_k x - y_k), a relaxation of
    the (possibly inconsistent) feasibility problem L_k x in C_k for all k.

    Each phi_k must vanish exactly at 0 and nowhere else attain its
    minimum; the vetted choices are the indicator of {0} (hard constraint)
    and SquaredNorm (quadratic distance penalty).
    """

    def __init__(self, dim, sets, phi, L):
        if not sets or len(sets) != len(phi) or len(phi) != len(L):
            raise ParameterError("need matching nonempty sets, phi, and L lists")
        for ph in phi:
            if not (isinstance(ph, SquaredNorm) or _is_point_zero_indicator(ph)):
                raise ParameterError(
                    "phi entries must be SquaredNorm or the indicator of {0}"
                )
        self.dim = int(dim)
        self.sets = list(sets)
        self.phi = list(phi)
        self.L = [normalize_entry(e) for e in L]
        self.K = len(sets)


def _is_point_zero_indicator(fn):
    return (
        isinstance(fn, IndicatorFunction)
        and isinstance(fn.set, Point)
        and not np.any(fn.set.c)
    )


def _entry_out_dim(entry, dim_in):
    if entry is None or isinstance(entry, float):
        return dim_in
    return entry.shape[0]


def feasibility_to_univariate(p):
    dual_dims = [_entry_out_dim(p.L[k], p.dim) for k in range(p.K)]
    return UnivariateMinProblem(
        dim=p.dim,
        dual_dims=dual_dims,
        K1=p.K,
        K2=p.K,
        f=ZeroFunction(),
        h=zero_smooth(),
        g=[IndicatorFunction(s) for s in p.sets],
        phi=p.phi,
        z=np.zeros(p.dim),
        r=[np.zeros(d) for d in dual_dims],
        L=p.L,
    )


def solve_feasibility_relaxation(p, cfg):
    """Solve the relaxation.  With the default step policy the constant
    step stays below (1 + sum_k ||L_k||^2)^{-1/2}, the admissible range for
    this instance, because the forward part is pure coupling."""
    return solve_univariate_min(feasibility_to_univariate(p), cfg)


def relaxation_objective(p, x, feas_tol=1e-6):
    """sum_k min_{y in C_k} phi_k(L_k x - y); +inf when a hard constraint
    is violated beyond the feasibility tolerance."""
    x = np.asarray(x, dtype=float).reshape(-1)
    total = 0.0
    for k in range(p.K):
        t = _fwd_entry(p.L[k], x, _entry_out_dim(p.L[k], p.dim))
        dist = p.sets[k].distance(t)
        if isinstance(p.phi[k], SquaredNorm):
            total += p.phi[k].omega * dist * dist
        else:
            if dist > feas_tol * (1.0 + float(np.linalg.norm(t))):
                return float(np.inf)
    return float(total)
