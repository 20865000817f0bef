"""Dense Dirichlet machinery on balls for the nonlocal operator.

Zero-exterior problems are discretized with exact cell integrals of the
difference kernel, a curvature patch on the self cell, and an analytic
exterior term, giving an M-matrix at desk scale (interior nodes capped
at 4096).  On top of the solver: principal eigenpairs by inverse power
iteration, sub/supersolution monotone iteration for sublinear forcing,
the two-candidate uniqueness check, the whole-space construction over an
expanding ball schedule, the exact exponent ladder, and the radial
bootstrap probe that tracks it.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np
import scipy.linalg as sla
from numpy.polynomial.legendre import leggauss

from .errors import ConfigurationError, DomainError, NumericError, PreconditionError
from .spectral import Field, GridSpec, pv_constant

__all__ = [
    "BallProblem", "EigenPair", "LadderResult", "ball_nodes",
    "assemble_dirichlet_operator", "solve_linear_dirichlet",
    "principal_eigenpair", "monotone_iterate", "uniqueness_check",
    "whole_space_sublinear_solve", "exponent_ladder",
    "liouville_bootstrap_probe",
]

INTERIOR_CAP = 4096


def ball_nodes(R: float, h: float) -> np.ndarray:
    """Grid nodes strictly inside (-R, R), on the lattice h*Z."""
    m = int(np.floor((R - h / 2.0) / h))
    return h * np.arange(-m, m + 1)


def assemble_dirichlet_operator(R: float, alpha: float, grid: GridSpec) -> np.ndarray:
    """Dense matrix for the zero-exterior operator on (-R, R).

    Row i carries exact cell integrals of |x_i - y|^{-1-a} off the self
    cell, a second-difference curvature patch for the self cell, and the
    analytic integral over the exterior of the ball on the diagonal.
    """
    if not 0.0 < alpha < 2.0:
        raise DomainError(f"order must lie in (0, 2), got {alpha}")
    if grid.n != 1:
        raise ConfigurationError("dense assembly implemented on the line")
    if R > grid.X:
        raise ConfigurationError(f"ball R={R} must sit inside the box")
    x = ball_nodes(R, grid.h)
    N = len(x)
    if N > INTERIOR_CAP:
        raise ConfigurationError(f"{N} interior nodes exceed the dense cap {INTERIOR_CAP}")
    h = grid.h
    a = np.abs(x[:, None] - x[None, :])
    lo = np.maximum(a - h / 2.0, 0.0)
    hi = a + h / 2.0
    with np.errstate(divide="ignore"):
        W = (lo ** -alpha - hi ** -alpha) / alpha
    np.fill_diagonal(W, 0.0)
    A = -W
    np.fill_diagonal(A, W.sum(axis=1))
    # self cell: T*(2u_i - u_{i-1} - u_{i+1})/h^2 with T the exact second
    # moment of the kernel over the half cell; outside neighbors are zero
    c = 2.0 * (h / 2.0) ** (2.0 - alpha) / ((2.0 - alpha) * h * h)
    for i in range(N):
        for j in (i - 1, i + 1):
            A[i, i] += c
            if 0 <= j < N:
                A[i, j] -= c
    bplus = x[-1] + h / 2.0
    bminus = x[0] - h / 2.0
    ext = ((bplus - x) ** -alpha + (x - bminus) ** -alpha) / alpha
    A[np.arange(N), np.arange(N)] += ext
    return pv_constant(1, alpha) * A


@dataclass
class BallProblem:
    R: float
    alpha: float
    sigma: float
    grid: GridSpec
    rho: object = None
    exterior_data: object = None
    _A: object = dc_field(default=None, repr=False, compare=False)
    _lu: object = dc_field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise ConfigurationError(f"sublinear exponent must lie in (0,1), got {self.sigma}")
        x = self.nodes
        rv = self.rho_values
        if rv.min() <= 0.0:
            raise ConfigurationError("weight must be bounded below by c > 0 on the ball")
        self.rho_lower = float(rv.min())
        if self.exterior_data is not None:
            probe = self.exterior_data(np.array([self.R + 1.0, -self.R - 1.0, 10.0 * self.R]))
            if np.min(probe) < 0.0:
                raise ConfigurationError("exterior data must be nonnegative")

    @property
    def nodes(self):
        return ball_nodes(self.R, self.grid.h)

    @property
    def rho_values(self):
        x = self.nodes
        if self.rho is None:
            return np.ones_like(x)
        if callable(self.rho):
            return np.asarray(self.rho(x), dtype=float)
        rv = np.asarray(self.rho, dtype=float)
        if rv.shape != x.shape:
            raise ConfigurationError("weight sample count must match interior nodes")
        return rv

    def operator(self):
        if self._A is None:
            self._A = assemble_dirichlet_operator(self.R, self.alpha, self.grid)
        return self._A

    def factor(self):
        if self._lu is None:
            self._lu = sla.lu_factor(self.operator())
        return self._lu

    def embed(self, u_int) -> Field:
        """Interior values extended by the exterior data (zero by default)."""
        g = self.grid
        xb = self.nodes
        idx = np.rint((xb + g.X) / g.h).astype(int)
        full = np.zeros((g.N,))
        if self.exterior_data is not None:
            out = np.ones(g.N, dtype=bool)
            out[idx] = False
            full[out] = self.exterior_data(g.axis[out])
        full[idx] = u_int
        return Field(g, full)


def _exterior_coupling(problem: BallProblem) -> np.ndarray:
    """Right-hand-side vector carrying the exterior data through the kernel."""
    phi = problem.exterior_data
    x = problem.nodes
    if phi is None:
        return np.zeros_like(x)
    h = problem.grid.h
    alpha = problem.alpha
    gx, gw = leggauss(12)
    out = np.zeros_like(x)
    R_far = 1e6
    for sgn, edge in ((+1, x[-1] + h / 2.0), (-1, x[0] - h / 2.0)):
        offs = np.concatenate([[1e-10], np.geomspace(1e-6, R_far, 161)])
        e = edge + sgn * offs
        mid = 0.5 * (e[1:] + e[:-1])
        half = 0.5 * np.abs(e[1:] - e[:-1])
        nodes = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
        wts = (half[:, None] * gw[None, :]).ravel()
        vals = np.asarray(phi(nodes), dtype=float)
        out += ((wts * vals)[None, :] *
                np.abs(x[:, None] - nodes[None, :]) ** (-1.0 - alpha)).sum(axis=1)
        # beyond R_far: freeze phi at the far edge
        far = float(np.asarray(phi(np.array([edge + sgn * R_far]))).ravel()[0])
        out += far * np.abs(x - (edge + sgn * R_far)) ** -alpha / alpha
    return pv_constant(1, alpha) * out


def solve_linear_dirichlet(problem: BallProblem, f) -> Field:
    """u with A u = f + exterior coupling inside, u = exterior data outside."""
    fv = f.values[np.rint((problem.nodes + problem.grid.X) / problem.grid.h).astype(int)] \
        if isinstance(f, Field) else np.asarray(f, dtype=float)
    u = sla.lu_solve(problem.factor(), fv + _exterior_coupling(problem))
    if not np.isfinite(u).all():
        raise NumericError("linear solve produced non-finite values")
    return problem.embed(u)


@dataclass
class EigenPair:
    lambda_1R: float
    phi_R: Field
    residual: float
    iterations: int = 0


def principal_eigenpair(problem: BallProblem, rtol: float = 1e-9,
                        maxit: int = 2000) -> EigenPair:
    """Smallest eigenvalue of A phi = lambda rho phi by inverse power iteration.

    Stops on the relative residual, not the eigenvalue increment (the
    eigenvalue converges quadratically in the vector error and stalls
    early).
    """
    A = problem.operator()
    rho = problem.rho_values
    lu = problem.factor()
    v = np.ones(A.shape[0])
    history = []
    lam = res = None
    for it in range(maxit):
        w = sla.lu_solve(lu, rho * v)
        v = w / np.linalg.norm(w)
        lam = (v @ (A @ v)) / (v @ (rho * v))
        res = np.linalg.norm(A @ v - lam * rho * v) / np.linalg.norm(lam * rho * v)
        history.append((lam, res))
        if res < rtol:
            break
    else:
        raise NumericError(f"eigen iteration stalled at residual {res:.2e}; "
                           f"history tail {history[-3:]}")
    if v.sum() < 0.0:
        v = -v
    if lam <= 0.0 or (v <= 0.0).any():
        raise NumericError("principal eigenpair lost positivity")
    return EigenPair(float(lam), problem.embed(v / v.max()), float(res), it + 1)


def _lipschitz_shift(problem: BallProblem, f, lo_int, hi_int) -> float:
    """Shift keeping the iteration map order-preserving on [lo, hi]."""
    pos = lo_int[lo_int > 0.0]
    t0 = max(pos.min() if pos.size else 1e-8, 1e-8)
    t1 = max(float(np.max(hi_int)), t0 * 2.0)
    ts = np.geomspace(t0, t1, 257)
    fv = np.asarray(f(ts), dtype=float)
    L = float(np.abs(np.diff(fv) / np.diff(ts)).max())
    return 1.05 * float(problem.rho_values.max()) * L


def _restrict(problem: BallProblem, u) -> np.ndarray:
    if isinstance(u, Field):
        idx = np.rint((problem.nodes + problem.grid.X) / problem.grid.h).astype(int)
        return u.values[idx].copy()
    return np.asarray(u, dtype=float).copy()


def monotone_iterate(problem: BallProblem, f, u_lower, u_upper,
                     tol: float = 1e-10, maxit: int = 5000):
    """Fixed point of A u = rho f(u) squeezed between sub and supersolutions.

    Iterates u <- (A + M I)^{-1} (rho f(u) + M u) from both ends, with M
    a Lipschitz shift for rho f on the bracket.  Returns (fixed point
    from below, trace); the trace records residual histories, per-step
    monotonicity slack and the final two-sided gap.
    """
    A = problem.operator()
    rho = problem.rho_values
    lo = _restrict(problem, u_lower)
    hi = _restrict(problem, u_upper)
    scale = max(float(hi.max()), 1.0)
    if (lo > hi + 1e-12 * scale).any():
        raise PreconditionError("lower iterate must sit below the upper one")
    r_lo = A @ lo - rho * np.asarray(f(lo), dtype=float)
    r_hi = A @ hi - rho * np.asarray(f(hi), dtype=float)
    trace = {
        "sub_residual_max": float(r_lo.max()),
        "super_residual_min": float(r_hi.min()),
        "sub_ok": bool(r_lo.max() <= 1e-10 * scale),
        "super_ok": bool(r_hi.min() >= -1e-10 * scale),
    }
    M = _lipschitz_shift(problem, f, lo, hi)
    B = A + M * np.eye(A.shape[0])
    luB = sla.lu_factor(B)
    limits = []
    for label, u0, direction in (("lower", lo, +1.0), ("upper", hi, -1.0)):
        u = u0.copy()
        res_hist = []
        mono_slack = 0.0
        res = None
        for k in range(maxit):
            un = sla.lu_solve(luB, rho * np.asarray(f(u), dtype=float) + M * u)
            mono_slack = max(mono_slack, float((direction * (u - un)).max()))
            u = un
            res = float(np.abs(A @ u - rho * np.asarray(f(u), dtype=float)).max())
            res_hist.append(res)
            if res < tol:
                break
        else:
            raise NumericError(f"{label} iteration stalled at residual {res:.2e}")
        trace[f"{label}_residuals"] = res_hist
        trace[f"{label}_monotone_slack"] = mono_slack
        limits.append(u)
    trace["gap"] = float(np.abs(limits[0] - limits[1]).max())
    trace["iterations"] = (len(trace["lower_residuals"]), len(trace["upper_residuals"]))
    trace["upper_limit"] = limits[1]
    return problem.embed(limits[0]), trace


def uniqueness_check(problem: BallProblem, f, u1, u2,
                     tol: float = 1e-6, residual_tol: float = 1e-6) -> dict:
    """Two-candidate uniqueness verdict via the infimum ratio.

    Both candidates must actually solve A u = rho f(u) (residual guard)
    and be positive inside; the scan over lambda with lambda*w1 <= w2
    collapses to the reported lambda_star = inf w2/w1.
    """
    A = problem.operator()
    rho = problem.rho_values
    w1 = _restrict(problem, u1)
    w2 = _restrict(problem, u2)
    for tag, w in (("first", w1), ("second", w2)):
        if (w <= 0.0).any():
            raise PreconditionError(f"{tag} candidate not positive inside the ball")
        res = float(np.abs(A @ w - rho * np.asarray(f(w), dtype=float)).max())
        if res > residual_tol:
            raise PreconditionError(f"{tag} candidate residual {res:.2e} above guard")
    lam_star = float((w2 / w1).min())
    gap = float(np.abs(w1 - w2).max() / w1.max())
    return {
        "unique": bool(min(lam_star, 1.0 / lam_star) >= 1.0 - tol and gap < tol),
        "lambda_star": lam_star,
        "sup_gap_rel": gap,
    }


def whole_space_sublinear_solve(w, sigma: float, alpha: float,
                                R_schedule, grid: GridSpec):
    """Bounded positive solution of L u = rho u^sigma through expanding balls.

    Requires the weight's potential to be bounded (classifier verdict);
    on each ball the bracket is [eps*phi_R, C*U] with eps from the
    eigenvalue smallness condition and U the linear response A U = rho.
    Returns (largest-R solution, per-R table).
    """
    from .potential import check_property_H

    if not 0.0 < sigma < 1.0:
        raise DomainError(f"sublinear exponent must lie in (0,1), got {sigma}")
    if not 0.0 < alpha < grid.n:
        raise DomainError(f"need 0 < order < dimension, got {alpha}")
    report = check_property_H(w, alpha, grid.n)
    if not report.holds:
        raise PreconditionError("weight potential unbounded; no bounded solution exists")
    f = lambda t: np.maximum(t, 0.0) ** sigma
    prev_field = None
    best = None
    table = []
    for R in R_schedule:
        prob = BallProblem(R=R, alpha=alpha, sigma=sigma, grid=grid, rho=w.rho)
        rho = prob.rho_values
        U = sla.lu_solve(prob.factor(), rho)
        supU = float(U.max())
        pair = principal_eigenpair(prob)
        eps = pair.lambda_1R ** (-1.0 / (1.0 - sigma))
        C = 2.0 * supU ** (sigma / (1.0 - sigma))
        phi_int = _restrict(prob, pair.phi_R)
        u, trace = monotone_iterate(prob, f, eps * phi_int, C * U)
        if (u.values > prob.embed(C * U).values + 1e-8).any():
            raise NumericError("solution escaped the supersolution bound")
        if prev_field is not None:
            slack = 1e-6 * max(float(u.values.max()), 1.0)
            if (u.values < prev_field.values - slack).any():
                raise NumericError(f"ball solutions not nondecreasing at R={R}")
        prev_field = u
        best = u
        table.append({
            "R": float(R), "lambda_1R": pair.lambda_1R, "eps": float(eps),
            "C": float(C), "sup_u": float(u.values.max()),
            "residual": trace["lower_residuals"][-1], "gap": trace["gap"],
        })
    return best, table


# ------------------------------------------------------------ exponent ladder

@dataclass
class LadderResult:
    p: Fraction
    alpha: Fraction
    n: int
    sequence: list
    first_positive: int | None
    analytic_limit: float
    in_theorem_range: bool


def exponent_ladder(p, alpha, n: int, K: int) -> LadderResult:
    """Exact recursion p_1 = a - n, p_{k+1} = p p_k + a, in rational arithmetic.

    first_positive is the least k with p_k >= 0, or None when no rung
    reaches it.  For p < 1 the analytic limit a/(1-p) is reported; for p = 1
    +inf (arithmetic growth); for p > 1 the sign of p_1 + a/(p-1), which
    decides whether the ladder escapes.
    """
    if K < 1:
        raise ConfigurationError("need at least one rung")
    pF, aF = Fraction(p), Fraction(alpha)
    if not 0 < aF < n:
        raise DomainError(f"need 0 < order < dimension, got {alpha}, n={n}")
    if pF <= 0:
        raise DomainError(f"exponent must be positive, got {p}")
    seq = [aF - n]
    for _ in range(K - 1):
        seq.append(pF * seq[-1] + aF)
    for k in range(1, K):
        closed = seq[0] + k * aF if pF == 1 else \
            pF ** k * seq[0] + aF * (pF ** k - 1) / (pF - 1)
        if closed != seq[k]:
            raise NumericError("closed form diverged from the recursion")
    first = next((k + 1 for k, v in enumerate(seq) if v >= 0), None)
    if pF < 1:
        limit = float(aF / (1 - pF))
    elif pF == 1:
        limit = float("inf")
    else:
        limit = float(np.sign(float(seq[0] + aF / (pF - 1))))
    return LadderResult(
        p=pF, alpha=aF, n=n, sequence=seq, first_positive=first,
        analytic_limit=limit,
        in_theorem_range=bool(pF <= Fraction(n, 1) / (n - aF)),
    )


def liouville_bootstrap_probe(p: float, alpha: float, n: int, iterations: int,
                              nmesh: int = 512, theta_nodes: int = 64,
                              radial_nodes: int = 16, rmax: float = 1e4,
                              theta_weight: float = 0.0,
                              seed_amplitude: float = 1.0) -> dict:
    """Track the ladder by iterating the restricted-kernel lower bound.

    Starting from seed_amplitude*(1+|x|)^{a-n} on a log-radial mesh, each
    pass computes int_{|x-y| <= |x|/2} u(y)^p |x-y|^{a-n} dy through the
    angular reduction (n = 2), then fits the decay exponent on the last
    decade.  An optional weight (1+|y|)^{-theta} multiplies the density.
    """
    if n != 2:
        raise ConfigurationError("angular reduction implemented for n = 2")
    if not 0.0 < alpha < n:
        raise DomainError(f"need 0 < order < dimension, got {alpha}")
    if p <= 0.0:
        raise DomainError(f"exponent must be positive, got {p}")
    if nmesh < 64 or rmax < 100.0:
        raise ConfigurationError("mesh too small to fit decay exponents")
    s = np.logspace(0.0, np.log10(rmax), nmesh)
    logs = np.log(s)
    U = seed_amplitude * (1.0 + s) ** (alpha - n)
    wn, ww = leggauss(radial_nodes)
    wn = 0.5 * (wn + 1.0)
    ww = 0.5 * ww
    th = 2.0 * np.pi * (np.arange(theta_nodes) + 0.5) / theta_nodes
    cth = np.cos(th)
    mask_fit = s >= rmax / 10.0
    Afit = np.vstack([logs[mask_fit], np.ones(mask_fit.sum())]).T

    def fit_exponent(vals):
        return float(np.linalg.lstsq(Afit, np.log(vals[mask_fit]), rcond=None)[0][0])

    ladder = exponent_ladder(p, alpha, n, iterations + 1)
    fits = []
    for _ in range(iterations):
        logU = np.log(U)
        slope = (logU[-1] - logU[-33]) / (logs[-1] - logs[-33])

        def interp(q):
            lq = np.log(q)
            out = np.interp(lq, logs, logU)
            far = lq > logs[-1]
            out[far] = logU[-1] + slope * (lq[far] - logs[-1])
            return np.exp(out)

        Unew = np.empty_like(U)
        for i, x in enumerate(s):
            r = 0.5 * x * wn ** (1.0 / alpha)   # flattens the r^{a-1} factor
            d = np.sqrt(x * x + r[:, None] ** 2 + 2.0 * x * r[:, None] * cth[None, :])
            val = interp(d.ravel()).reshape(d.shape) ** p
            if theta_weight:
                val *= (1.0 + d) ** -theta_weight
            ang = val.mean(axis=1) * 2.0 * np.pi
            Unew[i] = ((0.5 * x) ** alpha / alpha) * np.dot(ww, ang)
        U = Unew
        fits.append(fit_exponent(U))
    lad = [float(v) for v in ladder.sequence]
    # the seed is rung 1, so iterate j carries rung j+2
    matches = [abs(f - l) <= 0.1 * max(1.0, abs(l)) for f, l in zip(fits, lad[1:])]
    positivity = next((k + 1 for k, f in enumerate(fits) if f >= -0.1), None)
    return {
        "seed_exponent": float(alpha - n),
        "exponents": fits,
        "ladder": lad,
        "matches": matches,
        "positivity_iteration": positivity,
        "in_theorem_range": ladder.in_theorem_range,
    }
