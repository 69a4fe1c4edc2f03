"""Solver-agnostic conic programming layer.

Standard form: minimize ``c @ x`` subject to, for every constraint block,
``A @ x + b`` belonging to the block's cone. Supported cones:

* ``zero``: the block value must vanish (equalities);
* ``nonneg``: componentwise nonnegative;
* ``soc``: second-order cone, first row is the bound, the rest the norm body;
* ``psd``: block value is the svec of a symmetric PSD matrix of the declared
  order, packed as the lower triangle read column by column with off-diagonal
  entries scaled by sqrt(2). This packing is the single wire format between
  the precoder reductions and the solver.

``solve`` is backed by the Clarabel interior-point solver. Results are
re-checked against the residual contract (primal residual and relative gap
at most 1e-7) before a solution may be reported optimal; anything weaker is
downgraded to ``numerical_failure``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse

import clarabel

CONES = ("zero", "nonneg", "soc", "psd")

# residual contract for status "optimal"
OPTIMAL_PRIMAL_TOL = 1e-7
OPTIMAL_GAP_TOL = 1e-7

# default acceptance threshold for lambda2/lambda1 in rank-one extraction
RANK_ONE_RATIO = 1e-6


def svec_dim(m: int) -> int:
    return m * (m + 1) // 2


@lru_cache(maxsize=None)
def _lower_colmajor_indices(m: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for j in range(m) for i in range(j, m))


def svec(mat: np.ndarray) -> np.ndarray:
    """Pack a real symmetric matrix into its scaled lower triangle."""
    mat = np.asarray(mat, dtype=float)
    m = mat.shape[0]
    if mat.shape != (m, m):
        raise ValueError("svec expects a square matrix")
    out = np.empty(svec_dim(m))
    root2 = math.sqrt(2.0)
    for p, (i, j) in enumerate(_lower_colmajor_indices(m)):
        out[p] = mat[i, j] if i == j else mat[i, j] * root2
    return out


def smat(v: np.ndarray) -> np.ndarray:
    """Inverse of svec."""
    v = np.asarray(v, dtype=float)
    # solve m(m+1)/2 = len(v)
    m = int(round((math.sqrt(8 * v.size + 1) - 1) / 2))
    if svec_dim(m) != v.size:
        raise ValueError("svec vector has a non-triangular length")
    out = np.zeros((m, m))
    inv_root2 = 1.0 / math.sqrt(2.0)
    for p, (i, j) in enumerate(_lower_colmajor_indices(m)):
        if i == j:
            out[i, j] = v[p]
        else:
            out[i, j] = out[j, i] = v[p] * inv_root2
    return out


@lru_cache(maxsize=None)
def _clarabel_psd_permutation(m: int) -> np.ndarray:
    """Row permutation from this module's svec packing to Clarabel's.

    Clarabel stacks the upper triangle column by column; for a symmetric
    matrix that is the same multiset of entries in a different order.
    """
    mine = {ij: p for p, ij in enumerate(_lower_colmajor_indices(m))}
    perm = np.empty(svec_dim(m), dtype=int)
    q = 0
    for j in range(m):
        for i in range(j + 1):
            perm[q] = mine[(j, i)]
            q += 1
    return perm


@dataclass(frozen=True, eq=False)
class ConeBlock:
    a: np.ndarray
    b: np.ndarray
    cone: str
    order: int | None = None  # matrix order for psd blocks

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        if self.cone not in CONES:
            raise ValueError(f"unknown cone tag {self.cone!r}")
        if a.shape[0] != b.size:
            raise ValueError("block A and b row counts differ")
        if self.cone == "psd":
            if self.order is None or svec_dim(self.order) != b.size:
                raise ValueError("psd block length must match order*(order+1)/2")
        elif self.cone == "soc":
            if b.size < 1:
                raise ValueError("soc block needs at least one row")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def rows(self) -> int:
        return self.b.size


@dataclass(frozen=True, eq=False)
class ConeProgram:
    """Linear objective over a product of cones; see module docstring."""

    n_vars: int
    c: np.ndarray
    blocks: tuple[ConeBlock, ...]

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        if c.size != self.n_vars:
            raise ValueError("objective length must equal the variable count")
        for blk in self.blocks:
            if blk.a.shape[1] != self.n_vars:
                raise ValueError("constraint block column count mismatch")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "blocks", tuple(self.blocks))

    def dump_text(self) -> str:
        """Plain-text sparse dump for cross-solver diffing.

        Format: a header line ``coneprogram <n_vars> <n_blocks>``, one line
        ``c <i> <value>`` per objective nonzero, then per block a line
        ``block <index> <cone> <rows> <order>`` followed by ``b <i> <value>``
        and ``a <i> <j> <value>`` triplet lines for nonzeros.
        """
        out = io.StringIO()
        out.write(f"coneprogram {self.n_vars} {len(self.blocks)}\n")
        for i in np.flatnonzero(self.c):
            out.write(f"c {i} {self.c[i]!r}\n")
        for bi, blk in enumerate(self.blocks):
            order = blk.order if blk.order is not None else 0
            out.write(f"block {bi} {blk.cone} {blk.rows} {order}\n")
            for i in np.flatnonzero(blk.b):
                out.write(f"b {i} {blk.b[i]!r}\n")
            for i, j in zip(*np.nonzero(blk.a)):
                out.write(f"a {i} {j} {blk.a[i, j]!r}\n")
        return out.getvalue()


@dataclass(frozen=True)
class SolverTolerances:
    gap: float = 1e-8
    feas: float = 1e-8
    max_iter: int = 200


@dataclass(frozen=True)
class ResidualReport:
    primal_infeasibility: float
    dual_infeasibility: float
    duality_gap_rel: float


@dataclass(frozen=True, eq=False)
class ConeSolution:
    status: str  # optimal | infeasible | unbounded | numerical_failure
    x: np.ndarray | None
    z: np.ndarray | None
    objective: float
    residuals: ResidualReport | None
    iterations: int
    solver_status: str


def _cone_distance(s: np.ndarray, cone: str) -> float:
    if cone == "zero":
        return float(np.max(np.abs(s), initial=0.0))
    if cone == "nonneg":
        return float(max(0.0, -np.min(s, initial=0.0)))
    if cone == "soc":
        return float(max(0.0, np.linalg.norm(s[1:]) - s[0]))
    if cone == "psd":
        w = np.linalg.eigvalsh(smat(s))
        return float(max(0.0, -w.min()))
    raise ValueError(cone)


def _residual_report(prog: ConeProgram, x: np.ndarray, z: np.ndarray) -> ResidualReport:
    primal = 0.0
    offset = 0
    at_z = np.zeros(prog.n_vars)
    bz = 0.0
    for blk in prog.blocks:
        s = blk.a @ x + blk.b
        zb = z[offset:offset + blk.rows]
        primal = max(primal, _cone_distance(s, blk.cone) / (1.0 + np.max(np.abs(blk.b), initial=0.0)))
        at_z += blk.a.T @ zb
        bz += blk.b @ zb
        offset += blk.rows
    cx = float(prog.c @ x)
    dual = float(np.max(np.abs(prog.c - at_z), initial=0.0) / (1.0 + np.max(np.abs(prog.c), initial=0.0)))
    gap = abs(cx + bz) / (1.0 + abs(cx) + abs(bz))
    return ResidualReport(primal_infeasibility=primal,
                          dual_infeasibility=dual,
                          duality_gap_rel=gap)


def dual_objective(prog: ConeProgram, z: np.ndarray) -> float:
    """Lower bound -b @ z produced by a dual vector."""
    bz = 0.0
    offset = 0
    for blk in prog.blocks:
        bz += blk.b @ z[offset:offset + blk.rows]
        offset += blk.rows
    return -float(bz)


_STATUS_OPTIMAL = {"Solved", "AlmostSolved"}
_STATUS_INFEASIBLE = {"PrimalInfeasible", "AlmostPrimalInfeasible"}
_STATUS_UNBOUNDED = {"DualInfeasible", "AlmostDualInfeasible"}


def solve(prog: ConeProgram, tolerances: SolverTolerances | None = None) -> ConeSolution:
    """Solve a ConeProgram with a certified residual report.

    ``numerical_failure`` is a status, not an exception; malformed programs
    raise ValueError at construction time instead.
    """
    tol = tolerances or SolverTolerances()
    if not prog.blocks:
        raise ValueError("program has no constraint blocks")

    rows_a = []
    rows_b = []
    cones = []
    for blk in prog.blocks:
        a, b = blk.a, blk.b
        if blk.cone == "zero":
            cones.append(clarabel.ZeroConeT(blk.rows))
        elif blk.cone == "nonneg":
            cones.append(clarabel.NonnegativeConeT(blk.rows))
        elif blk.cone == "soc":
            cones.append(clarabel.SecondOrderConeT(blk.rows))
        else:
            perm = _clarabel_psd_permutation(blk.order)
            a, b = a[perm], b[perm]
            cones.append(clarabel.PSDTriangleConeT(blk.order))
        rows_a.append(a)
        rows_b.append(b)
    a_all = np.vstack(rows_a)
    b_all = np.concatenate(rows_b)

    # Clarabel solves min c@x s.t. Ax + s = b, s in K, i.e. s = b - Ax,
    # while this module's blocks state s = Ax + b; flip the sign of A.
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.max_iter = tol.max_iter
    settings.tol_gap_abs = tol.gap
    settings.tol_gap_rel = tol.gap
    settings.tol_feas = tol.feas
    settings.max_threads = 1
    solver = clarabel.DefaultSolver(
        sparse.csc_matrix((prog.n_vars, prog.n_vars)),
        prog.c,
        sparse.csc_matrix(-a_all),
        b_all,
        cones,
        settings,
    )
    raw = solver.solve()
    raw_status = str(raw.status)
    iterations = int(getattr(raw, "iterations", 0))

    if raw_status in _STATUS_INFEASIBLE:
        return ConeSolution("infeasible", None, None, math.nan, None, iterations, raw_status)
    if raw_status in _STATUS_UNBOUNDED:
        return ConeSolution("unbounded", None, None, -math.inf, None, iterations, raw_status)
    if raw_status not in _STATUS_OPTIMAL:
        return ConeSolution("numerical_failure", None, None, math.nan, None, iterations, raw_status)

    x = np.asarray(raw.x, dtype=float)
    z_perm = np.asarray(raw.z, dtype=float)
    # undo the per-block PSD permutation on the dual vector
    z = np.empty_like(z_perm)
    offset = 0
    for blk in prog.blocks:
        zb = z_perm[offset:offset + blk.rows]
        if blk.cone == "psd":
            perm = _clarabel_psd_permutation(blk.order)
            back = np.empty_like(zb)
            back[perm] = zb
            zb = back
        z[offset:offset + blk.rows] = zb
        offset += blk.rows

    report = _residual_report(prog, x, z)
    status = "optimal"
    if report.primal_infeasibility > OPTIMAL_PRIMAL_TOL or report.duality_gap_rel > OPTIMAL_GAP_TOL:
        status = "numerical_failure"
    return ConeSolution(status, x, z, float(prog.c @ x), report, iterations, raw_status)


# ---------------------------------------------------------------------------
# complex / Hermitian helpers


def embed_hermitian_psd(x: np.ndarray) -> np.ndarray:
    """Real symmetric embedding [[X_R, -X_I], [X_I, X_R]] of a Hermitian matrix.

    The embedding is PSD exactly when X is, with every eigenvalue of X
    appearing twice.
    """
    x = np.asarray(x, dtype=complex)
    m = x.shape[0]
    if x.shape != (m, m):
        raise ValueError("expected a square matrix")
    if np.max(np.abs(x - x.conj().T), initial=0.0) > 1e-10:
        raise ValueError("matrix is not Hermitian within 1e-10")
    xr, xi = x.real, x.imag
    return np.block([[xr, -xi], [xi, xr]])


@dataclass
class RankReport:
    top_eigenvalue: float
    second_eigenvalue: float

    @property
    def ratio(self) -> float:
        if self.top_eigenvalue <= 0.0:
            return math.inf if self.second_eigenvalue > 0 else 0.0
        return max(self.second_eigenvalue, 0.0) / self.top_eigenvalue


def extract_rank_one(w: np.ndarray, tol: float = 1e-8) -> tuple[np.ndarray, RankReport]:
    """Top eigenpair of a PSD matrix as a beamformer candidate.

    Returns sqrt(lambda_1) * u_1 and a report carrying lambda_2 / lambda_1;
    the caller decides acceptance (default threshold RANK_ONE_RATIO).
    """
    w = np.asarray(w, dtype=complex)
    vals, vecs = np.linalg.eigh(w)
    if vals.min() < -tol:
        raise ValueError(f"matrix is not PSD within tol (min eigenvalue {vals.min():g})")
    top = float(max(vals[-1], 0.0))
    second = float(max(vals[-2], 0.0)) if vals.size > 1 else 0.0
    vec = vecs[:, -1] * math.sqrt(top)
    return vec, RankReport(top_eigenvalue=top, second_eigenvalue=second)


def gaussian_randomization(w: np.ndarray, constraint_checker, trials: int,
                           rng: np.random.Generator) -> np.ndarray | None:
    """Randomized rounding for a non-rank-one covariance.

    Draws candidates from CN(0, w) and hands each to ``constraint_checker``,
    which must return a feasible (typically minimally rescaled) vector or
    None to reject. The minimum-power survivor is returned; None signals
    failure, which is a value rather than an exception.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    w = np.asarray(w, dtype=complex)
    vals, vecs = np.linalg.eigh(w)
    vals = np.clip(vals, 0.0, None)
    root = vecs * np.sqrt(vals)[None, :]
    best = None
    best_power = math.inf
    m = w.shape[0]
    for _ in range(trials):
        g = (rng.normal(size=m) + 1j * rng.normal(size=m)) / math.sqrt(2.0)
        cand = constraint_checker(root @ g)
        if cand is None:
            continue
        p = float(np.vdot(cand, cand).real)
        if p < best_power:
            best, best_power = cand, p
    return best


def min_quadratic_over_ball(a: np.ndarray, b: np.ndarray, c: float,
                            radius: float) -> float:
    """Exact minimum of u^H A u + 2 Re(b^H u) + c over the ball ||u|| <= radius.

    A must be Hermitian. Solved as a real trust-region subproblem through the
    eigendecomposition and a bisection on the boundary multiplier; used both
    to certify S-procedure blocks and to evaluate worst-case constraints.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    a = np.asarray(a, dtype=complex)
    bv = np.asarray(b, dtype=complex).ravel()
    if radius == 0.0:
        return float(c)
    ar = embed_hermitian_psd(a)
    br = np.concatenate([bv.real, bv.imag])
    vals, vecs = np.linalg.eigh(ar)
    beta = vecs.T @ br
    lam_min = vals[0]

    def x_norm_sq(nu: float) -> float:
        d = vals + nu
        return float(np.sum((beta / d) ** 2))

    if lam_min > 0:
        # interior candidate
        if x_norm_sq(0.0) <= radius ** 2:
            x = -vecs @ (beta / vals)
            return float(x @ ar @ x + 2 * br @ x + c)

    nu_lo = max(0.0, -lam_min)
    # hard case: no boundary multiplier reaches the radius along beta alone
    eps_feel = 1e-12 * (1.0 + abs(lam_min))
    if x_norm_sq(nu_lo + eps_feel) <= radius ** 2 and nu_lo > 0:
        d = vals + nu_lo
        mask = d > 1e-12 * (1.0 + abs(lam_min))
        y = np.zeros_like(beta)
        y[mask] = -beta[mask] / d[mask]
        rem = radius ** 2 - float(y @ y)
        if rem > 0:
            idx = int(np.argmin(vals))
            e = np.zeros_like(y)
            e[idx] = math.sqrt(rem)
            y = y + e
        x = vecs @ y
        return float(x @ ar @ x + 2 * br @ x + c)

    hi = nu_lo + 1.0
    while x_norm_sq(hi) > radius ** 2:
        hi = nu_lo + 2 * (hi - nu_lo)
    lo = nu_lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if x_norm_sq(mid) > radius ** 2:
            lo = mid
        else:
            hi = mid
    d = vals + hi
    x = vecs @ (-beta / d)
    nx = np.linalg.norm(x)
    if nx > 0:
        x *= radius / nx
    return float(x @ ar @ x + 2 * br @ x + c)


# ---------------------------------------------------------------------------
# affine expressions and the program builder


@dataclass
class HermAffine:
    """Hermitian-matrix-valued affine expression const + sum_k x_k * coefs[k]."""

    const: np.ndarray
    coefs: dict[int, np.ndarray]

    def scaled(self, s: float) -> "HermAffine":
        return HermAffine(self.const * s, {k: m * s for k, m in self.coefs.items()})

    def plus(self, other: "HermAffine") -> "HermAffine":
        coefs = {k: m.copy() for k, m in self.coefs.items()}
        for k, m in other.coefs.items():
            coefs[k] = coefs.get(k, 0) + m
        return HermAffine(self.const + other.const, coefs)

    def times_vector(self, u: np.ndarray) -> "VecAffine":
        u = np.asarray(u, dtype=complex)
        return VecAffine(self.const @ u, {k: m @ u for k, m in self.coefs.items()})

    def quad_form(self, u: np.ndarray, shift: float = 0.0) -> "ScalarAffine":
        u = np.asarray(u, dtype=complex)
        return ScalarAffine(
            float(np.real(u.conj() @ self.const @ u)) + shift,
            {k: float(np.real(u.conj() @ m @ u)) for k, m in self.coefs.items()},
        )

    def value(self, x: np.ndarray) -> np.ndarray:
        out = self.const.astype(complex).copy()
        for k, m in self.coefs.items():
            out += x[k] * m
        return out


@dataclass
class VecAffine:
    const: np.ndarray
    coefs: dict[int, np.ndarray]


@dataclass
class ScalarAffine:
    const: float
    coefs: dict[int, float]


class ProgramBuilder:
    """Incremental ConeProgram assembly.

    Declare all variables first, then add constraint blocks; ``build`` freezes
    the result. Dense block storage is fine at the problem sizes this package
    produces (tens of variables, hundreds of rows).
    """

    def __init__(self):
        self._n = 0
        self._obj: dict[int, float] = {}
        self._blocks: list[ConeBlock] = []

    @property
    def n_vars(self) -> int:
        return self._n

    def add_vars(self, count: int) -> np.ndarray:
        idx = np.arange(self._n, self._n + count)
        self._n += count
        return idx

    def add_objective(self, indices, coefs) -> None:
        for i, c in zip(np.atleast_1d(indices), np.atleast_1d(coefs)):
            self._obj[int(i)] = self._obj.get(int(i), 0.0) + float(c)

    def row(self, indices, coefs) -> np.ndarray:
        r = np.zeros(self._n)
        r[np.asarray(indices, dtype=int)] = np.asarray(coefs, dtype=float)
        return r

    def add_block(self, a: np.ndarray, b: np.ndarray, cone: str,
                  order: int | None = None) -> None:
        a = np.atleast_2d(np.asarray(a, dtype=float))
        if a.shape[1] != self._n:
            padded = np.zeros((a.shape[0], self._n))
            padded[:, :a.shape[1]] = a
            a = padded
        self._blocks.append(ConeBlock(a=a, b=b, cone=cone, order=order))

    def add_nonneg(self, rows: list[tuple[np.ndarray, float]]) -> None:
        a = np.vstack([r for r, _ in rows])
        b = np.array([off for _, off in rows])
        self.add_block(a, b, "nonneg")

    def add_soc(self, t_row: tuple[np.ndarray, float],
                u_rows: list[tuple[np.ndarray, float]]) -> None:
        rows = [t_row] + list(u_rows)
        a = np.vstack([r for r, _ in rows])
        b = np.array([off for _, off in rows])
        self.add_block(a, b, "soc")

    def add_psd_herm_affine(self, expr: HermAffine) -> None:
        """Constrain a Hermitian affine expression to be PSD (real embedded)."""
        m = expr.const.shape[0]
        dim = svec_dim(2 * m)
        a = np.zeros((dim, self._n))
        for k, mat in expr.coefs.items():
            a[:, k] = svec(embed_hermitian_psd(mat))
        b = svec(embed_hermitian_psd(expr.const))
        self.add_block(a, b, "psd", order=2 * m)

    def hermitian_var(self, m: int) -> "HermitianVar":
        return HermitianVar(self, m)

    def build(self, sense: float = 1.0) -> ConeProgram:
        c = np.zeros(self._n)
        for i, v in self._obj.items():
            c[i] = sense * v
        return ConeProgram(n_vars=self._n, c=c, blocks=tuple(self._blocks))


class HermitianVar:
    """An m x m complex Hermitian matrix variable over m**2 real parameters.

    Parameter order: the m diagonal entries, then for each pair i < j the
    real and imaginary parts of the (i, j) entry.
    """

    def __init__(self, builder: ProgramBuilder, m: int):
        self.m = m
        self.idx = builder.add_vars(m * m)
        basis = []
        for i in range(m):
            e = np.zeros((m, m), dtype=complex)
            e[i, i] = 1.0
            basis.append(e)
        for i in range(m):
            for j in range(i + 1, m):
                re = np.zeros((m, m), dtype=complex)
                re[i, j] = re[j, i] = 1.0
                basis.append(re)
                im = np.zeros((m, m), dtype=complex)
                im[i, j] = 1.0j
                im[j, i] = -1.0j
                basis.append(im)
        self.basis = basis

    def affine(self) -> HermAffine:
        return HermAffine(np.zeros((self.m, self.m), dtype=complex),
                          {int(k): mat for k, mat in zip(self.idx, self.basis)})

    def trace_row(self, builder: ProgramBuilder) -> np.ndarray:
        return builder.row(self.idx[:self.m], np.ones(self.m))

    def trace_product_row(self, builder: ProgramBuilder, r: np.ndarray) -> np.ndarray:
        """Coefficient row of the real linear functional Tr(W R)."""
        coefs = [float(np.real(np.trace(mat @ r))) for mat in self.basis]
        return builder.row(self.idx, coefs)

    def add_psd(self, builder: ProgramBuilder) -> None:
        builder.add_psd_herm_affine(self.affine())

    def value(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros((self.m, self.m), dtype=complex)
        for k, mat in zip(self.idx, self.basis):
            out += x[k] * mat
        return out


def _coerce_herm(a, m: int) -> HermAffine:
    if isinstance(a, HermAffine):
        return a
    a = np.asarray(a, dtype=complex)
    if np.max(np.abs(a - a.conj().T), initial=0.0) > 1e-10:
        raise ValueError("S-procedure matrix must be Hermitian")
    return HermAffine(a, {})


def _coerce_vec(b, m: int) -> VecAffine:
    if isinstance(b, VecAffine):
        return b
    return VecAffine(np.asarray(b, dtype=complex).ravel(), {})


def _coerce_scalar(c) -> ScalarAffine:
    if isinstance(c, ScalarAffine):
        return c
    return ScalarAffine(float(c), {})


def s_procedure_block(builder: ProgramBuilder, a, b, c, eps: float,
                      lam: int) -> None:
    """Append the S-procedure LMI for a ball-robust quadratic inequality.

    Encodes: u^H A u + 2 Re(b^H u) + c >= 0 for all ||u|| <= eps, via the
    equivalent existence of lam >= 0 with

        [[A + lam*I, b], [b^H, c - lam*eps**2]] >= 0.

    ``a``, ``b``, ``c`` may be numeric or affine in program variables; ``lam``
    is the index of the (separately nonnegativity-constrained) multiplier.
    The caller owns the lam >= 0 row.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    a_aff = _coerce_herm(a, 0)
    m = a_aff.const.shape[0]
    b_aff = _coerce_vec(b, m)
    c_aff = _coerce_scalar(c)

    def corner(mat: np.ndarray, vec: np.ndarray, scal: float) -> np.ndarray:
        g = np.zeros((m + 1, m + 1), dtype=complex)
        g[:m, :m] = mat
        g[:m, m] = vec
        g[m, :m] = np.conj(vec)
        g[m, m] = scal
        return g

    coefs: dict[int, np.ndarray] = {}
    keys = set(a_aff.coefs) | set(b_aff.coefs) | set(c_aff.coefs)
    zmat = np.zeros((m, m), dtype=complex)
    zvec = np.zeros(m, dtype=complex)
    for k in keys:
        coefs[k] = corner(a_aff.coefs.get(k, zmat), b_aff.coefs.get(k, zvec),
                          c_aff.coefs.get(k, 0.0))
    lam_mat = corner(np.eye(m, dtype=complex), zvec, -float(eps) ** 2)
    coefs[int(lam)] = coefs.get(int(lam), np.zeros((m + 1, m + 1), dtype=complex)) + lam_mat
    const = corner(a_aff.const, b_aff.const, c_aff.const)
    builder.add_psd_herm_affine(HermAffine(const, coefs))
