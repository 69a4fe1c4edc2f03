"""The five secure precoder designs, each reduced to a ConeProgram.

Perfect-CSI designs: the conventional semidefinite relaxation over the
information and artificial-noise covariances; the constructive-interference
SOCP over one aggregate symbol-level precoder; and the constructive plus
destructive variant that additionally pins every eavesdropper's received
point inside the upper destructive wedge.

Robust designs enforce the same constraints for every channel error inside a
Euclidean ball: the conventional one through S-procedure LMI blocks, the
constructive one through Cauchy-Schwarz worst cases that tighten each linear
constraint by an epsilon-scaled norm term.

All solvers are pure functions of their inputs and reentrant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import conic
from .conic import (ProgramBuilder, extract_rank_one,
                    gaussian_randomization, min_quadratic_over_ball,
                    s_procedure_block)
from .model import (ChannelSet, Constellation, Precoder, PrecoderBundle,
                    Targets, Uncertainty, instantaneous_power)

SCHEME_CONVENTIONAL = "conventional"
SCHEME_CONSTRUCTIVE = "constructive"
SCHEME_CONSTRUCTIVE_DESTRUCTIVE = "constructive_destructive"
SCHEME_ROBUST_CONVENTIONAL = "robust_conventional"
SCHEME_ROBUST_CONSTRUCTIVE = "robust_constructive"

SCHEMES = (
    SCHEME_CONVENTIONAL,
    SCHEME_CONSTRUCTIVE,
    SCHEME_CONSTRUCTIVE_DESTRUCTIVE,
    SCHEME_ROBUST_CONVENTIONAL,
    SCHEME_ROBUST_CONSTRUCTIVE,
)

VERIFY_TOL = 1e-6


@dataclass(eq=False)
class SolveOutcome:
    """Result of one precoder design on one channel realization."""

    scheme: str
    status: str  # optimal | infeasible | numerical_failure
    transmit_power: float
    precoder: Precoder | None = None
    bundle: PrecoderBundle | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status == "optimal"


def _check_dims(ch: ChannelSet, targets: Targets) -> None:
    if targets.k != ch.k:
        raise ValueError(f"targets carry {targets.k} Eve caps but the channel "
                         f"set has {ch.k} eavesdroppers")


def _solver_diag(sol: conic.ConeSolution) -> dict:
    d = {"solver_status": sol.solver_status, "iterations": sol.iterations}
    if sol.residuals is not None:
        d.update(primal_infeasibility=sol.residuals.primal_infeasibility,
                 dual_infeasibility=sol.residuals.dual_infeasibility,
                 duality_gap_rel=sol.residuals.duality_gap_rel)
    return d


def _recv_rows(builder: ProgramBuilder, h: np.ndarray, x_idx: np.ndarray):
    """Rows expressing Re(h.T b) and Im(h.T b) over x = [Re b; Im b]."""
    re_row = builder.row(x_idx, np.concatenate([h.real, -h.imag]))
    im_row = builder.row(x_idx, np.concatenate([h.imag, h.real]))
    return re_row, im_row


def _aggregate_socp_base(n_t: int):
    """Shared skeleton: variables x = [Re b; Im b] and epigraph r >= ||b||."""
    builder = ProgramBuilder()
    x_idx = builder.add_vars(2 * n_t)
    r_idx = builder.add_vars(1)
    builder.add_objective(r_idx, [1.0])
    rows = [(builder.row(r_idx, [1.0]), 0.0)]
    rows += [(builder.row([i], [1.0]), 0.0) for i in x_idx]
    builder.add_soc(rows[0], rows[1:])
    return builder, x_idx, r_idx


def _aggregate_outcome(scheme: str, sol: conic.ConeSolution, x_idx: np.ndarray,
                       n_t: int, extra_diag: dict | None = None) -> SolveOutcome:
    diag = _solver_diag(sol)
    if extra_diag:
        diag.update(extra_diag)
    if sol.status != "optimal":
        return SolveOutcome(scheme, sol.status if sol.status != "unbounded"
                            else "numerical_failure", math.nan, diagnostics=diag)
    x = sol.x[x_idx]
    b = x[:n_t] + 1j * x[n_t:]
    prec = Precoder(b)
    diag["epigraph_radius"] = float(sol.objective)
    return SolveOutcome(scheme, "optimal", instantaneous_power(prec),
                        precoder=prec, diagnostics=diag)


def solve_constructive(ch: ChannelSet, targets: Targets,
                       constellation: Constellation) -> SolveOutcome:
    """Constructive-interference power minimization (per-symbol Eve caps).

    Minimizes the instantaneous power ||b||^2 subject to the IR received
    point lying in the constructive wedge and, for each Eve, the aggregate
    amplitude cap |h_e^T b| <= gamma_tilde_e (a per-symbol guarantee in place
    of the statistical ratio, which is not convex in the aggregate).
    """
    _check_dims(ch, targets)
    tan = math.tan(constellation.half_angle)
    builder, x_idx, _ = _aggregate_socp_base(ch.n_t)
    re_d, im_d = _recv_rows(builder, ch.h_d, x_idx)
    gt_d = targets.gamma_tilde_d
    builder.add_nonneg([
        (re_d * tan - im_d, -gt_d * tan),
        (re_d * tan + im_d, -gt_d * tan),
    ])
    for k in range(ch.k):
        re_e, im_e = _recv_rows(builder, ch.h_e[k], x_idx)
        zero = builder.row([], [])
        builder.add_soc((zero, targets.gamma_tilde_e[k]),
                        [(re_e, 0.0), (im_e, 0.0)])
    sol = conic.solve(builder.build())
    return _aggregate_outcome(SCHEME_CONSTRUCTIVE, sol, x_idx, ch.n_t)


def solve_constructive_destructive(ch: ChannelSet, targets: Targets,
                                   constellation: Constellation) -> SolveOutcome:
    """Constructive wedge at the IR, destructive upper wedge at every Eve."""
    _check_dims(ch, targets)
    tan = math.tan(constellation.half_angle)
    builder, x_idx, _ = _aggregate_socp_base(ch.n_t)
    re_d, im_d = _recv_rows(builder, ch.h_d, x_idx)
    gt_d = targets.gamma_tilde_d
    rows = [
        (re_d * tan - im_d, -gt_d * tan),
        (re_d * tan + im_d, -gt_d * tan),
    ]
    for k in range(ch.k):
        re_e, im_e = _recv_rows(builder, ch.h_e[k], x_idx)
        gt_e = targets.gamma_tilde_e[k]
        # both destructive half planes: Im >= |Re - gamma_tilde_e| * tan
        rows.append((re_e * tan + im_e, -gt_e * tan))
        rows.append((im_e - re_e * tan, gt_e * tan))
    builder.add_nonneg(rows)
    sol = conic.solve(builder.build())
    return _aggregate_outcome(SCHEME_CONSTRUCTIVE_DESTRUCTIVE, sol, x_idx, ch.n_t)


def solve_robust_constructive(ch_hat: ChannelSet, unc: Uncertainty,
                              targets: Targets,
                              constellation: Constellation) -> SolveOutcome:
    """Worst-case robust constructive-destructive SOCP.

    Each linear region constraint must hold for every channel error inside
    its ball; by Cauchy-Schwarz the worst case tightens the constraint by
    eps times the norm of the coefficient vector it multiplies, giving one
    second-order cone row per original inequality:

        h~.T (b2 - b1 t) + eps_d ||b2 - b1 t|| + g~_d t <= 0
       -h~.T (b2 + b1 t) + eps_d ||b2 + b1 t|| + g~_d t <= 0
       -h~_e.T (b2 + b1 t) + eps_e ||b2 + b1 t|| + g~_e t <= 0   (per Eve)
        h~_e.T (b1 t - b2) + eps_e ||b1 t - b2|| - g~_e t <= 0   (per Eve)

    with t = tan(theta), b1 = [Re b; -Im b] and b2 = [Im b; Re b]. At zero
    radius this reduces exactly to the perfect-CSI constructive-destructive
    program.
    """
    _check_dims(ch_hat, targets)
    tan = math.tan(constellation.half_angle)
    m = ch_hat.n_t
    builder, x_idx, _ = _aggregate_socp_base(m)

    eye = np.eye(m)
    zero = np.zeros((m, m))
    s1 = np.block([[eye, zero], [zero, -eye]])   # b1 = s1 @ x
    s2 = np.block([[zero, eye], [eye, zero]])    # b2 = s2 @ x

    def robust_row(h: np.ndarray, mat: np.ndarray, sign: float, eps: float,
                   const: float) -> None:
        """Encode sign * h~.T(mat x) + eps ||mat x|| + const <= 0."""
        h_tilde = np.concatenate([h.real, h.imag])
        lin = sign * (h_tilde @ mat)
        t_row = (builder.row(x_idx, -lin), -const)
        u_rows = [(builder.row(x_idx, eps * mat[i]), 0.0) for i in range(2 * m)]
        builder.add_soc(t_row, u_rows)

    m_minus = s2 - tan * s1
    m_plus = s2 + tan * s1
    gt_d = targets.gamma_tilde_d
    robust_row(ch_hat.h_d, m_minus, +1.0, unc.eps_d, gt_d * tan)
    robust_row(ch_hat.h_d, m_plus, -1.0, unc.eps_d, gt_d * tan)
    for k in range(ch_hat.k):
        gt_e = targets.gamma_tilde_e[k]
        robust_row(ch_hat.h_e[k], m_plus, -1.0, unc.eps_e, gt_e * tan)
        robust_row(ch_hat.h_e[k], tan * s1 - s2, +1.0, unc.eps_e, -gt_e * tan)
    sol = conic.solve(builder.build())
    return _aggregate_outcome(SCHEME_ROBUST_CONSTRUCTIVE, sol, x_idx, m,
                              {"eps_d": unc.eps_d, "eps_e": unc.eps_e})


# ---------------------------------------------------------------------------
# conventional (semidefinite) designs


def _rank_one_channel_matrix(h: np.ndarray) -> np.ndarray:
    """R = conj(h) h.T, so that Tr(W R) = h.T W conj(h)."""
    return np.outer(np.conj(h), h)


def _psd_project(w: np.ndarray) -> np.ndarray:
    """Strip solver-level negative eigenvalue noise from a nominally PSD matrix."""
    vals, vecs = np.linalg.eigh(w)
    return (vecs * np.clip(vals, 0.0, None)) @ vecs.conj().T


def _synthesize_an_beams(w_n: np.ndarray, n_beams: int):
    """Top-n scaled eigenvectors of the AN covariance, trace preserved."""
    vals, vecs = np.linalg.eigh(w_n)
    vals = np.clip(vals[::-1], 0.0, None)
    vecs = vecs[:, ::-1]
    total = float(vals.sum())
    kept = vals[:n_beams]
    kept_sum = float(kept.sum())
    diag = {"an_rank": int(np.sum(vals > 1e-9 * max(total, 1.0))),
            "an_trace": total,
            "an_trace_kept": kept_sum}
    if total <= 0.0 or kept_sum <= 0.0:
        beams = tuple(np.zeros(w_n.shape[0], dtype=complex) for _ in range(n_beams))
        return beams, diag
    scale = total / kept_sum
    beams = []
    for i in range(n_beams):
        if i < kept.size and kept[i] > 0.0:
            beams.append(np.sqrt(kept[i] * scale) * vecs[:, i].astype(complex))
        else:
            beams.append(np.zeros(w_n.shape[0], dtype=complex))
    return tuple(beams), diag


def _conventional_bundle(scheme: str, sol: conic.ConeSolution, w_d_var,
                         w_n_var, ch: ChannelSet, targets: Targets,
                         n_an: int, rng: np.random.Generator | None,
                         trials: int, checker) -> SolveOutcome:
    diag = _solver_diag(sol)
    if sol.status != "optimal":
        status = sol.status if sol.status != "unbounded" else "numerical_failure"
        return SolveOutcome(scheme, status, math.nan, diagnostics=diag)
    # Hermitian by construction; strip eigenvalue noise at the solver's accuracy
    w_d = _psd_project(w_d_var.value(sol.x))
    w_n = _psd_project(w_n_var.value(sol.x))
    b_d, report = extract_rank_one(w_d, tol=1e-6)
    diag["rank_ratio"] = report.ratio
    diag["randomization_used"] = False
    if report.ratio > conic.RANK_ONE_RATIO:
        rng = rng or np.random.default_rng(0)
        cand = gaussian_randomization(w_d, checker(w_n), trials, rng)
        if cand is None:
            diag["randomization_used"] = True
            return SolveOutcome(scheme, "numerical_failure", math.nan,
                                diagnostics=diag)
        b_d = cand
        diag["randomization_used"] = True
        diag["randomized_power"] = float(np.vdot(cand, cand).real + np.trace(w_n).real)
    beams, an_diag = _synthesize_an_beams(w_n, n_an)
    diag.update(an_diag)
    bundle = PrecoderBundle(b_d=b_d, b_n=beams, an_covariance=w_n)
    return SolveOutcome(scheme, "optimal", float(sol.objective), bundle=bundle,
                        diagnostics=diag)


def _nominal_checker(ch: ChannelSet, targets: Targets):
    """Minimal-rescale acceptance test for randomized beamformer candidates."""

    def make(w_n: np.ndarray):
        g_d = np.conj(ch.h_d)
        q_d = float(np.real(g_d.conj() @ w_n @ g_d))
        need = targets.gamma_d * (targets.sigma_d2 + q_d)

        def checker(w: np.ndarray):
            cur = abs(ch.h_d @ w) ** 2
            if cur <= 1e-14 * max(need, 1.0):
                return None
            cand = w * math.sqrt(need / cur)
            for k in range(ch.k):
                g_e = np.conj(ch.h_e[k])
                q_e = float(np.real(g_e.conj() @ w_n @ g_e))
                lhs = abs(ch.h_e[k] @ cand) ** 2 / targets.gamma_e[k]
                if lhs > targets.sigma_e2 + q_e + 1e-9 * (1.0 + abs(lhs)):
                    return None
            return cand

        return checker

    return make


def solve_conventional(ch: ChannelSet, targets: Targets, n_an: int = 3,
                       rng: np.random.Generator | None = None,
                       randomization_trials: int = 200) -> SolveOutcome:
    """Conventional AN-aided power minimization via semidefinite relaxation.

    The N AN covariances enter every constraint and the objective only
    through their sum, so a single aggregate AN covariance is solved for
    (provably equivalent, fewer variables); the rank-one constraint on the
    information covariance is dropped and checked after the fact, with
    Gaussian randomization as the fallback. Reported transmit power is the
    relaxation objective Tr(W_d) + Tr(W_n).
    """
    _check_dims(ch, targets)
    if n_an < 0:
        raise ValueError("n_an must be nonnegative")
    builder = ProgramBuilder()
    w_d = builder.hermitian_var(ch.n_t)
    w_n = builder.hermitian_var(ch.n_t)
    builder.add_objective(w_d.idx[:ch.n_t], np.ones(ch.n_t))
    builder.add_objective(w_n.idx[:ch.n_t], np.ones(ch.n_t))

    r_d = _rank_one_channel_matrix(ch.h_d)
    rows = [(w_d.trace_product_row(builder, r_d) / targets.gamma_d
             - w_n.trace_product_row(builder, r_d), -targets.sigma_d2)]
    for k in range(ch.k):
        r_e = _rank_one_channel_matrix(ch.h_e[k])
        rows.append((w_n.trace_product_row(builder, r_e)
                     - w_d.trace_product_row(builder, r_e) / targets.gamma_e[k],
                     targets.sigma_e2))
    builder.add_nonneg(rows)
    w_d.add_psd(builder)
    w_n.add_psd(builder)
    sol = conic.solve(builder.build())
    return _conventional_bundle(SCHEME_CONVENTIONAL, sol, w_d, w_n, ch, targets,
                                n_an, rng, randomization_trials,
                                _nominal_checker(ch, targets))


def _robust_checker(ch_hat: ChannelSet, unc: Uncertainty, targets: Targets):
    """Worst-case acceptance test for randomized robust candidates."""

    def make(w_n: np.ndarray):
        u_d = np.conj(ch_hat.h_d)

        def wc_ir(alpha: float, w: np.ndarray) -> float:
            phi = (alpha ** 2 / targets.gamma_d) * np.outer(w, w.conj()) - w_n
            return min_quadratic_over_ball(
                phi, phi @ u_d,
                float(np.real(u_d.conj() @ phi @ u_d)) - targets.sigma_d2,
                unc.eps_d)

        def checker(w: np.ndarray):
            if np.linalg.norm(w) == 0.0:
                return None
            hi = 1.0
            tries = 0
            while wc_ir(hi, w) < 0.0:
                hi *= 2.0
                tries += 1
                if tries > 60:
                    return None
            lo = 0.0
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if wc_ir(mid, w) >= 0.0:
                    hi = mid
                else:
                    lo = mid
            cand = hi * w
            phi_cand = np.outer(cand, cand.conj())
            for k in range(ch_hat.k):
                u_e = np.conj(ch_hat.h_e[k])
                neg = w_n - phi_cand / targets.gamma_e[k]
                worst = min_quadratic_over_ball(
                    neg, neg @ u_e,
                    float(np.real(u_e.conj() @ neg @ u_e)) + targets.sigma_e2,
                    unc.eps_e)
                if worst < -1e-9:
                    return None
            return cand

        return checker

    return make


def solve_robust_conventional(ch_hat: ChannelSet, unc: Uncertainty,
                              targets: Targets, n_an: int = 3,
                              rng: np.random.Generator | None = None,
                              randomization_trials: int = 200) -> SolveOutcome:
    """Worst-case robust conventional design via S-procedure LMIs.

    For the IR the quadratic h.T Phi_d conj(h) >= sigma_d^2 must hold for all
    h = h_hat + e with ||e|| <= eps_d, where Phi_d = W_d / gamma_d - W_n.
    Writing u = conj(h) turns it into a ball-robust quadratic in u, handled
    by one S-procedure block with its own multiplier; each Eve contributes
    the negated counterpart. Zero radii fall back to the nominal rows.
    """
    _check_dims(ch_hat, targets)
    builder = ProgramBuilder()
    w_d = builder.hermitian_var(ch_hat.n_t)
    w_n = builder.hermitian_var(ch_hat.n_t)
    n_mult = (1 if unc.eps_d > 0 else 0) + (ch_hat.k if unc.eps_e > 0 else 0)
    lam_idx = builder.add_vars(n_mult) if n_mult else np.array([], dtype=int)
    builder.add_objective(w_d.idx[:ch_hat.n_t], np.ones(ch_hat.n_t))
    builder.add_objective(w_n.idx[:ch_hat.n_t], np.ones(ch_hat.n_t))

    phi_d = w_d.affine().scaled(1.0 / targets.gamma_d).plus(w_n.affine().scaled(-1.0))
    nominal_rows = []
    lam_cursor = 0
    if unc.eps_d > 0:
        u_d = np.conj(ch_hat.h_d)
        s_procedure_block(builder, phi_d, phi_d.times_vector(u_d),
                          phi_d.quad_form(u_d, shift=-targets.sigma_d2),
                          unc.eps_d, int(lam_idx[lam_cursor]))
        lam_cursor += 1
    else:
        r_d = _rank_one_channel_matrix(ch_hat.h_d)
        nominal_rows.append((w_d.trace_product_row(builder, r_d) / targets.gamma_d
                             - w_n.trace_product_row(builder, r_d),
                             -targets.sigma_d2))
    for k in range(ch_hat.k):
        phi_e = w_d.affine().scaled(1.0 / targets.gamma_e[k]).plus(
            w_n.affine().scaled(-1.0))
        if unc.eps_e > 0:
            u_e = np.conj(ch_hat.h_e[k])
            neg = phi_e.scaled(-1.0)
            s_procedure_block(builder, neg, neg.times_vector(u_e),
                              neg.quad_form(u_e, shift=targets.sigma_e2),
                              unc.eps_e, int(lam_idx[lam_cursor]))
            lam_cursor += 1
        else:
            r_e = _rank_one_channel_matrix(ch_hat.h_e[k])
            nominal_rows.append((w_n.trace_product_row(builder, r_e)
                                 - w_d.trace_product_row(builder, r_e) / targets.gamma_e[k],
                                 targets.sigma_e2))
    if n_mult:
        nominal_rows += [(builder.row([i], [1.0]), 0.0) for i in lam_idx]
    if nominal_rows:
        builder.add_nonneg(nominal_rows)
    w_d.add_psd(builder)
    w_n.add_psd(builder)
    sol = conic.solve(builder.build())
    out = _conventional_bundle(SCHEME_ROBUST_CONVENTIONAL, sol, w_d, w_n,
                               ch_hat, targets, n_an, rng, randomization_trials,
                               _robust_checker(ch_hat, unc, targets))
    out.diagnostics.update(eps_d=unc.eps_d, eps_e=unc.eps_e)
    return out


def solve_scheme(scheme: str, ch: ChannelSet, targets: Targets,
                 constellation: Constellation, n_an: int = 3,
                 uncertainty: Uncertainty | None = None,
                 rng: np.random.Generator | None = None) -> SolveOutcome:
    """Dispatch a scheme by name; robust schemes require an uncertainty."""
    if scheme == SCHEME_CONVENTIONAL:
        return solve_conventional(ch, targets, n_an, rng=rng)
    if scheme == SCHEME_CONSTRUCTIVE:
        return solve_constructive(ch, targets, constellation)
    if scheme == SCHEME_CONSTRUCTIVE_DESTRUCTIVE:
        return solve_constructive_destructive(ch, targets, constellation)
    if scheme == SCHEME_ROBUST_CONVENTIONAL:
        if uncertainty is None:
            raise ValueError("robust schemes need an Uncertainty")
        return solve_robust_conventional(ch, uncertainty, targets, n_an, rng=rng)
    if scheme == SCHEME_ROBUST_CONSTRUCTIVE:
        if uncertainty is None:
            raise ValueError("robust schemes need an Uncertainty")
        return solve_robust_constructive(ch, uncertainty, targets, constellation)
    raise ValueError(f"unknown scheme {scheme!r}")


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    """Signed constraint residuals (>= 0 means satisfied) at a solution."""

    residuals: dict[str, float]
    tol: float

    @property
    def violated(self) -> list[str]:
        return [k for k, v in self.residuals.items() if v < -self.tol]

    @property
    def all_ok(self) -> bool:
        return not self.violated

    @property
    def flags(self) -> dict[str, bool]:
        return {k: v >= -self.tol for k, v in self.residuals.items()}


def _ci_residuals(b: np.ndarray, ch: ChannelSet, targets: Targets,
                  tan: float, destructive: bool) -> dict[str, float]:
    p = ch.h_d @ b
    gt_d = targets.gamma_tilde_d
    res = {
        "ir_ci_upper": float((p.real - gt_d) * tan - p.imag),
        "ir_ci_lower": float((p.real - gt_d) * tan + p.imag),
    }
    for k in range(ch.k):
        q = ch.h_e[k] @ b
        gt_e = targets.gamma_tilde_e[k]
        if destructive:
            res[f"eve{k}_wedge_left"] = float((q.real - gt_e) * tan + q.imag)
            res[f"eve{k}_wedge_right"] = float(q.imag - (q.real - gt_e) * tan)
        else:
            res[f"eve{k}_cap"] = float(gt_e - abs(q))
    return res


def _covariance_residuals(bundle: PrecoderBundle, ch: ChannelSet,
                          targets: Targets) -> dict[str, float]:
    w_n = bundle.an_covariance
    res = {}
    g_d = np.conj(ch.h_d)
    q_d = float(np.real(g_d.conj() @ w_n @ g_d)) if w_n is not None else \
        float(sum(abs(ch.h_d @ bn) ** 2 for bn in bundle.b_n))
    res["ir_sinr"] = float(abs(ch.h_d @ bundle.b_d) ** 2 / targets.gamma_d
                           - q_d - targets.sigma_d2)
    for k in range(ch.k):
        g_e = np.conj(ch.h_e[k])
        q_e = float(np.real(g_e.conj() @ w_n @ g_e)) if w_n is not None else \
            float(sum(abs(ch.h_e[k] @ bn) ** 2 for bn in bundle.b_n))
        res[f"eve{k}_sinr"] = float(targets.sigma_e2 + q_e
                                    - abs(ch.h_e[k] @ bundle.b_d) ** 2 / targets.gamma_e[k])
    return res


def _robust_ci_residuals(b: np.ndarray, ch_hat: ChannelSet, targets: Targets,
                         tan: float, unc: Uncertainty) -> dict[str, float]:
    b1 = np.concatenate([b.real, -b.imag])
    b2 = np.concatenate([b.imag, b.real])

    def worst(h, vec, sign, eps, const):
        h_tilde = np.concatenate([h.real, h.imag])
        return -(sign * (h_tilde @ vec) + eps * np.linalg.norm(vec) + const)

    gt_d = targets.gamma_tilde_d
    res = {
        "ir_ci_upper": worst(ch_hat.h_d, b2 - tan * b1, +1.0, unc.eps_d, gt_d * tan),
        "ir_ci_lower": worst(ch_hat.h_d, b2 + tan * b1, -1.0, unc.eps_d, gt_d * tan),
    }
    for k in range(ch_hat.k):
        gt_e = targets.gamma_tilde_e[k]
        res[f"eve{k}_wedge_left"] = worst(ch_hat.h_e[k], b2 + tan * b1, -1.0,
                                          unc.eps_e, gt_e * tan)
        res[f"eve{k}_wedge_right"] = worst(ch_hat.h_e[k], tan * b1 - b2, +1.0,
                                           unc.eps_e, -gt_e * tan)
    return res


def _robust_covariance_residuals(bundle: PrecoderBundle, ch_hat: ChannelSet,
                                 targets: Targets, unc: Uncertainty) -> dict[str, float]:
    w_d = np.outer(bundle.b_d, bundle.b_d.conj())
    w_n = bundle.an_covariance
    if w_n is None:
        w_n = sum(np.outer(bn, bn.conj()) for bn in bundle.b_n) if bundle.b_n \
            else np.zeros_like(w_d)
    res = {}
    phi_d = w_d / targets.gamma_d - w_n
    u_d = np.conj(ch_hat.h_d)
    res["ir_sinr_worst"] = min_quadratic_over_ball(
        phi_d, phi_d @ u_d,
        float(np.real(u_d.conj() @ phi_d @ u_d)) - targets.sigma_d2, unc.eps_d)
    for k in range(ch_hat.k):
        neg = w_n - w_d / targets.gamma_e[k]
        u_e = np.conj(ch_hat.h_e[k])
        res[f"eve{k}_sinr_worst"] = min_quadratic_over_ball(
            neg, neg @ u_e,
            float(np.real(u_e.conj() @ neg @ u_e)) + targets.sigma_e2, unc.eps_e)
    return res


def verify_solution(outcome: SolveOutcome, ch: ChannelSet, targets: Targets,
                    constellation: Constellation | None = None,
                    uncertainty: Uncertainty | None = None,
                    tol: float = VERIFY_TOL) -> VerificationReport:
    """Recompute every constraint of the originating formulation.

    The channels may differ from the ones the outcome was solved on (for
    example true channels against a design made from estimates); passing an
    Uncertainty for a robust outcome additionally evaluates the exact
    worst-case residual over each error ball centered on ``ch``.
    """
    if outcome.status != "optimal":
        raise ValueError("can only verify an optimal outcome")
    _check_dims(ch, targets)
    scheme = outcome.scheme
    if scheme in (SCHEME_CONVENTIONAL, SCHEME_ROBUST_CONVENTIONAL):
        if outcome.bundle is None:
            raise ValueError("conventional outcome lacks a bundle")
        res = _covariance_residuals(outcome.bundle, ch, targets)
        if uncertainty is not None and scheme == SCHEME_ROBUST_CONVENTIONAL:
            res.update(_robust_covariance_residuals(outcome.bundle, ch,
                                                    targets, uncertainty))
        return VerificationReport(res, tol)
    if constellation is None:
        raise ValueError("region verification needs the constellation")
    if outcome.precoder is None:
        raise ValueError("aggregate outcome lacks a precoder")
    tan = math.tan(constellation.half_angle)
    b = outcome.precoder.b
    destructive = scheme in (SCHEME_CONSTRUCTIVE_DESTRUCTIVE,
                             SCHEME_ROBUST_CONSTRUCTIVE)
    res = _ci_residuals(b, ch, targets, tan, destructive)
    if uncertainty is not None and scheme == SCHEME_ROBUST_CONSTRUCTIVE:
        res.update({f"wc_{k}": v for k, v in
                    _robust_ci_residuals(b, ch, targets, tan, uncertainty).items()})
    return VerificationReport(res, tol)


# ---------------------------------------------------------------------------
# serialization


def outcome_record(outcome: SolveOutcome) -> dict:
    """Flat JSON-friendly record: scheme, status, power, b re/im interleaved."""
    b = None
    if outcome.precoder is not None:
        b = outcome.precoder.b
    elif outcome.bundle is not None:
        b = outcome.bundle.b_d
    interleaved = None
    if b is not None:
        interleaved = [float(v) for pair in zip(b.real, b.imag) for v in pair]
    diag = {}
    for k, v in outcome.diagnostics.items():
        if isinstance(v, (bool, int, str)) or v is None:
            diag[k] = v
        else:
            diag[k] = float(v)
    return {
        "scheme": outcome.scheme,
        "status": outcome.status,
        "transmit_power_w": None if math.isnan(outcome.transmit_power)
        else float(outcome.transmit_power),
        "b_interleaved_re_im": interleaved,
        "diagnostics": diag,
    }


def outcome_to_json(outcome: SolveOutcome) -> str:
    return json.dumps(outcome_record(outcome), indent=2, sort_keys=True)
