"""Monte-Carlo experiment engine: power sweeps, SER simulation, robustness probes.

Realizations are the parallel unit. Every random draw is keyed by an explicit
(seed, realization, stream, ...) tuple, so results are bit-identical for any
worker count; reduction always runs in realization-index order.
"""

from __future__ import annotations

import csv
import hashlib
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channels import ChannelConfig, perturb_batch, sample_channels
from .designs import (SCHEME_CONSTRUCTIVE, SCHEME_CONSTRUCTIVE_DESTRUCTIVE,
                      SCHEME_CONVENTIONAL, SCHEME_ROBUST_CONSTRUCTIVE,
                      SCHEME_ROBUST_CONVENTIONAL, SCHEMES, solve_scheme)
from .model import (ChannelSet, Constellation, Targets, Uncertainty,
                    instantaneous_power)

Z_95 = 1.959963984540054

# RNG stream tags; channel sampling uses plain (seed, realization, node) keys
_STREAM_RANDOMIZATION = 1001
_STREAM_SER = 1002
_STREAM_VIOLATION = 1003

DEFAULT_SCHEMES = (SCHEME_CONVENTIONAL, SCHEME_CONSTRUCTIVE,
                   SCHEME_CONSTRUCTIVE_DESTRUCTIVE)

ROBUST_PAIRS = {
    SCHEME_ROBUST_CONVENTIONAL: SCHEME_CONVENTIONAL,
    SCHEME_ROBUST_CONSTRUCTIVE: SCHEME_CONSTRUCTIVE_DESTRUCTIVE,
}

CSV_COLUMNS = (
    "scheme", "grid_param_name", "grid_value_db", "mean_power_w",
    "mean_power_dbw", "feasibility_rate", "ser", "ser_ci_low", "ser_ci_high",
    "violation_rate", "n_realizations", "n_slots",
)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_dbw(x: float) -> float:
    return 10.0 * math.log10(x)


def wilson_interval(errors: int, trials: int, z: float = Z_95) -> tuple[float, float]:
    """Wilson score interval for a binomial rate."""
    if trials <= 0:
        return (math.nan, math.nan)
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if errors == 0 else max(0.0, center - half)
    hi = 1.0 if errors == trials else min(1.0, center + half)
    return (lo, hi)


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """One sweep: scenario, target grids in dB, schemes, and sampling sizes.

    Exactly one of the gamma grids may hold more than one value; that grid is
    the sweep axis. dB values convert as 10**(dB/10).
    """

    n_t: int = 6
    k_eves: int = 2
    n_an: int = 3
    modulation_order: int = 4
    gamma_d_db: tuple[float, ...] = (10.0,)
    gamma_e_db: tuple[float, ...] = (5.0,)
    sigma_d2: float = 1.0
    sigma_e2: float = 1.0
    schemes: tuple[str, ...] = DEFAULT_SCHEMES
    realizations: int = 1000
    slots: int = 1000
    eps_d: float = 0.0
    eps_e: float = 0.0
    error_mode: str = "sphere_surface"
    violation_samples: int = 10000
    seed: int = 0
    distances: tuple[float, ...] | None = None
    pathloss_exponent: float = 2.7
    fixed_channels: ChannelSet | None = None

    def __post_init__(self):
        coerce = lambda v: tuple(float(x) for x in np.atleast_1d(v))
        object.__setattr__(self, "gamma_d_db", coerce(self.gamma_d_db))
        object.__setattr__(self, "gamma_e_db", coerce(self.gamma_e_db))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if self.realizations < 1:
            raise ValueError("realizations must be at least 1")
        if self.slots < 1:
            raise ValueError("slots must be at least 1")
        if not self.gamma_d_db or not self.gamma_e_db:
            raise ValueError("target grids must be nonempty")
        if len(self.gamma_d_db) > 1 and len(self.gamma_e_db) > 1:
            raise ValueError("only one of gamma_d_db / gamma_e_db may be a grid")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}")
        if self.violation_samples < 1:
            raise ValueError("violation_samples must be at least 1")

    @property
    def grid_param(self) -> str:
        return "gamma_e_db" if len(self.gamma_e_db) > 1 else "gamma_d_db"

    def grid(self) -> list[tuple[float, Targets]]:
        out = []
        if self.grid_param == "gamma_d_db":
            for g in self.gamma_d_db:
                out.append((g, Targets(db_to_linear(g),
                                       (db_to_linear(self.gamma_e_db[0]),) * self.k_eves,
                                       self.sigma_d2, self.sigma_e2)))
        else:
            for g in self.gamma_e_db:
                out.append((g, Targets(db_to_linear(self.gamma_d_db[0]),
                                       (db_to_linear(g),) * self.k_eves,
                                       self.sigma_d2, self.sigma_e2)))
        return out

    @property
    def constellation(self) -> Constellation:
        return Constellation.psk(self.modulation_order)

    @property
    def channel_config(self) -> ChannelConfig:
        return ChannelConfig(n_t=self.n_t, k_eves=self.k_eves,
                             pathloss_exponent=self.pathloss_exponent,
                             distances=self.distances, seed=self.seed)

    @property
    def uncertainty(self) -> Uncertainty:
        return Uncertainty(eps_d=self.eps_d, eps_e=self.eps_e)


@dataclass
class SweepRow:
    scheme: str
    grid_param_name: str
    grid_value_db: float
    mean_power_w: float | None = None
    mean_power_dbw: float | None = None
    feasibility_rate: float | None = None
    ser: float | None = None
    ser_ci_low: float | None = None
    ser_ci_high: float | None = None
    violation_rate: float | None = None
    n_realizations: int | None = None
    n_slots: int | None = None


@dataclass
class SweepResult:
    rows: list[SweepRow]
    records: list[dict] = field(default_factory=list, repr=False)

    def row_for(self, scheme: str, grid_value_db: float) -> SweepRow:
        for r in self.rows:
            if r.scheme == scheme and r.grid_value_db == grid_value_db:
                return r
        raise KeyError((scheme, grid_value_db))

    def to_csv(self, path) -> None:
        """Atomic CSV emission; 9 significant digits for floats."""
        path = Path(path)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(CSV_COLUMNS)
                for row in self.rows:
                    writer.writerow([_fmt(getattr(row, col)) for col in CSV_COLUMNS])
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return ""
    return f"{v:.9g}"


def _channel_hash(ch: ChannelSet) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(ch.h_d).tobytes())
    h.update(np.ascontiguousarray(ch.h_e).tobytes())
    return h.hexdigest()


def _channels_for(cfg: ExperimentConfig, ridx: int, estimated: bool = False) -> ChannelSet:
    if cfg.fixed_channels is not None:
        return cfg.fixed_channels
    return sample_channels(cfg.channel_config, ridx, estimated=estimated)


def _solve_all(cfg: ExperimentConfig, ch: ChannelSet, ridx: int) -> dict:
    """Run every configured scheme on one channel set at every grid point."""
    const = cfg.constellation
    unc = cfg.uncertainty
    rec = {"realization": ridx, "status": {}, "power": {}, "hash": {},
           "outcome": {}}
    expected_hash = _channel_hash(ch)
    for gi, (gdb, targets) in enumerate(cfg.grid()):
        for scheme in cfg.schemes:
            invocation_hash = _channel_hash(ch)
            if invocation_hash != expected_hash:
                raise AssertionError("channel set mutated between scheme calls")
            rng = np.random.default_rng((cfg.seed, ridx, _STREAM_RANDOMIZATION, gi))
            out = solve_scheme(scheme, ch, targets, const, cfg.n_an,
                               uncertainty=unc if scheme in ROBUST_PAIRS else None,
                               rng=rng)
            rec["status"][(gi, scheme)] = out.status
            rec["power"][(gi, scheme)] = out.transmit_power
            rec["hash"][(gi, scheme)] = invocation_hash
            rec["outcome"][(gi, scheme)] = out
    return rec


def _power_worker(args) -> dict:
    cfg, ridx = args
    ch = _channels_for(cfg, ridx)
    rec = _solve_all(cfg, ch, ridx)
    del rec["outcome"]  # keep worker results small and picklable
    return rec


def _map_realizations(worker, cfg: ExperimentConfig, workers: int) -> list[dict]:
    args = [(cfg, r) for r in range(cfg.realizations)]
    if workers <= 1:
        return [worker(a) for a in args]
    chunk = max(1, len(args) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, args, chunksize=chunk))


def _grid_reduce(cfg: ExperimentConfig, records: list[dict]):
    """Joint-feasibility masks and per-scheme feasibility rates per grid point."""
    reduced = []
    for gi, (gdb, _) in enumerate(cfg.grid()):
        joint = [r for r in records
                 if all(r["status"][(gi, s)] == "optimal" for s in cfg.schemes)]
        rates = {s: sum(r["status"][(gi, s)] == "optimal" for r in records)
                 / len(records) for s in cfg.schemes}
        reduced.append((gi, gdb, joint, rates))
    return reduced


def run_power_sweep(cfg: ExperimentConfig, workers: int = 1) -> SweepResult:
    """Average transmit power per scheme over jointly-feasible realizations.

    Every scheme inside one realization consumes the identical channel set
    (asserted by hashing); averages skip realizations where any requested
    scheme is infeasible or failed, preventing survivorship bias. Per-scheme
    feasibility rates cover all realizations.
    """
    records = _map_realizations(_power_worker, cfg, workers)
    records.sort(key=lambda r: r["realization"])
    rows = []
    for gi, gdb, joint, rates in _grid_reduce(cfg, records):
        for scheme in cfg.schemes:
            powers = [r["power"][(gi, scheme)] for r in joint]
            mean_p = float(np.mean(powers)) if powers else None
            rows.append(SweepRow(
                scheme=scheme, grid_param_name=cfg.grid_param,
                grid_value_db=gdb, mean_power_w=mean_p,
                mean_power_dbw=linear_to_dbw(mean_p) if mean_p else None,
                feasibility_rate=rates[scheme],
                n_realizations=len(joint)))
    return SweepResult(rows=rows, records=records)


# ---------------------------------------------------------------------------
# symbol error rate


def detect_psk(y, reference_phase: float, constellation: Constellation):
    """Nearest-sector PSK detection after derotating by reference_phase.

    Exact angular ties break toward the lower symbol index. Accepts scalars
    or arrays.
    """
    arr = np.asarray(y, dtype=complex)
    z = arr * np.exp(-1j * reference_phase)
    sym_angles = np.angle(constellation.symbols)
    diff = np.angle(z[..., None] * np.exp(-1j * sym_angles))
    dist = np.abs(diff)
    dmin = dist.min(axis=-1, keepdims=True)
    idx = np.argmax(dist <= dmin + 1e-12, axis=-1)
    if np.isscalar(y) or arr.ndim == 0:
        return int(idx)
    return idx


def _simulate_slots(cfg: ExperimentConfig, outcome, ch: ChannelSet,
                    targets: Targets, rng: np.random.Generator) -> dict:
    """One realization's slot loop for a single feasible scheme outcome."""
    const = cfg.constellation
    s_count = cfg.slots
    idx_true = rng.integers(0, const.order, size=s_count)
    sym = const.symbols[idx_true]
    noise_d = (rng.normal(size=s_count) + 1j * rng.normal(size=s_count)) \
        * math.sqrt(cfg.sigma_d2 / 2.0)
    slot_power = None
    if outcome.scheme in (SCHEME_CONVENTIONAL, SCHEME_ROBUST_CONVENTIONAL):
        bundle = outcome.bundle
        n_beams = len(bundle.b_n)
        s_n = (rng.normal(size=(s_count, n_beams))
               + 1j * rng.normal(size=(s_count, n_beams))) / math.sqrt(2.0)
        gd_sig = ch.h_d @ bundle.b_d
        gd_an = np.array([ch.h_d @ bn for bn in bundle.b_n])
        y = gd_sig * sym + (s_n @ gd_an if n_beams else 0.0) + noise_d
        ref = float(np.angle(gd_sig))
        # empirical per-slot transmit power for the accounting cross-check
        x_norm2 = (np.abs(sym) ** 2) * float(np.vdot(bundle.b_d, bundle.b_d).real)
        if n_beams:
            beams = np.stack(bundle.b_n, axis=1)  # (n_t, N)
            x = bundle.b_d[None, :] * sym[:, None] + s_n @ beams.T
            x_norm2 = np.sum(np.abs(x) ** 2, axis=1)
        slot_power = float(np.mean(x_norm2))
        eve_refs = [float(np.angle(ch.h_e[k] @ bundle.b_d)) for k in range(ch.k)]
        eve_sig = [ch.h_e[k] @ bundle.b_d for k in range(ch.k)]
        eve_an = [np.array([ch.h_e[k] @ bn for bn in bundle.b_n]) for k in range(ch.k)]
        eve_y = [eve_sig[k] * sym + (s_n @ eve_an[k] if n_beams else 0.0)
                 for k in range(ch.k)]
    else:
        b = outcome.precoder.b
        p = ch.h_d @ b
        y = p * sym + noise_d
        ref = 0.0
        slot_power = instantaneous_power(b)
        eve_refs = [float(np.angle(ch.h_e[k] @ b)) for k in range(ch.k)]
        eve_y = [(ch.h_e[k] @ b) * sym for k in range(ch.k)]
    detected = detect_psk(y, ref, const)
    ir_errors = int(np.sum(detected != idx_true))
    eve_errors = 0
    for k in range(ch.k):
        noise_e = (rng.normal(size=s_count) + 1j * rng.normal(size=s_count)) \
            * math.sqrt(cfg.sigma_e2 / 2.0)
        det_e = detect_psk(eve_y[k] + noise_e, eve_refs[k], const)
        eve_errors += int(np.sum(det_e != idx_true))
    return {"ir_errors": ir_errors, "eve_errors": eve_errors,
            "slots": s_count, "slot_power": slot_power}


def _ser_worker(args) -> dict:
    cfg, ridx = args
    ch = _channels_for(cfg, ridx)
    rec = _solve_all(cfg, ch, ridx)
    rec["ser"] = {}
    for gi, (gdb, targets) in enumerate(cfg.grid()):
        joint = all(rec["status"][(gi, s)] == "optimal" for s in cfg.schemes)
        if not joint:
            continue
        for si, scheme in enumerate(cfg.schemes):
            rng = np.random.default_rng((cfg.seed, ridx, _STREAM_SER, gi, si))
            rec["ser"][(gi, scheme)] = _simulate_slots(
                cfg, rec["outcome"][(gi, scheme)], ch, targets, rng)
    del rec["outcome"]
    return rec


def run_ser(cfg: ExperimentConfig, workers: int = 1) -> SweepResult:
    """Symbol error rate per scheme with Wilson intervals.

    Conventional schemes transmit b_d s_d plus CN(0,1)-weighted AN beams and
    detect coherently against the b_d phase; aggregate schemes transmit b s_d
    (solved once per realization, exact for PSK by rotational symmetry) and
    detect against reference phase zero. Eve error rates (genie-aided
    references) travel in the records as a diagnostic.
    """
    records = _map_realizations(_ser_worker, cfg, workers)
    records.sort(key=lambda r: r["realization"])
    rows = []
    for gi, gdb, joint, rates in _grid_reduce(cfg, records):
        for scheme in cfg.schemes:
            sims = [r["ser"][(gi, scheme)] for r in joint if (gi, scheme) in r["ser"]]
            errors = sum(s["ir_errors"] for s in sims)
            slots = sum(s["slots"] for s in sims)
            powers = [r["power"][(gi, scheme)] for r in joint]
            ser = errors / slots if slots else None
            lo, hi = wilson_interval(errors, slots) if slots else (None, None)
            mean_p = float(np.mean(powers)) if powers else None
            rows.append(SweepRow(
                scheme=scheme, grid_param_name=cfg.grid_param,
                grid_value_db=gdb, mean_power_w=mean_p,
                mean_power_dbw=linear_to_dbw(mean_p) if mean_p else None,
                feasibility_rate=rates[scheme], ser=ser,
                ser_ci_low=lo, ser_ci_high=hi,
                n_realizations=len(joint), n_slots=slots))
    return SweepResult(rows=rows, records=records)


# ---------------------------------------------------------------------------
# robustness probe


def violation_mask(scheme: str, outcome, hd_true: np.ndarray,
                   he_true: np.ndarray, targets: Targets,
                   constellation: Constellation, tol: float = 1e-6) -> np.ndarray:
    """Vectorized per-sample constraint violations against true channels.

    Semantically identical to verify_solution run on each sampled channel
    set; hd_true has shape (T, n_t) and he_true (K, T, n_t).
    """
    tan = math.tan(constellation.half_angle)
    k = targets.k
    if scheme in (SCHEME_CONVENTIONAL, SCHEME_ROBUST_CONVENTIONAL):
        bundle = outcome.bundle
        w_n = bundle.an_covariance
        g = np.conj(hd_true)
        q_d = np.real(np.einsum("ti,ij,tj->t", np.conj(g), w_n, g))
        bad = (np.abs(hd_true @ bundle.b_d) ** 2 / targets.gamma_d
               - q_d - targets.sigma_d2) < -tol
        for kk in range(k):
            ge = np.conj(he_true[kk])
            q_e = np.real(np.einsum("ti,ij,tj->t", np.conj(ge), w_n, ge))
            bad |= (targets.sigma_e2 + q_e
                    - np.abs(he_true[kk] @ bundle.b_d) ** 2 / targets.gamma_e[kk]) < -tol
        return bad
    b = outcome.precoder.b
    p = hd_true @ b
    bad = ((p.real - targets.gamma_tilde_d) * tan - np.abs(p.imag)) < -tol
    for kk in range(k):
        q = he_true[kk] @ b
        gt_e = targets.gamma_tilde_e[kk]
        if scheme == SCHEME_CONSTRUCTIVE:
            bad |= (gt_e - np.abs(q)) < -tol
        else:
            bad |= (q.imag - np.abs(q.real - gt_e) * tan) < -tol
    return bad


def _robust_worker(args) -> dict:
    cfg, ridx = args
    ch_hat = _channels_for(cfg, ridx, estimated=True)
    rec = _solve_all(cfg, ch_hat, ridx)
    t_samples = cfg.violation_samples
    rng_d = np.random.default_rng((cfg.seed, ridx, _STREAM_VIOLATION, 0))
    hd_true = perturb_batch(ch_hat.h_d, cfg.eps_d, t_samples, cfg.error_mode, rng_d)
    he_true = np.empty((cfg.k_eves, t_samples, cfg.n_t), dtype=complex)
    for k in range(cfg.k_eves):
        rng_e = np.random.default_rng((cfg.seed, ridx, _STREAM_VIOLATION, k + 1))
        he_true[k] = perturb_batch(ch_hat.h_e[k], cfg.eps_e, t_samples,
                                   cfg.error_mode, rng_e)
    rec["violations"] = {}
    const = cfg.constellation
    for gi, (gdb, targets) in enumerate(cfg.grid()):
        for scheme in cfg.schemes:
            if rec["status"][(gi, scheme)] != "optimal":
                continue
            bad = violation_mask(scheme, rec["outcome"][(gi, scheme)],
                                 hd_true, he_true, targets, const)
            rec["violations"][(gi, scheme)] = int(np.sum(bad))
    del rec["outcome"]
    return rec


def run_robust_probe(cfg: ExperimentConfig, workers: int = 1) -> SweepResult:
    """Robust and non-robust designs on estimated channels, stress-tested
    against sampled true channels.

    Per realization: estimated channels are drawn, every configured scheme is
    solved on them (robust schemes see the configured uncertainty), then each
    solution's nominal constraints are re-checked on violation_samples true
    channels of the form estimate + bounded error per node. Reported per
    (scheme, grid point): mean power over jointly-feasible realizations,
    feasibility rate, and the violation rate across all sampled channels.
    """
    records = _map_realizations(_robust_worker, cfg, workers)
    records.sort(key=lambda r: r["realization"])
    rows = []
    for gi, gdb, joint, rates in _grid_reduce(cfg, records):
        for scheme in cfg.schemes:
            powers = [r["power"][(gi, scheme)] for r in joint]
            counts = [r["violations"][(gi, scheme)] for r in records
                      if (gi, scheme) in r["violations"]]
            viol = (sum(counts) / (len(counts) * cfg.violation_samples)
                    if counts else None)
            mean_p = float(np.mean(powers)) if powers else None
            rows.append(SweepRow(
                scheme=scheme, grid_param_name=cfg.grid_param,
                grid_value_db=gdb, mean_power_w=mean_p,
                mean_power_dbw=linear_to_dbw(mean_p) if mean_p else None,
                feasibility_rate=rates[scheme], violation_rate=viol,
                n_realizations=len(joint), n_slots=cfg.violation_samples))
    return SweepResult(rows=rows, records=records)
