"""Seeded channel generation, path-loss scaling, and bounded CSI errors.

Every random draw is keyed by an explicit (seed, realization, node) tuple fed
to ``numpy.random.default_rng``, so realizations form independent streams and
generating one never disturbs another. Node 0 is the IR, nodes 1..K the Eves;
a config with more Eves therefore extends a smaller one without changing the
channels they share.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .model import ChannelSet


@dataclass(frozen=True)
class ChannelConfig:
    """Scenario geometry for channel sampling.

    distances holds one entry per node (IR first, then Eves) in meters; the
    per-entry channel variance is distance**(-pathloss_exponent), so the
    default unit distances give unit-gain channels.
    """

    n_t: int
    k_eves: int
    pathloss_exponent: float = 2.7
    distances: tuple[float, ...] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n_t < 1:
            raise ValueError("n_t must be at least 1")
        if self.k_eves < 0:
            raise ValueError("k_eves must be nonnegative")
        if self.pathloss_exponent <= 0:
            raise ValueError("pathloss_exponent must be positive")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        d = self.distances
        if d is None:
            d = (1.0,) * (self.k_eves + 1)
        d = tuple(float(x) for x in d)
        if len(d) != self.k_eves + 1:
            raise ValueError("need one distance per node (IR plus each Eve)")
        if any(x < 1.0 for x in d):
            raise ValueError("distances must be at least 1 meter")
        object.__setattr__(self, "distances", d)


def _node_rng(seed: int, realization_index: int, node: int) -> np.random.Generator:
    return np.random.default_rng((int(seed), int(realization_index), int(node)))


def _draw_cn(rng: np.random.Generator, n: int, variance: float) -> np.ndarray:
    scale = np.sqrt(variance / 2.0)
    re_im = rng.normal(0.0, scale, size=(2, n))
    return re_im[0] + 1j * re_im[1]


def sample_channels(cfg: ChannelConfig, realization_index: int,
                    estimated: bool = False) -> ChannelSet:
    """Draw one i.i.d. circularly-symmetric Gaussian channel realization.

    Deterministic in (cfg.seed, realization_index); per-entry variance is the
    node's distance raised to -pathloss_exponent.
    """
    if realization_index < 0:
        raise ValueError("realization_index must be nonnegative")
    variances = [d ** (-cfg.pathloss_exponent) for d in cfg.distances]
    h_d = _draw_cn(_node_rng(cfg.seed, realization_index, 0), cfg.n_t, variances[0])
    h_e = np.array([
        _draw_cn(_node_rng(cfg.seed, realization_index, k + 1), cfg.n_t, variances[k + 1])
        for k in range(cfg.k_eves)
    ]).reshape(cfg.k_eves, cfg.n_t)
    return ChannelSet(h_d=h_d, h_e=h_e, estimated=estimated)


def perturb(h_hat: np.ndarray, eps: float, mode: str = "sphere_surface",
            rng: np.random.Generator | None = None) -> np.ndarray:
    """Return h_hat + e with a norm-bounded error vector.

    mode "sphere_surface" places the error exactly on the radius-eps sphere
    (where worst cases of linear constraints live); "ball_uniform" draws it
    uniformly from the closed ball. The direction is uniform on the complex
    sphere in both modes.
    """
    if eps < 0:
        raise ValueError("perturbation radius must be nonnegative")
    if mode not in ("sphere_surface", "ball_uniform"):
        raise ValueError(f"unknown perturbation mode: {mode!r}")
    h = np.asarray(h_hat, dtype=complex)
    if eps == 0.0:
        return h.copy()
    if rng is None:
        rng = np.random.default_rng()
    n = h.size
    z = _draw_cn(rng, n, 1.0)
    nz = np.linalg.norm(z)
    while nz == 0.0:  # pragma: no cover (measure zero)
        z = _draw_cn(rng, n, 1.0)
        nz = np.linalg.norm(z)
    radius = eps
    if mode == "ball_uniform":
        # real dimension of the ball is 2n
        radius = eps * rng.uniform() ** (1.0 / (2 * n))
    return h + (radius / nz) * z


def perturb_batch(h_hat: np.ndarray, eps: float, count: int,
                  mode: str = "sphere_surface",
                  rng: np.random.Generator | None = None) -> np.ndarray:
    """Vectorized perturb: returns an array of shape (count, n_t)."""
    if eps < 0:
        raise ValueError("perturbation radius must be nonnegative")
    if mode not in ("sphere_surface", "ball_uniform"):
        raise ValueError(f"unknown perturbation mode: {mode!r}")
    h = np.asarray(h_hat, dtype=complex)
    if rng is None:
        rng = np.random.default_rng()
    n = h.size
    if eps == 0.0:
        return np.tile(h, (count, 1))
    z = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    radius = np.full((count, 1), float(eps))
    if mode == "ball_uniform":
        radius = eps * rng.uniform(size=(count, 1)) ** (1.0 / (2 * n))
    return h[None, :] + z / norms * radius


def channels_to_csv(channels: ChannelSet, path) -> None:
    """Dump a ChannelSet as CSV, one row per node: id, then re/im interleaved."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_node_row("ir", channels.h_d))
        for k in range(channels.k):
            writer.writerow(_node_row(f"eve{k + 1}", channels.h_e[k]))


def _node_row(node_id: str, h: np.ndarray) -> list:
    row: list = [node_id]
    for x in h:
        row.extend([repr(float(x.real)), repr(float(x.imag))])
    return row


def channels_from_csv(path, estimated: bool = False) -> ChannelSet:
    """Load a ChannelSet written by channels_to_csv."""
    rows = {}
    order = []
    with open(path, newline="") as fh:
        for raw in csv.reader(fh):
            if not raw:
                continue
            node, vals = raw[0], [float(v) for v in raw[1:]]
            if len(vals) % 2 != 0:
                raise ValueError(f"row {node!r} has unpaired re/im entries")
            rows[node] = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
            order.append(node)
    if "ir" not in rows:
        raise ValueError("channel CSV is missing the 'ir' row")
    eves = [rows[n] for n in order if n != "ir"]
    h_e = np.array(eves) if eves else np.zeros((0, rows["ir"].size), dtype=complex)
    return ChannelSet(h_d=rows["ir"], h_e=h_e, estimated=estimated)
