"""Domain types and interference-region geometry for the MISO wiretap downlink.

Conventions used throughout the package:

* channels act through transposed (not conjugated) inner products, so the
  noiseless received constellation point is ``h.T @ b``;
* all region predicates operate in the derotated frame, i.e. on the received
  point divided by the data-symbol phase, with the nominal symbol on the
  positive real axis;
* amplitude thresholds are ``gamma_tilde = sigma * sqrt(gamma)``, the apex
  abscissa of the constructive / destructive wedges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Default slack for region predicates used in verification. Matches the
# accuracy an interior-point solver delivers on active constraints.
REGION_TOL = 1e-6


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def _as_complex_vector(v, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return _freeze(arr)


def _vec(b) -> np.ndarray:
    """Accept either a Precoder or a raw complex vector."""
    if isinstance(b, Precoder):
        return b.b
    return _as_complex_vector(b, "precoder")


@dataclass(frozen=True, eq=False)
class Constellation:
    """Unit-modulus M-PSK constellation.

    Symbols sit at angles ``2*pi*m/M + phase_offset``; the default offset
    ``pi/M`` puts QPSK at ``exp(1j*pi/4) * 1j**m``. The decision half-angle
    is ``theta = pi/M`` regardless of offset.
    """

    order: int
    half_angle: float
    symbols: np.ndarray

    @classmethod
    def psk(cls, order: int, phase_offset: float | None = None) -> "Constellation":
        if order < 2:
            raise ValueError("PSK order must be at least 2")
        if phase_offset is None:
            phase_offset = math.pi / order
        angles = 2.0 * np.pi * np.arange(order) / order + phase_offset
        return cls(order=order, half_angle=math.pi / order,
                   symbols=_freeze(np.exp(1j * angles)))

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("PSK order must be at least 2")
        if self.half_angle != math.pi / self.order:
            raise ValueError("half_angle must equal pi/order exactly")
        syms = np.asarray(self.symbols, dtype=complex)
        if syms.shape != (self.order,):
            raise ValueError("constellation must hold exactly `order` symbols")
        if np.max(np.abs(np.abs(syms) - 1.0)) > 1e-12:
            raise ValueError("constellation symbols must be unit modulus")
        if len({(round(s.real, 9), round(s.imag, 9)) for s in syms}) != self.order:
            raise ValueError("constellation symbols must be pairwise distinct")
        object.__setattr__(self, "symbols", _freeze(syms))


QPSK = Constellation.psk(4)


@dataclass(frozen=True, eq=False)
class Targets:
    """Linear SINR target at the IR, per-Eve SINR caps, and noise powers."""

    gamma_d: float
    gamma_e: tuple[float, ...]
    sigma_d2: float = 1.0
    sigma_e2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "gamma_e", tuple(float(g) for g in self.gamma_e))
        if self.gamma_d <= 0:
            raise ValueError("gamma_d must be positive")
        if any(g <= 0 for g in self.gamma_e):
            raise ValueError("all gamma_e entries must be positive")
        if self.sigma_d2 <= 0 or self.sigma_e2 <= 0:
            raise ValueError("noise powers must be positive")

    @property
    def k(self) -> int:
        return len(self.gamma_e)

    @property
    def gamma_tilde_d(self) -> float:
        """Amplitude threshold sigma_d * sqrt(gamma_d)."""
        return math.sqrt(self.sigma_d2 * self.gamma_d)

    @property
    def gamma_tilde_e(self) -> tuple[float, ...]:
        return tuple(math.sqrt(self.sigma_e2 * g) for g in self.gamma_e)


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Legitimate channel plus K eavesdropper channels (true or estimated)."""

    h_d: np.ndarray
    h_e: np.ndarray  # shape (K, n_t); K may be 0
    estimated: bool = False

    def __post_init__(self):
        h_d = _as_complex_vector(self.h_d, "h_d")
        h_e = np.asarray(self.h_e, dtype=complex)
        if h_e.size == 0:
            h_e = h_e.reshape(0, h_d.size)
        if h_e.ndim != 2 or h_e.shape[1] != h_d.size:
            raise ValueError("h_e must have shape (K, n_t) matching h_d")
        if not np.all(np.isfinite(h_e)):
            raise ValueError("h_e contains non-finite entries")
        object.__setattr__(self, "h_d", h_d)
        object.__setattr__(self, "h_e", _freeze(h_e))

    @property
    def n_t(self) -> int:
        return self.h_d.size

    @property
    def k(self) -> int:
        return self.h_e.shape[0]


@dataclass(frozen=True)
class Uncertainty:
    """Euclidean radii of the CSI error balls at the IR and at every Eve."""

    eps_d: float = 0.0
    eps_e: float = 0.0

    def __post_init__(self):
        if self.eps_d < 0 or self.eps_e < 0:
            raise ValueError("uncertainty radii must be nonnegative")


@dataclass(frozen=True, eq=False)
class PrecoderBundle:
    """Information beamformer plus N AN beamformers, optionally with the
    aggregate AN covariance produced by the semidefinite path."""

    b_d: np.ndarray
    b_n: tuple[np.ndarray, ...] = ()
    an_covariance: np.ndarray | None = None

    def __post_init__(self):
        b_d = _as_complex_vector(self.b_d, "b_d")
        beams = tuple(_as_complex_vector(b, "b_n") for b in self.b_n)
        for b in beams:
            if b.size != b_d.size:
                raise ValueError("AN beamformer length mismatch")
        cov = self.an_covariance
        if cov is not None:
            cov = np.asarray(cov, dtype=complex)
            if cov.shape != (b_d.size, b_d.size):
                raise ValueError("AN covariance must be n_t x n_t")
            if np.max(np.abs(cov - cov.conj().T)) > 1e-8:
                raise ValueError("AN covariance must be Hermitian")
            if np.linalg.eigvalsh(cov).min() < -1e-8:
                raise ValueError("AN covariance must be PSD within 1e-8")
            cov = _freeze(cov)
        object.__setattr__(self, "b_d", b_d)
        object.__setattr__(self, "b_n", beams)
        object.__setattr__(self, "an_covariance", cov)

    @property
    def n_t(self) -> int:
        return self.b_d.size


@dataclass(frozen=True, eq=False)
class Precoder:
    """Aggregate symbol-level precoding vector."""

    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "b", _as_complex_vector(self.b, "b"))

    @property
    def n_t(self) -> int:
        return self.b.size


@dataclass(frozen=True, eq=False)
class RealExpansion:
    """Real images of a channel/precoder pair.

    ``h_tilde = [Re h; Im h]``, ``b1 = [Re b; -Im b]``, ``b2 = [Im b; Re b]``
    so that ``h_tilde @ b1 = Re(h.T b)`` and ``h_tilde @ b2 = Im(h.T b)``.
    """

    h_tilde: np.ndarray
    b1: np.ndarray
    b2: np.ndarray

    def __post_init__(self):
        for name in ("h_tilde", "b1", "b2"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, _freeze(arr))
        if not (self.h_tilde.shape == self.b1.shape == self.b2.shape):
            raise ValueError("real expansion fields must share one shape")


# ---------------------------------------------------------------------------
# operations


def aggregate_precoder(bundle: PrecoderBundle, an_phases: Sequence[float],
                       symbol_phase: float) -> Precoder:
    """Collapse a bundle into the aggregate b_d + sum_i b_{n,i} e^{j(phi_i - phi_d)}.

    The instantaneous transmit power of the result is ``norm(b)**2``.
    """
    phases = np.asarray(an_phases, dtype=float)
    if phases.ndim != 1 or phases.size != len(bundle.b_n):
        raise ValueError("need exactly one AN phase per AN beamformer")
    if not (np.all(np.isfinite(phases)) and math.isfinite(symbol_phase)):
        raise ValueError("phases must be finite")
    b = bundle.b_d.astype(complex)
    for beam, phi in zip(bundle.b_n, phases):
        b = b + beam * np.exp(1j * (phi - symbol_phase))
    return Precoder(b)


def instantaneous_power(b) -> float:
    """Squared Euclidean norm of the aggregate precoder, in watts."""
    v = _vec(b)
    return float(np.vdot(v, v).real)


def received_point(h, b) -> complex:
    """Noiseless received point h.T @ b (transpose, no conjugation)."""
    hv = _as_complex_vector(h, "h")
    bv = _vec(b)
    if hv.size != bv.size:
        raise ValueError("channel/precoder length mismatch")
    return complex(hv @ bv)


def _an_power_at(bundle: PrecoderBundle, h: np.ndarray) -> float:
    """AN power seen through channel h; prefers the covariance when present."""
    if bundle.an_covariance is not None:
        g = np.conj(h)
        return float(np.real(g.conj() @ bundle.an_covariance @ g))
    return float(sum(abs(h @ beam) ** 2 for beam in bundle.b_n))


def statistical_sinr_ir(bundle: PrecoderBundle, h_d, sigma_d2: float) -> float:
    """Statistical receive SINR |h^T b_d|^2 / (sum_i |h^T b_{n,i}|^2 + sigma^2)."""
    h = _as_complex_vector(h_d, "h_d")
    signal = abs(h @ bundle.b_d) ** 2
    return float(signal / (_an_power_at(bundle, h) + sigma_d2))


def statistical_sinr_eve(bundle: PrecoderBundle, h_e, sigma_e2: float) -> float:
    """Same ratio evaluated through an eavesdropper channel."""
    h = _as_complex_vector(h_e, "h_e")
    signal = abs(h @ bundle.b_d) ** 2
    return float(signal / (_an_power_at(bundle, h) + sigma_e2))


def ci_region_contains(point, gamma_tilde: float, theta: float,
                       tol: float = REGION_TOL):
    """Membership in the constructive wedge |Im p| <= (Re p - gamma_tilde) tan(theta).

    Implemented in the half-plane-pair form, which stays well defined when
    ``Re p <= gamma_tilde`` (the predicate is then false for tol = 0).
    Accepts scalars or arrays of points.
    """
    if gamma_tilde < 0:
        raise ValueError("gamma_tilde must be nonnegative")
    if not 0 < theta < math.pi / 2:
        raise ValueError("theta must lie in (0, pi/2)")
    p = np.asarray(point, dtype=complex)
    bound = (p.real - gamma_tilde) * math.tan(theta) + tol
    result = np.abs(p.imag) <= bound
    return bool(result) if np.isscalar(point) or p.ndim == 0 else result


def destructive_region_contains(point, gamma_tilde_e: float, theta: float,
                                tol: float = REGION_TOL):
    """Membership in the destructive wedge Im p >= |Re p - gamma_tilde_e| tan(theta).

    This is the upper wedge with apex at (gamma_tilde_e, 0); both half-plane
    inequalities are enforced jointly. Note the origin lies outside.
    """
    if gamma_tilde_e < 0:
        raise ValueError("gamma_tilde_e must be nonnegative")
    if not 0 < theta < math.pi / 2:
        raise ValueError("theta must lie in (0, pi/2)")
    p = np.asarray(point, dtype=complex)
    t = math.tan(theta)
    lo = (p.real - gamma_tilde_e) * t
    result = (p.imag >= lo - tol) & (-p.imag <= lo + tol)
    return bool(result) if np.isscalar(point) or p.ndim == 0 else result


def real_expand(h, b) -> RealExpansion:
    """Stack a channel/precoder pair into the coupled real images."""
    hv = _as_complex_vector(h, "h")
    bv = _vec(b)
    if hv.size != bv.size:
        raise ValueError("channel/precoder length mismatch")
    h_tilde = np.concatenate([hv.real, hv.imag])
    b1 = np.concatenate([bv.real, -bv.imag])
    b2 = np.concatenate([bv.imag, bv.real])
    exp = RealExpansion(h_tilde=h_tilde, b1=b1, b2=b2)
    p = hv @ bv
    if abs(exp.h_tilde @ exp.b1 - p.real) > 1e-10:
        raise AssertionError("real expansion lost Re(h.T b)")
    if abs(exp.h_tilde @ exp.b2 - p.imag) > 1e-10:
        raise AssertionError("real expansion lost Im(h.T b)")
    return exp
