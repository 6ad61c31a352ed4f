"""Autoregressive and moving-average processes on the ordered dual labels.

The nonnegative-integer labels of the SU(2) dual carry the order of the
weight lattice, so one-sided recursions make sense: Y_n = lam Y_{n-1} + Z_n
with Y_{-1} = 0, and Y_n = sum_k beta_k Z_{n-k}.  Closed-form covariances
come with brute-force-verified formulas and exact two-index oracles that
plug into the stationarity checks.  Noise is circular complex Gaussian
with unit second moment; covariance statements depend on the second
moments only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .dual_hypergroup import Label, SU2Dual, su2_dual
from .stationary_fields import FieldSampler

UNIT_CIRCLE_TOL = 1e-8


def white_noise_sequence(count: int, seed=None, rng=None) -> np.ndarray:
    """Circular complex Gaussian draws with unit second moment."""
    if rng is None:
        rng = np.random.default_rng(seed)
    block = rng.normal(size=(2, count), scale=np.sqrt(0.5))
    return block[0] + 1j * block[1]


# ---------------------------------------------------------------------------
# AR(1)
# ---------------------------------------------------------------------------


def simulate_ar1(lam: complex, n_max: int, seed=None, noise=None) -> np.ndarray:
    """Path Y_0..Y_{n_max} of the recursion Y_n = lam Y_{n-1} + Z_n, Y_{-1} = 0.

    ``noise`` overrides the generated draws (one complex value per index);
    the same draws reproduce the path through the finite moving-average
    expansion sum_k lam^k Z_{n-k}, with no condition on lam.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if noise is None:
        noise = white_noise_sequence(n_max + 1, seed=seed)
    noise = np.asarray(noise, dtype=complex)
    if noise.shape != (n_max + 1,):
        raise ValueError(f"need {n_max + 1} noise draws, got shape {noise.shape}")
    out = np.empty(n_max + 1, dtype=complex)
    previous = 0j
    for n in range(n_max + 1):
        previous = lam * previous + noise[n]
        out[n] = previous
    return out


def simulate_ar1_batch(lam: complex, n_max: int, n_paths: int, seed) -> np.ndarray:
    """Independent AR(1) paths as rows of an (n_paths, n_max + 1) array."""
    rng = np.random.default_rng(seed)
    noise = (
        rng.normal(size=(n_paths, n_max + 1), scale=np.sqrt(0.5))
        + 1j * rng.normal(size=(n_paths, n_max + 1), scale=np.sqrt(0.5))
    )
    out = np.empty_like(noise)
    previous = np.zeros(n_paths, dtype=complex)
    for n in range(n_max + 1):
        previous = lam * previous + noise[:, n]
        out[:, n] = previous
    return out


def ar1_covariance(lam: complex, n: int, h: int) -> complex:
    """E(Y_{n+h} conj(Y_n)) under unit noise: lam^h times sum of |lam|^{2l}.

    Evaluated as lam^h (1 - |lam|^{2n+2}) / (1 - |lam|^2) away from the
    unit circle and as (n + 1) lam^h within UNIT_CIRCLE_TOL of it, which
    avoids the cancellation at the removable singularity.
    """
    if n < 0 or h < 0:
        raise ValueError("indices must be nonnegative")
    lam = complex(lam)
    r2 = abs(lam) ** 2
    if abs(abs(lam) - 1.0) <= UNIT_CIRCLE_TOL:
        return (n + 1) * lam**h
    return lam**h * (1.0 - r2 ** (n + 1)) / (1.0 - r2)


def ar1_second_moment_oracle(lam: complex) -> Callable[[Label, Label], complex]:
    """Exact two-index covariance oracle (n1, n2) -> E(Y_{n1} conj(Y_{n2}))."""

    def oracle(n1: Label, n2: Label) -> complex:
        if n1 >= n2:
            return ar1_covariance(lam, n2, n1 - n2)
        return np.conj(ar1_covariance(lam, n1, n2 - n1))

    return oracle


# ---------------------------------------------------------------------------
# MA(q)
# ---------------------------------------------------------------------------


def simulate_ma(beta: Sequence[complex], n_max: int, seed=None, noise=None) -> np.ndarray:
    """Path of Y_n = sum_{k=0}^{q} beta_k Z_{n-k} with Z_j = 0 for j < 0."""
    beta = np.asarray(beta, dtype=complex)
    if beta.size == 0:
        raise ValueError("beta must contain the k = 0 coefficient")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if noise is None:
        noise = white_noise_sequence(n_max + 1, seed=seed)
    noise = np.asarray(noise, dtype=complex)
    out = np.zeros(n_max + 1, dtype=complex)
    for k, coeff in enumerate(beta):
        if k > n_max:
            break
        out[k:] += coeff * noise[: n_max + 1 - k]
    return out


def simulate_ma_batch(beta: Sequence[complex], n_max: int, n_paths: int, seed) -> np.ndarray:
    beta = np.asarray(beta, dtype=complex)
    rng = np.random.default_rng(seed)
    noise = (
        rng.normal(size=(n_paths, n_max + 1), scale=np.sqrt(0.5))
        + 1j * rng.normal(size=(n_paths, n_max + 1), scale=np.sqrt(0.5))
    )
    out = np.zeros_like(noise)
    for k, coeff in enumerate(beta):
        if k > n_max:
            break
        out[:, k:] += coeff * noise[:, : n_max + 1 - k]
    return out


def ma_covariance(beta: Sequence[complex], h: int) -> complex:
    """Steady-regime lag covariance: overlap sum of coefficients, 0 past q."""
    if h < 0:
        raise ValueError("lag must be nonnegative")
    beta = np.asarray(beta, dtype=complex)
    q = beta.size - 1
    if h > q:
        return 0j
    return complex((beta[h:] * np.conj(beta[: q - h + 1])).sum())


def ma_second_moment_oracle(beta: Sequence[complex]) -> Callable[[Label, Label], complex]:
    """Exact steady-regime oracle (n1, n2) -> E(Y_{n1} conj(Y_{n2}))."""
    beta = tuple(complex(b) for b in beta)

    def oracle(n1: Label, n2: Label) -> complex:
        if n1 >= n2:
            return ma_covariance(beta, n1 - n2)
        return np.conj(ma_covariance(beta, n2 - n1))

    return oracle


# ---------------------------------------------------------------------------
# Series specifications and field adapters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesSpec:
    """Which process to run: ar1 with one coefficient, or ma with q + 1."""

    kind: str  # "ar1" | "ma"
    coefficients: tuple[complex, ...]
    noise: str = "whitenoise(circular gaussian)"

    def __post_init__(self):
        if self.kind not in ("ar1", "ma"):
            raise ValueError(f"unknown series kind {self.kind!r}")
        if self.kind == "ar1" and len(self.coefficients) != 1:
            raise ValueError("ar1 takes exactly one coefficient")
        if self.kind == "ma" and not self.coefficients:
            raise ValueError("ma needs at least the k = 0 coefficient")

    def oracle(self) -> Callable[[Label, Label], complex]:
        if self.kind == "ar1":
            return ar1_second_moment_oracle(self.coefficients[0])
        return ma_second_moment_oracle(self.coefficients)

    def simulate_batch(self, n_max: int, n_paths: int, seed) -> np.ndarray:
        if self.kind == "ar1":
            return simulate_ar1_batch(self.coefficients[0], n_max, n_paths, seed)
        return simulate_ma_batch(self.coefficients, n_max, n_paths, seed)

    def describe(self) -> str:
        coeffs = ",".join(f"{c.real:g}{c.imag:+g}j" for c in self.coefficients)
        return f"{self.kind}({coeffs})"


def parse_series_spec(text: str) -> SeriesSpec:
    """Parse "ar1:<re>,<im>" or "ma:<re0>,<im0>;<re1>,<im1>;..."."""
    kind, _, rest = text.partition(":")
    if kind == "ar1":
        re_text, _, im_text = rest.partition(",")
        return SeriesSpec("ar1", (complex(float(re_text), float(im_text or 0)),))
    if kind == "ma":
        coeffs = []
        for item in rest.split(";"):
            re_text, _, im_text = item.partition(",")
            coeffs.append(complex(float(re_text), float(im_text or 0)))
        return SeriesSpec("ma", tuple(coeffs))
    raise ValueError(f"unknown series specification {text!r}")


class SeriesField(FieldSampler):
    """Time-series process viewed as a field on the SU(2) dual labels."""

    def __init__(self, spec: SeriesSpec, seed=0, dual: SU2Dual | None = None):
        self.spec = spec
        self._oracle = spec.oracle()
        super().__init__(
            dual if dual is not None else su2_dual(),
            seed,
            f"{spec.describe()}(seed={seed})",
        )

    def sample_batch(self, labels, count):
        ordered = sorted(set(labels))
        for label in ordered:
            self.dual.validate_label(label)
        paths = self.spec.simulate_batch(max(ordered), count, self._rng)
        return {label: paths[:, label] for label in ordered}

    def second_moment(self, a, b):
        return self._oracle(self.dual.validate_label(a), self.dual.validate_label(b))

    def reseeded(self, seed):
        return SeriesField(self.spec, seed, self.dual)


def ar1_field(lam: complex, seed=0) -> SeriesField:
    return SeriesField(SeriesSpec("ar1", (complex(lam),)), seed)


def ma_field(beta: Sequence[complex], seed=0) -> SeriesField:
    return SeriesField(SeriesSpec("ma", tuple(complex(b) for b in beta)), seed)
