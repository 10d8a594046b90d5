"""Hermite polynomials at complex argument and two classical identities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HermiteOverflowError

MAGNITUDE_GUARD = 1e300


@dataclass(frozen=True)
class HermiteSequence:
    """H_0(y) .. H_N(y) at a fixed argument; ``values[n]`` is H_n."""

    order: int
    values: np.ndarray

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self):
        return self.order + 1


def _guard(values, what):
    with np.errstate(invalid="ignore"):
        bad = ~np.isfinite(values) | (np.abs(values) > MAGNITUDE_GUARD)
    if np.any(bad):
        n = int(np.argmax(bad.reshape(bad.shape[0], -1).any(axis=1)))
        raise HermiteOverflowError(
            f"{what} exceeds {MAGNITUDE_GUARD:g} at order {n}; reduce N or rescale the argument"
        )


def hermite_all(y, N: int) -> HermiteSequence:
    """Physicists' Hermite polynomials H_0..H_N by forward recurrence.

    ``y`` may be a complex scalar or array; ``values`` then has shape
    ``(N + 1,) + np.shape(y)``.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    y = np.asarray(y, dtype=complex)
    values = np.empty((N + 1,) + y.shape, dtype=complex)
    values[0] = 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        if N >= 1:
            values[1] = 2.0 * y
        for n in range(1, N):
            values[n + 1] = 2.0 * y * values[n] - 2.0 * n * values[n - 1]
    _guard(values, "|H_n|")
    return HermiteSequence(order=N, values=values)


def hermite_normalized_all(y, N: int) -> np.ndarray:
    """H_n(y) / sqrt(2^n n!) for n = 0..N.

    Grows far more slowly than H_n, which keeps the Fock coefficients
    representable up to the truncation cap.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    y = np.asarray(y, dtype=complex)
    values = np.empty((N + 1,) + y.shape, dtype=complex)
    values[0] = 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        if N >= 1:
            values[1] = np.sqrt(2.0) * y
        for n in range(1, N):
            values[n + 1] = (
                np.sqrt(2.0 / (n + 1)) * y * values[n] - np.sqrt(n / (n + 1)) * values[n - 1]
            )
    _guard(values, "|H_n / sqrt(2^n n!)|")
    return values


def generating_function_check(y: complex, z: complex, N: int) -> float:
    """|exp(2yz - z^2) - sum_{n<=N} H_n(y) z^n / n!|."""
    if abs(z) > 0.9:
        raise ValueError("|z| must be <= 0.9 for the truncated series to converge")
    H = hermite_all(y, N).values
    total = 0j
    term = 1.0 + 0j  # z^n / n!
    for n in range(N + 1):
        total += H[n] * term
        term *= z / (n + 1)
    return abs(np.exp(2 * y * z - z * z) - total)


def mehler_sum(x: complex, y: complex, z: complex, N: int) -> complex:
    """Truncated bilinear sum sum_{n<=N} H_n(x) H_n(y) z^n / (2^n n!)."""
    if not abs(z) < 1:
        raise ValueError("the Mehler sum needs |z| < 1")
    hx = hermite_normalized_all(x, N)
    hy = hermite_normalized_all(y, N)
    powers = complex(z) ** np.arange(N + 1)
    return complex(np.sum(hx * hy * powers))


def mehler_closed_form(x: complex, y: complex, z: complex) -> complex:
    """(1 - z^2)^{-1/2} exp[(2xyz - (x^2 + y^2) z^2) / (1 - z^2)]."""
    one = 1 - z * z
    return complex(np.exp((2 * x * y * z - (x * x + y * y) * z * z) / one) / np.sqrt(one))
