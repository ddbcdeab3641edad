"""Separable Bregman generators and their monotone isometric embeddings.

Each built-in generator bundles the scalar convex function phi, its first two
derivatives, and the embedding h defined as the antiderivative of sqrt(phi'')
with integration constant 0. h is strictly increasing, maps the metric induced
by phi'' onto a flat Euclidean geometry, and H = h^{-1} pulls results back.
All callables are numpy-vectorized and applied componentwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError

Interval = tuple[float, float]
ScalarFn = Callable[[np.ndarray], np.ndarray]

GENERATOR_NAMES = ("euclidean", "exp", "negexp", "shannon", "burg")

_INF = math.inf


@dataclass(frozen=True)
class Generator:
    """A separable Bregman generator with its metric embedding.

    Instances are immutable value objects; every field callable is a pure
    function, so a Generator may be shared freely across threads.
    A custom generator can be built by constructing this dataclass directly
    from closed-form callbacks (phi'', h and h_inverse must be mutually
    consistent; no numerical integration is performed here).
    """

    name: str
    domain: Interval
    phi: ScalarFn
    phi_prime: ScalarFn
    phi_double_prime: ScalarFn
    h: ScalarFn
    h_inverse: ScalarFn
    embedded_range: Interval


@dataclass(frozen=True)
class ConjugatePieces:
    """Legendre conjugate of a generator, with its own embedding h*.

    phi_star_prime inverts phi_prime, and phi''(x) * phi*''(phi'(x)) = 1.
    For the built-ins the constants are chosen so h*(phi'(x)) = h(x) exactly.
    """

    phi_star: ScalarFn
    phi_star_prime: ScalarFn
    phi_star_double_prime: ScalarFn
    h_star: ScalarFn
    dual_domain: Interval


def _interval_str(interval: Interval) -> str:
    return f"({interval[0]}, {interval[1]})"


def _check_open_interval(arr: np.ndarray, interval: Interval, what: str) -> None:
    lo, hi = interval
    inside = (arr > lo) & (arr < hi)  # NaN compares false and is rejected too
    if not inside.all():
        if arr.ndim == 0:
            index, value = None, float(arr)
        else:
            bad = np.unravel_index(int(np.argmin(inside)), arr.shape)
            index = bad[0] if arr.ndim == 1 else bad
            value = float(arr[bad])
        raise DomainError(
            f"coordinate {value!r} at index {index} outside {what} "
            f"{_interval_str(interval)}",
            index=index,
        )


def make_generator(name: str) -> Generator:
    """Return one of the five built-in generators by name."""
    try:
        build = _BUILDERS[name]
    except KeyError:
        raise ValueError(
            f"unknown generator {name!r}; expected one of {', '.join(GENERATOR_NAMES)}"
        ) from None
    return build()


def conjugate(g: Generator) -> ConjugatePieces:
    """Return the closed-form Legendre conjugate pieces of a built-in generator."""
    try:
        build = _CONJUGATES[g.name]
    except KeyError:
        raise ValueError(
            f"no closed-form conjugate registered for generator {g.name!r}"
        ) from None
    return build()


def embed(g: Generator, x) -> np.ndarray:
    """Apply h componentwise after validating every coordinate is in the domain."""
    arr = np.asarray(x, dtype=float)
    _check_open_interval(arr, g.domain, f"domain of {g.name}")
    return np.asarray(g.h(arr))


def unembed(g: Generator, u) -> np.ndarray:
    """Apply H = h^{-1} componentwise; coordinates must lie in the embedded range."""
    arr = np.asarray(u, dtype=float)
    _check_open_interval(arr, g.embedded_range, f"embedded range of {g.name}")
    return np.asarray(g.h_inverse(arr))


# --- built-in closed forms -------------------------------------------------

def _euclidean() -> Generator:
    return Generator(
        name="euclidean",
        domain=(-_INF, _INF),
        phi=lambda x: 0.5 * np.square(x),
        phi_prime=lambda x: np.asarray(x, dtype=float),
        phi_double_prime=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        h=lambda x: np.array(x, dtype=float),
        h_inverse=lambda u: np.array(u, dtype=float),
        embedded_range=(-_INF, _INF),
    )


def _exp() -> Generator:
    return Generator(
        name="exp",
        domain=(-_INF, _INF),
        phi=np.exp,
        phi_prime=np.exp,
        phi_double_prime=np.exp,
        h=lambda x: 2.0 * np.exp(0.5 * np.asarray(x, dtype=float)),
        h_inverse=lambda u: 2.0 * np.log(0.5 * np.asarray(u, dtype=float)),
        embedded_range=(0.0, _INF),
    )


def _negexp() -> Generator:
    return Generator(
        name="negexp",
        domain=(-_INF, _INF),
        phi=lambda x: np.exp(-np.asarray(x, dtype=float)),
        phi_prime=lambda x: -np.exp(-np.asarray(x, dtype=float)),
        phi_double_prime=lambda x: np.exp(-np.asarray(x, dtype=float)),
        h=lambda x: -2.0 * np.exp(-0.5 * np.asarray(x, dtype=float)),
        h_inverse=lambda u: -2.0 * np.log(-0.5 * np.asarray(u, dtype=float)),
        embedded_range=(-_INF, 0.0),
    )


def _shannon() -> Generator:
    return Generator(
        name="shannon",
        domain=(0.0, _INF),
        phi=lambda x: np.asarray(x, dtype=float) * np.log(x),
        phi_prime=lambda x: np.log(x) + 1.0,
        phi_double_prime=lambda x: 1.0 / np.asarray(x, dtype=float),
        h=lambda x: 2.0 * np.sqrt(x),
        h_inverse=lambda u: 0.25 * np.square(u),
        embedded_range=(0.0, _INF),
    )


def _burg() -> Generator:
    return Generator(
        name="burg",
        domain=(0.0, _INF),
        phi=lambda x: -np.log(x),
        phi_prime=lambda x: -1.0 / np.asarray(x, dtype=float),
        phi_double_prime=lambda x: np.asarray(x, dtype=float) ** -2.0,
        h=np.log,
        h_inverse=np.exp,
        embedded_range=(-_INF, _INF),
    )


_BUILDERS: dict[str, Callable[[], Generator]] = {
    "euclidean": _euclidean,
    "exp": _exp,
    "negexp": _negexp,
    "shannon": _shannon,
    "burg": _burg,
}


def _conj_euclidean() -> ConjugatePieces:
    return ConjugatePieces(
        phi_star=lambda y: 0.5 * np.square(y),
        phi_star_prime=lambda y: np.asarray(y, dtype=float),
        phi_star_double_prime=lambda y: np.ones_like(np.asarray(y, dtype=float)),
        h_star=lambda y: np.array(y, dtype=float),
        dual_domain=(-_INF, _INF),
    )


def _conj_exp() -> ConjugatePieces:
    # phi'(x) = e^x on (0, inf); phi*(y) = y ln y - y
    return ConjugatePieces(
        phi_star=lambda y: np.asarray(y, dtype=float) * np.log(y) - y,
        phi_star_prime=np.log,
        phi_star_double_prime=lambda y: 1.0 / np.asarray(y, dtype=float),
        h_star=lambda y: 2.0 * np.sqrt(y),
        dual_domain=(0.0, _INF),
    )


def _conj_negexp() -> ConjugatePieces:
    # phi'(x) = -e^{-x} on (-inf, 0); phi*(y) = y - y ln(-y)
    return ConjugatePieces(
        phi_star=lambda y: np.asarray(y, dtype=float) * (1.0 - np.log(-np.asarray(y, dtype=float))),
        phi_star_prime=lambda y: -np.log(-np.asarray(y, dtype=float)),
        phi_star_double_prime=lambda y: -1.0 / np.asarray(y, dtype=float),
        h_star=lambda y: -2.0 * np.sqrt(-np.asarray(y, dtype=float)),
        dual_domain=(-_INF, 0.0),
    )


def _conj_shannon() -> ConjugatePieces:
    # phi'(x) = ln x + 1 on all of R; phi*(y) = e^{y-1}
    return ConjugatePieces(
        phi_star=lambda y: np.exp(np.asarray(y, dtype=float) - 1.0),
        phi_star_prime=lambda y: np.exp(np.asarray(y, dtype=float) - 1.0),
        phi_star_double_prime=lambda y: np.exp(np.asarray(y, dtype=float) - 1.0),
        h_star=lambda y: 2.0 * np.exp(0.5 * (np.asarray(y, dtype=float) - 1.0)),
        dual_domain=(-_INF, _INF),
    )


def _conj_burg() -> ConjugatePieces:
    # phi'(x) = -1/x on (-inf, 0); phi*(y) = -1 - ln(-y)
    return ConjugatePieces(
        phi_star=lambda y: -1.0 - np.log(-np.asarray(y, dtype=float)),
        phi_star_prime=lambda y: -1.0 / np.asarray(y, dtype=float),
        phi_star_double_prime=lambda y: np.asarray(y, dtype=float) ** -2.0,
        h_star=lambda y: -np.log(-np.asarray(y, dtype=float)),
        dual_domain=(-_INF, 0.0),
    )


_CONJUGATES: dict[str, Callable[[], ConjugatePieces]] = {
    "euclidean": _conj_euclidean,
    "exp": _conj_exp,
    "negexp": _conj_negexp,
    "shannon": _conj_shannon,
    "burg": _conj_burg,
}
