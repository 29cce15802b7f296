"""Scalar function families applied entrywise, their domains, and the
admissible family attached to each sequence regime.

The built-in variants (monomials alpha z^m conj(z)^k with alpha >= 0, their
nonnegative combinations, scalar multiples, identity, zero) all satisfy
f(conj z) = conj(f(z)); a Custom function must declare whether it does, and
the verifier re-checks the claim by sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NonRealValueError, OutOfDomainError, RegimeMismatchError
from .patterns import (
    R1_EMPTY,
    R2_SINGLETONS,
    R3A_PARTITION_ALL,
    R3B_SUBPARTITION_OTHER,
    R4_OVERLAPPING,
)

# Open boundaries |z| < rho are enforced with this relative slack.
BOUNDARY_SLACK = 1e-15

DISC = "disc"
OPEN_SYM = "open_sym"
HALF_OPEN_NONNEG = "half_open_nonneg"
OPEN_POS = "open_pos"

_KINDS = (DISC, OPEN_SYM, HALF_OPEN_NONNEG, OPEN_POS)


@dataclass(frozen=True)
class Domain:
    """Disc |z| < rho, or a real interval (-rho, rho), [0, rho), (0, rho)."""

    kind: str
    rho: float

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if not (self.rho > 0):
            raise ValueError("rho must be positive (math.inf allowed)")

    @classmethod
    def disc(cls, rho: float = math.inf) -> "Domain":
        return cls(DISC, float(rho))

    @classmethod
    def open_sym(cls, rho: float = math.inf) -> "Domain":
        return cls(OPEN_SYM, float(rho))

    @classmethod
    def half_open_nonneg(cls, rho: float = math.inf) -> "Domain":
        return cls(HALF_OPEN_NONNEG, float(rho))

    @classmethod
    def open_pos(cls, rho: float = math.inf) -> "Domain":
        return cls(OPEN_POS, float(rho))

    @property
    def upper(self) -> float:
        """Largest admitted modulus (open end pulled in by the boundary slack)."""
        return math.inf if math.isinf(self.rho) else self.rho * (1.0 - BOUNDARY_SLACK)

    @property
    def real_only(self) -> bool:
        return self.kind != DISC

    @property
    def has_zero(self) -> bool:
        return self.kind != OPEN_POS

    def contains(self, z) -> bool:
        z = complex(z)
        if self.kind == DISC:
            return abs(z) <= self.upper
        if z.imag != 0.0:
            return False
        x = z.real
        if self.kind == OPEN_SYM:
            return abs(x) <= self.upper
        if self.kind == HALF_OPEN_NONNEG:
            return 0.0 <= x <= self.upper
        return 0.0 < x <= self.upper

    def contains_array(self, Z: np.ndarray) -> np.ndarray:
        Z = np.asarray(Z, dtype=np.complex128)
        if self.kind == DISC:
            return np.abs(Z) <= self.upper
        real = Z.imag == 0.0
        x = Z.real
        if self.kind == OPEN_SYM:
            return real & (np.abs(x) <= self.upper)
        if self.kind == HALF_OPEN_NONNEG:
            return real & (x >= 0.0) & (x <= self.upper)
        return real & (x > 0.0) & (x <= self.upper)

    def reference_radius(self) -> float:
        """A finite positive scale inside the domain (rho for finite domains, 1 otherwise)."""
        return 1.0 if math.isinf(self.rho) else self.rho

    def probe_points(self) -> tuple[complex, ...]:
        """A small conjugation-closed sample of the domain."""
        r = 0.9 * self.reference_radius()
        if self.kind == DISC:
            w = r * complex(0.6, 0.8) * 0.5
            return (0j, complex(0.5 * r), complex(-0.5 * r), w, w.conjugate(), complex(r))
        if self.kind == OPEN_SYM:
            return (0j, complex(0.5 * r), complex(-0.5 * r), complex(r), complex(-r))
        if self.kind == HALF_OPEN_NONNEG:
            return (0j, complex(0.3 * r), complex(0.7 * r), complex(r))
        return (complex(0.1 * r), complex(0.5 * r), complex(r))

    def to_json(self) -> dict:
        return {"kind": self.kind, "rho": "inf" if math.isinf(self.rho) else self.rho}

    @classmethod
    def from_json(cls, data: dict) -> "Domain":
        rho = data["rho"]
        return cls(data["kind"], math.inf if rho in ("inf", None) else float(rho))


def _int_pow(Z: np.ndarray, m: int) -> np.ndarray:
    """Integer power by repeated squaring (conj-symmetric bit for bit, 0**0 = 1)."""
    out = np.ones_like(Z)
    base = Z.copy()
    e = m
    while e > 0:
        if e & 1:
            out = out * base
        e >>= 1
        if e:
            base = base * base
    return out


class PreserverFunction:
    """A scalar function applied entrywise; immutable and pure."""

    def evaluate(self, z: complex) -> complex:
        Z = np.array([[complex(z)]], dtype=np.complex128)
        return complex(self.evaluate_array(Z)[0, 0])

    def evaluate_array(self, Z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, z: complex) -> complex:
        return self.evaluate(z)

    def linear_slope(self) -> float | None:
        """c such that f(z) = c*z identically, or None."""
        return None

    def to_json(self) -> dict:
        raise NotImplementedError


class Identity(PreserverFunction):
    def evaluate_array(self, Z):
        return np.asarray(Z, dtype=np.complex128).copy()

    def linear_slope(self):
        return 1.0

    def to_json(self):
        return {"variant": "identity", "params": {}}

    def __repr__(self):
        return "Identity()"


class Zero(PreserverFunction):
    def evaluate_array(self, Z):
        return np.zeros_like(np.asarray(Z, dtype=np.complex128))

    def linear_slope(self):
        return 0.0

    def to_json(self):
        return {"variant": "zero", "params": {}}

    def __repr__(self):
        return "Zero()"


class HerzMonomial(PreserverFunction):
    """alpha * z^m * conj(z)^k with alpha >= 0 and integer exponents m, k >= 0."""

    def __init__(self, alpha: float, m: int, k: int):
        alpha = float(alpha)
        if not (alpha >= 0.0 and math.isfinite(alpha)):
            raise ValueError("alpha must be a finite nonnegative real")
        if m < 0 or k < 0:
            raise ValueError("exponents must be nonnegative integers")
        self.alpha = alpha
        self.m = int(m)
        self.k = int(k)

    def evaluate_array(self, Z):
        Z = np.asarray(Z, dtype=np.complex128)
        return self.alpha * _int_pow(Z, self.m) * _int_pow(np.conj(Z), self.k)

    def linear_slope(self):
        if (self.m, self.k) == (1, 0):
            return self.alpha
        return self.alpha if self.alpha == 0.0 else None

    def to_json(self):
        return {"variant": "herz_monomial", "params": {"alpha": self.alpha, "m": self.m, "k": self.k}}

    def __repr__(self):
        return f"HerzMonomial(alpha={self.alpha}, m={self.m}, k={self.k})"


class HerzSeries(PreserverFunction):
    """Sum of c_{m,k} z^m conj(z)^k over m + k <= max_degree, all c_{m,k} >= 0.

    Truncations of the full series are themselves valid preservers (finite
    nonnegative combinations), so sufficiency tests run on them directly.
    """

    def __init__(self, coeffs, max_degree: int = 8):
        if max_degree < 0:
            raise ValueError("max_degree must be nonnegative")
        terms = {}
        for (m, k), c in dict(coeffs).items():
            c = float(c)
            if not (c >= 0.0 and math.isfinite(c)):
                raise ValueError(f"coefficient c[{m},{k}] = {c} must be finite and >= 0")
            if m < 0 or k < 0:
                raise ValueError("term exponents must be nonnegative")
            if c != 0.0:
                terms[(int(m), int(k))] = c
        self.coeffs = dict(sorted(terms.items()))
        self.max_degree = int(max_degree)

    @classmethod
    def from_power_series(cls, coefficients, max_degree: int | None = None) -> "HerzSeries":
        """Real power series sum c_j x^j encoded with holomorphic terms (m=j, k=0)."""
        coeffs = {(j, 0): c for j, c in enumerate(coefficients)}
        if max_degree is None:
            max_degree = max(8, len(list(coefficients)) - 1)
        return cls(coeffs, max_degree=max_degree)

    def active_terms(self):
        return {t: c for t, c in self.coeffs.items() if t[0] + t[1] <= self.max_degree}

    def evaluate_array(self, Z):
        Z = np.asarray(Z, dtype=np.complex128)
        out = np.zeros_like(Z)
        for (m, k), c in self.active_terms().items():
            out = out + c * _int_pow(Z, m) * _int_pow(np.conj(Z), k)
        return out

    def linear_slope(self):
        active = self.active_terms()
        if set(active) <= {(1, 0)}:
            return active.get((1, 0), 0.0)
        return None

    def to_json(self):
        return {
            "variant": "herz_series",
            "params": {
                "coeffs": [[m, k, c] for (m, k), c in self.coeffs.items()],
                "max_degree": self.max_degree,
            },
        }

    def __repr__(self):
        return f"HerzSeries({self.coeffs}, max_degree={self.max_degree})"


class ScalarMultiple(PreserverFunction):
    """c * inner(z) for a real scalar c of either sign."""

    def __init__(self, c: float, inner: PreserverFunction):
        c = float(c)
        if not math.isfinite(c):
            raise ValueError("c must be finite")
        self.c = c
        self.inner = inner

    def evaluate_array(self, Z):
        return self.c * self.inner.evaluate_array(Z)

    def linear_slope(self):
        s = self.inner.linear_slope()
        return None if s is None else self.c * s

    def to_json(self):
        return {"variant": "scalar_multiple", "params": {"c": self.c, "inner": self.inner.to_json()}}

    def __repr__(self):
        return f"ScalarMultiple({self.c}, {self.inner!r})"


class Custom(PreserverFunction):
    """Wrap an arbitrary evaluator; must declare conjugate equivariance."""

    def __init__(self, fn, name: str = "custom", conjugate_equivariant: bool = False):
        self.fn = fn
        self.name = name
        self.conjugate_equivariant = bool(conjugate_equivariant)

    def evaluate_array(self, Z):
        Z = np.asarray(Z, dtype=np.complex128)
        flat = np.array([complex(self.fn(complex(z))) for z in Z.ravel()], dtype=np.complex128)
        return flat.reshape(Z.shape)

    def to_json(self):
        raise ValueError("custom functions are not JSON-serializable")

    def __repr__(self):
        return f"Custom({self.name!r})"


def scaled_identity(c: float) -> ScalarMultiple:
    """The linear function z -> c*z."""
    return ScalarMultiple(c, Identity())


def function_from_json(data: dict) -> PreserverFunction:
    variant = data["variant"]
    params = data.get("params", {})
    if variant == "identity":
        return Identity()
    if variant == "zero":
        return Zero()
    if variant == "herz_monomial":
        return HerzMonomial(params["alpha"], params["m"], params["k"])
    if variant == "herz_series":
        coeffs = {(int(m), int(k)): float(c) for m, k, c in params["coeffs"]}
        return HerzSeries(coeffs, max_degree=int(params.get("max_degree", 8)))
    if variant == "scalar_multiple":
        return ScalarMultiple(params["c"], function_from_json(params["inner"]))
    raise ValueError(f"unknown function variant {variant!r}")


def evaluate(f: PreserverFunction, z, domain: Domain) -> complex:
    """Evaluate f at a point of the domain; error outside it."""
    z = complex(z)
    if not domain.contains(z):
        raise OutOfDomainError(f"{z} is outside {domain.kind}(rho={domain.rho})")
    return f(z)


def conjugate_equivariance_check(f: PreserverFunction, samples, tol: float = 1e-10) -> bool:
    """True iff |f(conj z) - conj(f(z))| <= tol on every sample.

    The sample set is expected to be closed under conjugation.
    """
    for z in samples:
        z = complex(z)
        if abs(f(z.conjugate()) - f(z).conjugate()) > tol:
            return False
    return True


def dominance_check(g: PreserverFunction, f: PreserverFunction, domain: Domain, samples,
                    tol: float = 1e-12) -> bool:
    """True iff g(x) - f(x) >= -tol on the given nonnegative real samples."""
    for x in samples:
        x = complex(x)
        if x.imag != 0.0 or x.real < 0.0 or not domain.contains(x):
            raise ValueError(f"sample {x} is not a nonnegative real point of the domain")
        gv, fv = g(x), f(x)
        if abs(gv.imag) > 1e-12 or abs(fv.imag) > 1e-12:
            raise NonRealValueError(f"non-real value at x={x.real}: g={gv}, f={fv}")
        if gv.real - fv.real < -tol:
            return False
    return True


# -- admissible families per regime --------------------------------------------


@dataclass(frozen=True)
class FamilyDescriptor:
    """Which (g, f) survive a given sequence regime.

    ``c_interval`` is present exactly for the linear regimes and holds exact
    rational endpoints; ``constraint`` states the side condition otherwise.
    """

    regime: str
    description: str
    c_interval: tuple[Fraction, Fraction] | None = None
    constraint: str | None = None

    def to_json(self) -> dict:
        out = {"regime": self.regime, "family": self.description}
        if self.c_interval is not None:
            out["c_interval"] = [str(self.c_interval[0]), str(self.c_interval[1])]
        if self.constraint is not None:
            out["constraint"] = self.constraint
        return out


def _linear_interval(regime: str, K) -> tuple[Fraction, Fraction]:
    if regime == R3A_PARTITION_ALL:
        if not (isinstance(K, int) or (isinstance(K, float) and K.is_integer() and math.isfinite(K))):
            raise RegimeMismatchError("the partition-of-all regime needs a finite integer max block count")
        K = int(K)
        if K < 2:
            raise RegimeMismatchError("the partition-of-all regime needs max block count >= 2")
        return (Fraction(-1, K - 1), Fraction(1))
    return (Fraction(0), Fraction(1))


def admissible_family(regime: str, K) -> FamilyDescriptor:
    """The family of admissible f for a classified sequence (g = identity)."""
    if regime == R1_EMPTY:
        return FamilyDescriptor(
            regime=regime,
            description="any series sum c_{m,k} z^m conj(z)^k with c_{m,k} >= 0",
        )
    if regime == R2_SINGLETONS:
        return FamilyDescriptor(
            regime=regime,
            description="series with nonnegative coefficients, bounded by the identity on nonnegative reals",
            constraint="f(x) ≤ x on I∩ℝ≥0",
        )
    if regime in (R3A_PARTITION_ALL, R3B_SUBPARTITION_OTHER):
        return FamilyDescriptor(
            regime=regime,
            description="linear: f(z) = c·z",
            c_interval=_linear_interval(regime, K),
        )
    if regime == R4_OVERLAPPING:
        return FamilyDescriptor(regime=regime, description="identity only", constraint="f = g")
    raise ValueError(f"unknown regime {regime!r}")


def admissible_c_interval_pair(regime: str, K, g: PreserverFunction) -> tuple[Fraction, Fraction]:
    """Interval for c in f = c*g when g is a positive monomial, per regime."""
    if regime not in (R3A_PARTITION_ALL, R3B_SUBPARTITION_OTHER):
        raise RegimeMismatchError(f"no scalar interval in regime {regime}")
    if isinstance(g, Identity):
        pass
    elif isinstance(g, HerzMonomial):
        if not g.alpha > 0:
            raise ValueError("g must have a strictly positive coefficient")
    else:
        raise ValueError("g must be a monomial alpha z^m conj(z)^k (or the identity)")
    return _linear_interval(regime, K)
