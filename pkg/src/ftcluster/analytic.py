"""Closed-form error propagation, thresholds and level selection.

All functions accept ``fractions.Fraction`` inputs and then stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

from .pauli import NoiseModel

C = math.comb(7, 2)  # pairs of faulty sub-blocks that defeat distance 3
PAULIS = "IXYZ"


@dataclass(frozen=True)
class HomogeneousErrors:
    eps_x: Real
    eps_y: Real
    eps_z: Real

    def __post_init__(self):
        for v in (self.eps_x, self.eps_y, self.eps_z):
            if not 0 <= v <= 1:
                raise ValueError(f"error probability {v} outside [0, 1]")
        if self.eps_x + self.eps_y + self.eps_z > 1:
            raise ValueError("error probabilities sum to more than 1")

    def as_tuple(self) -> tuple:
        return self.eps_x, self.eps_y, self.eps_z


@dataclass(frozen=True)
class ThresholdParams:
    D: Real
    p_th: Real
    C: int = C


def homogeneous_errors(model: NoiseModel) -> HomogeneousErrors:
    """Per-qubit errors left by double verification: (p_XI, p_YI, 2 p_ZI)."""
    return HomogeneousErrors(model.p("XI"), model.p("YI"), 2 * model.p("ZI"))


def _row_sum(model: NoiseModel, a: str) -> Real:
    """sum_B p_AB over B in {I, X, Y, Z} (p_II is not an error)."""
    return sum(model.p(a + b) for b in PAULIS if a + b != "II")


def bare_cz_update(eps: HomogeneousErrors, model: NoiseModel) -> HomogeneousErrors:
    """Errors after one bare transversal C-Z to a partner with the same errors."""
    return HomogeneousErrors(
        eps.eps_x + _row_sum(model, "X"),
        eps.eps_y + _row_sum(model, "Y"),
        eps.eps_z + eps.eps_x + eps.eps_y + _row_sum(model, "Z"),
    )


def measurement_error_p0(eps_prime: HomogeneousErrors, model: NoiseModel) -> Real:
    """X-basis measurement error of a level-0 qubit: eps'_Z + eps'_Y + p_M."""
    return eps_prime.eps_z + eps_prime.eps_y + model.p_M


def p_q0(model: NoiseModel) -> Real:
    return measurement_error_p0(bare_cz_update(homogeneous_errors(model), model), model)


def level_error(level: int, p_q0: Real) -> Real:
    """Leading-order logical measurement error (21 p_q0)^(2^l) / 21, clamped to [0, 1]."""
    if level < 0:
        raise ValueError("level must be >= 0")
    if not 0 <= p_q0 <= 1:
        raise ValueError("p_q0 must lie in [0, 1]")
    if level == 0:
        return p_q0
    base = C * p_q0
    if isinstance(base, float) and base > 1 and 2**level * math.log(base) > 700:
        return 1.0
    value = base ** (2**level) / C
    return min(value, 1 if isinstance(value, Fraction) else 1.0)


def level_error_recursive(level: int, p_q0: Real) -> Real:
    """Unclamped recursion p^(l) = 21 (p^(l-1))^2."""
    value = p_q0
    for _ in range(level):
        value = C * value * value
    return value


def log10_level_error(level: int, p_q0: float) -> float:
    """log10 of the unclamped closed form, safe where the value underflows."""
    if p_q0 <= 0:
        return -math.inf
    if level == 0:
        return math.log10(p_q0)
    return 2**level * math.log10(C * p_q0) - math.log10(C)


def threshold(model: NoiseModel | None = None, D: Real | None = None) -> ThresholdParams:
    """p_th = 1 / (21 D), with D = p_q0 / p_e from the error chain unless given."""
    if D is None:
        if model is None:
            raise ValueError("need a noise model or an explicit D")
        if model.p_e == 0:
            raise ValueError("D = p_q0 / p_e is undefined for p_e = 0")
        D = p_q0(model) / model.p_e
    if D <= 0:
        raise ValueError("D must be positive")
    one = Fraction(1) if isinstance(D, (int, Fraction)) else 1.0
    return ThresholdParams(D=D, p_th=one / (C * D))


def default_D() -> Fraction:
    """D of the uniform depolarizing model, derived exactly."""
    return threshold(NoiseModel(Fraction(1, 100))).D


# --- computation size ---------------------------------------------------------------------


@dataclass(frozen=True)
class ComputationSize:
    """A computation size N = mantissa * 10**exponent (sizes overflow floats)."""

    mantissa: float
    exponent: int

    def __post_init__(self):
        if self.mantissa <= 0:
            raise ValueError("computation size must be positive")

    @classmethod
    def parse(cls, text: str | float | int | "ComputationSize") -> "ComputationSize":
        if isinstance(text, ComputationSize):
            return text
        s = str(text).strip().lower()
        if "e" in s:
            m, e = s.split("e", 1)
            return cls(float(m), int(e))
        value = float(s)
        if value <= 0:
            raise ValueError("computation size must be positive")
        e = math.floor(math.log10(value))
        return cls(value / 10**e, e)

    @property
    def log10(self) -> float:
        return math.log10(self.mantissa) + self.exponent

    def __str__(self) -> str:
        return f"{self.mantissa:g}e{self.exponent}"


def highest_level(N, p_q0: float, max_level: int = 64) -> int:
    """Smallest l with level_error(l, p_q0) <= 0.1 / N."""
    size = ComputationSize.parse(N)
    if size.log10 < 0:
        raise ValueError("N must be >= 1")
    if p_q0 == 0:
        return 0
    if p_q0 >= Fraction(1, C):
        raise ValueError(f"p_q0={float(p_q0):g} is not below the threshold 1/21; no finite level")
    target = -1 - size.log10
    for level in range(max_level + 1):
        if log10_level_error(level, float(p_q0)) <= target + 1e-12:
            return level
    raise ValueError("no level up to max_level reaches the target accuracy")


def asymptotic_level(N) -> float:
    """log2(log10 N), the asymptotic form of the highest level."""
    lg = ComputationSize.parse(N).log10
    if lg <= 1:
        raise ValueError("asymptotic form needs N > 10")
    return math.log2(lg)


# --- memory errors ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MemoryThreshold:
    verbatim: float  # [21 {1 + log2(log10 N) n tau_m}]^-1, as printed
    d_adjusted: float  # [21 D {1 + log2(log10 N) n tau_m}]^-1
    additive: float  # [21 (D + log2(log10 N) n tau_m)]^-1, from p_q0 + l (n tau_m p_e)
    l_bar: float
    D: float


def memory_threshold(N, n_steps: float, tau_m: float, D: float | None = None) -> MemoryThreshold:
    if n_steps < 0 or tau_m < 0:
        raise ValueError("n_steps and tau_m must be non-negative")
    l_bar = asymptotic_level(N)
    D = float(default_D() if D is None else D)
    bracket = 1 + l_bar * n_steps * tau_m
    return MemoryThreshold(
        verbatim=1 / (C * bracket),
        d_adjusted=1 / (C * D * bracket),
        additive=1 / (C * (D + l_bar * n_steps * tau_m)),
        l_bar=l_bar,
        D=D,
    )


def in_construction_measurement_error(level: int, p_q0: Real, multiplier: Real = 2) -> Real:
    """Error of a level-l qubit measured inside the level-(l+2) construction,
    modeled as ``multiplier`` times p_q^(l) (clamped)."""
    value = multiplier * level_error(level, p_q0)
    return min(value, 1 if isinstance(value, Fraction) else 1.0)
