"""Lebesgue exponent tuples, the map p -> b(p), and classification against a polytope."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .polytope import NewtonPolytope, interior_margin


class ExponentError(ValueError):
    code = "INADMISSIBLE"


class SigmaTooSmall(ExponentError):
    code = "SIGMA_LE_ONE"


class ExponentBelowOne(ExponentError):
    code = "P_BELOW_ONE"


INF = "inf"


@dataclass(frozen=True)
class ExponentTuple:
    """Exponents stored through their reciprocals, so ``inf`` is exactly 0."""

    recips: tuple[Fraction, ...]

    @classmethod
    def of(cls, ps: Sequence) -> "ExponentTuple":
        recips = []
        for p in ps:
            if isinstance(p, str):
                p = p.strip().lower()
                if p in ("inf", "infinity", "oo", "∞"):
                    recips.append(Fraction(0))
                    continue
                p = Fraction(p)
            elif isinstance(p, float):
                if p == float("inf"):
                    recips.append(Fraction(0))
                    continue
                p = Fraction(repr(p))
            else:
                p = Fraction(p)
            if p <= 0:
                raise ExponentError(f"exponent {p} must be positive")
            recips.append(1 / p)
        if not recips:
            raise ExponentError("empty exponent tuple")
        return cls(tuple(recips))

    @classmethod
    def parse(cls, text: str) -> "ExponentTuple":
        """Parse ``2,2,2`` or ``3/2,inf``."""
        parts = [s for s in text.replace(" ", "").split(",")]
        if any(not s for s in parts):
            raise ExponentError(f"cannot parse exponent list {text!r}")
        try:
            return cls.of(parts)
        except (ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, ExponentError):
                raise
            raise ExponentError(f"cannot parse exponent list {text!r}") from exc

    @property
    def k(self) -> int:
        return len(self.recips)

    @property
    def p(self) -> tuple:
        return tuple(INF if r == 0 else 1 / r for r in self.recips)

    def __str__(self):
        return "(" + ",".join(str(v) for v in self.p) + ")"


def sigma(p: ExponentTuple) -> Fraction:
    return sum(p.recips, Fraction(0))


def b_of_p(p: ExponentTuple) -> tuple[Fraction, ...]:
    """``b_i = (1/p_i) / (sum_j 1/p_j - 1)``."""
    if any(r > 1 for r in p.recips):
        raise ExponentBelowOne(f"some exponent of {p} is below 1")
    s = sigma(p)
    if s <= 1:
        raise SigmaTooSmall(f"sum of reciprocals {s} <= 1 for {p}")
    return tuple(r / (s - 1) for r in p.recips)


def p_of_b(b: Sequence) -> ExponentTuple:
    b = tuple(Fraction(v) for v in b)
    if any(v < 0 for v in b):
        raise ExponentError("b must be non-negative")
    s = sum(b, Fraction(0))
    if s <= 1:
        raise ExponentError(f"sum(b) = {s} must exceed 1")
    if any(v > s - 1 for v in b):
        raise ExponentError(f"{b} has an entry above sum(b) - 1 (would give p_i < 1)")
    # p_i = (sum(b) - 1) / b_i, with b_i = 0 giving p_i = inf
    return ExponentTuple(tuple(v / (s - 1) for v in b))


class Verdict(enum.Enum):
    HOLDER_TRIVIAL = "HOLDER_TRIVIAL"
    FAILS_P_BELOW_ONE = "FAILS_P_BELOW_ONE"
    STRONG_TYPE = "STRONG_TYPE"
    NOT_RESTRICTED_WEAK_TYPE = "NOT_RESTRICTED_WEAK_TYPE"
    ENDPOINT_UNKNOWN = "ENDPOINT_UNKNOWN"


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    b: tuple[Fraction, ...] | None = None
    margin: Fraction | None = None
    certificate: str = ""

    def __str__(self):
        parts = [self.verdict.value]
        if self.b is not None:
            parts.append("b=(" + ",".join(str(v) for v in self.b) + ")")
        if self.margin is not None:
            parts.append(f"margin={self.margin}")
        if self.certificate:
            parts.append(self.certificate)
        return " ".join(parts)


def classify(p: ExponentTuple, P: NewtonPolytope | None) -> Classification:
    """Verdict for ``p`` given the Newton polytope (``None`` when the polytope is empty)."""
    if P is not None and P.k != p.k:
        raise ExponentError(f"exponent tuple has {p.k} entries, polytope has k={P.k}")
    if any(r > 1 for r in p.recips):
        return Classification(Verdict.FAILS_P_BELOW_ONE, certificate="some p_j < 1")
    if sigma(p) <= 1:
        return Classification(Verdict.HOLDER_TRIVIAL, certificate=f"sigma={sigma(p)}<=1")
    b = b_of_p(p)
    if P is None:
        return Classification(
            Verdict.NOT_RESTRICTED_WEAK_TYPE, b, certificate="Hörmander fails (empty polytope)"
        )
    t = interior_margin(P, b)
    if t > 0:
        return Classification(Verdict.STRONG_TYPE, b, t)
    if t == 0:
        return Classification(Verdict.ENDPOINT_UNKNOWN, b, t, "b(p) on the boundary")
    return Classification(Verdict.NOT_RESTRICTED_WEAK_TYPE, b, t, "b(p) outside P")
