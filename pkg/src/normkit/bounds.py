"""Exact calculators for the named constants and thresholds.

``exp(x)`` means ``2**x`` throughout.  Values too large to materialise are
kept as ``mult * 2**exp`` and compared in exponent space.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass, field
from functools import total_ordering

# values are only materialised below this exponent
MATERIALIZE_LIMIT = 1 << 24
# digit counts are confirmed by exact integer comparison below this exponent
VERIFY_LIMIT = 1 << 20


@total_ordering
@dataclass(frozen=True)
class Pow2:
    """The exact integer ``mult * 2**exp`` with ``mult >= 1``."""

    exp: int
    mult: int = 1

    def __post_init__(self):
        if self.mult < 1 or self.exp < 0:
            raise ValueError("Pow2 needs mult >= 1 and exp >= 0")

    @classmethod
    def of(cls, n: int) -> "Pow2":
        if n < 1:
            raise ValueError("only positive integers are representable")
        tz = (n & -n).bit_length() - 1
        return cls(tz, n >> tz)

    def log2_floor(self) -> int:
        return self.exp + self.mult.bit_length() - 1

    def expand(self) -> int:
        if self.exp > MATERIALIZE_LIMIT:
            raise OverflowError(f"2**{self.exp} is too large to materialise")
        return self.mult << self.exp

    def __mul__(self, other: "Pow2") -> "Pow2":
        return Pow2(self.exp + other.exp, self.mult * other.mult)

    def _cmp(self, other: "Pow2") -> int:
        if not isinstance(other, Pow2):
            other = Pow2.of(other)
        lo = min(self.exp, other.exp)
        la, lb = self.log2_floor(), other.log2_floor()
        if la != lb:
            return -1 if la < lb else 1
        # same magnitude, so the shifted values are small enough to compare
        a = self.mult << (self.exp - lo)
        b = other.mult << (other.exp - lo)
        return (a > b) - (a < b)

    def __eq__(self, other) -> bool:
        return self._cmp(other) == 0

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __hash__(self) -> int:
        tz = (self.mult & -self.mult).bit_length() - 1
        return hash((self.exp + tz, self.mult >> tz))

    def decimal_digits(self) -> int:
        """Number of decimal digits, exact for any exponent."""
        # log10(mult * 2**exp); log10(2) is irrational so enough precision decides the floor
        prec = len(str(self.exp)) + len(str(self.mult)) + 30
        with decimal.localcontext() as ctx:
            ctx.prec = prec
            val = decimal.Decimal(self.exp) * decimal.Decimal(2).log10() + decimal.Decimal(self.mult).log10()
            digits = int(val) + 1
            frac = val - int(val)
            eps = decimal.Decimal(10) ** -20
            ambiguous = frac < eps or frac > 1 - eps
        if self.exp <= VERIFY_LIMIT:
            n = self.expand()
            while n >= 10**digits:
                digits += 1
            while digits > 1 and n < 10 ** (digits - 1):
                digits -= 1
        elif ambiguous:
            raise ArithmeticError("insufficient precision for digit count")
        return digits

    def describe(self) -> str:
        return f"2^{self.exp}" if self.mult == 1 else f"{self.mult}*2^{self.exp}"


def exp2(x: int) -> Pow2:
    return Pow2(x)


def _positive(name: str, x: int) -> None:
    if x <= 0:
        raise ValueError(f"{name} must be positive, got {x}")


@dataclass
class BoundReport:
    name: str
    inputs: dict
    value: Pow2
    checks: list[dict] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c["holds"] for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "value": self.value.describe(),
            "decimal_digits": self.value.decimal_digits(),
            "checks": self.checks,
            **self.extra,
        }


def check(name: str, lhs, rhs, strict: bool = True) -> dict:
    """Record ``lhs < rhs`` (or ``<=``) with an exact margin where it fits."""
    if isinstance(lhs, Pow2) or isinstance(rhs, Pow2):
        a = lhs if isinstance(lhs, Pow2) else Pow2.of(lhs)
        b = rhs if isinstance(rhs, Pow2) else Pow2.of(rhs)
        holds = a < b if strict else a <= b
        margin = f"log2 gap {b.log2_floor() - a.log2_floor()}"
    else:
        holds = lhs < rhs if strict else lhs <= rhs
        margin = rhs - lhs
    return {"name": name, "lhs": _show(lhs), "rhs": _show(rhs), "strict": strict, "holds": holds, "margin": margin}


def _show(x):
    if isinstance(x, Pow2):
        return x.describe()
    if hasattr(x, "numerator") and getattr(x, "denominator", 1) != 1:
        return f"{x.numerator}/{x.denominator}"
    return int(x) if hasattr(x, "numerator") else x


def genus_threshold(t: int) -> BoundReport:
    """Genus above which an almost normal splitting has the disjoint curve property."""
    _positive("t", t)
    value = exp2((1 << 16) * t * t)
    return BoundReport("genus_threshold", {"t": t}, value)


def fundamental_bounds(n: int) -> BoundReport:
    """Weight bound 2^(14 n) for fundamental surfaces (and -2^(14 n) for chi)."""
    _positive("n", n)
    return BoundReport("fundamental_bounds", {"n": n}, exp2(14 * n))


def derived_triangulation_bounds(t: int) -> BoundReport:
    _positive("t", t)
    tets = 512 * t * t
    bweight = 64 * t * t
    euler_floor = exp2((1 << 14) * t * t)
    # bweight * exp(14 * tets) < exp(2^14 t^2)
    chain_lhs = Pow2.of(bweight) * exp2(14 * tets)
    checks = [
        check("tetrahedra 68t+240t^2 < 2^9 t^2", 68 * t + 240 * t * t, tets),
        check("boundary weight 2(4t+24t^2) < 2^6 t^2", 2 * (4 * t + 24 * t * t), bweight),
        check("2^6 t^2 * exp(14 * 2^9 t^2) < exp(2^14 t^2)", chain_lhs, euler_floor),
    ]
    return BoundReport(
        "derived_triangulation_bounds",
        {"t": t},
        euler_floor,
        checks,
        {"tetrahedra_bound": tets, "boundary_weight_bound": bweight, "chain_lhs": chain_lhs.describe(),
         "chain_lhs_log2": chain_lhs.log2_floor()},
    )


def all_bounds(t: int) -> list[dict]:
    """Rows for the ``bounds`` table."""
    g = genus_threshold(t)
    f = fundamental_bounds(t)
    d = derived_triangulation_bounds(t)
    rows = [
        {"name": "genus threshold exp(2^16 t^2)", "value": g.value.describe(), "digits": g.value.decimal_digits()},
        {"name": "fundamental weight exp(14 t)", "value": f.value.describe(), "digits": f.value.decimal_digits()},
        {"name": "core blocks 6t+1", "value": str(6 * t + 1), "digits": len(str(6 * t + 1))},
        {"name": "block removal complexity +32", "value": "32", "digits": 2},
        {"name": "c(W2) offset 20*32 t", "value": str(640 * t), "digits": len(str(640 * t))},
        {"name": "vertical boundary 104 t", "value": str(104 * t), "digits": len(str(104 * t))},
        {"name": "theta edges/vertices 4t", "value": str(4 * t), "digits": len(str(4 * t))},
        {"name": "beta arcs 4t", "value": str(4 * t), "digits": len(str(4 * t))},
        {"name": "alpha arcs 24 t^2", "value": str(24 * t * t), "digits": len(str(24 * t * t))},
        {"name": "derived tetrahedra 2^9 t^2", "value": str(512 * t * t), "digits": len(str(512 * t * t))},
        {"name": "boundary weight 2^6 t^2", "value": str(64 * t * t), "digits": len(str(64 * t * t))},
        {"name": "Euler floor exp(2^14 t^2)", "value": d.value.describe(), "digits": d.value.decimal_digits()},
        {"name": "Y complexity exp(2^15 t^2)", "value": exp2((1 << 15) * t * t).describe(),
         "digits": exp2((1 << 15) * t * t).decimal_digits()},
    ]
    return rows
