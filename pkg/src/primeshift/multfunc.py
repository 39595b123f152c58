"""Multiplicative functions given by prime-power rules, evaluated exactly.

Values are carried as PositiveValue, an exact representation
``rational * exp(rational)`` closed under multiplication.  Purely rational
values (totient and divisor-sum ratios) keep a zero log part; functions
defined through exponentials of valuations keep a unit rational part.
Comparisons between unlike forms are certified by adaptive-precision
decimal evaluation: equality of exp(q) (rational q != 0) with a rational
never occurs, so the refinement loop terminates.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional

from .ntkernel import CofactorStatus, FactoredInteger


class PartialFactorizationError(ValueError):
    """Evaluation attempted on an integer with an unfactored composite part."""


def _exp_bounds(q: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    """Certified rational bounds enclosing exp(q) at roughly prec digits."""
    with decimal.localcontext() as ctx:
        ctx.prec = prec + 10
        x = decimal.Decimal(q.numerator) / decimal.Decimal(q.denominator)
        y = x.exp()
    approx = Fraction(y)
    # x carries <= 1 ulp of quotient error, exp() is correctly rounded; a
    # generous envelope keeps the bound safe without tracking ulps exactly.
    slack = approx * Fraction(10) ** (-(prec - 2)) * (2 + abs(q))
    return approx - slack, approx + slack


def _compare_exp_to_rational(q: Fraction, target: Fraction) -> int:
    """Sign of exp(q) - target for rational q != 0, certified."""
    if target <= 0:
        return 1
    if q > 0 and target <= 1:
        return 1
    if q < 0 and target >= 1:
        return -1
    prec = 30
    while True:
        lo, hi = _exp_bounds(q, prec)
        if lo > target:
            return 1
        if hi < target:
            return -1
        prec *= 2


@dataclass(frozen=True)
class PositiveValue:
    """Exact positive real of the form exact * e**log (both rational)."""

    exact: Fraction = Fraction(1)
    log: Fraction = Fraction(0)

    def __post_init__(self):
        if self.exact <= 0:
            raise ValueError("PositiveValue must be positive")

    @classmethod
    def from_exact(cls, value) -> "PositiveValue":
        return cls(Fraction(value), Fraction(0))

    @classmethod
    def from_log(cls, exponent) -> "PositiveValue":
        return cls(Fraction(1), Fraction(exponent))

    @property
    def is_rational(self) -> bool:
        return self.log == 0

    def __mul__(self, other) -> "PositiveValue":
        if isinstance(other, PositiveValue):
            return PositiveValue(self.exact * other.exact, self.log + other.log)
        return PositiveValue(self.exact * Fraction(other), self.log)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PositiveValue":
        if isinstance(other, PositiveValue):
            return PositiveValue(self.exact / other.exact, self.log - other.log)
        return PositiveValue(self.exact / Fraction(other), self.log)

    def reciprocal(self) -> "PositiveValue":
        return PositiveValue(1 / self.exact, -self.log)

    def pow_int(self, k: int) -> "PositiveValue":
        return PositiveValue(self.exact**k, self.log * k)

    def compare(self, other) -> int:
        """-1, 0 or 1 comparing self against another positive value."""
        if not isinstance(other, PositiveValue):
            other = PositiveValue.from_exact(other)
        if self.log == other.log:
            a, b = self.exact, other.exact
            return (a > b) - (a < b)
        if self.exact == other.exact:
            a, b = self.log, other.log
            return (a > b) - (a < b)
        # self <=> other  reduces to  exp(dq) <=> ratio
        dq = self.log - other.log
        ratio = other.exact / self.exact
        return _compare_exp_to_rational(dq, ratio)

    def __lt__(self, other) -> bool:
        return self.compare(other) < 0

    def __le__(self, other) -> bool:
        return self.compare(other) <= 0

    def __gt__(self, other) -> bool:
        return self.compare(other) > 0

    def __ge__(self, other) -> bool:
        return self.compare(other) >= 0

    def __float__(self) -> float:
        import math

        return float(self.exact) * math.exp(float(self.log))

    def to_decimal(self, digits: int, rounding: str = "round") -> str:
        """Render to `digits` places after the point.

        rounding is "round" (nearest, ties to even) or "trunc".  Rendering
        of values with a nonzero log part refines precision until the
        printed digits are certain.
        """
        if self.log == 0:
            return _format_fraction(self.exact, digits, rounding)
        prec = max(30, digits + 10)
        while True:
            lo, hi = _exp_bounds(self.log, prec)
            lo_s = _format_fraction(self.exact * lo, digits, rounding)
            hi_s = _format_fraction(self.exact * hi, digits, rounding)
            if lo_s == hi_s:
                return lo_s
            prec *= 2

    def __str__(self) -> str:
        if self.log == 0:
            return str(self.exact)
        if self.exact == 1:
            return f"exp({self.log})"
        return f"{self.exact}*exp({self.log})"


ONE = PositiveValue()


def _format_fraction(value: Fraction, digits: int, rounding: str) -> str:
    if digits < 0:
        raise ValueError("digits must be nonnegative")
    n, d = value.numerator, value.denominator
    sign = "-" if n < 0 else ""
    n = abs(n)
    scaled, rem = divmod(n * 10**digits, d)
    if rounding == "round":
        double = 2 * rem
        if double > d or (double == d and scaled % 2 == 1):
            scaled += 1
    elif rounding != "trunc":
        raise ValueError(f"unknown rounding mode {rounding!r}")
    text = str(scaled).rjust(digits + 1, "0")
    if digits == 0:
        return sign + text
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def compare(a: PositiveValue, b: PositiveValue) -> int:
    """Ordering of two positive values: -1 (less), 0 (equal), 1 (greater)."""
    return a.compare(b)


class Divergence(Enum):
    TO_ZERO = "to_zero"
    TO_INFINITY = "to_infinity"


@dataclass(frozen=True)
class MultiplicativeFunction:
    """A positive multiplicative function defined on prime powers.

    prime_power_rule(p, k) must return a PositiveValue for every prime p
    and exponent k >= 1.  divergence records which way the product of the
    values at the primes of the witness set drifts; it cannot be detected
    from finitely many values and must be declared.
    prime_value_increasing asserts that p -> rule(p, 1), read as a formula
    on real arguments >= 2, is nondecreasing (true for all builtins); the
    approximation machinery uses it to jump ahead in the prime stream.
    """

    name: str
    prime_power_rule: Callable[[int, int], PositiveValue]
    divergence: Divergence
    divergence_witness: str = "all primes"
    limit_at_primes_is_one: bool = True
    prime_value_increasing: bool = True

    def value_at_prime(self, p: int) -> PositiveValue:
        return self.prime_power_rule(p, 1)

    def __repr__(self) -> str:
        return f"MultiplicativeFunction({self.name})"


def reciprocal(f: MultiplicativeFunction) -> MultiplicativeFunction:
    """Pointwise inverse, with the divergence direction flipped."""
    flipped = (
        Divergence.TO_INFINITY
        if f.divergence is Divergence.TO_ZERO
        else Divergence.TO_ZERO
    )
    rule = f.prime_power_rule
    return MultiplicativeFunction(
        name=f"1/{f.name}",
        prime_power_rule=lambda p, k: rule(p, k).reciprocal(),
        divergence=flipped,
        divergence_witness=f.divergence_witness,
        limit_at_primes_is_one=f.limit_at_primes_is_one,
        prime_value_increasing=not f.prime_value_increasing,
    )


def _phi_rule(p: int, k: int) -> PositiveValue:
    return PositiveValue.from_exact(Fraction(p - 1, p))


def _sigma_over_n_rule(p: int, k: int) -> PositiveValue:
    return PositiveValue.from_exact(Fraction(p ** (k + 1) - 1, p**k * (p - 1)))


def _n_over_sigma_rule(p: int, k: int) -> PositiveValue:
    return PositiveValue.from_exact(Fraction(p**k * (p - 1), p ** (k + 1) - 1))


def _exp_valuation_rule(p: int, k: int) -> PositiveValue:
    return PositiveValue.from_log(Fraction(k, p))


_BUILTINS: dict[str, MultiplicativeFunction] = {
    "phi_over_n": MultiplicativeFunction(
        "phi_over_n", _phi_rule, Divergence.TO_ZERO
    ),
    "sigma_over_n": MultiplicativeFunction(
        "sigma_over_n", _sigma_over_n_rule, Divergence.TO_INFINITY,
        prime_value_increasing=False,
    ),
    "n_over_sigma": MultiplicativeFunction(
        "n_over_sigma", _n_over_sigma_rule, Divergence.TO_ZERO
    ),
    "exp_valuation": MultiplicativeFunction(
        "exp_valuation", _exp_valuation_rule, Divergence.TO_INFINITY,
        prime_value_increasing=False,
    ),
}


def builtin(name: str) -> MultiplicativeFunction:
    """Look up a builtin multiplicative function by identifier."""
    try:
        return _BUILTINS[name]
    except KeyError:
        available = ", ".join(sorted(_BUILTINS))
        raise ValueError(f"unknown function {name!r}; available: {available}")


def eval_factored(f: MultiplicativeFunction, n: FactoredInteger) -> PositiveValue:
    """Exact f(n) from a factorization; a probable-prime cofactor counts as
    one more prime factor with exponent 1."""
    if n.cofactor_status is CofactorStatus.COMPOSITE_UNFACTORED:
        raise PartialFactorizationError(
            "cannot evaluate multiplicative function on partial factorization"
        )
    result = ONE
    for p, k in n.factors:
        result = result * f.prime_power_rule(p, k)
    if n.cofactor_status is CofactorStatus.PROBABLE_PRIME:
        result = result * f.prime_power_rule(n.cofactor, 1)
    return result


@dataclass(frozen=True)
class FunctionSpec:
    """A multiplicative function together with the power of n scaling it.

    h_power = j means reported values and ratios are those of
    g(n) = f(n) * n**j.  Only the f part enters plan construction; the
    n**j factor tends to 1 in ratios and is applied exactly at reporting
    and acceptance time.
    """

    function: MultiplicativeFunction
    h_power: int = 0


_CLI_FUNCTIONS = {
    "phi": ("phi_over_n", 1),
    "sigma": ("sigma_over_n", 1),
    "phi_over_n": ("phi_over_n", 0),
    "sigma_over_n": ("sigma_over_n", 0),
    "n_over_sigma": ("n_over_sigma", 0),
    "exp_valuation": ("exp_valuation", 0),
}


def resolve_function(name: str, h_power: Optional[int] = None) -> FunctionSpec:
    """Map a user-facing function name to a FunctionSpec.

    "phi" and "sigma" are shorthands for the ratio-normalized builtins with
    h_power 1, so that reported values are plain phi(n) and sigma(n).
    """
    if name not in _CLI_FUNCTIONS:
        available = ", ".join(sorted(_CLI_FUNCTIONS))
        raise ValueError(f"unknown function {name!r}; available: {available}")
    builtin_name, default_h = _CLI_FUNCTIONS[name]
    return FunctionSpec(
        builtin(builtin_name), default_h if h_power is None else h_power
    )
