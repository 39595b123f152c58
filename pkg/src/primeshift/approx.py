"""Constructive approximation of targets in (0,1) by f(w) for squarefree w.

Two mechanisms share one invariant.  greedy_ratio multiplies consecutive
primes from a stream until the partial product first drops to the
threshold, which brackets the result in (C*f(q_last), C].  approx_value
descends the same way but may jump ahead in the prime stream: each step
multiplies by the smallest unused allowed prime that keeps the product
strictly above the floor C - tol, so the crossing step lands inside
(C - tol, C] directly and the prime count stays logarithmic in 1/tol
instead of exponential.  approx_tuple chains approx_value with a growing
exclusion set, which makes the outputs pairwise coprime.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .multfunc import (
    Divergence,
    MultiplicativeFunction,
    ONE,
    PositiveValue,
    reciprocal,
)
from .ntkernel import FactoredInteger, next_prime

DEFAULT_PRIME_CAP = 10**16
DEFAULT_COUNT_CAP = 5000


class StreamExhaustedError(ValueError):
    """A finite prime stream ended before the product reached the threshold."""

    def __init__(self, message: str, partial: PositiveValue):
        super().__init__(message)
        self.partial = partial


class ApproximationCapError(ValueError):
    """The requested tolerance needs primes beyond the configured caps."""


@dataclass(frozen=True)
class GreedyResult:
    """Squarefree w with f(w) bracketed just under a threshold.

    achieved is the value of the descending form of the function (the
    function itself, or its reciprocal when it diverges to infinity) and
    satisfies achieved in (threshold * f(q_last), threshold].
    start_index/end_index delimit the consumed stream positions (1-based);
    for the jumping approximator start_index is 0 and end_index counts the
    primes actually used.
    """

    w: FactoredInteger
    achieved: PositiveValue
    threshold: PositiveValue
    last_prime: int
    start_index: int
    end_index: int

    @property
    def primes(self) -> tuple[int, ...]:
        return self.w.prime_support()


def descending_form(f: MultiplicativeFunction) -> MultiplicativeFunction:
    """f itself when its witness product drains to zero, else 1/f."""
    if f.divergence is Divergence.TO_ZERO:
        return f
    return reciprocal(f)


def _as_value(x) -> PositiveValue:
    return x if isinstance(x, PositiveValue) else PositiveValue.from_exact(x)


def greedy_ratio(
    f: MultiplicativeFunction,
    primes: Iterable[int],
    C,
    start_index: int = 0,
) -> GreedyResult:
    """Multiply stream primes after start_index until the product is <= C.

    Works with the descending form of f, so every stream value is < 1 and
    the partial products tend to zero.  The minimality of the stopping
    index brackets the result: f(w) in (C * f(q_last), C].
    """
    C = _as_value(C)
    fd = descending_form(f)
    product = ONE
    used: list[int] = []
    index = 0
    for index, q in enumerate(primes, start=1):
        if index <= start_index:
            continue
        product = product * fd.value_at_prime(q)
        used.append(q)
        if product.compare(C) <= 0:
            w = FactoredInteger.from_prime_powers([(q, 1) for q in used])
            return GreedyResult(
                w=w,
                achieved=product,
                threshold=C,
                last_prime=q,
                start_index=start_index,
                end_index=index,
            )
    raise StreamExhaustedError(
        f"stream ended at position {index} with product above threshold",
        product,
    )


def _smallest_step_prime(
    fd: MultiplicativeFunction,
    product: PositiveValue,
    floor: PositiveValue,
    used: set[int],
    avoid: frozenset[int],
    prime_cap: int,
) -> int:
    """Smallest unused allowed prime q with product * f(q) > floor."""

    def admits(x: int) -> bool:
        return (product * fd.value_at_prime(x)).compare(floor) > 0

    if fd.prime_value_increasing:
        # The rule read as a formula is monotone, so bisect the crossing
        # point over the integers and walk primes from there.
        lo, hi = 2, prime_cap
        if admits(lo):
            hi = lo
        elif not admits(hi):
            raise ApproximationCapError(
                f"no admissible prime below the cap {prime_cap}"
            )
        while lo < hi:
            mid = (lo + hi) // 2
            if admits(mid):
                hi = mid
            else:
                lo = mid + 1
        q = hi if admits(hi) and _is_prime_cached(hi) else next_prime(hi - 1)
        while q in used or q in avoid:
            q = next_prime(q)
        if q > prime_cap:
            raise ApproximationCapError(f"prime {q} exceeds the cap {prime_cap}")
        return q
    # No monotonicity declared: walk the primes in order.
    q = 1
    while True:
        q = next_prime(q)
        if q > prime_cap:
            raise ApproximationCapError(
                f"no admissible prime below the cap {prime_cap}"
            )
        if q in used or q in avoid:
            continue
        if admits(q):
            return q


def _is_prime_cached(n: int) -> bool:
    from .ntkernel import is_prime

    return is_prime(n).is_prime


def _descend(
    fd: MultiplicativeFunction,
    floor: PositiveValue,
    threshold: PositiveValue,
    avoid: frozenset[int],
    strict_threshold: bool,
    prime_cap: int,
    count_cap: int,
) -> GreedyResult:
    """Core loop: multiply chosen primes, stop on first product under the
    threshold.  Every step keeps the product strictly above the floor."""
    product = ONE
    used: list[int] = []
    used_set: set[int] = set()
    while True:
        if len(used) >= count_cap:
            raise ApproximationCapError(
                f"more than {count_cap} primes needed; the target/tolerance "
                "combination is out of configured reach"
            )
        q = _smallest_step_prime(fd, product, floor, used_set, avoid, prime_cap)
        product = product * fd.value_at_prime(q)
        used.append(q)
        used_set.add(q)
        cmp = product.compare(threshold)
        if cmp < 0 or (cmp == 0 and not strict_threshold):
            w = FactoredInteger.from_prime_powers([(p, 1) for p in sorted(used)])
            return GreedyResult(
                w=w,
                achieved=product,
                threshold=threshold,
                last_prime=q,
                start_index=0,
                end_index=len(used),
            )


def approx_value(
    f: MultiplicativeFunction,
    C,
    avoid: Iterable[int] = (),
    tolerance=Fraction(1, 100),
    prime_cap: int = DEFAULT_PRIME_CAP,
    count_cap: int = DEFAULT_COUNT_CAP,
) -> GreedyResult:
    """Squarefree w avoiding the given primes with |f(w) - C| <= tolerance.

    C must lie in (0,1) and is approached from above; the result lands in
    (C - tolerance, C].  f is replaced by its reciprocal when it diverges
    to infinity, and the returned achieved value refers to that descending
    form.
    """
    C = _as_value(C)
    tolerance = _as_value(tolerance)
    one = PositiveValue.from_exact(1)
    if C.compare(one) >= 0 or C.compare(PositiveValue.from_exact(0)) <= 0:
        raise ValueError("target must lie strictly between 0 and 1")
    fd = descending_form(f)
    floor = PositiveValue(C.exact - tolerance.exact, C.log) if (
        C.log == tolerance.log == 0
    ) else None
    if floor is None or floor.exact <= 0:
        # General case: the floor C - tolerance need not stay positive or
        # rational; clamp at a positive rational below C.
        lo = _subtract_clamped(C, tolerance)
        floor = lo
    return _descend(
        fd, floor, C, frozenset(avoid), strict_threshold=False,
        prime_cap=prime_cap, count_cap=count_cap,
    )


def _subtract_clamped(C: PositiveValue, tolerance: PositiveValue) -> PositiveValue:
    """A positive value equal to C - tolerance, or a tiny floor when that
    difference is not positive (tolerance >= C)."""
    if C.log == 0 and tolerance.log == 0:
        diff = C.exact - tolerance.exact
        if diff > 0:
            return PositiveValue.from_exact(diff)
        return PositiveValue.from_exact(C.exact / 1024)
    # Mixed forms: fall back to a certified rational under-approximation.
    lo_c = Fraction(float(C) * (1 - 1e-9)).limit_denominator(10**15)
    lo_t = Fraction(float(tolerance) * (1 + 1e-9)).limit_denominator(10**15)
    diff = lo_c - lo_t
    if diff <= 0:
        diff = lo_c / 1024
    candidate = PositiveValue.from_exact(diff)
    if candidate.compare(C) >= 0:
        candidate = PositiveValue.from_exact(lo_c / 2)
    return candidate


def approx_interval(
    f: MultiplicativeFunction,
    lower: PositiveValue,
    upper: PositiveValue,
    avoid: Iterable[int] = (),
    prime_cap: int = DEFAULT_PRIME_CAP,
    count_cap: int = DEFAULT_COUNT_CAP,
) -> GreedyResult:
    """Squarefree w avoiding the given primes with f(w) strictly inside
    (lower, upper).  Used by plan construction, where landing on either
    open endpoint would void the final acceptance window."""
    if lower.compare(upper) >= 0:
        raise ValueError("empty interval")
    fd = descending_form(f)
    return _descend(
        fd, lower, upper, frozenset(avoid), strict_threshold=True,
        prime_cap=prime_cap, count_cap=count_cap,
    )


def approx_tuple(
    f: MultiplicativeFunction,
    targets: Sequence,
    avoid: Iterable[int] = (),
    tolerance=Fraction(1, 100),
    prime_cap: int = DEFAULT_PRIME_CAP,
    count_cap: int = DEFAULT_COUNT_CAP,
) -> list[GreedyResult]:
    """Pairwise coprime squarefree w_i with |f(w_i) - C_i| <= tolerance.

    Realized by sequential approx_value calls where the exclusion set grows
    by the primes of the previously chosen w's.
    """
    exclusion = set(avoid)
    results: list[GreedyResult] = []
    for C in targets:
        result = approx_value(
            f, C, exclusion, tolerance, prime_cap=prime_cap, count_cap=count_cap
        )
        results.append(result)
        exclusion.update(result.primes)
    return results
