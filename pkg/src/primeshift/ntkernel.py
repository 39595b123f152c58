"""Arbitrary-precision number-theoretic primitives.

Primality testing, prime generation, factoring, Chinese remaindering and
p-adic valuations, all on plain Python integers.  Exact rationals are
carried as ``fractions.Fraction`` (re-exported here as ``Rational``).
Everything in this module is a pure function of its inputs and safe to
call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional, Sequence

Rational = Fraction

#: Verdicts of is_prime() are deterministic (proven) strictly below this bound.
DETERMINISTIC_BOUND = 1 << 64

# Bases proving Miller-Rabin correct for all n < 3.317e24 > 2^64
# (Sinclair's seven-base set).
_MR_BASES_64 = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)

_TRIAL_CUTOFF = 1 << 16


class Verdict(Enum):
    PROVEN_PRIME = "proven_prime"
    PROBABLE_PRIME = "probable_prime"
    COMPOSITE = "composite"


class Method(Enum):
    TRIAL_DIVISION = "trial_division"
    DETERMINISTIC_SMALL = "deterministic_small"
    SPRP_PLUS_LUCAS = "strong_probable_prime_plus_lucas"


@dataclass(frozen=True)
class PrimalityResult:
    verdict: Verdict
    method: Method
    witness_info: Optional[str] = None

    @property
    def is_prime(self) -> bool:
        return self.verdict is not Verdict.COMPOSITE


class NonCoprimeModuliError(ValueError):
    """Raised by crt() when two moduli share a common factor."""


def primes_upto(bound: int) -> list[int]:
    """All primes <= bound in ascending order (sieve of Eratosthenes)."""
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(bound) + 1):
        if sieve[p]:
            start = p * p
            sieve[start :: p] = bytearray(len(range(start, bound + 1, p)))
    return [i for i, flag in enumerate(sieve) if flag]


def prime_count(x: int) -> int:
    """pi(x), the number of primes <= x."""
    return len(primes_upto(x))


_small_primes: list[int] = []


def _small_prime_list() -> list[int]:
    global _small_primes
    if not _small_primes:
        _small_primes = primes_upto(_TRIAL_CUTOFF)
    return _small_primes


def _mr_witness(n: int, a: int, d: int, s: int) -> bool:
    """True if a witnesses compositeness of n (n - 1 = d * 2^s, d odd)."""
    a %= n
    if a == 0:
        return False
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def _jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n > 0."""
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _is_square(n: int) -> bool:
    r = math.isqrt(n)
    return r * r == n


def _strong_lucas_prp(n: int) -> bool:
    """Strong Lucas probable-prime test with Selfridge parameters.

    Assumes n odd, n > 2, n not a perfect square, and gcd checks against
    small D values already passed via the Jacobi search below.
    """
    d = 5
    while True:
        j = _jacobi(d % n, n)
        if j == 0:
            # d shares a factor with n; composite unless it *is* n.
            return abs(d) == n
        if j == -1:
            break
        d = -(d + 2) if d > 0 else -(d - 2)
    q = (1 - d) // 4

    k = n + 1
    s = (k & -k).bit_length() - 1
    m = k >> s

    # Lucas sequence with P = 1 by binary ladder over the bits of m.
    u, v, qk = 1, 1, q % n
    for bit in bin(m)[3:]:
        u = u * v % n
        v = (v * v - 2 * qk) % n
        qk = qk * qk % n
        if bit == "1":
            u, v = (u + v), (v + d * u)
            if u & 1:
                u += n
            if v & 1:
                v += n
            u = (u >> 1) % n
            v = (v >> 1) % n
            qk = qk * q % n
    if u == 0 or v == 0:
        return True
    for _ in range(s - 1):
        v = (v * v - 2 * qk) % n
        if v == 0:
            return True
        qk = qk * qk % n
    return False


def is_prime(n: int, extra_rounds: int = 0, rng=None) -> PrimalityResult:
    """Primality verdict for a nonnegative integer.

    Below 2^64 the answer is deterministic (trial division for tiny inputs,
    a fixed proven Miller-Rabin base set otherwise).  At or above 2^64 a
    base-2 strong probable-prime test is combined with a strong Lucas test;
    extra_rounds adds that many random-base Miller-Rabin rounds on top.
    n < 2 (including 0 and 1) reports composite.
    """
    if n < 2:
        return PrimalityResult(Verdict.COMPOSITE, Method.TRIAL_DIVISION, "n < 2")
    if n < _TRIAL_CUTOFF:
        for p in _small_prime_list():
            if p * p > n:
                break
            if n % p == 0:
                if n == p:
                    return PrimalityResult(Verdict.PROVEN_PRIME, Method.TRIAL_DIVISION)
                return PrimalityResult(
                    Verdict.COMPOSITE, Method.TRIAL_DIVISION, f"factor {p}"
                )
        return PrimalityResult(Verdict.PROVEN_PRIME, Method.TRIAL_DIVISION)

    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        if n % p == 0:
            return PrimalityResult(
                Verdict.COMPOSITE, Method.TRIAL_DIVISION, f"factor {p}"
            )

    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s

    if n < DETERMINISTIC_BOUND:
        for a in _MR_BASES_64:
            if _mr_witness(n, a, d, s):
                return PrimalityResult(
                    Verdict.COMPOSITE, Method.DETERMINISTIC_SMALL, f"MR witness {a}"
                )
        return PrimalityResult(Verdict.PROVEN_PRIME, Method.DETERMINISTIC_SMALL)

    if _mr_witness(n, 2, d, s):
        return PrimalityResult(
            Verdict.COMPOSITE, Method.SPRP_PLUS_LUCAS, "MR witness 2"
        )
    if _is_square(n):
        return PrimalityResult(
            Verdict.COMPOSITE, Method.SPRP_PLUS_LUCAS, "perfect square"
        )
    if not _strong_lucas_prp(n):
        return PrimalityResult(
            Verdict.COMPOSITE, Method.SPRP_PLUS_LUCAS, "strong Lucas witness"
        )
    for _ in range(extra_rounds):
        if rng is None:
            import random

            rng = random.Random()
        a = rng.randrange(2, n - 1)
        if _mr_witness(n, a, d, s):
            return PrimalityResult(
                Verdict.COMPOSITE, Method.SPRP_PLUS_LUCAS, f"MR witness {a}"
            )
    return PrimalityResult(Verdict.PROBABLE_PRIME, Method.SPRP_PLUS_LUCAS)


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    if n < 2:
        return 2
    candidate = n + 1
    if candidate % 2 == 0:
        if candidate == 2:
            return 2
        candidate += 1
    while True:
        if is_prime(candidate).is_prime:
            return candidate
        candidate += 2


def prime_stream(start: int = 2, cap: Optional[int] = None) -> Iterator[int]:
    """Yield primes >= start in ascending order, stopping after cap if given.

    Uses sieved segments while the working range stays small enough for the
    cached base primes, then falls back to a next_prime walk.
    """
    segment = 1 << 16
    lo = max(start, 2)
    walk_threshold = _TRIAL_CUTOFF * _TRIAL_CUTOFF
    base = _small_prime_list()
    while lo < walk_threshold:
        hi = min(lo + segment, walk_threshold)
        marks = bytearray([1]) * (hi - lo)
        for p in base:
            if p * p >= hi:
                break
            first = max(p * p, ((lo + p - 1) // p) * p)
            if first < hi:
                marks[first - lo :: p] = bytearray(len(range(first, hi, p)))
        for offset, flag in enumerate(marks):
            if flag:
                value = lo + offset
                if cap is not None and value > cap:
                    return
                yield value
        lo = hi
    p = lo - 1
    while True:
        p = next_prime(p)
        if cap is not None and p > cap:
            return
        yield p


def valuation(n: int, p: int) -> int:
    """Largest y with p^y dividing n (n >= 1, p >= 2)."""
    if n < 1 or p < 2:
        raise ValueError("valuation requires n >= 1 and p >= 2")
    y = 0
    while n % p == 0:
        n //= p
        y += 1
    return y


def crt(congruences: Sequence[tuple[int, int]]) -> tuple[int, int]:
    """Solve a system of congruences with pairwise coprime moduli.

    Returns (solution, combined_modulus) with 0 <= solution < modulus.
    Raises NonCoprimeModuliError naming the offending pair otherwise.
    """
    if not congruences:
        raise ValueError("crt requires at least one congruence")
    for i in range(len(congruences)):
        for j in range(i + 1, len(congruences)):
            g = math.gcd(congruences[i][1], congruences[j][1])
            if g != 1:
                raise NonCoprimeModuliError(
                    f"moduli {congruences[i][1]} and {congruences[j][1]} "
                    f"share factor {g}"
                )
    solution, modulus = 0, 1
    for residue, m in congruences:
        if m < 1:
            raise ValueError(f"modulus {m} must be positive")
        inv = pow(modulus % m, -1, m) if m > 1 else 0
        solution += modulus * ((residue - solution) * inv % m)
        modulus *= m
    solution %= modulus
    for residue, m in congruences:  # self-check: cheap insurance on a hot contract
        assert solution % m == residue % m
    return solution, modulus


class CofactorStatus(Enum):
    UNIT = "unit"
    PROBABLE_PRIME = "probable_prime"
    COMPOSITE_UNFACTORED = "composite_unfactored"


@dataclass(frozen=True)
class FactoringBudget:
    trial_bound: int = 10**6
    rho_iteration_cap: int = 10**8


DEFAULT_BUDGET = FactoringBudget()


@dataclass(frozen=True)
class FactoredInteger:
    """A positive integer carried as its (possibly partial) factorization.

    factors lists (prime, exponent) pairs with strictly increasing primes;
    cofactor is the unfactored remainder (1 when the factorization is
    complete, with cofactor_status recording what is known about it).
    """

    value: int
    factors: tuple[tuple[int, int], ...]
    cofactor: int = 1
    cofactor_status: CofactorStatus = CofactorStatus.UNIT

    def __post_init__(self):
        check = self.cofactor
        last = 1
        for p, k in self.factors:
            if p <= last or k < 1:
                raise ValueError("factors must have ascending primes, exponents >= 1")
            last = p
            check *= p**k
        if check != self.value or self.value < 1:
            raise ValueError(
                f"factorization does not reproduce value {self.value}"
            )
        if self.cofactor == 1 and self.cofactor_status is not CofactorStatus.UNIT:
            raise ValueError("trivial cofactor must carry status unit")
        if self.cofactor > 1 and self.cofactor_status is CofactorStatus.UNIT:
            raise ValueError("nontrivial cofactor cannot carry status unit")

    @classmethod
    def from_prime_powers(
        cls, pairs: Sequence[tuple[int, int]], cofactor: int = 1,
        cofactor_status: CofactorStatus = CofactorStatus.UNIT,
    ) -> "FactoredInteger":
        pairs = tuple(sorted(pairs))
        value = cofactor
        for p, k in pairs:
            value *= p**k
        return cls(value, pairs, cofactor, cofactor_status)

    @property
    def is_fully_factored(self) -> bool:
        return self.cofactor_status is CofactorStatus.UNIT

    @property
    def is_squarefree(self) -> bool:
        return all(k == 1 for _, k in self.factors) and self.cofactor == 1

    def prime_support(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def __str__(self) -> str:
        parts = [f"{p}^{k}" if k > 1 else str(p) for p, k in self.factors]
        if self.cofactor > 1:
            parts.append(f"[{self.cofactor}:{self.cofactor_status.value}]")
        return " * ".join(parts) if parts else "1"


def brent_rho(n: int, iteration_cap: int) -> Optional[int]:
    """Find a nontrivial factor of composite n by Brent's cycle method.

    Deterministic parameter schedule for reproducible runs.  Returns None
    when the iteration budget is exhausted without a split.
    """
    if n % 2 == 0:
        return 2
    spent = 0
    for c in range(1, 64):
        if spent >= iteration_cap:
            return None
        y, r, q = 2, 1, 1
        g = 1
        m = 128
        x = ys = y
        while g == 1 and spent < iteration_cap:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                steps = min(m, r - k)
                for _ in range(steps):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += steps
                spent += steps
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def factor(n: int, budget: FactoringBudget = DEFAULT_BUDGET) -> FactoredInteger:
    """Factor n >= 1 by trial division then Brent's rho within a budget.

    Every piece rho extracts is recursively split until probable-prime.
    Pieces that resist the iteration cap are folded into the cofactor and
    reported honestly as composite_unfactored; nothing is guessed.
    """
    if n < 1:
        raise ValueError("factor requires n >= 1")
    if n == 1:
        return FactoredInteger(1, ())
    counts: dict[int, int] = {}
    remaining = n
    for p in _iter_trial_primes(budget.trial_bound):
        if p * p > remaining:
            break
        while remaining % p == 0:
            counts[p] = counts.get(p, 0) + 1
            remaining //= p
    stack = [remaining] if remaining > 1 else []
    stubborn = 1
    while stack:
        piece = stack.pop()
        if piece == 1:
            continue
        if is_prime(piece).is_prime:
            counts[piece] = counts.get(piece, 0) + 1
            continue
        split = brent_rho(piece, budget.rho_iteration_cap)
        if split is None:
            stubborn *= piece
            continue
        stack.append(split)
        stack.append(piece // split)
    status = (
        CofactorStatus.UNIT if stubborn == 1 else CofactorStatus.COMPOSITE_UNFACTORED
    )
    return FactoredInteger(
        n, tuple(sorted(counts.items())), stubborn, status
    )


def _iter_trial_primes(bound: int) -> Iterator[int]:
    for p in _small_prime_list():
        if p > bound:
            return
        yield p
    if bound > _TRIAL_CUTOFF:
        yield from prime_stream(_TRIAL_CUTOFF + 1, cap=bound)
