"""Admissibility of primality-constraint tuples and residue selection.

A tuple of integers is admissible when its entries never cover all
residue classes modulo any prime; only primes up to the tuple length can
obstruct, since m residues cannot cover more than m classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .ntkernel import primes_upto


class InadmissibleTupleError(ValueError):
    """No residue avoids the tuple modulo the given prime."""


@dataclass(frozen=True)
class AdmissibilityCertificate:
    admissible: bool
    # prime whose residue classes are fully covered, when inadmissible
    obstruction: Optional[int] = None
    # for each prime checked, one residue class the tuple misses
    missing_residues: dict[int, int] = None

    def __bool__(self) -> bool:
        return self.admissible


@dataclass(frozen=True)
class TupleSpec:
    """Shift offsets (alphas) and primality constraints (betas)."""

    alphas: tuple[int, ...]
    betas: tuple[int, ...]
    admissible: bool = True

    def __post_init__(self):
        if not self.alphas or not self.betas:
            raise ValueError("alphas and betas must be nonempty")
        if len(set(self.alphas)) != len(self.alphas):
            raise ValueError("alphas must be distinct")
        if len(set(self.betas)) != len(self.betas):
            raise ValueError("betas must be distinct")
        overlap = set(self.alphas) & set(self.betas)
        if overlap:
            raise ValueError(f"alphas and betas must be disjoint, share {overlap}")
        cert = is_admissible(self.betas)
        object.__setattr__(self, "admissible", cert.admissible)

    @property
    def d(self) -> int:
        return len(self.alphas)

    @property
    def m(self) -> int:
        return len(self.betas)


def is_admissible(betas: Sequence[int]) -> AdmissibilityCertificate:
    """Check that betas miss a residue class modulo every prime <= len(betas).

    Returns a certificate: the obstructing prime on failure, or one missing
    residue per checked prime on success.
    """
    if not betas:
        raise ValueError("betas must be nonempty")
    if len(set(betas)) != len(betas):
        raise ValueError("duplicate entries in tuple")
    missing: dict[int, int] = {}
    for p in primes_upto(len(betas)):
        classes = {b % p for b in betas}
        if len(classes) == p:
            return AdmissibilityCertificate(False, obstruction=p, missing_residues={})
        missing[p] = min(set(range(p)) - classes)
    return AdmissibilityCertificate(True, missing_residues=missing)


def find_nonvanishing_residue(betas: Sequence[int], p: int) -> int:
    """Smallest b in [0, p) with prod(b + beta_i) nonzero mod p.

    Such b exists whenever p exceeds the tuple length or the tuple is
    admissible; otherwise InadmissibleTupleError is raised.
    """
    for b in range(p):
        product = 1
        for beta in betas:
            product = product * (b + beta) % p
        if product % p != 0:
            return b
    raise InadmissibleTupleError(f"tuple covers all residues mod {p}")
