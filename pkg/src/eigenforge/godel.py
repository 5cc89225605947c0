"""Prime-power codec between occupation distributions and positive integers.

A distribution (n_1, n_2, ...) maps to prod_m prime(m)^n_m, with mode 1
paired to the prime 2. The map is a bijection onto the positive integers by
unique factorization; Python ints keep it exact at any size. The definable
set below an energy cutoff is produced by exhaustive bounded enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import DomainError

_ENERGY_SLACK = 1e-12


class _PrimeCache:
    """Growing sieve of Eratosthenes; indexable list of primes."""

    def __init__(self):
        self._primes = [2, 3, 5, 7, 11, 13]
        self._limit = 14

    def _grow(self):
        limit = self._limit * 2
        sieve = bytearray([1]) * (limit + 1)
        sieve[0] = sieve[1] = 0
        for i in range(2, int(math.isqrt(limit)) + 1):
            if sieve[i]:
                sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
        self._primes = [i for i, flag in enumerate(sieve) if flag]
        self._limit = limit

    def nth(self, m: int) -> int:
        """1-based: nth(1) == 2."""
        while m > len(self._primes):
            self._grow()
        return self._primes[m - 1]

    def iter(self) -> Iterator[int]:
        m = 1
        while True:
            yield self.nth(m)
            m += 1


_PRIMES = _PrimeCache()


def nth_prime(m: int) -> int:
    if m < 1:
        raise DomainError("prime index is 1-based")
    return _PRIMES.nth(m)


def _validated(occupations: Sequence[int]) -> tuple[int, ...]:
    out = []
    for n in occupations:
        if int(n) != n or n < 0:
            raise DomainError(f"occupation {n!r} must be a nonnegative integer")
        out.append(int(n))
    if out and out[-1] == 0:
        raise DomainError("occupation sequence must be canonical (no trailing zeros)")
    return tuple(out)


def encode(occupations: Sequence[int]) -> int:
    """prod_m nth_prime(m) ** n_m; the empty (vacuum) sequence encodes to 1."""
    occ = _validated(occupations)
    value = 1
    for m, n in enumerate(occ, start=1):
        if n:
            value *= nth_prime(m) ** n
    return value


def decode(value: int) -> tuple[int, ...]:
    """Exponent vector of the prime factorization, trailing zeros removed.

    Trial division continues through successive primes until the cofactor is
    1, so every positive integer decodes completely.
    """
    if int(value) != value or value < 1:
        raise DomainError("only positive integers decode")
    value = int(value)
    out: list[int] = []
    m = 1
    while value > 1:
        p = nth_prime(m)
        count = 0
        while value % p == 0:
            value //= p
            count += 1
        out.append(count)
        m += 1
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class EnumeratedState:
    occupations: tuple[int, ...]
    godel: int
    energy: float


def mode_energies(omegas: Sequence[float], h: float) -> list[float]:
    if not h > 0:
        raise DomainError("h must be positive")
    energies = []
    for w in omegas:
        if not float(w) > 0:
            raise DomainError(f"frequency {w!r} must be positive")
        energies.append(h * float(w) / (2.0 * math.pi))
    return energies


def enumerate_definable(omegas: Sequence[float], h: float, e_max: float) -> list[EnumeratedState]:
    """All occupation distributions with total energy <= e_max, by depth-first
    bounded enumeration, sorted by their encoded integers.

    The result is finite for any finite cutoff: each mode's occupation is
    bounded by floor(e_max / (h omega_m / 2pi)).
    """
    if e_max < 0:
        raise DomainError("e_max must be nonnegative")
    energies = mode_energies(omegas, h)
    slack = _ENERGY_SLACK * (1.0 + abs(e_max))
    states: list[EnumeratedState] = []
    occ = [0] * len(energies)

    def descend(mode: int, used: float) -> None:
        if mode == len(energies):
            trimmed = list(occ)
            while trimmed and trimmed[-1] == 0:
                trimmed.pop()
            dist = tuple(trimmed)
            states.append(EnumeratedState(dist, encode(dist), used))
            return
        step = energies[mode]
        bound = int((e_max - used + slack) // step)
        for n in range(bound + 1):
            occ[mode] = n
            descend(mode + 1, used + n * step)
        occ[mode] = 0

    descend(0, 0.0)
    states.sort(key=lambda s: s.godel)
    return states


def count_vs_box(box_lengths: Sequence[float], e_max: float, num_modes: int,
                 h: float = 2.0 * math.pi) -> list[tuple[float, int]]:
    """Definable-state counts for a family of box sizes.

    Box modes have frequencies m pi / L for m = 1..num_modes, so larger boxes
    lower every mode energy and the count is non-decreasing in L.
    """
    lengths = [float(L) for L in box_lengths]
    if any(not L > 0 for L in lengths):
        raise DomainError("box lengths must be positive")
    if sorted(lengths) != lengths:
        raise DomainError("box lengths must be ascending")
    if num_modes < 1:
        raise DomainError("need at least one mode")
    out = []
    for L in lengths:
        omegas = [m * math.pi / L for m in range(1, num_modes + 1)]
        out.append((L, len(enumerate_definable(omegas, h, e_max))))
    return out
