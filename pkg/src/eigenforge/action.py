"""Per-piece action integrals, the discrete action lattice, and energy sums.

The irreducible building block is one quarter period of the harmonic pair
(cos, sin) in the scaled time variable tau = omega * t: the largest stretch on
which both components are simultaneously monotone. The action carried by one
piece is amplitude^2 * pi/2; fitting a set of per-mode actions to a common
quantum I is an approximate real gcd, and h is the alias 4*I.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AccuracyError, DomainError, NoLatticeError, PreconditionError
from .polynomials import Polynomial, chebyshev_fit, differentiate, integrate_product

QUARTER_PERIOD = math.pi / 2.0

FORWARD = "forward"
BACKWARD = "backward"

_PAIR_INVARIANT_TOL = 1e-6
_LATTICE_FLOOR_FACTOR = 10.0


@dataclass(frozen=True)
class TimePair:
    """Polynomial cos/sin approximants on one quarter period in tau units.

    Forward orientation satisfies u1' = -u2 and u2' = u1; backward flips both
    signs. Pointwise u1^2 + u2^2 = 1 holds to 1e-6 across the piece.
    """

    u1: Polynomial
    u2: Polynomial
    quarter_period: float
    orientation: str


def _pair_defects(u1: Polynomial, u2: Polynomial, sign: float) -> tuple[float, float, float]:
    xs = np.linspace(0.0, QUARTER_PERIOD, 101)
    d1 = differentiate(u1).values(xs)
    d2 = differentiate(u2).values(xs)
    v1 = u1.values(xs)
    v2 = u2.values(xs)
    e_d1 = float(np.abs(d1 + sign * v2).max())
    e_d2 = float(np.abs(d2 - sign * v1).max())
    e_norm = float(np.abs(v1 * v1 + v2 * v2 - 1.0).max())
    return e_d1, e_d2, e_norm


def make_time_pair(omega: float, poly_degree: int = 12, orientation: str = FORWARD) -> TimePair:
    """Chebyshev-fit cos/sin on [0, pi/2] in tau = omega*t units.

    omega fixes the physical length pi/(2*omega) of the piece in t but does
    not enter the tau-domain polynomials themselves.
    """
    if not omega > 0:
        raise DomainError("omega must be positive")
    if poly_degree < 8:
        raise DomainError("poly_degree must be at least 8")
    if orientation not in (FORWARD, BACKWARD):
        raise DomainError(f"orientation must be {FORWARD!r} or {BACKWARD!r}")
    domain = (0.0, QUARTER_PERIOD)
    u1 = chebyshev_fit(np.cos, poly_degree, domain)
    u2 = chebyshev_fit(np.sin, poly_degree, domain)
    sign = 1.0
    if orientation == BACKWARD:
        u2 = -u2
        sign = -1.0
    e_d1, e_d2, e_norm = _pair_defects(u1, u2, sign)
    if max(e_d1, e_d2, e_norm) > _PAIR_INVARIANT_TOL:
        raise AccuracyError(
            f"degree {poly_degree} cannot meet the pair invariants "
            f"(defects {e_d1:.2e}, {e_d2:.2e}, {e_norm:.2e})"
        )
    return TimePair(u1, u2, QUARTER_PERIOD, orientation)


def pair_action(pair: TimePair) -> float:
    """Integral of u1'^2 + u2'^2 over the quarter piece (pi/2 for exact fits)."""
    d1 = differentiate(pair.u1)
    d2 = differentiate(pair.u2)
    return integrate_product(d1, d1) + integrate_product(d2, d2)


def action_integral(state, pair: TimePair) -> float:
    """Action carried by one irreducible time piece of a separable state.

    Requires the state's space factors to be unit-normalized so the spatial
    integral contributes exactly 1; the result is amplitude^2 times the
    pair's kinetic integral, i.e. A^2 * pi/2 for the exact harmonic pair.
    """
    for norm in state.space_norms:
        if abs(norm - 1.0) > 1e-8:
            raise PreconditionError(f"space factor norm {norm} is not 1 within 1e-8")
    amp = float(state.amplitude)
    if amp == 0.0:
        return 0.0
    return amp * amp * pair_action(pair)


def action_for_state(state, poly_degree: int = 16) -> float:
    """Convenience wrapper: build the pair for the state's frequency first."""
    return action_integral(state, make_time_pair(state.omega, poly_degree))


def _real_gcd(x: float, y: float, tol: float) -> float:
    a, b = max(x, y), min(x, y)
    while b > tol:
        a, b = b, math.fmod(a, b)
    return a


def fit_lattice(alphas: Sequence[float], tol: float = 1e-9) -> tuple[float, list[int]]:
    """Approximate-real-gcd fit of action values to a lattice alpha = n * I.

    Euclidean reduction with termination threshold tol. The fit is rejected
    (NoLatticeError) when any value misses the lattice by more than tol, or
    when the surviving candidate sits within a decade of tol itself, which is
    the signature of incommensurable inputs being ground down to noise.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise DomainError("need at least one action value")
    if any(a <= tol for a in alphas):
        raise DomainError("all action values must exceed the tolerance")
    quantum = alphas[0]
    for a in alphas[1:]:
        quantum = _real_gcd(quantum, a, tol)
    if quantum < _LATTICE_FLOOR_FACTOR * tol:
        raise NoLatticeError(
            f"candidate quantum {quantum:.3e} is indistinguishable from the threshold {tol:.1e}"
        )
    multipliers = [round(a / quantum) for a in alphas]
    residuals = [abs(a - n * quantum) for a, n in zip(alphas, multipliers)]
    worst = max(residuals)
    if worst > tol:
        raise NoLatticeError(f"worst lattice residual {worst:.3e} exceeds {tol:.1e}")
    return quantum, multipliers


def closure_check(alphas: Sequence[float], quantum: float, tol: float = 1e-9,
                  depth: int = 3) -> bool:
    """Closure of the set under sums and absolute differences, to a depth.

    Every generated value (zeros excluded) must sit within tol of an integer
    multiple of the quantum.
    """
    if not quantum > 0:
        raise DomainError("quantum must be positive")
    current = {round(float(a), 12) for a in alphas if abs(a) > tol}
    for _ in range(depth):
        generated = set(current)
        items = sorted(current)
        for i, x in enumerate(items):
            for y in items[i:]:
                s = round(x + y, 12)
                d = round(abs(x - y), 12)
                generated.add(s)
                if d > tol:
                    generated.add(d)
        current = generated
    for value in current:
        if abs(value - round(value / quantum) * quantum) > tol:
            return False
    return True


@dataclass(frozen=True)
class ActionSpectrum:
    """Per-mode actions with the fitted quantum and integer multipliers."""

    labels: tuple[str, ...]
    alphas: tuple[float, ...]
    quantum: float
    multipliers: tuple[int, ...]
    residuals: tuple[float, ...]

    @property
    def h(self) -> float:
        return 4.0 * self.quantum


def fit_spectrum(labels: Sequence[str], alphas: Sequence[float], tol: float = 1e-9) -> ActionSpectrum:
    quantum, multipliers = fit_lattice(alphas, tol)
    residuals = tuple(abs(a - n * quantum) for a, n in zip(alphas, multipliers))
    return ActionSpectrum(tuple(labels), tuple(float(a) for a in alphas),
                          quantum, tuple(multipliers), residuals)


def schrodinger_time_density(pair: TimePair, amplitude: float, h: float,
                             samples: int = 11) -> tuple[list[float], list[float]]:
    """Pointwise comparison of the two time-density forms on the piece.

    Form (a) is A^2 (u1'^2 + u2'^2); form (b) is the h-prefactored current
    (h/4pi) * 2 A^2 (u1 u2' - u2 u1') reduced back to tau units, where the h
    factor cancels. Both are the constant A^2 for the exact forward pair;
    the backward pair flips the sign of (b).
    """
    if not h > 0:
        raise DomainError("h must be positive")
    if samples < 2:
        raise DomainError("need at least two sample points")
    amp2 = float(amplitude) ** 2
    xs = np.linspace(0.0, pair.quarter_period, samples)
    d1 = differentiate(pair.u1).values(xs)
    d2 = differentiate(pair.u2).values(xs)
    v1 = pair.u1.values(xs)
    v2 = pair.u2.values(xs)
    form_a = amp2 * (d1 * d1 + d2 * d2)
    current = (h / (4.0 * math.pi)) * 2.0 * amp2 * (v1 * d2 - v2 * d1)
    form_b = current / (h / (2.0 * math.pi))
    return [float(v) for v in form_a], [float(v) for v in form_b]


@dataclass(frozen=True)
class EnergyLedger:
    """Occupied-mode energy bookkeeping: E_t = sum n_m h omega_m / 2pi."""

    quantum_I: float
    h: float
    omegas: tuple[float, ...]
    occupations: tuple[int, ...]
    total: float


def total_energy(quantum_I: float, omegas: Sequence[float], occupations: Sequence[int]) -> EnergyLedger:
    if not quantum_I > 0:
        raise DomainError("quantum must be positive")
    omegas = tuple(float(w) for w in omegas)
    if any(not w > 0 for w in omegas):
        raise DomainError("all frequencies must be positive")
    occ = []
    for n in occupations:
        if int(n) != n or n < 0:
            raise DomainError(f"occupation {n!r} must be a nonnegative integer")
        occ.append(int(n))
    if len(occ) != len(omegas):
        raise DomainError("occupations and frequencies must align")
    h = 4.0 * quantum_I
    total = sum(n * h * w / (2.0 * math.pi) for n, w in zip(occ, omegas))
    return EnergyLedger(quantum_I, h, omegas, tuple(occ), total)
