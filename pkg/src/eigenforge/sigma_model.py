"""Separable nonlinear field solver.

A field eigenstate factorizes into one eigenfunction per dimension. Each
space factor is obtained from a one-dimensional eigensolve whose coefficients
are the multi-dimensional ones averaged over every *other* dimension's current
factor (the self-consistent freeze-the-rest reduction); a quadratic
self-coupling enters through fourth-moment averages and a degree-capped
projection of the frozen factor's square. The single time dimension is never
solved: its harmonic pair is pinned each sweep so the effective time
eigenvalue matches the summed effective space eigenvalues, which enforces the
eigenvalue-balance (indicial) constraint and fixes the frequency; in the
linear case omega = sqrt(sum lambda_space).

Updates are damped by 0.5 and iterated until the largest factor change drops
below tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import action as action_mod
from .errors import DomainError, NonConvergenceError
from .polynomials import (
    Polynomial,
    chebyshev_fit,
    constant,
    differentiate,
    integrate_product,
)
from .sturm_liouville import (
    BoundaryCondition,
    EigenPair,
    SLProblem,
    _sign_fixed,
    solve as sl_solve,
)

PROJECTION_DEGREE_CAP = 16
PROJECTION_GRID = 65
DAMPING = 0.5


@dataclass(frozen=True)
class DimensionSpec:
    """One coordinate: its interval, weight polynomial, and endpoint conditions."""

    interval: tuple[float, float]
    r: Polynomial
    bc: BoundaryCondition

    def __post_init__(self):
        if self.r.interval != tuple(float(v) for v in self.interval):
            raise DomainError("weight polynomial must live on the dimension's interval")


@dataclass(frozen=True)
class CoeffField:
    """Sum of separable terms plus an optional quadratic self-coupling.

    Each term supplies exactly one polynomial factor per dimension (space
    dimensions first, the time dimension last). ``coupling_g = 0`` makes the
    field specification purely linear.
    """

    terms: tuple[tuple[Polynomial, ...], ...]
    coupling_g: float = 0.0


@dataclass(frozen=True)
class ModeSpec:
    label: str
    targets: tuple[int, ...]


@dataclass(frozen=True)
class SigmaModelSpec:
    space_dims: tuple[DimensionSpec, ...]
    time_dim: DimensionSpec
    P: CoeffField
    Q: CoeffField
    components: int = 2
    modes: tuple[ModeSpec, ...] = ()

    def __post_init__(self):
        if not self.space_dims:
            raise DomainError("need at least one space dimension")
        if self.components < 1:
            raise DomainError("need at least one field component")
        n_dims = len(self.space_dims) + 1
        for name, coeff in (("P", self.P), ("Q", self.Q)):
            for term in coeff.terms:
                if len(term) != n_dims:
                    raise DomainError(
                        f"every {name} term needs one factor per dimension ({n_dims})"
                    )

    @property
    def dimensions(self) -> tuple[DimensionSpec, ...]:
        return self.space_dims + (self.time_dim,)

    @property
    def time_index(self) -> int:
        return len(self.space_dims)


@dataclass(frozen=True)
class SeparableEigenstate:
    """Converged factors of one mode.

    The harmonic pair construction shares the space factors across the field
    components; component ``ell`` couples to time factor ``ell % 2`` (cos-like,
    sin-like). ``space_norms`` records the weighted norm of each space factor
    at build time so downstream consumers can check normalization without the
    model spec.
    """

    label: str
    space_factors: tuple[EigenPair, ...]
    time_factors: tuple[EigenPair, ...]
    omega: float
    amplitude: float
    space_norms: tuple[float, ...]
    components: int

    def factor(self, component: int, dim_index: int) -> EigenPair:
        if dim_index < len(self.space_factors):
            return self.space_factors[dim_index]
        return self.time_factors[component]

    def factor_poly(self, component: int, dim_index: int) -> Polynomial:
        return self.factor(component, dim_index).u

    def lambda_space_sum(self) -> float:
        return sum(p.lambda_ for p in self.space_factors)

    def indicial_residual(self) -> float:
        space = self.components * self.lambda_space_sum()
        time = sum(p.lambda_ for p in self.time_factors)
        return abs(space - time)


@dataclass
class IterationReport:
    iterations: int = 0
    indicial_residuals: list[float] = field(default_factory=list)
    factor_changes: list[float] = field(default_factory=list)
    converged: bool = False


class _Working:
    """Mutable factor table used while iterating; duck-types the state API."""

    def __init__(self, spec: SigmaModelSpec, amplitude: float):
        self.spec = spec
        self.amplitude = amplitude
        self.omega = 1.0
        self.space_polys: list[Polynomial] = []
        self.space_lambdas: list[float] = [0.0] * len(spec.space_dims)
        self.time_polys: list[Polynomial] = []
        self.time_lambdas: list[float] = [0.0] * spec.components

    def factor_poly(self, component: int, dim_index: int) -> Polynomial:
        if dim_index < len(self.space_polys):
            return self.space_polys[dim_index]
        return self.time_polys[component % 2]


def _normalized(u: Polynomial, r: Polynomial) -> Polynomial:
    nrm = integrate_product(r, u, u)
    return _sign_fixed(u * (1.0 / math.sqrt(nrm)))


def _project_square(u: Polynomial) -> Polynomial:
    sq = u * u
    if sq.degree <= PROJECTION_DEGREE_CAP:
        return sq
    return chebyshev_fit(sq.values, PROJECTION_DEGREE_CAP, sq.interval,
                         num_points=PROJECTION_GRID)


def effective_coeffs(spec: SigmaModelSpec, state, dim_index: int,
                     component: int) -> tuple[Polynomial, Polynomial]:
    """Reduce the multi-dimensional coefficient fields onto one dimension.

    For each separable term, the factor on the target dimension stays a
    polynomial and every other factor collapses to its weighted average over
    that dimension's current eigenfunction (a ratio, so unnormalized factors
    are harmless). The quadratic coupling contributes the coupling constant
    times the other dimensions' fourth-to-second moment ratios times the
    degree-capped square of the target factor.
    """
    dims = spec.dimensions
    target = dims[dim_index]
    out = []
    for coeff in (spec.P, spec.Q):
        acc = constant(0.0, target.interval)
        for term in coeff.terms:
            scale = 1.0
            for d, f in enumerate(term):
                if d == dim_index:
                    continue
                u = state.factor_poly(component, d)
                num = integrate_product(f, u, u, dims[d].r)
                den = integrate_product(u, u, dims[d].r)
                scale *= num / den
            acc = acc + term[dim_index] * scale
        if coeff.coupling_g != 0.0:
            g = coeff.coupling_g * state.amplitude ** 2
            for d in range(len(dims)):
                if d == dim_index:
                    continue
                u = state.factor_poly(component, d)
                m4 = integrate_product(u, u, u, u, dims[d].r)
                m2 = integrate_product(u, u, dims[d].r)
                g *= m4 / m2
            acc = acc + _project_square(state.factor_poly(component, dim_index)) * g
        out.append(acc)
    return out[0], out[1]


def _pin_time(spec: SigmaModelSpec, work: _Working, fit_degree: int) -> None:
    """Rebuild the harmonic pair and solve for the frequency that equates the
    effective time eigenvalue with the summed effective space eigenvalues.

    The tau-domain pair polynomials are frequency-free; only the eigenvalue
    bookkeeping carries omega. Solving (omega^2 * kinetic - potential) / mass
    = lambda_sum accounts for the time dimension's own effective potential,
    so the space/time balance survives a nonzero coupling.
    """
    lam_sum = sum(work.space_lambdas)
    pair = action_mod.make_time_pair(1.0, fit_degree)
    r_t = spec.time_dim.r
    work.time_polys = [_normalized(pair.u1, r_t), _normalized(pair.u2, r_t)]
    per_component = []
    omega_sq = 0.0
    for ell in range(spec.components):
        u = work.time_polys[ell % 2]
        p_eff, q_eff = effective_coeffs(spec, work, spec.time_index, ell)
        du = differentiate(u)
        kinetic = integrate_product(p_eff, du, du)
        potential = integrate_product(q_eff, u, u)
        mass = integrate_product(r_t, u, u)
        per_component.append((kinetic, potential, mass))
        omega_sq += (lam_sum * mass + potential) / kinetic
    omega_sq /= spec.components
    if not omega_sq > 0:
        raise DomainError(
            f"pinned frequency squared {omega_sq} must be positive; "
            "the space eigenvalue sum is too low"
        )
    work.omega = math.sqrt(omega_sq)
    for ell, (kinetic, potential, mass) in enumerate(per_component):
        work.time_lambdas[ell] = (omega_sq * kinetic - potential) / mass


def _padded_change(old: Polynomial, new: Polynomial) -> float:
    n = max(len(old.coeffs), len(new.coeffs))
    a = np.zeros(n)
    b = np.zeros(n)
    a[: len(old.coeffs)] = old.coeffs
    b[: len(new.coeffs)] = new.coeffs
    return float(np.linalg.norm(a - b))


def _working_indicial(work: _Working, components: int) -> float:
    space = components * sum(work.space_lambdas)
    return abs(space - sum(work.time_lambdas))


def _space_problem(spec: SigmaModelSpec, work: _Working, d: int) -> SLProblem:
    # Components share the space factors, so their effective coefficients are
    # averaged; for time-independent fields the per-component results agree.
    dims = spec.dimensions
    p_acc = constant(0.0, dims[d].interval)
    q_acc = constant(0.0, dims[d].interval)
    for ell in range(spec.components):
        p_eff, q_eff = effective_coeffs(spec, work, d, ell)
        p_acc = p_acc + p_eff
        q_acc = q_acc + q_eff
    inv = 1.0 / spec.components
    return SLProblem(p_acc * inv, q_acc * inv, dims[d].r, dims[d].bc)


def solve_state(spec: SigmaModelSpec, label: str, target_modes: Sequence[int],
                tol: float = 1e-10, max_iter: int = 100, amplitude: float = 1.0,
                sl_k_tol: float = 1e-12, sl_max_degree: int = 40,
                time_fit_degree: int = 16) -> tuple[SeparableEigenstate, IterationReport]:
    """Alternating solve of one separable eigenstate.

    ``target_modes`` selects the 1-based eigenvalue branch tracked in each
    space dimension. An undamped initialization pass seeds every factor from
    the frozen-coefficient eigensolves; counted sweeps then apply damped
    updates and re-pin the time frequency until the largest factor change is
    below ``tol``. Exceeding ``max_iter`` raises NonConvergenceError with the
    report attached.
    """
    n_space = len(spec.space_dims)
    targets = [int(t) for t in target_modes]
    if len(targets) != n_space:
        raise DomainError(f"need one target mode per space dimension ({n_space})")
    if any(t < 1 for t in targets):
        raise DomainError("target modes are 1-based and must be >= 1")
    if not tol > 0:
        raise DomainError("tol must be positive")

    work = _Working(spec, float(amplitude))
    work.space_polys = [
        _normalized(constant(1.0, dim.interval), dim.r) for dim in spec.space_dims
    ]
    pair0 = action_mod.make_time_pair(1.0, time_fit_degree)
    work.time_polys = [
        _normalized(pair0.u1, spec.time_dim.r),
        _normalized(pair0.u2, spec.time_dim.r),
    ]
    degrees = [0] * n_space

    def solve_dim(d: int) -> tuple[SLProblem, EigenPair]:
        prob = _space_problem(spec, work, d)
        pairs, _ = sl_solve(prob, num_modes=targets[d], k_tol=sl_k_tol,
                            max_degree=sl_max_degree)
        return prob, pairs[targets[d] - 1]

    # Initialization: undamped installs from the placeholder factors.
    for d in range(n_space):
        prob, picked = solve_dim(d)
        work.space_polys[d] = picked.u
        work.space_lambdas[d] = picked.lambda_
        degrees[d] = picked.degree_used
    _pin_time(spec, work, time_fit_degree)

    report = IterationReport()
    prev_time = list(work.time_polys)
    for sweep in range(1, max_iter + 1):
        worst = 0.0
        for d in range(n_space):
            prob, picked = solve_dim(d)
            old = work.space_polys[d]
            blended = old + (picked.u - old) * DAMPING
            blended = _normalized(blended, spec.space_dims[d].r)
            du = differentiate(blended)
            num = (integrate_product(prob.p, du, du)
                   - integrate_product(prob.q, blended, blended))
            den = integrate_product(prob.r, blended, blended)
            work.space_polys[d] = blended
            work.space_lambdas[d] = num / den
            degrees[d] = picked.degree_used
            worst = max(worst, _padded_change(old, blended))
        _pin_time(spec, work, time_fit_degree)
        for old_t, new_t in zip(prev_time, work.time_polys):
            worst = max(worst, _padded_change(old_t, new_t))
        prev_time = list(work.time_polys)
        report.iterations = sweep
        report.factor_changes.append(worst)
        report.indicial_residuals.append(_working_indicial(work, spec.components))
        if worst < tol:
            report.converged = True
            break
    if not report.converged:
        raise NonConvergenceError(
            f"state {label!r} not converged in {max_iter} sweeps", report=report
        )

    space_factors = tuple(
        EigenPair(work.space_lambdas[d], work.space_polys[d], targets[d] - 1, degrees[d])
        for d in range(n_space)
    )
    time_factors = tuple(
        EigenPair(work.time_lambdas[ell], work.time_polys[ell % 2], 0, time_fit_degree)
        for ell in range(spec.components)
    )
    norms = tuple(
        integrate_product(spec.space_dims[d].r, work.space_polys[d], work.space_polys[d])
        for d in range(n_space)
    )
    state = SeparableEigenstate(
        label=label,
        space_factors=space_factors,
        time_factors=time_factors,
        omega=work.omega,
        amplitude=float(amplitude),
        space_norms=norms,
        components=spec.components,
    )
    return state, report


def _bracket_value(spec: SigmaModelSpec, state: SeparableEigenstate,
                   component: int, diff_dim: int) -> float:
    """One bracket of the balance functional: the diff_dim term of one component.

    Independent of the effective-coefficient machinery: every separable term
    (and the coupling) is integrated dimension by dimension, with the time
    dimension carrying the tau = omega*t measure (1/omega per plain integral,
    an extra omega^2 when differentiated).
    """
    dims = spec.dimensions
    time_index = spec.time_index
    omega = state.omega
    amp2 = state.amplitude ** 2
    total = 0.0
    for coeff, is_p in ((spec.P, True), (spec.Q, False)):
        sign = 1.0 if is_p else -1.0
        for term in coeff.terms:
            prod = amp2
            for d, f in enumerate(term):
                u = state.factor_poly(component, d)
                if d == diff_dim:
                    if is_p:
                        du = differentiate(u)
                        val = integrate_product(f, du, du)
                        if d == time_index:
                            val *= omega
                    else:
                        val = integrate_product(f, u, u)
                        if d == time_index:
                            val /= omega
                else:
                    val = integrate_product(f, u, u, dims[d].r)
                    if d == time_index:
                        val /= omega
                prod *= val
            total += sign * prod
        if coeff.coupling_g != 0.0:
            prod = coeff.coupling_g * amp2 * amp2
            for d in range(len(dims)):
                u = state.factor_poly(component, d)
                if d == diff_dim:
                    if is_p:
                        du = differentiate(u)
                        val = integrate_product(u, u, du, du)
                        if d == time_index:
                            val *= omega
                    else:
                        val = integrate_product(u, u, u, u)
                        if d == time_index:
                            val /= omega
                else:
                    val = integrate_product(u, u, u, u, dims[d].r)
                    if d == time_index:
                        val /= omega
                prod *= val
            total += sign * prod
    return total


def null_postulate_residual(spec: SigmaModelSpec, state: SeparableEigenstate) -> float:
    """Relative gap between the space-side and time-side integrals.

    Both sides are evaluated over one irreducible time piece by direct
    separable quadrature, so this is an independent check on the pinned
    frequency, not a restatement of it. A vanished field gives 0 (degenerate:
    both sides are zero).
    """
    space_term = 0.0
    time_term = 0.0
    for ell in range(state.components):
        for d in range(len(spec.space_dims)):
            space_term += _bracket_value(spec, state, ell, d)
        time_term += _bracket_value(spec, state, ell, spec.time_index)
    return abs(space_term - time_term) / (abs(space_term) + 1e-30)


def detuned(state: SeparableEigenstate, factor: float) -> SeparableEigenstate:
    """Copy of the state with its frequency scaled; used to probe the balance."""
    return replace(state, omega=state.omega * factor)
