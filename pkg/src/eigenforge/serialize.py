"""Deterministic JSON/CSV serialization.

Floats are written with 17 significant digits (round-trip exact for binary64),
dict keys keep insertion order, lines end with LF: identical inputs produce
byte-identical files. Parsing is strict: unknown keys are rejected.
"""

from __future__ import annotations

import json
import math
from typing import Any, Mapping, Sequence

from .action import ActionSpectrum, EnergyLedger
from .errors import DomainError
from .godel import EnumeratedState
from .polynomials import Polynomial
from .sigma_model import (
    CoeffField,
    DimensionSpec,
    IterationReport,
    ModeSpec,
    SeparableEigenstate,
    SigmaModelSpec,
)
from .sturm_liouville import (
    VANISH_DERIVATIVE,
    VANISH_VALUE,
    BoundaryCondition,
    EigenPair,
    RitzTrace,
    SLProblem,
)


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise DomainError(f"cannot serialize non-finite number {x!r}")
    return format(float(x), ".17g")


def dumps(obj: Any, indent: int = 2) -> str:
    """Render with fixed key order and 17-significant-digit floats."""

    def render(node, level):
        pad = " " * (indent * level)
        inner = " " * (indent * (level + 1))
        if node is None:
            return "null"
        if isinstance(node, bool):
            return "true" if node else "false"
        if isinstance(node, int):
            return str(node)
        if isinstance(node, float):
            return format_float(node)
        if isinstance(node, str):
            return json.dumps(node)
        if isinstance(node, (list, tuple)):
            if not node:
                return "[]"
            items = [render(v, level + 1) for v in node]
            if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in node):
                return "[" + ", ".join(items) + "]"
            return "[\n" + ",\n".join(inner + s for s in items) + "\n" + pad + "]"
        if isinstance(node, dict):
            if not node:
                return "{}"
            items = [f"{json.dumps(str(k))}: {render(v, level + 1)}" for k, v in node.items()]
            return "{\n" + ",\n".join(inner + s for s in items) + "\n" + pad + "}"
        raise DomainError(f"cannot serialize {type(node).__name__}")

    return render(obj, 0) + "\n"


def check_keys(mapping: Mapping, required: Sequence[str], optional: Sequence[str] = (),
               context: str = "object") -> None:
    if not isinstance(mapping, Mapping):
        raise DomainError(f"{context} must be a JSON object")
    keys = set(mapping)
    missing = [k for k in required if k not in keys]
    if missing:
        raise DomainError(f"{context} is missing keys {missing}")
    unknown = sorted(keys - set(required) - set(optional))
    if unknown:
        raise DomainError(f"{context} has unknown keys {unknown}")


# -- polynomials -------------------------------------------------------------

def poly_to_obj(p: Polynomial) -> dict:
    return {"coeffs": list(p.coeffs), "interval": list(p.interval)}


def poly_from_obj(obj, context: str = "polynomial") -> Polynomial:
    check_keys(obj, ["coeffs", "interval"], context=context)
    interval = obj["interval"]
    if not (isinstance(interval, Sequence) and len(interval) == 2):
        raise DomainError(f"{context}: interval must be a two-element array")
    return Polynomial(tuple(float(c) for c in obj["coeffs"]),
                      (float(interval[0]), float(interval[1])))


# -- eigenproblems -----------------------------------------------------------

_BC_NAMES = {VANISH_VALUE, VANISH_DERIVATIVE}


def bc_from_obj(obj, context: str = "bc") -> BoundaryCondition:
    check_keys(obj, ["a", "b"], context=context)
    for side in ("a", "b"):
        if obj[side] not in _BC_NAMES:
            raise DomainError(f"{context}.{side} must be one of {sorted(_BC_NAMES)}")
    return BoundaryCondition(obj["a"], obj["b"])


def bc_to_obj(bc: BoundaryCondition) -> dict:
    return {"a": bc.at_a, "b": bc.at_b}


def problem_from_obj(obj) -> SLProblem:
    check_keys(obj, ["p", "q", "r", "bc"], context="problem")
    return SLProblem(
        poly_from_obj(obj["p"], "problem.p"),
        poly_from_obj(obj["q"], "problem.q"),
        poly_from_obj(obj["r"], "problem.r"),
        bc_from_obj(obj["bc"], "problem.bc"),
    )


def problem_to_obj(prob: SLProblem) -> dict:
    return {
        "p": poly_to_obj(prob.p),
        "q": poly_to_obj(prob.q),
        "r": poly_to_obj(prob.r),
        "bc": bc_to_obj(prob.bc),
    }


def solution_to_obj(pairs: Sequence[EigenPair], trace: RitzTrace) -> dict:
    return {
        "modes": [
            {"lambda": p.lambda_, "coeffs": list(p.u.coeffs), "degree": p.degree_used}
            for p in pairs
        ],
        "trace": [[n, lam] for n, lam in trace.entries],
    }


# -- field models ------------------------------------------------------------

def _dimension_from_obj(obj, context: str) -> DimensionSpec:
    check_keys(obj, ["interval", "r", "bc"], context=context)
    interval = (float(obj["interval"][0]), float(obj["interval"][1]))
    return DimensionSpec(interval, poly_from_obj(obj["r"], f"{context}.r"),
                         bc_from_obj(obj["bc"], f"{context}.bc"))


def _dimension_to_obj(dim: DimensionSpec) -> dict:
    return {"interval": list(dim.interval), "r": poly_to_obj(dim.r), "bc": bc_to_obj(dim.bc)}


def _coeff_field_from_obj(obj, context: str) -> CoeffField:
    check_keys(obj, ["terms"], optional=["coupling_g"], context=context)
    terms = tuple(
        tuple(poly_from_obj(f, f"{context}.terms[{i}][{j}]") for j, f in enumerate(term))
        for i, term in enumerate(obj["terms"])
    )
    return CoeffField(terms=terms, coupling_g=float(obj.get("coupling_g", 0.0)))


def _coeff_field_to_obj(field: CoeffField) -> dict:
    return {
        "terms": [[poly_to_obj(f) for f in term] for term in field.terms],
        "coupling_g": field.coupling_g,
    }


def model_from_obj(obj) -> SigmaModelSpec:
    check_keys(obj, ["space_dims", "time_dim", "P", "Q", "modes"],
               optional=["components"], context="model")
    space = tuple(
        _dimension_from_obj(d, f"model.space_dims[{i}]") for i, d in enumerate(obj["space_dims"])
    )
    time = _dimension_from_obj(obj["time_dim"], "model.time_dim")
    modes = []
    for i, m in enumerate(obj["modes"]):
        check_keys(m, ["label", "targets"], context=f"model.modes[{i}]")
        modes.append(ModeSpec(str(m["label"]), tuple(int(t) for t in m["targets"])))
    return SigmaModelSpec(
        space_dims=space,
        time_dim=time,
        P=_coeff_field_from_obj(obj["P"], "model.P"),
        Q=_coeff_field_from_obj(obj["Q"], "model.Q"),
        components=int(obj.get("components", 2)),
        modes=tuple(modes),
    )


def model_to_obj(spec: SigmaModelSpec) -> dict:
    return {
        "space_dims": [_dimension_to_obj(d) for d in spec.space_dims],
        "time_dim": _dimension_to_obj(spec.time_dim),
        "components": spec.components,
        "P": _coeff_field_to_obj(spec.P),
        "Q": _coeff_field_to_obj(spec.Q),
        "modes": [{"label": m.label, "targets": list(m.targets)} for m in spec.modes],
    }


def _factor_to_obj(pair: EigenPair, norm: float | None = None) -> dict:
    out = {
        "lambda": pair.lambda_,
        "coeffs": list(pair.u.coeffs),
        "interval": list(pair.u.interval),
        "degree": pair.degree_used,
    }
    if norm is not None:
        out["norm"] = norm
    return out


def state_to_obj(state: SeparableEigenstate, report: IterationReport,
                 null_residual: float, alpha: float, targets: Sequence[int]) -> dict:
    return {
        "label": state.label,
        "targets": list(targets),
        "omega": state.omega,
        "amplitude": state.amplitude,
        "components": state.components,
        "space_factors": [
            _factor_to_obj(p, norm) for p, norm in zip(state.space_factors, state.space_norms)
        ],
        "time_factors": [_factor_to_obj(p) for p in state.time_factors],
        "indicial_residual": state.indicial_residual(),
        "null_residual": null_residual,
        "action_alpha": alpha,
        "report": {
            "iterations": report.iterations,
            "converged": report.converged,
            "indicial_residuals": list(report.indicial_residuals),
            "factor_changes": list(report.factor_changes),
        },
    }


def spectrum_to_obj(spectrum: ActionSpectrum, closure_ok: bool | None = None) -> dict:
    out = {
        "alphas": [
            {"mode": label, "alpha": alpha}
            for label, alpha in zip(spectrum.labels, spectrum.alphas)
        ],
        "I": spectrum.quantum,
        "multipliers": list(spectrum.multipliers),
        "residuals": list(spectrum.residuals),
        "h": spectrum.h,
    }
    if closure_ok is not None:
        out["closure"] = closure_ok
    return out


def ledger_to_obj(ledger: EnergyLedger) -> dict:
    return {
        "I": ledger.quantum_I,
        "h": ledger.h,
        "omegas": list(ledger.omegas),
        "occupations": list(ledger.occupations),
        "E_t": ledger.total,
    }


# -- CSV ---------------------------------------------------------------------

def enumeration_csv(states: Sequence[EnumeratedState]) -> str:
    lines = ["godel_integer,occupations,energy"]
    for s in states:
        occ = ";".join(str(n) for n in s.occupations)
        lines.append(f"{s.godel},{occ},{format_float(s.energy)}")
    return "\n".join(lines) + "\n"
