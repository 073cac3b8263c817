"""JSON problem/solution files and the CSV profile format.

Problem file::

    {"form": "Conserv", "bc": "RLN", "beta": 0.5, "a0": 0.3, "a1": 1.3, "n": 256,
     "f": {"kind": "powersum", "terms": [{"coef": -1.0, "exponent": 0.0, "side": "left"}]}}

``"f": {"kind": "samples", "values": [...]}`` gives uniform samples on [0, 1]
instead.  All writers are deterministic: keys sorted, floats in shortest
round-trip form, LF line endings.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .frac_grid import GridFunction
from .reduction_solvers import Normalization, ResidualReport, Solution
from .special import PowerSum, gamma
from .wellposedness import BcType, EquationForm, ProblemSpec, parse_bc, parse_form

__all__ = [
    "SpecError",
    "dumps",
    "load_spec",
    "parse_spec",
    "profile_csv",
    "solution_from_dict",
    "solution_to_dict",
    "spec_to_dict",
]


class SpecError(ValueError):
    """A problem or solution file could not be interpreted."""


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _profile_to_dict(p) -> dict:
    if isinstance(p, PowerSum):
        return {"kind": "powersum", "terms": p.to_list()}
    return {"kind": "samples", "values": [float(v) for v in p.values]}


def _profile_from_dict(d) -> PowerSum | GridFunction:
    if not isinstance(d, dict) or "kind" not in d:
        raise SpecError("profile must be an object with a 'kind' field")
    try:
        if d["kind"] == "powersum":
            return PowerSum.from_list(d["terms"])
        if d["kind"] == "samples":
            return GridFunction(np.asarray(d["values"], dtype=float))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"bad {d['kind']} profile: {exc}") from exc
    raise SpecError(f"unknown profile kind {d['kind']!r}")


def parse_spec(d: dict) -> ProblemSpec:
    if not isinstance(d, dict):
        raise SpecError("problem spec must be a JSON object")
    missing = [k for k in ("form", "bc", "beta", "f") if k not in d]
    if missing:
        raise SpecError(f"problem spec is missing {', '.join(missing)}")
    try:
        return ProblemSpec(
            form=parse_form(d["form"]),
            bc=parse_bc(d["bc"]),
            beta=float(d["beta"]),
            f=_profile_from_dict(d["f"]),
            a0=float(d.get("a0", 0.0)),
            a1=float(d.get("a1", 0.0)),
            n=int(d.get("n", 256)),
        )
    except SpecError:
        raise
    except (TypeError, ValueError) as exc:
        raise SpecError(str(exc)) from exc


def load_spec(path) -> ProblemSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return parse_spec(json.loads(text))
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def spec_to_dict(spec: ProblemSpec) -> dict:
    return {
        "form": spec.form.value,
        "bc": spec.bc.value,
        "beta": spec.beta.beta,
        "a0": spec.a0,
        "a1": spec.a1,
        "n": spec.n,
        "f": _profile_to_dict(spec.f),
    }


def solution_to_dict(sol: Solution) -> dict:
    return {
        "form": sol.form.value,
        "bc": sol.bc.value,
        "beta": sol.beta,
        "regular_part": _profile_to_dict(sol.regular_part),
        "singular_part": sol.singular_part.to_list(),
        "closed_part": sol.closed_part.to_list(),
        "kernel": sol.kernel,
        "normalization": sol.normalization.value,
        "report": sol.report.to_dict() if sol.report is not None else None,
    }


def solution_from_dict(d: dict) -> Solution:
    try:
        report = d.get("report")
        return Solution(
            form=EquationForm(parse_form(d["form"])),
            bc=BcType(parse_bc(d["bc"])),
            beta=float(d["beta"]),
            regular_part=_profile_from_dict(d["regular_part"]),
            singular_part=PowerSum.from_list(d.get("singular_part", [])),
            kernel=d.get("kernel"),
            normalization=Normalization(d.get("normalization", "None")),
            report=ResidualReport.from_dict(report) if report else None,
            closed_part=PowerSum.from_list(d.get("closed_part", [])),
        )
    except SpecError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"bad solution file: {exc}") from exc


def profile_csv(sol: Solution, samples: int = 201) -> str:
    """CSV of the regular part plus the constant singular-coefficient column.

    ``singular_coef`` is ``C·Γ(1-β)``: the full solution is
    ``u + singular_coef · x^{-β} / Γ(1-β)``.  When it is nonzero the sample
    points skip x = 0.
    """
    if samples < 2:
        raise SpecError("need at least 2 samples")
    c = sol.singular_coefficient
    if c != 0.0:
        x = np.arange(1, samples + 1) / samples
    else:
        x = np.linspace(0.0, 1.0, samples)
    u = np.asarray(sol.regular(x), dtype=float)
    coef = c * gamma(1.0 - sol.beta)
    lines = [
        f"# form={sol.form.value} bc={sol.bc.value} beta={sol.beta!r} "
        f"normalization={sol.normalization.value} "
        "full solution = u + singular_coef * x^-beta / Gamma(1-beta)",
        "x,u,singular_coef",
    ]
    lines += [f"{float(xi)!r},{float(ui)!r},{coef!r}" for xi, ui in zip(x, u)]
    return "\n".join(lines) + "\n"
