"""``fracbvp`` command-line interface.

Exit codes: 0 success, 2 ill-posed problem, 3 incompatible data,
4 unreadable or invalid input.  Failures print one JSON object to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IllPosedProblem, IncompatibleData
from .formats import (
    SpecError,
    dumps,
    load_spec,
    profile_csv,
    solution_from_dict,
    solution_to_dict,
    spec_to_dict,
)
from .galerkin_fem import assemble, solve_fem
from .reduction_solvers import residual_report, solve
from .wellposedness import BcType, EquationForm, classification_table, verdict_for

EXIT_OK = 0
EXIT_ILL_POSED = 2
EXIT_INCOMPATIBLE = 3
EXIT_INPUT = 4

COMMANDS = ("classify", "solve", "verify", "convergence", "crosscheck", "table")
DEFAULT_N_LIST = (64, 128, 256, 512)


@dataclass
class RunConfig:
    command: str
    spec_path: Path | None = None
    out_dir: Path | None = None
    n_list: tuple[int, ...] = DEFAULT_N_LIST
    sample_count: int = 201
    solution_path: Path | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise SpecError(f"unknown command {self.command!r}")
        n = tuple(int(v) for v in self.n_list)
        if not n or any(b <= a for a, b in zip(n, n[1:])):
            raise SpecError("--n-list must be strictly increasing")
        if n[0] < 8:
            raise SpecError("--n-list entries must be at least 8")
        self.n_list = n
        if self.sample_count < 2:
            raise SpecError("--samples must be at least 2")
        if self.command != "table" and self.spec_path is None:
            raise SpecError(f"{self.command} needs --spec")
        if self.command == "verify" and self.solution_path is None:
            raise SpecError("verify needs --solution")


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _emit(text: str, cfg: RunConfig, name: str):
    sys.stdout.write(text)
    if cfg.out_dir is not None:
        _write(cfg.out_dir / name, text)


def _cmd_table(cfg: RunConfig) -> int:
    cells = [v.to_dict() for v in classification_table()]
    payload = {"cells": cells, "well_posed_count": sum(c["well_posed"] for c in cells)}
    _emit(dumps(payload), cfg, "table.json")
    return EXIT_OK


def _cmd_classify(cfg: RunConfig) -> int:
    spec = load_spec(cfg.spec_path)
    _emit(dumps(verdict_for(spec).to_dict()), cfg, "verdict.json")
    return EXIT_OK


def _cmd_solve(cfg: RunConfig) -> int:
    spec = load_spec(cfg.spec_path)
    sol = solve(spec)
    out = cfg.out_dir if cfg.out_dir is not None else Path(".")
    _write(out / "solution.csv", profile_csv(sol, cfg.sample_count))
    _write(out / "report.json", dumps(sol.report.to_dict()))
    _write(out / "solution.json", dumps(solution_to_dict(sol)))
    sys.stdout.write(dumps(sol.report.to_dict()))
    return EXIT_OK


def _cmd_verify(cfg: RunConfig) -> int:
    spec = load_spec(cfg.spec_path)
    try:
        raw = json.loads(Path(cfg.solution_path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise SpecError(f"cannot read {cfg.solution_path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"{cfg.solution_path}: invalid JSON ({exc.msg})") from exc
    sol = solution_from_dict(raw)
    report = residual_report(sol, spec).to_dict()
    payload = {"report": report}
    stored = sol.report.to_dict() if sol.report is not None else None
    if stored is not None:
        payload["max_deviation_from_stored"] = _max_deviation(report, stored)
    _emit(dumps(payload), cfg, "verify.json")
    return EXIT_OK


def _flatten(d: dict) -> list[float]:
    out = []
    for v in d.values():
        out.extend(v if isinstance(v, list) else [v])
    return out


def _max_deviation(a: dict, b: dict) -> float:
    dev = 0.0
    for x, y in zip(_flatten(a), _flatten(b)):
        if x == y:
            continue
        dev = max(dev, abs(x - y))
    return dev


def _orders(ns, errs) -> list[float | None]:
    out = []
    for (n0, e0), (n1, e1) in zip(zip(ns, errs), zip(ns[1:], errs[1:])):
        if e0 > 0.0 and e1 > 0.0 and math.isfinite(e0) and math.isfinite(e1):
            out.append(math.log(e0 / e1) / math.log(n1 / n0))
        else:
            out.append(None)
    return out


def _cmd_convergence(cfg: RunConfig) -> int:
    spec = load_spec(cfg.spec_path)
    exact = solve(spec, report=False) if spec.is_exact else None
    levels = []
    for n in cfg.n_list:
        sol = solve(spec.sampled(n))
        level = {"n": n, **sol.report.to_dict()}
        if exact is not None:
            x = sol.regular_part.x
            level["error_sup"] = float(np.max(np.abs(sol.regular_part.values - exact.regular(x))))
            level["singular_coef_error"] = abs(sol.singular_coefficient - exact.singular_coefficient)
        levels.append(level)
    payload = {"spec": spec_to_dict(spec) if spec.is_exact else None, "levels": levels}
    if exact is not None:
        payload["observed_order"] = _orders(cfg.n_list, [lv["error_sup"] for lv in levels])
    _emit(dumps(payload), cfg, "convergence.json")
    return EXIT_OK


def _cmd_crosscheck(cfg: RunConfig) -> int:
    spec = load_spec(cfg.spec_path)
    if spec.cell != (EquationForm.CONSERVATIVE, BcType.CAPUTO):
        raise SpecError("crosscheck is defined for the conservative form with Caputo flux data")
    reference = solve(spec, report=False)
    levels = []
    for n in cfg.n_list:
        if not reference.is_exact:
            reference = solve(spec.sampled(n), report=False)
        uh = solve_fem(assemble(spec.beta, n, spec.f, spec.a0, spec.a1))
        dist = float(np.max(np.abs(uh.values - reference.regular(uh.x))))
        levels.append({"n": n, "distance_sup": dist})
    dists = [lv["distance_sup"] for lv in levels]
    payload = {
        "levels": levels,
        "monotone": all(b < a for a, b in zip(dists, dists[1:])),
        "observed_order": _orders(cfg.n_list, dists),
    }
    _emit(dumps(payload), cfg, "crosscheck.json")
    return EXIT_OK


_HANDLERS = {
    "table": _cmd_table,
    "classify": _cmd_classify,
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "convergence": _cmd_convergence,
    "crosscheck": _cmd_crosscheck,
}


def _fail(code: int, payload: dict) -> int:
    sys.stderr.write(dumps(payload))
    return code


def run(cfg: RunConfig) -> int:
    try:
        return _HANDLERS[cfg.command](cfg)
    except IllPosedProblem as exc:
        cert = exc.certificate.to_dict() if exc.certificate is not None else None
        return _fail(EXIT_ILL_POSED, {"error": "IllPosedProblem", "message": str(exc),
                                      "certificate": cert})
    except IncompatibleData as exc:
        return _fail(EXIT_INCOMPATIBLE, {"error": "IncompatibleData", "message": str(exc),
                                         "residual": exc.residual, "tolerance": exc.tolerance})
    except (SpecError, OSError) as exc:
        return _fail(EXIT_INPUT, {"error": type(exc).__name__, "message": str(exc)})


def _n_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is reserved for ill-posed problems
    def error(self, message):
        self.exit(EXIT_INPUT, dumps({"error": "UsageError", "message": message}))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="fracbvp",
        description="Classify and solve fractional two-point boundary-value problems.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--spec", type=Path, help="problem specification (JSON)")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--n-list", type=_n_list, default=DEFAULT_N_LIST,
                   help="grid sizes for convergence/crosscheck, e.g. 64,128,256")
    p.add_argument("--samples", type=int, default=201, help="rows in the solution CSV")
    p.add_argument("--solution", type=Path, help="solution.json to verify")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.spec, args.out, args.n_list, args.samples,
                        args.solution)
    except SpecError as exc:
        return _fail(EXIT_INPUT, {"error": "SpecError", "message": str(exc)})
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
