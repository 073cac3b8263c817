"""Acceptance criteria, one test each.

Every test prints a single ``PASS criterion N: ...`` or ``FAIL criterion N: ...``
line to the terminal (bypassing capture) and then lets pytest record the
outcome.  Run alone with ``pytest tests/test_acceptance.py``.
"""

import contextlib
import json
import math
import os

import numpy as np
import pytest

from fracbvp.cli import main
from fracbvp.errors import CaputoUndefined, IllPosedProblem, IncompatibleData
from fracbvp.frac_grid import GridFunction, frac_integral_grid, inner_product
from fracbvp.galerkin_fem import assemble, solve_fem
from fracbvp.reduction_solvers import Normalization, solve
from fracbvp.special import PowerSum, frac_derivative_exact, frac_integral_exact, gamma, integrate_unit
from fracbvp.wellposedness import (
    ProblemSpec,
    Status,
    classification_table,
    compatibility_residual,
    illposedness_certificate,
    parse_bc,
    parse_form,
)

M1 = PowerSum.constant(-1.0)
WELL_POSED = [("Caputo", "Classical"), ("Conserv", "CaputoN"), ("Conserv", "RLN"), ("RL", "CaputoN"), ("RL", "RLN")]


@pytest.fixture
def criterion(capsys):
    @contextlib.contextmanager
    def check(number, title):
        try:
            yield
        except BaseException as exc:
            with capsys.disabled():
                print(f"\nFAIL criterion {number}: {title} ({type(exc).__name__}: {exc})")
            raise
        with capsys.disabled():
            print(f"\nPASS criterion {number}: {title}")

    return check


def _admissible(form, bc, beta, f, a0):
    spec = ProblemSpec(form, bc, beta, f, a0, 0.0)
    r = compatibility_residual(spec)
    if bc == "Classical":
        return spec.replace(a1=-r / gamma(1 - beta))
    return spec.replace(a1=-r)


def test_power_rule(criterion):
    with criterion(1, "power rule on 200 random (alpha, mu)"):
        rng = np.random.default_rng(20260101)
        worst = 0.0
        for alpha, mu in zip(rng.uniform(0.0, 1.0, 200), rng.uniform(-0.9, 3.0, 200)):
            alpha = max(alpha, 1e-6)
            (term,) = frac_integral_exact("left", alpha, PowerSum.monomial(1.0, mu)).terms
            expected = gamma(mu + 1.0) / gamma(alpha + mu + 1.0)
            worst = max(worst, abs(term.coef / expected - 1.0))
            # exponents within 1e-12 of an integer are snapped to it
            assert abs(term.exponent - (alpha + mu)) <= 2e-12
        assert worst <= 1e-12, worst


def test_kernel_identities(criterion):
    with criterion(2, "I^b x^-b = Gamma(1-b), RL D^(1-b) x^-b = 0, Caputo undefined (20 b)"):
        for beta in np.linspace(0.04, 0.96, 20):
            kernel = PowerSum.monomial(1.0, -beta)
            (term,) = frac_integral_exact("left", beta, kernel).terms
            assert term.exponent == 0.0
            assert term.coef == pytest.approx(gamma(1.0 - beta), rel=1e-14)
            assert frac_derivative_exact("RiemannLiouville", "left", 1.0 - beta, kernel).is_zero()
            with pytest.raises(CaputoUndefined):
                frac_derivative_exact("Caputo", "left", 1.0 - beta, kernel)


def test_nine_cell_table(criterion):
    with criterion(3, "nine-cell table: 5 well-posed, 4 ill-posed"):
        table = classification_table()
        assert len(table) == 9
        statuses = [v.status for v in table]
        assert statuses.count(Status.UP_TO_SINGULAR_KERNEL) == 1
        assert statuses.count(Status.UNIQUE) == 2
        assert statuses.count(Status.UP_TO_CONSTANT) == 2
        assert statuses.count(Status.ILL_POSED) == 4
        well_posed = {(v.form, v.bc) for v in table if v.well_posed}
        assert well_posed == {(parse_form(f), parse_bc(b)) for f, b in WELL_POSED}
        assert [v.kernel for v in table].count("C·x^{−β}") == 1


def test_closed_forms(criterion):
    with criterion(4, "closed forms for f = -1 and the spot value u(1) = 1.0907665282"):
        a0 = 0.3
        for b in (0.2, 0.5, 0.8):
            g2, g1 = gamma(3 - b), gamma(2 - b)
            caputo = PowerSum.from_pairs([(1 / g2, 2 - b), (a0, 1.0)])
            conserv = PowerSum.from_pairs([(1 / g2, 2 - b), (a0 / g1, 1 - b)])
            # RL/RL: the singular coefficient fixes int I^b u = 0
            c1 = -(a0 / 2 + 1 / 6)
            rl = conserv + PowerSum.monomial(c1 / gamma(1 - b), -b)
            gauge = lambda p: p - integrate_unit(p)
            expected = {
                ("Caputo", "Classical"): (gauge(caputo), a0 + 1 / g1),
                ("Conserv", "CaputoN"): (gauge(conserv), a0 + 1),
                ("Conserv", "RLN"): (conserv, a0 + 1),
                ("RL", "CaputoN"): (conserv, a0 + 1),
                ("RL", "RLN"): (rl, a0 + 1),
            }
            for (form, bc), (ref, a1) in expected.items():
                sol = solve(ProblemSpec(form, bc, b, M1, a0, a1), report=False)
                got = sol.regular_part + sol.singular_part
                assert got.allclose(ref, atol=1e-10), (form, bc, b)
        spot = solve(ProblemSpec("Conserv", "RLN", 0.5, M1, 0.3, 1.3), report=False)
        assert abs(spot(1.0) - 1.0907665282) <= 1e-9


def test_constraint_gating(criterion):
    with criterion(5, "constraint gating with delta = 1e-3 and a1 - a0 = 1/Gamma(2-b)"):
        delta = 1e-3
        for beta in (0.25, 0.5, 0.75):
            for form, bc in WELL_POSED:
                spec = _admissible(form, bc, beta, M1, 0.2)
                solve(spec, report=False)
                with pytest.raises(IncompatibleData) as info:
                    solve(spec.replace(a1=spec.a1 + delta), report=False)
                predicted = gamma(1 - beta) * delta if bc == "Classical" else delta
                assert abs(info.value.residual - predicted) <= 1e-6, (form, bc, beta)
        for beta in np.linspace(0.05, 0.95, 10):
            a1 = _admissible("Caputo", "Classical", beta, M1, 0.4).a1
            assert a1 - 0.4 == pytest.approx(1 / gamma(2 - beta), rel=1e-12)


def test_certificates(criterion):
    with criterion(6, "ill-posed certificates and the a0 = 0 special cases"):
        for beta in (0.2, 0.5, 0.8):
            cert = illposedness_certificate(ProblemSpec("Conserv", "Classical", beta, M1, 0.3, 1.0))
            assert not cert.special_case and cert.data["f_b"]
            with pytest.raises(IllPosedProblem):
                solve(ProblemSpec("Conserv", "Classical", beta, M1, 0.3, 1.0))
            ok = solve(ProblemSpec("Conserv", "Classical", beta, M1, 0.0, 1 / gamma(2 - beta)))
            assert ok.report.interior_residual_sup <= 1e-10
            for form, bc in (("Caputo", "CaputoN"), ("Caputo", "RLN"), ("RL", "Classical")):
                for a0 in (0.3, -1.0, 1e-3):
                    with pytest.raises(IllPosedProblem):
                        solve(ProblemSpec(form, bc, beta, M1, a0, 0.5))


def test_normalizations(criterion):
    with criterion(7, "normalization invariants on 5 random admissible data sets per cell"):
        rng = np.random.default_rng(7)
        for _ in range(5):
            beta = rng.uniform(0.1, 0.9)
            f = PowerSum.from_pairs(list(zip(rng.uniform(-2, 2, 3), rng.uniform(-0.5, 2.5, 3))))
            a0 = rng.uniform(-1, 1)
            for form, bc in WELL_POSED:
                sol = solve(_admissible(form, bc, beta, f, a0), report=False)
                if sol.normalization is Normalization.MEAN_ZERO_U:
                    assert abs(integrate_unit(sol.regular_part)) <= 1e-10
                elif sol.normalization is Normalization.MEAN_ZERO_IBETA_U:
                    total = sol.regular_part + sol.singular_part
                    assert abs(integrate_unit(frac_integral_exact("left", beta, total))) <= 1e-10
                elif (form, bc) == ("RL", "CaputoN"):
                    assert sol.normalization is Normalization.ANCHOR_U0
                    assert abs(float(sol.regular(0.0))) <= 1e-12


def test_grid_convergence(criterion):
    with criterion(8, "grid integral order >= 1.9 on x^2.5; adjoint and semigroup defects shrink"):
        ns = (128, 256, 512, 1024)
        for side in ("left", "right"):
            q = PowerSum.monomial(1.0, 2.5, side)
            errs = []
            for n in ns:
                g = GridFunction.from_function(q, n)
                exact = frac_integral_exact(side, 0.5, q)(g.x)
                errs.append(np.max(np.abs(frac_integral_grid(side, 0.5, g).values - exact)))
            orders = [math.log2(errs[i] / errs[i + 1]) for i in range(3)]
            assert min(orders) >= 1.9, (side, orders)
        adj, semi = [], []
        for n in ns:
            g = GridFunction.from_function(lambda x: np.cos(2 * x) + x, n)
            h = GridFunction.from_function(np.exp, n)
            adj.append(abs(inner_product(frac_integral_grid("left", 0.5, g), h)
                           - inner_product(g, frac_integral_grid("right", 0.5, h))))
            two = frac_integral_grid("left", 0.3, frac_integral_grid("left", 0.4, g))
            semi.append(np.max(np.abs(two.values - frac_integral_grid("left", 0.7, g).values)))
        assert all(b < a for a, b in zip(adj, adj[1:])), adj
        assert all(b < a for a, b in zip(semi, semi[1:])), semi


def test_fem_agreement(criterion):
    with criterion(9, "FEM within 1e-2 at n = 256, monotone gap, coercive on 50 vectors"):
        for a0 in (0.0, 0.3):
            ref = solve(ProblemSpec("Conserv", "CaputoN", 0.5, M1, a0, a0 + 1.0), report=False)
            gaps = {}
            for n in (64, 128, 256, 512):
                u = solve_fem(assemble(0.5, n, M1, a0, a0 + 1.0))
                gaps[n] = float(np.max(np.abs(u.values - ref.regular(u.x))))
            g = list(gaps.values())
            assert gaps[256] <= 1e-2, gaps
            assert all(b < a for a, b in zip(g, g[1:])), gaps
        rng = np.random.default_rng(11)
        n = 256
        B = assemble(0.5, n, M1, 0.0, 1.0).stiffness
        c = np.full(n + 1, 1.0 / n)
        c[[0, -1]] *= 0.5
        for _ in range(50):
            v = rng.normal(size=n + 1)
            v -= (c @ v) / c.sum()
            assert v @ B @ v > 0


def _cli(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_contract(criterion, tmp_path, capsys):
    with criterion(10, "CLI exit codes 0/2/3 with byte-stable outputs"):
        f = {"kind": "powersum", "terms": [{"coef": -1.0, "exponent": 0.0, "side": "left"}]}
        specs = {
            "ok": ({"form": "Conserv", "bc": "RLN", "beta": 0.5, "a0": 0.3, "a1": 1.3, "f": f}, 0),
            "ill": ({"form": "Caputo", "bc": "CaputoN", "beta": 0.5, "a0": 0.3, "a1": 1.3, "f": f}, 2),
            "inc": ({"form": "Conserv", "bc": "CaputoN", "beta": 0.5, "a0": 0.3, "a1": 0.8, "f": f}, 3),
        }
        runs = {}
        for rep in range(2):
            code, out, err = _cli(["table"], capsys)
            assert code == 0 and json.loads(out)["well_posed_count"] == 5
            runs.setdefault("table", []).append(out)
            for name, (doc, expected) in specs.items():
                path = tmp_path / f"{name}.json"
                path.write_text(json.dumps(doc), encoding="utf-8")
                out_dir = tmp_path / f"{name}-{rep}"
                code, out, err = _cli(["solve", "--spec", str(path), "--out", str(out_dir)], capsys)
                assert code == expected, (name, code, err)
                files = {}
                if out_dir.exists():
                    files = {p: (out_dir / p).read_bytes() for p in sorted(os.listdir(out_dir))}
                runs.setdefault(name, []).append((out, err, files))
        for name, (first, second) in runs.items():
            assert first == second, name
        _, err, _ = runs["ill"][0]
        assert json.loads(err)["certificate"] is not None
        _, _, files = runs["ok"][0]
        last = files["solution.csv"].decode().splitlines()[-1].split(",")
        assert float(last[0]) == 1.0 and abs(float(last[1]) - 1.0907665282) <= 1e-9
