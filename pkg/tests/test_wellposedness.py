import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracbvp.errors import CertificateUnavailable
from fracbvp.frac_grid import GridFunction
from fracbvp.special import PowerSum, gamma
from fracbvp.wellposedness import (
    BcType,
    ConstraintKind,
    EquationForm,
    ProblemSpec,
    Status,
    classification_table,
    classify,
    compatibility_residual,
    illposedness_certificate,
    parse_bc,
    parse_form,
    verdict_for,
)

EXPECTED = {
    ("CaputoNonConservative", "ClassicalNeumann"): ("WellPosedUpToConstant", "WeightedPairing"),
    ("CaputoNonConservative", "CaputoNeumann"): ("IllPosedInGeneral", "None"),
    ("CaputoNonConservative", "RiemannLiouvilleNeumann"): ("IllPosedInGeneral", "None"),
    ("ConservativeCaputo", "ClassicalNeumann"): ("IllPosedInGeneral", "None"),
    ("ConservativeCaputo", "CaputoNeumann"): ("WellPosedUpToConstant", "PlainIntegral"),
    ("ConservativeCaputo", "RiemannLiouvilleNeumann"): ("UniqueSolution", "PlainIntegral"),
    ("RiemannLiouville", "ClassicalNeumann"): ("IllPosedInGeneral", "None"),
    ("RiemannLiouville", "CaputoNeumann"): ("UniqueSolution", "PlainIntegral"),
    ("RiemannLiouville", "RiemannLiouvilleNeumann"): ("WellPosedUpToSingularKernel", "PlainIntegral"),
}

M1 = PowerSum.constant(-1.0)


def test_table_matches():
    table = classification_table()
    assert len(table) == 9
    got = {(v.form.value, v.bc.value): (v.status.value, v.constraint_kind.value) for v in table}
    assert got == EXPECTED
    assert sum(v.well_posed for v in table) == 5
    assert sum(v.status is Status.ILL_POSED for v in table) == 4
    assert [v.kernel for v in table].count("C·x^{−β}") == 1
    rr = classify("RL", "RLN")
    assert rr.status is Status.UP_TO_SINGULAR_KERNEL and rr.kernel == "C·x^{−β}"


def test_parsers_accept_aliases():
    assert parse_form("Conserv") is EquationForm.CONSERVATIVE
    assert parse_form("caputo-non-conservative") is EquationForm.CAPUTO
    assert parse_bc("CaputoN") is BcType.CAPUTO
    assert parse_bc("RLN") is BcType.RIEMANN_LIOUVILLE
    assert parse_bc("Classical") is BcType.CLASSICAL
    with pytest.raises(ValueError):
        parse_form("Dirichlet")


def test_weighted_residual_example():
    spec = ProblemSpec("Caputo", "Classical", 0.5, M1, 0.2, 0.2 + 1.0)
    r = compatibility_residual(spec)
    assert r == pytest.approx(-2.0 + gamma(0.5) * 1.0, abs=1e-12)
    zero = spec.replace(a1=0.2 + 1.1283791671)
    assert abs(compatibility_residual(zero)) < 1e-9


def test_plain_residual_example():
    spec = ProblemSpec("Conserv", "CaputoN", 0.5, M1, 0.4, 0.9)
    assert compatibility_residual(spec) == pytest.approx(-0.5)
    assert verdict_for(spec.replace(a1=1.4)).constraint_residual == pytest.approx(0.0, abs=1e-15)


def test_zero_data_zero_residual():
    for v in classification_table():
        if v.constraint_kind is ConstraintKind.NONE:
            continue
        spec = ProblemSpec(v.form, v.bc, 0.3, PowerSum(), 0.0, 0.0)
        assert compatibility_residual(spec) == 0.0


def test_sampled_source_residual():
    spec = ProblemSpec("Caputo", "Classical", 0.5, GridFunction.constant(-1.0, 64), 0.0, 1 / gamma(1.5))
    assert abs(compatibility_residual(spec)) < 1e-9


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 5))
def test_residual_linear(c, a0, a1, scale):
    f = PowerSum.from_pairs([(c, 0.0), (1.0, 1.5)])
    for form, bc in (("Caputo", "Classical"), ("Conserv", "CaputoN")):
        s = ProblemSpec(form, bc, 0.4, f, a0, a1)
        t = ProblemSpec(form, bc, 0.4, f * scale, a0 * scale, a1 * scale)
        assert compatibility_residual(t) == pytest.approx(scale * compatibility_residual(s), abs=1e-12 * (1 + scale) * 10)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_plain_closure(c, a0, a1):
    f = PowerSum.from_pairs([(c, 0.0), (2.0, 0.5)])
    s = ProblemSpec("RL", "CaputoN", 0.4, f, a0, a1)
    shift = a0 - a1 - compatibility_residual(s.replace(a0=0.0, a1=0.0))
    fixed = s.replace(f=f + shift)
    assert compatibility_residual(fixed) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("beta", [0.2, 0.5, 0.8])
def test_conservative_classical_certificate(beta):
    spec = ProblemSpec("Conserv", "Classical", beta, M1, 0.3, 1.0)
    cert = illposedness_certificate(spec)
    assert not cert.special_case
    assert cert.data["obstruction_exponent"] == pytest.approx(beta - 2.0)
    assert cert.data["obstruction_coefficient"] == pytest.approx(0.3 * (beta - 1.0) / gamma(beta), rel=1e-12)
    terms = {round(t["exponent"], 12): t["coef"] for t in cert.data["f_b"]}
    assert terms[round(beta - 1.0, 12)] == pytest.approx(0.7 / gamma(beta), rel=1e-12)
    assert illposedness_certificate(spec.replace(a0=0.0)).special_case


def test_caputo_certificates():
    spec = ProblemSpec("Caputo", "CaputoN", 0.5, M1, 0.0, 0.5)
    cert = illposedness_certificate(spec)
    assert cert.special_case and "a0 = 0" in cert.text
    assert not illposedness_certificate(spec.replace(a0=0.3)).special_case
    rl = illposedness_certificate(ProblemSpec("RL", "Classical", 0.5, M1, 0.3, 0.0))
    assert "du_homogeneous_family" in rl.data


def test_certificate_unavailable():
    with pytest.raises(CertificateUnavailable):
        illposedness_certificate(ProblemSpec("RL", "RLN", 0.5, M1, 0.3, 1.3))


def test_problem_spec_validation():
    with pytest.raises(ValueError):
        ProblemSpec("RL", "RLN", 1.2, M1)
    with pytest.raises(ValueError):
        ProblemSpec("RL", "RLN", 0.5, M1, n=4)
    with pytest.raises(TypeError):
        ProblemSpec("RL", "RLN", 0.5, "x")
    assert not ProblemSpec("RL", "RLN", 0.5, PowerSum.monomial(1.0, 0.5, "right")).is_exact
