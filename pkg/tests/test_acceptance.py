"""Acceptance criteria, one test and one printed PASS/FAIL line each.

Criteria 1 to 10 read the records of one full default run (n = 1, N = 32,
d = 4, seed 7); criterion 11 repeats the run and compares the bytes.
"""

import pytest

from rieffelkit.verify_cli import SuiteConfig, run_suite, to_jsonl

# criterion number -> (title, [(check name, bound on its residual)])
CRITERIA = {
    1: ("cocycle identity over 1000 triples", [("cocycle_identity", 1e-13)]),
    2: ("symplectic Fourier unitary and involutive, N in 16/32/64", [("fourier_unitary", 1e-12), ("fourier_involutive", 1e-12)]),
    3: (
        "spectral phase law against quadrature of the double integral",
        [
            ("phase_law_exact", 1e-13),
            ("phase_law_quadrature", 1e-6),
            ("brute_product", 1e-6),
            # residual is 10 * fine / coarse, so <= 1 means at least tenfold improvement
            ("phase_law_quadrature_refinement", 1.0),
        ],
    ),
    4: (
        "Weyl calculus consistency",
        [
            ("weyl_homomorphism", 1e-8),
            ("wigner_moyal", 1e-8),
            ("weyl_rank_one", 1e-9),
            ("weyl_hs_unitarity", 1e-10),
            ("wigner_isometry", 1e-10),
            ("strategy_grid_reduced_vs_operator_oracle", 1e-8),
            ("strategy_grid_reduced_vs_brute_quadrature", 1e-8),
            ("strategy_operator_oracle_vs_brute_quadrature", 1e-8),
        ],
    ),
    5: (
        "canonical map is a *-morphism",
        [("m_morphism", 1e-7), ("m_morphism_refinement", 1.0), ("m_involution", 1e-9), ("m_inverse", 1e-11)],
    ),
    6: ("Kohn-Nirenberg bridge", [("c_half_intertwining", 1e-8), ("m_prime_morphism", 1e-7)]),
    7: ("dual action intertwining at 20 shifts", [("dual_action_intertwining", 1e-9)]),
    8: ("functoriality for both morphism families", [("functoriality", 1e-10)]),
    9: ("orthogonality on commutative backends", [("orthogonality", 1e-10)]),
    10: ("Blackadar-Cuntz inequality, k <= 3, 100 pairs", [("blackadar_cuntz", 1e-10)]),
}


@pytest.fixture(scope="session")
def full_report():
    return run_suite(SuiteConfig())


def _announce(number, title, ok, detail):
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    print(line)
    return line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, full_report, capsys):
    title, parts = CRITERIA[number]
    by_check = full_report.by_check()
    details, ok = [], True
    for name, bound in parts:
        records = by_check.get(name, [])
        worst = max((r.residual for r in records if r.residual is not None), default=None)
        good = bool(records) and all(r.residual is not None and r.residual <= bound for r in records)
        ok &= good
        shown = "missing" if worst is None else f"{worst:.2e}"
        details.append(f"{name} {shown} <= {bound:.0e}")
    with capsys.disabled():
        _announce(number, title, ok, "; ".join(details))
    assert ok, "; ".join(details)


def test_criterion_11_determinism(full_report, capsys):
    first = to_jsonl(full_report).encode()
    second = to_jsonl(run_suite(SuiteConfig())).encode()
    ok = first == second and len(first) > 0
    with capsys.disabled():
        _announce(11, "byte-identical JSON-lines for equal seeds", ok, f"{len(first)} bytes")
    assert ok
