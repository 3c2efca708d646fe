import math

import pytest

import qireg


def test_vector_sample_query_norm():
    sv = qireg.SampledVector([3.0, 4.0])
    ledger = qireg.QueryLedger()
    assert sv.sqnorm == pytest.approx(25.0)
    assert sv.norm(ledger) == pytest.approx(5.0)
    assert sv.query(1, ledger) == 4.0

    rng = qireg.Rng(7)
    draws = 20000
    ones = sum(sv.sample(rng, ledger) for _ in range(draws))
    assert ones / draws == pytest.approx(0.64, abs=0.02)
    assert ledger.counts()["sample"] == draws


def test_vector_rejects_bad_input():
    with pytest.raises(ValueError):
        qireg.SampledVector([])
    sv = qireg.SampledVector([0.0, 0.0])
    with pytest.raises(ValueError):
        sv.sample(qireg.Rng(1), qireg.QueryLedger())


def test_matrix_row_sampler_law():
    a = qireg.SampledMatrix([[1.0, 0.0], [0.0, 2.0]])
    assert a.fro_sq == pytest.approx(5.0)
    rng = qireg.Rng(11)
    ledger = qireg.QueryLedger()
    draws = 20000
    row1 = sum(a.sample_row(rng, ledger) for _ in range(draws))
    assert row1 / draws == pytest.approx(0.8, abs=0.02)


def test_oracle_matches_closed_forms():
    rows = [[1.0, 0.0], [0.0, 1.0]]
    assert qireg.solve_exact(rows, [1.0, 2.0], 0.0) == pytest.approx([1.0, 2.0])
    assert qireg.solve_exact(rows, [1.0, 1.0], 1.0) == pytest.approx([0.5, 0.5])
    assert qireg.svd_values([[2.0, 0.0], [0.0, 1.0]]) == pytest.approx([2.0, 1.0])
    assert qireg.xstar_lower_bound(rows, [3.0, 4.0], 0.0) == pytest.approx(5.0)


def test_sketch_size_formula():
    bounds = qireg.SpectralBounds()
    bounds.op_norm_upper = 1.0
    bounds.sigma_lower = 1.0
    bounds.xstar_norm_lower = 1.0
    bounds.fro_norm = 1.0
    assert qireg.choose_s(bounds, 1.0, 1.0, 0.0) == 800

    hp = qireg.derive_hyperparams(bounds, 1.0, 0.0, 1.0)
    assert hp.eta == pytest.approx(1.0 / 32.0)
    assert hp.iterations == 67


def test_end_to_end_solve_beats_the_target():
    # diagonal instance: x* is known in closed form
    rows = [
        [2.0, 0.0, 0.0],
        [0.0, 1.5, 0.0],
        [0.0, 0.0, 1.0],
    ]
    b = [2.0, 3.0, 1.0]
    report = qireg.solve_instance(rows, b, epsilon=0.5, lambda_=0.0, seed=3)
    assert report["relative_error"] <= 0.5
    assert report["sparsity_law_ok"]
    assert report["queries"]["total"] > 0
    assert report["xstar"] == pytest.approx([1.0, 2.0, 1.0], abs=1e-9)


def test_description_queries_and_sampling():
    a = qireg.SampledMatrix([[1.0, 0.0], [0.0, 1.0]])
    desc = qireg.SparseDescription(a, [0, 1], [3.0, 4.0])
    ledger = qireg.QueryLedger()
    assert desc.query(0, ledger) == pytest.approx(3.0)
    assert desc.query(1, ledger) == pytest.approx(4.0)
    assert desc.delta() == pytest.approx(1.0)

    rng = qireg.Rng(5)
    draws = 20000
    ones = sum(desc.sample(rng, ledger) for _ in range(draws))
    assert ones / draws == pytest.approx(0.64, abs=0.02)

    est = desc.estimate_norm(0.15, 0.1, rng, ledger)
    assert abs(est - 5.0) <= 0.15 * 5.0


def test_sparsify_merges_duplicates():
    a = qireg.SampledMatrix([[0.0, 0.0], [3.0, 4.0]])
    indices, values = qireg.sparsify_b(a, [9.0, -2.0], 5, seed=13)
    assert indices == [1]
    assert values == pytest.approx([-2.0])


def test_determinism():
    rows = [[1.0, 0.2], [0.1, 1.0]]
    b = [1.0, -1.0]
    first = qireg.solve_instance(rows, b, epsilon=0.5, seed=99)
    second = qireg.solve_instance(rows, b, epsilon=0.5, seed=99)
    assert first["coefficients"] == second["coefficients"]
    assert first["queries"] == second["queries"]
