from fractions import Fraction

import pytest

from thermoorder import (
    BlockState,
    Hamiltonian,
    StochasticWitness,
    apply_witness,
    find_witness,
    gibbs_state,
    identity_witness,
    random_gibbs_stochastic,
    renyi_divergence,
    thermomajorizes,
)
from thermoorder.entropies import nonnegative_alpha_grid

from conftest import (
    gibbs_mixture,
    random_distribution,
    random_hamiltonian,
    random_rational_distribution,
    random_rational_gibbs_ham,
    random_state,
)


def test_identity_fast_path(rng):
    s = random_state(rng, 4)
    w = find_witness(s, s)
    assert w.matrix == identity_witness(4).matrix
    assert apply_witness(w, s.probs) == s.probs


def test_constant_gibbs_fast_path(rng):
    ham = random_hamiltonian(rng, 3)
    s = random_state(rng, 3, ham)
    gamma = gibbs_state(ham)
    w = find_witness(s, gamma)
    for j in range(3):
        col = tuple(w.matrix[i][j] for i in range(3))
        assert col == gamma.probs
    assert apply_witness(w, s.probs) == pytest.approx(gamma.probs, abs=1e-12)


def test_exact_witness_on_rational_pair():
    ham = Hamiltonian.trivial(3)
    p = BlockState((Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)), ham)
    q = BlockState((Fraction(2, 5), Fraction(2, 5), Fraction(1, 5)), ham)
    w = find_witness(p, q)
    assert w is not None and w.exact
    assert w.apply(p.probs) == q.probs
    gamma = gibbs_state(ham).probs
    assert w.apply(gamma) == gamma


def test_witness_verdict_matches_curve_oracle(rng):
    agree = 0
    for _ in range(60):
        n = rng.randint(2, 5)
        ham = random_rational_gibbs_ham(rng, n)
        p = BlockState(random_rational_distribution(rng, n), ham)
        q = BlockState(random_rational_distribution(rng, n), ham)
        feasible = find_witness(p, q) is not None
        above = thermomajorizes(p, q).dominates
        assert feasible == above
        agree += 1
    assert agree == 60


def test_witness_validates_on_float_inputs(rng):
    for _ in range(10):
        n = rng.randint(2, 5)
        a = random_state(rng, n)
        b = gibbs_mixture(a, rng.random())
        w = find_witness(a, b)
        assert w is not None
        gamma = gibbs_state(a.ham).probs
        r = w.residuals(a.probs, b.probs, gamma)
        assert r["map"] < 1e-8
        assert r["gibbs"] < 1e-12


def test_float_lp_path_used_above_exact_limit(rng):
    # 16 levels forces the floating solve; dominating pair stays feasible
    a = random_state(rng, 16)
    b = gibbs_mixture(a, 0.7)
    w = find_witness(a, b)
    assert w is not None
    gamma = gibbs_state(a.ham).probs
    r = w.residuals(a.probs, b.probs, gamma)
    assert r["map"] < 1e-8 and r["gibbs"] < 1e-9


def test_dimension_limit_enforced(rng):
    a = random_state(rng, 5)
    b = random_state(rng, 5, a.ham)
    with pytest.raises(ValueError):
        find_witness(a, b, dimension_limit=4)


def test_witness_requires_common_hamiltonian():
    a = BlockState((0.5, 0.5), Hamiltonian((0.0, 1.0)))
    b = BlockState((0.5, 0.5), Hamiltonian((0.0, 2.0)))
    with pytest.raises(ValueError):
        find_witness(a, b)


def test_apply_dimension_mismatch():
    w = identity_witness(3)
    with pytest.raises(ValueError):
        w.apply((0.5, 0.5))


def test_witness_json_round_trip_exact():
    w = StochasticWitness(((Fraction(3, 4), Fraction(1, 4)), (Fraction(1, 4), Fraction(3, 4))))
    again = StochasticWitness.from_json_obj(w.to_json_obj())
    assert again.matrix == w.matrix


def test_witness_rejects_bad_columns():
    with pytest.raises(ValueError):
        StochasticWitness(((0.5, 0.5), (0.4, 0.5)))
    with pytest.raises(ValueError):
        StochasticWitness(((1.2, 0.0), (-0.2, 1.0)))


def test_random_gibbs_stochastic_weight_zero_is_identity(rng):
    ham = random_hamiltonian(rng, 4)
    w = random_gibbs_stochastic(ham, seed=7, weight=0.0)
    expected = identity_witness(4)
    for i in range(4):
        for j in range(4):
            assert float(w.matrix[i][j]) == float(expected.matrix[i][j])


def test_random_gibbs_stochastic_preserves_gibbs(rng):
    for seed in range(10):
        ham = random_hamiltonian(rng, rng.randint(2, 6))
        w = random_gibbs_stochastic(ham, seed=seed)
        gamma = gibbs_state(ham).probs
        out = w.apply(gamma)
        assert max(abs(a - b) for a, b in zip(out, gamma)) < 1e-12


def test_random_gibbs_stochastic_seeded_reproducible():
    ham = Hamiltonian((0.0, 0.5, 1.5))
    w1 = random_gibbs_stochastic(ham, seed=123)
    w2 = random_gibbs_stochastic(ham, seed=123)
    w3 = random_gibbs_stochastic(ham, seed=124)
    assert w1.matrix == w2.matrix
    assert w1.matrix != w3.matrix


def test_applying_witness_never_raises_divergence(rng):
    # data processing: the divergence to Gibbs cannot grow under these maps
    for seed in range(15):
        n = rng.randint(2, 5)
        ham = random_hamiltonian(rng, n)
        w = random_gibbs_stochastic(ham, seed=seed)
        p = random_distribution(rng, n)
        gamma = gibbs_state(ham).probs
        mp_ = w.apply(p)
        for a in nonnegative_alpha_grid():
            before = renyi_divergence(p, gamma, a)
            after = renyi_divergence(mp_, gamma, a)
            assert after <= before + 1e-9
