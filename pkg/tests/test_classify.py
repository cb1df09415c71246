import json

import numpy as np
import pytest

from trapwalk import classify, coins, walk
from trapwalk.errors import NotTrappingError

from conftest import DRAWERS, draw_type_i, draw_type_iia, hadamard_tensor_coin

QUARTER = np.pi / 4
GROVER_PARAMS = coins.TypeIIaParams(QUARTER, QUARTER, QUARTER, np.pi)


def _phases(spectrum):
    return sorted((complex(l) for l, _ in spectrum), key=lambda z: np.angle(z) % (2 * np.pi))


# -------------------------------------------------------------- point spectrum

def test_grover_point_spectrum():
    spectrum = classify.detect_point_spectrum(coins.grover_coin())
    assert len(spectrum) == 2
    assert all(m == 1 for _, m in spectrum)
    lams = _phases(spectrum)
    assert abs(lams[0] - 1) < 1e-10 and abs(lams[1] + 1) < 1e-10


def test_degenerate_full_rank_point_spectrum():
    c = coins.coin_type_i(coins.TypeIParams(np.pi / 2, 0.0))
    spectrum = classify.detect_point_spectrum(c)
    lams = _phases(spectrum)
    assert len(lams) == 4
    expected = [1, 1j, -1, -1j]
    assert all(abs(l - e) < 1e-10 for l, e in zip(lams, expected))


def test_non_trapping_empty_spectrum():
    assert classify.detect_point_spectrum(hadamard_tensor_coin()) == []


def test_point_spectrum_needs_enough_samples():
    with pytest.raises(ValueError):
        classify.detect_point_spectrum(coins.grover_coin(), n_samples=2)


def test_marginal_flag():
    # comfortably separated clusters are not flagged
    assert not classify.classify_coin(coins.grover_coin()).marginal
    # an absurdly loose clustering tolerance forces the margin inside the
    # ten-tolerance band, which the flag must report
    _, margin = classify._point_spectrum(coins.grover_coin(), 8, 1, tol=0.3)
    assert margin < 10 * 0.3


def test_chiral_pairing(rng):
    for drawer in DRAWERS.values():
        for _ in range(5):
            spectrum = classify.detect_point_spectrum(coins.coin_for(drawer(rng)))
            lams = [l for l, _ in spectrum]
            for lam in lams:
                assert any(abs(lam + other) < 1e-8 for other in lams)


# -------------------------------------------------------------- classification

def test_classify_grover():
    res = classify.classify_coin(coins.grover_coin())
    assert res.trapping and res.family == "TypeIIa"
    assert res.rank_a == 3 and res.escaping_dim == 1
    assert not res.fully_trapped
    assert res.params is not None and res.params.eta == pytest.approx(np.pi)


def test_classify_full_rank_example():
    res = classify.classify_coin(coins.coin_type_i(coins.TypeIParams(np.pi / 3, QUARTER)))
    assert res.family == "TypeI" and res.rank_a == 4 and res.escaping_dim == 0


def test_classify_quasi_1d_variants(rng):
    res = classify.classify_coin(coins.coin_type_iib(coins.TypeIIbParams(variant=1, delta=QUARTER)))
    assert res.family == "TypeIIb" and res.rank_a == 2
    assert res.escaping_dim == 2 and res.variant == 1
    res2 = classify.classify_coin(coins.coin_type_iib(
        coins.TypeIIbParams(variant=2, delta=0.7, phi=1.1, alpha=0.2, beta=0.5, phi_f=2.0)))
    assert res2.family == "TypeIIb" and res2.variant == 2 and res2.escaping_dim == 2


def test_classify_random_draws(rng):
    for family, drawer in DRAWERS.items():
        for _ in range(12):
            res = classify.classify_coin(coins.coin_for(drawer(rng)))
            assert res.family == family
            assert res.rank_a == {"TypeI": 4, "TypeIIa": 3, "TypeIIb": 2}[family]


def test_classify_not_trapping():
    res = classify.classify_coin(hadamard_tensor_coin())
    assert not res.trapping and res.family == "NotTrapping"
    assert res.rank_a is None and res.escaping_dim is None


def test_classify_fully_trapped_cases():
    res = classify.classify_coin(coins.coin_type_i(coins.TypeIParams(np.pi / 2, 0.0)))
    assert res.family == "TypeI" and res.fully_trapped and res.escaping_dim == 0
    res = classify.classify_coin(coins.coin_type_iia(
        coins.TypeIIaParams(0.8, 0.0, 0.0, 2.1, 0.3, 1.1, 2.2, 0.7, 1.9)))
    assert res.family == "TypeIIa" and res.fully_trapped and res.escaping_dim == 0
    res = classify.classify_coin(coins.coin_type_iib(
        coins.TypeIIbParams(variant=1, delta=np.pi / 2, gamma=0.4)))
    assert res.family == "TypeIIb" and res.fully_trapped and res.escaping_dim == 0


def test_classify_direct_sum_degenerate():
    c = coins.coin_type_iib(coins.TypeIIbParams(variant=1, delta=np.pi / 2,
                                                phi=np.pi / 2, gamma=0.2))
    res = classify.classify_coin(c)
    assert res.family == "DirectSumDegenerate"
    assert res.fully_trapped and res.escaping_dim == 0
    assert any(m >= 2 for _, m in res.eigenphases)


def test_classify_global_phase_invariance(rng):
    params = draw_type_iia(rng)
    coin = coins.coin_type_iia(params)
    rotated = np.exp(0.7j) * coin
    res = classify.classify_coin(rotated)
    assert res.family == "TypeIIa"
    lams = [l for l, _ in res.eigenphases]
    assert any(abs(l - np.exp(0.7j)) < 1e-8 for l in lams)


# ------------------------------------------------------------ escaping subspace

def test_grover_escaping_vector():
    basis = classify.escaping_subspace(coins.grover_coin())
    assert basis.shape == (4, 1)
    expected = np.array([1, -1, -1, 1]) / 2.0
    assert abs(abs(np.vdot(expected, basis[:, 0])) - 1.0) < 1e-10


def test_escaping_matches_closed_form(rng):
    for _ in range(8):
        params = draw_type_iia(rng)
        basis = classify.escaping_subspace(coins.coin_type_iia(params))
        assert basis.shape == (4, 1)
        assert abs(abs(np.vdot(coins.escaping_state(params), basis[:, 0])) - 1.0) < 1e-9


def test_full_rank_family_has_no_escaping_state(rng):
    basis = classify.escaping_subspace(coins.coin_type_i(draw_type_i(rng)))
    assert basis.shape == (4, 0)


def test_vertical_escaping_space_variant2():
    c = coins.coin_type_iib(coins.TypeIIbParams(variant=2, delta=0.6, phi_f=0.9))
    basis = classify.escaping_subspace(c)
    assert basis.shape == (4, 2)
    # spanned by |D> and |U>: no L or R component
    assert np.max(np.abs(basis[[0, 3], :])) < 1e-10


def test_escaping_annihilated_by_amplitudes(rng):
    for drawer in DRAWERS.values():
        params = drawer(rng)
        coin = coins.coin_for(params)
        basis = classify.escaping_subspace(coin)
        from trapwalk.laurent import localized_cells
        for lam, _ in classify.detect_point_spectrum(coin):
            for cell in localized_cells(coin, lam):
                a = coins.balance_matrices(cell).a
                if basis.shape[1]:
                    assert np.max(np.abs(basis.conj().T @ a)) < 1e-10


def test_escaping_requires_trapping():
    with pytest.raises(NotTrappingError):
        classify.escaping_subspace(hadamard_tensor_coin())


# ---------------------------------------------------------------- trapped weight

def test_trapped_weight_of_stationary_direction():
    cell, _ = coins.stationary_cell(GROVER_PARAMS)
    xi = cell.local_states()[0, 0]
    state = xi / np.linalg.norm(xi)
    w = classify.trapped_weight(coins.grover_coin(), state)
    assert w > 0.05


def test_trapped_weight_escaping_is_zero():
    esc = np.array([1, -1, -1, 1]) / 2.0
    assert classify.trapped_weight(coins.grover_coin(), esc) < 1e-12


def test_trapped_weight_matches_simulation_grover():
    w = classify.trapped_weight(coins.grover_coin(), np.array([1, 0, 0, 0], dtype=complex))
    state = walk.initial_state(np.array([1, 0, 0, 0], dtype=complex))
    p_origin = np.zeros(501)
    p_origin[0] = 1.0
    worst_drift = 0.0
    for t in range(1, 501):
        state = walk.step(state, coins.grover_coin())
        p_origin[t] = state.origin_probability()
        worst_drift = max(worst_drift, abs(state.total_probability() - 1.0))
    assert worst_drift < 1e-12
    assert abs(w - float(np.mean(p_origin[1:]))) < 5e-2


def test_trapped_weight_global_phase_invariant(rng):
    params = draw_type_i(rng)
    coin = coins.coin_type_i(params)
    state = rng.normal(size=4) + 1j * rng.normal(size=4)
    state /= np.linalg.norm(state)
    w1 = classify.trapped_weight(coin, state)
    w2 = classify.trapped_weight(np.exp(1.3j) * coin, state)
    assert w1 == pytest.approx(w2, abs=1e-9)


def test_trapped_weight_requires_normalized_state():
    with pytest.raises(ValueError):
        classify.trapped_weight(coins.grover_coin(), np.array([1, 1, 0, 0], dtype=complex))


def test_escaping_states_decay(rng):
    # Unique escaping state of a rank-3 coin: its origin average keeps
    # falling with the horizon (the t = 2 revival alone sets the scale).
    params = coins.TypeIIaParams(0.6, QUARTER, QUARTER, np.pi)
    coin = coins.coin_type_iia(params)
    esc = coins.escaping_state(params)
    traj = walk.simulate(coin, walk.initial_state(esc), 400)
    avg100 = float(np.mean(traj.p_origin[1:101]))
    avg400 = float(np.mean(traj.p_origin[1:401]))
    assert avg400 < 1e-3
    assert avg400 < 0.35 * avg100


# ------------------------------------------------------------ parameter recovery

def test_recover_full_rank_roundtrip(rng):
    for _ in range(10):
        params = draw_type_i(rng)
        coin = coins.coin_type_i(params)
        cell, _ = coins.stationary_cell(params)
        recovered = classify.recover_parameters(cell, "TypeI")
        assert recovered.delta1 == pytest.approx(params.delta1, abs=1e-10)
        assert recovered.delta2 == pytest.approx(params.delta2, abs=1e-10)
        rebuilt = coins.coin_type_i(recovered)
        assert np.max(np.abs(rebuilt - coin)) < 1e-9


def test_recover_grover_parameters():
    cell, _ = coins.stationary_cell(GROVER_PARAMS)
    recovered = classify.recover_parameters(cell, "TypeIIa", coin=coins.grover_coin())
    for angle in (recovered.delta1, recovered.delta2, recovered.delta3):
        assert angle == pytest.approx(QUARTER, abs=1e-10)
    assert recovered.eta == pytest.approx(np.pi, abs=1e-10)
    for phase in (recovered.phi_d, recovered.phi_e, recovered.phi_f,
                  recovered.phi_g, recovered.phi_h):
        assert abs(np.exp(1j * phase) - 1) < 1e-10


def test_recover_rank3_roundtrip(rng):
    for _ in range(10):
        params = draw_type_iia(rng)
        coin = coins.coin_type_iia(params)
        cell, _ = coins.stationary_cell(params)
        recovered = classify.recover_parameters(cell, "TypeIIa", coin=coin)
        rebuilt = coins.coin_type_iia(recovered)
        assert np.max(np.abs(rebuilt - coin)) < 1e-9


def test_recover_rejects_mismatched_cell():
    # |a| != |h| and |a| != |f|: violates both magnitude patterns
    bad = coins.AmplitudeCell(0.9, 0.1, 0.3, 0.2, 0.2, 0.4, 0.1, 0.5, norm=1.0)
    with pytest.raises(ValueError):
        classify.recover_parameters(bad, "TypeI")
    with pytest.raises(ValueError):
        classify.recover_parameters(bad, "TypeIIa", coin=coins.grover_coin())


def test_recover_rank3_requires_coin():
    cell, _ = coins.stationary_cell(GROVER_PARAMS)
    with pytest.raises(ValueError):
        classify.recover_parameters(cell, "TypeIIa")


# ------------------------------------------------------------------ round trips

def test_classify_recover_roundtrip_through_json(rng):
    params = draw_type_iia(rng)
    coin = coins.coin_type_iia(params)
    text = coins.coin_to_json(coin)
    res = classify.classify_coin(coins.coin_from_json(text))
    rebuilt = coins.coin_type_iia(res.params)
    assert np.max(np.abs(rebuilt - coin)) < 1e-9


def test_recover_roundtrip_up_to_global_phase(rng):
    # a coin carrying an extra global phase classifies through its rotated
    # point spectrum; the recovered parameters rebuild it up to that phase
    params = draw_type_i(rng)
    coin = np.exp(0.9j) * coins.coin_type_i(params)
    res = classify.classify_coin(coin)
    assert res.family == "TypeI" and res.params is not None
    rebuilt = coins.coin_type_i(res.params)
    phase = coin[np.abs(coin) > 0.1][0] / rebuilt[np.abs(coin) > 0.1][0]
    assert abs(abs(phase) - 1.0) < 1e-9
    assert np.max(np.abs(coin - phase * rebuilt)) < 1e-9


def test_classification_json_schema():
    res = classify.classify_coin(coins.grover_coin())
    doc = json.loads(classify.classification_to_json(res))
    assert doc["trapping"] is True
    assert doc["family"] == "TypeIIa"
    assert doc["rankA"] == 3 and doc["escaping_dim"] == 1
    assert len(doc["eigenphases"]) == 2
    assert doc["params"]["family"] == "TypeIIa"
