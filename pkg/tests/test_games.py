import json

import numpy as np
import pytest

import beliefgames as bg
from beliefgames.games import (
    RESERVED_I,
    RESERVED_J,
    RESERVED_W1,
    RESERVED_W2,
    GameSpec,
    spec_from_document,
    spec_to_document,
)
from helpers import plain_row_sums_ok


def test_big_match_validates_clean(big_match_spec):
    report = bg.validate_game(big_match_spec)
    assert report.ok
    assert plain_row_sums_ok(big_match_spec)


def test_bad_row_sum_named():
    spec = bg.big_match()
    rho = spec.rho.copy()
    rho[0, 1, 0, 0] = 0.9
    broken = GameSpec(spec.k_names, spec.l_names, spec.omega_names, spec.i_names, spec.j_names, rho, spec.g)
    report = bg.validate_game(broken)
    assert not report.ok
    assert any("omega=play" in v and "i=B" in v and "j=L" in v for v in report.violations)


def test_empty_action_set_reported():
    spec = bg.big_match()
    broken = GameSpec(
        spec.k_names, spec.l_names, spec.omega_names, (), spec.j_names,
        np.zeros((3, 0, 2, 3)), np.zeros((1, 1, 3, 0, 2)),
    )
    report = bg.validate_game(broken)
    assert any("empty action set" in v for v in report.violations)


def test_classify_big_match(big_match_spec):
    info = bg.classify_states(big_match_spec)
    # definition re-checked by hand: constant payoff and sure self-loop
    for w in info.absorbing:
        assert np.ptp(big_match_spec.g[:, :, w]) == 0.0
        assert np.all(big_match_spec.rho[w, :, :, w] == 1.0)
    assert set(info.absorbing) == {1, 2}
    assert info.is_absorbing_game
    assert info.omega0 == 0


def test_classify_all_absorbing_not_absorbing_game():
    rho = np.zeros((2, 1, 1, 2))
    rho[0, :, :, 0] = 1.0
    rho[1, :, :, 1] = 1.0
    spec = GameSpec(("k1",), ("l1",), ("a", "b"), ("i1",), ("j1",), rho, np.zeros((1, 1, 2, 1, 1)))
    info = bg.classify_states(spec)
    assert set(info.absorbing) == {0, 1}
    assert not info.is_absorbing_game
    assert info.omega0 is None


def test_classify_single_state_nonconstant_payoff():
    rho = np.ones((1, 2, 1, 1))
    g = np.zeros((1, 1, 1, 2, 1))
    g[0, 0, 0, 0, 0] = 1.0
    spec = GameSpec(("k1",), ("l1",), ("w",), ("i1", "i2"), ("j1",), rho, g)
    info = bg.classify_states(spec)
    assert info.nonabsorbing == (0,)


def test_classify_idempotent_and_deterministic(rng):
    spec = bg.random_absorbing_game(rng)
    a = bg.classify_states(spec)
    b = bg.classify_states(spec)
    assert a == b


def test_augment_counts(big_match_spec):
    aug = bg.augment_safety(big_match_spec)
    assert len(aug.i_names) == 3 and len(aug.j_names) == 3
    assert len(aug.omega_names) == 5
    assert bg.validate_game(aug).ok
    assert aug.i_names[-1] == RESERVED_I and aug.j_names[-1] == RESERVED_J
    assert aug.omega_names[-2:] == (RESERVED_W1, RESERVED_W2)
    info = bg.classify_states(aug)
    assert set(info.absorbing) >= {3, 4}
    # exit transitions as constructed
    w1, w2 = 3, 4
    assert aug.rho[0, 2, 0, w1] == 1.0
    assert aug.rho[0, 0, 2, w2] == 1.0
    assert aug.rho[0, 2, 2, w1] == 0.5 and aug.rho[0, 2, 2, w2] == 0.5
    assert np.all(aug.g[:, :, w1] == -big_match_spec.g_inf)
    assert np.all(aug.g[:, :, w2] == big_match_spec.g_inf)


def test_augment_twice_rejected(big_match_spec):
    aug = bg.augment_safety(big_match_spec)
    with pytest.raises(bg.GameFormatError):
        bg.augment_safety(aug)


def test_augment_preserves_original_dynamics(rng):
    spec = bg.random_absorbing_game(rng)
    aug = bg.augment_safety(spec)
    assert np.array_equal(aug.rho[: spec.n_omega, : spec.n_i, : spec.n_j, : spec.n_omega], spec.rho)
    assert np.array_equal(aug.g[:, :, : spec.n_omega, : spec.n_i, : spec.n_j], spec.g)


def test_augment_value_invariance_single_type(rng):
    spec = bg.random_absorbing_game(rng, n_k=1, n_l=1, min_absorb=0.5)
    aug = bg.augment_safety(spec)
    lam = 0.3
    v0 = bg.discounted_value(spec, [1.0], [1.0], 0, lam, tol=5e-5).value
    v1 = bg.discounted_value(aug, [1.0], [1.0], 0, lam, tol=5e-5).value
    assert abs(v0 - v1) < 1e-4


def test_load_fixture_big_match(fixtures_dir, big_match_spec):
    spec = bg.load_spec(fixtures_dir / "big_match.json")
    assert spec == big_match_spec
    assert len(spec.i_names) == 2 and len(spec.omega_names) == 3


def test_missing_rho_field(tmp_path):
    doc = {"K": ["k"], "L": ["l"], "Omega": ["w"], "I": ["i"], "J": ["j"]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(bg.GameFormatError, match="rho"):
        bg.load_spec(path)


def test_non_stochastic_row_rejected_at_load(tmp_path):
    doc = {
        "K": ["k"], "L": ["l"], "Omega": ["a", "b"], "I": ["i"], "J": ["j"],
        "rho": {"a": {"i": {"j": {"a": 0.5, "b": 0.3}}}},
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(bg.GameFormatError, match="non-stochastic"):
        bg.load_spec(path)


def test_roundtrip_random_specs(tmp_path, rng):
    for t in range(100):
        spec = bg.random_game(
            rng,
            n_k=int(rng.integers(1, 3)),
            n_l=int(rng.integers(1, 3)),
            n_omega=int(rng.integers(1, 4)),
            n_i=int(rng.integers(1, 4)),
            n_j=int(rng.integers(1, 3)),
        )
        path = tmp_path / f"spec{t}.json"
        bg.save_spec(spec, path)
        assert bg.load_spec(path) == spec


def test_document_defaults_selfloop_and_zero_payoff():
    doc = {"K": ["k"], "L": ["l"], "Omega": ["a", "b"], "I": ["i"], "J": ["j"]}
    doc["rho"] = {}
    spec = spec_from_document(doc)
    assert spec.rho[0, 0, 0, 0] == 1.0 and spec.rho[1, 0, 0, 1] == 1.0
    assert np.all(spec.g == 0.0)


def test_fraction_strings_parse():
    doc = {
        "K": ["k"], "L": ["l"], "Omega": ["a"], "I": ["i", "i2"], "J": ["j"],
        "rho": {},
        "g": {"k": {"l": {"a": {"i": {"j": "1/3"}}}}},
    }
    spec = spec_from_document(doc)
    assert spec.g[0, 0, 0, 0, 0] == pytest.approx(1.0 / 3.0, abs=0)


def test_absorbing_rows_exact(rng):
    spec = bg.random_absorbing_game(rng)
    info = bg.classify_states(spec)
    for w in info.absorbing:
        assert np.all(spec.rho[w, :, :, w] == 1.0)


def test_document_roundtrip_is_document_identity(big_match_spec):
    doc = spec_to_document(big_match_spec)
    assert spec_from_document(doc) == big_match_spec
