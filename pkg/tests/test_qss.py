import json

import numpy as np
import pytest

from models.errors import ConfigError, InvalidInputError, ResourceBoundError
from models.phases import PhasePoint
from models.qss import (
    AttackModel,
    QssConfig,
    all_tables,
    alphabet_is_unbiased,
    context_scenario,
    mutual_information,
    run_protocol,
    simulate_device_independent_attack,
    simulate_pre_phase_attack,
    tv_from_uniform,
    withholding_leakage,
)


def _config(players, alphabet=("0", "1/4"), dim=2, **kwargs):
    return QssConfig.uniform(players, dim, [PhasePoint.parse(dim, p) for p in alphabet], **kwargs)


def test_admissible_vectors():
    cfg = _config(3)
    assert len(cfg.joint_vectors) == 8
    assert cfg.p_max == pytest.approx(1 / 8)
    assert all(sum(v) % 2 == 0 for v in cfg.joint_vectors)
    assert len(_config(2).joint_vectors) == 4


def test_config_checks():
    with pytest.raises(ConfigError):
        _config(0)
    with pytest.raises(ConfigError):
        _config(2, alphabet=("1/4",))
    with pytest.raises(ConfigError):
        _config(2, weights=(1.0, 2.0))
    with pytest.raises(ConfigError):
        _config(2, rounds=0)
    with pytest.raises(ConfigError):
        QssConfig(2, 2, ((PhasePoint.zero(2),),) * 2)


def test_weighted_vectors():
    cfg = _config(2, weights=(5.0, 1.0, 1.0, 1.0))
    assert cfg.p_max == pytest.approx(5 / 8)
    assert cfg.modal_vector == cfg.joint_vectors[0]


def test_config_dict_round_trip():
    cfg = _config(2, seed=11, rounds=50)
    assert QssConfig.from_dict(cfg.to_dict()) == cfg


def test_honest_players_always_decode():
    run = run_protocol(_config(3, rounds=10_000), secret=1)
    assert run.rounds == 10_000
    assert run.accuracy == 1.0
    assert run.summary()["failure_rate"] == 0.0


def test_honest_qutrit_run_decodes():
    cfg = QssConfig.uniform(2, 3, [PhasePoint.zero(3), PhasePoint.parse(3, "1/9,8/9")], rounds=2000)
    assert run_protocol(cfg, secret=2).accuracy == 1.0


def test_ciphertext_hides_secret():
    run = run_protocol(_config(2, rounds=20_000), secret=1)
    assert tv_from_uniform(run.batch.ciphertexts, 2) < 0.05


def test_runs_are_seeded():
    a = run_protocol(_config(2, seed=3, rounds=5000), secret=0)
    b = run_protocol(_config(2, seed=3, rounds=5000), secret=0)
    c = run_protocol(_config(2, seed=4, rounds=5000), secret=0)
    assert np.array_equal(a.batch.outcomes, b.batch.outcomes)
    assert not np.array_equal(a.batch.outcomes, c.batch.outcomes)


def test_transcripts_are_consistent():
    run = run_protocol(_config(2, rounds=20), secret=1)
    lines = [json.loads(t.to_json()) for t in run.transcripts()]
    assert len(lines) == 20
    for line in lines:
        assert line["ciphertext"] == (line["secret"] + line["dealer"]) % 2
        assert (line["dealer"] + sum(line["players"])) % 2 == line["a"]
        assert line["decoded"] == 1


def test_secret_range():
    with pytest.raises(InvalidInputError):
        run_protocol(_config(2), secret=2)


def test_unknown_attack_variant():
    with pytest.raises(InvalidInputError):
        AttackModel("eavesdrop")
    with pytest.raises(InvalidInputError):
        AttackModel("post_phase_deterministic")


def test_withholding_player_learns_nothing():
    report = withholding_leakage(_config(2, rounds=10_000), withheld=1)
    assert report.rounds == 10_000
    assert report.tv_distance < 0.05
    assert report.mutual_information < 0.01
    with pytest.raises(InvalidInputError):
        withholding_leakage(_config(2), withheld=3)


def test_information_measures():
    xs = np.array([0, 1] * 500)
    assert mutual_information(xs, xs, 2) == pytest.approx(1.0)
    assert tv_from_uniform(np.zeros(100, dtype=int), 2) == pytest.approx(0.5)


def test_quarter_alphabet_is_unbiased():
    assert alphabet_is_unbiased(_config(2))
    assert not alphabet_is_unbiased(_config(2, alphabet=("0", "1/2")))


def test_pre_phase_attack_failure_rate():
    report = simulate_pre_phase_attack(_config(3), secret=1, rounds=20_000)
    assert report.formula_applicable
    assert report.expected_failure == pytest.approx(0.4375)
    assert report.failure_rate == pytest.approx(0.4375, abs=0.03)
    assert report.full_knowledge_rate == pytest.approx(1 / 8, abs=0.02)
    assert report.guess_accuracy >= report.full_knowledge_rate


@pytest.mark.slow
def test_pre_phase_attack_failure_rate_long_run():
    report = simulate_pre_phase_attack(_config(3), secret=0, rounds=100_000)
    assert report.failure_rate == pytest.approx(0.4375, abs=0.02)


def test_qutrit_pre_phase_attack_failure_rate():
    cfg = _config(2, alphabet=("0", "1/3,1/3"), dim=3, seed=7)
    assert cfg.p_max == pytest.approx(1 / 2)
    report = simulate_pre_phase_attack(cfg, secret=1, rounds=20_000)
    assert report.formula_applicable
    assert report.expected_failure == pytest.approx(1 / 3)
    assert report.failure_rate == pytest.approx(1 / 3, abs=0.03)


@pytest.mark.slow
def test_qutrit_pre_phase_attack_failure_rate_long_run():
    cfg = _config(2, alphabet=("0", "1/3,1/3"), dim=3, seed=7)
    report = simulate_pre_phase_attack(cfg, secret=1, rounds=100_000)
    assert report.failure_rate == pytest.approx(1 / 3, abs=0.02)


def test_pre_phase_target_must_be_admissible():
    with pytest.raises(InvalidInputError):
        simulate_pre_phase_attack(_config(2), target=(1, 0, 0), rounds=10)


def test_context_scenario_is_mermin():
    scenario = context_scenario(_config(2))
    assert len(scenario.rows) == 4
    assert scenario.num_parties == 3


def test_device_independent_attack_detected():
    report = simulate_device_independent_attack(_config(2))
    assert report.nontrivial
    assert report.tables_checked == 64
    assert report.tables_detected == 64
    assert report.mixture_tv is None
    assert report.verdict == "secure"


def test_classical_alphabet_is_insecure():
    report = simulate_device_independent_attack(_config(2, alphabet=("0", "1/2")), rounds=20_000)
    assert not report.nontrivial
    assert report.tables_detected < report.tables_checked
    assert report.mixture_impossible is False
    assert report.mixture_tv < 0.05
    assert report.verdict == "insecure"


def test_short_runs_are_inconclusive():
    assert simulate_device_independent_attack(_config(2), rounds=50).verdict == "inconclusive"


def test_table_enumeration_bound():
    assert sum(1 for _ in all_tables(_config(2))) == 64
    with pytest.raises(ResourceBoundError):
        list(all_tables(_config(3), bound=100))
