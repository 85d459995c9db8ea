from models.database import init_db, reset_all_data
from models.runs import list_qss_summaries, list_runs, pair_count_series, record_run, save_pair_counts, save_qss_summary
from models.scenario import pair_series


def test_record_and_list_runs(ledger):
    first = record_run("ext-check", {"group": [4], "subgroup": [[2]]}, {"trivial": False, "witness": "2x=2"})
    second = record_run("newcond", {"D": 2, "V": 3}, {"effective": True})
    assert second > first
    runs = list_runs()
    assert [r["command"] for r in runs] == ["newcond", "ext-check"]
    assert runs[1]["result"]["witness"] == "2x=2"
    assert [r["id"] for r in list_runs(command="ext-check")] == [first]


def test_pair_counts_are_upserted(ledger):
    rows = [pc.to_dict() for pc in pair_series([3, 4], 2, 4)]
    save_pair_counts(rows)
    save_pair_counts(rows[:1])
    series = pair_count_series(2, 4)
    assert [(r["N"], r["count"], r["beta"], r["V"]) for r in series] == [(3, 1, 2, 3), (4, 0, None, None)]
    assert pair_count_series(2, 4, "cyclic") == []


def test_qss_summaries(ledger):
    save_qss_summary(2, 2, {"rounds": 100, "accuracy": 1.0, "failure_rate": 0.0, "tv_distance": 0.01, "p_max": 0.25})
    rows = list_qss_summaries()
    assert len(rows) == 1
    assert rows[0]["attack"] == "none"
    assert rows[0]["p_max"] == 0.25


def test_reset_and_reinit(ledger):
    record_run("frel-verify", {"G": [2], "H": [2]}, {"trivial": True})
    reset_all_data()
    init_db()
    assert list_runs() == []
