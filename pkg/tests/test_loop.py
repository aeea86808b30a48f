"""Annotation loop mechanics: budgets, batch discipline, replay, persistence."""

import numpy as np
import pytest

from iclearn.engine import model as M
from iclearn.loop import IterativeLabelingLoop, LoopConfig, run_active_loop


def pool(n=16, T=6, F=2, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, T, F))
    ids = [f"s{i:03d}" for i in range(n)]
    truth = {sid: i % 2 for i, sid in enumerate(ids)}
    return x, ids, truth


def oracle_from(truth):
    return lambda queried: {sid: truth[sid] for sid in queried}


def configs(**loop_overrides):
    model_config = M.ModelConfig(
        input_dim=2,
        seq_len=6,
        encoder_hidden=4,
        num_classes=2,
        batch_size=4,
        learning_rate=5e-3,
        seed=0,
    )
    kwargs = dict(
        strategy="kr",
        per=0.3,
        n_clusters=2,
        cap=3,
        iterations=4,
        pretrain_epochs=3,
        finetune_epochs=2,
    )
    kwargs.update(loop_overrides)
    return model_config, LoopConfig(**kwargs)


def make_loop(loop_config=None, model_config=None, n=16, with_test=True, seed=0):
    x, ids, truth = pool(n=n, seed=seed)
    if loop_config is None:
        model_config, loop_config = configs()
    x_test, _, truth_test = pool(n=6, seed=seed + 100)
    y_test = np.array([truth_test[s] for s in sorted(truth_test)])
    loop = IterativeLabelingLoop(
        x,
        ids,
        model_config,
        loop_config,
        x_test=x_test if with_test else None,
        y_test=y_test if with_test else None,
    )
    return loop, truth


# ---------------------------------------------------------------- config validation


@pytest.mark.parametrize(
    "overrides",
    [
        dict(strategy="greedy"),
        dict(per=0.0),
        dict(per=1.5),
        dict(n_clusters=0),
        dict(cap=0),
        dict(iterations=-1),
        dict(finetune_epochs=0),
        dict(pretrain_epochs=-3),
        dict(target_fraction=0.0),
        dict(target_fraction=1.0001),
    ],
)
def test_loop_config_rejects(overrides):
    with pytest.raises(ValueError):
        configs(**overrides)


def test_loop_config_round_trip():
    _, lc = configs(target_fraction=0.5)
    assert LoopConfig.from_dict(lc.to_dict()) == lc


def test_constructor_validation():
    x, ids, _ = pool()
    mc, lc = configs()
    with pytest.raises(ValueError, match="length"):
        IterativeLabelingLoop(x, ids[:-1], mc, lc)
    with pytest.raises(ValueError, match="duplicate"):
        IterativeLabelingLoop(x, ["a"] * len(ids), mc, lc)
    with pytest.raises(ValueError, match="clusters"):
        IterativeLabelingLoop(x[:3], ids[:3], mc, configs(n_clusters=4)[1])


# ---------------------------------------------------------------- batch discipline


def test_propose_requires_pretrain():
    loop, _ = make_loop()
    with pytest.raises(RuntimeError, match="pretrain"):
        loop.propose()
    loop.pretrain()
    with pytest.raises(RuntimeError, match="already ran"):
        loop.pretrain()


def test_propose_commit_cycle():
    loop, truth = make_loop()
    loop.pretrain()
    queried = loop.propose()
    assert 0 < len(queried) <= 3  # explicit cap
    assert len(set(queried)) == len(queried)
    assert loop.pending == queried
    with pytest.raises(RuntimeError, match="awaiting"):
        loop.propose()
    loop.commit_labels({sid: truth[sid] for sid in queried})
    assert loop.pending == []
    assert loop.labeled_count == len(queried)
    assert all(loop.labels[sid] == truth[sid] for sid in queried)


def test_commit_rejections_leave_no_trace():
    loop, truth = make_loop()
    loop.pretrain()
    queried = loop.propose()
    answers = {sid: truth[sid] for sid in queried}
    with pytest.raises(RuntimeError, match="no batch"):
        make_loop()[0].commit_labels(answers)
    # extra id
    with pytest.raises(ValueError, match="not in the requested batch"):
        loop.commit_labels({**answers, "s999": 0})
    # incomplete batch
    first = queried[0]
    with pytest.raises(ValueError, match="incomplete"):
        loop.commit_labels({first: answers[first]} if len(queried) > 1 else {})
    # label out of range
    with pytest.raises(ValueError, match="out of range"):
        loop.commit_labels({**answers, first: 7})
    assert loop.labels == {} and loop.pending == queried


def test_proposals_never_repeat_labeled_ids():
    loop, truth = make_loop()
    loop.run(oracle_from(truth))
    seen: set[str] = set()
    for entry in loop.history:
        batch = set(entry["selected_ids"])
        assert not batch & seen
        seen |= batch


# ---------------------------------------------------------------- stopping and history


def test_target_fraction_caps_final_batch():
    # pool of 16 at target 0.25 stops at exactly 4 labels despite cap 3 per round
    _, lc = configs(target_fraction=0.25, iterations=50)
    loop, truth = make_loop(loop_config=lc, model_config=configs()[0])
    loop.run(oracle_from(truth))
    assert loop.labeled_count == 4
    assert loop.propose() == []  # budget exhausted
    assert loop.history[-1]["labeled_fraction"] == pytest.approx(0.25)


def test_iteration_budget_stops_run():
    loop, truth = make_loop()
    history = loop.run(oracle_from(truth))
    assert len(history) == 4  # iterations config
    counts = [h["labeled_count"] for h in history]
    assert counts == sorted(counts)
    for h in history:
        assert h["selected_ids"] == sorted(h["selected_ids"])
        assert 0.0 <= h["test_accuracy"] <= 1.0
        assert h["labeled_fraction"] == h["labeled_count"] / 16


def test_no_test_set_records_none():
    loop, truth = make_loop(with_test=False)
    loop.run(oracle_from(truth))
    assert all(h["test_accuracy"] is None for h in loop.history)


def test_manual_stepping_matches_run_bitwise():
    loop_a, truth = make_loop()
    loop_a.run(oracle_from(truth))
    loop_b, _ = make_loop()
    loop_b.pretrain()
    while loop_b.iteration < loop_b.loop_config.iterations:
        queried = loop_b.propose()
        if not queried:
            break
        loop_b.commit_labels({sid: truth[sid] for sid in queried})
        loop_b.finetune()
        loop_b.record(queried)
    assert loop_a.history == loop_b.history
    for k in loop_a.params:
        np.testing.assert_array_equal(loop_a.params[k], loop_b.params[k])


def test_run_active_loop_wrapper():
    x, ids, truth = pool()
    mc, lc = configs()
    x_test, _, truth_test = pool(n=6, seed=100)
    y_test = np.array([truth_test[s] for s in sorted(truth_test)])
    loop = run_active_loop(
        x, ids, oracle_from(truth), mc, lc, x_test=x_test, y_test=y_test
    )
    reference, _ = make_loop()
    reference.run(oracle_from(truth))
    assert loop.history == reference.history


# ---------------------------------------------------------------- persistence


def test_save_load_round_trip_continues_identically(tmp_path):
    loop_a, truth = make_loop()
    oracle = oracle_from(truth)
    loop_a.run(oracle)

    loop_b, _ = make_loop()
    loop_b.pretrain()
    for _ in range(2):
        queried = loop_b.propose()
        loop_b.commit_labels({sid: truth[sid] for sid in queried})
        loop_b.finetune()
        loop_b.record(queried)
    path = tmp_path / "loop.ckpt"
    loop_b.save(path)

    x, ids, _ = pool()
    x_test, _, truth_test = pool(n=6, seed=100)
    y_test = np.array([truth_test[s] for s in sorted(truth_test)])
    loop_c = IterativeLabelingLoop.load(path, x, ids, x_test=x_test, y_test=y_test)
    assert loop_c.labels == loop_b.labels
    assert loop_c.iteration == 2
    assert loop_c.last_state is not None
    np.testing.assert_array_equal(
        loop_c.last_state.assignments, loop_b.last_state.assignments
    )
    loop_c.run(oracle)
    assert loop_c.history == loop_a.history
    for k in loop_a.params:
        np.testing.assert_array_equal(loop_a.params[k], loop_c.params[k])


def test_save_before_first_round(tmp_path):
    loop, _ = make_loop()
    path = tmp_path / "fresh.ckpt"
    loop.save(path)
    x, ids, _ = pool()
    back = IterativeLabelingLoop.load(path, x, ids)
    assert back.last_state is None
    assert back.labels == {} and back.iteration == 0
    assert not back.pretrained


def test_save_preserves_pending_batch(tmp_path):
    loop, truth = make_loop()
    loop.pretrain()
    queried = loop.propose()
    path = tmp_path / "pending.ckpt"
    loop.save(path)
    x, ids, _ = pool()
    back = IterativeLabelingLoop.load(path, x, ids)
    assert back.pending == queried
    back.commit_labels({sid: truth[sid] for sid in queried})
    assert back.labeled_count == len(queried)
