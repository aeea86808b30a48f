"""Annotation service endpoints: lifecycle, validation, and recovery."""

import time

import pytest
from fastapi.testclient import TestClient

from iclearn.data import save_dataset
from iclearn.service.app import create_app
from iclearn.synthetic import make_motion_dataset


@pytest.fixture(scope="module")
def dataset_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "motion.jsonl"
    save_dataset(make_motion_dataset(n_train=16, n_test=6, T=6, noise=0.1, seed=0), path)
    return str(path)


def create_request(dataset_path, **loop_overrides):
    loop = dict(
        strategy="kr",
        per=0.3,
        n_clusters=2,
        cap=3,
        iterations=2,
        pretrain_epochs=2,
        finetune_epochs=1,
    )
    loop.update(loop_overrides)
    return {
        "dataset": dataset_path,
        "train_split": "train",
        "test_split": "test",
        "model": {
            "encoder_hidden": 4,
            "batch_size": 8,
            "learning_rate": 1e-2,
            "seed": 0,
        },
        "loop": loop,
    }


def wait_for_phase(client, session_id, phases, deadline=30.0):
    end = time.time() + deadline
    while time.time() < end:
        status = client.get(f"/sessions/{session_id}/status").json()
        if status["phase"] in phases:
            return status
        assert status["phase"] != "error", status["last_error"]
        time.sleep(0.02)
    raise AssertionError(f"timed out waiting for {phases}, last status: {status}")


def answer_batch(client, session_id, use_names=False):
    """Fetch the open queries and label every id by its ground-truth class."""
    queries = client.get(f"/sessions/{session_id}/queries").json()
    labels = {}
    status = client.get(f"/sessions/{session_id}/status").json()
    for sid in queries["queried_ids"]:
        sample = client.get(f"/sessions/{session_id}/samples/{sid}").json()
        labels[sid] = sample["label"] if use_names else sample["label_index"]
    response = client.post(f"/sessions/{session_id}/labels", json={"labels": labels})
    assert response.status_code == 200, response.text
    return queries["queried_ids"], status["class_names"]


@pytest.fixture()
def client(tmp_path):
    return TestClient(create_app(str(tmp_path / "store")))


def start_session(client, dataset_path, **loop_overrides):
    response = client.post("/sessions", json=create_request(dataset_path, **loop_overrides))
    assert response.status_code == 201, response.text
    return response.json()["session_id"]


# ---------------------------------------------------------------- lifecycle


def test_full_annotation_cycle(client, dataset_path):
    session_id = start_session(client, dataset_path)
    status = wait_for_phase(client, session_id, ("awaiting_labels",))
    assert status["pool_size"] == 16
    assert status["labeled_count"] == 0
    assert len(status["class_names"]) == 4

    queried, _ = answer_batch(client, session_id)
    assert 0 < len(queried) <= 3
    status = wait_for_phase(client, session_id, ("awaiting_labels", "idle"))
    assert status["labeled_count"] == len(queried)
    assert status["iteration"] == 1

    history = client.get(f"/sessions/{session_id}/history").json()["records"]
    assert len(history) == 1
    assert history[0]["selected_ids"] == sorted(queried)
    assert 0.0 <= history[0]["test_accuracy"] <= 1.0

    # second round closes the iteration budget
    answer_batch(client, session_id, use_names=True)
    status = wait_for_phase(client, session_id, ("idle",))
    assert status["iteration"] == 2
    records = client.get(f"/sessions/{session_id}/history").json()["records"]
    assert [r["iteration"] for r in records] == [1, 2]
    counts = [r["labeled_count"] for r in records]
    assert counts == sorted(counts)

    # no open batch once idle
    assert client.get(f"/sessions/{session_id}/queries").status_code == 409
    assert client.post(
        f"/sessions/{session_id}/labels", json={"labels": {}}
    ).status_code == 409


def test_session_listing(client, dataset_path):
    assert client.get("/sessions").json() == {"sessions": []}
    session_id = start_session(client, dataset_path)
    assert session_id in client.get("/sessions").json()["sessions"]


def test_embedding_payload(client, dataset_path):
    session_id = start_session(client, dataset_path)
    wait_for_phase(client, session_id, ("awaiting_labels",))
    queried = client.get(f"/sessions/{session_id}/queries").json()["queried_ids"]
    embedding = client.get(f"/sessions/{session_id}/embedding").json()
    n = 16
    assert len(embedding["ids"]) == n
    for key in ("points", "cluster", "labeled", "label", "max_prob", "entropy", "queried"):
        assert len(embedding[key]) == n, key
    assert all(len(p) == 2 for p in embedding["points"])
    assert set(embedding["cluster"]) <= {0, 1}
    flagged = {sid for sid, q in zip(embedding["ids"], embedding["queried"]) if q}
    assert flagged == set(queried)
    assert not any(embedding["labeled"])  # nothing labeled yet
    assert all(v is None for v in embedding["label"])


def test_sample_payload_and_unknowns(client, dataset_path):
    session_id = start_session(client, dataset_path)
    wait_for_phase(client, session_id, ("awaiting_labels",))
    sample = client.get(f"/sessions/{session_id}/samples/train-0000").json()
    assert sample["num_frames"] == 6
    assert sample["num_keypoints"] == 2
    assert sample["dims"] == 2
    assert len(sample["frames_2d"]) == 6
    assert len(sample["frames_2d"][0]) == 2
    assert sample["label"] in client.get(f"/sessions/{session_id}/status").json()["class_names"]

    assert client.get(f"/sessions/{session_id}/samples/nope").status_code == 404
    assert client.get("/sessions/zzz/status").status_code == 404
    assert client.get("/sessions/zzz/embedding").status_code == 404


# ---------------------------------------------------------------- validation


def test_create_session_validation(client, dataset_path):
    bad = client.post("/sessions", json={"dataset": "/does/not/exist.jsonl"})
    assert bad.status_code == 422
    assert bad.json()["code"] == "invalid_session_request"

    request = create_request(dataset_path)
    request["model"]["input_dim"] = 3
    assert client.post("/sessions", json=request).status_code == 422

    request = create_request(dataset_path)
    request["train_split"] = "validation"
    assert client.post("/sessions", json=request).status_code == 422

    assert client.post("/sessions", json={"loop": {}}).status_code == 422  # missing dataset
    body = client.post("/sessions", json={"loop": {}}).json()
    assert body["code"] == "validation_error"


def test_label_submission_validation(client, dataset_path):
    session_id = start_session(client, dataset_path)
    wait_for_phase(client, session_id, ("awaiting_labels",))
    queried = client.get(f"/sessions/{session_id}/queries").json()["queried_ids"]

    url = f"/sessions/{session_id}/labels"
    partial = {queried[0]: 0} if len(queried) > 1 else {}
    response = client.post(url, json={"labels": partial})
    assert response.status_code == 422
    assert response.json()["code"] == "invalid_labels"

    extra = {sid: 0 for sid in queried} | {"train-9999": 0}
    assert client.post(url, json={"labels": extra}).status_code == 422

    bad_name = {sid: "cartwheel" for sid in queried}
    assert client.post(url, json={"labels": bad_name}).status_code == 422

    out_of_range = {sid: 11 for sid in queried}
    assert client.post(url, json={"labels": out_of_range}).status_code == 422

    # the batch survives every rejection and still accepts a valid submission
    good = client.get(f"/sessions/{session_id}/queries").json()["queried_ids"]
    assert good == queried
    answer_batch(client, session_id)


# ---------------------------------------------------------------- recovery


def test_restarted_service_recovers_sessions(tmp_path, dataset_path):
    store_dir = str(tmp_path / "store")
    first = TestClient(create_app(store_dir))
    session_id = start_session(first, dataset_path)
    wait_for_phase(first, session_id, ("awaiting_labels",))
    queried = first.get(f"/sessions/{session_id}/queries").json()["queried_ids"]

    second = TestClient(create_app(store_dir))
    assert session_id in second.get("/sessions").json()["sessions"]
    status = second.get(f"/sessions/{session_id}/status").json()
    assert status["phase"] == "awaiting_labels"
    recovered = second.get(f"/sessions/{session_id}/queries").json()["queried_ids"]
    assert recovered == queried

    # the recovered session accepts the batch and completes the round
    answer_batch(second, session_id)
    status = wait_for_phase(second, session_id, ("awaiting_labels", "idle"))
    assert status["labeled_count"] == len(queried)
    records = second.get(f"/sessions/{session_id}/history").json()["records"]
    assert len(records) == 1


def test_static_ui_mount(tmp_path, dataset_path):
    ui_dir = tmp_path / "ui"
    ui_dir.mkdir()
    (ui_dir / "index.html").write_text("<html><body>annotate</body></html>")
    client = TestClient(create_app(str(tmp_path / "store"), ui_dir=str(ui_dir)))
    response = client.get("/")
    assert response.status_code == 200
    assert "annotate" in response.text
