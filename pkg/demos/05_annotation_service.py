"""Drive the annotation HTTP service the way the browser UI does.

Run from the repository root:

    python3 demos/05_annotation_service.py

Starts the service as a subprocess, creates a session, then plays the human:
polls the phase, fetches the queried sequences, submits labels (using the
ground truth the oracle dataset carries), and prints the accuracy after each
round.  Session state lands under demo_output/sessions/.
"""

import os
import subprocess
import sys
import time

import httpx

from iclearn import data
from iclearn.synthetic import make_motion_dataset

OUT = "demo_output"
PORT = 8731
BASE = f"http://127.0.0.1:{PORT}"


def wait_for_server(client, deadline=30.0):
    end = time.time() + deadline
    while time.time() < end:
        try:
            client.get(f"{BASE}/sessions")
            return
        except httpx.TransportError:
            time.sleep(0.1)
    raise RuntimeError("service did not come up")


def wait_for_phase(client, sid, phases, deadline=120.0):
    end = time.time() + deadline
    while time.time() < end:
        status = client.get(f"{BASE}/sessions/{sid}/status").json()
        if status["phase"] in phases:
            return status
        if status["phase"] == "error":
            raise RuntimeError(status["last_error"])
        time.sleep(0.1)
    raise RuntimeError(f"timed out waiting for {phases}")


def main():
    os.makedirs(OUT, exist_ok=True)
    dataset_path = os.path.join(OUT, "service_motion.jsonl")
    data.save_dataset(make_motion_dataset(n_train=60, n_test=20, T=12, seed=0),
                      dataset_path)

    server = subprocess.Popen(
        [sys.executable, "-m", "iclearn.cli", "serve",
         "--store", os.path.join(OUT, "sessions"), "--port", str(PORT)],
    )
    try:
        with httpx.Client(timeout=10.0) as client:
            wait_for_server(client)
            response = client.post(f"{BASE}/sessions", json={
                "dataset": dataset_path,
                "train_split": "train",
                "test_split": "test",
                "model": {"encoder_hidden": 12, "batch_size": 16,
                          "learning_rate": 1e-2, "seed": 0},
                "loop": {"strategy": "kr", "per": 0.1, "n_clusters": 3,
                         "cap": 6, "iterations": 3,
                         "pretrain_epochs": 60, "finetune_epochs": 20},
            })
            response.raise_for_status()
            sid = response.json()["session_id"]
            class_names = response.json()["class_names"]
            print(f"session {sid} created; pretraining...")

            while True:
                status = wait_for_phase(client, sid, ("awaiting_labels", "idle"))
                if status["phase"] == "idle":
                    break
                batch = client.get(f"{BASE}/sessions/{sid}/queries").json()
                queried = batch["queried_ids"]
                embedding = client.get(f"{BASE}/sessions/{sid}/embedding").json()
                flagged = sum(embedding["queried"])
                print(f"\nround {batch['iteration']}: {len(queried)} sequences "
                      f"queried ({flagged} highlighted in the embedding)")

                answers = {}
                for qid in queried:
                    sample = client.get(
                        f"{BASE}/sessions/{sid}/samples/{qid}").json()
                    answers[qid] = sample["label"]  # ground truth plays human
                client.post(f"{BASE}/sessions/{sid}/labels",
                            json={"labels": answers})
                status = wait_for_phase(client, sid, ("awaiting_labels", "idle"))
                record = client.get(
                    f"{BASE}/sessions/{sid}/history").json()["records"][-1]
                print(f"  labeled {record['labeled_count']} total, "
                      f"test accuracy {record['test_accuracy']:.3f}")

            print(f"\nclasses: {class_names}")
            print("session idle; state persists under demo_output/sessions/")
    finally:
        server.terminate()
        server.wait(timeout=10)


if __name__ == "__main__":
    main()
