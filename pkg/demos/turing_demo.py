"""Blinded grading sessions without the HTTP layer.

Builds two tiny corpora on disk, runs a session through the store directly
with a simulated grader of fixed accuracy, and prints the confusion table.
The same store backs the `synthval turing serve` HTTP service.
"""

import csv
import os
import tempfile

import numpy as np
from PIL import Image

from synthval.turing import TuringStore

rng = np.random.default_rng(0)


def make_corpus(root, name, n, label, blur):
    directory = os.path.join(root, name)
    os.mkdir(directory)
    rows = []
    for i in range(n):
        img = rng.uniform(0, 1, (16, 16))
        for _ in range(blur):
            img = sum(np.roll(np.roll(img, dy, 0), dx, 1)
                      for dy in (-1, 0, 1) for dx in (-1, 0, 1)) / 9.0
        fname = f"{label}_{i:03d}.png"
        Image.fromarray((img * 255).astype(np.uint8)).save(
            os.path.join(directory, fname))
        rows.append((fname, label))
    manifest = os.path.join(directory, "manifest.csv")
    with open(manifest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "label"])
        writer.writerows(rows)
    return manifest


with tempfile.TemporaryDirectory() as root:
    real = make_corpus(root, "real", 20, "real", blur=0)
    synth = make_corpus(root, "synth", 20, "synthetic", blur=2)

    store = TuringStore(log_path=os.path.join(root, "events.jsonl"))
    sess = store.create_session(real, synth, n_real=15, n_synth=15, seed=1)
    print(f"session {sess.id[:8]}... with {sess.total} shuffled items")

    # simulated grader: right 80% of the time
    for idx, item in enumerate(sess.items):
        truth = "real" if item.true_label == "real" else "fake"
        wrong = "fake" if truth == "real" else "real"
        store.submit_judgment(sess.id, idx,
                              truth if rng.random() < 0.8 else wrong)

    table, chi = store.session_report(sess.id)
    print(f"\n{'':<12} {'correct':>8} {'incorrect':>10}")
    for row_label, row in zip(table.row_labels, table.counts):
        print(f"{row_label:<12} {row[0]:>8} {row[1]:>10}")
    if chi is not None:
        print(f"\nchi-square = {chi.statistic:.2f}, p = {chi.p_value:.3f}")

    # the event log alone is enough to rebuild the session
    replayed = TuringStore.replay(store.log_path)
    print(f"replayed status: {replayed.sessions[sess.id].status}")
