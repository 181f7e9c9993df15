"""Regenerates the synthetic fixtures in this directory.

Counts and label balances are fixed by construction; text is filler built
from a small seeded vocabulary.
"""
import json
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
rng = random.Random(20230418)

SUBJECTS = ["The council", "A local firm", "The hospital", "Police", "The club", "Researchers",
            "The museum", "A charity", "The airline", "Teachers"]
VERBS = ["announced", "rejected", "approved", "delayed", "reported", "opened", "closed", "funded"]
OBJECTS = ["a new plan", "the budget", "a bridge project", "the merger", "a survey", "the festival",
           "a recycling scheme", "the appeal"]
PLACES = ["in Leeds", "in Cardiff", "on Monday", "last year", "after a vote", "this week"]


def sentence():
    return f"{rng.choice(SUBJECTS)} {rng.choice(VERBS)} {rng.choice(OBJECTS)} {rng.choice(PLACES)}."


def document():
    return " ".join(sentence() for _ in range(rng.randint(3, 6)))


def write_jsonl(path, rows):
    with open(os.path.join(HERE, path), "w") as f:
        for r in rows:
            f.write(json.dumps(r) + "\n")


def ei_rows(prefix, n, positives, origin):
    labels = [1] * positives + [0] * (n - positives)
    rng.shuffle(labels)
    rows = []
    for i, label in enumerate(labels):
        doc = document()
        claim = doc.split(". ")[0].rstrip(".") + "." if label else sentence()
        o = origin if origin != "mixed" else ("cnndm" if i % 2 == 0 else "xsum")
        rows.append({"id": f"{prefix}-{i:04d}", "document": doc, "claim": claim, "label": label, "origin": o})
    return rows


os.makedirs(os.path.join(HERE, "ei"), exist_ok=True)

# Miniature benchmark: label balance equals the published %Positive exactly.
MINIATURE = [
    ("CoGenSumm", 500, 249, "cnndm"),
    ("XSumFaith", 500, 51, "xsum"),
    ("Polytope", 500, 33, "cnndm"),
    ("FactCC", 100, 85, "cnndm"),
    ("SummEval", 500, 453, "cnndm"),
    ("FRANK", 500, 166, "mixed"),
]
manifest = []
for name, n, pos, origin in MINIATURE:
    fname = f"ei/{name.lower()}_mini.jsonl"
    write_jsonl(fname, ei_rows(name.lower(), n, pos, origin))
    manifest.append({"name": f"{name}/mini", "dataset": name, "split": "test", "path": os.path.basename(fname),
                     "expected_count": n, "expected_positive_rate": pos / n})
with open(os.path.join(HERE, "ei", "miniature_manifest.json"), "w") as f:
    json.dump({"datasets": manifest}, f, indent=2)
    f.write("\n")

# Planted 40-record run: 32 consistent, 8 inconsistent golds. The judge gets
# 30 consistent right, flags 2 consistent ones, misses 4 inconsistent ones and
# catches the other 4.
SAY_YES = ["Yes", "yes.", "Yes, the summary is consistent with the article.",
           "Answer: yes", "YES"]
SAY_NO = ["No", "no.", "No, the summary is not supported by the article.",
          "Answer: No", "The summary is inconsistent with the article."]
rows = ei_rows("planted", 40, 32, "mixed")
consistent = [r for r in rows if r["label"] == 1]
inconsistent = [r for r in rows if r["label"] == 0]
fixture = {}
for i, r in enumerate(consistent):
    fixture[r["id"]] = (SAY_YES if i < 30 else SAY_NO)[i % 5]
for i, r in enumerate(inconsistent):
    fixture[r["id"]] = (SAY_YES if i < 4 else SAY_NO)[i % 5]
write_jsonl("ei/planted40.jsonl", rows)
with open(os.path.join(HERE, "ei", "planted40_mock.json"), "w") as f:
    json.dump(fixture, f, indent=2, sort_keys=True)
    f.write("\n")
with open(os.path.join(HERE, "ei", "planted40_manifest.json"), "w") as f:
    json.dump({"datasets": [{"name": "planted", "dataset": "CoGenSumm", "split": "test",
                             "path": "planted40.jsonl", "expected_count": 40,
                             "expected_positive_rate": 0.8}]}, f, indent=2)
    f.write("\n")

# Ranking pairs plus a mock that always answers "A".
os.makedirs(os.path.join(HERE, "ranking"), exist_ok=True)
rank_rows = []
for i in range(20):
    s = sentence()
    rank_rows.append({"id": f"pair-{i:03d}", "article_sent": s, "correct_sent": s.rstrip(".") + " officially.",
                      "incorrect_sent": sentence()})
    while rank_rows[-1]["incorrect_sent"] == rank_rows[-1]["correct_sent"]:
        rank_rows[-1]["incorrect_sent"] = sentence()
write_jsonl("ranking/pairs.jsonl", rank_rows)
with open(os.path.join(HERE, "ranking", "always_a_mock.json"), "w") as f:
    json.dump({r["id"]: "Summary A" for r in rank_rows}, f, indent=2, sort_keys=True)
    f.write("\n")
with open(os.path.join(HERE, "ranking", "manifest.json"), "w") as f:
    json.dump({"datasets": [{"name": "pairs", "path": "pairs.jsonl", "expected_count": 20}]}, f, indent=2)
    f.write("\n")

# Rating: Likert annotations and aggregate scores with origins and systems.
os.makedirs(os.path.join(HERE, "rating"), exist_ok=True)
summeval = []
for i in range(24):
    ann = [rng.randint(1, 5) for _ in range(3)]
    if i == 0:
        ann = [3, 3, 3]
    summeval.append({"id": f"se-{i:03d}", "document": document(), "summary": sentence(),
                     "annotations": ann, "system": f"M{i % 3}", "origin": "cnndm"})
write_jsonl("rating/summeval_mini.jsonl", summeval)
frank = []
for i in range(30):
    frank.append({"id": f"fr-{i:03d}", "document": document(), "summary": sentence(),
                  "score": round(rng.random(), 3), "origin": "cnndm" if i % 2 == 0 else "xsum",
                  "system": f"S{i % 4}"})
write_jsonl("rating/frank_mini.jsonl", frank)


def rating_answer(score, jitter):
    mark = max(1, min(10, round(1 + 9 * score + jitter)))
    return rng.choice([f"{mark}", f"Marks: {mark}", f"I would give it {mark} out of 10.",
                       f"Score: {mark}/10", f"{mark} points."])


rating_mock = {}
for r in summeval:
    rating_mock[r["id"]] = rating_answer((sum(r["annotations"]) / 3 - 1) / 4, rng.uniform(-2, 2))
for r in frank:
    rating_mock[r["id"]] = rating_answer(r["score"], rng.uniform(-2, 2))
with open(os.path.join(HERE, "rating", "mock.json"), "w") as f:
    json.dump(rating_mock, f, indent=2, sort_keys=True)
    f.write("\n")
with open(os.path.join(HERE, "rating", "manifest.json"), "w") as f:
    json.dump({"datasets": [
        {"name": "summeval", "dataset": "SummEval", "path": "summeval_mini.jsonl", "scheme": "SummEvalLikert5",
         "expected_count": 24},
        {"name": "frank", "dataset": "FRANK", "path": "frank_mini.jsonl", "scheme": "FrankBinaryAggregate",
         "expected_count": 30}]}, f, indent=2)
    f.write("\n")
