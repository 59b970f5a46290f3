#!/usr/bin/env python3
"""Generate the shipped toy corpus (data/toy_corpus.jsonl).

20 synthetic news-like topics with controlled properties: several
candidate documents per topic that share lead "fact" sentences (so SCUs
merge and layout bias points at segment 1), document-specific filler, and
references that mostly restate shared facts with a few novel words (so
abstractness is small but nonzero). Deterministic: rerunning this script
reproduces the committed file byte for byte.
"""

import json
from pathlib import Path

import numpy as np

SEED = 20260809
N_TOPICS = 20

SUBJECTS = ["council", "ministry", "committee", "mayor", "agency", "senate",
            "board", "regulator", "union", "court", "company", "institute"]
ADJECTIVES = ["regional", "federal", "coastal", "northern", "industrial",
              "rural", "municipal", "provincial", "maritime", "central"]
OBJECTS = ["reservoir", "railway", "harbor", "hospital", "stadium", "bridge",
           "refinery", "airport", "library", "pipeline", "museum", "factory"]
VERBS = ["approved", "expanded", "inspected", "funded", "closed", "renovated",
         "audited", "privatized", "modernized", "reopened"]
PLACES = ["valley", "district", "province", "region", "township", "borough"]
FILLER_TEMPLATES = [
    "Residents near the {place} voiced {adj} concerns during the hearing.",
    "Analysts expected the {obj} budget to grow next quarter.",
    "A spokesperson declined to discuss the {obj} timeline.",
    "Local reporters toured the {obj} site on Friday.",
    "Engineers measured noise levels around the {place} overnight.",
    "The opposition demanded an audit of the {obj} contract.",
    "Several vendors submitted bids for the {obj} works.",
    "Traffic around the {place} slowed while crews surveyed the road.",
    "Weather delayed inspections across the {place} for two days.",
    "Investors watched the {obj} announcement with caution.",
]
NOVEL_WORDS = ["swiftly", "unexpectedly", "remarkably", "controversially",
               "quietly", "decisively"]


def make_topic(rng: np.random.Generator, index: int) -> dict:
    subj = rng.choice(SUBJECTS)
    adj = rng.choice(ADJECTIVES)
    place = rng.choice(PLACES)
    objs = rng.choice(OBJECTS, size=4, replace=False)
    verbs = rng.choice(VERBS, size=4, replace=False)

    facts = [f"The {adj} {subj} {verbs[i]} the {objs[i]} in the {place}."
             for i in range(4)]

    n_docs = int(rng.integers(3, 6))
    documents = []
    for _ in range(n_docs):
        n_facts = int(rng.integers(2, 5))
        fact_idx = rng.choice(len(facts), size=n_facts, replace=False)
        lead = [facts[i] for i in sorted(fact_idx)]
        n_fill = int(rng.integers(3, 6))
        fill_idx = rng.choice(len(FILLER_TEMPLATES), size=n_fill, replace=False)
        filler = [FILLER_TEMPLATES[i].format(place=place, adj=rng.choice(ADJECTIVES),
                                             obj=rng.choice(objs))
                  for i in fill_idx]
        documents.append(" ".join(lead + filler))

    n_refs = int(rng.integers(1, 3))
    references = []
    for _ in range(n_refs):
        k = int(rng.integers(2, 4))
        chosen = [facts[i] for i in sorted(rng.choice(len(facts), size=k, replace=False))]
        novel = rng.choice(NOVEL_WORDS)
        first = chosen[0].replace(f"The {adj} {subj}", f"The {subj} {novel}")
        references.append(" ".join([first] + chosen[1:]))

    return {"topic_id": f"toy-{index:03d}", "documents": documents,
            "references": references}


def main() -> None:
    rng = np.random.default_rng(SEED)
    out = Path(__file__).resolve().parent.parent / "data" / "toy_corpus.jsonl"
    out.parent.mkdir(exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        for i in range(N_TOPICS):
            fh.write(json.dumps(make_topic(rng, i), ensure_ascii=False) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
