#!/usr/bin/env python3
"""Independent gold-answer oracle for corpus fixtures.

Reads a corpus JSONL, finds every point of interest (first row of an event
plus every row whose four labels differ from the previous row), and resolves
all 18 questions per point with the reference resolver functions below.

Writes one "query_id<TAB>yes|no" line per question, sorted by query_id, and
prints the per-split yes/no tally to stderr. Used to freeze expected values
under tests/fixtures; it does not share code with the C++ implementation.

    python3 gold_oracle.py ../fixtures/synthetic.jsonl > ../fixtures/synthetic_gold.tsv
"""

import json
import sys
from collections import OrderedDict, defaultdict


def resolve_1st_order_yn_answer(qbel, sbel):
    if qbel == sbel:
        return True
    elif qbel == "PS" and sbel == "CT+":
        return True
    else:
        return False


def resolve_2nd_order_yn_answer(qbel, sbel1, sbel2, cg1, cg2):
    if qbel in ("PS", "CT+") and cg1 in ("JA", "IN") and (
        (qbel == sbel1) or ((qbel == "PS") and (sbel1 == "CT+"))
    ):
        return True
    elif qbel == "CT-" and cg1 == "RT" and qbel == sbel2:
        return True
    return False


def resolve_3rd_order_yn_answer(qbel, sbel1, sbel2, cg1, cg2):
    if qbel in ("PS", "CT+") and cg1 in ("JA", "IN") and (
        (qbel == sbel1) or ((qbel == "PS") and (sbel1 == "CT+"))
    ):
        return True
    elif qbel == "CT-" and cg1 in ("RT", "NA") and qbel == sbel1:
        return True
    return False


CHAINS = ["A", "B", "AB", "BA", "ABA", "BAB"]
CERTAINTIES = [("certainly", "CT+"), ("possibly", "PS"), ("certainly not", "CT-")]


def main(path):
    splits = {}
    rows = defaultdict(list)  # (dialog, event) -> [(turn, state)]
    order = OrderedDict()
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            rec = json.loads(line)
            if rec["kind"] == "dialog":
                splits[rec["dialog_id"]] = rec.get("split", "none")
            elif rec["kind"] == "event_row":
                key = (rec["dialog_id"], rec["event_id"])
                order[key] = True
                state = {
                    "bel": {"A": rec["bel_a"], "B": rec["bel_b"]},
                    "cg": {"A": rec["cg_a"], "B": rec["cg_b"]},
                }
                rows[key].append((rec["turn"], state))

    out = []
    tally = defaultdict(lambda: [0, 0])
    for key in order:
        dialog_id, event_id = key
        timeline = sorted(rows[key], key=lambda r: r[0])
        prev = None
        for turn, state in timeline:
            if prev is not None and state == prev:
                continue
            prev = state
            for chain in CHAINS:
                x = chain[0]
                y = chain[1] if len(chain) > 1 else None
                for name, qbel in CERTAINTIES:
                    if len(chain) == 1:
                        ans = resolve_1st_order_yn_answer(qbel, state["bel"][x])
                    elif len(chain) == 2:
                        ans = resolve_2nd_order_yn_answer(
                            qbel, state["bel"][x], state["bel"][y],
                            state["cg"][x], state["cg"][y])
                    else:
                        ans = resolve_3rd_order_yn_answer(
                            qbel, state["bel"][x], state["bel"][y],
                            state["cg"][x], state["cg"][y])
                    qid = f"{dialog_id}/{event_id}/{turn}/{chain}/{name}"
                    out.append((qid, "yes" if ans else "no"))
                    tally[splits.get(dialog_id, "none")][0 if ans else 1] += 1

    for qid, ans in sorted(out):
        print(f"{qid}\t{ans}")
    for split in ("train", "test", "none"):
        yes, no = tally[split]
        print(f"{split}\tyes={yes}\tno={no}", file=sys.stderr)


if __name__ == "__main__":
    main(sys.argv[1])
