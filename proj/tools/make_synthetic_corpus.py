#!/usr/bin/env python3
"""Regenerates data/synthetic/corpus.jsonl: five themed topics, LDA-style
mixing, dates spread over six months with a few busy days."""
import datetime
import json
import random
import sys

TOPICS = {
    "farm": "farm crop harvest grain wheat corn drought rancher cattle soil irrigation subsidy prairie livestock barley",
    "defense": "troops military army base soldier veteran deployment pentagon missile security weapon navy guard combat",
    "health": "hospital patient doctor clinic medicare nurse insurance treatment vaccine disease medicine health care rural",
    "energy": "energy oil gas ethanol fuel pipeline electricity power wind turbine price refinery coal utility",
    "tribe": "tribe tribal reservation sovereignty treaty housing school nation elder council land indian water",
}
FILLER = "the and of to a in for is on that with as this we you our it be".split()


def main(out_path, seed=2002, docs=300):
    rng = random.Random(seed)
    names = sorted(TOPICS)
    words = {k: TOPICS[k].split() for k in names}
    start = datetime.date(2001, 10, 1)
    busy = [start + datetime.timedelta(days=d) for d in (17, 45, 101)]
    with open(out_path, "w", encoding="utf-8") as out:
        for d in range(docs):
            theta = [rng.gammavariate(0.2, 1.0) + 1e-9 for _ in names]
            tokens = []
            for _ in range(rng.randint(30, 60)):
                if rng.random() < 0.3:
                    tokens.append(rng.choice(FILLER))
                    continue
                k = rng.choices(names, weights=theta)[0]
                tokens.append(rng.choice(words[k]))
            rec = {"id": "msg%04d" % d, "text": " ".join(tokens).capitalize() + "."}
            r = rng.random()
            if r < 0.15:
                rec["date"] = rng.choice(busy).isoformat()
            elif r < 0.95:
                rec["date"] = (start + datetime.timedelta(days=rng.randrange(182))).isoformat()
            out.write(json.dumps(rec) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/synthetic/corpus.jsonl")
