#!/usr/bin/env python3
"""Standalone reader for CERSIDX1 sparse index files.

Prints a JSON summary; with --score QUERY_TERMS it also recomputes BM25 for
every unit from the stored postings (terms must already be preprocessed).
"""

import argparse
import json
import math
import struct
import sys


class Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.data):
            raise ValueError(f"truncated at byte {self.pos}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u32(self):
        return struct.unpack("<I", self.take(4))[0]

    def u64(self):
        return struct.unpack("<Q", self.take(8))[0]

    def f64(self):
        return struct.unpack("<d", self.take(8))[0]

    def str(self):
        return self.take(self.u32()).decode("utf-8")


def read_index(path):
    with open(path, "rb") as f:
        r = Reader(f.read())
    if r.take(8) != b"CERSIDX1":
        raise ValueError("bad magic")
    index = {"N": r.u64(), "avgdl": r.f64(), "k1": r.f64(), "b": r.f64(), "postings": {}}
    for _ in range(r.u64()):
        term = r.str()
        df = r.u32()
        index["postings"][term] = [(r.u32(), r.u32()) for _ in range(df)]
    index["units"] = []
    for _ in range(index["N"]):
        length = r.u32()
        index["units"].append({"length": length, "sentence_id": r.str(), "text": r.str()})
    if r.pos != len(r.data):
        raise ValueError("trailing bytes")
    return index


def bm25(index, terms, ordinal):
    n_units = index["N"]
    length = index["units"][ordinal]["length"]
    k1, b = index["k1"], index["b"]
    score = 0.0
    for t in terms:
        postings = index["postings"].get(t, [])
        tf = next((f for o, f in postings if o == ordinal), 0)
        if tf == 0:
            continue
        idf = math.log((n_units - len(postings) + 0.5) / (len(postings) + 0.5))
        score += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * length / index["avgdl"]))
    return score


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("index")
    ap.add_argument("--score", nargs="*", help="preprocessed query terms")
    args = ap.parse_args()
    index = read_index(args.index)
    lengths = [u["length"] for u in index["units"]]
    summary = {
        "N": index["N"],
        "avgdl": index["avgdl"],
        "avgdl_recomputed": sum(lengths) / len(lengths),
        "k1": index["k1"],
        "b": index["b"],
        "terms": len(index["postings"]),
        "first_unit": index["units"][0]["sentence_id"],
    }
    if args.score:
        summary["scores"] = {u["sentence_id"]: bm25(index, args.score, i) for i, u in enumerate(index["units"])}
    json.dump(summary, sys.stdout, indent=2)
    print()


if __name__ == "__main__":
    main()
