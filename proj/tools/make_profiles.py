#!/usr/bin/env python3
"""Regenerates the bundled device profiles in ../profiles."""
import json
import pathlib
import re

OUT = pathlib.Path(__file__).resolve().parent.parent / "profiles"


def heavy_hex_127():
    # Seven rows of qubits joined by bridge qubits every fourth column.
    row_start = [0, 18, 37, 56, 75, 94, 113]
    row_cols = [range(0, 14)] + [range(0, 15)] * 5 + [range(1, 15)]

    def q(row, col):
        return row_start[row] + col - row_cols[row][0]

    edges = []
    for r in range(7):
        cols = list(row_cols[r])
        for a, b in zip(cols, cols[1:]):
            edges.append((q(r, a), q(r, b)))
    for r in range(6):
        bridge = row_start[r] + len(row_cols[r])
        cols = [0, 4, 8, 12] if r % 2 == 0 else [2, 6, 10, 14]
        for i, c in enumerate(cols):
            edges.append((q(r, c), bridge + i))
            edges.append((bridge + i, q(r + 1, c)))
    return sorted(edges)


def main():
    OUT.mkdir(exist_ok=True)
    ion = {
        "name": "ionq-forte-like",
        "technology": "trapped-ion",
        "num_qubits": 36,
        "basis_gates": ["rx", "ry", "rz", "rxx"],
        "coupling": "all-to-all",
        "fidelity_1q": {"rx": 0.9998, "ry": 0.9998, "rz": 0.9998},
        "fidelity_2q": 0.996,
        "t1_us": 1.0e8,
        "t2_us": 1.0e6,
    }
    edges = heavy_hex_127()
    assert len({x for e in edges for x in e}) == 127 and len(edges) == 144
    sc = {
        "name": "ibm-eagle-like",
        "technology": "superconducting",
        "num_qubits": 127,
        "basis_gates": ["ecr", "id", "rz", "sx", "x"],
        "coupling": [list(e) for e in edges],
        "fidelity_1q": {"id": 0.9999, "rz": 1.0, "sx": 0.9999, "x": 0.9999},
        "fidelity_2q": 0.9996,
        "t1_us": 265.0,
        "t2_us": 150.0,
    }
    for prof in (ion, sc):
        text = json.dumps(prof, indent=2)
        text = re.sub(r"\[\s+(\d+),\s+(\d+)\s+\]", r"[\1, \2]", text)
        (OUT / f"{prof['name']}.json").write_text(text + "\n")


if __name__ == "__main__":
    main()
