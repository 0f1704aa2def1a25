"""Regenerate src/orbitcodes/data/primitive_polys.json.

Lexicographically first monic primitive polynomial for p in {2, 3, 5} and
degree 1..16.
"""

import json
from pathlib import Path

from orbitcodes.gf_tower import primitive_polynomials

OUT = Path(__file__).resolve().parents[1] / "src" / "orbitcodes" / "data" / "primitive_polys.json"


def main():
    table = {}
    for p in (2, 3, 5):
        for m in range(1, 17):
            table[f"{p},{m}"] = next(primitive_polynomials(p, m))
    lines = [f"  {json.dumps(k)}: {json.dumps(v)}" for k, v in table.items()]
    OUT.write_text("{\n" + ",\n".join(lines) + "\n}\n")


if __name__ == "__main__":
    main()
