"""JSON and CSV serialization of fields, subspaces, profiles and sweep records."""

from __future__ import annotations

import csv
import io as _io
import json
from dataclasses import asdict
from pathlib import Path

from ._validation import check_basis, check_coords
from .gf_tower import ZERO, FieldCtx, FieldSpec, ctx_from_spec
from .orbit import FractionData, OrbitProfile
from .search import MergedRecord, SearchRecord
from .subspace import Subspace

RECORD_COLUMNS = ["q", "n", "k", "lambda2", "case", "r", "N", "N_orbits"]
MERGED_COLUMNS = ["q", "n", "k", "lambda2", "r", "N", "N_orbits"]


def field_to_json(ctx: FieldCtx) -> dict:
    return ctx.spec.to_dict()


def field_from_json(data: dict) -> FieldCtx:
    return ctx_from_spec(FieldSpec.from_dict(data))


def subspace_to_json(U: Subspace) -> dict:
    return {"basis": ["zero" if b == ZERO else b for b in U.basis]}


def subspace_from_json(ctx: FieldCtx, data: dict) -> Subspace:
    """``{"basis": [log | "zero", ...]}`` or ``{"coords": [[c_0, ..., c_{m-1}], ...]}``."""
    if "basis" in data:
        return check_basis(ctx, data["basis"])
    if "coords" in data:
        return check_coords(ctx, data["coords"])
    raise ValueError("subspace JSON needs a 'basis' or 'coords' key")


def profile_to_json(profile: OrbitProfile, frac: FractionData | None = None) -> dict:
    out = {
        "q": profile.q, "n": profile.n, "k": profile.k, "t": profile.t,
        "ell": profile.ell, "ds": profile.ds, "lambda": list(profile.lam),
        "delta": {str(k): v for k, v in profile.delta.items()},
        "orbit_size": profile.orbit_size, "s": profile.s,
    }
    if frac is not None:
        out.update(f=frac.f, Q=frac.Q, psi_histogram={str(k): v for k, v in frac.psi_histogram.items()})
    return out


def profile_from_json(data: dict) -> OrbitProfile:
    return OrbitProfile(
        q=data["q"], n=data["n"], k=data["k"], t=data["t"], orbit_size=data["orbit_size"],
        ell=data["ell"], lam=tuple(data["lambda"]), delta={int(k): v for k, v in data["delta"].items()},
        ds=data["ds"],
    )


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _csv_text(rows: list[dict], columns: list[str]) -> str:
    buf = _io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({c: "" if row.get(c) is None else row[c] for c in columns})
    return buf.getvalue()


def records_to_csv(records: list[SearchRecord]) -> str:
    return _csv_text([rec.row() for rec in records], RECORD_COLUMNS)


def merged_to_csv(records: list[MergedRecord], k_size: int) -> str:
    rows = []
    for rec in records:
        row = asdict(rec)
        row["N_orbits"] = rec.N // k_size if rec.N % k_size == 0 else None
        rows.append(row)
    return _csv_text(rows, MERGED_COLUMNS)


def records_from_csv(text: str) -> list[SearchRecord]:
    out = []
    for row in csv.DictReader(_io.StringIO(text)):
        out.append(SearchRecord(
            int(row["q"]), int(row["n"]), int(row["k"]), int(row["lambda2"]),
            row["case"], int(row["r"]), int(row["N"]),
        ))
    return out


def write_text(path: str | Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
