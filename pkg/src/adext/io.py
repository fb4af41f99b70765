"""JSON file formats for instances and allocations.

Instance files carry 1-based human-facing data::

    {"model": "aa"|"sa", "reset": bool, "window": int, "n": int, "k": int,
     "q": [...], "v": [...], "lambda": [...],    # lambda for aa only
     "gamma": [[...], ...]}                      # N x N (aa) or K x N (sa)

Allocation files are a bare JSON array of K entries, each an ad index in
1..N or the string "BOT".
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .core import BOT, Allocation, Instance, ModelSpec, validate_instance


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "model": inst.model.kind,
        "reset": inst.model.reset,
        "window": inst.model.window,
        "n": inst.n,
        "k": inst.k,
        "q": inst.q.tolist(),
        "v": inst.v.tolist(),
        "gamma": inst.gamma.tolist(),
    }
    if inst.lam is not None:
        doc["lambda"] = inst.lam.tolist()
    return doc


def instance_from_dict(doc: dict[str, Any]) -> Instance:
    kind = doc["model"]
    inst = Instance(
        k=int(doc["k"]),
        q=np.array(doc["q"], dtype=np.float64),
        v=np.array(doc["v"], dtype=np.float64),
        gamma=np.array(doc["gamma"], dtype=np.float64),
        lam=np.array(doc["lambda"], dtype=np.float64) if kind == "aa" else None,
        model=ModelSpec(kind=kind, window=int(doc["window"]), reset=bool(doc["reset"])),
    )
    if int(doc["n"]) != inst.n:
        raise ValueError(f"declared n={doc['n']} but q has {inst.n} entries")
    bad = validate_instance(inst)
    if bad:
        raise ValueError("invalid instance: " + "; ".join(bad))
    return inst


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst), indent=2) + "\n")


def load_instance(path: str | Path) -> Instance:
    return instance_from_dict(json.loads(Path(path).read_text()))


def allocation_to_list(theta: Allocation) -> list[Any]:
    return ["BOT" if s == BOT else s + 1 for s in theta.slots]


def allocation_from_list(entries: list[Any]) -> Allocation:
    slots = []
    for e in entries:
        if e == "BOT":
            slots.append(BOT)
        else:
            slots.append(int(e) - 1)
    return Allocation(tuple(slots))


def save_allocation(theta: Allocation, path: str | Path) -> None:
    Path(path).write_text(json.dumps(allocation_to_list(theta)) + "\n")


def load_allocation(path: str | Path) -> Allocation:
    return allocation_from_list(json.loads(Path(path).read_text()))


def format_allocation(theta: Allocation) -> str:
    """Compact human-readable form, e.g. ``<a1, BOT, a3>``."""
    parts = ["BOT" if s == BOT else f"a{s + 1}" for s in theta.slots]
    return "<" + ", ".join(parts) + ">"
