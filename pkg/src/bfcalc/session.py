"""YAML session files: registered manifolds, the knowledge base and a history log.

Integers are written as decimal strings so that values of any size survive
the round trip.  Manifolds refer to the manifolds they are built from by
name.  The output is canonical, with sorted keys and sorted fact lists, so
saving a loaded session reproduces the file byte for byte.
"""

from __future__ import annotations

import fcntl
import os
from contextlib import contextmanager
from typing import Iterator

import yaml

from .engine import BF, KnowledgeBase, Provenance, SWFact
from .fourman import BlowdownData, BoundaryComponent, LogData, ManifoldDescriptor, SurfaceData

FORMAT_VERSION = "1"


def _ints(v) -> list[str]:
    return [str(int(x)) for x in v]


def _mat(m) -> list[list[str]]:
    return [_ints(r) for r in m]


def _unints(v) -> tuple[int, ...]:
    return tuple(int(x) for x in v)


def _unmat(m) -> tuple[tuple[int, ...], ...]:
    return tuple(_unints(r) for r in m)


def _prov(p: Provenance | None) -> dict:
    p = p or Provenance("asserted")
    return {"rule": p.rule, "inputs": list(p.inputs)}


def _unprov(d: dict) -> Provenance:
    return Provenance(d["rule"], tuple(d.get("inputs", ())))


def descriptor_to_dict(X: ManifoldDescriptor) -> dict:
    out = {
        "b1": str(X.b1),
        "b2_plus": str(X.b2_plus),
        "b2_minus": str(X.b2_minus),
        "form": _mat(X.form),
        "h1_no_2torsion": X.h1_no_2torsion,
        "symplectic": X.symplectic,
    }
    if X.boundary:
        out["boundary"] = [
            {"label": c.label, "swf_spherical": c.swf_spherical, "rational_homology_sphere": c.rational_homology_sphere}
            for c in X.boundary
        ]
        out["euler"] = str(X.euler_input)
    if X.pieces:
        out["pieces"] = [P.name for P in X.pieces]
        out["glue_kind"] = X.glue_kind
    if X.exceptional:
        out["exceptional"] = _ints(X.exceptional)
    if X.blowup_of is not None:
        out["blowup_of"] = X.blowup_of.name
    if X.blowdown is not None:
        b = X.blowdown
        out["blowdown"] = {
            "parent": b.parent.name,
            "p": str(b.p),
            "plumbing": _mat(b.plumbing),
            "complement": _mat(b.complement),
        }
    if X.log is not None:
        out["log"] = {"parent": X.log.parent.name, "alpha": _ints(X.log.alpha), "p": str(X.log.p)}
    return out


def _descriptors_from(data: dict) -> dict[str, ManifoldDescriptor]:
    built: dict[str, ManifoldDescriptor] = {}

    def build(name: str) -> ManifoldDescriptor:
        if name in built:
            return built[name]
        d = data[name]
        kw = {}
        if "boundary" in d:
            kw["boundary"] = tuple(BoundaryComponent(**c) for c in d["boundary"])
            kw["euler_input"] = int(d["euler"])
        if "pieces" in d:
            kw["pieces"] = tuple(build(n) for n in d["pieces"])
            kw["glue_kind"] = d.get("glue_kind", "")
        if "exceptional" in d:
            kw["exceptional"] = _unints(d["exceptional"])
        if "blowup_of" in d:
            kw["blowup_of"] = build(d["blowup_of"])
        if "blowdown" in d:
            b = d["blowdown"]
            kw["blowdown"] = BlowdownData(build(b["parent"]), int(b["p"]), _unmat(b["plumbing"]), _unmat(b["complement"]))
        if "log" in d:
            lg = d["log"]
            kw["log"] = LogData(build(lg["parent"]), _unints(lg["alpha"]), int(lg["p"]))
        X = ManifoldDescriptor(
            name,
            int(d["b1"]),
            int(d["b2_plus"]),
            int(d["b2_minus"]),
            _unmat(d["form"]),
            h1_no_2torsion=bool(d["h1_no_2torsion"]),
            symplectic=bool(d["symplectic"]),
            **kw,
        )
        built[name] = X
        return X

    for name in data:
        build(name)
    return built


def _surface_to_dict(S: SurfaceData) -> dict:
    return {
        "kind": S.kind,
        "class": _ints(S.homology_class),
        "genus": str(S.genus),
        "positive_double_points": str(S.positive_double_points),
        "negative_double_points": str(S.negative_double_points),
        "non_torsion": S.non_torsion,
    }


def _surface_from(d: dict) -> SurfaceData:
    return SurfaceData(
        d["kind"],
        _unints(d["class"]),
        int(d["genus"]),
        int(d["positive_double_points"]),
        int(d["negative_double_points"]),
        bool(d["non_torsion"]),
    )


def _key(k) -> dict:
    return {"manifold": k[0], "c1": _ints(k[1])}


def _unkey(d) -> tuple[str, tuple[int, ...]]:
    return (d["manifold"], _unints(d["c1"]))


def _sort_key(k):
    return (k[0], k[1])


def to_dict(kb: KnowledgeBase) -> dict:
    bf = [
        {**_key(k), "state": st.value, **_prov(p)}
        for k, (st, p) in sorted(kb.bf.items(), key=lambda kv: _sort_key(kv[0]))
    ]
    sw = []
    for k, (f, p) in sorted(kb.sw.items(), key=lambda kv: _sort_key(kv[0])):
        e = {**_key(k), **_prov(p)}
        if f.value is not None:
            e["value"] = str(f.value)
        if f.parity is not None:
            e["parity"] = f.parity
        sw.append(e)
    flags = [
        {"manifold": n, "flag": f, "value": v, **_prov(p)} for (n, f), (v, p) in sorted(kb.flags.items())
    ]
    return {
        "version": FORMAT_VERSION,
        "manifolds": {name: descriptor_to_dict(X) for name, X in sorted(kb.manifolds.items())},
        "facts": {"bf": bf, "sw": sw, "flags": flags},
        "pairs": [{"small": _key(a), "large": _key(b)} for a, b in sorted(kb.pairs)],
        "surfaces": {n: [_surface_to_dict(S) for S in ss] for n, ss in sorted(kb.surfaces.items())},
        "watch": [_key(k) for k in sorted(kb.watch)],
        "history": list(kb.history),
    }


def from_dict(data: dict) -> KnowledgeBase:
    kb = KnowledgeBase()
    kb.manifolds = _descriptors_from(data.get("manifolds") or {})
    facts = data.get("facts") or {}
    for e in facts.get("bf", ()):
        kb.bf[_unkey(e)] = (BF(e["state"]), _unprov(e))
    for e in facts.get("sw", ()):
        v = int(e["value"]) if "value" in e else None
        kb.sw[_unkey(e)] = (SWFact(v, e.get("parity")), _unprov(e))
    for e in facts.get("flags", ()):
        kb.flags[(e["manifold"], e["flag"])] = (bool(e["value"]), _unprov(e))
    kb.pairs = [(_unkey(p["small"]), _unkey(p["large"])) for p in data.get("pairs", ())]
    kb.surfaces = {n: [_surface_from(s) for s in ss] for n, ss in (data.get("surfaces") or {}).items()}
    kb.watch = {_unkey(k) for k in data.get("watch", ())}
    kb.history = list(data.get("history", ()))
    return kb


def dumps(kb: KnowledgeBase) -> str:
    return yaml.safe_dump(to_dict(kb), sort_keys=True, default_flow_style=False, allow_unicode=True)


def loads(text: str) -> KnowledgeBase:
    data = yaml.safe_load(text) or {}
    if not isinstance(data, dict):
        raise ValueError("a session file must hold a mapping")
    return from_dict(data)


@contextmanager
def locked_session(path: str, create: bool = False) -> Iterator[list]:
    """Open ``path`` under an exclusive advisory lock.

    Yields a one-element list holding the knowledge base.  Whatever the
    list holds when the block exits without an error is written back.
    """
    if not create and not os.path.exists(path):
        raise FileNotFoundError(f"session file {path!r} does not exist")
    with open(path, "a+", encoding="utf-8") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            fh.seek(0)
            text = fh.read()
            box = [loads(text) if text.strip() else KnowledgeBase()]
            yield box
            out = dumps(box[0])
            if out != text:
                fh.seek(0)
                fh.truncate()
                fh.write(out)
                fh.flush()
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)
