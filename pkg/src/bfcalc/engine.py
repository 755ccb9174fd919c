"""Monotone inference over Bauer-Furuta and Seiberg-Witten facts.

A :class:`KnowledgeBase` holds registered manifold descriptors, facts keyed by
``(manifold name, c1)`` and manifold-level flags.  :func:`infer` applies the
rule set until nothing changes.  Every derived fact records the rule that
produced it and the facts it used.

Invariant states form a small lattice::

    Unknown < Nonzero < NonzeroTorsion
                      < NonzeroFree
    Unknown < Zero

Facts only move up.  Joining Zero with a nonzero state, or torsion with
free, raises :class:`~bfcalc.errors.Inconsistent`.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .abelian import FgAbGroup
from .catalog import EXTERNAL_AXIOMS, lookup
from .cohomotopy import check_range, cp_cohomotopy, restriction_map
from .errors import (
    BFCalcError,
    Inconsistent,
    OutOfRange,
    PreconditionViolation,
    Unsupported,
)
from .fourman import (
    ManifoldDescriptor,
    SpincStructure,
    SurfaceData,
    lift_candidates,
    log_transform,
    restrict_to_blowdown,
    virtual_dimension,
)

Key = tuple[str, tuple[int, ...]]


class BF(str, Enum):
    ZERO = "Zero"
    NONZERO_TORSION = "NonzeroTorsion"
    NONZERO_FREE = "NonzeroFree"
    NONZERO = "Nonzero"
    UNKNOWN = "Unknown"

    @property
    def nonzero(self) -> bool:
        return self in (BF.NONZERO, BF.NONZERO_TORSION, BF.NONZERO_FREE)

    def __str__(self) -> str:
        return self.value


def join(a: BF, b: BF) -> Optional[BF]:
    """Least upper bound, or None when the states contradict each other."""
    if a == b or b == BF.UNKNOWN:
        return a
    if a == BF.UNKNOWN:
        return b
    if BF.ZERO in (a, b):
        return None
    if a == BF.NONZERO:
        return b
    if b == BF.NONZERO:
        return a
    return None


@dataclass(frozen=True)
class SWFact:
    """An integer value, a parity, or both."""

    value: Optional[int] = None
    parity: Optional[str] = None  # "odd" / "even"

    def __post_init__(self):
        if self.parity not in (None, "odd", "even"):
            raise ValueError("parity must be 'odd' or 'even'")
        if self.value is not None:
            par = "odd" if self.value % 2 else "even"
            if self.parity not in (None, par):
                raise ValueError(f"value {self.value} is not {self.parity}")
            object.__setattr__(self, "parity", par)

    @property
    def nonzero(self) -> bool:
        return self.parity == "odd" or (self.value is not None and self.value != 0)

    def __str__(self) -> str:
        return str(self.value) if self.value is not None else (self.parity or "unknown")

    @staticmethod
    def parse(text: str) -> "SWFact":
        t = text.strip().lower()
        if t in ("odd", "even"):
            return SWFact(parity=t)
        return SWFact(value=int(t))


def join_sw(a: SWFact, b: SWFact) -> Optional[SWFact]:
    if a.value is not None and b.value is not None and a.value != b.value:
        return None
    if a.parity and b.parity and a.parity != b.parity:
        return None
    value = a.value if a.value is not None else b.value
    return SWFact(value, a.parity or b.parity)


@dataclass(frozen=True)
class Provenance:
    rule: str
    inputs: tuple[str, ...] = ()

    def __str__(self) -> str:
        s = f"BY {self.rule}"
        if self.inputs:
            s += " FROM " + "; ".join(self.inputs)
        return s


ASSERTED = "asserted"


def fmt_key(key: Key) -> str:
    name, c = key
    if c and not any(c):
        return f"{name}, 0"
    return f"{name}, [{','.join(map(str, c))}]"


def bf_ref(key: Key, state: BF) -> str:
    return f"BF({fmt_key(key)}) = {state}"


def sw_ref(key: Key, fact: SWFact) -> str:
    return f"SW({fmt_key(key)}) = {fact}"


# flag names
SYMPLECTIC = "symplectic"
BLOWUP_SIMPLE = "bf_blowup_simple"
SW_SIMPLE = "sw_simple"
MOD2_SIMPLE = "mod2_sw_simple"
CUP_CONDITION = "cup_product_condition"


def homogeneous(d: int) -> str:
    return f"bf_homogeneous({d})"


@dataclass(frozen=True)
class BFValue:
    state: BF
    group: Optional[FgAbGroup]
    provenance: Optional[Provenance] = None

    def __str__(self) -> str:
        return str(self.state)


@dataclass
class Update:
    kind: str  # "bf", "sw", "flag", "watch", "pair"
    key: object
    value: object = None
    prov: Optional[Provenance] = None


@dataclass
class KnowledgeBase:
    manifolds: dict[str, ManifoldDescriptor] = field(default_factory=dict)
    bf: dict[Key, tuple[BF, Provenance]] = field(default_factory=dict)
    sw: dict[Key, tuple[SWFact, Provenance]] = field(default_factory=dict)
    flags: dict[tuple[str, str], tuple[bool, Provenance]] = field(default_factory=dict)
    pairs: list[tuple[Key, Key]] = field(default_factory=list)
    surfaces: dict[str, list[SurfaceData]] = field(default_factory=dict)
    watch: set[Key] = field(default_factory=set)
    history: list[str] = field(default_factory=list)
    _dims: dict = field(default_factory=dict, repr=False, compare=False)

    def copy(self) -> "KnowledgeBase":
        kb = copy.copy(self)
        kb.manifolds = dict(self.manifolds)
        kb.bf = dict(self.bf)
        kb.sw = dict(self.sw)
        kb.flags = dict(self.flags)
        kb.pairs = list(self.pairs)
        kb.surfaces = {k: list(v) for k, v in self.surfaces.items()}
        kb.watch = set(self.watch)
        kb.history = list(self.history)
        kb._dims = self._dims  # cache of pure values, safe to share
        return kb

    # -- lookups ---------------------------------------------------------

    def manifold(self, name: str) -> ManifoldDescriptor:
        try:
            return self.manifolds[name]
        except KeyError:
            raise PreconditionViolation(f"manifold {name!r} is not registered") from None

    def structure(self, key: Key) -> SpincStructure:
        return SpincStructure(self.manifold(key[0]), key[1])

    def dim(self, key: Key) -> int:
        d = self._dims.get(key)
        if d is None:
            d = self._dims[key] = virtual_dimension(self.structure(key))
        return d

    def state(self, key: Key) -> BF:
        return self.bf.get(key, (BF.UNKNOWN, None))[0]

    def sw_fact(self, key: Key) -> Optional[SWFact]:
        entry = self.sw.get(key)
        return entry[0] if entry else None

    def flag(self, name: str, flag: str) -> Optional[bool]:
        entry = self.flags.get((name, flag))
        return entry[0] if entry else None

    def is_symplectic(self, name: str) -> bool:
        return self.manifold(name).symplectic or self.flag(name, SYMPLECTIC) is True

    def group(self, key: Key) -> Optional[FgAbGroup]:
        """pi^{b-1}(CP^{k-1}) with k = (d + 1 + b2+)/2, when the tables cover it."""
        X = self.manifold(key[0])
        if X.b1 != 0:
            return None
        d = self.dim(key)
        num = d + 1 + X.b2_plus
        if d < 0 or num % 2 or num // 2 < 1:
            return None
        try:
            return cp_cohomotopy(num // 2 - 1, d)
        except BFCalcError:
            return None

    def torsion_type(self, key: Key) -> Optional[bool]:
        """True if the invariant's group is torsion, False if torsion free."""
        X = self.manifold(key[0])
        if X.b1 != 0:
            return None
        d = self.dim(key)
        if d >= 0 and d % 2 == 1:
            return True  # rationally the group is H^{odd}(CP^N; Q) = 0
        g = self.group(key)
        if g is None:
            return None
        if g.is_torsion():
            return True
        if not g.torsion:
            return False
        return None

    def value(self, key: Key) -> BFValue:
        state, prov = self.bf.get(key, (BF.UNKNOWN, None))
        return BFValue(state, self.group(key), prov)


# ---------------------------------------------------------------------------
# registration and assertion


def _related(X: ManifoldDescriptor) -> Iterator[ManifoldDescriptor]:
    yield from X.pieces
    if X.blowup_of is not None:
        yield X.blowup_of
    if X.blowdown is not None:
        yield X.blowdown.parent
    if X.log is not None:
        yield X.log.parent


def _register(kb: KnowledgeBase, X: ManifoldDescriptor) -> None:
    old = kb.manifolds.get(X.name)
    if old is not None:
        if old != X:
            raise PreconditionViolation(f"a different manifold named {X.name!r} is registered")
        return
    kb.manifolds[X.name] = X
    for Y in _related(X):
        _register(kb, Y)


def add_manifold(kb: KnowledgeBase, X: ManifoldDescriptor | str) -> KnowledgeBase:
    """Register ``X`` (or a catalog name) together with everything it is built from."""
    if isinstance(X, str):
        X = lookup(X)
    kb = kb.copy()
    _register(kb, X)
    return kb


def _checked_key(kb: KnowledgeBase, name: str, c1: Sequence[int]) -> Key:
    s = kb.structure((name, tuple(int(x) for x in c1)))
    if not s.is_characteristic():
        raise PreconditionViolation(f"{list(c1)} is not characteristic on {name}")
    return (name, s.c1)


def _apply(kb: KnowledgeBase, u: Update) -> bool:
    """Merge one update into ``kb`` in place; report whether anything changed."""
    if u.kind == "watch":
        if u.key in kb.watch:
            return False
        kb.watch.add(u.key)
        return True
    if u.kind == "pair":
        if u.key in kb.pairs:
            return False
        kb.pairs.append(u.key)
        kb.watch.update(u.key)
        return True
    if u.kind == "bf":
        key, new = u.key, u.value
        old, old_prov = kb.bf.get(key, (BF.UNKNOWN, None))
        merged = join(old, new)
        if merged is None:
            raise Inconsistent(
                f"BF({fmt_key(key)}) cannot be both {old} and {new}",
                ((bf_ref(key, old), old_prov), (bf_ref(key, new), u.prov)),
            )
        tt = kb.torsion_type(key) if merged in (BF.NONZERO_FREE, BF.NONZERO_TORSION) else None
        if (merged == BF.NONZERO_FREE and tt is True) or (merged == BF.NONZERO_TORSION and tt is False):
            raise Inconsistent(
                f"BF({fmt_key(key)}) = {merged} but the group {kb.group(key)} "
                f"is {'torsion' if tt else 'torsion free'}",
                ((bf_ref(key, merged), u.prov if merged == new else old_prov),),
            )
        fresh = key not in kb.watch
        kb.watch.add(key)
        if merged == old:
            return fresh
        kb.bf[key] = (merged, u.prov)
        return True
    if u.kind == "sw":
        key, new = u.key, u.value
        entry = kb.sw.get(key)
        if entry is None:
            kb.sw[key] = (new, u.prov)
            kb.watch.add(key)
            return True
        merged = join_sw(entry[0], new)
        if merged is None:
            raise Inconsistent(
                f"SW({fmt_key(key)}) cannot be both {entry[0]} and {new}",
                ((sw_ref(key, entry[0]), entry[1]), (sw_ref(key, new), u.prov)),
            )
        if merged == entry[0]:
            return False
        kb.sw[key] = (merged, u.prov)
        return True
    if u.kind == "flag":
        entry = kb.flags.get(u.key)
        if entry is None:
            kb.flags[u.key] = (u.value, u.prov)
            return True
        if entry[0] != u.value:
            name, flag = u.key
            raise Inconsistent(
                f"flag {flag} on {name} cannot be both {entry[0]} and {u.value}",
                ((f"{flag}({name}) = {entry[0]}", entry[1]), (f"{flag}({name}) = {u.value}", u.prov)),
            )
        return False
    raise ValueError(f"unknown update kind {u.kind!r}")


def assert_fact(
    kb: KnowledgeBase,
    manifold: str,
    c1: Sequence[int],
    bf: BF | str | None = None,
    sw: SWFact | None = None,
    note: str = ASSERTED,
) -> KnowledgeBase:
    """Merge a user-supplied BF state and/or SW value for ``(manifold, c1)``."""
    if manifold not in kb.manifolds:
        kb = add_manifold(kb, manifold)
    else:
        kb = kb.copy()
    key = _checked_key(kb, manifold, c1)
    prov = Provenance(note)
    kb.watch.add(key)
    if bf is not None:
        _apply(kb, Update("bf", key, BF(bf), prov))
    if sw is not None:
        _apply(kb, Update("sw", key, sw, prov))
    kb.history.append(f"assert {fmt_key(key)} bf={bf} sw={sw}")
    return kb


def assert_flag(kb: KnowledgeBase, manifold: str, flag: str, value: bool = True) -> KnowledgeBase:
    if manifold not in kb.manifolds:
        kb = add_manifold(kb, manifold)
    else:
        kb = kb.copy()
    _apply(kb, Update("flag", (manifold, flag), bool(value), Provenance(ASSERTED)))
    kb.history.append(f"flag {manifold} {flag}={value}")
    return kb


def declare_common_complement(kb: KnowledgeBase, s1: Key, s2: Key) -> KnowledgeBase:
    """Record that (X1, s1) and (X2, s2) share a complement X with X_i = X u N_i,
    where each N_i has b1 = b2+ = 0.  The declaration is trusted."""
    kb = kb.copy()
    k1 = _checked_key(kb, *s1)
    k2 = _checked_key(kb, *s2)
    X1, X2 = kb.manifold(k1[0]), kb.manifold(k2[0])
    if X1.b2_plus != X2.b2_plus or X1.b1 != X2.b1:
        raise PreconditionViolation("common-complement pairs must have equal b1 and b2+")
    if kb.dim(k1) > kb.dim(k2):
        k1, k2 = k2, k1
    _apply(kb, Update("pair", (k1, k2)))
    kb.history.append(f"pair {fmt_key(k1)} ~ {fmt_key(k2)}")
    return kb


def add_surface(kb: KnowledgeBase, manifold: str, surface: SurfaceData) -> KnowledgeBase:
    kb = kb.copy() if manifold in kb.manifolds else add_manifold(kb, manifold)
    surface.self_intersection(kb.manifold(manifold))  # validates the class length
    kb.surfaces.setdefault(manifold, []).append(surface)
    return kb


def load_catalog_axioms(kb: KnowledgeBase) -> KnowledgeBase:
    """Seed the externally supplied facts (symplectic non-vanishing)."""
    for name, c1, value, note in EXTERNAL_AXIOMS:
        kb = assert_fact(kb, name, c1, sw=SWFact(value), note=f"axiom: {note}")
    return kb


# ---------------------------------------------------------------------------
# condition (*)


def condition_star(kb: KnowledgeBase, manifold: str, c1: Sequence[int]) -> Optional[bool]:
    """b1 = 0, b2+ >= 2, d <= 3 and, when d > 0, a torsion invariant."""
    key = (manifold, tuple(c1))
    X = kb.manifold(manifold)
    if X.b1 != 0 or X.b2_plus < 2:
        return False
    d = kb.dim(key)
    if d > 3:
        return False
    if d <= 0:
        return True
    st = kb.state(key)
    if st in (BF.ZERO, BF.NONZERO_TORSION):
        return True
    if st == BF.NONZERO_FREE:
        return False
    tt = kb.torsion_type(key)
    if tt is True:
        return True
    return None


# ---------------------------------------------------------------------------
# relations derived from the way manifolds are built


@dataclass(frozen=True)
class Relation:
    """BF(small) = I_delta BF(large) with d(small) <= d(large)."""

    kind: str
    small: Key
    large: Key


def _pieces_of(kb: KnowledgeBase, key: Key) -> list[Key]:
    X = kb.manifold(key[0])
    return [(P.name, key[1][sl]) for P, sl in zip(X.pieces, X.piece_slices())]


def _blowup_relation(kb: KnowledgeBase, key: Key) -> Optional[tuple[Relation, int]]:
    Y = kb.manifold(key[0])
    if Y.blowup_of is None:
        return None
    e = key[1][-1]
    r = (e - 1) // 2
    base = (Y.blowup_of.name, key[1][:-1])
    return Relation("blowup", key, base), r


def _log_representations(X: ManifoldDescriptor, c: tuple[int, ...]) -> list[tuple[tuple[int, ...], int]]:
    """All (L, t) with L + t f equal to the class c and t a valid coefficient."""
    p, alpha = X.log.p, X.log.alpha
    L, t = c[:-1], c[-1]
    valid = set(range(-(p - 1), p, 2))
    out = []
    # (L, t) ~ (L + j alpha, t - j p); j ranges over the shifts landing in `valid`
    for j in range(-((p - 1 - t) // p), (t + p - 1) // p + 1):
        tj = t - j * p
        if tj in valid:
            out.append((tuple(a + j * b for a, b in zip(L, alpha)), tj))
    return out


def _log_ok(kb: KnowledgeBase, X: ManifoldDescriptor) -> bool:
    return X.h1_no_2torsion and X.log.parent.h1_no_2torsion


def relations(kb: KnowledgeBase) -> list[Relation]:
    out = [Relation("common-complement", a, b) for a, b in kb.pairs]
    for key in sorted(kb.watch):
        X = kb.manifold(key[0])
        br = _blowup_relation(kb, key)
        if br:
            out.append(br[0])
        if X.blowdown is not None and X.h1_no_2torsion and X.blowdown.parent.h1_no_2torsion:
            cands = lift_candidates(SpincStructure(X, key[1]))
            if len(cands) == 1:
                out.append(Relation("rational-blowdown", key, (X.blowdown.parent.name, cands[0].c1)))
        if X.log is not None and _log_ok(kb, X):
            for L, _t in _log_representations(X, key[1]):
                base = (X.log.parent.name, L)
                if kb.structure(base).is_characteristic():
                    out.append(Relation("log-transform", key, base))
    return out


# ---------------------------------------------------------------------------
# rules


def _bf(key: Key, state: BF, rule: str, *inputs: str) -> Update:
    return Update("bf", key, state, Provenance(rule, tuple(dict.fromkeys(inputs))))


def _manifold_facts(kb: KnowledgeBase, key: Key) -> str:
    X = kb.manifold(key[0])
    return f"{X.name}: b1={X.b1}, b2+={X.b2_plus}, d={kb.dim(key)}"


def rule_forced(kb: KnowledgeBase) -> Iterator[Update]:
    for key in sorted(kb.watch):
        X = kb.manifold(key[0])
        d = kb.dim(key)
        if X.b2_plus == 0:
            yield _bf(key, BF.NONZERO, "negative-definite-nonvanishing", _manifold_facts(kb, key))
        elif d < 0:
            yield _bf(key, BF.ZERO, "negative-dimension-vanishing", _manifold_facts(kb, key))
        elif X.b2_plus == 1 and X.b1 == 0:
            yield _bf(key, BF.ZERO, "b2plus-one-vanishing", _manifold_facts(kb, key))
        else:
            g = kb.group(key)
            if g is not None and g.is_trivial():
                yield _bf(key, BF.ZERO, "trivial-group-vanishing", _manifold_facts(kb, key), "group 0")


def rule_torsion_type(kb: KnowledgeBase) -> Iterator[Update]:
    for key, (st, _) in sorted(kb.bf.items()):
        if st != BF.NONZERO:
            continue
        tt = kb.torsion_type(key)
        if tt is None:
            continue
        state = BF.NONZERO_TORSION if tt else BF.NONZERO_FREE
        yield _bf(key, state, "group-torsion-type", bf_ref(key, st), f"group {kb.group(key)}, d={kb.dim(key)}")


def rule_sw_consistency(kb: KnowledgeBase) -> Iterator[Update]:
    for key in sorted(kb.watch):
        X = kb.manifold(key[0])
        if X.b1 != 0 or X.b2_plus < 2 or kb.dim(key) != 0:
            continue
        sw = kb.sw_fact(key)
        st = kb.state(key)
        if sw is not None and sw.nonzero:
            yield _bf(key, BF.NONZERO, "sw-nonzero-implies-bf-nonzero", sw_ref(key, sw))
        if st == BF.ZERO:
            yield Update("sw", key, SWFact(0), Provenance("bf-zero-implies-sw-zero", (bf_ref(key, st),)))


def rule_transfer(kb: KnowledgeBase) -> Iterator[Update]:
    for rel in relations(kb):
        yield from _transfer(kb, rel)


def _transfer(kb: KnowledgeBase, rel: Relation) -> Iterator[Update]:
    small, large = rel.small, rel.large
    yield Update("watch", small)
    yield Update("watch", large)
    d1, d2 = kb.dim(small), kb.dim(large)
    s1, s2 = kb.state(small), kb.state(large)
    kind = rel.kind
    if d1 > d2:  # pragma: no cover - relations are built small-first
        return
    if d1 == d2:
        if s2 != BF.UNKNOWN:
            yield _bf(small, s2, f"{kind}-equal-dimension", bf_ref(large, s2))
        if s1 != BF.UNKNOWN:
            yield _bf(large, s1, f"{kind}-equal-dimension", bf_ref(small, s1))
        return
    if s2 == BF.ZERO:
        yield _bf(small, BF.ZERO, f"{kind}-vanishing-transfer", bf_ref(large, s2))
    if s1.nonzero:
        yield _bf(large, BF.NONZERO, f"{kind}-nonvanishing-transfer", bf_ref(small, s1))
    X2 = kb.manifold(large[0])
    if X2.b1 == 0 and kb.manifold(small[0]).b1 == 0 and (d2, d1) == (3, 1):
        yield _bf(small, BF.ZERO, "trivial-restriction-3-to-1", f"d: {d2} -> {d1}")
    cs = condition_star(kb, *large)
    if cs is True:
        yield _bf(small, BF.ZERO, "vanishing-under-condition-star", f"condition (*) holds for ({fmt_key(large)})", f"d: {d2} -> {d1}")
    if kind == "blowup" and kb.flag(large[0], BLOWUP_SIMPLE) is True:
        yield _bf(small, BF.ZERO, "blowup-simple-type-vanishing", f"{BLOWUP_SIMPLE}({large[0]})")
    # the induced map on cohomotopy, where the tables determine it
    num = d2 + 1 + X2.b2_plus
    if X2.b1 == 0 and num % 2 == 0 and (d2 - d1) % 2 == 0 and d1 >= 0:
        n = num // 2 - 1
        try:
            check_range(n, d2)
            f = restriction_map(n, d2, (d2 - d1) // 2)
        except (OutOfRange, Unsupported):
            return
        if f.is_zero():
            yield _bf(small, BF.ZERO, "restriction-map-zero", f"I: {f.source} -> {f.target} is zero")
        elif s2 == BF.NONZERO_TORSION and _kills_torsion(f):
            yield _bf(
                small, BF.ZERO, "restriction-map-kills-torsion", bf_ref(large, s2), f"I: {f.source} -> {f.target}"
            )


def _kills_torsion(f) -> bool:
    n = f.source.ngens
    return all(not any(f([int(i == j) for i in range(n)])) for j in range(len(f.source.torsion)))


def rule_gluing(kb: KnowledgeBase) -> Iterator[Update]:
    for key in sorted(kb.watch):
        X = kb.manifold(key[0])
        if len(X.pieces) < 2:
            continue
        pieces = _pieces_of(kb, key)
        for pk in pieces:
            yield Update("watch", pk)
        st = kb.state(key)
        if st.nonzero:
            for pk in pieces:
                yield _bf(pk, BF.NONZERO, "gluing-nonvanishing-restriction", bf_ref(key, st))
        for pk in pieces:
            if kb.state(pk) == BF.ZERO:
                yield _bf(key, BF.ZERO, "gluing-vanishing", bf_ref(pk, BF.ZERO))
        yield from _connected_sum_rule(kb, key, X, pieces)


def _connected_sum_rule(kb: KnowledgeBase, key: Key, X: ManifoldDescriptor, pieces: list[Key]) -> Iterator[Update]:
    """Non-vanishing criterion for gluings of pieces with b1 = 0 and d = 0."""
    m = len(pieces)
    P = [kb.manifold(pk[0]) for pk in pieces]
    if any(p.b1 != 0 for p in P) or any(kb.dim(pk) != 0 for pk in pieces):
        return
    refs = [f"{fmt_key(pk)}: b2+={p.b2_plus}, d=0" for pk, p in zip(pieces, P)]
    failures = []
    for pk, p in zip(pieces, P):
        if p.b2_plus % 4 != 3:
            failures.append(f"b2+({p.name}) = {p.b2_plus} is not 3 mod 4")
        sw = kb.sw_fact(pk)
        if sw is not None and sw.parity == "even":
            failures.append(sw_ref(pk, sw) + " is even")
    if m > 4:
        failures.append(f"{m} pieces exceed 4")
    if m == 4 and X.b2_plus % 8 != 4:
        failures.append(f"b2+({X.name}) = {X.b2_plus} is not 4 mod 8")
    if failures:
        yield _bf(key, BF.ZERO, "connected-sum-vanishing", *failures)
        return
    sws = [kb.sw_fact(pk) for pk in pieces]
    if all(sw is not None and sw.parity == "odd" for sw in sws):
        refs += [sw_ref(pk, sw) for pk, sw in zip(pieces, sws)]
        # the nonzero invariant satisfies condition (*), so it is torsion
        yield _bf(key, BF.NONZERO_TORSION, "connected-sum-nonvanishing", *refs)


def rule_blowup_generation(kb: KnowledgeBase) -> Iterator[Update]:
    """Watch the +-E extensions of nonzero classes on registered blowups."""
    ups: dict[str, list[str]] = {}
    for Y in kb.manifolds.values():
        if Y.blowup_of is not None:
            ups.setdefault(Y.blowup_of.name, []).append(Y.name)
    if not ups:
        return
    for key, (st, _) in sorted(kb.bf.items()):
        if st.nonzero:
            for yname in ups.get(key[0], ()):
                for e in (1, -1):
                    yield Update("watch", (yname, key[1] + (e,)))


def rule_log_generation(kb: KnowledgeBase) -> Iterator[Update]:
    logs = [Y for Y in kb.manifolds.values() if Y.log is not None and _log_ok(kb, Y)]
    if not logs:
        return
    for key, (st, _) in sorted(kb.bf.items()):
        if st == BF.UNKNOWN:
            continue
        for Y in logs:
            if Y.log.parent.name == key[0]:
                p = Y.log.p
                for k in range(p):
                    yield Update("watch", (Y.name, key[1] + (2 * k - (p - 1),)))


def rule_log_exclusion(kb: KnowledgeBase) -> Iterator[Update]:
    """Classes on X_(p) outside {L + (2k-(p-1)) f} are never basic."""
    for key in sorted(kb.watch):
        X = kb.manifold(key[0])
        if X.log is None or not _log_ok(kb, X):
            continue
        reps = [r for r in _log_representations(X, key[1]) if kb.structure((X.log.parent.name, r[0])).is_characteristic()]
        if not reps:
            yield _bf(key, BF.ZERO, "log-transform-basic-classes", f"{fmt_key(key)} is not L + (2k-(p-1))f")


def rule_blowdown_generation(kb: KnowledgeBase) -> Iterator[Update]:
    downs = [Y for Y in kb.manifolds.values() if Y.blowdown is not None]
    if not downs:
        return
    for key in sorted(kb.watch):
        for Y in downs:
            if Y.blowdown.parent.name != key[0]:
                continue
            try:
                sp = restrict_to_blowdown(kb.structure(key), Y)
            except PreconditionViolation:
                continue
            yield Update("watch", (Y.name, sp.c1))


def rule_homogeneous(kb: KnowledgeBase) -> Iterator[Update]:
    for key in sorted(kb.watch):
        name = key[0]
        d = kb.dim(key)
        for (fname, flag), (val, _) in kb.flags.items():
            if fname == name and val and flag.startswith("bf_homogeneous("):
                hd = int(flag[len("bf_homogeneous(") : -1])
                if d != hd:
                    yield _bf(key, BF.ZERO, "homogeneous-type-vanishing", f"{flag}({name})", f"d={d}")


def _flag(name: str, flag: str, rule: str, *inputs: str) -> Update:
    return Update("flag", (name, flag), True, Provenance(rule, tuple(inputs)))


def rule_flags(kb: KnowledgeBase) -> Iterator[Update]:
    for name, X in sorted(kb.manifolds.items()):
        if X.is_closed and kb.is_symplectic(name):
            if X.b2_plus - X.b1 > 1:
                yield _flag(name, BLOWUP_SIMPLE, "symplectic-blowup-simple", f"{name} symplectic, b2+ - b1 = {X.b2_plus - X.b1}")
            if X.b2_plus >= 2:
                yield _flag(name, homogeneous(0), "symplectic-homogeneous", f"{name} symplectic, b2+ = {X.b2_plus}")
        for S in kb.surfaces.get(name, ()):
            sq = S.self_intersection(X)
            if S.kind == "embedded" and S.genus > 1 and sq == 2 * S.genus - 2:
                yield _flag(name, BLOWUP_SIMPLE, "embedded-surface-blowup-simple", f"genus {S.genus}, self-intersection {sq}")
            if S.kind == "immersed_sphere" and S.non_torsion and any(S.homology_class):
                p = S.positive_double_points
                if sq == 2 * p - 2 >= 0:
                    yield _flag(name, BLOWUP_SIMPLE, "immersed-sphere-blowup-simple", f"{p} positive double points, self-intersection {sq}")
        if X.glue_kind == "connected_sum" and len(X.pieces) >= 2:
            simple = [P.name for P in X.pieces if kb.flag(P.name, BLOWUP_SIMPLE) is True]
            if simple:
                yield _flag(name, BLOWUP_SIMPLE, "connected-summand-blowup-simple", f"{BLOWUP_SIMPLE}({simple[0]})")
        if len(X.pieces) >= 2:
            dims = []
            for P in X.pieces:
                hs = [f for (n, f), (v, _) in kb.flags.items() if n == P.name and v and f.startswith("bf_homogeneous(")]
                if not hs or P.b2_plus < 1:
                    break
                dims.append(int(sorted(hs)[0][len("bf_homogeneous(") : -1]))
            else:
                hd = sum(dims) + len(dims) - 1
                yield _flag(name, homogeneous(hd), "homogeneous-connected-sum", *(f"{homogeneous(d)}({P.name})" for d, P in zip(dims, X.pieces)))
        if (X.b2_plus - X.b1) % 4 == 3 and kb.flag(name, CUP_CONDITION) is True:
            yield _flag(name, MOD2_SIMPLE, "mod2-simple-type-criterion", f"b2+ - b1 = {X.b2_plus - X.b1}", f"{CUP_CONDITION}({name})")


RULES: tuple[Callable[[KnowledgeBase], Iterable[Update]], ...] = (
    rule_forced,
    rule_torsion_type,
    rule_sw_consistency,
    rule_transfer,
    rule_gluing,
    rule_blowup_generation,
    rule_log_generation,
    rule_log_exclusion,
    rule_blowdown_generation,
    rule_homogeneous,
    rule_flags,
)


def infer(kb: KnowledgeBase, max_rounds: int = 10_000) -> KnowledgeBase:
    """Least fixed point of the rule set.  The input is left untouched."""
    kb = kb.copy()
    for _ in range(max_rounds):
        changed = False
        for rule in RULES:
            for u in list(rule(kb)):
                changed |= _apply(kb, u)
        if not changed:
            return kb
    raise RuntimeError("inference did not converge")  # pragma: no cover


def query(kb: KnowledgeBase, manifold: str, c1: Sequence[int]) -> tuple[KnowledgeBase, BFValue]:
    """Infer with ``(manifold, c1)`` under consideration and report its value."""
    kb = kb.copy() if manifold in kb.manifolds else add_manifold(kb, manifold)
    key = _checked_key(kb, manifold, c1)
    kb.watch.add(key)
    kb = infer(kb)
    return kb, kb.value(key)


def explain(kb: KnowledgeBase, key: Key) -> str:
    st, prov = kb.bf.get(key, (BF.UNKNOWN, None))
    line = f"FACT {bf_ref(key, st)}"
    return f"{line} {prov}" if prov else line


# ---------------------------------------------------------------------------
# basic classes


def basic_classes(kb: KnowledgeBase, manifold: str) -> dict[tuple[int, ...], str]:
    """c1 vectors with status confirmed (BF nonzero) or excluded (BF zero)."""
    out = {}
    for (name, c), (st, _) in kb.bf.items():
        if name == manifold and st != BF.UNKNOWN:
            out[c] = "excluded" if st == BF.ZERO else "confirmed"
    return out


def confirmed_classes(kb: KnowledgeBase, manifold: str) -> set[tuple[int, ...]]:
    return {c for c, s in basic_classes(kb, manifold).items() if s == "confirmed"}


def basic_classes_log_transform(
    kb: KnowledgeBase, X: ManifoldDescriptor | str, fishtail: SurfaceData, p: int
) -> tuple[KnowledgeBase, ManifoldDescriptor, dict[tuple, BF]]:
    """Basic classes of X_(p), one per rational class, with their BF states."""
    if isinstance(X, str):
        X = kb.manifold(X)
    Xp = log_transform(X, fishtail, p)
    if Xp is not X and not _log_ok(kb, Xp):
        raise PreconditionViolation("H_1 must have no 2-torsion on both sides")
    kb = infer(add_manifold(kb, Xp))
    result: dict[tuple, BF] = {}
    seen = set()
    for c in sorted(confirmed_classes(kb, Xp.name)):
        cls = Xp.realize(c)
        if cls not in seen:
            seen.add(cls)
            result[c] = kb.state((Xp.name, c))
    return kb, Xp, result


# ---------------------------------------------------------------------------
# BF dimension


NEG_INF = float("-inf")
POS_INF = float("inf")


@dataclass(frozen=True)
class BoundedBelow:
    """The BF dimension is not determined, but is at least ``bound``."""

    bound: int

    def __str__(self) -> str:
        return f"Unknown(>= {self.bound})"


def _lower_bound(kb: KnowledgeBase, X: ManifoldDescriptor) -> Optional[int]:
    if X.b2_plus < 1:
        return None
    if len(X.pieces) >= 2:
        bounds = [_lower_bound(kb, P) for P in X.pieces]
        if all(b is not None for b in bounds):
            return sum(bounds) + len(bounds) - 1
    return 0


def bf_dimension(kb: KnowledgeBase, manifold: str):
    kb = infer(kb)
    X = kb.manifold(manifold)
    if X.b2_plus == 0:
        return NEG_INF if X.b2_minus else X.b1 - 1
    if X.b2_plus == 1 and X.b1 == 0:
        return POS_INF
    lb = _lower_bound(kb, X)
    if X.b1 == 0 and (lb - (X.b2_plus + 1)) % 2:
        lb += 1  # d has the parity of b2+ + 1
    hom = [
        int(f[len("bf_homogeneous(") : -1])
        for (n, f), (v, _) in kb.flags.items()
        if n == manifold and v and f.startswith("bf_homogeneous(")
    ]
    nonzero = sorted(kb.dim(k) for k, (st, _) in kb.bf.items() if k[0] == manifold and st.nonzero)
    if nonzero:
        m = nonzero[0]
        if m == lb or m in hom:
            return m
        return BoundedBelow(lb)
    return BoundedBelow(lb)


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Verdict:
    kind: str  # "Obstructed", "Consistent", "Unknown", "Violated", "Holds"
    reasons: tuple[str, ...] = ()
    constraints: tuple[str, ...] = ()
    derived: tuple[str, ...] = ()

    def __str__(self) -> str:
        s = self.kind
        if self.reasons:
            s += ": " + "; ".join(self.reasons)
        return s


def _has_odd_sw(kb: KnowledgeBase, P: ManifoldDescriptor) -> Optional[str]:
    for (name, c), (sw, _) in kb.sw.items():
        if name == P.name and sw.parity == "odd" and kb.dim((name, c)) == 0:
            return sw_ref((name, c), sw)
    if kb.is_symplectic(P.name) and P.b2_plus >= 2 and P.b1 == 0 and P.is_closed:
        return f"{P.name} symplectic (odd SW on the canonical class)"
    return None


def _check_pieces(pieces: Sequence[ManifoldDescriptor]) -> None:
    for P in pieces:
        for c in P.boundary:
            if not (c.swf_spherical and c.rational_homology_sphere):
                raise PreconditionViolation(f"{P.name}: boundary {c.label!r} is not an SWF-spherical QHS^3")


def decomposition_verdict(
    kb: KnowledgeBase, X_decomposition: Sequence[ManifoldDescriptor], X_prime: Sequence[ManifoldDescriptor]
) -> Verdict:
    """Compare two gluing decompositions of the same manifold."""
    _check_pieces(X_decomposition)
    _check_pieces(X_prime)
    for P in list(X_decomposition) + list(X_prime):
        if P.name not in kb.manifolds:
            kb = add_manifold(kb, P)
    kb = infer(kb)
    k, l = len(X_decomposition), len(X_prime)
    tot = lambda ps, a: sum(getattr(p, a) for p in ps)  # noqa: E731
    for attr in ("b1", "b2_plus", "b2_minus"):
        if tot(X_decomposition, attr) != tot(X_prime, attr):
            return Verdict("Obstructed", (f"{attr} differs between the decompositions",))
    b2p = tot(X_decomposition, "b2_plus")
    missing = []
    if not 1 <= k <= 4:
        missing.append(f"k = {k} is not in 1..4")
    for P in X_decomposition:
        if P.b1 != 0:
            missing.append(f"b1({P.name}) != 0")
        if P.b2_plus % 4 != 3:
            missing.append(f"b2+({P.name}) = {P.b2_plus} is not 3 mod 4")
        if _has_odd_sw(kb, P) is None:
            missing.append(f"no known d = 0 structure with odd SW on {P.name}")
    if k == 4 and b2p % 8 != 4:
        missing.append(f"b2+ = {b2p} is not 4 mod 8")
    if missing:
        return Verdict("Unknown", tuple(missing))
    if any(P.b2_plus < 1 for P in X_prime):
        return Verdict("Unknown", ("a piece of X' has b2+ = 0",))
    reasons = []
    if k < l:
        reasons.append(f"k >= l fails ({k} < {l})")
    for P in X_prime:
        if P.b2_plus < 2:
            reasons.append(f"b2+({P.name}) = {P.b2_plus} but every piece needs b2+ >= 2")
    if reasons:
        return Verdict("Obstructed", tuple(reasons))
    hom0 = lambda P: kb.flag(P.name, homogeneous(0)) is True  # noqa: E731
    constraints = [f"l <= {k}", "b2+(X'_j) >= 2 for every j"]
    if all(hom0(P) for P in X_decomposition) and all(hom0(P) for P in X_prime):
        if k != l:
            return Verdict("Obstructed", (f"k = l fails ({k} != {l})",))
        for P in X_prime:
            if P.b1 != 0:
                reasons.append(f"b1({P.name}) != 0")
            if P.b2_plus % 4 != 3:
                reasons.append(f"b2+({P.name}) = {P.b2_plus} is not 3 mod 4")
        if reasons:
            return Verdict("Obstructed", tuple(reasons))
        constraints = [f"l = {k}", "b1(X'_j) = 0 and b2+(X'_j) = 3 mod 4 for every j"]
        if l == 4:
            constraints.append("b2+(X') = 4 mod 8")
        constraints.append("some structure on X' restricts to d = 0, odd SW on every piece")
    return Verdict("Consistent", constraints=tuple(constraints))


def adjunction_verdict(
    kb: KnowledgeBase, manifold: str, K: Sequence[int], surface: SurfaceData
) -> tuple[KnowledgeBase, Verdict]:
    """Adjunction-type constraints on a (candidate) basic class ``K``."""
    kb = infer(kb.copy() if manifold in kb.manifolds else add_manifold(kb, manifold))
    X = kb.manifold(manifold)
    key = _checked_key(kb, manifold, K)
    kb.watch.add(key)
    a = surface.homology_class
    sq = surface.self_intersection(X)
    ka = X.pairing(key[1], a)
    if surface.kind == "embedded":
        if sq < 0:
            raise PreconditionViolation("the embedded-surface inequality needs a class of non-negative square")
        chi_minus = max(2 * surface.genus - 2, 0)
        if chi_minus < sq + abs(ka):
            kb = infer(kb)
            upd = _bf(key, BF.ZERO, "adjunction-exclusion", f"chi_-={chi_minus} < {sq} + |{ka}|")
            _apply(kb, upd)
            return kb, Verdict("Violated", (f"chi_- = {chi_minus} < a.a + |a.K| = {sq + abs(ka)}",), derived=(f"{fmt_key(key)} excluded",))
        return kb, Verdict("Holds")
    p = surface.positive_double_points
    if 2 * p - 2 >= abs(ka) + sq:
        return kb, Verdict("Holds")
    if kb.flag(manifold, BLOWUP_SIMPLE) is True:
        kb = infer(kb)
        _apply(kb, _bf(key, BF.ZERO, "immersed-adjunction-blowup-simple", f"2p-2={2 * p - 2} < {abs(ka) + sq}"))
        return kb, Verdict("Violated", (f"2p - 2 = {2 * p - 2} < |K.a| + a.a = {abs(ka) + sq}",), derived=(f"{fmt_key(key)} excluded",))
    if not kb.state(key).nonzero:
        return kb, Verdict("Unknown", ("K is not a confirmed basic class",))
    # the bound fails, so the shifted structure has a nonzero invariant
    sign = 1 if ka >= 0 else -1
    # c1(s +- a*) = c1(s) +- 2 a*, and a* has the coordinates of a
    shifted = tuple(c + 2 * sign * x for c, x in zip(key[1], a))
    nkey = (manifold, shifted)
    kb.watch.add(nkey)
    _apply(kb, _bf(nkey, BF.NONZERO, "immersed-adjunction-alternative", bf_ref(key, kb.state(key)), f"2p-2={2 * p - 2} < {abs(ka) + sq}"))
    kb = infer(kb)
    return kb, Verdict("Holds", ("bound fails; alternative branch applies",), derived=(bf_ref(nkey, kb.state(nkey)),))


def simple_type_verdict(kb: KnowledgeBase, manifold: str) -> dict[str, Optional[bool]]:
    """Tri-state verdicts for the type flags of ``manifold``."""
    kb = infer(kb.copy() if manifold in kb.manifolds else add_manifold(kb, manifold))
    X = kb.manifold(manifold)
    out: dict[str, Optional[bool]] = {}
    out[BLOWUP_SIMPLE] = kb.flag(manifold, BLOWUP_SIMPLE)
    if out[BLOWUP_SIMPLE] is None:
        for Y in kb.manifolds.values():
            if Y.blowup_of is not None and Y.blowup_of.name == manifold:
                for (n, c), (st, _) in kb.bf.items():
                    if n == Y.name and st.nonzero and c[-1] not in (1, -1):
                        out[BLOWUP_SIMPLE] = False
    hom = sorted(
        int(f[len("bf_homogeneous(") : -1])
        for (n, f), (v, _) in kb.flags.items()
        if n == manifold and v and f.startswith("bf_homogeneous(")
    )
    dims = {kb.dim(k) for k, (st, _) in kb.bf.items() if k[0] == manifold and st.nonzero}
    for d in sorted(set(hom) | dims):
        out[homogeneous(d)] = True if d in hom else (False if dims - {d} else None)
    out[MOD2_SIMPLE] = kb.flag(manifold, MOD2_SIMPLE)
    return out
