"""Core term algebra: constructors, the subterm and interm relations,
theory descriptors, purity, and the xor normal form.

All values are immutable after construction and every operation is a pure
function, so terms can be shared freely across threads.  Normalization is
always explicit: constructors never flatten nested xors, never drop the
unity element and never cancel duplicate summands.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Iterator


class Term:
    """Base class for all term constructors."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Const(Term):
    name: str


@dataclass(frozen=True, slots=True)
class TagConst(Term):
    """Tag constant with a structured numeric path, rendered ``2.1``, ``3.3.1``.

    Tags behave like ordinary constants for unification (equal iff the paths
    are identical); the structured path lets the auto-tagger extend paths
    deterministically for nested xor terms.
    """

    path: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.path:
            raise ValueError("tag path must be nonempty")
        if any(part < 1 for part in self.path):
            raise ValueError("tag path components must be positive integers")


@dataclass(frozen=True, slots=True)
class Zero(Term):
    """The xor unity element.  A dedicated constructor, not a constant named
    ``0``, so unity checks cannot be spoofed by a user-defined constant."""


ZERO = Zero()


@dataclass(frozen=True, slots=True)
class Seq(Term):
    items: tuple[Term, ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("sequence must be nonempty")


@dataclass(frozen=True, slots=True)
class Penc(Term):
    """Public-key encryption of ``body`` under ``key``."""

    body: Term
    key: Term


@dataclass(frozen=True, slots=True)
class Senc(Term):
    """Symmetric encryption of ``body`` under ``key``."""

    body: Term
    key: Term


@dataclass(frozen=True, slots=True)
class Pk(Term):
    agent: Term


@dataclass(frozen=True, slots=True)
class Sh(Term):
    a: Term
    b: Term


@dataclass(frozen=True, slots=True)
class Xor(Term):
    """Variadic xor node.  Width is at least two at construction; nested xors
    stay nested until :func:`acun_normal_form` is applied explicitly."""

    items: tuple[Term, ...]

    def __post_init__(self) -> None:
        if len(self.items) < 2:
            raise ValueError("xor needs at least two summands")


OP_SEQ = "seq"
OP_PENC = "penc"
OP_SENC = "senc"
OP_PK = "pk"
OP_SH = "sh"
OP_XOR = "xor"

_HEAD = {Seq: OP_SEQ, Penc: OP_PENC, Senc: OP_SENC, Pk: OP_PK, Sh: OP_SH, Xor: OP_XOR}

STD_OPERATORS = frozenset({OP_SEQ, OP_PENC, OP_SENC, OP_PK, OP_SH})
XOR_OPERATORS = frozenset({OP_XOR})


class Theory(Enum):
    """Equality/unification regime selector.

    STD and FREE_XOR contain only identity equations, so equality is
    syntactic.  ACUN adds associativity, commutativity, unit and nilpotence
    for xor; COMBINED is the disjoint union STD + ACUN.
    """

    STD = "std"
    ACUN = "acun"
    FREE_XOR = "free-xor"
    COMBINED = "combined"

    @property
    def operators(self) -> frozenset[str]:
        return _THEORY_OPS[self]


_THEORY_OPS = {
    Theory.STD: STD_OPERATORS,
    Theory.ACUN: XOR_OPERATORS,
    Theory.FREE_XOR: XOR_OPERATORS,
    Theory.COMBINED: STD_OPERATORS | XOR_OPERATORS,
}


def head_op(t: Term) -> str | None:
    """Operator name of the head constructor, or None for atoms and variables."""
    return _HEAD.get(type(t))


def is_atom(t: Term) -> bool:
    """True for variables, constants, tag constants and the unity element."""
    return type(t) not in _HEAD


def children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, (Seq, Xor)):
        return t.items
    if isinstance(t, (Penc, Senc)):
        return (t.body, t.key)
    if isinstance(t, Pk):
        return (t.agent,)
    if isinstance(t, Sh):
        return (t.a, t.b)
    return ()


def rebuild(t: Term, items: tuple[Term, ...]) -> Term:
    """Rebuild a non-atomic term with new children (same constructor)."""
    cls = type(t)
    if cls is Seq:
        return Seq(items)
    if cls is Xor:
        return Xor(items)
    if cls is Penc:
        return Penc(items[0], items[1])
    if cls is Senc:
        return Senc(items[0], items[1])
    if cls is Pk:
        return Pk(items[0])
    if cls is Sh:
        return Sh(items[0], items[1])
    raise TypeError(f"cannot rebuild atom {t!r}")


def iter_subterms(t: Term) -> Iterator[Term]:
    """All subterms of ``t`` in preorder, including ``t`` itself (with repeats)."""
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        stack.extend(reversed(children(u)))


def is_subterm(t: Term, u: Term) -> bool:
    """Reflexive subterm relation: ``t`` occurs somewhere in ``u``'s tree."""
    return any(t == s for s in iter_subterms(u))


def subterms_of_set(terms: Iterable[Term]) -> set[Term]:
    """Closure of a set of terms under the subterm relation."""
    out: set[Term] = set()
    for t in terms:
        out.update(iter_subterms(t))
    return out


def interms(t: Term) -> set[Term]:
    """Direct xor summands of ``t``; a non-xor term is its own sole interm."""
    if isinstance(t, Xor):
        return set(t.items)
    return {t}


def interm_occurrences(t: Term) -> tuple[Term, ...]:
    """Like :func:`interms` but keeps duplicate occurrences and order."""
    if isinstance(t, Xor):
        return t.items
    return (t,)


def is_pure(t: Term, th: Theory) -> bool:
    """True iff every non-atomic subterm's head operator belongs to ``th``.

    Variables, constants, tags and the unity element are pure wrt every
    theory.
    """
    ops = th.operators
    return all(is_atom(u) or head_op(u) in ops for u in iter_subterms(t))


def vars_of(t: Term) -> frozenset[str]:
    return frozenset(u.name for u in iter_subterms(t) if isinstance(u, Var))


def const_names_of(t: Term) -> frozenset[str]:
    return frozenset(u.name for u in iter_subterms(t) if isinstance(u, Const))


_RANK = {Zero: 0, TagConst: 1, Const: 2, Var: 3, Seq: 4, Penc: 5, Senc: 6, Pk: 7, Sh: 8, Xor: 9}


def sort_key(t: Term):
    """Key for a fixed total syntactic order on terms.

    Constructor rank first, then lexicographic on the payload; any fixed
    total order would do, determinism is the requirement.
    """
    rank = _RANK[type(t)]
    if isinstance(t, TagConst):
        return (rank, t.path)
    if isinstance(t, (Const, Var)):
        return (rank, t.name)
    if isinstance(t, Zero):
        return (rank,)
    return (rank, tuple(sort_key(c) for c in children(t)))


def xor_of(items: Iterable[Term]) -> Term:
    """Build an xor from 0, 1 or n summands (0 -> unity, 1 -> the summand)."""
    tup = tuple(items)
    if not tup:
        return ZERO
    if len(tup) == 1:
        return tup[0]
    return Xor(tup)


@lru_cache(maxsize=1 << 16)
def acun_normal_form(t: Term) -> Term:
    """Canonical representative modulo associativity, commutativity,
    ``x + 0 = x`` and ``x + x = 0``, applied recursively to all subterms.

    Nested xors are flattened, duplicate summands cancel pairwise, unity
    summands disappear, and the surviving summands are sorted by
    :func:`sort_key`.  An empty result collapses to the unity element and a
    singleton result to the bare summand.
    """
    if is_atom(t):
        return t
    if isinstance(t, Xor):
        flat: list[Term] = []
        for c in t.items:
            n = acun_normal_form(c)
            if isinstance(n, Xor):
                flat.extend(n.items)
            else:
                flat.append(n)
        counts: Counter[Term] = Counter(u for u in flat if u != ZERO)
        kept = sorted((u for u, k in counts.items() if k & 1), key=sort_key)
        return xor_of(kept)
    ch = children(t)
    new = tuple(acun_normal_form(c) for c in ch)
    return t if new == ch else rebuild(t, new)


def equal_mod(t1: Term, t2: Term, th: Theory) -> bool:
    """Equality modulo a theory.

    STD and FREE_XOR hold only identity equations, so they compare
    syntactically; ACUN and COMBINED compare xor normal forms.
    """
    if th in (Theory.STD, Theory.FREE_XOR):
        return t1 == t2
    return acun_normal_form(t1) == acun_normal_form(t2)


@dataclass(frozen=True, slots=True)
class Problem:
    """A single unification problem: make ``lhs`` and ``rhs`` equal modulo
    whatever theory the caller is working in."""

    lhs: Term
    rhs: Term


def problem_vars(problems: Iterable[Problem]) -> frozenset[str]:
    out: set[str] = set()
    for p in problems:
        out |= vars_of(p.lhs) | vars_of(p.rhs)
    return frozenset(out)
