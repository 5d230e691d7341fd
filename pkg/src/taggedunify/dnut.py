"""The DNUT tagging discipline: a checker for its three conditions and the
automatic hierarchical tagger.

A set of terms is DNUT-satisfying when (1) no two summands of any xor
subterm are unifiable in the standard theory, (2) no summand of an xor
subterm is standard-unifiable with a summand of a different xor subterm,
and (3) the unity element is not a direct summand of any xor subterm.
Under these conditions every xor cancellation is disabled, which is what
makes equational unifiability collapse to free unifiability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .terms import (
    ZERO,
    Problem,
    Seq,
    TagConst,
    Term,
    Xor,
    children,
    iter_subterms,
    rebuild,
)
from .unify import unify_free_xor


@dataclass(frozen=True)
class DnutViolation:
    condition: int
    witness: tuple[Term, ...]
    enclosing: tuple[Term, ...]


@dataclass
class DnutReport:
    satisfied: bool
    violations: list[DnutViolation]

    def to_jsonable(self) -> dict:
        from .textfmt import render_term

        return {
            "satisfied": self.satisfied,
            "violations": [
                {
                    "condition": v.condition,
                    "witness": [render_term(t) for t in v.witness],
                    "enclosing": [render_term(t) for t in v.enclosing],
                }
                for v in self.violations
            ],
        }

    def to_text(self) -> str:
        from .textfmt import render_term

        if self.satisfied:
            return "satisfied"
        lines = [f"{len(self.violations)} violation(s)"]
        for v in self.violations:
            witness = " ~ ".join(render_term(t) for t in v.witness)
            inside = "; ".join(render_term(t) for t in v.enclosing)
            lines.append(f"  condition {v.condition}: {witness}  (in {inside})")
        return "\n".join(lines)


def _std_unifiable(a: Term, b: Term) -> bool:
    # The standard theory has no xor equations, so unifiability of terms that
    # happen to contain xor is plain syntactic unification with xor free.
    return unify_free_xor([Problem(a, b)]) is not None


def _xor_subterms(terms: Iterable[Term]) -> list[Xor]:
    seen: set[Term] = set()
    out: list[Xor] = []
    for t in terms:
        for u in iter_subterms(t):
            if isinstance(u, Xor) and u not in seen:
                seen.add(u)
                out.append(u)
    return out


def dnut_check(terms: Iterable[Term]) -> DnutReport:
    """Exhaustively check the three conditions over a set of terms.

    Summand pairs are scanned by occurrence, so a repeated summand inside
    one xor term violates condition 1.  Syntactically identical xor
    subterms are treated as one term, never paired against themselves under
    condition 2.
    """
    xors = _xor_subterms(terms)
    violations: list[DnutViolation] = []
    for x in xors:
        items = x.items
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                if _std_unifiable(items[i], items[j]):
                    violations.append(DnutViolation(1, (items[i], items[j]), (x,)))
        if any(it == ZERO for it in items):
            violations.append(DnutViolation(3, (ZERO,), (x,)))
    for i in range(len(xors)):
        for j in range(i + 1, len(xors)):
            for a in xors[i].items:
                for b in xors[j].items:
                    if _std_unifiable(a, b):
                        violations.append(DnutViolation(2, (a, b), (xors[i], xors[j])))
    violations.sort(key=lambda v: v.condition)
    return DnutReport(not violations, violations)


def _tag_xor(x: Xor, base: tuple[int, ...]) -> Xor:
    new_items = []
    for k, item in enumerate(x.items, 1):
        tag = TagConst(base + (k,))
        content = _tag_below(item, base + (k,))
        if isinstance(content, Seq):
            wrapped = Seq((tag,) + content.items)
        else:
            wrapped = Seq((tag, content))
        new_items.append(wrapped)
    return Xor(tuple(new_items))


def _tag_below(t: Term, path: tuple[int, ...]) -> Term:
    """Tag all xor subterms below ``t``.

    The first maximal xor found (depth-first) extends ``path`` directly,
    which yields the 3.3.1-style paths for a lone xor nested inside a
    summand; later sibling xors get an extra disambiguating component.
    """
    counter = 0

    def walk(u: Term) -> Term:
        nonlocal counter
        if isinstance(u, Xor):
            counter += 1
            base = path if counter == 1 else path + (counter,)
            return _tag_xor(u, base)
        ch = children(u)
        if not ch:
            return u
        new = tuple(walk(c) for c in ch)
        return u if new == ch else rebuild(u, new)

    return walk(t)


def dnut_tag(messages: Sequence[Term], _root_offset: int = 0) -> list[Term]:
    """Tag an ordered list of messages so the result satisfies all three
    conditions.

    Every summand of every xor subterm is wrapped in a sequence headed by a
    fresh tag constant; a summand that already is a sequence gets the tag
    prefixed as a new head element.  Paths are hierarchical: message index
    at the root, summand index last, nested xors extending their enclosing
    summand's tag path.  Messages without xor subterms are returned
    unchanged.

    The deterministic scheme cannot produce two unifiable summands, but the
    result is re-checked anyway; on the off chance that pre-existing tags in
    the input collide with assigned ones, tagging retries once with shifted
    roots before giving up.
    """
    out = [
        _tag_xor(m, (i + _root_offset,)) if isinstance(m, Xor)
        else _tag_below(m, (i + _root_offset,))
        for i, m in enumerate(messages, 1)
    ]
    if dnut_check(out).satisfied:
        return out
    if _root_offset == 0:
        shift = 1 + max(
            (u.path[0] for m in messages for u in iter_subterms(m) if isinstance(u, TagConst)),
            default=0,
        )
        return dnut_tag(messages, _root_offset=shift)
    raise RuntimeError("tagging failed to satisfy the conditions after retry")


def strip_tags(t: Term) -> Term:
    """Undo :func:`dnut_tag` on a tagged term: unwrap every xor summand of
    the form ``[tag, ...rest]`` (used by tests to compare structure)."""
    if isinstance(t, Xor):
        items = []
        for item in t.items:
            if isinstance(item, Seq) and isinstance(item.items[0], TagConst):
                rest = tuple(strip_tags(u) for u in item.items[1:])
                items.append(rest[0] if len(rest) == 1 else Seq(rest))
            else:
                items.append(strip_tags(item))
        return Xor(tuple(items))
    ch = children(t)
    if not ch:
        return t
    new = tuple(strip_tags(c) for c in ch)
    return t if new == ch else rebuild(t, new)


def tags_bijection(a: Iterable[Term], b: Iterable[Term]) -> dict | None:
    """If the two term lists are equal up to a consistent renaming of tag
    constants, return the tag bijection; otherwise None."""
    forward: dict[tuple[int, ...], tuple[int, ...]] = {}
    backward: dict[tuple[int, ...], tuple[int, ...]] = {}

    def match(s: Term, t: Term) -> bool:
        if isinstance(s, TagConst) and isinstance(t, TagConst):
            if forward.get(s.path, t.path) != t.path:
                return False
            if backward.get(t.path, s.path) != s.path:
                return False
            forward[s.path] = t.path
            backward[t.path] = s.path
            return True
        if type(s) is not type(t):
            return False
        cs, ct = children(s), children(t)
        if len(cs) != len(ct):
            return False
        if not cs:
            return s == t
        return all(match(x, y) for x, y in zip(cs, ct))

    la, lb = list(a), list(b)
    if len(la) != len(lb):
        return None
    if not all(match(x, y) for x, y in zip(la, lb)):
        return None
    return forward
