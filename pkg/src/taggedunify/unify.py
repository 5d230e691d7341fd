"""Syntactic unification: substitutions in solved form, the standard-theory
solver with occurs check, and the variant that treats xor as a free symbol."""

from __future__ import annotations

from typing import Iterable, Mapping

from .terms import Problem, Term, Var, Xor, children, iter_subterms, rebuild, vars_of


class ImpureTermError(Exception):
    """A solver was handed a term outside the theory it implements."""


class Substitution:
    """Finite map from variable names to terms, kept idempotent: no bound
    variable occurs in any binding's right-hand side, so applying twice is
    the same as applying once."""

    __slots__ = ("bindings",)

    def __init__(self, bindings: Mapping[str, Term] | None = None):
        self.bindings: dict[str, Term] = dict(bindings) if bindings else {}

    def apply(self, t: Term) -> Term:
        """Simultaneously replace every bound variable occurring in ``t``."""
        if isinstance(t, Var):
            return self.bindings.get(t.name, t)
        ch = children(t)
        if not ch:
            return t
        new = tuple(self.apply(c) for c in ch)
        return t if new == ch else rebuild(t, new)

    def apply_problem(self, p: Problem) -> Problem:
        return Problem(self.apply(p.lhs), self.apply(p.rhs))

    def compose(self, other: "Substitution") -> "Substitution":
        """Substitution equivalent to applying ``self`` first, then ``other``:
        ``compose(s, r).apply(t) == r.apply(s.apply(t))`` for all ``t``."""
        out: dict[str, Term] = {}
        for v, t in self.bindings.items():
            t2 = other.apply(t)
            if not (isinstance(t2, Var) and t2.name == v):
                out[v] = t2
        for v, t in other.bindings.items():
            if v not in self.bindings:
                out[v] = t
        return Substitution(out)

    def restrict(self, names: Iterable[str]) -> "Substitution":
        keep = set(names)
        return Substitution({v: t for v, t in self.bindings.items() if v in keep})

    def domain(self) -> frozenset[str]:
        return frozenset(self.bindings)

    def is_idempotent(self) -> bool:
        bound = set(self.bindings)
        return all(not (vars_of(t) & bound) for t in self.bindings.values())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Substitution) and self.bindings == other.bindings

    def __repr__(self) -> str:
        inner = ", ".join(f"{v}: {t!r}" for v, t in sorted(self.bindings.items()))
        return f"Substitution({{{inner}}})"


def _solve(eqs: list[tuple[Term, Term]]) -> Substitution | None:
    """First-order unification by decomposition with occurs check.

    Every constructor, xor included, decomposes positionally, so this is
    also the free-xor unifier; callers that implement the standard theory
    reject xor before calling.
    """
    sigma: dict[str, Term] = {}
    work = list(eqs)
    while work:
        s, t = work.pop()
        if s == t:
            continue
        if isinstance(t, Var) and not isinstance(s, Var):
            s, t = t, s
        if isinstance(s, Var):
            if s.name in vars_of(t):
                return None
            one = Substitution({s.name: t})
            work = [(one.apply(a), one.apply(b)) for a, b in work]
            for v in list(sigma):
                sigma[v] = one.apply(sigma[v])
            sigma[s.name] = t
            continue
        if type(s) is not type(t):
            return None
        cs, ct = children(s), children(t)
        if not cs or len(cs) != len(ct):
            return None  # distinct atoms, or an arity clash
        work.extend(zip(cs, ct))
    return Substitution(sigma)


def unify_std(problems: Iterable[Problem]) -> Substitution | None:
    """Most general unifier modulo the standard theory, or None.

    Sequences unify only with sequences of the same length, encryption and
    key constructors decompose componentwise, atoms unify only with
    themselves, and the occurs check is always on.  Terms containing xor are
    rejected outright; mixed problems belong to the combined solver.
    """
    probs = list(problems)
    for p in probs:
        for side in (p.lhs, p.rhs):
            if any(isinstance(u, Xor) for u in iter_subterms(side)):
                raise ImpureTermError("xor subterm in a standard-theory problem")
    return _solve([(p.lhs, p.rhs) for p in probs])


def unify_free_xor(problems: Iterable[Problem]) -> Substitution | None:
    """Syntactic unification treating xor as an ordinary free symbol: xor
    nodes unify only with xor nodes of the same width, summand by summand in
    the written order."""
    return _solve([(p.lhs, p.rhs) for p in problems])
