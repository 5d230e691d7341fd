"""Unification in the union of the standard free theory and the xor theory,
by combining the two pure solvers in the Baader-Schulz style for
signature-disjoint theories.

The pipeline: purify terms (step 1), purify problems (step 2), identify
variables (step 3), split the problem set by theory (step 4), replace each
side's foreign variables with fresh constants and run the pure solvers
(step 5), and merge the component unifiers along a dependency-compatible
linear variable order (step 6).  The nondeterministic choices are enumerated
exhaustively up to configurable caps.

Pruning (on by default, switchable off via :class:`BscaConfig`) discards
only branches that provably cannot succeed:

* two variables are identified only if their standard-theory definitions
  (``V ~? t`` with ``t`` a non-variable) are pairwise unifiable; a failed
  pair makes every extension fail;
* a variable standing opposite a non-variable in a standard problem must
  keep its variable role there, since a fresh constant can never equal a
  proper term or a different atom;
* variables occurring in only one of the two split problem sets take the
  role that leaves them flexible, the other role being strictly weaker.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .acun import unify_acun
from .terms import (
    Const,
    Problem,
    TagConst,
    Term,
    Theory,
    Var,
    Zero,
    acun_normal_form,
    children,
    const_names_of,
    equal_mod,
    head_op,
    is_pure,
    problem_vars,
    rebuild,
    vars_of,
)
from .unify import Substitution, unify_std


class ChoiceSpaceExceeded(Exception):
    """An enumeration cap was hit before the choice space was exhausted."""


@dataclass(frozen=True)
class BscaConfig:
    """Caps and switches for the combined solver's choice-space enumeration.

    ``max_partition_vars`` bounds the number of variables the variable
    identification step may enumerate partitions over; ``max_orders`` bounds
    the linear orders considered per branch; ``max_branches`` bounds the
    total number of (partition, split) attempts.  ``full_identification``
    False restricts identification to variables occurring in xor problems,
    which preserves unifiability (merging variables never rescues the
    standard side and only xor-side merges enable new cancellations) and is
    what the theorem harness runs with.  ``first_only`` stops at the first
    verified unifier.
    """

    max_partition_vars: int = 9
    max_orders: int = 40320
    max_branches: int = 100_000
    full_identification: bool = True
    prune: bool = True
    first_only: bool = False
    keep_traces: bool = True


@dataclass
class BscaTrace:
    """Intermediate states of one (partition, split) branch of a run."""

    gamma0: tuple[Problem, ...]
    gamma1: tuple[Problem, ...]
    gamma2: tuple[Problem, ...]
    var_id_partition: tuple[tuple[str, ...], ...]
    gamma3: tuple[Problem, ...]
    gamma41: tuple[Problem, ...]
    gamma42: tuple[Problem, ...]
    var_split: tuple[tuple[str, ...], tuple[str, ...]]
    beta: dict[str, str]
    gamma51: tuple[Problem, ...]
    gamma52: tuple[Problem, ...]
    linear_order: tuple[str, ...] | None
    sigma1: Substitution | None
    sigma2: Substitution | None
    combined: Substitution | None

    def to_jsonable(self) -> dict:
        from .textfmt import problem_to_jsonable, substitution_to_jsonable

        def probs(ps):
            return [problem_to_jsonable(p) for p in ps]

        def sub(s):
            return None if s is None else substitution_to_jsonable(s)

        return {
            "gamma0": probs(self.gamma0),
            "gamma1": probs(self.gamma1),
            "gamma2": probs(self.gamma2),
            "var_id_partition": [list(b) for b in self.var_id_partition],
            "gamma3": probs(self.gamma3),
            "gamma41": probs(self.gamma41),
            "gamma42": probs(self.gamma42),
            "var_split": [list(self.var_split[0]), list(self.var_split[1])],
            "beta": dict(sorted(self.beta.items())),
            "gamma51": probs(self.gamma51),
            "gamma52": probs(self.gamma52),
            "linear_order": None if self.linear_order is None else list(self.linear_order),
            "sigma1": sub(self.sigma1),
            "sigma2": sub(self.sigma2),
            "combined": sub(self.combined),
        }


@dataclass
class CombinedResult:
    unifiers: list[Substitution]
    traces: list[BscaTrace] = field(default_factory=list)


_VAR_POOL = ("W", "X", "Y", "Z", "U", "V")


class FreshNames:
    """Deterministic fresh-name source, disjoint from a set of taken names.

    Variables are drawn from W, X, Y, Z, U, V and then numbered rounds
    (W1, X1, ...); fresh constants are derived from the variable they
    replace by lowercasing, with a numeric suffix on collision.
    """

    def __init__(self, taken: Iterable[str] = ()):
        self._taken = set(taken)
        self._i = 0
        self.allocated: list[str] = []

    def var(self) -> str:
        while True:
            base = _VAR_POOL[self._i % len(_VAR_POOL)]
            round_no = self._i // len(_VAR_POOL)
            self._i += 1
            name = base if round_no == 0 else f"{base}{round_no}"
            if name not in self._taken:
                self._taken.add(name)
                self.allocated.append(name)
                return name


def fresh_const_name(var_name: str, taken: set[str]) -> str:
    base = var_name.lower()
    name = base
    n = 1
    while name in taken:
        name = f"{base}{n}"
        n += 1
    taken.add(name)
    return name


def _owner(t: Term) -> str | None:
    op = head_op(t)
    if op is None:
        return None
    return "xor" if op == "xor" else "std"


def _atom_owner(t: Term) -> str | None:
    """Signature ownership of atoms: constants and tags belong to the
    standard theory, the unity element to the xor theory, variables to
    neither.  Full signature disjointness (atoms included) is what makes
    the variable-identification step able to equate an abstraction variable
    with a constant's stand-in, which completeness needs."""
    if isinstance(t, (Const, TagConst)):
        return "std"
    if isinstance(t, Zero):
        return "xor"
    return None


def _side_class(t: Term) -> str | None:
    return _owner(t) or _atom_owner(t)


def _dedup(problems: Iterable[Problem]) -> list[Problem]:
    seen: set[Problem] = set()
    out = []
    for p in problems:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def _purify_term(
    t: Term, fresh: FreshNames, defs: list[Problem], cache: dict[Term, str]
) -> Term:
    own = _owner(t)
    if own is None:
        return t

    def abstract(c: Term, pure: Term) -> Term:
        if c not in cache:
            cache[c] = fresh.var()
            defs.append(Problem(Var(cache[c]), pure))
        return Var(cache[c])

    def fix(c: Term) -> Term:
        c_head = _owner(c)
        if c_head is None:
            atom = _atom_owner(c)
            if atom is None or atom == own:
                return c
            # an atom of the other signature counts as alien too
            return abstract(c, c)
        if c_head == own:
            return _purify_term(c, fresh, defs, cache)
        if c in cache:
            return Var(cache[c])
        return abstract(c, _purify_term(c, fresh, defs, cache))

    return rebuild(t, tuple(fix(c) for c in children(t)))


def purify_terms(
    problems: Iterable[Problem], fresh: FreshNames | None = None
) -> tuple[list[Problem], frozenset[str]]:
    """Step 1: make every term pure by abstracting alien subterms into fresh
    variables with defining problems.  Repeated occurrences of one alien
    subterm share the abstraction variable.

    A problem whose two sides head into different theories is abstracted on
    the left as well (fresh ``W`` with ``W ~? lhs`` emitted first), so the
    output is already problem-pure for such inputs.  Returns the purified
    problem list and the set of introduced variable names.
    """
    probs = list(problems)
    fresh = fresh or FreshNames(problem_vars(probs))
    start = len(fresh.allocated)
    cache: dict[Term, str] = {}
    out: list[Problem] = []
    for p in probs:
        defs: list[Problem] = []
        lo, ro = _owner(p.lhs), _owner(p.rhs)
        if lo is not None and ro is not None and lo != ro:
            w = fresh.var()
            defs.append(Problem(Var(w), _purify_term(p.lhs, fresh, defs, cache)))
            main = Problem(Var(w), _purify_term(p.rhs, fresh, defs, cache))
        else:
            main = Problem(
                _purify_term(p.lhs, fresh, defs, cache),
                _purify_term(p.rhs, fresh, defs, cache),
            )
        out.extend(defs)
        out.append(main)
    return _dedup(out), frozenset(fresh.allocated[start:])


def purify_problems(
    problems: Iterable[Problem], fresh: FreshNames | None = None
) -> list[Problem]:
    """Step 2: make both sides of every problem belong to one theory, by
    splitting any leftover cross-theory problem ``s ~? t`` into ``V ~? s``
    and ``V ~? t`` with a fresh variable.  Variables and atoms count as
    belonging to either theory."""
    probs = list(problems)
    fresh = fresh or FreshNames(problem_vars(probs))
    out: list[Problem] = []
    for p in probs:
        lc, rc = _side_class(p.lhs), _side_class(p.rhs)
        if lc is not None and rc is not None and lc != rc:
            v = fresh.var()
            out.append(Problem(Var(v), p.lhs))
            out.append(Problem(Var(v), p.rhs))
        else:
            out.append(p)
    return _dedup(out)


def _std_definitions(problems: Iterable[Problem]) -> dict[str, list[Term]]:
    """Non-variable standard-theory terms each variable is directly equated to."""
    defs: dict[str, list[Term]] = {}
    for p in problems:
        for a, b in ((p.lhs, p.rhs), (p.rhs, p.lhs)):
            if isinstance(a, Var) and not isinstance(b, Var) and _owner(b) != "xor":
                defs.setdefault(a.name, []).append(b)
    return defs


def variable_identifications(
    problems: Iterable[Problem],
    cfg: BscaConfig = BscaConfig(),
    scope: Iterable[str] | None = None,
) -> Iterator[tuple[tuple[tuple[str, ...], ...], list[Problem]]]:
    """Step 3: enumerate partitions of the variables; for each, yield the
    partition and the problem set with every variable replaced by its
    class representative (the lexicographically least name).

    ``scope`` restricts which variables may share a block; the rest stay
    singletons.  Raises :class:`ChoiceSpaceExceeded` when more variables
    than ``cfg.max_partition_vars`` would need enumerating.
    """
    probs = list(problems)
    all_vars = sorted(problem_vars(probs))
    scope_set = set(all_vars) if scope is None else set(scope) & set(all_vars)
    enum_vars = [v for v in all_vars if v in scope_set]
    if len(enum_vars) > cfg.max_partition_vars:
        raise ChoiceSpaceExceeded(
            f"{len(enum_vars)} variables exceed the partition cap "
            f"of {cfg.max_partition_vars}"
        )

    defs = _std_definitions(probs) if cfg.prune else {}
    compat_cache: dict[tuple[str, str], bool] = {}

    def compatible(u: str, v: str) -> bool:
        if not cfg.prune:
            return True
        du, dv = defs.get(u), defs.get(v)
        if not du or not dv:
            return True
        key = (u, v) if u < v else (v, u)
        if key not in compat_cache:
            compat_cache[key] = all(
                unify_std([Problem(s, t)]) is not None for s in du for t in dv
            )
        return compat_cache[key]

    def assignments(i: int, blocks: list[list[str]]) -> Iterator[list[list[str]]]:
        if i == len(enum_vars):
            yield [list(b) for b in blocks]
            return
        v = enum_vars[i]
        for b in blocks:
            if all(compatible(v, u) for u in b):
                b.append(v)
                yield from assignments(i + 1, blocks)
                b.pop()
        blocks.append([v])
        yield from assignments(i + 1, blocks)
        blocks.pop()

    singles = [[v] for v in all_vars if v not in scope_set]
    for blocks in assignments(0, []):
        partition = tuple(sorted(tuple(sorted(b)) for b in blocks + singles))
        rep = {v: b[0] for b in partition for v in b}
        sub = Substitution({v: Var(r) for v, r in rep.items() if v != r})
        gamma3 = _dedup(sub.apply_problem(p) for p in probs)
        yield partition, gamma3


def split_problems(problems: Iterable[Problem]) -> tuple[list[Problem], list[Problem]]:
    """Step 4: standard-theory problems left, xor problems right.

    Ownership follows the full signature: xor terms and the unity element go
    right, standard terms and other atoms left.  Variable-variable problems
    carry no operators at all and are routed to the standard side (a fixed
    rule for determinism; either routing is sound once variables are
    identified)."""
    g41: list[Problem] = []
    g42: list[Problem] = []
    for p in problems:
        lc, rc = _side_class(p.lhs), _side_class(p.rhs)
        if lc is not None and rc is not None and lc != rc:
            raise ValueError("split requires theory-pure problems")
        (g42 if (lc or rc) == "xor" else g41).append(p)
    return g41, g42


@dataclass
class SplitAttempt:
    """One two-block variable split with its component solver outcomes.

    ``sigma1``/``sigma2`` are None when the corresponding pure solver found
    no unifier; the split data is still reported so failed branches can be
    inspected."""

    v1: tuple[str, ...]
    v2: tuple[str, ...]
    beta: dict[str, str]
    gamma51: list[Problem]
    gamma52: list[Problem]
    sigma1: Substitution | None
    sigma2: Substitution | None


def solve_systems(
    g41: Iterable[Problem],
    g42: Iterable[Problem],
    cfg: BscaConfig = BscaConfig(),
    taken_consts: Iterable[str] = (),
) -> Iterator[SplitAttempt]:
    """Step 5: enumerate two-block splits {V1, V2} of the live variables.

    For each split, variables in V2 become fresh constants inside the
    standard problems and variables in V1 become fresh constants inside the
    xor problems; the pure solvers then run on the grounded sets.  Yields
    every attempted split, successful or not.
    """
    g41 = list(g41)
    g42 = list(g42)
    vars41 = set().union(*(vars_of(p.lhs) | vars_of(p.rhs) for p in g41)) if g41 else set()
    vars42 = set().union(*(vars_of(p.lhs) | vars_of(p.rhs) for p in g42)) if g42 else set()
    all_vars = sorted(vars41 | vars42)

    if cfg.prune:
        forced1 = {
            a.name
            for p in g41
            for a, b in ((p.lhs, p.rhs), (p.rhs, p.lhs))
            if isinstance(a, Var) and not isinstance(b, Var)
        }
        fixed1 = (vars41 - vars42) | forced1
        fixed2 = vars42 - vars41 - forced1
        choice = [v for v in all_vars if v not in fixed1 and v not in fixed2]
    else:
        fixed1, fixed2 = set(), set()
        choice = list(all_vars)

    taken_base = set(taken_consts)
    for p in g41 + g42:
        taken_base |= const_names_of(p.lhs) | const_names_of(p.rhs)

    for mask in range(1 << len(choice)):
        chosen = {choice[i] for i in range(len(choice)) if mask >> i & 1}
        v2 = fixed2 | chosen
        v1 = [v for v in all_vars if v not in v2]
        v2 = [v for v in all_vars if v in v2]
        taken = set(taken_base)
        beta: dict[str, str] = {}
        for v in sorted(set(v1) & vars42 | set(v2) & vars41):
            beta[v] = fresh_const_name(v, taken)
        sub1 = Substitution({v: Const(beta[v]) for v in v2 if v in vars41})
        sub2 = Substitution({v: Const(beta[v]) for v in v1 if v in vars42})
        gamma51 = [sub1.apply_problem(p) for p in g41]
        gamma52 = [sub2.apply_problem(p) for p in g42]
        sigma1 = unify_std(gamma51)
        sigma2 = None
        if sigma1 is not None:
            acun_result = unify_acun(gamma52)
            sigma2 = acun_result[0] if acun_result else None
        yield SplitAttempt(tuple(v1), tuple(v2), beta, gamma51, gamma52, sigma1, sigma2)


def _unbeta(t: Term, inverse: dict[str, str]) -> Term:
    if isinstance(t, Const) and t.name in inverse:
        return Var(inverse[t.name])
    ch = children(t)
    if not ch:
        return t
    new = tuple(_unbeta(c, inverse) for c in ch)
    return t if new == ch else rebuild(t, new)


def combine_unifiers(
    sigma1: Substitution,
    sigma2: Substitution,
    var_split: tuple[Iterable[str], Iterable[str]],
    linear_order: Iterable[str],
    beta: dict[str, str],
) -> Substitution | None:
    """Step 6: merge the component unifiers along a linear variable order.

    Ascending in the order, each variable takes its binding from its own
    block's unifier, with beta's fresh constants replaced back by their
    source variables and all earlier bindings substituted through.  Returns
    None when back-substitution would put a variable inside its own binding,
    which signals that no unifier exists along this order.
    """
    v1 = set(var_split[0])
    inverse = {c: v for v, c in beta.items()}
    partial: dict[str, Term] = {}
    for x in linear_order:
        source = sigma1 if x in v1 else sigma2
        raw = source.bindings.get(x)
        if raw is None:
            continue
        t = Substitution(partial).apply(_unbeta(raw, inverse))
        if x in vars_of(t):
            return None
        one = Substitution({x: t})
        for y in list(partial):
            partial[y] = one.apply(partial[y])
            if y in vars_of(partial[y]):
                return None
        partial[x] = t
    return Substitution(partial)


def _dependency_order(
    sigma1: Substitution,
    sigma2: Substitution,
    v1: Iterable[str],
    v2: Iterable[str],
    beta: dict[str, str],
) -> tuple[str, ...] | None:
    """A linear order where every variable follows the variables occurring in
    its (beta-resolved) binding, or None when the dependencies are cyclic.

    All such orders produce the same combined unifier, so evaluating one
    representative per branch is enough; orders violating the dependency
    condition are infeasible by construction.
    """
    inverse = {c: v for v, c in beta.items()}
    bound: dict[str, Term] = {}
    for x in v1:
        if x in sigma1.bindings:
            bound[x] = _unbeta(sigma1.bindings[x], inverse)
    for x in v2:
        if x in sigma2.bindings:
            bound[x] = _unbeta(sigma2.bindings[x], inverse)
    deps = {x: vars_of(t) & set(bound) for x, t in bound.items()}
    order = [x for x in sorted(set(v1) | set(v2)) if x not in bound]
    remaining = dict(deps)
    while remaining:
        ready = sorted(x for x, d in remaining.items() if not d)
        if not ready:
            return None
        for x in ready:
            order.append(x)
            del remaining[x]
        for x in remaining:
            remaining[x] = remaining[x] - set(ready)
    return tuple(order)


def _finalize(
    combined: Substitution, rep: dict[str, str], orig_vars: Iterable[str]
) -> Substitution:
    """Fold identification back in, restrict to the original variables and
    normalize the bindings."""
    out: dict[str, Term] = {}
    for v in orig_vars:
        r = rep.get(v, v)
        if r != v:
            t = combined.bindings.get(r, Var(r))
        else:
            t = combined.bindings.get(v)
            if t is None:
                continue
        t = acun_normal_form(t)
        if t != Var(v):
            out[v] = t
    return Substitution(out)


def _canonical_key(sigma: Substitution, orig_vars: Iterable[str]):
    """Hashable identity of a unifier modulo renaming of fresh variables."""
    orig = set(orig_vars)
    renaming: dict[str, Term] = {}
    for v in sorted(sigma.bindings):
        for name in sorted(vars_of(sigma.bindings[v]) - orig):
            if name not in renaming:
                renaming[name] = Var(f"_p{len(renaming) + 1}")
    rho = Substitution(renaming)
    return frozenset((v, rho.apply(t)) for v, t in sigma.bindings.items())


def _xor_scope(problems: Iterable[Problem]) -> set[str]:
    scope: set[str] = set()
    for p in problems:
        if _owner(p.lhs) == "xor" or _owner(p.rhs) == "xor":
            scope |= vars_of(p.lhs) | vars_of(p.rhs)
    return scope


def unify_combined(
    problems: Iterable[Problem], cfg: BscaConfig = BscaConfig()
) -> CombinedResult:
    """All distinct unifiers of a mixed-theory problem set, with traces.

    Runs steps 1-6 over the whole (capped) choice space, deduplicates the
    verified unifiers modulo renaming of fresh variables, and retains one
    trace per attempted branch when ``cfg.keep_traces`` is set.  An empty
    unifier list means no branch succeeded; hitting a cap raises
    :class:`ChoiceSpaceExceeded` instead of silently truncating.
    """
    probs = list(problems)
    orig_vars = sorted(problem_vars(probs))
    fresh = FreshNames(orig_vars)
    gamma1, _introduced = purify_terms(probs, fresh)
    gamma2 = purify_problems(gamma1, fresh)
    for p in gamma2:  # purification postconditions, checked every run
        for side in (p.lhs, p.rhs):
            if not (is_pure(side, Theory.STD) or is_pure(side, Theory.ACUN)):
                raise AssertionError(f"impure term after purification: {side!r}")
        lc, rc = _side_class(p.lhs), _side_class(p.rhs)
        if lc is not None and rc is not None and lc != rc:
            raise AssertionError(f"cross-theory problem after purification: {p!r}")
    scope = None if cfg.full_identification else _xor_scope(gamma2)

    unifiers: list[Substitution] = []
    traces: list[BscaTrace] = []
    seen: set = set()
    branches = 0
    taken_consts: set[str] = set()
    for p in probs:
        taken_consts |= const_names_of(p.lhs) | const_names_of(p.rhs)

    for partition, gamma3 in variable_identifications(gamma2, cfg, scope):
        rep = {v: b[0] for b in partition for v in b}
        g41, g42 = split_problems(gamma3)
        for attempt in solve_systems(g41, g42, cfg, taken_consts):
            branches += 1
            if branches > cfg.max_branches:
                raise ChoiceSpaceExceeded(
                    f"more than {cfg.max_branches} branches attempted"
                )
            order = None
            merged = None
            final = None
            if attempt.sigma1 is not None and attempt.sigma2 is not None:
                order = _dependency_order(
                    attempt.sigma1, attempt.sigma2, attempt.v1, attempt.v2, attempt.beta
                )
                if order is not None:
                    merged = combine_unifiers(
                        attempt.sigma1,
                        attempt.sigma2,
                        (attempt.v1, attempt.v2),
                        order,
                        attempt.beta,
                    )
                if merged is not None:
                    candidate = _finalize(merged, rep, orig_vars)
                    if all(
                        equal_mod(
                            candidate.apply(p.lhs), candidate.apply(p.rhs), Theory.COMBINED
                        )
                        for p in probs
                    ):
                        final = candidate
                        key = _canonical_key(final, orig_vars)
                        if key not in seen:
                            seen.add(key)
                            unifiers.append(final)
            if cfg.keep_traces:
                traces.append(
                    BscaTrace(
                        gamma0=tuple(probs),
                        gamma1=tuple(gamma1),
                        gamma2=tuple(gamma2),
                        var_id_partition=partition,
                        gamma3=tuple(gamma3),
                        gamma41=tuple(g41),
                        gamma42=tuple(g42),
                        var_split=(attempt.v1, attempt.v2),
                        beta=attempt.beta,
                        gamma51=tuple(attempt.gamma51),
                        gamma52=tuple(attempt.gamma52),
                        linear_order=order,
                        sigma1=attempt.sigma1,
                        sigma2=attempt.sigma2,
                        combined=final,
                    )
                )
            if final is not None and cfg.first_only:
                return CombinedResult(unifiers, traces)
    return CombinedResult(unifiers, traces)
