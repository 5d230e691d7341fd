"""Independent ground-truth machinery: a bounded brute-force unifiability
oracle, deterministic random generators for terms, protocols and problems,
and the harness that empirically checks the central tagging claim: on
tagged term sets, unifiability in the combined standard+xor theory implies
unifiability with xor as a free symbol.

The oracle never consults the solvers: it enumerates ground substitutions
over a candidate space built from the problem's own subterms and checks
equality modulo the theory directly.  The generators only emit problems for
which that space is sufficient (each pair is linear and variable-disjoint;
see docs/format.md for the argument), so oracle/solver agreement is a real
completeness check, not a tautology.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Callable, Iterable, Sequence

from .bsca import BscaConfig, ChoiceSpaceExceeded, unify_combined
from .dnut import dnut_check, dnut_tag
from .terms import (
    ZERO,
    Const,
    Penc,
    Pk,
    Problem,
    Senc,
    Seq,
    Sh,
    Term,
    Theory,
    Var,
    Xor,
    acun_normal_form,
    equal_mod,
    interm_occurrences,
    is_atom,
    problem_vars,
    sort_key,
    subterms_of_set,
    vars_of,
    xor_of,
)
from .unify import Substitution, unify_free_xor


class BoundExceeded(Exception):
    """The oracle's candidate space outgrew the configured ceiling."""


@dataclass(frozen=True)
class GenConfig:
    """Bounds and seed for the deterministic generators and the oracle.

    The same seed always produces the same sample stream.
    """

    max_depth: int = 3
    max_xor_width: int = 3
    var_pool: int = 2
    atom_pool: int = 3
    seed: int = 0
    samples: int = 100
    ground_depth: int = 2
    oracle_ceiling: int = 400_000

    def __post_init__(self) -> None:
        for name in ("max_depth", "max_xor_width", "var_pool", "atom_pool",
                     "samples", "ground_depth", "oracle_ceiling"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")


_CONST_NAMES = ("a", "b", "c", "d", "e", "g", "h", "m")
_VAR_NAMES = ("A", "B", "N", "M", "K", "L", "P", "Q")


def _rng_for(cfg: GenConfig, index: int) -> random.Random:
    return random.Random(cfg.seed * 1_000_003 + index)


def _leaf_maker(rng: random.Random, cfg: GenConfig, var_chance: float = 0.35) -> Callable[[], Term]:
    consts = _CONST_NAMES[: cfg.atom_pool]
    var_names = _VAR_NAMES[: cfg.var_pool]

    def leaf() -> Term:
        if rng.random() < var_chance:
            return Var(rng.choice(var_names))
        return Const(rng.choice(consts))

    return leaf


def _gen_std(rng: random.Random, depth: int, leaf: Callable[[], Term]) -> Term:
    if depth <= 0 or rng.random() < 0.3:
        return leaf()
    op = rng.choice(("seq", "penc", "senc", "pk", "sh"))
    if op == "seq":
        width = rng.randint(2, 3)
        return Seq(tuple(_gen_std(rng, depth - 1, leaf) for _ in range(width)))
    if op == "penc":
        return Penc(_gen_std(rng, depth - 1, leaf), _gen_std(rng, 0, leaf))
    if op == "senc":
        return Senc(_gen_std(rng, depth - 1, leaf), _gen_std(rng, 0, leaf))
    if op == "pk":
        return Pk(_gen_std(rng, 0, leaf))
    return Sh(_gen_std(rng, 0, leaf), _gen_std(rng, 0, leaf))


def gen_message(rng: random.Random, cfg: GenConfig) -> Term:
    """One random protocol message: usually a top-level xor of standard-theory
    summands, at most one of which hides a nested xor (keeps the variable
    count of purified message pairs within the default enumeration caps)."""
    leaf = _leaf_maker(rng, cfg)
    if rng.random() < 0.7:
        width = rng.randint(2, cfg.max_xor_width)
        nested_slot = rng.randrange(width) if rng.random() < 0.35 else -1
        items = []
        for k in range(width):
            if k == nested_slot:
                inner = Xor((leaf(), leaf()))
                wrap = rng.choice(("penc", "senc", "seq"))
                if wrap == "penc":
                    items.append(Penc(inner, leaf()))
                elif wrap == "senc":
                    items.append(Senc(inner, leaf()))
                else:
                    items.append(Seq((inner, leaf())))
            else:
                items.append(_gen_std(rng, rng.randint(1, 2), leaf))
        return Xor(tuple(items))
    return _gen_std(rng, max(1, cfg.max_depth - 1), leaf)


def _vary(rng: random.Random, cfg: GenConfig, t: Term) -> Term:
    # structural variant: same skeleton, some leaves swapped for other
    # atoms or variables (protocols reuse message shapes across steps)
    leaf = _leaf_maker(rng, cfg, var_chance=0.5)

    def walk(u: Term) -> Term:
        from .terms import children, rebuild

        if is_atom(u):
            return u if rng.random() < 0.5 else leaf()
        return rebuild(u, tuple(walk(c) for c in children(u)))

    return walk(t)


def gen_raw_protocol(cfg: GenConfig, index: int = 0) -> list[Term]:
    """Deterministic-by-seed list of 2-4 untagged messages; sometimes one
    message is a structural variant of an earlier one."""
    rng = _rng_for(cfg, index)
    msgs = [gen_message(rng, cfg) for _ in range(rng.randint(2, 3))]
    if rng.random() < 0.4:
        msgs.append(_vary(rng, cfg, rng.choice(msgs)))
    return msgs


def gen_dnut_protocol(cfg: GenConfig, index: int = 0) -> list[Term]:
    """A random protocol piped through the tagger, so the result always
    satisfies the tagging conditions."""
    return dnut_tag(gen_raw_protocol(cfg, index))


def gen_untagged_set(cfg: GenConfig, index: int = 0) -> list[Term]:
    """Small untagged messages, xor-of-leaves heavy: the population used to
    show that equational unifiability genuinely exceeds free unifiability
    when no tags are present."""
    rng = _rng_for(cfg, index * 2 + 1)
    leaf = _leaf_maker(rng, cfg, var_chance=0.45)
    out = []
    for _ in range(rng.randint(2, 3)):
        width = rng.randint(2, cfg.max_xor_width)
        items = tuple(
            leaf() if rng.random() < 0.7 else _gen_std(rng, 1, leaf) for _ in range(width)
        )
        out.append(Xor(items))
    return out


def _linear_leaf_maker(
    rng: random.Random, cfg: GenConfig, prefix: str, budget: list[int]
) -> Callable[[], Term]:
    # every variable is fresh (linear) and side-prefixed (variable-disjoint)
    consts = _CONST_NAMES[: cfg.atom_pool]
    counter = [0]

    def leaf() -> Term:
        if budget[0] > 0 and rng.random() < 0.4:
            budget[0] -= 1
            counter[0] += 1
            return Var(f"{prefix}{counter[0]}")
        return Const(rng.choice(consts))

    return leaf


def gen_problem(cfg: GenConfig, index: int = 0) -> list[Problem]:
    """A random mixed-theory problem set within the oracle's completeness
    bound: terms are linear (no repeated variable) and the two sides of each
    problem share no variables, so any unifiable pair has a ground unifier
    over instantiated subterms and their xor combinations."""
    rng = _rng_for(cfg, index * 2)
    kind = rng.choice(("std", "acun", "mixed", "mixed"))
    # xor-involving problems get a tighter variable budget: the oracle's
    # assignment space is |pool|^vars and the xor pool includes combinations
    budget = [3 if kind == "std" else 2]

    def side(prefix: str) -> Term:
        leaf = _linear_leaf_maker(rng, cfg, prefix, budget)
        if kind == "std":
            return _gen_std(rng, rng.randint(1, 2), leaf)
        if kind == "acun":
            width = rng.randint(2, cfg.max_xor_width)
            return xor_of([leaf() for _ in range(width)])
        # mixed: a standard skeleton with one embedded xor of leaves
        t = _gen_std(rng, 1, leaf)
        if rng.random() < 0.6:
            inner = xor_of([leaf() for _ in range(rng.randint(2, 3))])
            t = rng.choice((Penc(t, inner), Seq((t, inner)), Senc(inner, t)))
        return t

    problems = [Problem(side("X"), side("Y"))]
    if rng.random() < 0.2:
        problems.append(Problem(side("U"), side("V")))
    return problems


def _spare_const(problems: Sequence[Problem]) -> Const:
    taken = {
        u.name
        for p in problems
        for side in (p.lhs, p.rhs)
        for u in subterms_of_set([side])
        if isinstance(u, Const)
    }
    n = 0
    while f"u{n}" in taken:
        n += 1
    return Const(f"u{n}")


def _candidate_pool(problems: Sequence[Problem], theory: Theory, cfg: GenConfig) -> list[Term]:
    spare = _spare_const(problems)
    xorish = theory in (Theory.ACUN, Theory.COMBINED)
    subs = subterms_of_set([s for p in problems for s in (p.lhs, p.rhs)])

    def ground(t: Term) -> Term:
        g = Substitution({v: spare for v in vars_of(t)}).apply(t)
        return acun_normal_form(g) if xorish else g

    base: list[Term] = []
    seen: set[Term] = set()

    def add(pool: list[Term], marker: set[Term], t: Term) -> None:
        if t not in marker:
            marker.add(t)
            pool.append(t)

    add(base, seen, spare)
    add(base, seen, ZERO)
    for s in sorted(subs, key=sort_key):
        if not isinstance(s, Var):
            add(base, seen, ground(s))
    if not xorish:
        return base
    # xor values a variable can need are combinations of terms standing in
    # summand position somewhere; a cancellation chain across one problem
    # touches at most (width - 1) + width summands
    combo_base: list[Term] = []
    combo_seen: set[Term] = set()
    add(combo_base, combo_seen, spare)
    for p in problems:
        for side in (p.lhs, p.rhs):
            for u in interm_occurrences(side):
                add(combo_base, combo_seen, ground(u))
    for s in sorted(subs, key=sort_key):
        if isinstance(s, Xor):
            for u in s.items:
                add(combo_base, combo_seen, ground(u))
    pool = list(base)
    pool_seen = set(seen)
    for size in range(2, 2 * cfg.max_xor_width):
        for combo in combinations(combo_base, size):
            add(pool, pool_seen, acun_normal_form(xor_of(combo)))
    return pool


def ground_unifiable(
    problems: Iterable[Problem], theory: Theory, cfg: GenConfig = GenConfig()
) -> bool:
    """Brute-force unifiability: try every assignment of candidate ground
    terms to the variables and test equality modulo the theory.

    Sound unconditionally (it only answers True with an explicit witness);
    complete only for problems whose unifiers live in the candidate space,
    which holds for everything :func:`gen_problem` emits.  Raises
    :class:`BoundExceeded` when the assignment space outgrows the ceiling.
    """
    probs = list(problems)
    names = sorted(problem_vars(probs))
    if not names:
        return all(equal_mod(p.lhs, p.rhs, theory) for p in probs)
    pool = _candidate_pool(probs, theory, cfg)
    total = len(pool) ** len(names)
    if total > cfg.oracle_ceiling:
        raise BoundExceeded(
            f"{len(pool)} candidates over {len(names)} variables "
            f"exceed the ceiling of {cfg.oracle_ceiling}"
        )
    for values in product(pool, repeat=len(names)):
        sigma = Substitution(dict(zip(names, values)))
        if all(equal_mod(sigma.apply(p.lhs), sigma.apply(p.rhs), theory) for p in probs):
            return True
    return False


def free_unifiable(problems: Iterable[Problem], order_sensitive: bool = True) -> bool:
    """Unifiability with xor as a free symbol.

    The default reading is order-sensitive (xor nodes match summand by
    summand in the written order); the order-insensitive variant searches
    over summand permutations and exists so the harness can report both."""
    probs = list(problems)
    if order_sensitive:
        return unify_free_xor(probs) is not None
    return _free_unordered([(p.lhs, p.rhs) for p in probs], Substitution())


def _free_unordered(work: list[tuple[Term, Term]], sigma: Substitution) -> bool:
    work = list(work)
    while work:
        s, t = work.pop()
        s, t = sigma.apply(s), sigma.apply(t)
        if s == t:
            continue
        if isinstance(t, Var) and not isinstance(s, Var):
            s, t = t, s
        if isinstance(s, Var):
            if s.name in vars_of(t):
                return False
            sigma = sigma.compose(Substitution({s.name: t}))
            continue
        if type(s) is not type(t):
            return False
        if isinstance(s, Xor):
            if len(s.items) != len(t.items):
                return False
            return any(
                _free_unordered(work + list(zip(s.items, perm)), sigma)
                for perm in permutations(t.items)
            )
        from .terms import children

        cs, ct = children(s), children(t)
        if not cs or len(cs) != len(ct):
            return False
        work.extend(zip(cs, ct))
    return True


_HARNESS_CAPS = BscaConfig(
    max_partition_vars=16,
    max_branches=20_000,
    full_identification=False,
    first_only=True,
    keep_traces=False,
)


def combined_unifiable(m: Term, t: Term, caps: BscaConfig = _HARNESS_CAPS) -> bool:
    return bool(unify_combined([Problem(m, t)], caps).unifiers)


@dataclass
class PairReport:
    lhs: Term
    rhs: Term
    combined: bool | None  # None: enumeration caps were hit
    free: bool
    free_unordered: bool
    non_variable: bool
    non_sequence: bool

    def to_jsonable(self) -> dict:
        from .textfmt import render_term

        return {
            "lhs": render_term(self.lhs),
            "rhs": render_term(self.rhs),
            "combined": self.combined,
            "free": self.free,
            "free_unordered": self.free_unordered,
            "non_variable": self.non_variable,
            "non_sequence": self.non_sequence,
        }


@dataclass
class TheoremReport:
    """Outcome of checking one term set: for every non-variable pair, does
    combined unifiability imply free unifiability?"""

    dnut_satisfied: bool
    pairs: list[PairReport]
    counterexamples: list[PairReport]
    premise_fail_equational: list[PairReport]
    incomplete: list[PairReport]

    def to_jsonable(self) -> dict:
        return {
            "dnut_satisfied": self.dnut_satisfied,
            "pairs": [p.to_jsonable() for p in self.pairs],
            "counterexamples": [p.to_jsonable() for p in self.counterexamples],
            "premise_fail_equational": [p.to_jsonable() for p in self.premise_fail_equational],
            "incomplete": [p.to_jsonable() for p in self.incomplete],
        }


def check_theorem(
    terms: Iterable[Term], cfg: GenConfig = GenConfig(), caps: BscaConfig = _HARNESS_CAPS
) -> TheoremReport:
    """Check every pair of distinct non-variable terms in the set.

    A counterexample is a pair that unifies in the combined theory but not
    with xor free, in a set whose tagging check passed.  On sets failing the
    tagging check the same pairs are reported separately: they demonstrate
    the premise does real work.  Caps never pass silently: a capped pair is
    flagged incomplete.
    """
    tlist = []
    seen: set[Term] = set()
    for t in terms:
        if t not in seen:
            seen.add(t)
            tlist.append(t)
    tlist.sort(key=sort_key)
    report = TheoremReport(dnut_check(tlist).satisfied, [], [], [], [])
    for m, t in combinations(tlist, 2):
        if isinstance(m, Var) or isinstance(t, Var):
            continue
        try:
            comb: bool | None = combined_unifiable(m, t, caps)
        except ChoiceSpaceExceeded:
            comb = None
        free = free_unifiable([Problem(m, t)])
        free_uo = free_unifiable([Problem(m, t)], order_sensitive=False)
        pair = PairReport(
            m,
            t,
            comb,
            free,
            free_uo,
            non_variable=True,
            non_sequence=not (isinstance(m, Seq) or isinstance(t, Seq)),
        )
        report.pairs.append(pair)
        if comb is None:
            report.incomplete.append(pair)
        elif comb and not free:
            if report.dnut_satisfied:
                report.counterexamples.append(pair)
            else:
                report.premise_fail_equational.append(pair)
    return report


def shrink_pair(
    m: Term, t: Term, still_failing: Callable[[Term, Term], bool]
) -> tuple[Term, Term]:
    """Greedy shrink of a failing pair: drop xor summands and replace proper
    subterms by an atom, keeping every step that preserves the failure."""
    filler = Const("a")

    def candidates(u: Term) -> list[Term]:
        out = []
        if isinstance(u, Xor) and len(u.items) > 2:
            for k in range(len(u.items)):
                out.append(Xor(u.items[:k] + u.items[k + 1 :]))
        if not is_atom(u):
            out.append(filler)
        from .terms import children, rebuild

        ch = children(u)
        for k, c in enumerate(ch):
            for rc in candidates(c):
                out.append(rebuild(u, ch[:k] + (rc,) + ch[k + 1 :]))
        return out

    changed = True
    while changed:
        changed = False
        for cand in candidates(m):
            if still_failing(cand, t):
                m = cand
                changed = True
                break
        for cand in candidates(t):
            if still_failing(m, cand):
                t = cand
                changed = True
                break
    return m, t


@dataclass
class HarnessReport:
    """Aggregate over many generated tagged protocols."""

    samples: int
    seed: int
    pairs_total: int = 0
    combined_unifiable_pairs: int = 0
    free_unifiable_pairs: int = 0
    counterexamples: list[dict] = field(default_factory=list)
    counterexamples_nonseq: int = 0
    counterexamples_unordered_variant: int = 0
    incomplete: list[dict] = field(default_factory=list)

    def to_jsonable(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "pairs_total": self.pairs_total,
            "combined_unifiable_pairs": self.combined_unifiable_pairs,
            "free_unifiable_pairs": self.free_unifiable_pairs,
            "populations": {
                "non_variables": {
                    "counterexamples": self.counterexamples,
                    "count": len(self.counterexamples),
                },
                "non_variables_non_sequences": {"count": self.counterexamples_nonseq},
            },
            "order_insensitive_variant": {
                "counterexamples": self.counterexamples_unordered_variant
            },
            "incomplete": self.incomplete,
        }


def run_harness(
    cfg: GenConfig, caps: BscaConfig = _HARNESS_CAPS, population: str = "both"
) -> HarnessReport:
    """Generate ``cfg.samples`` tagged protocols and check them all.

    ``population`` selects which pairs count toward the exit-relevant
    counterexample list: ``non-variables`` (sequences included),
    ``no-sequences`` (sequences excluded too) or ``both``.
    """
    report = HarnessReport(samples=cfg.samples, seed=cfg.seed)
    for i in range(cfg.samples):
        protocol = gen_dnut_protocol(cfg, i)
        tr = check_theorem(protocol, cfg, caps)
        report.pairs_total += len(tr.pairs)
        report.combined_unifiable_pairs += sum(1 for p in tr.pairs if p.combined)
        report.free_unifiable_pairs += sum(1 for p in tr.pairs if p.free)
        for p in tr.counterexamples:
            in_pop = (
                population == "both"
                or (population == "non-variables" and p.non_variable)
                or (population == "no-sequences" and p.non_sequence)
            )
            if not in_pop:
                continue
            sm, st = shrink_pair(
                p.lhs,
                p.rhs,
                lambda a, b: combined_unifiable(a, b, caps)
                and not free_unifiable([Problem(a, b)]),
            )
            shrunk = PairReport(sm, st, True, False, p.free_unordered, True, p.non_sequence)
            report.counterexamples.append(
                {"protocol": i, "original": p.to_jsonable(), "shrunk": shrunk.to_jsonable()}
            )
            if p.non_sequence:
                report.counterexamples_nonseq += 1
        for p in tr.pairs:
            if p.combined and not p.free_unordered:
                report.counterexamples_unordered_variant += 1
        for p in tr.incomplete:
            report.incomplete.append({"protocol": i, "pair": p.to_jsonable()})
    return report
