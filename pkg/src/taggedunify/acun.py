"""Complete unification for pure xor problems (the ACUN theory with free
constants).

Each problem ``m ~? t`` is rewritten as ``nf(m + t) = 0`` and becomes one
linear equation over GF(2) whose unknowns are the variables and whose
right-hand side is a set of atoms.  The joint system for the whole problem
set is solved by Gaussian elimination on bitmask rows; the solution space is
parameterized, not disjunctive, so a single most general unifier suffices
when the system is consistent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .terms import (
    ZERO,
    Problem,
    Term,
    Theory,
    Var,
    Xor,
    acun_normal_form,
    is_pure,
    problem_vars,
    sort_key,
    xor_of,
)
from .unify import ImpureTermError, Substitution


@dataclass(frozen=True)
class Gf2System:
    """The GF(2) encoding of a pure xor problem set.

    ``rows[k]`` is ``(var_mask, atom_mask)``: bit ``i`` of ``var_mask`` set
    means ``variables[i]`` occurs (an odd number of times) in equation ``k``,
    and likewise for atoms.  Construction is basis-stable: the same problem
    set always produces the same matrix.
    """

    atoms: tuple[Term, ...]
    variables: tuple[str, ...]
    rows: tuple[tuple[int, int], ...]


def build_gf2_system(problems: Iterable[Problem]) -> Gf2System:
    probs = list(problems)
    for p in probs:
        for side in (p.lhs, p.rhs):
            if not is_pure(side, Theory.ACUN):
                raise ImpureTermError("standard-theory subterm in a pure xor problem")
    # the unity element contributes nothing: nf drops it before encoding
    diffs = [acun_normal_form(Xor((p.lhs, p.rhs))) for p in probs]
    summand_lists = [
        () if d == ZERO else (d.items if isinstance(d, Xor) else (d,)) for d in diffs
    ]
    var_names = sorted(problem_vars(probs))
    atom_set = {u for summands in summand_lists for u in summands if not isinstance(u, Var)}
    atoms = tuple(sorted(atom_set, key=sort_key))
    atom_index = {a: i for i, a in enumerate(atoms)}
    var_index = {v: i for i, v in enumerate(var_names)}
    rows = []
    for summands in summand_lists:
        vm = am = 0
        for u in summands:
            if isinstance(u, Var):
                vm ^= 1 << var_index[u.name]
            else:
                am ^= 1 << atom_index[u]
        rows.append((vm, am))
    return Gf2System(atoms, tuple(var_names), tuple(rows))


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _fresh_params(taken: Iterable[str], count: int) -> list[str]:
    # run-scoped _fN counter, renamed away from every input variable
    used = set(taken)
    out: list[str] = []
    n = 1
    while len(out) < count:
        name = f"_f{n}"
        n += 1
        if name not in used:
            out.append(name)
    return out


def unify_acun(
    problems: Iterable[Problem], theory: Theory = Theory.ACUN
) -> list[Substitution]:
    """Complete set of most general unifiers for a pure xor problem set.

    Returns a one-element list (elementary xor unification with free
    constants has a single parameterized mgu) or the empty list when the
    GF(2) system is inconsistent.  Free dimensions of the solution space are
    named by fresh ``_fN`` variables; variables whose occurrences cancel
    outright stay unbound, so ``unify_acun([Problem(t, t)])`` yields the
    empty substitution.

    The ``theory`` tag is an extension point; only the xor theory ships
    with a solver.
    """
    if theory is not Theory.ACUN:
        raise NotImplementedError(f"no equational solver for {theory.value}")
    system = build_gf2_system(problems)
    pivots: dict[int, tuple[int, int]] = {}
    for vm, am in system.rows:
        for j, (pvm, pam) in pivots.items():
            if vm >> j & 1:
                vm ^= pvm
                am ^= pam
        if vm:
            j = (vm & -vm).bit_length() - 1
            pivots[j] = (vm, am)
        elif am:
            return []
    # back-substitute to reduced form: pivot rows mention only free columns
    for j in sorted(pivots, reverse=True):
        vm, am = pivots[j]
        for k in list(pivots):
            if k != j and pivots[k][0] >> j & 1:
                pivots[k] = (pivots[k][0] ^ vm, pivots[k][1] ^ am)
    free_used = sorted(
        {k for vm, _ in pivots.values() for k in _bits(vm)} - set(pivots)
    )
    params = _fresh_params(system.variables, len(free_used))
    param_term = {k: Var(name) for k, name in zip(free_used, params)}
    bindings: dict[str, Term] = {}
    for j in sorted(pivots):
        vm, am = pivots[j]
        parts: list[Term] = [param_term[k] for k in _bits(vm) if k != j]
        parts.extend(system.atoms[i] for i in _bits(am))
        bindings[system.variables[j]] = xor_of(sorted(parts, key=sort_key))
    for k in free_used:
        bindings[system.variables[k]] = param_term[k]
    return [Substitution(bindings)]
