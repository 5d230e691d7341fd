"""Shared hypothesis strategies for random terms."""

import hypothesis.strategies as st

from taggedunify.terms import ZERO, Const, Penc, Pk, Seq, Senc, Sh, TagConst, Var, Xor

const_names = st.sampled_from(["a", "b", "c", "na", "k", "n_b"])
var_names = st.sampled_from(["A", "B", "N_B", "K2", "_t"])
tag_paths = st.lists(st.integers(1, 4), min_size=1, max_size=3).map(tuple)

consts = st.builds(Const, const_names)
variables = st.builds(Var, var_names)
tags = st.builds(TagConst, tag_paths)
atoms = st.one_of(consts, variables, tags, st.just(ZERO))


def terms(with_xor: bool = True, with_vars: bool = True, max_leaves: int = 12):
    base = atoms if with_vars else st.one_of(consts, tags, st.just(ZERO))

    def extend(inner):
        options = [
            st.lists(inner, min_size=2, max_size=3).map(lambda xs: Seq(tuple(xs))),
            st.builds(Penc, inner, inner),
            st.builds(Senc, inner, inner),
            st.builds(Pk, inner),
            st.builds(Sh, inner, inner),
        ]
        if with_xor:
            options.append(st.lists(inner, min_size=2, max_size=3).map(lambda xs: Xor(tuple(xs))))
        return st.one_of(options)

    return st.recursive(base, extend, max_leaves=max_leaves)


def xor_terms(max_leaves: int = 10):
    return (
        st.lists(terms(max_leaves=4), min_size=2, max_size=4)
        .map(lambda xs: Xor(tuple(xs)))
    )


def pure_xor_terms(max_width: int = 4):
    # summands are atoms only: pure wrt the xor theory
    return st.one_of(
        atoms,
        st.lists(atoms, min_size=2, max_size=max_width).map(lambda xs: Xor(tuple(xs))),
    )
