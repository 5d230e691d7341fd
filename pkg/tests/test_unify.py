import hypothesis.strategies as st
import pytest
from hypothesis import given

from strategies import terms
from taggedunify.oracle import GenConfig, gen_problem, ground_unifiable
from taggedunify.terms import Const, Problem, Theory, Var, Xor, equal_mod, vars_of
from taggedunify.textfmt import parse_term
from taggedunify.unify import ImpureTermError, Substitution, unify_free_xor, unify_std


def prob(lhs: str, rhs: str) -> Problem:
    return Problem(parse_term(lhs), parse_term(rhs))


class TestApply:
    def test_binding(self):
        s = Substitution({"A": Const("b")})
        assert s.apply(parse_term("[2, A]")) == parse_term("[2, b]")

    def test_identity(self):
        t = parse_term("penc(A, pk(b))")
        assert Substitution().apply(t) == t

    def test_grounding_a_sum(self):
        s = Substitution({"W": Const("w"), "X": Const("x"), "Y": Const("y")})
        got = s.apply(Xor((Var("W"), Var("X"), Var("Y"), Var("Y"))))
        assert got == parse_term("xor(w, x, y, y)")

    @given(terms())
    def test_idempotent_substitutions_apply_twice_same(self, t):
        s = Substitution({"A": Const("a"), "B": parse_term("pk(c)")})
        assert s.apply(s.apply(t)) == s.apply(t)


class TestCompose:
    def test_chained(self):
        s = Substitution({"X": Var("Y")})
        r = Substitution({"Y": Const("a")})
        assert s.compose(r).bindings == {"X": Const("a"), "Y": Const("a")}

    def test_right_identity(self):
        s = Substitution({"X": Const("a")})
        assert s.compose(Substitution()) == s

    def test_left_binding_wins(self):
        s = Substitution({"X": Const("a")})
        r = Substitution({"X": Const("b")})
        assert s.compose(r).bindings == {"X": Const("a")}

    @given(terms(max_leaves=8))
    def test_defining_equation(self, t):
        s = Substitution({"A": Var("B")})
        r = Substitution({"B": Const("c"), "N_B": Const("a")})
        assert s.compose(r).apply(t) == r.apply(s.apply(t))


class TestUnifyStd:
    def test_decompose_and_bind(self):
        got = unify_std([prob("[1, A]", "[1, b]")])
        assert got == Substitution({"A": Const("b")})

    def test_distinct_tags_never_unify(self):
        assert unify_std([prob("[1, a]", "[2, b]")]) is None

    def test_occurs_check(self):
        assert unify_std([prob("X", "pk(X)")]) is None

    def test_rejects_xor(self):
        with pytest.raises(ImpureTermError):
            unify_std([prob("X", "xor(a, b)")])

    def test_sequences_of_different_length(self):
        assert unify_std([prob("[a, b]", "[a, b, c]")]) is None

    def test_joint_system(self):
        got = unify_std([prob("X", "penc(A, k)"), prob("X", "penc(b, k)")])
        assert got is not None
        assert got.bindings["A"] == Const("b")

    @given(st.integers(0, 10_000))
    def test_soundness_and_oracle_agreement(self, index):
        cfg = GenConfig(seed=4)
        problems = gen_problem(cfg, index)
        try:
            sigma = unify_std(problems)
        except ImpureTermError:
            return  # xor-containing sample: out of this solver's domain
        if sigma is not None:
            assert sigma.is_idempotent()
            for p in problems:
                assert equal_mod(sigma.apply(p.lhs), sigma.apply(p.rhs), Theory.STD)
        assert (sigma is not None) == ground_unifiable(problems, Theory.STD, cfg)

    @given(terms(with_xor=False, max_leaves=8), st.integers(0, 3))
    def test_most_generality_on_constructed_instances(self, pattern, salt):
        # build a known unifier rho, then check rho factors through the mgu
        names = sorted(vars_of(pattern))
        ground = [Const("a"), parse_term("pk(b)"), parse_term("[c, c]"), Const("na")]
        rho = Substitution({v: ground[(i + salt) % len(ground)] for i, v in enumerate(names)})
        problem = Problem(pattern, rho.apply(pattern))
        sigma = unify_std([problem])
        assert sigma is not None
        matcher = unify_std(
            [Problem(sigma.apply(Var(v)), rho.apply(Var(v))) for v in names]
        )
        assert matcher is not None
        for v in names:
            assert sigma.compose(matcher).apply(Var(v)) == rho.apply(Var(v))


class TestUnifyFreeXor:
    def test_positional_decomposition(self):
        got = unify_free_xor([prob("xor(a, X)", "xor(a, b)")])
        assert got == Substitution({"X": Const("b")})

    def test_order_sensitive(self):
        assert unify_free_xor([prob("xor(a, b)", "xor(b, a)")]) is None

    def test_width_clash(self):
        assert unify_free_xor([prob("xor(a, b)", "xor(a, b, c)")]) is None

    def test_variable_binds_to_whole_xor(self):
        got = unify_free_xor([prob("X", "xor(a, b)")])
        assert got == Substitution({"X": parse_term("xor(a, b)")})
