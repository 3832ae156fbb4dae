import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import elementary_circuits, read, ref_holds, systems
from maxatom.core import BOTTOM, Matrix, NoStarError, kleene_star
from maxatom.model import Classification, classify, fill_matrices, matrices_from_text, preprocess
from maxatom.oracle import check, in_cone
from maxatom.positive import (
    NotMonomialError,
    combine,
    is_monomial,
    monomial_cone,
    pseudo_inverse,
    sharp_matrix,
)

B = BOTTOM
A2 = Matrix([[B, 9, 9, B], [B, B, B, 0], [B, B, 0, B], [B, 25, 25, B]])
A2_INV = Matrix([[B, B, B, B], [-9, B, B, -25], [-9, B, 0, -25], [B, 0, B, B]])
A2_INV_STAR = Matrix([[0, B, B, B], [-9, 0, B, -25], [-9, -25, 0, -25], [-9, 0, B, 0]])


@st.composite
def monomials(draw, max_n=4, lo=-4):
    n = draw(st.integers(1, max_n))
    perm = draw(st.permutations(range(n)))
    weights = [Fraction(draw(st.integers(lo, 4))) for _ in range(n)]
    return [[weights[i] if perm[i] == j else B for j in range(n)] for i in range(n)]


@st.composite
def positive_matrices(draw, max_n=4, full_columns=False):
    n = draw(st.integers(1, max_n))
    entry = st.one_of(st.just(B), st.integers(0, 6).map(Fraction))
    rows = [[draw(entry) for _ in range(n)] for _ in range(n)]
    if full_columns:
        for j in range(n):
            if all(rows[i][j] == B for i in range(n)):
                rows[draw(st.integers(0, n - 1))][j] = Fraction(0)
    for i in range(n):
        if all(v == B for v in rows[i]):
            rows[i][i] = Fraction(0)
    return rows


class TestPseudoInverse:
    def test_identity(self):
        assert pseudo_inverse(Matrix.identity(3)) == Matrix.identity(3)

    def test_worked_example(self):
        assert pseudo_inverse(A2) == A2_INV

    @given(monomials())
    def test_monomial_inverse_is_two_sided(self, m):
        m = Matrix(m)
        eye = Matrix.identity(m.rows)
        assert m @ pseudo_inverse(m) == eye
        assert pseudo_inverse(m) @ m == eye

    @given(positive_matrices(full_columns=True))
    def test_identity_below_inverse_product(self, a):
        a = Matrix(a)
        assert Matrix.identity(a.rows) <= pseudo_inverse(a) @ a
        assert Matrix.identity(a.rows) <= a @ pseudo_inverse(a)

    def test_empty_column_breaks_left_product(self):
        a = Matrix([[B, 0], [B, 0]])
        assert not Matrix.identity(2) <= pseudo_inverse(a) @ a
        assert Matrix.identity(2) <= a @ pseudo_inverse(a)


class TestMonomial:
    def test_identity(self):
        assert is_monomial(Matrix.identity(3))

    def test_weighted_permutation(self):
        assert is_monomial(Matrix([[B, 3], [5, B]]))

    def test_two_entries_in_a_row(self):
        assert not is_monomial(A2)

    def test_non_square(self):
        assert not is_monomial(Matrix([[0, B]]))

    @given(st.integers(1, 5).flatmap(lambda n: st.lists(
        st.lists(st.one_of(st.just(B), st.integers(-3, 3).map(Fraction)), min_size=n, max_size=n),
        min_size=n, max_size=n)))
    def test_every_vertex_on_exactly_one_circuit(self, a):
        # monomial iff the circuits of G(A) partition the vertices and no
        # edge lies outside them
        circuits = [c for c, _ in elementary_circuits(a)]
        covered = sorted(v for c in circuits for v in c)
        edges = sum(v != B for row in a for v in row)
        expected = covered == list(range(len(a))) and edges == len(a)
        assert is_monomial(Matrix(a)) == expected

    def test_two_disjoint_circuits_are_still_monomial(self):
        m = [[B, 1, B, B], [2, B, B, B], [B, B, B, 3], [B, B, 4, B]]
        assert is_monomial(Matrix(m))
        assert len(elementary_circuits(m)) == 2


class TestMonomialCone:
    def test_identity(self):
        assert monomial_cone(Matrix.identity(2)) == Matrix.identity(2)

    def test_two_cycle(self):
        m = Matrix([[B, 1], [2, B]])
        g = monomial_cone(m)
        assert g == Matrix([[0, -2], [-1, 0]])
        for j in range(2):
            col = g.take(cols=[j])
            assert col <= m @ col

    def test_rejects_non_monomial(self):
        with pytest.raises(NotMonomialError):
            monomial_cone(A2)

    def test_negative_circuit_has_no_cone(self):
        with pytest.raises(NoStarError):
            monomial_cone(Matrix([[-1]]))

    @given(monomials(max_n=3, lo=0))
    @settings(max_examples=60)
    def test_cone_is_the_solution_set(self, m):
        gens = monomial_cone(Matrix(m))
        inv = pseudo_inverse(Matrix(m)).tolist()
        grid = [B] + [Fraction(v) for v in range(-4, 5)]
        for x in itertools.product(grid, repeat=len(m)):
            solves = ref_holds(x, m)
            assert solves == in_cone(gens, x)
            # x <= M x  iff  M^- x <= x
            mx = Matrix(inv) @ Matrix.column(x)
            assert solves == all(a <= b for a, b in zip(mx.column_values(), x))


class TestSharp:
    def test_worked_example(self):
        ps = sharp_matrix([A2])
        assert ps.combined_inverse == A2_INV
        assert ps.inverse_star == A2_INV_STAR
        assert kleene_star(A2_INV) == A2_INV_STAR
        assert A2_INV_STAR <= A2 @ A2_INV_STAR
        assert ps.sharp == A2_INV_STAR
        assert combine(ps, [0, 0, 0, 0]) == [0, 0, 0, 0]
        assert ps.nontrivial_columns == 4

    def test_identity_system(self):
        ps = sharp_matrix([Matrix.identity(3)])
        assert ps.sharp == Matrix.identity(3)

    def test_from_file(self):
        system, ms = matrices_from_text(read("positive.map"))
        assert classify(system) is Classification.ALL_POSITIVE
        assert sharp_matrix(ms.all).sharp == A2_INV_STAR

    def test_empty_list(self):
        with pytest.raises(ValueError):
            sharp_matrix([])

    @given(systems(max_n=4, max_m=6, lo=0, hi=5))
    @settings(max_examples=100)
    def test_columns_and_combinations_solve(self, system):
        system = preprocess(system)
        ms = fill_matrices(system)
        ps = sharp_matrix(ms.all)
        for a in ms.all:
            assert ps.sharp <= a @ ps.sharp
            ones = Matrix.column([0] * system.n)
            assert ones <= a @ ones
        assert ps.nontrivial_columns <= system.n
        rng = random.Random(system.n)
        for _ in range(10):
            w = [rng.choice([B, rng.randint(-5, 5)]) for _ in range(system.n)]
            assert check(combine(ps, w), system)
