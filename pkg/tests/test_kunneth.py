import random

import pytest
from hypothesis import assume, given, strategies as st

from morsehom import CriticalPointId as G
from morsehom import SignedCount as N
from morsehom import build_complex, homology
from morsehom.errors import TorsionNotSupported
from morsehom.int_linalg import HomologyGroup
from morsehom.kunneth import kunneth_groups, product_complex, product_generators, verify_kunneth

from oracles import random_complex
from test_chain_complex import sphere, torus

POINT = build_complex(0, [G("pt", 0)], [])


def torsion_free(c):
    return all(g.is_free for g in homology(c))


def test_generator_counts():
    gens = product_generators(sphere(), torus())
    assert len(gens) == 8
    by_index = [sum(1 for g in gens if g.index == k) for k in range(5)]
    assert by_index == [1, 2, 2, 2, 1]
    assert all(g.index == g.first.index + g.second.index for g in gens)


def test_point_is_a_unit():
    for c in (sphere(), torus()):
        p = product_complex(c, POINT)
        assert p.ranks == c.ranks
        assert [m.to_rows() for m in p.boundaries] == [m.to_rows() for m in c.boundaries]
        assert homology(p) == homology(c)


def test_summands_degree_two():
    s = kunneth_groups(homology(sphere()), homology(torus()), 2)
    assert {x.degree_pair for x in s} == {(0, 2), (2, 0)}
    assert sum(x.group.free_rank for x in s) == 2
    assert kunneth_groups(homology(sphere()), homology(torus()), 5) == []
    zero = kunneth_groups(homology(sphere()), homology(torus()), 0)
    assert [(x.degree_pair, x.group) for x in zero] == [((0, 0), HomologyGroup(1))]


def test_sphere_torus_agreement():
    rep = verify_kunneth(sphere(), torus())
    assert rep.consistent
    assert rep.direct_ranks == rep.predicted_ranks == (1, 2, 2, 2, 1)


def test_point_point():
    rep = verify_kunneth(POINT, POINT)
    assert rep.direct_ranks == (1,) and rep.consistent


def test_torus_squared():
    assert verify_kunneth(torus(), torus()).direct_ranks == (1, 4, 6, 4, 1)


def test_torsion_is_refused():
    rp2 = build_complex(2, [G("e2", 2), G("e1", 1), G("e0", 0)], [N("e2", "e1", 2)])
    with pytest.raises(TorsionNotSupported):
        kunneth_groups(homology(rp2), homology(torus()), 1)
    rep = verify_kunneth(rp2, torus())
    assert rep.predicted_ranks is None and rep.skipped_reason.startswith("skipped (torsion)")
    assert not rep.consistent
    # the product complex itself is still fine
    assert len(homology(product_complex(rp2, torus()))) == 5


def test_koszul_sign():
    c1 = build_complex(1, [G("x", 1), G("p", 0)], [N("x", "p", 1)])
    c2 = build_complex(1, [G("y", 1), G("q", 0)], [N("y", "q", 1)])
    prod = product_complex(c1, c2)
    assert prod.coefficient("(x,y)", "(p,y)") == 1
    assert prod.coefficient("(x,y)", "(x,q)") == -1
    assert prod.coefficient("(p,y)", "(p,q)") == 1


@given(st.randoms(use_true_random=False))
def test_product_is_a_complex(rnd):
    c1, c2 = random_complex(rnd, prefix="x"), random_complex(rnd, prefix="y")
    prod = product_complex(c1, c2)
    for k in range(2, prod.dimension + 1):
        assert (prod.boundaries[k - 1] @ prod.boundaries[k]).is_zero()
    # a nonzero coefficient moves exactly one factor
    for k in range(1, prod.dimension + 1):
        for i, src in enumerate(prod.generators[k]):
            for j, tgt in enumerate(prod.generators[k - 1]):
                if prod.boundaries[k][j, i]:
                    a, b = src.label[1:-1].split(","), tgt.label[1:-1].split(",")
                    assert (a[0] == b[0]) != (a[1] == b[1])


@given(st.randoms(use_true_random=False))
def test_graded_commutative(rnd):
    c1, c2 = random_complex(rnd, prefix="x"), random_complex(rnd, prefix="y")
    assert homology(product_complex(c1, c2)) == homology(product_complex(c2, c1))


@given(st.randoms(use_true_random=False))
def test_kunneth_agrees_on_torsion_free(rnd):
    c1, c2 = random_complex(rnd, prefix="x"), random_complex(rnd, prefix="y")
    assume(torsion_free(c1) and torsion_free(c2))
    rep = verify_kunneth(c1, c2)
    assert rep.consistent, (rep.direct_ranks, rep.predicted_ranks)


def test_kunneth_seeded_batch():
    rnd = random.Random(2024)
    checked = 0
    while checked < 30:
        c1, c2 = random_complex(rnd, prefix="x"), random_complex(rnd, prefix="y")
        if torsion_free(c1) and torsion_free(c2):
            assert verify_kunneth(c1, c2).consistent
            checked += 1
