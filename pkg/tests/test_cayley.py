"""Groups, generating sets, and the left-right Cayley complex geometry."""

import math

import numpy as np
import pytest

from qtanner import cayley
from qtanner.cayley import V00, V01, V10, V11
from qtanner.errors import BudgetError, GeneratingSetError, GroupAxiomError


class TestBuildGroup:
    def test_trivial_cyclic(self):
        g = cayley.build_group("cyclic", 1)
        assert g.order == 1 and g.id == 0

    def test_cyclic_is_modular_addition(self):
        g = cayley.build_group("cyclic", 5)
        assert g.mul[2][4] == 1
        assert g.inv[2] == 3

    def test_dihedral_nonabelian_witness(self):
        g = cayley.build_group("dihedral", 3)
        assert g.order == 6
        witness = any(
            g.mul[a][b] != g.mul[b][a] for a in range(6) for b in range(6)
        )
        assert witness

    def test_table_round_trip(self):
        src = cayley.build_group("dihedral", 4)
        g = cayley.build_group("table", table=src.mul)
        assert g.order == 8 and g.inv == src.inv

    def test_axiom_violation_names_triple(self):
        bad = [[0, 1], [1, 1]]  # 1*1 = 1 breaks inverses/associativity
        with pytest.raises(GroupAxiomError):
            cayley.build_group("table", table=bad)

    def test_broken_associativity_reported(self):
        # latin square that is not associative (order 5 quasigroup)
        t = [
            [0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 4, 0, 1, 3],
            [3, 2, 4, 0, 1],
            [4, 3, 1, 2, 0],
        ]
        with pytest.raises(GroupAxiomError, match="triple|identity|inverse"):
            cayley.build_group("table", table=t)


class TestValidateGeneratingSet:
    def test_z5_symmetric_pair(self):
        g = cayley.build_group("cyclic", 5)
        s = cayley.validate_generating_set(g, [1, 4])
        assert s.size == 2

    def test_z6_even_residues_rejected_with_size(self):
        g = cayley.build_group("cyclic", 6)
        with pytest.raises(GeneratingSetError, match="size 3"):
            cayley.validate_generating_set(g, [2, 4])

    def test_z13_reference_set(self):
        g = cayley.build_group("cyclic", 13)
        s = cayley.validate_generating_set(g, [1, 12, 5, 8])
        assert s.size == 4

    def test_missing_inverse_named(self):
        g = cayley.build_group("cyclic", 5)
        with pytest.raises(GeneratingSetError, match="inverse of 1"):
            cayley.validate_generating_set(g, [1, 2, 3])


def build_z13():
    g = cayley.build_group("cyclic", 13)
    return cayley.build_complex(g, [1, 12, 5, 8], [1, 12, 5, 8])


class TestComplexCounts:
    def test_z5_counts(self):
        g = cayley.build_group("cyclic", 5)
        cx = cayley.build_complex(g, [1, 4], [1, 4])
        assert cx.num_vertices == 20
        assert cx.num_faces == 20
        assert cx.num_a_edges == cx.num_b_edges == 20

    def test_z13_face_count(self):
        assert build_z13().num_faces == 13 * 16

    def test_faces_have_one_vertex_per_class(self):
        cx = build_z13()
        order = cx.group.order
        for q in range(cx.num_faces):
            classes = sorted(v // order for v in cx.face_vertices(q))
            assert classes == [V00, V01, V10, V11]

    def test_face_index_bijection(self):
        cx = build_z13()
        for q in range(cx.num_faces):
            g, ai, bi = cx.face_triple(q)
            assert cx.face_index(g, ai, bi) == q


class TestLocalView:
    def test_each_face_in_exactly_four_views(self):
        cx = build_z13()
        hits = [0] * cx.num_faces
        for v in range(cx.num_vertices):
            view = cx.local_view(v)
            assert len(set(view)) == cx.delta**2  # all entries distinct
            for q in view:
                hits[q] += 1
        assert all(h == 4 for h in hits)

    def test_view_matches_face_incidence(self):
        cx = build_z13()
        for v in range(cx.num_vertices):
            for q in cx.local_view(v):
                assert v in cx.face_vertices(q)

    def test_same_class_views_disjoint(self):
        cx = build_z13()
        order = cx.group.order
        for cls in (V00, V01, V10, V11):
            seen = set()
            for g in range(order):
                view = set(cx.local_view(cx.vertex(g, cls)))
                assert not (seen & view)
                seen |= view

    def test_z5_enumeration_cross_check(self):
        g = cayley.build_group("cyclic", 5)
        cx = cayley.build_complex(g, [1, 4], [1, 4])
        # entry (a=1, b=4) of vertex (0, 00) is face (0, 1, 4)
        ai = cx.gens_a.elements.index(1)
        bi = cx.gens_b.elements.index(4)
        view = cx.local_view(cx.vertex(0, V00))
        assert view[ai * 2 + bi] == cx.face_index(0, ai, bi)

    def test_invalid_vertex(self):
        with pytest.raises(IndexError):
            build_z13().local_view(10_000)


class TestEdgeFaceIncidence:
    def test_a_edges_have_delta_faces(self):
        cx = build_z13()
        for i in (0, 1):
            for g in range(cx.group.order):
                for ai in range(cx.delta):
                    faces = cx.faces_of_a_edge(i, g, ai)
                    assert len(set(faces)) == cx.delta
                    # every face shares the defining vertex pair
                    a = cx.gens_a.elements[ai]
                    u = cx.vertex(g, V00 if i == 0 else V10)
                    w = cx.vertex(cx.group.mul[a][g], V01 if i == 0 else V11)
                    for q in faces:
                        vs = cx.face_vertices(q)
                        assert u in vs and w in vs

    def test_b_edges_have_delta_faces(self):
        cx = build_z13()
        for j in (0, 1):
            for g in range(cx.group.order):
                for bi in range(cx.delta):
                    faces = cx.faces_of_b_edge(j, g, bi)
                    assert len(set(faces)) == cx.delta


class TestSecondEigenvalue:
    def test_complete_graph_spectrum(self):
        # Z_5 with every non-identity generator is K_5: lambda2 = -1
        g = cayley.build_group("cyclic", 5)
        cx = cayley.build_complex(g, [1, 2, 3, 4], [1, 2, 3, 4])
        lam2, flag = cx.second_eigenvalue("A")
        assert lam2 == pytest.approx(-1.0, abs=1e-9)
        assert flag

    def test_cycle_spectrum(self):
        m = 12
        g = cayley.build_group("cyclic", m)
        cx = cayley.build_complex(g, [1, m - 1], [1, m - 1])
        lam2, _ = cx.second_eigenvalue("B")
        assert lam2 == pytest.approx(2 * math.cos(2 * math.pi / m), abs=1e-9)

    def test_power_iteration_oracle(self):
        cx = build_z13()
        lam2, flag = cx.second_eigenvalue("A")
        n = cx.group.order
        # shift by the degree so the spectrum is nonnegative, deflate the
        # all-ones top eigenvector, and power-iterate for lambda2 + delta
        shifted = cx.adjacency("A") + cx.delta * np.eye(n)
        rng = np.random.default_rng(31)
        v = rng.standard_normal(n)
        ones = np.ones(n) / math.sqrt(n)
        v -= ones * (ones @ v)
        for _ in range(20_000):
            v = shifted @ v
            v -= ones * (ones @ v)
            v /= np.linalg.norm(v)
        estimate = float(v @ (shifted @ v)) - cx.delta
        assert lam2 == pytest.approx(estimate, abs=1e-6)
        assert flag == (lam2 <= 2 * math.sqrt(cx.delta - 1) + 1e-9)

    def test_budget(self, monkeypatch):
        monkeypatch.setattr(cayley, "MAX_EIGENSOLVE_ORDER", 8)
        g = cayley.build_group("cyclic", 12)
        cx = cayley.build_complex(g, [1, 11], [1, 11])
        with pytest.raises(BudgetError):
            cx.second_eigenvalue("A")


def test_mismatched_generator_sizes_rejected():
    g = cayley.build_group("cyclic", 7)
    with pytest.raises(GeneratingSetError):
        cayley.build_complex(g, [1, 6], [1, 6, 2, 5])
