import pytest

from cathom.fincat import (
    BalancedTriples,
    ChainBiset,
    FiniteCategory,
    PChain,
    UnboundedChains,
    chain_bound,
    chain_biset,
    enumerate_chains,
    face,
    nd_tilde_nerve,
)
from cathom.groups import FiniteGroup, orbit_category


def trivial_category():
    return FiniteCategory(["*"], {"id": ("*", "*")}, {("id", "id"): "id"}, {"*": "id"}, name="pt")


def arrow_category():
    """The category [1]: objects 0, 1 and one non-identity arrow."""
    mors = {"i0": ("0", "0"), "i1": ("1", "1"), "a": ("0", "1")}
    comp = {
        ("i0", "i0"): "i0",
        ("i1", "i1"): "i1",
        ("a", "i0"): "a",
        ("i1", "a"): "a",
    }
    return FiniteCategory(["0", "1"], mors, comp, {"0": "i0", "1": "i1"}, name="[1]")


def poset012():
    objs = ["0", "1", "2"]
    mors = {f"i{k}": (k, k) for k in objs}
    mors.update({"a01": ("0", "1"), "a12": ("1", "2"), "a02": ("0", "2")})
    comp = {}
    for f, (a, b) in mors.items():
        for g, (b2, c) in mors.items():
            if b != b2:
                continue
            comp[(g, f)] = next(
                m for m, (x, y) in mors.items() if (x, y) == (a, c)
            )
    return FiniteCategory(objs, mors, comp, {k: f"i{k}" for k in objs}, name="0<1<2")


def group_category(G: FiniteGroup):
    mors = {f"g{a}": ("*", "*") for a in range(G.n)}
    comp = {(f"g{a}", f"g{b}"): f"g{G.mul(a, b)}" for a in range(G.n) for b in range(G.n)}
    return FiniteCategory(["*"], mors, comp, {"*": "g0"}, name=f"B{G.name}")


def idempotent_category():
    """One object with a non-identity idempotent endo: not EI."""
    mors = {"id": ("*", "*"), "e": ("*", "*")}
    comp = {("id", "id"): "id", ("id", "e"): "e", ("e", "id"): "e", ("e", "e"): "e"}
    return FiniteCategory(["*"], mors, comp, {"*": "id"}, name="idem")


class TestValidation:
    def test_trivial_valid(self):
        assert trivial_category().validate().ok

    def test_arrow_valid(self):
        assert arrow_category().validate().ok

    def test_broken_composition_reported(self):
        mors = {"i0": ("0", "0"), "i1": ("1", "1"), "a": ("0", "1")}
        comp = {
            ("i0", "i0"): "i0",
            ("i1", "i1"): "i1",
            ("a", "i0"): "i1",  # wrong: endpoints (0,1) expected
            ("i1", "a"): "a",
        }
        cat = FiniteCategory(["0", "1"], mors, comp, {"0": "i0", "1": "i1"})
        rep = cat.validate()
        assert not rep.ok
        assert any("i1" in v and "a" in v for v in rep.violations)


class TestIsoClasses:
    def test_group_category_single_class(self):
        cat = group_category(FiniteGroup.cyclic(3))
        data = cat.iso_classes()
        assert data.count == 1
        assert sorted(data.aut_group(0)) == sorted(cat.aut("*"))
        assert len(cat.aut("*")) == 3

    def test_or_z2_two_classes(self):
        G = FiniteGroup.cyclic(2)
        cat = orbit_category(G)
        data = cat.iso_classes()
        assert data.count == 2
        # aut(G/1) = Z/2, aut(G/G) trivial
        sizes = sorted(len(cat.aut(r)) for r in data.representative)
        assert sizes == [1, 2]

    def test_isomorphic_copies_merge(self):
        # two objects, isomorphic: 4 morphisms
        mors = {
            "ia": ("a", "a"),
            "ib": ("b", "b"),
            "u": ("a", "b"),
            "v": ("b", "a"),
        }
        comp = {}
        for f, (x, y) in mors.items():
            for g, (y2, z) in mors.items():
                if y != y2:
                    continue
                comp[(g, f)] = next(m for m, (s, t) in mors.items() if (s, t) == (x, z))
        cat = FiniteCategory(["a", "b"], mors, comp, {"a": "ia", "b": "ib"})
        assert cat.validate().ok
        data = cat.iso_classes()
        assert data.count == 1
        assert cat.tgt(data.witness["b"]) == "a"


class TestPredicates:
    def test_group_category_EI_left_free(self):
        cat = group_category(FiniteGroup.cyclic(2))
        assert cat.is_EI()
        assert cat.is_left_free()

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_orbit_categories_left_free(self, n):
        cat = orbit_category(FiniteGroup.cyclic(n))
        assert cat.is_left_free()
        assert cat.is_EI()

    def test_idempotent_not_EI(self):
        assert not idempotent_category().is_EI()

    def test_noniso_morphisms(self):
        G = FiniteGroup.cyclic(2)
        cat = orbit_category(G)
        free, fixed = cat.objects  # G/1 first (order 1 subgroup)
        assert cat.noniso_morphisms(free, free) == []
        assert len(cat.noniso_morphisms(free, fixed)) == 1
        assert cat.noniso_morphisms(fixed, free) == []


class TestChains:
    def test_arrow_chains(self):
        chains = enumerate_chains(arrow_category())
        assert [len(chains[p]) for p in sorted(chains)] == [2, 1]

    def test_group_category_only_zero_chains(self):
        chains = enumerate_chains(group_category(FiniteGroup.cyclic(2)), p_max=2)
        assert len(chains[0]) == 1
        assert chains[1] == [] and chains[2] == []

    def test_or_z4_chain_counts(self):
        # subgroup lattice 1 < Z/2 < Z/4: 3 classes, 3 one-chains, 1 two-chain
        cat = orbit_category(FiniteGroup.cyclic(4))
        chains = enumerate_chains(cat)
        assert [len(chains[p]) for p in sorted(chains)] == [3, 3, 1]
        assert chain_bound(cat) == 2

    def test_or_s3_zero_chains(self):
        cat = orbit_category(FiniteGroup.symmetric(3))
        chains = enumerate_chains(cat)
        assert len(chains[0]) == 4  # conjugacy classes of subgroups

    def test_unbounded_raises(self):
        with pytest.raises(UnboundedChains):
            enumerate_chains(idempotent_category())

    def test_partial_order_antisymmetric(self):
        for cat in (orbit_category(FiniteGroup.cyclic(4)), poset012()):
            pairs = cat.iso_classes().partial_order_pairs()
            for (i, j) in pairs:
                if i != j:
                    assert (j, i) not in pairs


class TestChainBiset:
    def test_or_z2_single_element(self):
        cat = orbit_category(FiniteGroup.cyclic(2))
        chains = enumerate_chains(cat)
        (chain,) = chains[1]
        bs = chain_biset(cat, chain)
        assert bs.size() == 1
        c0, cp = chain.reps[0], chain.reps[-1]
        for a in cat.aut(c0):
            assert bs.right_act(0, a) == 0
        for a in cat.aut(cp):
            assert bs.left_act(a, 0) == 0

    def test_or_z4_two_chain(self):
        cat = orbit_category(FiniteGroup.cyclic(4))
        chains = enumerate_chains(cat)
        (chain2,) = chains[2]
        bs = chain_biset(cat, chain2)
        assert bs.size() == 1

    def test_actions_commute(self):
        cat = orbit_category(FiniteGroup.symmetric(3))
        chains = enumerate_chains(cat)
        for chain in chains[1] + chains[2]:
            bs = chain_biset(cat, chain)
            c0, cp = chain.reps[0], chain.reps[-1]
            for a in cat.aut(cp):
                for b in cat.aut(c0):
                    for k in range(bs.size()):
                        assert bs.right_act(bs.left_act(a, k), b) == bs.left_act(
                            a, bs.right_act(k, b)
                        )

    def test_empty_when_no_morphisms(self):
        cat = orbit_category(FiniteGroup.cyclic(2))
        free, fixed = cat.iso_classes().representative
        bs = ChainBiset(cat, PChain((fixed, free)))
        assert bs.size() == 0


class TestNerve:
    def test_group_category_higher_simplices_empty(self):
        cat = group_category(FiniteGroup.cyclic(2))
        assert nd_tilde_nerve(cat, 1, "*", "*").size() == 0
        assert nd_tilde_nerve(cat, 0, "*", "*").size() == 2

    def test_or_z2_p1_single_class(self):
        cat = orbit_category(FiniteGroup.cyclic(2))
        free, fixed = cat.objects
        assert nd_tilde_nerve(cat, 1, free, fixed).size() == 1

    @pytest.mark.parametrize(
        "catf",
        [
            lambda: trivial_category(),
            lambda: arrow_category(),
            lambda: poset012(),
            lambda: group_category(FiniteGroup.cyclic(3)),
            lambda: orbit_category(FiniteGroup.cyclic(2)),
            lambda: orbit_category(FiniteGroup.cyclic(4)),
        ],
    )
    def test_bijection_with_chain_decomposition(self, catf):
        cat = catf()
        chains = enumerate_chains(cat)
        bisets = {}
        for p in chains:
            for ch in chains[p]:
                if p >= 1:
                    bisets[ch] = chain_biset(cat, ch)
        for p in range(0, 3):
            plist = chains.get(p, [])
            for s in cat.objects:
                for t in cat.objects:
                    cell = nd_tilde_nerve(cat, p, s, t)
                    total = 0
                    hit = set()
                    for ch in plist:
                        bt = BalancedTriples(cat, ch, s, t, bisets.get(ch))
                        total += bt.size()
                        for k in range(bt.size()):
                            hit.add(cell.class_of(bt.to_diagram(k)))
                    assert total == cell.size()
                    assert hit == set(range(cell.size()))

    def test_faces_simplicial(self):
        cat = orbit_category(FiniteGroup.cyclic(4))
        cell2 = nd_tilde_nerve(cat, 2, cat.objects[0], cat.objects[2])
        for d in cell2.classes:
            for i in range(3):
                fi = face(cat, d, i)
                for j in range(i):
                    # d_j d_i = d_{i-1} d_j for j < i
                    left = face(cat, fi, j) if fi else None
                    fj = face(cat, d, j)
                    right = face(cat, fj, i - 1) if fj else None
                    cell0 = nd_tilde_nerve(cat, 0, cat.objects[0], cat.objects[2])
                    lc = cell0.class_of(left) if left else None
                    rc = cell0.class_of(right) if right else None
                    assert lc == rc


class TestBisetActionLaws:
    def test_actions_are_homomorphisms(self):
        cat = orbit_category(FiniteGroup.symmetric(3))
        chains = enumerate_chains(cat)
        for chain in chains[1]:
            bs = chain_biset(cat, chain)
            c0, cp = chain.reps[0], chain.reps[-1]
            for a in cat.aut(cp):
                for b in cat.aut(cp):
                    ab = cat.compose(a, b)
                    for k in range(bs.size()):
                        assert bs.left_act(ab, k) == bs.left_act(a, bs.left_act(b, k))
            for a in cat.aut(c0):
                for b in cat.aut(c0):
                    ab = cat.compose(a, b)
                    for k in range(bs.size()):
                        # right action: s.(a o b) = (s.a).b
                        assert bs.right_act(k, ab) == bs.right_act(bs.right_act(k, a), b)
            ident_p, ident_0 = cat.id_of(cp), cat.id_of(c0)
            for k in range(bs.size()):
                assert bs.left_act(ident_p, k) == k
                assert bs.right_act(k, ident_0) == k
