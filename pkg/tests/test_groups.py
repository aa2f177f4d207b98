import pytest

from cathom.fincat import enumerate_chains
from cathom.groups import (
    FiniteGroup,
    GroupTooLarge,
    SubgroupFamily,
    check_M,
    check_NM,
    cofinal_inclusion_check,
    count_equivariant_maps,
    group_from_aut,
    orbit_category,
    reduce_family,
    subgroup_lattice,
)


def klein_four():
    return FiniteGroup.direct_product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2))


class TestFiniteGroup:
    @pytest.mark.parametrize("G", [FiniteGroup.cyclic(5), FiniteGroup.symmetric(3), klein_four()])
    def test_axioms(self, G):
        assert G.validate() == []

    def test_symmetric3_order(self):
        assert FiniteGroup.symmetric(3).n == 6

    def test_too_large(self):
        with pytest.raises(GroupTooLarge):
            FiniteGroup.cyclic(17).subgroups()


class TestSubgroups:
    def test_z4_lattice(self):
        G = FiniteGroup.cyclic(4)
        subs = G.subgroups()
        assert [len(H) for H in subs] == [1, 2, 4]
        for entry in subgroup_lattice(G):
            assert entry.normalizer == frozenset(range(4))  # abelian: all normal
            assert entry.weyl.group.n == 4 // len(entry.subgroup)

    def test_s3_lattice(self):
        G = FiniteGroup.symmetric(3)
        subs = G.subgroups()
        assert len(subs) == 6
        orders = sorted(len(H) for H in subs)
        assert orders == [1, 2, 2, 2, 3, 6]
        classes = {frozenset(e.conjugacy_class.__len__() for e in [x]) for x in subgroup_lattice(G)}
        sizes = sorted(len(e.conjugacy_class) for e in subgroup_lattice(G))
        assert sizes == [1, 1, 1, 3, 3, 3]

    def test_trivial_group(self):
        assert FiniteGroup.trivial().subgroups() == [frozenset([0])]

    def test_weyl_orders_s3(self):
        G = FiniteGroup.symmetric(3)
        w = {len(H): G.weyl(H).group.n for H in G.subgroups()}
        assert w[1] == 6 and w[2] == 1 and w[3] == 2 and w[6] == 1


class TestFamilies:
    def test_closure_computed(self):
        G = FiniteGroup.symmetric(3)
        c2 = next(H for H in G.subgroups() if len(H) == 2)
        F = SubgroupFamily(G, [c2])
        assert len(F) == 3

    def test_not_closed_rejected(self):
        G = FiniteGroup.symmetric(3)
        c2 = next(H for H in G.subgroups() if len(H) == 2)
        with pytest.raises(ValueError):
            SubgroupFamily(G, [c2], closure=False)

    def test_M_NM_s3_proper(self):
        G = FiniteGroup.symmetric(3)
        proper = [H for H in G.subgroups() if len(H) < 6]
        F = SubgroupFamily(G, proper, closure=False)
        assert check_M(G, F)
        assert not check_NM(G, F)  # N(C3) = S3 != C3

    def test_M_z4_all(self):
        G = FiniteGroup.cyclic(4)
        F = SubgroupFamily.all_subgroups(G)
        assert check_M(G, F)

    def test_M_trivial_family(self):
        G = FiniteGroup.cyclic(4)
        assert check_M(G, SubgroupFamily.trivial(G))

    def test_cofinal_check_v4_fails(self):
        G = klein_four()
        all_f = SubgroupFamily.all_subgroups(G)
        proper = SubgroupFamily(G, [H for H in G.subgroups() if len(H) < 4], closure=False)
        ok, wit = cofinal_inclusion_check(proper, all_f)
        assert not ok
        assert wit["counterexample"] == frozenset(range(4))

    def test_cofinal_check_unique_maximal(self):
        G = FiniteGroup.cyclic(4)
        all_f = SubgroupFamily.all_subgroups(G)
        sub = SubgroupFamily(G, [H for H in G.subgroups() if len(H) != 2], closure=False)
        ok, wit = cofinal_inclusion_check(sub, all_f)
        assert ok
        z2 = next(H for H in G.subgroups() if len(H) == 2)
        assert wit[z2] == frozenset(range(4))

    def test_reduce_family_s3(self):
        G = FiniteGroup.symmetric(3)
        F = SubgroupFamily.all_subgroups(G)
        red = reduce_family(F)
        assert red.members == [frozenset(range(6))]
        ok, _ = cofinal_inclusion_check(red, F)
        assert ok


class TestOrbitCategory:
    def test_or_z2_mor_counts(self):
        G = FiniteGroup.cyclic(2)
        cat = orbit_category(G)
        free, fixed = cat.objects
        assert len(cat.hom[(free, free)]) == 2
        assert len(cat.hom[(free, fixed)]) == 1
        assert cat.hom[(fixed, free)] == []
        assert len(cat.hom[(fixed, fixed)]) == 1
        assert cat.validate().ok

    @pytest.mark.parametrize("Gf", [lambda: FiniteGroup.cyclic(4), lambda: FiniteGroup.symmetric(3), klein_four])
    def test_valid_left_free_EI(self, Gf):
        cat = orbit_category(Gf())
        assert cat.validate().ok
        assert cat.is_left_free()
        assert cat.is_EI()

    @pytest.mark.parametrize("Gf", [lambda: FiniteGroup.cyclic(4), lambda: FiniteGroup.symmetric(3), klein_four])
    def test_mor_counts_match_brute_force(self, Gf):
        G = Gf()
        cat = orbit_category(G)
        for a in cat.objects:
            for b in cat.objects:
                H = cat.subgroup_of[a]
                K = cat.subgroup_of[b]
                brute = count_equivariant_maps(G, H, K)
                formula = len([g for g in range(G.n)
                               if all(G.conj(h, G.inv[g]) in K for h in H)]) // len(K)
                assert len(cat.hom[(a, b)]) == brute == formula

    @pytest.mark.parametrize("Gf", [lambda: FiniteGroup.cyclic(4), lambda: FiniteGroup.symmetric(3), klein_four])
    def test_weyl_iso_aut(self, Gf):
        G = Gf()
        cat = orbit_category(G)
        for obj in cat.objects:
            H = cat.subgroup_of[obj]
            wd = G.weyl(H)
            phi = cat.weyl_to_aut(obj)
            auts = set(cat.aut(obj))
            assert set(phi.values()) == auts
            # group homomorphism: phi(ab) = phi(a) o phi(b)
            for i in range(wd.group.n):
                for j in range(wd.group.n):
                    assert phi[wd.group.mul(i, j)] == cat.compose(phi[i], phi[j])

    def test_iso_classes_are_conjugacy_classes(self):
        G = FiniteGroup.symmetric(3)
        cat = orbit_category(G)
        data = cat.iso_classes()
        assert data.count == 4
        # chain relation = subconjugate but not conjugate
        chains = enumerate_chains(cat)
        for chain in chains[1]:
            H = cat.subgroup_of[chain.reps[0]]
            K = cat.subgroup_of[chain.reps[1]]
            assert any(
                all(G.conj(h, g) in K for h in H) for g in range(G.n)
            )
            assert len(H) < len(K)

    def test_tr_family_gives_group(self):
        G = FiniteGroup.symmetric(3)
        cat = orbit_category(G, SubgroupFamily.trivial(G))
        assert len(cat.objects) == 1
        assert len(cat.aut(cat.objects[0])) == 6

    def test_group_from_aut(self):
        G = FiniteGroup.symmetric(3)
        cat = orbit_category(G)
        obj = cat.objects[0]  # G/1
        A, elems = group_from_aut(cat, obj)
        assert A.n == 6
        assert A.validate() == []
        assert elems[0] == cat.id_of(obj)
