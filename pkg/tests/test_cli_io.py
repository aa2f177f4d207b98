import json
import os

import pytest

from cathom.cache import DiskCache, cached_free_resolution, resolution_from_json, resolution_to_json
from cathom.catmod import CatModule, CO
from cathom.cli import main
from cathom.fixtures import fixture_category, fixture_modules, klein_four
from cathom.groups import FiniteGroup, SubgroupFamily
from cathom.resolve import free_resolution
from cathom.rings import ZZ
from cathom.serialize import (
    ParseError,
    bundle_to_json,
    category_from_json,
    category_to_json,
    content_hash,
    group_from_json,
    group_to_json,
    load_bundle,
    module_from_json,
    module_to_json,
    workspace_from_json,
)


@pytest.fixture()
def orz2_bundle(tmp_path):
    cat = fixture_category("OrZ2")
    Ms, Ns = fixture_modules(cat, ZZ)
    G = FiniteGroup.symmetric(3)
    fam = SubgroupFamily.all_subgroups(G)
    doc = bundle_to_json(
        cat,
        modules={"Mconst": Ms["const"], "Malt": Ms["alt"],
                 "Nconst": Ns["const"], "Naug": Ns["aug"]},
        groups={"S3": G},
        families={"all": ("S3", fam)},
    )
    path = tmp_path / "orz2.json"
    path.write_text(json.dumps(doc))
    return str(path)


class TestRoundTrips:
    @pytest.mark.parametrize("name", ["point", "arrow", "OrZ2", "OrZ4"])
    def test_category_round_trip(self, name):
        cat = fixture_category(name)
        doc = category_to_json(cat)
        cat2 = category_from_json(doc)
        assert content_hash(category_to_json(cat2)) == content_hash(doc)

    def test_group_round_trip(self):
        for G in (FiniteGroup.cyclic(4), FiniteGroup.symmetric(3), klein_four()):
            doc = group_to_json(G)
            G2 = group_from_json(doc)
            assert content_hash(group_to_json(G2)) == content_hash(doc)

    def test_group_from_permutations(self):
        doc = {"perm_gens": [[[0, 1, 2]], [[0, 1]]], "degree": 3}
        G = group_from_json(doc)
        assert G.n == 6

    @pytest.mark.parametrize("name", ["OrZ2", "OrZ4"])
    def test_module_round_trip(self, name):
        cat = fixture_category(name)
        Ms, Ns = fixture_modules(cat, ZZ)
        for M in (Ms["const"], Ms["alt"], Ns["aug"]):
            doc = module_to_json(M)
            M2 = module_from_json(cat, doc)
            assert content_hash(module_to_json(M2)) == content_hash(doc)

    def test_workspace_hash_stable(self, orz2_bundle):
        ws1 = load_bundle(orz2_bundle)
        ws2 = load_bundle(orz2_bundle)
        assert ws1.digest == ws2.digest

    def test_bad_json_is_parse_error(self, tmp_path):
        p = tmp_path / "garbage.json"
        p.write_text("{not json")
        with pytest.raises(ParseError):
            load_bundle(str(p))

    def test_wrong_format_rejected(self):
        with pytest.raises(ParseError):
            workspace_from_json({"format": "nope"})


class TestResolutionCache:
    def test_round_trip(self):
        cat = fixture_category("OrZ4")
        N = CatModule.constant(cat, ZZ, CO)
        res = free_resolution(N, 3)
        doc = resolution_to_json(res)
        res2 = resolution_from_json(N, doc)
        for k in range(res.length + 1):
            assert res2.levels[k].summands == res.levels[k].summands
            for obj in cat.objects:
                if k:
                    assert res2.eval_diff(k, obj) == res.eval_diff(k, obj)

    def test_cached_equals_cold(self, tmp_path):
        cache = DiskCache(str(tmp_path / "cache"))
        cat = fixture_category("OrZ2")
        N = CatModule.constant(cat, ZZ, CO)
        cold = cached_free_resolution(N, 3, cache)
        warm = cached_free_resolution(N, 3, cache)
        assert resolution_to_json(cold) == resolution_to_json(warm)
        assert resolution_to_json(cold) == resolution_to_json(free_resolution(N, 3))


class TestCLI:
    def test_validate_ok(self, orz2_bundle, capsys):
        assert main(["validate", orz2_bundle]) == 0
        assert "category ok" in capsys.readouterr().out

    def test_validate_broken_table(self, tmp_path, capsys):
        cat = fixture_category("arrow")
        doc = bundle_to_json(cat)
        doc["category"]["compose"] = [
            c if c[0] != "i1" or c[1] != "a" else ["i1", "a", "i1"]
            for c in doc["category"]["compose"]
        ]
        p = tmp_path / "broken.json"
        p.write_text(json.dumps(doc))
        rc = main(["validate", str(p)])
        assert rc == 1
        err = capsys.readouterr().err
        assert "i1" in err and "a" in err

    def test_validate_nonclosed_family_exit_1(self, tmp_path, capsys):
        G = FiniteGroup.symmetric(3)
        c2 = next(H for H in G.subgroups() if len(H) == 2)
        cat = fixture_category("arrow")
        doc = bundle_to_json(cat, groups={"S3": G})
        doc["families"] = {"bad": {"group": "S3",
                                   "subgroups": [sorted(c2)],
                                   "closure": "strict"}}
        p = tmp_path / "fam.json"
        p.write_text(json.dumps(doc))
        assert main(["validate", str(p)]) == 1
        assert "closed under conjugation" in capsys.readouterr().err

    def test_chains_counts(self, tmp_path, capsys):
        cat = fixture_category("OrZ4")
        p = tmp_path / "orz4.json"
        p.write_text(json.dumps(bundle_to_json(cat)))
        assert main(["chains", str(p)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["counts"] == {"0": 3, "1": 3, "2": 1}

    def test_chains_unbounded_exit_3(self, tmp_path, capsys):
        from cathom.fixtures import idempotent_category

        p = tmp_path / "idem.json"
        p.write_text(json.dumps(bundle_to_json(idempotent_category())))
        assert main(["chains", str(p)]) == 3

    def test_ss_exit_codes_and_output(self, orz2_bundle, tmp_path, capsys):
        out = tmp_path / "ss.json"
        rc = main(["ss", orz2_bundle, "-M", "Mconst", "-N", "Nconst",
                   "--nmax", "2", "--out", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["convergence"]["all_match"] is True
        assert doc["pages"][-1]["stabilized"] is True

    def test_ss_missing_module_exit_4(self, orz2_bundle, capsys):
        assert main(["ss", orz2_bundle, "-M", "nope", "-N", "Nconst"]) == 4

    def test_ss_corrupt_action_exit_4(self, tmp_path, capsys):
        cat = fixture_category("OrZ2")
        Ms, Ns = fixture_modules(cat, ZZ)
        doc = bundle_to_json(cat, modules={"M": Ms["const"], "N": Ns["const"]})
        # break functoriality: the order-2 automorphism squares to the identity,
        # so doubling its action cannot be a functor
        free = cat.objects[0]
        mor = next(f for f in cat.aut(free) if f != cat.id_of(free))
        doc["modules"]["M"]["action"][mor] = [[2]]
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(doc))
        assert main(["ss", str(p), "-M", "M", "-N", "N"]) == 4

    def test_determinism_across_jobs(self, orz2_bundle, tmp_path):
        out1 = tmp_path / "j1.json"
        out8 = tmp_path / "j8.json"
        assert main(["ss", orz2_bundle, "-M", "Malt", "-N", "Naug",
                     "--nmax", "2", "--jobs", "1", "--out", str(out1)]) == 0
        assert main(["ss", orz2_bundle, "-M", "Malt", "-N", "Naug",
                     "--nmax", "2", "--jobs", "8", "--out", str(out8)]) == 0
        assert out1.read_bytes() == out8.read_bytes()

    def test_cache_cold_vs_warm_identical(self, orz2_bundle, tmp_path):
        cachedir = tmp_path / "cache"
        outs = []
        for tag in ("cold", "warm"):
            out = tmp_path / f"{tag}.json"
            rc = main(["ss", orz2_bundle, "-M", "Mconst", "-N", "Naug",
                       "--nmax", "2", "--cache-dir", str(cachedir),
                       "--out", str(out)])
            assert rc == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        assert any(f.endswith(".json") for f in os.listdir(cachedir))

    def test_env_cache_override(self, orz2_bundle, tmp_path, monkeypatch):
        cachedir = tmp_path / "envcache"
        monkeypatch.setenv("PCHAIN_CACHE", str(cachedir))
        out = tmp_path / "o.json"
        assert main(["ss", orz2_bundle, "-M", "Mconst", "-N", "Nconst",
                     "--nmax", "2", "--out", str(out)]) == 0
        assert cachedir.exists()

    def test_family_report(self, orz2_bundle, tmp_path):
        out = tmp_path / "fam.json"
        rc = main(["family", orz2_bundle, "--family", "all", "--out", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["cofinal"] is True
        # the unique maximal member of ALL is S3 itself, so M and NM hold
        assert doc["M"] is True and doc["NM"] is True
        assert doc["reduced"]["subgroups"] == [list(range(6))]

    def test_assembly_command(self, orz2_bundle, tmp_path):
        cat = fixture_category("OrZ2")
        out = tmp_path / "asm.json"
        rc = main(["assembly", orz2_bundle, "-N", "Nconst",
                   "--objects", cat.objects[0], "--nmax", "2", "--out", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["maps"][0]["iso"] is True
        assert doc["maps"][1]["iso"] is False

    def test_ext_command(self, orz2_bundle, tmp_path):
        out = tmp_path / "ext.json"
        rc = main(["ext", orz2_bundle, "-M", "Mconst", "-N", "Malt",
                   "--nmax", "2", "--out", str(out)])
        assert rc == 0
        assert json.loads(out.read_text())["convergence"]["all_match"] is True

    def test_tor_table(self, orz2_bundle, capsys):
        rc = main(["tor", orz2_bundle, "-M", "Mconst", "-N", "Nconst",
                   "--format", "table"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "Tor_0 = Z" in out


class TestMatrixJSON:
    def test_ring_tags(self):
        from cathom.matrix import Matrix, matrix_from_json
        from cathom.rings import GF, QQ
        from fractions import Fraction

        mz = Matrix(ZZ, [[1, -2], [3, 4]])
        assert matrix_from_json(mz.to_json()) == mz
        mq = Matrix(QQ, [[Fraction(1, 2), 3]])
        doc = mq.to_json()
        assert doc["ring"] == "Q" and doc["entries"][0][0] == "1/2"
        assert matrix_from_json(doc) == mq
        mf = Matrix(GF(3), [[2, 5]])
        doc = mf.to_json()
        assert doc == {"ring": "Fp", "p": 3, "rows": 1, "cols": 2, "entries": [[2, 2]]}
        assert matrix_from_json(doc) == mf

    def test_s3_chain_counts_via_cli(self, tmp_path, capsys):
        from cathom.fixtures import fixture_category

        cat = fixture_category("OrS3")
        p = tmp_path / "s3.json"
        p.write_text(json.dumps(bundle_to_json(cat)))
        assert main(["chains", str(p)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["counts"]["0"] == "4" or doc["counts"]["0"] == 4


class TestConfigInvariants:
    def test_qmax_guard(self, orz2_bundle, capsys):
        rc = main(["ss", orz2_bundle, "-M", "Mconst", "-N", "Nconst",
                   "--nmax", "3", "--qmax", "2"])
        assert rc == 4

    def test_pmax_guard(self, orz2_bundle, capsys):
        rc = main(["ss", orz2_bundle, "-M", "Mconst", "-N", "Nconst",
                   "--nmax", "2", "--pmax", "0"])
        assert rc == 4

    def test_family_mismatch_named(self):
        from cathom.groups import FamilyMismatch, FiniteGroup, SubgroupFamily, cofinal_inclusion_check

        G = FiniteGroup.cyclic(4)
        z2 = SubgroupFamily(G, [next(H for H in G.subgroups() if len(H) == 2)])
        top = SubgroupFamily(G, [frozenset(range(4))])
        with pytest.raises(FamilyMismatch):
            cofinal_inclusion_check(z2, top)

    def test_strict_convergence_raises_nothing_on_match(self):
        from cathom.catmod import CatModule, CO, CONTRA
        from cathom.spectral import converge_and_compare
        from cathom.fixtures import fixture_category

        cat = fixture_category("OrZ2")
        M = CatModule.constant(cat, ZZ, CONTRA)
        N = CatModule.constant(cat, ZZ, CO)
        rep = converge_and_compare(M, N, 2, strict=True)
        assert rep.all_match
