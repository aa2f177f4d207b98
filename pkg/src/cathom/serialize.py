"""JSON schemas and hashing for all workspace entities.

Categories: {"objects": [...], "morphisms": [{"id","src","tgt"}...],
"compose": [[g, f, gf]...], "identity": {obj: mor}}.
Groups: {"order": n, "table": [[...]]} or {"perm_gens": [...], "degree": n}.
Families: {"subgroups": [[element ids]...], "closure": "auto"|"strict"}.
Modules: {"variance": "contra"|"co", "ring": ..., "values":
{obj: {"rank": r, "relations": [[...]]}}, "action": {mor: [[...]]}}.
Bundles collect named entities in one self-describing document and hash
to a stable content address.
"""

from __future__ import annotations

import hashlib
import json

from .catmod import CatModule
from .fincat import FiniteCategory
from .groups import FiniteGroup, SubgroupFamily
from .matrix import Matrix
from .rings import ring_from_json

BUNDLE_FORMAT = "cathom-bundle-v1"


class ParseError(ValueError):
    pass


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def content_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


# -- categories ----------------------------------------------------------


def category_to_json(cat: FiniteCategory) -> dict:
    return {
        "objects": list(cat.objects),
        "morphisms": [
            {"id": f, "src": a, "tgt": b} for f, (a, b) in sorted(cat.morphisms.items())
        ],
        "compose": [
            [g, f, gf] for (g, f), gf in sorted(cat.compose_table.items())
        ],
        "identity": dict(sorted(cat.identity.items())),
        "name": cat.name,
    }


def category_from_json(d: dict) -> FiniteCategory:
    try:
        mors = {m["id"]: (m["src"], m["tgt"]) for m in d["morphisms"]}
        comp = {(g, f): gf for g, f, gf in d["compose"]}
        return FiniteCategory(
            d["objects"], mors, comp, d["identity"], name=d.get("name", "C")
        )
    except (KeyError, TypeError) as e:
        raise ParseError(f"bad category JSON: {e}") from e


# -- groups and families ---------------------------------------------------


def group_to_json(G: FiniteGroup) -> dict:
    return {"order": G.n, "table": [list(r) for r in G.table], "name": G.name}


def group_from_json(d: dict) -> FiniteGroup:
    try:
        if "table" in d:
            G = FiniteGroup(d["table"], name=d.get("name", "G"))
            if "order" in d and d["order"] != G.n:
                raise ParseError("declared order does not match the table")
            return G
        if "perm_gens" in d:
            gens = [[tuple(c) for c in g] for g in d["perm_gens"]]
            return FiniteGroup.from_permutations(
                gens, d["degree"], name=d.get("name", "G")
            )
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"bad group JSON: {e}") from e
    raise ParseError("group JSON needs 'table' or 'perm_gens'")


def family_to_json(F: SubgroupFamily) -> dict:
    return {
        "subgroups": [sorted(H) for H in F.members],
        "closure": "strict",
    }


def family_from_json(G: FiniteGroup, d: dict) -> SubgroupFamily:
    try:
        closure = d.get("closure", "auto") == "auto"
        return SubgroupFamily(G, [frozenset(H) for H in d["subgroups"]], closure=closure)
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"bad family JSON: {e}") from e


# -- modules ----------------------------------------------------------------


def module_to_json(M: CatModule) -> dict:
    values = {}
    for c in M.cat.objects:
        anns = M.anns[c]
        relations = []
        for i, a in enumerate(anns):
            if a:
                row = [0] * len(anns)
                row[i] = int(a)
                relations.append(row)
        values[c] = {"rank": len(anns), "relations": relations}
    action = {
        f: [[M.ring.entry_to_json(x) for x in row] for row in M.action[f].data]
        for f in sorted(M.cat.morphisms)
    }
    out = dict(M.ring.to_json())
    out["variance"] = M.variance
    out["values"] = values
    out["action"] = action
    return out


def module_from_json(cat: FiniteCategory, d: dict) -> CatModule:
    try:
        ring = ring_from_json(d)
        values = {}
        for c in cat.objects:
            v = d["values"][c]
            values[c] = (v["rank"], v.get("relations", []))
        raw_action = {}
        for f in cat.morphisms:
            rows = d["action"][f]
            a, b = cat.morphisms[f]
            src = b if d["variance"] == "contra" else a
            tgt = a if d["variance"] == "contra" else b
            if rows:
                raw_action[f] = Matrix(
                    ring, [[ring.entry_from_json(x) for x in row] for row in rows]
                )
            else:
                raw_action[f] = Matrix.zeros(
                    ring, values[tgt][0], values[src][0]
                )
        return CatModule.from_presentations(
            cat, d["variance"], ring, values, raw_action
        )
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"bad module JSON: {e}") from e


# -- bundles ------------------------------------------------------------------


def bundle_to_json(cat: FiniteCategory, modules: dict[str, CatModule] | None = None,
                   groups: dict[str, FiniteGroup] | None = None,
                   families: dict[str, tuple[str, SubgroupFamily]] | None = None) -> dict:
    out = {"format": BUNDLE_FORMAT, "category": category_to_json(cat)}
    if modules:
        out["modules"] = {k: module_to_json(m) for k, m in sorted(modules.items())}
    if groups:
        out["groups"] = {k: group_to_json(g) for k, g in sorted(groups.items())}
    if families:
        out["families"] = {
            k: {"group": gname, **family_to_json(f)}
            for k, (gname, f) in sorted(families.items())
        }
    return out


class Workspace:
    """Named, validated entities loaded from a bundle, with provenance."""

    def __init__(self, cat: FiniteCategory, modules: dict, groups: dict,
                 families: dict, source: str, digest: str,
                 violations: list[str] | None = None):
        self.category = cat
        self.modules = modules
        self.groups = groups
        self.families = families
        self.source = source
        self.digest = digest
        self.violations = violations or []


def workspace_from_json(d: dict, source: str = "<memory>",
                        strict: bool = True) -> Workspace:
    """Build a workspace.  With strict=True any violation raises
    ParseError; with strict=False violations are collected on the
    workspace so a validator can list them all."""
    if d.get("format") != BUNDLE_FORMAT:
        raise ParseError(f"not a {BUNDLE_FORMAT} document")
    digest = content_hash(d)
    violations: list[str] = []
    cat = category_from_json(d["category"])
    report = cat.validate()
    if not report.ok:
        if strict:
            raise ParseError("invalid category:\n" + "\n".join(report.violations))
        violations.extend(report.violations)
    groups = {}
    for k, g in d.get("groups", {}).items():
        G = group_from_json(g)
        problems = G.validate()
        if problems:
            if strict:
                raise ParseError(f"invalid group {k!r}: " + "; ".join(problems))
            violations.extend(f"group {k!r}: {p}" for p in problems)
        groups[k] = G
    families = {}
    for k, f in d.get("families", {}).items():
        gname = f.get("group")
        if gname not in groups:
            msg = f"family {k!r} references unknown group {gname!r}"
            if strict:
                raise ParseError(msg)
            violations.append(msg)
            continue
        try:
            families[k] = (gname, family_from_json(groups[gname], f))
        except ParseError as e:
            if strict:
                raise
            violations.append(f"family {k!r}: {e}")
    modules = {}
    if report.ok:
        for k, m in d.get("modules", {}).items():
            try:
                modules[k] = module_from_json(cat, m)
            except ParseError as e:
                if strict:
                    raise
                violations.append(f"module {k!r}: {e}")
    return Workspace(cat, modules, groups, families, source, digest, violations)


def load_bundle(path: str, strict: bool = True) -> Workspace:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    return workspace_from_json(d, source=path, strict=strict)
