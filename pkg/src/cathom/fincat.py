"""Finite small categories with total composition tables.

Provides validation, isomorphism classes and automorphism data, the
EI/left-free predicates, chains of isomorphism classes with their bisets,
and the non-degenerate simplices of the two-sided tilde nerve (diagram
classes modulo objectwise isomorphism).

For a finite category, any non-invertible endomorphism yields arbitrarily
long composable strings of non-isomorphisms, so chain enumeration is only
defined for EI categories; everything else raises UnboundedChains.
"""

from __future__ import annotations

from itertools import product


class UnboundedChains(Exception):
    pass


class UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p == x:
            return x
        root = self.find(p)
        self.parent[x] = root
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def groups(self) -> dict:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


class FiniteCategory:
    """A finite category: objects, hom lists, a total composition table.

    Hom-sets are ordered lists and every downstream basis follows this
    order.  Composition is stored as (g, f) -> g o f for composable pairs
    f: a -> b, g: b -> c.
    """

    def __init__(
        self,
        objects: list[str],
        morphisms: dict[str, tuple[str, str]],
        compose: dict[tuple[str, str], str],
        identity: dict[str, str],
        name: str = "C",
    ):
        self.name = name
        self.objects = list(objects)
        self.obj_index = {c: i for i, c in enumerate(self.objects)}
        self.morphisms = dict(morphisms)
        self.compose_table = dict(compose)
        self.identity = dict(identity)
        self.hom: dict[tuple[str, str], list[str]] = {
            (a, b): [] for a in objects for b in objects
        }
        for f, (a, b) in morphisms.items():
            self.hom[(a, b)].append(f)
        for key in self.hom:
            self.hom[key].sort()
        self._iso_cache: set[str] | None = None
        self._inverse: dict[str, str] = {}
        self._iso_data: IsoClassData | None = None

    def src(self, f: str) -> str:
        return self.morphisms[f][0]

    def tgt(self, f: str) -> str:
        return self.morphisms[f][1]

    def compose(self, g: str, f: str) -> str:
        """g o f for f: a -> b, g: b -> c."""
        return self.compose_table[(g, f)]

    def id_of(self, obj: str) -> str:
        return self.identity[obj]

    def mor_count(self) -> int:
        return len(self.morphisms)

    # -- validation ----------------------------------------------------

    def validate(self) -> "ValidationReport":
        report = ValidationReport()
        seen_ids = set()
        for c in self.objects:
            if c in seen_ids:
                report.add(f"duplicate object id {c!r}")
            seen_ids.add(c)
        for f, (a, b) in self.morphisms.items():
            if a not in self.obj_index or b not in self.obj_index:
                report.add(f"morphism {f!r} has unknown endpoint {a!r} or {b!r}")
        for c in self.objects:
            e = self.identity.get(c)
            if e is None or e not in self.morphisms:
                report.add(f"object {c!r} has no identity morphism")
            elif self.morphisms[e] != (c, c):
                report.add(f"identity of {c!r} is not an endomorphism of it")
        # composition totality and typing
        mors = self.morphisms
        for f, (a, b) in mors.items():
            for g, (b2, c) in mors.items():
                if b != b2:
                    if (g, f) in self.compose_table:
                        report.add(f"compose defined on non-composable pair ({g!r},{f!r})")
                    continue
                gf = self.compose_table.get((g, f))
                if gf is None:
                    report.add(f"compose missing for composable pair ({g!r},{f!r})")
                elif gf not in mors:
                    report.add(f"compose({g!r},{f!r}) = {gf!r} is not a morphism")
                elif mors[gf] != (a, c):
                    report.add(
                        f"compose({g!r},{f!r}) = {gf!r} has wrong endpoints "
                        f"{mors[gf]} != {(a, c)}"
                    )
        if report.violations:
            return report
        # identity laws
        for f, (a, b) in mors.items():
            if self.compose(self.id_of(b), f) != f:
                report.add(f"id o {f!r} != {f!r}")
            if self.compose(f, self.id_of(a)) != f:
                report.add(f"{f!r} o id != {f!r}")
        # associativity, exhaustively over composable triples
        by_src: dict[str, list[str]] = {c: [] for c in self.objects}
        for f, (a, b) in mors.items():
            by_src[a].append(f)
        for f, (a, b) in mors.items():
            for g in by_src[b]:
                gf = self.compose(g, f)
                for h in by_src[self.tgt(g)]:
                    if self.compose(h, gf) != self.compose(self.compose(h, g), f):
                        report.add(f"associativity fails on ({h!r},{g!r},{f!r})")
        return report

    # -- isomorphisms ---------------------------------------------------

    def _compute_isos(self):
        if self._iso_cache is not None:
            return
        isos = set()
        inverse = {}
        for f, (a, b) in self.morphisms.items():
            for g in self.hom[(b, a)]:
                if (
                    self.compose(g, f) == self.id_of(a)
                    and self.compose(f, g) == self.id_of(b)
                ):
                    isos.add(f)
                    inverse[f] = g
                    break
        self._iso_cache = isos
        self._inverse = inverse

    def is_iso(self, f: str) -> bool:
        self._compute_isos()
        return f in self._iso_cache  # type: ignore[operator]

    def inverse(self, f: str) -> str:
        self._compute_isos()
        return self._inverse[f]

    def isos_between(self, a: str, b: str) -> list[str]:
        return [f for f in self.hom[(a, b)] if self.is_iso(f)]

    def noniso_morphisms(self, a: str, b: str) -> list[str]:
        """mor(a, b) minus the isomorphisms."""
        return [f for f in self.hom[(a, b)] if not self.is_iso(f)]

    def aut(self, c: str) -> list[str]:
        """Automorphisms of c, in hom order."""
        return self.isos_between(c, c)

    # -- predicates -----------------------------------------------------

    def is_EI(self) -> bool:
        """True when every endomorphism is an isomorphism."""
        return all(
            self.is_iso(f) for c in self.objects for f in self.hom[(c, c)]
        )

    def is_left_free(self) -> bool:
        """True when aut(c') acts freely on mor(c, c') by post-composition."""
        for c in self.objects:
            for d in self.objects:
                homs = self.hom[(c, d)]
                for a in self.aut(d):
                    if a == self.id_of(d):
                        continue
                    for f in homs:
                        if self.compose(a, f) == f:
                            return False
        return True

    def iso_classes(self) -> "IsoClassData":
        if self._iso_data is None:
            self._iso_data = IsoClassData(self)
        return self._iso_data

    def __repr__(self):
        return f"FiniteCategory({self.name}, {len(self.objects)} objects, {len(self.morphisms)} morphisms)"


class ValidationReport:
    def __init__(self):
        self.violations: list[str] = []

    def add(self, msg: str):
        self.violations.append(msg)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __repr__(self):
        return "valid" if self.ok else "invalid:\n" + "\n".join(self.violations)


class IsoClassData:
    """Partition of objects into isomorphism classes with witnesses.

    The representative of each class is its first object in category
    order; witness(c) is an isomorphism c -> representative.
    """

    def __init__(self, cat: FiniteCategory):
        self.cat = cat
        uf = UnionFind()
        for c in cat.objects:
            uf.find(cat.obj_index[c])
        for f, (a, b) in cat.morphisms.items():
            if cat.is_iso(f):
                uf.union(cat.obj_index[a], cat.obj_index[b])
        groups = uf.groups()
        reps_idx = sorted(groups)
        self.classes: list[list[str]] = [
            [cat.objects[i] for i in sorted(groups[r])] for r in reps_idx
        ]
        self.representative: list[str] = [cat.objects[r] for r in reps_idx]
        self.class_of: dict[str, int] = {}
        for k, cls in enumerate(self.classes):
            for c in cls:
                self.class_of[c] = k
        # witnesses: iso c -> representative (identity when c is the rep)
        self.witness: dict[str, str] = {}
        for k, cls in enumerate(self.classes):
            rep = self.representative[k]
            for c in cls:
                isos = cat.isos_between(c, rep)
                if not isos:
                    raise AssertionError(f"no iso from {c} to its representative {rep}")
                self.witness[c] = isos[0]

    @property
    def count(self) -> int:
        return len(self.classes)

    def rep_of(self, obj: str) -> str:
        return self.representative[self.class_of[obj]]

    def aut_group(self, class_idx: int) -> list[str]:
        return self.cat.aut(self.representative[class_idx])

    def partial_order_pairs(self) -> set[tuple[int, int]]:
        """(i, j) with class_i <= class_j, i.e. mor(rep_i, rep_j) nonempty."""
        cat = self.cat
        out = set()
        for i, ri in enumerate(self.representative):
            for j, rj in enumerate(self.representative):
                if cat.hom[(ri, rj)]:
                    out.add((i, j))
        return out


# -- chains ------------------------------------------------------------


class PChain:
    """A tuple of isomorphism classes with nonempty biset, by representatives."""

    __slots__ = ("reps",)

    def __init__(self, reps: tuple[str, ...]):
        self.reps = tuple(reps)

    @property
    def p(self) -> int:
        return len(self.reps) - 1

    def omit(self, i: int) -> "PChain":
        return PChain(self.reps[:i] + self.reps[i + 1 :])

    def __eq__(self, other):
        return isinstance(other, PChain) and self.reps == other.reps

    def __hash__(self):
        return hash(self.reps)

    def __repr__(self):
        return "<" + " -> ".join(self.reps) + ">"


def noniso_class_graph(cat: FiniteCategory) -> dict[int, list[int]]:
    """Edges i -> j between iso classes with mor_not-iso(rep_i, rep_j) nonempty."""
    data = cat.iso_classes()
    edges: dict[int, list[int]] = {i: [] for i in range(data.count)}
    for i, ri in enumerate(data.representative):
        for j, rj in enumerate(data.representative):
            if cat.noniso_morphisms(ri, rj):
                edges[i].append(j)
    return edges


def check_bounded_chains(cat: FiniteCategory):
    """Raise UnboundedChains when the non-iso class graph has a cycle.

    Equivalent to the EI condition for finite categories: a cycle lets a
    string of |Is(C)|+1 non-isomorphisms compose class-wise.
    """
    edges = noniso_class_graph(cat)
    state: dict[int, int] = {}

    def dfs(v, stack):
        state[v] = 1
        for w in edges[v]:
            if state.get(w, 0) == 1:
                cyc = stack[stack.index(w):] if w in stack else [w]
                raise UnboundedChains(
                    "non-isomorphism strings repeat classes "
                    f"{[cat.iso_classes().representative[i] for i in cyc + [w]]}; "
                    "the chain filtration is infinite"
                )
            if state.get(w, 0) == 0:
                dfs(w, stack + [w])
        state[v] = 2

    for v in edges:
        if state.get(v, 0) == 0:
            dfs(v, [v])


def chain_bound(cat: FiniteCategory) -> int:
    """Length of the longest chain (longest path in the acyclic class graph)."""
    check_bounded_chains(cat)
    edges = noniso_class_graph(cat)
    memo: dict[int, int] = {}

    def longest(v):
        if v not in memo:
            memo[v] = max((1 + longest(w) for w in edges[v]), default=0)
        return memo[v]

    return max((longest(v) for v in edges), default=0)


def enumerate_chains(cat: FiniteCategory, p_max: int | None = None) -> dict[int, list[PChain]]:
    """All p-chains with nonempty biset, grouped by p, for p <= p_max."""
    check_bounded_chains(cat)
    data = cat.iso_classes()
    edges = noniso_class_graph(cat)
    bound = chain_bound(cat)
    if p_max is None:
        p_max = bound
    out: dict[int, list[PChain]] = {p: [] for p in range(p_max + 1)}
    reps = data.representative

    def extend(path: tuple[int, ...]):
        p = len(path) - 1
        if p > p_max:
            return
        out[p].append(PChain(tuple(reps[i] for i in path)))
        for j in edges[path[-1]]:
            extend(path + (j,))

    for i in range(len(reps)):
        extend((i,))
    for p in out:
        out[p].sort(key=lambda ch: tuple(data.class_of[r] for r in ch.reps))
    return out


# -- bisets ------------------------------------------------------------


class ChainBiset:
    """S(chain): strings of non-isomorphisms along the chain, modulo the
    middle automorphism actions, with the residual left aut(c_p)- and
    right aut(c_0)-actions.

    Element witnesses are canonical representative strings
    (phi_0, ..., phi_{p-1}) with phi_i: rep_i -> rep_{i+1}.
    """

    def __init__(self, cat: FiniteCategory, chain: PChain):
        if chain.p < 1:
            raise ValueError("chain_biset needs p >= 1")
        self.cat = cat
        self.chain = chain
        reps = chain.reps
        p = chain.p
        factor_sets = [cat.noniso_morphisms(reps[i], reps[i + 1]) for i in range(p)]
        uf = UnionFind()
        all_strings = [tuple(s) for s in product(*factor_sets)]
        for s in all_strings:
            uf.find(s)
        for s in all_strings:
            for i in range(1, p):
                for a in cat.aut(reps[i]):
                    t = list(s)
                    t[i] = cat.compose(t[i], a)
                    t[i - 1] = cat.compose(cat.inverse(a), t[i - 1])
                    uf.union(s, tuple(t))
        groups = uf.groups()
        self.elements: list[tuple[str, ...]] = sorted(min(g) for g in groups.values())
        rep_of = {root: min(g) for root, g in groups.items()}
        elem_index = {rep: k for k, rep in enumerate(self.elements)}
        self.index = {s: elem_index[rep_of[uf.find(s)]] for s in all_strings}

    def size(self) -> int:
        return len(self.elements)

    def class_of(self, string: tuple[str, ...]) -> int:
        return self.index[string]

    def left_act(self, a: str, k: int) -> int:
        """Class of a . s for a in aut(c_p)."""
        s = list(self.elements[k])
        s[-1] = self.cat.compose(a, s[-1])
        return self.index[tuple(s)]

    def right_act(self, k: int, a: str) -> int:
        """Class of s . a for a in aut(c_0)."""
        s = list(self.elements[k])
        s[0] = self.cat.compose(s[0], a)
        return self.index[tuple(s)]


def chain_biset(cat: FiniteCategory, chain: PChain) -> ChainBiset:
    return ChainBiset(cat, chain)


# -- tilde nerve -------------------------------------------------------


class NerveCell:
    """Non-degenerate p-simplices of the tilde nerve of src|C|tgt.

    A diagram is (alpha, (phi_0, ..., phi_{p-1}), beta) with alpha:
    src -> c_0, beta: c_p -> tgt and no interior phi_i an isomorphism;
    classes are orbits under objectwise isomorphisms, found by explicit
    orbit enumeration.
    """

    def __init__(self, cat: FiniteCategory, p: int, src: str, tgt: str):
        self.cat = cat
        self.p = p
        self.src = src
        self.tgt = tgt
        diagrams = []
        for objs in product(cat.objects, repeat=p + 1):
            interior_sets = [
                cat.noniso_morphisms(objs[i], objs[i + 1]) for i in range(p)
            ]
            if any(not s for s in interior_sets):
                continue
            for alpha in cat.hom[(src, objs[0])]:
                for phis in product(*interior_sets):
                    for beta in cat.hom[(objs[p], tgt)]:
                        diagrams.append((alpha, tuple(phis), beta))
        uf = UnionFind()
        for d in diagrams:
            uf.find(d)
        for alpha, phis, beta in diagrams:
            objs = self._objects_of(alpha, phis, beta)
            for i in range(p + 1):
                c = objs[i]
                for cprime in cat.objects:
                    for u in cat.isos_between(c, cprime):
                        if u == cat.id_of(c):
                            continue
                        uinv = cat.inverse(u)
                        a2, ph2, b2 = alpha, list(phis), beta
                        if i == 0:
                            a2 = cat.compose(u, alpha)
                            if p > 0:
                                ph2[0] = cat.compose(phis[0], uinv)
                            else:
                                b2 = cat.compose(beta, uinv)
                        elif i < p:
                            ph2[i - 1] = cat.compose(u, phis[i - 1])
                            ph2[i] = cat.compose(phis[i], uinv)
                        else:
                            ph2[i - 1] = cat.compose(u, phis[i - 1])
                            b2 = cat.compose(beta, uinv)
                        uf.union((alpha, phis, beta), (a2, tuple(ph2), b2))
        groups = uf.groups()
        self.classes: list[tuple] = sorted(min(g) for g in groups.values())
        rep_of = {root: min(g) for root, g in groups.items()}
        elem_index = {rep: k for k, rep in enumerate(self.classes)}
        self.index: dict[tuple, int] = {
            d: elem_index[rep_of[uf.find(d)]] for d in diagrams
        }

    def _objects_of(self, alpha, phis, beta):
        cat = self.cat
        objs = [cat.tgt(alpha)]
        for f in phis:
            objs.append(cat.tgt(f))
        return objs

    def size(self) -> int:
        return len(self.classes)

    def class_of(self, diagram: tuple) -> int:
        return self.index[diagram]

    def chain_key(self, k: int) -> tuple[int, ...]:
        """Iso classes of the interior objects of class k."""
        data = self.cat.iso_classes()
        alpha, phis, beta = self.classes[k]
        objs = self._objects_of(alpha, phis, beta)
        return tuple(data.class_of[c] for c in objs)


def nd_tilde_nerve(cat: FiniteCategory, p: int, src: str, tgt: str) -> NerveCell:
    return NerveCell(cat, p, src, tgt)


def face(cat: FiniteCategory, diagram: tuple, i: int):
    """i-th face of a non-degenerate diagram; None when it degenerates."""
    alpha, phis, beta = diagram
    p = len(phis)
    if not 0 <= i <= p:
        raise IndexError(f"face index {i} out of range for p={p}")
    if i == 0:
        return (cat.compose(phis[0], alpha), phis[1:], beta)
    if i == p:
        return (alpha, phis[:-1], cat.compose(beta, phis[-1]))
    merged = cat.compose(phis[i], phis[i - 1])
    if cat.is_iso(merged):
        return None
    return (alpha, phis[: i - 1] + (merged,) + phis[i + 1 :], beta)


# -- the chain/biset decomposition of the nerve ------------------------


class BalancedTriples:
    """mor(c_p, tgt) x_{aut(c_p)} S x_{aut(c_0)} mor(src, c_0) for one chain.

    For p = 0 this is mor(c_0, tgt) x_{aut(c_0)} mor(src, c_0).  Each class
    maps to a nerve diagram via (beta, s, alpha) -> (alpha, s, beta).
    """

    def __init__(self, cat: FiniteCategory, chain: PChain, src: str, tgt: str,
                 biset: ChainBiset | None = None):
        self.cat = cat
        self.chain = chain
        p = chain.p
        reps = chain.reps
        c0, cp = reps[0], reps[-1]
        betas = cat.hom[(cp, tgt)]
        alphas = cat.hom[(src, c0)]
        if p == 0:
            triples = [(b, None, a) for b in betas for a in alphas]
        else:
            self.biset = biset if biset is not None else ChainBiset(cat, chain)
            triples = [
                (b, k, a)
                for b in betas
                for k in range(self.biset.size())
                for a in alphas
            ]
        uf = UnionFind()
        for t in triples:
            uf.find(t)
        aut_p = cat.aut(cp)
        aut_0 = cat.aut(c0)
        for b, k, a in triples:
            if p == 0:
                for u in aut_0:
                    # (beta o u, alpha) ~ (beta, u o alpha)
                    uf.union((cat.compose(b, u), k, a), (b, k, cat.compose(u, a)))
            else:
                for u in aut_p:
                    # (beta o u, s, alpha) ~ (beta, u . s, alpha)
                    uf.union((cat.compose(b, u), k, a), (b, self.biset.left_act(u, k), a))
                for u in aut_0:
                    # (beta, s . u, alpha) ~ (beta, s, u o alpha)
                    uf.union((b, self.biset.right_act(k, u), a), (b, k, cat.compose(u, a)))
        groups = uf.groups()
        self.classes = sorted(min(g) for g in groups.values())
        rep_of = {root: min(g) for root, g in groups.items()}
        idx = {rep: i for i, rep in enumerate(self.classes)}
        self.index = {t: idx[rep_of[uf.find(t)]] for t in triples}

    def size(self) -> int:
        return len(self.classes)

    def to_diagram(self, class_idx: int) -> tuple:
        b, k, a = self.classes[class_idx]
        if self.chain.p == 0:
            return (a, (), b)
        return (a, self.biset.elements[k], b)
