"""Modules over a finite category: functors into finitely presented modules.

A CatModule stores, for every object, a canonical presentation (diagonal
annihilators) and, for every morphism, the action matrix between the
canonical generators, direction depending on variance.  Values given by
arbitrary presentations are canonicalized on load and the actions are
transported.

Also here: free modules on represented functors, the tensor product over
the category (coequalizer presentation), functors between categories, and
restriction/induction along a functor.
"""

from __future__ import annotations

from .fincat import FiniteCategory
from .fpmod import CanonicalQuotient, FPModule
from .matrix import Matrix
from .rings import Ring


class VarianceMismatch(ValueError):
    pass


class BaseMismatch(ValueError):
    pass


class RingMismatch(ValueError):
    pass


class NotAFunctor(ValueError):
    pass


CONTRA = "contra"
CO = "co"


def _reduce_mod_anns(mat: Matrix, anns: list) -> Matrix:
    """Normalize entries of a matrix into canonical range mod target anns."""
    ring = mat.ring
    if ring.is_field:
        return mat
    data = []
    for i, row in enumerate(mat.data):
        d = anns[i]
        data.append([x % d if d else x for x in row])
    return Matrix(ring, data, copy=False, cols=mat.cols)


def mats_equal_mod(A: Matrix, B: Matrix, anns: list) -> bool:
    if (A.rows, A.cols) != (B.rows, B.cols):
        return False
    ring = A.ring
    for i in range(A.rows):
        d = anns[i] if not ring.is_field else ring.zero
        for j in range(A.cols):
            diff = ring.sub(A.data[i][j], B.data[i][j])
            if d:
                if diff % d != 0:
                    return False
            elif diff != ring.zero:
                return False
    return True


class CatModule:
    """A co- or contravariant functor from the category into f.p. modules."""

    def __init__(
        self,
        cat: FiniteCategory,
        variance: str,
        ring: Ring,
        anns: dict[str, list],
        action: dict[str, Matrix],
        check: bool = True,
    ):
        if variance not in (CO, CONTRA):
            raise VarianceMismatch(f"unknown variance {variance!r}")
        self.cat = cat
        self.variance = variance
        self.ring = ring
        self.anns = {c: list(anns[c]) for c in cat.objects}
        self.action = {
            f: _reduce_mod_anns(action[f], self.anns[self._target_obj(f)])
            for f in cat.morphisms
        }
        if check:
            problems = self.validate()
            if problems:
                raise ValueError("not a module:\n" + "\n".join(problems))

    def _target_obj(self, f: str) -> str:
        a, b = self.cat.morphisms[f]
        return a if self.variance == CONTRA else b

    def _source_obj(self, f: str) -> str:
        a, b = self.cat.morphisms[f]
        return b if self.variance == CONTRA else a

    def rank(self, obj: str) -> int:
        return len(self.anns[obj])

    def value(self, obj: str) -> FPModule:
        anns = self.anns[obj]
        free = sum(1 for d in anns if not d)
        torsion = tuple(sorted(int(d) for d in anns if d))
        return FPModule(self.ring, free, torsion)

    def act(self, f: str) -> Matrix:
        return self.action[f]

    def validate(self) -> list[str]:
        out = []
        cat = self.cat
        ring = self.ring
        for f in cat.morphisms:
            src, tgt = self._source_obj(f), self._target_obj(f)
            mat = self.action[f]
            if (mat.rows, mat.cols) != (self.rank(tgt), self.rank(src)):
                out.append(f"action of {f!r} has wrong shape")
                continue
            if not ring.is_field:
                # well-defined on presentations: ann * column dies in target
                for j, d in enumerate(self.anns[src]):
                    if not d:
                        continue
                    for i, e in enumerate(self.anns[tgt]):
                        v = d * mat.data[i][j]
                        if (v % e if e else v) != 0:
                            out.append(f"action of {f!r} not defined on relations")
                            break
        if out:
            return out
        for c in cat.objects:
            ident = self.action[cat.id_of(c)]
            if not mats_equal_mod(ident, Matrix.identity(ring, self.rank(c)), self.anns[c]):
                out.append(f"action of id_{c} is not the identity")
        by_src = {c: [] for c in cat.objects}
        for f, (a, b) in cat.morphisms.items():
            by_src[a].append(f)
        for f, (a, b) in cat.morphisms.items():
            for g in by_src[b]:
                gf = cat.compose(g, f)
                if self.variance == CONTRA:
                    comp = self.action[f] @ self.action[g]
                else:
                    comp = self.action[g] @ self.action[f]
                if not mats_equal_mod(comp, self.action[gf], self.anns[self._target_obj(gf)]):
                    out.append(f"functoriality fails on ({g!r},{f!r})")
        return out

    @classmethod
    def constant(cls, cat: FiniteCategory, ring: Ring, variance: str = CONTRA) -> "CatModule":
        """The constant module: value R everywhere, all actions identity."""
        anns = {c: [ring.zero] for c in cat.objects}
        action = {f: Matrix.identity(ring, 1) for f in cat.morphisms}
        return cls(cat, variance, ring, anns, action, check=False)

    @classmethod
    def zero(cls, cat: FiniteCategory, ring: Ring, variance: str) -> "CatModule":
        anns = {c: [] for c in cat.objects}
        action = {f: Matrix.zeros(ring, 0, 0) for f in cat.morphisms}
        return cls(cat, variance, ring, anns, action, check=False)

    @classmethod
    def from_presentations(
        cls,
        cat: FiniteCategory,
        variance: str,
        ring: Ring,
        values: dict[str, tuple[int, list[list]]],
        raw_action: dict[str, Matrix],
    ) -> "CatModule":
        """Canonicalize per-object presentations and transport the actions.

        values[obj] = (rank, relation rows); raw_action is given on the raw
        generators with the variance-appropriate direction.
        """
        quots = {}
        for c in cat.objects:
            rank, rel_rows = values[c]
            quots[c] = CanonicalQuotient(ring, rank, [
                [ring.coerce(x) for x in row] for row in rel_rows
            ])
        anns = {c: quots[c].module.anns() for c in cat.objects}
        action = {}
        for f, (a, b) in cat.morphisms.items():
            src = b if variance == CONTRA else a
            tgt = a if variance == CONTRA else b
            raw = raw_action[f]
            cols = []
            for j in range(quots[src].module.n_gens):
                v = quots[src].lift(j)
                cols.append(quots[tgt].project(raw.apply(v)))
            action[f] = Matrix.from_columns(ring, cols, nrows=quots[tgt].module.n_gens)
        return cls(cat, variance, ring, anns, action)

    def __repr__(self):
        return f"CatModule({self.cat.name}, {self.variance}, {self.ring})"


class FreeCatModule:
    """A finite direct sum of represented functors R mor(?, c_i) (contra)
    or R mor(c_i, ?) (co).  Bases are (summand, morphism) pairs in summand
    order then hom order."""

    def __init__(self, cat: FiniteCategory, ring: Ring, variance: str, summands: list[str]):
        self.cat = cat
        self.ring = ring
        self.variance = variance
        self.summands = list(summands)
        self._basis_cache: dict[str, list] = {}
        self._index_cache: dict[str, dict] = {}

    def basis(self, obj: str) -> list[tuple[int, str]]:
        if obj not in self._basis_cache:
            out = []
            for i, c in enumerate(self.summands):
                homs = (
                    self.cat.hom[(obj, c)]
                    if self.variance == CONTRA
                    else self.cat.hom[(c, obj)]
                )
                out.extend((i, f) for f in homs)
            self._basis_cache[obj] = out
            self._index_cache[obj] = {bf: k for k, bf in enumerate(out)}
        return self._basis_cache[obj]

    def basis_index(self, obj: str) -> dict:
        self.basis(obj)
        return self._index_cache[obj]

    def rank(self, obj: str) -> int:
        return len(self.basis(obj))

    def transport(self, f: str, pairs: dict[tuple[int, str], object]) -> dict:
        """Push a sparse vector along the action of f.

        contra, f: a -> b: F(b) -> F(a), (i, psi) -> (i, psi o f);
        co, f: a -> b: F(a) -> F(b), (i, psi) -> (i, f o psi).
        """
        cat = self.cat
        out: dict = {}
        for (i, psi), coeff in pairs.items():
            key = (
                (i, cat.compose(psi, f))
                if self.variance == CONTRA
                else (i, cat.compose(f, psi))
            )
            out[key] = self.ring.add(out.get(key, self.ring.zero), coeff)
        return out

    def action_matrix(self, f: str) -> Matrix:
        cat = self.cat
        a, b = cat.morphisms[f]
        src = b if self.variance == CONTRA else a
        tgt = a if self.variance == CONTRA else b
        src_basis = self.basis(src)
        tgt_index = self.basis_index(tgt)
        m = Matrix.zeros(self.ring, len(tgt_index), len(src_basis))
        one = self.ring.one
        for col, (i, psi) in enumerate(src_basis):
            key = (
                (i, cat.compose(psi, f))
                if self.variance == CONTRA
                else (i, cat.compose(f, psi))
            )
            m.data[tgt_index[key]][col] = one
        return m

    def as_catmodule(self) -> CatModule:
        anns = {c: [self.ring.zero] * self.rank(c) for c in self.cat.objects}
        action = {f: self.action_matrix(f) for f in self.cat.morphisms}
        return CatModule(self.cat, self.variance, self.ring, anns, action, check=False)


# -- tensor over the category ------------------------------------------


class TensorResult:
    """Coequalizer presentation of M (x)_C N with witnesses.

    Raw generators are (object, M-generator, N-generator) triples in
    object order; quotient carries the canonical projection.
    """

    def __init__(self, M: CatModule, N: CatModule):
        if M.cat is not N.cat and M.cat.objects != N.cat.objects:
            raise BaseMismatch("modules live over different categories")
        if M.ring != N.ring:
            raise RingMismatch("modules have different coefficient rings")
        if M.variance != CONTRA or N.variance != CO:
            raise VarianceMismatch("tensor needs contravariant (x) covariant")
        cat = M.cat
        ring = M.ring
        self.raw_gens: list[tuple[str, int, int]] = []
        offset: dict[str, int] = {}
        for c in cat.objects:
            offset[c] = len(self.raw_gens)
            for j in range(M.rank(c)):
                for k in range(N.rank(c)):
                    self.raw_gens.append((c, j, k))
        n = len(self.raw_gens)

        def gid(c, j, k):
            return offset[c] + j * N.rank(c) + k

        rows = []
        z = ring.zero
        for c in cat.objects:
            manns = M.anns[c]
            nanns = N.anns[c]
            for j in range(M.rank(c)):
                for k in range(N.rank(c)):
                    for d in (manns[j], nanns[k]):
                        if d:
                            row = [z] * n
                            row[gid(c, j, k)] = d
                            rows.append(row)
        for f, (a, b) in cat.morphisms.items():
            if f == cat.id_of(a) and a == b:
                continue
            Mf = M.act(f)  # M(b) -> M(a)
            Nf = N.act(f)  # N(a) -> N(b)
            for j in range(M.rank(b)):
                for k in range(N.rank(a)):
                    # (x phi) (x) y - x (x) (phi y)
                    row = [z] * n
                    for a_i in range(M.rank(a)):
                        coeff = Mf.data[a_i][j]
                        if coeff != z:
                            row[gid(a, a_i, k)] = ring.add(row[gid(a, a_i, k)], coeff)
                    for b_i in range(N.rank(b)):
                        coeff = Nf.data[b_i][k]
                        if coeff != z:
                            row[gid(b, j, b_i)] = ring.sub(row[gid(b, j, b_i)], coeff)
                    rows.append(row)
        self.quot = CanonicalQuotient(ring, n, rows)
        self.module = self.quot.module


def tensor_over_C(M: CatModule, N: CatModule) -> FPModule:
    """M (x)_C N by the coequalizer presentation, in canonical form."""
    return TensorResult(M, N).module


# -- functors -----------------------------------------------------------


class Functor:
    def __init__(self, src: FiniteCategory, dst: FiniteCategory,
                 obj_map: dict[str, str], mor_map: dict[str, str], check: bool = True):
        self.src = src
        self.dst = dst
        self.obj_map = dict(obj_map)
        self.mor_map = dict(mor_map)
        if check:
            problems = self.validate()
            if problems:
                raise NotAFunctor("\n".join(problems))

    def validate(self) -> list[str]:
        out = []
        for c in self.src.objects:
            if self.obj_map.get(c) not in self.dst.obj_index:
                out.append(f"object {c!r} not mapped")
        for f, (a, b) in self.src.morphisms.items():
            g = self.mor_map.get(f)
            if g is None or g not in self.dst.morphisms:
                out.append(f"morphism {f!r} not mapped")
                continue
            if self.dst.morphisms[g] != (self.obj_map[a], self.obj_map[b]):
                out.append(f"morphism {f!r} has incompatible image")
        if out:
            return out
        for c in self.src.objects:
            if self.mor_map[self.src.id_of(c)] != self.dst.id_of(self.obj_map[c]):
                out.append(f"identity of {c!r} not preserved")
        by_src = {c: [] for c in self.src.objects}
        for f, (a, b) in self.src.morphisms.items():
            by_src[a].append(f)
        for f, (a, b) in self.src.morphisms.items():
            for g in by_src[b]:
                if self.mor_map[self.src.compose(g, f)] != self.dst.compose(
                    self.mor_map[g], self.mor_map[f]
                ):
                    out.append(f"composition not preserved on ({g!r},{f!r})")
        return out

    @classmethod
    def identity(cls, cat: FiniteCategory) -> "Functor":
        return cls(cat, cat, {c: c for c in cat.objects},
                   {f: f for f in cat.morphisms}, check=False)

    def __call__(self, x: str) -> str:
        return self.obj_map[x] if x in self.obj_map else self.mor_map[x]


def full_subcategory(cat: FiniteCategory, objects: list[str]) -> tuple[FiniteCategory, Functor]:
    """The full subcategory on the given objects, sharing morphism ids,
    together with its inclusion functor."""
    objs = [c for c in cat.objects if c in set(objects)]
    keep = set(objs)
    mors = {f: (a, b) for f, (a, b) in cat.morphisms.items() if a in keep and b in keep}
    comp = {
        (g, f): gf
        for (g, f), gf in cat.compose_table.items()
        if f in mors and g in mors
    }
    ident = {c: cat.id_of(c) for c in objs}
    sub = FiniteCategory(objs, mors, comp, ident, name=f"{cat.name}|{len(objs)}")
    inc = Functor(sub, cat, {c: c for c in objs}, {f: f for f in mors}, check=False)
    return sub, inc


def restrict(F: Functor, M: CatModule) -> CatModule:
    """M o F: pointwise restriction along a functor."""
    if M.cat is not F.dst and M.cat.objects != F.dst.objects:
        raise BaseMismatch("module does not live over the functor's target")
    anns = {b: list(M.anns[F.obj_map[b]]) for b in F.src.objects}
    action = {f: M.act(F.mor_map[f]) for f in F.src.morphisms}
    return CatModule(F.src, M.variance, M.ring, anns, action, check=False)


class InducedModule:
    """F_* X with its raw coequalizer presentation retained.

    contra X: (F_*X)(d) = sum_b X(b) (x) R mor_D(d, F(b)) / moves;
    co X:     (F_*X)(d) = sum_b R mor_D(F(b), d) (x) X(b) / moves.
    Raw generators at d are (b, X-generator, morphism) triples.
    """

    def __init__(self, F: Functor, X: CatModule):
        if X.cat is not F.src and X.cat.objects != F.src.objects:
            raise BaseMismatch("module does not live over the functor's source")
        self.F = F
        self.X = X
        cat = F.dst
        B = F.src
        ring = X.ring
        contra = X.variance == CONTRA
        self.raw_gens: dict[str, list[tuple[str, int, str]]] = {}
        self.quots: dict[str, CanonicalQuotient] = {}
        for d in cat.objects:
            gens = []
            for b in B.objects:
                homs = (
                    cat.hom[(d, F.obj_map[b])] if contra else cat.hom[(F.obj_map[b], d)]
                )
                for j in range(X.rank(b)):
                    for phi in homs:
                        gens.append((b, j, phi))
            index = {g: i for i, g in enumerate(gens)}
            rows = []
            z = ring.zero
            n = len(gens)
            for (b, j, phi) in gens:
                dd = X.anns[b][j]
                if dd:
                    row = [z] * n
                    row[index[(b, j, phi)]] = dd
                    rows.append(row)
            for f, (b1, b2) in B.morphisms.items():
                if f == B.id_of(b1) and b1 == b2:
                    continue
                Xf = X.act(f)
                Ff = F.mor_map[f]
                if contra:
                    # (X(f) x) (x) phi ~ x (x) (F(f) o phi), x in X(b2), phi: d -> F(b1)
                    for j in range(X.rank(b2)):
                        for phi in cat.hom[(d, F.obj_map[b1])]:
                            row = [z] * n
                            for i in range(X.rank(b1)):
                                c = Xf.data[i][j]
                                if c != z:
                                    row[index[(b1, i, phi)]] = ring.add(
                                        row[index[(b1, i, phi)]], c
                                    )
                            tgt = (b2, j, cat.compose(Ff, phi))
                            row[index[tgt]] = ring.sub(row[index[tgt]], ring.one)
                            rows.append(row)
                else:
                    # (psi o F(f)) (x) x ~ psi (x) (X(f) x), x in X(b1), psi: F(b2) -> d
                    for j in range(X.rank(b1)):
                        for psi in cat.hom[(F.obj_map[b2], d)]:
                            row = [z] * n
                            row[index[(b1, j, cat.compose(psi, Ff))]] = ring.one
                            for i in range(X.rank(b2)):
                                c = Xf.data[i][j]
                                if c != z:
                                    row[index[(b2, i, psi)]] = ring.sub(
                                        row[index[(b2, i, psi)]], c
                                    )
                            rows.append(row)
            self.raw_gens[d] = gens
            self.quots[d] = CanonicalQuotient(ring, n, rows)
        anns = {d: self.quots[d].module.anns() for d in cat.objects}
        action = {}
        for g, (d1, d2) in cat.morphisms.items():
            src = d2 if contra else d1
            tgt = d1 if contra else d2
            tgt_index = {gg: i for i, gg in enumerate(self.raw_gens[tgt])}
            cols = []
            for col in range(self.quots[src].module.n_gens):
                v = self.quots[src].lift(col)
                w = [ring.zero] * len(self.raw_gens[tgt])
                for i, (b, j, phi) in enumerate(self.raw_gens[src]):
                    c = v[i]
                    if c == ring.zero:
                        continue
                    key = (
                        (b, j, cat.compose(phi, g)) if contra else (b, j, cat.compose(g, phi))
                    )
                    w[tgt_index[key]] = ring.add(w[tgt_index[key]], c)
                cols.append(self.quots[tgt].project(w))
            action[g] = Matrix.from_columns(
                ring, cols, nrows=self.quots[tgt].module.n_gens
            )
        self.module = CatModule(cat, X.variance, ring, anns, action, check=False)


def induce(F: Functor, X: CatModule) -> CatModule:
    """F_* X, the induction of X along F (coequalizer presentation)."""
    return InducedModule(F, X).module
