"""Free resolutions over a category and the Tor/Ext oracles.

Resolutions are built by a deterministic greedy cover: objects are
scanned in a fixed topological order of iso-classes and a generator is
added only when the current free module does not already generate the
target element.  strategy="full" instead adds every kernel basis vector
at every object; it is kept as the independent second resolution for the
oracle-independence tests.

The assembly map along a functor F: B -> C is computed by inducing a free
resolution of the constant module over B (a symbol-level relabeling),
lifting its augmentation into a free resolution of the constant module
over C degreewise by exact linear solving, and taking homology of the
tensored complexes.
"""

from __future__ import annotations

from .catmod import CO, CONTRA, CatModule, FreeCatModule, Functor, VarianceMismatch
from .fincat import FiniteCategory
from .fpmod import FPModule, Subquotient, presented_homology
from .intlin import ColumnOps, StairBasis, kernel_basis, preimage_basis
from .matrix import Matrix
from .rings import Ring


class LiftFailed(AssertionError):
    pass


def _ann_cols(ring: Ring, anns: list) -> Matrix:
    cols = []
    n = len(anns)
    for i, d in enumerate(anns):
        if d:
            col = [ring.zero] * n
            col[i] = d
            cols.append(col)
    return Matrix.from_columns(ring, cols, nrows=n)


def scan_order(cat: FiniteCategory, variance: str) -> list[str]:
    """Objects ordered so that early generators cover as much as possible.

    A contravariant generator at c reaches d when mor(d, c) is nonempty,
    so sinks of the class preorder come first; covariantly, sources come
    first.  Falls back to category order when the preorder has cycles.
    """
    data = cat.iso_classes()
    n = data.count
    reach = data.partial_order_pairs()
    edges = {i: [j for j in range(n) if i != j and (i, j) in reach] for i in range(n)}
    order: list[int] = []
    state = {}

    def dfs(v):
        state[v] = 1
        for w in edges[v]:
            if state.get(w, 0) == 1:
                raise ValueError("cyclic")
            if state.get(w, 0) == 0:
                dfs(w)
        state[v] = 2
        order.append(v)

    try:
        for v in range(n):
            if state.get(v, 0) == 0:
                dfs(v)
    except ValueError:
        return list(cat.objects)
    # order has sinks first; that is the contravariant scan order
    if variance == CO:
        order = order[::-1]
    out = []
    for k in order:
        out.extend(data.classes[k])
    return out


class Resolution:
    """F_0 <- F_1 <- ... <- F_len, free modules with an augmentation to M."""

    def __init__(self, M: CatModule):
        self.M = M
        self.cat = M.cat
        self.ring = M.ring
        self.variance = M.variance
        self.levels: list[FreeCatModule] = []
        self.aug_images: list[list] = []  # per level-0 generator: vector in M(c)
        self.gen_images: list[list[dict]] = [[]]  # level k>=1: sparse over F_{k-1} basis

    @property
    def length(self) -> int:
        return len(self.levels) - 1

    def free(self, k: int) -> FreeCatModule:
        return self.levels[k]

    def eval_aug(self, obj: str) -> Matrix:
        F0 = self.levels[0]
        cols = []
        for (i, phi) in F0.basis(obj):
            cols.append(self.M.act(phi).apply(self.aug_images[i]))
        return Matrix.from_columns(self.ring, cols, nrows=self.M.rank(obj))

    def eval_diff(self, k: int, obj: str) -> Matrix:
        """The matrix F_k(obj) -> F_{k-1}(obj)."""
        Fk = self.levels[k]
        Fprev = self.levels[k - 1]
        tgt_index = Fprev.basis_index(obj)
        cols = []
        z = self.ring.zero
        for (i, phi) in Fk.basis(obj):
            col = [z] * len(tgt_index)
            moved = Fprev.transport(phi, self.gen_images[k][i])
            for key, coeff in moved.items():
                col[tgt_index[key]] = self.ring.add(col[tgt_index[key]], coeff)
            cols.append(col)
        return Matrix.from_columns(self.ring, cols, nrows=len(tgt_index))

    def verify(self) -> list[str]:
        """Check d.d = 0 and exactness objectwise below the top level."""
        out = []
        for obj in self.cat.objects:
            aug = self.eval_aug(obj)
            manns = self.M.anns[obj]
            for k in range(1, self.length + 1):
                d = self.eval_diff(k, obj)
                if k == 1:
                    comp = aug @ d
                    for i in range(comp.rows):
                        e = manns[i] if not self.ring.is_field else self.ring.zero
                        for x in comp.data[i]:
                            if (x % e if e else x) != (0 if not self.ring.is_field else self.ring.zero):
                                out.append(f"aug . d1 != 0 at {obj}")
                                break
                else:
                    if not (self.eval_diff(k - 1, obj) @ d).is_zero():
                        out.append(f"d{k-1} . d{k} != 0 at {obj}")
            for k in range(self.length):
                if k == 0:
                    ker = preimage_basis(aug, _ann_cols(self.ring, manns))
                else:
                    ker = kernel_basis(self.eval_diff(k, obj))
                img = self.eval_diff(k + 1, obj)
                span = StairBasis(self.ring, ker.rows)
                for j in range(img.cols):
                    span.add(img.column(j))
                for j in range(ker.cols):
                    if not span.contains(ker.column(j)):
                        out.append(f"not exact at level {k}, object {obj}")
                        break
        return out


def free_resolution(M: CatModule, length: int, strategy: str = "greedy") -> Resolution:
    """A free resolution F_0 <- ... <- F_length of M.

    greedy: deterministic minimal-ish cover in scan order; full: every
    kernel basis vector at every object becomes a generator.
    """
    res = Resolution(M)
    cat = M.cat
    ring = M.ring
    order = scan_order(cat, M.variance)
    reaches = lambda d, c: (
        cat.hom[(d, c)] if M.variance == CONTRA else cat.hom[(c, d)]
    )

    # level 0: cover the values of M
    spanned = {c: StairBasis(ring, M.rank(c)) for c in cat.objects}
    for c in cat.objects:
        for i, d in enumerate(M.anns[c]):
            if d:
                row = [ring.zero] * M.rank(c)
                row[i] = d
                spanned[c].add(row)
    summands: list[str] = []
    for c in order:
        for j in range(M.rank(c)):
            e = [ring.zero] * M.rank(c)
            e[j] = ring.one
            if strategy != "full" and spanned[c].contains(e):
                continue
            summands.append(c)
            res.aug_images.append(e)
            for d in cat.objects:
                for phi in reaches(d, c):
                    spanned[d].add(M.act(phi).apply(e))
    res.levels.append(FreeCatModule(cat, ring, M.variance, summands))

    for k in range(1, length + 1):
        prev = res.levels[k - 1]
        kernels = {}
        for d in cat.objects:
            if k == 1:
                kernels[d] = preimage_basis(
                    res.eval_aug(d), _ann_cols(ring, M.anns[d])
                )
            else:
                kernels[d] = kernel_basis(res.eval_diff(k - 1, d))
        spanned = {c: StairBasis(ring, prev.rank(c)) for c in cat.objects}
        summands = []
        images: list[dict] = []
        for c in order:
            K = kernels[c]
            basis_c = prev.basis(c)
            for j in range(K.cols):
                v = K.column(j)
                if strategy != "full" and spanned[c].contains(v):
                    continue
                summands.append(c)
                sparse = {
                    basis_c[i]: v[i] for i in range(len(v)) if v[i] != ring.zero
                }
                images.append(sparse)
                for d in cat.objects:
                    for phi in reaches(d, c):
                        moved = prev.transport(phi, sparse)
                        dense = [ring.zero] * prev.rank(d)
                        idx = prev.basis_index(d)
                        for key, coeff in moved.items():
                            dense[idx[key]] = ring.add(dense[idx[key]], coeff)
                        spanned[d].add(dense)
        res.levels.append(FreeCatModule(cat, ring, M.variance, summands))
        res.gen_images.append(images)
    return res


class PresentedComplex:
    """A bounded complex of canonically presented modules.

    diffs[k] is d_k: C_k -> C_{k-1} for k = 1..top; anns[k] are the
    generator annihilators of C_k.
    """

    def __init__(self, ring: Ring, anns: list[list], diffs: list[Matrix]):
        self.ring = ring
        self.anns = anns
        self.diffs = diffs  # length len(anns) - 1, diffs[k-1] = d_k

    def dims(self) -> list[int]:
        return [len(a) for a in self.anns]

    def d(self, k: int) -> Matrix:
        """d_k: C_k -> C_{k-1}; zero maps off the ends."""
        if 1 <= k < len(self.anns):
            return self.diffs[k - 1]
        if k == len(self.anns):
            return Matrix.zeros(self.ring, len(self.anns[-1]), 0)
        raise IndexError(k)

    def homology_witness(self, q: int) -> Subquotient:
        if q >= len(self.anns):
            raise IndexError(f"complex has no level {q}")
        d_out = (
            self.d(q)
            if q >= 1
            else Matrix.zeros(self.ring, 0, len(self.anns[0]))
        )
        d_in = (
            self.d(q + 1)
            if q + 1 < len(self.anns)
            else Matrix.zeros(self.ring, len(self.anns[q]), 0)
        )
        anns_next = self.anns[q - 1] if q >= 1 else []
        return presented_homology(d_out, d_in, self.anns[q], anns_next)

    def homology(self, q: int) -> FPModule:
        return self.homology_witness(q).module


def tensor_complex(res: Resolution, N: CatModule) -> PresentedComplex:
    """(F_* of the resolution) (x)_C N, collapsed by co-Yoneda.

    Level k is the direct sum of N(c_i) over the level's summands; the
    differential block from summand i to summand j sums coeff * N(psi)
    over the terms (j, psi) of the generator image.
    """
    if N.variance != (CO if res.variance == CONTRA else CONTRA):
        raise VarianceMismatch("tensor needs opposite variances")
    ring = res.ring
    anns = []
    for k in range(res.length + 1):
        level = []
        for c in res.levels[k].summands:
            level.extend(N.anns[c])
        anns.append(level)
    offsets = []
    for k in range(res.length + 1):
        offs = []
        total = 0
        for c in res.levels[k].summands:
            offs.append(total)
            total += N.rank(c)
        offsets.append(offs)
    diffs = []
    for k in range(1, res.length + 1):
        rows = len(anns[k - 1])
        cols = len(anns[k])
        m = Matrix.zeros(ring, rows, cols)
        col0 = 0
        for i, c in enumerate(res.levels[k].summands):
            for (j, psi), coeff in res.gen_images[k][i].items():
                blk = N.act(psi)  # N(c) -> N(c_j) (co) based at summand objects
                r0 = offsets[k - 1][j]
                for r in range(blk.rows):
                    for s in range(blk.cols):
                        v = ring.mul(coeff, blk.data[r][s])
                        if v != ring.zero:
                            m.data[r0 + r][col0 + s] = ring.add(
                                m.data[r0 + r][col0 + s], v
                            )
            col0 += N.rank(c)
        diffs.append(m)
    return PresentedComplex(ring, anns, diffs)


def hom_complex(res: Resolution, N: CatModule) -> PresentedComplex:
    """Hom_C(F_*, N) for contravariant res and N; cochain differentials.

    Level q is the sum of N(c_i) over level-q summands (Yoneda); the
    returned PresentedComplex stores delta^q: C^q -> C^{q+1} as diffs[q],
    so homology_witness is not applicable; use cohomology_witness.
    """
    if res.variance != CONTRA or N.variance != CONTRA:
        raise VarianceMismatch("Ext needs both modules contravariant")
    ring = res.ring
    anns = []
    for k in range(res.length + 1):
        level = []
        for c in res.levels[k].summands:
            level.extend(N.anns[c])
        anns.append(level)
    offsets = []
    for k in range(res.length + 1):
        offs = []
        total = 0
        for c in res.levels[k].summands:
            offs.append(total)
            total += N.rank(c)
        offsets.append(offs)
    deltas = []
    for k in range(1, res.length + 1):
        rows = len(anns[k])
        cols = len(anns[k - 1])
        m = Matrix.zeros(ring, rows, cols)
        row0 = 0
        for i, c in enumerate(res.levels[k].summands):
            for (j, psi), coeff in res.gen_images[k][i].items():
                blk = N.act(psi)  # psi: c -> c_j, contra N: N(c_j) -> N(c)
                c0 = offsets[k - 1][j]
                for r in range(blk.rows):
                    for s in range(blk.cols):
                        v = ring.mul(coeff, blk.data[r][s])
                        if v != ring.zero:
                            m.data[row0 + r][c0 + s] = ring.add(
                                m.data[row0 + r][c0 + s], v
                            )
            row0 += N.rank(c)
        deltas.append(m)
    return PresentedComplex(ring, anns, deltas)


def cohomology_witness(cx: PresentedComplex, q: int) -> Subquotient:
    """H^q of a cochain complex stored with deltas[q-1]: C^{q-1} -> C^q."""
    ring = cx.ring
    d_out = (
        cx.diffs[q] if q < len(cx.diffs) else Matrix.zeros(ring, 0, len(cx.anns[q]))
    )
    d_in = (
        cx.diffs[q - 1] if q >= 1 else Matrix.zeros(ring, len(cx.anns[q]), 0)
    )
    anns_next = cx.anns[q + 1] if q + 1 < len(cx.anns) else []
    return presented_homology(d_out, d_in, cx.anns[q], anns_next)


def tor(M: CatModule, N: CatModule, n_max: int, strategy: str = "greedy") -> list[FPModule]:
    """Tor_q^{RC}(M, N) for q <= n_max via a free resolution of M."""
    if M.variance != CONTRA or N.variance != CO:
        raise VarianceMismatch("tor needs M contravariant, N covariant")
    res = free_resolution(M, n_max + 1, strategy=strategy)
    cx = tensor_complex(res, N)
    return [cx.homology(q) for q in range(n_max + 1)]


def ext(M: CatModule, N: CatModule, n_max: int, strategy: str = "greedy") -> list[FPModule]:
    """Ext^q_{RC}(M, N) for q <= n_max; both modules contravariant."""
    if M.variance != CONTRA or N.variance != CONTRA:
        raise VarianceMismatch("ext needs both modules contravariant")
    res = free_resolution(M, n_max + 1, strategy=strategy)
    cx = hom_complex(res, N)
    return [cohomology_witness(cx, q).module for q in range(n_max + 1)]


def horseshoe(iota: dict[str, Matrix], pi: dict[str, Matrix],
              resA: Resolution, resC: Resolution, middle: CatModule) -> Resolution:
    """The horseshoe resolution of the middle term of a short exact
    sequence 0 -> A -> B -> C -> 0 from resolutions of A and C.

    Levels are the direct sums (A summands first); the C-part of the
    differential carries a degreewise-solved correction into the A-part,
    and the C-part of the augmentation is a solved lift through pi.
    """
    ring = middle.ring
    cat = middle.cat
    out = Resolution(middle)
    depth = min(resA.length, resC.length)
    for k in range(depth + 1):
        out.levels.append(FreeCatModule(
            cat, ring, middle.variance,
            resA.levels[k].summands + resC.levels[k].summands,
        ))
    # augmentation
    for i, obj in enumerate(resA.levels[0].summands):
        out.aug_images.append(iota[obj].apply(resA.aug_images[i]))
    sigma0: list[list] = []
    for i, obj in enumerate(resC.levels[0].summands):
        from .fpmod import solve_mod

        v = solve_mod(pi[obj], [d for d in _c_anns(resC.M, obj)], resC.aug_images[i])
        if v is None:
            raise LiftFailed("horseshoe: no lift of the augmentation")
        out.aug_images.append(v)
        sigma0.append(v)

    def sigma_extend(obj, sparse):
        """Extend sigma_0 to F(C)_0(obj) by the middle module's action."""
        val = [ring.zero] * middle.rank(obj)
        for (j, psi), coeff in sparse.items():
            moved = middle.act(psi).apply(sigma0[j])
            for t in range(len(val)):
                val[t] = ring.add(val[t], ring.mul(coeff, moved[t]))
        return val

    h_prev: list[dict] = []  # per C-generator of level k-1: sparse over F(A)_{k-1}
    for k in range(1, depth + 1):
        lenA_prev = len(resA.levels[k - 1].summands)
        images: list[dict] = []
        for i in range(len(resA.levels[k].summands)):
            images.append(dict(resA.gen_images[k][i]))
        h_this: list[dict] = []
        FAprev = resA.levels[k - 1]
        for i, obj in enumerate(resC.levels[k].summands):
            dC = resC.gen_images[k][i]
            if k == 1:
                rhs_val = sigma_extend(obj, dC)
                rhs = [ring.neg(x) for x in rhs_val]
                mat = iota[obj] @ resA.eval_aug(obj)
                from .fpmod import solve_mod

                hvec = solve_mod(mat, middle.anns[obj], rhs)
            else:
                rhs = [ring.zero] * resA.levels[k - 2].rank(obj)
                FA2 = resA.levels[k - 2]
                idx = FA2.basis_index(obj)
                for (j, psi), coeff in dC.items():
                    moved = FA2.transport(psi, h_prev[j])
                    for key, c in moved.items():
                        rhs[idx[key]] = ring.add(rhs[idx[key]], ring.mul(coeff, c))
                rhs = [ring.neg(x) for x in rhs]
                hvec = ColumnOps(resA.eval_diff(k - 1, obj)).solve(rhs)
            if hvec is None:
                raise LiftFailed(f"horseshoe: no correction at level {k}")
            basis = FAprev.basis(obj)
            hsparse = {
                basis[t]: hvec[t] for t in range(len(hvec)) if hvec[t] != ring.zero
            }
            h_this.append(hsparse)
            combined: dict = dict(hsparse)
            for (j, psi), coeff in dC.items():
                combined[(j + lenA_prev, psi)] = coeff
            images.append(combined)
        out.gen_images.append(images)
        h_prev = h_this
    return out


def _c_anns(module: CatModule, obj: str) -> list:
    return module.anns[obj]


# -- assembly ------------------------------------------------------------


def induce_free(F: Functor, res: Resolution) -> Resolution:
    """F_* of a free resolution: relabel summand objects and morphisms."""
    out = Resolution(res.M)  # M field only used for ring/variance here
    out.cat = F.dst
    out.levels = [
        FreeCatModule(F.dst, res.ring, res.variance,
                      [F.obj_map[c] for c in lvl.summands])
        for lvl in res.levels
    ]
    out.aug_images = res.aug_images
    out.gen_images = [[]]
    for k in range(1, res.length + 1):
        level = []
        for sparse in res.gen_images[k]:
            moved: dict = {}
            for (j, psi), coeff in sparse.items():
                key = (j, F.mor_map[psi])
                moved[key] = res.ring.add(moved.get(key, res.ring.zero), coeff)
            level.append(moved)
        out.gen_images.append(level)
    return out


class AssemblyResult:
    def __init__(self, source: list[FPModule], target: list[FPModule],
                 maps: list[Matrix], iso: list[bool]):
        self.source = source
        self.target = target
        self.maps = maps
        self.iso = iso


def _map_is_iso(mat: Matrix, src_anns: list, dst_anns: list) -> bool:
    ring = mat.ring
    # surjective: columns plus target relations span everything
    span = StairBasis(ring, len(dst_anns))
    for i, d in enumerate(dst_anns):
        if d:
            row = [ring.zero] * len(dst_anns)
            row[i] = d
            span.add(row)
    for j in range(mat.cols):
        span.add(mat.column(j))
    for i in range(len(dst_anns)):
        e = [ring.zero] * len(dst_anns)
        e[i] = ring.one
        if not span.contains(e):
            return False
    # injective: preimage of target relations lies in source relations
    ker = preimage_basis(mat, _ann_cols(ring, dst_anns))
    src_rel = StairBasis(ring, len(src_anns))
    for i, d in enumerate(src_anns):
        if d:
            row = [ring.zero] * len(src_anns)
            row[i] = d
            src_rel.add(row)
    for j in range(ker.cols):
        if not src_rel.contains(ker.column(j)):
            return False
    return True


def assembly_tor(F: Functor, N: CatModule, n_max: int) -> AssemblyResult:
    """The maps Tor_q^{RB}(R, F^*N) -> Tor_q^{RC}(R, N) induced by F.

    Computed by inducing a free resolution of the constant contravariant
    module over B, lifting through a free resolution of the constant
    module over C (degreewise linear solving; existence is projectivity
    plus exactness), and taking homology of the tensored complexes.
    """
    if N.variance != CO:
        raise VarianceMismatch("assembly_tor needs a covariant coefficient module")
    ring = N.ring
    B, C = F.src, F.dst
    constB = CatModule.constant(B, ring, CONTRA)
    constC = CatModule.constant(C, ring, CONTRA)
    P = free_resolution(constB, n_max + 1)
    Pp = free_resolution(constC, n_max + 1)
    FP = induce_free(F, P)

    # lift rho: F_* P -> P' over the counit F_* const_B -> const_C
    rho: list[list[list]] = []  # per level, per generator: vector in P'_k(obj)
    for k in range(n_max + 2):
        level_vecs = []
        for i, obj in enumerate(FP.levels[k].summands):
            if k == 0:
                target = P.aug_images[i]  # scalar vector of length 1
                solver = ColumnOps(Pp.eval_aug(obj))
                v = solver.solve(list(target))
            else:
                # rhs = rho_{k-1}(d(gen i)) inside P'_{k-1}(obj)
                prev = Pp.levels[k - 1]
                rhs = [ring.zero] * prev.rank(obj)
                prev_index = prev.basis_index(obj)
                for (j, psi), coeff in FP.gen_images[k][i].items():
                    wj = rho[k - 1][j]
                    # transport wj along psi: obj -> summand_j object
                    src_basis = prev.basis(FP.levels[k - 1].summands[j])
                    sparse = {
                        src_basis[t]: wj[t]
                        for t in range(len(wj))
                        if wj[t] != ring.zero
                    }
                    moved = prev.transport(psi, sparse)
                    for key, cf in moved.items():
                        rhs[prev_index[key]] = ring.add(
                            rhs[prev_index[key]], ring.mul(coeff, cf)
                        )
                solver = ColumnOps(Pp.eval_diff(k, obj))
                v = solver.solve(rhs)
            if v is None:
                raise LiftFailed(f"no lift at level {k} generator {i}")
            level_vecs.append(v)
        rho.append(level_vecs)

    src_cx = tensor_complex(FP, N)  # equals P (x)_B F^* N by adjunction
    dst_cx = tensor_complex(Pp, N)
    # chain map on tensored complexes from rho
    maps = []
    sources = []
    targets = []
    isos = []
    for q in range(n_max + 1):
        rows = len(dst_cx.anns[q])
        cols = len(src_cx.anns[q])
        m = Matrix.zeros(ring, rows, cols)
        col0 = 0
        offs = []
        total = 0
        for c in Pp.levels[q].summands:
            offs.append(total)
            total += N.rank(c)
        for i, obj in enumerate(FP.levels[q].summands):
            basis = Pp.levels[q].basis(obj)
            v = rho[q][i]
            for t, (j, psi) in enumerate(basis):
                coeff = v[t]
                if coeff == ring.zero:
                    continue
                blk = N.act(psi)
                r0 = offs[j]
                for r in range(blk.rows):
                    for s in range(blk.cols):
                        val = ring.mul(coeff, blk.data[r][s])
                        if val != ring.zero:
                            m.data[r0 + r][col0 + s] = ring.add(
                                m.data[r0 + r][col0 + s], val
                            )
            col0 += N.rank(obj)
        src_h = src_cx.homology_witness(q)
        dst_h = dst_cx.homology_witness(q)
        from .fpmod import induced_map

        hmap = induced_map(src_h, dst_h, m)
        maps.append(hmap)
        sources.append(src_h.module)
        targets.append(dst_h.module)
        isos.append(
            _map_is_iso(hmap, src_h.module.anns(), dst_h.module.anns())
        )
    return AssemblyResult(sources, targets, maps, isos)
