"""The cohomology variant: Ext pages from a Cartan-Eilenberg resolution.

With both modules contravariant, the engine builds the row complex
W_p = M (x)_C D_p (nerve bimodule tensored on the second slot), splits it
through boundaries/cycles/homology subfunctors, resolves those by the
greedy free resolutions and assembles horseshoe resolutions P(W_p) with a
strictly commuting horizontal differential (the classical construction,
realized by exact linear solving).  The double cochain complex is then
Hom_C(P(W_p)_q, N), which collapses to sums of values of N by Yoneda; the
descending column filtration gives pages with d_r of bidegree (+r, 1-r),
E_1^{p,q} = Ext^q(W_p, N) splits as the product over p-chains of
group-level Ext (cross-checked through the one-object subcategories), and
the total cohomology is compared against the Ext oracle.
"""

from __future__ import annotations

from .catmod import CONTRA, CatModule, VarianceMismatch, full_subcategory
from .fincat import NerveCell, PChain, chain_bound, enumerate_chains, face, nd_tilde_nerve
from .fpmod import FPModule, SubPresentation, Subquotient, presented_homology
from .intlin import preimage_basis
from .matrix import Matrix
from .resolve import Resolution, ext, free_resolution, horseshoe
from .spectral import MergedQuotient


class WModule:
    """W_p = M (x) D_p(-, ??) as a contravariant module, with the raw
    coequalizer data retained for the face maps."""

    def __init__(self, owner: "ExtFilteredComplex", p: int):
        cat = owner.cat
        ring = owner.ring
        M = owner.M
        self.p = p
        self.raw_gens: dict[str, list[tuple]] = {}
        self.quots: dict[str, MergedQuotient] = {}
        for s in cat.objects:
            gens = []
            for d in cat.objects:
                if M.rank(d) == 0:
                    continue
                cell = owner.nerve(p, s, d)
                for cls in range(cell.size()):
                    for j in range(M.rank(d)):
                        gens.append((d, cls, j))
            index = {g: i for i, g in enumerate(gens)}
            rows: list[dict] = []
            z = ring.zero
            for i, (d, cls, j) in enumerate(gens):
                ann = M.anns[d][j]
                if ann:
                    rows.append({i: ann})
            for f, (d, dprime) in cat.morphisms.items():
                if f == cat.id_of(d) and d == dprime:
                    continue
                if M.rank(dprime) == 0 and M.rank(d) == 0:
                    continue
                Mf = M.act(f)
                cell_d = owner.nerve(p, s, d)
                for cls in range(cell_d.size()):
                    alpha, phis, beta = cell_d.classes[cls]
                    pushed = (alpha, phis, cat.compose(f, beta))
                    cls2 = owner.nerve(p, s, dprime).class_of(pushed)
                    for j in range(M.rank(dprime)):
                        row: dict = {}
                        for a in range(M.rank(d)):
                            c = Mf.data[a][j]
                            if c != z:
                                u = index[(d, cls, a)]
                                row[u] = ring.add(row.get(u, z), c)
                        v = index[(dprime, cls2, j)]
                        row[v] = ring.sub(row.get(v, z), ring.one)
                        if row:
                            rows.append(row)
            self.raw_gens[s] = gens
            self.quots[s] = MergedQuotient(ring, len(gens), rows)
        self.index = {
            s: {g: i for i, g in enumerate(self.raw_gens[s])} for s in cat.objects
        }
        anns = {s: self.quots[s].module.anns() for s in cat.objects}
        action = {}
        for g, (s2, s) in cat.morphisms.items():
            # contravariant: g: s2 -> s acts W(s) -> W(s2) by alpha-precomposition
            cols = []
            for jgen in range(self.quots[s].module.n_gens):
                sparse = self.quots[s].lift(jgen)
                out: dict = {}
                for u, c in sparse.items():
                    d, cls, j = self.raw_gens[s][u]
                    alpha, phis, beta = owner.nerve(p, s, d).classes[cls]
                    pulled = (cat.compose(alpha, g), phis, beta)
                    cls2 = owner.nerve(p, s2, d).class_of(pulled)
                    v = self.index[s2][(d, cls2, j)]
                    out[v] = ring.add(out.get(v, ring.zero), c)
                cols.append(self.quots[s2].project_raw(out))
            action[g] = Matrix.from_columns(
                ring, cols, nrows=self.quots[s2].module.n_gens
            )
        self.module = CatModule(cat, CONTRA, ring, anns, action, check=False)

    def face_matrix(self, owner: "ExtFilteredComplex", i: int, s: str) -> Matrix:
        """face_i: W_p(s) -> W_{p-1}(s) on canonical generators."""
        ring = owner.ring
        cat = owner.cat
        tgt = owner.W[self.p - 1]
        cols = []
        for jgen in range(self.quots[s].module.n_gens):
            sparse = self.quots[s].lift(jgen)
            out: dict = {}
            for u, c in sparse.items():
                d, cls, j = self.raw_gens[s][u]
                diagram = owner.nerve(self.p, s, d).classes[cls]
                fd = face(cat, diagram, i)
                if fd is None:
                    continue
                cls2 = owner.nerve(self.p - 1, s, d).class_of(fd)
                v = tgt.index[s][(d, cls2, j)]
                out[v] = ring.add(out.get(v, ring.zero), c)
            cols.append(tgt.quots[s].project_raw(out))
        return Matrix.from_columns(ring, cols, nrows=tgt.quots[s].module.n_gens)


def _sub_catmodule(cat, ring, W: CatModule, lattices: dict[str, Matrix]):
    """A submodule functor of W given by generating columns per object,
    as a CatModule plus inclusion matrices."""
    subs = {s: SubPresentation(ring, W.anns[s], lattices[s]) for s in cat.objects}
    anns = {s: subs[s].module.anns() for s in cat.objects}
    action = {}
    for g, (s2, s) in cat.morphisms.items():
        src = s  # contravariant
        tgt = s2
        cols = []
        for j in range(subs[src].module.n_gens):
            v = W.act(g).apply(subs[src].include(j))
            cols.append(subs[tgt].express(v))
        action[g] = Matrix.from_columns(ring, cols, nrows=subs[tgt].module.n_gens)
    mod = CatModule(cat, CONTRA, ring, anns, action, check=False)
    incl = {s: subs[s].include_matrix() for s in cat.objects}
    return mod, subs, incl


class ExtFilteredComplex:
    """Hom_C(P(W_*), N) for a Cartan-Eilenberg resolution P(W_*)."""

    def __init__(self, M: CatModule, N: CatModule, p_max: int | None = None,
                 q_max: int = 4):
        if M.variance != CONTRA or N.variance != CONTRA:
            raise VarianceMismatch("the cohomology pages need both modules contravariant")
        if M.ring != N.ring:
            raise VarianceMismatch("M and N have different rings")
        self.cat = M.cat
        self.ring = M.ring
        self.M = M
        self.N = N
        self.p_bound = chain_bound(self.cat)
        self.p_max = self.p_bound if p_max is None else min(p_max, self.p_bound)
        self.q_max = q_max
        self.chains = enumerate_chains(self.cat, self.p_max)
        self._nerve: dict[tuple[int, str, str], NerveCell] = {}
        cat, ring = self.cat, self.ring
        self.W: list[WModule] = [WModule(self, p) for p in range(self.p_max + 1)]
        # d^h_p: W_p -> W_{p-1}, alternating face sum, per object
        self.dh: list[dict[str, Matrix]] = [None]
        for p in range(1, self.p_max + 1):
            mats = {}
            for s in cat.objects:
                m = Matrix.zeros(ring, self.W[p - 1].quots[s].module.n_gens,
                                 self.W[p].quots[s].module.n_gens)
                sign = ring.one
                for i in range(p + 1):
                    m = m + self.W[p].face_matrix(self, i, s).scale(sign)
                    sign = ring.neg(sign)
                mats[s] = m
            self.dh.append(mats)
        # boundaries, cycles, homology subfunctors and the CE resolutions
        self.PW: list[Resolution] = []
        B_mods: list = [None] * (self.p_max + 2)
        B_subs: list = [None] * (self.p_max + 2)
        RB: list = [None] * (self.p_max + 2)
        for p in range(self.p_max + 1):
            Wp = self.W[p].module
            if p + 1 <= self.p_max:
                lat = {s: self.dh[p + 1][s] for s in cat.objects}
            else:
                lat = {s: Matrix.zeros(ring, Wp.rank(s), 0) for s in cat.objects}
            B_mods[p], B_subs[p], _ = _sub_catmodule(cat, ring, Wp, lat)
            RB[p] = free_resolution(B_mods[p], q_max)
        # empty boundary object below the bottom row
        zero_lat = {s: Matrix.zeros(ring, self.W[0].module.rank(s), 0) for s in cat.objects}
        for p in range(self.p_max + 1):
            Wp = self.W[p].module
            if p >= 1:
                ker = {
                    s: _preimage_cols(self.dh[p][s], self.W[p - 1].module.anns[s], ring)
                    for s in cat.objects
                }
            else:
                ker = {
                    s: Matrix.identity(ring, Wp.rank(s)) for s in cat.objects
                }
            Z_mod, Z_subs, _ = _sub_catmodule(cat, ring, Wp, ker)
            # H = Z / B with B expressed inside Z
            bincl = {}
            for s in cat.objects:
                cols = []
                for j in range(B_mods[p].rank(s)):
                    cols.append(Z_subs[s].express(B_subs[p][s].include(j)))
                bincl[s] = Matrix.from_columns(ring, cols, nrows=Z_mod.rank(s))
            from .fpmod import CanonicalQuotient

            hquots = {}
            for s in cat.objects:
                rows = []
                nz = Z_mod.rank(s)
                for i, d in enumerate(Z_mod.anns[s]):
                    if d:
                        row = [ring.zero] * nz
                        row[i] = d
                        rows.append(row)
                for j in range(bincl[s].cols):
                    rows.append(bincl[s].column(j))
                hquots[s] = CanonicalQuotient(ring, nz, rows)
            h_anns = {s: hquots[s].module.anns() for s in cat.objects}
            h_action = {}
            for g, (s2, s) in cat.morphisms.items():
                cols = []
                for j in range(hquots[s].module.n_gens):
                    v = Z_mod.act(g).apply(hquots[s].lift(j))
                    cols.append(hquots[s2].project(v))
                h_action[g] = Matrix.from_columns(
                    ring, cols, nrows=hquots[s2].module.n_gens
                )
            H_mod = CatModule(cat, CONTRA, ring, h_anns, h_action, check=False)
            RH = free_resolution(H_mod, q_max)
            hproj = {
                s: Matrix.from_columns(
                    ring,
                    [
                        hquots[s].project(_unit(ring, Z_mod.rank(s), j))
                        for j in range(Z_mod.rank(s))
                    ],
                    nrows=hquots[s].module.n_gens,
                )
                for s in cat.objects
            }
            RZ = horseshoe(bincl, hproj, RB[p], RH, Z_mod)
            zincl = {s: Z_subs[s].include_matrix() for s in cat.objects}
            if p >= 1:
                wproj = {}
                for s in cat.objects:
                    cols = []
                    for j in range(Wp.rank(s)):
                        v = self.dh[p][s].apply(_unit(ring, Wp.rank(s), j))
                        cols.append(B_subs[p - 1][s].express(v))
                    wproj[s] = Matrix.from_columns(
                        ring, cols, nrows=B_mods[p - 1].rank(s)
                    )
                PW = horseshoe(zincl, wproj, RZ, RB[p - 1], Wp)
            else:
                PW = RZ
                # rebase: the augmentation should land in W_0, not Z_0
                PW = _rebase(RZ, Wp, zincl)
            self.PW.append(PW)
        self._rb_sizes = [[0] * (q_max + 1)]
        for p in range(1, self.p_max + 1):
            self._rb_sizes.append(
                [len(RB[p - 1].levels[q].summands) for q in range(q_max + 1)]
            )
        # Hom cells: level q of Hom(PW_p, N) is the sum of N(c_i)
        self.cells: dict[tuple[int, int], dict] = {}
        for p in range(self.p_max + 1):
            for q in range(q_max + 1):
                anns = []
                for c in self.PW[p].levels[q].summands:
                    anns.extend(N.anns[c])
                self.cells[(p, q)] = {"anns": anns, "dim": len(anns)}
        self._dv: dict[tuple[int, int], Matrix] = {}
        self._dh_cell: dict[tuple[int, int], Matrix] = {}
        for p in range(self.p_max + 1):
            for q in range(q_max):
                self._dv[(p, q)] = self._hom_of_diff(p, q)
        for p in range(self.p_max - 1, -1, -1):
            for q in range(q_max + 1):
                self._dh_cell[(p, q)] = self._hom_of_delta(p, q)
        self._total_cache: dict[int, Matrix] = {}

    # -- plumbing ---------------------------------------------------------

    def nerve(self, p: int, s: str, t: str) -> NerveCell:
        key = (p, s, t)
        if key not in self._nerve:
            self._nerve[key] = nd_tilde_nerve(self.cat, p, s, t)
        return self._nerve[key]

    def _hom_of_diff(self, p: int, q: int) -> Matrix:
        """Hom(d_{q+1}, N): cell (p, q) -> cell (p, q+1)."""
        ring = self.ring
        N = self.N
        res = self.PW[p]
        rows = self.cells[(p, q + 1)]["dim"]
        cols = self.cells[(p, q)]["dim"]
        m = Matrix.zeros(ring, rows, cols)
        offs_src = _offsets(res.levels[q].summands, N)
        offs_dst = _offsets(res.levels[q + 1].summands, N)
        for i, c in enumerate(res.levels[q + 1].summands):
            for (j, psi), coeff in res.gen_images[q + 1][i].items():
                blk = N.act(psi)  # psi: c -> c_j, contra: N(c_j) -> N(c)
                r0 = offs_dst[i]
                c0 = offs_src[j]
                for r in range(blk.rows):
                    for s2 in range(blk.cols):
                        v = ring.mul(coeff, blk.data[r][s2])
                        if v != ring.zero:
                            m.data[r0 + r][c0 + s2] = ring.add(
                                m.data[r0 + r][c0 + s2], v
                            )
        return m

    def _hom_of_delta(self, p: int, q: int) -> Matrix:
        """Hom(delta_{p+1}, N): cell (p, q) -> cell (p+1, q).

        delta: PW_{p+1} -> PW_p sends the RB_p tail summands of PW_{p+1}
        identically onto the leading RB_p summands of PW_p.
        """
        ring = self.ring
        N = self.N
        src_res = self.PW[p]      # target of delta
        dst_res = self.PW[p + 1]  # source of delta
        rows = self.cells[(p + 1, q)]["dim"]
        cols = self.cells[(p, q)]["dim"]
        m = Matrix.zeros(ring, rows, cols)
        tail = self._rb_len(p + 1, q)
        dst_sums = dst_res.levels[q].summands
        src_sums = src_res.levels[q].summands
        offs_dst = _offsets(dst_sums, N)
        offs_src = _offsets(src_sums, N)
        for t in range(tail):
            i_dst = len(dst_sums) - tail + t  # RB_p summand inside PW_{p+1}
            i_src = t                          # leading RB_p summand inside PW_p
            if src_sums[i_src] != dst_sums[i_dst]:
                raise AssertionError("CE block misalignment")
            r0 = offs_dst[i_dst]
            c0 = offs_src[i_src]
            for k in range(N.rank(src_sums[i_src])):
                m.data[r0 + k][c0 + k] = ring.one
        return m

    def _rb_len(self, p: int, q: int) -> int:
        """Number of RB_{p-1} tail summands at level q of PW_p."""
        return self._rb_sizes[p][q]

    # -- total complex ------------------------------------------------------

    def blocks(self, n: int) -> list[tuple[int, int]]:
        return [
            (p, n - p)
            for p in range(min(self.p_max, n) + 1)
            if 0 <= n - p <= self.q_max
        ]

    def total_dim(self, n: int) -> int:
        return sum(self.cells[b]["dim"] for b in self.blocks(n))

    def offsets(self, n: int) -> dict:
        out = {}
        tot = 0
        for b in self.blocks(n):
            out[b] = tot
            tot += self.cells[b]["dim"]
        return out

    def anns_of_degree(self, n: int) -> list:
        out = []
        for b in self.blocks(n):
            out.extend(self.cells[b]["anns"])
        return out

    def total_delta(self, n: int) -> Matrix:
        if n in self._total_cache:
            return self._total_cache[n]
        ring = self.ring
        out = Matrix.zeros(ring, self.total_dim(n + 1), self.total_dim(n))
        ofs_src = self.offsets(n)
        ofs_dst = self.offsets(n + 1)
        for (p, q) in self.blocks(n):
            c0 = ofs_src[(p, q)]
            if (p + 1, q) in ofs_dst and (p, q) in self._dh_cell:
                h = self._dh_cell[(p, q)]
                r0 = ofs_dst[(p + 1, q)]
                for r in range(h.rows):
                    for c in range(h.cols):
                        if h.data[r][c] != ring.zero:
                            out.data[r0 + r][c0 + c] = h.data[r][c]
            if (p, q + 1) in ofs_dst and (p, q) in self._dv:
                v = self._dv[(p, q)]
                sign = ring.one if p % 2 == 0 else ring.neg(ring.one)
                r0 = ofs_dst[(p, q + 1)]
                for r in range(v.rows):
                    for c in range(v.cols):
                        if v.data[r][c] != ring.zero:
                            out.data[r0 + r][c0 + c] = ring.mul(sign, v.data[r][c])
        self._total_cache[n] = out
        return out

    def filtration_cols(self, n: int, p: int) -> list[int]:
        ofs = self.offsets(n)
        out = []
        for (pp, qq) in self.blocks(n):
            if pp >= p:
                start = ofs[(pp, qq)]
                out.extend(range(start, start + self.cells[(pp, qq)]["dim"]))
        return out

    def certified_band(self) -> int:
        return self.q_max - 1


def _preimage_cols(mat: Matrix, anns_tgt: list, ring) -> Matrix:
    cols = []
    n = len(anns_tgt)
    for i, d in enumerate(anns_tgt):
        if d:
            col = [ring.zero] * n
            col[i] = d
            cols.append(col)
    L = Matrix.from_columns(ring, cols, nrows=n)
    return preimage_basis(mat, L)


def _unit(ring, n, j):
    v = [ring.zero] * n
    v[j] = ring.one
    return v


def _offsets(summands: list[str], N: CatModule) -> list[int]:
    out = []
    tot = 0
    for c in summands:
        out.append(tot)
        tot += N.rank(c)
    return out


def _rebase(res: Resolution, W: CatModule, incl: dict[str, Matrix]) -> Resolution:
    out = Resolution(W)
    out.levels = res.levels
    out.gen_images = res.gen_images
    out.aug_images = []
    for i, obj in enumerate(res.levels[0].summands):
        out.aug_images.append(incl[obj].apply(res.aug_images[i]))
    return out


class ExtPage:
    def __init__(self, r: int, entries: dict, diffs: dict, stabilized: bool):
        self.r = r
        self.entries = entries
        self.diffs = diffs
        self.stabilized = stabilized

    def entry(self, p: int, q: int) -> FPModule:
        e = self.entries.get((p, q))
        return e[0] if e else None

    def witness(self, p: int, q: int) -> Subquotient:
        return self.entries[(p, q)][1]

    def to_json(self) -> dict:
        ents = []
        for (p, q) in sorted(self.entries):
            m = self.entries[(p, q)][0]
            ents.append({"p": p, "q": q, "free_rank": m.free_rank,
                         "torsion": list(m.torsion)})
        diffs = []
        for (p, q) in sorted(self.diffs):
            mat = self.diffs[(p, q)]
            if mat.rows == 0 or mat.cols == 0 or mat.is_zero():
                continue
            diffs.append({"from": [p, q], "to": [p + self.r, q - self.r + 1],
                          "matrix": [[mat.ring.entry_to_json(x) for x in row]
                                     for row in mat.data]})
        return {"r": self.r, "stabilized": self.stabilized,
                "entries": ents, "differentials": diffs}


def _cocycle_basis(fcx: ExtFilteredComplex, n: int, p: int, upper: int) -> Matrix:
    """{x in F^p T^n : delta x in F^upper + relations} as columns."""
    ring = fcx.ring
    cols = fcx.filtration_cols(n, p)
    if not cols:
        return Matrix.zeros(ring, fcx.total_dim(n), 0)
    D = fcx.total_delta(n)
    ofs = fcx.offsets(n + 1)
    low_rows = []
    low_anns = []
    anns_next = fcx.anns_of_degree(n + 1)
    for (pp, qq) in fcx.blocks(n + 1):
        if pp < upper:
            start = ofs[(pp, qq)]
            for k in range(fcx.cells[(pp, qq)]["dim"]):
                low_rows.append(start + k)
                low_anns.append(anns_next[start + k])
    sub = Matrix(
        ring,
        [[D.data[r][c] for c in cols] for r in low_rows],
        copy=False,
        cols=len(cols),
    )
    ann_cols = []
    for k, d in enumerate(low_anns):
        if d:
            col = [ring.zero] * len(low_rows)
            col[k] = d
            ann_cols.append(col)
    L = Matrix.from_columns(ring, ann_cols, nrows=len(low_rows))
    K = preimage_basis(sub, L)
    total = fcx.total_dim(n)
    out_cols = []
    for j in range(K.cols):
        v = [ring.zero] * total
        for k, c in enumerate(cols):
            v[c] = K.data[k][j]
        out_cols.append(v)
    return Matrix.from_columns(ring, out_cols, nrows=total)


def ext_spectral_pages(fcx: ExtFilteredComplex, r_max: int | None = None) -> list[ExtPage]:
    ring = fcx.ring
    r_stab = fcx.p_max + 1
    r_top = min(r_max, r_stab) if r_max is not None else r_stab
    grid = [(p, q) for p in range(fcx.p_max + 1) for q in range(fcx.q_max + 1)]
    cache: dict = {}

    def Z(r, p, q):
        n = p + q
        pc = max(min(p, fcx.p_max + 1), 0)
        upper = max(min(p + r, fcx.p_max + 1), 0)
        key = (pc, upper, n)
        if key not in cache:
            if n < 0 or fcx.total_dim(n) == 0 or pc > fcx.p_max:
                cache[key] = Matrix.zeros(ring, max(fcx.total_dim(n), 0), 0)
            else:
                cache[key] = _cocycle_basis(fcx, n, pc, upper)
        return cache[key]

    pages = []
    for r in range(r_top + 1):
        entries = {}
        diffs = {}
        for (p, q) in grid:
            n = p + q
            gens_Z = Z(r, p, q)
            b_cols = []
            if r >= 1:
                zb = Z(r - 1, p + 1, q - 1)
                b_cols.extend(zb.columns())
                zsrc = Z(r - 1, p - r + 1, q + r - 2)
                if zsrc.cols:
                    Dsrc = fcx.total_delta(p + q - 1)
                    for j in range(zsrc.cols):
                        b_cols.append(Dsrc.apply(zsrc.column(j)))
            else:
                zb = Z(0, p + 1, q - 1)
                b_cols.extend(zb.columns())
            anns_n = fcx.anns_of_degree(n)
            total = fcx.total_dim(n)
            for c in fcx.filtration_cols(n, p):
                if anns_n[c]:
                    v = [ring.zero] * total
                    v[c] = anns_n[c]
                    b_cols.append(v)
            gens_B = Matrix.from_columns(ring, b_cols, nrows=total)
            sq = Subquotient(ring, total, gens_Z, gens_B)
            entries[(p, q)] = (sq.module, sq)
        for (p, q) in grid:
            tp, tq = p + r, q - r + 1
            if (tp, tq) not in entries:
                continue
            src = entries[(p, q)][1]
            dst = entries[(tp, tq)][1]
            if src.module.n_gens == 0 or dst.module.n_gens == 0:
                continue
            D = fcx.total_delta(p + q)
            cols = []
            for j in range(src.module.n_gens):
                cols.append(dst.project(D.apply(src.lift(j))))
            diffs[(p, q)] = Matrix.from_columns(ring, cols, nrows=dst.module.n_gens)
        pages.append(ExtPage(r, entries, diffs, stabilized=(r >= r_stab)))
    return pages


def ext_total_cohomology(fcx: ExtFilteredComplex, n: int) -> Subquotient:
    d_out = fcx.total_delta(n)
    d_in = (
        fcx.total_delta(n - 1)
        if n >= 1
        else Matrix.zeros(fcx.ring, fcx.total_dim(0), 0)
    )
    return presented_homology(
        d_out, d_in, fcx.anns_of_degree(n), fcx.anns_of_degree(n + 1)
    )


class ExtReport:
    def __init__(self, band: int, degrees: list[dict], cells: list[dict],
                 e1_rows: list[dict]):
        self.band = band
        self.degrees = degrees
        self.cells = cells
        self.e1_rows = e1_rows

    @property
    def all_match(self) -> bool:
        return (
            all(d["match"] for d in self.degrees)
            and all(c["match"] for c in self.cells)
            and all(r["match"] for r in self.e1_rows)
        )

    def to_json(self) -> dict:
        return {"certified_band": self.band, "degrees": self.degrees,
                "cells": self.cells, "e1": self.e1_rows,
                "all_match": self.all_match}


def _chain_ext_direct(fcx: ExtFilteredComplex, chain: PChain, q_max: int) -> list[FPModule]:
    """Ext^q over R[aut(c_0)] of the chain data, via the one-object
    subcategory and the Ext oracle, independent of the page machinery."""
    from .e1data import ChainGroupData

    cat = fcx.cat
    ring = fcx.ring
    c0 = chain.reps[0]
    one_obj, _ = full_subcategory(cat, [c0])

    class _Shim:
        pass

    shim = _Shim()
    shim.cat = cat
    shim.ring = ring
    shim.M = fcx.M
    shim.N = fcx.N
    data = ChainGroupData(shim, chain)
    anns_A = {c0: data.A.anns}
    action_A = {a: data.A.act[idx] for idx, a in enumerate(data.elems0)}
    A_mod = CatModule(one_obj, CONTRA, ring, anns_A, action_A, check=False)
    anns_B = {c0: list(fcx.N.anns[c0])}
    action_B = {a: fcx.N.act(a) for a in data.elems0}
    B_mod = CatModule(one_obj, CONTRA, ring, anns_B, action_B, check=False)
    return ext(A_mod, B_mod, q_max)


def ext_pages(M: CatModule, N: CatModule, p_max: int | None = None,
              q_max: int = 4, r_max: int | None = None,
              n_max: int | None = None):
    """Cohomology pages with d_r of bidegree (+r, 1-r): convergence
    against the Ext oracle and the E_1 product-form cross-check."""
    fcx = ExtFilteredComplex(M, N, p_max=p_max, q_max=q_max)
    band = fcx.certified_band() if n_max is None else min(n_max, fcx.certified_band())
    pages = ext_spectral_pages(fcx, r_max)
    einf = pages[-1]
    oracle = ext(M, N, band)
    degrees = []
    hwits = {}
    for n in range(band + 1):
        h = ext_total_cohomology(fcx, n)
        hwits[n] = h
        degrees.append({"n": n, "oracle": oracle[n].pretty(),
                        "total": h.module.pretty(),
                        "match": oracle[n] == h.module})
    ring = fcx.ring
    cells = []
    for n in range(band + 1):
        h = hwits[n]
        h_anns = h.module.anns()
        nh = h.module.n_gens
        filt: dict[int, list] = {}
        for p in range(fcx.p_max + 2):
            gens = []
            if p <= fcx.p_max:
                zc = _cocycle_basis(fcx, n, p, fcx.p_max + 1)
                for j in range(zc.cols):
                    gens.append(h.project(zc.column(j)))
            for i, d in enumerate(h_anns):
                if d:
                    v = [ring.zero] * nh
                    v[i] = d
                    gens.append(v)
            filt[p] = gens
        for p in range(fcx.p_max + 1):
            q = n - p
            if q < 0 or q > fcx.q_max:
                continue
            gZ = Matrix.from_columns(ring, filt[p], nrows=nh)
            gB = Matrix.from_columns(ring, filt[p + 1], nrows=nh)
            graded = Subquotient(ring, nh, gZ, gB).module
            em = einf.entry(p, q)
            cells.append({"p": p, "q": q, "E_inf": em.pretty(),
                          "graded": graded.pretty(), "match": em == graded})
    e1 = pages[1] if len(pages) > 1 else pages[-1]
    e1_rows = []
    for p in sorted(fcx.chains):
        if p > fcx.p_max:
            continue
        for q in range(band + 1):
            total = FPModule(ring, 0)
            for chain in fcx.chains[p]:
                total = total.direct_sum(_chain_ext_direct(fcx, chain, q)[q])
            page_entry = e1.entry(p, q)
            e1_rows.append({"p": p, "q": q, "page": page_entry.pretty(),
                            "product_form": total.pretty(),
                            "match": page_entry == total})
    return pages, ExtReport(band, degrees, cells, e1_rows)
