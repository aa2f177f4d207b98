"""The chain-indexed spectral sequence engine.

The engine computes pages from an explicit filtered double complex: the
cellular bimodule complex of the two-sided tilde nerve is tensored with a
contravariant module M (honest coequalizer, with a union-find fast path
for unit moves) and with a free resolution Q of the covariant module N
(collapsed by co-Yoneda, so the vertical direction is indexed by the
resolution's free summands).

Sign convention: horizontal differential = alternating sum of nerve face
maps; vertical = (-1)^p times the resolution differential.  Degenerate
faces map to zero (normalized chains).

The chain-summand identifications (E^1 via group-ring Tor) and the d^1
component decomposition live in e1data.py; this module owns the filtered
complex, the pages, convergence against the Tor oracle, and the
two-column long exact sequence.
"""

from __future__ import annotations

from .catmod import CO, CONTRA, CatModule, VarianceMismatch
from .fincat import (
    FiniteCategory,
    NerveCell,
    UnionFind,
    chain_bound,
    enumerate_chains,
    face,
    nd_tilde_nerve,
)
from .fpmod import CanonicalQuotient, FPModule, Subquotient, presented_homology
from .intlin import StairBasis, preimage_basis
from .matrix import Matrix
from .resolve import Resolution, free_resolution, tor
from .rings import Ring


class NotTwoColumn(Exception):
    pass


class ComparisonFailed(Exception):
    pass


# -- the public nerve bimodule complex -----------------------------------


class NerveBimoduleComplex:
    """D_p(s,t) = free module on the non-degenerate tilde-nerve classes,
    for all object pairs, with the face-map differential."""

    def __init__(self, cat: FiniteCategory, p_max: int | None = None, ring: Ring | None = None):
        from .rings import ZZ

        chain_bound(cat)  # raises UnboundedChains when infinite
        self.cat = cat
        self.ring = ring if ring is not None else ZZ
        self.p_max = p_max if p_max is not None else chain_bound(cat)
        self.cells: dict[tuple[int, str, str], NerveCell] = {}
        for p in range(self.p_max + 1):
            for s in cat.objects:
                for t in cat.objects:
                    self.cells[(p, s, t)] = nd_tilde_nerve(cat, p, s, t)

    def rank(self, p: int, s: str, t: str) -> int:
        return self.cells[(p, s, t)].size()

    def face_matrix(self, p: int, i: int, s: str, t: str) -> Matrix:
        src = self.cells[(p, s, t)]
        tgt = self.cells[(p - 1, s, t)]
        m = Matrix.zeros(self.ring, tgt.size(), src.size())
        for col, diagram in enumerate(src.classes):
            fd = face(self.cat, diagram, i)
            if fd is not None:
                m.data[tgt.class_of(fd)][col] = self.ring.one
        return m

    def diff_matrix(self, p: int, s: str, t: str) -> Matrix:
        out = Matrix.zeros(self.ring, self.rank(p - 1, s, t), self.rank(p, s, t))
        sign = self.ring.one
        for i in range(p + 1):
            f = self.face_matrix(p, i, s, t)
            out = out + f.scale(sign)
            sign = self.ring.neg(sign)
        return out

    def validate(self) -> list[str]:
        out = []
        for p in range(2, self.p_max + 1):
            for s in self.cat.objects:
                for t in self.cat.objects:
                    d1 = self.diff_matrix(p, s, t)
                    d0 = self.diff_matrix(p - 1, s, t)
                    if not (d0 @ d1).is_zero():
                        out.append(f"d.d != 0 at p={p}, ({s},{t})")
        return out


def build_nerve_complex(cat: FiniteCategory, p_max: int | None = None) -> NerveBimoduleComplex:
    return NerveBimoduleComplex(cat, p_max)


# -- merged coequalizer quotients -----------------------------------------


class MergedQuotient:
    """Quotient of a free module by relations, with a union-find fast
    path for two-term unit relations (e_u = e_v)."""

    def __init__(self, ring: Ring, n_raw: int, sparse_rows: list[dict]):
        self.ring = ring
        self.n_raw = n_raw
        uf = UnionFind()
        for u in range(n_raw):
            uf.find(u)
        kept = []
        one = ring.one
        neg_one = ring.neg(one)
        for row in sparse_rows:
            if len(row) == 2:
                (u, cu), (v, cv) = sorted(row.items())
                if (cu, cv) in ((one, neg_one), (neg_one, one)):
                    uf.union(u, v)
                    continue
            if row:
                kept.append(row)
        reps = sorted({uf.find(u) for u in range(n_raw)})
        self._merged_index = {rep: i for i, rep in enumerate(reps)}
        self._rep_of_raw = [self._merged_index[uf.find(u)] for u in range(n_raw)]
        self._raw_rep = [None] * len(reps)
        for u in range(n_raw):
            m = self._rep_of_raw[u]
            if self._raw_rep[m] is None:
                self._raw_rep[m] = u
        merged_rows = []
        z = ring.zero
        for row in kept:
            out: dict = {}
            for u, c in row.items():
                m = self._rep_of_raw[u]
                v = ring.add(out.get(m, z), c)
                if v == z:
                    out.pop(m, None)
                else:
                    out[m] = v
            if out:
                merged_rows.append(out)
        self.quot = CanonicalQuotient(ring, len(reps), merged_rows)
        self.module = self.quot.module

    def project_raw(self, sparse: dict) -> list:
        ring = self.ring
        z = ring.zero
        merged = [z] * len(self._merged_index)
        for u, c in sparse.items():
            m = self._rep_of_raw[u]
            merged[m] = ring.add(merged[m], c)
        return self.quot.project(merged)

    def lift(self, j: int) -> dict:
        """A sparse raw-coordinate representative of canonical generator j."""
        merged = self.quot.lift(j)
        z = self.ring.zero
        return {
            self._raw_rep[m]: c for m, c in enumerate(merged) if c != z
        }


# -- the filtered double complex -------------------------------------------


class Cell:
    """One (p, q) entry: raw generators (summand, object, nerve class,
    M-generator) with the coequalizer quotient."""

    def __init__(self, raw_gens: list[tuple], quot: MergedQuotient,
                 chain_keys: list[tuple], rows: list[dict]):
        self.raw_gens = raw_gens
        self.raw_index = {g: i for i, g in enumerate(raw_gens)}
        self.quot = quot
        self.module = quot.module
        self.chain_keys = chain_keys  # per raw gen: iso-class tuple of its diagram
        self.rows = rows  # coequalizer relations, sparse over raw generators

    @property
    def dim(self) -> int:
        return self.module.n_gens


class FilteredComplex:
    """A_{p,q} = M (x)_C D_p (x)_C Q_q with both differentials recorded."""

    def __init__(self, M: CatModule, N: CatModule, p_max: int | None = None,
                 q_max: int = 4, resolution_strategy: str = "greedy",
                 Q: Resolution | None = None, jobs: int = 1):
        if M.variance != CONTRA:
            raise VarianceMismatch("M must be contravariant")
        if N.variance != CO:
            raise VarianceMismatch("N must be covariant")
        if M.cat is not N.cat and M.cat.objects != N.cat.objects:
            raise VarianceMismatch("M and N live over different categories")
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
        self.Q: Resolution = (
            Q if Q is not None else free_resolution(N, q_max, strategy=resolution_strategy)
        )
        self.cells: dict[tuple[int, int], Cell] = {}
        self._face_mats: dict[tuple[int, int, int], Matrix] = {}
        self._vert_mats: dict[tuple[int, int], Matrix] = {}
        self._horiz_cache: dict[tuple[int, int], Matrix] = {}
        self._total_cache: dict[int, Matrix] = {}
        from .parallel import pmap

        first_slots = sorted({
            b for q in range(q_max + 1) for b in self.Q.levels[q].summands
        })
        needed = [
            (p, b, d)
            for p in range(self.p_max + 1)
            for b in first_slots
            for d in self.cat.objects
        ]
        results = pmap(lambda key: nd_tilde_nerve(self.cat, *key), needed, jobs)
        self._nerve: dict[tuple[int, str, str], NerveCell] = dict(zip(needed, results))
        grid = [(p, q) for q in range(q_max + 1) for p in range(self.p_max + 1)]
        for key, cell in zip(grid, pmap(lambda pq: self._build_cell(*pq), grid, jobs)):
            self.cells[key] = cell
        face_keys = [
            (p, q, i)
            for q in range(q_max + 1)
            for p in range(1, self.p_max + 1)
            for i in range(p + 1)
        ]
        for key, mat in zip(face_keys, pmap(lambda k: self._face_matrix(*k), face_keys, jobs)):
            self._face_mats[key] = mat
        vert_keys = [
            (p, q) for q in range(1, q_max + 1) for p in range(self.p_max + 1)
        ]
        for key, mat in zip(vert_keys, pmap(lambda k: self._vert_matrix(*k), vert_keys, jobs)):
            self._vert_mats[key] = mat

    # -- construction -----------------------------------------------------

    def nerve(self, p: int, s: str, t: str) -> NerveCell:
        key = (p, s, t)
        if key not in self._nerve:
            self._nerve[key] = nd_tilde_nerve(self.cat, p, s, t)
        return self._nerve[key]

    def _build_cell(self, p: int, q: int) -> Cell:
        cat = self.cat
        ring = self.ring
        M = self.M
        data = cat.iso_classes()
        raw_gens: list[tuple] = []
        chain_keys: list[tuple] = []
        summands = self.Q.levels[q].summands
        for i, b in enumerate(summands):
            for d in cat.objects:
                if M.rank(d) == 0:
                    continue
                cell = self.nerve(p, b, d)
                for cls in range(cell.size()):
                    key = cell.chain_key(cls)
                    for j in range(M.rank(d)):
                        raw_gens.append((i, d, cls, j))
                        chain_keys.append(key)
        index = {g: k for k, g in enumerate(raw_gens)}
        rows: list[dict] = []
        z = ring.zero
        for k, (i, d, cls, j) in enumerate(raw_gens):
            ann = M.anns[d][j]
            if ann:
                rows.append({k: ann})
        for i, b in enumerate(summands):
            for f, (d, dprime) in cat.morphisms.items():
                if f == cat.id_of(d) and d == dprime:
                    continue
                if M.rank(dprime) == 0 and M.rank(d) == 0:
                    continue
                Mf = M.act(f)  # M(d') -> M(d)
                cell_d = self.nerve(p, b, d)
                cell_dp = self.nerve(p, b, dprime)
                for cls in range(cell_d.size()):
                    alpha, phis, beta = cell_d.classes[cls]
                    pushed = (alpha, phis, cat.compose(f, beta))
                    cls2 = cell_dp.class_of(pushed)
                    for j in range(M.rank(dprime)):
                        row: dict = {}
                        for a in range(M.rank(d)):
                            c = Mf.data[a][j]
                            if c != z:
                                key = index[(i, d, cls, a)]
                                row[key] = ring.add(row.get(key, z), c)
                        key2 = index[(i, dprime, cls2, j)]
                        row[key2] = ring.sub(row.get(key2, z), ring.one)
                        if row:
                            rows.append(row)
        quot = MergedQuotient(ring, len(raw_gens), rows)
        return Cell(raw_gens, quot, chain_keys, rows)

    def _cell_map(self, src: Cell, dst: Cell, raw_fn) -> Matrix:
        ring = self.ring
        z = ring.zero
        cols = []
        for jgen in range(src.dim):
            sparse = src.quot.lift(jgen)
            out: dict = {}
            for u, c in sparse.items():
                for v_tuple, c2 in raw_fn(src.raw_gens[u]):
                    v = dst.raw_index[v_tuple]
                    val = ring.add(out.get(v, z), ring.mul(c, c2))
                    if val == z:
                        out.pop(v, None)
                    else:
                        out[v] = val
            cols.append(dst.quot.project_raw(out))
        return Matrix.from_columns(ring, cols, nrows=dst.dim)

    def _face_matrix(self, p: int, q: int, i: int) -> Matrix:
        cat = self.cat
        summands = self.Q.levels[q].summands

        def raw_fn(gen):
            si, d, cls, j = gen
            b = summands[si]
            diagram = self.nerve(p, b, d).classes[cls]
            fd = face(cat, diagram, i)
            if fd is None:
                return []
            cls2 = self.nerve(p - 1, b, d).class_of(fd)
            return [((si, d, cls2, j), self.ring.one)]

        return self._cell_map(self.cells[(p, q)], self.cells[(p - 1, q)], raw_fn)

    def _vert_matrix(self, p: int, q: int) -> Matrix:
        cat = self.cat
        ring = self.ring
        summands = self.Q.levels[q].summands
        prev = self.Q.levels[q - 1]

        def raw_fn(gen):
            si, d, cls, j = gen
            b = summands[si]
            alpha, phis, beta = self.nerve(p, b, d).classes[cls]
            out = []
            for (i2, psi), coeff in self.Q.gen_images[q][si].items():
                # psi: b_{i2} -> b (covariant basis); precompose the alpha leg
                pulled = (cat.compose(alpha, psi), phis, beta)
                b2 = prev.summands[i2]
                cls2 = self.nerve(p, b2, d).class_of(pulled)
                out.append(((i2, d, cls2, j), coeff))
            return out

        return self._cell_map(self.cells[(p, q)], self.cells[(p, q - 1)], raw_fn)

    # -- the total complex --------------------------------------------------

    def horizontal(self, p: int, q: int) -> Matrix:
        if (p, q) not in self._horiz_cache:
            out = Matrix.zeros(self.ring, self.cells[(p - 1, q)].dim, self.cells[(p, q)].dim)
            sign = self.ring.one
            for i in range(p + 1):
                out = out + self._face_mats[(p, q, i)].scale(sign)
                sign = self.ring.neg(sign)
            self._horiz_cache[(p, q)] = out
        return self._horiz_cache[(p, q)]

    def vertical(self, p: int, q: int) -> Matrix:
        return self._vert_mats[(p, q)]

    def blocks(self, n: int) -> list[tuple[int, int]]:
        return [
            (p, n - p)
            for p in range(min(self.p_max, n) + 1)
            if 0 <= n - p <= self.q_max
        ]

    def total_dim(self, n: int) -> int:
        return sum(self.cells[blk].dim for blk in self.blocks(n))

    def offsets(self, n: int) -> dict[tuple[int, int], int]:
        out = {}
        total = 0
        for blk in self.blocks(n):
            out[blk] = total
            total += self.cells[blk].dim
        return out

    def anns_of_degree(self, n: int) -> list:
        out = []
        for blk in self.blocks(n):
            out.extend(self.cells[blk].module.anns())
        return out

    def total_diff(self, n: int) -> Matrix:
        """D_n: T_n -> T_{n-1}, horizontal + (-1)^p vertical."""
        if n in self._total_cache:
            return self._total_cache[n]
        ring = self.ring
        rows = self.total_dim(n - 1)
        cols = self.total_dim(n)
        out = Matrix.zeros(ring, rows, cols)
        ofs_src = self.offsets(n)
        ofs_dst = self.offsets(n - 1)
        for (p, q) in self.blocks(n):
            c0 = ofs_src[(p, q)]
            if p >= 1 and (p - 1, q) in ofs_dst:
                h = self.horizontal(p, q)
                r0 = ofs_dst[(p - 1, q)]
                for r in range(h.rows):
                    row = out.data[r0 + r]
                    hrow = h.data[r]
                    for c in range(h.cols):
                        if hrow[c] != ring.zero:
                            row[c0 + c] = hrow[c]
            if q >= 1 and (p, q - 1) in ofs_dst:
                v = self.vertical(p, q)
                sign = ring.one if p % 2 == 0 else ring.neg(ring.one)
                r0 = ofs_dst[(p, q - 1)]
                for r in range(v.rows):
                    row = out.data[r0 + r]
                    vrow = v.data[r]
                    for c in range(v.cols):
                        if vrow[c] != ring.zero:
                            row[c0 + c] = ring.mul(sign, vrow[c])
        self._total_cache[n] = out
        return out

    def filtration_cols(self, n: int, p: int) -> list[int]:
        """Coordinate indices of F_p T_n (blocks with p' <= p)."""
        ofs = self.offsets(n)
        out = []
        for (pp, qq) in self.blocks(n):
            if pp <= p:
                start = ofs[(pp, qq)]
                out.extend(range(start, start + self.cells[(pp, qq)].dim))
        return out

    def certified_band(self) -> int:
        """Total degrees for which pages and homology are trusted."""
        return self.q_max - 1


def build_filtered_complex(M: CatModule, N: CatModule, p_max: int | None = None,
                           q_max: int = 4, resolution_strategy: str = "greedy",
                           Q: Resolution | None = None, jobs: int = 1) -> FilteredComplex:
    return FilteredComplex(M, N, p_max, q_max, resolution_strategy, Q=Q, jobs=jobs)


# -- pages -----------------------------------------------------------------


class PageEntry:
    def __init__(self, module: FPModule, witnesses: Subquotient | None):
        self.module = module
        self.witnesses = witnesses


class Page:
    def __init__(self, r: int, entries: dict[tuple[int, int], PageEntry],
                 diffs: dict[tuple[int, int], Matrix], stabilized: bool):
        self.r = r
        self.entries = entries
        self.diffs = diffs  # d^r starting at (p,q), target (p-r, q+r-1)
        self.stabilized = stabilized

    def entry(self, p: int, q: int) -> FPModule:
        e = self.entries.get((p, q))
        return e.module if e else None

    def to_json(self) -> dict:
        ents = []
        for (p, q) in sorted(self.entries):
            m = self.entries[(p, q)].module
            ents.append({
                "p": p, "q": q,
                "free_rank": m.free_rank,
                "torsion": list(m.torsion),
            })
        diffs = []
        for (p, q) in sorted(self.diffs):
            mat = self.diffs[(p, q)]
            if mat.rows == 0 or mat.cols == 0 or mat.is_zero():
                continue
            diffs.append({
                "from": [p, q],
                "to": [p - self.r, q + self.r - 1],
                "matrix": [[mat.ring.entry_to_json(x) for x in row] for row in mat.data],
            })
        return {"r": self.r, "stabilized": self.stabilized,
                "entries": ents, "differentials": diffs}


def _cycle_basis(fc: FilteredComplex, n: int, p: int, lower: int) -> Matrix:
    """{x in F_p T_n : D x in F_lower + relations}, as matrix columns."""
    ring = fc.ring
    cols = fc.filtration_cols(n, p)
    if not cols:
        return Matrix.zeros(ring, fc.total_dim(n), 0)
    D = fc.total_diff(n)
    # rows of blocks with p' > lower in degree n-1
    ofs = fc.offsets(n - 1)
    upper_rows = []
    upper_anns = []
    anns_prev = fc.anns_of_degree(n - 1)
    for (pp, qq) in fc.blocks(n - 1):
        if pp > lower:
            start = ofs[(pp, qq)]
            for k in range(fc.cells[(pp, qq)].dim):
                upper_rows.append(start + k)
                upper_anns.append(anns_prev[start + k])
    sub = Matrix(
        ring,
        [[D.data[r_][c] for c in cols] for r_ in upper_rows],
        copy=False,
        cols=len(cols),
    )
    ann_cols = []
    for k, d in enumerate(upper_anns):
        if d:
            col = [ring.zero] * len(upper_rows)
            col[k] = d
            ann_cols.append(col)
    L = Matrix.from_columns(ring, ann_cols, nrows=len(upper_rows))
    K = preimage_basis(sub, L)
    # embed back into T_n coordinates
    total = fc.total_dim(n)
    out_cols = []
    for j in range(K.cols):
        v = [ring.zero] * total
        for k, c in enumerate(cols):
            v[c] = K.data[k][j]
        out_cols.append(v)
    return Matrix.from_columns(ring, out_cols, nrows=total)


def _ann_gen_cols(fc: FilteredComplex, n: int, p: int) -> list[list]:
    ring = fc.ring
    anns = fc.anns_of_degree(n)
    total = fc.total_dim(n)
    cols = []
    for c in fc.filtration_cols(n, p):
        if anns[c]:
            v = [ring.zero] * total
            v[c] = anns[c]
            cols.append(v)
    return cols


def spectral_pages(fc: FilteredComplex, r_max: int | None = None) -> list[Page]:
    """E^0 .. E^{r_max}; pages stabilize once r exceeds the column range."""
    ring = fc.ring
    r_stab = fc.p_max + 1
    if r_max is None:
        r_max = r_stab
    r_top = min(r_max, r_stab)
    grid = [(p, q) for p in range(fc.p_max + 1) for q in range(fc.q_max + 1)]
    cycles: dict[tuple[int, int, int], Matrix] = {}

    def Z(r, p, q):
        # the group {x in F_p T_{p+q} : D x in F_{p-r}}; the filtration
        # clamps at the ends, so only p < 0 or an empty degree vanish
        n = p + q
        pc = min(p, fc.p_max)
        lower = min(max(p - r, -1), fc.p_max)
        key = (pc, lower, n)
        if key not in cycles:
            if p < 0 or n < 0 or fc.total_dim(n) == 0:
                cycles[key] = Matrix.zeros(ring, max(fc.total_dim(n), 0), 0)
            else:
                cycles[key] = _cycle_basis(fc, n, pc, lower)
        return cycles[key]

    pages = []
    for r in range(r_top + 1):
        entries = {}
        diffs = {}
        for (p, q) in grid:
            n = p + q
            gens_Z = Z(r, p, q)
            b_cols = []
            if r >= 1:
                zb = Z(r - 1, p - 1, q + 1)
                b_cols.extend(zb.columns())
                zsrc = Z(r - 1, p + r - 1, q - r + 2)
                if zsrc.cols:
                    Dsrc = fc.total_diff(p + q + 1)
                    for j in range(zsrc.cols):
                        b_cols.append(Dsrc.apply(zsrc.column(j)))
            else:
                # E^0: quotient by the lower filtration step
                zb = Z(0, p - 1, q + 1) if p >= 1 else Matrix.zeros(ring, fc.total_dim(n), 0)
                b_cols.extend(zb.columns())
            b_cols.extend(_ann_gen_cols(fc, n, p))
            gens_B = Matrix.from_columns(ring, b_cols, nrows=fc.total_dim(n))
            sq = Subquotient(ring, fc.total_dim(n), gens_Z, gens_B)
            entries[(p, q)] = PageEntry(sq.module, sq)
        for (p, q) in grid:
            src = entries[(p, q)].witnesses
            tp, tq = p - r, q + r - 1
            if (tp, tq) not in entries or src.module.n_gens == 0:
                continue
            dst = entries[(tp, tq)].witnesses
            if dst.module.n_gens == 0:
                continue
            D = fc.total_diff(p + q)
            cols = []
            for j in range(src.module.n_gens):
                x = src.lift(j)
                cols.append(dst.project(D.apply(x)))
            diffs[(p, q)] = Matrix.from_columns(ring, cols, nrows=dst.module.n_gens)
        pages.append(Page(r, entries, diffs, stabilized=(r >= r_stab)))
    return pages


# -- convergence -------------------------------------------------------------


class ConvergenceReport:
    def __init__(self, band: int, degrees: list[dict], cells: list[dict]):
        self.band = band
        self.degrees = degrees
        self.cells = cells

    @property
    def all_match(self) -> bool:
        return all(d["match"] for d in self.degrees) and all(
            c["match"] for c in self.cells
        )

    def first_mismatch(self):
        for c in self.cells:
            if not c["match"]:
                return (c["p"], c["q"])
        return None

    def to_json(self) -> dict:
        return {
            "certified_band": self.band,
            "degrees": self.degrees,
            "cells": self.cells,
            "all_match": self.all_match,
        }


def total_homology(fc: FilteredComplex, m: int) -> Subquotient:
    d_out = fc.total_diff(m) if m >= 1 else Matrix.zeros(fc.ring, 0, fc.total_dim(0))
    d_in = fc.total_diff(m + 1)
    return presented_homology(
        d_out, d_in, fc.anns_of_degree(m), fc.anns_of_degree(m - 1) if m >= 1 else []
    )


def converge_and_compare(M: CatModule, N: CatModule, n_max: int = 3,
                         q_max: int | None = None, p_max: int | None = None,
                         fc: FilteredComplex | None = None,
                         oracle: list[FPModule] | None = None,
                         Q: Resolution | None = None, jobs: int = 1,
                         strict: bool = False) -> ConvergenceReport:
    """Assemble E^inf, compare graded pieces of the filtration on the
    total homology, and compare the total homology with the Tor oracle.

    With strict=True the first mismatching cell raises ComparisonFailed
    instead of being reported."""
    if q_max is None:
        q_max = n_max + 1
    if fc is None:
        fc = build_filtered_complex(M, N, p_max=p_max, q_max=q_max, Q=Q, jobs=jobs)
    band = min(fc.certified_band(), n_max)
    pages = spectral_pages(fc)
    einf = pages[-1]
    if oracle is None:
        oracle = tor(M, N, band)
    degrees = []
    hwits = {}
    for m in range(band + 1):
        h = total_homology(fc, m)
        hwits[m] = h
        degrees.append({
            "m": m,
            "oracle": oracle[m].pretty(),
            "total": h.module.pretty(),
            "match": oracle[m] == h.module,
        })
    cells = []
    ring = fc.ring
    for m in range(band + 1):
        h = hwits[m]
        h_anns = h.module.anns()
        n_h = h.module.n_gens
        # images of the filtration steps inside H_m
        filt_gens: dict[int, list[list]] = {}
        for p in range(-1, fc.p_max + 1):
            gens = []
            if p >= 0:
                zcap = _cycle_basis(fc, m, min(p, fc.p_max), -1)  # D x in relations
                for j in range(zcap.cols):
                    gens.append(h.project(zcap.column(j)))
            for i, d in enumerate(h_anns):
                if d:
                    v = [ring.zero] * n_h
                    v[i] = d
                    gens.append(v)
            filt_gens[p] = gens
        for p in range(fc.p_max + 1):
            q = m - p
            if q < 0 or q > fc.q_max:
                continue
            gZ = Matrix.from_columns(ring, filt_gens[p], nrows=n_h)
            gB = Matrix.from_columns(ring, filt_gens[p - 1], nrows=n_h)
            graded = Subquotient(ring, n_h, gZ, gB).module
            em = einf.entry(p, q)
            cells.append({
                "p": p, "q": q,
                "E_inf": em.pretty(),
                "graded": graded.pretty(),
                "match": em == graded,
            })
    report = ConvergenceReport(band, degrees, cells)
    if strict and not report.all_match:
        where = report.first_mismatch()
        raise ComparisonFailed(
            f"E_inf and the oracle filtration disagree first at {where}"
            if where else "total homology disagrees with the oracle"
        )
    return report


# -- two-column long exact sequence ------------------------------------------


class LESReport:
    def __init__(self, nodes: list[dict]):
        self.nodes = nodes

    @property
    def all_exact(self) -> bool:
        return all(n["exact"] for n in self.nodes)

    def to_json(self) -> dict:
        return {"nodes": self.nodes, "all_exact": self.all_exact}


def _image_lattice(mat: Matrix, anns_target: list) -> StairBasis:
    ring = mat.ring
    out = StairBasis(ring, len(anns_target))
    for j in range(mat.cols):
        out.add(mat.column(j))
    for i, d in enumerate(anns_target):
        if d:
            row = [ring.zero] * len(anns_target)
            row[i] = d
            out.add(row)
    return out


def _kernel_lattice(mat: Matrix, anns_src: list, anns_target: list) -> StairBasis:
    ring = mat.ring
    cols = []
    for i, d in enumerate(anns_target):
        if d:
            col = [ring.zero] * len(anns_target)
            col[i] = d
            cols.append(col)
    L = Matrix.from_columns(ring, cols, nrows=len(anns_target))
    K = preimage_basis(mat, L)
    out = StairBasis(ring, len(anns_src))
    for j in range(K.cols):
        out.add(K.column(j))
    for i, d in enumerate(anns_src):
        if d:
            row = [ring.zero] * len(anns_src)
            row[i] = d
            out.add(row)
    return out


def _lattices_equal(a: StairBasis, b: StairBasis) -> bool:
    return all(b.contains(row) for row in a.basis_rows()) and all(
        a.contains(row) for row in b.basis_rows()
    )


def two_column_les(M: CatModule, N: CatModule, n_max: int = 3,
                   fc: FilteredComplex | None = None) -> LESReport:
    """The long exact sequence ... -> E1_{1,q} -> E1_{0,q} -> Tor_q ->
    E1_{1,q-1} -> ... when there are no p-chains beyond p = 1; exactness
    is verified at every node up to total degree n_max."""
    if fc is None:
        fc = build_filtered_complex(M, N, q_max=n_max + 1)
    if fc.p_bound > 1:
        raise NotTwoColumn(
            f"chains of length {fc.p_bound} exist; the E^1 page has more than two columns"
        )
    ring = fc.ring
    band = min(fc.certified_band(), n_max)
    pages = spectral_pages(fc, r_max=1)
    e1 = pages[1]

    zero_entry = PageEntry(
        FPModule(ring, 0),
        Subquotient(ring, 0, Matrix.zeros(ring, 0, 0), Matrix.zeros(ring, 0, 0)),
    )

    def col_entry(p, q):
        if q < 0:
            return None
        return e1.entries.get((p, q), zero_entry)

    hwits = {m: total_homology(fc, m) for m in range(band + 1)}

    # maps: iota_q: E1_{0,q} -> Tor_q; pi_q: Tor_q -> E1_{1,q-1}; d1
    maps = {}
    for q in range(band + 1):
        e0 = col_entry(0, q)
        h = hwits[q]
        cols = []
        for j in range(e0.module.n_gens):
            cols.append(h.project(e0.witnesses.lift(j)))
        maps[("iota", q)] = Matrix.from_columns(ring, cols, nrows=h.module.n_gens)
        if q >= 1:
            if (1, q - 1) in e1.entries:
                wit = e1.entries[(1, q - 1)].witnesses
                cols = [wit.project(h.lift(j)) for j in range(h.module.n_gens)]
                maps[("proj", q)] = Matrix.from_columns(
                    ring, cols, nrows=wit.module.n_gens
                )
            else:
                maps[("proj", q)] = Matrix.zeros(ring, 0, h.module.n_gens)
        d1 = e1.diffs.get((1, q))
        if d1 is None:
            d1 = Matrix.zeros(
                ring, col_entry(0, q).module.n_gens, col_entry(1, q).module.n_gens
            )
        maps[("d1", q)] = d1

    nodes = []
    for q in range(band + 1):
        # exactness at E1_{0,q}: im(d1_{1,q}) = ker(iota_q)
        e0 = col_entry(0, q)
        im = _image_lattice(maps[("d1", q)], e0.module.anns())
        ker = _kernel_lattice(maps[("iota", q)], e0.module.anns(), hwits[q].module.anns())
        nodes.append({
            "node": f"E1_0,{q}", "exact": _lattices_equal(im, ker),
        })
        # exactness at Tor_q: im(iota_q) = ker(proj_q or everything)
        h_anns = hwits[q].module.anns()
        im2 = _image_lattice(maps[("iota", q)], h_anns)
        if ("proj", q) in maps:
            ker2 = _kernel_lattice(maps[("proj", q)], h_anns,
                                   col_entry(1, q - 1).module.anns())
        else:
            ker2 = _image_lattice(Matrix.identity(ring, len(h_anns)), h_anns)
        nodes.append({"node": f"Tor_{q}", "exact": _lattices_equal(im2, ker2)})
        # exactness at E1_{1,q-1}: im(proj_q) = ker(d1_{1,q-1})
        if q >= 1:
            e1q = col_entry(1, q - 1)
            im3 = _image_lattice(maps[("proj", q)], e1q.module.anns())
            ker3 = _kernel_lattice(maps[("d1", q - 1)], e1q.module.anns(),
                                   col_entry(0, q - 1).module.anns())
            nodes.append({
                "node": f"E1_1,{q-1}", "exact": _lattices_equal(im3, ker3),
            })
    return LESReport(nodes)
