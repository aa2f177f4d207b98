"""The chain-summand identifications of the first page.

For a left-free base, the E^1 entry at (p, q) splits as a direct sum over
p-chains, and each summand is a group-ring Tor over the automorphism
group of the chain's bottom object, with coefficients twisted through the
chain's biset.  This module computes both sides:

* per-chain column homology inside the engine's filtered complex
  (the presentation the pages see), and
* the group-level Tor via the truncated bar complex (independent route),

plus the d^1 component maps.  Components for i >= 1 are biset
concatenations transported through the explicit chain/biset bijection of
the nerve; the i = 0 component is the change-of-groups composite, which
on the free resolution summands evaluates to pushing the bottom leg
through the module structure (the partial assembly at module level).
"""

from __future__ import annotations

from .catmod import CatModule
from .fincat import BalancedTriples, ChainBiset, PChain, face
from .fpmod import CanonicalQuotient, FPModule, Subquotient, presented_homology
from .groupbar import GroupModule, group_tor
from .groups import group_from_aut
from .matrix import Matrix
from .spectral import FilteredComplex, MergedQuotient, build_filtered_complex, spectral_pages


class NotLeftFree(Exception):
    pass


def chain_key_of(fc: FilteredComplex, chain: PChain) -> tuple[int, ...]:
    data = fc.cat.iso_classes()
    return tuple(data.class_of[r] for r in chain.reps)


class ChainColumn:
    """The chain's sub-presentation of the cells at fixed p, with the
    vertical differential and its homology."""

    def __init__(self, fc: FilteredComplex, p: int, chain: PChain):
        self.fc = fc
        self.p = p
        self.chain = chain
        self.key = chain_key_of(fc, chain)
        ring = fc.ring
        self.local_gens: list[list[tuple]] = []
        self.local_index: list[dict] = []
        self.quots: list[MergedQuotient] = []
        for q in range(fc.q_max + 1):
            cell = fc.cells[(p, q)]
            gens = [g for g, k in zip(cell.raw_gens, cell.chain_keys) if k == self.key]
            index = {g: i for i, g in enumerate(gens)}
            keep = set(index)
            rows = []
            for row in cell.rows:
                touched = [cell.raw_gens[u] for u in row]
                if any(t in keep for t in touched):
                    if not all(t in keep for t in touched):
                        raise AssertionError("coequalizer relation straddles chains")
                    rows.append({index[cell.raw_gens[u]]: c for u, c in row.items()})
            self.local_gens.append(gens)
            self.local_index.append(index)
            self.quots.append(MergedQuotient(ring, len(gens), rows))
        self.vert: list[Matrix] = [None]  # vert[q]: column_q -> column_{q-1}
        for q in range(1, fc.q_max + 1):
            self.vert.append(self._local_map(q, q - 1, self._vert_fn(q)))

    def _vert_fn(self, q):
        fc = self.fc
        cat = fc.cat
        summands = fc.Q.levels[q].summands
        prev = fc.Q.levels[q - 1]

        def raw_fn(gen):
            si, d, cls, j = gen
            b = summands[si]
            alpha, phis, beta = fc.nerve(self.p, b, d).classes[cls]
            out = []
            for (i2, psi), coeff in fc.Q.gen_images[q][si].items():
                pulled = (cat.compose(alpha, psi), phis, beta)
                b2 = prev.summands[i2]
                cls2 = fc.nerve(self.p, b2, d).class_of(pulled)
                out.append(((i2, d, cls2, j), coeff))
            return out

        return raw_fn

    def _local_map(self, q_src: int, q_dst: int, raw_fn) -> Matrix:
        ring = self.fc.ring
        src_q = self.quots[q_src]
        dst_q = self.quots[q_dst]
        dst_index = self.local_index[q_dst]
        cols = []
        z = ring.zero
        for j in range(src_q.module.n_gens):
            sparse = src_q.lift(j)
            out: dict = {}
            for u, c in sparse.items():
                for v_tuple, c2 in raw_fn(self.local_gens[q_src][u]):
                    v = dst_index[v_tuple]
                    val = ring.add(out.get(v, z), ring.mul(c, c2))
                    if val == z:
                        out.pop(v, None)
                    else:
                        out[v] = val
            cols.append(dst_q.project_raw(out))
        return Matrix.from_columns(ring, cols, nrows=dst_q.module.n_gens)

    def homology(self, q: int) -> Subquotient:
        ring = self.fc.ring
        d_out = (
            self.vert[q]
            if q >= 1
            else Matrix.zeros(ring, 0, self.quots[0].module.n_gens)
        )
        d_in = (
            self.vert[q + 1]
            if q + 1 <= self.fc.q_max
            else Matrix.zeros(ring, self.quots[q].module.n_gens, 0)
        )
        anns_next = self.quots[q - 1].module.anns() if q >= 1 else []
        return presented_homology(d_out, d_in, self.quots[q].module.anns(), anns_next)


# -- the independent group-level side ------------------------------------


class ChainGroupData:
    """A(chain) = M(c_p) balanced with RS(chain) as a right module over
    aut(c_0), together with N(c_0) as a left module."""

    def __init__(self, fc: FilteredComplex, chain: PChain,
                 biset: ChainBiset | None = None):
        cat = fc.cat
        ring = fc.ring
        M, N = fc.M, fc.N
        self.chain = chain
        c0 = chain.reps[0]
        cp = chain.reps[-1]
        self.G0, self.elems0 = group_from_aut(cat, c0)
        p = chain.p
        if p == 0:
            n = M.rank(c0)
            quot = CanonicalQuotient(ring, n, [
                _unit_row(ring, n, i, d) for i, d in enumerate(M.anns[c0]) if d
            ])
            act = []
            for a in self.elems0:
                mat = M.act(a)  # right action x.a = M(a)(x)
                act.append(_transport(quot, mat, ring))
            self.A = GroupModule(ring, self.G0, quot.module.anns(), act, "right")
            self.biset = None
        else:
            self.biset = biset if biset is not None else ChainBiset(cat, chain)
            S = self.biset
            gens = [(j, k) for j in range(M.rank(cp)) for k in range(S.size())]
            index = {g: i for i, g in enumerate(gens)}
            rows = []
            z = ring.zero
            for (j, k) in gens:
                d = M.anns[cp][j]
                if d:
                    rows.append(_unit_row(ring, len(gens), index[(j, k)], d))
            for a in cat.aut(cp):
                if a == cat.id_of(cp):
                    continue
                Ma = M.act(a)
                for (j, k) in gens:
                    # (x.a) (x) s - x (x) (a.s)
                    row: dict = {}
                    for i in range(M.rank(cp)):
                        c = Ma.data[i][j]
                        if c != z:
                            u = index[(i, k)]
                            row[u] = ring.add(row.get(u, z), c)
                    v = index[(j, S.left_act(a, k))]
                    row[v] = ring.sub(row.get(v, z), ring.one)
                    if row:
                        rows.append(row)
            quot = CanonicalQuotient(ring, len(gens), rows)
            act = []
            for a in self.elems0:
                cols = []
                for t in range(quot.module.n_gens):
                    vec = quot.lift(t)
                    out = [z] * len(gens)
                    for i, (j, k) in enumerate(gens):
                        c = vec[i]
                        if c != z:
                            u = index[(j, S.right_act(k, a))]
                            out[u] = ring.add(out[u], c)
                    cols.append(quot.project(out))
                act.append(Matrix.from_columns(ring, cols, nrows=quot.module.n_gens))
            self.A = GroupModule(ring, self.G0, quot.module.anns(), act, "right")
        # N(c_0) as left module
        bact = [N.act(a) for a in self.elems0]
        self.B = GroupModule(ring, self.G0, list(N.anns[c0]), bact, "left")

    def tor(self, q_max: int) -> list[Subquotient]:
        return group_tor(self.A, self.B, q_max)


def _unit_row(ring, n, i, d):
    row = [ring.zero] * n
    row[i] = d
    return row


def _transport(quot: CanonicalQuotient, raw_mat: Matrix, ring) -> Matrix:
    cols = []
    for j in range(quot.module.n_gens):
        cols.append(quot.project(raw_mat.apply(quot.lift(j))))
    return Matrix.from_columns(ring, cols, nrows=quot.module.n_gens)


def e1_direct(M: CatModule, N: CatModule, q_max: int = 3,
              fc: FilteredComplex | None = None) -> dict:
    """Per p-chain, Tor_q over the bottom automorphism group of the
    balanced coefficient module, via the truncated bar complex."""
    if not M.cat.is_left_free():
        raise NotLeftFree("the E^1 identification requires a left-free base")
    if fc is None:
        fc = build_filtered_complex(M, N, q_max=q_max + 1)
    out = {}
    for p in sorted(fc.chains):
        for chain in fc.chains[p]:
            data = ChainGroupData(fc, chain)
            out[(p, chain)] = [w.module for w in data.tor(q_max)]
    return out


class E1Report:
    def __init__(self, rows: list[dict], band: int):
        self.rows = rows
        self.band = band

    @property
    def all_match(self) -> bool:
        return all(r["match"] for r in self.rows)

    def mismatches(self) -> list[dict]:
        return [r for r in self.rows if not r["match"]]

    def to_json(self) -> dict:
        return {"band": self.band, "rows": self.rows, "all_match": self.all_match}


def verify_e1(M: CatModule, N: CatModule, q_max: int = 3,
              fc: FilteredComplex | None = None) -> E1Report:
    """Check, summand by summand, that the engine's E^1 entries equal the
    group-ring Tor of the chain data, and that the chain summands add up
    to the page entries."""
    if not M.cat.is_left_free():
        raise NotLeftFree("the E^1 identification requires a left-free base")
    if fc is None:
        fc = build_filtered_complex(M, N, q_max=q_max + 1)
    band = min(q_max, fc.q_max - 1)
    pages = spectral_pages(fc, r_max=1)
    e1 = pages[1]
    rows = []
    ring = fc.ring
    for p in sorted(fc.chains):
        if p > fc.p_max:
            continue
        columns = {}
        for chain in fc.chains[p]:
            col = ChainColumn(fc, p, chain)
            direct = ChainGroupData(fc, chain).tor(band)
            columns[chain] = col
            for q in range(band + 1):
                engine = col.homology(q).module
                rows.append({
                    "p": p,
                    "chain": repr(chain),
                    "q": q,
                    "engine": engine.pretty(),
                    "group_tor": direct[q].module.pretty(),
                    "match": engine == direct[q].module,
                })
        for q in range(band + 1):
            total = FPModule(ring, 0)
            for chain in fc.chains[p]:
                total = total.direct_sum(columns[chain].homology(q).module)
            page_entry = e1.entry(p, q)
            rows.append({
                "p": p,
                "chain": "(sum)",
                "q": q,
                "engine": page_entry.pretty(),
                "group_tor": total.pretty(),
                "match": page_entry == total,
            })
    return E1Report(rows, band)


# -- transport tables and d^1 components -----------------------------------


class TransportTables:
    """Balanced-triple decompositions with inverse lookup, cached."""

    def __init__(self, fc: FilteredComplex):
        self.fc = fc
        self._bisets: dict[tuple, ChainBiset] = {}
        self._triples: dict[tuple, BalancedTriples] = {}
        self._nerve_to_triple: dict[tuple, dict[int, int]] = {}

    def biset(self, chain: PChain) -> ChainBiset:
        if chain.reps not in self._bisets:
            self._bisets[chain.reps] = ChainBiset(self.fc.cat, chain)
        return self._bisets[chain.reps]

    def triples(self, chain: PChain, src: str, tgt: str) -> BalancedTriples:
        key = (chain.reps, src, tgt)
        if key not in self._triples:
            bs = self.biset(chain) if chain.p >= 1 else None
            bt = BalancedTriples(self.fc.cat, chain, src, tgt, bs)
            self._triples[key] = bt
            cell = self.fc.nerve(chain.p, src, tgt)
            table = {}
            for k in range(bt.size()):
                cls = cell.class_of(bt.to_diagram(k))
                if cls in table:
                    raise AssertionError("chain decomposition not injective")
                table[cls] = k
            self._nerve_to_triple[key] = table
        return self._triples[key]

    def nerve_to_triple(self, chain: PChain, src: str, tgt: str) -> dict[int, int]:
        self.triples(chain, src, tgt)
        return self._nerve_to_triple[(chain.reps, src, tgt)]


def d1_components(fc: FilteredComplex, p: int, chain: PChain, q: int,
                  tables: TransportTables | None = None,
                  columns: dict | None = None) -> list[dict]:
    """The maps (d^1)_i on the chain summand of E^1_{p,q}, one per face
    index, as matrices between chain-column homology presentations.

    i >= 1 components concatenate the biset witness strings; the i = 0
    component composes the bottom leg into the next object (the partial
    assembly at module level).  All are computed through the explicit
    chain/biset bijection, independently of the stored face matrices.
    """
    if p < 1:
        return []
    cat = fc.cat
    ring = fc.ring
    if tables is None:
        tables = TransportTables(fc)
    if columns is None:
        columns = {}

    def column(pp, ch):
        key = (pp, ch.reps)
        if key not in columns:
            columns[key] = ChainColumn(fc, pp, ch)
        return columns[key]

    src_col = column(p, chain)
    src_h = src_col.homology(q)
    out = []
    for i in range(p + 1):
        target_chain = chain.omit(i)
        tgt_col = column(p - 1, target_chain)
        tgt_h = tgt_col.homology(q)

        def raw_fn(gen, i=i, target_chain=target_chain):
            si, d, cls, j = gen
            b = fc.Q.levels[q].summands[si]
            bt_src = tables.triples(chain, b, d)
            k3 = tables.nerve_to_triple(chain, b, d)[cls]
            beta, s_idx, alpha = bt_src.classes[k3]
            string = tables.biset(chain).elements[s_idx] if p >= 1 else ()
            if i == 0:
                alpha2 = cat.compose(string[0], alpha)
                beta2 = beta
                string2 = string[1:]
            elif i == p:
                beta2 = cat.compose(beta, string[-1])
                alpha2 = alpha
                string2 = string[:-1]
            else:
                merged = cat.compose(string[i], string[i - 1])
                alpha2, beta2 = alpha, beta
                string2 = string[: i - 1] + (merged,) + string[i + 1 :]
            bt_tgt = tables.triples(target_chain, b, d)
            if target_chain.p == 0:
                triple = (beta2, None, alpha2)
            else:
                s2 = tables.biset(target_chain).index[string2]
                triple = (beta2, s2, alpha2)
            k2 = bt_tgt.index[triple]
            cls2 = fc.nerve(p - 1, b, d).class_of(bt_tgt.to_diagram(k2))
            return [((si, d, cls2, j), ring.one)]

        mat = _column_hom_map(src_col, tgt_col, src_h, tgt_h, q, raw_fn)
        out.append({"i": i, "target": target_chain, "matrix": mat,
                    "source_module": src_h.module, "target_module": tgt_h.module})
    return out


def d1_face_block(fc: FilteredComplex, p: int, chain: PChain, i: int, q: int,
                  columns: dict | None = None) -> Matrix:
    """The i-th face map extracted from the filtered complex, restricted
    to the chain blocks (the engine-side matrix)."""
    cat = fc.cat
    ring = fc.ring
    if columns is None:
        columns = {}
    key_s = (p, chain.reps)
    if key_s not in columns:
        columns[key_s] = ChainColumn(fc, p, chain)
    src_col = columns[key_s]
    target_chain = chain.omit(i)
    key_t = (p - 1, target_chain.reps)
    if key_t not in columns:
        columns[key_t] = ChainColumn(fc, p - 1, target_chain)
    tgt_col = columns[key_t]

    def raw_fn(gen):
        si, d, cls, j = gen
        b = fc.Q.levels[q].summands[si]
        diagram = fc.nerve(p, b, d).classes[cls]
        fd = face(cat, diagram, i)
        if fd is None:
            return []
        cls2 = fc.nerve(p - 1, b, d).class_of(fd)
        return [((si, d, cls2, j), ring.one)]

    return _column_hom_map(src_col, tgt_col, src_col.homology(q),
                           tgt_col.homology(q), q, raw_fn)


def _column_hom_map(src_col: ChainColumn, tgt_col: ChainColumn,
                    src_h: Subquotient, tgt_h: Subquotient, q: int, raw_fn) -> Matrix:
    ring = src_col.fc.ring
    z = ring.zero
    src_q = src_col.quots[q]
    tgt_q = tgt_col.quots[q]
    tgt_index = tgt_col.local_index[q]
    cols = []
    for jgen in range(src_h.module.n_gens):
        canon = src_h.lift(jgen)  # in the column's canonical coords
        raw: dict = {}
        for t, c in enumerate(canon):
            if c == z:
                continue
            for u, c2 in src_q.lift(t).items():
                raw[u] = ring.add(raw.get(u, z), ring.mul(c, c2))
        out: dict = {}
        for u, c in raw.items():
            for v_tuple, c2 in raw_fn(src_col.local_gens[q][u]):
                v = tgt_index[v_tuple]
                val = ring.add(out.get(v, z), ring.mul(c, c2))
                if val == z:
                    out.pop(v, None)
                else:
                    out[v] = val
        cols.append(tgt_h.project(tgt_q.project_raw(out)))
    return Matrix.from_columns(ring, cols, nrows=tgt_h.module.n_gens)
