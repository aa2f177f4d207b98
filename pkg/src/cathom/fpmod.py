"""Finitely presented modules in canonical invariant-factor form.

An FPModule value is the canonical form (free rank, invariant factors > 1).
CanonicalQuotient and Subquotient carry the witness data (projection and
lifts) needed to push maps through quotients, which is what the homology
and spectral-page machinery is built on.
"""

from __future__ import annotations

from .intlin import ColumnOps, StairBasis, kernel_basis, preimage_basis, smith_normal_form
from .matrix import DimensionMismatch, Matrix
from .rings import Ring


class CompositionNonzero(ValueError):
    pass


class NotASubmodule(ValueError):
    pass


class FPModule:
    """Canonical form of a finitely generated module over Z, Q or F_p."""

    __slots__ = ("ring", "free_rank", "torsion")

    def __init__(self, ring: Ring, free_rank: int, torsion: tuple[int, ...] = ()):
        if ring.is_field and torsion:
            raise ValueError("no torsion over a field")
        for a, b in zip(torsion, torsion[1:]):
            if b % a != 0:
                raise ValueError(f"invariant factors must divide: {torsion}")
        if any(d <= 1 for d in torsion):
            raise ValueError(f"invariant factors must exceed 1: {torsion}")
        self.ring = ring
        self.free_rank = free_rank
        self.torsion = tuple(torsion)

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def n_gens(self) -> int:
        return self.free_rank + len(self.torsion)

    def anns(self) -> list[int]:
        """Per-generator annihilators: 0 for free generators."""
        return [0] * self.free_rank + list(self.torsion)

    def direct_sum(self, other: "FPModule") -> "FPModule":
        if self.ring != other.ring:
            raise ValueError("ring mismatch")
        merged = sorted(self.torsion + other.torsion)
        # restore the divisibility chain via pairwise lcm/gcd sweeps
        merged = _divisibility_chain(merged)
        return FPModule(self.ring, self.free_rank + other.free_rank, tuple(merged))

    def __eq__(self, other):
        return (
            isinstance(other, FPModule)
            and self.ring == other.ring
            and self.free_rank == other.free_rank
            and self.torsion == other.torsion
        )

    def __hash__(self):
        return hash((self.ring, self.free_rank, self.torsion))

    def __repr__(self):
        return f"FPModule({self.ring}, {self.pretty()})"

    def pretty(self) -> str:
        sym = {"Z": "Z", "Q": "Q"}.get(self.ring.kind, f"F{getattr(self.ring, 'p', '?')}")
        parts = []
        if self.free_rank == 1:
            parts.append(sym)
        elif self.free_rank > 1:
            parts.append(f"{sym}^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        out = dict(self.ring.to_json())
        out["free_rank"] = self.free_rank
        out["torsion"] = list(self.torsion)
        return out


def _divisibility_chain(factors: list[int]) -> list[int]:
    """Rewrite a multiset of torsion orders as a divisibility chain."""
    from math import gcd

    factors = [d for d in factors if d > 1]
    changed = True
    while changed:
        changed = False
        for i in range(len(factors)):
            for j in range(i + 1, len(factors)):
                a, b = factors[i], factors[j]
                g = gcd(a, b)
                l = a * b // g
                if (g, l) != (a, b) and (g, l) != (b, a):
                    factors[i], factors[j] = g, l
                    changed = True
        factors = [d for d in factors if d > 1]
        factors.sort()
    return factors


class CanonicalQuotient:
    """Z^n modulo a row lattice, with projection and generator lifts."""

    def __init__(self, ring: Ring, ambient: int, relation_rows: list):
        # rows may be dense lists or sparse {index: value} dicts
        self.ring = ring
        self.ambient = ambient
        basis = StairBasis(ring, ambient)
        for row in relation_rows:
            basis.add(row)
        B = Matrix(ring, basis.basis_rows() or [], copy=False)
        if B.rows == 0:
            B = Matrix.zeros(ring, 0, ambient)
        snf = smith_normal_form(B.transpose())  # relations as columns of B^T
        self._U = snf.U
        self._Uinv = snf.Uinv
        diag = snf.diagonal()
        n = ambient
        k = len(diag)
        anns = []
        for i in range(n):
            d = diag[i] if i < k else ring.zero
            anns.append(d)
        one = ring.one
        free_idx = [i for i in range(n) if anns[i] == ring.zero]
        if ring.is_field:
            tors_idx = []
        else:
            tors_idx = [i for i in range(n) if anns[i] not in (ring.zero, one)]
            tors_idx.sort(key=lambda i: (anns[i], i))
        self._kept = free_idx + tors_idx
        torsion = tuple(int(anns[i]) for i in tors_idx)
        self.module = FPModule(ring, len(free_idx), torsion)

    def project(self, vec: list) -> list:
        """Canonical coordinates of the class of an ambient vector."""
        w = self._U.apply(vec)
        out = []
        anns = self.module.anns()
        for pos, i in enumerate(self._kept):
            x = w[i]
            d = anns[pos]
            if d:
                x = x % d
            out.append(x)
        return out

    def lift(self, j: int) -> list:
        """An ambient representative of canonical generator j."""
        return self._Uinv.column(self._kept[j])

    def lift_vector(self, coords: list) -> list:
        ring = self.ring
        z = ring.zero
        out = [z] * self.ambient
        for j, c in enumerate(coords):
            if c == z:
                continue
            col = self.lift(j)
            for i in range(self.ambient):
                out[i] = ring.add(out[i], ring.mul(c, col[i]))
        return out


class Subquotient:
    """(span Z)/(span B) inside an ambient free module, with witnesses.

    Generators are given as matrix columns.  Raises NotASubmodule when the
    B-span is not contained in the Z-span.
    """

    def __init__(self, ring: Ring, ambient: int, gens_Z: Matrix, gens_B: Matrix):
        if gens_Z.cols and gens_Z.rows != ambient:
            raise DimensionMismatch("Z-generator length != ambient rank")
        if gens_B.cols and gens_B.rows != ambient:
            raise DimensionMismatch("B-generator length != ambient rank")
        self.ring = ring
        self.ambient = ambient
        zbasis = StairBasis(ring, ambient)
        for j in range(gens_Z.cols):
            zbasis.add(gens_Z.column(j))
        self._zbasis = zbasis
        self._zcols = zbasis.pivot_cols()
        h = zbasis.rank
        rel_rows = []
        for j in range(gens_B.cols):
            coeffs = zbasis.express(gens_B.column(j))
            if coeffs is None:
                raise NotASubmodule(f"B-generator {j} is not in the Z-span")
            rel_rows.append([coeffs.get(c, ring.zero) for c in self._zcols])
        self._quot = CanonicalQuotient(ring, h, rel_rows)
        self.module = self._quot.module

    def project(self, vec: list) -> list:
        coeffs = self._zbasis.express(vec)
        if coeffs is None:
            raise NotASubmodule("vector is not in the Z-span")
        y = [coeffs.get(c, self.ring.zero) for c in self._zcols]
        return self._quot.project(y)

    def lift(self, j: int) -> list:
        y = self._quot.lift(j)
        ring = self.ring
        z = ring.zero
        out = [z] * self.ambient
        for c, coeff in zip(self._zcols, y):
            if coeff == z:
                continue
            piv = self._zbasis.pivots[c]
            for i, v in piv.items():
                out[i] = ring.add(out[i], ring.mul(coeff, v))
        return out

    def lifts(self) -> Matrix:
        return Matrix.from_columns(
            self.ring, [self.lift(j) for j in range(self.module.n_gens)], nrows=self.ambient
        )


def subquotient(ambient_rank: int, gens_Z: Matrix, gens_B: Matrix) -> Subquotient:
    """The module (span Z)/(span B) in canonical form with witnesses."""
    if gens_Z.ring != gens_B.ring:
        raise DimensionMismatch("ring mismatch between generator sets")
    return Subquotient(gens_Z.ring, ambient_rank, gens_Z, gens_B)


def homology_at(d_out: Matrix, d_in: Matrix) -> FPModule:
    """ker(d_out)/im(d_in) for maps of free modules, canonical form."""
    if d_out.ring != d_in.ring:
        raise DimensionMismatch("ring mismatch")
    if d_out.cols != d_in.rows:
        raise DimensionMismatch(
            f"d_out has {d_out.cols} columns but d_in has {d_in.rows} rows"
        )
    if not (d_out @ d_in).is_zero():
        raise CompositionNonzero("d_out . d_in != 0")
    ker = kernel_basis(d_out)
    return Subquotient(d_out.ring, d_out.cols, ker, d_in).module


def homology_with_witnesses(d_out: Matrix, d_in: Matrix) -> Subquotient:
    if not (d_out @ d_in).is_zero():
        raise CompositionNonzero("d_out . d_in != 0")
    ker = kernel_basis(d_out)
    return Subquotient(d_out.ring, d_out.cols, ker, d_in)


def _ann_columns(ring: Ring, anns: list) -> Matrix:
    cols = []
    n = len(anns)
    z = ring.zero
    for i, d in enumerate(anns):
        if d != z:
            col = [z] * n
            col[i] = d
            cols.append(col)
    return Matrix.from_columns(ring, cols, nrows=n)


def presented_homology(
    d_out: Matrix,
    d_in: Matrix,
    anns_here: list,
    anns_next: list,
) -> Subquotient:
    """Homology at B of A -> B -> C for presented modules.

    The modules carry diagonal annihilators (canonical presentations);
    anns_here are B's, anns_next are C's.  Cycles are the preimage of C's
    relation lattice, boundaries are im(d_in) plus B's relations.
    """
    ring = d_out.ring
    ann_C = _ann_columns(ring, anns_next)
    cycles = preimage_basis(d_out, ann_C)
    bounds = d_in.hstack(_ann_columns(ring, anns_here))
    return Subquotient(ring, d_out.cols, cycles, bounds)


def induced_map(src: Subquotient, dst: Subquotient, T: Matrix) -> Matrix:
    """Matrix of the map induced on subquotients by the ambient map T."""
    cols = []
    for j in range(src.module.n_gens):
        cols.append(dst.project(T.apply(src.lift(j))))
    return Matrix.from_columns(src.ring, cols, nrows=dst.module.n_gens)


def solve_mod(A: Matrix, anns_target: list, b: list) -> list | None:
    """Some x with A x = b modulo the diagonal annihilator lattice."""
    aug = A.hstack(_ann_columns(A.ring, anns_target))
    sol = ColumnOps(aug).solve(b)
    if sol is None:
        return None
    return sol[: A.cols]


class SubPresentation:
    """A sublattice of a presented module, canonicalized as a module.

    The sublattice is spanned by the given columns together with the
    ambient relations; ``include`` maps canonical generators to ambient
    coordinates and ``express`` inverts it on members.
    """

    def __init__(self, ring: Ring, ambient_anns: list, lattice_cols: Matrix):
        self.ring = ring
        self.ambient_anns = list(ambient_anns)
        n = len(ambient_anns)
        basis = StairBasis(ring, n)
        for j in range(lattice_cols.cols):
            basis.add(lattice_cols.column(j))
        for i, d in enumerate(ambient_anns):
            if d:
                row = [ring.zero] * n
                row[i] = d
                basis.add(row)
        self._basis = basis
        self._cols = basis.pivot_cols()
        rel_rows = []
        for i, d in enumerate(ambient_anns):
            if d:
                vec = [ring.zero] * n
                vec[i] = d
                coeffs = basis.express(vec)
                rel_rows.append([coeffs.get(c, ring.zero) for c in self._cols])
        self.quot = CanonicalQuotient(ring, basis.rank, rel_rows)
        self.module = self.quot.module

    def include(self, j: int) -> list:
        """Ambient coordinates of canonical generator j."""
        y = self.quot.lift(j)
        ring = self.ring
        z = ring.zero
        out = [z] * len(self.ambient_anns)
        for c, coeff in zip(self._cols, y):
            if coeff == z:
                continue
            piv = self._basis.pivots[c]
            for i, v in piv.items():
                out[i] = ring.add(out[i], ring.mul(coeff, v))
        return out

    def include_matrix(self) -> Matrix:
        return Matrix.from_columns(
            self.ring,
            [self.include(j) for j in range(self.module.n_gens)],
            nrows=len(self.ambient_anns),
        )

    def express(self, vec: list) -> list:
        coeffs = self._basis.express(vec)
        if coeffs is None:
            raise NotASubmodule("vector is not in the sublattice")
        y = [coeffs.get(c, self.ring.zero) for c in self._cols]
        return self.quot.project(y)
