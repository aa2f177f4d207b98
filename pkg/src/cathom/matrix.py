"""Dense exact matrices over a coefficient ring.

Vectors are plain lists; matrices act on column vectors from the left.
Entries are kept in the ring's canonical representation (ints, Fractions,
or ints mod p).
"""

from __future__ import annotations

from .rings import Ring


class DimensionMismatch(ValueError):
    pass


class Matrix:
    __slots__ = ("ring", "rows", "cols", "data")

    def __init__(self, ring: Ring, data: list[list], copy: bool = True, cols: int | None = None):
        self.ring = ring
        if copy:
            data = [[ring.coerce(x) for x in row] for row in data]
        self.data = data
        self.rows = len(data)
        self.cols = len(data[0]) if data else (cols or 0)
        for row in data:
            if len(row) != self.cols:
                raise DimensionMismatch("ragged rows")

    @classmethod
    def zeros(cls, ring: Ring, rows: int, cols: int) -> "Matrix":
        z = ring.zero
        return cls(ring, [[z] * cols for _ in range(rows)], copy=False, cols=cols)

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Matrix":
        m = cls.zeros(ring, n, n)
        for i in range(n):
            m.data[i][i] = ring.one
        return m

    @classmethod
    def from_columns(cls, ring: Ring, columns: list[list], nrows: int | None = None) -> "Matrix":
        if not columns:
            if nrows is None:
                raise DimensionMismatch("need nrows for empty column list")
            return cls.zeros(ring, nrows, 0)
        n = len(columns[0])
        return cls(
            ring,
            [[col[i] for col in columns] for i in range(n)],
            cols=len(columns),
        )

    def column(self, j: int) -> list:
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self) -> list[list]:
        return [self.column(j) for j in range(self.cols)]

    def row(self, i: int) -> list:
        return list(self.data[i])

    def copy(self) -> "Matrix":
        return Matrix(self.ring, [list(r) for r in self.data], copy=False, cols=self.cols)

    def transpose(self) -> "Matrix":
        return Matrix(
            self.ring,
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
            copy=False,
            cols=self.rows,
        )

    def is_zero(self) -> bool:
        z = self.ring.zero
        return all(x == z for row in self.data for x in row)

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.ring == other.ring
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.ring, tuple(tuple(r) for r in self.data)))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ring != other.ring:
            raise DimensionMismatch("ring mismatch")
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ring = self.ring
        z = ring.zero
        out = [[z] * other.cols for _ in range(self.rows)]
        bt = other.transpose().data
        for i in range(self.rows):
            arow = self.data[i]
            orow = out[i]
            for j in range(other.cols):
                brow = bt[j]
                acc = z
                for k in range(self.cols):
                    a = arow[k]
                    if a != z:
                        acc = ring.add(acc, ring.mul(a, brow[k]))
                orow[j] = acc
        return Matrix(ring, out, copy=False, cols=other.cols)

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("shape mismatch in +")
        ring = self.ring
        return Matrix(
            ring,
            [
                [ring.add(self.data[i][j], other.data[i][j]) for j in range(self.cols)]
                for i in range(self.rows)
            ],
            copy=False,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(self.ring.neg(self.ring.one))

    def scale(self, c) -> "Matrix":
        ring = self.ring
        c = ring.coerce(c)
        return Matrix(
            ring,
            [[ring.mul(c, x) for x in row] for row in self.data],
            copy=False,
        )

    def apply(self, vec: list) -> list:
        if len(vec) != self.cols:
            raise DimensionMismatch(f"matrix {self.rows}x{self.cols} applied to len-{len(vec)} vector")
        ring = self.ring
        z = ring.zero
        out = []
        for row in self.data:
            acc = z
            for a, x in zip(row, vec):
                if a != z and x != z:
                    acc = ring.add(acc, ring.mul(a, x))
            out.append(acc)
        return out

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise DimensionMismatch("hstack row mismatch")
        return Matrix(
            self.ring,
            [self.data[i] + other.data[i] for i in range(self.rows)],
            copy=False,
            cols=self.cols + other.cols,
        )

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.cols != other.cols:
            raise DimensionMismatch("vstack col mismatch")
        return Matrix(self.ring, [list(r) for r in self.data + other.data], copy=False, cols=self.cols)

    def to_json(self) -> dict:
        out = dict(self.ring.to_json())
        out["rows"] = self.rows
        out["cols"] = self.cols
        out["entries"] = [[self.ring.entry_to_json(x) for x in row] for row in self.data]
        return out

    def __repr__(self):
        return f"Matrix({self.ring}, {self.rows}x{self.cols})"

    def pretty(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.data)


def matrix_from_json(d: dict) -> Matrix:
    from .rings import ring_from_json

    ring = ring_from_json(d)
    entries = d["entries"]
    if not entries:
        return Matrix.zeros(ring, d.get("rows", 0), d.get("cols", 0))
    return Matrix(ring, [[ring.entry_from_json(x) for x in row] for row in entries], copy=False)


def block_diag(ring: Ring, blocks: list[Matrix]) -> Matrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = Matrix.zeros(ring, rows, cols)
    i0 = j0 = 0
    for b in blocks:
        for i in range(b.rows):
            out.data[i0 + i][j0 : j0 + b.cols] = list(b.data[i])
        i0 += b.rows
        j0 += b.cols
    return out
