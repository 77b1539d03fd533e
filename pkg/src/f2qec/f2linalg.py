"""Dense GF(2) linear algebra on bit-packed matrices.

Rows are stored as Python integers (bit j = column j), so row XOR is a
single word-level operation.  All matrices are immutable after
construction; elimination always picks the lowest-index pivot so reduced
forms and pivot lists are reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence


def parity(a: int, b: int) -> int:
    """Inner product of two bit vectors mod 2."""
    return (a & b).bit_count() & 1


def weight(v: int) -> int:
    return v.bit_count()


def vector_from_bits(bits: Iterable[int]) -> int:
    v = 0
    for j, b in enumerate(bits):
        if b & 1:
            v |= 1 << j
    return v


def vector_to_bits(v: int, n: int) -> list[int]:
    return [(v >> j) & 1 for j in range(n)]


@dataclass(frozen=True)
class BitMatrix:
    """Matrix over GF(2) with one packed integer per row."""

    rows: int
    cols: int
    data: tuple[int, ...]

    def __post_init__(self):
        if len(self.data) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.data)}")
        mask = (1 << self.cols) - 1
        for r in self.data:
            if r & ~mask:
                raise ValueError("row has bits outside the column range")

    # -- construction -------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        data = []
        for row in rows:
            if len(row) != ncols:
                raise ValueError("ragged rows")
            data.append(vector_from_bits(row))
        return cls(nrows, ncols, tuple(data))

    @classmethod
    def from_ints(cls, ints: Sequence[int], cols: int) -> "BitMatrix":
        return cls(len(ints), cols, tuple(ints))

    @classmethod
    def from_strings(cls, strings: Sequence[str]) -> "BitMatrix":
        cols = len(strings[0]) if strings else 0
        return cls.from_rows([[int(ch) for ch in s] for s in strings])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    # -- element access ------------------------------------------------

    def row(self, i: int) -> int:
        return self.data[i]

    def get(self, i: int, j: int) -> int:
        return (self.data[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [vector_to_bits(r, self.cols) for r in self.data]

    def row_strings(self) -> list[str]:
        return ["".join(str((r >> j) & 1) for j in range(self.cols)) for r in self.data]

    # -- algebra -------------------------------------------------------

    def transpose(self) -> "BitMatrix":
        out = [0] * self.cols
        for i, r in enumerate(self.data):
            while r:
                j = (r & -r).bit_length() - 1
                out[j] |= 1 << i
                r &= r - 1
        return BitMatrix(self.cols, self.rows, tuple(out))

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        ot = other.transpose()
        out = []
        for r in self.data:
            v = 0
            for j, c in enumerate(ot.data):
                v |= parity(r, c) << j
            out.append(v)
        return BitMatrix(self.rows, other.cols, tuple(out))

    def mul_vec(self, v: int) -> int:
        """Matrix times column vector; result bit i = <row i, v>."""
        out = 0
        for i, r in enumerate(self.data):
            out |= parity(r, v) << i
        return out

    def vstack(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch")
        return BitMatrix(self.rows + other.rows, self.cols, self.data + other.data)

    def hstack(self, other: "BitMatrix") -> "BitMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        data = tuple(a | (b << self.cols) for a, b in zip(self.data, other.data))
        return BitMatrix(self.rows, self.cols + other.cols, data)

    def kron(self, other: "BitMatrix") -> "BitMatrix":
        """Kronecker product; block (i,k) column index = i*other.cols + k ordering."""
        out = []
        for a in self.data:
            for b in other.data:
                v = 0
                aa = a
                while aa:
                    j = (aa & -aa).bit_length() - 1
                    v |= b << (j * other.cols)
                    aa &= aa - 1
                out.append(v)
        return BitMatrix(self.rows * other.rows, self.cols * other.cols, tuple(out))

    def permute_columns(self, perm: Sequence[int]) -> "BitMatrix":
        """Column j of the result is column perm[j] of self."""
        if sorted(perm) != list(range(self.cols)):
            raise ValueError("not a permutation")
        out = []
        for r in self.data:
            v = 0
            for j, pj in enumerate(perm):
                v |= ((r >> pj) & 1) << j
            out.append(v)
        return BitMatrix(self.rows, self.cols, tuple(out))

    def delete_columns(self, drop: Iterable[int]) -> "BitMatrix":
        dropset = set(drop)
        keep = [j for j in range(self.cols) if j not in dropset]
        out = []
        for r in self.data:
            v = 0
            for newj, oldj in enumerate(keep):
                v |= ((r >> oldj) & 1) << newj
            out.append(v)
        return BitMatrix(self.rows, len(keep), tuple(out))

    # -- elimination ---------------------------------------------------

    def rref(self) -> tuple["BitMatrix", tuple[int, ...]]:
        """Reduced row echelon form and ascending pivot columns."""
        work = list(self.data)
        pivots = []
        r = 0
        for c in range(self.cols):
            piv = None
            for i in range(r, len(work)):
                if (work[i] >> c) & 1:
                    piv = i
                    break
            if piv is None:
                continue
            work[r], work[piv] = work[piv], work[r]
            for i in range(len(work)):
                if i != r and ((work[i] >> c) & 1):
                    work[i] ^= work[r]
            pivots.append(c)
            r += 1
        return BitMatrix(self.rows, self.cols, tuple(work)), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> "BitMatrix":
        """Rows form a basis of {x : self @ x = 0}."""
        red, pivots = self.rref()
        pivset = set(pivots)
        free = [c for c in range(self.cols) if c not in pivset]
        basis = []
        for f in free:
            v = 1 << f
            for i, p in enumerate(pivots):
                if (red.data[i] >> f) & 1:
                    v |= 1 << p
            basis.append(v)
        return BitMatrix(len(basis), self.cols, tuple(basis))

    def in_row_space(self, v: int) -> bool:
        red, pivots = self.rref()
        for i, p in enumerate(pivots):
            if (v >> p) & 1:
                v ^= red.data[i]
        return v == 0

    def row_space_equal(self, other: "BitMatrix") -> bool:
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        ra = self.rank()
        rb = other.rank()
        if ra != rb:
            return False
        return self.vstack(other).rank() == ra

    def solve(self, s: int) -> int | None:
        """Any x with self @ x = s, or None when inconsistent."""
        # Eliminate over columns: rows of the transpose, tagged with the
        # originating column index so a solution can be read back.
        aug = [(col, 1 << j) for j, col in enumerate(self.transpose().data)]
        r = 0
        for c in range(self.rows):
            piv = None
            for i in range(r, len(aug)):
                if (aug[i][0] >> c) & 1:
                    piv = i
                    break
            if piv is None:
                continue
            aug[r], aug[piv] = aug[piv], aug[r]
            for i in range(len(aug)):
                if i != r and ((aug[i][0] >> c) & 1):
                    aug[i] = (aug[i][0] ^ aug[r][0], aug[i][1] ^ aug[r][1])
            r += 1
        x = 0
        v = s
        for i in range(r):
            lead = aug[i][0] & -aug[i][0]
            if v & lead:
                v ^= aug[i][0]
                x ^= aug[i][1]
        return x if v == 0 else None

    def solution_with_coefficients(self, s: int) -> int | None:
        """Coefficient mask c with XOR of rows {i : bit i of c} = s, or None."""
        tagged = [(self.data[i], 1 << i) for i in range(self.rows)]
        r = 0
        for c in range(self.cols):
            piv = None
            for i in range(r, len(tagged)):
                if (tagged[i][0] >> c) & 1:
                    piv = i
                    break
            if piv is None:
                continue
            tagged[r], tagged[piv] = tagged[piv], tagged[r]
            for i in range(len(tagged)):
                if i != r and ((tagged[i][0] >> c) & 1):
                    tagged[i] = (tagged[i][0] ^ tagged[r][0], tagged[i][1] ^ tagged[r][1])
            r += 1
        coeff = 0
        v = s
        for i in range(r):
            lead = tagged[i][0] & -tagged[i][0]
            if v & lead:
                v ^= tagged[i][0]
                coeff ^= tagged[i][1]
        return coeff if v == 0 else None

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "data": self.row_strings()}

    @classmethod
    def from_json(cls, obj: dict) -> "BitMatrix":
        m = cls.from_strings(obj["data"]) if obj["data"] else cls.zeros(0, obj["cols"])
        if m.rows != obj["rows"] or m.cols != obj["cols"]:
            raise ValueError("inconsistent shape in serialized matrix")
        return m

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def loads(cls, s: str) -> "BitMatrix":
        return cls.from_json(json.loads(s))


def rank(m: BitMatrix) -> int:
    return m.rank()


def rref(m: BitMatrix) -> tuple[BitMatrix, tuple[int, ...]]:
    return m.rref()


def kernel_basis(m: BitMatrix) -> BitMatrix:
    return m.kernel_basis()


def row_space_equal(a: BitMatrix, b: BitMatrix) -> bool:
    return a.row_space_equal(b)


def solve(m: BitMatrix, s: int) -> int | None:
    return m.solve(s)
