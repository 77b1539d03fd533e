"""CSS stabilizer code container and analysis.

A code is a pair of GF(2) check matrices (hx, hz) with hx @ hz.T = 0,
plus explicit logical operator supports and optional per-qubit lattice
coordinates.  Pauli operators are represented as packed bit masks over
the qubit indices (bit q = qubit q).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from .f2linalg import BitMatrix, parity

MAX_DISTANCE_ENUM = 10**7


@dataclass(frozen=True)
class PauliSupport:
    """A pure-X or pure-Z Pauli given by its qubit support."""

    kind: str  # "X" or "Z"
    support: tuple[int, ...]

    def mask(self) -> int:
        m = 0
        for q in self.support:
            m |= 1 << q
        return m


@dataclass(frozen=True)
class CssCode:
    n: int
    hx: BitMatrix
    hz: BitMatrix
    logicals_x: tuple[int, ...]  # one mask per logical qubit
    logicals_z: tuple[int, ...]
    coords: tuple[tuple, ...] = ()
    d: int | None = None
    name: str = ""
    meta: tuple[tuple[str, int], ...] = ()

    @property
    def k(self) -> int:
        return len(self.logicals_x)

    def meta_get(self, key: str) -> int | None:
        for k, v in self.meta:
            if k == key:
                return v
        return None

    def logical_x_support(self, i: int) -> tuple[int, ...]:
        return mask_to_support(self.logicals_x[i])

    def logical_z_support(self, i: int) -> tuple[int, ...]:
        return mask_to_support(self.logicals_z[i])

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "d": self.d,
            "name": self.name,
            "coords": [list(c) for c in self.coords],
            "hx": self.hx.to_json(),
            "hz": self.hz.to_json(),
            "logicals": {
                "x": [list(self.logical_x_support(i)) for i in range(self.k)],
                "z": [list(self.logical_z_support(i)) for i in range(self.k)],
            },
            "meta": {k: v for k, v in self.meta},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CssCode":
        lx = tuple(support_to_mask(s) for s in obj["logicals"]["x"])
        lz = tuple(support_to_mask(s) for s in obj["logicals"]["z"])
        return cls(
            n=obj["n"],
            hx=BitMatrix.from_json(obj["hx"]),
            hz=BitMatrix.from_json(obj["hz"]),
            logicals_x=lx,
            logicals_z=lz,
            coords=tuple(tuple(c) for c in obj.get("coords", [])),
            d=obj.get("d"),
            name=obj.get("name", ""),
            meta=tuple(sorted(obj.get("meta", {}).items())),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def loads(cls, s: str) -> "CssCode":
        return cls.from_json(json.loads(s))


def mask_to_support(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        q = (mask & -mask).bit_length() - 1
        out.append(q)
        mask &= mask - 1
    return tuple(out)


def support_to_mask(support) -> int:
    m = 0
    for q in support:
        m |= 1 << q
    return m


@dataclass
class Diagnostics:
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, cond: bool, message: str):
        if not cond:
            self.failures.append(message)


def validate(code: CssCode) -> Diagnostics:
    """Check commutation, rank consistency, and symplectic pairing."""
    diag = Diagnostics()
    for i in range(code.hx.rows):
        for j in range(code.hz.rows):
            if parity(code.hx.row(i), code.hz.row(j)):
                diag.check(False, f"hx row {i} anticommutes with hz row {j}")
    k = code.n - code.hx.rank() - code.hz.rank()
    diag.check(k == code.k, f"rank-derived k={k} but {code.k} logical pairs given")
    diag.check(len(code.logicals_x) == len(code.logicals_z), "unpaired logicals")
    for i, lx in enumerate(code.logicals_x):
        for j, lz in enumerate(code.logicals_z):
            want = 1 if i == j else 0
            if parity(lx, lz) != want:
                diag.check(False, f"logical pairing failure at ({i}, {j})")
    for i, lx in enumerate(code.logicals_x):
        if any(parity(lx, code.hz.row(r)) for r in range(code.hz.rows)):
            diag.check(False, f"logical X {i} anticommutes with a Z check")
        if code.hx.in_row_space(lx):
            diag.check(False, f"logical X {i} is a stabilizer")
    for i, lz in enumerate(code.logicals_z):
        if any(parity(lz, code.hx.row(r)) for r in range(code.hx.rows)):
            diag.check(False, f"logical Z {i} anticommutes with an X check")
        if code.hz.in_row_space(lz):
            diag.check(False, f"logical Z {i} is a stabilizer")
    return diag


def distance(code: CssCode, w_max: int) -> tuple[int | None, int | None]:
    """Minimum logical operator weights (d_x, d_z) by exhaustive search.

    Enumerates supports of increasing weight; None means no logical of
    weight <= w_max exists.  Refuses searches beyond MAX_DISTANCE_ENUM
    candidate supports.
    """
    total = sum(comb(code.n, w) for w in range(1, w_max + 1))
    if total > MAX_DISTANCE_ENUM:
        raise ValueError(f"enumeration of {total} supports exceeds the feasibility bound")
    dx = _min_weight_logical(code.hz, code.hx, code.n, w_max)
    dz = _min_weight_logical(code.hx, code.hz, code.n, w_max)
    return dx, dz


def _min_weight_logical(h_other: BitMatrix, h_same: BitMatrix, n: int, w_max: int) -> int | None:
    # Column syndromes against the opposite-type checks.
    cols = [h_other.mul_vec(1 << q) for q in range(n)]
    for w in range(1, w_max + 1):
        for combo in combinations(range(n), w):
            syn = 0
            v = 0
            for q in combo:
                syn ^= cols[q]
                v |= 1 << q
            if syn == 0 and not h_same.in_row_space(v):
                return w
    return None


@dataclass(frozen=True)
class LogicalCliffordAction:
    """Action of a qubit permutation on the logical algebra.

    Row i of x_matrix gives the image of logical X_i in the logical X
    basis (modulo stabilizers); z_matrix likewise for logical Z.
    """

    x_matrix: BitMatrix
    z_matrix: BitMatrix

    @property
    def k(self) -> int:
        return self.x_matrix.rows

    def is_identity(self) -> bool:
        return self.x_matrix == BitMatrix.identity(self.k)

    def cnot_pairs(self) -> tuple[tuple[int, int], ...] | None:
        """Decompose into commuting CNOTs (control, target), or None.

        Succeeds when x_matrix = I + N with every target row untouched,
        which covers paired CNOTs and fanouts.
        """
        k = self.k
        pairs = []
        targets = set()
        for i in range(k):
            row = self.x_matrix.row(i)
            if not (row >> i) & 1:
                return None
            rest = row ^ (1 << i)
            while rest:
                t = (rest & -rest).bit_length() - 1
                pairs.append((i, t))
                targets.add(t)
                rest &= rest - 1
        for t in targets:
            if self.x_matrix.row(t) != 1 << t:
                return None
        return tuple(sorted(pairs))


def apply_permutation(mask: int, perm) -> int:
    """Image of a Pauli mask under qubit relabeling q -> perm[q]."""
    out = 0
    while mask:
        q = (mask & -mask).bit_length() - 1
        out |= 1 << perm[q]
        mask &= mask - 1
    return out


def is_automorphism(code: CssCode, perm) -> bool:
    px = BitMatrix.from_ints(
        [apply_permutation(code.hx.row(i), perm) for i in range(code.hx.rows)], code.n
    )
    pz = BitMatrix.from_ints(
        [apply_permutation(code.hz.row(i), perm) for i in range(code.hz.rows)], code.n
    )
    return px.row_space_equal(code.hx) and pz.row_space_equal(code.hz)


def permutation_logical_action(code: CssCode, perm) -> LogicalCliffordAction:
    """Logical CNOT-type action induced by an automorphism permutation.

    Each permuted logical is re-expressed in the logical basis modulo the
    same-type stabilizer rows; raises ValueError when perm does not
    preserve both check row spaces.
    """
    if sorted(perm) != list(range(code.n)):
        raise ValueError("perm is not a permutation of the qubit indices")
    if not is_automorphism(code, perm):
        raise ValueError("permutation is not a code automorphism")
    xa = _action_rows(code.hx, code.logicals_x, perm, code.n)
    za = _action_rows(code.hz, code.logicals_z, perm, code.n)
    act = LogicalCliffordAction(xa, za)
    if (act.x_matrix @ act.z_matrix.transpose()) != BitMatrix.identity(code.k):
        raise ValueError("logical action does not preserve commutation relations")
    return act


def _action_rows(h: BitMatrix, logicals, perm, n: int) -> BitMatrix:
    basis = BitMatrix.from_ints(list(h.data) + list(logicals), n)
    rows = []
    for mask in logicals:
        coeff = basis.solution_with_coefficients(apply_permutation(mask, perm))
        if coeff is None:
            raise ValueError("permuted logical leaves the stabilizer+logical span")
        rows.append(coeff >> h.rows)
    return BitMatrix.from_ints(rows, len(logicals))


def single_check_flip_witness(code: CssCode) -> dict:
    """Per check row, a qubit whose single opposite-type error flips only it.

    Returns {"x": {row: qubit or None}, "z": {row: qubit or None}}; a Z
    error at the reported qubit flips exactly that hx row (and dually).
    """
    out = {"x": {}, "z": {}}
    for key, h in (("x", code.hx), ("z", code.hz)):
        for r in range(h.rows):
            found = None
            for q in range(code.n):
                if h.mul_vec(1 << q) == 1 << r:
                    found = q
                    break
            out[key][r] = found
    return out
