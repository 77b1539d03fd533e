"""GHZ preparation circuits and their frame bookkeeping.

Builds syndrome-extraction gadgets with distance-preserving CNOT
schedules, the triple logical-X measurement gadget, and the full
physical and logical GHZ pipelines (transversal init, extraction,
logical measurement with postselection, two relabeling layers, and
transversal readout).  A FrameRecipe captures everything needed to turn
raw shot records into syndromes and logical bits.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import stab_sim as ss
from .code_factory import build_25_4_3
from .css_code import CssCode, apply_permutation, mask_to_support
from .f2linalg import BitMatrix, parity

ANCILLA_COUNT = 6
MAX_COSET_RANK = 16


@dataclass(frozen=True)
class Schedule:
    """Per-check CNOT orders; each entry is a permutation of the check support."""

    x_orders: tuple[tuple[int, ...], ...]
    z_orders: tuple[tuple[int, ...], ...]


def _coord_map(code: CssCode) -> dict[int, tuple[int, int]]:
    out = {}
    for q, c in enumerate(code.coords):
        if c[0] != "P":
            raise ValueError("schedule construction needs primary lattice coordinates")
        out[q] = (c[1], c[2])
    return out


def _rectangle(support, coords):
    pts = [coords[q] for q in support]
    rows = sorted({i for i, _ in pts})
    cols = sorted({j for _, j in pts})
    if len(pts) != len(rows) * len(cols):
        return None, None
    if {(i, j) for i in rows for j in cols} != set(pts):
        return None, None
    return rows, cols


def zigzag_schedule(code: CssCode) -> Schedule:
    """Serpentine CNOT orders running against each logical grain.

    X gadgets traverse one column fully before folding back up the next,
    so every hook suffix reduces to a vertical strip; Z gadgets do the
    transpose.  Requires every check support to be a rectangle at most
    two sites wide along its own grain.
    """
    coords = _coord_map(code)
    by_coord = {v: k for k, v in coords.items()}

    def order_x(support):
        rows, cols = _rectangle(support, coords)
        if rows is None or len(cols) > 2:
            raise ValueError("X check support is not a rectangle of width <= 2 columns")
        path = [(i, cols[0]) for i in rows]
        if len(cols) == 2:
            path += [(i, cols[1]) for i in reversed(rows)]
        return tuple(by_coord[p] for p in path)

    def order_z(support):
        rows, cols = _rectangle(support, coords)
        if rows is None or len(rows) > 2:
            raise ValueError("Z check support is not a rectangle of width <= 2 rows")
        path = [(rows[0], j) for j in cols]
        if len(rows) == 2:
            path += [(rows[1], j) for j in reversed(cols)]
        return tuple(by_coord[p] for p in path)

    xo = tuple(order_x(mask_to_support(code.hx.row(r))) for r in range(code.hx.rows))
    zo = tuple(order_z(mask_to_support(code.hz.row(r))) for r in range(code.hz.rows))
    return Schedule(xo, zo)


def row_major_schedule(code: CssCode) -> Schedule:
    """Ascending-index CNOT orders; deliberately ignores the grain."""
    xo = tuple(mask_to_support(code.hx.row(r)) for r in range(code.hx.rows))
    zo = tuple(mask_to_support(code.hz.row(r)) for r in range(code.hz.rows))
    return Schedule(xo, zo)


# --- gadget and circuit builders -------------------------------------------


def _x_gadget(anc, order, tag):
    return [ss.prepx(anc)] + [ss.cnot(anc, q) for q in order] + [ss.measx(anc, tag)]


def _z_gadget(anc, order, tag):
    return [ss.prepz(anc)] + [ss.cnot(q, anc) for q in order] + [ss.measz(anc, tag)]


def _logical_x_gadget(anc, order, tag):
    # |0>-ancilla convention: Hadamards sandwich the fan-out CNOTs.
    out = [ss.prepz(anc), ss.h(anc)]
    out += [ss.cnot(anc, q) for q in order]
    out += [ss.h(anc), ss.measz(anc, tag)]
    return out


def _check_schedule(code: CssCode, schedule: Schedule):
    if len(schedule.x_orders) != code.hx.rows or len(schedule.z_orders) != code.hz.rows:
        raise ValueError("schedule does not cover every check")
    for r, order in enumerate(schedule.x_orders):
        if tuple(sorted(order)) != mask_to_support(code.hx.row(r)):
            raise ValueError(f"X order {r} is not a permutation of the check support")
    for r, order in enumerate(schedule.z_orders):
        if tuple(sorted(order)) != mask_to_support(code.hz.row(r)):
            raise ValueError(f"Z order {r} is not a permutation of the check support")


def syndrome_extraction_circuit(code: CssCode, schedule: Schedule, which: str = "X") -> ss.Circuit:
    """One ancilla gadget per selected check, in schedule order."""
    _check_schedule(code, schedule)
    ins = []
    g = 0
    if which in ("X", "both"):
        for r, order in enumerate(schedule.x_orders):
            ins += _x_gadget(code.n + (g % ANCILLA_COUNT), order, f"x{r}")
            g += 1
    if which in ("Z", "both"):
        for r, order in enumerate(schedule.z_orders):
            ins += _z_gadget(code.n + (g % ANCILLA_COUNT), order, f"z{r}")
            g += 1
    if which not in ("X", "Z", "both"):
        raise ValueError("which must be X, Z, or both")
    return ss.Circuit(code.n + ANCILLA_COUNT, tuple(ins))


def physical_ghz_circuit(basis: str) -> ss.Circuit:
    """Four-qubit GHZ preparation: |+000> then a CNOT fan, then readout."""
    if basis not in ("z", "x"):
        raise ValueError("basis must be 'z' or 'x'")
    ins = [ss.prepx(0), ss.prepz(1), ss.prepz(2), ss.prepz(3)]
    ins += [ss.cnot(0, t) for t in (1, 2, 3)]
    meas = ss.measz if basis == "z" else ss.measx
    ins += [meas(q, f"d{q}") for q in range(4)]
    return ss.Circuit(4, tuple(ins))


@dataclass(frozen=True)
class FrameRecipe:
    """Shot-independent bookkeeping for a logical GHZ pipeline."""

    code: CssCode
    basis: str
    x_check_tags: tuple[str, ...]
    xbar_tags: tuple[str, ...]
    data_tags: tuple[str, ...]
    measured_logical: int
    permutation: tuple[int, ...]      # composed data-qubit relabeling
    frame_map: BitMatrix              # recorded check outcomes -> final frame
    parity_check_coeffs: int          # stabilizer part of the pulled-back X product
    meas_parity_coeffs: int           # same coefficients over final check slots
    xbar_gadget_start: int            # instruction index of the first gadget
    product_x_mask: int


@dataclass(frozen=True)
class FrameState:
    """Per-shot frame: postselection verdict, mapped check frame, parity flip."""

    accepted: bool
    x_frame: int
    xbar_sign: int
    parity_frame: int = 0


def _compose(p1, p2):
    return tuple(p2[p1[q]] for q in range(len(p1)))


def _frame_map(code: CssCode, perm) -> BitMatrix:
    imgs = [apply_permutation(code.hx.row(c), perm) for c in range(code.hx.rows)]
    basis = BitMatrix.from_ints(imgs, code.n)
    rows = []
    for r in range(code.hx.rows):
        coeff = basis.solution_with_coefficients(code.hx.row(r))
        if coeff is None:
            raise ValueError("relabeling does not preserve the X check space")
        rows.append(coeff)
    return BitMatrix.from_ints(rows, code.hx.rows)


def _extend_perm(data_perm, total):
    return tuple(data_perm) + tuple(range(len(data_perm), total))


def _ghz_pipeline(code: CssCode, basis: str, data_perms, measured_logical: int,
                  schedule: Schedule) -> tuple[ss.Circuit, FrameRecipe]:
    if basis not in ("z", "x"):
        raise ValueError("basis must be 'z' or 'x'")
    n = code.n
    total = n + ANCILLA_COUNT
    ins = [ss.prepz(q) for q in range(n)]
    g = 0
    for r, order in enumerate(schedule.x_orders):
        ins += _x_gadget(n + (g % ANCILLA_COUNT), order, f"x{r}")
        g += 1
    xbar_start = len(ins)
    support = mask_to_support(code.logicals_x[measured_logical])
    xbar_tags = []
    for rep in range(3):
        tag = f"xbar_{rep}"
        ins += _logical_x_gadget(n + (g % ANCILLA_COUNT), support, tag)
        xbar_tags.append(tag)
        g += 1
    composed = tuple(range(n))
    for p in data_perms:
        ins.append(ss.relabel(_extend_perm(p, total)))
        composed = _compose(composed, p)
    meas = ss.measz if basis == "z" else ss.measx
    ins += [meas(q, f"d{q}") for q in range(n)]

    product_mask = 0
    for m in code.logicals_x:
        product_mask ^= m
    # The X-product readout operator pulls back through the relabelings to
    # the measured logical times an X-stabilizer element; the recorded
    # extraction outcomes over that element join the parity frame.
    inverse = [0] * n
    for q, img in enumerate(composed):
        inverse[img] = q
    pulled = apply_permutation(product_mask, inverse)
    basis_m = BitMatrix.from_ints(list(code.hx.data) + list(code.logicals_x), n)
    coeff = basis_m.solution_with_coefficients(pulled)
    if coeff is None or (coeff >> code.hx.rows) != (1 << measured_logical):
        raise ValueError("relabelings do not route the X product onto the measured logical")
    lam = coeff & ((1 << code.hx.rows) - 1)
    frame_map = _frame_map(code, composed)
    # A flagged final check slot implies a wrong recorded outcome; the same
    # stabilizer coefficients expressed over final slots let the decoder's
    # measurement-error estimate repair the parity frame.
    mu = frame_map.transpose().solve(lam)
    if mu is None:
        raise ValueError("frame map is not invertible")
    recipe = FrameRecipe(
        code=code,
        basis=basis,
        x_check_tags=tuple(f"x{r}" for r in range(code.hx.rows)),
        xbar_tags=tuple(xbar_tags),
        data_tags=tuple(f"d{q}" for q in range(n)),
        measured_logical=measured_logical,
        permutation=composed,
        frame_map=frame_map,
        parity_check_coeffs=lam,
        meas_parity_coeffs=mu,
        xbar_gadget_start=xbar_start,
        product_x_mask=product_mask,
    )
    return ss.Circuit(total, tuple(ins)), recipe


def _mirror_columns(nrows, ncols):
    return tuple((q // ncols) * ncols + (ncols - 1 - (q % ncols)) for q in range(nrows * ncols))


def _mirror_rows(nrows, ncols):
    return tuple((nrows - 1 - (q // ncols)) * ncols + (q % ncols) for q in range(nrows * ncols))


def _swap_blocks(size, block_a, block_b, width):
    """Permutation swapping index blocks [a*w,(a+1)*w) and [b*w,(b+1)*w) pairwise."""
    perm = list(range(size))
    for t in range(width):
        perm[block_a * width + t] = block_b * width + t
        perm[block_b * width + t] = block_a * width + t
    return tuple(perm)


def vertical_fold_swap(nrows: int = 5, ncols: int = 5) -> tuple[int, ...]:
    """Mirror the lattice columns; on the flagship code this is the
    column swap {1,2} <-> {5,4}."""
    return _mirror_columns(nrows, ncols)


def horizontal_fold_swap(nrows: int = 5, ncols: int = 5) -> tuple[int, ...]:
    return _mirror_rows(nrows, ncols)


def logical_ghz_circuit(code: CssCode | None = None, basis: str = "z") -> tuple[ss.Circuit, FrameRecipe]:
    """Full logical GHZ pipeline on the 25-qubit code.

    Transversal |0> init, X-check extraction in zigzag order, triple
    measurement of the third logical X (postselect on agreement, sign
    tracked offline), the vertical then horizontal fold-swap relabelings,
    and transversal readout in the requested basis.
    """
    if code is None:
        code = build_25_4_3()
    ref = build_25_4_3()
    if code.hx != ref.hx or code.hz != ref.hz:
        raise ValueError("logical pipeline is defined for the 25-qubit code")
    perms = (vertical_fold_swap(), horizontal_fold_swap())
    return _ghz_pipeline(code, basis, perms, measured_logical=2,
                         schedule=zigzag_schedule(code))


def generalized_ghz_circuit(code: CssCode, basis: str = "z") -> tuple[ss.Circuit, FrameRecipe]:
    """GHZ pipeline on a generalized-family code (2(l-1) logical qubits).

    Measures the logical X of the last-row, first-column logical qubit
    three times, then applies the column patch-swap (pairwise CNOTs
    within rows) and the last-two-row patch-swap (fanout CNOTs from the
    last logical row) as relabelings, and reads out transversally.
    """
    l = code.meta_get("l")
    c = code.meta_get("c")
    nv = code.meta_get("nv")
    nh = code.meta_get("nh")
    if None in (l, c, nv, nh):
        raise ValueError("code does not carry generalized-family metadata")
    col_swap = []
    row_swap = []
    for q in range(nv * nh):
        i, j = q // nh, q % nh
        jb, jt = j // c, j % c
        if jb == 1:
            j2 = 2 * c + jt
        elif jb == 2:
            j2 = c + jt
        else:
            j2 = j
        col_swap.append(i * nh + j2)
        ib, it = i // c, i % c
        if ib == l - 2:
            i2 = (l - 1) * c + it
        elif ib == l - 1:
            i2 = (l - 2) * c + it
        else:
            i2 = i
        row_swap.append(i2 * nh + j)
    measured = (l - 2) * 2
    return _ghz_pipeline(code, basis, (tuple(col_swap), tuple(row_swap)),
                         measured_logical=measured, schedule=zigzag_schedule(code))


def circuit_report(circuit: ss.Circuit) -> dict:
    """Data/ancilla/entangling-gate counts for a pipeline circuit."""
    data = set()
    used = set()
    for ins in circuit.instructions:
        used.update(ins.qubits)
        if ins.op in ("MEASZ", "MEASX") and ins.tag.startswith("d"):
            data.add(ins.qubits[0])
    return {
        "data_qubits": len(data),
        "ancilla_qubits": len(used - data),
        "two_qubit_gates": circuit.two_qubit_gate_count(),
    }


# --- per-shot frame handling ------------------------------------------------


def frame_from_shot(recipe: FrameRecipe, record: ss.ShotRecord) -> FrameState:
    m = 0
    for c, tag in enumerate(recipe.x_check_tags):
        m |= record[tag] << c
    outs = [record[tag] for tag in recipe.xbar_tags]
    accepted = len(set(outs)) == 1
    sign = outs[0] if accepted else 0
    return FrameState(
        accepted=accepted,
        x_frame=recipe.frame_map.mul_vec(m),
        xbar_sign=sign,
        parity_frame=sign ^ parity(recipe.parity_check_coeffs, m),
    )


def readout_reduce(code: CssCode, basis: str, data_bits, frame: FrameState | None):
    """Reconstruct the final syndrome and raw logical bits from a readout.

    Z basis: syndrome hz*b flags X errors and the raw logicals are the
    individual logical-Z parities.  X basis: syndrome hx*b is XORed with
    the mapped extraction frame and the raw logical is the all-logical
    X-product parity with the tracked sign folded in.
    """
    if len(data_bits) != code.n:
        raise ValueError(f"expected {code.n} data bits, got {len(data_bits)}")
    b = 0
    for q, bit in enumerate(data_bits):
        if bit & 1:
            b |= 1 << q
    if basis == "z":
        syndrome = code.hz.mul_vec(b)
        raw = tuple(parity(b, lz) for lz in code.logicals_z)
        return syndrome, raw
    if basis == "x":
        product = 0
        for m in code.logicals_x:
            product ^= m
        syndrome = code.hx.mul_vec(b)
        sign = 0
        if frame is not None:
            syndrome ^= frame.x_frame
            sign = frame.parity_frame
        return syndrome, (parity(b, product) ^ sign,)
    raise ValueError("basis must be 'z' or 'x'")


# --- schedule validation ------------------------------------------------------


@dataclass
class ScheduleReport:
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def _span_set(h: BitMatrix) -> list[int]:
    basis = [r for r in h.rref()[0].data if r]
    if len(basis) > MAX_COSET_RANK:
        raise ValueError("stabilizer rank too large for coset enumeration")
    span = [0]
    for b in basis:
        span += [s ^ b for s in span]
    return span


def _min_coset_rep(v: int, span) -> int:
    best = v
    bw = v.bit_count()
    for s in span:
        u = v ^ s
        w = u.bit_count()
        if w < bw or (w == bw and u < best):
            best, bw = u, w
    return best


def validate_schedule(code: CssCode, schedule: Schedule) -> ScheduleReport:
    """Flag gadget faults that would shortcut the code distance.

    Enumerates every single fault in the extraction circuit, reduces the
    propagated data error modulo same-type stabilizers, and reports a
    violation when the residue is a logical operator outright or, for
    d >= 3, when one extra single-qubit fault would complete one.
    """
    circuit = syndrome_extraction_circuit(code, schedule, which="both")
    n = code.n
    data_mask = (1 << n) - 1
    span_x = _span_set(code.hx)
    span_z = _span_set(code.hz)
    set_x = set(span_x)
    set_z = set(span_z)
    d = code.d if code.d is not None else 3
    violations = []
    for case in ss.enumerate_single_faults(circuit):
        for v, h_other, span, stab_set in (
            (case.final_x & data_mask, code.hz, span_x, set_x),
            (case.final_z & data_mask, code.hx, span_z, set_z),
        ):
            if not v:
                continue
            rep = _min_coset_rep(v, span)
            if rep == 0:
                continue
            if h_other.mul_vec(rep) == 0:
                violations.append((case.instruction_index, case.kind, case.pauli,
                                   "single fault is a logical operator"))
                continue
            if rep.bit_count() >= 2 and d >= 3:
                syn = h_other.mul_vec(rep)
                for q in range(n):
                    u = rep ^ (1 << q)
                    if u and h_other.mul_vec(u) == 0 and u not in stab_set:
                        violations.append((case.instruction_index, case.kind, case.pauli,
                                           f"one more fault at qubit {q} completes a logical"))
                        break
    return ScheduleReport(violations)
