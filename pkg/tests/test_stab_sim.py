import pytest

from f2qec import stab_sim as ss
from f2qec.protocol import physical_ghz_circuit, syndrome_extraction_circuit, zigzag_schedule
from f2qec.code_factory import build_25_4_3


def test_physical_ghz_z_outcomes_all_equal():
    circ = physical_ghz_circuit("z")
    for seed in range(25):
        rec = ss.simulate_tableau(circ, seed)
        vals = {rec[f"d{q}"] for q in range(4)}
        assert len(vals) == 1


def test_physical_ghz_x_outcomes_even_parity():
    circ = physical_ghz_circuit("x")
    for seed in range(25):
        rec = ss.simulate_tableau(circ, seed)
        assert sum(rec[f"d{q}"] for q in range(4)) % 2 == 0


def test_prepz_then_measz_is_zero():
    circ = ss.Circuit(1, (ss.prepz(0), ss.measz(0, "m")))
    assert ss.simulate_tableau(circ, 0)["m"] == 0


def test_tableau_seed_determinism():
    circ = physical_ghz_circuit("z")
    a = ss.simulate_tableau(circ, 42)
    b = ss.simulate_tableau(circ, 42)
    assert a.outcomes == b.outcomes


def test_text_ir_round_trip():
    circ = ss.Circuit(4, (
        ss.prepx(0), ss.prepz(1), ss.h(2), ss.cnot(0, 1),
        ss.inject("Y", 3), ss.relabel((1, 0, 3, 2)), ss.barrier(),
        ss.measz(1, "a"), ss.measx(0, "b"),
    ))
    text = circ.to_text()
    again = ss.Circuit.from_text(text)
    assert again == circ
    assert again.to_text() == text


def test_text_ir_rejects_garbage():
    with pytest.raises(ValueError):
        ss.Circuit.from_text("CNOT 0 1\n")  # missing header
    with pytest.raises(ValueError):
        ss.Circuit.from_text("QUBITS 2\nWIBBLE 0\n")


def test_circuit_validation():
    with pytest.raises(ValueError):
        ss.Circuit(2, (ss.measz(0, "m"), ss.measz(1, "m")))  # duplicate tag
    with pytest.raises(ValueError):
        ss.Circuit(2, (ss.cnot(1, 1),))
    with pytest.raises(ValueError):
        ss.Circuit(1, (ss.h(3),))


def test_zero_noise_frame_matches_reference():
    circ = physical_ghz_circuit("z")
    ref = ss.reference_record(circ, 9)
    for rec in ss.sample_pauli_frame(circ, ss.NoiseModel.zero(), 9, 30):
        assert rec.outcomes == ref.outcomes


def test_inject_pauli_flip_base_case():
    circ = ss.Circuit(2, (ss.prepz(0), ss.prepz(1), ss.inject("X", 0),
                          ss.measz(0, "a"), ss.measz(1, "b")))
    rec = ss.simulate_tableau(circ, 0)
    assert rec["a"] == 1 and rec["b"] == 0
    frame = ss.sample_pauli_frame(circ, ss.NoiseModel.zero(), 0, 1)[0]
    assert frame["a"] == 1 and frame["b"] == 0


def test_cnot_propagation_rules():
    # X on control spreads to target
    circ = ss.Circuit(2, (ss.prepz(0), ss.prepz(1), ss.inject("X", 0),
                          ss.cnot(0, 1), ss.measz(0, "a"), ss.measz(1, "b")))
    rec = ss.simulate_tableau(circ, 0)
    assert (rec["a"], rec["b"]) == (1, 1)
    # Z on target spreads to control
    circ = ss.Circuit(2, (ss.prepx(0), ss.prepx(1), ss.inject("Z", 1),
                          ss.cnot(0, 1), ss.measx(0, "a"), ss.measx(1, "b")))
    rec = ss.simulate_tableau(circ, 0)
    assert (rec["a"], rec["b"]) == (1, 1)


def test_relabel_and_inverse_is_identity():
    perm = (2, 0, 1, 3)
    inv = (1, 2, 0, 3)
    base = [ss.prepz(0), ss.prepz(1), ss.prepz(2), ss.prepz(3), ss.inject("X", 2)]
    plain = ss.Circuit(4, tuple(base + [ss.measz(q, f"d{q}") for q in range(4)]))
    round_trip = ss.Circuit(4, tuple(base + [ss.relabel(perm), ss.relabel(inv)]
                                     + [ss.measz(q, f"d{q}") for q in range(4)]))
    assert ss.simulate_tableau(plain, 0).outcomes == ss.simulate_tableau(round_trip, 0).outcomes


def test_relabel_moves_errors():
    circ = ss.Circuit(2, (ss.prepz(0), ss.prepz(1), ss.inject("X", 0),
                          ss.relabel((1, 0)), ss.measz(0, "a"), ss.measz(1, "b")))
    rec = ss.simulate_tableau(circ, 3)
    assert (rec["a"], rec["b"]) == (0, 1)


def test_fault_enumeration_count_formula():
    code = build_25_4_3()
    circ = syndrome_extraction_circuit(code, zigzag_schedule(code), "X")
    expected = 38 * 15 + 10 + 10  # CNOTs, ancilla preps, ancilla measurements
    assert circ.fault_location_count() == expected
    cases = ss.enumerate_single_faults(circ)
    assert len(cases) == expected
    # deterministic ordering and fault annotations
    assert [c.pauli for c in cases[:4]] == ["Z", "IX", "IY", "IZ"]
    assert all(c.record.fault == (c.instruction_index, c.kind, c.pauli) for c in cases[:20])


def test_ancilla_x_before_first_cnot_is_stabilizer():
    code = build_25_4_3()
    sched = zigzag_schedule(code)
    anc = code.n
    order = sched.x_orders[8]  # a weight-6 check
    ins = [ss.prepx(anc), ss.inject("X", anc)]
    ins += [ss.cnot(anc, q) for q in order]
    ins += [ss.measx(anc, "m")]
    circ = ss.Circuit(code.n + 1, tuple(ins))
    _, fx, _ = ss.noiseless_frames(circ)
    data_error = fx & ((1 << code.n) - 1)
    assert data_error == code.hx.row(8)
    assert code.hx.in_row_space(data_error)


def test_ancilla_z_mid_gadget_flips_only_that_outcome():
    code = build_25_4_3()
    sched = zigzag_schedule(code)
    circ = syndrome_extraction_circuit(code, sched, "X")
    ref = ss.reference_record(circ, 0)
    flip_cases = [c for c in ss.enumerate_single_faults(circ)
                  if c.kind == "gate2" and c.pauli == "ZI"]
    case = flip_cases[0]
    diff = {t for t in circ.tags() if case.record[t] != ref[t]}
    assert len(diff) == 1


def test_noisy_expansion_matches_frame_sampler_statistically():
    # identical channels driven two ways must agree on a simple rate
    import numpy as np

    circ = ss.Circuit(3, (
        ss.prepz(0), ss.prepz(1), ss.prepz(2),
        ss.cnot(0, 1), ss.cnot(1, 2),
        ss.measz(0, "a"), ss.measz(1, "b"), ss.measz(2, "c"),
    ))
    nm = ss.NoiseModel(0.05, 0.05, 0.05)
    shots = 4000
    frame_rate = sum(
        any(rec[t] for t in ("a", "b", "c"))
        for rec in ss.sample_pauli_frame(circ, nm, 1, shots)) / shots
    rng = np.random.default_rng(99)
    hits = 0
    for _ in range(shots):
        rec = ss.simulate_tableau(ss.noisy_expansion(circ, nm, rng), 0)
        hits += any(rec[t] for t in ("a", "b", "c"))
    tableau_rate = hits / shots
    sigma = (frame_rate * (1 - frame_rate) / shots) ** 0.5 * 2 ** 0.5
    assert abs(frame_rate - tableau_rate) < 5 * max(sigma, 1e-3)


def test_shot_rng_partitionable():
    circ = physical_ghz_circuit("z")
    nm = ss.NoiseModel(0.01, 0.02, 0.03)
    whole = ss.sample_pauli_frame(circ, nm, 5, 20)
    first = ss.sample_pauli_frame(circ, nm, 5, 10)
    second = ss.sample_pauli_frame(circ, nm, 5, 10, start=10)
    assert [r.outcomes for r in whole] == [r.outcomes for r in first + second]


def test_noise_model_validation():
    with pytest.raises(ValueError):
        ss.NoiseModel(p1=-0.1)
    with pytest.raises(ValueError):
        ss.NoiseModel(p2=1.5)
    assert ss.NoiseModel.zero().is_zero()
