"""Monte Carlo harness for the GHZ experiments.

Runs the physical and logical pipelines under the three-rate noise model,
applies postselection and decoding, and aggregates mismatch rates with
binomial standard errors and GHZ fidelity bounds.  Shot records can be
archived as JSON lines and re-decoded without re-simulation.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import protocol as pr
from . import stab_sim as ss
from .code_factory import build_25_4_3, build_generalized
from .css_code import CssCode, mask_to_support
from .decoder import DecodeProblem, MinSumDecoder, osd_combination_sweep
from .f2linalg import BitMatrix, parity

MODES = ("physical", "logical", "logical-noqec", "generalized")
PRIOR_FLOOR = 1e-6
PRIOR_CEIL = 0.49
# fraction of the 15 two-qubit depolarizing Paulis carrying a given
# component on a given leg
_LEG_FRACTION = 8.0 / 15.0


@dataclass(frozen=True)
class RunConfig:
    mode: str = "logical"
    shots_z: int = 1000
    shots_x: int = 1000
    noise: ss.NoiseModel = ss.NoiseModel.zero()
    seed: int = 0
    l: int = 3
    c: int = 1
    bp_iters: int = 10
    osd_depth: int = 14
    prior_mode: str = "marginal"
    threads: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.shots_z < 0 or self.shots_x < 0:
            raise ValueError("shot counts must be >= 0")
        if self.prior_mode not in ("marginal", "uniform"):
            raise ValueError("prior_mode must be 'marginal' or 'uniform'")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode, "shots_z": self.shots_z, "shots_x": self.shots_x,
            "p1": self.noise.p1, "p2": self.noise.p2, "p_spam": self.noise.p_spam,
            "seed": self.seed, "l": self.l, "c": self.c,
            "bp_iters": self.bp_iters, "osd_depth": self.osd_depth,
            "prior_mode": self.prior_mode, "threads": self.threads,
        }

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:16]

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        noise = ss.NoiseModel(float(d.get("p1", 0.0)), float(d.get("p2", 0.0)),
                              float(d.get("p_spam", 0.0)))
        return cls(
            mode=d.get("mode", "logical"),
            shots_z=int(d.get("shots_z", 1000)),
            shots_x=int(d.get("shots_x", 1000)),
            noise=noise,
            seed=int(d.get("seed", 0)),
            l=int(d.get("l", 3)),
            c=int(d.get("c", 1)),
            bp_iters=int(d.get("bp_iters", 10)),
            osd_depth=int(d.get("osd_depth", 14)),
            prior_mode=d.get("prior_mode", "marginal"),
            threads=int(d.get("threads", 1)),
        )

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        d = {}
        with open(path) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"bad config line: {line!r}")
                key, val = (s.strip() for s in line.split("=", 1))
                d[key] = val
        return cls.from_dict(d)


def standard_error(p: float, n: int) -> float:
    """Binomial standard error sqrt(p(1-p)/n)."""
    if n <= 0:
        raise ValueError("need at least one sample")
    return math.sqrt(p * (1.0 - p) / n)


@dataclass(frozen=True)
class FidelityBounds:
    lower: float
    upper: float
    sigma_lower: float
    sigma_upper: float


def fidelity_bounds(z_mismatch: float, x_mismatch: float,
                    sigma_z: float = 0.0, sigma_x: float = 0.0) -> FidelityBounds:
    """GHZ fidelity interval from the two mismatch rates.

    The upper bound is one minus the Z-disagreement probability; the
    lower bound subtracts the X-parity failure as well, with the two
    standard errors combined in quadrature.
    """
    for r in (z_mismatch, x_mismatch):
        if not 0.0 <= r <= 1.0:
            raise ValueError(f"mismatch rate {r} outside [0, 1]")
    upper = 1.0 - z_mismatch
    lower = 1.0 - z_mismatch - x_mismatch
    return FidelityBounds(lower, upper, math.hypot(sigma_z, sigma_x), sigma_z)


@dataclass
class BasisStats:
    shots: int = 0
    accepted: int = 0
    mismatches: int = 0

    @property
    def acceptance(self) -> float | None:
        return self.accepted / self.shots if self.shots else None

    @property
    def p(self) -> float | None:
        return self.mismatches / self.accepted if self.accepted else None

    @property
    def sigma(self) -> float | None:
        return standard_error(self.p, self.accepted) if self.accepted else None

    def to_json(self) -> dict:
        return {"shots": self.shots, "accepted": self.accepted,
                "mismatches": self.mismatches, "p": self.p, "sigma": self.sigma}


@dataclass
class RunSummary:
    config: RunConfig
    z: BasisStats
    x: BasisStats

    @property
    def fidelity(self) -> FidelityBounds | None:
        if self.z.p is None or self.x.p is None:
            return None
        return fidelity_bounds(self.z.p, self.x.p, self.z.sigma, self.x.sigma)

    def to_json(self) -> dict:
        fb = self.fidelity
        return {
            "config": self.config.to_dict(),
            "config_hash": self.config.digest(),
            "z": self.z.to_json(),
            "x": self.x.to_json(),
            "fidelity": None if fb is None else {
                "lower": fb.lower, "upper": fb.upper,
                "sigma_lower": fb.sigma_lower, "sigma_upper": fb.sigma_upper,
            },
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RunSummary":
        cfg = RunConfig.from_dict(obj["config"])
        z = BasisStats(obj["z"]["shots"], obj["z"]["accepted"], obj["z"]["mismatches"])
        x = BasisStats(obj["x"]["shots"], obj["x"]["accepted"], obj["x"]["mismatches"])
        return cls(cfg, z, x)


# --- priors ------------------------------------------------------------------


def _gate_counts(circuit: ss.Circuit, n_data: int):
    cnots = [0] * n_data
    hs = [0] * n_data
    for ins in circuit.instructions:
        if ins.op == "CNOT":
            for q in ins.qubits:
                if q < n_data:
                    cnots[q] += 1
        elif ins.op == "H" and ins.qubits[0] < n_data:
            hs[ins.qubits[0]] += 1
    return cnots, hs


def data_error_priors(circuit: ss.Circuit, nm: ss.NoiseModel, n_data: int, basis: str):
    """Per-qubit marginal error probability from gate counts.

    Counts SPAM events plus depolarizing legs on gates touching the
    qubit; hook propagation is deliberately ignored (documented gap).
    """
    cnots, hs = _gate_counts(circuit, n_data)
    spam = nm.p_spam * (2.0 if basis == "z" else 1.0)
    out = []
    for q in range(n_data):
        p = spam + cnots[q] * nm.p2 * _LEG_FRACTION + hs[q] * nm.p1 * (2.0 / 3.0)
        out.append(min(max(p, PRIOR_FLOOR), PRIOR_CEIL))
    return tuple(out)


def frame_error_priors(code: CssCode, nm: ss.NoiseModel):
    """Per-X-check probability of a wrong recorded extraction outcome."""
    out = []
    for r in range(code.hx.rows):
        w = code.hx.row(r).bit_count()
        p = 2.0 * nm.p_spam + w * nm.p2 * _LEG_FRACTION
        out.append(min(max(p, PRIOR_FLOOR), PRIOR_CEIL))
    return tuple(out)


# --- decoding paths ----------------------------------------------------------


class _LogicalDecoders:
    """Reusable decode state for one (code, pipeline, noise) combination.

    The Z basis decodes X errors on the plain Z-check matrix.  The X
    basis decodes the frame-corrected syndrome on the X-check matrix
    augmented with one column per check, so a wrong recorded extraction
    outcome can be attributed to the measurement record instead of
    forcing a spurious data correction; flagged record bits also repair
    the offline parity frame through the recipe's stabilizer
    coefficients.  Priors follow each qubit through the relabelings.
    """

    def __init__(self, code: CssCode, circuit: ss.Circuit, cfg: RunConfig, basis: str,
                 recipe: pr.FrameRecipe | None = None):
        nm = cfg.noise
        self.code = code
        self.basis = basis
        self.recipe = recipe
        self.data_mask = (1 << code.n) - 1
        if cfg.prior_mode == "uniform":
            data_priors = (0.01,) * code.n
        else:
            data_priors = data_error_priors(circuit, nm, code.n, basis)
            if recipe is not None:
                permuted = [0.0] * code.n
                for q, img in enumerate(recipe.permutation):
                    permuted[img] = data_priors[q]
                data_priors = tuple(permuted)
        if basis == "z":
            self.h = code.hz
            self.priors = data_priors
        else:
            if cfg.prior_mode == "uniform":
                frame_priors = (0.01,) * code.hx.rows
            else:
                frame_priors = frame_error_priors(code, nm)
            self.h = code.hx.hstack(BitMatrix.identity(code.hx.rows))
            self.priors = data_priors + frame_priors
        self.bp = MinSumDecoder(self.h, self.priors, iters=cfg.bp_iters)
        self.osd_depth = cfg.osd_depth
        self.product_mask = 0
        for m in code.logicals_x:
            self.product_mask ^= m

    def estimate(self, syndrome: int) -> int:
        res = self.bp.decode(syndrome)
        osd = osd_combination_sweep(
            DecodeProblem(self.h, self.priors, syndrome), res.posteriors,
            depth=self.osd_depth)
        if res.converged and res.soft_weight < osd.soft_weight - 1e-12:
            return res.error_estimate
        return osd.error_estimate

    def corrected_mismatch(self, syndrome: int, raw, qec: bool) -> bool:
        if self.basis == "z":
            bits = list(raw)
            if qec and syndrome:
                est = self.estimate(syndrome)
                for i, lz in enumerate(self.code.logicals_z):
                    bits[i] ^= parity(est, lz)
            return len(set(bits)) != 1
        value = raw[0]
        if qec and syndrome:
            est = self.estimate(syndrome)
            value ^= parity(est & self.data_mask, self.product_mask)
            if self.recipe is not None:
                value ^= parity(est >> self.code.n, self.recipe.meas_parity_coeffs)
        return value != 0


# --- running ------------------------------------------------------------------


def _build_pipeline(cfg: RunConfig, basis: str):
    if cfg.mode == "physical":
        return pr.physical_ghz_circuit(basis), None, None
    if cfg.mode == "generalized":
        code = build_generalized(cfg.l, cfg.c)
    else:
        code = build_25_4_3()
    if cfg.mode == "generalized":
        circ, recipe = pr.generalized_ghz_circuit(code, basis)
    else:
        circ, recipe = pr.logical_ghz_circuit(code, basis)
    return circ, recipe, code


def _physical_mismatch(record: ss.ShotRecord, basis: str) -> bool:
    bits = [record[f"d{q}"] for q in range(4)]
    if basis == "z":
        return len(set(bits)) != 1
    return sum(bits) % 2 != 0


def _basis_seed(cfg: RunConfig, basis: str):
    return (cfg.seed, 0 if basis == "z" else 1)


def _run_chunk(cfg: RunConfig, basis: str, start: int, count: int, keep_records: bool):
    circ, recipe, code = _build_pipeline(cfg, basis)
    stats = BasisStats()
    records = [] if keep_records else None
    decoders = None
    qec = cfg.mode in ("logical", "generalized")
    if recipe is not None:
        decoders = _LogicalDecoders(code, circ, cfg, basis, recipe)
    shots = ss.sample_pauli_frame(circ, cfg.noise, _basis_seed(cfg, basis), count, start=start)
    for i, rec in enumerate(shots):
        stats.shots += 1
        if keep_records:
            records.append({"basis": basis, "shot": start + i, "outcomes": rec.outcomes})
        if recipe is None:
            stats.accepted += 1
            if _physical_mismatch(rec, basis):
                stats.mismatches += 1
            continue
        frame = pr.frame_from_shot(recipe, rec)
        if not frame.accepted:
            continue
        stats.accepted += 1
        bits = [rec[tag] for tag in recipe.data_tags]
        syndrome, raw = pr.readout_reduce(code, basis, bits, frame)
        if decoders.corrected_mismatch(syndrome, raw, qec):
            stats.mismatches += 1
    return stats, records


def _merge(parts):
    total = BasisStats()
    for p in parts:
        total.shots += p.shots
        total.accepted += p.accepted
        total.mismatches += p.mismatches
    return total


def run(config: RunConfig, out_dir: str | None = None) -> RunSummary:
    """Simulate, postselect, decode, and aggregate one experiment.

    With out_dir set, writes <out_dir>/<mode>/summary.json and a
    shots.jsonl archive headed by the config hash.  Results depend only
    on the config (per-shot seeding), not on thread count.
    """
    keep = out_dir is not None
    per_basis = {}
    archives = []
    for basis, shots in (("z", config.shots_z), ("x", config.shots_x)):
        if shots == 0:
            per_basis[basis] = BasisStats()
            continue
        if config.threads > 1 and not keep:
            chunk = (shots + config.threads - 1) // config.threads
            jobs = []
            with ProcessPoolExecutor(max_workers=config.threads) as pool:
                for start in range(0, shots, chunk):
                    jobs.append(pool.submit(_run_chunk, config, basis, start,
                                            min(chunk, shots - start), False))
                parts = [j.result()[0] for j in jobs]
            per_basis[basis] = _merge(parts)
        else:
            stats, records = _run_chunk(config, basis, 0, shots, keep)
            per_basis[basis] = stats
            if keep:
                archives.extend(records)
    summary = RunSummary(config, per_basis["z"], per_basis["x"])
    if out_dir is not None:
        mode_dir = os.path.join(out_dir, config.mode)
        os.makedirs(mode_dir, exist_ok=True)
        with open(os.path.join(mode_dir, "summary.json"), "w") as fh:
            json.dump(summary.to_json(), fh, indent=1, sort_keys=True)
        with open(os.path.join(mode_dir, "shots.jsonl"), "w") as fh:
            fh.write(json.dumps({"config_hash": config.digest(),
                                 "config": config.to_dict()}) + "\n")
            for row in archives:
                fh.write(json.dumps(row, sort_keys=True) + "\n")
    return summary


# --- reporting -----------------------------------------------------------------


_MODE_LABELS = (
    ("physical", "Physical"),
    ("logical-noqec", "Logical (no QEC)"),
    ("logical", "Logical (with QEC)"),
    ("generalized", "Generalized"),
)


def _fmt_pct(p, sigma):
    if p is None:
        return "no data"
    return f"{100 * p:.1f} +- {100 * sigma:.1f}"


def report(summaries, fmt: str = "text") -> str:
    """Render a comparison of the available runs.

    `summaries` maps mode name to RunSummary; missing modes get explicit
    no-data markers.  Formats: text, json, csv.
    """
    if fmt == "json":
        return json.dumps({m: s.to_json() for m, s in sorted(summaries.items())},
                          indent=1, sort_keys=True)
    if fmt == "csv":
        lines = ["mode,basis,shots,accepted,mismatches,p,sigma"]
        for mode, s in sorted(summaries.items()):
            for basis, st in (("z", s.z), ("x", s.x)):
                lines.append(
                    f"{mode},{basis},{st.shots},{st.accepted},{st.mismatches},"
                    f"{'' if st.p is None else repr(st.p)},"
                    f"{'' if st.sigma is None else repr(st.sigma)}")
        return "\n".join(lines) + "\n"
    if fmt != "text":
        raise ValueError("format must be text, json, or csv")
    width = max(len(label) for _, label in _MODE_LABELS) + 2
    lines = ["GHZ state preparation", "",
             f"{'experiment':<{width}}{'z mismatch (%)':>18}{'x mismatch (%)':>18}"]
    for mode, label in _MODE_LABELS:
        if mode not in summaries:
            continue
        s = summaries[mode]
        lines.append(f"{label:<{width}}{_fmt_pct(s.z.p, s.z.sigma):>18}"
                     f"{_fmt_pct(s.x.p, s.x.sigma):>18}")
    lines.append("")
    for mode, label in _MODE_LABELS:
        if mode not in summaries:
            continue
        s = summaries[mode]
        fb = s.fidelity
        if fb is None:
            lines.append(f"{label}: no data")
            continue
        lines.append(
            f"{label}: {100 * fb.lower:.1f} +- {100 * fb.sigma_lower:.1f} <= F <= "
            f"{100 * fb.upper:.1f} +- {100 * fb.sigma_upper:.1f}  (%)")
        if mode in ("logical", "logical-noqec", "generalized"):
            az = s.z.acceptance
            ax = s.x.acceptance
            if az is not None and ax is not None:
                lines.append(f"{label} acceptance: z {100 * az:.1f}%  x {100 * ax:.1f}%")
    return "\n".join(lines) + "\n"


def summary_from_rates(mode: str, z_p: float, z_n: int, x_p: float, x_n: int) -> RunSummary:
    """Summary object for externally given mismatch rates (for reporting)."""
    cfg = RunConfig(mode=mode if mode in MODES else "logical",
                    shots_z=z_n, shots_x=x_n)
    z = BasisStats(z_n, z_n, round(z_p * z_n))
    x = BasisStats(x_n, x_n, round(x_p * x_n))
    return RunSummary(cfg, z, x)


# --- exhaustive single-fault ledger ---------------------------------------------


@dataclass
class LedgerEntry:
    instruction_index: int
    kind: str
    pauli: str
    outcome: str          # "correct" | "rejected" | "nonft-set" | "extra"


@dataclass
class LedgerReport:
    basis: str
    entries: list

    def count(self, outcome: str) -> int:
        return sum(1 for e in self.entries if e.outcome == outcome)

    def extras(self) -> list:
        return [e for e in self.entries if e.outcome == "extra"]


def fault_tolerance_ledger(basis: str, cfg: RunConfig | None = None) -> LedgerReport:
    """Classify every single fault in the logical pipeline.

    Each fault either decodes correctly, is rejected by the triple
    logical-X postselection, or corrupts the output.  The known
    non-fault-tolerant channel of the unprotected logical measurement is
    a Z-type component on the measured logical's support anywhere up to
    the end of its gadget triple; such faults either flip all three
    outcomes coherently (defeating the postselection) or leave the
    measurement record inconsistent with the state.  Corrupting faults
    outside that set are reported as "extra".
    """
    if cfg is None:
        cfg = RunConfig(mode="logical", noise=ss.NoiseModel(3e-5, 2e-3, 2e-3))
    code = build_25_4_3()
    circ, recipe = pr.logical_ghz_circuit(code, basis)
    decoders = _LogicalDecoders(code, circ, cfg, basis, recipe)
    xbar_support = set(mask_to_support(code.logicals_x[recipe.measured_logical]))
    gadget_end = next(i for i, ins in enumerate(circ.instructions) if ins.op == "RELABEL")
    entries = []
    for case in ss.enumerate_single_faults(circ):
        frame = pr.frame_from_shot(recipe, case.record)
        if not frame.accepted:
            entries.append(LedgerEntry(case.instruction_index, case.kind, case.pauli, "rejected"))
            continue
        bits = [case.record[tag] for tag in recipe.data_tags]
        syndrome, raw = pr.readout_reduce(code, basis, bits, frame)
        if not decoders.corrected_mismatch(syndrome, raw, qec=True):
            entries.append(LedgerEntry(case.instruction_index, case.kind, case.pauli, "correct"))
            continue
        outcome = "extra"
        if case.instruction_index < gadget_end:
            ins = circ.instructions[case.instruction_index]
            touches = []
            if case.kind == "gate2":
                touches = [(ins.qubits[0], case.pauli[0]), (ins.qubits[1], case.pauli[1])]
            elif case.kind in ("gate1", "prep"):
                touches = [(ins.qubits[0], case.pauli)]
            if any(q in xbar_support and p in ("Z", "Y") for q, p in touches):
                outcome = "nonft-set"
        entries.append(LedgerEntry(case.instruction_index, case.kind, case.pauli, outcome))
    return LedgerReport(basis, entries)
