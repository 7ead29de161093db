"""
Checkpointed execution: a snapshot of the computational-basis distribution
after every gate, each compared against the one before it.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import __version__
from .analysis import (
    HPairReport,
    NaturalMajorizationReport,
    hadamard_interference,
    hpair_report,
    interference_residuals,
)
from .circuits import (
    GroverKernel,
    Phase,
    bit_reverse_indices,
    bit_reversal,
    build_pea_register_state,
    expand_grover,
    final_probabilities_closed_form,
    grover_angle,
    grover_kernel,
    grover_trajectory,
    pea_preparation,
    qft_canonical,
)
from .distmaj import (
    DEFAULT_TOL,
    NON_DECREASING,
    NON_INCREASING,
    MajorizationVerdict,
    Relation,
    as_distribution,
    compare,
    compare_cumsums,
    sorted_cumsum,
)
from .errors import DomainError, InvariantError
from .statevec import (
    DIAGONAL_GATES,
    Circuit,
    Hadamard,
    StateVector,
    apply_gate,
    entanglement_entropy,
    new_basis_state,
    probabilities,
)

MAX_QUBITS = 14
CLOSED_FORM_TOL = 1e-10


@dataclass(frozen=True)
class TraceOptions:
    tol: float = DEFAULT_TOL
    struct_tol: float = 1e-12
    entropy_cut: tuple[int, ...] | None = None
    hpair: bool = True
    natural: bool = True
    dense_max_qubits: int = 6

    def tolerances(self) -> dict:
        return {"compare": self.tol, "structural": self.struct_tol, "closed_form": CLOSED_FORM_TOL}


@dataclass(frozen=True, eq=False)
class Checkpoint:
    step: int
    stage: str
    gate: object | None
    distribution: np.ndarray
    verdict: MajorizationVerdict | None = None
    hpair: HPairReport | None = None
    natural: NaturalMajorizationReport | None = None
    entropy: float | None = None
    distribution_unchanged: bool = False
    in_scope: bool = True


@dataclass(frozen=True, eq=False)
class Trace:
    meta: dict
    checkpoints: tuple
    summary: dict

    @property
    def theorem_holds(self) -> bool:
        return self.summary["theorem_holds"]

    @property
    def final_distribution(self) -> np.ndarray:
        return self.checkpoints[-1].distribution

    def steps(self, stage: str | None = None) -> list[Checkpoint]:
        return [c for c in self.checkpoints[1:] if stage is None or c.stage == stage]

    def relations(self, stage: str | None = None) -> list[Relation]:
        return [c.verdict.relation for c in self.steps(stage)]


class _Recorder:
    def __init__(self, initial: StateVector, stage: str, options: TraceOptions):
        if initial.n_qubits > MAX_QUBITS:
            raise DomainError(f"traces are capped at {MAX_QUBITS} qubits")
        self.opts = options
        self.state = initial
        dist = as_distribution(probabilities(initial))
        self.cumsum = sorted_cumsum(dist)
        self.checkpoints = [Checkpoint(0, stage, None, dist, entropy=self._entropy(initial))]

    def _entropy(self, s: StateVector) -> float | None:
        if self.opts.entropy_cut is None:
            return None
        return entanglement_entropy(s, self.opts.entropy_cut)

    def step(self, gate, stage: str, in_scope: bool = True) -> Checkpoint:
        pre = self.state
        post = apply_gate(pre, gate)
        dist = as_distribution(probabilities(post))
        same = bool(np.array_equal(pre.moduli, post.moduli))
        cumsum = self.cumsum if same else sorted_cumsum(dist)
        verdict = compare_cumsums(self.cumsum, cumsum, self.opts.tol)
        hp = nat = None
        if isinstance(gate, Hadamard):
            if self.opts.hpair:
                hp = hpair_report(pre, gate.target, self.opts.struct_tol)
            if self.opts.natural:
                nat = hadamard_interference(
                    pre, gate.target, self.opts.struct_tol, after=post,
                    dense_max_qubits=self.opts.dense_max_qubits,
                )
        unchanged = False
        if isinstance(gate, DIAGONAL_GATES):
            unchanged = same
            if unchanged and not (verdict.relation is Relation.EQUIVALENT and verdict.max_violation < 1e-12):
                raise InvariantError("unchanged distribution did not compare as Equivalent")
        cp = Checkpoint(
            len(self.checkpoints), stage, gate, dist, verdict, hp, nat,
            self._entropy(post), unchanged, in_scope,
        )
        self.checkpoints.append(cp)
        self.state = post
        self.cumsum = cumsum
        return cp


def _summarize(checkpoints: Sequence[Checkpoint], tol: float, **extra) -> dict:
    steps = checkpoints[1:]
    scoped = [c for c in steps if c.in_scope]
    counts = Counter(str(c.verdict.relation) for c in steps)
    summary = {
        "theorem_holds": all(c.verdict.relation in NON_DECREASING for c in scoped),
        "verdict_counts": {str(r): counts.get(str(r), 0) for r in Relation},
    }
    if scoped:
        start = checkpoints[scoped[0].step - 1].distribution
        summary["cumulative_verdict"] = str(compare(start, scoped[-1].distribution, tol).relation)
    else:
        summary["cumulative_verdict"] = None
    summary.update(extra)
    return summary


def _meta(circuit: str, n: int, options: TraceOptions, **extra) -> dict:
    meta = {
        "n": n,
        "phase": None,
        "circuit": circuit,
        "tolerances": options.tolerances(),
        "entropy_cut": list(options.entropy_cut) if options.entropy_cut is not None else None,
        "version": __version__,
    }
    meta.update(extra)
    return meta


def _phase_meta(phi: Phase) -> dict:
    return {"value": phi.value, "exact": phi.literal() if phi.is_exact else None}


def run_traced(
    circuit: Circuit,
    initial: StateVector,
    options: TraceOptions | None = None,
    stages: Sequence[str] | None = None,
    name: str = "circuit",
) -> Trace:
    """Run ``circuit`` on ``initial``, snapshotting after every gate.

    Every step counts towards ``theorem_holds``.  ``stages`` optionally
    labels each gate.
    """
    options = options or TraceOptions()
    if circuit.n_qubits != initial.n_qubits:
        raise DomainError(f"{circuit.n_qubits}-qubit circuit on a {initial.n_qubits}-qubit state")
    if stages is not None and len(stages) != len(circuit):
        raise DomainError("need one stage label per gate")
    rec = _Recorder(initial, "initial", options)
    for k, g in enumerate(circuit):
        rec.step(g, stages[k] if stages is not None else name)
    return Trace(
        _meta(name, circuit.n_qubits, options),
        tuple(rec.checkpoints),
        _summarize(rec.checkpoints, options.tol),
    )


def run_pea_traced(n: int, phi, options: TraceOptions | None = None) -> Trace:
    """Full phase-estimation register: preparation from ``|0...0>``, then the canonical QFT.

    Preparation steps are recorded but excluded from ``theorem_holds``.
    """
    options = options or TraceOptions()
    if not 1 <= n <= MAX_QUBITS:
        raise DomainError(f"n must lie in [1, {MAX_QUBITS}]")
    phi = Phase.coerce(phi)
    rec = _Recorder(new_basis_state(n, 0), "preparation", options)
    for g in pea_preparation(n, phi):
        rec.step(g, "preparation", in_scope=False)
    for g in qft_canonical(n):
        rec.step(g, "qft")
    final = rec.checkpoints[-1].distribution
    closed = final_probabilities_closed_form(n, phi)
    rev = bit_reverse_indices(n)
    err = float(np.max(np.abs(final[rev] - closed)))
    extra = {
        "closed_form_max_error": err,
        "closed_form_ok": err <= CLOSED_FORM_TOL,
        "most_likely_output": int(np.argmax(final)),
        "most_likely_estimate": int(rev[np.argmax(final)]) / 2 ** n,
        "max_probability": float(np.max(final)),
    }
    return Trace(
        _meta("pea", n, options, phase=_phase_meta(phi)),
        tuple(rec.checkpoints),
        _summarize(rec.checkpoints, options.tol, **extra),
    )


def run_qft_traced(n: int, phi, double: bool = False, options: TraceOptions | None = None) -> Trace:
    """Canonical QFT on the prepared register state; ``double`` runs it a second time.

    In double mode the bit-reversal between the passes is its own step
    (stage ``reorder``) and the summary records whether every second-pass
    step is a minorization and how far the end point lies from the start.
    """
    options = options or TraceOptions()
    if not 1 <= n <= MAX_QUBITS:
        raise DomainError(f"n must lie in [1, {MAX_QUBITS}]")
    phi = Phase.coerce(phi)
    initial = build_pea_register_state(n, phi)
    q = qft_canonical(n)
    rec = _Recorder(initial, "initial", options)
    for g in q:
        rec.step(g, "qft")
    extra: dict = {}
    if double:
        rec.step(bit_reversal(n), "reorder")
        for g in q:
            rec.step(g, "qft_second")
        second = [c.verdict.relation for c in rec.checkpoints if c.stage == "qft_second"]
        extra["second_pass_minorizes"] = all(r in NON_INCREASING for r in second)
        extra["return_max_error"] = float(
            np.max(np.abs(rec.checkpoints[-1].distribution - rec.checkpoints[0].distribution))
        )
    else:
        final = rec.checkpoints[-1].distribution
        closed = final_probabilities_closed_form(n, phi)
        err = float(np.max(np.abs(final[bit_reverse_indices(n)] - closed)))
        extra["closed_form_max_error"] = err
        extra["closed_form_ok"] = err <= CLOSED_FORM_TOL
    name = "qft_double" if double else "qft"
    return Trace(
        _meta(name, n, options, phase=_phase_meta(phi)),
        tuple(rec.checkpoints),
        _summarize(rec.checkpoints, options.tol, **extra),
    )


def run_grover_traced(
    n: int, iterations: int, marked: int = 0, options: TraceOptions | None = None
) -> Trace:
    """Grover kernel applications over the expanded 2^n-outcome distribution.

    ``theorem_holds`` covers steps up to ``kstar``, the first argmax of the
    marked-item probability along the run.  Interference residuals are
    taken on the two-dimensional (perp, marked) state.
    """
    options = options or TraceOptions()
    if not 1 <= n <= MAX_QUBITS:
        raise DomainError(f"n must lie in [1, {MAX_QUBITS}]")
    traj = grover_trajectory(n, iterations)
    kernel = grover_kernel(n)
    gate = GroverKernel(grover_angle(n))
    cps = [Checkpoint(0, "initial", None, expand_grover(traj[0], n, marked))]
    for k in range(1, len(traj)):
        dist = expand_grover(traj[k], n, marked)
        verdict = compare(cps[-1].distribution, dist, options.tol)
        nat = None
        if options.natural:
            reduced = StateVector.from_amplitudes(traj[k - 1].as_vector())
            nat = interference_residuals(kernel, reduced, options.struct_tol)
        cps.append(Checkpoint(k, "grover", gate, dist, verdict, natural=nat))
    p_marked = [s.p_marked for s in traj]
    kstar = int(np.argmax(p_marked))
    cps = [replace(c, in_scope=c.step <= kstar) for c in cps]
    extra = {
        "kstar": kstar,
        "p_marked_max": float(p_marked[kstar]),
        "p_marked": [float(p) for p in p_marked],
        "natural_steps": sum(1 for c in cps[1:] if c.natural is not None and c.natural.natural),
    }
    return Trace(
        _meta("grover", n, options, iterations=iterations, marked=marked, theta=grover_angle(n)),
        tuple(cps),
        _summarize(cps, options.tol, **extra),
    )
