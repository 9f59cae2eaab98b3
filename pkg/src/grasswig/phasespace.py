"""Signed-Pauli phase space: probability vectors and the permutation engine.

The operator basis for n qubits is the set of 2 (4^n - 1) signed non-identity
Pauli strings.  A stabilizer state is a non-negative probability vector over
these points (mass 1/(2^n - 1) on its stabilizer group, identity excluded),
and every Clifford gate acts as a pure index permutation built from the
generator flow of :mod:`grasswig.dynamics` and verified point-by-point
against dense conjugation before use.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass

import numpy as np

from . import dynamics, oracle, weyl
from .grassmann import ContractViolation, GrassmannElement, state_pos

_KIND_ORDER = ("p", "r", "q")  # canonical single-qubit listing order


class NonCliffordGateError(ValueError):
    """Permutation construction refused: the gate is not order-zero."""

    def __init__(self, gate: str, classification: str):
        super().__init__(
            f"gate {gate!r} is {classification}: its generator flow does not "
            "permute signed monomials, so no phase-space permutation exists"
        )
        self.gate = gate
        self.classification = classification


@dataclass(frozen=True)
class PhasePoint:
    """A signed non-identity Pauli string."""

    sign: int
    letters: str

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ContractViolation("sign must be +-1")
        if set(self.letters) - set("IXYZ") or set(self.letters) == {"I"}:
            raise ContractViolation(f"bad letters {self.letters!r}")

    def label(self) -> str:
        return ("+" if self.sign > 0 else "-") + self.letters


def _single_qubit_points() -> list[PhasePoint]:
    """Canonical one-qubit listing: (+p, +r, +q, -p, -r, -q) in Pauli terms."""
    pts = []
    for flip in (1, -1):
        for kind in _KIND_ORDER:
            sign, letter = weyl.quantization_map()[kind]
            pts.append(PhasePoint(flip * sign, letter))
    return pts


@functools.lru_cache(maxsize=None)
def enumerate_points(n: int) -> tuple[PhasePoint, ...]:
    """Canonical point ordering: the paper-style sextet for one qubit,
    lexicographic generator words (then sign) for more."""
    if not 1 <= n <= 10:
        raise ContractViolation("supported sizes are 1..10 qubits")
    if n == 1:
        return tuple(_single_qubit_points())
    pts = []
    kinds = ("I",) + _KIND_ORDER
    for word in _kind_words(n, kinds):
        if all(k == "I" for k in word):
            continue
        sign = 1
        letters = []
        for k in word:
            if k == "I":
                letters.append("I")
            else:
                s, letter = weyl.quantization_map()[k]
                sign *= s
                letters.append(letter)
        base = PhasePoint(sign, "".join(letters))
        pts.append(base)
        pts.append(PhasePoint(-base.sign, base.letters))
    return tuple(pts)


def _kind_words(n: int, kinds):
    if n == 0:
        yield ()
        return
    for head in kinds:
        for tail in _kind_words(n - 1, kinds):
            yield (head,) + tail


@functools.lru_cache(maxsize=None)
def point_index(n: int) -> dict[tuple[int, str], int]:
    return {(pt.sign, pt.letters): i for i, pt in enumerate(enumerate_points(n))}


@dataclass
class GBar:
    """Probability vector over the signed phase-space points."""

    n: int
    values: np.ndarray
    degenerate: bool = False  # no non-identity content (maximally mixed input)

    def copy(self) -> "GBar":
        return GBar(self.n, self.values.copy(), self.degenerate)

    def nonzero(self) -> dict[str, float]:
        pts = enumerate_points(self.n)
        return {pts[i].label(): float(v) for i, v in enumerate(self.values) if v != 0.0}

    def to_json(self) -> str:
        return json.dumps(self.nonzero(), sort_keys=True)

    def __eq__(self, other):
        return (
            isinstance(other, GBar)
            and self.n == other.n
            and np.array_equal(self.values, other.values)
        )


def gbar_from_state(rho: np.ndarray, n: int) -> GBar:
    """Minimal-split probability vector of a density operator.

    Each Pauli coefficient lands on the point of matching sign (never both),
    and the vector is normalized to unit sum.  Coefficients within 1e-9 of an
    integer are snapped so stabilizer masses come out exactly 1/(2^n - 1).
    """
    coeffs = oracle.pauli_coefficients(rho, n)
    idx = point_index(n)
    values = np.zeros(2 * (4 ** n - 1))
    for word, c in coeffs.items():
        snapped = round(c) if abs(c - round(c)) < 1e-9 else c
        if snapped > 0:
            values[idx[(1, word)]] = snapped
        elif snapped < 0:
            values[idx[(-1, word)]] = -snapped
    total = values.sum()
    if total <= 0:
        return GBar(n, values, degenerate=True)
    return GBar(n, values / total)


def gbar_initial(n: int) -> GBar:
    return gbar_from_state(oracle.zero_state(n), n)


@dataclass
class PermutationMatrix:
    """Forward point permutation of a Clifford gate.

    ``image[i] = j`` means conjugation carries point i to point j; the matrix
    form has a 1 in row i, column image[i], matching the printed one-qubit
    gate matrices.
    """

    n: int
    image: np.ndarray

    def matrix(self) -> np.ndarray:
        size = len(self.image)
        out = np.zeros((size, size), dtype=int)
        for i, j in enumerate(self.image):
            out[i, j] = 1
        return out

    def compose(self, later: "PermutationMatrix") -> "PermutationMatrix":
        """Permutation of (self, then later)."""
        return PermutationMatrix(self.n, later.image[self.image])

    def __eq__(self, other):
        return isinstance(other, PermutationMatrix) and np.array_equal(self.image, other.image)


def apply_gate(g: GBar, perm: PermutationMatrix) -> GBar:
    if len(g.values) != len(perm.image):
        raise ContractViolation("dimension mismatch between vector and permutation")
    out = np.zeros_like(g.values)
    out[perm.image] = g.values
    return GBar(g.n, out, g.degenerate)


def _signed_word_of_element(element: GrassmannElement, n: int) -> tuple[int, str]:
    """Quantize a single-term element to a signed Pauli string."""
    terms = element.terms
    if len(terms) != 1:
        raise ContractViolation("element is not a single monomial")
    mat = weyl._quantize_element(element, n)
    for word in oracle.pauli_words(n, include_identity=True):
        coeff = np.trace(oracle.pauli_matrix(word).conj().T @ mat) / (2 ** n)
        if abs(coeff - 1.0) < 1e-9:
            return 1, word
        if abs(coeff + 1.0) < 1e-9:
            return -1, word
    raise ContractViolation("monomial does not quantize to a signed Pauli string")


def _local_conjugation_table(gate: str, targets: tuple[int, ...]) -> dict[tuple[int, str], tuple[int, str]]:
    """Signed-letter conjugation on the gate's own qubits, from the flow.

    Keys and values are signed local words (length = arity).  Built by
    quantizing the integrated generator images, extended multiplicatively,
    and verified against dense conjugation on every local point; a mismatch
    is a hard failure.
    """
    arity = len(targets)
    local_targets = tuple(range(arity))
    gmap = dynamics.gate_generator_map(gate, local_targets if gate == "cnot" else (0,), arity)
    if dynamics.classify_order(gmap) != dynamics.HBAR0:
        raise NonCliffordGateError(gate, dynamics.classify_order(gmap))

    m = 3 * arity
    single: dict[tuple[int, str], tuple[int, str]] = {}
    for qubit in range(arity):
        for kind in ("p", "q", "r"):
            src = GrassmannElement.generator(m, state_pos(qubit, kind))
            s_in, w_in = _signed_word_of_element(src, arity)
            s_out, w_out = _signed_word_of_element(gmap.image(state_pos(qubit, kind)), arity)
            single[(s_in, w_in)] = (s_out, w_out)
            single[(-s_in, w_in)] = (-s_out, w_out)

    table: dict[tuple[int, str], tuple[int, str]] = {}
    for word in oracle.pauli_words(arity, include_identity=True):
        if set(word) == {"I"}:
            continue
        sign_out, word_out = 1, "I" * arity
        for qubit, letter in enumerate(word):
            if letter == "I":
                continue
            lone = "".join(letter if k == qubit else "I" for k in range(arity))
            s_img, w_img = single[(1, lone)]
            phase, word_out = oracle.pauli_mult(word_out, w_img)
            if abs(phase.imag) > 1e-12:
                raise ContractViolation("conjugation images failed to commute")
            sign_out *= s_img * int(phase.real)
        table[(1, word)] = (sign_out, word_out)
        table[(-1, word)] = (-sign_out, word_out)

    local_gate = oracle.Gate(gate, local_targets if arity == 2 else (0,))
    for (s, w), (s2, w2) in table.items():
        expect = oracle.conjugate_pauli(local_gate, s, w, arity)
        if expect != (s2, w2):
            raise RuntimeError(
                f"generator-flow conjugation of {s:+d}{w} gave {s2:+d}{w2}, "
                f"dense conjugation gives {expect[0]:+d}{expect[1]}; refusing to continue"
            )
    return table


@functools.lru_cache(maxsize=None)
def _cached_local_table(gate: str, arity: int) -> dict:
    return _local_conjugation_table(gate, tuple(range(arity)))


def permutation_for_gate(gate: str, targets: tuple[int, ...], n: int) -> PermutationMatrix:
    """Point permutation of a Clifford gate embedded on n qubits."""
    gate = gate.lower()
    arity = oracle.GATE_ARITY.get(gate)
    if arity is None:
        raise ContractViolation(f"unknown gate {gate!r}")
    table = _cached_local_table(gate, arity)
    pts = enumerate_points(n)
    idx = point_index(n)
    image = np.zeros(len(pts), dtype=int)
    for i, pt in enumerate(pts):
        local = "".join(pt.letters[t] for t in targets)
        if set(local) == {"I"}:
            image[i] = i
            continue
        s_img, local_img = table[(1, local)]
        letters = list(pt.letters)
        for k, t in enumerate(targets):
            letters[t] = local_img[k]
        image[i] = idx[(pt.sign * s_img, "".join(letters))]
    return PermutationMatrix(n, image)


def simulate_circuit(circuit: oracle.Circuit, initial: GBar | None = None) -> GBar:
    """Run the permutation engine from the all-zeros state."""
    state = gbar_initial(circuit.n) if initial is None else initial.copy()
    for g in circuit.gates:
        perm = permutation_for_gate(g.name, g.targets, circuit.n)
        state = apply_gate(state, perm)
    return state


def circuit_permutation(circuit: oracle.Circuit) -> PermutationMatrix:
    perm = PermutationMatrix(circuit.n, np.arange(2 * (4 ** circuit.n - 1)))
    for g in circuit.gates:
        perm = perm.compose(permutation_for_gate(g.name, g.targets, circuit.n))
    return perm


def stabilizer_census(n: int) -> int:
    """Number of distinct vectors reachable from the all-zeros state."""
    start = gbar_initial(n)
    gates: list[tuple[str, tuple[int, ...]]] = []
    for q in range(n):
        gates.append(("h", (q,)))
        gates.append(("p", (q,)))
    for a in range(n):
        for b in range(n):
            if a != b:
                gates.append(("cnot", (a, b)))
    perms = [permutation_for_gate(g, t, n) for g, t in gates]
    seen = {start.values.tobytes()}
    frontier = [start]
    while frontier:
        nxt = []
        for state in frontier:
            for perm in perms:
                out = apply_gate(state, perm)
                key = out.values.tobytes()
                if key not in seen:
                    seen.add(key)
                    nxt.append(out)
        frontier = nxt
    return len(seen)


def negativity(rho: np.ndarray, n: int) -> float:
    """Canonical negativity witness: grid Wigner-function negativity."""
    from . import twogen

    grid = twogen.wigner2(rho, n)
    return float(np.sum(np.maximum(-grid.values, 0.0)))
