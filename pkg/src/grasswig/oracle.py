"""Dense-matrix ground truth: states, gates, conjugation, measurement.

Everything downstream is cross-validated against this module.  States are
density operators (mixed-state demos and measurement collapse share one code
path); practical size tops out around 10 qubits.

Also hosts the faithful matrix representation of the anticommuting
generators (Jordan-Wigner ladder form), which really is an algebra
homomorphism, unlike the Pauli quantization used for symbols.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .grassmann import ContractViolation, GrassmannElement

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}

HADAMARD = (X + Z) / np.sqrt(2.0)
PHASE = np.diag([1.0, 1j]).astype(complex)
TGATE = np.diag([1.0, np.exp(1j * np.pi / 4)]).astype(complex)

GATE_ARITY = {"h": 1, "p": 1, "t": 1, "cnot": 2}
CLIFFORD_GATES = ("h", "p", "cnot")


class NotPauliError(ValueError):
    """Conjugation result is not a signed Pauli string."""


class NotStabilizerError(ValueError):
    """State is not a pure stabilizer state."""


@dataclass(frozen=True)
class Gate:
    name: str
    targets: tuple[int, ...]

    def __post_init__(self):
        name = self.name.lower()
        object.__setattr__(self, "name", name)
        if name not in GATE_ARITY:
            raise ContractViolation(f"unknown gate {self.name!r}")
        if len(self.targets) != GATE_ARITY[name]:
            raise ContractViolation(f"gate {name} needs {GATE_ARITY[name]} targets")
        if name == "cnot" and self.targets[0] == self.targets[1]:
            raise ContractViolation("cnot control and target must differ")


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for g in self.gates:
            if any(t >= self.n or t < 0 for t in g.targets):
                raise ContractViolation(f"gate {g} touches qubits outside 0..{self.n - 1}")

    def is_clifford(self) -> bool:
        return all(g.name in CLIFFORD_GATES for g in self.gates)


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def pauli_matrix(word: str) -> np.ndarray:
    return kron_all(PAULIS[ch] for ch in word)


def pauli_words(n: int, include_identity: bool = False) -> list[str]:
    words = ["".join(w) for w in _product_letters(n)]
    if not include_identity:
        words = [w for w in words if set(w) != {"I"}]
    return words


def _product_letters(n: int):
    if n == 0:
        yield ()
        return
    for head in "IXYZ":
        for tail in _product_letters(n - 1):
            yield (head,) + tail


def pauli_mult(word_a: str, word_b: str) -> tuple[complex, str]:
    """Product of two Pauli words as (phase, word), phase in {1, i, -1, -i}."""
    table = {
        ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
        ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
        ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
        ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
    }
    phase = 1 + 0j
    out = []
    for a, b in zip(word_a, word_b):
        ph, w = table[(a, b)]
        phase *= ph
        out.append(w)
    return phase, "".join(out)


def embed_gate(unitary: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    """Expand a 1- or 2-qubit unitary to the full register."""
    dim = 2 ** n
    if len(targets) == 1:
        mats = [unitary if q == targets[0] else I2 for q in range(n)]
        return kron_all(mats)
    # general two-qubit placement by index arithmetic
    a, b = targets
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        src = (bits[a] << 1) | bits[b]
        for row_local in range(4):
            amp = unitary[row_local, src]
            if amp == 0:
                continue
            new_bits = list(bits)
            new_bits[a] = (row_local >> 1) & 1
            new_bits[b] = row_local & 1
            row = 0
            for q in range(n):
                row = (row << 1) | new_bits[q]
            out[row, col] += amp
    return out


CNOT_2Q = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def gate_unitary(gate: Gate, n: int) -> np.ndarray:
    mats = {"h": HADAMARD, "p": PHASE, "t": TGATE}
    if gate.name in mats:
        return embed_gate(mats[gate.name], gate.targets, n)
    return embed_gate(CNOT_2Q, gate.targets, n)


def zero_state(n: int) -> np.ndarray:
    rho = np.zeros((2 ** n, 2 ** n), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def dense_apply(rho: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    u = gate_unitary(gate, n)
    return u @ rho @ u.conj().T


def run_circuit(circuit: Circuit, rho: np.ndarray | None = None) -> np.ndarray:
    out = zero_state(circuit.n) if rho is None else rho
    for g in circuit.gates:
        out = dense_apply(out, g, circuit.n)
    return out


def conjugate_pauli(gate: Gate, sign: int, word: str, n: int) -> tuple[int, str]:
    """Image of a signed Pauli string under forward conjugation U P U^dag.

    Raises :class:`NotPauliError` when the image is not a signed Pauli string
    (the t gate on X- or Y-type input).
    """
    u = gate_unitary(gate, n)
    mat = sign * (u @ pauli_matrix(word) @ u.conj().T)
    for cand in pauli_words(n, include_identity=True):
        cm = pauli_matrix(cand)
        coeff = np.trace(cm.conj().T @ mat) / (2 ** n)
        if abs(abs(coeff) - 1.0) < 1e-9:
            if abs(coeff - 1.0) < 1e-9:
                return 1, cand
            if abs(coeff + 1.0) < 1e-9:
                return -1, cand
            raise NotPauliError(f"conjugation of {word} produced complex phase {coeff}")
    raise NotPauliError(f"conjugation of {'+' if sign > 0 else '-'}{word} left the Pauli set")


def pauli_coefficients(rho: np.ndarray, n: int) -> dict[str, float]:
    """Real coefficients c_P with rho = 2^-n (I + sum_P c_P P), P non-identity."""
    out = {}
    for word in pauli_words(n):
        c = np.trace(pauli_matrix(word) @ rho)
        if abs(c.imag) > 1e-9:
            raise ContractViolation("state is not Hermitian")
        out[word] = float(c.real)
    return out


def stabilizer_group(rho: np.ndarray, n: int) -> set[tuple[int, str]]:
    """Signed non-identity Pauli strings with expectation exactly +1.

    Validated to be a pure stabilizer state: purity 1 and exactly 2^n - 1
    non-identity elements (tolerance 1e-9 around +-1; anything in between
    fails).
    """
    purity = float(np.trace(rho @ rho).real)
    if abs(purity - 1.0) > 1e-9:
        raise NotStabilizerError(f"state is not pure (tr rho^2 = {purity})")
    group: set[tuple[int, str]] = set()
    for word, c in pauli_coefficients(rho, n).items():
        if abs(c - 1.0) < 1e-9:
            group.add((1, word))
        elif abs(c + 1.0) < 1e-9:
            group.add((-1, word))
        elif abs(c) > 1e-9:
            raise NotStabilizerError(f"expectation of {word} is {c}, not in {{0, +-1}}")
    if len(group) != 2 ** n - 1:
        raise NotStabilizerError(f"found {len(group)} stabilizers, expected {2 ** n - 1}")
    return group


def measure_pauli(rho: np.ndarray, word: str, n: int, rng: np.random.Generator) -> tuple[int, np.ndarray]:
    """Projective measurement of a Pauli observable with state collapse."""
    mat = pauli_matrix(word)
    proj_plus = (np.eye(2 ** n) + mat) / 2
    p_plus = float(np.trace(proj_plus @ rho).real)
    p_plus = min(1.0, max(0.0, p_plus))
    if rng.random() < p_plus:
        new = proj_plus @ rho @ proj_plus
        return 1, new / np.trace(new).real
    proj_minus = (np.eye(2 ** n) - mat) / 2
    new = proj_minus @ rho @ proj_minus
    return -1, new / np.trace(new).real


# -- matrix representation of the exterior algebra --------------------------


def clifford_rep_generators(m: int) -> list[np.ndarray]:
    """Jordan-Wigner ladder matrices for up to three anticommuting generators.

    Generator k maps to Z^(k) tensor (X + iY)/1 tensor I..., i.e. raising
    operators behind a Z string; each squares to zero and distinct ones
    anticommute, so monomial products represent the algebra faithfully.
    """
    if not 1 <= m <= 3:
        raise ContractViolation("matrix representation provided for m <= 3")
    ladder = X + 1j * Y
    gens = []
    for k in range(m):
        mats = [Z] * k + [ladder] + [I2] * (m - 1 - k)
        gens.append(kron_all(mats[:m]))
    return gens


def clifford_rep_element(g: GrassmannElement, gens: list[np.ndarray]) -> np.ndarray:
    """Represent an algebra element as a matrix via the ladder generators."""
    m = len(gens)
    if g.num_generators != m:
        raise ContractViolation("element and representation size differ")
    dim = 2 ** m
    out = np.zeros((dim, dim), dtype=complex)
    for mask, coeff in g.terms.items():
        mat = np.eye(dim, dtype=complex)
        for i in range(m):
            if mask >> i & 1:
                mat = mat @ gens[i]
        out += coeff * mat
    return out


def random_density(n: int, rng: np.random.Generator, pure: bool = False) -> np.ndarray:
    dim = 2 ** n
    if pure:
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi /= np.linalg.norm(psi)
        return np.outer(psi, psi.conj())
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    dim = 2 ** n
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def random_clifford_circuit(n: int, length: int, rng: np.random.Generator) -> Circuit:
    gates = []
    for _ in range(length):
        kind = rng.choice(["h", "p", "cnot"] if n > 1 else ["h", "p"])
        if kind == "cnot":
            a, b = rng.choice(n, size=2, replace=False)
            gates.append(Gate("cnot", (int(a), int(b))))
        else:
            gates.append(Gate(str(kind), (int(rng.integers(n)),)))
    return Circuit(n, tuple(gates))
