"""Gate generator flows: harmonic Hamiltonians, rotation matrices, propagators.

One-qubit gates come from real quadratic Hamiltonians labelled by an axis
vector ``b`` whose three slots multiply the bilinears (r q), (q p), (p r); the
generator equations of motion close on the generators themselves and
integrate to rotations.  The entangling gate's quartic Hamiltonian closes on
an eight-monomial orbit instead; its flow is an exact matrix exponential on
that basis.  Gates whose integrated generator images are single signed
monomials admit the classical (order-zero) truncation and drive the
permutation engine; anything else is flagged as requiring the first-order
propagator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import oracle, weyl
from .grassmann import ContractViolation, GrassmannElement, multiply, state_pos

HBAR0 = "hbar0_permutation"
HBAR1 = "hbar1_general"

# coefficients that occur in exact gate maps; floats are snapped onto this
# grid after integration so permutation extraction is exact
_SNAP_GRID = [0.0, 1.0, -1.0, 0.5, -0.5, 0.25, -0.25]
_SQ = 1.0 / np.sqrt(2.0)
_SNAP_GRID += [_SQ, -_SQ, _SQ / 2, -_SQ / 2]


def _snap_value(x: float) -> float:
    for cand in _SNAP_GRID:
        if abs(x - cand) < 1e-9:
            return cand
    return x


def snap_element(g: GrassmannElement) -> GrassmannElement:
    return g.map_coefficients(lambda c: complex(_snap_value(c.real), _snap_value(c.imag)))


@dataclass(frozen=True)
class HarmonicHamiltonian:
    """Quadratic one-qubit blocks indexed by axis vectors, or the quartic pair coupling.

    ``blocks`` maps a qubit to its axis 3-vector b; a CNOT-style coupling is
    recorded as ``pair`` = (target, control) and owns the quartic element.
    """

    qubits: int
    blocks: dict = field(default_factory=dict)
    pair: tuple[int, int] | None = None

    def symbol(self) -> GrassmannElement:
        m = 3 * self.qubits
        if self.pair is not None:
            return _cnot_hamiltonian_element(self.qubits, *self.pair)
        out = GrassmannElement.zero(m)
        for qubit, b in self.blocks.items():
            out = out + _quadratic_element(b, qubit, self.qubits)
        return out


def _quadratic_element(b, qubit: int, n: int) -> GrassmannElement:
    """H = -i (b1 * r q + b2 * q p + b3 * p r) on one qubit."""
    m = 3 * n
    p, q, r = (state_pos(qubit, k) for k in ("p", "q", "r"))
    out = GrassmannElement.zero(m)
    for coeff, pair in zip(b, ((r, q), (q, p), (p, r))):
        if coeff:
            out = out + GrassmannElement.monomial(m, list(pair), -1j * coeff)
    return out


def _cnot_hamiltonian_element(n: int, target: int, control: int) -> GrassmannElement:
    """Quartic coupling 1/4 (1 - i p_c r_c)(1 - i r_t q_t).

    The first factor projects the control onto the lower computational state,
    the second the target onto the minus momentum state; their product
    generates the controlled flip over a half-turn.
    """
    m = 3 * n
    pc, rc = state_pos(control, "p"), state_pos(control, "r")
    rt, qt = state_pos(target, "r"), state_pos(target, "q")
    one = GrassmannElement.scalar(m, 1.0)
    f_control = one + GrassmannElement.monomial(m, [pc, rc], -1j)
    f_target = one + GrassmannElement.monomial(m, [rt, qt], -1j)
    return multiply(f_control, f_target) * 0.25


def gate_hamiltonian(gate: str, n: int = 1, targets: tuple[int, ...] = (0,)) -> tuple[HarmonicHamiltonian, float]:
    """Axis vector (or quartic pair element) and duration for each gate."""
    gate = gate.lower()
    if gate == "h":
        b = np.array([1.0, 0.0, 1.0]) / np.sqrt(2.0)
        return HarmonicHamiltonian(n, {targets[0]: tuple(b)}), np.pi
    if gate == "p":
        return HarmonicHamiltonian(n, {targets[0]: (0.0, 0.0, 1.0)}), np.pi / 2
    if gate == "t":
        # half the phase-gate rate over the same interval: the dense
        # propagator is diag(1, e^{i pi/4}) up to global phase
        return HarmonicHamiltonian(n, {targets[0]: (0.0, 0.0, 0.5)}), np.pi / 2
    if gate == "cnot":
        control, target = targets
        return HarmonicHamiltonian(n, pair=(target, control)), np.pi
    raise ContractViolation(f"unknown gate {gate!r}")


def generator_ode_matrix(b) -> np.ndarray:
    """d/dt (p, q, r) for the quadratic block: antisymmetric 3x3."""
    b1, b2, b3 = b
    return np.array(
        [
            [0.0, b2, -b3],
            [-b2, 0.0, b1],
            [b3, -b1, 0.0],
        ]
    )


def cayley_evolution_matrix(b, t: float) -> np.ndarray:
    """Rotation exp(A t) of the generator triple, via the Cayley form.

    Away from the half-turn singularity the rational form
    [1 + tan(bt/2) K][1 - tan(bt/2) K]^-1 is used; at the singularity the
    closed rotation formula takes over (no error raised).
    """
    b = np.asarray(b, dtype=float)
    norm = float(np.linalg.norm(b))
    if norm == 0.0:
        return np.eye(3)
    a = generator_ode_matrix(b)
    k = a / norm
    half = norm * t / 2.0
    if abs(np.cos(half)) > 1e-6:
        tau = np.tan(half)
        return np.linalg.solve((np.eye(3) - tau * k).T, (np.eye(3) + tau * k).T).T
    theta = norm * t
    return np.eye(3) + np.sin(theta) * k + (1.0 - np.cos(theta)) * (k @ k)


def propagator_symbol(b, t: float, qubit: int = 0, n: int = 1) -> weyl.WeylSymbol:
    """Even symbol of the quadratic propagator; the series closes exactly.

    U = cos(bt/2) + sin(bt/2) (n1 r q + n2 p q + n3 p r); quantizing gives
    exp(-i/2 b.sigma t).  The half-turn case is regular here, so no special
    handling is needed.
    """
    b = np.asarray(b, dtype=float)
    norm = float(np.linalg.norm(b))
    m = 3 * n
    if norm == 0.0:
        return weyl.WeylSymbol(GrassmannElement.scalar(m, 1.0), "even", n)
    axis = b / norm
    half = norm * t / 2.0
    p, q, r = (state_pos(qubit, k) for k in ("p", "q", "r"))
    bilinear = (
        GrassmannElement.monomial(m, [r, q], axis[0])
        + GrassmannElement.monomial(m, [p, q], axis[1])
        + GrassmannElement.monomial(m, [p, r], axis[2])
    )
    element = GrassmannElement.scalar(m, np.cos(half)) + bilinear * np.sin(half)
    return weyl.WeylSymbol(snap_element(element), "even", n)


def propagator_unitary(b, t: float) -> np.ndarray:
    """Dense exp(-i/2 b.sigma t) for cross-checking the symbol."""
    b = np.asarray(b, dtype=float)
    h = (b[0] * oracle.X + b[1] * oracle.Y + b[2] * oracle.Z) / 2.0
    return expm(-1j * h * t)


def van_vleck_prefactor(b, t: float) -> float:
    """Magnitude of the propagator normalization from a Gaussian integral.

    Assembles the six-generator quadratic form of the unitarity integral at
    the phase-space origin and evaluates it as a closed-form Berezin
    Gaussian; the magnitude must come out as |cos(bt/2)|.
    """
    from .grassmann import gaussian_integral

    b = np.asarray(b, dtype=float)
    norm = float(np.linalg.norm(b))
    half = norm * t / 2.0
    if abs(np.cos(half)) < 1e-9:
        return 0.0
    tau = np.tan(half)
    k = generator_ode_matrix(b / norm) if norm else np.zeros((3, 3))
    a = np.zeros((6, 6))
    a[:3, :3] = tau * k / 2.0
    a[3:, 3:] = -tau * k / 2.0
    a[:3, 3:] = np.eye(3) / 2.0
    a[3:, :3] = -np.eye(3) / 2.0
    val = abs(gaussian_integral(a))
    return 1.0 / np.sqrt(val)


@dataclass
class GeneratorMap:
    """Integrated images of the state generators (and orbit partners)."""

    qubits: int
    images: dict  # generator position -> GrassmannElement
    orbit_images: dict = field(default_factory=dict)  # monomial mask -> element

    def image(self, pos: int) -> GrassmannElement:
        return self.images[pos]

    def compose(self, later: "GeneratorMap") -> "GeneratorMap":
        """Map applying self first, then ``later`` (single-monomial maps only)."""
        out = {}
        for pos, img in self.images.items():
            acc = GrassmannElement.zero(3 * self.qubits)
            for mask, coeff in img.terms.items():
                acc = acc + later.image_of_monomial(mask) * coeff
            out[pos] = acc
        return GeneratorMap(self.qubits, out)

    def image_of_monomial(self, mask: int) -> GrassmannElement:
        if mask in self.orbit_images:
            return self.orbit_images[mask]
        m = 3 * self.qubits
        acc = GrassmannElement.scalar(m, 1.0)
        for pos in range(m):
            if mask >> pos & 1:
                acc = multiply(acc, self.images[pos])
        return acc


def identity_generator_map(n: int) -> GeneratorMap:
    m = 3 * n
    return GeneratorMap(n, {pos: GrassmannElement.generator(m, pos) for pos in range(m)})


def evolve_generators(h: HarmonicHamiltonian, t: float) -> GeneratorMap:
    """Integrate the generator flow exactly.

    Quadratic blocks rotate the generator triple by the evolution matrix; the
    quartic pair coupling is integrated as a matrix exponential on its closed
    eight-monomial orbit (dense commutator flow, then dequantized), which is
    exact because the orbit is finite.
    """
    n = h.qubits
    if h.pair is not None:
        return _evolve_cnot(n, *h.pair, t)
    gmap = identity_generator_map(n)
    m = 3 * n
    for qubit, b in h.blocks.items():
        rot = cayley_evolution_matrix(np.asarray(b), t)
        for i, kind in enumerate(("p", "q", "r")):
            pos = state_pos(qubit, kind)
            img = GrassmannElement.zero(m)
            for j, kind_j in enumerate(("p", "q", "r")):
                if abs(rot[i, j]) > 1e-12:
                    img = img + GrassmannElement.generator(m, state_pos(qubit, kind_j)) * rot[i, j]
            gmap.images[pos] = snap_element(img)
    return gmap


def _cnot_orbit_monomials(n: int, target: int, control: int) -> list[tuple[int, ...]]:
    """The eight monomials exchanged by the controlled flip, as index tuples."""
    ra, qa = state_pos(target, "r"), state_pos(target, "q")
    pb, rb = state_pos(control, "p"), state_pos(control, "r")
    return [
        (ra,),
        (qa,),
        (ra, pb, rb),
        (qa, pb, rb),
        (rb,),
        (pb,),
        (qa, ra, rb),
        (qa, ra, pb),
    ]


def _evolve_cnot(n: int, target: int, control: int, t: float) -> GeneratorMap:
    m = 3 * n
    basis = [
        GrassmannElement.monomial(m, list(idx)) for idx in _cnot_orbit_monomials(n, target, control)
    ]
    ops = [weyl._quantize_element(e, n) for e in basis]
    dim = 2 ** n
    norms = [np.trace(op.conj().T @ op).real for op in ops]
    ham = weyl._quantize_element(_cnot_hamiltonian_element(n, target, control), n)
    gen = np.zeros((len(basis), len(basis)), dtype=complex)
    for k, op in enumerate(ops):
        rate = -1j * (ham @ op - op @ ham)
        for j, bj in enumerate(ops):
            gen[j, k] = np.trace(bj.conj().T @ rate) / norms[j]
    flow = expm(gen * t)
    images = identity_generator_map(n).images
    orbit = {}
    for k, src in enumerate(basis):
        img = GrassmannElement.zero(m)
        for j, bj in enumerate(basis):
            if abs(flow[j, k]) > 1e-12:
                img = img + bj * complex(flow[j, k])
        img = snap_element(img)
        mask = next(iter(src.terms))
        orbit[mask] = img
        if bin(mask).count("1") == 1:
            images[mask.bit_length() - 1] = img
    return GeneratorMap(n, images, orbit)


def gate_generator_map(gate: str, targets: tuple[int, ...], n: int) -> GeneratorMap:
    h, t = gate_hamiltonian(gate, n, targets)
    return evolve_generators(h, t)


def classify_order(gmap: GeneratorMap) -> str:
    """Classical-permutation test: every generator image one unit monomial."""
    for img in gmap.images.values():
        terms = img.terms
        if len(terms) != 1:
            return HBAR1
        coeff = next(iter(terms.values()))
        if abs(abs(coeff) - 1.0) > 1e-9:
            return HBAR1
    return HBAR0
