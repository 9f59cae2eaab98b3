"""Operator <-> phase-space symbol calculus on three generators per qubit.

An operator on n qubits is represented by an even element of the exterior
algebra on generators (p, q, r) per qubit (its "center" symbol), or dually by
a per-qubit-odd element (its "chord" symbol).  Quantization replaces each
generator by a signed Pauli matrix; the signed assignment is not hard-coded
but solved once by exhaustive search against four independent constraints
(see :func:`quantization_map`), because consistent sign conventions are
under-determined by any single one of them.

The star product reproduces operator multiplication through a double Berezin
integral, and the expectation functional pairs an even state symbol with a
per-qubit-odd observable symbol to give Born-rule values.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from . import oracle
from .grassmann import (
    ContractViolation,
    GrassmannElement,
    berezin_integrate,
    conjugate,
    descending_block_order,
    exp_nilpotent,
    multiply,
    parity_split,
    state_pos,
)

HBAR = 2.0


@dataclass(frozen=True)
class WeylSymbol:
    """A phase-space representative: element, grading and qubit count."""

    element: GrassmannElement
    parity: str
    qubits: int

    def __post_init__(self):
        if self.parity not in ("even", "odd"):
            raise ContractViolation("symbol parity must be 'even' or 'odd'")
        if self.element.num_generators != 3 * self.qubits:
            raise ContractViolation("symbol element must live on 3 generators per qubit")
        actual = self.element.parity()
        if not self.element.is_zero() and actual not in (self.parity,):
            raise ContractViolation(f"element grading {actual} contradicts declared {self.parity}")


@functools.lru_cache(maxsize=1)
def quantization_map() -> dict[str, tuple[int, str]]:
    """Signed Pauli letter for each generator kind, solved by search.

    Constraints, each checked as an exact matrix identity:
      1. i * M(p) M(q) M(r) = identity;
      2. (1 - i M(p) M(r)) / 2 is the |1><1| projector;
      3. (1 + i M(r) M(q)) / 2 is the +1 projector of X;
      4. (1 + i M(p) M(q)) / 2 is the +1 projector of Y.
    Exactly one of the 48 signed assignments survives.
    """
    one = np.array([[0, 0], [0, 1]], dtype=complex)
    solutions = []
    for letters in itertools.permutations("XYZ"):
        for signs in itertools.product((1, -1), repeat=3):
            mats = {
                kind: signs[i] * oracle.PAULIS[letters[i]]
                for i, kind in enumerate(("p", "q", "r"))
            }
            if not np.allclose(1j * mats["p"] @ mats["q"] @ mats["r"], np.eye(2), atol=1e-12):
                continue
            if not np.allclose((np.eye(2) - 1j * mats["p"] @ mats["r"]) / 2, one, atol=1e-12):
                continue
            if not np.allclose(1j * mats["r"] @ mats["q"], oracle.X, atol=1e-12):
                continue
            if not np.allclose(1j * mats["p"] @ mats["q"], oracle.Y, atol=1e-12):
                continue
            solutions.append(
                {kind: (signs[i], letters[i]) for i, kind in enumerate(("p", "q", "r"))}
            )
    if len(solutions) != 1:
        raise RuntimeError(f"expected a unique generator-to-Pauli assignment, found {len(solutions)}")
    return solutions[0]


def generator_matrix(kind: str) -> np.ndarray:
    sign, letter = quantization_map()[kind]
    return sign * oracle.PAULIS[letter]


@functools.lru_cache(maxsize=1)
def _letter_bilinears() -> dict[str, list[tuple[tuple[str, str], complex]]]:
    """Even one-qubit symbol of each Pauli letter as (kind pair, coeff) terms.

    Found by solving i * M(a) M(b) = letter over the three kind pairs; the
    identity letter maps to the scalar 1.
    """
    out = {"I": []}
    pairs = [("p", "q"), ("p", "r"), ("q", "r"), ("q", "p"), ("r", "p"), ("r", "q")]
    for letter in "XYZ":
        target = oracle.PAULIS[letter]
        found = None
        for a, b in pairs:
            if np.allclose(1j * generator_matrix(a) @ generator_matrix(b), target, atol=1e-12):
                found = ((a, b), 1j)
                break
        if found is None:
            raise RuntimeError(f"no bilinear represents {letter}")
        out[letter] = [found]
    return out


def _letter_even_element(letter: str, qubit: int, n: int) -> GrassmannElement:
    m = 3 * n
    if letter == "I":
        return GrassmannElement.scalar(m, 1.0)
    (a, b), coeff = _letter_bilinears()[letter][0]
    return GrassmannElement.monomial(m, [state_pos(qubit, a), state_pos(qubit, b)], coeff)


def word_even_element(word: str, n: int) -> GrassmannElement:
    out = GrassmannElement.scalar(3 * n, 1.0)
    for qubit, letter in enumerate(word):
        out = multiply(out, _letter_even_element(letter, qubit, n))
    return out


def symbol_from_operator(op: np.ndarray, n: int) -> WeylSymbol:
    """Even (center) symbol: expand in Pauli words, replace words by bilinears."""
    dim = 2 ** n
    if op.shape != (dim, dim):
        raise ContractViolation(f"operator must be {dim}x{dim}")
    element = GrassmannElement.zero(3 * n)
    for word in oracle.pauli_words(n, include_identity=True):
        coeff = np.trace(oracle.pauli_matrix(word) @ op) / dim
        if abs(coeff) > 1e-14:
            element = element + word_even_element(word, n) * complex(coeff)
    return WeylSymbol(element=element, parity="even", qubits=n)


def operator_from_symbol(s: WeylSymbol) -> np.ndarray:
    """Quantize: substitute generator matrices into each canonical monomial."""
    n = s.qubits
    return _quantize_element(s.element, n)


def _quantize_element(element: GrassmannElement, n: int) -> np.ndarray:
    dim = 2 ** n
    out = np.zeros((dim, dim), dtype=complex)
    single = {
        (q, k): oracle.embed_gate(generator_matrix(k), (q,), n)
        for q in range(n)
        for k in ("p", "q", "r")
    }
    for mask, coeff in element.terms.items():
        mat = np.eye(dim, dtype=complex)
        for pos in range(3 * n):
            if mask >> pos & 1:
                mat = mat @ single[(pos // 3, ("p", "q", "r")[pos % 3])]
        out += coeff * mat
    return out


@functools.lru_cache(maxsize=1)
def _odd_letter_terms() -> dict[str, tuple[list[str], complex]]:
    """Per-qubit odd (chord) symbol of each Pauli letter, as used in pairing.

    Pauli letters dequantize to single generators (the kind whose matrix is
    +-letter, with the sign divided out).  The identity letter takes the
    top-degree monomial; its coefficient -i is fixed by requiring the
    expectation pairing below to reproduce operator traces, and differs by a
    sign from the naive identity decomposition.
    """
    out = {"I": (["p", "q", "r"], -1j)}
    for letter in "XYZ":
        for kind in ("p", "q", "r"):
            sign, lt = quantization_map()[kind]
            if lt == letter:
                out[letter] = ([kind], complex(sign))
    return out


def odd_symbol_from_operator(op: np.ndarray, n: int) -> WeylSymbol:
    """Per-qubit-odd (chord) symbol used by the expectation pairing."""
    dim = 2 ** n
    if op.shape != (dim, dim):
        raise ContractViolation(f"operator must be {dim}x{dim}")
    m = 3 * n
    element = GrassmannElement.zero(m)
    for word in oracle.pauli_words(n, include_identity=True):
        coeff = np.trace(oracle.pauli_matrix(word) @ op) / dim
        if abs(coeff) <= 1e-14:
            continue
        factor = GrassmannElement.scalar(m, complex(coeff))
        for qubit, letter in enumerate(word):
            kinds, c = _odd_letter_terms()[letter]
            mono = GrassmannElement.monomial(m, [state_pos(qubit, k) for k in kinds], c)
            factor = multiply(factor, mono)
        element = element + factor
    parity = "odd" if n % 2 == 1 else "even"
    # per-qubit odd always; total grading depends on qubit count
    return WeylSymbol(element=element, parity=element.parity() if not element.is_zero() else parity, qubits=n)


def expectation(state_symbol: WeylSymbol, observable_symbol: WeylSymbol) -> complex:
    """Phase-space trace pairing: (2i)^n times the full Berezin integral.

    The state enters with its arguments scaled by -i; the observable must be
    in the per-qubit-odd representation (see
    :func:`odd_symbol_from_operator`).  For density-operator states and
    projector observables this returns Born probabilities.
    """
    if state_symbol.qubits != observable_symbol.qubits:
        raise ContractViolation("qubit counts differ")
    n = state_symbol.qubits
    scaled = state_symbol.element.scale_generators(-1j)
    integrand = multiply(scaled, observable_symbol.element)
    top = berezin_integrate(integrand, descending_block_order(list(range(3 * n))))
    return complex((2j) ** n * top.scalar_part)


def expectation_operator(state_symbol: WeylSymbol, observable: np.ndarray) -> complex:
    return expectation(state_symbol, odd_symbol_from_operator(observable, state_symbol.qubits))


# -- star product ------------------------------------------------------------


@functools.lru_cache(maxsize=1)
def _star_constant() -> float:
    """Exponent constant of the star-product kernel, fixed by homomorphism.

    The kernel integrates to the symbol of the operator product only for one
    sign of the quadratic exponent; the two candidate normalizations are
    arbitrated against dense matrix products once per session.
    """
    rng = np.random.default_rng(20240331)
    pairs = [(oracle.X, oracle.X), (oracle.X, oracle.Y)]
    for _ in range(3):
        pairs.append((oracle.random_hermitian(1, rng), oracle.random_hermitian(1, rng)))
    for c in (1.0, -1.0):
        ok = True
        for a, b in pairs:
            lhs = _moyal_with_constant(symbol_from_operator(a, 1), symbol_from_operator(b, 1), c)
            rhs = symbol_from_operator(a @ b, 1)
            if not lhs.element.almost_equals(rhs.element, tol=1e-9):
                ok = False
                break
        if ok:
            return c
    raise RuntimeError("no kernel constant reproduces operator products")


def _moyal_with_constant(a: WeylSymbol, b: WeylSymbol, c: float) -> WeylSymbol:
    n = a.qubits
    m = 3 * n
    big = 9 * n
    ea = a.element.embed(big, m)          # primed copy in block [3n, 6n)
    eb = b.element.embed(big, 2 * m)      # double-primed copy in block [6n, 9n)
    kernel = GrassmannElement.scalar(big, 1.0)
    for k in range(m):
        outer, primed, doubled = k, m + k, 2 * m + k
        link = (
            GrassmannElement.monomial(big, [primed, doubled], c)
            + GrassmannElement.monomial(big, [doubled, outer], c)
            + GrassmannElement.monomial(big, [outer, primed], c)
        )
        kernel = multiply(kernel, GrassmannElement.scalar(big, 1.0) + link)
    integrand = multiply(multiply(ea, eb), kernel)
    # qubit by qubit: each qubit's primed triple is integrated out first,
    # then its double-primed triple; the integrand factors per qubit, so this
    # reduces to the one-qubit integral on every factor
    order: list[int] = []
    for q in range(n):
        order += descending_block_order([m + 3 * q + k for k in range(3)])
        order += descending_block_order([2 * m + 3 * q + k for k in range(3)])
    reduced = berezin_integrate(integrand, order)
    element = GrassmannElement(m, reduced.terms)
    parity = element.parity()
    return WeylSymbol(element=element, parity=parity if parity != "mixed" else a.parity, qubits=n)


def moyal_product(a: WeylSymbol, b: WeylSymbol) -> WeylSymbol:
    """Star product: double Berezin integral against the triangle kernel."""
    if a.qubits != b.qubits:
        raise ContractViolation("qubit counts differ")
    return _moyal_with_constant(a, b, _star_constant())


# -- translation and reflection operators ------------------------------------


class GrassmannMatrix:
    """Matrix with exterior-algebra entries (operators labelled by generators).

    Auxiliary generators pass through the complex matrix entries as scalars
    and anticommute only among themselves; entry products keep left-to-right
    matrix order.
    """

    def __init__(self, entries: list[list[GrassmannElement]]):
        self.entries = entries
        self.dim = len(entries)
        self.m = entries[0][0].num_generators

    @classmethod
    def identity(cls, dim: int, m: int) -> "GrassmannMatrix":
        return cls(
            [
                [
                    GrassmannElement.scalar(m, 1.0) if i == j else GrassmannElement.zero(m)
                    for j in range(dim)
                ]
                for i in range(dim)
            ]
        )

    @classmethod
    def from_complex(cls, mat: np.ndarray, m: int) -> "GrassmannMatrix":
        return cls(
            [
                [GrassmannElement.scalar(m, complex(mat[i, j])) for j in range(mat.shape[1])]
                for i in range(mat.shape[0])
            ]
        )

    def __add__(self, other: "GrassmannMatrix") -> "GrassmannMatrix":
        return GrassmannMatrix(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.dim)]
                for i in range(self.dim)
            ]
        )

    def __sub__(self, other: "GrassmannMatrix") -> "GrassmannMatrix":
        return GrassmannMatrix(
            [
                [self.entries[i][j] - other.entries[i][j] for j in range(self.dim)]
                for i in range(self.dim)
            ]
        )

    def __matmul__(self, other: "GrassmannMatrix") -> "GrassmannMatrix":
        out = []
        for i in range(self.dim):
            row = []
            for j in range(other.dim):
                acc = GrassmannElement.zero(self.m)
                for k in range(self.dim):
                    acc = acc + multiply(self.entries[i][k], other.entries[k][j])
                row.append(acc)
            out.append(row)
        return GrassmannMatrix(out)

    def scale(self, factor: GrassmannElement | complex) -> "GrassmannMatrix":
        if isinstance(factor, GrassmannElement):
            return GrassmannMatrix(
                [[multiply(factor, e) for e in row] for row in self.entries]
            )
        return GrassmannMatrix([[e * factor for e in row] for row in self.entries])

    def trace(self) -> GrassmannElement:
        acc = GrassmannElement.zero(self.m)
        for i in range(self.dim):
            acc = acc + self.entries[i][i]
        return acc

    def map_entries(self, fn) -> "GrassmannMatrix":
        return GrassmannMatrix([[fn(e) for e in row] for row in self.entries])

    def almost_equals(self, other: "GrassmannMatrix", tol: float = 1e-9) -> bool:
        return all(
            self.entries[i][j].almost_equals(other.entries[i][j], tol)
            for i in range(self.dim)
            for j in range(self.dim)
        )

    def is_zero(self, tol: float = 1e-9) -> bool:
        zero = GrassmannElement.zero(self.m)
        return all(e.almost_equals(zero, tol) for row in self.entries for e in row)


def _matrix_exp(mat: GrassmannMatrix, max_order: int) -> GrassmannMatrix:
    acc = GrassmannMatrix.identity(mat.dim, mat.m)
    power = GrassmannMatrix.identity(mat.dim, mat.m)
    fact = 1.0
    for k in range(1, max_order + 1):
        power = power @ mat
        if power.is_zero(tol=0.0):
            break
        fact *= k
        acc = acc + power.scale(1.0 / fact)
    return acc


def translation_operator(rho: list[GrassmannElement]) -> GrassmannMatrix:
    """One-qubit translation operator exp(sum_k m_k rho_k) over labels rho.

    ``rho`` is a triple of odd elements (usually fresh auxiliary generators)
    in kind order (p, q, r); m_k are the quantized generator matrices.  The
    exponent carries no extra i: with this normalization the composition law
    T(r') T(r'') = exp(sum r' r'') T(r' + r'') is exact.
    """
    if len(rho) != 3:
        raise ContractViolation("translation operator needs a generator triple")
    m = rho[0].num_generators
    exponent = GrassmannMatrix.from_complex(np.zeros((2, 2)), m)
    for kind, label in zip(("p", "q", "r"), rho):
        if label.num_generators != m:
            raise ContractViolation("triple must live in one algebra")
        exponent = exponent + GrassmannMatrix.from_complex(generator_matrix(kind), m).scale(label)
    return _matrix_exp(exponent, max_order=m + 1)


def reflection_operator(
    xi: list[GrassmannElement], aux_positions: list[int]
) -> GrassmannMatrix:
    """One-qubit reflection operator: Fourier dual of the translation family.

    ``xi`` is the evaluation triple (kind order p, q, r); ``aux_positions``
    names three scratch generators that are integrated out against the kernel
    ``exp(-sum_k xi_k rho_k)``, the sign convention matching the bare
    translation exponent.  Exact laws in this convention (both tested):

      R(b) R(a) = -exp(-sum_k a_k b_k) T(-(a + b))            [a, b triples]
      Tr(R(xi) g) = 2 [-i g(i xi) + g~(i xi)]

    where g~ is the odd dual with identity component +i x_p x_q x_r.  A
    literal self-inverse form is not attainable for any sign choice: the
    zero-argument reflection is a scalar matrix, so it cannot flip
    translation arguments by conjugation, and products of two reflections
    necessarily translate by the argument sum rather than the difference.
    """
    if len(xi) != 3 or len(aux_positions) != 3:
        raise ContractViolation("reflection operator needs triples")
    m = xi[0].num_generators
    rho = [GrassmannElement.generator(m, pos) for pos in aux_positions]
    t_op = translation_operator(rho)
    kernel = GrassmannElement.scalar(m, 1.0)
    for x, r in zip(xi, rho):
        kernel = multiply(kernel, GrassmannElement.scalar(m, 1.0) + multiply(x, r) * (-1.0))
    order = descending_block_order(aux_positions)
    return t_op.map_entries(lambda e: berezin_integrate(multiply(kernel, e), order))


def scalar_exp(even: GrassmannElement) -> GrassmannElement:
    """exp of an even element with scalar part folded out exactly."""
    s = even.scalar_part
    nil = even - GrassmannElement.scalar(even.num_generators, s)
    return exp_nilpotent(nil) * complex(np.exp(s))


__all__ = [
    "WeylSymbol",
    "quantization_map",
    "generator_matrix",
    "symbol_from_operator",
    "operator_from_symbol",
    "odd_symbol_from_operator",
    "expectation",
    "expectation_operator",
    "moyal_product",
    "GrassmannMatrix",
    "translation_operator",
    "reflection_operator",
    "word_even_element",
    "parity_split",
    "conjugate",
    "scalar_exp",
]
