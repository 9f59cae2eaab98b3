"""Sparse exterior (Grassmann) algebra over a finite set of real generators.

Elements are finite sums of monomials in anticommuting generators
``x_0 ... x_{m-1}``.  A monomial is stored as a bitmask (bit i set means
generator i is a factor, factors kept in ascending index order) mapping to a
complex coefficient; every reordering sign is folded into the coefficient at
construction, so equal elements have equal term dicts.

Generator layout for qubit work: qubit ``j`` owns state generators at
positions ``3j + (0, 1, 2)`` for kinds ``(p, q, r)``; when dual (auxiliary)
generators are in play they occupy a second block of the same shape starting
at ``3n``.

Everything here is a pure function of immutable values; elements are never
mutated after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import _accel

# Coefficients below this are treated as exact zeros after every operation;
# all constants in this problem family are dyadic rationals times powers of
# 1/sqrt(2), which double precision holds to ~1e-15.
PRUNE_TOL = 1e-12

KINDS = ("p", "q", "r")
MAX_GENERATORS = 64


class ContractViolation(ValueError):
    """Raised when operands break a documented precondition."""


@dataclass(frozen=True, order=True)
class GeneratorIndex:
    """A (qubit, kind, space) triple naming one generator.

    ``space`` is "state" for the primary generators and "auxiliary" for the
    dual block used by Fourier transforms and translation operators.
    """

    qubit: int
    kind: str
    space: str = "state"

    def __post_init__(self):
        if self.qubit < 0:
            raise ContractViolation("qubit index must be >= 0")
        if self.kind not in KINDS:
            raise ContractViolation(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.space not in ("state", "auxiliary"):
            raise ContractViolation(f"unknown generator space {self.space!r}")

    def position(self, n_qubits: int) -> int:
        """Absolute bit position in an algebra over ``n_qubits`` qubits."""
        base = 0 if self.space == "state" else 3 * n_qubits
        return base + 3 * self.qubit + KINDS.index(self.kind)


def state_pos(qubit: int, kind: str) -> int:
    return 3 * qubit + KINDS.index(kind)


def aux_pos(qubit: int, kind: str, n_qubits: int) -> int:
    return 3 * n_qubits + 3 * qubit + KINDS.index(kind)


def _mask_sign_to_canonical(indices: Iterable[int]) -> tuple[int, int]:
    """Mask and reordering sign of a factor sequence given in any order."""
    seq = list(indices)
    mask = 0
    for i in seq:
        if not 0 <= i < MAX_GENERATORS:
            raise ContractViolation(f"generator index {i} out of range")
        bit = 1 << i
        if mask & bit:
            return 0, 0  # repeated factor annihilates
        mask |= bit
    inv = 0
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                inv += 1
    return mask, (-1) ** inv


class GrassmannElement:
    """Immutable sparse element of the exterior algebra on ``m`` generators."""

    __slots__ = ("num_generators", "_terms")

    def __init__(self, num_generators: int, terms: Mapping[int, complex] | None = None):
        if not 0 <= num_generators <= MAX_GENERATORS:
            raise ContractViolation(f"need 0..{MAX_GENERATORS} generators")
        object.__setattr__(self, "num_generators", num_generators)
        clean: dict[int, complex] = {}
        if terms:
            limit = 1 << num_generators
            for mask, coeff in terms.items():
                if not 0 <= mask < limit:
                    raise ContractViolation(f"mask {mask:#x} outside algebra")
                c = complex(coeff)
                if abs(c) > PRUNE_TOL:
                    clean[mask] = clean.get(mask, 0j) + c
            clean = {m: c for m, c in clean.items() if abs(c) > PRUNE_TOL}
        object.__setattr__(self, "_terms", clean)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, m: int) -> "GrassmannElement":
        return cls(m, {})

    @classmethod
    def scalar(cls, m: int, value: complex) -> "GrassmannElement":
        return cls(m, {0: value})

    @classmethod
    def generator(cls, m: int, i: int) -> "GrassmannElement":
        if not 0 <= i < m:
            raise ContractViolation(f"generator {i} outside algebra of size {m}")
        return cls(m, {1 << i: 1.0})

    @classmethod
    def monomial(cls, m: int, indices: Iterable[int], coeff: complex = 1.0) -> "GrassmannElement":
        """Element ``coeff * x_{i1} x_{i2} ...`` with factors in the given order."""
        mask, sign = _mask_sign_to_canonical(indices)
        if sign == 0:
            return cls.zero(m)
        return cls(m, {mask: sign * coeff})

    # -- basic structure ----------------------------------------------

    @property
    def terms(self) -> Mapping[int, complex]:
        return dict(self._terms)

    def coefficient(self, indices: Iterable[int]) -> complex:
        mask, sign = _mask_sign_to_canonical(indices)
        if sign == 0:
            return 0j
        return sign * self._terms.get(mask, 0j)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def scalar_part(self) -> complex:
        return self._terms.get(0, 0j)

    def degrees(self) -> set[int]:
        return {bin(mask).count("1") for mask in self._terms}

    def parity(self) -> str:
        """"even", "odd", or "mixed" by monomial degree."""
        degs = self.degrees()
        if all(d % 2 == 0 for d in degs):
            return "even"
        if degs and all(d % 2 == 1 for d in degs):
            return "odd"
        return "mixed"

    def max_degree(self) -> int:
        return max((bin(m).count("1") for m in self._terms), default=0)

    # -- ring operations ----------------------------------------------

    def _require_same_space(self, other: "GrassmannElement"):
        if self.num_generators != other.num_generators:
            raise ContractViolation(
                f"mismatched generator counts: {self.num_generators} vs {other.num_generators}"
            )

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = GrassmannElement.scalar(self.num_generators, other)
        self._require_same_space(other)
        terms = dict(self._terms)
        for mask, c in other._terms.items():
            terms[mask] = terms.get(mask, 0j) + c
        return GrassmannElement(self.num_generators, terms)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannElement(self.num_generators, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = GrassmannElement.scalar(self.num_generators, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return GrassmannElement(
                self.num_generators, {m: c * other for m, c in self._terms.items()}
            )
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * other
        return multiply(other, self)

    def __eq__(self, other):
        if not isinstance(other, GrassmannElement):
            return NotImplemented
        return self.num_generators == other.num_generators and self._terms == other._terms

    def __hash__(self):
        return hash((self.num_generators, tuple(sorted(self._terms.items(), key=lambda t: t[0]))))

    def almost_equals(self, other: "GrassmannElement", tol: float = 1e-9) -> bool:
        self._require_same_space(other)
        masks = set(self._terms) | set(other._terms)
        return all(abs(self._terms.get(m, 0j) - other._terms.get(m, 0j)) <= tol for m in masks)

    # -- representation -----------------------------------------------

    def to_text(self, labels=None) -> str:
        """Canonical debug form ``coeff*x[i]x[j]...`` sorted by bitmask."""
        if not self._terms:
            return "0"
        if labels is None:
            labels = [f"x{i}" for i in range(self.num_generators)]
        parts = []
        for mask in sorted(self._terms):
            c = self._terms[mask]
            factors = "".join(labels[i] for i in range(self.num_generators) if mask >> i & 1)
            cs = f"({c.real:.12g}{c.imag:+.12g}j)"
            parts.append(f"{cs}*{factors}" if factors else cs)
        return " + ".join(parts)

    def __repr__(self):
        return f"GrassmannElement({self.num_generators}, {self.to_text()})"

    # -- convenience transforms ----------------------------------------

    def map_coefficients(self, fn) -> "GrassmannElement":
        return GrassmannElement(self.num_generators, {m: fn(c) for m, c in self._terms.items()})

    def scale_generators(self, factor: complex) -> "GrassmannElement":
        """Substitute ``x_i -> factor * x_i`` for every generator."""
        return GrassmannElement(
            self.num_generators,
            {m: c * factor ** bin(m).count("1") for m, c in self._terms.items()},
        )

    def embed(self, m_new: int, offset: int) -> "GrassmannElement":
        """Re-home the element in a larger algebra, shifting generators by ``offset``."""
        if offset < 0 or self.num_generators + offset > m_new:
            raise ContractViolation("embedding does not fit target algebra")
        return GrassmannElement(m_new, {mask << offset: c for mask, c in self._terms.items()})


def multiply(a: GrassmannElement, b: GrassmannElement) -> GrassmannElement:
    """Algebra product; overlapping monomials annihilate, signs by inversion count."""
    a._require_same_space(b)
    if a.is_zero() or b.is_zero():
        return GrassmannElement.zero(a.num_generators)
    masks_a = np.fromiter(a._terms.keys(), dtype=np.int64, count=len(a._terms))
    coeffs_a = np.fromiter(a._terms.values(), dtype=np.complex128, count=len(a._terms))
    masks_b = np.fromiter(b._terms.keys(), dtype=np.int64, count=len(b._terms))
    coeffs_b = np.fromiter(b._terms.values(), dtype=np.complex128, count=len(b._terms))
    masks, coeffs = _accel.pair_products(masks_a, coeffs_a, masks_b, coeffs_b)
    masks, coeffs = _accel.accumulate(masks, coeffs, PRUNE_TOL)
    return GrassmannElement(a.num_generators, dict(zip(masks.tolist(), coeffs.tolist())))


def _extract(mask: int, pos: int, from_left: bool) -> tuple[int, int]:
    """Drop generator ``pos`` from a canonical monomial.

    Returns (new_mask, sign); sign 0 when the generator is absent.  Left
    extraction hops over the lower-index factors, right extraction over the
    higher ones.
    """
    bit = 1 << pos
    if not mask & bit:
        return 0, 0
    if from_left:
        hops = bin(mask & (bit - 1)).count("1")
    else:
        hops = bin(mask & ~((bit << 1) - 1)).count("1")
    return mask ^ bit, (-1) ** hops


def derivative(g: GrassmannElement, index: int, side: str = "left") -> GrassmannElement:
    """Left or right partial derivative with respect to generator ``index``."""
    if side not in ("left", "right"):
        raise ContractViolation("side must be 'left' or 'right'")
    if not 0 <= index < g.num_generators:
        raise ContractViolation(f"generator {index} outside algebra")
    out: dict[int, complex] = {}
    for mask, c in g._terms.items():
        new_mask, sign = _extract(mask, index, side == "left")
        if sign:
            out[new_mask] = out.get(new_mask, 0j) + sign * c
    return GrassmannElement(g.num_generators, out)


def berezin_integrate(g: GrassmannElement, order: list[int]) -> GrassmannElement:
    """Iterated Berezin integral, differentials applied in list order.

    Each single integral acts as a right derivative: the integral of 1 is 0
    and of the generator itself is 1.  The order sensitivity is real, so call
    sites must spell the order out.
    """
    if len(set(order)) != len(order):
        raise ContractViolation("duplicate generator in integration order")
    out = g
    for pos in order:
        out = derivative(out, pos, side="right")
    return out


def descending_block_order(positions: list[int]) -> list[int]:
    """The conventional integration order for a generator block: descending."""
    return sorted(positions, reverse=True)


def conjugate(g: GrassmannElement) -> GrassmannElement:
    """Involution: conjugate coefficients and reverse each monomial's factors.

    Generators are real, so reversal contributes (-1)^(k(k-1)/2) on degree-k
    monomials.
    """
    out = {}
    for mask, c in g._terms.items():
        k = bin(mask).count("1")
        sign = (-1) ** (k * (k - 1) // 2)
        out[mask] = sign * complex(c).conjugate()
    return GrassmannElement(g.num_generators, out)


def parity_split(g: GrassmannElement) -> tuple[GrassmannElement, GrassmannElement]:
    """Split into (even, odd) graded parts; their sum is ``g`` exactly."""
    even, odd = {}, {}
    for mask, c in g._terms.items():
        (even if bin(mask).count("1") % 2 == 0 else odd)[mask] = c
    return (
        GrassmannElement(g.num_generators, even),
        GrassmannElement(g.num_generators, odd),
    )


def exp_nilpotent(g: GrassmannElement, max_order: int | None = None) -> GrassmannElement:
    """exp of an element with no scalar part; the series terminates."""
    if abs(g.scalar_part) > PRUNE_TOL:
        raise ContractViolation("exp_nilpotent needs a vanishing scalar part")
    if max_order is None:
        max_order = g.num_generators
    acc = GrassmannElement.scalar(g.num_generators, 1.0)
    power = GrassmannElement.scalar(g.num_generators, 1.0)
    fact = 1.0
    for k in range(1, max_order + 1):
        power = multiply(power, g)
        if power.is_zero():
            break
        fact *= k
        acc = acc + power * (1.0 / fact)
    return acc


def fourier(g: GrassmannElement, n_qubits: int, direction: str = "forward") -> GrassmannElement:
    """Fourier transform between the state and auxiliary generator blocks.

    The element lives in the doubled algebra on ``6 * n_qubits`` generators:
    state block at positions ``[0, 3n)`` and the dual block at ``[3n, 6n)``.
    Forward maps a dual-block element to the state block through the kernel
    ``exp(i * sum_k x_k rho_k)`` integrated over the dual block; inverse goes
    the other way with the conjugate kernel and one factor ``i`` per qubit.
    Forward of odd input is even and vice versa.
    """
    m = 6 * n_qubits
    if g.num_generators != m:
        raise ContractViolation(f"fourier needs the doubled algebra on {m} generators")
    state = [3 * q + k for q in range(n_qubits) for k in range(3)]
    dual = [3 * n_qubits + i for i in state]
    state_mask = sum(1 << i for i in state)
    dual_mask = sum(1 << i for i in dual)

    if direction == "forward":
        if any(mask & state_mask for mask in g._terms):
            raise ContractViolation("forward transform input must use only auxiliary generators")
        kernel_sign, integrate_over, factor = 1.0, dual, 1.0
    elif direction == "inverse":
        if any(mask & dual_mask for mask in g._terms):
            raise ContractViolation("inverse transform input must use only state generators")
        kernel_sign, integrate_over, factor = -1.0, state, 1j ** n_qubits
    else:
        raise ContractViolation("direction must be 'forward' or 'inverse'")

    kernel = GrassmannElement.scalar(m, 1.0)
    for s, d in zip(state, dual):
        pair = GrassmannElement.monomial(m, [s, d], kernel_sign * 1j)
        kernel = multiply(kernel, GrassmannElement.scalar(m, 1.0) + pair)
    integrand = multiply(kernel, g)
    result = berezin_integrate(integrand, descending_block_order(integrate_over))
    return result * factor


def gaussian_integral(a: np.ndarray) -> float:
    """Berezin integral of ``exp(sum_{jk} a_{jk} x_j x_k)`` over all generators.

    ``a`` must be real antisymmetric.  The value is the Pfaffian of ``2a``
    (zero for odd dimension), whose magnitude is ``sqrt(det|2a|)``; the
    integration order is descending, matching :func:`berezin_integrate`
    conventions, which fixes the sign.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractViolation("gaussian_integral needs a square matrix")
    if not np.allclose(a, -a.T, atol=1e-12):
        raise ContractViolation("matrix must be antisymmetric")
    m = a.shape[0]
    if m % 2 == 1:
        return 0.0
    return _pfaffian(2.0 * a)


def _pfaffian(b: np.ndarray) -> float:
    """Pfaffian by recursive expansion along the first row (small matrices)."""
    m = b.shape[0]
    if m == 0:
        return 1.0
    if m == 2:
        return float(b[0, 1])
    total = 0.0
    rest = list(range(1, m))
    for idx, j in enumerate(rest):
        coeff = (-1) ** idx * b[0, j]
        if coeff == 0.0:
            continue
        keep = [k for k in rest if k != j]
        total += coeff * _pfaffian(b[np.ix_(keep, keep)])
    return float(total)


def gaussian_integral_series(a: np.ndarray) -> float:
    """Independent evaluation of the Gaussian integral by expanding the kernel."""
    a = np.asarray(a, dtype=float)
    m = a.shape[0]
    if not np.allclose(a, -a.T, atol=1e-12):
        raise ContractViolation("matrix must be antisymmetric")
    quad = GrassmannElement.zero(m)
    for j in range(m):
        for k in range(m):
            if a[j, k] != 0.0:
                quad = quad + GrassmannElement.monomial(m, [j, k], a[j, k])
    kernel = exp_nilpotent(quad)
    top = berezin_integrate(kernel, descending_block_order(list(range(m))))
    val = top.scalar_part
    return float(val.real)
