"""grasswig: exterior-algebra phase-space simulation of qubit stabilizer circuits.

Subpackages by concern: ``grassmann`` (sparse anticommuting-generator
algebra), ``weyl`` (operator <-> phase-space symbol calculus and star
product), ``dynamics`` (gate generator flows and their classical/non-classical
classification), ``phasespace`` (signed-Pauli points, probability vectors and
the permutation engine), ``twogen`` (grid Wigner functions, the binary
tableau engine and state-dependent evolution), ``measurement`` (square-of-nine
contextuality apparatus), ``oracle`` (dense-matrix ground truth), ``cli``
(circuit-file front end).
"""

__version__ = "0.1.0"

__all__ = [
    "grassmann",
    "weyl",
    "dynamics",
    "phasespace",
    "twogen",
    "measurement",
    "oracle",
]
