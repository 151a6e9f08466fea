"""Bundled reference systems with their published quantities."""
from __future__ import annotations

import numpy as np

from .criteria import SystemTriple

EXAMPLE1_A = np.diag([1.0, 2.0, -1.0, 3.0])
EXAMPLE1_B = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
EXAMPLE1_F = {
    "z1": np.array([[1.0, 1.0, 1.0, 1.0]]),
    "z2": np.array([[1.0, 1.0, 1.0, 0.0]]),
    "z3": np.array([[1.0, 1.0, 0.0, 0.0]]),
    "z4": np.array([[0.0, 0.0, 1.0, 1.0]]),
}
# (target output ctrb, functional stbl, functional ctrb) per functional
EXAMPLE1_VERDICTS = {
    "z1": (True, False, False),
    "z2": (True, True, False),
    "z3": (True, True, True),
    "z4": (False, False, False),
}

EXAMPLE2_A = np.array(
    [
        [0.25, 2.25, 0.75, -0.25, 1.50],
        [2.25, 0.25, -0.25, 0.75, -1.50],
        [1.75, 1.75, 0.25, 1.25, -0.50],
        [-1.25, -1.25, 2.25, 1.25, 0.50],
        [0.0, 0.0, 0.0, 0.0, -4.00],
    ]
)
EXAMPLE2_B = np.array([[2.0], [0.0], [0.0], [0.0], [0.0]])
EXAMPLE2_C = np.array([[1.0, 1.0, 0.0, 0.0, 0.0]])
EXAMPLE2_F = np.array([[0.5, 0.5, 0.5, 0.5, 0.0]])
EXAMPLE2_OPEN_LOOP = [-4.0, -1.0, -2.0, 2.0, 3.0]
EXAMPLE2_Z = np.array([[6.0]])
EXAMPLE2_CLOSED_LOOP = [-4.0, -3.0, -2.0, -1.0, 2.0]
# published observer parameters (N, E, K, J, H)
EXAMPLE2_OBSERVER = {
    "N": np.array([[-6.0]]),
    "E": np.array([[9.0]]),
    "K": np.array([[-18.0]]),
    "J": np.array([[-72.0]]),
    "H": np.array([[-17.0]]),
}
EXAMPLE2_PSI = np.array([[-3.0, 6.0], [0.0, -6.0]])

EXAMPLE3_F = np.array([[1.5, 1.5, -0.5, -0.5, 0.0]])
EXAMPLE3_R1 = np.array([[3.5, 3.5, -0.5, -0.5, 0.0]])
EXAMPLE3_Z = np.array([[-148.5, 65.5]])
EXAMPLE3_REDUCED_CLOSED_LOOP = np.array([[445.5, -195.5], [1033.5, -453.5]])
EXAMPLE3_CLOSED_LOOP = [-5.0, -4.0, -3.0, -2.0, -1.0]
EXAMPLE3_OBSERVER = {
    "N": np.diag([-6.0, -7.0]),
    "E": np.array([[-7.0], [-6.0]]),
    "K": np.array([[30.0], [48.0]]),
    "J": np.array([[72.0], [90.0]]),
    "H": np.array([[17.0], [19.0]]),
}
EXAMPLE3_PSI = np.array(
    [
        [445.5, -195.5, -445.5, 196.5],
        [1033.5, -453.5, -1039.5, 458.5],
        [0.0, 0.0, -6.0, 0.0],
        [0.0, 0.0, 0.0, -7.0],
    ]
)

HIDDEN_MODE_A = np.array([[1.0, 1.0, 1.0], [0.0, 2.0, 1.0], [0.0, 0.0, 1.0]])
HIDDEN_MODE_B = np.array([[1.0], [2.0], [0.0]])
HIDDEN_MODE_F = np.array([[1.0, 1.0, 0.0]])


def example1_system() -> SystemTriple:
    """Example 1 with the output matrix C = B^T used for the duality checks."""
    return SystemTriple(EXAMPLE1_A, EXAMPLE1_B, EXAMPLE1_B.T)


def example2_system() -> SystemTriple:
    return SystemTriple(EXAMPLE2_A, EXAMPLE2_B, EXAMPLE2_C)


def hidden_mode_system() -> SystemTriple:
    # no output is given for this system; measure the full state
    return SystemTriple(HIDDEN_MODE_A, HIDDEN_MODE_B, np.eye(3))


def system_document(name: str) -> dict:
    """JSON-ready system file for one of the bundled systems."""
    docs = {
        "example1": (example1_system(), EXAMPLE1_F["z3"]),
        "example2": (example2_system(), EXAMPLE2_F),
        "example3": (example2_system(), EXAMPLE3_F),
        "hidden_mode": (hidden_mode_system(), HIDDEN_MODE_F),
    }
    sys, F = docs[name]
    return {"A": sys.A.tolist(), "B": sys.B.tolist(), "C": sys.C.tolist(), "F": F.tolist()}
