"""System-file parsing and JSON report serialisation."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .criteria import FunctionalTarget, SystemTriple
from .errors import DimensionMismatch, FuncCtlError, ParseError
from .numlin import TolerancePolicy

MATRIX_KEYS = ("A", "B", "C", "F", "R1", "R")
TOLERANCE_KEYS = ("relative_rank_tol", "absolute_zero_tol", "eigen_match_tol")


@dataclass(frozen=True)
class SystemFile:
    system: SystemTriple
    F: np.ndarray
    R1: np.ndarray | None
    R: np.ndarray | None
    tol: TolerancePolicy


def _matrix(doc: dict, key: str, where: str) -> np.ndarray:
    rows = doc[key]
    if not isinstance(rows, list) or not rows:
        raise ParseError(f"{where}: member {key!r} must be a non-empty array of rows")
    width = None
    for i, row in enumerate(rows):
        if not isinstance(row, list) or not row:
            raise ParseError(f"{where}: {key}[{i}] must be a non-empty array of numbers")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"{where}: {key}[{i}] has {len(row)} entries, expected {width}")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ParseError(f"{where}: {key}[{i}][{j}] is not a number: {v!r}")
    arr = np.array(rows, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{where}: {key} contains non-finite entries")
    return arr


def parse_system(doc, where: str = "<input>", env_tol: bool = True) -> SystemFile:
    if not isinstance(doc, dict):
        raise ParseError(f"{where}: top level must be a JSON object")
    for key in ("A", "B", "C", "F"):
        if key not in doc:
            raise ParseError(f"{where}: missing member {key!r}")
    # an empty R1/R means "no augmentation rows"; A, B, C, F must be non-empty
    mats = {k: _matrix(doc, k, where) for k in MATRIX_KEYS if k in doc and not (k in ("R1", "R") and doc[k] == [])}
    tol_doc = doc.get("tolerances", {}) or {}
    unknown = set(tol_doc) - set(TOLERANCE_KEYS)
    if unknown:
        raise ParseError(f"{where}: unknown tolerance keys {sorted(unknown)}")
    try:
        tol = TolerancePolicy.from_env(**tol_doc) if env_tol else TolerancePolicy(**tol_doc)
        sys = SystemTriple(mats["A"], mats["B"], mats["C"])
        F = FunctionalTarget(mats["F"]).F
        if F.shape[1] != sys.n:
            raise DimensionMismatch(f"F has {F.shape[1]} columns, expected n = {sys.n}")
        for key in ("R1", "R"):
            if key in mats and mats[key].shape[1] != sys.n:
                raise DimensionMismatch(f"{key} has {mats[key].shape[1]} columns, expected n = {sys.n}")
    except (FuncCtlError, ValueError, TypeError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{where}: {exc}") from exc
    return SystemFile(sys, F, mats.get("R1"), mats.get("R"), tol)


def load_system(path) -> SystemFile:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return parse_system(doc, str(path))


def matrix_json(M) -> list:
    """Row-major nested lists of Python floats (``repr`` round-trips exactly)."""
    return np.asarray(M, dtype=float).tolist()


def spectrum_json(values) -> list:
    return [[float(v.real), float(v.imag)] for v in np.asarray(values, dtype=complex).ravel()]


def spectrum_from_json(pairs) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False, allow_nan=False) + "\n"
