"""Spec-file ingestion: a JSON document describing one dynamics problem.

Schema (version 1):

    {
      "schema_version": 1,
      "n": 2,
      "gamma": 1.0,
      "p": 0.0,
      "lambda": 0.08,
      "H": [[[0.7, 0.0], [0.0, 0.0]],
            [[0.0, 0.0], [0.0, 0.0]]],
      "jumps": [ <matrix like H>, ... ],
      "grid": {"t0": 0.0, "t1": 1.0, "points": 21},
      "seed": 12345,
      "mc_samples": 100000          # optional
    }

Complex numbers are two-element [re, im] arrays; a matrix is a list of rows
of such pairs.  The file is validated completely before any computation, and
jump operators are brought to the traceless gauge on load (the shift is
reported to the caller).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .gksl import GKSLSpec, gauge_normalize

SCHEMA_VERSION = 1


class SpecFileError(ValueError):
    """Malformed or inconsistent spec file; message names the offending field."""


@dataclass(frozen=True)
class LoadedSpec:
    """Validated spec plus run parameters from the spec file."""

    gksl: GKSLSpec
    t0: float
    t1: float
    points: int
    seed: int
    mc_samples: int | None
    gauge_shift: float  # largest |Tr L_j| removed on load; 0.0 when none

    def time_grid(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.points)


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise SpecFileError(f"{where}: missing required field '{key}'")
    return obj[key]


def _finite_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecFileError(f"{where}: expected a number, got {type(value).__name__}")
    x = float(value)
    if not np.isfinite(x):
        raise SpecFileError(f"{where}: value must be finite")
    return x


def parse_complex_matrix(obj, n: int, where: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != n:
        raise SpecFileError(f"{where}: expected {n} rows")
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != n:
            raise SpecFileError(f"{where}[{i}]: expected {n} entries")
        for j, entry in enumerate(row):
            if not isinstance(entry, list) or len(entry) != 2:
                raise SpecFileError(f"{where}[{i}][{j}]: expected a [re, im] pair")
            re = _finite_number(entry[0], f"{where}[{i}][{j}][0]")
            im = _finite_number(entry[1], f"{where}[{i}][{j}][1]")
            out[i, j] = re + 1j * im
    return out


def matrix_to_json(m: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SpecFileError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise SpecFileError(f"{path}: top level must be an object")
    return doc


def load_spec_file(path: str) -> LoadedSpec:
    """Load and fully validate a spec file; no partial results on bad input."""
    doc = _load_json(path)

    version = _require(doc, "schema_version", path)
    if version != SCHEMA_VERSION:
        raise SpecFileError(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")

    n = _require(doc, "n", path)
    if not isinstance(n, int) or isinstance(n, bool) or not 2 <= n <= 32:
        raise SpecFileError(f"n: expected an integer in [2, 32], got {n!r}")

    gamma = _finite_number(_require(doc, "gamma", path), "gamma")
    p = _finite_number(_require(doc, "p", path), "p")
    coupling = _finite_number(_require(doc, "lambda", path), "lambda")

    h = parse_complex_matrix(_require(doc, "H", path), n, "H")
    jumps_doc = _require(doc, "jumps", path)
    if not isinstance(jumps_doc, list):
        raise SpecFileError("jumps: expected a list of matrices")
    jumps = tuple(parse_complex_matrix(obj, n, f"jumps[{j}]") for j, obj in enumerate(jumps_doc))

    grid = _require(doc, "grid", path)
    if not isinstance(grid, dict):
        raise SpecFileError("grid: expected an object with t0, t1, points")
    t0 = _finite_number(_require(grid, "t0", "grid"), "grid.t0")
    t1 = _finite_number(_require(grid, "t1", "grid"), "grid.t1")
    points = _require(grid, "points", "grid")
    if not isinstance(points, int) or isinstance(points, bool) or points < 2:
        raise SpecFileError(f"grid.points: expected an integer >= 2, got {points!r}")
    if not t1 > t0:
        raise SpecFileError(f"grid: t1 ({t1}) must exceed t0 ({t0})")

    seed = _require(doc, "seed", path)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise SpecFileError(f"seed: expected an unsigned 64-bit integer, got {seed!r}")

    mc_samples = doc.get("mc_samples")
    if mc_samples is not None and (
        not isinstance(mc_samples, int) or isinstance(mc_samples, bool) or mc_samples < 1
    ):
        raise SpecFileError(f"mc_samples: expected a positive integer, got {mc_samples!r}")

    try:
        raw = GKSLSpec(n=n, hamiltonian=h, jumps=jumps, coupling=coupling, gamma=gamma, p=p)
    except ValueError as exc:
        raise SpecFileError(str(exc)) from exc

    gauge_shift = max((abs(np.trace(L)) for L in raw.jumps), default=0.0)
    spec = gauge_normalize(raw)
    return LoadedSpec(
        gksl=spec,
        t0=t0,
        t1=t1,
        points=points,
        seed=seed,
        mc_samples=mc_samples,
        gauge_shift=float(gauge_shift) if gauge_shift > 1e-12 else 0.0,
    )


def load_superoperator_file(path: str, expected_n: int | None = None) -> np.ndarray:
    """Load an (n**2, n**2) superoperator matrix from a JSON file.

    Format: ``{"n": 2, "matrix": <n**2 x n**2 rows of [re, im] pairs>}``.
    """
    doc = _load_json(path)
    n = _require(doc, "n", path)
    if not isinstance(n, int) or isinstance(n, bool) or not 2 <= n <= 32:
        raise SpecFileError(f"n: expected an integer in [2, 32], got {n!r}")
    if expected_n is not None and n != expected_n:
        raise SpecFileError(f"n: matrix dimension {n} does not match spec dimension {expected_n}")
    return parse_complex_matrix(_require(doc, "matrix", path), n * n, "matrix")


def superoperator_to_json(m: np.ndarray, n: int) -> dict:
    return {"n": n, "matrix": matrix_to_json(m)}
