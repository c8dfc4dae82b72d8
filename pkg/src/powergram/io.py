"""Network file ingestion and report serialization.

One structured-text (JSON) schema covers all networks:

    {
      "name": "ieee9",
      "N": 3,
      "M": [ ... N positive reals ... ],
      "D": [ ... N positive reals ... ],
      "L": [ [ ... ], ... ]            # N x N, exactly one of L /
      "admittance": {                  # admittance may be present
        "Y_real": [[...]], "Y_imag": [[...]],
        "E": [...], "theta_eq": [...]
      }
    }

Floats are written back with their full-precision (round-trip exact)
decimal representation, so ingest -> serialize -> ingest is lossless.
Ingestion is forgiving about small asymmetries in L (printed matrices
are rounded): it symmetrizes, rebuilds the diagonal from the
off-diagonal row sums, warns when the adjustment is large, and only then
enforces the structural invariants.
"""

from __future__ import annotations

import csv
import json
import warnings
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ModelError
from .network import GeneratorNetwork, ReducedAdmittanceData, laplacian_from_admittance

__all__ = [
    "BUNDLED_NETWORKS",
    "bundled_network_path",
    "ingest",
    "serialize_network",
    "save_network",
    "fmt_float",
    "write_json_report",
    "write_csv_table",
]

BUNDLED_NETWORKS = {"ieee9": "ieee9bus.json"}


def bundled_network_path(name: str = "ieee9") -> Path:
    """Filesystem path of a network file shipped with the package."""
    if name not in BUNDLED_NETWORKS:
        raise ValueError(
            f"unknown bundled network {name!r} "
            f"(available: {sorted(BUNDLED_NETWORKS)})"
        )
    return Path(
        str(resources.files("powergram").joinpath("data", BUNDLED_NETWORKS[name]))
    )


def fmt_float(x: float) -> str:
    """Round-trip exact decimal text for a float (<= 17 significant digits)."""
    return repr(float(x))


def _require(condition: bool, where: str, message: str) -> None:
    if not condition:
        raise ModelError(f"{where}: {message}")


def _as_number_list(raw, where: str, n: int) -> np.ndarray:
    _require(isinstance(raw, list), where, f"expected a list of {n} numbers")
    _require(len(raw) == n, where, f"expected {n} entries, got {len(raw)}")
    for k, v in enumerate(raw):
        _require(
            isinstance(v, (int, float)) and not isinstance(v, bool),
            f"{where}[{k}]",
            f"expected a number, got {v!r}",
        )
    return np.array(raw, dtype=float)


def _as_matrix(raw, where: str, n: int) -> np.ndarray:
    _require(isinstance(raw, list), where, f"expected {n} rows")
    _require(len(raw) == n, where, f"expected {n} rows, got {len(raw)}")
    rows = [_as_number_list(row, f"{where}[{k}]", n) for k, row in enumerate(raw)]
    return np.vstack(rows)


def _canonicalize_laplacian(L: np.ndarray, where: str) -> np.ndarray:
    # Symmetrize and rebuild the diagonal before invariant checks; warn
    # if the input was further from symmetric than printed rounding noise.
    scale = max(1.0, float(np.max(np.abs(L))))
    asym = float(np.max(np.abs(L - L.T)))
    if asym > 1e-6 * scale:
        warnings.warn(
            f"{where}: Laplacian asymmetry {asym:.3e} exceeds 1e-6; "
            "symmetrizing, but the data deserves a second look",
            stacklevel=3,
        )
    L = 0.5 * (L + L.T)
    np.fill_diagonal(L, 0.0)
    np.fill_diagonal(L, -L.sum(axis=1))
    return L


def ingest(path) -> GeneratorNetwork:
    """Parse and validate a network file into a :class:`GeneratorNetwork`.

    Schema or invariant violations raise :class:`ModelError` naming the
    offending field.
    """
    path = Path(path)
    where = str(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelError(f"{where}: cannot read file: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{where}: invalid JSON: {exc}") from exc
    _require(isinstance(doc, dict), where, "top level must be an object")

    _require("name" in doc, f"{where}:name", "missing field")
    _require(isinstance(doc["name"], str), f"{where}:name", "expected a string")
    _require("N" in doc, f"{where}:N", "missing field")
    n = doc["N"]
    _require(
        isinstance(n, int) and not isinstance(n, bool) and n >= 2,
        f"{where}:N",
        f"expected an integer >= 2, got {n!r}",
    )
    for key in ("M", "D"):
        _require(key in doc, f"{where}:{key}", "missing field")
    M = _as_number_list(doc["M"], f"{where}:M", n)
    D = _as_number_list(doc["D"], f"{where}:D", n)

    has_L = "L" in doc
    has_adm = "admittance" in doc
    _require(
        has_L != has_adm,
        where,
        "exactly one of 'L' and 'admittance' must be present",
    )
    admittance = None
    if has_L:
        L = _canonicalize_laplacian(_as_matrix(doc["L"], f"{where}:L", n), where)
    else:
        adm = doc["admittance"]
        _require(
            isinstance(adm, dict), f"{where}:admittance", "expected an object"
        )
        for key in ("Y_real", "Y_imag", "E", "theta_eq"):
            _require(key in adm, f"{where}:admittance.{key}", "missing field")
        Y = _as_matrix(
            adm["Y_real"], f"{where}:admittance.Y_real", n
        ) + 1j * _as_matrix(adm["Y_imag"], f"{where}:admittance.Y_imag", n)
        E = _as_number_list(adm["E"], f"{where}:admittance.E", n)
        theta = _as_number_list(adm["theta_eq"], f"{where}:admittance.theta_eq", n)
        admittance = ReducedAdmittanceData(Y=Y, voltage=E, angle=theta)
        L = laplacian_from_admittance(admittance)

    return GeneratorNetwork(
        M=M, D=D, L=L, name=doc["name"], admittance=admittance
    )


def serialize_network(net: GeneratorNetwork) -> dict:
    """Schema-shaped dict for a network (numeric content round-trip exact)."""
    doc = {
        "name": net.name,
        "N": net.N,
        "M": net.M.tolist(),
        "D": net.D.tolist(),
        "L": net.L.tolist(),
    }
    if net.admittance is not None:
        adm = net.admittance
        doc["admittance_data"] = {
            "Y_real": adm.Y.real.tolist(),
            "Y_imag": adm.Y.imag.tolist(),
            "E": adm.voltage.tolist(),
            "theta_eq": adm.angle.tolist(),
        }
    return doc


def save_network(net: GeneratorNetwork, path) -> None:
    Path(path).write_text(json.dumps(serialize_network(net), indent=2) + "\n")


def write_json_report(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=False) + "\n")


def write_csv_table(path, comments: list[str], header: list[str], rows) -> None:
    """CSV with '#' comment lines up front (gnuplot skips them natively)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [fmt_float(v) if isinstance(v, float) else v for v in row]
            )
