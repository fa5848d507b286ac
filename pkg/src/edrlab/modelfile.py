"""JSON model files and report documents.

A model file describes a measuring process, named observables and a state::

    {
      "format": "edrlab-model/1",
      "process": "spin:theta=pi/8",
      "A": "Z",
      "B": "X",
      "rho": "maximally_mixed"
    }

Instead of a preset, ``process`` may be an object with ``sys_dim``,
``probe_dim``, ``probe_state``, ``interaction`` and ``meter``.  Complex
entries are ``[re, im]`` pairs; matrices are row-major nested lists of them.
Matrix-valued fields also accept the presets ``"I"``, ``"X"``, ``"Y"``,
``"Z"`` and ``"zero"``; ``rho`` accepts ``"maximally_mixed"`` and
``"bloch:x,y,z"``.  Extra observables can go in an ``"observables"`` object
and are selected by name.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import EdrlabError
from .qmodel import DensityOperator, MeasuringProcess, MomentSet, Observable, pauli
from .relations import RelationReport
from .spinlab import build_spin_model

MODEL_FORMAT = "edrlab-model/1"
REPORT_FORMAT = "edrlab-report/1"
CSV_STAMP = "# edrlab relation table v1"
CSV_COLUMNS = ("id", "lhs", "rhs", "residual", "satisfied", "eps", "eta", "sigma_A", "sigma_B", "C", "D")


class ModelFileError(EdrlabError):
    """Unparseable or invalid model file; the message names the location."""


# -- scalars and matrices ------------------------------------------------------

_ANGLE = re.compile(r"^\s*(?:(?P<num>[-+]?[0-9.eE+-]+)\s*\*?\s*)?(?P<pi>pi|π)?\s*(?:/\s*(?P<den>[0-9.eE+-]+))?\s*$")


def parse_angle(text) -> float:
    """A number, or a multiple of pi such as ``"pi/8"``, ``"3*pi/4"``, ``"-pi"``."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip()
    if s.startswith("-") and s[1:].lstrip().startswith(("pi", "π")):
        return -parse_angle(s[1:])
    mt = _ANGLE.match(s)
    if not mt or (mt["num"] is None and mt["pi"] is None):
        raise ValueError(f"cannot parse angle {text!r}")
    val = float(mt["num"]) if mt["num"] is not None else 1.0
    if mt["pi"]:
        val *= math.pi
    if mt["den"] is not None:
        den = float(mt["den"])
        if den == 0:
            raise ValueError(f"cannot parse angle {text!r}: zero denominator")
        val /= den
    return val


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _complex(entry, where: str) -> complex:
    if _is_number(entry):
        return complex(entry)
    if isinstance(entry, list) and len(entry) == 2 and all(_is_number(v) for v in entry):
        return complex(entry[0], entry[1])
    raise ModelFileError(f"{where}: expected [re, im] pair of numbers, got {json.dumps(entry)}")


def decode_vector(data, where: str) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise ModelFileError(f"{where}: expected a non-empty list of [re, im] pairs")
    return np.array([_complex(e, f"{where}[{i}]") for i, e in enumerate(data)])


def decode_matrix(data, where: str, dim: int | None = None) -> np.ndarray:
    if isinstance(data, str):
        return _matrix_preset(data, where, dim)
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise ModelFileError(f"{where}: expected a nested list of rows")
    ncols = len(data[0])
    rows = []
    for i, row in enumerate(data):
        if len(row) != ncols:
            raise ModelFileError(f"{where}[{i}]: row has {len(row)} entries, expected {ncols}")
        rows.append([_complex(e, f"{where}[{i}][{j}]") for j, e in enumerate(row)])
    m = np.array(rows, dtype=complex)
    if dim is not None and m.shape != (dim, dim):
        raise ModelFileError(f"{where}: expected a {dim}x{dim} matrix, got {m.shape[0]}x{m.shape[1]}")
    return m


def _matrix_preset(name: str, where: str, dim: int | None) -> np.ndarray:
    key = name.strip()
    if key.upper() in ("I", "X", "Y", "Z"):
        m = pauli(key).matrix
        if key.upper() == "I" and dim not in (None, 2):
            m = np.eye(dim, dtype=complex)
    elif key == "zero":
        m = np.zeros((dim or 2, dim or 2), dtype=complex)
    else:
        raise ModelFileError(f"{where}: unknown matrix preset {name!r}")
    if dim is not None and m.shape[0] != dim:
        raise ModelFileError(f"{where}: preset {name!r} is {m.shape[0]}-dimensional, expected {dim}")
    return m


def encode_complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def encode_vector(v) -> list:
    return [encode_complex(z) for z in np.asarray(v).ravel()]


def encode_matrix(m) -> list:
    return [[encode_complex(z) for z in row] for row in np.asarray(m)]


# -- model documents -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ModelFile:
    process: MeasuringProcess
    rho: DensityOperator
    observables: dict = field(default_factory=dict)

    def observable(self, name: str) -> Observable:
        if name in self.observables:
            return self.observables[name]
        try:
            obs = pauli(name)
        except ValueError:
            raise ModelFileError(
                f"unknown observable {name!r}; file defines {sorted(self.observables)}"
            ) from None
        if obs.dim != self.process.sys_dim:
            raise ModelFileError(f"Pauli {name!r} needs a qubit system")
        return obs


def _wrap(where: str, fn, *args):
    try:
        return fn(*args)
    except ModelFileError:
        raise
    except (EdrlabError, ValueError) as exc:
        raise ModelFileError(f"{where}: {exc}") from exc


def _decode_process(data) -> MeasuringProcess:
    if isinstance(data, str):
        mt = re.match(r"^\s*spin\s*:\s*(?:theta|θ)\s*=\s*(.+)$", data)
        if not mt:
            raise ModelFileError(f"process: unknown preset {data!r} (expected 'spin:theta=<value>')")
        theta = _wrap("process", parse_angle, mt.group(1))
        return build_spin_model(theta)
    if not isinstance(data, dict):
        raise ModelFileError("process: expected a preset string or an object")
    for key in ("sys_dim", "probe_dim", "probe_state", "interaction", "meter"):
        if key not in data:
            raise ModelFileError(f"process: missing field {key!r}")
    d, k = data["sys_dim"], data["probe_dim"]
    if not (isinstance(d, int) and isinstance(k, int) and d >= 1 and k >= 1):
        raise ModelFileError("process: sys_dim and probe_dim must be positive integers")
    xi = decode_vector(data["probe_state"], "process.probe_state")
    u = decode_matrix(data["interaction"], "process.interaction", d * k)
    meter = _wrap("process.meter", Observable, decode_matrix(data["meter"], "process.meter", k))
    return _wrap(
        "process",
        lambda: MeasuringProcess(sys_dim=d, probe_dim=k, probe_state=xi, interaction=u, meter=meter),
    )


def decode_rho(data, dim: int) -> DensityOperator:
    if isinstance(data, str):
        key = data.strip()
        if key == "maximally_mixed":
            return DensityOperator.maximally_mixed(dim)
        if key.startswith("bloch:"):
            if dim != 2:
                raise ModelFileError("rho: bloch preset needs a qubit system")
            try:
                x, y, z = (float(t) for t in key[len("bloch:") :].split(","))
            except ValueError:
                raise ModelFileError(f"rho: cannot parse {data!r} as bloch:x,y,z") from None
            return _wrap("rho", DensityOperator.from_bloch, x, y, z)
    return _wrap("rho", DensityOperator, decode_matrix(data, "rho", dim))


def model_from_dict(doc) -> ModelFile:
    if not isinstance(doc, dict):
        raise ModelFileError("top level: expected a JSON object")
    fmt = doc.get("format", MODEL_FORMAT)
    if fmt != MODEL_FORMAT:
        raise ModelFileError(f"format: unsupported {fmt!r}, expected {MODEL_FORMAT!r}")
    if "process" not in doc:
        raise ModelFileError("top level: missing field 'process'")
    process = _decode_process(doc["process"])
    d = process.sys_dim
    rho = decode_rho(doc.get("rho", "maximally_mixed"), d)
    observables = {}
    for name in ("A", "B"):
        if name in doc:
            observables[name] = _wrap(name, Observable, decode_matrix(doc[name], name, d))
    extra = doc.get("observables", {})
    if not isinstance(extra, dict):
        raise ModelFileError("observables: expected an object of name -> matrix")
    for name, m in extra.items():
        where = f"observables.{name}"
        observables[name] = _wrap(where, Observable, decode_matrix(m, where, d))
    return ModelFile(process=process, rho=rho, observables=observables)


def loads_model(text: str) -> ModelFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return model_from_dict(doc)


def load_model(path) -> ModelFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ModelFileError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return loads_model(text)
    except ModelFileError as exc:
        raise ModelFileError(f"{path}: {exc}") from exc


def model_to_dict(model: ModelFile) -> dict:
    """Fully explicit document; floats are written with round-trip precision."""
    p = model.process
    doc = {
        "format": MODEL_FORMAT,
        "process": {
            "sys_dim": p.sys_dim,
            "probe_dim": p.probe_dim,
            "probe_state": encode_vector(p.probe_state),
            "interaction": encode_matrix(p.interaction),
            "meter": encode_matrix(p.meter.matrix),
        },
        "rho": encode_matrix(model.rho.rho),
    }
    extra = {}
    for name, obs in model.observables.items():
        if name in ("A", "B"):
            doc[name] = encode_matrix(obs.matrix)
        else:
            extra[name] = encode_matrix(obs.matrix)
    if extra:
        doc["observables"] = extra
    return doc


def dumps_model(model: ModelFile) -> str:
    return json.dumps(model_to_dict(model), indent=1)


def save_model(model: ModelFile, path) -> None:
    Path(path).write_text(dumps_model(model) + "\n")


# -- reports -----------------------------------------------------------------------


def fmt17(x: float) -> str:
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else format(float(x), ".17g")


def _num(x: float):
    return None if math.isnan(x) else x


def moments_dict(ms: MomentSet, c_ab: float, d_ab: float) -> dict:
    return {
        "eps_A": ms.eps_a,
        "eta_B": ms.eps_b,
        "sigma_A": ms.sigma_a,
        "sigma_B": ms.sigma_b,
        "sigma_out_A": ms.sigma_cal_a,
        "sigma_out_B": ms.sigma_cal_b,
        "delta_A": ms.delta_a,
        "delta_B": ms.delta_b,
        "C": c_ab,
        "D": d_ab,
    }


def report_dict(reports: list[RelationReport]) -> list[dict]:
    out = []
    for r in reports:
        out.append(
            {
                "id": r.id.name,
                "lhs": _num(r.lhs),
                "rhs": _num(r.rhs),
                "residual": _num(r.residual),
                "satisfied": r.satisfied if not r.skipped else None,
                "skipped": r.skipped,
                "comparator": r.comparator,
                "diagnostic": r.diagnostic,
            }
        )
    return out


def relation_csv(reports: list[RelationReport]) -> str:
    buf = io.StringIO()
    buf.write(CSV_STAMP + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        inp = r.inputs
        ms = inp.moments if inp else None
        if r.skipped:
            status = "skipped"
        else:
            status = "true" if r.satisfied else "false"
        w.writerow(
            [
                r.id.name,
                fmt17(r.lhs),
                fmt17(r.rhs),
                fmt17(r.residual),
                status,
                fmt17(ms.eps_a) if ms else "",
                fmt17(ms.eps_b) if ms else "",
                fmt17(ms.sigma_a) if ms else "",
                fmt17(ms.sigma_b) if ms else "",
                fmt17(inp.bounds.c_ab) if inp else "",
                fmt17(inp.bounds.d_ab) if inp else "",
            ]
        )
    return buf.getvalue()
