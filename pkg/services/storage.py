"""Reading state files and writing result files."""
import csv
import json
import math
import os
from typing import Iterable, List, Tuple

import numpy as np
from pydantic import BaseModel, ValidationError, model_validator

from models.harvest import SweepRow
from models.phase_space import DensityMatrix

CSV_FLOAT_FORMAT = ".17g"


class StateFileError(ValueError):
    """A state file could not be parsed against the DensityMatrix schema."""
    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or []


class DensityMatrixFile(BaseModel):
    """{"dim": n, "entries": [[[re, im], ...], ...]}, row-major."""
    dim: int
    entries: List[List[Tuple[float, float]]]

    @model_validator(mode="after")
    def check_shape(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if len(self.entries) != self.dim or any(len(row) != self.dim for row in self.entries):
            raise ValueError(f"entries must be a {self.dim}x{self.dim} array of [re, im] pairs")
        return self

    def to_density_matrix(self) -> DensityMatrix:
        data = np.array(self.entries, dtype=float)
        return DensityMatrix(dim=self.dim, entries=data[..., 0] + 1j * data[..., 1])


def parse_density_matrix(text: str) -> DensityMatrix:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise StateFileError(f"state file is not valid JSON: {e}", [str(e)]) from e
    try:
        return DensityMatrixFile.model_validate(payload).to_density_matrix()
    except ValidationError as e:
        errors = [f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()]
        raise StateFileError("state file does not match the DensityMatrix schema", errors) from e


def load_density_matrix(path: str) -> DensityMatrix:
    """Read and parse a DensityMatrix JSON file.

    Args:
        path: State file path

    Returns:
        The parsed DensityMatrix (invariants are not checked here)

    Raises:
        StateFileError: The file is not UTF-8, not JSON, or off-schema
        OSError: The file cannot be opened
    """
    with open(path, 'rb') as f:
        raw = f.read()
    try:
        text = raw.decode('utf-8')
    except UnicodeDecodeError as e:
        raise StateFileError(f"state file is not valid UTF-8: {e}", [str(e)]) from e
    return parse_density_matrix(text)


def save_density_matrix(rho: DensityMatrix, path: str) -> str:
    _ensure_parent(path)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(_json_safe(rho.to_dict()), f, indent=2, allow_nan=False)
    return path


def format_float(value: float) -> str:
    return format(float(value), CSV_FLOAT_FORMAT)


def write_sweep_csv(rows: Iterable[SweepRow], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SweepRow.COLUMNS)
    for row in rows:
        writer.writerow([format_float(v) for v in row.values()])


def save_sweep_csv(rows: Iterable[SweepRow], path: str) -> str:
    _ensure_parent(path)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        write_sweep_csv(rows, f)
    return path


def _json_safe(value):
    """Replace NaN and infinities with None so the output is strict JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def dump_json(data: dict, stream) -> None:
    json.dump(_json_safe(data), stream, indent=2, sort_keys=True, allow_nan=False)
    stream.write("\n")


def save_json(data: dict, path: str) -> str:
    _ensure_parent(path)
    with open(path, 'w', encoding='utf-8') as f:
        dump_json(data, f)
    return path


def _ensure_parent(path: str):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
