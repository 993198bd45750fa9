"""DGMA binary dumps, JSON sidecars and CSV tables, all written atomically."""

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

import numpy as np

from .domain import Domain2D
from .errors import InputError, PersistenceError
from .fields import GridFunction, StripField

MAGIC = b"DGMA"
FORMAT_VERSION = 1
KIND_STRIP = 0
KIND_GRID = 1
KIND_PATCH = 2

HEADER_DTYPE = np.dtype(
    [("magic", "S4"), ("version", "<u2"), ("kind", "u1"), ("rows", "<u4"), ("cols", "<u4")]
)

PathLike = Union[str, Path]


def ensure_directory(path: PathLike) -> Path:
    """Create a directory and its parents.

    Raises:
        PersistenceError: If the path exists as a file or cannot be created
    """
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as error:
        raise PersistenceError(f"Cannot create directory {path}", {"path": str(path), "reason": str(error)}) from error
    return path


def atomic_write_bytes(path: PathLike, data: bytes) -> Path:
    """Write to a temp file in the target directory, then rename over the target.

    Raises:
        PersistenceError: If the directory or the file cannot be written
    """
    path = Path(path)
    ensure_directory(path.parent)
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(data)
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as error:
        raise PersistenceError(f"Cannot write {path}", {"path": str(path), "reason": str(error)}) from error
    return path


def atomic_write_text(path: PathLike, text: str) -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"))


def write_json(path: PathLike, data: Dict[str, Any]) -> Path:
    return atomic_write_text(path, json.dumps(data, indent=4, sort_keys=True) + "\n")


def read_json(path: PathLike) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"Missing input file {path}", {"path": str(path)})
    with open(path, "r") as f:
        return json.load(f)


def sidecar_path(path: PathLike) -> Path:
    return Path(path).with_suffix(".json")


def encode_dump(kind: int, values: np.ndarray) -> bytes:
    values = np.ascontiguousarray(values, dtype="<f8")
    header = np.zeros(1, dtype=HEADER_DTYPE)
    header["magic"] = MAGIC
    header["version"] = FORMAT_VERSION
    header["kind"] = kind
    header["rows"], header["cols"] = values.shape
    return header.tobytes() + values.tobytes()


def decode_dump(data: bytes):
    """Return (kind, values) from DGMA bytes."""
    if len(data) < HEADER_DTYPE.itemsize:
        raise InputError("Truncated DGMA dump")
    header = np.frombuffer(data[: HEADER_DTYPE.itemsize], dtype=HEADER_DTYPE)[0]
    if header["magic"] != MAGIC:
        raise InputError("Not a DGMA dump", {"magic": header["magic"].decode("latin-1")})
    rows, cols = int(header["rows"]), int(header["cols"])
    payload = np.frombuffer(data[HEADER_DTYPE.itemsize:], dtype="<f8")
    if payload.size != rows * cols:
        raise InputError("DGMA payload size mismatch", {"rows": rows, "cols": cols, "size": payload.size})
    return int(header["kind"]), payload.reshape(rows, cols).astype(float)


def write_field(path: PathLike, obj) -> Path:
    """Dump a StripField, GridFunction or PatchField with its JSON sidecar."""
    from ..transforms.patch import PatchField

    if isinstance(obj, StripField):
        kind, meta = KIND_STRIP, {"period": obj.period, "n": obj.n}
    elif isinstance(obj, GridFunction):
        kind, meta = KIND_GRID, {"domain": obj.domain.to_dict(), "metadata": obj.metadata}
    elif isinstance(obj, PatchField):
        kind, meta = KIND_PATCH, obj.metadata_dict()
    else:
        raise TypeError(f"Cannot dump {type(obj).__name__}")
    meta["kind"] = kind
    path = Path(path)
    atomic_write_bytes(path, encode_dump(kind, obj.values))
    write_json(sidecar_path(path), meta)
    return path


def read_field(path: PathLike):
    """Load a dump written by write_field back into its original type."""
    from ..transforms.patch import PatchField

    path = Path(path)
    if not path.exists():
        raise InputError(f"Missing input file {path}", {"path": str(path)})
    kind, values = decode_dump(path.read_bytes())
    meta = read_json(sidecar_path(path)) if sidecar_path(path).exists() else {}
    if kind == KIND_STRIP:
        return StripField(values, float(meta.get("period", 2 * np.pi)), int(meta.get("n", 2)))
    if kind == KIND_GRID:
        domain = Domain2D.from_dict(meta.get("domain", {"kind": "disc", "a": 1.0, "b": 1.0}))
        return GridFunction(domain, values, dict(meta.get("metadata", {})))
    if kind == KIND_PATCH:
        return PatchField.from_metadata(values, meta)
    raise InputError("Unknown DGMA kind", {"kind": kind})


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(value) for value in row])
    return atomic_write_text(path, buffer.getvalue())


def format_cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return str(value)


def field_rows(values: np.ndarray, x1: np.ndarray, xn: np.ndarray) -> List[List[Any]]:
    """Rows 'i,j,x1,xn,value' with i the vertical (outer) index."""
    rows = []
    for i in range(values.shape[0]):
        for j in range(values.shape[1]):
            rows.append([i, j, float(x1[i, j]), float(xn[i, j]), float(values[i, j])])
    return rows


def export_field_csv(path: PathLike, obj) -> Path:
    """CSV export with header 'i,j,x1,xn,value'.

    Grid functions report physical (x, y) in the coordinate columns.
    """
    if isinstance(obj, GridFunction):
        x, y = obj.coordinates()
    else:
        x, y = np.meshgrid(obj.x1, obj.xn)
    return write_csv(path, ["i", "j", "x1", "xn", "value"], field_rows(obj.values, x, y))
