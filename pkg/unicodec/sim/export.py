"""CSV and JSON persistence of simulation and bound results."""

import csv
import json
from pathlib import Path
from typing import Iterable, Union

from pydantic import TypeAdapter, ValidationError

from ..core.exceptions import ParseError
from .result import PointResult, SimResult

CSV_COLUMNS = ["scheme", "ebn0_db", "frames", "frame_errors", "bit_errors", "fer", "ber", "ci_low", "ci_high",
               "seconds", "kind"]

Results = Union[SimResult, Iterable[SimResult]]


def _as_list(results: Results) -> list[SimResult]:
    return [results] if isinstance(results, SimResult) else list(results)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def export_csv(results: Results, path: Union[str, Path]) -> Path:
    """One row per SNR point; bound curves carry ``kind=bound`` and empty counters."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\r\n")
        writer.writerow(CSV_COLUMNS)
        for result in _as_list(results):
            bound = result.kind == "bound"
            for p in result.points:
                writer.writerow([
                    result.scheme,
                    _fmt(p.ebn0_db),
                    "" if bound else p.frames,
                    "" if bound else p.frame_errors,
                    "" if bound else p.bit_errors,
                    _fmt(p.fer),
                    "" if bound else _fmt(p.ber),
                    "" if bound else _fmt(p.ci_low),
                    "" if bound else _fmt(p.ci_high),
                    _fmt(p.seconds),
                    result.kind,
                ])
    return path


def export_json(results: Results, path: Union[str, Path]) -> Path:
    """A single result is written as an object, several as a list; configs stay embedded."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(results, SimResult):
        text = results.model_dump_json(indent=2)
    else:
        text = json.dumps([r.model_dump(mode="json") for r in results], indent=2)
    path.write_text(text + "\n")
    return path


def _float(row: dict, key: str, lineno: int, path: Path):
    raw = (row.get(key) or "").strip()
    if not raw:
        return None
    try:
        return float(raw)
    except ValueError:
        raise ParseError(f"column {key!r}: not a number: {raw!r}", line=lineno, path=str(path)) from None


def _load_csv(path: Path) -> list[SimResult]:
    results: dict[tuple[str, str], SimResult] = {}
    with path.open(newline="") as f:
        reader = csv.DictReader(f)
        missing = set(CSV_COLUMNS[:-1]) - set(reader.fieldnames or [])
        if missing:
            raise ParseError(f"missing columns {sorted(missing)}", line=1, path=str(path))
        for lineno, row in enumerate(reader, start=2):
            kind = row.get("kind") or "simulation"
            if kind not in ("simulation", "bound"):
                raise ParseError(f"unknown kind {kind!r}", line=lineno, path=str(path))
            key = (row["scheme"], kind)
            result = results.setdefault(key, SimResult(scheme=row["scheme"], kind=kind))
            ebn0 = _float(row, "ebn0_db", lineno, path)
            if ebn0 is None:
                raise ParseError("empty ebn0_db", line=lineno, path=str(path))
            ints = {k: int(_float(row, k, lineno, path) or 0) for k in ("frames", "frame_errors", "bit_errors")}
            result.points.append(PointResult(
                ebn0_db=ebn0,
                fer=_float(row, "fer", lineno, path) or 0.0,
                ber=_float(row, "ber", lineno, path),
                ci_low=_float(row, "ci_low", lineno, path),
                ci_high=_float(row, "ci_high", lineno, path),
                seconds=_float(row, "seconds", lineno, path) or 0.0,
                termination="bound" if kind == "bound" else None,
                **ints,
            ))
    return list(results.values())


def load_results(path: Union[str, Path]) -> list[SimResult]:
    """Read results written by :func:`export_json` or :func:`export_csv`."""
    path = Path(path)
    try:
        if path.suffix.lower() == ".csv":
            return _load_csv(path)
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(f"cannot read results: {exc.strerror or exc}", path=str(path)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, path=str(path)) from exc
    try:
        if isinstance(data, list):
            return TypeAdapter(list[SimResult]).validate_python(data)
        return [SimResult.model_validate(data)]
    except ValidationError as exc:
        raise ParseError(f"not a result file\n{exc}", path=str(path)) from exc
