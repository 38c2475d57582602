"""Code-spec files for polar codes.

JSON document::

    {
      "format": "unicodec.polar",
      "version": 1,
      "name": "polar",
      "n": 8, "K": 128,
      "design_snr_db": 2.41,
      "info_set": [[start, length], ...],        # run-length encoded, sorted runs
      "crc": {"name": "crc11", "degree": 11, "polynomial": "0x621", ...} | null,
      "length_match": {"kind": "none" | "punctured" | "shortened", "count": p},
      "block_profile": [..] | null,
      "i_min": [..] | null
    }
"""

import json
from pathlib import Path
from typing import Any, Sequence, Union

from pydantic import ValidationError

from ..core.exceptions import ParseError
from .construct import PolarCodeSpec

FORMAT_NAME = "unicodec.polar"
FORMAT_VERSION = 1


def rle_encode(indices: Sequence[int]) -> list[list[int]]:
    """Sorted index set -> [[start, length], ...] runs of consecutive indices."""
    runs: list[list[int]] = []
    for i in indices:
        i = int(i)
        if runs and runs[-1][0] + runs[-1][1] == i:
            runs[-1][1] += 1
        else:
            runs.append([i, 1])
    return runs


def rle_decode(runs: Sequence[Sequence[int]]) -> list[int]:
    out: list[int] = []
    for run in runs:
        if len(run) != 2 or run[1] < 1:
            raise ValueError(f"bad run {list(run)!r}")
        start, length = int(run[0]), int(run[1])
        if out and start <= out[-1]:
            raise ValueError("runs must be increasing and non-overlapping")
        out.extend(range(start, start + length))
    return out


def codespec_to_dict(spec: PolarCodeSpec) -> dict[str, Any]:
    data = spec.model_dump(mode="json")
    data["info_set"] = rle_encode(spec.info_set)
    return {"format": FORMAT_NAME, "version": FORMAT_VERSION, **data}


def codespec_from_dict(data: dict[str, Any], path: str = "<dict>") -> PolarCodeSpec:
    data = dict(data)
    fmt = data.pop("format", None)
    version = data.pop("version", None)
    if fmt != FORMAT_NAME:
        raise ParseError(f"not a polar code-spec document (format={fmt!r})", path=path)
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported code-spec version {version!r}", path=path)
    try:
        data["info_set"] = rle_decode(data.get("info_set", []))
        return PolarCodeSpec.model_validate(data)
    except (ValueError, TypeError, ValidationError) as e:
        raise ParseError(f"invalid code spec: {e}", path=path) from e


def write_codespec(spec: PolarCodeSpec, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(codespec_to_dict(spec), indent=2) + "\n", encoding="utf-8")
    return path


def read_codespec(path: Union[str, Path]) -> PolarCodeSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read code spec: {e.strerror}", path=str(path)) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno, path=str(path)) from e
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object", line=1, path=str(path))
    return codespec_from_dict(data, path=str(path))
