"""Parity-check matrices: sparse storage, quasi-cyclic lifting, Tanner graphs and file formats.

Lifting convention: a non-negative shift s at base cell (i, j) becomes the Z x Z identity
cyclically right-shifted by s, i.e. ones at (r, (r + s) mod Z); -1 is the all-zero block.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, model_validator

from ..core.exceptions import ConstructionError, DomainError, ParseError
from ..core.types import BitVector, as_bits

logger = logging.getLogger(__name__)

# dense GF(2) elimination beyond this many entries is refused
DENSE_ELIMINATION_LIMIT = 60_000_000


class BaseGraph(BaseModel):
    """Shift table of a quasi-cyclic matrix (-1 marks a zero block)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lifting_size: int
    shifts: tuple[tuple[int, ...], ...]

    @model_validator(mode="after")
    def _rectangular(self) -> "BaseGraph":
        if self.lifting_size < 1:
            raise ValueError(f"lifting size must be >= 1, got {self.lifting_size}")
        if not self.shifts or len({len(row) for row in self.shifts}) != 1 or not self.shifts[0]:
            raise ValueError("shift table must be a non-empty rectangle")
        return self

    @property
    def rows(self) -> int:
        return len(self.shifts)

    @property
    def cols(self) -> int:
        return len(self.shifts[0])

    def table(self) -> np.ndarray:
        return np.array(self.shifts, dtype=np.int64)

    def expand(self) -> "ParityCheckMatrix":
        return expand_base_graph(self.shifts, self.lifting_size)


@dataclass(frozen=True)
class TannerGraph:
    """Edge-indexed bipartite graph of H.

    Edges are numbered in row-major order (the CSR order of H). ``col_order`` lists the edge
    numbers sorted by column, so variable-node sums can be taken over contiguous slices.
    """

    vn_degrees: np.ndarray
    cn_degrees: np.ndarray
    edge_rows: np.ndarray
    edge_cols: np.ndarray
    row_starts: np.ndarray
    col_order: np.ndarray
    col_starts: np.ndarray

    @property
    def num_edges(self) -> int:
        return int(self.edge_rows.size)


class ParityCheckMatrix:
    """Sparse GF(2) parity-check matrix with row- and column-major views.

    Args:
        matrix: Anything ``scipy.sparse.csr_matrix`` accepts; entries are reduced mod 2.
        base_graph: Shift table the matrix was lifted from. Checked against ``matrix``.
        layers: Ordered partition of the rows for layered decoding. Defaults to blocks of Z
            consecutive rows when the lifting size is known and one layer per row otherwise.
        name: Label used in logs and file headers.
        lifting_size: Z of a quasi-cyclic matrix given without its shift table.
    """

    def __init__(self, matrix, base_graph: Optional[BaseGraph] = None,
                 layers: Optional[Sequence[Sequence[int]]] = None, name: str = "H",
                 lifting_size: Optional[int] = None):
        csr = sp.csr_matrix(matrix, dtype=np.int64)
        csr.sum_duplicates()
        csr.data %= 2
        csr.eliminate_zeros()
        csr.sort_indices()
        self.csr = csr.astype(np.uint8)
        self.csc = self.csr.tocsc()
        self.csc.sort_indices()
        self.name = name
        self.base_graph = base_graph
        if base_graph is not None and lifting_size not in (None, base_graph.lifting_size):
            raise DomainError(f"{name}: lifting size {lifting_size} disagrees with the base graph")
        self.lifting_size = base_graph.lifting_size if base_graph is not None else lifting_size
        if base_graph is not None:
            expected = _lift(base_graph.table(), base_graph.lifting_size)
            if expected.shape != self.csr.shape or (expected != self.csr).nnz:
                raise ConstructionError(f"{name}: matrix does not match its shift table")
        self.layers = self._check_layers(layers if layers is not None else self._default_layers())

    @classmethod
    def from_dense(cls, dense: ArrayLike, **kwargs) -> "ParityCheckMatrix":
        arr = np.asarray(dense)
        if arr.ndim != 2:
            raise DomainError(f"dense parity-check matrix must be 2-D, got shape {arr.shape}")
        return cls(sp.csr_matrix(arr.astype(np.int64) % 2), **kwargs)

    @property
    def M(self) -> int:
        return self.csr.shape[0]

    @property
    def N(self) -> int:
        return self.csr.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.csr.shape

    @property
    def nnz(self) -> int:
        return int(self.csr.nnz)

    @property
    def row_degrees(self) -> np.ndarray:
        return np.diff(self.csr.indptr)

    @property
    def col_degrees(self) -> np.ndarray:
        return np.diff(self.csc.indptr)

    def row(self, i: int) -> np.ndarray:
        return self.csr.indices[self.csr.indptr[i]:self.csr.indptr[i + 1]]

    def col(self, j: int) -> np.ndarray:
        return self.csc.indices[self.csc.indptr[j]:self.csc.indptr[j + 1]]

    def to_dense(self) -> np.ndarray:
        return self.csr.toarray().astype(np.uint8)

    def submatrix(self, rows: int, cols: int, name: Optional[str] = None) -> "ParityCheckMatrix":
        """Leading ``rows`` x ``cols`` block, keeping the base graph when the cut is block aligned."""
        base = None
        if self.base_graph is not None:
            Z = self.base_graph.lifting_size
            if rows % Z == 0 and cols % Z == 0:
                table = self.base_graph.table()[: rows // Z, : cols // Z]
                base = BaseGraph(lifting_size=Z, shifts=tuple(map(tuple, table.tolist())))
        return ParityCheckMatrix(self.csr[:rows, :cols], base_graph=base, name=name or self.name)

    def recover_base_graph(self, lifting_size: Optional[int] = None) -> BaseGraph:
        """Read the shift table back by inspecting every Z x Z block.

        Raises:
            ConstructionError: A block is neither zero nor a cyclically shifted identity.
        """
        Z = lifting_size or self.lifting_size
        if Z is None:
            raise DomainError("lifting size required for a matrix without base graph")
        if self.M % Z or self.N % Z:
            raise DomainError(f"{self.M}x{self.N} is not a multiple of Z={Z}")
        rows, cols = self.M // Z, self.N // Z
        table = np.full((rows, cols), -1, dtype=np.int64)
        coo = self.csr.tocoo()
        block_r, block_c = coo.row // Z, coo.col // Z
        shift = (coo.col % Z - coo.row % Z) % Z
        for (bi, bj) in set(zip(block_r.tolist(), block_c.tolist())):
            sel = (block_r == bi) & (block_c == bj)
            values = np.unique(shift[sel])
            if sel.sum() != Z or values.size != 1:
                raise ConstructionError(f"block ({bi}, {bj}) is not a shifted identity")
            table[bi, bj] = values[0]
        return BaseGraph(lifting_size=Z, shifts=tuple(map(tuple, table.tolist())))

    def tanner_graph(self) -> TannerGraph:
        edge_rows = np.repeat(np.arange(self.M), self.row_degrees)
        edge_cols = self.csr.indices.astype(np.int64)
        col_order = np.argsort(edge_cols, kind="stable")
        col_starts = np.concatenate([[0], np.cumsum(self.col_degrees)])
        return TannerGraph(
            vn_degrees=self.col_degrees,
            cn_degrees=self.row_degrees,
            edge_rows=edge_rows,
            edge_cols=edge_cols,
            row_starts=self.csr.indptr.astype(np.int64),
            col_order=col_order,
            col_starts=col_starts,
        )

    def _default_layers(self) -> list[list[int]]:
        Z = self.lifting_size
        if Z is None:
            return [[i] for i in range(self.M)]
        if Z < 1 or self.M % Z or self.N % Z:
            raise DomainError(f"{self.name}: {self.M} x {self.N} matrix is not made of {Z} x {Z} blocks")
        return [list(range(i, i + Z)) for i in range(0, self.M, Z)]

    def _check_layers(self, layers: Sequence[Sequence[int]]) -> tuple[np.ndarray, ...]:
        arrays = tuple(np.asarray(layer, dtype=np.int64) for layer in layers)
        flat = np.concatenate(arrays) if arrays else np.array([], dtype=np.int64)
        if flat.size != self.M or not np.array_equal(np.sort(flat), np.arange(self.M)):
            raise DomainError(f"{self.name}: layers must partition the {self.M} rows")
        return arrays

    def __repr__(self) -> str:
        qc = f", Z={self.lifting_size}" if self.lifting_size is not None else ""
        return f"ParityCheckMatrix(name={self.name}, M={self.M}, N={self.N}, nnz={self.nnz}{qc})"


def _lift(table: np.ndarray, Z: int) -> sp.csr_matrix:
    rows, cols = np.nonzero(table >= 0)
    shifts = table[rows, cols]
    r = np.arange(Z)
    row_idx = (rows[:, None] * Z + r[None, :]).ravel()
    col_idx = (cols[:, None] * Z + (r[None, :] + shifts[:, None]) % Z).ravel()
    data = np.ones(row_idx.size, dtype=np.int64)
    return sp.csr_matrix((data, (row_idx, col_idx)), shape=(table.shape[0] * Z, table.shape[1] * Z))


def expand_base_graph(shifts: ArrayLike, Z: int, name: str = "H") -> ParityCheckMatrix:
    """Lift a shift table by Z.

    Raises:
        DomainError: Z < 1 or a shift outside [-1, Z).
    """
    table = np.asarray(shifts, dtype=np.int64)
    if table.ndim != 2 or table.size == 0:
        raise DomainError("shift table must be a non-empty 2-D array")
    if Z < 1:
        raise DomainError(f"lifting size must be >= 1, got {Z}")
    bad = (table < -1) | (table >= Z)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise DomainError(f"shift {table[i, j]} at ({i}, {j}) outside [-1, {Z})")
    base = BaseGraph(lifting_size=Z, shifts=tuple(map(tuple, table.tolist())))
    return ParityCheckMatrix(_lift(table, Z), base_graph=base, name=name)


def syndrome(H: ParityCheckMatrix, word: ArrayLike) -> BitVector:
    """H w^T over GF(2)."""
    bits = as_bits(word)
    if bits.size != H.N:
        raise DomainError(f"word length {bits.size} != N={H.N}")
    return (np.asarray(H.csr @ bits.astype(np.int64)) % 2).astype(np.uint8)


def gf2_row_reduce(A: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row echelon form over GF(2).

    Returns:
        (R, pivots): the non-zero rows of the RREF and the pivot column of each.
    """
    R = np.array(A, dtype=np.uint8) % 2
    M, N = R.shape
    if M * N > DENSE_ELIMINATION_LIMIT:
        raise ConstructionError(f"{M}x{N} is too large for dense GF(2) elimination")
    pivots = []
    row = 0
    for col in range(N):
        if row == M:
            break
        candidates = np.flatnonzero(R[row:, col])
        if candidates.size == 0:
            continue
        p = row + candidates[0]
        if p != row:
            R[[row, p]] = R[[p, row]]
        hits = np.flatnonzero(R[:, col])
        hits = hits[hits != row]
        R[hits] ^= R[row]
        pivots.append(col)
        row += 1
    return R[:row], np.array(pivots, dtype=np.int64)


def gf2_rank(A: ArrayLike) -> int:
    return int(gf2_row_reduce(A)[1].size)


# ---------------------------------------------------------------------------
# alist files


def _tokenized_lines(text: str) -> list[tuple[int, list[int]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split()
        if not fields:
            continue
        try:
            out.append((lineno, [int(x) for x in fields]))
        except ValueError:
            raise ParseError(f"non-integer entry in {raw.strip()!r}", line=lineno) from None
    return out


def parse_alist(text: str, path: Optional[str] = None, name: str = "H") -> ParityCheckMatrix:
    """Parse alist text: ``N M``, max degrees, column degrees, row degrees, then the column
    lists and row lists (1-based, zero padding optional)."""
    lines = _tokenized_lines(text)

    def need(index: int, what: str) -> tuple[int, list[int]]:
        if index >= len(lines):
            last = lines[-1][0] + 1 if lines else 1
            raise ParseError(f"missing {what}", line=last, path=path)
        return lines[index]

    lineno, header = need(0, "header 'N M'")
    if len(header) != 2 or min(header) < 1:
        raise ParseError("header must be two positive integers 'N M'", line=lineno, path=path)
    N, M = header
    lineno, maxima = need(1, "maximum degrees")
    if len(maxima) != 2:
        raise ParseError("expected 'max_col_degree max_row_degree'", line=lineno, path=path)
    col_line, col_deg = need(2, "column degrees")
    if len(col_deg) != N:
        raise ParseError(f"expected {N} column degrees, got {len(col_deg)}", line=col_line, path=path)
    row_line, row_deg = need(3, "row degrees")
    if len(row_deg) != M:
        raise ParseError(f"expected {M} row degrees, got {len(row_deg)}", line=row_line, path=path)
    if max(col_deg) != maxima[0] or max(row_deg) != maxima[1]:
        raise ParseError("maximum degrees disagree with the degree lists", line=lines[1][0], path=path)

    from_cols = set()
    for j in range(N):
        lineno, entries = need(4 + j, f"row list of column {j + 1}")
        rows = [x for x in entries if x != 0]
        if len(rows) != col_deg[j]:
            raise ParseError(f"column {j + 1} lists {len(rows)} rows, degree says {col_deg[j]}",
                             line=lineno, path=path)
        for r in rows:
            if not 1 <= r <= M:
                raise ParseError(f"row index {r} out of range 1..{M}", line=lineno, path=path)
            from_cols.add((r - 1, j))
    from_rows = set()
    for i in range(M):
        lineno, entries = need(4 + N + i, f"column list of row {i + 1}")
        cols = [x for x in entries if x != 0]
        if len(cols) != row_deg[i]:
            raise ParseError(f"row {i + 1} lists {len(cols)} columns, degree says {row_deg[i]}",
                             line=lineno, path=path)
        for c in cols:
            if not 1 <= c <= N:
                raise ParseError(f"column index {c} out of range 1..{N}", line=lineno, path=path)
            from_rows.add((i, c - 1))
    if from_cols != from_rows:
        raise ParseError("column lists and row lists describe different matrices",
                         line=lines[4 + N][0], path=path)
    if sum(col_deg) != len(from_cols):
        raise ParseError("repeated entries in column lists", line=lines[4][0], path=path)

    coords = np.array(sorted(from_cols), dtype=np.int64).reshape(-1, 2)
    data = np.ones(len(coords), dtype=np.int64)
    return ParityCheckMatrix(sp.csr_matrix((data, (coords[:, 0], coords[:, 1])), shape=(M, N)), name=name)


def load_alist(path: Union[str, Path], lifting_size: Optional[int] = None) -> ParityCheckMatrix:
    """Read an alist file. ``lifting_size`` marks the matrix as quasi-cyclic for layering."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read alist file: {exc.strerror or exc}", path=str(path)) from exc
    H = parse_alist(text, path=str(path), name=path.stem)
    if lifting_size is not None:
        H = ParityCheckMatrix(H.csr, name=H.name, lifting_size=lifting_size)
    logger.debug("loaded %r from %s", H, path)
    return H


def format_alist(H: ParityCheckMatrix) -> str:
    col_deg, row_deg = H.col_degrees, H.row_degrees
    max_c, max_r = int(col_deg.max(initial=0)), int(row_deg.max(initial=0))
    lines = [f"{H.N} {H.M}", f"{max_c} {max_r}",
             " ".join(map(str, col_deg.tolist())), " ".join(map(str, row_deg.tolist()))]
    for j in range(H.N):
        entries = (H.col(j) + 1).tolist()
        lines.append(" ".join(map(str, entries + [0] * (max_c - len(entries)))))
    for i in range(H.M):
        entries = (H.row(i) + 1).tolist()
        lines.append(" ".join(map(str, entries + [0] * (max_r - len(entries)))))
    return "\n".join(lines) + "\n"


def write_alist(H: ParityCheckMatrix, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(format_alist(H))
    return path


# ---------------------------------------------------------------------------
# base-graph files: "Z", "rows cols", then one row of shifts per line


def parse_base_graph(text: str, path: Optional[str] = None) -> BaseGraph:
    lines = _tokenized_lines(text)
    if len(lines) < 2:
        raise ParseError("expected 'Z' and 'rows cols' header lines",
                         line=(lines[-1][0] + 1) if lines else 1, path=path)
    lineno, z_line = lines[0]
    if len(z_line) != 1 or z_line[0] < 1:
        raise ParseError("first line must hold the lifting size Z", line=lineno, path=path)
    Z = z_line[0]
    lineno, dims = lines[1]
    if len(dims) != 2 or min(dims) < 1:
        raise ParseError("second line must be 'rows cols'", line=lineno, path=path)
    rows, cols = dims
    body = lines[2:]
    if len(body) != rows:
        raise ParseError(f"expected {rows} shift rows, got {len(body)}",
                         line=body[-1][0] if body else lineno, path=path)
    table = []
    for lineno, values in body:
        if len(values) != cols:
            raise ParseError(f"expected {cols} shifts, got {len(values)}", line=lineno, path=path)
        bad = [v for v in values if v < -1 or v >= Z]
        if bad:
            raise ParseError(f"shift {bad[0]} outside [-1, {Z})", line=lineno, path=path)
        table.append(tuple(values))
    return BaseGraph(lifting_size=Z, shifts=tuple(table))


def load_base_graph(path: Union[str, Path]) -> BaseGraph:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read base-graph file: {exc.strerror or exc}", path=str(path)) from exc
    return parse_base_graph(text, path=str(path))


def write_base_graph(base: BaseGraph, path: Union[str, Path]) -> Path:
    path = Path(path)
    width = max(len(str(v)) for row in base.shifts for v in row)
    lines = [str(base.lifting_size), f"{base.rows} {base.cols}"]
    lines += [" ".join(str(v).rjust(width) for v in row) for row in base.shifts]
    path.write_text("\n".join(lines) + "\n")
    return path


def creates_four_cycle(table: np.ndarray, i: int, j: int, s: int, Z: int) -> bool:
    """Would shift s at base cell (i, j) close a length-4 cycle with the cells already set?"""
    others = np.flatnonzero(table[i] >= 0)
    others = others[others != j]
    for r in np.flatnonzero(table[:, j] >= 0):
        if r == i:
            continue
        common = others[table[r, others] >= 0]
        if common.size and np.any((s - table[i, common] + table[r, common] - table[r, j]) % Z == 0):
            return True
    return False
