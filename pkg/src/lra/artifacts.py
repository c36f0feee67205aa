"""On-disk layout of a pipeline build.

Everything except ``manifest.json`` and ``build_report.txt`` (which carry
wall-clock timings) is byte-identical across runs with the same inputs.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .factorization import ProjectedSpace
from .pairs import WordPair
from .pipeline import BuiltSpace, ColumnKey, LraConfig, Orientation, SparseRelationMatrix, parse_pattern, pattern_text
from .thesaurus import AlternateSet

ARTIFACT_MAGIC = "LRAART1"

MANIFEST = "manifest.json"
MATRIX = "matrix.txt"
RAW_MATRIX = "matrix_raw.txt"
ROWS = "rows.tsv"
COLS = "cols.tsv"
PROJECTION = "proj.tsv"
ALTERNATES = "alternates.tsv"
BUILD_REPORT = "build_report.txt"


class ArtifactError(ValueError):
    pass


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _fmt(x: float) -> str:
    return repr(float(x))


def write_matrix(matrix: SparseRelationMatrix, path: Path) -> None:
    coo = matrix.cells.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{matrix.m} {matrix.n} {coo.nnz} {int(matrix.weighted)}\n")
        for i, j, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{i} {j} {_fmt(v) if matrix.weighted else int(v)}\n")


def read_matrix(path: Path, rows: list[WordPair], columns: list[ColumnKey]) -> SparseRelationMatrix:
    with open(path, encoding="utf-8") as fh:
        m, n, nnz, weighted = (int(x) for x in fh.readline().split())
        trip = np.loadtxt(fh, ndmin=2) if nnz else np.zeros((0, 3))
    cells = sp.csr_matrix((trip[:, 2], (trip[:, 0].astype(int), trip[:, 1].astype(int))), shape=(m, n))
    return SparseRelationMatrix(rows, columns, cells, weighted=bool(weighted))


def write_rows(rows: list[WordPair], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i, pair in enumerate(rows):
            fh.write(f"{i}\t{pair.left}\t{pair.right}\n")


def read_rows(path: Path) -> list[WordPair]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for expected, line in enumerate(fh):
            idx, left, right = line.rstrip("\n").split("\t")
            if int(idx) != expected:
                raise ArtifactError(f"{path}: row indices out of order")
            rows.append(WordPair(left, right))
    return rows


def write_cols(columns: list[ColumnKey], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for j, key in enumerate(columns):
            fh.write(f"{j}\t{key.orientation.value}\t{pattern_text(key.pattern)}\n")


def read_cols(path: Path) -> list[ColumnKey]:
    cols = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            _, orient, text = line.rstrip("\n").split("\t")
            cols.append(ColumnKey(parse_pattern(text), Orientation(orient)))
    return cols


def write_projection(space: ProjectedSpace, path: Path) -> None:
    vectors = space.vectors.toarray() if sp.issparse(space.vectors) else space.vectors
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{vectors.shape[0]} {vectors.shape[1]}\n")
        for row in vectors:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def read_projection(path: Path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        m, k = (int(x) for x in fh.readline().split())
        vectors = np.loadtxt(fh, ndmin=2) if m else np.zeros((0, k))
    if vectors.shape != (m, k):
        raise ArtifactError(f"{path}: expected {m}x{k} values, found {vectors.shape}")
    return vectors


def write_alternates(alternates: dict[WordPair, AlternateSet], path: Path) -> None:
    """One line per version: ``origL origR versionL versionR score freq``; the
    original itself is listed first with score ``NA``."""
    with open(path, "w", encoding="utf-8") as fh:
        for orig, aset in alternates.items():
            freq = "NA" if aset.original_freq is None else aset.original_freq
            fh.write(f"{orig.left}\t{orig.right}\t{orig.left}\t{orig.right}\tNA\t{freq}\n")
            for alt, score, f in aset.alternates:
                fh.write(f"{orig.left}\t{orig.right}\t{alt.left}\t{alt.right}\t{_fmt(score)}\t{f}\n")


def read_alternates(path: Path) -> dict[WordPair, AlternateSet]:
    out: dict[WordPair, AlternateSet] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            ol, orr, vl, vr, score, freq = line.rstrip("\n").split("\t")
            orig, version = WordPair(ol, orr), WordPair(vl, vr)
            if version == orig:
                out[orig] = AlternateSet(orig, [], None if freq == "NA" else int(freq))
            else:
                out[orig].alternates.append((version, float(score), int(freq)))
    return out


def save_built(built: BuiltSpace, out_dir: str | Path, inputs: dict[str, str | Path] | None = None) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix(built.raw, out / RAW_MATRIX)
    write_matrix(built.weighted, out / MATRIX)
    write_rows(built.weighted.rows, out / ROWS)
    write_cols(built.weighted.columns, out / COLS)
    write_projection(built.space, out / PROJECTION)
    write_alternates(built.alternates, out / ALTERNATES)
    report = built.report
    (out / BUILD_REPORT).write_text(report.to_text() if report else "", encoding="utf-8")
    config = built.config.as_dict() if built.config else {}
    manifest = {
        "format": ARTIFACT_MAGIC,
        "config": config,
        "inputs": {name: {"path": str(p), "sha256": file_digest(p)} for name, p in (inputs or {}).items()},
        "matrix": {"rows": built.raw.m, "columns": built.raw.n, "density_percent": built.raw.density,
                   "projection_dim": built.space.dim},
        "timings_seconds": {str(k): v for k, v in sorted(report.timings.items())} if report else {},
        "dropped_pairs": [str(p) for p in report.dropped_pairs] if report else [],
        "artifacts": {name: {"path": name, "sha256": file_digest(out / name)}
                      for name in (RAW_MATRIX, MATRIX, ROWS, COLS, PROJECTION, ALTERNATES, BUILD_REPORT)},
    }
    (out / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest


def read_manifest(art_dir: str | Path) -> dict:
    path = Path(art_dir) / MANIFEST
    if not path.is_file():
        raise ArtifactError(f"no {MANIFEST} in {art_dir}")
    manifest = json.loads(path.read_text(encoding="utf-8"))
    if manifest.get("format") != ARTIFACT_MAGIC:
        raise ArtifactError(f"{path}: unsupported artifact format {manifest.get('format')!r}, "
                            f"expected {ARTIFACT_MAGIC}")
    return manifest


def load_built(art_dir: str | Path) -> BuiltSpace:
    """Reload the query-time parts of a build: projection, row map and alternates."""
    art = Path(art_dir)
    manifest = read_manifest(art)
    for name, meta in manifest.get("artifacts", {}).items():
        if name == BUILD_REPORT:
            continue
        if file_digest(art / meta["path"]) != meta["sha256"]:
            raise ArtifactError(f"{art / name}: checksum mismatch with manifest")
    rows = read_rows(art / ROWS)
    vectors = read_projection(art / PROJECTION)
    if len(rows) != vectors.shape[0]:
        raise ArtifactError("row map and projection disagree on row count")
    config = dict(manifest.get("config", {}))
    config.pop("num_combinations", None)
    if "suffixes" in config:
        config["suffixes"] = tuple(config["suffixes"])
    return BuiltSpace(
        space=ProjectedSpace(vectors, {p: i for i, p in enumerate(rows)}),
        alternates=read_alternates(art / ALTERNATES),
        config=LraConfig(**config) if config else None,
    )
