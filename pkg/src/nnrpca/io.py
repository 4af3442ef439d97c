"""Plain-text instance files and binary PGM images.

Instance file layout (0-based indices, ``#`` starts a comment)::

    symmetric 4            # or: asymmetric m n  /  rank_r n r
    0 1 0.25 0.0           # i j X_ij S_ij, one line per measured pair
    ...
    truth                  # optional
    0.5 0.5 1.0 0.25       # u*; asymmetric adds a v* line; rank_r gives n rows of r
"""

from __future__ import annotations

import os
import re
from pathlib import Path
from typing import List, Tuple

import numpy as np

from .model import ASYMMETRIC, RANK_R, SYMMETRIC, Instance, MeasurementSet


class FormatError(ValueError):
    pass


def _lines(text: str):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def _floats(line: str, where: str) -> List[float]:
    try:
        return [float(x) for x in line.split()]
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


def parse_instance(text: str) -> Instance:
    lines = list(_lines(text))
    if not lines:
        raise FormatError("empty instance file")
    head = lines[0].split()
    kind = head[0]
    try:
        dims = [int(x) for x in head[1:]]
    except ValueError:
        raise FormatError(f"bad header {lines[0]!r}") from None
    expect = {SYMMETRIC: 1, ASYMMETRIC: 2, RANK_R: 2}
    if kind not in expect or len(dims) != expect[kind] or min(dims) < 1:
        raise FormatError(f"bad header {lines[0]!r}")
    body = lines[1:]
    try:
        cut = body.index("truth")
    except ValueError:
        cut = len(body)
    entries, truth_lines = body[:cut], body[cut + 1:]

    rows, cols, X, S = [], [], [], []
    for k, line in enumerate(entries, start=2):
        parts = line.split()
        if len(parts) != 4:
            raise FormatError(f"entry {k}: expected 'i j X S'")
        try:
            rows.append(int(parts[0]))
            cols.append(int(parts[1]))
        except ValueError:
            raise FormatError(f"entry {k}: indices must be integers") from None
        x, s = _floats(" ".join(parts[2:]), f"entry {k}")
        X.append(x)
        S.append(s)
    rows_a = np.asarray(rows, dtype=np.int64)
    cols_a = np.asarray(cols, dtype=np.int64)
    if kind == ASYMMETRIC:
        shape = (dims[0], dims[1])
        sym = False
    else:
        shape = (dims[0], dims[0])
        sym = True
    try:
        omega = MeasurementSet(rows_a, cols_a, shape, sym)
        if sym:
            pos = omega.index_of(np.minimum(rows_a, cols_a), np.maximum(rows_a, cols_a))
        else:
            pos = omega.index_of(rows_a, cols_a)
    except (ValueError, IndexError) as exc:
        raise FormatError(str(exc)) from None
    observed = np.empty(len(omega))
    noise = np.empty(len(omega))
    observed[pos] = X
    noise[pos] = S

    truth = None
    rank = 1
    if truth_lines:
        vecs = [np.asarray(_floats(line, "truth"), dtype=np.float64) for line in truth_lines]
        if kind == SYMMETRIC:
            if len(vecs) != 1 or vecs[0].size != dims[0]:
                raise FormatError("symmetric truth must be one line of n values")
            truth = vecs[0]
        elif kind == ASYMMETRIC:
            if len(vecs) != 2 or vecs[0].size != dims[0] or vecs[1].size != dims[1]:
                raise FormatError("asymmetric truth must be a u* line and a v* line")
            truth = (vecs[0], vecs[1])
        else:
            if len(vecs) != dims[0] or any(v.size != dims[1] for v in vecs):
                raise FormatError("rank_r truth must be n lines of r values")
            truth = np.vstack(vecs)
    if kind == RANK_R:
        rank = dims[1]
    return Instance(kind, omega, observed, noise, truth, rank)


def format_instance(inst: Instance) -> str:
    if inst.kind == ASYMMETRIC:
        head = f"{ASYMMETRIC} {inst.m} {inst.n}"
    elif inst.kind == RANK_R:
        head = f"{RANK_R} {inst.n} {inst.rank}"
    else:
        head = f"{SYMMETRIC} {inst.n}"
    out = [head]
    for i, j, x, s in zip(inst.omega.rows.tolist(), inst.omega.cols.tolist(),
                          inst.observed.tolist(), inst.noise_values.tolist()):
        out.append(f"{i} {j} {x!r} {s!r}")
    if inst.truth is not None:
        out.append("truth")
        if inst.kind == ASYMMETRIC:
            vecs = list(inst.truth)
        elif inst.kind == RANK_R:
            vecs = list(np.asarray(inst.truth))
        else:
            vecs = [inst.truth]
        for v in vecs:
            out.append(" ".join(repr(float(x)) for x in np.asarray(v).reshape(-1)))
    return "\n".join(out) + "\n"


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(format_instance(inst))


def load_instance(path) -> Instance:
    return parse_instance(Path(path).read_text())


_PGM_HEADER = re.compile(rb"P5(?:\s+|#[^\n]*\n)+?(\d+)(?:\s+|#[^\n]*\n)+?(\d+)(?:\s+|#[^\n]*\n)+?(\d+)\s")


def read_pgm(path) -> np.ndarray:
    """Read an 8-bit binary PGM as a ``(rows, cols)`` uint8 array."""
    data = Path(path).read_bytes()
    m = _PGM_HEADER.match(data)
    if not m:
        raise FormatError(f"{path}: not a binary PGM")
    width, height, maxval = (int(g) for g in m.groups())
    if not 0 < maxval < 256:
        raise FormatError(f"{path}: only 8-bit PGM is supported")
    pixels = data[m.end():m.end() + width * height]
    if len(pixels) != width * height:
        raise FormatError(f"{path}: truncated pixel data")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(path, image) -> None:
    img = np.asarray(image)
    if img.ndim != 2:
        raise ValueError("expected a 2-D image")
    img = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode())
        fh.write(img.tobytes())


def read_frames(directory) -> Tuple[List[str], np.ndarray]:
    """All ``*.pgm`` files in name order, stacked as ``(frames, rows, cols)``."""
    d = Path(directory)
    if not d.is_dir():
        raise FormatError(f"{directory}: not a directory")
    names = sorted(p.name for p in d.iterdir() if p.suffix.lower() == ".pgm")
    if not names:
        raise FormatError(f"{directory}: no PGM frames")
    frames = [read_pgm(d / name) for name in names]
    if len({f.shape for f in frames}) != 1:
        raise FormatError(f"{directory}: frames differ in size")
    return names, np.stack(frames)


def ensure_dir(path) -> Path:
    p = Path(path)
    os.makedirs(p, exist_ok=True)
    return p
