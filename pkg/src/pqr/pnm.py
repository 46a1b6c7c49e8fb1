"""Netpbm raster files (PGM P5/P2, PBM P4/P1) with bit-exact round trips."""

from __future__ import annotations

import numpy as np


class PnmError(Exception):
    """Malformed or unsupported netpbm data."""


def write_pgm(path, bitmap: np.ndarray, binary: bool = True) -> None:
    """Write 8-bit grayscale. P5 (binary, default) or P2 (ASCII)."""
    bitmap = np.asarray(bitmap, dtype=np.uint8)
    if bitmap.ndim != 2:
        raise ValueError("bitmap must be 2-D")
    h, w = bitmap.shape
    with open(path, "wb") as fh:
        if binary:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(bitmap.tobytes())
        else:
            fh.write(f"P2\n{w} {h}\n255\n".encode("ascii"))
            for row in bitmap:
                fh.write((" ".join(str(int(v)) for v in row) + "\n").encode("ascii"))


def write_pbm(path, dark: np.ndarray, binary: bool = True) -> None:
    """Write a bitmap of dark flags. P4 packs 8 pixels per byte, 1 = dark."""
    dark = np.asarray(dark, dtype=bool)
    h, w = dark.shape
    with open(path, "wb") as fh:
        if binary:
            fh.write(f"P4\n{w} {h}\n".encode("ascii"))
            fh.write(np.packbits(dark, axis=1).tobytes())
        else:
            fh.write(f"P1\n{w} {h}\n".encode("ascii"))
            for row in dark:
                fh.write(("".join("1" if v else "0" for v in row) + "\n").encode("ascii"))


def _read_tokens(data: bytes, count: int, pos: int) -> tuple[list[int], int]:
    tokens: list[int] = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise PnmError("truncated header")
        try:
            tokens.append(int(data[start:pos]))
        except ValueError as exc:
            raise PnmError("non-numeric header token") from exc
    return tokens, pos


def read_pnm(path) -> np.ndarray:
    """Read P1/P2/P4/P5 into an 8-bit grayscale bitmap (PBM dark -> 0)."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic = data[:2]
    if magic not in (b"P1", b"P2", b"P4", b"P5"):
        raise PnmError(f"unsupported magic {magic!r}")
    pos = 2
    if magic in (b"P1", b"P4"):
        (w, h), pos = _read_tokens(data, 2, pos)
    else:
        (w, h, maxval), pos = _read_tokens(data, 3, pos)
        if maxval != 255:
            raise PnmError("only maxval 255 is supported")
    if w <= 0 or h <= 0:
        raise PnmError("bad dimensions")

    if magic == b"P5":
        pos += 1  # single whitespace byte after the header
        raster = data[pos : pos + w * h]
        if len(raster) != w * h:
            raise PnmError("truncated raster")
        return np.frombuffer(raster, dtype=np.uint8).reshape(h, w).copy()
    if magic == b"P4":
        pos += 1
        stride = (w + 7) // 8
        raster = data[pos : pos + stride * h]
        if len(raster) != stride * h:
            raise PnmError("truncated raster")
        bits = np.unpackbits(np.frombuffer(raster, dtype=np.uint8).reshape(h, stride), axis=1)
        dark = bits[:, :w].astype(bool)
        return np.where(dark, 0, 255).astype(np.uint8)
    if magic == b"P2":
        values, _ = _read_tokens(data, w * h, pos)
        arr = np.array(values, dtype=np.int64)
        if arr.min() < 0 or arr.max() > 255:
            raise PnmError("sample out of range")
        return arr.astype(np.uint8).reshape(h, w)
    # P1: ASCII bits, whitespace optional between samples
    bits = []
    i = pos
    n = len(data)
    while i < n and len(bits) < w * h:
        ch = data[i : i + 1]
        if ch == b"#":
            while i < n and data[i] != 0x0A:
                i += 1
        elif ch in (b"0", b"1"):
            bits.append(ch == b"1")
            i += 1
        elif ch.isspace():
            i += 1
        else:
            raise PnmError(f"unexpected byte {ch!r} in P1 raster")
    if len(bits) != w * h:
        raise PnmError("truncated raster")
    dark = np.array(bits, dtype=bool).reshape(h, w)
    return np.where(dark, 0, 255).astype(np.uint8)
