"""Byte payload -> standard QR module matrix, versions 1-10.

Holds the symbol capacity tables (the single source of truth for per-block
correction capacity), byte-mode payload framing, block interleaving, the
zigzag placement order, and mask selection. The scanner reuses the placement
and framing helpers to invert the pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from . import gf256
from .matrix import ModuleMatrix

MIN_VERSION = 1
MAX_VERSION = 10


class CapacityExceeded(Exception):
    """Payload does not fit the symbol (or any in-scope symbol)."""


class StructureError(Exception):
    """Decoded data codewords fail byte-mode structure validation."""


class EcLevel(str, Enum):
    L = "L"
    M = "M"
    Q = "Q"
    H = "H"

    @property
    def nominal_recovery(self) -> float:
        return {"L": 0.07, "M": 0.15, "Q": 0.25, "H": 0.30}[self.value]

    @property
    def format_bits(self) -> int:
        return {"L": 1, "M": 0, "Q": 3, "H": 2}[self.value]

    @property
    def strength(self) -> int:
        """Rank in recovery order: L < M < Q < H."""
        return {"L": 0, "M": 1, "Q": 2, "H": 3}[self.value]


FORMAT_BITS_TO_LEVEL = {lv.format_bits: lv for lv in EcLevel}

# Per version 1..10: total codewords, and per level: (ec codewords per block, block count).
_TOTAL_CODEWORDS = {1: 26, 2: 44, 3: 70, 4: 100, 5: 134, 6: 172, 7: 196, 8: 242, 9: 292, 10: 346}

_EC_PER_BLOCK = {
    EcLevel.L: {1: 7, 2: 10, 3: 15, 4: 20, 5: 26, 6: 18, 7: 20, 8: 24, 9: 30, 10: 18},
    EcLevel.M: {1: 10, 2: 16, 3: 26, 4: 18, 5: 24, 6: 16, 7: 18, 8: 22, 9: 22, 10: 26},
    EcLevel.Q: {1: 13, 2: 22, 3: 18, 4: 26, 5: 18, 6: 24, 7: 18, 8: 22, 9: 20, 10: 24},
    EcLevel.H: {1: 17, 2: 28, 3: 22, 4: 16, 5: 22, 6: 28, 7: 26, 8: 26, 9: 24, 10: 28},
}

_BLOCK_COUNT = {
    EcLevel.L: {1: 1, 2: 1, 3: 1, 4: 1, 5: 1, 6: 2, 7: 2, 8: 2, 9: 2, 10: 4},
    EcLevel.M: {1: 1, 2: 1, 3: 1, 4: 2, 5: 2, 6: 4, 7: 4, 8: 4, 9: 5, 10: 5},
    EcLevel.Q: {1: 1, 2: 1, 3: 2, 4: 2, 5: 4, 6: 4, 7: 6, 8: 6, 9: 8, 10: 8},
    EcLevel.H: {1: 1, 2: 1, 3: 2, 4: 4, 5: 4, 6: 4, 7: 5, 8: 6, 9: 8, 10: 8},
}

# Shapes where the standard reserves detection-only codewords, so the usable
# correction capacity is below floor(ec / 2).
_CAPACITY_OVERRIDE = {(1, EcLevel.L): 2, (1, EcLevel.M): 4, (2, EcLevel.L): 4}

_ALIGN_POSITIONS = {
    1: [],
    2: [6, 18],
    3: [6, 22],
    4: [6, 26],
    5: [6, 30],
    6: [6, 34],
    7: [6, 22, 38],
    8: [6, 24, 42],
    9: [6, 26, 46],
    10: [6, 28, 50],
}


@dataclass(frozen=True)
class BlockShape:
    count: int
    data_len: int
    ec_len: int
    capacity_t: int


@dataclass(frozen=True)
class SymbolSpec:
    version: int
    side: int
    ec: EcLevel
    total_codewords: int
    block_layout: tuple[BlockShape, ...]
    alignment_centers: tuple[tuple[int, int], ...]

    @property
    def data_codewords(self) -> int:
        return sum(b.count * b.data_len for b in self.block_layout)

    @property
    def max_payload_bytes(self) -> int:
        # 4-bit mode indicator + count field, rounded up to whole codewords.
        cc = char_count_bits(self.version)
        return self.data_codewords - (4 + cc + 7) // 8


@dataclass
class CodewordBlock:
    data: bytes
    ec: bytes
    capacity_t: int


def char_count_bits(version: int) -> int:
    """Byte-mode character count field width for the version class."""
    return 8 if version <= 9 else 16


def symbol_spec(version: int, ec: EcLevel | str) -> SymbolSpec:
    if not MIN_VERSION <= version <= MAX_VERSION:
        raise ValueError(f"version {version} out of range [{MIN_VERSION}, {MAX_VERSION}]")
    ec = EcLevel(ec)
    total = _TOTAL_CODEWORDS[version]
    ec_len = _EC_PER_BLOCK[ec][version]
    blocks = _BLOCK_COUNT[ec][version]
    data_total = total - ec_len * blocks
    short_len = data_total // blocks
    long_count = data_total % blocks
    capacity = _CAPACITY_OVERRIDE.get((version, ec), ec_len // 2)

    layout = []
    if blocks - long_count:
        layout.append(BlockShape(blocks - long_count, short_len, ec_len, capacity))
    if long_count:
        layout.append(BlockShape(long_count, short_len + 1, ec_len, capacity))

    positions = _ALIGN_POSITIONS[version]
    side = 4 * version + 17
    centers = []
    if positions:
        last = positions[-1]
        skip = {(6, 6), (6, last), (last, 6)}
        for r in positions:
            for c in positions:
                if (r, c) not in skip:
                    centers.append((r, c))
    return SymbolSpec(version, side, ec, total, tuple(layout), tuple(centers))


# ---- payload framing ----

def encode_payload(payload: bytes, spec: SymbolSpec) -> bytes:
    """Byte-mode data codewords: header, payload, terminator, pad bits, pad bytes."""
    if len(payload) > spec.max_payload_bytes:
        raise CapacityExceeded(
            f"{len(payload)} bytes exceed version {spec.version}-{spec.ec.value} "
            f"capacity of {spec.max_payload_bytes}"
        )
    cc = char_count_bits(spec.version)
    bits: list[int] = []

    def put(value: int, width: int) -> None:
        bits.extend((value >> i) & 1 for i in range(width - 1, -1, -1))

    put(0b0100, 4)
    put(len(payload), cc)
    for b in payload:
        put(b, 8)
    capacity_bits = spec.data_codewords * 8
    put(0, min(4, capacity_bits - len(bits)))
    if len(bits) % 8:
        put(0, 8 - len(bits) % 8)
    out = bytearray()
    for i in range(0, len(bits), 8):
        byte = 0
        for bit in bits[i : i + 8]:
            byte = byte << 1 | bit
        out.append(byte)
    pad = (0xEC, 0x11)
    i = 0
    while len(out) < spec.data_codewords:
        out.append(pad[i & 1])
        i += 1
    return bytes(out)


def parse_payload(data: bytes, version: int) -> bytes:
    """Strict inverse of encode_payload; raises StructureError on any deviation."""
    cc = char_count_bits(version)
    total_bits = len(data) * 8

    def bit(i: int) -> int:
        return (data[i >> 3] >> (7 - (i & 7))) & 1

    def field(start: int, width: int) -> int:
        v = 0
        for i in range(start, start + width):
            v = v << 1 | bit(i)
        return v

    if total_bits < 4 + cc:
        raise StructureError("stream too short for header")
    if field(0, 4) != 0b0100:
        raise StructureError("mode indicator is not byte mode")
    count = field(4, cc)
    pos = 4 + cc
    if pos + 8 * count > total_bits:
        raise StructureError("count field exceeds stream")
    payload = bytes(field(pos + 8 * i, 8) for i in range(count))
    pos += 8 * count
    term = min(4, total_bits - pos)
    if term and field(pos, term) != 0:
        raise StructureError("terminator bits not zero")
    pos += term
    if pos % 8:
        fill = 8 - pos % 8
        if field(pos, fill) != 0:
            raise StructureError("bit padding not zero")
        pos += fill
    pad = (0xEC, 0x11)
    for i in range(pos // 8, len(data)):
        if data[i] != pad[(i - pos // 8) & 1]:
            raise StructureError("pad codewords not alternating 0xEC/0x11")
    return payload


# ---- block structure ----

def split_blocks(data_codewords: bytes, spec: SymbolSpec) -> list[CodewordBlock]:
    """Split framed data codewords into RS blocks and append parity to each."""
    if len(data_codewords) != spec.data_codewords:
        raise ValueError("data codeword count does not match the spec")
    blocks = []
    k = 0
    for shape in spec.block_layout:
        for _ in range(shape.count):
            chunk = data_codewords[k : k + shape.data_len]
            k += shape.data_len
            blocks.append(CodewordBlock(chunk, gf256.rs_encode(chunk, shape.ec_len), shape.capacity_t))
    return blocks


def interleave(blocks: list[CodewordBlock]) -> bytes:
    """Round-robin data codewords across blocks, then EC codewords."""
    out = bytearray()
    for i in range(max(len(b.data) for b in blocks)):
        for b in blocks:
            if i < len(b.data):
                out.append(b.data[i])
    for i in range(max(len(b.ec) for b in blocks)):
        for b in blocks:
            if i < len(b.ec):
                out.append(b.ec[i])
    return bytes(out)


def deinterleave(stream: bytes, spec: SymbolSpec) -> list[CodewordBlock]:
    """Exact inverse of interleave for the spec's block layout."""
    if len(stream) != spec.total_codewords:
        raise ValueError("stream length does not match total codewords")
    shapes = [s for s in spec.block_layout for _ in range(s.count)]
    data = [bytearray() for _ in shapes]
    ec = [bytearray() for _ in shapes]
    it = iter(stream)
    for i in range(max(s.data_len for s in shapes)):
        for j, s in enumerate(shapes):
            if i < s.data_len:
                data[j].append(next(it))
    for i in range(max(s.ec_len for s in shapes)):
        for j, s in enumerate(shapes):
            if i < s.ec_len:
                ec[j].append(next(it))
    return [CodewordBlock(bytes(d), bytes(e), s.capacity_t) for d, e, s in zip(data, ec, shapes)]


def interleaved_owner(spec: SymbolSpec) -> list[tuple[int, int]]:
    """For each interleaved codeword index: (block index, position within block)."""
    shapes = [s for s in spec.block_layout for _ in range(s.count)]
    owner = []
    for i in range(max(s.data_len for s in shapes)):
        for j, s in enumerate(shapes):
            if i < s.data_len:
                owner.append((j, i))
    for i in range(max(s.ec_len for s in shapes)):
        for j, s in enumerate(shapes):
            if i < s.ec_len:
                owner.append((j, s.data_len + i))
    return owner


# ---- function patterns and placement ----

def _draw_finder(modules: np.ndarray, fmap: np.ndarray, cr: int, cc: int) -> None:
    side = modules.shape[0]
    for dr in range(-4, 5):
        for dc in range(-4, 5):
            r, c = cr + dr, cc + dc
            if 0 <= r < side and 0 <= c < side:
                modules[r, c] = max(abs(dr), abs(dc)) not in (2, 4)
                fmap[r, c] = True


def _draw_alignment(modules: np.ndarray, fmap: np.ndarray, cr: int, cc: int) -> None:
    for dr in range(-2, 3):
        for dc in range(-2, 3):
            modules[cr + dr, cc + dc] = max(abs(dr), abs(dc)) != 1
            fmap[cr + dr, cc + dc] = True


def format_cells(side: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """(row, col) of format word bits 0..14 for each of the two copies."""
    copy1 = [(i, 8) for i in range(6)] + [(7, 8), (8, 8), (8, 7)] + [(8, 14 - i) for i in range(9, 15)]
    copy2 = [(8, side - 1 - i) for i in range(8)] + [(side - 15 + i, 8) for i in range(8, 15)]
    return copy1, copy2


@lru_cache(maxsize=None)
def _function_template(version: int) -> tuple[np.ndarray, np.ndarray]:
    """Function patterns for a version (mask-independent); format cells reserved light."""
    side = 4 * version + 17
    modules = np.zeros((side, side), dtype=bool)
    fmap = np.zeros((side, side), dtype=bool)

    for i in range(side):
        modules[6, i] = i % 2 == 0
        fmap[6, i] = True
        modules[i, 6] = i % 2 == 0
        fmap[i, 6] = True

    _draw_finder(modules, fmap, 3, 3)
    _draw_finder(modules, fmap, 3, side - 4)
    _draw_finder(modules, fmap, side - 4, 3)

    positions = _ALIGN_POSITIONS[version]
    if positions:
        last = positions[-1]
        skip = {(6, 6), (6, last), (last, 6)}
        for r in positions:
            for c in positions:
                if (r, c) not in skip:
                    _draw_alignment(modules, fmap, r, c)

    for cells in format_cells(side):
        for r, c in cells:
            fmap[r, c] = True
    modules[side - 8, 8] = True  # dark module
    fmap[side - 8, 8] = True

    if version >= 7:
        word = gf256.bch_encode_version(version)
        for i in range(18):
            bit = (word >> i) & 1 == 1
            a, b = side - 11 + i % 3, i // 3
            modules[b, a] = bit
            fmap[b, a] = True
            modules[a, b] = bit
            fmap[a, b] = True

    modules.setflags(write=False)
    fmap.setflags(write=False)
    return modules, fmap


def function_template(version: int) -> ModuleMatrix:
    modules, fmap = _function_template(version)
    return ModuleMatrix(modules.copy(), fmap.copy())


@lru_cache(maxsize=None)
def placement_order(version: int) -> tuple[tuple[int, int], ...]:
    """(row, col) of every non-function module in zigzag placement order."""
    _, fmap = _function_template(version)
    side = fmap.shape[0]
    order = []
    for right in range(side - 1, 0, -2):
        if right <= 6:
            right -= 1
        upward = ((right + 1) & 2) == 0
        for vert in range(side):
            r = (side - 1 - vert) if upward else vert
            for c in (right, right - 1):
                if not fmap[r, c]:
                    order.append((r, c))
    return tuple(order)


@lru_cache(maxsize=None)
def _mask_grid(mask_id: int, side: int) -> np.ndarray:
    r, c = np.indices((side, side))
    conds = {
        0: (r + c) % 2 == 0,
        1: r % 2 == 0,
        2: c % 3 == 0,
        3: (r + c) % 3 == 0,
        4: (r // 2 + c // 3) % 2 == 0,
        5: (r * c) % 2 + (r * c) % 3 == 0,
        6: ((r * c) % 2 + (r * c) % 3) % 2 == 0,
        7: ((r + c) % 2 + (r * c) % 3) % 2 == 0,
    }
    grid = conds[mask_id]
    grid.setflags(write=False)
    return grid


@dataclass(frozen=True)
class MaskChoice:
    mask_id: int
    penalty: int


_N1, _N2, _N3, _N4 = 3, 3, 40, 10


def mask_penalty(modules: np.ndarray) -> int:
    """Sum of the four standard penalty rules on a masked matrix."""
    side = modules.shape[0]
    total = 0

    # Rule 1: a run of n >= 5 same-colored modules costs 3 + (n - 5).
    # Runs never span rows once row edges are marked as boundaries, so the
    # whole grid can be processed as one flattened boundary sequence.
    for grid in (modules, np.ascontiguousarray(modules.T)):
        bounds = np.ones((side, side + 1), dtype=bool)
        bounds[:, 1:-1] = grid[:, 1:] != grid[:, :-1]
        lengths = np.diff(np.flatnonzero(bounds.ravel()))
        long_runs = lengths[lengths >= 5]
        total += int(long_runs.sum()) - 2 * long_runs.size

    # Rule 2: 2x2 blocks of a single color.
    same = (
        (modules[:-1, :-1] == modules[:-1, 1:])
        & (modules[:-1, :-1] == modules[1:, :-1])
        & (modules[:-1, :-1] == modules[1:, 1:])
    )
    total += _N2 * int(same.sum())

    # Rule 3: finder-like 1:1:3:1:1 run with 4 light modules on one side.
    pat_a = np.array([True, False, True, True, True, False, True, False, False, False, False])
    pat_b = pat_a[::-1]
    for grid in (modules, modules.T):
        windows = np.lib.stride_tricks.sliding_window_view(grid, 11, axis=1)
        total += _N3 * int((windows == pat_a).all(axis=2).sum())
        total += _N3 * int((windows == pat_b).all(axis=2).sum())

    # Rule 4: dark-module proportion, 10 points per 5% step away from 50%.
    dark = int(modules.sum())
    cells = side * side
    k = 0
    while not (9 - k) * cells <= dark * 20 <= (11 + k) * cells:
        k += 1
    total += _N4 * k
    return total


def _write_format(modules: np.ndarray, ec: EcLevel, mask_id: int) -> None:
    side = modules.shape[0]
    word = gf256.bch_encode_format(ec.format_bits, mask_id)
    for cells in format_cells(side):
        for i, (r, c) in enumerate(cells):
            modules[r, c] = (word >> i) & 1 == 1


def place_codewords(stream: bytes, version: int) -> np.ndarray:
    """Unmasked module values with codeword bits placed; remainder bits light."""
    template, _ = _function_template(version)
    modules = template.copy()
    order = placement_order(version)
    nbits = len(stream) * 8
    for i, (r, c) in enumerate(order):
        if i < nbits:
            modules[r, c] = (stream[i >> 3] >> (7 - (i & 7))) & 1 == 1
    return modules


def place_and_mask(stream: bytes, spec: SymbolSpec) -> tuple[ModuleMatrix, MaskChoice]:
    """Place interleaved codewords, pick the minimum-penalty mask, write format info."""
    if len(stream) != spec.total_codewords:
        raise ValueError("codeword count does not match spec.total_codewords")
    _, fmap = _function_template(spec.version)
    unmasked = place_codewords(stream, spec.version)
    data_cells = ~fmap
    best: tuple[int, int, np.ndarray] | None = None
    for mask_id in range(8):
        candidate = unmasked ^ (_mask_grid(mask_id, spec.side) & data_cells)
        _write_format(candidate, spec.ec, mask_id)
        pen = mask_penalty(candidate)
        if best is None or pen < best[0]:
            best = (pen, mask_id, candidate)
    pen, mask_id, modules = best
    return ModuleMatrix(modules, fmap.copy()), MaskChoice(mask_id, pen)


def extract_codewords(modules: np.ndarray, version: int, mask_id: int) -> bytes:
    """Read codewords back out of a (masked) module grid: inverse of placement."""
    _, fmap = _function_template(version)
    side = fmap.shape[0]
    unmasked = np.asarray(modules, dtype=bool) ^ (_mask_grid(mask_id, side) & ~fmap)
    order = placement_order(version)
    total = _TOTAL_CODEWORDS[version]
    out = bytearray(total)
    for i in range(total * 8):
        r, c = order[i]
        if unmasked[r, c]:
            out[i >> 3] |= 0x80 >> (i & 7)
    return bytes(out)


# ---- the full pipeline ----

def generate(payload: bytes, ec: EcLevel | str, min_version: int = 1) -> ModuleMatrix:
    """Encode payload at the smallest fitting version >= min_version."""
    ec = EcLevel(ec)
    if not MIN_VERSION <= min_version <= MAX_VERSION:
        raise ValueError("min_version out of range")
    for version in range(min_version, MAX_VERSION + 1):
        spec = symbol_spec(version, ec)
        if len(payload) <= spec.max_payload_bytes:
            stream = interleave(split_blocks(encode_payload(payload, spec), spec))
            matrix, _ = place_and_mask(stream, spec)
            return matrix
    raise CapacityExceeded(
        f"payload of {len(payload)} bytes does not fit any version <= {MAX_VERSION} at level {ec.value}"
    )


def smallest_version(payload_len: int, ec: EcLevel | str, min_version: int = 1) -> int:
    """Smallest version >= min_version whose byte-mode capacity fits payload_len."""
    ec = EcLevel(ec)
    for version in range(min_version, MAX_VERSION + 1):
        if payload_len <= symbol_spec(version, ec).max_payload_bytes:
            return version
    raise CapacityExceeded(f"{payload_len} bytes do not fit any version <= {MAX_VERSION} at level {EcLevel(ec).value}")
