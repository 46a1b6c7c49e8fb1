"""GF(256) arithmetic and the block codecs that give QR symbols their damage tolerance.

Reed-Solomon protects the data/EC codeword stream; two short BCH codes protect
the format word (EC level + mask) and the version word. Everything here is a
pure function over value data and safe to call concurrently.
"""

from __future__ import annotations

# Reduction polynomial x^8 + x^4 + x^3 + x^2 + 1, generator element alpha = 2,
# first consecutive generator root alpha^0.
REDUCER = 0x11D

_EXP = [0] * 510
_LOG = [0] * 256
_x = 1
for _i in range(255):
    _EXP[_i] = _x
    _LOG[_x] = _i
    _x <<= 1
    if _x & 0x100:
        _x ^= REDUCER
for _i in range(255, 510):
    _EXP[_i] = _EXP[_i - 255]
del _x, _i


class DecodeFailure(Exception):
    """A Reed-Solomon block could not be corrected consistently."""


def field_mul(a: int, b: int) -> int:
    """Product of two field elements modulo the reduction polynomial."""
    if a == 0 or b == 0:
        return 0
    return _EXP[_LOG[a] + _LOG[b]]


def field_inv(a: int) -> int:
    """Multiplicative inverse; zero has none."""
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(256)")
    return _EXP[255 - _LOG[a]]


def field_pow(a: int, n: int) -> int:
    if a == 0:
        return 0
    return _EXP[(_LOG[a] * n) % 255]


def _poly_eval(poly_ascending: list[int], x: int) -> int:
    # poly[i] is the coefficient of x^i.
    acc = 0
    for coef in reversed(poly_ascending):
        acc = field_mul(acc, x) ^ coef
    return acc


def _generator_poly(ec_count: int) -> list[int]:
    # Product of (x - alpha^i) for i = 0..ec_count-1; monic, descending order,
    # leading coefficient dropped (nayuki-style long-division form).
    coeffs = [0] * (ec_count - 1) + [1]
    root = 1
    for _ in range(ec_count):
        for j in range(ec_count):
            coeffs[j] = field_mul(coeffs[j], root)
            if j + 1 < ec_count:
                coeffs[j] ^= coeffs[j + 1]
        root = field_mul(root, 2)
    return coeffs


_GEN_CACHE: dict[int, list[int]] = {}


def rs_encode(data: bytes | bytearray | list[int], ec_count: int) -> bytes:
    """Parity bytes: remainder of data(x) * x^ec_count divided by the generator."""
    if ec_count < 1:
        raise ValueError("ec_count must be >= 1")
    gen = _GEN_CACHE.get(ec_count)
    if gen is None:
        gen = _GEN_CACHE[ec_count] = _generator_poly(ec_count)
    rem = [0] * ec_count
    for b in data:
        factor = b ^ rem.pop(0)
        rem.append(0)
        for i in range(ec_count):
            rem[i] ^= field_mul(gen[i], factor)
    return bytes(rem)


def _syndromes(received, ec_count: int) -> list[int]:
    # received[0] is the highest-degree coefficient of the codeword polynomial.
    out = []
    for i in range(ec_count):
        x = _EXP[i]
        acc = 0
        for b in received:
            acc = field_mul(acc, x) ^ b
        out.append(acc)
    return out


def _berlekamp_massey(synd: list[int]) -> list[int]:
    # Error locator (ascending coefficients, locator[0] == 1).
    cur = [1]
    prev = [1]
    length = 0
    m = 1
    b = 1
    for n, _ in enumerate(synd):
        d = synd[n]
        for i in range(1, length + 1):
            if i < len(cur):
                d ^= field_mul(cur[i], synd[n - i])
        if d == 0:
            m += 1
            continue
        coef = field_mul(d, field_inv(b))
        if 2 * length <= n:
            saved = list(cur)
            if len(cur) < len(prev) + m:
                cur = cur + [0] * (len(prev) + m - len(cur))
            for i, pv in enumerate(prev):
                cur[i + m] ^= field_mul(coef, pv)
            length = n + 1 - length
            prev = saved
            b = d
            m = 1
        else:
            if len(cur) < len(prev) + m:
                cur = cur + [0] * (len(prev) + m - len(cur))
            for i, pv in enumerate(prev):
                cur[i + m] ^= field_mul(coef, pv)
            m += 1
    while len(cur) > 1 and cur[-1] == 0:
        cur.pop()
    return cur


def rs_decode(
    received: bytes | bytearray | list[int],
    ec_count: int,
    max_errors: int | None = None,
) -> tuple[bytes, int]:
    """Correct up to max_errors codeword errors; return (data bytes, errors fixed).

    max_errors defaults to floor(ec_count / 2). Callers that know the block
    shape pass its tabulated correction capacity, which is smaller than the
    floor for a few small shapes that reserve codewords against misdecodes;
    corrections needing more positions than that are rejected.
    """
    n = len(received)
    if ec_count < 1 or n <= ec_count:
        raise ValueError("received must hold data plus ec_count parity bytes")
    if max_errors is None:
        max_errors = ec_count // 2
    synd = _syndromes(received, ec_count)
    if not any(synd):
        return bytes(received[:-ec_count]), 0

    locator = _berlekamp_massey(synd)
    degree = len(locator) - 1
    if degree == 0 or degree > max_errors:
        raise DecodeFailure("error locator degree out of range")

    # Chien search over all codeword degrees d: root at x = alpha^-d.
    error_degrees = []
    for d in range(n):
        if _poly_eval(locator, _EXP[(255 - d) % 255]) == 0:
            error_degrees.append(d)
    if len(error_degrees) != degree:
        raise DecodeFailure("error locator roots inconsistent")

    # Forney with first root alpha^0: e = X * omega(1/X) / locator'(1/X).
    omega = [0] * ec_count
    for i, s in enumerate(synd):
        for j, lam in enumerate(locator):
            if i + j < ec_count:
                omega[i + j] ^= field_mul(s, lam)
    deriv = [locator[i] if i % 2 == 1 else 0 for i in range(1, len(locator))]

    fixed = bytearray(received)
    for d in error_degrees:
        x_inv = _EXP[(255 - d) % 255]
        den = _poly_eval(deriv, x_inv)
        if den == 0:
            raise DecodeFailure("Forney denominator vanished")
        mag = field_mul(_EXP[d % 255], field_mul(_poly_eval(omega, x_inv), field_inv(den)))
        if mag == 0:
            raise DecodeFailure("zero error magnitude")
        fixed[n - 1 - d] ^= mag

    if any(_syndromes(fixed, ec_count)):
        raise DecodeFailure("correction left nonzero syndromes")
    return bytes(fixed[:-ec_count]), degree


# ---- format / version words (short BCH codes) ----

FORMAT_MASK = 0x5412
_FORMAT_GEN = 0x537
_VERSION_GEN = 0x1F25

VERSION_MIN = 7
VERSION_MAX = 10  # versions carrying a version word in this toolkit


def bch_encode_format(ec_bits: int, mask_id: int) -> int:
    """15-bit format word: 5 data bits, 10 BCH remainder bits, fixed XOR mask."""
    if not 0 <= ec_bits <= 3:
        raise ValueError("ec_bits out of range")
    if not 0 <= mask_id <= 7:
        raise ValueError("mask_id out of range")
    data = ec_bits << 3 | mask_id
    rem = data
    for _ in range(10):
        rem = (rem << 1) ^ ((rem >> 9) * _FORMAT_GEN)
    return (data << 10 | rem) ^ FORMAT_MASK


def bch_decode_format(word: int) -> tuple[int, int] | None:
    """Recover (ec_bits, mask_id) if the word is within 3 bit flips of a codeword."""
    best = None
    for data in range(32):
        dist = bin(bch_encode_format(data >> 3, data & 7) ^ word).count("1")
        if dist <= 3:
            best = (data >> 3, data & 7)
            break
    return best


def bch_encode_version(version: int) -> int:
    """18-bit version word: 6 data bits plus a 12-bit Golay-style remainder."""
    if not VERSION_MIN <= version <= VERSION_MAX:
        raise ValueError(f"version {version} out of range [{VERSION_MIN}, {VERSION_MAX}]")
    rem = version
    for _ in range(12):
        rem = (rem << 1) ^ ((rem >> 11) * _VERSION_GEN)
    return version << 12 | rem


def bch_decode_version(word: int) -> int | None:
    """Recover the version if the word is within 3 bit flips of an in-scope codeword."""
    for version in range(VERSION_MIN, VERSION_MAX + 1):
        if bin(bch_encode_version(version) ^ word).count("1") <= 3:
            return version
    return None
