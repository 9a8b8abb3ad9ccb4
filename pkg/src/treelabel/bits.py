"""Bit-string plumbing: self-delimiting field packing and hex serialization.

Labels are manipulated as '0'/'1' strings throughout; only the final
serialization step converts them to hex.  A label is a sequence of variable
width fields, each prefixed by its length in a form that needs no external
delimiter: for a field f with length written in binary as l, the wire form
is 0^|l| 1 l f.  The empty field costs three bits ("010").
"""

from __future__ import annotations


def uint_to_bits(x, width):
    """Fixed-width big-endian bits of x; width 0 allowed only for x == 0."""
    if x < 0:
        raise ValueError("negative value")
    if x.bit_length() > width:
        raise ValueError(f"{x} does not fit in {width} bits")
    return format(x, "b").zfill(width) if width else ""


def bits_to_uint(bits):
    return int(bits, 2) if bits else 0


def pack_parts(parts):
    out = []
    for f in parts:
        if f and f.strip("01"):
            raise ValueError("parts must be bit strings")
        l = format(len(f), "b")
        out.append("0" * len(l))
        out.append("1")
        out.append(l)
        out.append(f)
    return "".join(out)


def unpack_parts(bits, count=None):
    """Inverse of pack_parts; reads fields until the string is exhausted or
    count fields were taken (returning the tail separately in that case)."""
    parts = []
    i = 0
    n = len(bits)
    while i < n and (count is None or len(parts) < count):
        j = i
        while j < n and bits[j] == "0":
            j += 1
        if j == n:
            raise ValueError("truncated length prefix")
        width = j - i
        j += 1
        if j + width > n:
            raise ValueError("truncated length")
        flen = int(bits[j:j + width], 2)
        j += width
        if j + flen > n:
            raise ValueError("truncated field")
        parts.append(bits[j:j + flen])
        i = j + flen
    if count is not None:
        if len(parts) != count:
            raise ValueError("too few fields")
        return parts, bits[i:]
    if i != n:
        raise ValueError("trailing bits")
    return parts


def bits_to_hex(bits):
    """'len:<bits> <hex>', MSB-first, hex padded to whole digits."""
    if bits.strip("01"):
        raise ValueError("not a bit string")
    digits = (len(bits) + 3) // 4
    return "len:%d %s" % (len(bits), format(bits_to_uint(bits), "x").zfill(max(digits, 1)))


def hex_to_bits(s):
    head, _, hx = s.partition(" ")
    if not head.startswith("len:") or not hx:
        raise ValueError(f"malformed label record: {s!r}")
    n = int(head[4:])
    v = int(hx, 16)
    if v.bit_length() > n:
        raise ValueError("value wider than declared length")
    return uint_to_bits(v, n)


def trailing_zeros(x):
    if x <= 0:
        raise ValueError("trailing_zeros needs a positive integer")
    return (x & -x).bit_length() - 1
