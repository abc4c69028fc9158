"""Netpbm grayscale (PGM) codec.

Supports the binary ``P5`` and ASCII ``P2`` variants with maxval up to
255, which is all the object detector needs for desk-scale inputs.
Intensities are scaled to [0, 1] on decode.
"""

from __future__ import annotations

from dataclasses import dataclass

_WHITESPACE = b" \t\n\r\v\f"


class PgmDecodeError(ValueError):
    """Raised on malformed or truncated PGM data."""


@dataclass(frozen=True)
class GrayImage:
    """A grayscale raster: row-major intensities, each in [0, 1]."""

    width: int
    height: int
    data: tuple[float, ...]

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be >= 1")
        if len(self.data) != self.width * self.height:
            raise ValueError(
                f"data length {len(self.data)} does not match {self.width}x{self.height}"
            )
        if any(v < 0.0 or v > 1.0 for v in self.data):
            raise ValueError("intensities must lie in [0, 1]")

    def pixel(self, row: int, col: int) -> float:
        return self.data[row * self.width + col]


class _TokenReader:
    """Reads whitespace-separated header tokens, skipping '#' comments."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _skip_separators(self):
        data, n = self.data, len(self.data)
        while self.pos < n:
            byte = data[self.pos : self.pos + 1]
            if byte == b"#":
                end = data.find(b"\n", self.pos)
                self.pos = n if end < 0 else end + 1
            elif byte in _WHITESPACE:
                self.pos += 1
            else:
                return

    def next_token(self) -> bytes:
        self._skip_separators()
        if self.pos >= len(self.data):
            raise PgmDecodeError("unexpected end of data in header")
        start = self.pos
        data, n = self.data, len(self.data)
        while self.pos < n and data[self.pos : self.pos + 1] not in _WHITESPACE and data[self.pos] != ord("#"):
            self.pos += 1
        return data[start : self.pos]

    def next_int(self, what: str) -> int:
        token = self.next_token()
        try:
            return int(token)
        except ValueError:
            raise PgmDecodeError(f"{what} is not a decimal integer: {token!r}") from None


def decode_pgm(data: bytes) -> GrayImage:
    """Decode P5 (binary) or P2 (ASCII) bytes into a GrayImage.

    Raises PgmDecodeError on an unsupported magic number, malformed
    header, out-of-range sample, or truncated pixel data. Bytes after
    the final sample are ignored.
    """
    if not isinstance(data, (bytes, bytearray)):
        raise PgmDecodeError("expected bytes")
    reader = _TokenReader(bytes(data))
    magic = reader.next_token()
    if magic not in (b"P5", b"P2"):
        raise PgmDecodeError(f"unsupported magic {magic!r}, expected P5 or P2")
    width = reader.next_int("width")
    height = reader.next_int("height")
    maxval = reader.next_int("maxval")
    if width < 1 or height < 1:
        raise PgmDecodeError(f"dimensions must be >= 1, got {width}x{height}")
    if not 1 <= maxval <= 255:
        raise PgmDecodeError(f"maxval must be in 1..255, got {maxval}")

    count = width * height
    if magic == b"P5":
        # Exactly one whitespace byte separates maxval from the raster.
        if reader.pos >= len(reader.data) or reader.data[reader.pos : reader.pos + 1] not in _WHITESPACE:
            raise PgmDecodeError("missing whitespace between header and raster")
        start = reader.pos + 1
        raster = reader.data[start : start + count]
        if len(raster) < count:
            raise PgmDecodeError(f"truncated raster: expected {count} bytes, got {len(raster)}")
        values = list(raster)
    else:
        values = []
        for _ in range(count):
            values.append(reader.next_int("pixel value"))

    bad = next((v for v in values if v < 0 or v > maxval), None)
    if bad is not None:
        raise PgmDecodeError(f"pixel value {bad} out of range 0..{maxval}")
    scale = float(maxval)
    return GrayImage(width, height, tuple(v / scale for v in values))


def encode_pgm(image: GrayImage, binary: bool = True) -> bytes:
    """Encode a GrayImage at maxval 255 (P5 when binary, else P2).

    Intensities are rounded to the nearest 1/255 step, so images whose
    values already sit on that grid round-trip exactly.
    """
    header = f"{'P5' if binary else 'P2'}\n{image.width} {image.height}\n255\n"
    samples = [round(v * 255) for v in image.data]
    if binary:
        return header.encode("ascii") + bytes(samples)
    rows = []
    for r in range(image.height):
        row = samples[r * image.width : (r + 1) * image.width]
        rows.append(" ".join(str(v) for v in row))
    return header.encode("ascii") + ("\n".join(rows) + "\n").encode("ascii")
