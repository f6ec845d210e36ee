"""Deterministic figures: PNG approximations, SVG intercept diagrams, DOT graphs."""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .core import DigitSet, level_mask


@dataclass(frozen=True)
class RasterSpec:
    px: int  # pixels per unit length; must be divisible by N^n
    foreground: int = 0
    background: int = 255
    margin: int = 0

    def __post_init__(self):
        if self.px < 1 or self.margin < 0:
            raise ValueError("px must be positive and margin non-negative")
        for v in (self.foreground, self.background):
            if not 0 <= v <= 255:
                raise ValueError("grey levels are 0..255")


def _png_chunk(kind: bytes, data: bytes) -> bytes:
    return struct.pack(">I", len(data)) + kind + data + struct.pack(">I", zlib.crc32(kind + data) & 0xFFFFFFFF)


def encode_png_gray(img: np.ndarray) -> bytes:
    """8-bit greyscale PNG; filter 0 on every row and a fixed zlib level, no metadata."""
    img = np.ascontiguousarray(img, dtype=np.uint8)
    h, w = img.shape
    raw = np.zeros((h, w + 1), dtype=np.uint8)
    raw[:, 1:] = img
    header = struct.pack(">IIBBBBB", w, h, 8, 0, 0, 0, 0)
    return (b"\x89PNG\r\n\x1a\n" + _png_chunk(b"IHDR", header)
            + _png_chunk(b"IDAT", zlib.compress(raw.tobytes(), 9)) + _png_chunk(b"IEND", b""))


def approx_image(D: DigitSet, n: int, spec: RasterSpec, budget=None) -> np.ndarray:
    """Pixel array of K^(n); row 0 is the top edge so j grows upward."""
    side = D.order ** n
    if spec.px % side:
        raise ValueError(f"px={spec.px} is not divisible by N^n = {side}")
    block = spec.px // side
    occ = level_mask(D, n, budget)
    # [i, j] -> image rows run top-down over j, columns over i
    cells = occ.T[::-1, :]
    body = np.kron(cells, np.ones((block, block), dtype=bool))
    total = spec.px + 2 * spec.margin
    img = np.full((total, total), spec.background, dtype=np.uint8)
    inner = img[spec.margin:spec.margin + spec.px, spec.margin:spec.margin + spec.px]
    inner[body] = spec.foreground
    return img


def render_approx(D: DigitSet, n: int, spec: RasterSpec, budget=None) -> bytes:
    return encode_png_gray(approx_image(D, n, spec, budget))


def decode_png_gray(data: bytes) -> np.ndarray:
    """Inverse of encode_png_gray for its own output (filter 0 only)."""
    if data[:8] != b"\x89PNG\r\n\x1a\n":
        raise ValueError("not a PNG")
    pos = 8
    idat = b""
    w = h = None
    while pos < len(data):
        (length,) = struct.unpack(">I", data[pos:pos + 4])
        kind = data[pos + 4:pos + 8]
        body = data[pos + 8:pos + 8 + length]
        pos += 12 + length
        if kind == b"IHDR":
            w, h = struct.unpack(">II", body[:8])
        elif kind == b"IDAT":
            idat += body
    raw = np.frombuffer(zlib.decompress(idat), dtype=np.uint8).reshape(h, w + 1)
    if np.any(raw[:, 0]):
        raise ValueError("only filter type 0 is supported")
    return raw[:, 1:].copy()


def render_omega(profile, width: int = 600, height: int = 80) -> str:
    """SVG of Omega_1 on one period: grid ticks, filled cells, isolated points."""
    N = profile.order
    pad = 20
    unit = (width - 2 * pad) / N
    y = height / 2
    per = profile.slope.period
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>Omega_1 for slope {profile.slope.r}/{profile.slope.s}, m={profile.m}, q={profile.q}</title>',
        f'<line x1="{pad}" y1="{y:g}" x2="{width - pad}" y2="{y:g}" stroke="black" stroke-width="1"/>',
    ]
    for k in range(N + 1):
        x = pad + k * unit
        out.append(f'<line x1="{x:.3f}" y1="{y - 6:g}" x2="{x:.3f}" y2="{y + 6:g}" stroke="gray" stroke-width="1"/>')
    for u in profile.cells:
        x = pad + u * unit
        out.append(f'<rect x="{x:.3f}" y="{y - 4:g}" width="{unit:.3f}" height="8" fill="black"/>')
    for v in profile.isolated:
        x = pad + v * unit
        out.append(f'<circle cx="{x:.3f}" cy="{y:g}" r="4" fill="black"/>')
    out.append(f'<text x="{pad}" y="{height - 8}" font-size="12">0</text>')
    out.append(f'<text x="{width - pad}" y="{height - 8}" font-size="12" text-anchor="end">{per}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_hata(graph) -> str:
    """Graphviz DOT with vertices named "i,j" in sorted order."""
    out = [f"graph hata_{graph.order}_{graph.level} {{"]
    for i, j in graph.vertices:
        out.append(f'  "{i},{j}";')
    for (a, b), (c, d) in graph.edges:
        out.append(f'  "{a},{b}" -- "{c},{d}";')
    out.append("}")
    return "\n".join(out) + "\n"
