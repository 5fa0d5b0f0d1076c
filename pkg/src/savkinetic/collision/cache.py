"""Binary cache for kernel modes.

Layout (little-endian)::

    magic      8s   b"KSAVMODE"
    version    u32
    operator   u32  1 = Boltzmann, 2 = Landau
    N          u32
    L          f64
    params     3 x f64   (kernel constant, gamma, R)
    orders     2 x u32   (radial, angular)
    checksum   32s  sha256 of the header fields above and the payload

followed by the tables as raw complex128 in row-major FFT mode order:
``beta`` (N^2 x N^2) then ``beta_loss`` (N^2) for Boltzmann; ``A11``, ``A12``,
``A22`` (2N x 2N each, offset lattice) for Landau.
"""
import hashlib
import struct
from pathlib import Path

import numpy as np

from ..errors import CorruptFile, MetadataMismatch
from .modes import BOLTZMANN, LANDAU, KernelModes

MAGIC = b"KSAVMODE"
VERSION = 1
_FIELDS = struct.Struct("<8sIIIddddII")
_HEADER_SIZE = _FIELDS.size + 32
_TAGS = {BOLTZMANN: 1, LANDAU: 2}
_OPS = {v: k for k, v in _TAGS.items()}


def _layout(operator: str, N: int):
    if operator == BOLTZMANN:
        return [("beta", (N * N, N * N), True), ("beta_loss", (N * N,), True)]
    return [(name, (2 * N, 2 * N), False) for name in ("A11", "A12", "A22")]


def save_modes(modes: KernelModes, path) -> Path:
    path = Path(path)
    fields = _FIELDS.pack(MAGIC, VERSION, _TAGS[modes.operator], modes.N, modes.L,
                          *modes.params, *modes.orders)
    payload = b"".join(
        np.ascontiguousarray(modes.tables[name], dtype="<c16").tobytes()
        for name, _, _ in _layout(modes.operator, modes.N))
    digest = hashlib.sha256(fields + payload).digest()
    tmp = path.with_name(path.name + ".part")
    with open(tmp, "wb") as fh:
        fh.write(fields)
        fh.write(digest)
        fh.write(payload)
    tmp.replace(path)
    return path


def read_header(path):
    with open(path, "rb") as fh:
        head = fh.read(_HEADER_SIZE)
    if len(head) < _HEADER_SIZE:
        raise CorruptFile(f"{path}: header truncated")
    magic, version, tag, N, L, c, gamma, R, m_r, m_t = _FIELDS.unpack(head[:_FIELDS.size])
    if magic != MAGIC:
        raise CorruptFile(f"{path}: bad magic {magic!r}")
    if tag not in _OPS:
        raise CorruptFile(f"{path}: unknown operator tag {tag}")
    return {"version": version, "operator": _OPS[tag], "N": N, "L": L,
            "params": (c, gamma, R), "orders": (m_r, m_t)}


def load_modes(path, expected: KernelModes | dict | None = None) -> KernelModes:
    """Read a cache file, verifying checksum and (optionally) metadata.

    ``expected`` is either a KernelModes whose metadata must match, or a dict
    with any of the keys ``operator``, ``N``, ``L``, ``params``, ``orders``.
    """
    meta = read_header(path)
    if meta["version"] != VERSION:
        raise MetadataMismatch(f"{path}: format version {meta['version']} != {VERSION}")
    if expected is not None:
        if isinstance(expected, KernelModes):
            expected = {"operator": expected.operator, "N": expected.N, "L": expected.L,
                        "params": expected.params, "orders": expected.orders}
        for key, want in expected.items():
            have = meta[key]
            if tuple(np.atleast_1d(have)) != tuple(np.atleast_1d(want)):
                raise MetadataMismatch(f"{path}: {key}={have!r}, requested {want!r}")

    raw = Path(path).read_bytes()
    fields, digest, payload = raw[:_FIELDS.size], raw[_FIELDS.size:_HEADER_SIZE], raw[_HEADER_SIZE:]
    layout = _layout(meta["operator"], meta["N"])
    need = sum(16 * int(np.prod(shape)) for _, shape, _ in layout)
    if len(payload) != need:
        raise CorruptFile(f"{path}: payload has {len(payload)} bytes, expected {need}")
    if hashlib.sha256(fields + payload).digest() != digest:
        raise CorruptFile(f"{path}: checksum mismatch")

    tables, offset = {}, 0
    for name, shape, real in layout:
        n = int(np.prod(shape))
        arr = np.frombuffer(payload, dtype="<c16", count=n, offset=offset).reshape(shape)
        offset += 16 * n
        tables[name] = arr.real.copy() if real else arr.astype(complex)
    return KernelModes(meta["operator"], meta["N"], meta["L"], meta["params"], meta["orders"], tables)
