"""Named parameter registry with tying by aliasing, plus binary serialization.

Tying is identity: an alias resolves to a canonical name, and every canonical
name owns exactly one value array. Updates are always in place, so anything
holding the canonical entry sees the new value.

Binary layout (all integers little-endian)::

    magic      8 bytes   b"SMTLPRM\\0"
    version    u32       currently 1
    dtype      u8        0 = float64, 1 = float32
    n_entries  u32
    n_entries times:
        name_len u16, name utf-8 bytes
        ndim     u8, dims u32 * ndim
        values   little-endian floats, C order
    n_aliases  u32
    n_aliases times:
        alias_len u16, alias utf-8, canon_len u16, canonical utf-8
"""

import hashlib
import io
import struct

import numpy as np

from ..errors import ConfigError, DataError
from .graph import Node

MAGIC = b"SMTLPRM\0"
FORMAT_VERSION = 1
_DTYPE_CODES = {np.dtype(np.float64): 0, np.dtype(np.float32): 1}
_CODE_DTYPES = {0: np.dtype("<f8"), 1: np.dtype("<f4")}


class ParamEntry:
    __slots__ = ("name", "value", "grad")

    def __init__(self, name, value):
        self.name = name
        self.value = value
        self.grad = np.zeros_like(value)

    def __repr__(self):
        return f"ParamEntry({self.name!r}, shape={self.value.shape})"


def glorot_uniform(rng, shape, dtype=np.float64):
    """Uniform in +-sqrt(6 / (fan_in + fan_out)); vectors use fan_out = 1."""
    if len(shape) == 1:
        fan_in, fan_out = shape[0], 1
    else:
        fan_out, fan_in = shape[0], int(np.prod(shape[1:]))
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


class ParameterStore:
    def __init__(self, dtype=np.float64):
        self.dtype = np.dtype(dtype)
        if self.dtype not in _DTYPE_CODES:
            raise ConfigError(f"unsupported parameter dtype {self.dtype}")
        self.entries = {}
        self.aliases = {}

    def __contains__(self, name):
        return name in self.entries or name in self.aliases

    def __len__(self):
        return len(self.entries)

    def add(self, name, shape=None, *, rng=None, value=None, init="glorot"):
        """Register a canonical parameter. Either ``value`` or ``shape`` is given;
        with ``shape``, ``init`` is ``"glorot"`` (needs ``rng``) or ``"zeros"``."""
        if name in self:
            raise ConfigError(f"parameter {name!r} already registered")
        if value is not None:
            arr = np.array(value, dtype=self.dtype)
        elif init == "zeros":
            arr = np.zeros(shape, dtype=self.dtype)
        elif init == "glorot":
            if rng is None:
                raise ConfigError("glorot init needs an rng")
            arr = glorot_uniform(rng, tuple(shape), self.dtype)
        else:
            raise ConfigError(f"unknown init {init!r}")
        self.entries[name] = ParamEntry(name, arr)
        return self.entries[name]

    def alias(self, alias, canonical):
        canonical = self.resolve(canonical)
        if alias in self.entries:
            raise ConfigError(f"{alias!r} is already a canonical parameter")
        prev = self.aliases.get(alias)
        if prev is not None and prev != canonical:
            raise ConfigError(f"alias {alias!r} already points to {prev!r}")
        self.aliases[alias] = canonical

    def resolve(self, name):
        if name in self.entries:
            return name
        try:
            return self.aliases[name]
        except KeyError:
            raise KeyError(f"unknown parameter {name!r}") from None

    def entry(self, name):
        return self.entries[self.resolve(name)]

    def value(self, name):
        return self.entry(name).value

    def grad(self, name):
        return self.entry(name).grad

    def param(self, name, trainable=True):
        """Graph leaf for ``name``; non-trainable leaves are constants."""
        e = self.entry(name)
        if not trainable:
            return Node(e.value, kind="param-const")
        return Node(e.value, kind="param", requires_grad=True, param=e)

    def zero_grads(self, names=None):
        targets = self.entries.values() if names is None else (self.entry(n) for n in names)
        for e in targets:
            e.grad.fill(0.0)

    def names(self, prefix=""):
        return [n for n in self.entries if n.startswith(prefix)]

    def num_values(self, names=None):
        names = self.entries if names is None else {self.resolve(n) for n in names}
        return sum(self.entries[n].value.size for n in names)

    def checksum(self, names=None):
        """SHA-256 over canonical names and raw values (sorted by name)."""
        h = hashlib.sha256()
        keys = sorted(self.entries if names is None else {self.resolve(n) for n in names})
        for n in keys:
            h.update(n.encode())
            h.update(np.ascontiguousarray(self.entries[n].value).tobytes())
        return h.hexdigest()

    def snapshot(self):
        return {n: e.value.copy() for n, e in self.entries.items()}

    def restore(self, snap):
        """Copy values back in place (entries keep their identity)."""
        for n, v in snap.items():
            self.entries[n].value[...] = v

    # serialization

    def to_bytes(self):
        buf = io.BytesIO()
        self.write(buf)
        return buf.getvalue()

    def write(self, fh):
        fh.write(MAGIC)
        fh.write(struct.pack("<IB", FORMAT_VERSION, _DTYPE_CODES[self.dtype]))
        fh.write(struct.pack("<I", len(self.entries)))
        le = _CODE_DTYPES[_DTYPE_CODES[self.dtype]]
        for name, e in self.entries.items():
            _write_str(fh, name)
            fh.write(struct.pack("<B", e.value.ndim))
            fh.write(struct.pack(f"<{e.value.ndim}I", *e.value.shape))
            fh.write(np.ascontiguousarray(e.value, dtype=le).tobytes())
        fh.write(struct.pack("<I", len(self.aliases)))
        for alias, canon in self.aliases.items():
            _write_str(fh, alias)
            _write_str(fh, canon)

    @classmethod
    def from_bytes(cls, data):
        return cls.read(io.BytesIO(data))

    @classmethod
    def read(cls, fh):
        if fh.read(len(MAGIC)) != MAGIC:
            raise DataError("not a parameter container (bad magic)")
        version, code = struct.unpack("<IB", _read_exact(fh, 5))
        if version != FORMAT_VERSION:
            raise DataError(f"unsupported parameter format version {version}")
        if code not in _CODE_DTYPES:
            raise DataError(f"unknown dtype code {code}")
        le = _CODE_DTYPES[code]
        store = cls(dtype=le.newbyteorder("="))
        (n,) = struct.unpack("<I", _read_exact(fh, 4))
        for _ in range(n):
            name = _read_str(fh)
            (ndim,) = struct.unpack("<B", _read_exact(fh, 1))
            shape = struct.unpack(f"<{ndim}I", _read_exact(fh, 4 * ndim))
            count = int(np.prod(shape)) if ndim else 1
            raw = _read_exact(fh, count * le.itemsize)
            arr = np.frombuffer(raw, dtype=le).reshape(shape).astype(store.dtype)
            store.entries[name] = ParamEntry(name, arr)
        (na,) = struct.unpack("<I", _read_exact(fh, 4))
        for _ in range(na):
            alias = _read_str(fh)
            store.aliases[alias] = _read_str(fh)
        return store


def _write_str(fh, s):
    b = s.encode("utf-8")
    fh.write(struct.pack("<H", len(b)))
    fh.write(b)


def _read_exact(fh, n):
    data = fh.read(n)
    if len(data) != n:
        raise DataError("truncated parameter container")
    return data


def _read_str(fh):
    (n,) = struct.unpack("<H", _read_exact(fh, 2))
    return _read_exact(fh, n).decode("utf-8")
