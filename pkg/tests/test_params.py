import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqmtl.autodiff import ParameterStore, glorot_uniform
from seqmtl.errors import ConfigError, DataError


def _filled(seed=0, dtype=np.float64):
    rng = np.random.default_rng(seed)
    s = ParameterStore(dtype=dtype)
    s.add("a/W", (4, 3), rng=rng)
    s.add("a/b", (4,), init="zeros")
    s.add("shared/E", (6, 2), rng=rng)
    s.alias("t0/E", "shared/E")
    s.alias("t1/E", "shared/E")
    return s


def test_alias_shares_storage():
    s = _filled()
    assert s.entry("t0/E") is s.entry("t1/E") is s.entry("shared/E")
    s.value("t0/E")[0, 0] = 42.0
    assert s.value("t1/E")[0, 0] == 42.0


def test_alias_errors():
    s = _filled()
    with pytest.raises(ConfigError):
        s.add("a/W", (1,), init="zeros")
    with pytest.raises(Exception):
        s.resolve("missing")


def test_glorot_bounds():
    w = glorot_uniform(np.random.default_rng(0), (30, 20))
    bound = np.sqrt(6.0 / 50)
    assert np.abs(w).max() <= bound


def test_round_trip_is_bit_exact():
    s = _filled()
    t = ParameterStore.from_bytes(s.to_bytes())
    assert t.to_bytes() == s.to_bytes()
    assert t.checksum() == s.checksum()
    assert t.aliases == s.aliases
    for n in s.entries:
        assert t.value(n).tobytes() == s.value(n).tobytes()


def test_round_trip_float32():
    s = _filled(dtype=np.float32)
    t = ParameterStore.from_bytes(s.to_bytes())
    assert t.dtype == np.float32
    assert t.checksum() == s.checksum()


def test_bad_magic_and_truncation():
    data = _filled().to_bytes()
    with pytest.raises(DataError):
        ParameterStore.from_bytes(b"XXXXXXXX" + data[8:])
    with pytest.raises(DataError):
        ParameterStore.from_bytes(data[:-3])


def test_checksum_detects_change():
    s = _filled()
    before = s.checksum(["a/W"])
    s.value("a/b")[0] = 1.0
    assert s.checksum(["a/W"]) == before
    s.value("a/W")[0, 0] += 1e-12
    assert s.checksum(["a/W"]) != before


def test_snapshot_restore_in_place():
    s = _filled()
    snap = s.snapshot()
    ref = s.value("a/W")
    ref += 1
    s.restore(snap)
    assert s.value("a/W") is ref
    np.testing.assert_array_equal(ref, snap["a/W"])


@given(st.lists(st.tuples(st.integers(1, 4), st.integers(1, 4)), min_size=1, max_size=5),
       st.integers(0, 2 ** 32 - 1))
def test_serialization_property(shapes, seed):
    rng = np.random.default_rng(seed)
    s = ParameterStore()
    for i, shape in enumerate(shapes):
        s.add(f"p{i}", value=rng.normal(size=shape))
    buf = io.BytesIO()
    s.write(buf)
    buf.seek(0)
    assert ParameterStore.read(buf).to_bytes() == s.to_bytes()
