"""Counter-style deterministic randomness.

Every random decision in the simulator is a pure function of a 64-bit
stream seed and an integer key, evaluated through a splitmix64-style
finalizer.  Two consequences we rely on throughout:

* two runs that share a stream seed see exactly the same underlying
  graph realization, no matter which arcs they actually consult or in
  which order (policies can therefore be compared on paired seeds);
* results are independent of thread/process scheduling, so parallel
  trial execution cannot change any emitted number.
"""

from __future__ import annotations

import numpy as np

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_IV = 0x6A09E667F3BCC909

_U_GOLDEN = np.uint64(_GOLDEN)
_U_M1 = np.uint64(0xBF58476D1CE4E5B9)
_U_M2 = np.uint64(0x94D049BB133111EB)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_INV53 = float(2.0**-53)

# Key layout: arc u->v uses bit 42 as a tag plus the two 21-bit ids, a
# node-type draw for id i uses the bare id.  Ids must stay below 2**21.
KEY_ID_BITS = 21
MAX_ID = (1 << KEY_ID_BITS) - 1
_ARC_TAG = 1 << (2 * KEY_ID_BITS)


def mix64(x: int) -> int:
    """splitmix64 finalizer on a Python int (mod 2**64)."""
    x &= _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def derive_seed(*parts: int) -> int:
    """Fold integer components into one 64-bit stream seed.

    Used for trial streams, e.g. ``derive_seed(master_seed, n, trial)``.
    Order matters; every component is fully mixed before folding.
    """
    h = _IV
    for p in parts:
        h = (h + _GOLDEN) & _M64
        h = mix64(h ^ (int(p) & _M64))
    return h


def key_uniform(seed: int, key: int) -> float:
    """Uniform draw in [0, 1) for a single (seed, key) pair."""
    return (mix64((seed + key * _GOLDEN) & _M64) >> 11) * _INV53


def key_uniform_array(seed: int, keys: np.ndarray) -> np.ndarray:
    """Vectorized :func:`key_uniform` over a uint64 key array."""
    x = np.uint64(seed) + keys * _U_GOLDEN
    x = (x ^ (x >> _U30)) * _U_M1
    x = (x ^ (x >> _U27)) * _U_M2
    x ^= x >> _U31
    return (x >> _U11) * _INV53


def arc_key(u: int, v: int) -> int:
    """Key of the directed arc u -> v."""
    return _ARC_TAG | (u << KEY_ID_BITS) | v


def arc_keys_into(sources: np.ndarray, target: int) -> np.ndarray:
    """Keys of arcs source -> target for a uint64 array of sources."""
    return np.uint64(_ARC_TAG | target) | (sources << np.uint64(KEY_ID_BITS))


def arc_keys_from(source: int, targets: np.ndarray) -> np.ndarray:
    """Keys of arcs source -> target for a uint64 array of targets."""
    return np.uint64(_ARC_TAG | (source << KEY_ID_BITS)) | targets


def type_key(node_id: int) -> int:
    return node_id
