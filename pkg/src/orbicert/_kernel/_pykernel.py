"""Numpy implementations of the finite-model kernels.

All arrays are int64 and entries are expected to be reduced into
[0, mod); callers guarantee d * mod**2 fits in an int64.
"""

import numpy as np

_CHUNK = 4096


def apply_batch(mat, vec, pts, mod):
    """Apply x -> mat @ x + vec (mod mod) to every row of `pts`."""
    return (pts @ mat.T + vec) % mod


def orbit_iterate(mat, vec, x, steps, mod):
    """Forward orbit of x under x -> mat @ x + vec; rows 0..steps."""
    d = x.shape[0]
    out = np.empty((steps + 1, d), dtype=np.int64)
    cur = np.mod(x, mod)
    out[0] = cur
    for t in range(steps):
        cur = (mat @ cur + vec) % mod
        out[t + 1] = cur
    return out


def _digit_points(start, count, base, dim):
    """Little-endian base digits of start..start+count-1 as rows."""
    idx = np.arange(start, start + count, dtype=np.int64)
    pts = np.zeros((count, dim), dtype=np.int64)
    power = 1
    for k in range(dim):
        if power >= start + count:
            break
        pts[:, k] = (idx // power) % base
        power *= base
    return pts


def _first_violation(mats, vecs, proj, mult, mod, pts):
    px = (pts @ proj.T % mod) * mult % mod
    best = -1
    for g in range(mats.shape[0]):
        y = (pts @ mats[g].T + vecs[g]) % mod
        py = (y @ proj.T % mod) * mult % mod
        bad = np.nonzero((py != px).any(axis=1))[0]
        if bad.size and (best < 0 or bad[0] < best):
            best = int(bad[0])
    return best


def invariance_scan_range(mats, vecs, proj, mult, mod, scale, base, start, count):
    """Scan points x = scale * digits(t) for t in [start, start+count).

    Returns the smallest t whose point breaks mult * proj-invariance
    under some generator, or -1 when every point passes.
    """
    dim = mats.shape[1]
    done = 0
    while done < count:
        n = min(_CHUNK, count - done)
        pts = _digit_points(start + done, n, base, dim)
        pts = (pts * scale) % mod
        hit = _first_violation(mats, vecs, proj, mult, mod, pts)
        if hit >= 0:
            return start + done + hit
        done += n
    return -1


def invariance_scan_points(mats, vecs, proj, mult, mod, pts):
    """Like invariance_scan_range but over explicit rows; returns row index."""
    total = pts.shape[0]
    done = 0
    while done < total:
        n = min(_CHUNK, total - done)
        hit = _first_violation(mats, vecs, proj, mult, mod, pts[done : done + n])
        if hit >= 0:
            return done + hit
        done += n
    return -1
