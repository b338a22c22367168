"""Independent reference computations used as test oracles.

Nothing here calls into the package's numerical routines: eigenvectors
come straight from ``numpy.linalg.eig`` and orbits are iterated in
eigen-coordinates, where ``g^m`` is an exact diagonal power.
"""

import itertools

import numpy as np


def random_gapped_map(rng, n1, gap=1.3, spread=1.5):
    """Lift ``h diag(lam) h^-1`` with eigenvalue moduli separated by ratios > ``gap``."""
    mods = np.sort(np.exp(rng.uniform(-spread, spread, n1)))
    for i in range(1, n1):
        mods[i] = max(mods[i], gap * mods[i - 1])
    lam = mods * np.exp(1j * rng.uniform(0, 2 * np.pi, n1))
    h = rng.standard_normal((n1, n1)) + 1j * rng.standard_normal((n1, n1))
    return h @ np.diag(lam) @ np.linalg.inv(h)


def eigen_orbit(lift, x, m_max, backward=False):
    """Unit representatives of ``g^{±m} x`` for m = 0..m_max via eigen-coordinates."""
    lam, vecs = np.linalg.eig(np.asarray(lift, dtype=complex))
    c = np.linalg.solve(vecs, np.asarray(x, dtype=complex))
    log_mod = np.log(np.abs(lam)) * (-1 if backward else 1)
    phase = np.angle(lam) * (-1 if backward else 1)
    out = []
    for m in range(m_max + 1):
        logs = m * log_mod
        keep = np.abs(c) > 1e-12 * np.abs(c).max()  # rounding residue of exact zeros
        shift = np.max(logs[keep])
        coef = np.zeros_like(c)
        coef[keep] = c[keep] * np.exp(logs[keep] - shift + 1j * m * phase[keep])
        y = vecs @ coef
        out.append(y / np.linalg.norm(y))
    return np.array(out)


def fs_rows(xs, y):
    ip = np.abs(xs.conj() @ (y / np.linalg.norm(y))) / np.linalg.norm(xs, axis=1)
    return np.arccos(np.clip(ip, 0.0, 1.0))


def cluster_points(orbit, radius=1e-5, min_hits=5):
    """Late iterates (second half) with at least ``min_hits`` iterates within ``radius``."""
    late = orbit[len(orbit) // 2:]
    found = []
    remaining = list(range(len(late)))
    while remaining:
        q = late[remaining[-1]]
        d = fs_rows(late[remaining], q)
        near = d <= radius
        if near.sum() >= min_hits:
            found.append(q)
        remaining = [i for i, nb in zip(remaining, near) if not nb]
    return found


def class_windows(lift):
    """Eigenvectors of the lift grouped by modulus (sorted increasing), from numpy.linalg.eig."""
    lam, vecs = np.linalg.eig(np.asarray(lift, dtype=complex))
    order = np.argsort(np.abs(lam))
    return np.abs(lam[order]), vecs[:, order]


def brute_force_reduced_words(g, max_len):
    """All words of length <= max_len with post-hoc free reduction, deduplicated."""
    letters = [(i, e) for i in range(1, g + 1) for e in (1, -1)]
    seen = set()
    for length in range(max_len + 1):
        for w in itertools.product(letters, repeat=length):
            stack = []
            for a in w:
                if stack and stack[-1] == (a[0], -a[1]):
                    stack.pop()
                else:
                    stack.append(a)
            if len(stack) == length:
                seen.add(tuple(stack))
    return seen


def jordan_power_direct(lam, size, m):
    j = lam * np.eye(size, dtype=complex) + np.eye(size, k=1)
    return np.linalg.matrix_power(j, m)
