"""Pure numpy assembly of fiber matrices, used when the extension is unavailable."""

import numpy as np


def assemble(thetas, taus, tails, heads, weights, diag):
    nb = thetas.shape[0]
    nv = diag.shape[0]
    out = np.zeros((nb, nv, nv), dtype=np.complex128)
    out[:, np.arange(nv), np.arange(nv)] = diag
    phase = np.exp(1j * (thetas @ taus.T)) * weights  # (nb, ne)
    for k in range(taus.shape[0]):
        t, h = tails[k], heads[k]
        out[:, t, h] -= phase[:, k]
        out[:, h, t] -= phase[:, k].conj()
    return out
