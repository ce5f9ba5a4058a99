"""Pure-numpy fallback for the hot kernels in ``_core``.

Same call signatures and semantics as the compiled module; used when the
extension is not built or when forced via MESOFICK_BACKEND=python.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def band_convolve(band, a_minus, a_plus, f, f_left, f_right):
    """Banded quadrature convolution plus endpoint delta masses."""
    n, bw = band.shape
    half = (bw - 1) // 2
    padded = np.zeros(n + 2 * half)
    padded[half:half + n] = f
    windows = sliding_window_view(padded, bw)
    out = np.einsum("ij,ij->i", band, windows)
    out += a_minus * f_left
    out += a_plus * f_right
    return out


def neumann_resolvent(band, a_minus, a_plus, p, g, tol_abs, max_terms):
    """Sum the geometric series for (I - L)^{-1} g, where L multiplies by
    the gain p and convolves, the delta masses acting on the running
    term's own endpoint values.

    Returns (f, n_terms, last_term_norm); truncates once the newest term's
    sup norm drops below ``tol_abs`` or ``max_terms`` is hit.
    """
    f = np.array(g, dtype=float)
    term = np.array(g, dtype=float)
    norm = float(np.max(np.abs(term))) if term.size else 0.0
    terms = 0
    while norm >= tol_abs and terms < max_terms:
        weighted = p * term
        term = band_convolve(band, a_minus, a_plus, weighted,
                             p[0] * term[0], p[-1] * term[-1])
        f += term
        norm = float(np.max(np.abs(term)))
        terms += 1
    return f, terms, norm
