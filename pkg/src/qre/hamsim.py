"""Hamiltonian simulation by GQSP on a qubitization walk operator.

The walk has eigenvalues e^{+-i arccos(E/alpha)}, so the Jacobi-Anger series

    e^{-i x cos(theta)} = sum_k (-i)^k J_k(x) e^{i k theta},   x = alpha t,

truncated at |k| <= K gives e^{-iHt} in the zero-ancilla block. GQSP applies
the shifted polynomial z^K f(z) and K inverse walk steps undo the shift.
"""

from __future__ import annotations

import numpy as np
from scipy.special import jv

from qre.block_encoding import BlockEncoding, qubitization_walk
from qre.errors import BadEpsilon, DegreeOverflow
from qre.gqsp import GQSP, complementary_polynomial
from qre.symbolics import evaluate

#: Default cap on the Jacobi-Anger truncation order.
MAX_ORDER = 10_000


def bessel_tail(x: float, order: int) -> float:
    """sum_{|k| > order} |J_k(x)|."""
    ks = np.arange(order + 1, order + 64 + int(2 * abs(x)))
    return float(2 * np.sum(np.abs(jv(ks, x))))


def jacobi_anger_order(x: float, eps: float, max_order: int = MAX_ORDER) -> int:
    """Smallest K whose Bessel tail is at most eps / 2."""
    if not 0 < eps < 1:
        raise BadEpsilon(f"precision must lie in (0, 1), got {eps}")
    k = 0
    while bessel_tail(x, k) > eps / 2:
        k += 1
        if k > max_order:
            raise DegreeOverflow(f"truncation order exceeds {max_order} at alpha*t = {x}")
    return k


def jacobi_anger_polynomial(x: float, order: int) -> np.ndarray:
    """Coefficients of z^K f(z), scaled so that its modulus stays below one."""
    ks = np.arange(-order, order + 1)
    coeffs = (-1j) ** ks * jv(ks, x)
    return coeffs / (1 + bessel_tail(x, order))


def hamsim_gqsp(be: BlockEncoding, t: float, eps: float, *, max_order: int = MAX_ORDER) -> BlockEncoding:
    """(1, a + 1, eps) encoding of e^{-iHt} from an exact reflection encoding of H."""
    x = float(evaluate(be.alpha)) * t
    order = jacobi_anger_order(x, eps, max_order)
    p = jacobi_anger_polynomial(x, order)
    walk = qubitization_walk(be)
    bloq = GQSP(walk, p, complementary_polynomial(p), negative_power=order, eps=eps / (2 * order + 2))
    return BlockEncoding(bloq, 1, be.ancillas + 1, eps, be.system_bitsize)


def hamsim_degree(alpha_t: float, eps: float) -> int:
    """Truncation order K; the GQSP polynomial has degree 2K."""
    return jacobi_anger_order(alpha_t, eps)


def hamsim_walk_calls(alpha_t: float, eps: float) -> dict:
    k = jacobi_anger_order(alpha_t, eps)
    return {"controlled_walk": 2 * k, "inverse_walk": k, "su2": 2 * k + 1, "order": k}
