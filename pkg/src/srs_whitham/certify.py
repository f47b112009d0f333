"""Interval branch-and-bound certificate that ``P(x, alpha) > 0`` below ``alpha0``.

Boxes are processed level by level as numpy arrays, so the result does not
depend on any scheduling.  Every floating-point operation on interval
endpoints is followed by one ``nextafter`` step outward, which dominates the
half-ulp rounding error of IEEE arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import DomainError
from .whitham import alpha0_x0, polynomial_P

__all__ = [
    "PositivityCertificate",
    "p_monomials",
    "interval_poly",
    "box_lower_bound",
    "tail_bound_xmax",
    "grid_oracle",
    "certify_positivity",
    "CERT_VERSION",
]

CERT_VERSION = 1
_INF = np.inf


def _down(v):
    return np.nextafter(v, -_INF)


def _up(v):
    return np.nextafter(v, _INF)


def _iadd(a, b):
    return _down(a[0] + b[0]), _up(a[1] + b[1])


def _imul(a, b):
    p = np.stack([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    return _down(p.min(axis=0)), _up(p.max(axis=0))


def _ipow_pos(a, n):
    # a >= 0 elementwise, so x^n is monotone
    lo = np.ones_like(a[0])
    hi = np.ones_like(a[1])
    for _ in range(n):
        lo = _down(lo * a[0])
        hi = _up(hi * a[1])
    return lo, hi


def _coef_interval(v: float):
    return _down(_down(v)), _up(_up(v))


def p_monomials(beta: float):
    """``{(i, j): c}`` with ``P = sum c x^i alpha^j``."""
    return {
        (0, 4): 1.0,
        (3, 3): 4 + 2 * beta,
        (5, 3): -6 * beta,
        (4, 2): 3 * beta,
        (6, 2): 6 - 14 * beta,
        (8, 2): 3 * beta,
        (7, 1): -6 * beta,
        (9, 1): 4 + 2 * beta,
        (12, 0): 1.0,
    }


def _derivative(monos, var):
    out = {}
    for (i, j), cf in monos.items():
        if var == 0 and i > 0:
            out[(i - 1, j)] = out.get((i - 1, j), 0.0) + cf * i
        elif var == 1 and j > 0:
            out[(i, j - 1)] = out.get((i, j - 1), 0.0) + cf * j
    return out


def interval_poly(monos, X, A):
    """Enclosure of ``sum c x^i alpha^j`` over boxes, Horner in ``alpha``.

    ``X``, ``A`` are ``(lo, hi)`` arrays with ``lo >= 0``.
    """
    jmax = max(j for _, j in monos)
    zero = np.zeros_like(X[0])
    # coefficient enclosures c_j(X)
    cj = [(zero.copy(), zero.copy()) for _ in range(jmax + 1)]
    for (i, j), cf in monos.items():
        t = _imul(_coef_interval(cf), _ipow_pos(X, i)) if i else (
            np.full_like(zero, _coef_interval(cf)[0]), np.full_like(zero, _coef_interval(cf)[1]))
        cj[j] = _iadd(cj[j], t)
    acc = cj[jmax]
    for j in range(jmax - 1, -1, -1):
        acc = _iadd(_imul(acc, A), cj[j])
    return acc


def box_lower_bound(monos, grads, X, A):
    """Lower bound of ``P`` on each box: the better of the natural and the centred form."""
    nat = interval_poly(monos, X, A)[0]
    xc = 0.5 * (X[0] + X[1])
    ac = 0.5 * (A[0] + A[1])
    pc = interval_poly(monos, (xc, xc), (ac, ac))
    gx = interval_poly(grads[0], X, A)
    ga = interval_poly(grads[1], X, A)
    dx = (_down(X[0] - xc), _up(X[1] - xc))
    da = (_down(A[0] - ac), _up(A[1] - ac))
    cen = _iadd(_iadd(pc, _imul(gx, dx)), _imul(ga, da))[0]
    return np.maximum(nat, cen), pc


def tail_bound_xmax(beta: float, alpha_top: float) -> float:
    """Smallest ``x >= 1`` (to 1e-6) with ``x^12 > sum |c| x^i alpha_top^j`` over the lower terms.

    The ratio of the right side to ``x^12`` decreases in ``x``, so positivity of
    ``P`` for all ``x >= X_max`` and ``0 <= alpha <= alpha_top`` follows.
    """
    monos = p_monomials(beta)

    def excess(x):
        s = sum(abs(cf) * x**i * alpha_top**j for (i, j), cf in monos.items() if (i, j) != (12, 0))
        return x**12 - s * (1 + 1e-12)

    lo, hi = 1.0, 2.0
    while excess(hi) <= 0:
        lo, hi = hi, 2 * hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class PositivityCertificate:
    beta: float
    eps: float
    alpha_top: float
    x_max: float
    boxes: list = field(default_factory=list)  # [x_lo, x_hi, a_lo, a_hi, lower_bound]
    status: str = "proved"
    counterexample: tuple | None = None
    min_alpha_found: float | None = None
    argmin: tuple | None = None
    max_depth: int = 0
    version: int = CERT_VERSION

    @property
    def proved(self) -> bool:
        return self.status == "proved"

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "PositivityCertificate":
        d = json.loads(text)
        if d.get("version") != CERT_VERSION:
            raise ValueError(f"unsupported certificate version {d.get('version')}")
        for key in ("counterexample", "argmin"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        return cls(**d)


def grid_oracle(beta: float, step: float = 1e-3, x_factor: float = 1.5, a_factor: float = 1.1):
    """Minimum of ``alpha`` over the grid points of ``M`` in ``[1, 1.5 x0] x [1, 1.1 alpha0]``.

    For each grid ``x`` the quartic ``P(x, .)`` is solved and the first grid
    ``alpha`` with ``P <= 0`` is located from the smallest root, then confirmed by
    direct evaluation at that grid point and its lower neighbour.  Returns
    ``(min_alpha_on_grid, (x_argmin, alpha_root_at_argmin))``; the argmin is
    chosen by the unrounded root so ties on the alpha grid are broken exactly.
    """
    alpha0, x0 = alpha0_x0(beta)
    nx = int(math.floor((x_factor * x0 - 1) / step)) + 1
    xs = 1 + step * np.arange(1, nx)  # x > 1
    a_hi = a_factor * alpha0
    na = int(math.floor((a_hi - 1) / step))
    best = (np.inf, None, np.inf)
    for x in xs:
        c3 = x**3 * (4 + 2 * beta - 6 * beta * x * x)
        c2 = x**4 * (3 * beta + (6 - 14 * beta) * x * x + 3 * beta * x**4)
        c1 = x**7 * (-6 * beta + (4 + 2 * beta) * x * x)
        roots = np.roots([1.0, c3, c2, c1, x**12])
        real = np.sort(roots.real[np.abs(roots.imag) <= 1e-9 * np.abs(roots)])
        real = real[(real > 1) & (real <= a_hi)]
        if real.size == 0:
            continue
        r1 = real[0]
        idx = int(math.ceil((r1 - 1) / step - 1e-9))
        if idx < 1 or idx > na:
            continue
        ag = 1 + step * idx
        # the set {P <= 0} starts at r1; walk forward over a thin sliver if needed
        while idx <= na and polynomial_P(x, ag, beta) > 0:
            idx += 1
            ag = 1 + step * idx
        if idx > na:
            continue
        assert polynomial_P(x, 1 + step * (idx - 1), beta) > 0 or idx == 1
        if (ag, r1) < (best[0], best[2]):
            best = (ag, x, r1)
    if best[1] is None:
        raise RuntimeError("grid oracle found no point of M")
    return best[0], (best[1], best[2])


def certify_positivity(beta: float, eps: float = 1e-3, alpha_top: float | None = None,
                       max_depth: int = 40, run_oracle: bool = True, keep_boxes: bool = True,
                       max_boxes: int = 2_000_000) -> PositivityCertificate:
    """Prove ``P > 0`` on ``[1, X_max] x [1, alpha_top]`` by interval subdivision.

    ``alpha_top`` defaults to ``alpha0 (1 - eps)``.  A box whose centre has
    ``P <= 0`` yields status ``counterexample``; exceeding ``max_depth`` yields
    ``failed``.  ``x > X_max`` is covered by :func:`tail_bound_xmax`.
    """
    if not (0.0 < beta < 1.0):
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    if not eps > 0 and alpha_top is None:
        raise DomainError("eps must be positive")
    alpha0, x0 = alpha0_x0(beta)
    if alpha_top is None:
        alpha_top = alpha0 * (1 - eps)
    x_max = tail_bound_xmax(beta, alpha_top)
    monos = p_monomials(beta)
    grads = (_derivative(monos, 0), _derivative(monos, 1))
    cert = PositivityCertificate(beta=beta, eps=eps, alpha_top=alpha_top, x_max=x_max)

    # initial 8 x 8 tiling
    ex = np.linspace(1.0, x_max, 9)
    ea = np.linspace(1.0, alpha_top, 9)
    XL, AL = np.meshgrid(ex[:-1], ea[:-1], indexing="ij")
    XH, AH = np.meshgrid(ex[1:], ea[1:], indexing="ij")
    X = (XL.ravel(), XH.ravel())
    A = (AL.ravel(), AH.ravel())
    accepted = []
    total = 0
    depth = 0
    while X[0].size:
        lb, pc = box_lower_bound(monos, grads, X, A)
        ok = lb > 0
        if keep_boxes:
            accepted.append(np.column_stack([X[0][ok], X[1][ok], A[0][ok], A[1][ok], lb[ok]]))
        bad = pc[1] <= 0
        if np.any(bad):
            i = int(np.nonzero(bad)[0][0])
            cert.status = "counterexample"
            cert.counterexample = (float(0.5 * (X[0][i] + X[1][i])), float(0.5 * (A[0][i] + A[1][i])))
            break
        total += X[0].size
        rest = ~ok
        if not np.any(rest):
            break
        depth += 1
        if depth > max_depth or total > max_boxes:
            cert.status = "failed"
            break
        xl, xh, al, ah = X[0][rest], X[1][rest], A[0][rest], A[1][rest]
        xm, am = 0.5 * (xl + xh), 0.5 * (al + ah)
        X = (np.concatenate([xl, xm, xl, xm]), np.concatenate([xm, xh, xm, xh]))
        A = (np.concatenate([al, al, am, am]), np.concatenate([am, am, ah, ah]))
    cert.max_depth = depth
    if keep_boxes and accepted:
        cert.boxes = np.concatenate(accepted).tolist()
    if run_oracle:
        amin, arg = grid_oracle(beta)
        cert.min_alpha_found = float(amin)
        cert.argmin = (float(arg[0]), float(arg[1]))
    return cert
