"""The four compass matrices and straight paths between frequency matrices."""

from __future__ import annotations

from enum import Enum
from fractions import Fraction

import numpy as np

from .errors import DimensionError, DomainError, UnsupportedDimensionError


class CompassKind(str, Enum):
    IDENTITY = "ID"
    UNIFORMITY = "UN"
    STRATIFICATION = "ST"
    ANTAGONISM = "AN"


def compass_matrix(kind: CompassKind | str, m: int, exact: bool = False) -> np.ndarray:
    """ID, UN, ST or AN of size ``m``. ST and AN exist only for even ``m``."""
    kind = CompassKind(kind)
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    if kind in (CompassKind.STRATIFICATION, CompassKind.ANTAGONISM) and m % 2:
        raise UnsupportedDimensionError(f"{kind.value} is only defined for even m, got m={m}")
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    out = np.full((m, m), zero, dtype=object if exact else float)
    if kind is CompassKind.IDENTITY:
        for i in range(m):
            out[i, i] = one
    elif kind is CompassKind.UNIFORMITY:
        out[:, :] = one / m
    elif kind is CompassKind.STRATIFICATION:
        h = m // 2
        out[:h, :h] = one * 2 / m
        out[h:, h:] = one * 2 / m
    else:
        for i in range(m):
            out[i, i] = one / 2
            out[i, m - 1 - i] = one / 2
    return out


def affine_combination(x: np.ndarray, y: np.ndarray, alpha) -> np.ndarray:
    """``alpha * x + (1 - alpha) * y`` for ``alpha`` in [0, 1]."""
    if not 0 <= alpha <= 1:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise DimensionError(f"shape mismatch: {x.shape} vs {y.shape}")
    if alpha == 1:
        return x.copy()
    if alpha == 0:
        return y.copy()
    return alpha * x + (1 - alpha) * y


PATH_ALPHAS = tuple(k / 20 for k in range(1, 20))


def compass_paths(m: int, alphas=PATH_ALPHAS) -> list[tuple[str, np.ndarray]]:
    """Interior points on the six straight paths between compass matrices.

    Labels read ``"X-Y:alpha"`` where ``alpha`` weights ``X``.
    """
    kinds = list(CompassKind)
    mats = {k: compass_matrix(k, m) for k in kinds}
    out = []
    for a in range(len(kinds)):
        for b in range(a + 1, len(kinds)):
            x, y = kinds[a], kinds[b]
            for alpha in alphas:
                out.append((f"{x.value}-{y.value}:{alpha:.2f}", affine_combination(mats[x], mats[y], alpha)))
    return out
