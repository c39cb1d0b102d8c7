"""Objective-function wrapper with thread-safe evaluation counting."""

from __future__ import annotations

import threading
from typing import Callable, Optional

import numpy as np


class ObjectiveHandle:
    """Callable pair (value, gradient) for a scalar field phi on R^D.

    Every evaluation is counted; the value and gradient counters are
    guarded by a lock so concurrent callers see consistent totals.

    If ``gradient_fn`` is omitted, gradients fall back to central finite
    differences with per-component spacing ``1e-6 * (1 + |x_i|)``.  The
    2*D probe evaluations of the fallback are charged to the value
    counter (they really do call ``value_fn``).
    """

    def __init__(
        self,
        value_fn: Callable[[np.ndarray], float],
        gradient_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        dimension: Optional[int] = None,
    ):
        self._value_fn = value_fn
        self._gradient_fn = gradient_fn
        self.dimension = dimension
        self._value_calls = 0
        self._gradient_calls = 0
        self._lock = threading.Lock()

    @property
    def value_calls(self) -> int:
        return self._value_calls

    @property
    def gradient_calls(self) -> int:
        return self._gradient_calls

    def counts(self) -> tuple[int, int]:
        with self._lock:
            return self._value_calls, self._gradient_calls

    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise ValueError(f"expected a 1-D point, got shape {x.shape}")
        if self.dimension is not None and x.shape[0] != self.dimension:
            raise ValueError(
                f"dimension mismatch: point has {x.shape[0]}, objective expects {self.dimension}"
            )
        return x

    def value(self, x) -> float:
        x = self._check(x)
        out = float(self._value_fn(x))
        with self._lock:
            self._value_calls += 1
        return out

    def gradient(self, x) -> np.ndarray:
        x = self._check(x)
        if self._gradient_fn is not None:
            g = np.asarray(self._gradient_fn(x), dtype=float)
            if g.shape != x.shape:
                raise ValueError(
                    f"gradient has shape {g.shape}, expected {x.shape}"
                )
        else:
            g = self._fd_gradient(x)
        with self._lock:
            self._gradient_calls += 1
        return g

    def _fd_gradient(self, x: np.ndarray) -> np.ndarray:
        g = np.empty_like(x)
        for i in range(x.shape[0]):
            h = 1e-6 * (1.0 + abs(x[i]))
            xp = x.copy()
            xm = x.copy()
            xp[i] += h
            xm[i] -= h
            g[i] = (self.value(xp) - self.value(xm)) / (2.0 * h)
        return g
