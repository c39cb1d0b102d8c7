"""Benchmark objective suite, maximization convention, with analytic gradients.

Every classic minimization test function is negated once, here, so the
rest of the package only ever maximizes.  Functions whose values span
several orders of magnitude (Hartmann, Goldstein-Price) are wrapped in a
log so that relative tolerances stay meaningful; the wrapped inner value
is provably positive on the listed boxes and asserted at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .objective import ObjectiveHandle

_TWO_PI = 2.0 * math.pi

# Frozen optima (refined to full double precision with a high-precision
# root solve on the stationarity conditions; re-verified by the suite's
# refinement tests).
_STYBLINSKI_X = -2.903534027771177
_STYBLINSKI_PER_DIM = -39.166165703771415
_SCHWEFEL_X = 420.968746359982
_SCHWEFEL_PEAK = 418.9828872724337  # max of x*sin(sqrt(x)), also the offset
_CAMEL_ARGMAX = (0.08984201310031806, -0.7126564030207396)
_CAMEL_MAX = 1.0316284534898774
_HART3_ARGMAX = (0.11458887665506896, 0.5556488946169301, 0.8525469846866774)
_HART3_MAX = 1.3513870764503222  # log(3.8627797873326627)
_HART6_ARGMAX = (
    0.20168951100670542,
    0.15001069182345797,
    0.476873974221897,
    0.27533243049405607,
    0.31165161660011324,
    0.6573005340656203,
)
_HART6_MAX = 1.2006777851323595  # log(3.3223680114155148)
_GP_MAX = -math.log(3.0)
_BRANIN_MAX = -5.0 / (4.0 * math.pi)
_TWO_BUMP_ARGMAX = (-1.4997775822016688, 0.0)
_TWO_BUMP_MAX = 1.000074095289805
_TWO_BUMP_C1 = np.array([-1.5, 0.0])
_TWO_BUMP_C2 = np.array([1.5, 0.0])


@dataclass
class BenchmarkSpec:
    """One benchmark objective: callable pair, box, and known optimum."""

    name: str
    dimension: int
    lower: np.ndarray
    upper: np.ndarray
    known_max: float
    known_argmax: list[np.ndarray]
    oscillatory: bool
    log_transformed: bool
    value_fn: Callable[[np.ndarray], float]
    grad_fn: Callable[[np.ndarray], np.ndarray]
    outside_box_evals: int = field(default=0, repr=False)


def evaluate(spec: BenchmarkSpec, x) -> float:
    """Value of the (negated) benchmark at x; out-of-box points are counted."""
    x = np.asarray(x, dtype=float)
    if np.any(x < spec.lower) or np.any(x > spec.upper):
        spec.outside_box_evals += 1
    return float(spec.value_fn(x))


def gradient(spec: BenchmarkSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.asarray(spec.grad_fn(x), dtype=float)


def fd_gradient(spec: BenchmarkSpec, x, h: Optional[float] = None) -> np.ndarray:
    """Central-difference gradient oracle for validating ``gradient``."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.shape[0]):
        hi = h if h is not None else 1e-6 * (1.0 + abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += hi
        xm[i] -= hi
        g[i] = (spec.value_fn(xp) - spec.value_fn(xm)) / (2.0 * hi)
    return g


def make_objective(spec: BenchmarkSpec) -> ObjectiveHandle:
    """Counting handle over a spec; one handle per trial keeps counts exact."""
    return ObjectiveHandle(
        value_fn=lambda x: evaluate(spec, x),
        gradient_fn=lambda x: gradient(spec, x),
        dimension=spec.dimension,
    )


# ---------------------------------------------------------------------------
# function bodies (phi = negated standard form)

def _sphere(x):
    return -float(np.sum(x * x))


def _sphere_grad(x):
    return -2.0 * x


def _rosenbrock(x):
    return -float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def _rosenbrock_grad(x):
    g = np.zeros_like(x)
    g[:-1] = 400.0 * x[:-1] * (x[1:] - x[:-1] ** 2) + 2.0 * (1.0 - x[:-1])
    g[1:] += -200.0 * (x[1:] - x[:-1] ** 2)
    return g


def _camel(x):
    x1, x2 = x
    return -(
        (4.0 - 2.1 * x1 ** 2 + x1 ** 4 / 3.0) * x1 ** 2
        + x1 * x2
        + (-4.0 + 4.0 * x2 ** 2) * x2 ** 2
    )


def _camel_grad(x):
    x1, x2 = x
    return np.array(
        [
            -(8.0 * x1 - 8.4 * x1 ** 3 + 2.0 * x1 ** 5 + x2),
            -(x1 - 8.0 * x2 + 16.0 * x2 ** 3),
        ]
    )


_BRANIN_B = 5.1 / (4.0 * math.pi ** 2)
_BRANIN_C = 5.0 / math.pi
_BRANIN_T = 1.0 / (8.0 * math.pi)


def _branin(x):
    x1, x2 = x
    inner = x2 - _BRANIN_B * x1 ** 2 + _BRANIN_C * x1 - 6.0
    return -(inner ** 2 + 10.0 * (1.0 - _BRANIN_T) * math.cos(x1) + 10.0)


def _branin_grad(x):
    x1, x2 = x
    inner = x2 - _BRANIN_B * x1 ** 2 + _BRANIN_C * x1 - 6.0
    return np.array(
        [
            -(2.0 * inner * (-2.0 * _BRANIN_B * x1 + _BRANIN_C)
              - 10.0 * (1.0 - _BRANIN_T) * math.sin(x1)),
            -2.0 * inner,
        ]
    )


_HART3_A = np.array([[3.0, 10.0, 30.0], [0.1, 10.0, 35.0], [3.0, 10.0, 30.0], [0.1, 10.0, 35.0]])
_HART3_P = 1e-4 * np.array(
    [[3689, 1170, 2673], [4699, 4387, 7470], [1091, 8732, 5547], [381, 5743, 8828]]
)
_HART6_A = np.array(
    [
        [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
        [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
        [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
        [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
    ]
)
_HART6_P = 1e-4 * np.array(
    [
        [1312, 1696, 5569, 124, 8283, 5886],
        [2329, 4135, 8307, 3736, 1004, 9991],
        [2348, 1451, 3522, 2883, 3047, 6650],
        [4047, 8828, 8732, 5743, 1091, 381],
    ]
)
_HART_C = np.array([1.0, 1.2, 3.0, 3.2])


def _hartmann_sum(x, a, p):
    d = np.sum(a * (x[None, :] - p) ** 2, axis=1)
    return _HART_C * np.exp(-d)


def _log_hartmann(x, a, p):
    s = float(np.sum(_hartmann_sum(x, a, p)))
    if s <= 0.0:
        raise ValueError("log-transformed objective undefined: nonpositive inner value")
    return math.log(s)


def _log_hartmann_grad(x, a, p):
    terms = _hartmann_sum(x, a, p)
    s = float(np.sum(terms))
    ds = np.sum(terms[:, None] * (-2.0 * a * (x[None, :] - p)), axis=0)
    return ds / s


def _goldstein_price_parts(x):
    x1, x2 = x
    u = x1 + x2 + 1.0
    pa = 19.0 - 14.0 * x1 + 3.0 * x1 ** 2 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2 ** 2
    a = 1.0 + u ** 2 * pa
    w = 2.0 * x1 - 3.0 * x2
    qb = 18.0 - 32.0 * x1 + 12.0 * x1 ** 2 + 48.0 * x2 - 36.0 * x1 * x2 + 27.0 * x2 ** 2
    b = 30.0 + w ** 2 * qb
    return u, pa, a, w, qb, b


def _log_goldstein_price(x):
    *_, a, _, _, b = _goldstein_price_parts(x)
    inner = a * b
    if inner <= 0.0:
        raise ValueError("log-transformed objective undefined: nonpositive inner value")
    return -math.log(inner)


def _log_goldstein_price_grad(x):
    x1, x2 = x
    u, pa, a, w, qb, b = _goldstein_price_parts(x)
    dpa = -14.0 + 6.0 * x1 + 6.0 * x2  # equal for both coordinates
    da = 2.0 * u * pa + u ** 2 * dpa
    db1 = 4.0 * w * qb + w ** 2 * (-32.0 + 24.0 * x1 - 36.0 * x2)
    db2 = -6.0 * w * qb + w ** 2 * (48.0 - 36.0 * x1 + 54.0 * x2)
    gp = a * b
    return np.array([-(b * da + a * db1) / gp, -(b * da + a * db2) / gp])


def _styblinski_tang(x):
    return -0.5 * float(np.sum(x ** 4 - 16.0 * x ** 2 + 5.0 * x))


def _styblinski_tang_grad(x):
    return -0.5 * (4.0 * x ** 3 - 32.0 * x + 5.0)


def _rastrigin(x):
    return -(10.0 * x.shape[0] + float(np.sum(x * x - 10.0 * np.cos(_TWO_PI * x))))


def _rastrigin_grad(x):
    return -(2.0 * x + 10.0 * _TWO_PI * np.sin(_TWO_PI * x))


def _ackley(x):
    d = x.shape[0]
    r = math.sqrt(float(np.sum(x * x)) / d)
    m = float(np.mean(np.cos(_TWO_PI * x)))
    return 20.0 * math.exp(-0.2 * r) + math.exp(m) - 20.0 - math.e


def _ackley_grad(x):
    d = x.shape[0]
    r = math.sqrt(float(np.sum(x * x)) / d)
    m = float(np.mean(np.cos(_TWO_PI * x)))
    radial = 0.0 if r == 0.0 else -4.0 * math.exp(-0.2 * r) / (d * r)
    return radial * x - math.exp(m) * _TWO_PI * np.sin(_TWO_PI * x) / d


def _griewank(x):
    scale = np.sqrt(np.arange(1.0, x.shape[0] + 1.0))
    return -(float(np.sum(x * x)) / 4000.0 - float(np.prod(np.cos(x / scale))) + 1.0)


def _griewank_grad(x):
    d = x.shape[0]
    scale = np.sqrt(np.arange(1.0, d + 1.0))
    cosines = np.cos(x / scale)
    g = np.empty(d)
    for i in range(d):  # exact leave-one-out products; D is small
        others = float(np.prod(np.delete(cosines, i)))
        g[i] = x[i] / 2000.0 + math.sin(x[i] / scale[i]) / scale[i] * others
    return -g


def _levy_w(x):
    return 1.0 + (x - 1.0) / 4.0


def _levy(x):
    w = _levy_w(x)
    head = math.sin(math.pi * w[0]) ** 2
    mid = float(np.sum((w[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(math.pi * w[:-1] + 1.0) ** 2)))
    tail = (w[-1] - 1.0) ** 2 * (1.0 + math.sin(_TWO_PI * w[-1]) ** 2)
    return -(head + mid + tail)


def _levy_grad(x):
    w = _levy_w(x)
    g = np.zeros_like(x)
    g[0] += 2.0 * math.sin(math.pi * w[0]) * math.cos(math.pi * w[0]) * math.pi
    sw = np.sin(math.pi * w[:-1] + 1.0)
    cw = np.cos(math.pi * w[:-1] + 1.0)
    g[:-1] += 2.0 * (w[:-1] - 1.0) * (1.0 + 10.0 * sw ** 2) + (
        w[:-1] - 1.0
    ) ** 2 * 20.0 * sw * cw * math.pi
    g[-1] += 2.0 * (w[-1] - 1.0) * (1.0 + math.sin(_TWO_PI * w[-1]) ** 2) + (
        w[-1] - 1.0
    ) ** 2 * 2.0 * math.sin(_TWO_PI * w[-1]) * math.cos(_TWO_PI * w[-1]) * _TWO_PI
    return -g / 4.0  # dw/dx = 1/4


def _schwefel(x):
    u = np.sqrt(np.abs(x))
    return -float(np.sum(_SCHWEFEL_PEAK - x * np.sin(u)))


def _schwefel_grad(x):
    u = np.sqrt(np.abs(x))  # same closed form on both sides of 0, and 0 at 0
    return np.sin(u) + 0.5 * u * np.cos(u)


def _two_bump(x):
    d1 = x - _TWO_BUMP_C1
    d2 = x - _TWO_BUMP_C2
    return float(np.exp(-d1 @ d1) + 0.6 * np.exp(-d2 @ d2))


def _two_bump_grad(x):
    d1 = x - _TWO_BUMP_C1
    d2 = x - _TWO_BUMP_C2
    return -2.0 * d1 * float(np.exp(-d1 @ d1)) - 1.2 * d2 * float(np.exp(-d2 @ d2))


# ---------------------------------------------------------------------------
# suite assembly

def _box(dim, lo, hi):
    return np.full(dim, float(lo)), np.full(dim, float(hi))


def _spec(name, dim, lo, hi, known_max, argmax, value_fn, grad_fn,
          oscillatory=False, log_transformed=False):
    lower, upper = (lo, hi) if isinstance(lo, np.ndarray) else _box(dim, lo, hi)
    return BenchmarkSpec(
        name=name,
        dimension=dim,
        lower=lower,
        upper=upper,
        known_max=known_max,
        known_argmax=[np.asarray(a, dtype=float) for a in argmax],
        oscillatory=oscillatory,
        log_transformed=log_transformed,
        value_fn=value_fn,
        grad_fn=grad_fn,
    )


def suite() -> list[BenchmarkSpec]:
    """Fresh spec instances for the full suite (smooth, oscillatory, synthetic)."""
    specs = []
    for d in (2, 10, 50):
        specs.append(_spec(f"sphere-{d}", d, -5.12, 5.12, 0.0, [np.zeros(d)],
                           _sphere, _sphere_grad))
    for d in (2, 10):
        specs.append(_spec(f"rosenbrock-{d}", d, -5.0, 10.0, 0.0, [np.ones(d)],
                           _rosenbrock, _rosenbrock_grad))
    specs.append(
        _spec("camel", 2, np.array([-3.0, -2.0]), np.array([3.0, 2.0]), _CAMEL_MAX,
              [np.array(_CAMEL_ARGMAX), -np.array(_CAMEL_ARGMAX)], _camel, _camel_grad)
    )
    specs.append(
        _spec("branin", 2, np.array([-5.0, 0.0]), np.array([10.0, 15.0]), _BRANIN_MAX,
              [np.array([-math.pi, 12.275]), np.array([math.pi, 2.275]),
               np.array([3.0 * math.pi, 2.475])], _branin, _branin_grad)
    )
    specs.append(
        _spec("log-hartmann-3", 3, 0.0, 1.0, _HART3_MAX, [np.array(_HART3_ARGMAX)],
              lambda x: _log_hartmann(x, _HART3_A, _HART3_P),
              lambda x: _log_hartmann_grad(x, _HART3_A, _HART3_P),
              log_transformed=True)
    )
    specs.append(
        _spec("log-hartmann-6", 6, 0.0, 1.0, _HART6_MAX, [np.array(_HART6_ARGMAX)],
              lambda x: _log_hartmann(x, _HART6_A, _HART6_P),
              lambda x: _log_hartmann_grad(x, _HART6_A, _HART6_P),
              log_transformed=True)
    )
    specs.append(
        _spec("log-goldstein-price", 2, -2.0, 2.0, _GP_MAX, [np.array([0.0, -1.0])],
              _log_goldstein_price, _log_goldstein_price_grad, log_transformed=True)
    )
    specs.append(
        _spec("styblinski-tang-10", 10, -5.0, 5.0, -10.0 * _STYBLINSKI_PER_DIM,
              [np.full(10, _STYBLINSKI_X)], _styblinski_tang, _styblinski_tang_grad)
    )
    for d in (2, 12, 30):
        specs.append(_spec(f"rastrigin-{d}", d, -5.12, 5.12, 0.0, [np.zeros(d)],
                           _rastrigin, _rastrigin_grad, oscillatory=True))
    for d in (2, 12):
        # optimum sits on a conical (non-differentiable) point: no argmax listed
        specs.append(_spec(f"ackley-{d}", d, -32.768, 32.768, 0.0, [],
                           _ackley, _ackley_grad, oscillatory=True))
    specs.append(_spec("griewank-12", 12, -600.0, 600.0, 0.0, [np.zeros(12)],
                       _griewank, _griewank_grad, oscillatory=True))
    specs.append(_spec("levy-10", 10, -10.0, 10.0, 0.0, [np.ones(10)],
                       _levy, _levy_grad, oscillatory=True))
    specs.append(_spec("schwefel-10", 10, -500.0, 500.0, 0.0,
                       [np.full(10, _SCHWEFEL_X)], _schwefel, _schwefel_grad,
                       oscillatory=True))
    specs.append(_spec("two-bump", 2, -4.0, 4.0, _TWO_BUMP_MAX,
                       [np.array(_TWO_BUMP_ARGMAX)], _two_bump, _two_bump_grad))
    return specs


def names() -> list[str]:
    return [s.name for s in suite()]


def get(name: str) -> BenchmarkSpec:
    """Fresh spec instance by registry name; raises KeyError when unknown."""
    for s in suite():
        if s.name == name:
            return s
    raise KeyError(f"unknown benchmark function {name!r}; see names()")
