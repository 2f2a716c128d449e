"""CEC 2005 style landscapes (F1, F9, F12, F13, F14) and the random
translate/scale/flip wrapper used while measuring fitness.

Bias terms are left out, so every function has optimum value 0 and the
returned value is the error directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

F1, F9, F12, F13, F14 = 1, 9, 12, 13, 14

DEFAULT_F12_SEED = 2005


def _kernel_eval(fid: int, x, a=None, b=None, alpha=None) -> float:
    from ._stack import LandRef
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.ndim != 1 or x.size < 1:
        raise ValueError("expected a non-empty point")
    d = x.size
    z = np.zeros((1, 1))
    ref = LandRef(fid, z if a is None else a, z if b is None else b,
                  np.zeros(1) if alpha is None else alpha,
                  np.zeros(d), np.ones(d), np.ones(d), np.full(d, -np.inf), np.full(d, np.inf))
    return float(ref.evaluate_many(x)[0])


def _vec(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (dim,):
        raise ValueError(f"expected a point of dimension {dim}, got shape {x.shape}")
    return x


def sphere(x) -> float:
    return _kernel_eval(F1, x)


def rastrigin(x) -> float:
    return _kernel_eval(F9, x)


def schwefel_2_13(x, a, b, alpha) -> float:
    x = np.asarray(x, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    if a.shape != (x.size, x.size) or b.shape != a.shape or alpha.shape != x.shape:
        raise ValueError("instance data does not match the point dimension")
    return _kernel_eval(F12, x, a, b, alpha)


def griewank_rosenbrock(x) -> float:
    return _kernel_eval(F13, x)


def expanded_schaffer_f6(x) -> float:
    return _kernel_eval(F14, x)


def schwefel_instance(dim: int, seed: int = DEFAULT_F12_SEED):
    """Instance data (a, b, alpha) for F12, reproducible from ``seed``."""
    rng = np.random.default_rng([seed, dim])
    a = rng.integers(-100, 101, size=(dim, dim)).astype(np.float64)
    b = rng.integers(-100, 101, size=(dim, dim)).astype(np.float64)
    alpha = rng.uniform(-np.pi, np.pi, size=dim)
    return a, b, alpha


def _frozen(x) -> np.ndarray:
    x = np.array(x, dtype=np.float64)
    x.setflags(write=False)
    return x


_SPECS = {
    # name: (fid, lower, upper)
    "f1": (F1, -100.0, 100.0),
    "f9": (F9, -5.0, 5.0),
    "f12": (F12, -np.pi, np.pi),
    "f13": (F13, -3.0, 1.0),
    "f14": (F14, -100.0, 100.0),
}

LANDSCAPE_NAMES = tuple(_SPECS)


@dataclass(frozen=True, eq=False)
class Landscape:
    """A box-bounded minimisation problem with a known optimum."""

    name: str
    dim: int
    fid: int
    lower: np.ndarray
    upper: np.ndarray
    optimum_location: np.ndarray
    optimum_value: float = 0.0
    # F12 instance data; 1x1 zero placeholders for the other functions
    a: np.ndarray = field(default_factory=lambda: _frozen(np.zeros((1, 1))))
    b: np.ndarray = field(default_factory=lambda: _frozen(np.zeros((1, 1))))
    alpha: np.ndarray = field(default_factory=lambda: _frozen(np.zeros(1)))

    def evaluate(self, x) -> float:
        x = _vec(x, self.dim)
        return float(self.evaluate_many(x)[0])

    def evaluate_many(self, xs) -> np.ndarray:
        """Values at each row of an (n, D) array."""
        xs = np.asarray(xs, dtype=np.float64)
        if xs.shape[-1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}")
        return self._ref().evaluate_many(xs)

    def _ref(self):
        ref = self.__dict__.get("_land_ref")
        if ref is None:
            ref = land_ref(self, TransformSpec.identity(self.dim))
            self.__dict__["_land_ref"] = ref
        return ref

    def error(self, x) -> float:
        return self.evaluate(x) - self.optimum_value

    def in_bounds(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    __call__ = evaluate


def make_landscape(name: str, dim: int, f12_seed: int = DEFAULT_F12_SEED) -> Landscape:
    """Build one of ``f1``, ``f9``, ``f12``, ``f13``, ``f14`` at dimension ``dim``."""
    try:
        fid, lo, hi = _SPECS[name]
    except KeyError:
        raise KeyError(f"unknown landscape {name!r}; valid names: {', '.join(LANDSCAPE_NAMES)}") from None
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    extra = {}
    optimum = np.zeros(dim)
    if fid == F12:
        a, b, alpha = schwefel_instance(dim, f12_seed)
        extra = dict(a=_frozen(a), b=_frozen(b), alpha=_frozen(alpha))
        optimum = alpha
    return Landscape(
        name=name, dim=dim, fid=fid,
        lower=_frozen(np.full(dim, lo)), upper=_frozen(np.full(dim, hi)),
        optimum_location=_frozen(optimum), **extra,
    )


@dataclass(frozen=True, eq=False)
class TransformSpec:
    """Per-axis translation, scaling and flip: phi(x) = flip * (x - t) / s."""

    translation: np.ndarray
    scale: np.ndarray
    flip: np.ndarray

    def __post_init__(self):
        t, s, f = (_frozen(v) for v in (self.translation, self.scale, self.flip))
        if not (t.shape == s.shape == f.shape and t.ndim == 1):
            raise ValueError("transform components must be equal-length vectors")
        if np.any(s <= 0):
            raise ValueError("scales must be positive")
        if not np.all(np.abs(f) == 1):
            raise ValueError("flips must be +1 or -1")
        object.__setattr__(self, "translation", t)
        object.__setattr__(self, "scale", s)
        object.__setattr__(self, "flip", f)

    @classmethod
    def identity(cls, dim: int) -> "TransformSpec":
        return cls(np.zeros(dim), np.ones(dim), np.ones(dim))

    def phi(self, x) -> np.ndarray:
        return self.flip * (np.asarray(x, dtype=np.float64) - self.translation) / self.scale


def sample_transform(rng: np.random.Generator, landscape: Landscape) -> TransformSpec:
    """Random translation (up to half the half-range), scaling in [0.5, 2]
    and fair axis flips."""
    d = landscape.dim
    width = landscape.upper - landscape.lower
    t = rng.uniform(-0.25, 0.25, size=d) * width
    s = rng.uniform(0.5, 2.0, size=d)
    f = np.where(rng.random(d) < 0.5, -1.0, 1.0)
    return TransformSpec(t, s, f)


@dataclass(frozen=True, eq=False)
class TransformedLandscape:
    """``base`` seen through ``spec``; bounds and dimension are unchanged."""

    base: Landscape
    spec: TransformSpec

    def __post_init__(self):
        if self.spec.translation.shape != (self.base.dim,):
            raise ValueError("transform dimension does not match the landscape")

    @property
    def name(self):
        return self.base.name

    @property
    def dim(self):
        return self.base.dim

    @property
    def lower(self):
        return self.base.lower

    @property
    def upper(self):
        return self.base.upper

    @property
    def optimum_value(self):
        return self.base.optimum_value

    @property
    def optimum_location(self) -> np.ndarray:
        s = self.spec
        return s.translation + s.flip * s.scale * self.base.optimum_location

    def evaluate(self, x) -> float:
        return transformed_evaluate(self, x)

    def evaluate_many(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        if xs.shape[-1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}")
        return self._ref().evaluate_many(xs)

    def _ref(self):
        ref = self.__dict__.get("_land_ref")
        if ref is None:
            ref = land_ref(self.base, self.spec)
            self.__dict__["_land_ref"] = ref
        return ref

    def in_bounds(self, x) -> bool:
        return self.base.in_bounds(x)

    __call__ = evaluate


def transformed_evaluate(tl: TransformedLandscape, x) -> float:
    x = _vec(x, tl.dim)
    return float(tl._ref().evaluate_many(x)[0])


def land_ref(base: Landscape, spec: TransformSpec):
    """Compiled-core handle on ``base`` seen through ``spec``."""
    from ._stack import LandRef
    return LandRef(base.fid, base.a, base.b, base.alpha, spec.translation, spec.scale, spec.flip,
                   base.lower, base.upper)
