"""Observable dictionaries and kernels for lifted regression.

A dictionary maps a state vector to a vector of observables; fitting code
applies it columnwise to snapshot matrices. Kernels evaluate inner products of
implicitly lifted vectors, so an n-snapshot problem never forms the lifted
matrix. The weighted polynomial dictionary is built so that
``theta_w(a) . theta_w(b) == (1 + a.b) ** degree`` exactly, which ties the
explicit and kernelized fits together and is tested as such.

Spec-string grammar (used by the CLI and model files):
``identity`` | ``poly:<degree>`` | ``rbf:<width>:<centers>`` for dictionaries,
``poly:<degree>`` | ``gaussian:<sigma>`` | ``laplacian:<sigma>`` for kernels.
"""

from __future__ import annotations

from math import comb, factorial

import numpy as np

from .errors import ConfigError, ShapeError


def _as_columns(z, input_dim: int) -> tuple[np.ndarray, bool]:
    """Coerce to (input_dim, m) columns; flag whether input was a single vector."""
    arr = np.asarray(z, dtype=float)
    single = arr.ndim == 1
    if single:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] != input_dim:
        raise ShapeError(
            f"expected vectors of dimension {input_dim}, got array of shape {np.shape(z)}"
        )
    return arr, single


class Dictionary:
    """Base class: a named, fixed-size family of scalar observables."""

    kind: str = ""

    def __init__(self, input_dim: int, size: int, names: tuple[str, ...]):
        if input_dim < 1:
            raise ConfigError(f"input_dim must be >= 1, got {input_dim}")
        self.input_dim = int(input_dim)
        self.size = int(size)
        self.names = tuple(names)

    def transform(self, z) -> np.ndarray:
        """Evaluate the dictionary on a vector or columnwise on a matrix."""
        cols, single = _as_columns(z, self.input_dim)
        out = self._transform_columns(cols)
        return out[:, 0] if single else out

    def _transform_columns(self, cols: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def spec_string(self) -> str:
        raise ConfigError(f"{self.kind} dictionaries have no spec-string form")

    def __repr__(self):
        return f"<{type(self).__name__} dim={self.input_dim} size={self.size}>"


class IdentityDictionary(Dictionary):
    """The state coordinates themselves (no constant)."""

    kind = "identity"

    def __init__(self, input_dim: int):
        names = tuple(f"x{i}" for i in range(1, input_dim + 1))
        super().__init__(input_dim, input_dim, names)

    def _transform_columns(self, cols):
        return cols.copy()

    def spec_string(self):
        return "identity"


def monomial_exponents(input_dim: int, degree: int) -> np.ndarray:
    """All exponent tuples with total degree <= degree.

    Ordered by total degree, then lexicographically descending within a
    degree with x1 ranked highest: for two variables and degree 2 that is
    1, x1, x2, x1^2, x1*x2, x2^2.
    """

    def grade(nvars, total):
        if nvars == 1:
            return [(total,)]
        out = []
        for first in range(total, -1, -1):
            out.extend((first,) + rest for rest in grade(nvars - 1, total - first))
        return out

    rows = []
    for total in range(degree + 1):
        rows.extend(grade(input_dim, total))
    return np.array(rows, dtype=int)


def _monomial_name(exponents) -> str:
    parts = []
    for i, e in enumerate(exponents, start=1):
        if e == 1:
            parts.append(f"x{i}")
        elif e > 1:
            parts.append(f"x{i}^{e}")
    return "*".join(parts) if parts else "1"


class PolynomialDictionary(Dictionary):
    """Monomials of total degree <= degree, optionally multinomially weighted.

    The weighted variant scales each monomial by the square root of its
    multinomial coefficient in the expansion of (1 + a.b)^degree, making the
    dictionary an explicit feature map for the polynomial kernel.
    """

    kind = "polynomial"

    def __init__(self, input_dim: int, degree: int, weighted: bool = False):
        if not isinstance(degree, (int, np.integer)) or degree < 1:
            raise ConfigError(f"polynomial degree must be an integer >= 1, got {degree}")
        exps = monomial_exponents(input_dim, degree)
        super().__init__(input_dim, len(exps), tuple(_monomial_name(e) for e in exps))
        self.degree = int(degree)
        self.weighted = bool(weighted)
        self.exponents = exps
        if weighted:
            weights = []
            for e in exps:
                rest = factorial(degree - int(e.sum()))
                for k in e:
                    rest *= factorial(int(k))
                weights.append(np.sqrt(factorial(degree) / rest))
            self.weights = np.array(weights)
        else:
            self.weights = np.ones(len(exps))

    def _transform_columns(self, cols):
        powers = cols[None, :, :] ** self.exponents[:, :, None]
        return self.weights[:, None] * powers.prod(axis=1)

    def spec_string(self):
        return f"{'wpoly' if self.weighted else 'poly'}:{self.degree}"


class RbfDictionary(Dictionary):
    """Gaussian bumps exp(-||z - c_j||^2 / width^2) at fixed centers."""

    kind = "rbf"

    def __init__(self, centers, width: float):
        centers = np.atleast_2d(np.asarray(centers, dtype=float))
        if centers.size == 0 or not np.all(np.isfinite(centers)):
            raise ShapeError("centers must be a non-empty finite (n_centers, dim) array")
        if not (np.isfinite(width) and width > 0):
            raise ConfigError(f"rbf width must be positive, got {width}")
        names = tuple(f"rbf{i}" for i in range(1, len(centers) + 1))
        super().__init__(centers.shape[1], len(centers), names)
        self.centers = centers
        self.width = float(width)

    def _transform_columns(self, cols):
        diff = cols[None, :, :] - self.centers[:, :, None]
        sq = np.einsum("kdm,kdm->km", diff, diff)
        return np.exp(-sq / self.width**2)

    def spec_string(self):
        return f"rbf:{self.width:.17g}:{self.size}"


class CustomDictionary(Dictionary):
    """A user-supplied list of (name, callable) scalar observables."""

    kind = "custom"

    def __init__(self, input_dim: int, functions):
        functions = list(functions)
        if not functions:
            raise ConfigError("custom dictionary needs at least one function")
        names, funcs = zip(*functions)
        super().__init__(input_dim, len(funcs), tuple(names))
        self.functions = tuple(funcs)

    def _transform_columns(self, cols):
        out = np.empty((self.size, cols.shape[1]))
        for j in range(cols.shape[1]):
            z = cols[:, j]
            out[:, j] = [f(z) for f in self.functions]
        return out


def strided_centers(snapshots, n_centers: int) -> np.ndarray:
    """Uniformly strided subsample of snapshot columns, as center rows."""
    x = np.asarray(snapshots, dtype=float)
    m = x.shape[1]
    if n_centers < 1 or n_centers > m:
        raise ConfigError(f"need 1 <= n_centers <= {m} snapshots, got {n_centers}")
    idx = np.round(np.linspace(0, m - 1, n_centers)).astype(int)
    return x[:, idx].T.copy()


# --------------------------------------------------------------------- kernels


class Kernel:
    """Base class: inner products of implicitly lifted vectors."""

    kind: str = ""

    def __call__(self, a, b) -> float:
        a = np.asarray(a, dtype=float).ravel()
        b = np.asarray(b, dtype=float).ravel()
        if a.shape != b.shape:
            raise ShapeError(f"kernel arguments differ in shape: {a.shape} vs {b.shape}")
        return float(self.gram(a[:, None], b[:, None])[0, 0])

    def gram(self, a_cols, b_cols) -> np.ndarray:
        """Matrix of k(a_i, b_j) over the columns of the two arguments."""
        raise NotImplementedError

    def spec_string(self) -> str:
        raise NotImplementedError


class PolynomialKernel(Kernel):
    """k(a, b) = (1 + a.b) ** degree."""

    kind = "polynomial"

    def __init__(self, degree: int):
        if not isinstance(degree, (int, np.integer)) or degree < 1:
            raise ConfigError(f"polynomial degree must be an integer >= 1, got {degree}")
        self.degree = int(degree)

    def gram(self, a_cols, b_cols):
        a = np.asarray(a_cols, dtype=float)
        b = np.asarray(b_cols, dtype=float)
        return (1.0 + a.T @ b) ** self.degree

    def spec_string(self):
        return f"poly:{self.degree}"

    def explicit_dictionary(self, input_dim: int) -> PolynomialDictionary:
        """The weighted monomial dictionary whose inner products equal this kernel."""
        return PolynomialDictionary(input_dim, self.degree, weighted=True)


def _sq_dists(a_cols, b_cols):
    a = np.asarray(a_cols, dtype=float)
    b = np.asarray(b_cols, dtype=float)
    sq = np.sum(a * a, axis=0)[:, None] + np.sum(b * b, axis=0)[None, :] - 2.0 * (a.T @ b)
    return np.maximum(sq, 0.0)


class GaussianKernel(Kernel):
    """k(a, b) = exp(-||a - b||^2 / sigma^2)."""

    kind = "gaussian"

    def __init__(self, sigma: float):
        if not (np.isfinite(sigma) and sigma > 0):
            raise ConfigError(f"gaussian kernel width must be positive, got {sigma}")
        self.sigma = float(sigma)

    def gram(self, a_cols, b_cols):
        return np.exp(-_sq_dists(a_cols, b_cols) / self.sigma**2)

    def spec_string(self):
        return f"gaussian:{self.sigma:.17g}"


class LaplacianKernel(Kernel):
    """k(a, b) = exp(-||a - b|| / sigma^2), the unsquared-distance variant."""

    kind = "laplacian"

    def __init__(self, sigma: float):
        if not (np.isfinite(sigma) and sigma > 0):
            raise ConfigError(f"laplacian kernel width must be positive, got {sigma}")
        self.sigma = float(sigma)

    def gram(self, a_cols, b_cols):
        return np.exp(-np.sqrt(_sq_dists(a_cols, b_cols)) / self.sigma**2)

    def spec_string(self):
        return f"laplacian:{self.sigma:.17g}"


# --------------------------------------------------------------- spec parsing


def _split_spec(spec: str, arity: int, usage: str) -> list[str]:
    parts = str(spec).strip().split(":")
    if len(parts) != arity:
        raise ConfigError(f"malformed spec '{spec}' (expected {usage})")
    return parts


def _parse_number(text: str, spec: str, integer: bool = False):
    try:
        return int(text) if integer else float(text)
    except ValueError:
        kind = "integer" if integer else "number"
        raise ConfigError(f"malformed spec '{spec}': '{text}' is not a {kind}") from None


def parse_kernel(spec: str) -> Kernel:
    """Build a kernel from its spec string."""
    head = str(spec).strip().split(":")[0]
    if head == "poly":
        (_, deg) = _split_spec(spec, 2, "poly:<degree>")
        return PolynomialKernel(_parse_number(deg, spec, integer=True))
    if head == "gaussian":
        (_, sig) = _split_spec(spec, 2, "gaussian:<sigma>")
        return GaussianKernel(_parse_number(sig, spec))
    if head == "laplacian":
        (_, sig) = _split_spec(spec, 2, "laplacian:<sigma>")
        return LaplacianKernel(_parse_number(sig, spec))
    raise ConfigError(f"unknown kernel kind '{head}' in spec '{spec}'")


def build_dictionary(spec: str, input_dim: int, snapshots=None) -> Dictionary:
    """Build a dictionary from its spec string, binding dimensions (and, for
    rbf, centers subsampled from the training snapshots)."""
    head = str(spec).strip().split(":")[0]
    if head == "identity":
        _split_spec(spec, 1, "identity")
        return IdentityDictionary(input_dim)
    if head in ("poly", "wpoly"):
        (_, deg) = _split_spec(spec, 2, f"{head}:<degree>")
        degree = _parse_number(deg, spec, integer=True)
        return PolynomialDictionary(input_dim, degree, weighted=(head == "wpoly"))
    if head == "rbf":
        (_, width, count) = _split_spec(spec, 3, "rbf:<width>:<centers>")
        if snapshots is None:
            raise ConfigError("rbf dictionary needs training snapshots to pick centers")
        centers = strided_centers(snapshots, _parse_number(count, spec, integer=True))
        return RbfDictionary(centers, _parse_number(width, spec))
    raise ConfigError(f"unknown dictionary kind '{head}' in spec '{spec}'")
