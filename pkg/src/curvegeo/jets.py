"""Truncated bivariate polynomials (jets), recentring, and Sylvester resultants.

A jet of degree k stores the coefficients c_ij of

    f(x, y) = sum_{0 <= j <= i <= k} c_ij x^(i-j) y^j,

so the pair (i, j) has total degree i and j counts powers of y.  The dense
triangular layout maps (i, j) -> i(i+1)/2 + j.  Partial derivatives at a
point relate to coefficients of the recentred jet by
d^i f / dx^(i-j) dy^j = (i-j)! j! c_ij.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "Jet",
    "JetPoint",
    "UniPoly",
    "jet_derive",
    "jet_eval",
    "monge_taylor",
    "sylvester_matrix",
    "sylvester_resultant",
    "load_germ",
    "parse_germ",
    "germ_to_dict",
    "save_germ",
]


def tri_size(k: int) -> int:
    return (k + 1) * (k + 2) // 2


def tri_index(i: int, j: int) -> int:
    return i * (i + 1) // 2 + j


class Jet:
    """Immutable truncated bivariate polynomial in the c_ij convention."""

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs):
        if degree < 0:
            raise ValueError("jet degree must be nonnegative")
        arr = np.array(coeffs, dtype=float)
        if arr.shape != (tri_size(degree),):
            raise ValueError(
                f"expected {tri_size(degree)} coefficients for degree {degree}, "
                f"got {arr.shape}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, *args):
        raise AttributeError("Jet is immutable")

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, degree: int) -> "Jet":
        return cls(degree, np.zeros(tri_size(degree)))

    @classmethod
    def from_terms(cls, terms: dict, degree: int | None = None) -> "Jet":
        """Build from a {(i, j): value} mapping; unspecified entries are 0."""
        if degree is None:
            degree = max((i for i, _ in terms), default=0)
        arr = np.zeros(tri_size(degree))
        for (i, j), v in terms.items():
            if not (0 <= j <= i <= degree):
                raise ValueError(f"term ({i},{j}) out of range for degree {degree}")
            arr[tri_index(i, j)] = v
        return cls(degree, arr)

    # -- basic access ------------------------------------------------------

    def coeff(self, i: int, j: int) -> float:
        if not (0 <= j <= i <= self.degree):
            return 0.0
        return float(self.coeffs[tri_index(i, j)])

    def terms(self):
        """Yield (i, j, value) for all nonzero coefficients."""
        idx = 0
        for i in range(self.degree + 1):
            for j in range(i + 1):
                v = self.coeffs[idx]
                idx += 1
                if v != 0.0:
                    yield i, j, float(v)

    def partial(self, ox: int, oy: int, origin_value: bool = False) -> float:
        """d^(ox+oy) f / dx^ox dy^oy evaluated at the origin."""
        return math.factorial(ox) * math.factorial(oy) * self.coeff(ox + oy, oy)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Jet") -> "Jet":
        k = max(self.degree, other.degree)
        a = np.zeros(tri_size(k))
        a[: tri_size(self.degree)] += self.coeffs
        a[: tri_size(other.degree)] += other.coeffs
        return Jet(k, a)

    def __sub__(self, other: "Jet") -> "Jet":
        return self + (other * -1.0)

    def __mul__(self, scalar: float) -> "Jet":
        return Jet(self.degree, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def product(self, other: "Jet", max_degree: int | None = None) -> "Jet":
        """Polynomial product, optionally truncated at max_degree."""
        k = self.degree + other.degree
        if max_degree is not None:
            k = min(k, max_degree)
        arr = np.zeros(tri_size(k))
        for i1, j1, c1 in self.terms():
            for i2, j2, c2 in other.terms():
                i, j = i1 + i2, j1 + j2
                if i <= k:
                    arr[tri_index(i, j)] += c1 * c2
        return Jet(k, arr)

    def truncate(self, k: int) -> "Jet":
        if k >= self.degree:
            a = np.zeros(tri_size(k))
            a[: tri_size(self.degree)] = self.coeffs
            return Jet(k, a)
        return Jet(k, self.coeffs[: tri_size(k)].copy())

    def compose_linear(self, m00: float, m01: float, m10: float, m11: float) -> "Jet":
        """Exact substitution x <- m00 x + m01 y, y <- m10 x + m11 y."""
        arr = np.zeros(tri_size(self.degree))
        for i, j, c in self.terms():
            px, py = i - j, j
            # (m00 x + m01 y)^px expanded over x-power a
            xa = [math.comb(px, a) * m00**a * m01 ** (px - a) for a in range(px + 1)]
            yb = [math.comb(py, b) * m10**b * m11 ** (py - b) for b in range(py + 1)]
            for a, ca in enumerate(xa):
                if ca == 0.0:
                    continue
                for b, cb in enumerate(yb):
                    if cb == 0.0:
                        continue
                    # result term x^(a+b) y^(i-a-b), total degree i
                    arr[tri_index(i, i - (a + b))] += c * ca * cb
        return Jet(self.degree, arr)

    # -- evaluation ----------------------------------------------------------

    def eval(self, x, y):
        return jet_eval(self, (x, y))

    def gradient(self) -> tuple["Jet", "Jet"]:
        return jet_derive(self, "x"), jet_derive(self, "y")

    def __repr__(self):
        parts = [f"{c:+g}*x^{i - j}y^{j}" for i, j, c in self.terms()]
        return f"Jet(deg={self.degree}: {' '.join(parts) or '0'})"

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        k = max(self.degree, other.degree)
        return np.array_equal(
            self.truncate(k).coeffs, other.truncate(k).coeffs
        )

    def __hash__(self):
        return hash((self.degree, self.coeffs.tobytes()))


@dataclass(frozen=True)
class JetPoint:
    """Image of a point under the degree-k recentring map: the k-jet at base."""

    jet: Jet
    base: tuple[float, float]

    def coeff(self, i: int, j: int) -> float:
        return self.jet.coeff(i, j)

    @property
    def degree(self) -> int:
        return self.jet.degree


def jet_derive(f: Jet, axis: str) -> Jet:
    """Formal partial derivative d/dx or d/dy; degree drops by one."""
    if f.degree == 0:
        raise ValueError("cannot differentiate constant jet below degree 0")
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    arr = np.zeros(tri_size(f.degree - 1))
    for i, j, c in f.terms():
        if axis == "x":
            if i - j >= 1:
                arr[tri_index(i - 1, j)] += c * (i - j)
        else:
            if j >= 1:
                arr[tri_index(i - 1, j - 1)] += c * j
    return Jet(f.degree - 1, arr)


def jet_eval(f: Jet, p):
    """Evaluate f at p = (x, y); scalars or numpy arrays.

    Horner over the triangular array: inner Horner in x per y-power,
    outer Horner in y.
    """
    x = np.asarray(p[0], dtype=float)
    y = np.asarray(p[1], dtype=float)
    k = f.degree
    out = np.zeros(np.broadcast(x, y).shape)
    for j in range(k, -1, -1):
        # P_j(x) = sum_m c_{m+j, j} x^m, Horner in x
        pj = np.zeros_like(out)
        for m in range(k - j, -1, -1):
            pj = pj * x + f.coeffs[tri_index(m + j, j)]
        out = out * y + pj
    if out.shape == ():
        return float(out)
    return out


def monge_taylor(f: Jet, p, k: int) -> JetPoint:
    """Recentre f at p and truncate to degree k (the k-jet of f at p)."""
    if k > f.degree:
        raise ValueError("truncation order exceeds stored degree")
    px, py = float(p[0]), float(p[1])
    if not (math.isfinite(px) and math.isfinite(py)):
        raise ValueError("base point must be finite")
    arr = np.zeros(tri_size(f.degree))
    for i, j, c in f.terms():
        dx, dy = i - j, j
        # (px + u)^dx (py + v)^dy expanded in (u, v)
        for a in range(dx + 1):
            ca = math.comb(dx, a) * px ** (dx - a)
            if ca == 0.0:
                continue
            for b in range(dy + 1):
                cb = math.comb(dy, b) * py ** (dy - b)
                if cb == 0.0:
                    continue
                arr[tri_index(a + b, b)] += c * ca * cb
    jet = Jet(f.degree, arr).truncate(k)
    return JetPoint(jet=jet, base=(px, py))


class UniPoly:
    """Univariate real polynomial with a declared (formal) degree.

    Coefficients are stored in ascending order; trailing zeros are kept so
    resultants of coefficient families use the generic formal degree.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        arr = np.array(coeffs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("UniPoly needs a nonempty 1-d coefficient list")
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, *args):
        raise AttributeError("UniPoly is immutable")

    @property
    def degree(self) -> int:
        """Formal degree (leading zeros retained)."""
        return len(self.coeffs) - 1

    def normalized(self) -> "UniPoly":
        """Strip leading (high-order) zero coefficients."""
        nz = np.nonzero(self.coeffs)[0]
        if nz.size == 0:
            return UniPoly([0.0])
        return UniPoly(self.coeffs[: nz[-1] + 1])

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        for c in self.coeffs[::-1]:
            out = out * t + c
        if out.shape == ():
            return float(out)
        return out

    def derive(self) -> "UniPoly":
        if len(self.coeffs) == 1:
            return UniPoly([0.0])
        return UniPoly(self.coeffs[1:] * np.arange(1, len(self.coeffs)))

    def __repr__(self):
        return f"UniPoly({list(self.coeffs)})"


def sylvester_matrix(p: UniPoly, q: UniPoly) -> np.ndarray:
    """Sylvester matrix with p's rows first, coefficients ascending per row.

    Row r of the p-block holds p's coefficients starting at column r (there
    are deg q such rows), likewise for the q-block.  With this layout
    res(u - a, u - b) = b - a.
    """
    m, n = p.degree, q.degree
    if m < 1 or n < 1:
        raise ValueError("resultant needs degrees >= 1")
    size = m + n
    mat = np.zeros((size, size))
    for r in range(n):
        mat[r, r : r + m + 1] = p.coeffs
    for r in range(m):
        mat[n + r, r : r + n + 1] = q.coeffs
    return mat


def _det_exact(mat: np.ndarray) -> Fraction:
    """Fraction-exact determinant (Bareiss elimination with row pivoting)."""
    n = mat.shape[0]
    m = [[Fraction(x) for x in row] for row in mat.tolist()]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
            m[i][k] = Fraction(0)
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def sylvester_resultant(p: UniPoly, q: UniPoly, exact: bool = False):
    """Determinant of the Sylvester matrix of p and q (formal degrees).

    The exact path converts the (binary-rational) float coefficients to
    Fractions and eliminates without rounding; use it for polynomial
    identity checks where float rounding could mask failure.
    """
    if p.is_zero and q.is_zero:
        raise ValueError("resultant undefined")
    mat = sylvester_matrix(p, q)
    if exact:
        return _det_exact(mat)
    return float(np.linalg.det(mat))


# -- germ file format ---------------------------------------------------------


def parse_germ(data: dict) -> Jet:
    """Parse {"degree": k, "coeffs": [{"i":, "j":, "value":}, ...]}."""
    if not isinstance(data, dict):
        raise ValueError("germ document must be a JSON object")
    try:
        degree = data["degree"]
    except KeyError:
        raise ValueError("germ document missing 'degree'") from None
    if not isinstance(degree, int) or isinstance(degree, bool) or degree < 0:
        raise ValueError(f"'degree' must be a nonnegative integer, got {degree!r}")
    entries = data.get("coeffs", [])
    seen = set()
    terms = {}
    for pos, entry in enumerate(entries):
        try:
            i, j, v = entry["i"], entry["j"], entry["value"]
        except (TypeError, KeyError):
            raise ValueError(f"coeffs[{pos}]: each entry needs 'i', 'j', 'value'") from None
        if not isinstance(i, int) or not isinstance(j, int) or isinstance(i, bool) or isinstance(j, bool):
            raise ValueError(f"coeffs[{pos}]: indices must be integers")
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValueError(f"coeffs[{pos}]: value for ({i},{j}) is not numeric")
        if not (0 <= j <= i <= degree):
            raise ValueError(f"coeffs[{pos}]: index ({i},{j}) out of range for degree {degree}")
        if (i, j) in seen:
            raise ValueError(f"coeffs[{pos}]: duplicate index ({i},{j})")
        seen.add((i, j))
        terms[(i, j)] = float(v)
    return Jet.from_terms(terms, degree)


def load_germ(path: str) -> Jet:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc})") from None
    return parse_germ(data)


def germ_to_dict(f: Jet) -> dict:
    return {
        "degree": f.degree,
        "coeffs": [{"i": i, "j": j, "value": v} for i, j, v in f.terms()],
    }


def save_germ(f: Jet, path: str) -> None:
    """Write atomically: temp file in the target directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(germ_to_dict(f), fh, indent=1)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
