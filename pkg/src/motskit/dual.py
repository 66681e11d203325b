"""Tagged forward-mode dual numbers with numpy-array payloads.

A :class:`Dual` carries a primal value, a tangent, and an integer tag naming
the differentiation it belongs to.  Nesting duals with distinct tags gives
exact higher derivatives; the tags keep nested perturbations apart, so a
function may internally differentiate something (e.g. an immersion Jacobian)
while the caller is differentiating it from outside.

Invariant: along any nesting chain the tags strictly decrease inwards.  New
tags come from a monotone counter, so wrapping an existing value in a fresh
dual always preserves it.

Payloads may be Python floats or numpy arrays of any (broadcastable) shape,
which lets one evaluation differentiate a metric at a whole batch of points.
"""

from __future__ import annotations

import itertools
from typing import Any, Callable, Sequence

import numpy as np

_tags = itertools.count(1)


def new_tag() -> int:
    return next(_tags)


class Dual:
    __slots__ = ("val", "der", "tag")
    # keep numpy from broadcasting over a Dual as if it were a scalar object
    __array_ufunc__ = None

    def __init__(self, val: Any, der: Any, tag: int):
        self.val = val
        self.der = der
        self.tag = tag

    def __repr__(self) -> str:
        return f"Dual({self.val!r}, {self.der!r}, tag={self.tag})"

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Dual):
            if other.tag > self.tag:
                return other.__add__(self)
            if other.tag == self.tag:
                return Dual(self.val + other.val, self.der + other.der, self.tag)
        return Dual(self.val + other, self.der, self.tag)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.val, -self.der, self.tag)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self.__add__(-other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, Dual):
            if other.tag > self.tag:
                return other.__mul__(self)
            if other.tag == self.tag:
                return Dual(
                    self.val * other.val,
                    self.der * other.val + self.val * other.der,
                    self.tag,
                )
        return Dual(self.val * other, self.der * other, self.tag)

    __rmul__ = __mul__

    def reciprocal(self):
        inv = 1.0 / self.val
        return Dual(inv, -self.der * inv * inv, self.tag)

    def __truediv__(self, other):
        if isinstance(other, Dual):
            if other.tag >= self.tag:
                return self.__mul__(other.reciprocal())
        return Dual(self.val / other, self.der / other, self.tag)

    def __rtruediv__(self, other):
        return self.reciprocal().__mul__(other)

    def __pow__(self, p):
        if isinstance(p, Dual):
            return exp(p * log(self))
        if p == 0:
            return 1.0
        if p == 1:
            return self
        if p == 2:
            return self * self
        vp = _pow(self.val, p - 1)
        return Dual(vp * self.val, p * vp * self.der, self.tag)

    def __rpow__(self, base):
        return exp(self * np.log(base))


def _pow(x, p):
    if isinstance(x, Dual):
        return x**p
    return np.power(x, p)


def primal(x):
    """Strip every dual layer and return the underlying value."""
    while isinstance(x, Dual):
        x = x.val
    return x


# -- elementary functions -----------------------------------------------------
def exp(x):
    if isinstance(x, Dual):
        e = exp(x.val)
        return Dual(e, e * x.der, x.tag)
    return np.exp(x)


def log(x):
    if isinstance(x, Dual):
        return Dual(log(x.val), x.der / x.val, x.tag)
    return np.log(x)


def sqrt(x):
    if isinstance(x, Dual):
        s = sqrt(x.val)
        return Dual(s, x.der / (2.0 * s), x.tag)
    return np.sqrt(x)


def sin(x):
    if isinstance(x, Dual):
        return Dual(sin(x.val), cos(x.val) * x.der, x.tag)
    return np.sin(x)


def cos(x):
    if isinstance(x, Dual):
        return Dual(cos(x.val), -sin(x.val) * x.der, x.tag)
    return np.cos(x)


def sinh(x):
    if isinstance(x, Dual):
        return Dual(sinh(x.val), cosh(x.val) * x.der, x.tag)
    return np.sinh(x)


def cosh(x):
    if isinstance(x, Dual):
        return Dual(cosh(x.val), sinh(x.val) * x.der, x.tag)
    return np.cosh(x)


def power(x, p):
    return _pow(x, p)


# -- jets ---------------------------------------------------------------------
def split_tangent(obj, tag):
    """(value, tangent) of a nested-list structure with respect to ``tag``."""
    if isinstance(obj, (list, tuple)):
        pairs = [split_tangent(o, tag) for o in obj]
        return [p[0] for p in pairs], [p[1] for p in pairs]
    if isinstance(obj, Dual) and obj.tag == tag:
        return obj.val, obj.der
    return obj, 0.0


def _to_array(obj, batch_shape) -> np.ndarray:
    """Nested lists of floats/arrays -> ndarray of shape (*batch, *nested)."""
    if isinstance(obj, (list, tuple)):
        return np.stack([_to_array(o, batch_shape) for o in obj], axis=len(batch_shape))
    if isinstance(obj, Dual):
        raise TypeError("unresolved dual perturbation in jet output")
    return np.broadcast_to(np.asarray(obj, dtype=float), batch_shape)


def _coords(x: np.ndarray) -> list:
    return [x[..., i] for i in range(x.shape[-1])]


def jet(fn: Callable[[Sequence], Any], x, order: int = 2):
    """Value and exact partial derivatives of ``fn`` at ``x``.

    ``fn`` maps a list of ``n`` coordinates to a nested list structure.
    ``x`` has shape ``(*batch, n)``.  Returns ``[f]``, ``[f, df]`` or
    ``[f, df, ddf]`` with shapes ``(*batch, *out)``, ``(*batch, n, *out)``
    and ``(*batch, n, n, *out)``; derivative axes come right after the batch.
    """
    x = np.asarray(x, dtype=float)
    batch = x.shape[:-1]
    n = x.shape[-1]
    xs = _coords(x)
    if order == 0:
        return [_to_array(fn(xs), batch)]
    if order == 1:
        f0 = None
        grads = []
        for a in range(n):
            t = new_tag()
            args = [Dual(xs[i], 1.0 if i == a else 0.0, t) for i in range(n)]
            v, d = split_tangent(fn(args), t)
            if f0 is None:
                f0 = _to_array(v, batch)
            grads.append(_to_array(d, batch))
        return [f0, np.stack(grads, axis=len(batch))]
    if order != 2:
        raise ValueError("order must be 0, 1 or 2")
    f0 = None
    grads: list = [None] * n
    hess: list = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            t1 = new_tag()
            t2 = new_tag()
            args = [
                Dual(Dual(xs[i], 1.0 if i == a else 0.0, t1), 1.0 if i == b else 0.0, t2)
                for i in range(n)
            ]
            v2, d2 = split_tangent(fn(args), t2)
            _, dd = split_tangent(d2, t1)
            hess[a][b] = hess[b][a] = _to_array(dd, batch)
            if a == b:
                v, d = split_tangent(v2, t1)
                grads[a] = _to_array(d, batch)
                if f0 is None:
                    f0 = _to_array(v, batch)
    ax = len(batch)
    ddf = np.stack([np.stack(row, axis=ax) for row in hess], axis=ax)
    return [f0, np.stack(grads, axis=ax), ddf]


def derivative(fn: Callable[[Any], Any], x):
    """Derivative of a scalar function of one (possibly dual) variable."""
    t = new_tag()
    v, d = split_tangent(fn(Dual(x, 1.0, t)), t)
    return v, d
