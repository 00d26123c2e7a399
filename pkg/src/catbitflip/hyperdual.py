"""Hyper-dual numbers for exact first and mixed second derivatives.

``HyperDual(v, dx, dy, dxy)`` represents ``v + dx e1 + dy e2 + dxy e1 e2`` with
``e1^2 = e2^2 = 0``.  Evaluating ``f`` at ``HyperDual(x, 1, 0, 0)`` and
``HyperDual(y, 0, 1, 0)`` yields ``f``, ``df/dx``, ``df/dy`` and ``d2f/dxdy``
with no truncation error.
"""

import math

from . import special


class HyperDual:
    __slots__ = ("v", "dx", "dy", "dxy")

    def __init__(self, v, dx=0.0, dy=0.0, dxy=0.0):
        self.v, self.dx, self.dy, self.dxy = float(v), float(dx), float(dy), float(dxy)

    def __repr__(self):
        return f"HyperDual({self.v!r}, {self.dx!r}, {self.dy!r}, {self.dxy!r})"

    def _chain(self, f0, f1, f2):
        return HyperDual(f0, f1 * self.dx, f1 * self.dy, f1 * self.dxy + f2 * self.dx * self.dy)

    def __add__(self, o):
        if isinstance(o, HyperDual):
            return HyperDual(self.v + o.v, self.dx + o.dx, self.dy + o.dy, self.dxy + o.dxy)
        return HyperDual(self.v + o, self.dx, self.dy, self.dxy)

    __radd__ = __add__

    def __neg__(self):
        return HyperDual(-self.v, -self.dx, -self.dy, -self.dxy)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, HyperDual):
            return HyperDual(
                self.v * o.v,
                self.v * o.dx + self.dx * o.v,
                self.v * o.dy + self.dy * o.v,
                self.v * o.dxy + self.dx * o.dy + self.dy * o.dx + self.dxy * o.v,
            )
        return HyperDual(self.v * o, self.dx * o, self.dy * o, self.dxy * o)

    __rmul__ = __mul__

    def reciprocal(self):
        inv = 1.0 / self.v
        return self._chain(inv, -inv * inv, 2.0 * inv ** 3)

    def __truediv__(self, o):
        if isinstance(o, HyperDual):
            return self * o.reciprocal()
        return self * (1.0 / o)

    def __rtruediv__(self, o):
        return self.reciprocal() * o


def _lift(name, f, fp, fpp):
    def op(x):
        if isinstance(x, HyperDual):
            return x._chain(f(x.v), fp(x.v), fpp(x.v))
        return f(x)
    op.__name__ = name
    return op


exp = _lift("exp", math.exp, math.exp, math.exp)
sinh = _lift("sinh", math.sinh, math.cosh, math.sinh)
cosh = _lift("cosh", math.cosh, math.sinh, math.cosh)
ein = _lift("ein", special.ein, special.ein_prime, special.ein_second)


def value(x):
    return x.v if isinstance(x, HyperDual) else float(x)
