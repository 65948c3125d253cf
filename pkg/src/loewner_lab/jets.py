"""Truncated Taylor (jet) arithmetic through expression trees.

A jet at t holds the coefficients c_k = f^(k)(t)/k! up to a requested
order. Coefficients propagate through the tree with the classical
power-series recurrences, so apart from the scalar rounding there is no
truncation error below the jet order. The series kernels work on plain
lists and never touch transcendental functions unless the operation
needs them, which keeps them usable with exact scalars in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .expr import BinOp, Call, DomainError, FunctionSpec, Neg, Num, Var, scalar_pow
from .precision import PrecisionCfg, as_cfg


@dataclass(frozen=True)
class Jet:
    """Taylor coefficients c_0..c_K of a function at ``center``."""

    center: object
    coeffs: tuple

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def derivative(self, k: int):
        """k-th derivative value, k! * c_k."""
        return math.factorial(k) * self.coeffs[k]


# ---------------------------------------------------------------------------
# Series kernels on coefficient lists (all same length)


def series_add(a, b):
    return [x + y for x, y in zip(a, b)]


def series_sub(a, b):
    return [x - y for x, y in zip(a, b)]


def series_neg(a):
    return [-x for x in a]


def series_mul(a, b):
    n = len(a)
    out = []
    for k in range(n):
        s = a[0] * b[k]
        for i in range(1, k + 1):
            s = s + a[i] * b[k - i]
        out.append(s)
    return out


def series_div(a, b):
    if b[0] == 0:
        raise DomainError("division by a jet with zero constant term")
    n = len(a)
    out = []
    for k in range(n):
        s = a[k]
        for i in range(1, k + 1):
            s = s - b[i] * out[k - i]
        out.append(s / b[0])
    return out


def series_exp(a, cfg: PrecisionCfg):
    n = len(a)
    try:
        e0 = cfg.exp(a[0])
    except OverflowError as exc:
        raise DomainError("overflow in exp") from exc
    out = [e0]
    for k in range(1, n):
        s = a[1] * out[k - 1]
        for j in range(2, k + 1):
            s = s + j * a[j] * out[k - j]
        out.append(s / k)
    return out


def series_log(a, cfg: PrecisionCfg):
    if a[0] <= 0:
        raise DomainError(f"log of non-positive constant term {float(a[0])!r}")
    n = len(a)
    out = [cfg.log(a[0])]
    for k in range(1, n):
        s = a[k] * k
        for j in range(1, k):
            s = s - j * out[j] * a[k - j]
        out.append(s / k / a[0])
    return out


def series_sqrt(a, cfg: PrecisionCfg):
    if all(x == 0 for x in a):
        return [0 * x for x in a]
    if a[0] < 0:
        raise DomainError(f"sqrt of negative constant term {float(a[0])!r}")
    if a[0] == 0:
        raise DomainError("sqrt of a jet with zero constant term")
    n = len(a)
    s0 = cfg.sqrt(a[0])
    out = [s0]
    for k in range(1, n):
        s = a[k]
        for j in range(1, k):
            s = s - out[j] * out[k - j]
        out.append(s / (2 * s0))
    return out


def series_pow_int(a, m: int):
    n = len(a)
    one = [a[0] * 0 + 1] + [a[0] * 0] * (n - 1)
    if m == 0:
        return one
    if m < 0:
        return series_pow_int(series_div(one, a), -m)
    result = one
    base = list(a)
    e = m
    while e:
        if e & 1:
            result = series_mul(result, base)
        e >>= 1
        if e:
            base = series_mul(base, base)
    return result


def series_pow_real(a, alpha, cfg: PrecisionCfg):
    if all(x == 0 for x in a[1:]):
        # constant jet: plain scalar power, so 0^alpha with alpha > 0 is fine
        p0 = scalar_pow(a[0], alpha, cfg)
        return [p0] + [a[0] * 0] * (len(a) - 1)
    if a[0] <= 0:
        raise DomainError("real power needs a positive constant term")
    n = len(a)
    out = [cfg.power(a[0], alpha)]
    for k in range(1, n):
        s = ((alpha + 1) * 1 - k) * a[1] * out[k - 1]
        for j in range(2, k + 1):
            s = s + ((alpha + 1) * j - k) * a[j] * out[k - j]
        out.append(s / (k * a[0]))
    return out


# ---------------------------------------------------------------------------
# Propagation through the AST


def _has_var(node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, Neg):
        return _has_var(node.arg)
    if isinstance(node, Call):
        return _has_var(node.arg)
    if isinstance(node, BinOp):
        return _has_var(node.left) or _has_var(node.right)
    return False


def _constant_value(node, cfg: PrecisionCfg):
    """Scalar value of a variable-free subtree, None if it contains t."""
    if _has_var(node):
        return None
    from .expr import eval_ast

    return eval_ast(node, cfg.zero(), cfg)


def _jet_of_ast(node, t, order: int, cfg: PrecisionCfg):
    zero = cfg.zero()
    if isinstance(node, Num):
        return [cfg.from_literal(node.text)] + [zero] * order
    if isinstance(node, Var):
        coeffs = [cfg.from_number(t)] + [zero] * order
        if order >= 1:
            coeffs[1] = cfg.one()
        return coeffs
    if isinstance(node, Neg):
        return series_neg(_jet_of_ast(node.arg, t, order, cfg))
    if isinstance(node, Call):
        a = _jet_of_ast(node.arg, t, order, cfg)
        if node.func == "log":
            return series_log(a, cfg)
        if node.func == "exp":
            return series_exp(a, cfg)
        if node.func == "sqrt":
            return series_sqrt(a, cfg)
        raise TypeError(f"unknown function {node.func!r}")
    if isinstance(node, BinOp):
        if node.op == "^":
            exponent = _constant_value(node.right, cfg)
            a = _jet_of_ast(node.left, t, order, cfg)
            if exponent is not None:
                if exponent == int(exponent) and abs(float(exponent)) < 1e12:
                    return series_pow_int(a, int(exponent))
                return series_pow_real(a, exponent, cfg)
            b = _jet_of_ast(node.right, t, order, cfg)
            return series_exp(series_mul(b, series_log(a, cfg)), cfg)
        a = _jet_of_ast(node.left, t, order, cfg)
        b = _jet_of_ast(node.right, t, order, cfg)
        if node.op == "+":
            return series_add(a, b)
        if node.op == "-":
            return series_sub(a, b)
        if node.op == "*":
            return series_mul(a, b)
        if node.op == "/":
            return series_div(a, b)
    raise TypeError(f"not an AST node: {node!r}")


def jet_eval(fn, t, order: int, precision: PrecisionCfg | None = None) -> Jet:
    """Jet of ``fn`` at t.

    ``fn`` is a FunctionSpec or any object providing ``domain`` and
    ``jet_coeffs(t, order, cfg)`` (the protocol used by derived
    evaluators such as the second-divided-difference function).
    """
    cfg = as_cfg(precision)
    if order < 0:
        raise ValueError("order must be non-negative")
    if not fn.domain.contains(t, closure=True):
        raise DomainError(f"t={float(t)!r} outside domain {fn.domain}")
    with cfg.context():
        if isinstance(fn, FunctionSpec):
            shift = fn.deriv_shift
            raw = _jet_of_ast(fn.ast, cfg.from_number(t), order + shift, cfg)
            if shift:
                coeffs = []
                for k in range(order + 1):
                    factor = 1
                    for i in range(k + 1, k + shift + 1):
                        factor *= i
                    coeffs.append(raw[k + shift] * factor)
            else:
                coeffs = raw
        else:
            coeffs = list(fn.jet_coeffs(t, order, cfg))
        return Jet(center=cfg.from_number(t), coeffs=tuple(coeffs))


def derivative(fn, t, k: int, precision: PrecisionCfg | None = None):
    """k-th derivative of fn at t, via the jet coefficient."""
    return jet_eval(fn, t, k, precision).derivative(k)
