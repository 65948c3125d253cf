"""Scalar precision: binary64 or arbitrary-precision decimal floats.

Every numerical kernel in this package is written against plain Python
arithmetic, so the same code runs on ``float`` and on ``mpmath.mpf``
values. A :class:`PrecisionCfg` picks the scalar kind; big-precision work
happens inside ``cfg.context()`` so the mpmath working precision is always
explicit at the operation boundary.

The environment variable ``LOEWNER_LAB_DIGITS`` overrides the default
number of decimal digits used by big mode.
"""

from __future__ import annotations

import contextlib
import math
import os
from dataclasses import dataclass

import mpmath

ENV_DIGITS = "LOEWNER_LAB_DIGITS"
_DEFAULT_BIG_DIGITS = 60


def default_big_digits() -> int:
    raw = os.environ.get(ENV_DIGITS)
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"{ENV_DIGITS} must be an integer, got {raw!r}") from None
    return _DEFAULT_BIG_DIGITS


@dataclass(frozen=True)
class PrecisionCfg:
    """Scalar precision selector.

    mode "machine" computes in binary64; mode "big" computes with mpmath
    at ``digits`` significant decimal digits (correctly rounded basic
    arithmetic, faithfully rounded elementary functions).
    """

    mode: str = "machine"
    digits: int = _DEFAULT_BIG_DIGITS

    def __post_init__(self) -> None:
        if self.mode not in ("machine", "big"):
            raise ValueError(f"unknown precision mode {self.mode!r}")
        if self.mode == "big" and self.digits < 20:
            raise ValueError("big mode requires at least 20 digits")

    @staticmethod
    def machine() -> "PrecisionCfg":
        return PrecisionCfg("machine")

    @staticmethod
    def big(digits: int | None = None) -> "PrecisionCfg":
        return PrecisionCfg("big", default_big_digits() if digits is None else digits)

    @property
    def is_big(self) -> bool:
        return self.mode == "big"

    def context(self):
        """Pin the mpmath working precision; a no-op in machine mode."""
        if self.is_big:
            return mpmath.workdps(self.digits)
        return contextlib.nullcontext()

    # scalar construction ---------------------------------------------------

    def from_literal(self, text: str):
        if self.is_big:
            with mpmath.workdps(self.digits):
                return mpmath.mpf(text)
        return float(text)

    def from_number(self, x):
        if self.is_big:
            with mpmath.workdps(self.digits):
                return mpmath.mpf(x) if not isinstance(x, mpmath.mpf) else x
        return float(x)

    def zero(self):
        return self.from_number(0)

    def one(self):
        return self.from_number(1)

    # elementary functions (domain checks are the caller's business) --------

    def sqrt(self, x):
        return mpmath.sqrt(x) if self.is_big else math.sqrt(x)

    def log(self, x):
        return mpmath.log(x) if self.is_big else math.log(x)

    def exp(self, x):
        return mpmath.exp(x) if self.is_big else math.exp(x)

    def power(self, x, y):
        """Real power x**y for x > 0."""
        if self.is_big:
            return mpmath.power(x, y)
        return math.pow(x, y)

    # tolerance scales -------------------------------------------------------

    def tol_rel(self) -> float:
        """Default relative PSD tolerance: 1e-9 binary64, 10^(10-digits) big."""
        return 1e-9 if not self.is_big else 10.0 ** (10 - self.digits)

    def confluence_rel(self) -> float:
        """Node-coincidence threshold: 1e-6 binary64, 10^(-digits/2) big."""
        return 1e-6 if not self.is_big else 10.0 ** (-self.digits / 2)

    def jacobi_stop_rel(self) -> float:
        """Off-diagonal stopping threshold for the Jacobi sweeps."""
        return 1e-14 if not self.is_big else 10.0 ** (-(self.digits - 2))

    def describe(self) -> dict:
        if self.is_big:
            return {"mode": "big", "digits": self.digits}
        return {"mode": "machine"}


def as_cfg(precision) -> PrecisionCfg:
    """Coerce None (machine default) or a PrecisionCfg."""
    if precision is None:
        return PrecisionCfg.machine()
    if isinstance(precision, PrecisionCfg):
        return precision
    raise TypeError(f"expected PrecisionCfg or None, got {type(precision)!r}")


def format_number(x, cfg: PrecisionCfg | None = None) -> str:
    """Scientific-notation string at the full precision of the scalar."""
    if isinstance(x, mpmath.mpf):
        digits = cfg.digits if cfg is not None and cfg.is_big else mpmath.mp.dps
        return mpmath.nstr(x, digits, min_fixed=0, max_fixed=0, strip_zeros=False)
    return format(float(x), ".16e")
