"""Builders for every matrix the criteria use.

All matrices are dense, real and exactly symmetric: the upper triangle is
computed once and mirrored, so the eigensolver can assume symmetry.
Index origin is 1 for the (i+j) formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath

from .divided import divdiff
from .jets import jet_eval
from .precision import PrecisionCfg, as_cfg, format_number

_KINDS = ("loewner", "kraus", "dobsch", "hansen", "cauchy", "index_sum", "derived")


@dataclass
class SymmetricMatrix:
    """Dense real symmetric matrix with a provenance label."""

    order: int
    entries: list  # list of row lists, scalar float or mpf
    kind: str = "derived"
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.kind not in _KINDS:
            raise ValueError(f"unknown matrix kind {self.kind!r}")

    def entry(self, i: int, j: int):
        return self.entries[i][j]

    def max_abs(self):
        return max(abs(x) for row in self.entries for x in row)

    def to_lists(self) -> list:
        return [list(row) for row in self.entries]

    def to_floats(self) -> list:
        return [[float(x) for x in row] for row in self.entries]


def _from_upper(n: int, upper, kind: str, meta: dict) -> SymmetricMatrix:
    """Fill a symmetric matrix from a function of (i, j), i <= j, 0-based."""
    rows = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = upper(i, j)
            rows[i][j] = v
            rows[j][i] = v
    return SymmetricMatrix(order=n, entries=rows, kind=kind, meta=meta)


def loewner_matrix(fn, nodes, precision: PrecisionCfg | None = None) -> SymmetricMatrix:
    """First divided differences ([t_i, t_j]); diagonal entries are f'(t_i)."""
    cfg = as_cfg(precision)
    ts = [float(t) for t in (nodes.nodes if hasattr(nodes, "nodes") else nodes)]
    with cfg.context():
        return _from_upper(
            len(ts),
            lambda i, j: divdiff(fn, (ts[i], ts[j]), cfg),
            "loewner",
            {"nodes": ts},
        )


def kraus_matrix(fn, base: float, nodes, precision: PrecisionCfg | None = None) -> SymmetricMatrix:
    """Second divided differences ([base, t_i, t_j]); base may equal a node."""
    cfg = as_cfg(precision)
    ts = [float(t) for t in (nodes.nodes if hasattr(nodes, "nodes") else nodes)]
    b = float(base)
    with cfg.context():
        return _from_upper(
            len(ts),
            lambda i, j: divdiff(fn, (b, ts[i], ts[j]), cfg),
            "kraus",
            {"base": b, "nodes": ts},
        )


def derivative_matrix(fn, t: float, n: int, kind: str,
                      precision: PrecisionCfg | None = None) -> SymmetricMatrix:
    """Pointwise derivative matrices.

    kind "dobsch": entry (i, j) = f^(i+j-1)(t) / (i+j-1)!  (order 2n-1 jet)
    kind "hansen": entry (i, j) = f^(i+j)(t) / (i+j)!      (order 2n jet)
    """
    cfg = as_cfg(precision)
    if kind not in ("dobsch", "hansen"):
        raise ValueError(f"derivative matrix kind must be dobsch or hansen, got {kind!r}")
    top = 2 * n - 1 if kind == "dobsch" else 2 * n
    with cfg.context():
        c = jet_eval(fn, float(t), top, cfg).coeffs
        off = 1 if kind == "dobsch" else 0
        return _from_upper(
            n,
            lambda i, j: c[i + j + 2 - off],
            kind,
            {"t": float(t), "n": n},
        )


def special_matrix(kind: str, n: int) -> SymmetricMatrix:
    """Cauchy matrix (1/(i+j)) or index-sum matrix (i+j), indices from 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if kind == "cauchy":
        return _from_upper(n, lambda i, j: 1.0 / (i + j + 2), "cauchy", {"n": n})
    if kind == "index_sum":
        return _from_upper(n, lambda i, j: float(i + j + 2), "index_sum", {"n": n})
    raise ValueError(f"special matrix kind must be cauchy or index_sum, got {kind!r}")


def hadamard(a: SymmetricMatrix, b: SymmetricMatrix) -> SymmetricMatrix:
    """Entrywise (Schur) product."""
    if a.order != b.order:
        raise ValueError(f"order mismatch: {a.order} vs {b.order}")
    n = a.order
    return _from_upper(
        n,
        lambda i, j: a.entries[i][j] * b.entries[i][j],
        "derived",
        {"op": "hadamard", "kinds": [a.kind, b.kind]},
    )


def d_reduce(b: SymmetricMatrix) -> SymmetricMatrix:
    """(n-1) x (n-1) reduction d_ij = b_ij + b_{i+1,j+1} - b_{i,j+1} - b_{i+1,j}.

    The reduction equals the Gram matrix of the quadratic form restricted
    to the zero-sum hyperplane in the difference basis {e_i - e_{i+1}}, so
    B is conditionally PSD iff the reduction is PSD.
    """
    if b.order < 2:
        raise ValueError("d_reduce needs order >= 2")
    e = b.entries
    return _from_upper(
        b.order - 1,
        lambda i, j: e[i][j] + e[i + 1][j + 1] - e[i][j + 1] - e[i + 1][j],
        "derived",
        {"op": "d_reduce", "from": b.kind},
    )


# ---------------------------------------------------------------------------
# CSV dump


def _meta_str(meta: dict) -> str:
    parts = []
    for key in sorted(meta):
        value = meta[key]
        if isinstance(value, (list, tuple)):
            parts.append(f"{key}=" + "|".join(f"{float(v):.17g}" for v in value))
        elif isinstance(value, float):
            parts.append(f"{key}={value:.17g}")
        else:
            parts.append(f"{key}={value}")
    return ";".join(parts)


def to_csv(a: SymmetricMatrix, digits: int | None = None) -> str:
    """CSV dump: header line "kind,order,meta", then full-precision rows.

    binary64 entries use 17 significant digits; mpf entries use ``digits``
    significant digits (default: the current mpmath precision).
    """
    lines = [f"{a.kind},{a.order},{_meta_str(a.meta)}"]
    for row in a.entries:
        cells = []
        for x in row:
            if isinstance(x, mpmath.mpf):
                cells.append(mpmath.nstr(x, digits or mpmath.mp.dps,
                                         min_fixed=0, max_fixed=0, strip_zeros=False))
            else:
                cells.append(format_number(float(x)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
