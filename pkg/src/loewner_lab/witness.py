"""Operator-level randomized testing of the defining inequalities.

Searches sample concrete symmetric matrices (and contractions) and look
for a negative eigenvalue in the defining defect of monotonicity,
convexity, or the contraction inequality f(c^T a c) <= c^T f(a) c. A
candidate violation found in binary64 only becomes a witness after the
whole defect is rebuilt and re-checked at big(60) precision, so rounding
noise never certifies a counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import item_rng
from .expr import DomainError, Interval, evaluate
from .matrices import SymmetricMatrix
from .precision import PrecisionCfg, as_cfg
from .spectra import certification_cfg, eig_sym

_KINDS = ("monotone", "convex", "contraction")


@dataclass(frozen=True)
class WitnessRecord:
    """A concrete violating instance with a certified margin.

    kind "matrix_pair" carries payload {a, b[, lam]}, "contraction_triple"
    carries {a, c}; classify emits kind "node_set" with the offending
    nodes. margin is the most negative defect eigenvalue re-computed at
    certification precision.
    """

    kind: str
    payload: dict
    margin: float
    seed_index: int

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "payload": self.payload,
            "margin": self.margin,
            "seed_index": self.seed_index,
        }


# ---------------------------------------------------------------------------
# Sampling


def _haar_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Product of n Householder reflectors built from Gaussian vectors."""
    q = np.eye(n)
    for _ in range(n):
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        q = q - 2.0 * np.outer(v, v @ q)
    return q


def _sample_with_spectrum(n: int, interval: Interval, rng: np.random.Generator):
    d = rng.uniform(interval.lo, interval.hi, size=n)
    q = _haar_orthogonal(n, rng)
    a = q.T @ np.diag(d) @ q
    return (a + a.T) / 2.0, d


def sample_selfadjoint(n: int, interval: Interval, rng: np.random.Generator) -> np.ndarray:
    """Random symmetric matrix with spectrum in the interval, QᵀDQ form."""
    return _sample_with_spectrum(n, interval, rng)[0]


# ---------------------------------------------------------------------------
# Matrix functions through the spectral decomposition


def _matfun_lists(fn, rows: list, cfg: PrecisionCfg) -> list:
    n = len(rows)
    a = SymmetricMatrix(order=n, entries=[list(r) for r in rows], kind="derived")
    lam, q = eig_sym(a, cfg)
    width = fn.domain.width
    slack = 1e-12 * max(1.0, width)
    vals = []
    for x in lam:
        xf = float(x)
        if not fn.domain.contains(xf, closure=True):
            if fn.domain.contains(min(max(xf, fn.domain.lo), fn.domain.hi), closure=True) \
                    and min(abs(xf - fn.domain.lo), abs(xf - fn.domain.hi)) <= slack:
                xf = min(max(xf, fn.domain.lo), fn.domain.hi)
            else:
                raise DomainError(f"eigenvalue {xf!r} outside domain {fn.domain}")
        vals.append(evaluate(fn, xf, cfg))
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            s = q[i][0] * vals[0] * q[j][0]
            for k in range(1, n):
                s = s + q[i][k] * vals[k] * q[j][k]
            out[i][j] = s
            out[j][i] = s
    return out


def apply_matrix_function(fn, a, precision: PrecisionCfg | None = None):
    """f(A) = Q f(diag) Qᵀ from the symmetric eigendecomposition."""
    cfg = as_cfg(precision)
    rows = a.tolist() if isinstance(a, np.ndarray) else [list(r) for r in a]
    with cfg.context():
        out = _matfun_lists(fn, rows, cfg)
    if isinstance(a, np.ndarray) and not cfg.is_big:
        return np.array([[float(x) for x in row] for row in out])
    return out


def _min_eig_lists(rows: list, cfg: PrecisionCfg):
    n = len(rows)
    sym = [[(rows[i][j] + rows[j][i]) / 2 for j in range(n)] for i in range(n)]
    m = SymmetricMatrix(order=n, entries=sym, kind="derived")
    lam, _ = eig_sym(m, cfg)
    return lam[0], float(m.max_abs())


# ---------------------------------------------------------------------------
# Defects


def _defect(fn, kind: str, sample: dict, cfg: PrecisionCfg) -> list:
    if kind == "monotone":
        fa = _matfun_lists(fn, sample["a"], cfg)
        fb = _matfun_lists(fn, sample["b"], cfg)
        n = len(fa)
        return [[fb[i][j] - fa[i][j] for j in range(n)] for i in range(n)]
    if kind == "convex":
        lam = cfg.from_number(sample["lam"])
        a, b = sample["a"], sample["b"]
        n = len(a)
        mid = [[lam * a[i][j] + (1 - lam) * b[i][j] for j in range(n)] for i in range(n)]
        fa = _matfun_lists(fn, a, cfg)
        fb = _matfun_lists(fn, b, cfg)
        fm = _matfun_lists(fn, mid, cfg)
        return [[lam * fa[i][j] + (1 - lam) * fb[i][j] - fm[i][j] for j in range(n)]
                for i in range(n)]
    if kind == "contraction":
        a, c = sample["a"], sample["c"]
        n = len(a)
        fa = _matfun_lists(fn, a, cfg)
        cfac = _congruence(c, fa)
        cac = _congruence(c, a)
        fcac = _matfun_lists(fn, cac, cfg)
        return [[cfac[i][j] - fcac[i][j] for j in range(n)] for i in range(n)]
    raise ValueError(f"unknown witness kind {kind!r}")


def _congruence(c: list, m: list) -> list:
    """c^T m c on plain lists (c need not be symmetric)."""
    n = len(m)
    mc = [[sum(m[i][k] * c[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    out = [[sum(c[k][i] * mc[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    # symmetrize to kill round-off asymmetry
    return [[(out[i][j] + out[j][i]) / 2 for j in range(n)] for i in range(n)]


def _certified_margin(fn, kind: str, sample: dict, tol_rel: float,
                      cfg: PrecisionCfg) -> float | None:
    """Re-build the defect at certification precision; margin if it survives."""
    big = certification_cfg(cfg)
    with big.context():
        sample_big = {
            key: ([[big.from_number(x) for x in row] for row in value]
                  if isinstance(value, list) else value)
            for key, value in sample.items()
        }
        defect = _defect(fn, kind, sample_big, big)
        min_eig, scale = _min_eig_lists(defect, big)
        if min_eig < -tol_rel * max(1.0, scale):
            return float(min_eig)
    return None


# ---------------------------------------------------------------------------
# The search


def operator_witness_search(fn, interval: Interval, n: int, kind: str,
                            samples: int, seed: int,
                            precision: PrecisionCfg | None = None) -> list[WitnessRecord]:
    """Randomized counterexample search on concrete matrices.

    monotone:    A <= B but f(B) - f(A) has a negative eigenvalue.
    convex:      lam f(A) + (1-lam) f(B) - f(lam A + (1-lam) B) negative.
    contraction: c^T f(a) c - f(c^T a c) negative (condition (2)_n); needs
                 0 in the closure of the interval.
    """
    cfg = as_cfg(precision)
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}, got {kind!r}")
    if kind == "contraction" and interval.lo > 0:
        raise ValueError("contraction search needs 0 in the closure of the interval")
    tol_rel = PrecisionCfg.machine().tol_rel()
    hi_cap = interval.hi - 1e-9 * interval.width
    records: list[WitnessRecord] = []

    for idx in range(samples):
        rng = item_rng(seed, idx)
        if kind == "monotone":
            a, d = _sample_with_spectrum(n, interval, rng)
            p = rng.standard_normal((n, n))
            bump = p.T @ p
            bump = (bump + bump.T) / 2.0
            cap = max((hi_cap - d.max()) / np.linalg.norm(bump), 0.0)
            s = rng.uniform(0.0, 1.0) * cap
            b = a + s * bump
            # Frobenius bound keeps the spectrum interior; halve as a safety net
            for _ in range(40):
                if np.linalg.eigvalsh(b)[-1] < hi_cap:
                    break
                s /= 2.0
                b = a + s * bump
            sample = {"a": a.tolist(), "b": b.tolist()}
        elif kind == "convex":
            a, _ = _sample_with_spectrum(n, interval, rng)
            b, _ = _sample_with_spectrum(n, interval, rng)
            sample = {"a": a.tolist(), "b": b.tolist(), "lam": float(rng.uniform())}
        else:
            a, _ = _sample_with_spectrum(n, interval, rng)
            g = rng.standard_normal((n, n))
            sigma = np.linalg.svd(g, compute_uv=False)[0]
            c = float(rng.uniform()) * g / sigma
            sample = {"a": a.tolist(), "c": c.tolist()}

        defect = _defect(fn, kind, sample, cfg)
        min_eig, scale = _min_eig_lists(defect, cfg)
        if min_eig < -tol_rel * max(1.0, scale):
            margin = _certified_margin(fn, kind, sample, tol_rel, cfg)
            if margin is not None:
                tag = "contraction_triple" if kind == "contraction" else "matrix_pair"
                records.append(WitnessRecord(kind=tag, payload=sample,
                                             margin=margin, seed_index=idx))

    records.sort(key=lambda w: (w.margin, w.seed_index))
    return records
