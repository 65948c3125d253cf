"""Divided differences with confluent (repeated) nodes.

The table is built on ascending-sorted nodes; nodes closer than the
precision-dependent confluence threshold are grouped and routed through
jet coefficients, so [t,...,t] (k+1 copies) is f^(k)(t)/k! exactly to
working precision instead of a catastrophically cancelled quotient.
Permutation symmetry of the result is a tested property, not an
implementation assumption.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import DomainError
from .jets import jet_eval
from .precision import PrecisionCfg, as_cfg


@dataclass(frozen=True)
class NodeSet:
    """Ordered node sequence; repeats encode confluent evaluation."""

    nodes: tuple

    def __post_init__(self) -> None:
        if len(self.nodes) < 1:
            raise ValueError("node set must contain at least one node")

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)


def _coerce_nodes(nodes):
    if isinstance(nodes, NodeSet):
        return nodes.nodes
    seq = tuple(nodes)
    if not seq:
        raise ValueError("node set must contain at least one node")
    return seq


def _group_nodes(values, cfg: PrecisionCfg):
    """Sort ascending and group nodes within the confluence threshold.

    Returns (z, groups) where z is the confluent node vector (group
    representatives with multiplicity) and groups maps representative ->
    multiplicity.
    """
    rel = cfg.confluence_rel()
    ordered = sorted(float(v) for v in values)
    reps = []
    counts = []
    for v in ordered:
        if reps and abs(v - reps[-1]) < rel * max(1.0, abs(reps[-1])):
            counts[-1] += 1
        else:
            reps.append(v)
            counts.append(1)
    z = []
    for r, c in zip(reps, counts):
        z.extend([r] * c)
    return z, dict(zip(reps, counts))


def divdiff(fn, nodes, precision: PrecisionCfg | None = None):
    """Divided difference [t_1, ..., t_m]_fn with confluent handling."""
    cfg = as_cfg(precision)
    values = _coerce_nodes(nodes)
    for v in values:
        if not fn.domain.contains(v, closure=True):
            raise DomainError(f"node {float(v)!r} outside domain {fn.domain}")
    with cfg.context():
        z, groups = _group_nodes(values, cfg)
        m = len(z)
        jets = {
            rep: jet_eval(fn, rep, mult - 1, cfg).coeffs
            for rep, mult in groups.items()
        }
        tab = [jets[zi][0] for zi in z]
        for width in range(1, m):
            nxt = []
            for i in range(m - width):
                if z[i + width] == z[i]:
                    nxt.append(jets[z[i]][width])
                else:
                    step = cfg.from_number(z[i + width]) - cfg.from_number(z[i])
                    nxt.append((tab[i + 1] - tab[i]) / step)
            tab = nxt
        return tab[0]


@dataclass(frozen=True)
class SecondDividedDifference:
    """The function x -> [x, z, z]_fn for a fixed interior z.

    Usable anywhere a FunctionSpec is: it exposes ``domain`` and
    ``jet_coeffs``, the latter from the identity that the k-th Taylor
    coefficient of x -> [x, z, z] is the divided difference over
    (x repeated k+1 times, z, z).
    """

    fn: object
    z: float

    @property
    def domain(self):
        return self.fn.domain

    def jet_coeffs(self, x, order: int, cfg: PrecisionCfg):
        x = float(x)
        return [
            divdiff(self.fn, (x,) * (k + 1) + (self.z, self.z), cfg)
            for k in range(order + 1)
        ]

    def evaluate(self, x, precision: PrecisionCfg | None = None):
        cfg = as_cfg(precision)
        return divdiff(self.fn, (float(x), self.z, self.z), cfg)

    def text(self) -> str:
        inner = self.fn.text() if hasattr(self.fn, "text") else repr(self.fn)
        return f"[x, {self.z:g}, {self.z:g}]_({inner})"


def second_divdiff_fn(fn, z: float) -> SecondDividedDifference:
    """Evaluator for x -> [x, z, z]_fn; at x == z it is f''(z)/2."""
    if not fn.domain.contains(z, closure=True):
        raise DomainError(f"z={z!r} outside domain {fn.domain}")
    return SecondDividedDifference(fn=fn, z=float(z))
