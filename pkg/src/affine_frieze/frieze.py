"""Frieze sequences ``X^i_j`` of an acyclic quiver.

Row 0 holds the initial variables. Each later entry solves

    X^i_{j+1} X^i_j = 1 + prod_{s -> i} X^s_{j+1} * prod_{i -> d} X^d_j

and inside a row the vertices are visited in a topological order, so every
``X^s_{j+1}`` on the right is already known. The symbolic backend divides
Laurent polynomials exactly; the specialized backend works in ``Fraction``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import InsufficientDepth, NotAffineError, ResourceLimitExceeded
from .lattice import QuiverSpec, apq_l_shift, apq_r_shift, coxeter, sigma, topological_order
from .laurent import LaurentPoly, RationalSpecialization

Value = Union[LaurentPoly, Fraction]


class FriezeTable:
    """Append-only table of frieze values, indexed by vertex label and row.

    ``mode`` is ``"symbolic"`` or ``"specialized"``. In symbolic mode an
    optional ``max_terms`` aborts with :class:`ResourceLimitExceeded` as soon
    as a single entry grows beyond that many terms; rows finished before
    that point stay in the table.
    """

    def __init__(
        self,
        quiver: QuiverSpec,
        spec: RationalSpecialization | None = None,
        max_terms: int | None = None,
        initial: Sequence[LaurentPoly] | None = None,
    ):
        self.quiver = quiver
        self.spec = spec
        self.max_terms = max_terms
        n1 = quiver.n_plus_one
        if initial is not None:
            if spec is not None or len(initial) != n1:
                raise ValueError("a custom first row needs symbolic mode and one entry per vertex")
            first = tuple(initial)
        elif spec is None:
            first = tuple(LaurentPoly.gens(n1))
        else:
            if len(spec) != n1:
                raise ValueError(f"specialization has {len(spec)} values, quiver has {n1} vertices")
            first = tuple(spec.values)
        self._rows: list[tuple[Value, ...]] = [first]
        self._order = topological_order(quiver)
        self._preds = [quiver.predecessors(i) for i in range(n1)]
        self._succs = [quiver.successors(i) for i in range(n1)]

    @property
    def mode(self) -> str:
        return "symbolic" if self.spec is None else "specialized"

    @property
    def depth(self) -> int:
        """Largest computed row index."""
        return len(self._rows) - 1

    def row(self, j: int) -> tuple[Value, ...]:
        self.require(j)
        return self._rows[j]

    def at(self, index: int, j: int) -> Value:
        """Value at internal vertex index ``index`` and row ``j``."""
        self.require(j)
        return self._rows[j][index]

    def __getitem__(self, key: tuple[int, int]) -> Value:
        label, j = key
        return self.at(self.quiver.index(label), j)

    def column(self, label: int, start: int = 0, stop: int | None = None) -> list[Value]:
        idx = self.quiver.index(label)
        stop = self.depth + 1 if stop is None else stop
        self.require(stop - 1)
        return [r[idx] for r in self._rows[start:stop]]

    def require(self, j: int):
        if j < 0:
            raise InsufficientDepth(f"row {j} is negative")
        if j > self.depth:
            raise InsufficientDepth(f"row {j} requested, table has rows 0..{self.depth}")

    def extend(self, depth: int) -> "FriezeTable":
        one = 1 if self.spec is None else Fraction(1)
        while self.depth < depth:
            prev = self._rows[-1]
            new: list[Value | None] = [None] * self.quiver.n_plus_one
            for i in self._order:
                top = one
                for s in self._preds[i]:
                    top = top * new[s]
                for d in self._succs[i]:
                    top = top * prev[d]
                value = (top + 1) / prev[i]
                if self.max_terms is not None and self.spec is None and len(value) > self.max_terms:
                    raise ResourceLimitExceeded(
                        self.depth + 1, self.quiver.label(i), len(value), self.max_terms
                    )
                new[i] = value
            self._rows.append(tuple(new))
        return self

    def all_positive(self) -> bool:
        """Every entry is a nonzero value with only positive coefficients (or is a positive rational)."""
        if self.spec is None:
            return all(v.has_positive_coefficients() for r in self._rows for v in r)
        return all(v > 0 for r in self._rows for v in r)

    def specialize(self, spec: RationalSpecialization) -> "FriezeTable":
        """Evaluate a symbolic table cell by cell at ``spec``."""
        if self.spec is not None:
            raise ValueError("table is already specialized")
        out = FriezeTable(self.quiver, spec)
        out._rows = [tuple(v.evaluate(spec.values) for v in r) for r in self._rows]
        return out

    def variable_names(self) -> list[str]:
        return [f"x{lab}" for lab in self.quiver.labels]

    def to_csv(self, start: int = 0, stop: int | None = None) -> str:
        """Vertices as rows, frieze rows as columns; rational entries as ``p/q``."""
        stop = self.depth if stop is None else stop
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["vertex", *range(start, stop + 1)])
        for idx, lab in enumerate(self.quiver.labels):
            w.writerow([lab, *(self._format(self._rows[j][idx]) for j in range(start, stop + 1))])
        return buf.getvalue()

    def _format(self, v: Value) -> str:
        return v.to_text(self.variable_names()) if isinstance(v, LaurentPoly) else str(v)

    def to_json(self, start: int = 0, stop: int | None = None, text: bool = False) -> dict:
        stop = self.depth if stop is None else stop
        self.require(stop)

        def encode(v):
            if isinstance(v, LaurentPoly):
                return v.to_text(self.variable_names()) if text else v.to_json()
            return str(v)

        return {
            "quiver": self.quiver.to_json(),
            "mode": self.mode,
            "spec": None if self.spec is None else [str(v) for v in self.spec],
            "rows": [
                {"j": j, "values": {str(lab): encode(v) for lab, v in zip(self.quiver.labels, r)}}
                for j, r in enumerate(self._rows[start : stop + 1], start)
            ],
        }


def frieze_extend(table: FriezeTable, depth: int) -> FriezeTable:
    return table.extend(depth)


def frieze_symbolic(quiver: QuiverSpec, depth: int, max_terms: int | None = None) -> FriezeTable:
    return FriezeTable(quiver, max_terms=max_terms).extend(depth)


def frieze_specialized(quiver: QuiverSpec, spec: RationalSpecialization, depth: int) -> FriezeTable:
    return FriezeTable(quiver, spec).extend(depth)


@dataclass(frozen=True)
class XDelta:
    value: Value
    vertex: int  # label of the vertex used for the quotient
    row: int

    def to_json(self, names=None) -> dict:
        v = self.value
        return {
            "vertex": self.vertex,
            "row": self.row,
            "value": v.to_text(names) if isinstance(v, LaurentPoly) else str(v),
        }


def x_delta_route(quiver: QuiverSpec, vertex: int | None = None, row: int | None = None):
    """Cells ``(num_a, num_b, den)`` such that ``X_delta = (num_a + num_b) / den``.

    Each cell is ``(label, row)``; ``row`` defaults to the smallest row
    keeping every index nonnegative.
    """
    kind = quiver.kind
    if kind is None:
        raise NotAffineError("X_delta is defined for the affine families only")
    if kind == "A":
        p, q = quiver.params
        size = p + q
        i = 0 if vertex is None else vertex % size
        l, r = apq_l_shift(p, q, i), apq_r_shift(p, q, i)
        j = max(0, l, r) if row is None else row
        return ((i + q) % size, j - r), ((i - q) % size, j - l), (i, j)
    if vertex is None:
        vertex = quiver.label(0)
    if quiver.kind == "D" and quiver.n % 2:
        if vertex not in (0, 1, quiver.n - 1, quiver.n):
            raise ValueError(f"vertex {vertex} is not extending")
        s = quiver.n - 2
        j = s if row is None else row
        t = sigma(quiver, vertex)
        return (t, j + s), (t, j - s), (vertex, j)
    delta = coxeter(quiver).delta
    if delta[quiver.index(vertex)] != 1:
        raise ValueError(f"vertex {vertex} is not extending")
    b = coxeter(quiver).b
    j = b if row is None else row
    return (vertex, j - b), (vertex, j + b), (vertex, j)


def extract_x_delta(table: FriezeTable, vertex: int | None = None, row: int | None = None) -> XDelta:
    """``X_delta`` as the exact quotient of the extending (or A-type) relation."""
    a, b, den = x_delta_route(table.quiver, vertex, row)
    for lab, j in (a, b, den):
        table.require(j)
    value = (table[a] + table[b]) / table[den]
    return XDelta(value, den[0], den[1])
