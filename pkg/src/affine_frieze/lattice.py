"""Root-lattice data of affine quivers.

Vertices carry the labels of the standard pictures: ``0..n`` for the
D and A families, ``1..t+1`` for E_t. Internally every vertex is an index
``0..n`` into ``QuiverSpec.labels``; index 0 is always an extending vertex.

Conventions follow the right-module picture: the Euler form is
``<a, b> = sum a_i b_i - sum c_ji a_i b_j`` with ``c_ji`` the number of
arrows ``j -> i``, and the projective at ``i`` has dimension vector
counting the paths that *end* at ``i``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import permutations
from math import gcd, lcm
from typing import Iterator, Sequence

from . import _matrix as mx
from .errors import InvalidQuiverError, NotAffineError

RootVector = tuple[int, ...]

# arrows of the exceptional quivers in their standard labelling
_E_ARROWS = {
    6: ((1, 2), (2, 7), (5, 6), (6, 7), (3, 4), (4, 7)),
    7: ((1, 2), (2, 3), (3, 8), (4, 5), (5, 6), (6, 8), (7, 8)),
    8: ((1, 2), (2, 3), (3, 4), (4, 5), (5, 9), (7, 8), (8, 9), (6, 9)),
}


@dataclass(frozen=True)
class QuiverSpec:
    """An acyclic quiver, usually one of the affine quivers of ``build_quiver``."""

    kind: str | None
    params: tuple[int, ...]
    labels: tuple[int, ...]
    arrows: tuple[tuple[int, int], ...]  # (source, target) as internal indices
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})
        if len(self._index) != len(self.labels):
            raise InvalidQuiverError("duplicate vertex labels")
        for s, t in self.arrows:
            if not (0 <= s < self.n_plus_one and 0 <= t < self.n_plus_one) or s == t:
                raise InvalidQuiverError(f"bad arrow {(s, t)}")
        if topological_order(self) is None:
            raise InvalidQuiverError("quiver has an oriented cycle")

    @property
    def n_plus_one(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return len(self.labels) - 1

    @property
    def type_tag(self) -> str:
        if self.kind is None:
            return "custom"
        return f"{self.kind}:{','.join(map(str, self.params))}"

    def index(self, label: int) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InvalidQuiverError(f"{self.type_tag} has no vertex {label}") from None

    def label(self, index: int) -> int:
        return self.labels[index]

    def predecessors(self, i: int) -> list[int]:
        """Sources of arrows into ``i``, one entry per arrow."""
        return [s for s, t in self.arrows if t == i]

    def successors(self, i: int) -> list[int]:
        return [t for s, t in self.arrows if s == i]

    def to_json(self) -> dict:
        return {
            "type": self.kind,
            "params": list(self.params),
            "vertices": list(self.labels),
            "arrows": [[self.labels[s], self.labels[t]] for s, t in self.arrows],
        }

    @classmethod
    def from_json(cls, data: dict) -> "QuiverSpec":
        if data.get("type") is not None:
            q = build_quiver((data["type"], *data.get("params", [])))
            if "arrows" in data and sorted(map(tuple, data["arrows"])) != sorted(
                map(tuple, q.to_json()["arrows"])
            ):
                raise InvalidQuiverError("arrows do not match the standard orientation")
            return q
        labels = tuple(data["vertices"])
        index = {lab: i for i, lab in enumerate(labels)}
        arrows = tuple((index[s], index[t]) for s, t in data["arrows"])
        return cls(None, (), labels, arrows)


def reoriented(q: QuiverSpec, arrows: Sequence[tuple[int, int]]) -> QuiverSpec:
    """Same vertices and underlying graph, new arrow directions (given by label)."""
    new = tuple((q.index(s), q.index(t)) for s, t in arrows)
    if sorted(tuple(sorted(a)) for a in new) != sorted(tuple(sorted(a)) for a in q.arrows):
        raise InvalidQuiverError("new arrows do not have the same underlying graph")
    return QuiverSpec(q.kind, q.params, q.labels, new)


def topological_order(q: QuiverSpec) -> list[int] | None:
    """Indices with every arrow's source before its target (None if cyclic)."""
    indeg = [0] * q.n_plus_one
    for _, t in q.arrows:
        indeg[t] += 1
    ready = [i for i in range(q.n_plus_one) if indeg[i] == 0]
    order = []
    while ready:
        i = ready.pop(0)
        order.append(i)
        for t in q.successors(i):
            indeg[t] -= 1
            if indeg[t] == 0:
                ready.append(t)
    return order if len(order) == q.n_plus_one else None


_SELECTOR = re.compile(r"^\s*([ADEade])\s*[:(]?\s*([\d,\s]*)\)?\s*$")


def parse_type(tag) -> tuple[str, tuple[int, ...]]:
    """Normalize ``"D:5"``, ``"A:3,2"``, ``("E", 7)`` ... to ``(kind, params)``."""
    if isinstance(tag, str):
        m = _SELECTOR.match(tag)
        if not m:
            raise InvalidQuiverError(f"cannot parse quiver type {tag!r}")
        kind = m.group(1).upper()
        try:
            params = tuple(int(p) for p in m.group(2).replace(" ", "").split(",") if p)
        except ValueError:
            raise InvalidQuiverError(f"cannot parse quiver type {tag!r}") from None
    else:
        kind, *rest = tag
        kind = str(kind).upper()
        params = tuple(int(p) for p in rest)
    if kind == "A":
        if len(params) != 2 or not 1 <= params[1] <= params[0]:
            raise InvalidQuiverError("A(p,q) needs 1 <= q <= p")
    elif kind == "D":
        if len(params) != 1 or params[0] < 4:
            raise InvalidQuiverError("D(n) needs n >= 4")
    elif kind == "E":
        if len(params) != 1 or params[0] not in _E_ARROWS:
            raise InvalidQuiverError("E(t) needs t in {6, 7, 8}")
    else:
        raise InvalidQuiverError(f"unknown type {kind!r}")
    return kind, params


def build_quiver(tag) -> QuiverSpec:
    """The affine quiver of the given type with the standard labels and orientation.

    >>> build_quiver("D:4").to_json()["arrows"]
    [[4, 2], [3, 2], [2, 1], [2, 0]]
    """
    kind, params = parse_type(tag)
    if kind == "A":
        p, q = params
        # left branch q -> q-1 -> ... -> 0, right branch q -> q+1 -> ... -> p+q-1 -> 0
        arrows = [(i, i - 1) for i in range(q, 0, -1)]
        chain = [q, *range(q + 1, p + q), 0]
        arrows += list(zip(chain, chain[1:]))
        labels = tuple(range(p + q))
    elif kind == "D":
        (n,) = params
        arrows = [(n, n - 2), (n - 1, n - 2)]
        arrows += [(i, i - 1) for i in range(n - 2, 2, -1)]
        arrows += [(2, 1), (2, 0)]
        labels = tuple(range(n + 1))
    else:
        (t,) = params
        labels = tuple(range(1, t + 2))
        arrows = [(s - 1, d - 1) for s, d in _E_ARROWS[t]]
    return QuiverSpec(kind, params, labels, tuple(arrows))


def _vec(q: QuiverSpec, v: Sequence[int]) -> RootVector:
    if len(v) != q.n_plus_one:
        raise ValueError(f"expected a vector of length {q.n_plus_one}, got {len(v)}")
    return tuple(int(x) for x in v)


def simple_root(q: QuiverSpec, label: int) -> RootVector:
    i = q.index(label)
    return tuple(int(k == i) for k in range(q.n_plus_one))


def euler_matrix(q: QuiverSpec) -> mx.Matrix:
    """Matrix ``E`` with ``<a, b> = a^T E b``."""
    rows = [list(r) for r in mx.identity(q.n_plus_one)]
    for s, t in q.arrows:
        rows[t][s] -= 1
    return tuple(tuple(r) for r in rows)


def euler_form(q: QuiverSpec, a: Sequence[int], b: Sequence[int]) -> int:
    a, b = _vec(q, a), _vec(q, b)
    return sum(x * y for x, y in zip(a, mx.mat_vec(euler_matrix(q), b)))


def symmetric_form(q: QuiverSpec, a: Sequence[int], b: Sequence[int]) -> int:
    return euler_form(q, a, b) + euler_form(q, b, a)


def delta_vector(q: QuiverSpec) -> RootVector:
    """Positive primitive generator of the radical of the symmetrized form."""
    e = euler_matrix(q)
    sym = mx.mat_add(e, mx.transpose(e))
    kernel = mx.integer_kernel(sym)
    if len(kernel) != 1:
        raise NotAffineError(f"radical has dimension {len(kernel)}, expected 1")
    (d,) = kernel
    if d[0] < 0:
        d = tuple(-x for x in d)
    if min(d) < 1:
        raise NotAffineError("radical generator is not strictly positive")
    return d


def extending_vertices(q: QuiverSpec) -> list[int]:
    return [q.label(i) for i, x in enumerate(delta_vector(q)) if x == 1]


def defect(q: QuiverSpec, v: Sequence[int]) -> int:
    return euler_form(q, delta_vector(q), v)


def dim_projective(q: QuiverSpec, label: int) -> RootVector:
    """Coordinate ``j`` counts the paths from ``j`` to ``label`` (trivial path included)."""
    target = q.index(label)
    counts = [0] * q.n_plus_one
    counts[target] = 1
    # reverse topological order: every successor is final before its predecessors
    for j in reversed(topological_order(q)):
        if j != target:
            counts[j] = sum(counts[t] for t in q.successors(j))
    return tuple(counts)


def reflection_matrix(q: QuiverSpec, label: int) -> mx.Matrix:
    """``s_i(x) = x - (alpha_i, x) alpha_i`` as a matrix."""
    i = q.index(label)
    e = euler_matrix(q)
    sym = mx.mat_add(e, mx.transpose(e))
    rows = [list(r) for r in mx.identity(q.n_plus_one)]
    rows[i] = [int(k == i) - sym[i][k] for k in range(q.n_plus_one)]
    return tuple(tuple(r) for r in rows)


def admissible_orderings(q: QuiverSpec, limit: int | None = None) -> Iterator[tuple[int, ...]]:
    """Label sequences ``(i_0, ..., i_n)`` whose reflection product is the Coxeter element.

    Each ``i_k`` has no arrow into it from ``i_0, ..., i_{k-1}`` (a sink of that
    full subquiver in the module convention, i.e. a source of the drawing).
    """
    found = 0

    def extend(prefix: list[int], remaining: set[int]):
        nonlocal found
        if limit is not None and found >= limit:
            return
        if not remaining:
            found += 1
            yield tuple(q.label(i) for i in prefix)
            return
        placed = set(prefix)
        for v in sorted(remaining):
            if not any(s in placed for s in q.predecessors(v)):
                prefix.append(v)
                yield from extend(prefix, remaining - {v})
                prefix.pop()
                if limit is not None and found >= limit:
                    return

    yield from extend([], set(range(q.n_plus_one)))


def reflection_product(q: QuiverSpec, ordering: Sequence[int]) -> mx.Matrix:
    out = mx.identity(q.n_plus_one)
    for label in ordering:
        out = mx.mat_mul(out, reflection_matrix(q, label))
    return out


def coxeter_matrix(q: QuiverSpec) -> mx.Matrix:
    """``c = -E^{-1} E^T``, the unique matrix with ``<x, y> = -<y, c x>``."""
    e = euler_matrix(q)
    return mx.mat_neg(mx.mat_mul(mx.inverse(e), mx.transpose(e)))


@dataclass(frozen=True)
class CoxeterData:
    c_matrix: mx.Matrix
    b: int
    m: int
    delta: RootVector

    def to_json(self) -> dict:
        return {
            "c_matrix": [list(r) for r in self.c_matrix],
            "b": self.b,
            "m": self.m,
            "delta": list(self.delta),
        }


def _default_cap(q: QuiverSpec, delta: RootVector) -> int:
    return 10 * q.n_plus_one * max(delta)


def _rank_one_multiplier(diff: mx.Matrix, rank_one: mx.Matrix) -> int | None:
    """Integer ``m`` with ``diff == -m * rank_one`` and ``m != 0``, else None."""
    m = None
    for rd, rr in zip(diff, rank_one):
        for x, y in zip(rd, rr):
            if y == 0:
                if x != 0:
                    return None
                continue
            if x % y:
                return None
            cand = -x // y
            if m is None:
                m = cand
            elif cand != m:
                return None
    return m or None


def coxeter(q: QuiverSpec, cap: int | None = None) -> CoxeterData:
    """Coxeter matrix and the minimal ``(b, m)`` with ``c^b - id = -m <-, delta> delta``."""
    c = coxeter_matrix(q)
    delta = delta_vector(q)
    cap = cap or _default_cap(q, delta)
    e = euler_matrix(q)
    # x -> <x, delta> delta  ==  delta (E delta)^T x
    rank_one = mx.outer(delta, mx.mat_vec(e, delta))
    ident = mx.identity(q.n_plus_one)
    power = c
    for k in range(1, cap + 1):
        m = _rank_one_multiplier(mx.mat_add(power, ident, -1), rank_one)
        if m is not None:
            return CoxeterData(c, k, m, delta)
        power = mx.mat_mul(power, c)
    raise NotAffineError(f"no exponent <= {cap} gives a rank-one defect map")


def coxeter_orbit(q: QuiverSpec, v: Sequence[int], k: int) -> RootVector:
    return mx.mat_vec(mx.mat_pow(coxeter_matrix(q), k), _vec(q, v))


def _drop_extending(q: QuiverSpec) -> QuiverSpec:
    keep = list(range(1, q.n_plus_one))
    new_index = {old: new for new, old in enumerate(keep)}
    arrows = tuple((new_index[s], new_index[t]) for s, t in q.arrows if s and t)
    return QuiverSpec(None, (), tuple(q.labels[i] for i in keep), arrows)


def order_s_theta_cprime(q: QuiverSpec, cap: int | None = None) -> int:
    """Order of ``s_theta c'`` on the root lattice of the Dynkin quiver ``Q' = Q - {0}``."""
    delta = delta_vector(q)
    if delta[0] != 1:
        raise NotAffineError("vertex 0 is not extending")
    sub = _drop_extending(q)
    theta = delta[1:]  # alpha_0 = delta - theta
    c_sub = coxeter_matrix(sub)
    e = euler_matrix(sub)
    sym = mx.mat_add(e, mx.transpose(e))
    # s_theta(x) = x - (theta, x) theta
    s_theta = mx.mat_add(mx.identity(sub.n_plus_one), mx.outer(theta, mx.mat_vec(sym, theta)), -1)
    cap = cap or _default_cap(q, delta)
    order = mx.multiplicative_order(mx.mat_mul(s_theta, c_sub), cap)
    if order is None:
        raise NotAffineError(f"order of s_theta c' exceeds {cap}")
    return order


def expected_b_m(tag) -> tuple[int, int]:
    """Closed-form ``(b, |m|)`` per type."""
    kind, params = parse_type(tag)
    if kind == "E":
        return {6: 6, 7: 12, 8: 30}[params[0]], 1
    if kind == "D":
        (n,) = params
        return (n - 2, 1) if n % 2 == 0 else (2 * n - 4, 2)
    p, q = params
    return lcm(p, q), (p + q) // gcd(p + q, q)


def apq_l_shift(p: int, q: int, i: int) -> int:
    """``l_i`` of the A(p,q) relations, vertex labels read modulo ``p + q``."""
    i %= p + q
    return i - q if i <= q else max(q - i, -q)


def apq_r_shift(p: int, q: int, i: int) -> int:
    """``r_i = -l_{i+q}``."""
    return -apq_l_shift(p, q, i + q)


def sigma(q: QuiverSpec, label: int) -> int:
    """Diagram automorphism of D(n) swapping 0<->1 and (n-1)<->n."""
    if q.kind != "D":
        raise InvalidQuiverError("sigma is defined on D(n) only")
    n = q.n
    return {0: 1, 1: 0, n - 1: n, n: n - 1}.get(label, label)


def projective_shift_identities(q: QuiverSpec) -> list[tuple[int, RootVector, RootVector]]:
    """Both sides of the dimension-vector identities relating Coxeter powers of projectives.

    D(n), n odd, extending ``i``: ``c^{n-2} dim P_i`` vs ``dim P_{sigma i} - delta``.
    A(p,q), every ``i``: ``c^{l_i} dim P_{i-q}`` vs ``dim P_i + delta``.
    """
    delta = delta_vector(q)
    out = []
    if q.kind == "D":
        n = q.n
        if n % 2 == 0:
            raise InvalidQuiverError("identity (a) needs n odd")
        for i in (0, 1, n - 1, n):
            lhs = coxeter_orbit(q, dim_projective(q, i), n - 2)
            rhs = tuple(x - d for x, d in zip(dim_projective(q, sigma(q, i)), delta))
            out.append((i, lhs, rhs))
    elif q.kind == "A":
        p, qq = q.params
        size = p + qq
        for i in range(size):
            lhs = coxeter_orbit(q, dim_projective(q, (i - qq) % size), apq_l_shift(p, qq, i))
            rhs = tuple(x + d for x, d in zip(dim_projective(q, i), delta))
            out.append((i, lhs, rhs))
    else:
        raise InvalidQuiverError("identities are stated for D(n odd) and A(p,q)")
    return out


def all_orderings_matching(q: QuiverSpec) -> list[tuple[int, ...]]:
    """Brute-force list of label orders whose reflection product equals ``c`` (small quivers)."""
    c = coxeter_matrix(q)
    return [p for p in permutations(q.labels) if reflection_product(q, p) == c]
