"""Linear recurrences: annihilating polynomials, Berlekamp-Massey, and the
tables of conjectured minimal recurrences for frieze sequences."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .errors import InsufficientDepth, UnknownConjecture
from .frieze import FriezeTable, extract_x_delta, x_delta_route
from .lattice import QuiverSpec, build_quiver, parse_type
from .laurent import RationalSpecialization


class AnnihilatorPoly:
    """Monic ``lambda^s + c_{s-1} lambda^{s-1} + ... + c_0`` stored as ascending ``(c_0, ..., c_{s-1}, 1)``.

    The recurrence it encodes is ``a_{j+s} = alpha_0 a_j + ... + alpha_{s-1} a_{j+s-1}``
    with ``alpha_t = -c_t``. Coefficients may be any commutative ring elements
    (``Fraction`` for detection, Laurent polynomials for symbolic checks).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Any]):
        coeffs = list(coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        lead = coeffs[-1]
        if lead != 1:
            coeffs = [c / lead for c in coeffs]
        self.coeffs = tuple(coeffs)

    @classmethod
    def from_alphas(cls, alphas: Sequence[Any]) -> "AnnihilatorPoly":
        return cls([-a for a in alphas] + [1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def alphas(self) -> tuple:
        return tuple(-c for c in self.coeffs[:-1])

    def __mul__(self, other: "AnnihilatorPoly") -> "AnnihilatorPoly":
        out = [0] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            for k, b in enumerate(other.coeffs):
                out[i + k] = out[i + k] + a * b
        return AnnihilatorPoly(out)

    def __eq__(self, other):
        return isinstance(other, AnnihilatorPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"AnnihilatorPoly({self.to_text()!r})"

    def to_text(self) -> str:
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("λ" if k == 1 else f"λ^{k}")
            if mono and c == 1:
                body = mono
            elif mono and c == -1:
                body = "-" + mono
            else:
                body = f"{c}*{mono}" if mono else str(c)
            parts.append(body)
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]


def annihilates(seq: Sequence[Any], poly: AnnihilatorPoly, window: tuple[int, int] | None = None) -> bool:
    """True iff ``a_{j+s} = sum_t alpha_t a_{j+t}`` for every start ``j`` in the window."""
    s = poly.degree
    last = len(seq) - 1 - s
    a, b = (0, last) if window is None else window
    if a < 0 or b > last or a > b:
        raise InsufficientDepth(f"window {(a, b)} needs {s} look-ahead terms; {len(seq)} available")
    c = poly.coeffs
    for j in range(a, b + 1):
        total = seq[j + s]
        for t in range(s):
            total = total + c[t] * seq[j + t]
        if total != 0:
            return False
    return True


def berlekamp_massey(seq: Sequence) -> AnnihilatorPoly:
    """Minimal annihilator of a finite sequence over the rationals."""
    seq = [Fraction(x) for x in seq]
    conn = [Fraction(1)]  # connection polynomial 1 + c_1 x + ... + c_L x^L
    prev = [Fraction(1)]
    length, shift, prev_disc = 0, 1, Fraction(1)
    for k, value in enumerate(seq):
        disc = value
        for i in range(1, length + 1):
            disc += conn[i] * seq[k - i]
        if disc == 0:
            shift += 1
            continue
        factor = disc / prev_disc
        update = conn + [Fraction(0)] * max(0, len(prev) + shift - len(conn))
        for i, p in enumerate(prev):
            update[i + shift] -= factor * p
        if 2 * length <= k:
            prev, prev_disc = conn, disc
            length = k + 1 - length
            shift = 1
        else:
            shift += 1
        conn = update
    conn = conn + [Fraction(0)] * (length + 1 - len(conn))
    if length == 0:
        return AnnihilatorPoly([Fraction(0), Fraction(1)])
    # annihilator is the reversal lambda^L * C(1/lambda)
    return AnnihilatorPoly([conn[length - k] for k in range(length + 1)])


def compose_sum(p: AnnihilatorPoly, q: AnnihilatorPoly) -> AnnihilatorPoly:
    """Annihilator of the termwise sum of a p-sequence and a q-sequence."""
    return p * q


def companion_matrix(poly: AnnihilatorPoly) -> list[list]:
    """Matrix advancing ``(a_j, ..., a_{j+s-1})`` by one step."""
    s = poly.degree
    rows = [[int(c == r + 1) for c in range(s)] for r in range(s - 1)]
    rows.append(list(poly.alphas))
    return rows


@dataclass(frozen=True)
class CompanionMatrix:
    poly: AnnihilatorPoly

    @property
    def matrix(self) -> list[list]:
        return companion_matrix(self.poly)

    def charpoly(self) -> AnnihilatorPoly:
        return charpoly(self.matrix)


def charpoly(m: Sequence[Sequence[Any]]) -> AnnihilatorPoly:
    """``det(lambda I - m)`` by Berkowitz's division-free recursion."""
    n = len(m)
    if n == 0:
        return AnnihilatorPoly([1])
    desc = [1, -m[0][0]]  # descending coefficients for the leading 1x1 block
    for r in range(1, n):
        row = m[r][:r]
        col = [m[i][r] for i in range(r)]
        toeplitz = [1, -m[r][r]]
        vec = col
        for _ in range(r):
            toeplitz.append(-sum((x * y for x, y in zip(row, vec)), 0))
            vec = [sum((m[i][k] * vec[k] for k in range(r)), 0) for i in range(r)]
        desc = [sum((toeplitz[i] * desc[k - i] for i in range(k + 1) if k - i < len(desc)), 0)
                for k in range(r + 2)]
    return AnnihilatorPoly(desc[::-1])


def kronecker(a: Sequence[Sequence[Any]], b: Sequence[Sequence[Any]]) -> list[list]:
    return [[x * y for x in ra for y in rb] for ra in a for rb in b]


def compose_product(p: AnnihilatorPoly, q: AnnihilatorPoly) -> AnnihilatorPoly:
    """Annihilator of the termwise product: charpoly of the Kronecker product of companions."""
    return charpoly(kronecker(companion_matrix(p), companion_matrix(q)))


def vector_recurrence_reduce(matrices: Sequence[Sequence[Sequence[Any]]]) -> AnnihilatorPoly:
    """``det(lambda^s - lambda^{s-1} A_{s-1} - ... - A_0)`` for ``v_{j+s} = sum_t A_t v_{j+t}``."""
    s = len(matrices)
    if s == 0:
        raise ValueError("need at least one matrix")
    k = len(matrices[0])
    if any(len(a) != k or any(len(r) != k for r in a) for a in matrices):
        raise ValueError("matrices must be square and of equal size")
    size = s * k
    block = [[0] * size for _ in range(size)]
    for r in range(size - k):
        block[r][r + k] = 1
    for t, a in enumerate(matrices):
        for i in range(k):
            for j in range(k):
                block[size - k + i][t * k + j] = a[i][j]
    return charpoly(block)


# ---------------------------------------------------------------- patterns

def _cheb(name: str, x):
    return {"X": lambda: x, "-X": lambda: -x, "X^2-2": lambda: x * x - 2,
            "X^3-3X": lambda: x * x * x - 3 * x}[name]()


@dataclass(frozen=True)
class ConjecturePattern:
    """Product of factors ``("P", 2d, c)`` = ``lambda^{2d} - c lambda^d + 1`` and ``("cyc", k)`` = ``lambda^k - 1``.

    ``c`` is one of ``"X"``, ``"-X"``, ``"X^2-2"``, ``"X^3-3X"`` in ``X = X_delta``.
    ``table_degree`` is the degree listed next to the pattern; it differs
    from the expanded degree for one ambiguous row of the even D table.
    """

    factors: tuple
    table_degree: int
    tabulated: tuple | None = None  # factors exactly as tabulated, when they differ from ``factors``

    @property
    def degree(self) -> int:
        return sum(f[1] for f in self.factors)

    @property
    def ambiguous(self) -> bool:
        return self.degree != self.table_degree

    def expand(self, x_delta, factors=None) -> AnnihilatorPoly:
        out = AnnihilatorPoly([1])
        for f in factors or self.factors:
            if f[0] == "cyc":
                out = out * AnnihilatorPoly([-1] + [0] * (f[1] - 1) + [1])
            else:
                d = f[1] // 2
                c = _cheb(f[2], x_delta)
                out = out * AnnihilatorPoly([1] + [0] * (d - 1) + [-c] + [0] * (d - 1) + [1])
        return out

    def to_text(self, factors=None) -> str:
        parts = []
        for f in factors or self.factors:
            parts.append(f"(λ^{f[1]}-1)" if f[0] == "cyc" else f"P({f[1]},{f[2]})")
        return "".join(parts)


def _P(two_d, c="X"):
    return ("P", two_d, c)


def _cyc(k):
    return ("cyc", k)


_E_TABLE = {
    6: {
        (1, 3, 5): ((_P(12),), 12),
        (2, 4, 6): ((_cyc(3), _P(6)), 9),
        (7,): ((_P(4), _P(12)), 16),
    },
    7: {
        (1, 4): ((_P(24),), 24),
        (2, 5): ((_cyc(12), _P(12), _P(12, "-X")), 36),
        (3, 6): ((_P(24), _P(8)), 32),
        (7,): ((_cyc(6), _P(12)), 18),
        (8,): ((_cyc(6), _P(12), _P(6, "-X")), 24),
    },
    8: {
        (1,): ((_P(60),), 60),
        (2, 7): ((_cyc(15), _P(30)), 45),
        (3, 6): ((_P(60), _P(20)), 80),
        (4, 8): ((_cyc(15), _P(30), _P(30, "X^2-2")), 75),
        (5,): ((_P(60), _P(12), _P(60, "X^3-3X")), 132),
        (9,): ((_cyc(15), _P(30), _P(30, "X^2-2"), _P(10)), 85),
    },
}


def conjecture_pattern(type_tag, vertex: int) -> ConjecturePattern:
    """Conjectured minimal annihilator of the frieze sequence at ``vertex``.

    Even D(n), n > 4, lists vertices up to n/2; a vertex ``i`` in
    ``(n/2, n-2]`` uses the entry of its mirror image ``n - i``.
    """
    kind, params = parse_type(type_tag)
    q = build_quiver((kind, *params))
    q.index(vertex)
    if kind == "E":
        for verts, (factors, deg) in _E_TABLE[params[0]].items():
            if vertex in verts:
                return ConjecturePattern(factors, deg)
    elif kind == "D":
        (n,) = params
        if n == 4:
            if vertex == 2:
                return ConjecturePattern((_cyc(1), _P(2)), 3)
            return ConjecturePattern((_P(4),), 4)
        if vertex in (0, 1, n - 1, n):
            if n % 2 == 0:
                return ConjecturePattern((_P(2 * n - 4),), 2 * n - 4)
            # the second-order extending relation forces c = X^2 - 2 here
            return ConjecturePattern((_P(4 * n - 8, "X^2-2"),), 4 * n - 8, (_P(4 * n - 8),))
        if n % 2 == 0:
            i = min(vertex, n - vertex)
            if i == n // 2:
                return ConjecturePattern((_cyc(n // 2 - 1), _P(n - 2)), 3 * n // 2 - 3)
            return ConjecturePattern((_cyc(n - 2), _P(n - 2), _P(n - 2, "-X")), 2 * n - 4)
    raise UnknownConjecture(f"no conjectured pattern for {kind}:{','.join(map(str, params))} vertex {vertex}")


# ---------------------------------------------------------------- detection

@dataclass
class DetectionResult:
    spec: RationalSpecialization
    terms: int
    poly: AnnihilatorPoly
    x_delta: Fraction | None = None
    expected: AnnihilatorPoly | None = None
    tabulated: AnnihilatorPoly | None = None

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def stable(self) -> bool:
        """Enough terms that the detected degree is pinned down (``2L + 10 <= N``)."""
        return 2 * self.degree + 10 <= self.terms

    def to_json(self, quiver: QuiverSpec, vertex: int) -> dict:
        out = {
            "type": quiver.type_tag,
            "vertex": vertex,
            "spec": self.spec.to_text(quiver.labels),
            "terms": self.terms,
            "detected_degree": self.degree,
            "detected_poly": self.poly.to_json(),
            "stable": self.stable,
        }
        if self.expected is not None:
            out["x_delta"] = str(self.x_delta)
            out["matches_conjecture"] = self.poly == self.expected
        if self.tabulated is not None:
            out["matches_tabulated_pattern"] = self.poly == self.tabulated
        return out


@dataclass
class ConjectureReport:
    quiver: QuiverSpec
    vertex: int
    pattern: ConjecturePattern | None
    results: list[DetectionResult]
    unlucky: list[DetectionResult] = field(default_factory=list)

    @property
    def degrees(self) -> list[int]:
        return [r.degree for r in self.results]

    @property
    def consistent(self) -> bool:
        return len(set(self.degrees)) == 1 and all(r.stable for r in self.results)

    @property
    def matches(self) -> bool | None:
        if self.pattern is None:
            return None
        return all(r.poly == r.expected for r in self.results)

    @property
    def passed(self) -> bool:
        return self.consistent and self.matches is not False

    def to_json(self) -> dict:
        out = {
            "type": self.quiver.type_tag,
            "vertex": self.vertex,
            "consistent": self.consistent,
            "detected_degree": self.degrees[0] if self.consistent else None,
            "results": [r.to_json(self.quiver, self.vertex) for r in self.results],
            "unlucky": [r.to_json(self.quiver, self.vertex) for r in self.unlucky],
        }
        if self.pattern is not None:
            out["pattern"] = self.pattern.to_text()
            out["table_degree"] = self.pattern.table_degree
            out["pattern_degree"] = self.pattern.degree
            out["matches_conjecture"] = self.matches
            if self.pattern.tabulated is not None:
                out["tabulated_pattern"] = self.pattern.to_text(self.pattern.tabulated)
            if self.pattern.ambiguous and self.consistent:
                d = self.degrees[0]
                out["matches_table_degree"] = d == self.pattern.table_degree
                out["matches_pattern_degree"] = d == self.pattern.degree
        return out


def detect(quiver: QuiverSpec, vertex: int, spec: RationalSpecialization, terms: int,
           pattern: ConjecturePattern | None = None) -> DetectionResult:
    """Berlekamp-Massey on the first ``terms`` entries of the specialized sequence at ``vertex``."""
    table = FriezeTable(quiver, spec).extend(terms - 1)
    seq = table.column(vertex)
    result = DetectionResult(spec, terms, berlekamp_massey(seq))
    if pattern is not None:
        cells = x_delta_route(quiver)
        table.extend(max(j for _, j in cells))
        result.x_delta = extract_x_delta(table).value
        result.expected = pattern.expand(result.x_delta)
        if pattern.tabulated is not None:
            result.tabulated = pattern.expand(result.x_delta, pattern.tabulated)
    return result


def _detect_job(args):
    tag, vertex, values, terms, with_pattern = args
    q = build_quiver(tag)
    pattern = conjecture_pattern(tag, vertex) if with_pattern else None
    return detect(q, vertex, RationalSpecialization(values), terms, pattern)


def _detect_adaptive(quiver, vertex, spec, terms, pattern, cap):
    while True:
        r = detect(quiver, vertex, spec, terms, pattern)
        if r.stable or terms >= cap:
            return r
        terms = min(cap, max(2 * terms, 2 * r.degree + 10))


def check_conjecture(
    quiver: QuiverSpec,
    vertex: int,
    specs: int | Sequence[RationalSpecialization] = 3,
    seed: int = 0,
    terms: int | None = None,
    retries: int = 3,
    jobs: int = 1,
    use_pattern: bool = True,
    cap: int = 400,
) -> ConjectureReport:
    """Detect the minimal recurrence at several specializations and compare with the table.

    When the specializations disagree, the ones reporting a lower degree are
    set aside as unlucky (a special point can only lower the degree) and
    replaced by fresh random points, up to ``retries`` rounds. Without a
    table entry (or with ``use_pattern=False``) the number of terms grows
    until ``2L + 10`` terms back the detected degree ``L``.
    """
    rng = random.Random(seed)
    pattern = None
    if use_pattern:
        pattern = conjecture_pattern(quiver.type_tag, vertex)
    if terms is None:
        terms = 2 * pattern.degree + 10 if pattern is not None else 40
    if isinstance(specs, int):
        specs = [RationalSpecialization.random(quiver.n_plus_one, rng) for _ in range(specs)]
    specs = list(specs)

    def run(batch):
        if pattern is not None or jobs > 1:
            if jobs > 1:
                args = [(quiver.type_tag, vertex, s.values, terms, pattern is not None) for s in batch]
                with ProcessPoolExecutor(jobs) as pool:
                    return list(pool.map(_detect_job, args))
            return [detect(quiver, vertex, s, terms, pattern) for s in batch]
        return [_detect_adaptive(quiver, vertex, s, terms, None, cap) for s in batch]

    results = run(specs)
    unlucky: list[DetectionResult] = []
    for _ in range(retries):
        top = max(r.degree for r in results)
        low = [r for r in results if r.degree < top]
        if not low:
            break
        unlucky.extend(low)
        fresh = [RationalSpecialization.random(quiver.n_plus_one, rng) for _ in low]
        results = [r for r in results if r.degree == top] + run(fresh)
    return ConjectureReport(quiver, vertex, pattern, results, unlucky)
