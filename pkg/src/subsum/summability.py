"""Infinite summability matrices and their transforms, exactly.

Matrices are given structurally (running-average, identity, row-dropped,
explicit finite tables extended by zero rows, or generator functions with
declared support or tail bounds).  All transform values on verdict paths are
exact rationals; a transform of a non-row-finite row is only reported
together with a certified tail bound, never silently truncated.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import setlang
from .ideals import IN, NOT_IN, DEFAULT_SCALE, IdealPresentation, MembershipVerdict, _undecided
from .setlang import (
    AP,
    Finite,
    SetDescription,
    Tri,
    Union,
    exact_density,
    is_cofinite,
    is_finite,
    member,
    render,
)

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_COLUMN_CAP = 1 << 20


class DomainRiskError(RuntimeError):
    """No certified tail machinery covers this matrix/sequence pair."""


class TailToleranceError(RuntimeError):
    """The certified tail bound did not reach the requested tolerance."""


class MatrixSpecError(ValueError):
    pass


class SequenceSpecError(ValueError):
    pass


# ---------------------------------------------------------------- sequences


@dataclass(frozen=True)
class SequenceSpec:
    """A sequence x: N -> Q with the declarations transforms rely on.

    ``sup_bound`` is a certified bound on sup |x_n|; ``ratio_bound(k)`` is a
    certified nonincreasing bound on |x_{k+1}| / |x_k|; ``abs_search(M)``
    returns an index h with |x_h| >= M (the least such for monotone |x|).
    Declarations are part of the sequence's definition; nothing is inferred
    from sampled values.
    """

    name: str
    fn: Callable[[int], Fraction] = field(compare=False)
    sup_bound: Fraction | None = None
    ratio_bound: Callable[[int], Fraction] | None = field(default=None, compare=False)
    unbounded: bool = False
    abs_search: Callable[[Fraction], int] | None = field(default=None, compare=False)

    def value(self, n: int) -> Fraction:
        if n < 1:
            raise ValueError("sequences are indexed from 1")
        return Fraction(self.fn(n))

    def values(self, limit: int) -> list[Fraction]:
        return [self.value(n) for n in range(1, limit + 1)]


def _ceil_fraction(value: Fraction) -> int:
    return -((-value.numerator) // value.denominator)


def _seq_naturals() -> SequenceSpec:
    return SequenceSpec(
        name="n",
        fn=lambda n: Fraction(n),
        ratio_bound=lambda k: Fraction(k + 1, k),
        unbounded=True,
        abs_search=lambda m: max(1, _ceil_fraction(m)),
    )


def _seq_signed_naturals() -> SequenceSpec:
    return SequenceSpec(
        name="nalt",
        fn=lambda n: Fraction(n if n % 2 == 0 else -n),
        ratio_bound=lambda k: Fraction(k + 1, k),
        unbounded=True,
        abs_search=lambda m: max(1, _ceil_fraction(m)),
    )


def _seq_alternating() -> SequenceSpec:
    # (0, 1, 0, 1, ...): 1 on even indices.
    return SequenceSpec(
        name="alt",
        fn=lambda n: ONE if n % 2 == 0 else ZERO,
        sup_bound=ONE,
    )


def _seq_alt10() -> SequenceSpec:
    # (1, 0, 1, 0, ...): 1 on odd indices.
    return SequenceSpec(
        name="alt10",
        fn=lambda n: ONE if n % 2 == 1 else ZERO,
        sup_bound=ONE,
    )


def _blocks01_bit(n: int) -> int:
    # 1 exactly on blocks [2**(2j), 2**(2j+1)).
    return 1 if (n.bit_length() - 1) % 2 == 0 else 0


def _seq_blocks01() -> SequenceSpec:
    return SequenceSpec(
        name="blocks01",
        fn=lambda n: Fraction(_blocks01_bit(n)),
        sup_bound=ONE,
    )


def _seq_sqperturb() -> SequenceSpec:
    from math import isqrt

    def fn(n: int) -> Fraction:
        r = isqrt(n)
        if r * r == n:
            return Fraction(n)
        return 1 + Fraction(1, n)

    def search(m: Fraction) -> int:
        for n in (1, 2):
            if abs(fn(n)) >= m:
                return n
        r = max(2, _ceil_fraction(m))
        s = isqrt(r)
        if s * s < r:
            s += 1
        return s * s

    return SequenceSpec(
        name="sqperturb", fn=fn, unbounded=True, abs_search=search
    )


def _parse_rational(text: str) -> Fraction:
    return Fraction(text)


_NAMED_SEQUENCES = {
    "n": _seq_naturals,
    "nalt": _seq_signed_naturals,
    "alt": _seq_alternating,
    "alt10": _seq_alt10,
    "blocks01": _seq_blocks01,
    "sqperturb": _seq_sqperturb,
}


def parse_sequence(spec: str) -> SequenceSpec:
    """Named sequences plus ``const:<p/q>``, ``list:<v1,v2,...>`` and
    ``rle:<bit>x<len>,...`` (finite prefixes extended by zero)."""
    spec = spec.strip()
    maker = _NAMED_SEQUENCES.get(spec)
    if maker is not None:
        return maker()
    if spec.startswith("const:"):
        v = _parse_rational(spec[len("const:"):])
        return SequenceSpec(
            name=spec, fn=lambda n: v, sup_bound=abs(v), ratio_bound=lambda k: ONE
        )
    if spec.startswith("list:"):
        vals = tuple(_parse_rational(t) for t in spec[len("list:"):].split(","))
        return sequence_from_values(vals, name=spec)
    if spec.startswith("rle:"):
        return sequence_from_rle(parse_rle(spec[len("rle:"):]))
    raise SequenceSpecError(f"unknown sequence spec {spec!r}")


def sequence_from_values(vals: tuple[Fraction, ...], name: str) -> SequenceSpec:
    sup = max((abs(v) for v in vals), default=ZERO)
    return SequenceSpec(
        name=name,
        fn=lambda n: vals[n - 1] if n <= len(vals) else ZERO,
        sup_bound=sup,
    )


def parse_rle(text: str) -> list[tuple[int, int]]:
    runs = []
    for chunk in text.split(","):
        bit_text, _, len_text = chunk.partition("x")
        runs.append((int(bit_text), int(len_text)))
    return runs


def render_rle(bits: list[int]) -> str:
    if not bits:
        return ""
    runs = []
    current, length = bits[0], 1
    for b in bits[1:]:
        if b == current:
            length += 1
        else:
            runs.append(f"{current}x{length}")
            current, length = b, 1
    runs.append(f"{current}x{length}")
    return ",".join(runs)


def sequence_from_rle(runs: list[tuple[int, int]]) -> SequenceSpec:
    bits: list[Fraction] = []
    for bit, length in runs:
        if length < 0:
            raise SequenceSpecError("run lengths must be >= 0")
        bits.extend([Fraction(bit)] * length)
    name = "rle:" + ",".join(f"{b}x{l}" for b, l in runs)
    return sequence_from_values(tuple(bits), name=name)


def indicator_sequence(s: SetDescription) -> SequenceSpec:
    return SequenceSpec(
        name=f"indicator:{render(s)}",
        fn=lambda n: ONE if member(s, n) else ZERO,
        sup_bound=ONE,
    )


# ---------------------------------------------------------------- single rows


@dataclass(frozen=True)
class RowSeq:
    """One matrix row a: N -> Q with optional support / tail declarations.

    ``support``: last index that can be nonzero (row-finite rows).
    ``l1_tail(K)``: certified bound on sum_{k>K} |a_k|.
    ``ratio``: (rho, k0) with |a_{k+1}| <= rho * |a_k| for k >= k0, rho < 1.
    """

    name: str
    fn: Callable[[int], Fraction] = field(compare=False)
    support: int | None = None
    l1_tail: Callable[[int], Fraction] | None = field(default=None, compare=False)
    ratio: tuple[Fraction, int] | None = None

    def entry(self, k: int) -> Fraction:
        if k < 1:
            raise ValueError("rows are indexed from 1")
        if self.support is not None and k > self.support:
            return ZERO
        return Fraction(self.fn(k))


def _row_geometric() -> RowSeq:
    return RowSeq(
        name="geometric",
        fn=lambda k: Fraction(1, 1 << k),
        l1_tail=lambda k: Fraction(1, 1 << k),
        ratio=(Fraction(1, 2), 1),
    )


def _row_harmonic() -> RowSeq:
    return RowSeq(name="harmonic", fn=lambda k: Fraction(1, k))


def _row_ones() -> RowSeq:
    return RowSeq(name="ones", fn=lambda k: ONE)


_NAMED_ROWS = {
    "geometric": _row_geometric,
    "harmonic": _row_harmonic,
    "ones": _row_ones,
}


def parse_row(spec: str) -> RowSeq:
    """Named rows plus ``list:<v1,v2,...>`` (finitely supported)."""
    spec = spec.strip()
    maker = _NAMED_ROWS.get(spec)
    if maker is not None:
        return maker()
    if spec.startswith("list:"):
        vals = tuple(_parse_rational(t) for t in spec[len("list:"):].split(","))
        return RowSeq(
            name=spec,
            fn=lambda k: vals[k - 1] if k <= len(vals) else ZERO,
            support=len(vals),
        )
    raise MatrixSpecError(f"unknown row spec {spec!r}")


# ---------------------------------------------------------------- matrices


class SummabilityMatrix:
    """Common interface: exact entries, structural row support, spec string."""

    kind: str = "abstract"

    def entry(self, n: int, k: int) -> Fraction:
        raise NotImplementedError

    def row_support(self, n: int) -> int | None:
        """Last nonzero column of row n (0 for a zero row), None if unknown."""
        raise NotImplementedError

    @property
    def row_finite(self) -> bool:
        """Structurally known to have finitely supported rows."""
        return False

    def row(self, n: int, width: int) -> list[Fraction]:
        return [self.entry(n, k) for k in range(1, width + 1)]

    def row_l1(self, n: int) -> Fraction:
        support = self.row_support(n)
        if support is None:
            raise DomainRiskError("row l1 norm needs a row-finite matrix")
        return sum((abs(self.entry(n, k)) for k in range(1, support + 1)), ZERO)

    def row_sum(self, n: int) -> Fraction:
        support = self.row_support(n)
        if support is None:
            raise DomainRiskError("row sum needs a row-finite matrix")
        return sum((self.entry(n, k) for k in range(1, support + 1)), ZERO)

    def l1_tail(self, n: int, after: int) -> Fraction | None:
        """Certified bound on sum_{k>after} |a_{n,k}|, when available."""
        support = self.row_support(n)
        if support is not None:
            if after >= support:
                return ZERO
            return sum(
                (abs(self.entry(n, k)) for k in range(after + 1, support + 1)), ZERO
            )
        return None

    def term_ratio(self, n: int) -> tuple[Fraction, int] | None:
        return None

    def spec_string(self) -> str:
        raise NotImplementedError


class CesaroMatrix(SummabilityMatrix):
    """Running averages: a_{n,k} = 1/n for k <= n, else 0."""

    kind = "cesaro"

    def entry(self, n: int, k: int) -> Fraction:
        if n < 1 or k < 1:
            raise ValueError("indices start at 1")
        return Fraction(1, n) if k <= n else ZERO

    def row_support(self, n: int) -> int:
        return n

    @property
    def row_finite(self) -> bool:
        return True

    def spec_string(self) -> str:
        return "cesaro"

    def __eq__(self, other):
        return isinstance(other, CesaroMatrix)

    def __hash__(self):
        return hash("cesaro")


class IdentityMatrix(SummabilityMatrix):
    kind = "identity"

    def entry(self, n: int, k: int) -> Fraction:
        if n < 1 or k < 1:
            raise ValueError("indices start at 1")
        return ONE if n == k else ZERO

    def row_support(self, n: int) -> int:
        return n

    @property
    def row_finite(self) -> bool:
        return True

    def spec_string(self) -> str:
        return "identity"

    def __eq__(self, other):
        return isinstance(other, IdentityMatrix)

    def __hash__(self):
        return hash("identity")


class RowDropMatrix(SummabilityMatrix):
    """Base matrix with the rows in ``drop`` replaced by zero rows."""

    kind = "rowdrop"

    def __init__(self, base: SummabilityMatrix, drop: SetDescription):
        self.base = base
        self.drop = drop

    def entry(self, n: int, k: int) -> Fraction:
        if member(self.drop, n):
            if k < 1:
                raise ValueError("indices start at 1")
            return ZERO
        return self.base.entry(n, k)

    def row_support(self, n: int) -> int | None:
        if member(self.drop, n):
            return 0
        return self.base.row_support(n)

    @property
    def row_finite(self) -> bool:
        return self.base.row_finite

    def spec_string(self) -> str:
        return f"rowdrop:{self.base.spec_string()}:{render(self.drop)}"

    def __eq__(self, other):
        return (
            isinstance(other, RowDropMatrix)
            and self.base == other.base
            and self.drop == other.drop
        )

    def __hash__(self):
        return hash(("rowdrop", self.base, self.drop))


class ExplicitMatrix(SummabilityMatrix):
    """Finitely many stored rows; all later rows are zero rows."""

    kind = "explicit"

    def __init__(self, rows: list[list[Fraction]] | tuple[tuple[Fraction, ...], ...]):
        self.rows = tuple(tuple(Fraction(v) for v in row) for row in rows)

    def entry(self, n: int, k: int) -> Fraction:
        if n < 1 or k < 1:
            raise ValueError("indices start at 1")
        if n > len(self.rows):
            return ZERO
        row = self.rows[n - 1]
        return row[k - 1] if k <= len(row) else ZERO

    def row_support(self, n: int) -> int:
        if n > len(self.rows):
            return 0
        row = self.rows[n - 1]
        for k in range(len(row), 0, -1):
            if row[k - 1] != 0:
                return k
        return 0

    @property
    def row_finite(self) -> bool:
        return True

    def spec_string(self) -> str:
        body = ";".join(",".join(str(v) for v in row) for row in self.rows)
        return f"explicit:{body}"

    def __eq__(self, other):
        return isinstance(other, ExplicitMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(("explicit", self.rows))


class GeneratorMatrix(SummabilityMatrix):
    """Entries from a function, with declared support or tail structure.

    A generator must declare either a row support bound (row-finite case)
    or an l1 tail bound / term-ratio bound; otherwise transforms refuse to
    produce values, since no certified tail is available.  ``support_exact``
    asserts the support bound is attained (the last column is nonzero).
    """

    kind = "gen"

    def __init__(
        self,
        name: str,
        entry_fn: Callable[[int, int], Fraction],
        support_bound: Callable[[int], int] | None = None,
        support_exact: bool = False,
        l1_tail_fn: Callable[[int, int], Fraction] | None = None,
        ratio: tuple[Fraction, int] | None = None,
        nonneg: bool = False,
        vanish_fn: Callable[[int], SetDescription] | None = None,
    ):
        if support_bound is None and l1_tail_fn is None and ratio is None:
            raise MatrixSpecError(
                "generator matrices must declare a support bound or a tail bound"
            )
        self.name = name
        self.entry_fn = entry_fn
        self.support_bound = support_bound
        self.support_exact = support_exact
        self.l1_tail_fn = l1_tail_fn
        self.ratio = ratio
        self.nonneg = nonneg
        self.vanish_fn = vanish_fn

    def entry(self, n: int, k: int) -> Fraction:
        if n < 1 or k < 1:
            raise ValueError("indices start at 1")
        if self.support_bound is not None and k > self.support_bound(n):
            return ZERO
        return Fraction(self.entry_fn(n, k))

    def row_support(self, n: int) -> int | None:
        if self.support_bound is None:
            return None
        bound = self.support_bound(n)
        if self.support_exact:
            return bound
        for k in range(bound, 0, -1):
            if self.entry_fn(n, k) != 0:
                return k
        return 0

    @property
    def row_finite(self) -> bool:
        return self.support_bound is not None

    def l1_tail(self, n: int, after: int) -> Fraction | None:
        got = super().l1_tail(n, after)
        if got is not None:
            return got
        if self.l1_tail_fn is not None:
            return self.l1_tail_fn(n, after)
        return None

    def term_ratio(self, n: int) -> tuple[Fraction, int] | None:
        return self.ratio

    def spec_string(self) -> str:
        return f"gen:{self.name}"

    def __eq__(self, other):
        return isinstance(other, GeneratorMatrix) and self.name == other.name

    def __hash__(self):
        return hash(("gen", self.name))


def _gen_geometric() -> GeneratorMatrix:
    # Every row is (1/2, 1/4, 1/8, ...); not row-finite, fully declared tails.
    return GeneratorMatrix(
        name="geometric",
        entry_fn=lambda n, k: Fraction(1, 1 << k),
        l1_tail_fn=lambda n, after: Fraction(1, 1 << after),
        ratio=(Fraction(1, 2), 1),
        nonneg=True,
    )


def random_rowfinite_matrix(seed: int) -> GeneratorMatrix:
    """Deterministic row-finite matrix with support exactly n per row.

    Entries are small rationals keyed by (seed, n, k); the diagonal entry is
    forced nonzero so the declared support is attained.
    """

    def entry_fn(n: int, k: int) -> Fraction:
        if k > n:
            return ZERO
        rng = random.Random(f"rowfinite:{seed}:{n}:{k}")
        num = rng.randrange(-9, 10)
        if k == n and num == 0:
            num = rng.choice([-3, -2, -1, 1, 2, 3])
        den = rng.randrange(1, 10)
        return Fraction(num, den)

    return GeneratorMatrix(
        name=f"rand_rowfinite_{seed}",
        entry_fn=entry_fn,
        support_bound=lambda n: n,
        support_exact=True,
        vanish_fn=lambda w: Finite(tuple(range(1, w))),
    )


_NAMED_GENERATORS: dict[str, Callable[[], GeneratorMatrix]] = {
    "geometric": _gen_geometric,
}


def parse_matrix(spec: str) -> SummabilityMatrix:
    """cesaro | identity | rowdrop:<base>:<set-DSL> | explicit:@file.csv |
    explicit:<rows ;-separated> | gen:<name> | gen:rand_rowfinite_<seed>"""
    spec = spec.strip()
    if spec == "cesaro":
        return CesaroMatrix()
    if spec == "identity":
        return IdentityMatrix()
    if spec.startswith("rowdrop:"):
        rest = spec[len("rowdrop:"):]
        base_text, sep, drop_text = rest.partition(":")
        if not sep:
            raise MatrixSpecError("rowdrop needs rowdrop:<base>:<set>")
        return RowDropMatrix(parse_matrix(base_text), setlang.parse_set(drop_text))
    if spec.startswith("explicit:@"):
        path = spec[len("explicit:@"):]
        with open(path, "r", encoding="ascii") as handle:
            text = handle.read()
        rows = [
            [Fraction(cell) for cell in line.split(",") if cell.strip()]
            for line in text.splitlines()
            if line.strip()
        ]
        return ExplicitMatrix(rows)
    if spec.startswith("explicit:"):
        body = spec[len("explicit:"):]
        rows = [
            [Fraction(cell) for cell in row_text.split(",")]
            for row_text in body.split(";")
            if row_text
        ]
        return ExplicitMatrix(rows)
    if spec.startswith("gen:"):
        name = spec[len("gen:"):]
        maker = _NAMED_GENERATORS.get(name)
        if maker is not None:
            return maker()
        if name.startswith("rand_rowfinite_"):
            return random_rowfinite_matrix(int(name[len("rand_rowfinite_"):]))
        raise MatrixSpecError(f"unknown generator matrix {name!r}")
    raise MatrixSpecError(f"unknown matrix spec {spec!r}")


# ---------------------------------------------------------------- transforms


@dataclass(frozen=True)
class TransformPoint:
    n: int
    value: Fraction
    tail_bound: Fraction

    @property
    def exact(self) -> bool:
        return self.tail_bound == 0


def _certified_tail(
    matrix: SummabilityMatrix, x: SequenceSpec, n: int, after: int
) -> Fraction | None:
    """Certified bound on |sum_{k>after} a_{n,k} x_k|, or None."""
    bounds = []
    tail = matrix.l1_tail(n, after)
    if tail is not None and x.sup_bound is not None:
        bounds.append(tail * x.sup_bound)
    ratio = matrix.term_ratio(n)
    if ratio is not None and x.ratio_bound is not None and after >= ratio[1]:
        rho, _ = ratio
        r = rho * x.ratio_bound(after)
        if r < 1:
            lead = abs(matrix.entry(n, after) * x.value(after)) if after >= 1 else None
            if lead is not None:
                bounds.append(lead * r / (1 - r))
    if not bounds:
        return None
    return min(bounds)


def transform_value(
    matrix: SummabilityMatrix,
    x: SequenceSpec,
    n: int,
    tail_tol: Fraction = ZERO,
    column_cap: int = DEFAULT_COLUMN_CAP,
) -> TransformPoint:
    """Row n of the transform with a certified tail bound.

    Row-finite rows are summed exactly (tail 0).  Otherwise the partial sum
    is extended until the certified tail bound drops to ``tail_tol``; if no
    tail machinery applies the call refuses with DomainRiskError.
    """
    support = matrix.row_support(n)
    if support is not None:
        value = sum((matrix.entry(n, k) * x.value(k) for k in range(1, support + 1)), ZERO)
        return TransformPoint(n, value, ZERO)
    width = 32
    partial = ZERO
    covered = 0
    saw_tail = False
    while width <= column_cap:
        partial += sum(
            (matrix.entry(n, k) * x.value(k) for k in range(covered + 1, width + 1)), ZERO
        )
        covered = width
        tail = _certified_tail(matrix, x, n, covered)
        if tail is not None:
            saw_tail = True
            if tail <= tail_tol:
                return TransformPoint(n, partial, tail)
        width *= 2
    if not saw_tail:
        raise DomainRiskError(
            f"no certified tail bound for matrix {matrix.spec_string()} against "
            f"sequence {x.name}"
        )
    raise TailToleranceError(
        f"tail bound did not reach {tail_tol} within {column_cap} columns"
    )


def transform_prefix(
    matrix: SummabilityMatrix,
    x: SequenceSpec,
    n_max: int,
    tail_tol: Fraction = ZERO,
    column_cap: int = DEFAULT_COLUMN_CAP,
) -> list[TransformPoint]:
    """Transform rows 1..n_max; see transform_value for tail semantics."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return [transform_value(matrix, x, n, tail_tol, column_cap) for n in range(1, n_max + 1)]


def _bits_transform_values(
    matrix: SummabilityMatrix, bits: list[int], limit: int
) -> list[Fraction]:
    """Transform of a 0/1 prefix for row-finite matrices, with fast paths."""
    if isinstance(matrix, IdentityMatrix):
        return [Fraction(bits[n - 1]) for n in range(1, limit + 1)]
    if isinstance(matrix, CesaroMatrix):
        out = []
        ones = 0
        for n in range(1, limit + 1):
            ones += bits[n - 1]
            out.append(Fraction(ones, n))
        return out
    if isinstance(matrix, RowDropMatrix):
        base = _bits_transform_values(matrix.base, bits, limit)
        return [
            ZERO if member(matrix.drop, n) else base[n - 1] for n in range(1, limit + 1)
        ]
    x = sequence_from_values(tuple(Fraction(b) for b in bits), name="bits")
    return [p.value for p in transform_prefix(matrix, x, limit)]


# ---------------------------------------------------------------- domain check


@dataclass(frozen=True)
class DomainCheck:
    status: str  # "converged" | "diverging" | "inconclusive"
    n: int
    value: Fraction | None
    tail_bound: Fraction | None
    evidence: dict = field(default_factory=dict, compare=False)


def domain_check(
    matrix: SummabilityMatrix,
    x: SequenceSpec,
    n: int,
    tol: Fraction,
    column_cap: int = 10**6,
    growth_bound: Fraction = Fraction(10**6),
) -> DomainCheck:
    """Does row n of the transform make sense for x?

    ``converged`` needs a certified tail (row-finite rows give tail 0).
    ``diverging`` needs finite-scale evidence: partial sums past the growth
    bound, or a single term larger than 2*tol after the partials had settled
    within tol over a window.  Anything else is ``inconclusive``.
    """
    support = matrix.row_support(n)
    if support is not None:
        value = sum((matrix.entry(n, k) * x.value(k) for k in range(1, support + 1)), ZERO)
        return DomainCheck("converged", n, value, ZERO, {"row_finite": True})
    window: list[Fraction] = []
    window_size = 16
    stable_seen = False
    partial = ZERO
    next_tail_check = 32
    for k in range(1, column_cap + 1):
        term = matrix.entry(n, k) * x.value(k)
        partial += term
        if abs(partial) > growth_bound:
            return DomainCheck(
                "diverging",
                n,
                None,
                None,
                {"kind": "growth", "column": k, "partial": str(partial)},
            )
        if stable_seen and tol > 0 and abs(term) > 2 * tol:
            return DomainCheck(
                "diverging",
                n,
                None,
                None,
                {"kind": "late_term", "column": k, "term": str(term)},
            )
        window.append(partial)
        if len(window) > window_size:
            window.pop(0)
            if tol > 0 and max(window) - min(window) <= tol:
                stable_seen = True
        if k == next_tail_check:
            tail = _certified_tail(matrix, x, n, k)
            if tail is not None and tail <= tol:
                return DomainCheck(
                    "converged", n, partial, tail, {"columns_used": k}
                )
            next_tail_check *= 2
    return DomainCheck(
        "inconclusive",
        n,
        None,
        None,
        {"columns_used": column_cap, "last_partial": str(partial)},
    )


# ---------------------------------------------------------------- row profile


class RowProfile:
    """Support profile of a row-finite matrix.

    ``last_nonzero(n)`` is the final nonzero column of row n (0 for zero
    rows).  ``vanish_set(w)`` describes the rows whose support lies entirely
    below column w, structurally when the matrix kind allows it.
    """

    def __init__(self, matrix: SummabilityMatrix, n_max: int):
        if not matrix.row_finite:
            raise DomainRiskError("row profiles require a row-finite matrix")
        self.matrix = matrix
        self.n_max = n_max
        self._cache: dict[int, int] = {}

    def last_nonzero(self, n: int) -> int:
        got = self._cache.get(n)
        if got is None:
            got = self.matrix.row_support(n)
            support = got
            # The structural support may be a bound; tighten to the true last
            # nonzero entry for kinds that do not promise exactness.
            if support and not _support_is_exact(self.matrix):
                while support > 0 and self.matrix.entry(n, support) == 0:
                    support -= 1
                got = support
            self._cache[n] = got
        return got

    def vanish_set(self, w: int) -> SetDescription:
        """Rows n with last_nonzero(n) < w, as a set description."""
        if w < 1:
            raise ValueError("column thresholds start at 1")
        structural = _structural_vanish(self.matrix, w)
        if structural is not None:
            return structural
        rows = tuple(n for n in range(1, self.n_max + 1) if self.last_nonzero(n) < w)
        return Finite(rows)

    def vanish_is_structural(self, w: int) -> bool:
        return _structural_vanish(self.matrix, w) is not None

    def audit(self, w: int, n_max: int | None = None) -> bool:
        """Enumerate rows <= n_max checking vanish_set(w) matches supports."""
        limit = self.n_max if n_max is None else n_max
        desc = self.vanish_set(w)
        for n in range(1, limit + 1):
            if member(desc, n) != (self.last_nonzero(n) < w):
                return False
        return True


def _support_is_exact(matrix: SummabilityMatrix) -> bool:
    if isinstance(matrix, (CesaroMatrix, IdentityMatrix, ExplicitMatrix)):
        return True
    if isinstance(matrix, RowDropMatrix):
        return _support_is_exact(matrix.base)
    if isinstance(matrix, GeneratorMatrix):
        return True  # row_support already scans when not declared exact
    return False


def _structural_vanish(matrix: SummabilityMatrix, w: int) -> SetDescription | None:
    if isinstance(matrix, (CesaroMatrix, IdentityMatrix)):
        return Finite(tuple(range(1, w)))
    if isinstance(matrix, RowDropMatrix):
        base = _structural_vanish(matrix.base, w)
        if base is None:
            return None
        return Union(base, matrix.drop)
    if isinstance(matrix, ExplicitMatrix):
        stored = tuple(
            n for n in range(1, len(matrix.rows) + 1) if matrix.row_support(n) < w
        )
        beyond = AP(len(matrix.rows) + 1, 1)
        return Union(Finite(stored), beyond)
    if isinstance(matrix, GeneratorMatrix) and matrix.vanish_fn is not None:
        return matrix.vanish_fn(w)
    return None


def row_profile(matrix: SummabilityMatrix, n_max: int = 10**3) -> RowProfile:
    return RowProfile(matrix, n_max)


# ---------------------------------------------------------------- regularity


@dataclass(frozen=True)
class ConditionReport:
    holds: str  # "yes" | "no" | "at_scale" | "undecided"
    certified: bool
    detail: str
    data: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class RegularityVerdict:
    matrix_spec: str
    ideal_name: str
    overall: str  # "regular" | "not_regular" | "undecided"
    r1: ConditionReport
    r2: ConditionReport
    r3: ConditionReport
    witness: dict = field(default_factory=dict, compare=False)


def _r1_bound(matrix: SummabilityMatrix, n_rows: int) -> ConditionReport:
    if isinstance(matrix, (CesaroMatrix, IdentityMatrix)):
        return ConditionReport("yes", True, "every row has l1 norm exactly 1", {"bound": "1"})
    if isinstance(matrix, RowDropMatrix):
        base = _r1_bound(matrix.base, n_rows)
        if base.certified and base.holds == "yes":
            return ConditionReport(
                "yes", True, "zero rows only lower the base bound", base.data
            )
        return base
    if isinstance(matrix, ExplicitMatrix):
        bound = max((matrix.row_l1(n) for n in range(1, len(matrix.rows) + 1)), default=ZERO)
        return ConditionReport(
            "yes", True, "max over stored rows; later rows are zero", {"bound": str(bound)}
        )
    # Sampled bound only: no certificate for generator matrices.
    samples = sorted(set(list(range(1, 65)) + [1 << j for j in range(7, 20) if 1 << j <= n_rows]))
    best = ZERO
    for n in samples:
        if matrix.row_support(n) is None:
            tail = matrix.l1_tail(n, 0)
            if tail is None:
                return ConditionReport("undecided", False, "no l1 information", {})
            best = max(best, tail)
        else:
            best = max(best, matrix.row_l1(n))
    return ConditionReport(
        "at_scale", False, f"sampled rows up to {samples[-1]}", {"bound": str(best)}
    )


def _r2_columns(matrix: SummabilityMatrix, n_rows: int, k_cols: int) -> ConditionReport:
    if isinstance(matrix, CesaroMatrix):
        return ConditionReport(
            "yes", True, "column entries are 0 or 1/n, dominated by 1/n", {}
        )
    if isinstance(matrix, IdentityMatrix):
        return ConditionReport("yes", True, "column k vanishes for rows past k", {})
    if isinstance(matrix, RowDropMatrix):
        base = _r2_columns(matrix.base, n_rows, k_cols)
        if base.certified and base.holds == "yes":
            return ConditionReport(
                "yes", True, "entrywise dominated by the base matrix", {}
            )
        return base
    if isinstance(matrix, ExplicitMatrix):
        return ConditionReport(
            "yes", True, "columns vanish beyond the stored rows", {}
        )
    # Finite-scale estimate via the shared limit estimator.
    from .constructions import ideal_limit

    scale = min(n_rows, 2048)
    details = {}
    for k in range(1, k_cols + 1):
        column = [matrix.entry(n, k) for n in range(1, scale + 1)]
        verdict = ideal_limit(column, IdealPresentation.z())
        details[k] = verdict.status
        if verdict.status != "limit" or verdict.eta != 0:
            return ConditionReport(
                "undecided", False, f"column {k} shows no vanishing trend", details
            )
    return ConditionReport("at_scale", False, f"columns vanish at scale {scale}", details)


def _row_sum_exception(matrix: SummabilityMatrix) -> SetDescription | None:
    """Rows with row sum != 1, structurally; None when unknown."""
    if isinstance(matrix, (CesaroMatrix, IdentityMatrix)):
        return Finite(())
    if isinstance(matrix, RowDropMatrix):
        base = _row_sum_exception(matrix.base)
        if base is None:
            return None
        return Union(base, matrix.drop)
    if isinstance(matrix, ExplicitMatrix):
        stored = tuple(
            n for n in range(1, len(matrix.rows) + 1) if matrix.row_sum(n) != 1
        )
        return Union(Finite(stored), AP(len(matrix.rows) + 1, 1))
    return None


def _r3_rowsums(
    matrix: SummabilityMatrix, ideal: IdealPresentation, n_rows: int, scale: int
) -> ConditionReport:
    exception = _row_sum_exception(matrix)
    if exception is not None:
        verdict = ideal.verdict(exception, scale)
        data = {"exception_set": render(exception), "verdict": verdict.status}
        if verdict.status == IN:
            return ConditionReport("yes", True, "row-sum exception set is in the ideal", data)
        if verdict.status == NOT_IN:
            witness_rows = list(setlang.iter_members(exception, 10**4))[:5]
            data["witness_rows"] = witness_rows
            return ConditionReport(
                "no", True, "row-sum exception set escapes the ideal", data
            )
        return ConditionReport("undecided", False, verdict.reason, data)
    if not matrix.row_finite:
        return ConditionReport("undecided", False, "row sums not computable", {})
    from .constructions import ideal_limit

    scale_eff = min(n_rows, 2048)
    sums = [matrix.row_sum(n) for n in range(1, scale_eff + 1)]
    verdict = ideal_limit(sums, ideal if ideal.kind in ("fin", "z", "bd") else IdealPresentation.z())
    if verdict.status == "limit" and verdict.eta == 1:
        return ConditionReport(
            "at_scale", False, f"row sums near 1 at scale {scale_eff}", {"eps": str(verdict.eps)}
        )
    return ConditionReport("undecided", False, "row sums show no trend toward 1", {})


def regularity_verdict(
    matrix: SummabilityMatrix,
    ideal: IdealPresentation,
    n_rows: int = DEFAULT_SCALE,
    k_cols: int = 10,
) -> RegularityVerdict:
    """Verdict on the three regularity conditions relative to an ideal.

    R1: uniform row l1 bound.  R2: each column tends to 0 along the ideal.
    R3: row sums tend to 1 along the ideal.  The overall verdict is
    ``regular`` / ``not_regular`` only when every part is closed-form
    certified; sampled evidence alone yields ``undecided``.
    """
    r1 = _r1_bound(matrix, n_rows)
    r2 = _r2_columns(matrix, n_rows, k_cols)
    r3 = _r3_rowsums(matrix, ideal, n_rows, n_rows)
    witness: dict = {}
    if "no" in (r1.holds, r2.holds, r3.holds):
        overall = "not_regular"
        for label, rep in (("r1", r1), ("r2", r2), ("r3", r3)):
            if rep.holds == "no":
                witness = {"condition": label, **rep.data}
                break
    elif all(rep.holds == "yes" and rep.certified for rep in (r1, r2, r3)):
        overall = "regular"
    else:
        overall = "undecided"
    return RegularityVerdict(
        matrix.spec_string(), ideal.name, overall, r1, r2, r3, witness
    )


# ---------------------------------------------------------------- defects


@dataclass(frozen=True)
class DefectReport:
    matrix_spec: str
    sequence_name: str
    ideal_name: str
    scale: int
    table: tuple  # ((eta, eps, ((checkpoint, count), ...)), ...)


def exception_profile(
    values: list[Fraction], eta: Fraction, eps: Fraction, checkpoints: tuple[int, ...]
) -> tuple[tuple[int, int], ...]:
    """Counts of {n <= c : |values_n - eta| > eps} at each checkpoint."""
    counts = []
    bad = 0
    it = iter(sorted(checkpoints))
    target = next(it)
    for i, v in enumerate(values, start=1):
        if abs(v - eta) > eps:
            bad += 1
        while i == target:
            counts.append((i, bad))
            try:
                target = next(it)
            except StopIteration:
                return tuple(counts)
    raise ValueError("checkpoints exceed the available prefix")


def matrix_ideal_limit_defect(
    matrix: SummabilityMatrix,
    x: SequenceSpec,
    ideal: IdealPresentation,
    scale: int,
    etas: tuple[Fraction, ...] | None = None,
    epses: tuple[Fraction, ...] | None = None,
) -> DefectReport:
    """Exception-set profile of the transform against candidate limits."""
    points = transform_prefix(matrix, x, scale)
    values = [p.value for p in points]
    if etas is None:
        from .constructions import quantile_candidates

        etas = tuple(quantile_candidates(values))
    if epses is None:
        epses = tuple(Fraction(1, 1 << j) for j in range(1, 7))
    checkpoints = setlang.default_checkpoints(scale)
    table = []
    for eta in etas:
        for eps in epses:
            table.append((eta, eps, exception_profile(values, eta, eps, checkpoints)))
    return DefectReport(
        matrix.spec_string(), x.name, ideal.name, scale, tuple(table)
    )


# ---------------------------------------------------------------- matrix ideals


def validate_matrix_ideal(matrix: SummabilityMatrix) -> None:
    """Matrix-generated ideals need nonnegative entries and a certified
    regularity verdict; reject anything weaker at construction time."""
    if not _entries_nonneg(matrix):
        raise ValueError("matrix ideals require nonnegative entries")
    verdict = regularity_verdict(matrix, IdealPresentation.fin(), n_rows=256, k_cols=4)
    if verdict.overall != "regular":
        raise ValueError(
            f"matrix ideals require a certified regular matrix, got {verdict.overall}"
        )


def _entries_nonneg(matrix: SummabilityMatrix) -> bool:
    if isinstance(matrix, (CesaroMatrix, IdentityMatrix)):
        return True
    if isinstance(matrix, RowDropMatrix):
        return _entries_nonneg(matrix.base)
    if isinstance(matrix, ExplicitMatrix):
        return all(v >= 0 for row in matrix.rows for v in row)
    if isinstance(matrix, GeneratorMatrix):
        return matrix.nonneg
    return False


def _averaging_core(matrix: SummabilityMatrix) -> bool:
    """Matrices whose transform of an indicator tracks prefix density."""
    if isinstance(matrix, CesaroMatrix):
        return True
    if isinstance(matrix, RowDropMatrix):
        return _averaging_core(matrix.base)
    return False


def matrix_ideal_verdict(
    matrix: SummabilityMatrix, s: SetDescription, scale: int
) -> MembershipVerdict:
    """Membership of S in the ideal {S : transform of 1_S tends to 0}."""
    if is_finite(s) is Tri.YES:
        return MembershipVerdict(IN, "finite union of vanishing columns")
    d = exact_density(s)
    if _averaging_core(matrix):
        if d == 0:
            return MembershipVerdict(IN, "running averages of a density-0 indicator vanish")
        if d is not None and d > 0:
            return MembershipVerdict(
                NOT_IN, f"running averages track the exact density {d} > 0"
            )
    if is_cofinite(s) is Tri.YES:
        return MembershipVerdict(NOT_IN, "transform of a cofinite indicator tends to 1")
    probe = min(scale, 2048)
    points = transform_prefix(matrix, indicator_sequence(s), probe)
    ladder = setlang.default_checkpoints(probe)
    evidence = {
        "transform_values": [(n, str(points[n - 1].value)) for n in ladder]
    }
    return _undecided("no certified argument for this matrix ideal", scale, evidence)
