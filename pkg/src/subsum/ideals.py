"""Ideal presentations on N and certified membership verdicts.

Supported kinds: the finite sets, the density-zero sets, the Banach-density
zero sets, the nu2-column ideal (sets whose fibers {n : nu2(n) = k} are
finite for all but finitely many k), and ideals generated by a nonnegative
regular summability matrix.  A verdict is always one of ``in`` / ``not_in``
(backed by a closed-form argument about the set's structure) or
``undecided`` with finite-scale evidence attached; no amount of enumeration
alone upgrades evidence to a certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .setlang import (
    AP,
    Complement,
    DyadicBlocks,
    Finite,
    Intersection,
    Nu2Ge,
    Powers2,
    SetDescription,
    Shift,
    Squares,
    Tri,
    Union,
    banach_exact,
    count_prefix,
    default_checkpoints,
    exact_density,
    is_cofinite,
    is_finite,
    iter_members,
    max_window_density,
    member,
    nu2,
    render,
)

DEFAULT_SCALE = 10**4

IN = "in"
NOT_IN = "not_in"
UNDECIDED = "undecided"


class UnsupportedIdealError(ValueError):
    pass


class RestrictionError(ValueError):
    """The proposed domain's complement is not certified inside the ideal."""


class SelectorNotCertifiedError(ValueError):
    """The block selector could not be structurally certified infinite."""


@dataclass(frozen=True)
class MembershipVerdict:
    status: str
    reason: str
    scale: int | None = None
    evidence: dict = field(default_factory=dict, compare=False)

    @property
    def decided(self) -> bool:
        return self.status != UNDECIDED


def _in(reason: str) -> MembershipVerdict:
    return MembershipVerdict(IN, reason)


def _not_in(reason: str) -> MembershipVerdict:
    return MembershipVerdict(NOT_IN, reason)


def _undecided(reason: str, scale: int, evidence: dict) -> MembershipVerdict:
    return MembershipVerdict(UNDECIDED, reason, scale, evidence)


def _density_evidence(s: SetDescription, scale: int) -> dict:
    counts = [(n, count_prefix(s, n)) for n in default_checkpoints(scale)]
    return {
        "prefix_counts": counts,
        "ratios": [str(Fraction(c, n)) for n, c in counts],
    }


# ---------------------------------------------------------------- verdicts


def _verdict_fin(s: SetDescription, scale: int) -> MembershipVerdict:
    fin = is_finite(s)
    if fin is Tri.YES:
        return _in("structurally finite")
    if fin is Tri.NO:
        return _not_in("structurally infinite")
    return _undecided(
        "finiteness not structurally decidable", scale, _density_evidence(s, scale)
    )


def _verdict_z(s: SetDescription, scale: int) -> MembershipVerdict:
    if is_finite(s) is Tri.YES:
        return _in("finite sets have density 0")
    d = exact_density(s)
    if d == 0:
        return _in("exact density 0")
    if d is not None:
        return _not_in(f"exact density {d} > 0")
    if _z_positive_limsup(s):
        return _not_in("contains infinitely many full dyadic blocks")
    if isinstance(s, Union):
        a = _verdict_z(s.left, scale)
        b = _verdict_z(s.right, scale)
        if a.status == IN and b.status == IN:
            return _in("union of two certified density-0 sets")
        if NOT_IN in (a.status, b.status):
            return _not_in("contains a certified positive-density subset")
    if isinstance(s, Intersection):
        for side in (s.left, s.right):
            v = _verdict_z(side, scale)
            if v.status == IN:
                return _in("subset of a certified density-0 set")
    if isinstance(s, Shift):
        v = _verdict_z(s.inner, scale)
        if v.decided:
            return MembershipVerdict(v.status, "density is shift invariant; " + v.reason)
    return _undecided("no closed-form density argument", scale, _density_evidence(s, scale))


def _z_positive_limsup(s: SetDescription) -> bool:
    """Certified positive upper density via dyadic-block structure.

    A set containing infinitely many whole blocks [2**q, 2**(q+1)) has
    prefix density > 1/2 at the right edge of each, hence limsup >= 1/2.
    """
    if isinstance(s, DyadicBlocks):
        return is_finite(s.selector) is Tri.NO
    if isinstance(s, Union):
        return _z_positive_limsup(s.left) or _z_positive_limsup(s.right)
    if isinstance(s, Shift):
        return s.offset == 0 and _z_positive_limsup(s.inner)
    return False


def _bd_window_evidence(s: SetDescription, scale: int) -> dict:
    windows = []
    length = 8
    while length * 4 <= scale and length <= 4096:
        windows.append((length, str(max_window_density(s, scale, length))))
        length *= 4
    return {"max_window_density": windows}


def _verdict_bd(s: SetDescription, scale: int) -> MembershipVerdict:
    b = banach_exact(s)
    if b == 0:
        return _in("exact Banach density 0")
    if b is not None:
        return _not_in(f"exact Banach density {b} > 0")
    if isinstance(s, Union):
        a = _verdict_bd(s.left, scale)
        c = _verdict_bd(s.right, scale)
        if a.status == IN and c.status == IN:
            return _in("union of two certified Banach-null sets")
        if NOT_IN in (a.status, c.status):
            return _not_in("contains a certified positive-Banach-density subset")
    if isinstance(s, Intersection):
        for side in (s.left, s.right):
            if _verdict_bd(side, scale).status == IN:
                return _in("subset of a certified Banach-null set")
    if isinstance(s, Shift):
        v = _verdict_bd(s.inner, scale)
        if v.decided:
            return MembershipVerdict(v.status, "Banach density is shift invariant; " + v.reason)
    return _undecided("no closed-form Banach argument", scale, _bd_window_evidence(s, scale))


def nu2_column_audit(s: SetDescription, scale: int, max_column: int = 20) -> dict:
    """Counts of {n <= scale : n in S, nu2(n) = k} for k <= max_column."""
    counts = {k: 0 for k in range(max_column + 1)}
    for n in range(1, scale + 1):
        if member(s, n):
            k = nu2(n)
            if k <= max_column:
                counts[k] += 1
    return {"column_counts": counts, "scale": scale}


def _verdict_finxfin(s: SetDescription, scale: int) -> MembershipVerdict:
    if is_finite(s) is Tri.YES:
        return _in("finite set")
    if is_cofinite(s) is Tri.YES:
        return _not_in("cofinite set meets every nu2 fiber infinitely often")
    if isinstance(s, AP):
        e = nu2(s.step)
        if nu2(s.first) < e:
            return _in(f"all members lie in the single nu2 fiber {nu2(s.first)}")
        return _not_in(f"every nu2 fiber from {e} on is met infinitely often")
    if isinstance(s, Squares):
        return _not_in("every even nu2 fiber contains infinitely many squares")
    if isinstance(s, Powers2):
        return _in("each nu2 fiber holds exactly one power of 2")
    if isinstance(s, Nu2Ge):
        return _not_in(f"every nu2 fiber from {s.threshold} on is full")
    if isinstance(s, DyadicBlocks):
        fin = is_finite(s.selector)
        if fin is Tri.NO:
            return _not_in("infinitely many whole dyadic blocks meet every nu2 fiber")
    if isinstance(s, Complement) and isinstance(s.inner, Nu2Ge):
        return _in(f"nu2 fibers from {s.inner.threshold} on are empty")
    if isinstance(s, Union):
        a = _verdict_finxfin(s.left, scale)
        b = _verdict_finxfin(s.right, scale)
        if a.status == IN and b.status == IN:
            return _in("union of two certified members")
        if NOT_IN in (a.status, b.status):
            return _not_in("contains a certified non-member subset")
    if isinstance(s, Intersection):
        for side in (s.left, s.right):
            if _verdict_finxfin(side, scale).status == IN:
                return _in("subset of a certified member")
    return _undecided(
        "no closed-form nu2 fiber argument", scale, nu2_column_audit(s, min(scale, 10**5))
    )


# ---------------------------------------------------------------- partitions


@dataclass(frozen=True)
class IntervalPartition:
    """Interval partition of a cofinite tail of N given by boundary(q).

    ``singletons``: blocks {1}, {2}, ...   ``dyadic``: blocks [2**q, 2**(q+1))
    for q >= 1.  Any set containing infinitely many whole blocks escapes the
    ideal the partition was built for.
    """

    kind: str  # "singletons" | "dyadic"

    def boundary(self, q: int) -> int:
        if q < 1:
            raise ValueError("block indices start at 1")
        return q if self.kind == "singletons" else 1 << q

    def block(self, q: int) -> range:
        return range(self.boundary(q), self.boundary(q + 1))

    def block_index(self, n: int) -> int:
        if self.kind == "singletons":
            return n
        if n < 2:
            raise ValueError("dyadic blocks start at 2")
        return n.bit_length() - 1

    def as_set_description(self, selector: SetDescription) -> SetDescription:
        if self.kind == "singletons":
            return selector
        return DyadicBlocks(selector)


class RestrictedPartition:
    """An interval partition traced on a subdomain, empties dropped, reindexed."""

    _SCAN_CAP = 10**4

    def __init__(self, ambient: IntervalPartition, domain: SetDescription):
        self.ambient = ambient
        self.domain = domain
        self._blocks: list[tuple[int, ...]] = []
        self._next_ambient = 1

    def block(self, q: int) -> tuple[int, ...]:
        if q < 1:
            raise ValueError("block indices start at 1")
        while len(self._blocks) < q:
            if self._next_ambient > self._SCAN_CAP:
                raise UnsupportedIdealError("restricted block scan exceeded cap")
            trace = tuple(
                n for n in self.ambient.block(self._next_ambient) if member(self.domain, n)
            )
            self._next_ambient += 1
            if trace:
                self._blocks.append(trace)
        return self._blocks[q - 1]

    def block_index_of(self, n: int) -> int:
        q = 1
        while True:
            blk = self.block(q)
            if n in blk:
                return q
            if blk[0] > n:
                raise ValueError(f"{n} is not in the restricted domain")
            q += 1


def nonideal_from_partition(
    partition: IntervalPartition, selector: SetDescription
) -> SetDescription:
    """Union of the selected blocks; escapes the partition's ideal.

    Requires the selector to be structurally certified infinite, otherwise
    the union could be finite and the escape claim unsound.
    """
    if is_finite(selector) is not Tri.NO:
        raise SelectorNotCertifiedError(
            f"selector {render(selector)} is not certified infinite"
        )
    return partition.as_set_description(selector)


# ---------------------------------------------------------------- presentation


class IdealPresentation:
    """A named ideal on N with certified verdicts and partition machinery."""

    KINDS = ("fin", "z", "bd", "finxfin", "matrix")

    def __init__(self, kind: str, matrix=None):
        if kind not in self.KINDS:
            raise UnsupportedIdealError(f"unknown ideal kind {kind!r}")
        if kind == "matrix":
            if matrix is None:
                raise UnsupportedIdealError("matrix ideals need a matrix")
            from .summability import validate_matrix_ideal

            validate_matrix_ideal(matrix)
        self.kind = kind
        self.matrix = matrix

    # -- constructors

    @classmethod
    def fin(cls) -> "IdealPresentation":
        return cls("fin")

    @classmethod
    def z(cls) -> "IdealPresentation":
        return cls("z")

    @classmethod
    def bd(cls) -> "IdealPresentation":
        return cls("bd")

    @classmethod
    def finxfin(cls) -> "IdealPresentation":
        return cls("finxfin")

    @classmethod
    def from_matrix(cls, matrix) -> "IdealPresentation":
        return cls("matrix", matrix)

    @property
    def name(self) -> str:
        if self.kind == "matrix":
            return f"matrix:{self.matrix.spec_string()}"
        return self.kind

    def __repr__(self) -> str:
        return f"IdealPresentation({self.name})"

    # -- verdicts

    def verdict(self, s: SetDescription, scale: int = DEFAULT_SCALE) -> MembershipVerdict:
        if scale < 1:
            raise ValueError("scale must be >= 1")
        if self.kind == "fin":
            return _verdict_fin(s, scale)
        if self.kind == "z":
            return _verdict_z(s, scale)
        if self.kind == "bd":
            return _verdict_bd(s, scale)
        if self.kind == "finxfin":
            return _verdict_finxfin(s, scale)
        from .summability import matrix_ideal_verdict

        return matrix_ideal_verdict(self.matrix, s, scale)

    def dual_member(self, s: SetDescription, scale: int = DEFAULT_SCALE) -> MembershipVerdict:
        """Verdict for membership of S in the dual filter (complement in ideal)."""
        return self.verdict(Complement(s), scale)

    # -- partitions and restriction

    def talagrand_partition(self) -> IntervalPartition:
        if self.kind == "fin":
            return IntervalPartition("singletons")
        if self.kind in ("z", "bd"):
            return IntervalPartition("dyadic")
        raise UnsupportedIdealError(
            f"no interval-partition witness implemented for ideal {self.name}"
        )

    def restrict(self, domain: SetDescription, scale: int = DEFAULT_SCALE) -> "RestrictedIdeal":
        v = self.verdict(Complement(domain), scale)
        if v.status != IN:
            raise RestrictionError(
                f"complement of domain not certified in {self.name}: {v.reason}"
            )
        return RestrictedIdeal(self, domain)


class RestrictedIdeal:
    """Trace of an ideal on a codense-complement domain T.

    For S inside T, membership in the trace ideal coincides with membership
    in the ambient ideal, so verdicts delegate; the partition is the ambient
    one traced on T.
    """

    def __init__(self, base: IdealPresentation, domain: SetDescription):
        self.base = base
        self.domain = domain

    def verdict(self, s: SetDescription, scale: int = DEFAULT_SCALE) -> MembershipVerdict:
        return self.base.verdict(s, scale)

    def partition(self) -> RestrictedPartition:
        return RestrictedPartition(self.base.talagrand_partition(), self.domain)


def parse_ideal(spec: str) -> IdealPresentation:
    """Resolve an ideal name: fin | z | bd | finxfin | matrix:<matrix-spec>."""
    spec = spec.strip()
    if spec in ("fin", "z", "bd", "finxfin"):
        return IdealPresentation(spec)
    if spec.startswith("matrix:"):
        from .summability import parse_matrix

        return IdealPresentation.from_matrix(parse_matrix(spec[len("matrix:"):]))
    raise UnsupportedIdealError(f"unknown ideal spec {spec!r}")
