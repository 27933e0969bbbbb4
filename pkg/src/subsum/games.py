"""Two-player set games over an ideal, with auditable transcripts.

Player I plays sets certified to lie in the ideal's dual filter; player II
answers each with a nonempty finite subset.  Everything a strategy or an
adjudicator claims is recomputed from the transcript; adjudications are
labeled finite-scale evidence, never completed-game facts.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import setlang
from .ideals import DEFAULT_SCALE, IN, IdealPresentation
from .setlang import SetDescription, member, nu2, parse_set, render

STRATEGY_SCAN_CAP = 10**6


class IllegalMoveError(RuntimeError):
    """Player I's set is not certified to lie in the dual filter."""


class StrategySearchError(RuntimeError):
    """A reply strategy exhausted its scan budget."""


# ---------------------------------------------------------------- transcript


@dataclass(frozen=True)
class GameRound:
    index: int
    move_spec: str
    reply: tuple[int, ...]
    witness: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class GameTranscript:
    ideal_name: str
    strategy_name: str
    rounds: tuple[GameRound, ...]

    def union_reply(self) -> tuple[int, ...]:
        seen: set[int] = set()
        for r in self.rounds:
            seen.update(r.reply)
        return tuple(sorted(seen))

    def to_jsonl(self) -> str:
        lines = [
            json.dumps(
                {"ideal": self.ideal_name, "strategy": self.strategy_name},
                sort_keys=True,
            )
        ]
        for r in self.rounds:
            lines.append(
                json.dumps(
                    {
                        "round": r.index,
                        "move": r.move_spec,
                        "reply": list(r.reply),
                        "witness": r.witness,
                    },
                    sort_keys=True,
                )
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "GameTranscript":
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines:
            raise ValueError("empty transcript")
        header = json.loads(lines[0])
        rounds = []
        for line in lines[1:]:
            data = json.loads(line)
            rounds.append(
                GameRound(
                    index=int(data["round"]),
                    move_spec=data["move"],
                    reply=tuple(int(v) for v in data["reply"]),
                    witness=data.get("witness", {}),
                )
            )
        return cls(header["ideal"], header["strategy"], tuple(rounds))


# ---------------------------------------------------------------- strategies


class ReplyStrategy:
    name = "abstract"

    def reply(self, move: SetDescription, round_index: int) -> tuple[tuple[int, ...], dict]:
        raise NotImplementedError


class PrefixDensityStrategy(ReplyStrategy):
    """Take the whole prefix of the move up to the first scale (past the
    round number) where the move fills at least half of it."""

    name = "prefix_density"

    def __init__(self, cap: int = STRATEGY_SCAN_CAP):
        self.cap = cap

    def reply(self, move: SetDescription, round_index: int) -> tuple[tuple[int, ...], dict]:
        count = 0
        members: list[int] = []
        for m in range(1, self.cap + 1):
            if member(move, m):
                count += 1
                members.append(m)
            if m >= round_index and 2 * count >= m and count > 0:
                return tuple(members), {"scale": m, "count": count}
        raise StrategySearchError(
            f"move never filled half a prefix within {self.cap}"
        )


class GreedyMinStrategy(ReplyStrategy):
    """Always take the single least element."""

    name = "greedy_min"

    def reply(self, move: SetDescription, round_index: int) -> tuple[tuple[int, ...], dict]:
        least = setlang.first_member(move)
        if least is None:
            raise StrategySearchError("move has no visible element")
        return (least,), {}


class PrefixTakeStrategy(ReplyStrategy):
    """Take the first r elements at round r."""

    name = "prefix_take"

    def reply(self, move: SetDescription, round_index: int) -> tuple[tuple[int, ...], dict]:
        got: list[int] = []
        cursor = 0
        while len(got) < round_index:
            nxt = setlang.next_member(move, cursor)
            if nxt is None:
                raise StrategySearchError("move ran out of visible elements")
            got.append(nxt)
            cursor = nxt
        return tuple(got), {"take": round_index}


class SeededRandomStrategy(ReplyStrategy):
    """Random nonempty subset of an early pool; fully determined by the
    seed and the round number."""

    name = "seeded_random"

    def __init__(self, seed: int):
        self.seed = seed

    def reply(self, move: SetDescription, round_index: int) -> tuple[tuple[int, ...], dict]:
        pool: list[int] = []
        cursor = 0
        want = 8 + round_index
        while len(pool) < want:
            nxt = setlang.next_member(move, cursor)
            if nxt is None:
                break
            pool.append(nxt)
            cursor = nxt
        if not pool:
            raise StrategySearchError("move has no visible elements")
        rng = random.Random(f"{self.seed}:{round_index}")
        size = rng.randrange(1, len(pool) + 1)
        picked = tuple(sorted(rng.sample(pool, size)))
        return picked, {"pool": len(pool), "seed": self.seed}


def parse_strategy(spec: str) -> ReplyStrategy:
    """prefix_density | greedy_min | prefix_take | seeded_random:<seed>"""
    spec = spec.strip()
    if spec == "prefix_density":
        return PrefixDensityStrategy()
    if spec == "greedy_min":
        return GreedyMinStrategy()
    if spec == "prefix_take":
        return PrefixTakeStrategy()
    if spec.startswith("seeded_random:"):
        return SeededRandomStrategy(int(spec[len("seeded_random:"):]))
    raise ValueError(f"unknown strategy {spec!r}")


def nu2_tower_move(round_index: int) -> SetDescription:
    """Player I's shrinking tower: round r demands 2^r | x."""
    return setlang.Nu2Ge(round_index)


# ---------------------------------------------------------------- game play


def play_round(
    ideal: IdealPresentation,
    move: SetDescription,
    strategy: ReplyStrategy,
    round_index: int,
    scale: int = DEFAULT_SCALE,
) -> GameRound:
    verdict = ideal.dual_member(move, scale)
    if verdict.status != IN:
        raise IllegalMoveError(
            f"move {render(move)} not certified in the dual filter "
            f"({verdict.status}: {verdict.reason})"
        )
    reply, witness = strategy.reply(move, round_index)
    if not reply:
        raise StrategySearchError("strategies must reply with a nonempty set")
    for v in reply:
        if not member(move, v):
            raise StrategySearchError(
                f"strategy replied {v}, which is outside the move"
            )
    witness = dict(witness)
    witness["legality"] = verdict.reason
    return GameRound(round_index, render(move), reply, witness)


def play_game(
    ideal: IdealPresentation,
    moves: list[SetDescription],
    strategy: ReplyStrategy,
    rounds: int | None = None,
    scale: int = DEFAULT_SCALE,
) -> GameTranscript:
    """Play ``rounds`` rounds, cycling through the move list if needed."""
    if not moves:
        raise ValueError("need at least one move")
    total = rounds if rounds is not None else len(moves)
    played = []
    for r in range(1, total + 1):
        move = moves[(r - 1) % len(moves)]
        played.append(play_round(ideal, move, strategy, r, scale))
    return GameTranscript(ideal.name, strategy.name, tuple(played))


def replay_matches(
    ideal: IdealPresentation, transcript: GameTranscript, strategy: ReplyStrategy
) -> bool:
    """Re-run the strategy against the transcript's moves; True iff the
    regenerated transcript reproduces every reply."""
    moves = [parse_set(r.move_spec) for r in transcript.rounds]
    fresh = play_game(ideal, moves, strategy, rounds=len(moves))
    return all(
        a.reply == b.reply and a.move_spec == b.move_spec
        for a, b in zip(fresh.rounds, transcript.rounds)
    )


# --------------------------------------------------------------- adjudication


@dataclass(frozen=True)
class Adjudication:
    """Finite-scale reading of a transcript; never a completed-game claim."""

    label: str
    favored: str  # "I" | "II" | "open"
    evidence: dict = field(default_factory=dict, compare=False)


def adjudicate(transcript: GameTranscript, ideal: IdealPresentation) -> Adjudication:
    union = transcript.union_reply()
    if ideal.kind in ("z", "bd"):
        scale = 0
        for r in transcript.rounds:
            scale = max(scale, r.witness.get("scale", 0), max(r.reply))
        count = sum(1 for v in union if v <= scale)
        density = Fraction(count, scale) if scale else Fraction(0)
        favored = "II" if 2 * count >= scale and scale > 0 else "open"
        return Adjudication(
            label="finite-scale evidence",
            favored=favored,
            evidence={
                "scale": scale,
                "count": count,
                "density": str(density),
            },
        )
    if ideal.kind == "finxfin":
        last_new: dict[int, int] = {}
        seen: set[int] = set()
        for r in transcript.rounds:
            for v in r.reply:
                if v not in seen:
                    seen.add(v)
                    last_new[nu2(v)] = max(last_new.get(nu2(v), 0), r.index)
        frozen = all(last <= k + 1 for k, last in last_new.items())
        favored = "I" if frozen else "open"
        return Adjudication(
            label="finite-scale evidence",
            favored=favored,
            evidence={
                "fiber_last_growth": {str(k): v for k, v in sorted(last_new.items())},
                "fibers_frozen_by_index": frozen,
            },
        )
    if ideal.kind == "fin":
        return Adjudication(
            label="finite-scale evidence",
            favored="I",
            evidence={"union_size": len(union), "note": "finite replies stay finite"},
        )
    return Adjudication(
        label="finite-scale evidence", favored="open", evidence={"union_size": len(union)}
    )


# ----------------------------------------------------------- diagonal families


@dataclass(frozen=True)
class DiagonalizationFamily:
    """Doubly indexed finite sets F(n, k), used to probe universal rows."""

    name: str
    kind: str  # "singletons" | "intervals"

    def set_at(self, n: int, k: int) -> tuple[int, ...]:
        if n < 1 or k < 1:
            raise ValueError("family indices start at 1")
        if self.kind == "singletons":
            return (k,)
        return tuple(range(k, k + n))


SINGLETON_FAMILY = DiagonalizationFamily("singletons", "singletons")
INTERVAL_FAMILY = DiagonalizationFamily("intervals", "intervals")


@dataclass(frozen=True)
class UniversalRowReport:
    family: str
    row: int
    found: bool
    column: int | None
    checked: int


def check_universal_row(
    family: DiagonalizationFamily,
    n: int,
    corpus: list[SetDescription],
    k_cap: int = 10**4,
) -> UniversalRowReport:
    """Least k <= k_cap with F(n, k) inside every corpus set, if any."""
    for k in range(1, k_cap + 1):
        cell = family.set_at(n, k)
        if all(member(s, v) for s in corpus for v in cell):
            return UniversalRowReport(family.name, n, True, k, k)
    return UniversalRowReport(family.name, n, False, None, k_cap)
