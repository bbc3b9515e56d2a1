"""Problem instances: data model, text formats, validation, and generators.

An instance has n men and m women. Each person ranks an acceptable subset
of the opposite side as an ordered sequence of tie groups; everyone in a
group is equally preferred, earlier groups are strictly preferred to later
ones. Acceptability must be mutual. ``tie_cap`` bounds the size of every
tie group and doubles as the per-person proposal budget downstream.
"""
from __future__ import annotations

import hashlib
import random
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple

MAN = "m"
WOMAN = "w"

# Ordered tie groups over opposite-side ids, e.g. ((1, 4), (3,)).
PrefGroups = tuple[tuple[int, ...], ...]


class PersonId(NamedTuple):
    side: str  # MAN or WOMAN
    index: int  # 1-based


class Preference(Enum):
    PREFERS_X = "prefers_x"
    PREFERS_Y = "prefers_y"
    TIE = "tie"


class ParseError(ValueError):
    """Syntax or consistency error in instance or matching text."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)


@dataclass(frozen=True)
class Instance:
    """Immutable preference system; build through parse_instance or a generator."""

    n_men: int
    n_women: int
    men_prefs: tuple[PrefGroups, ...]
    women_prefs: tuple[PrefGroups, ...]
    tie_cap: int

    def man_groups(self, a: int) -> PrefGroups:
        return self.men_prefs[a - 1]

    def woman_groups(self, b: int) -> PrefGroups:
        return self.women_prefs[b - 1]

    def man_neighbors(self, a: int) -> tuple[int, ...]:
        return tuple(w for group in self.men_prefs[a - 1] for w in group)

    def woman_neighbors(self, b: int) -> tuple[int, ...]:
        return tuple(m for group in self.women_prefs[b - 1] for m in group)

    def edges(self) -> list[tuple[int, int]]:
        """All acceptable pairs (man, woman), sorted."""
        return sorted((a, b) for a in range(1, self.n_men + 1) for b in self.man_neighbors(a))


@dataclass(frozen=True)
class Matching:
    """A set of (man, woman) pairs, each person in at most one pair."""

    pairs: frozenset[tuple[int, int]]

    @property
    def size(self) -> int:
        return len(self.pairs)

    def man_to_woman(self) -> dict[int, int]:
        return {a: b for a, b in self.pairs}

    def woman_to_man(self) -> dict[int, int]:
        return {b: a for a, b in self.pairs}

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.pairs)


def compare(pl: PrefGroups, x: int, y: int) -> Preference:
    """Relate two ids under one person's preference groups."""
    gx = group_index(pl, x)
    gy = group_index(pl, y)
    if gx < gy:
        return Preference.PREFERS_X
    if gy < gx:
        return Preference.PREFERS_Y
    return Preference.TIE


def group_index(pl: PrefGroups, x: int) -> int:
    for i, group in enumerate(pl):
        if x in group:
            return i
    raise ValueError(f"id {x} is not on this preference list")


def build_rank_tables(inst: Instance) -> tuple[list[dict[int, int]], list[dict[int, int]]]:
    """Group-index lookups per person; entry 0 of each list is unused."""
    rank_m: list[dict[int, int]] = [{}]
    for a in range(1, inst.n_men + 1):
        rank_m.append({b: i for i, group in enumerate(inst.man_groups(a)) for b in group})
    rank_w: list[dict[int, int]] = [{}]
    for b in range(1, inst.n_women + 1):
        rank_w.append({a: i for i, group in enumerate(inst.woman_groups(b)) for a in group})
    return rank_m, rank_w


def observed_max_tie(inst_or_prefs) -> int:
    if isinstance(inst_or_prefs, Instance):
        all_prefs: Iterable[PrefGroups] = list(inst_or_prefs.men_prefs) + list(inst_or_prefs.women_prefs)
    else:
        all_prefs = inst_or_prefs
    sizes = [len(group) for pl in all_prefs for group in pl]
    return max(sizes, default=1)


def validate_instance(inst: Instance) -> None:
    """Raise ValueError on any structural defect."""
    if inst.n_men < 1 or inst.n_women < 1:
        raise ValueError("instance needs at least one person per side")
    if len(inst.men_prefs) != inst.n_men or len(inst.women_prefs) != inst.n_women:
        raise ValueError("preference table length does not match the declared counts")
    for side, prefs, limit in ((MAN, inst.men_prefs, inst.n_women), (WOMAN, inst.women_prefs, inst.n_men)):
        for idx, pl in enumerate(prefs, start=1):
            seen: set[int] = set()
            for group in pl:
                if not group:
                    raise ValueError(f"{side} {idx}: empty tie group")
                for x in group:
                    if not 1 <= x <= limit:
                        raise ValueError(f"{side} {idx}: id {x} out of range 1..{limit}")
                    if x in seen:
                        raise ValueError(f"{side} {idx}: duplicate entry {x}")
                    seen.add(x)
    if inst.tie_cap < observed_max_tie(inst):
        raise ValueError(f"tie_cap {inst.tie_cap} is below the largest tie group")
    if inst.tie_cap < 1:
        raise ValueError("tie_cap must be at least 1")
    # acceptability must be mutual in both directions
    for a in range(1, inst.n_men + 1):
        for b in inst.man_neighbors(a):
            if a not in inst.woman_neighbors(b):
                raise ValueError(f"man {a} lists woman {b} but woman {b} does not list man {a}")
    for b in range(1, inst.n_women + 1):
        for a in inst.woman_neighbors(b):
            if b not in inst.man_neighbors(a):
                raise ValueError(f"woman {b} lists man {a} but man {a} does not list woman {b}")


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def _parse_entries(tail: str, line_no: int, col_offset: int, limit: int) -> PrefGroups:
    groups: list[tuple[int, ...]] = []
    open_group: list[int] | None = None
    open_col = 0
    seen: set[int] = set()
    for match in _TOKEN.finditer(tail):
        tok = match.group()
        col = col_offset + match.start() + 1
        if tok == "(":
            if open_group is not None:
                raise ParseError("nested '(' in preference list", line_no, col)
            open_group = []
            open_col = col
        elif tok == ")":
            if open_group is None:
                raise ParseError("')' without matching '('", line_no, col)
            if not open_group:
                raise ParseError("empty tie group", line_no, col)
            groups.append(tuple(open_group))
            open_group = None
        else:
            if not tok.isdigit():
                raise ParseError(f"expected an id, got '{tok}'", line_no, col)
            val = int(tok)
            if not 1 <= val <= limit:
                raise ParseError(f"id {val} out of range 1..{limit}", line_no, col)
            if val in seen:
                raise ParseError(f"duplicate entry {val}", line_no, col)
            seen.add(val)
            if open_group is not None:
                open_group.append(val)
            else:
                groups.append((val,))
    if open_group is not None:
        raise ParseError("unclosed '('", line_no, open_col)
    return tuple(groups)


def parse_instance(text: str) -> Instance:
    """Parse the instance text format.

    Layout: optional ``tiecap <L>`` header, ``men <n>`` and ``women <m>``
    lines, then one ``m <id>: <entries>`` line per man and one
    ``w <id>: <entries>`` line per woman. Entries are bare ids or
    parenthesised tie groups; ``#`` starts a comment.
    """
    n_men: int | None = None
    n_women: int | None = None
    tie_override: int | None = None
    men_lists: dict[int, PrefGroups] = {}
    women_lists: dict[int, PrefGroups] = {}
    lists_started = False

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        head, colon, tail = line.partition(":")
        head_tokens = head.split()
        kind = head_tokens[0]
        if kind in ("men", "women", "tiecap"):
            if colon:
                raise ParseError(f"unexpected ':' on a {kind} line", line_no)
            if len(head_tokens) != 2 or not head_tokens[1].isdigit():
                raise ParseError(f"expected '{kind} <count>'", line_no)
            value = int(head_tokens[1])
            if kind == "tiecap":
                if lists_started:
                    raise ParseError("tiecap header must precede the preference lists", line_no)
                if tie_override is not None:
                    raise ParseError("duplicate tiecap header", line_no)
                tie_override = value
            elif kind == "men":
                if n_men is not None:
                    raise ParseError("duplicate men header", line_no)
                n_men = value
            else:
                if n_women is not None:
                    raise ParseError("duplicate women header", line_no)
                n_women = value
        elif kind in (MAN, WOMAN):
            if n_men is None or n_women is None:
                raise ParseError("men and women counts must appear before preference lists", line_no)
            if len(head_tokens) != 2 or not head_tokens[1].isdigit() or not colon:
                raise ParseError(f"expected '{kind} <id>: <entries>'", line_no)
            lists_started = True
            pid = int(head_tokens[1])
            limit = n_men if kind == MAN else n_women
            if not 1 <= pid <= limit:
                raise ParseError(f"{kind} id {pid} out of range 1..{limit}", line_no)
            target = men_lists if kind == MAN else women_lists
            if pid in target:
                raise ParseError(f"duplicate preference line for {kind} {pid}", line_no)
            entry_limit = n_women if kind == MAN else n_men
            target[pid] = _parse_entries(tail, line_no, len(head) + 1, entry_limit)
        else:
            raise ParseError(f"unrecognised line start '{kind}'", line_no, line.index(kind) + 1)

    if n_men is None or n_women is None:
        raise ParseError("missing men or women header")
    if n_men < 1 or n_women < 1:
        raise ParseError("men and women counts must be positive")
    for a in range(1, n_men + 1):
        if a not in men_lists:
            raise ParseError(f"no preference line for man {a}")
    for b in range(1, n_women + 1):
        if b not in women_lists:
            raise ParseError(f"no preference line for woman {b}")

    men_prefs = tuple(men_lists[a] for a in range(1, n_men + 1))
    women_prefs = tuple(women_lists[b] for b in range(1, n_women + 1))
    observed = observed_max_tie(list(men_prefs) + list(women_prefs))
    tie_cap = observed
    if tie_override is not None:
        if tie_override < observed:
            raise ParseError(f"tiecap {tie_override} is smaller than the largest tie group ({observed})")
        tie_cap = tie_override
    inst = Instance(n_men, n_women, men_prefs, women_prefs, tie_cap)
    try:
        validate_instance(inst)
    except ValueError as exc:
        # e.g. one-sided acceptability; no single line to blame
        raise ParseError(str(exc)) from None
    return inst


def _format_group(group: tuple[int, ...]) -> str:
    if len(group) == 1:
        return str(group[0])
    return "(" + " ".join(str(x) for x in group) + ")"


def serialize_instance(inst: Instance) -> str:
    """Canonical text form; parse_instance(serialize_instance(i)) == i."""
    lines: list[str] = []
    if inst.tie_cap > observed_max_tie(inst):
        lines.append(f"tiecap {inst.tie_cap}")
    lines.append(f"men {inst.n_men}")
    lines.append(f"women {inst.n_women}")
    for a in range(1, inst.n_men + 1):
        entries = " ".join(_format_group(g) for g in inst.man_groups(a))
        lines.append(f"m {a}: {entries}".rstrip())
    for b in range(1, inst.n_women + 1):
        entries = " ".join(_format_group(g) for g in inst.woman_groups(b))
        lines.append(f"w {b}: {entries}".rstrip())
    return "\n".join(lines) + "\n"


def instance_key(inst: Instance) -> str:
    """Short stable fingerprint used to tie run artifacts together."""
    return hashlib.sha256(serialize_instance(inst).encode()).hexdigest()[:16]


def parse_matching(text: str) -> list[tuple[int, int]]:
    """Parse matching text: one '<man> <woman>' pair per line, '#' comments."""
    pairs: list[tuple[int, int]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise ParseError("expected '<man> <woman>'", line_no)
        pairs.append((int(parts[0]), int(parts[1])))
    return pairs


def build_matching(inst: Instance, pairs: Iterable[tuple[int, int]]) -> Matching:
    """Validate pairs against the instance and freeze them into a Matching."""
    seen_m: set[int] = set()
    seen_w: set[int] = set()
    out: set[tuple[int, int]] = set()
    for a, b in pairs:
        if not 1 <= a <= inst.n_men or not 1 <= b <= inst.n_women:
            raise ValueError(f"pair ({a}, {b}) is out of range")
        if b not in inst.man_neighbors(a):
            raise ValueError(f"pair ({a}, {b}) is not an acceptable pair")
        if a in seen_m:
            raise ValueError(f"man {a} appears in more than one pair")
        if b in seen_w:
            raise ValueError(f"woman {b} appears in more than one pair")
        seen_m.add(a)
        seen_w.add(b)
        out.add((a, b))
    return Matching(frozenset(out))


def serialize_matching(matching: Matching) -> str:
    return "".join(f"{a} {b}\n" for a, b in matching.sorted_pairs())


def gen_tight(L: int) -> Instance:
    """Adversarial family with 3L-2 people per side, parameterised by L >= 2.

    The unique maximum stable matching pairs k with k on both sides (size
    3L-2) while the solver is driven to 2L-1, meeting its guarantee with
    equality. Canonical numbering: person 1, then the alpha block, the
    beta block, and the gamma block, each of size L-1.
    """
    if L < 2:
        raise ValueError("the tight family needs L >= 2")
    n = 3 * L - 2
    alpha = lambda i: 1 + i          # noqa: E731 - tiny index helpers
    beta = lambda i: L + i           # noqa: E731
    gamma = lambda i: 2 * L - 1 + i  # noqa: E731
    gammas = tuple(gamma(i) for i in range(1, L))
    alphas = tuple(alpha(i) for i in range(1, L))
    betas = tuple(beta(i) for i in range(1, L))

    men: list[PrefGroups] = [((1,) + gammas,)]
    for i in range(1, L):
        men.append(((alpha(i),) + gammas,))
    for i in range(1, L):
        men.append(((1,) + alphas, (beta(i),)))
    for i in range(1, L):
        men.append(((gamma(i),),))

    women: list[PrefGroups] = [((1,) + betas,)]
    for i in range(1, L):
        # strict list: own alpha partner first, then each beta man
        women.append(((alpha(i),),) + tuple((b,) for b in betas))
    for i in range(1, L):
        women.append(((beta(i),),))
    for i in range(1, L):
        women.append(((1,) + alphas, (gamma(i),)))

    inst = Instance(n, n, tuple(men), tuple(women), L)
    validate_instance(inst)
    return inst


def tight_optimum(L: int) -> Matching:
    """The perfect stable matching of gen_tight(L): k with k on both sides."""
    if L < 2:
        raise ValueError("the tight family needs L >= 2")
    return Matching(frozenset((k, k) for k in range(1, 3 * L - 1)))


def gen_random(n_men: int, n_women: int, density: float, max_tie: int, seed: int) -> Instance:
    """Random instance: each pair acceptable with probability ``density``,
    preference lists shuffled and cut into tie groups of size <= max_tie.

    Deterministic for fixed arguments. Redraws the edge set until every
    person has a non-empty list; gives up after 1000 attempts.
    """
    if n_men < 1 or n_women < 1:
        raise ValueError("need at least one person per side")
    if not 0.0 < density <= 1.0:
        raise ValueError("density must be in (0, 1]")
    if max_tie < 1:
        raise ValueError("max_tie must be at least 1")
    rng = random.Random(seed)
    for _ in range(1000):
        by_man: list[list[int]] = [[] for _ in range(n_men + 1)]
        by_woman: list[list[int]] = [[] for _ in range(n_women + 1)]
        for a in range(1, n_men + 1):
            for b in range(1, n_women + 1):
                if rng.random() < density:
                    by_man[a].append(b)
                    by_woman[b].append(a)
        if all(by_man[a] for a in range(1, n_men + 1)) and all(by_woman[b] for b in range(1, n_women + 1)):
            break
    else:
        raise ValueError("could not draw an instance where everyone has a non-empty list")

    def to_groups(ids: list[int]) -> PrefGroups:
        order = ids[:]
        rng.shuffle(order)
        groups: list[tuple[int, ...]] = []
        pos = 0
        while pos < len(order):
            k = rng.randint(1, min(max_tie, len(order) - pos))
            groups.append(tuple(order[pos:pos + k]))
            pos += k
        return tuple(groups)

    men_prefs = tuple(to_groups(by_man[a]) for a in range(1, n_men + 1))
    women_prefs = tuple(to_groups(by_woman[b]) for b in range(1, n_women + 1))
    tie_cap = observed_max_tie(list(men_prefs) + list(women_prefs))
    inst = Instance(n_men, n_women, men_prefs, women_prefs, tie_cap)
    validate_instance(inst)
    return inst
