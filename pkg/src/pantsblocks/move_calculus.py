"""Move words, relation cycles, path moves and the P-move list.

A word is a sequence of S and A letters.  Letters carry a small integer
label (distinct labels are distinct moves), an inversion flag and
optionally the support on which the move happens.  Rules are written with
schematic labels and supports, and are applied to words up to a consistent
bijective relabeling.

Text format, one word per line::

    a1 s2' a3@h1 @h2

``'`` marks an inverse, ``@id`` after a letter names its support, and a
standalone ``@id`` token supplies the support of every bare letter on the
line.
"""

import heapq
import re
from dataclasses import dataclass, field
from enum import Enum

from .core_model import S04, S05, S11, S12, PantsError, SupportId


class ParseError(PantsError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NoMatch(PantsError):
    pass


class VerificationFailed(PantsError):
    pass


S_KINDS = (S11, S12)
A_KINDS = (S04, S05, S12)


@dataclass(frozen=True, order=True)
class MoveLetter:
    """One S- or A-move.

    ``source``/``target`` optionally pin the move to concrete states (the
    state before and after the uninverted move); bare rewriting ignores them.
    """
    kind: str
    label: int
    inverted: bool = False
    support: SupportId = None
    source: object = field(default=None, compare=True)
    target: object = field(default=None, compare=True)

    def __post_init__(self):
        if self.kind not in ("S", "A"):
            raise ValueError(f"letter kind must be S or A, got {self.kind!r}")
        if self.support is not None:
            allowed = S_KINDS if self.kind == "S" else A_KINDS
            if self.support.kind not in allowed:
                raise ValueError(f"{self.kind} letter cannot live on a {self.support.kind} support")

    def inverse(self):
        return MoveLetter(self.kind, self.label, not self.inverted, self.support, self.source, self.target)

    def move_key(self):
        """Identity of the underlying move, ignoring direction."""
        return (self.kind, self.label, self.support, self.source, self.target)

    def cancels(self, other):
        return self.move_key() == other.move_key() and self.inverted != other.inverted

    def start_state(self):
        return self.target if self.inverted else self.source

    def end_state(self):
        return self.source if self.inverted else self.target

    def __str__(self):
        s = f"{self.kind.lower()}{self.label}{chr(39) if self.inverted else ''}"
        if self.support is not None:
            s += f"@{self.support.id}"
        return s


@dataclass(frozen=True)
class MoveWord:
    letters: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return MoveWord(self.letters[i])
        return self.letters[i]

    def __add__(self, other):
        return MoveWord(self.letters + tuple(other))

    def __str__(self):
        return " ".join(str(x) for x in self.letters)

    @classmethod
    def parse(cls, text, supports=None, line=1):
        return parse_word(text, supports, line)


_TOKEN = re.compile(r"([sSaA])(\d+)('?)(?:@([^\s@':]+))?$")


def _resolve_support(name, kind, supports, line, col):
    if name is None:
        return None
    if supports is not None and name in supports:
        return supports[name]
    # undeclared supports default to the fundamental surface of the letter
    return SupportId(name, S11 if kind == "S" else S04)


def parse_word(text, supports=None, line=1):
    """Parse one line of the word format; supports maps id -> SupportId."""
    tokens = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", text)]
    default = None
    for col, tok in tokens:
        if tok.startswith("@"):
            name = tok[1:]
            if not name or any(c in name for c in "@':"):
                raise ParseError(f"bad support token {tok!r}", line, col)
            if default is not None:
                raise ParseError("more than one default support on a line", line, col)
            default = (name, col)
    letters = []
    for col, tok in tokens:
        if tok.startswith("@"):
            continue
        m = _TOKEN.match(tok)
        if not m:
            raise ParseError(f"malformed token {tok!r}", line, col)
        kind = m.group(1).upper()
        name = m.group(4)
        if name is None and default is not None:
            name = default[0]
        try:
            sup = _resolve_support(name, kind, supports, line, col)
            letters.append(MoveLetter(kind, int(m.group(2)), bool(m.group(3)), sup))
        except ValueError as e:
            raise ParseError(str(e), line, col) from None
    word = MoveWord(letters)
    seen = {}
    for x in word:
        if x.support is not None:
            prev = seen.setdefault(x.support.id, x.support)
            if prev != x.support:
                raise ParseError(f"support {x.support.id} used with two kinds", line)
    return word


def parse_words(text, supports=None):
    return [parse_word(ln, supports, i) for i, ln in enumerate(text.splitlines(), 1)]


def free_reduce(w):
    """Delete adjacent x x^-1 pairs until none remain.

    The single stack pass gives the same normal form as any other reduction
    order, since free reduction is confluent.
    """
    out = []
    for x in w:
        if out and out[-1].cancels(x):
            out.pop()
        else:
            out.append(x)
    return MoveWord(out)


def invert_word(w):
    return MoveWord(x.inverse() for x in reversed(w.letters))


class RelationPattern(Enum):
    CancellingPair = ("CancellingPair", 2)
    STriangle = ("STriangle", 3)
    ATriangle = ("ATriangle", 3)
    Commutativity = ("Commutativity", 4)
    APentagon = ("APentagon", 5)
    MixedHexagon = ("MixedHexagon", 6)

    @property
    def arity(self):
        return self.value[1]


class Category(Enum):
    CancellingPair = "CancellingPair"
    Triangle12 = "Triangle12"
    Pentagon23 = "Pentagon23"
    Hexagon33 = "Hexagon33"
    PathOnly = "PathOnly"


# families group the path-move list the way the relations do
FAMILY_PATTERNS = {
    "cancelling": (RelationPattern.CancellingPair,),
    "triangle": (RelationPattern.STriangle, RelationPattern.ATriangle),
    "commutativity": (RelationPattern.Commutativity,),
    "pentagon": (RelationPattern.APentagon,),
    "hexagon": (RelationPattern.MixedHexagon,),
}


@dataclass(frozen=True)
class RewriteRule:
    lhs: MoveWord
    rhs: MoveWord
    category: Category
    family: str = ""
    name: str = ""

    def cycle(self):
        """The closed loop lhs followed by the reverse of rhs."""
        return self.lhs + invert_word(self.rhs)

    def edge_count(self):
        return len(self.lhs) + len(self.rhs)

    def swapped(self):
        return RewriteRule(self.rhs, self.lhs, self.category, self.family, self.name)

    def __str__(self):
        return f"{_side(self.lhs)} <-> {_side(self.rhs)}"


def _side(w):
    return str(w) if len(w) else "()"


def _cyclic_rotations(seq):
    return [seq[i:] + seq[:i] for i in range(len(seq))]


def _distinct_moves(letters):
    keys = [x.move_key() for x in letters]
    return len(set(keys)) == len(keys)


def _single_support(letters, kinds):
    sups = {x.support for x in letters}
    if len(sups) != 1:
        return False
    (sup,) = sups
    return sup is None or sup.kind in kinds


def _are_disjoint(a, b, disjoint):
    if a is None or b is None or a == b:
        return False
    if disjoint is None:
        return True
    return frozenset((a, b)) in disjoint or frozenset((a.id, b.id)) in disjoint


def matches_relation(cycle, disjoint=None):
    """Name the relation a closed cycle of letters traces, or None.

    ``disjoint`` is a set of unordered support pairs that are known to be
    disjoint; when omitted any two distinct supports count as disjoint.
    """
    xs = tuple(cycle)
    n = len(xs)
    kinds = "".join(x.kind for x in xs)
    if n == 2 and xs[0].cancels(xs[1]):
        return RelationPattern.CancellingPair
    if n == 3 and _distinct_moves(xs):
        if kinds == "SSS" and _single_support(xs, (S11,)):
            return RelationPattern.STriangle
        if kinds == "AAA" and _single_support(xs, (S04,)):
            return RelationPattern.ATriangle
    if n == 4:
        for r in _cyclic_rotations(xs):
            if (r[0].cancels(r[2]) and r[1].cancels(r[3])
                    and r[0].move_key() != r[1].move_key()
                    and _are_disjoint(r[0].support, r[1].support, disjoint)):
                return RelationPattern.Commutativity
    if n == 5 and kinds == "AAAAA" and _distinct_moves(xs) and _single_support(xs, (S05,)):
        return RelationPattern.APentagon
    if n == 6 and _distinct_moves(xs) and _single_support(xs, (S12,)):
        s_pos = [i for i, x in enumerate(xs) if x.kind == "S"]
        if len(s_pos) == 2 and s_pos[1] - s_pos[0] == 3:
            return RelationPattern.MixedHexagon
    return None


def _w(text, *supports):
    sups = {s.id: s for s in supports}
    return parse_word(text, sups)


_X11 = SupportId("X", S11)
_Y11 = SupportId("Y", S11)
_X04 = SupportId("X", S04)
_Y04 = SupportId("Y", S04)
_X05 = SupportId("X", S05)
_X12 = SupportId("X", S12)


def _rule(lhs, rhs, category, family, name, *sups):
    return RewriteRule(_w(lhs, *sups), _w(rhs, *sups), category, family, name)


def path_move_rules():
    """The complete path-move list, one representative per rotation/reversal."""
    cp, tri, po = Category.CancellingPair, Category.Triangle12, Category.PathOnly
    return [
        _rule("s1 s1' @X", "", cp, "cancelling", "cancelling s", _X11),
        _rule("a1 a1' @X", "", cp, "cancelling", "cancelling a", _X04),
        _rule("s1' @X", "s2 s3 @X", tri, "triangle", "S-triangle 1-2", _X11),
        _rule("a1' @X", "a2 a3 @X", tri, "triangle", "A-triangle 1-2", _X04),
        _rule("s1@X", "s2@Y s1@X s2'@Y", po, "commutativity", "commutativity 1-3 ss", _X11, _Y11),
        _rule("a1@X", "a2@Y a1@X a2'@Y", po, "commutativity", "commutativity 1-3 aa", _X04, _Y04),
        _rule("a1@Y", "s1@X a1@Y s1'@X", po, "commutativity", "commutativity 1-3 a-sas", _X11, _Y04),
        _rule("s1@X", "a1@Y s1@X a1'@Y", po, "commutativity", "commutativity 1-3 s-asa", _X11, _Y04),
        _rule("a1@X a2@Y", "a2@Y a1@X", po, "commutativity", "commutativity 2-2 aa", _X04, _Y04),
        _rule("s1@X s2@Y", "s2@Y s1@X", po, "commutativity", "commutativity 2-2 ss", _X11, _Y11),
        _rule("s1@X a1@Y", "a1@Y s1@X", po, "commutativity", "commutativity 2-2 sa", _X11, _Y04),
        _rule("a1' @X", "a2 a3 a4 a5 @X", po, "pentagon", "pentagon 1-4", _X05),
        _rule("a2' a1' @X", "a3 a4 a5 @X", Category.Pentagon23, "pentagon", "pentagon 2-3", _X05),
        _rule("a1' @X", "a2 s1 a3 a4 s2 @X", po, "hexagon", "hexagon 1-5 (i)", _X12),
        _rule("a1 @X", "s2' a4' a3' s1' a2' @X", po, "hexagon", "hexagon 1-5 (ii)", _X12),
        _rule("s2' @X", "a1 a2 s1 a3 a4 @X", po, "hexagon", "hexagon 1-5 (iii)", _X12),
        _rule("a1 a2 @X", "s2' a4' a3' s1' @X", po, "hexagon", "hexagon 2-4 (i)", _X12),
        _rule("a1' s2' @X", "a2 s1 a3 a4 @X", po, "hexagon", "hexagon 2-4 (ii)", _X12),
        _rule("s2' a4' @X", "a1 a2 s1 a3 @X", po, "hexagon", "hexagon 2-4 (iii)", _X12),
        _rule("a1 a2 s1 @X", "s2' a4' a3' @X", po, "hexagon", "hexagon 3-3 (i)", _X12),
        _rule("a1' s2' a4' @X", "a2 s1 a3 @X", Category.Hexagon33, "hexagon", "hexagon 3-3 (ii)", _X12),
    ]


def pmove_rules():
    """The six P-moves: one representative per conjugacy class, no commutations."""
    keep = ("cancelling s", "cancelling a", "S-triangle 1-2", "A-triangle 1-2",
            "pentagon 2-3", "hexagon 3-3 (ii)")
    by_name = {r.name: r for r in path_move_rules()}
    return [by_name[n] for n in keep]


def rule_by_name(name):
    for r in path_move_rules():
        if r.name == name:
            return r
    raise KeyError(name)


def _letter_key(x):
    return (x.kind, x.label)


def match_rule(w, rule, position, forward=True):
    """Unify the chosen rule side with w at position.

    Returns (label_map, support_map) from schematic to concrete values, or
    raises NoMatch.
    """
    side = rule.lhs if forward else rule.rhs
    n = len(side)
    if position < 0 or position + n > len(w):
        raise NoMatch(f"rule side of length {n} does not fit at position {position}")
    labels, sups = {}, {}
    for pat, x in zip(side, w.letters[position:position + n]):
        if pat.kind != x.kind or pat.inverted != x.inverted:
            raise NoMatch(f"{x} does not match {pat}")
        key = _letter_key(pat)
        if labels.setdefault(key, x.label) != x.label:
            raise NoMatch(f"label of {pat} bound twice")
        if sups.setdefault(pat.support, x.support) != x.support:
            raise NoMatch(f"support of {pat} bound twice")
        if (x.support is not None and pat.support is not None
                and rule.category != Category.CancellingPair and x.support.kind != pat.support.kind):
            raise NoMatch(f"support {x.support} has the wrong kind for {rule.name}")
    if _labels_collide(labels):
        raise NoMatch("relabeling is not injective")
    if len({s for s in sups.values()}) != len(sups):
        raise NoMatch("support relabeling is not injective")
    return labels, sups


def _labels_collide(labels):
    seen = set()
    for (kind, _), v in labels.items():
        if (kind, v) in seen:
            return True
        seen.add((kind, v))
    return False


def apply_rewrite(w, rule, position, forward=True, bindings=None, support=None):
    """Replace the matched side of rule at position by the other side.

    Schematic letters that only occur on the new side get labels from
    ``bindings`` (keyed by (kind, schematic label)) or else the smallest
    unused label of their kind; their support comes from ``support`` or the
    neighbouring letter.
    """
    labels, sups = match_rule(w, rule, position, forward)
    side_len = len(rule.lhs if forward else rule.rhs)
    other = rule.rhs if forward else rule.lhs
    rest = w.letters[:position] + w.letters[position + side_len:]
    used = {(x.kind, x.label) for x in rest} | {(k[0], v) for k, v in labels.items()}
    bindings = dict(bindings or {})
    if support is None:
        near = w.letters[position - 1:position] or w.letters[position:position + 1]
        support = near[0].support if near else None
    out = []
    for pat in other:
        key = _letter_key(pat)
        if key not in labels:
            if key in bindings:
                labels[key] = bindings[key]
            else:
                v = 1
                while (pat.kind, v) in used:
                    v += 1
                labels[key] = v
            used.add((pat.kind, labels[key]))
        if pat.support not in sups:
            sups[pat.support] = support
        out.append(MoveLetter(pat.kind, labels[key], pat.inverted, sups[pat.support]))
    return MoveWord(w.letters[:position] + tuple(out) + w.letters[position + side_len:])


# conjugacy derivations

@dataclass(frozen=True)
class InsertCancellingPair:
    side: str      # "lhs" or "rhs"
    end: str       # "head" or "tail"
    letter: MoveLetter

    def __str__(self):
        pair = f"{self.letter} {self.letter.inverse()}"
        return f"insert {pair} at the {self.end} of the {self.side}"


@dataclass(frozen=True)
class StripCommonLetter:
    end: str

    def __str__(self):
        return f"delete the common {self.end} letter"


@dataclass(frozen=True)
class SwapSides:
    def __str__(self):
        return "switch sides"


def _apply_step(lhs, rhs, step):
    if isinstance(step, SwapSides):
        return rhs, lhs
    if isinstance(step, InsertCancellingPair):
        pair = (step.letter, step.letter.inverse())
        side = lhs if step.side == "lhs" else rhs
        side = pair + side if step.end == "head" else side + pair
        return (side, rhs) if step.side == "lhs" else (lhs, side)
    if isinstance(step, StripCommonLetter):
        i = 0 if step.end == "head" else -1
        if not lhs or not rhs or lhs[i] != rhs[i]:
            raise VerificationFailed(f"no common {step.end} letter to delete")
        if step.end == "head":
            return lhs[1:], rhs[1:]
        return lhs[:-1], rhs[:-1]
    raise TypeError(step)


@dataclass(frozen=True)
class ConjugacyDerivation:
    steps: tuple
    source: RewriteRule
    target: RewriteRule

    @property
    def pairs(self):
        return sum(isinstance(s, InsertCancellingPair) for s in self.steps)

    def replay(self):
        lhs, rhs = self.source.lhs.letters, self.source.rhs.letters
        for step in self.steps:
            lhs, rhs = _apply_step(lhs, rhs, step)
        return MoveWord(lhs), MoveWord(rhs)

    def check(self):
        return self.replay() == (self.target.lhs, self.target.rhs)


MAX_TOTAL_PAIRS = 6


def _transfers(lhs, rhs):
    # moving an end letter across costs one inserted pair and one deletion
    for side, a, b in (("lhs", lhs, rhs), ("rhs", rhs, lhs)):
        if b:
            x = b[0]
            yield 1, (InsertCancellingPair(side, "head", x), StripCommonLetter("head"))
            x = b[-1]
            yield 1, (InsertCancellingPair(side, "tail", x.inverse()), StripCommonLetter("tail"))
    if lhs and rhs and lhs[0] == rhs[0]:
        yield 0, (StripCommonLetter("head"),)
    if lhs and rhs and lhs[-1] == rhs[-1]:
        yield 0, (StripCommonLetter("tail"),)


def derive_conjugacy(source, target, max_pairs=2):
    """Shortest derivation of target from source using at most max_pairs pairs.

    Uniform-cost search over end-letter transfers, capped at six inserted
    pairs.  Returns None when no derivation exists within the bound.
    """
    if source.edge_count() != target.edge_count():
        return None
    bound = min(max_pairs, MAX_TOTAL_PAIRS)
    goal = (target.lhs.letters, target.rhs.letters)
    start = (source.lhs.letters, source.rhs.letters)
    heap = [(0, 0, start, ())]
    best = {start: 0}
    tick = 0
    while heap:
        cost, _, state, steps = heapq.heappop(heap)
        if state == goal:
            return ConjugacyDerivation(steps, source, target)
        if (state[1], state[0]) == goal:
            return ConjugacyDerivation(steps + (SwapSides(),), source, target)
        if cost > best.get(state, cost):
            continue
        for c, seq in _transfers(*state):
            nc = cost + c
            if nc > bound:
                continue
            nxt = state
            for step in seq:
                nxt = _apply_step(nxt[0], nxt[1], step)
            if nc < best.get(nxt, bound + 1):
                best[nxt] = nc
                tick += 1
                heapq.heappush(heap, (nc, tick, nxt, steps + seq))
    return None


def derive_chain(source, target, rules, max_pairs=2):
    """Chain of derivations through rules, each link using <= max_pairs pairs.

    Minimizes the total number of inserted pairs, then the number of links.
    Returns a list of ConjugacyDerivation, or None.
    """
    nodes = list(rules)
    if target not in nodes:
        nodes.append(target)
    if source not in nodes:
        nodes.append(source)
    links = {}
    for a in nodes:
        for b in nodes:
            if a is not b and a != b:
                d = derive_conjugacy(a, b, max_pairs)
                if d is not None:
                    links[(nodes.index(a), nodes.index(b))] = d
    src, dst = nodes.index(source), nodes.index(target)
    heap = [(0, 0, src, 0, ())]
    seen = {}
    tick = 0
    while heap:
        pairs, hops, i, _, chain = heapq.heappop(heap)
        if i == dst:
            return list(chain)
        if seen.get(i, (99, 99)) <= (pairs, hops):
            continue
        seen[i] = (pairs, hops)
        for (a, b), d in links.items():
            if a == i and pairs + d.pairs <= MAX_TOTAL_PAIRS:
                tick += 1
                heapq.heappush(heap, (pairs + d.pairs, hops + 1, b, tick, chain + (d,)))
    return None


HEXAGON_NAMES = {
    0: "hexagon 3-3 (ii)",
    1: "hexagon 3-3 (i)",
    2: "hexagon 2-4 (ii)",
    3: "hexagon 1-5 (i)",
    4: "hexagon 2-4 (i)",
    5: "hexagon 2-4 (iii)",
    6: "hexagon 1-5 (ii)",
    7: "hexagon 1-5 (iii)",
}

# the derivation chains of the hexagon conjugacy argument and their bounds
LEMMA4_CHAINS = {1: (0, 1), 2: (0, 2), 3: (0, 2, 3), 4: (0, 1, 4),
                 5: (0, 5), 6: (0, 1, 4, 6), 7: (0, 5, 7)}
LEMMA4_PAIR_BOUNDS = {1: 2, 2: 1, 3: 2, 4: 3, 5: 1, 6: 4, 7: 2}


def hexagon_rules():
    """H_0 .. H_7 in the order used by the conjugacy argument."""
    return [rule_by_name(HEXAGON_NAMES[i]) for i in range(8)]


@dataclass
class Lemma4Entry:
    index: int
    chain: tuple
    link_pairs: tuple
    searched_pairs: int
    searched_links: int

    @property
    def total_pairs(self):
        return sum(self.link_pairs)

    @property
    def links(self):
        return len(self.link_pairs)


@dataclass
class Lemma4Report:
    entries: list
    ok: bool

    def lines(self):
        out = ["H_i  chain              pairs/link  total-pairs  links  bound  search(pairs,links)"]
        for e in self.entries:
            chain = "->".join(f"H{i}" for i in e.chain)
            out.append(f"H{e.index}   {chain:<18} {','.join(map(str, e.link_pairs)):<11} "
                       f"{e.total_pairs:<12} {e.links:<6} {LEMMA4_PAIR_BOUNDS[e.index]:<6} "
                       f"({e.searched_pairs},{e.searched_links})")
        out.append("reading 1 (steps = inserted pairs): "
                   + ", ".join(f"H{e.index}={e.total_pairs}" for e in self.entries))
        out.append("reading 2 (steps = links of <= 2 pairs): "
                   + ", ".join(f"H{e.index}={e.links}" for e in self.entries))
        out.append("result: " + ("verified" if self.ok else "FAILED"))
        return out

    def to_json(self):
        return {
            "entries": [
                {"target": f"H{e.index}", "chain": [f"H{i}" for i in e.chain],
                 "pairs_per_link": list(e.link_pairs), "total_pairs": e.total_pairs,
                 "links": e.links, "bound": LEMMA4_PAIR_BOUNDS[e.index],
                 "search_total_pairs": e.searched_pairs, "search_links": e.searched_links}
                for e in self.entries],
            "ok": self.ok,
        }


def verify_lemma4():
    """Check that every H_i follows from H_0 within the stated bounds.

    Each link of the stated chains is re-derived by search with at most two
    inserted pairs and replayed; an independent search over all eight
    hexagon rules confirms nothing shorter is missed in a way that would
    contradict the bounds.
    """
    hs = hexagon_rules()
    entries = []
    for i in range(1, 8):
        chain = LEMMA4_CHAINS[i]
        link_pairs = []
        for a, b in zip(chain, chain[1:]):
            d = derive_conjugacy(hs[a], hs[b], 2)
            if d is None or not d.check():
                raise VerificationFailed(f"H{a} -> H{b} needs more than two cancelling pairs")
            link_pairs.append(d.pairs)
        found = derive_chain(hs[0], hs[i], hs, 2)
        if found is None:
            raise VerificationFailed(f"H{i} is not reachable from H0")
        entries.append(Lemma4Entry(i, chain, tuple(link_pairs),
                                   sum(d.pairs for d in found), len(found)))
    ok = all(e.total_pairs <= LEMMA4_PAIR_BOUNDS[e.index] and max(e.link_pairs) <= 2
             and e.searched_pairs <= e.total_pairs for e in entries)
    if not ok:
        raise VerificationFailed("chain bound exceeded")
    return Lemma4Report(entries, ok)
