"""Search for finite sequences of P-moves between two block decompositions.

States are block decompositions carrying their path; two states are the
same when their fingerprints agree.  The search grows a breadth-first
frontier from each end, one whole level at a time, always expanding the
smaller side.  Nodes in a level are expanded in fingerprint order and
sites in the order ``pmove_sites`` yields them, so the result does not
depend on anything but the inputs.
"""

from dataclasses import dataclass, field

from .block_builder import (
    BlockDecomposition, apply_pmove_blocks, inverse_location, pmove_sites,
)
from .core_model import PantsError
from .move_calculus import NoMatch, rule_by_name
from .surface_states import SlopeState

DEFAULT_BUDGET = 12


class ReplayMismatch(PantsError):
    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class PMoveSequence:
    """Steps are dicts {rule, location, dir} with dir "fwd" or "bwd"."""
    steps: tuple
    start: str
    end: str
    explored: int = field(default=0, compare=False)

    def __len__(self):
        return len(self.steps)

    def to_json(self):
        return {"steps": [dict(s) for s in self.steps], "start": self.start, "end": self.end}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(data["steps"]), data.get("start"), data.get("end"))

    def reversed(self, bd0):
        """The sequence run backwards, as a sequence from end to start."""
        states = replay_states(self, bd0)
        back = []
        for k in range(len(self.steps) - 1, -1, -1):
            back.append(_inverse_step(states[k], self.steps[k]))
        return PMoveSequence(tuple(back), self.end, self.start)


def _step(rule, location, forward):
    return {"rule": rule.name, "location": dict(location), "dir": "fwd" if forward else "bwd"}


def _apply_step(bd, step):
    return apply_pmove_blocks(bd, rule_by_name(step["rule"]), step["location"], step["dir"] == "fwd")


def _inverse_step(before, step):
    """The step undoing ``step``, to be applied to its result."""
    forward = step["dir"] == "fwd"
    rule = rule_by_name(step["rule"])
    loc = inverse_location(before, rule, step["location"], forward)
    return _step(rule, loc, not forward)


def _slope_pool(*bds):
    pool = set()
    for bd in bds:
        if bd.source is not None:
            for walk in bd.source.walks().values():
                pool.update(s for s in walk if isinstance(s, SlopeState))
    return tuple(sorted(pool, key=str))


def _neighbors(bd, pool):
    for rule, loc, forward in pmove_sites(bd, pool):
        try:
            nxt = apply_pmove_blocks(bd, rule, loc, forward)
        except (NoMatch, PantsError):
            continue
        yield _step(rule, loc, forward), nxt


def _expand(level, seen, pool, max_states):
    """Next BFS level; ``seen`` maps fingerprint -> (bd, parent fp, step)."""
    out = {}
    for fp in sorted(level):
        bd = level[fp]
        for step, nxt in _neighbors(bd, pool):
            f = nxt.fingerprint()
            if f in seen or f in out:
                continue
            seen[f] = (nxt, fp, step)
            out[f] = nxt
            if len(seen) > max_states:
                return out, True
    return out, False


def _trace(seen, fp):
    steps = []
    while seen[fp][1] is not None:
        _, parent, step = seen[fp]
        steps.append((seen[parent][0], step))
        fp = parent
    steps.reverse()
    return steps


def connect(bd0, bd1, budget=DEFAULT_BUDGET, pool=None, max_states=200000):
    """Shortest P-move sequence from bd0 to bd1 within ``budget`` steps, or None.

    None means the budget (or the state cap) ran out, not that no sequence
    exists.
    """
    for bd in (bd0, bd1):
        if not isinstance(bd, BlockDecomposition) or bd.source is None:
            raise TypeError("connect needs block decompositions built from a path")
    f0, f1 = bd0.fingerprint(), bd1.fingerprint()
    if f0 == f1:
        return PMoveSequence((), f0, f1)
    pool = tuple(pool) if pool is not None else _slope_pool(bd0, bd1)
    fwd = {f0: (bd0, None, None)}
    bwd = {f1: (bd1, None, None)}
    ffront, bfront = {f0: bd0}, {f1: bd1}
    dist_f = dist_b = 0
    explored = 0
    while dist_f + dist_b < budget and ffront and bfront:
        grow_fwd = len(ffront) <= len(bfront)
        if grow_fwd:
            ffront, capped = _expand(ffront, fwd, pool, max_states)
            dist_f += 1
        else:
            bfront, capped = _expand(bfront, bwd, pool, max_states)
            dist_b += 1
        explored = len(fwd) + len(bwd)
        meet = sorted(set(ffront if grow_fwd else bfront) & set(bwd if grow_fwd else fwd))
        if meet:
            return _join(fwd, bwd, meet[0], f0, f1, explored)
        if capped:
            return None
    return None


def _join(fwd, bwd, fp, f0, f1, explored):
    steps = [s for _, s in _trace(fwd, fp)]
    back = _trace(bwd, fp)
    for before, step in reversed(back):
        steps.append(_inverse_step(before, step))
    return PMoveSequence(tuple(steps), f0, f1, explored)


def replay_states(seq, bd0):
    """bd0 followed by the state after each step."""
    states = [bd0]
    for k, step in enumerate(seq.steps):
        try:
            states.append(_apply_step(states[-1], step))
        except (NoMatch, PantsError, KeyError) as e:
            raise ReplayMismatch(f"step {k} does not apply: {e}", k) from None
    return states


def replay(seq, bd0):
    states = replay_states(seq, bd0)
    end = states[-1]
    if seq.end is not None and end.fingerprint() != seq.end:
        raise ReplayMismatch("replay ends away from the recorded end state", len(seq.steps))
    return end
