"""Linearizability checking for queue histories.

The checker decides whether a concurrent queue history is linearizable
without enumerating permutations.  For a complete history whose enqueue
arguments are pairwise distinct (a *differentiated* history) it scans for
four violation patterns:

* VFresh  - a value is dequeued that was never enqueued, or only later;
* VRepet  - the same non-NULL value is dequeued twice;
* VOrd    - two ordered enqueues whose dequeues are missing or inverted;
* VWit    - a NULL dequeue ran while the queue was never observably empty.

A complete differentiated history is linearizable exactly when none of the
four patterns occurs; in that case a witness linearization is built from
the value-derived match between dequeues and enqueues.  Histories with
duplicate enqueue arguments fall back to enumerating candidate matches, and
incomplete histories are handled through their completions.

``brute_force_linearizable`` is the independent oracle: it searches for a
precedence-respecting permutation of some completion that the queue LTS
accepts, and shares nothing with the pattern scan above.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .history import DEQ, ENQ, NULL, Event, History, Value
from .queuespec import Behavior, SearchBoundExceeded, is_legal

DEFAULT_MATCH_BOUND = 10_000

LINEARIZABLE = "LINEARIZABLE"
VIOLATION = "VIOLATION"
INDETERMINATE = "INDETERMINATE"


class EnqOrderCycle(RuntimeError):
    """The derived enqueue order contains a cycle; the supplied match is not
    a linearization witness (or there is an internal inconsistency)."""


# ---- violation evidence ----


@dataclass(frozen=True)
class VFresh:
    d: int

    kind = "vfresh"

    def summary(self) -> str:
        return f"vfresh d={self.d}"


@dataclass(frozen=True)
class VRepet:
    d: int
    d2: int

    kind = "vrepet"

    def summary(self) -> str:
        return f"vrepet d={self.d} d2={self.d2}"


@dataclass(frozen=True)
class VOrd:
    e1: int
    e2: int
    d2: int
    d1: int | None = None

    kind = "vord"

    def summary(self) -> str:
        s = f"vord e1={self.e1} e2={self.e2} d2={self.d2}"
        if self.d1 is not None:
            s += f" d1={self.d1}"
        return s


@dataclass(frozen=True)
class VWit:
    d: int
    alive: tuple[int, ...]  # one alive enqueue per split of the pending window

    kind = "vwit"

    def summary(self) -> str:
        return f"vwit d={self.d} alive={','.join(map(str, self.alive))}"


Violation = VFresh | VRepet | VOrd | VWit


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: Behavior | None = None
    violation: Violation | None = None
    reason: str | None = None

    def summary(self) -> str:
        if self.status == LINEARIZABLE:
            return LINEARIZABLE
        if self.status == VIOLATION:
            if self.violation is not None:
                return f"VIOLATION {self.violation.summary()}"
            return f"VIOLATION no-witness {self.reason or ''}".rstrip()
        return f"INDETERMINATE {self.reason or ''}".rstrip()


# ---- match mappings ----

# A match maps each dequeue uid to the enqueue uid it takes its value from,
# or to None for a NULL dequeue.
Match = dict[int, int | None]


def derive_match(c: History) -> Match | None:
    """The unique value-derived match of a complete differentiated history,
    or None when some dequeued value was never enqueued."""
    if not c.is_differentiated:
        raise ValueError("history has duplicate enqueue values; use candidate_matches")
    enq_by_value = {e.value: e.uid for e in c.events if e.is_enq}
    match: Match = {}
    for d in c.events:
        if not d.is_deq:
            continue
        if d.value is NULL:
            match[d.uid] = None
        else:
            e = enq_by_value.get(d.value)
            if e is None:
                return None
            match[d.uid] = e
    return match


def candidate_matches(c: History, bound: int = DEFAULT_MATCH_BOUND) -> Iterator[Match]:
    """Every value-respecting injective match of a complete history.

    For a differentiated history this yields at most the single value-derived
    match.  Raises SearchBoundExceeded after ``bound`` full candidates.
    """
    deqs = [d for d in c.events if d.is_deq and d.value is not NULL]
    base: Match = {d.uid: None for d in c.events if d.is_deq and d.value is NULL}
    by_value: dict[Value, list[int]] = {}
    for e in c.events:
        if e.is_enq:
            by_value.setdefault(e.value, []).append(e.uid)
    count = 0

    def assign(i: int, used: set[int], acc: Match) -> Iterator[Match]:
        nonlocal count
        if i == len(deqs):
            count += 1
            if count > bound:
                raise SearchBoundExceeded(f"more than {bound} candidate matches")
            yield dict(acc)
            return
        d = deqs[i]
        for euid in by_value.get(d.value, ()):
            if euid in used:
                continue
            acc[d.uid] = euid
            used.add(euid)
            yield from assign(i + 1, used, acc)
            used.remove(euid)
            del acc[d.uid]

    yield from assign(0, set(), dict(base))


def check_safe(c: History, match: Match) -> str | None:
    """The three safety clauses; None when all hold, else the first failed
    one of: value-agreement, null-iff-bottom, injective."""
    by_uid = {e.uid: e for e in c.events}
    for d in c.events:
        if not d.is_deq:
            continue
        target = match[d.uid]
        if target is not None and by_uid[target].value != d.value:
            return "value-agreement"
    for d in c.events:
        if not d.is_deq:
            continue
        if (match[d.uid] is None) != (d.value is NULL):
            return "null-iff-bottom"
    targets = [t for t in match.values() if t is not None]
    if len(targets) != len(set(targets)):
        return "injective"
    return None


def check_ordered(c: History, match: Match) -> str | None:
    """The two ordering clauses; None when both hold.

    no-future-take: a dequeue must not strictly precede the enqueue it takes
    its value from.  fifo: when an enqueue precedes the enqueue consumed by
    d2, that earlier enqueue is itself consumed, by a dequeue that d2 does
    not strictly precede.
    """
    for d, target in match.items():
        if target is not None and c.precedes(d, target):
            return "no-future-take"
    inverse = {e: d for d, e in match.items() if e is not None}
    enq_uids = [e.uid for e in c.events if e.is_enq]
    for d2, target in match.items():
        if target is None:
            continue
        for e in enq_uids:
            if c.precedes(e, target):
                d = inverse.get(e)
                if d is None or c.precedes(d2, d):
                    return "fifo"
    return None


def bad_levels(c: History, match: Match, d_bot: int) -> list[frozenset[int]]:
    """Cumulative stages of the bad set for a NULL dequeue.

    Stage 0 holds every enqueue that cannot be drained before d_bot returns:
    it starts after d_bot, or its dequeue is missing or starts after d_bot.
    Each later stage adds enqueues forced behind a bad one, directly or
    through the dequeue that consumes them.  The fixpoint is reached within
    one stage per enqueue.
    """
    inverse = {e: d for d, e in match.items() if e is not None}
    enqs = [e.uid for e in c.events if e.is_enq]
    level: set[int] = set()
    for e in enqs:
        d = inverse.get(e)
        if c.precedes(d_bot, e) or d is None or c.precedes(d_bot, d):
            level.add(e)
    levels = [frozenset(level)]
    while True:
        new = set(level)
        for e in enqs:
            if e in level:
                continue
            d = inverse.get(e)
            for ei in level:
                if c.precedes(ei, e) or (d is not None and c.precedes(ei, d)):
                    new.add(e)
                    break
        if new == level:
            return levels
        level = new
        levels.append(frozenset(level))


def compute_bad(c: History, match: Match, d_bot: int) -> frozenset[int]:
    return bad_levels(c, match, d_bot)[-1]


def is_linearization_witness(c: History, match: Match) -> bool:
    """True when no NULL dequeue has a bad enqueue among its predecessors.

    Assumes the match already passed check_safe and check_ordered.
    """
    for d, target in match.items():
        if target is None:
            if compute_bad(c, match, d) & c.before_set(d):
                return False
    return True


def alt_witness_check(c: History, match: Match, d_bot: int) -> bool:
    """Decide the set-pair reformulation of the NULL-dequeue condition.

    Builds the candidate pair constructively: the enqueues that are neither
    after d_bot nor bad, plus the dequeues consuming them and the NULL
    dequeues preceding any of those.  Returns whether the pair meets the
    three requirements (disjoint from After(d_bot), closed under precedence,
    and squeezing Before(d_bot)'s enqueues into matched territory).
    """
    after = c.after_set(d_bot)
    bad = compute_bad(c, match, d_bot)
    enq_uids = {e.uid for e in c.events if e.is_enq}
    e_hat = {e for e in enq_uids if e not in after and e not in bad}
    d_prime = {d for d, t in match.items() if t is not None and t in e_hat}
    d_hat = set(d_prime)
    for d, t in match.items():
        if t is None and any(c.precedes(d, a) for a in e_hat | d_prime):
            d_hat.add(d)
    union = d_hat | e_hat
    if union & after:
        return False
    for a in union:
        if not c.before_set(a) <= union:
            return False
    before_enqs = c.before_set(d_bot) & enq_uids
    if not before_enqs <= e_hat:
        return False
    matched = {match[d] for d in d_hat if match[d] is not None}
    if not e_hat <= matched:
        return False
    return True


def enq_order(c: History, match: Match) -> frozenset[tuple[int, int]]:
    """The transitive enqueue-ordering relation induced by the match.

    Two enqueues are ordered when one precedes the other; overlapping
    enqueues are ordered by their dequeues (consumed before unconsumed;
    earlier dequeue first) or by a NULL dequeue that separates them into
    drainable and undrainable.  Raises EnqOrderCycle if the transitive
    closure is not a strict partial order.
    """
    enqs = [e.uid for e in c.events if e.is_enq]
    inverse = {e: d for d, e in match.items() if e is not None}
    null_bads = [
        compute_bad(c, match, d) for d, t in match.items() if t is None
    ]
    pairs: set[tuple[int, int]] = set()
    for e1, e2 in itertools.permutations(enqs, 2):
        if c.precedes(e1, e2):
            pairs.add((e1, e2))
            continue
        if c.precedes(e2, e1):
            continue
        d1 = inverse.get(e1)
        d2 = inverse.get(e2)
        if d1 is not None and d2 is None:
            pairs.add((e1, e2))
        elif d1 is not None and d2 is not None:
            if c.precedes(d1, d2):
                pairs.add((e1, e2))
            elif any(e1 not in bad and e2 in bad for bad in null_bads):
                pairs.add((e1, e2))
    # transitive closure
    succ: dict[int, set[int]] = {e: set() for e in enqs}
    for a, b in pairs:
        succ[a].add(b)
    changed = True
    while changed:
        changed = False
        for a in enqs:
            extra = set()
            for b in succ[a]:
                extra |= succ[b] - succ[a]
            if extra:
                succ[a] |= extra
                changed = True
    for a in enqs:
        if a in succ[a]:
            raise EnqOrderCycle(f"enqueue {a} ordered before itself")
    return frozenset((a, b) for a in enqs for b in succ[a])


def _total_enq_order(c: History, match: Match) -> dict[int, int]:
    """Extend the enqueue order to a total order, lowest uid first among
    unconstrained enqueues.  Returns uid -> rank."""
    enqs = sorted(e.uid for e in c.events if e.is_enq)
    order = enq_order(c, match)
    preds: dict[int, set[int]] = {e: set() for e in enqs}
    for a, b in order:
        preds[b].add(a)
    rank: dict[int, int] = {}
    remaining = set(enqs)
    while remaining:
        avail = [e for e in sorted(remaining) if not preds[e] & remaining]
        pick = avail[0]
        rank[pick] = len(rank)
        remaining.remove(pick)
    return rank


def construct_linearization(c: History, match: Match) -> Behavior:
    """Build a legal linearization of a complete history from a match that
    passed the safety, ordering and NULL-dequeue checks.

    The enqueue order is extended once to a total order; events are then
    peeled off the end.  At each stage a precedence-maximal event is chosen
    that the queue could perform last: a NULL dequeue whose remaining bad
    set is empty, else the top-ranked remaining enqueue provided it is not
    consumed by a remaining dequeue, else the dequeue consuming the
    top-ranked still-matched enqueue.  Ties break to the lowest uid.

    Two orderings here are load-bearing.  The rank must come from the full
    history: dropping a dequeue forgets how it ordered the overlapping
    enqueues around it, so ranks recomputed on sub-histories can flip.  And
    an eligible unconsumed enqueue must be peeled before any dequeue: it
    sits behind every value still to be consumed, so a dequeue peeled past
    it would strand a NULL dequeue deeper in (a NULL dequeue is never
    eligible while an unconsumed enqueue remains beside it, which also
    means the first two pick classes cannot both be nonempty).
    """
    if not c.is_complete:
        raise ValueError("history must be complete")
    if (clause := check_safe(c, match)) is not None:
        raise ValueError(f"match is not safe: {clause}")
    if (clause := check_ordered(c, match)) is not None:
        raise ValueError(f"match is not ordered: {clause}")
    if not is_linearization_witness(c, match):
        raise ValueError("match fails the NULL-dequeue condition")
    by_uid = {e.uid: e for e in c.events}
    rank = _total_enq_order(c, match)
    remaining = set(by_uid)
    out_rev: list[Event] = []
    while remaining:
        sub = c.restrict(remaining)
        m = {d: e for d, e in match.items() if d in remaining}
        matched_targets = {e for e in m.values() if e is not None}
        live_ranks = [rank[u] for u in remaining if u in rank]
        e_star_rank = max(live_ranks, default=None)
        top_matched = max((rank[e] for e in matched_targets), default=None)
        null_picks: list[int] = []
        deq_picks: list[int] = []
        enq_picks: list[int] = []
        for uid in remaining:
            if sub.after_set(uid):
                continue
            ev = by_uid[uid]
            if ev.is_enq:
                if rank[uid] == e_star_rank and uid not in matched_targets:
                    enq_picks.append(uid)
            elif m[uid] is None:
                if not compute_bad(sub, m, uid):
                    null_picks.append(uid)
            elif rank[m[uid]] == top_matched:
                deq_picks.append(uid)
        for picks in (null_picks, enq_picks, deq_picks):
            if picks:
                chosen = min(picks)
                break
        else:
            raise AssertionError("no maximal event; match was not a witness")
        out_rev.append(by_uid[chosen])
        remaining.remove(chosen)
    witness = Behavior(reversed(out_rev))
    if not is_legal(witness):
        raise AssertionError("constructed linearization is not legal")
    return witness


# ---- the four violation detectors (complete histories) ----


def detect_vfresh(c: History) -> VFresh | None:
    """A dequeued value that no enqueue supplies: never enqueued at all, or
    every enqueue of it starts after the dequeue returns."""
    enq_by_value: dict[Value, list[int]] = {}
    for e in c.events:
        if e.is_enq:
            enq_by_value.setdefault(e.value, []).append(e.uid)
    for d in c.events:
        if d.is_deq and d.value is not NULL:
            sources = enq_by_value.get(d.value)
            if not sources or all(c.precedes(d.uid, e) for e in sources):
                return VFresh(d.uid)
    return None


def detect_vrepet(c: History) -> VRepet | None:
    """Two dequeues returning the same non-NULL value."""
    seen: dict[Value, int] = {}
    for d in c.events:
        if d.is_deq and d.value is not NULL:
            if d.value in seen:
                return VRepet(seen[d.value], d.uid)
            seen[d.value] = d.uid
    return None


def detect_vord(c: History) -> VOrd | None:
    """An enqueue ordered before another whose value is dequeued, while the
    earlier value is never dequeued or only by a strictly later dequeue."""
    deq_by_value = {d.value: d.uid for d in c.events if d.is_deq and d.value is not NULL}
    enqs = [e for e in c.events if e.is_enq]
    for e1 in enqs:
        for e2 in enqs:
            if e1.uid == e2.uid or not c.precedes(e1.uid, e2.uid):
                continue
            d2 = deq_by_value.get(e2.value)
            if d2 is None:
                continue
            d1 = deq_by_value.get(e1.value)
            if d1 is None:
                return VOrd(e1.uid, e2.uid, d2)
            if c.precedes(d2, d1):
                return VOrd(e1.uid, e2.uid, d2, d1)
    return None


def _alive_enq_at(c: History, prefix_len: int) -> int | None:
    """An enqueue completed within the first prefix_len actions whose
    value-matching dequeue is not invoked there; lowest uid wins."""
    best: int | None = None
    for e in c.events:
        if not e.is_enq:
            continue
        r = c.res_index(e.uid)
        if r is None or r >= prefix_len:
            continue
        taken = False
        for d in c.events:
            if d.is_deq and d.value == e.value and c.inv_index(d.uid) < prefix_len:
                taken = True
                break
        if not taken and (best is None or e.uid < best):
            best = e.uid
    return best


def detect_vwit(c: History) -> VWit | None:
    """A NULL dequeue whose whole pending window sees a non-empty queue: at
    every prefix while it is pending, some completed enqueue has not had its
    dequeue invoked."""
    for d in c.events:
        if not (d.is_deq and d.value is NULL):
            continue
        lo = c.inv_index(d.uid) + 1
        hi = c.res_index(d.uid)
        alive: list[int] = []
        for k in range(lo, hi + 1):
            e = _alive_enq_at(c, k)
            if e is None:
                break
            alive.append(e)
        else:
            return VWit(d.uid, tuple(alive))
    return None


_DETECTORS = (detect_vfresh, detect_vrepet, detect_vord, detect_vwit)


def detect_first(c: History) -> Violation | None:
    for det in _DETECTORS:
        v = det(c)
        if v is not None:
            return v
    return None


def detect_all(c: History) -> list[Violation]:
    return [v for det in _DETECTORS for v in (det(c),) if v is not None]


# ---- coverings ----


def detect_pwit_covering(c: History, d_bot: int) -> tuple[int, ...] | None:
    """A covering chain for a NULL dequeue, or None when none exists.

    A covering is a sequence of enqueues whose alive intervals span the
    dequeue's whole pending window and end in an enqueue that is never
    dequeued, certifying that the queue was never drainable to empty while
    the dequeue ran.  Events that start only after the dequeue returns
    cannot affect emptiness during it and are ignored.
    """
    if not c.is_complete:
        raise ValueError("history must be complete")
    dev = c.event(d_bot)
    if not dev.is_deq or dev.value is not NULL:
        raise ValueError("d_bot must be a NULL dequeue")
    scope = c.restrict(u for u in c.uids() if not c.precedes(d_bot, u))
    lo = scope.inv_index(d_bot) + 1
    hi = scope.res_index(d_bot)
    # alive interval per completed enqueue: [first prefix with its response,
    # first prefix with its matching dequeue's invocation)
    intervals: list[tuple[int, float, int]] = []
    inf = float("inf")
    for e in scope.events:
        if not e.is_enq:
            continue
        r = scope.res_index(e.uid)
        if r is None:
            continue
        stop: float = inf
        for d in scope.events:
            if d.is_deq and d.value == e.value:
                stop = min(stop, scope.inv_index(d.uid) + 1)
        intervals.append((r + 1, stop, e.uid))
    def alive_at(k: int) -> list[tuple[int, float, int]]:
        return [iv for iv in intervals if iv[0] <= k < iv[1]]
    for k in range(lo, hi + 1):
        if not alive_at(k):
            return None
    # greedy chain: start at the window head, always extend with the
    # longest-lasting enqueue alive at the previous link's last alive point
    start, stop, uid = max(alive_at(lo), key=lambda iv: iv[1])
    chain = [uid]
    while stop is not inf:
        k = int(stop) - 1
        nxt = max(alive_at(k), key=lambda iv: iv[1])
        if nxt[1] <= stop:
            raise AssertionError("covering chain failed to make progress")
        start, stop, uid = nxt
        chain.append(uid)
    return tuple(chain)


def verify_covering(c: History, d_bot: int, chain: tuple[int, ...]) -> bool:
    """Check the four covering requirements directly against the history."""
    if not chain:
        return False
    scope = c.restrict(u for u in c.uids() if not c.precedes(d_bot, u))
    deq_of: dict[int, int] = {}
    for e in scope.events:
        if e.is_enq:
            for d in scope.events:
                if d.is_deq and d.value == e.value:
                    deq_of[e.uid] = d.uid
    def alive_after(e: int, prefix_len: int) -> bool:
        r = scope.res_index(e)
        if r is None or r >= prefix_len:
            return False
        d = deq_of.get(e)
        return d is None or scope.inv_index(d) >= prefix_len
    if not alive_after(chain[0], scope.inv_index(d_bot)):
        return False
    res_bot = scope.res_index(d_bot)
    for i in range(1, len(chain)):
        if not scope.inv_index(chain[i]) < res_bot:
            return False
        prev_d = deq_of.get(chain[i - 1])
        if prev_d is None or not scope.precedes(chain[i], prev_d):
            return False
    return chain[-1] not in deq_of


# ---- top-level decision ----


def _generalized_fresh_or_repet(c: History) -> Violation | None:
    """Sound violation evidence valid even with duplicate enqueue values."""
    enq_count: dict[Value, int] = {}
    enq_uids_by_value: dict[Value, list[int]] = {}
    for e in c.events:
        if e.is_enq:
            enq_count[e.value] = enq_count.get(e.value, 0) + 1
            enq_uids_by_value.setdefault(e.value, []).append(e.uid)
    deqs_by_value: dict[Value, list[int]] = {}
    for d in c.events:
        if d.is_deq and d.value is not NULL:
            deqs_by_value.setdefault(d.value, []).append(d.uid)
    for v, ds in deqs_by_value.items():
        if not enq_count.get(v):
            return VFresh(ds[0])
        if all(c.precedes(ds[0], e) for e in enq_uids_by_value[v]):
            return VFresh(ds[0])
        if len(ds) > enq_count[v]:
            return VRepet(ds[0], ds[1])
    return None


def _check_complete(c: History, match_bound: int, build_witness: bool) -> Verdict:
    if not c.events:
        return Verdict(LINEARIZABLE, witness=Behavior(()))
    if c.is_differentiated:
        violation = detect_first(c)
        if violation is not None:
            return Verdict(VIOLATION, violation=violation)
        match = derive_match(c)
        assert match is not None  # no VFresh, so every dequeued value has a source
        witness = construct_linearization(c, match) if build_witness else None
        return Verdict(LINEARIZABLE, witness=witness)
    try:
        for match in candidate_matches(c, match_bound):
            if check_safe(c, match) is not None:
                continue
            if check_ordered(c, match) is not None:
                continue
            if not is_linearization_witness(c, match):
                continue
            witness = construct_linearization(c, match) if build_witness else None
            return Verdict(LINEARIZABLE, witness=witness)
    except SearchBoundExceeded as exc:
        return Verdict(INDETERMINATE, reason=str(exc))
    violation = _generalized_fresh_or_repet(c)
    if violation is not None:
        return Verdict(VIOLATION, violation=violation)
    return Verdict(VIOLATION, reason="no candidate match satisfies the conditions")


def check_linearizable(
    c: History,
    *,
    match_bound: int = DEFAULT_MATCH_BOUND,
    build_witness: bool = True,
) -> Verdict:
    """Decide linearizability of a history.

    Complete histories are decided directly; incomplete ones are
    linearizable when some completion is.  The verdict carries a witness
    linearization (unless build_witness is off) or violation evidence from
    the drop-all-pending completion.  INDETERMINATE is only possible for
    histories with duplicate enqueue values whose candidate-match search
    exceeds match_bound.
    """
    if c.is_complete:
        return _check_complete(c, match_bound, build_witness)
    first_violation: Verdict | None = None
    saw_indeterminate = False
    for comp in c.completions():
        v = _check_complete(comp, match_bound, build_witness)
        if v.status == LINEARIZABLE:
            return v
        if v.status == INDETERMINATE:
            saw_indeterminate = True
        elif first_violation is None:
            first_violation = v
    if saw_indeterminate or first_violation is None:
        return Verdict(INDETERMINATE, reason="no completion decided linearizable")
    return first_violation


# ---- independent brute-force oracle ----


class OracleBoundExceeded(RuntimeError):
    pass


def _legal_linearization_exists(comp: History) -> bool:
    events = comp.events
    n = len(events)
    if n == 0:
        return True
    preds = [0] * n
    pos = {e.uid: i for i, e in enumerate(events)}
    for i, a in enumerate(events):
        for j, b in enumerate(events):
            if i != j and comp.precedes(b.uid, a.uid):
                preds[i] |= 1 << j
    failed: set[tuple[int, tuple[int, ...]]] = set()

    def search(remaining: int, q: tuple[int, ...]) -> bool:
        if remaining == 0:
            return True
        key = (remaining, q)
        if key in failed:
            return False
        m = remaining
        while m:
            low = m & -m
            m ^= low
            i = low.bit_length() - 1
            if preds[i] & remaining:
                continue
            e = events[i]
            if e.is_enq:
                q2 = q + (e.value,)
            elif e.value is NULL:
                if q:
                    continue
                q2 = q
            elif q and q[0] == e.value:
                q2 = q[1:]
            else:
                continue
            if search(remaining ^ low, q2):
                return True
        failed.add(key)
        return False

    return search((1 << n) - 1, ())


def brute_force_linearizable(c: History, max_actions: int | None = None) -> bool:
    """Linearizability by exhaustive search, as an oracle.

    True when some completion of c has a precedence-respecting permutation
    that the queue LTS accepts.  Raises OracleBoundExceeded when the history
    is longer than max_actions.
    """
    if max_actions is not None and len(c.actions) > max_actions:
        raise OracleBoundExceeded(
            f"history has {len(c.actions)} actions; oracle bound is {max_actions}"
        )
    return any(_legal_linearization_exists(comp) for comp in c.completions())


def is_linearization_of(s: Behavior, c: History) -> bool:
    """True when s is a precedence-respecting permutation of some completion
    of c (uids and values both agree)."""
    want = {e.uid: (e.method, e.value) for e in s.events}
    for comp in c.completions():
        have = {e.uid: (e.method, e.value) for e in comp.events}
        if have != want:
            continue
        ok = True
        for a in comp.events:
            for b in comp.events:
                if a.uid != b.uid and comp.precedes(a.uid, b.uid):
                    if not s.index(a.uid) < s.index(b.uid):
                        ok = False
                        break
            if not ok:
                break
        if ok:
            return True
    return False
