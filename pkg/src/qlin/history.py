"""Concurrent queue histories: actions, events, precedence, completions.

A history is a finite sequence of invocation/response actions over enqueue
and dequeue operations.  Each operation instance (an *event*) is identified
by an integer uid that ties its invocation to its response.  An event with
no response yet is *pending*.  Event ``a`` precedes event ``b`` when the
response of ``a`` occurs before the invocation of ``b``; events that are
not ordered either way overlap.

The text format, one action per line:

    inv <uid> enq <int>
    res <uid> enq
    inv <uid> deq
    res <uid> deq <int|null>

``#`` starts a comment, blank lines are ignored.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator


class _Null:
    """The distinguished empty-slot / empty-queue marker.

    Distinct from every integer and from ``None`` (which this package uses
    for "no payload at all").  A process-wide singleton, also under pickling.
    """

    _instance: "_Null | None" = None

    def __new__(cls) -> "_Null":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NULL"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _Null)

    def __hash__(self) -> int:
        return 0x4E554C4C

    def __reduce__(self):
        return (_Null, ())


NULL = _Null()

# A queue value: a non-negative int, or NULL for "nothing".
Value = int | _Null

INV = "inv"
RES = "res"
ENQ = "enq"
DEQ = "deq"


class HistoryError(ValueError):
    """Raised for malformed histories (construction or parsing)."""


class HistoryParseError(HistoryError):
    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


@dataclass(frozen=True)
class Action:
    """One invocation or response.

    Payload rules: enq invocations carry the enqueued int; deq responses
    carry an int or NULL; the other two kinds carry no payload (None).
    """

    kind: str
    uid: int
    method: str
    payload: Value | None = None

    def __post_init__(self) -> None:
        if self.kind not in (INV, RES):
            raise HistoryError(f"bad action kind {self.kind!r}")
        if self.method not in (ENQ, DEQ):
            raise HistoryError(f"bad method {self.method!r}")
        if not isinstance(self.uid, int) or self.uid < 0:
            raise HistoryError(f"uid must be a non-negative int, got {self.uid!r}")
        if self.kind == INV and self.method == ENQ:
            if not isinstance(self.payload, int) or self.payload < 0:
                raise HistoryError("enq invocation needs a non-negative int payload")
        elif self.kind == RES and self.method == DEQ:
            ok = self.payload is NULL or (isinstance(self.payload, int) and self.payload >= 0)
            if not ok:
                raise HistoryError("deq response needs an int or NULL payload")
        elif self.payload is not None:
            raise HistoryError(f"{self.kind} {self.method} carries no payload")

    def serialize(self) -> str:
        if self.kind == INV and self.method == ENQ:
            return f"inv {self.uid} enq {self.payload}"
        if self.kind == RES and self.method == DEQ:
            val = "null" if self.payload is NULL else str(self.payload)
            return f"res {self.uid} deq {val}"
        return f"{self.kind} {self.uid} {self.method}"


def enq_inv(uid: int, value: int) -> Action:
    return Action(INV, uid, ENQ, value)


def enq_res(uid: int) -> Action:
    return Action(RES, uid, ENQ)


def deq_inv(uid: int) -> Action:
    return Action(INV, uid, DEQ)


def deq_res(uid: int, value: Value) -> Action:
    return Action(RES, uid, DEQ, value)


@dataclass(frozen=True)
class Event:
    """One operation instance, derived from its invocation/response pair.

    ``value`` is the enqueue argument or the dequeue result; it is None for
    a pending dequeue, whose result does not exist yet.
    """

    uid: int
    method: str
    value: Value | None
    pending: bool

    @property
    def is_enq(self) -> bool:
        return self.method == ENQ

    @property
    def is_deq(self) -> bool:
        return self.method == DEQ


class History:
    """An immutable, well-formed action sequence.

    Well-formedness: every uid appears in at most one invocation and at most
    one response, a response follows its invocation, and both actions of a
    uid agree on the method.
    """

    __slots__ = ("actions", "_inv_pos", "_res_pos", "_events", "_uid_event")

    def __init__(self, actions: Iterable[Action] = ()):
        acts = tuple(actions)
        inv_pos: dict[int, int] = {}
        res_pos: dict[int, int] = {}
        method: dict[int, str] = {}
        for pos, a in enumerate(acts):
            if a.kind == INV:
                if a.uid in inv_pos:
                    raise HistoryError(f"uid {a.uid} invoked twice")
                inv_pos[a.uid] = pos
                method[a.uid] = a.method
            else:
                if a.uid not in inv_pos:
                    raise HistoryError(f"uid {a.uid} responds before invocation")
                if a.uid in res_pos:
                    raise HistoryError(f"uid {a.uid} responds twice")
                if method[a.uid] != a.method:
                    raise HistoryError(f"uid {a.uid} method mismatch")
                res_pos[a.uid] = pos
        object.__setattr__(self, "actions", acts)
        object.__setattr__(self, "_inv_pos", inv_pos)
        object.__setattr__(self, "_res_pos", res_pos)
        events = []
        uid_event: dict[int, Event] = {}
        for uid in sorted(inv_pos, key=inv_pos.get):
            inv = acts[inv_pos[uid]]
            pending = uid not in res_pos
            if inv.method == ENQ:
                value: Value | None = inv.payload
            else:
                value = None if pending else acts[res_pos[uid]].payload
            ev = Event(uid, inv.method, value, pending)
            events.append(ev)
            uid_event[uid] = ev
        object.__setattr__(self, "_events", tuple(events))
        object.__setattr__(self, "_uid_event", uid_event)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("History is immutable")

    # ---- basic structure ----

    @property
    def events(self) -> tuple[Event, ...]:
        """Events in invocation order."""
        return self._events

    def event(self, uid: int) -> Event:
        try:
            return self._uid_event[uid]
        except KeyError:
            raise HistoryError(f"uid {uid} not invoked in this history") from None

    def uids(self) -> tuple[int, ...]:
        return tuple(e.uid for e in self._events)

    def inv_index(self, uid: int) -> int:
        self.event(uid)
        return self._inv_pos[uid]

    def res_index(self, uid: int) -> int | None:
        self.event(uid)
        return self._res_pos.get(uid)

    @property
    def is_complete(self) -> bool:
        return len(self._res_pos) == len(self._inv_pos)

    @property
    def is_differentiated(self) -> bool:
        """True when enqueue arguments are pairwise distinct."""
        vals = [e.value for e in self._events if e.is_enq]
        return len(vals) == len(set(vals))

    def enq_events(self) -> tuple[Event, ...]:
        return tuple(e for e in self._events if e.is_enq)

    def deq_events(self) -> tuple[Event, ...]:
        return tuple(e for e in self._events if e.is_deq)

    def enq_values(self) -> tuple[int, ...]:
        return tuple(e.value for e in self._events if e.is_enq)

    # ---- precedence ----

    def precedes(self, a: int, b: int) -> bool:
        """True when event a's response occurs before event b's invocation."""
        ra = self.res_index(a)
        return ra is not None and ra < self.inv_index(b)

    def before_set(self, a: int) -> frozenset[int]:
        """Uids of events that precede a."""
        ia = self.inv_index(a)
        return frozenset(u for u, r in self._res_pos.items() if r < ia)

    def after_set(self, a: int) -> frozenset[int]:
        """Uids of events that a precedes."""
        ra = self.res_index(a)
        if ra is None:
            return frozenset()
        return frozenset(u for u, i in self._inv_pos.items() if i > ra)

    # ---- sub-histories and completions ----

    def restrict(self, uids: Iterable[int]) -> "History":
        """The sub-history of all actions belonging to the given uids."""
        keep = set(uids)
        return History(a for a in self.actions if a.uid in keep)

    def remove_pending(self) -> "History":
        return self.restrict(self._res_pos)

    def completions(self, deq_values: Iterable[Value] | None = None) -> Iterator["History"]:
        """All completions of this history.

        Each pending event is either dropped or completed by a response
        appended after the existing actions.  A pending dequeue's response
        value ranges over ``deq_values``; by default that is every value some
        enqueue was invoked with, plus NULL.  Other values could only make
        the completion report a never-enqueued result, which is never more
        linearizable, so the default loses nothing.

        The first completion yielded is always the drop-everything one.
        """
        if deq_values is None:
            cands: tuple[Value, ...] = tuple(sorted(set(self.enq_values()))) + (NULL,)
        else:
            cands = tuple(deq_values)
        pending = [e for e in self._events if e.pending]
        options: list[list[Action | None]] = []
        for e in pending:
            if e.is_enq:
                options.append([None, enq_res(e.uid)])
            else:
                options.append([None] + [deq_res(e.uid, v) for v in cands])
        for choice in itertools.product(*options):
            appended = [a for a in choice if a is not None]
            completed = History(self.actions + tuple(appended))
            yield completed.remove_pending()

    # ---- sequential form ----

    @property
    def is_sequential(self) -> bool:
        """Every invocation is immediately followed by its response; at most
        the final action may be a lone invocation."""
        acts = self.actions
        i = 0
        n = len(acts)
        while i < n:
            if acts[i].kind != INV:
                return False
            if i + 1 == n:
                return True
            nxt = acts[i + 1]
            if nxt.kind != RES or nxt.uid != acts[i].uid:
                return False
            i += 2
        return True

    # ---- plumbing ----

    def serialize(self) -> str:
        return "\n".join(a.serialize() for a in self.actions)

    def __len__(self) -> int:
        return len(self.actions)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, History) and self.actions == other.actions

    def __hash__(self) -> int:
        return hash(self.actions)

    def __repr__(self) -> str:
        return f"History({len(self.actions)} actions, {len(self._events)} events)"


def parse_history(text: str) -> History:
    """Parse the line format into a History.

    Raises HistoryParseError carrying the 1-based line number and a reason
    for the first offending line.
    """
    actions: list[Action] = []
    invoked: dict[int, str] = {}
    responded: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) < 3:
            raise HistoryParseError(lineno, f"expected at least 3 tokens, got {len(tokens)}")
        kind, uid_tok, method = tokens[0], tokens[1], tokens[2]
        if kind not in (INV, RES):
            raise HistoryParseError(lineno, f"unknown action kind {kind!r}")
        if method not in (ENQ, DEQ):
            raise HistoryParseError(lineno, f"unknown method {method!r}")
        try:
            uid = int(uid_tok)
        except ValueError:
            raise HistoryParseError(lineno, f"uid {uid_tok!r} is not an integer") from None
        if uid < 0:
            raise HistoryParseError(lineno, f"uid {uid} is negative")
        payload: Value | None = None
        has_payload = kind == INV and method == ENQ or kind == RES and method == DEQ
        if has_payload:
            if len(tokens) != 4:
                raise HistoryParseError(lineno, f"{kind} {method} takes exactly one value")
            val_tok = tokens[3]
            if val_tok == "null":
                if method == ENQ:
                    raise HistoryParseError(lineno, "cannot enqueue null")
                payload = NULL
            else:
                try:
                    payload = int(val_tok)
                except ValueError:
                    raise HistoryParseError(lineno, f"value {val_tok!r} is not an integer or null") from None
                if payload < 0:
                    raise HistoryParseError(lineno, f"value {payload} is negative")
        elif len(tokens) != 3:
            raise HistoryParseError(lineno, f"{kind} {method} takes no value")
        if kind == INV:
            if uid in invoked:
                raise HistoryParseError(lineno, f"uid {uid} invoked twice")
            invoked[uid] = method
        else:
            if uid not in invoked:
                raise HistoryParseError(lineno, f"uid {uid} responds before invocation")
            if uid in responded:
                raise HistoryParseError(lineno, f"uid {uid} responds twice")
            if invoked[uid] != method:
                raise HistoryParseError(lineno, f"uid {uid} invoked as {invoked[uid]}, responds as {method}")
            responded.add(uid)
        try:
            actions.append(Action(kind, uid, method, payload))
        except HistoryError as exc:
            raise HistoryParseError(lineno, str(exc)) from None
    return History(actions)


def serialize_history(c: History) -> str:
    return c.serialize()


def enumerate_completions(
    c: History, candidate_values: Iterable[Value] | None = None
) -> Iterator[History]:
    """Module-level spelling of History.completions."""
    return c.completions(candidate_values)
