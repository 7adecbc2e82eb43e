"""Independent reference implementations backing the test suite.

Everything here is written directly from the definitions and kept
deliberately separate from the package internals, so that tests compare
two implementations that can actually disagree: a dead-simple list
queue for legality, brute-force searches for witnesses and coverings,
and exhaustive enumerators for small history and behavior spaces.
"""

from __future__ import annotations

from itertools import permutations

from qlin.history import (
    NULL,
    Action,
    History,
    deq_inv,
    deq_res,
    enq_inv,
    enq_res,
)

ENQ, DEQ = "enq", "deq"


# ---- sequential queue, the simple way ----------------------------------------

def simple_legal(seq) -> bool:
    """Legality of a sequence of (method, value) pairs by running a list."""
    items: list[int] = []
    for method, value in seq:
        if method == ENQ:
            items.append(value)
        elif value is NULL:
            if items:
                return False
        else:
            if not items or items[0] != value:
                return False
            items.pop(0)
    return True


def behavior_seqs(max_len: int, values=(1, 2, 3)):
    """Every sequence over enq(v), deq(v), deq(NULL) up to max_len."""
    alphabet = [(ENQ, v) for v in values]
    alphabet += [(DEQ, v) for v in values]
    alphabet += [(DEQ, NULL)]
    frontier: list[tuple] = [()]
    for _ in range(max_len):
        new = [seq + (sym,) for seq in frontier for sym in alphabet]
        yield from new
        frontier = new


def seq_history(seq) -> History:
    """A sequential complete history from (method, value) pairs."""
    actions: list[Action] = []
    for uid, (method, value) in enumerate(seq):
        if method == ENQ:
            actions.append(enq_inv(uid, value))
            actions.append(enq_res(uid))
        else:
            actions.append(deq_inv(uid))
            actions.append(deq_res(uid, value))
    return History(tuple(actions))


# ---- exhaustive history enumeration ------------------------------------------

def canonical_histories(n_enq: int, n_deq: int, *, null_results: bool = True):
    """All complete differentiated histories with n_enq enqueues and n_deq
    dequeues, one representative per isomorphism class.

    Canonical form: enqueues numbered 0.. by invocation order carrying
    value rank+1, dequeues numbered n_enq.. by invocation order, results
    drawn from the enqueue values (plus NULL), and each maximal run of
    same-kind actions (invocations, responses) in ascending (method, uid)
    order.  Isomorphisms, permuting operation identity and renaming
    values bijectively while preserving real-time order, relabel exactly
    these choices, so one sequence per class survives.
    """
    results: list[History] = []
    deq_choices = [v + 1 for v in range(n_enq)] + ([NULL] if null_results else [])

    def step(actions, next_enq, next_deq, pending, last_key):
        if len(actions) == 2 * (n_enq + n_deq):
            results.append(History(tuple(actions)))
            return
        # invocations: key (0, method-rank, uid); responses: (1, ...)
        if next_enq < n_enq:
            key = (0, 0, next_enq)
            if last_key is None or last_key[0] != 0 or key > last_key:
                actions.append(enq_inv(next_enq, next_enq + 1))
                step(actions, next_enq + 1, next_deq, pending | {next_enq}, key)
                actions.pop()
        if next_deq < n_deq:
            uid = n_enq + next_deq
            key = (0, 1, uid)
            if last_key is None or last_key[0] != 0 or key > last_key:
                actions.append(deq_inv(uid))
                step(actions, next_enq, next_deq + 1, pending | {uid}, key)
                actions.pop()
        for uid in sorted(pending):
            enq = uid < n_enq
            key = (1, 0 if enq else 1, uid)
            if last_key is not None and last_key[0] == 1 and key <= last_key:
                continue
            rest = pending - {uid}
            if enq:
                actions.append(enq_res(uid))
                step(actions, next_enq, next_deq, rest, key)
                actions.pop()
            else:
                for value in deq_choices:
                    actions.append(deq_res(uid, value))
                    step(actions, next_enq, next_deq, rest, key)
                    actions.pop()

    step([], 0, 0, frozenset(), None)
    return results


def raw_histories(n_enq: int, n_deq: int):
    """Every complete differentiated history with the given operation
    counts: all interleavings, all result assignments.  Explodes fast;
    for validating the canonical enumerator at tiny sizes only."""
    results = []
    deq_choices = [v + 1 for v in range(n_enq)] + [NULL]

    def step(actions, to_invoke, pending):
        if not to_invoke and not pending:
            results.append(History(tuple(actions)))
            return
        for uid in sorted(to_invoke):
            if uid < n_enq:
                actions.append(enq_inv(uid, uid + 1))
            else:
                actions.append(deq_inv(uid))
            step(actions, to_invoke - {uid}, pending | {uid})
            actions.pop()
        for uid in sorted(pending):
            if uid < n_enq:
                actions.append(enq_res(uid))
                step(actions, to_invoke, pending - {uid})
                actions.pop()
            else:
                for value in deq_choices:
                    actions.append(deq_res(uid, value))
                    step(actions, to_invoke, pending - {uid})
                    actions.pop()

    step([], frozenset(range(n_enq + n_deq)), frozenset())
    return results


def canonical_form(c: History) -> History:
    """Map any complete differentiated history onto its class
    representative: relabel operations per method by invocation order,
    rename enqueue values by rank, sort each maximal same-kind run."""
    enq_order = [e.uid for e in c.events if e.is_enq]
    deq_order = [e.uid for e in c.events if e.is_deq]
    relabel = {uid: i for i, uid in enumerate(enq_order)}
    relabel.update({uid: len(enq_order) + i for i, uid in enumerate(deq_order)})
    vmap = {c.event(uid).value: relabel[uid] + 1 for uid in enq_order}

    def rebuild(a: Action) -> Action:
        uid = relabel[a.uid]
        if a.kind == "inv":
            return enq_inv(uid, vmap[a.payload]) if a.method == ENQ else deq_inv(uid)
        if a.method == ENQ:
            return enq_res(uid)
        value = a.payload if a.payload is NULL else vmap[a.payload]
        return deq_res(uid, value)

    def key(a: Action):
        return (0 if a.method == ENQ else 1, a.uid)

    actions = []
    run: list[Action] = []
    for a in (rebuild(a) for a in c.actions):
        if run and run[0].kind != a.kind:
            actions.extend(sorted(run, key=key))
            run = []
        run.append(a)
    actions.extend(sorted(run, key=key))
    return History(tuple(actions))


def isomorphic(h1: History, h2: History) -> bool:
    """Brute force: some value bijection and uid bijection preserving
    methods, values, completeness and the precedes relation."""
    e1, e2 = list(h1.events), list(h2.events)
    if len(e1) != len(e2):
        return False
    v1 = sorted({e.value for e in e1 if e.is_enq})
    v2 = sorted({e.value for e in e2 if e.is_enq})
    if len(v1) != len(v2):
        return False
    for vperm in permutations(v2):
        vmap = dict(zip(v1, vperm))
        for uperm in permutations(e2):
            ok = True
            for a, b in zip(e1, uperm):
                if a.method != b.method or a.pending != b.pending:
                    ok = False
                    break
                av = a.value
                if av is not None and av is not NULL:
                    av = vmap.get(av, av)
                if av != b.value:
                    ok = False
                    break
            if not ok:
                continue
            umap = {a.uid: b.uid for a, b in zip(e1, uperm)}
            for a in e1:
                for b in e1:
                    if h1.precedes(a.uid, b.uid) != h2.precedes(umap[a.uid], umap[b.uid]):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                return True
    return False


# ---- brute-force witness and covering searches --------------------------------

def brute_alt_witness(c: History, events_in_order) -> bool:
    """The alternative witness condition, checked literally: the given
    order is legal and every prefix of it is closed downward under the
    precedes relation of c."""
    uids = [e.uid for e in events_in_order]
    if sorted(uids) != sorted(c.uids()):
        return False
    if not simple_legal([(e.method, e.value) for e in events_in_order]):
        return False
    placed: set[int] = set()
    for e in events_in_order:
        for other in c.uids():
            if c.precedes(other, e.uid) and other not in placed:
                return False
        placed.add(e.uid)
    return True


def brute_respects_order(c: History, events_in_order) -> bool:
    """Permutation legality plus pairwise real-time order preservation."""
    uids = [e.uid for e in events_in_order]
    if sorted(uids) != sorted(c.uids()):
        return False
    if not simple_legal([(e.method, e.value) for e in events_in_order]):
        return False
    pos = {uid: i for i, uid in enumerate(uids)}
    return all(
        pos[a] < pos[b]
        for a in c.uids()
        for b in c.uids()
        if c.precedes(a, b)
    )


def brute_covering_exists(c: History, d_bot: int) -> bool:
    """Search all enqueue chains for one meeting the covering clauses:
    head alive just before the dequeue starts, every later link invoked
    before the dequeue returns and ordered before the previous link's
    dequeue, tail never dequeued.  Events after the dequeue are out of
    scope."""
    scope = c.restrict(u for u in c.uids() if not c.precedes(d_bot, u))
    enqs = [e.uid for e in scope.events if e.is_enq]
    deq_of = {}
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

    res_bot = scope.res_index(d_bot)

    def extend(chain):
        if chain[-1] not in deq_of:
            return True
        for e in enqs:
            if e in chain:
                continue
            if scope.inv_index(e) >= res_bot:
                continue
            if not scope.precedes(e, deq_of[chain[-1]]):
                continue
            if extend(chain + [e]):
                return True
        return False

    for head in enqs:
        if alive_after(head, scope.inv_index(d_bot)) and extend([head]):
            return True
    return False


def pwit_prime(c: History, d_bot: int) -> bool:
    """Alternative phrasing of the NULL-return justification: some prefix
    inside the dequeue's pending window has no alive completed enqueue."""
    scope = c.restrict(u for u in c.uids() if not c.precedes(d_bot, u))
    lo = scope.inv_index(d_bot) + 1
    hi = scope.res_index(d_bot)
    for k in range(lo, hi + 1):
        alive = False
        for e in scope.events:
            if not e.is_enq:
                continue
            r = scope.res_index(e.uid)
            if r is None or r >= k:
                continue
            taken = any(
                d.is_deq and d.value == e.value and scope.inv_index(d.uid) < k
                for d in scope.events
            )
            if not taken:
                alive = True
                break
        if not alive:
            return True
    return False
