"""Fast exhaustive sweep of plain queue-machine configurations.

The reference interpreter in hwmodel builds a dataclass per transition,
which caps exploration well below the sizes the acceptance scales need.
This module re-implements the same transition semantics on states packed
into a single integer and is cross-validated against the reference
interpreter by the test suite (identical history sets, trace counts,
endpoint classifications and purity verdicts on overlapping scales).

Scope: fixed enqueue/dequeue threads only, no choice threads, no
prophecy, and no mutant whose shared state grows without bound.  Thread
identity is erased eagerly: operation identifiers are reconstructed from
invocation order when a history is materialized, which is sound because
no transition reads them.

The sweep produces
  - exact counts of maximal schedules by endpoint status, computed by
    dynamic programming keyed on states with interchangeable-thread
    frames sorted (schedule counts are invariant under permuting such
    threads, so the quotient is free);
  - the distinct complete histories, found by a breadth-first walk over
    (state, emitted actions) pairs in which runs of internal steps are
    contracted through a memoized closure per state;
  - a purity verdict for every reachable (shared state, pending dequeue
    frame) pair, memoized on exactly that projection.

Two history-collection modes exist.  The exact mode keeps emission
order and returns every distinct history.  The quotient mode
additionally sorts each maximal run of same-kind actions (adjacent
invocations, adjacent responses) and, when enabled, renames enqueue
values by invocation rank.  Permuting adjacent same-kind actions and
renaming operations or values are isomorphisms of histories: they
preserve methods, matching values and the precedes relation, hence
every checker and oracle verdict.  The quotient therefore covers the
full history set with one representative per isomorphism class; the
test suite verifies that expansion exhaustively at small scales.
"""

from __future__ import annotations

import sys
from collections import Counter, deque
from dataclasses import dataclass

from .history import Action, History, deq_inv, deq_res, enq_inv, enq_res
from .hwmodel import (
    Config,
    DeqOp,
    EnqOp,
    MUTANT_DIRTY_SPIN,
    MUTANT_NO_SWAP_CLEAR,
    MUTANT_NONATOMIC_ENQ,
    MUTANT_SKIP_SLOT_ZERO,
)

# frame program counters, same meaning as in hwmodel
_IDLE, _E1B, _E2, _D1, _D2, _RET, _DONE = range(7)

# frame bit layout: pc(3) slot(3) rngp1(3) iters(3) result(4)
_F_BITS = 16
_PC_SH, _SLOT_SH, _RNG_SH, _IT_SH, _RES_SH = 0, 3, 6, 9, 12

_STATUS_ORDER = ("COMPLETE", "OVERFLOW", "BOUND_HIT", "STUCK")

# token kinds: enqueue/dequeue invocation and response
_T_EINV, _T_ERES, _T_DINV, _T_DRES = range(4)


def _is_inv(token) -> bool:
    return token[0] in (_T_EINV, _T_DINV)


class SweepScopeError(ValueError):
    """The configuration needs features the packed kernel does not model."""


@dataclass(frozen=True)
class SweepViolation:
    history: History
    verdict: object
    schedule: tuple[str, ...]


@dataclass
class SweepReport:
    config: Config
    quotient: bool
    trace_counts: Counter
    canonical_states: int
    nodes: int
    distinct_complete: int
    violations: tuple[SweepViolation, ...]
    oracle_checked: int
    oracle_disagreements: int
    purity_outcomes: Counter
    purity_violations: int

    @property
    def total_traces(self) -> int:
        return sum(self.trace_counts.values())

    @property
    def clean(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        status = "clean" if self.clean else f"violations={len(self.violations)}"
        parts = [
            f"SWEEP {status}",
            f"traces={self.total_traces}",
            f"complete-histories={self.distinct_complete}",
        ]
        if self.quotient:
            parts.append("history-mode=one-per-isomorphism-class")
        for name in _STATUS_ORDER:
            if self.trace_counts.get(name):
                parts.append(f"{name.lower().replace('_', '-')}-traces={self.trace_counts[name]}")
        if self.oracle_checked:
            parts.append(f"oracle-checked={self.oracle_checked}")
            parts.append(f"oracle-disagreements={self.oracle_disagreements}")
        if self.purity_outcomes:
            parts.append(f"purity-violations={self.purity_violations}")
        return " ".join(parts)


class _Kernel:
    """Packed-state transition relation for one configuration."""

    def __init__(self, config: Config):
        if config.mutant == MUTANT_DIRTY_SPIN:
            raise SweepScopeError("dirty_spin grows shared state unboundedly")
        ops = []
        for op in config.threads:
            if isinstance(op, EnqOp):
                ops.append(op)
            elif isinstance(op, DeqOp) and not op.instrumented:
                ops.append(op)
            else:
                raise SweepScopeError("kernel handles plain enq/deq threads only")
        self.config = config
        self.n = len(ops)
        self.cap = config.capacity
        self.lb = config.loop_bound
        self.nonatomic = config.mutant == MUTANT_NONATOMIC_ENQ
        self.keep_on_swap = config.mutant == MUTANT_NO_SWAP_CLEAR
        self.scan_start = 1 if config.mutant == MUTANT_SKIP_SLOT_ZERO else 0
        self.is_enq = [isinstance(op, EnqOp) for op in ops]
        # enqueue values are stored as 1-based indices; slot nibbles and
        # result nibbles must fit, so at most 15 distinct enqueuers
        self.values = [op.value for op in ops if isinstance(op, EnqOp)]
        if len(self.values) != len(set(self.values)):
            raise SweepScopeError("enqueue values must be distinct")
        if len(self.values) > 15 or self.cap > 7 or self.lb > 7:
            raise SweepScopeError("configuration exceeds packed field widths")
        self.vidx = {v: i + 1 for i, v in enumerate(self.values)}
        self.enq_vbits = [
            self.vidx[op.value] if isinstance(op, EnqOp) else 0 for op in ops
        ]
        self.items_sh = 4
        self.frames_sh = 4 + 4 * self.cap
        # threads with identical programs are interchangeable
        by_op: dict = {}
        for tid, op in enumerate(ops):
            key = ("e", op.value) if isinstance(op, EnqOp) else ("d",)
            by_op.setdefault(key, []).append(tid)
        self.sym_groups = tuple(
            tuple(tids) for tids in by_op.values() if len(tids) > 1
        )
        # enqueuers listed by ascending value index, for value renaming;
        # sound because no transition branches on a stored value
        enq_tids = sorted(
            (t for t in range(self.n) if self.is_enq[t]),
            key=lambda t: self.enq_vbits[t],
        )
        self.enq_tids = tuple(enq_tids)

    def emit_groups(self, value_sym: bool) -> tuple[tuple[int, ...], ...]:
        """Thread groups gated to invoke in member order during history
        collection.  Identical threads always; all enqueuers too when
        values are treated as interchangeable."""
        groups = list(self.sym_groups)
        if value_sym and len(self.enq_tids) > 1:
            if not any(set(g) & set(self.enq_tids) for g in groups):
                groups.append(self.enq_tids)
        return tuple(groups)

    # -- field helpers ----------------------------------------------------

    def frame(self, state: int, tid: int) -> int:
        return (state >> (self.frames_sh + _F_BITS * tid)) & 0xFFFF

    def item(self, state: int, slot: int) -> int:
        return (state >> (self.items_sh + 4 * slot)) & 0xF

    def init_state(self) -> int:
        return 0

    def canon(self, state: int) -> int:
        # sort frames within each interchangeable group
        for tids in self.sym_groups:
            fields = sorted(self.frame(state, t) for t in tids)
            for t, fbits in zip(tids, fields):
                sh = self.frames_sh + _F_BITS * t
                state = (state & ~(0xFFFF << sh)) | (fbits << sh)
        return state

    # -- transitions -------------------------------------------------------

    def successors(self, state: int, gate_groups=()):
        """List of (tid, instr, token, next_state).

        instr is the instruction mnemonic used in schedule labels; token
        is None for internal steps, otherwise (kind, tid, value-index).

        gate_groups restricts invocations: within each listed group only
        the lowest idle member may take its first step.  Runs then
        relate one-to-one to operation-identifier histories, because
        group-internal identity is fixed by invocation order.
        """
        out = []
        frames_sh = self.frames_sh
        back = state & 0xF
        gate: dict[int, int] = {}
        for tids in gate_groups:
            for t in tids:
                if (state >> (frames_sh + _F_BITS * t)) & 0x7 == _IDLE:
                    gate.update((u, t) for u in tids)
                    break
        for tid in range(self.n):
            sh = frames_sh + _F_BITS * tid
            f = (state >> sh) & 0xFFFF
            pc = f & 0x7
            if pc == _DONE:
                continue
            if pc == _IDLE and gate.get(tid, tid) != tid:
                continue
            base = state & ~(0xFFFF << sh)
            if self.is_enq[tid]:
                if pc == _IDLE:
                    if back >= self.cap:
                        continue  # slot array exhausted
                    if self.nonatomic:
                        nf = _E1B | (back << _SLOT_SH)
                        ns = base | (nf << sh)
                    else:
                        nf = _E2 | (back << _SLOT_SH)
                        ns = (base | (nf << sh)) + 1  # back += 1
                    out.append((tid, "E1", (_T_EINV, tid, 0), ns))
                elif pc == _E1B:
                    nf = _E2 | (f & (0x7 << _SLOT_SH))
                    ns = (base | (nf << sh)) + 1
                    out.append((tid, "E1b", None, ns))
                elif pc == _E2:
                    slot = (f >> _SLOT_SH) & 0x7
                    ish = self.items_sh + 4 * slot
                    ns = (base & ~(0xF << ish)) | (self.enq_vbits[tid] << ish)
                    ns |= _RET << sh
                    out.append((tid, "E2", None, ns))
                else:  # _RET
                    ns = base | (_DONE << sh)
                    out.append((tid, "ret", (_T_ERES, tid, 0), ns))
                continue
            # dequeue thread
            if pc == _IDLE or pc == _D1:
                iters = (f >> _IT_SH) & 0x7
                if iters >= self.lb:
                    continue  # loop budget exhausted
                rng = back - 1
                start = self.scan_start
                if start <= rng:
                    nf = _D2 | (start << _SLOT_SH) | ((rng + 1) << _RNG_SH)
                else:
                    nf = _D1
                nf |= (iters + 1) << _IT_SH
                ns = base | (nf << sh)
                token = (_T_DINV, tid, 0) if pc == _IDLE else None
                out.append((tid, "D1", token, ns))
            elif pc == _D2:
                slot = (f >> _SLOT_SH) & 0x7
                rng = ((f >> _RNG_SH) & 0x7) - 1
                ish = self.items_sh + 4 * slot
                held = (state >> ish) & 0xF
                if held == 0:
                    nxt = slot + 1
                    if nxt > rng:
                        nf = _D1 | (f & (0x7 << _IT_SH))
                    else:
                        nf = (f & ~(0x7 << _SLOT_SH)) | (nxt << _SLOT_SH)
                    ns = base | (nf << sh)
                else:
                    ns = base if self.keep_on_swap else base & ~(0xF << ish)
                    nf = _RET | (held << _RES_SH)
                    ns |= nf << sh
                out.append((tid, "D2", None, ns))
            else:  # _RET
                res = (f >> _RES_SH) & 0xF
                nf = _DONE | (res << _RES_SH)
                ns = base | (nf << sh)
                out.append((tid, "ret", (_T_DRES, tid, res), ns))
        return out

    def classify(self, state: int) -> str:
        all_done = True
        overflow = bound = False
        back = state & 0xF
        for tid in range(self.n):
            f = self.frame(state, tid)
            pc = f & 0x7
            if pc == _DONE:
                continue
            all_done = False
            if self.is_enq[tid]:
                if pc == _IDLE and back >= self.cap:
                    overflow = True
            elif pc in (_IDLE, _D1) and ((f >> _IT_SH) & 0x7) >= self.lb:
                bound = True
        if all_done:
            return "COMPLETE"
        if overflow:
            return "OVERFLOW"
        if bound:
            return "BOUND_HIT"
        return "STUCK"

    # -- purity -------------------------------------------------------------

    def purity(self, state: int, tid: int) -> str:
        """Solo run of one pending dequeue with a fresh loop budget;
        mirrors purely_blocking_check."""
        sh = self.frames_sh + _F_BITS * tid
        start = state & ~(0x7 << (sh + _IT_SH))  # iters := 0
        shared_mask = (1 << self.frames_sh) - 1
        base_shared = start & shared_mask
        blocked_pure = False
        seen = {start}
        stack = [start]
        while stack:
            s = stack.pop()
            if ((s >> sh) & 0x7) == _DONE:
                continue
            succs = [ns for t, _, _, ns in self.successors(s) if t == tid]
            if not succs:
                if (s & shared_mask) != base_shared:
                    return "VIOLATION"
                blocked_pure = True
                continue
            for ns in succs:
                if ns not in seen:
                    seen.add(ns)
                    stack.append(ns)
        return "PURE" if blocked_pure else "TERMINATES"

    # -- history materialization --------------------------------------------

    def tokens_to_history(self, tokens) -> History:
        uid_of: dict[int, int] = {}
        actions: list[Action] = []
        for kind, tid, val in tokens:
            if kind == _T_EINV:
                uid_of[tid] = len(uid_of)
                actions.append(enq_inv(uid_of[tid], self.values[self.enq_vbits[tid] - 1]))
            elif kind == _T_ERES:
                actions.append(enq_res(uid_of[tid]))
            elif kind == _T_DINV:
                uid_of[tid] = len(uid_of)
                actions.append(deq_inv(uid_of[tid]))
            else:
                actions.append(deq_res(uid_of[tid], self.values[val - 1]))
        return History(tuple(actions))

    def find_schedule(self, tokens) -> tuple[str, ...]:
        """One schedule whose emission matches the token sequence up to
        permutations within maximal same-kind runs.

        Depth-first over raw successors, consuming tokens out of the
        current run's multiset; memoized on (state, run index, remaining
        run) so failures are not re-explored.  The literal emission
        order is tried first (each run a singleton), so sequences that
        were emitted verbatim replay verbatim; run-permuted sequences
        from the quotient fall back to multiset matching.
        """
        try:
            return self._find_schedule([(t,) for t in tokens])
        except RuntimeError:
            pass
        runs: list[tuple] = []
        for token in tokens:
            if runs and _is_inv(runs[-1][0]) == _is_inv(token):
                runs[-1] = runs[-1] + (token,)
            else:
                runs.append((token,))
        return self._find_schedule(runs)

    def _find_schedule(self, runs: list) -> tuple[str, ...]:
        dead: set = set()

        def go(state: int, idx: int, remaining: tuple, acc: list[str]):
            while not remaining and idx < len(runs):
                idx, remaining = idx + 1, runs[idx]
            key = (state, idx, remaining)
            if key in dead:
                return None
            succs = self.successors(state)
            if not succs:
                if not remaining and idx >= len(runs) and self.classify(state) == "COMPLETE":
                    return acc
                dead.add(key)
                return None
            for tid, instr, token, ns in succs:
                if token is not None:
                    if token not in remaining:
                        continue
                    rest = list(remaining)
                    rest.remove(token)
                    got = go(ns, idx, tuple(rest), acc + [f"{tid}:{instr}"])
                else:
                    got = go(ns, idx, remaining, acc + [f"{tid}:{instr}"])
                if got is not None:
                    return got
            dead.add(key)
            return None

        sys.setrecursionlimit(100_000)
        got = go(self.init_state(), 0, (), [])
        if got is None:
            raise RuntimeError("token sequence is not realizable")
        return tuple(got)


def canonicalize_tokens(kernel: _Kernel, tokens, *, value_sym: bool = True) -> tuple:
    """Canonical representative of a token sequence's isomorphism class:
    group members renamed by invocation rank, dequeued value indices
    remapped through the enqueuer renaming, then each maximal run of
    same-kind tokens sorted.  Used by the quotient validation tests."""
    groups = kernel.emit_groups(value_sym)
    rename: dict[int, int] = {}
    pools = {tids: list(tids) for tids in groups}
    for token in tokens:
        if _is_inv(token):
            tid = token[1]
            for tids, pool in pools.items():
                if tid in tids:
                    rename[tid] = pool.pop(0)
                    break
    # renaming an enqueuer renames the value it contributes
    vmap = {0: 0}
    for t in range(kernel.n):
        if kernel.is_enq[t]:
            vmap[kernel.enq_vbits[t]] = kernel.enq_vbits[rename.get(t, t)]
    renamed = [(k, rename.get(t, t), vmap[v]) for k, t, v in tokens]
    out: list = []
    run: list = []
    for token in renamed:
        if run and _is_inv(run[0]) != _is_inv(token):
            out.extend(sorted(run))
            run = []
        run.append(token)
    out.extend(sorted(run))
    return tuple(out)


def count_schedules(kernel: _Kernel) -> Counter:
    """Exact maximal-schedule counts by endpoint status.

    Memoized on the sorted-frames quotient: permuting interchangeable
    threads bijects schedules and preserves endpoint status.
    """
    memo: dict[int, tuple] = {}
    sys.setrecursionlimit(100_000)

    def walk(state: int) -> tuple:
        key = kernel.canon(state)
        got = memo.get(key)
        if got is not None:
            return got
        succs = kernel.successors(state)
        if not succs:
            result = tuple(
                1 if kernel.classify(state) == name else 0 for name in _STATUS_ORDER
            )
        else:
            acc = [0, 0, 0, 0]
            for _, _, _, ns in succs:
                sub = walk(ns)
                acc[0] += sub[0]
                acc[1] += sub[1]
                acc[2] += sub[2]
                acc[3] += sub[3]
            result = tuple(acc)
        memo[key] = result
        return result

    totals = walk(kernel.init_state())
    counts = Counter(
        {name: n for name, n in zip(_STATUS_ORDER, totals) if n}
    )
    counts["__states__"] = len(memo)
    return counts


def purity_scan(kernel: _Kernel):
    """Purity-check every reachable pending dequeue.

    Walks the symmetry-reduced state graph (interchangeable frames
    sorted), which visits every reachable (shared state, dequeue frame)
    pair up to that permutation; the pair fully determines the solo-run
    verdict, which is memoized on it.
    """
    memo: dict = {}
    outcomes: Counter = Counter()
    bad: list = []
    init = kernel.canon(kernel.init_state())
    seen = {init}
    queue = deque([init])
    frames_sh = kernel.frames_sh
    shared_mask = (1 << frames_sh) - 1
    while queue:
        state = queue.popleft()
        shared = state & shared_mask
        for tid in range(kernel.n):
            if kernel.is_enq[tid]:
                continue
            f = kernel.frame(state, tid)
            pc = f & 0x7
            if pc == _IDLE or pc == _DONE:
                continue
            key = (shared, f & ~(0x7 << _IT_SH))
            got = memo.get(key)
            if got is None:
                got = kernel.purity(state, tid)
                memo[key] = got
                outcomes[got] += 1
                if got == "VIOLATION":
                    bad.append((state, tid))
        for _, _, _, ns in kernel.successors(state):
            c = kernel.canon(ns)
            if c not in seen:
                seen.add(c)
                queue.append(c)
    return outcomes, bad, len(seen)


def collect_histories(kernel: _Kernel, *, quotient: bool, value_sym: bool = True):
    """All distinct complete token sequences.

    Exact mode walks (state, emission sequence) pairs.  Quotient mode
    stores each prefix as closed sorted runs plus the open trailing run,
    so sequences of one isomorphism class share a node; with value_sym
    the enqueuers are additionally gated to invoke in value order, which
    renames values by invocation rank.  Node keys are packed into single
    integers to keep the visited set compact.
    """
    gate_groups = kernel.emit_groups(value_sym) if quotient else kernel.emit_groups(False)

    # interning tables for prefixes: a prefix is a chain of payloads
    # (tokens in exact mode, closed runs in quotient mode)
    seq_next: dict = {}
    seq_parent: list = [(None, None)]  # id -> (parent id, payload)

    def extend(pid: int, payload) -> int:
        got = seq_next.get((pid, payload))
        if got is None:
            got = len(seq_parent)
            seq_parent.append((pid, payload))
            seq_next[(pid, payload)] = got
        return got

    def expand(pid: int) -> list:
        out = []
        while pid:
            pid, payload = seq_parent[pid]
            out.append(payload)
        out.reverse()
        return out

    init = kernel.init_state()
    state_bits = kernel.frames_sh + _F_BITS * kernel.n
    complete: set[tuple] = set()
    successors = kernel.successors
    classify = kernel.classify
    if quotient:
        # node: (state, closed runs id, open run id); open runs stay
        # few (short sorted tuples), closed chains are interned
        open_ids: dict[tuple, int] = {(): 0}
        open_seqs: list[tuple] = [()]
        seen = {init}  # key = ((cid << 14 | oid) << state_bits) | state
        queue = deque([(init, 0, 0)])
        while queue:
            state, cid, oid = queue.popleft()
            succs = successors(state, gate_groups)
            orun = open_seqs[oid]
            if not succs:
                if classify(state) == "COMPLETE":
                    seq = []
                    for run in expand(cid):
                        seq.extend(run)
                    seq.extend(orun)
                    complete.add(tuple(seq))
                continue
            for _, _, token, ns in succs:
                if token is None:
                    ncid, noid = cid, oid
                elif orun and _is_inv(orun[0]) == _is_inv(token):
                    nrun = tuple(sorted(orun + (token,)))
                    noid = open_ids.get(nrun)
                    if noid is None:
                        noid = len(open_seqs)
                        open_seqs.append(nrun)
                        open_ids[nrun] = noid
                    ncid = cid
                else:
                    ncid = extend(cid, orun) if orun else cid
                    nrun = (token,)
                    noid = open_ids.get(nrun)
                    if noid is None:
                        noid = len(open_seqs)
                        open_seqs.append(nrun)
                        open_ids[nrun] = noid
                key = ((ncid << 14 | noid) << state_bits) | ns
                if key not in seen:
                    seen.add(key)
                    queue.append((ns, ncid, noid))
        if len(open_seqs) >= 1 << 14:
            raise AssertionError("open-run table overflowed its key field")
        return complete, len(seen)

    # exact mode: node = (state, emission sequence id)
    seen = {init}
    queue = deque([(init, 0)])
    while queue:
        state, pid = queue.popleft()
        succs = successors(state, gate_groups)
        if not succs:
            if classify(state) == "COMPLETE":
                complete.add(tuple(expand(pid)))
            continue
        for _, _, token, ns in succs:
            npid = pid if token is None else extend(pid, token)
            key = (npid << state_bits) | ns
            if key not in seen:
                seen.add(key)
                queue.append((ns, npid))
    return complete, len(seen)


def sweep_config(config: Config, *, oracle: bool = False,
                 check_purity: bool = False,
                 quotient: bool = False,
                 count: bool = True) -> SweepReport:
    """Full exhaustive sweep of one plain configuration.

    Counts every maximal schedule, checks every distinct complete
    history with the aspect detectors (and optionally the brute-force
    oracle), and optionally purity-checks every reachable pending
    dequeue.  Violations carry a replayable schedule.  With quotient
    one history per isomorphism class is materialized and checked; the
    class covers the rest (see module docstring).
    """
    from .checker import LINEARIZABLE, brute_force_linearizable, check_linearizable

    kernel = _Kernel(config)
    if count:
        counts = count_schedules(kernel)
        canonical_states = counts.pop("__states__")
    else:
        counts = Counter()
        canonical_states = 0

    purity_outcomes: Counter = Counter()
    purity_bad: list = []
    if check_purity:
        purity_outcomes, purity_bad, _ = purity_scan(kernel)

    complete, nodes = collect_histories(kernel, quotient=quotient)

    violations = []
    oracle_checked = 0
    oracle_disagreements = 0
    for tokens in sorted(complete):
        c = kernel.tokens_to_history(tokens)
        verdict = check_linearizable(c, build_witness=False)
        if oracle:
            oracle_checked += 1
            if brute_force_linearizable(c) != (verdict.status == LINEARIZABLE):
                oracle_disagreements += 1
        if verdict.status != LINEARIZABLE:
            violations.append(
                SweepViolation(c, verdict, kernel.find_schedule(tokens))
            )

    return SweepReport(
        config=config,
        quotient=quotient,
        trace_counts=counts,
        canonical_states=canonical_states,
        nodes=nodes,
        distinct_complete=len(complete),
        violations=tuple(violations),
        oracle_checked=oracle_checked,
        oracle_disagreements=oracle_disagreements,
        purity_outcomes=purity_outcomes,
        purity_violations=len(purity_bad),
    )
