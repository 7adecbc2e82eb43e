"""Linearizability of concurrent FIFO-queue histories.

Three layers:

- histories and the sequential queue specification (`history`,
  `queuespec`): parse/serialize operation histories, enumerate
  completions, decide legality of sequential behaviors, sequential
  witnesses, canonical forms;
- the aspect checker (`checker`): four independent violation detectors
  that together decide linearizability of complete differentiated
  histories, a witness constructor, and a brute-force oracle;
- an operational queue model (`hwmodel`, `explorer`, `sweep`): a
  slot-array queue with seeded bug variants, exhaustive interleaving
  exploration, divergence harnesses, and a packed-state sweep engine
  for larger configurations.

`cli.main` wires these into the `qlin` command.
"""

from .history import (
    NULL,
    Action,
    Event,
    History,
    HistoryError,
    HistoryParseError,
    deq_inv,
    deq_res,
    enq_inv,
    enq_res,
    enumerate_completions,
    parse_history,
    serialize_history,
)
from .queuespec import (
    REJECT,
    Behavior,
    QueueState,
    behavior_of,
    canonicalize,
    check_sequential_witness,
    find_sequential_witness,
    is_canonical,
    is_legal,
    obs_equiv,
    replay,
)
from .checker import (
    INDETERMINATE,
    LINEARIZABLE,
    VIOLATION,
    OracleBoundExceeded,
    Verdict,
    VFresh,
    VOrd,
    VRepet,
    VWit,
    alt_witness_check,
    brute_force_linearizable,
    check_linearizable,
    check_ordered,
    check_safe,
    compute_bad,
    construct_linearization,
    detect_all,
    detect_first,
    enq_order,
)
from .hwmodel import (
    GATE_FLAG_DONE,
    MUTANT_DIRTY_SPIN,
    MUTANT_NO_SWAP_CLEAR,
    MUTANT_NONATOMIC_ENQ,
    MUTANT_NONE,
    MUTANT_SKIP_SLOT_ZERO,
    MUTANTS,
    ChoiceOp,
    Config,
    DeqOp,
    EnqOp,
    HWState,
    ThreadFrame,
    classify_endpoint,
    enabled_threads,
    hw_init,
    hw_step,
    purely_blocking_check,
    successors,
)
from .explorer import (
    ConfigReport,
    Counterexample,
    DivergenceReport,
    ExecutionTrace,
    PurityReport,
    ViolationRecord,
    check_configuration,
    count_traces,
    divergence_check_vord,
    divergence_check_vrepet,
    enumerate_traces,
    induce_history,
    purity_sweep,
    replay_schedule,
    vord_config,
    vrepet_config,
)
from .sweep import (
    SweepReport,
    SweepScopeError,
    SweepViolation,
    sweep_config,
)

__all__ = [name for name in dir() if not name.startswith("_")]
