"""Logic-agnostic passive-learning engine.

The engine enumerates the semantic values that formulas of a fragment
can take on the sample models, as a fixed point: seed with the arity-0
operators, then close under arity-1/2 operator application until no new
value tuple appears.  A sample is separable exactly when the closed
table contains a final-type tuple accepted by every positive model and
rejected by every negative one; a witness formula is rebuilt from the
provenance of that tuple.  The table can never hold more than

    size_bound = sum over types of prod over models of |SEM_M(type)|

entries, which also bounds the witness's syntax-DAG size.
"""

import time
from dataclasses import dataclass, field

from .logic import FormulaDag

try:
    from ._sweep import sweep_pairs, KERNEL
except ImportError:
    from ._sweep_py import sweep_pairs, KERNEL

DEFAULT_ENTRY_CAP = 1 << 24


class EngineError(Exception):
    pass


class BudgetExceeded(EngineError):
    """Closure hit the entry budget; carries the partial table."""

    def __init__(self, table):
        super().__init__("entry budget of %d exceeded" % table.budget)
        self.table = table


class PartialTableInconclusive(EngineError):
    pass


class TupleNotInTable(EngineError):
    pass


class WitnessVerificationError(EngineError):
    pass


@dataclass(frozen=True)
class Sample:
    positives: tuple
    negatives: tuple

    def __post_init__(self):
        object.__setattr__(self, "positives", tuple(self.positives))
        object.__setattr__(self, "negatives", tuple(self.negatives))

    @property
    def models(self):
        return self.positives + self.negatives


@dataclass(frozen=True)
class SemanticTuple:
    """One semantic value per sample model, in sample order, plus its type."""
    type: str
    values: tuple


class LogicInstance:
    """Hooks a concrete logic into the engine.

    Subclasses provide the per-model semantics.  The two contracts that
    make the enumeration sound: sem_apply may depend only on the
    operator and the argument values (never on argument formulas), and
    sat may depend only on the value.
    """

    signature = None

    def sem_atom(self, model, op):
        return self.sem_apply(model, op, ())

    def sem_apply(self, model, op, args):
        raise NotImplementedError

    def sat(self, model, value):
        raise NotImplementedError

    def relevant_operators(self, sample):
        return list(self.signature.operators)

    def value_space_size(self, model, type):
        raise NotImplementedError

    def modelcheck(self, model, dag, node):
        """Independent verifier: does the model satisfy the formula?"""
        raise NotImplementedError

    def eval_value(self, model, dag, node):
        """Independent recursive semantic evaluation (oracle route)."""
        raise NotImplementedError

    # packing hooks for the compiled pairwise sweep ------------------------

    def value_width(self, model, type):
        """Bit width of values of this type, or None when not packable."""
        return None

    def bitwise_kind(self, op):
        """'and'/'or' when the per-model semantics is exactly that, else None."""
        return None


class SemanticTable:
    """Insertion-ordered closure table with provenance."""

    def __init__(self, signature, model_count, budget):
        self.signature = signature
        self.model_count = model_count
        self.budget = budget
        self.entries = []        # SemanticTuple, insertion order
        self.provenance = []     # (operator name, argument entry ids)
        self.index = {}          # (type, values) -> entry id
        self.round_count = 0
        self.truncated = False
        self.dag = None
        self._witness_memo = {}

    def __len__(self):
        return len(self.entries)

    def lookup(self, tup):
        return self.index.get((tup.type, tup.values))

    def add(self, tup, op_name, args):
        key = (tup.type, tup.values)
        if key in self.index:
            return None
        if len(self.entries) >= self.budget:
            self.truncated = True
            raise BudgetExceeded(self)
        idx = len(self.entries)
        self.entries.append(tup)
        self.provenance.append((op_name, tuple(args)))
        self.index[key] = idx
        return idx


def size_bound(sample, instance):
    """Theorem-style entry bound: sum over types of the per-model product."""
    total = 0
    for t in instance.signature.types:
        prod = 1
        for m in sample.models:
            prod *= instance.value_space_size(m, t)
        total += prod
    return total


def _packing_plan(sample, instance):
    """Per-type offsets/widths when every model reports a bit width."""
    plan = {}
    for t in instance.signature.types:
        offsets = []
        pos = 0
        ok = True
        for m in sample.models:
            w = instance.value_width(m, t)
            if w is None:
                ok = False
                break
            offsets.append((pos, (1 << w) - 1))
            pos += w
        if ok:
            plan[t] = offsets
    return plan


def _pack(offsets, values):
    packed = 0
    for (off, _), v in zip(offsets, values):
        packed |= v << off
    return packed


def _unpack(offsets, packed):
    return tuple((packed >> off) & mask for off, mask in offsets)


class _Closure:
    """One closure run; split out of closure() to keep state readable."""

    def __init__(self, sample, instance, budget):
        self.sample = sample
        self.instance = instance
        self.models = sample.models
        self.ops = instance.relevant_operators(sample)
        self.table = SemanticTable(instance.signature, len(self.models), budget)
        self.plan = _packing_plan(sample, instance)
        # per packable type, aligned lists of packed values and entry ids
        self.packed = {t: [] for t in self.plan}
        self.packed_ids = {t: [] for t in self.plan}
        self.packed_seen = {t: set() for t in self.plan}
        self.by_type = {}    # type -> entry ids, insertion order (all types)

    def add(self, type_, values, op_name, args):
        idx = self.table.add(SemanticTuple(type_, values), op_name, args)
        if idx is None:
            return
        self.by_type.setdefault(type_, []).append(idx)
        if type_ in self.plan:
            packed = _pack(self.plan[type_], values)
            self.packed[type_].append(packed)
            self.packed_ids[type_].append(idx)
            self.packed_seen[type_].add(packed)

    def run(self):
        for op in self.ops:
            if op.arity == 0:
                values = tuple(self.instance.sem_atom(m, op) for m in self.models)
                self.add(op.result_type, values, op.name, ())
        prev_total = 0
        prev_by_type = {}
        while len(self.table) > prev_total:
            self.table.round_count += 1
            start_total = len(self.table)
            start_by_type = {t: len(ids) for t, ids in self.by_type.items()}
            for op in self.ops:
                if op.arity == 1:
                    self._unary(op, prev_total, start_total)
                elif op.arity == 2:
                    self._binary(op, prev_total, prev_by_type,
                                 start_total, start_by_type)
            prev_total = start_total
            prev_by_type = start_by_type
        return self.table

    def _unary(self, op, old, cur):
        entries = self.table.entries
        accept = op.arg_types[0]
        for i in range(old, cur):
            e = entries[i]
            if e.type not in accept:
                continue
            values = tuple(self.instance.sem_apply(m, op, (v,))
                           for m, v in zip(self.models, e.values))
            self.add(op.result_type, values, op.name, (i,))

    def _binary(self, op, old, old_by_type, cur, cur_by_type):
        mode = self.instance.bitwise_kind(op)
        lt, rt = op.arg_types
        if (mode is not None and len(lt) == 1 and len(rt) == 1
                and next(iter(lt)) in self.plan and next(iter(rt)) in self.plan
                and op.result_type in self.plan
                and self.plan[next(iter(lt))] == self.plan[op.result_type]
                and self.plan[next(iter(rt))] == self.plan[op.result_type]):
            self._binary_packed(op, next(iter(lt)), next(iter(rt)),
                                old_by_type, cur_by_type, mode)
        else:
            self._binary_generic(op, old, cur)

    def _binary_packed(self, op, lt, rt, old_by_type, cur_by_type, mode):
        left, right = self.packed[lt], self.packed[rt]
        n_l = cur_by_type.get(lt, 0)
        n_r = cur_by_type.get(rt, 0)
        old_l = old_by_type.get(lt, 0)
        old_r = old_by_type.get(rt, 0)
        same = lt == rt
        seen = self.packed_seen[op.result_type]
        new_vals, pairs = sweep_pairs(left, right, n_l, n_r, old_l, old_r,
                                      0 if mode == "and" else 1, same, seen)
        offsets = self.plan[op.result_type]
        lids, rids = self.packed_ids[lt], self.packed_ids[rt]
        for v, (i, j) in zip(new_vals, pairs):
            self.add(op.result_type, _unpack(offsets, v), op.name,
                     (lids[i], rids[j]))

    def _binary_generic(self, op, old, cur):
        entries = self.table.entries
        la, ra = op.arg_types
        for i in range(cur):
            if entries[i].type not in la:
                continue
            for j in range(cur):
                if i < old and j < old:
                    continue
                if entries[j].type not in ra:
                    continue
                values = tuple(self.instance.sem_apply(m, op, (a, b))
                               for m, a, b in zip(self.models,
                                                  entries[i].values,
                                                  entries[j].values))
                self.add(op.result_type, values, op.name, (i, j))


def closure(sample, instance, budget=None):
    """Least fixed point of relevant-operator application over the sample.

    Deterministic: entries appear in insertion order, operators apply in
    declaration order, argument pairs in lexicographic entry order, and
    each round only revisits pairs involving an entry from the previous
    round.  Raises BudgetExceeded (carrying the partial table) if the
    entry count would pass the budget.
    """
    if budget is None:
        budget = min(size_bound(sample, instance), DEFAULT_ENTRY_CAP)
    return _Closure(sample, instance, budget).run()


def check_separable(table, sample, instance):
    """First final-type entry accepted by all positives, rejected by all
    negatives; None when the closed table has no such entry."""
    finals = set(instance.signature.final_types)
    npos = len(sample.positives)
    for entry in table.entries:
        if entry.type not in finals:
            continue
        if all(instance.sat(m, entry.values[i])
               for i, m in enumerate(sample.positives)) and \
           not any(instance.sat(m, entry.values[npos + i])
                   for i, m in enumerate(sample.negatives)):
            return entry
    if table.truncated:
        raise PartialTableInconclusive(
            "budget-truncated table has no separating entry")
    return None


def witness(table, tup):
    """Rebuild a formula for a table entry from its provenance.

    The formula's semantic tuple equals the entry, and its distinct
    subformulas map injectively into table entries, so its DAG size
    never exceeds the table size.
    """
    root = table.lookup(tup)
    if root is None:
        raise TupleNotInTable("tuple of type %r not in table" % (tup.type,))
    if table.dag is None:
        table.dag = FormulaDag(table.signature)
    memo = table._witness_memo
    need = set()
    stack = [root]
    while stack:
        i = stack.pop()
        if i in need or i in memo:
            continue
        need.add(i)
        stack.extend(table.provenance[i][1])
    # producer entries always precede their product, so ascending order
    # is a topological order
    for i in sorted(need):
        name, args = table.provenance[i]
        memo[i] = table.dag.intern(name, tuple(memo[a] for a in args))
    return memo[root]


@dataclass
class LearnResult:
    status: str                  # "separable" | "not-separable" | "inconclusive"
    dag: object = None
    node: object = None
    table: object = None
    bound: int = 0
    elapsed: float = 0.0
    stats: dict = field(default_factory=dict)

    @property
    def formula_text(self):
        if self.node is None:
            return None
        return self.dag.render(self.node)


def learn(sample, instance, budget=None):
    """Decide separability and synthesize a verified witness formula."""
    t0 = time.perf_counter()
    bound = size_bound(sample, instance)
    inconclusive = False
    try:
        table = closure(sample, instance, budget)
    except BudgetExceeded as e:
        table = e.table
        inconclusive = True
    try:
        hit = check_separable(table, sample, instance)
    except PartialTableInconclusive:
        hit = None
    stats = {"entries": len(table), "rounds": table.round_count,
             "kernel": KERNEL}
    if hit is None:
        status = "inconclusive" if inconclusive else "not-separable"
        return LearnResult(status, table=table, bound=bound,
                           elapsed=time.perf_counter() - t0, stats=stats)
    node = witness(table, hit)
    for m in sample.positives:
        if not instance.modelcheck(m, table.dag, node):
            raise WitnessVerificationError(
                "witness %r rejected by a positive model"
                % table.dag.render(node))
    for m in sample.negatives:
        if instance.modelcheck(m, table.dag, node):
            raise WitnessVerificationError(
                "witness %r accepted by a negative model"
                % table.dag.render(node))
    return LearnResult("separable", dag=table.dag, node=node, table=table,
                       bound=bound, elapsed=time.perf_counter() - t0,
                       stats=stats)


def bottom_up_value(instance, model, dag, node):
    """Engine-route evaluation of a formula: compose sem_atom/sem_apply
    over the DAG.  Used by tests to cross-check the two routes."""
    memo = {}
    order = sorted(dag.subformulas(node))
    for n in order:
        op = dag.ops[n]
        if op.arity == 0:
            memo[n] = instance.sem_atom(model, op)
        else:
            args = tuple(memo[c] for c in dag.children[n])
            memo[n] = instance.sem_apply(model, op, args)
    return memo[node]
