"""Modal logic on Kripke structures with action-labeled transitions.

Semantic values are state sets, stored as int bit masks.  A structure
satisfies a value when every initial state is in it.
"""

from .engine import LogicInstance
from .logic import LogicSignature, OperatorDecl, LogicError

STATE = "state"


class EmptyAlphabet(LogicError):
    pass


class InvalidK(LogicError):
    pass


class UnknownAction(LogicError):
    pass


class KripkeStructure:
    """(Q, I, A, delta, P, pi); delta is total with empty-set default."""

    def __init__(self, names, initial, actions, transitions, labels):
        self.names = tuple(names)
        self.n = len(self.names)
        index = {q: i for i, q in enumerate(self.names)}
        if len(index) != self.n:
            raise LogicError("duplicate state names")
        if not initial:
            raise LogicError("initial state set is empty")
        self.initial = frozenset(index[q] for q in initial)
        self.actions = tuple(actions)
        self.labels = tuple(frozenset(labels.get(q, ())) for q in self.names)
        self.succ = {}
        for (q, a), targets in transitions.items():
            if a not in self.actions:
                raise LogicError("transition uses undeclared action %r" % a)
            try:
                self.succ[(index[q], a)] = tuple(
                    sorted(index[t] for t in targets))
            except KeyError as e:
                raise LogicError("transition target %r is not a state"
                                 % (e.args[0],)) from e
        self.imask = _mask(self.initial)
        self.full = (1 << self.n) - 1
        self.succ_mask = {
            a: [_mask(self.succ.get((q, a), ())) for q in range(self.n)]
            for a in self.actions}
        self.props = frozenset().union(*self.labels) if self.n else frozenset()

    def successors(self, q, a):
        return self.succ.get((q, a), ())

    def atom_mask(self, p):
        m = 0
        for q in range(self.n):
            if p in self.labels[q]:
                m |= 1 << q
        return m

    def __repr__(self):
        return "KripkeStructure(%d states, %d actions)" % (
            self.n, len(self.actions))


def _mask(indices):
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def ml_signature(props, actions, max_k):
    """Full modal-logic signature: atoms, !, boxes, diamonds, &, |."""
    props, actions = tuple(props), tuple(actions)
    if not props or not actions:
        raise EmptyAlphabet("modal logic needs propositions and actions")
    if max_k < 1:
        raise InvalidK("diamond thresholds start at 1, got %d" % max_k)
    st = frozenset([STATE])
    ops = [OperatorDecl(p, 0, STATE, kind="atom", payload=(p,)) for p in props]
    ops.append(OperatorDecl("!", 1, STATE, (st,), kind="not"))
    for a in actions:
        ops.append(OperatorDecl("[%s]" % a, 1, STATE, (st,),
                                kind="box", payload=(a,)))
    for a in actions:
        for k in range(1, max_k + 1):
            ops.append(OperatorDecl("<%s>>=%d" % (a, k), 1, STATE, (st,),
                                    kind="diamond", payload=(a, k)))
    ops.append(OperatorDecl("&", 2, STATE, (st, st), kind="and"))
    ops.append(OperatorDecl("|", 2, STATE, (st, st), kind="or"))
    return LogicSignature((STATE,), (STATE,), tuple(ops))


class ModalInstance(LogicInstance):
    """Engine hooks for modal logic over a fixed signature."""

    def __init__(self, signature, actions):
        self.signature = signature
        self.actions = frozenset(actions)

    @classmethod
    def make(cls, props, actions, max_k, fragment=None):
        sig = ml_signature(props, actions, max_k)
        if fragment is not None:
            sig = sig.restrict(fragment)
        return cls(sig, actions)

    def sem_apply(self, model, op, args):
        kind = op.kind
        if kind == "atom":
            return model.atom_mask(op.payload[0])
        if kind == "not":
            return model.full ^ args[0]
        if kind == "and":
            return args[0] & args[1]
        if kind == "or":
            return args[0] | args[1]
        if kind in ("box", "diamond"):
            a = op.payload[0]
            if a not in self.actions:
                raise UnknownAction("action %r not in the signature" % a)
            succ = model.succ_mask.get(a)
            s = args[0]
            out = 0
            if kind == "box":
                for q in range(model.n):
                    t = 0 if succ is None else succ[q]
                    if t & ~s == 0:
                        out |= 1 << q
            else:
                k = op.payload[1]
                for q in range(model.n):
                    t = 0 if succ is None else succ[q]
                    if (t & s).bit_count() >= k:
                        out |= 1 << q
            return out
        raise UnknownAction("operator kind %r not modal" % kind)

    def sat(self, model, value):
        return model.imask & ~value == 0

    def value_space_size(self, model, type):
        return 1 << model.n

    def value_width(self, model, type):
        return model.n

    def bitwise_kind(self, op):
        if op.kind in ("and", "or"):
            return op.kind
        return None

    def relevant_operators(self, sample):
        """Clamp diamond thresholds to the largest sample state count and
        drop propositions/actions absent from every sample model.

        The drop only happens when the fragment keeps negation, a
        lattice operator, and at least one present proposition: those
        are what the replacement argument needs to rebuild the dropped
        semantics, so the separability verdict cannot change.
        """
        models = sample.models
        max_q = max((m.n for m in models), default=1)
        present_props = frozenset().union(
            *(m.props for m in models)) if models else frozenset()
        present_actions = frozenset().union(
            *(frozenset(m.actions) for m in models)) if models else frozenset()
        kinds = {o.kind for o in self.signature.operators}
        atom_present = any(o.kind == "atom" and o.payload[0] in present_props
                          for o in self.signature.operators)
        droppable = ("not" in kinds and ("and" in kinds or "or" in kinds)
                     and atom_present)
        out = []
        for o in self.signature.operators:
            if o.kind == "diamond" and o.payload[1] > max_q:
                continue
            if droppable:
                if o.kind == "atom" and o.payload[0] not in present_props:
                    continue
                if o.kind in ("box", "diamond") and \
                        o.payload[0] not in present_actions:
                    continue
            out.append(o)
        return out

    # independent verifier: per-state recursion over the formula DAG

    def eval_value(self, model, dag, node):
        """State set of a formula, by per-state recursive evaluation."""
        out = 0
        for q in range(model.n):
            if self._holds(model, dag, node, q, {}):
                out |= 1 << q
        return out

    def modelcheck(self, model, dag, node):
        return all(self._holds(model, dag, node, q, {})
                   for q in model.initial)

    def _holds(self, model, dag, node, q, memo):
        key = (node, q)
        got = memo.get(key)
        if got is not None:
            return got
        op = dag.ops[node]
        kids = dag.children[node]
        if op.kind == "atom":
            res = op.payload[0] in model.labels[q]
        elif op.kind == "not":
            res = not self._holds(model, dag, kids[0], q, memo)
        elif op.kind == "and":
            res = self._holds(model, dag, kids[0], q, memo) and \
                self._holds(model, dag, kids[1], q, memo)
        elif op.kind == "or":
            res = self._holds(model, dag, kids[0], q, memo) or \
                self._holds(model, dag, kids[1], q, memo)
        elif op.kind == "box":
            res = all(self._holds(model, dag, kids[0], t, memo)
                      for t in model.successors(q, op.payload[0]))
        elif op.kind == "diamond":
            a, k = op.payload
            res = sum(1 for t in model.successors(q, a)
                      if self._holds(model, dag, kids[0], t, memo)) >= k
        else:
            raise UnknownAction("operator kind %r not modal" % op.kind)
        memo[key] = res
        return res
