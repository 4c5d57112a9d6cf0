"""CTL on actionless, non-blocking Kripke structures.

Semantic values are state sets (int masks).  The engine route computes
the classical fixpoint characterizations; the verifier route answers
per-state queries by explicit graph searches (reachability and lasso
detection), so the two paths share no code.
"""

from .engine import LogicInstance
from .logic import LogicSignature, OperatorDecl, LogicError

STATE = "state"


class EmptyAlphabet(LogicError):
    pass


class BlockingState(LogicError):
    def __init__(self, name):
        super().__init__("state %r has no successor" % (name,))
        self.state = name


class ActionlessKripke:
    """(Q, I, delta, P, pi) with a plain successor map."""

    def __init__(self, names, initial, successors, labels):
        self.names = tuple(names)
        self.n = len(self.names)
        index = {q: i for i, q in enumerate(self.names)}
        if len(index) != self.n:
            raise LogicError("duplicate state names")
        if not initial:
            raise LogicError("initial state set is empty")
        self.initial = frozenset(index[q] for q in initial)
        self.labels = tuple(frozenset(labels.get(q, ())) for q in self.names)
        succ = [()] * self.n
        for q, targets in successors.items():
            try:
                succ[index[q]] = tuple(sorted(index[t] for t in targets))
            except KeyError as e:
                raise LogicError("successor %r is not a state"
                                 % (e.args[0],)) from e
        self.succ = tuple(succ)
        self.succ_mask = tuple(_mask(ts) for ts in self.succ)
        self.imask = _mask(self.initial)
        self.full = (1 << self.n) - 1
        self.props = frozenset().union(*self.labels) if self.n else frozenset()

    @property
    def blocking(self):
        return [self.names[q] for q in range(self.n) if not self.succ[q]]

    def atom_mask(self, p):
        m = 0
        for q in range(self.n):
            if p in self.labels[q]:
                m |= 1 << q
        return m

    def __repr__(self):
        return "ActionlessKripke(%d states)" % self.n


def _mask(indices):
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def validate_nonblocking(model):
    """Return the structure unchanged, or raise BlockingState."""
    blocked = model.blocking
    if blocked:
        raise BlockingState(blocked[0])
    return model


def ctl_signature(props):
    props = tuple(props)
    if not props:
        raise EmptyAlphabet("CTL needs at least one proposition")
    st = frozenset([STATE])
    ops = [OperatorDecl(p, 0, STATE, kind="atom", payload=(p,)) for p in props]
    ops.append(OperatorDecl("!", 1, STATE, (st,), kind="not"))
    for name in ("EX", "AX", "EF", "AF", "EG", "AG"):
        ops.append(OperatorDecl(name, 1, STATE, (st,), kind=name.lower()))
    ops.append(OperatorDecl("&", 2, STATE, (st, st), kind="and"))
    ops.append(OperatorDecl("|", 2, STATE, (st, st), kind="or"))
    ops.append(OperatorDecl("EU", 2, STATE, (st, st), kind="eu"))
    ops.append(OperatorDecl("AU", 2, STATE, (st, st), kind="au"))
    return LogicSignature((STATE,), (STATE,), tuple(ops))


class CtlInstance(LogicInstance):
    """Engine hooks for CTL; rejects blocking structures."""

    def __init__(self, signature):
        self.signature = signature

    @classmethod
    def make(cls, props, fragment=None):
        sig = ctl_signature(props)
        if fragment is not None:
            sig = sig.restrict(fragment)
        return cls(sig)

    def sem_apply(self, model, op, args):
        validate_nonblocking(model)
        kind = op.kind
        if kind == "atom":
            return model.atom_mask(op.payload[0])
        if kind == "not":
            return model.full ^ args[0]
        if kind == "and":
            return args[0] & args[1]
        if kind == "or":
            return args[0] | args[1]
        if kind == "ex":
            return _ex(model, args[0])
        if kind == "ax":
            return _ax(model, args[0])
        if kind == "eg":
            return _gfp(model, args[0], _ex)
        if kind == "ag":
            return _gfp(model, args[0], _ax)
        if kind == "eu":
            return _lfp(model, args[0], args[1], _ex)
        if kind == "au":
            return _lfp(model, args[0], args[1], _ax)
        if kind == "ef":
            return _lfp(model, model.full, args[0], _ex)
        if kind == "af":
            return _lfp(model, model.full, args[0], _ax)
        raise LogicError("operator kind %r is not CTL" % kind)

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

    def modelcheck(self, model, dag, node):
        validate_nonblocking(model)
        return all(self._holds(model, dag, node, q, {})
                   for q in model.initial)

    def eval_value(self, model, dag, node):
        validate_nonblocking(model)
        out = 0
        memo = {}
        for q in range(model.n):
            if self._holds(model, dag, node, q, memo):
                out |= 1 << q
        return out

    def _states(self, model, dag, node, memo):
        return frozenset(q for q in range(model.n)
                         if self._holds(model, dag, node, q, memo))

    def _holds(self, model, dag, node, q, memo):
        key = (node, q)
        if key in memo:
            return memo[key]
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
        elif op.kind == "ex":
            res = any(self._holds(model, dag, kids[0], t, memo)
                      for t in model.succ[q])
        elif op.kind == "ax":
            res = all(self._holds(model, dag, kids[0], t, memo)
                      for t in model.succ[q])
        elif op.kind == "eg":
            good = self._states(model, dag, kids[0], memo)
            res = _lasso_within(model, good, q)
        elif op.kind == "ag":
            good = self._states(model, dag, kids[0], memo)
            res = _reachable(model, q) <= good
        elif op.kind == "ef":
            goal = self._states(model, dag, kids[0], memo)
            res = bool(_reachable(model, q) & goal)
        elif op.kind == "af":
            goal = self._states(model, dag, kids[0], memo)
            avoid = frozenset(range(model.n)) - goal
            res = not _lasso_within(model, avoid, q)
        elif op.kind == "eu":
            s1 = self._states(model, dag, kids[0], memo)
            s2 = self._states(model, dag, kids[1], memo)
            res = _eu_search(model, s1, s2, q)
        elif op.kind == "au":
            s1 = self._states(model, dag, kids[0], memo)
            s2 = self._states(model, dag, kids[1], memo)
            not2 = frozenset(range(model.n)) - s2
            bad = not2 - s1
            # a violating path avoids s2 forever, or hits a state outside
            # both sets while still avoiding s2
            res = not (_lasso_within(model, not2, q)
                       or _eu_search(model, not2, bad, q))
        else:
            raise LogicError("operator kind %r is not CTL" % op.kind)
        memo[key] = res
        return res


def _ex(model, s):
    out = 0
    for q in range(model.n):
        if model.succ_mask[q] & s:
            out |= 1 << q
    return out


def _ax(model, s):
    out = 0
    for q in range(model.n):
        if model.succ_mask[q] & ~s == 0:
            out |= 1 << q
    return out


def _gfp(model, s, step):
    z = s
    while True:
        nz = s & step(model, z)
        if nz == z:
            return z
        z = nz


def _lfp(model, s1, s2, step):
    z = s2
    while True:
        nz = s2 | (s1 & step(model, z))
        if nz == z:
            return z
        z = nz


def _reachable(model, q):
    seen = {q}
    stack = [q]
    while stack:
        cur = stack.pop()
        for t in model.succ[cur]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(seen)


def _lasso_within(model, allowed, q):
    """Is there an infinite path from q staying inside the allowed set?
    Equivalent to reaching a cycle of allowed states."""
    if q not in allowed:
        return False
    color = {}
    stack = [(q, iter(model.succ[q]))]
    color[q] = 1
    while stack:
        state, it = stack[-1]
        advanced = False
        for t in it:
            if t not in allowed:
                continue
            c = color.get(t)
            if c == 1:
                return True
            if c is None:
                color[t] = 1
                stack.append((t, iter(model.succ[t])))
                advanced = True
                break
        if not advanced:
            color[state] = 2
            stack.pop()
    return False


def _eu_search(model, s1, s2, q):
    """E s1 U s2 at q, by search: can q reach s2 along s1 states?"""
    if q in s2:
        return True
    if q not in s1:
        return False
    seen = {q}
    stack = [q]
    while stack:
        cur = stack.pop()
        for t in model.succ[cur]:
            if t in s2:
                return True
            if t in s1 and t not in seen:
                seen.add(t)
                stack.append(t)
    return False
