"""LTL over finite and ultimately periodic words.

A lasso word u.v^omega is given by its prefix u and loop v, each a list
of letters (sets of propositions); v empty means a finite word.  All
temporal operators are evaluated over the canonical position range
[0, |u|+|v|-1] using the successor/after/between tables; a word
satisfies a position set when position 0 is in it.
"""

from .engine import LogicInstance
from .logic import LogicSignature, OperatorDecl, LogicError

POS = "positions"


class EmptyAlphabet(LogicError):
    pass


class LassoWord:
    """Ultimately periodic word; finite words have an empty loop."""

    def __init__(self, prefix, loop=()):
        self.prefix = tuple(frozenset(t) for t in prefix)
        self.loop = tuple(frozenset(t) for t in loop)
        if not self.prefix and not self.loop:
            raise LogicError("word must have at least one letter")
        self.norm = len(self.prefix) + len(self.loop)
        self.finite = not self.loop
        self.full = (1 << self.norm) - 1

    def letter(self, i):
        if i < len(self.prefix):
            return self.prefix[i]
        return self.loop[i - len(self.prefix)]

    def succ(self, i):
        """The canonical successor position, None at the end of a finite word."""
        if i < self.norm - 1:
            return i + 1
        return None if self.finite else len(self.prefix)

    def after(self, i):
        """Positions of all suffixes reachable from position i."""
        return range(min(i, len(self.prefix)), self.norm)

    def between(self, i, k):
        """Positions visited walking from i (inclusive) to k (exclusive)."""
        if i <= k:
            return list(range(i, k))
        return list(range(i, self.norm)) + list(range(len(self.prefix), k))

    def suffix(self, j):
        """The lasso representing the suffix word starting at position j."""
        if j < len(self.prefix):
            return LassoWord(self.prefix[j:], self.loop)
        if self.finite:
            if j >= self.norm:
                raise LogicError("suffix start %d beyond finite word" % j)
            return LassoWord(self.prefix[j:], ())
        r = (j - len(self.prefix)) % len(self.loop)
        return LassoWord((), self.loop[r:] + self.loop[:r])

    def unroll(self, copies=1):
        """Equivalent lasso with the loop unrolled into the prefix."""
        if self.finite:
            return LassoWord(self.prefix, ())
        return LassoWord(self.prefix + self.loop * copies, self.loop)

    def __eq__(self, other):
        return isinstance(other, LassoWord) and \
            self.prefix == other.prefix and self.loop == other.loop

    def __hash__(self):
        return hash((self.prefix, self.loop))

    def __repr__(self):
        def seg(ts):
            return "".join("{%s}" % ",".join(sorted(t)) for t in ts)
        if self.finite:
            return "LassoWord(%s)" % seg(self.prefix)
        return "LassoWord(%s(%s)^w)" % (seg(self.prefix), seg(self.loop))


def ltl_signature(props, with_duals=False):
    """LTL signature: atoms (and optional dual atoms), !, X, F, G, &, |, U.

    A dual atom p_bar holds at a position iff p does not; monotone
    fragments use them in place of negation.
    """
    props = tuple(props)
    if not props:
        raise EmptyAlphabet("LTL needs at least one proposition")
    ps = frozenset([POS])
    ops = [OperatorDecl(p, 0, POS, kind="atom", payload=(p,)) for p in props]
    if with_duals:
        ops += [OperatorDecl(p + "_bar", 0, POS, kind="dual_atom", payload=(p,))
                for p in props]
    ops.append(OperatorDecl("!", 1, POS, (ps,), kind="not"))
    ops.append(OperatorDecl("X", 1, POS, (ps,), kind="next"))
    ops.append(OperatorDecl("F", 1, POS, (ps,), kind="finally"))
    ops.append(OperatorDecl("G", 1, POS, (ps,), kind="globally"))
    ops.append(OperatorDecl("&", 2, POS, (ps, ps), kind="and"))
    ops.append(OperatorDecl("|", 2, POS, (ps, ps), kind="or"))
    ops.append(OperatorDecl("U", 2, POS, (ps, ps), kind="until"))
    return LogicSignature((POS,), (POS,), tuple(ops))


class LtlInstance(LogicInstance):
    """Engine hooks for LTL on lasso words."""

    def __init__(self, signature):
        self.signature = signature

    @classmethod
    def make(cls, props, with_duals=False, fragment=None):
        sig = ltl_signature(props, with_duals)
        if fragment is not None:
            sig = sig.restrict(fragment)
        return cls(sig)

    def sem_apply(self, w, op, args):
        kind = op.kind
        if kind == "atom":
            return _positions(w, lambda i: op.payload[0] in w.letter(i))
        if kind == "dual_atom":
            return _positions(w, lambda i: op.payload[0] not in w.letter(i))
        if kind == "not":
            return w.full ^ args[0]
        if kind == "and":
            return args[0] & args[1]
        if kind == "or":
            return args[0] | args[1]
        s = args[0]
        if kind == "next":
            return _positions(
                w, lambda i: w.succ(i) is not None and s >> w.succ(i) & 1)
        if kind == "finally":
            return _positions(
                w, lambda i: any(s >> j & 1 for j in w.after(i)))
        if kind == "globally":
            return _positions(
                w, lambda i: all(s >> j & 1 for j in w.after(i)))
        if kind == "until":
            s2 = args[1]
            return _positions(w, lambda i: any(
                s2 >> k & 1 and all(s >> j & 1 for j in w.between(i, k))
                for k in w.after(i)))
        raise LogicError("operator kind %r is not LTL" % kind)

    def sat(self, w, value):
        return bool(value & 1)

    def value_space_size(self, w, type):
        return 1 << w.norm

    def value_width(self, w, type):
        return w.norm

    def bitwise_kind(self, op):
        if op.kind in ("and", "or"):
            return op.kind
        return None

    def modelcheck(self, w, dag, node):
        return ltl_eval_naive(w, dag, node)

    def eval_value(self, w, dag, node):
        out = 0
        memo = {}
        for i in range(w.norm):
            if _naive(w, dag, node, i, memo):
                out |= 1 << i
        return out


def _positions(w, pred):
    out = 0
    for i in range(w.norm):
        if pred(i):
            out |= 1 << i
    return out


def ltl_eval_naive(w, dag, node):
    """Does the word satisfy the formula?  Position-by-position recursive
    evaluation of the suffix semantics; independent of the engine route."""
    return _naive(w, dag, node, 0, {})


def _naive(w, dag, node, i, memo):
    key = (node, i)
    got = memo.get(key)
    if got is not None:
        return got
    op = dag.ops[node]
    kids = dag.children[node]
    if op.kind == "atom":
        res = op.payload[0] in w.letter(i)
    elif op.kind == "dual_atom":
        res = op.payload[0] not in w.letter(i)
    elif op.kind == "not":
        res = not _naive(w, dag, kids[0], i, memo)
    elif op.kind == "and":
        res = _naive(w, dag, kids[0], i, memo) and \
            _naive(w, dag, kids[1], i, memo)
    elif op.kind == "or":
        res = _naive(w, dag, kids[0], i, memo) or \
            _naive(w, dag, kids[1], i, memo)
    elif op.kind == "next":
        j = w.succ(i)
        res = j is not None and _naive(w, dag, kids[0], j, memo)
    elif op.kind in ("finally", "globally", "until"):
        # walk every distinct future position once, in visit order
        path = [i]
        seen = {i}
        while True:
            j = w.succ(path[-1])
            if j is None or j in seen:
                break
            path.append(j)
            seen.add(j)
        if op.kind == "finally":
            res = any(_naive(w, dag, kids[0], j, memo) for j in path)
        elif op.kind == "globally":
            res = all(_naive(w, dag, kids[0], j, memo) for j in path)
        else:
            res = False
            for j in path:
                if _naive(w, dag, kids[1], j, memo):
                    res = True
                    break
                if not _naive(w, dag, kids[0], j, memo):
                    break
    else:
        raise LogicError("operator kind %r is not LTL" % op.kind)
    memo[key] = res
    return res
