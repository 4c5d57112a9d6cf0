"""Typed operator signatures, fragments, and hash-consed formula DAGs.

A logic is described by a LogicSignature: a finite set of formula types,
a nonempty subset of "final" types (formulas of the logic proper), and a
list of operator declarations of arity 0, 1 or 2.  Formulas are built by
interning nodes into a FormulaDag; structurally identical nodes share an
id, so the size of a formula is the number of distinct subformulas.
"""

import re
from dataclasses import dataclass


class LogicError(Exception):
    pass


class UnknownOperator(LogicError):
    pass


class ArityMismatch(LogicError):
    pass


class TypeMismatch(LogicError):
    pass


class InvalidId(LogicError):
    pass


class EmptyNullaryLayer(LogicError):
    pass


class ParseError(LogicError):
    def __init__(self, message, pos):
        super().__init__("%s (at position %d)" % (message, pos))
        self.pos = pos


@dataclass(frozen=True)
class OperatorDecl:
    """One operator: display name, arity, result type, allowed argument types.

    kind/payload carry the structured identity of parametric operators
    (e.g. a diamond is kind="diamond", payload=(action, k)); semantic
    back ends dispatch on kind rather than re-parsing the name.
    """
    name: str
    arity: int
    result_type: str
    arg_types: tuple = ()   # tuple of frozensets, one per argument
    kind: str = ""
    payload: tuple = ()

    def __post_init__(self):
        if self.arity != len(self.arg_types):
            raise ArityMismatch(
                "operator %r declares arity %d but %d argument type sets"
                % (self.name, self.arity, len(self.arg_types)))


@dataclass(frozen=True)
class LogicSignature:
    types: tuple
    final_types: tuple
    operators: tuple

    def __post_init__(self):
        if not self.types or not self.final_types:
            raise LogicError("signature needs nonempty types and final types")
        if not set(self.final_types) <= set(self.types):
            raise LogicError("final types must be a subset of types")
        if not any(o.arity == 0 for o in self.operators):
            raise EmptyNullaryLayer("signature has no arity-0 operator")
        for o in self.operators:
            if o.result_type not in self.types:
                raise TypeMismatch("operator %r has unknown result type %r"
                                   % (o.name, o.result_type))
            for ts in o.arg_types:
                if not ts or not set(ts) <= set(self.types):
                    raise TypeMismatch("operator %r has bad argument types"
                                       % o.name)

    def decls(self, name):
        """All declarations sharing a display name (overloads)."""
        return [o for o in self.operators if o.name == name]

    def nullary(self):
        return [o for o in self.operators if o.arity == 0]

    def restrict(self, allowed):
        """Fragment: same types, operators filtered to the allowed names."""
        allowed = set(allowed)
        unknown = allowed - {o.name for o in self.operators}
        if unknown:
            raise UnknownOperator("not in signature: %s" % sorted(unknown))
        ops = tuple(o for o in self.operators if o.name in allowed)
        if not any(o.arity == 0 for o in ops):
            raise EmptyNullaryLayer("fragment keeps no arity-0 operator")
        return LogicSignature(self.types, self.final_types, ops)


class FormulaDag:
    """Append-only table of hash-consed formula nodes.

    Nodes are (operator declaration, child ids); children always have
    smaller ids than their parent.  Construction is single-writer; all
    reads after construction are safe concurrently.
    """

    def __init__(self, signature):
        self.signature = signature
        self.ops = []        # OperatorDecl per node
        self.children = []   # tuple of child ids per node
        self.types = []      # result type per node
        self._index = {}     # (decl id, children) -> node id
        self._sizes = {}     # root id -> |Sub|, filled on demand

    def __len__(self):
        return len(self.ops)

    def _check(self, node):
        if not (isinstance(node, int) and 0 <= node < len(self.ops)):
            raise InvalidId("no node %r" % (node,))
        return node

    def intern(self, name, children=()):
        """Intern a node, reusing an existing id on structural match.

        The declaration is resolved among overloads by the child types;
        a declared coercion operator (kind "inject") is wrapped around a
        child automatically when that makes exactly one overload fit.
        """
        children = tuple(self._check(c) for c in children)
        decls = self.signature.decls(name)
        if not decls:
            raise UnknownOperator("operator %r not in signature" % name)
        decls = [d for d in decls if d.arity == len(children)]
        if not decls:
            raise ArityMismatch("operator %r does not take %d arguments"
                                % (name, len(children)))
        kinds = tuple(self.types[c] for c in children)
        fits = [d for d in decls
                if all(t in d.arg_types[i] for i, t in enumerate(kinds))]
        if len(fits) > 1:
            raise TypeMismatch("ambiguous overload for %r on %r" % (name, kinds))
        if fits:
            return self._put(fits[0], children)
        # try coercions before giving up
        for d in decls:
            coerced = self._coerce(d, children, kinds)
            if coerced is not None:
                return self._put(d, coerced)
        raise TypeMismatch("operator %r not applicable to argument types %r"
                           % (name, kinds))

    def _coerce(self, decl, children, kinds):
        out = []
        for i, (c, t) in enumerate(zip(children, kinds)):
            if t in decl.arg_types[i]:
                out.append(c)
                continue
            injs = [o for o in self.signature.operators
                    if o.kind == "inject" and t in o.arg_types[0]
                    and o.result_type in decl.arg_types[i]]
            if len(injs) != 1:
                return None
            out.append(self._put(injs[0], (c,)))
        return tuple(out)

    def _put(self, decl, children):
        key = (decl, children)
        got = self._index.get(key)
        if got is not None:
            return got
        node = len(self.ops)
        self.ops.append(decl)
        self.children.append(children)
        self.types.append(decl.result_type)
        self._index[key] = node
        return node

    def type_of(self, node):
        return self.types[self._check(node)]

    def is_final(self, node):
        return self.type_of(node) in self.signature.final_types

    def subformulas(self, node):
        """The set Sub(phi) of ids reachable from a node, itself included."""
        self._check(node)
        seen = set()
        stack = [node]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(self.children[n])
        return frozenset(seen)

    def dag_size(self, node):
        """|Sub(phi)|: number of distinct subformulas."""
        self._check(node)
        got = self._sizes.get(node)
        if got is None:
            got = self._sizes[node] = len(self.subformulas(node))
        return got

    def tree_size(self, node):
        """Size of the unshared syntax tree (counts repeats)."""
        self._check(node)
        total = 0
        stack = [node]
        while stack:
            n = stack.pop()
            total += 1
            stack.extend(self.children[n])
        return total

    def copy_into(self, other, node, rename=None):
        """Re-intern a subtree into another dag, optionally renaming ops."""
        memo = {}
        order = []
        stack = [node]
        while stack:  # children-first topological order
            n = stack.pop()
            if n in memo:
                continue
            memo[n] = None
            stack.extend(self.children[n])
            order.append(n)
        for n in sorted(order):
            name = self.ops[n].name
            if rename:
                name = rename.get(name, name)
            memo[n] = other.intern(name, tuple(memo[c] for c in self.children[n]))
        return memo[node]

    # -- text form ---------------------------------------------------------

    def render(self, node):
        """Fully parenthesized text form of a formula."""
        self._check(node)
        op = self.ops[node]
        kids = self.children[node]
        if op.kind == "inject":
            return self.render(kids[0])
        if op.arity == 0:
            return op.name
        if op.arity == 1:
            body = self.render(kids[0])
            if op.name == "!":
                return "!" + body
            return "%s %s" % (op.name, body)
        left, right = self.render(kids[0]), self.render(kids[1])
        if op.name in ("EU", "AU"):
            return "%s(%s U %s)" % (op.name[0], left, right)
        return "(%s %s %s)" % (left, op.name, right)

    def parse(self, text):
        """Parse the fully parenthesized grammar into this dag."""
        tokens = _tokenize(text)
        parser = _Parser(self, tokens, text)
        node = parser.expr()
        parser.expect_end()
        return node


_TOKEN_RE = re.compile(r"""
      (?P<ws>\s+)
    | (?P<diamond><([A-Za-z_]\w*)>>=(\d+))
    | (?P<box>\[([A-Za-z_]\w*)\])
    | (?P<ident>[A-Za-z_]\w*)
    | (?P<punct>[!&|()])
""", re.VERBOSE)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError("unexpected character %r" % text[pos], pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(m.lastgroup), pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, dag, tokens, text):
        self.dag = dag
        self.tokens = tokens
        self.text = text
        self.i = 0

    def peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return (None, None, len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.next()
        if val != value:
            raise ParseError("expected %r, found %r" % (value, val), pos)

    def expect_end(self):
        kind, val, pos = self.peek()
        if kind is not None:
            raise ParseError("trailing input %r" % val, pos)

    def expr(self):
        kind, val, pos = self.next()
        if kind == "punct" and val == "!":
            return self._unary("!", pos)
        if kind in ("box", "diamond"):
            return self._unary(val, pos)
        if kind == "punct" and val == "(":
            return self._binary(pos)
        if kind == "ident":
            names = {o.name for o in self.dag.signature.operators}
            if val in ("E", "A") and self.peek()[1] == "(" and val + "U" in names:
                self.next()
                left = self.expr()
                self._expect_until(pos)
                right = self.expr()
                self.expect(")")
                return self._apply(val + "U", (left, right), pos)
            decls = self.dag.signature.decls(val)
            if decls and all(d.arity == 1 for d in decls):
                return self._unary(val, pos)
            return self._apply(val, (), pos)
        raise ParseError("expected a formula, found %r" % val, pos)

    def _expect_until(self, pos):
        kind, val, p = self.next()
        if not (kind == "ident" and val == "U"):
            raise ParseError("expected 'U', found %r" % val, p)

    def _unary(self, name, pos):
        return self._apply(name, (self.expr(),), pos)

    def _binary(self, pos):
        left = self.expr()
        kind, val, p = self.next()
        if val not in ("&", "|") and not (kind == "ident" and val == "U"):
            raise ParseError("expected a binary operator, found %r" % val, p)
        right = self.expr()
        self.expect(")")
        return self._apply(val, (left, right), pos)

    def _apply(self, name, children, pos):
        try:
            return self.dag.intern(name, children)
        except LogicError as e:
            raise ParseError(str(e), pos) from e


def parse_formula(signature, text):
    """Convenience wrapper: parse into a fresh dag, return (dag, id)."""
    dag = FormulaDag(signature)
    return dag, dag.parse(text)
