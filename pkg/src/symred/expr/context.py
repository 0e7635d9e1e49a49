"""Declared names and the expression parser.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | factor
    factor := atom ('^' signed-integer)?
    atom   := integer | name | name '(' names ')' | 'D(' name (',' name)+ ')'
            | '(' expr ')'
"""

import re

from .core import (AlgebraicGenerator, DeclaredFunction, DerivativeAtom, ExprError,
                   FunctionApplication, Power, Product, Rational, Sum, Symbol, normalize)


class ParseError(ExprError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = "%s at position %d" % (message, position)
        super().__init__(message)


class UndeclaredName(ParseError):
    pass


_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S)")
_SPACE = re.compile(r"\s*")


def _tokenize(text):
    tokens = []
    pos = _SPACE.match(text, 0).end()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        start = m.start()
        if m.group(1) is not None:
            tokens.append(("num", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^(),":
                raise ParseError("unexpected character %r" % ch, start, text)
            tokens.append((ch, ch, start))
        pos = _SPACE.match(text, m.end()).end()
    tokens.append(("end", None, len(text)))
    return tokens


class Context:
    """Symbols, algebraic generators and unknown functions known to a parser."""

    def __init__(self):
        self.symbols = {}
        self.functions = {}

    def copy(self):
        c = Context()
        c.symbols = dict(self.symbols)
        c.functions = dict(self.functions)
        return c

    def _check_free(self, name):
        if name in self.symbols or name in self.functions or name == "D":
            raise ExprError("name %r is already declared" % name)

    def symbol(self, name):
        if name in self.symbols:
            return self.symbols[name]
        self._check_free(name)
        s = Symbol(name)
        self.symbols[name] = s
        return s

    def symbols_(self, *names):
        return [self.symbol(n) for n in names]

    def generator(self, name, radicand, rules=None):
        """Declare ``name = sqrt(radicand)``; rules default to the implicit ones."""
        self._check_free(name)
        if isinstance(radicand, str):
            radicand = self.parse(radicand)
        if rules is None:
            gen = AlgebraicGenerator.sqrt(name, radicand)
        else:
            gen = AlgebraicGenerator(name, normalize(radicand))
            self.symbols[name] = gen.symbol
            try:
                gen.set_rules({k: self.parse(v) if isinstance(v, str) else v
                               for k, v in rules.items()})
            except Exception:
                del self.symbols[name]
                raise
        self.symbols[name] = gen.symbol
        return gen.symbol

    def function(self, name, args):
        self._check_free(name)
        syms = []
        for a in args:
            if isinstance(a, Symbol):
                syms.append(a)
            elif a in self.symbols:
                syms.append(self.symbols[a])
            else:
                raise UndeclaredName("argument %r of %s is undeclared" % (a, name))
        f = DeclaredFunction(name, tuple(syms))
        self.functions[name] = f
        return f

    def parse(self, text):
        """Parse and normalize."""
        return normalize(self.parse_tree(text))

    def parse_tree(self, text):
        if not isinstance(text, str):
            raise ParseError("expected a string, got %r" % (text,))
        return _Parser(self, text).parse()

    def parse_many(self, texts):
        return [self.parse(t) for t in texts]

    def _split_derivative(self, name):
        if "_" not in name:
            return None
        head, _, tail = name.partition("_")
        f = self.functions.get(head)
        if f is None or not tail:
            return None
        args = f.arg_names
        found = []

        def walk(rest, acc):
            if not rest:
                found.append(tuple(acc))
                return
            for a in args:
                if rest.startswith(a):
                    walk(rest[len(a):], acc + [a])

        walk(tail, [])
        if len(set(found)) != 1:
            return None
        return DerivativeAtom(f, found[0])


class _Parser:
    def __init__(self, context, text):
        self.ctx = context
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError("expected %r but found %s" % (kind, what), tok[2], self.text)
        self.i += 1
        return tok

    def parse(self):
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError("unexpected %r" % (tok[1],), tok[2], self.text)
        return e

    def expr(self):
        terms = [self.term()]
        while self.peek()[0] in "+-":
            op = self.take()[0]
            t = self.term()
            terms.append(t if op == "+" else Product((Rational(-1), t)))
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self):
        factors = [self.unary()]
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            f = self.unary()
            factors.append(f if op == "*" else Power(f, -1))
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            inner = self.unary()
            if isinstance(inner, Rational):
                return Rational(-inner.value)
            return Product((Rational(-1), inner))
        return self.factor()

    def factor(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            sign = 1
            if self.peek()[0] in "+-":
                sign = -1 if self.take()[0] == "-" else 1
            tok = self.take("num")
            return Power(base, sign * tok[1])
        return base

    def atom(self):
        tok = self.take()
        kind, value, pos = tok
        if kind == "num":
            return Rational(value)
        if kind == "(":
            e = self.expr()
            self.take(")")
            return e
        if kind != "name":
            what = "end of input" if kind == "end" else repr(value)
            raise ParseError("unexpected %s" % what, pos, self.text)
        if value == "D" and self.peek()[0] == "(":
            return self.derivative(pos)
        ctx = self.ctx
        if value in ctx.functions:
            f = ctx.functions[value]
            if self.peek()[0] == "(":
                self.take()
                names = self.names()
                if tuple(names) != f.arg_names:
                    raise ParseError("%s must be applied to (%s)"
                                     % (value, ",".join(f.arg_names)), pos, self.text)
            return FunctionApplication(f)
        if value in ctx.symbols:
            return ctx.symbols[value]
        d = ctx._split_derivative(value)
        if d is not None:
            return d
        raise UndeclaredName("undeclared name %r" % value, pos, self.text)

    def names(self):
        names = [self.take("name")[1]]
        while self.peek()[0] == ",":
            self.take()
            names.append(self.take("name")[1])
        self.take(")")
        return names

    def derivative(self, pos):
        self.take("(")
        names = self.names()
        if len(names) < 2:
            raise ParseError("D(...) needs a function and at least one variable", pos, self.text)
        f = self.ctx.functions.get(names[0])
        if f is None:
            raise UndeclaredName("undeclared function %r" % names[0], pos, self.text)
        for n in names[1:]:
            if n not in f.arg_names:
                raise ParseError("%s is not an argument of %s" % (n, f.name), pos, self.text)
        return DerivativeAtom(f, tuple(names[1:]))
