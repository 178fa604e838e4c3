"""Function-spec expression grammar.

    spec   := NAME | NAME ":" kvlist | COMB "(" spec ("," arg)* ")"
    NAME   in {one, squarefree, divisor, omega_exp, bigomega_exp, omega, bigomega}
    COMB   in {twist, coprime, conv, expext, cofactor}
    kvlist := key "=" number ("," key "=" number)*

Examples: "divisor:rho=0.5", "twist(one,1.0)", "coprime(one,30030)".
Parse errors carry the byte offset of the offending token.  Parsed specs
re-serialize to a canonical string (spec.expr()) that parses back to an
equal spec.
"""

from __future__ import annotations

import re

from . import funcspec as fs
from .errors import SpecParseError

_LEAVES = {
    "one": (fs.one, ()),
    "squarefree": (fs.squarefree, ()),
    "divisor": (fs.divisor, ("rho",)),
    "omega_exp": (fs.omega_exp, ("z",)),
    "bigomega_exp": (fs.bigomega_exp, ("z",)),
    "omega": (fs.omega, ()),
    "bigomega": (fs.bigomega, ()),
}

_COMBINATORS = {"twist", "coprime", "conv", "expext", "cofactor"}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<number>[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<sym>[(),:=]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise SpecParseError(f"unexpected character {stripped[0]!r}",
                                 len(text) - len(stripped))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise SpecParseError(f"expected {kind}, found {tok[1]!r}", tok[2])
        if value is not None and tok[1] != value:
            raise SpecParseError(f"expected {value!r}, found {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        spec = self.spec()
        tok = self.peek()
        if tok[0] != "end":
            raise SpecParseError(f"trailing input {tok[1]!r}", tok[2])
        return spec

    def spec(self):
        kind, name, off = self.take("name")
        if name in _COMBINATORS:
            return self.combinator(name, off)
        if name not in _LEAVES:
            raise SpecParseError(f"unknown name {name!r}", off)
        ctor, keys = _LEAVES[name]
        if self.peek()[1] == ":":
            self.take("sym", ":")
            kv = self.kvlist()
            if not keys:
                raise SpecParseError(f"{name!r} takes no parameters", off)
            missing = [k for k in keys if k not in kv]
            extra = [k for k in kv if k not in keys]
            if missing or extra:
                raise SpecParseError(
                    f"{name!r} expects parameters {list(keys)}, got {sorted(kv)}",
                    off)
            return ctor(**kv)
        if keys:
            raise SpecParseError(
                f"{name!r} requires parameters {list(keys)} (write "
                f"{name}:{keys[0]}=<number>)", off)
        return ctor()

    def kvlist(self):
        kv = {}
        while True:
            _, key, koff = self.take("name")
            if self.peek()[1] != "=":
                raise SpecParseError(f"malformed kvlist: expected '=' after {key!r}",
                                     self.peek()[2])
            self.take("sym", "=")
            kv[key] = self.number()
            # a comma continues the kvlist only when "key =" follows;
            # otherwise it belongs to an enclosing combinator
            if (self.peek()[1] == ","
                    and self.tokens[self.i + 1][0] == "name"
                    and self.tokens[self.i + 2][1] == "="):
                self.take("sym", ",")
                continue
            return kv

    def number(self):
        _, lit, off = self.take("number")
        try:
            if re.fullmatch(r"[+-]?\d+", lit):
                return int(lit)
            return float(lit)
        except ValueError:  # pragma: no cover - regex keeps this unreachable
            raise SpecParseError(f"bad number {lit!r}", off)

    def combinator(self, name, off):
        self.take("sym", "(")
        args = [self.spec()]
        while self.peek()[1] == ",":
            self.take("sym", ",")
            if self.peek()[0] == "number":
                args.append(self.number())
            else:
                args.append(self.spec())
        self.take("sym", ")")
        return self.build(name, args, off)

    def build(self, name, args, off):
        def need(n, shape):
            if len(args) != n:
                raise SpecParseError(
                    f"{name!r} takes {shape}, got {len(args)} arguments", off)

        mult = lambda a: isinstance(a, fs.MultSpec)
        num = lambda a: isinstance(a, (int, float))
        if name == "twist":
            need(2, "(spec, tau)")
            if not (mult(args[0]) and num(args[1])):
                raise SpecParseError("twist takes (multiplicative spec, number)", off)
            return fs.twist(args[0], float(args[1]))
        if name == "coprime":
            need(2, "(spec, D)")
            if not (mult(args[0]) and isinstance(args[1], int)):
                raise SpecParseError("coprime takes (multiplicative spec, integer)", off)
            return fs.restrict_coprime(args[0], args[1])
        if name == "conv":
            need(2, "(spec, spec)")
            if not (mult(args[0]) and mult(args[1])):
                raise SpecParseError("conv takes two multiplicative specs", off)
            return fs.convolve_spec(args[0], args[1])
        if name == "cofactor":
            need(2, "(spec, spec)")
            if not (mult(args[0]) and mult(args[1])):
                raise SpecParseError("cofactor takes two multiplicative specs", off)
            return fs.cofactor(args[0], args[1])
        if name == "expext":
            need(1, "(spec)")
            if not mult(args[0]):
                raise SpecParseError("expext takes a multiplicative spec", off)
            return fs.exp_extension_spec(args[0])
        raise SpecParseError(f"unknown combinator {name!r}", off)  # pragma: no cover


def parse_spec(expr: str):
    """Parse an expression into a MultSpec or AddSpec."""
    if not expr or not expr.strip():
        raise SpecParseError("empty expression", 0)
    return _Parser(expr).parse()
