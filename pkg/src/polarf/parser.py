"""Concrete syntax: lexer, recursive-descent parser, and pretty printer.

The surface language is ASCII and one-token-lookahead:

    positive types   a | dn N | T P1 ... Pk | P * Q | ( ... )
    negative types   P -> N (right assoc) | forall a b. N | up P | ST P Q
    values           x | { t } | 42 | true | false | (v, w)
    computations     \\x : P. t | /\\a. t | return v
                     | let x = v(s); t | let x : P = v(s); t
    programs         data T <pos|neg> <arity> ...  val x : P ...  run t

Comments run from `--` to end of line.  Files use the `.ipf` extension.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import SourceSpan, TypeCheckError
from .syntax import (
    Arrow, BoolLit, Computation, Context, Data, Down, EVar, Forall, IntLit,
    Lambda, Let, LetAnn, NegData, NegType, PairVal, PosType, Return, Solved,
    Thunk, TypeAbs, TypeEnv, UVar, Up, Value, Var, free_uvars,
)

KEYWORDS = {"forall", "up", "dn", "let", "return", "run", "val", "data",
            "true", "false"}

_PUNCT = {"(", ")", "{", "}", ",", ";", ":", ".", "*", "="}


@dataclass(frozen=True)
class DataDecl:
    """A datatype constructor: name, polarity ('+' or '-'), and arity."""

    name: str
    polarity: str
    arity: int


BUILTIN_DATATYPES = (
    DataDecl("Int", "+", 0),
    DataDecl("Bool", "+", 0),
    DataDecl("String", "+", 0),
    DataDecl("List", "+", 1),
    DataDecl("Pair", "+", 2),
    DataDecl("ST", "-", 2),
)


def builtin_signatures() -> dict:
    return {d.name: d for d in BUILTIN_DATATYPES}


@dataclass(frozen=True)
class Program:
    """A parsed source file: datatype declarations, assumptions, and one term."""

    datatypes: tuple
    assumptions: tuple
    body: Computation


@dataclass(frozen=True)
class Token:
    kind: str  # ident | conid | int | kw | punct | arrow | lambda | tyabs | eof
    text: str
    start: int
    end: int


def _lex(src: str, filename: str):
    toks = []
    i = 0
    n = len(src)

    def err(msg, start, end):
        raise TypeCheckError("parse", msg, SourceSpan(filename, start, end))

    while i < n:
        c = src[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c == "-":
            if src.startswith("--", i):
                j = src.find("\n", i)
                i = n if j < 0 else j + 1
                continue
            if src.startswith("->", i):
                toks.append(Token("arrow", "->", i, i + 2))
                i += 2
                continue
            err("unexpected '-' (did you mean '->' or a '--' comment?)", i, i + 1)
        if c == "\\":
            toks.append(Token("lambda", "\\", i, i + 1))
            i += 1
            continue
        if src.startswith("/\\", i):
            toks.append(Token("tyabs", "/\\", i, i + 2))
            i += 2
            continue
        if c == "/":
            err("unexpected '/' (did you mean '/\\'?)", i, i + 1)
        if c in _PUNCT:
            toks.append(Token("punct", c, i, i + 1))
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            toks.append(Token("int", src[i:j], i, j))
            i = j
            continue
        if c.isalpha():
            j = i
            while j < n and (src[j].isalnum() or src[j] in "_'"):
                j += 1
            text = src[i:j]
            if text in KEYWORDS:
                toks.append(Token("kw", text, i, j))
            elif text[0].isupper():
                toks.append(Token("conid", text, i, j))
            else:
                toks.append(Token("ident", text, i, j))
            i = j
            continue
        err(f"unexpected character {c!r}", i, i + 1)
    toks.append(Token("eof", "", n, n))
    return toks


class _Parser:
    def __init__(self, src: str, filename: str, signatures: Optional[dict] = None):
        self.filename = filename
        self.toks = _lex(src, filename)
        self.pos = 0
        self.sigs = dict(signatures) if signatures is not None else builtin_signatures()

    # -- token plumbing ------------------------------------------------

    def peek(self) -> Token:
        return self.toks[min(self.pos, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def err(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        raise TypeCheckError("parse", msg, SourceSpan(self.filename, tok.start, tok.end))

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        if not self.at(kind, text):
            want = text if text is not None else kind
            got = self.peek().text or "end of input"
            self.err(f"expected {want!r}, found {got!r}")
        return self.next()

    def span_from(self, start: int) -> SourceSpan:
        end = self.toks[self.pos - 1].end if self.pos > 0 else start
        return SourceSpan(self.filename, start, end)

    # -- types ---------------------------------------------------------

    def type_any(self):
        """Parse a type of either polarity; polarity is checked at use sites."""
        t = self.peek()
        if t.kind == "kw" and t.text == "forall":
            return self.forall_type()
        if t.kind == "kw" and t.text == "up":
            self.next()
            body = self.pos_atom_checked("up expects a value type")
            res = Up(body)
            if self.at("arrow"):
                self.err("arrow domain must be positive (wrap it in 'dn (...)')")
            return res
        if t.kind == "conid" and self.sig(t.text).polarity == "-":
            res = self.negdata_type()
            if self.at("arrow"):
                self.err("arrow domain must be positive (wrap it in 'dn (...)')")
            return res
        left = self.pos_type()
        if self.at("arrow"):
            if not isinstance(left, PosType):
                self.err("arrow domain must be positive (wrap it in 'dn (...)')")
            self.next()
            return Arrow(left, self.neg_type())
        return left

    def forall_type(self):
        self.expect("kw", "forall")
        binders = [self.expect("ident").text]
        while self.at("ident"):
            binders.append(self.next().text)
        self.expect("punct", ".")
        body = self.neg_type()
        for b in reversed(binders):
            body = Forall(b, body)
        return body

    def negdata_type(self):
        tok = self.next()
        decl = self.sig(tok.text)
        args = tuple(self.pos_atom_checked(
            f"argument {i + 1} of {tok.text} must be a positive type")
            for i in range(decl.arity))
        return NegData(tok.text, args)

    def neg_type(self) -> NegType:
        t = self.type_any()
        if not isinstance(t, NegType):
            self.err("expected a computation type here")
        return t

    def pos_type_checked(self, msg: str) -> PosType:
        t = self.type_any()
        if not isinstance(t, PosType):
            self.err(msg)
        return t

    def pos_type(self):
        """Constructor application plus the `P * Q` product sugar (right assoc)."""
        left = self.pos_app()
        if self.at("punct", "*"):
            if not isinstance(left, PosType):
                self.err("product components must be positive types")
            self.next()
            right = self.pos_type()
            if not isinstance(right, PosType):
                self.err("product components must be positive types")
            return Data("Pair", (left, right))
        return left

    def pos_app(self):
        t = self.peek()
        if t.kind == "conid":
            decl = self.sig(t.text)
            if decl.polarity == "-":
                self.err(f"{t.text} is a computation type constructor")
            if decl.arity > 0:
                self.next()
                args = tuple(self.pos_atom_checked(
                    f"argument {i + 1} of {t.text} must be a positive type")
                    for i in range(decl.arity))
                return Data(t.text, args)
        return self.pos_atom()

    def pos_atom(self):
        t = self.peek()
        if t.kind == "ident":
            self.next()
            return UVar(t.text)
        if t.kind == "conid":
            decl = self.sig(t.text)
            if decl.polarity == "-":
                self.err(f"{t.text} is a computation type constructor")
            if decl.arity > 0:
                self.err(f"{t.text} needs {decl.arity} argument(s); "
                         "parenthesize the application")
            self.next()
            return Data(t.text, ())
        if t.kind == "kw" and t.text == "dn":
            self.next()
            return Down(self.neg_atom())
        if t.kind == "punct" and t.text == "(":
            self.next()
            inner = self.type_any()
            self.expect("punct", ")")
            return inner
        self.err(f"expected a type, found {t.text!r}")

    def neg_atom(self) -> NegType:
        t = self.peek()
        if t.kind == "punct" and t.text == "(":
            self.next()
            inner = self.neg_type()
            self.expect("punct", ")")
            return inner
        if t.kind == "kw" and t.text == "up":
            self.next()
            return Up(self.pos_atom_checked("up expects a value type"))
        if t.kind == "conid" and self.sig(t.text).polarity == "-":
            return self.negdata_type()
        self.err("dn expects a computation type (usually 'dn (...)')")

    def pos_atom_checked(self, msg: str) -> PosType:
        t = self.pos_atom()
        if not isinstance(t, PosType):
            self.err(msg)
        return t

    def sig(self, name: str) -> DataDecl:
        decl = self.sigs.get(name)
        if decl is None:
            self.err(f"unknown type constructor {name}")
        return decl

    # -- terms -----------------------------------------------------------

    def computation(self) -> Computation:
        t = self.peek()
        start = t.start
        if t.kind == "lambda":
            self.next()
            param = self.expect("ident").text
            self.expect("punct", ":")
            anno = self.pos_type_checked("lambda annotations must be value types")
            self.expect("punct", ".")
            body = self.computation()
            return Lambda(param, anno, body, self.span_from(start))
        if t.kind == "tyabs":
            self.next()
            binder = self.expect("ident").text
            self.expect("punct", ".")
            body = self.computation()
            return TypeAbs(binder, body, self.span_from(start))
        if t.kind == "kw" and t.text == "return":
            self.next()
            v = self.value()
            return Return(v, self.span_from(start))
        if t.kind == "kw" and t.text == "let":
            self.next()
            name = self.expect("ident").text
            anno = None
            if self.at("punct", ":"):
                self.next()
                anno = self.pos_type_checked("let annotations must be value types")
            self.expect("punct", "=")
            head = self.value()
            self.expect("punct", "(")
            args = []
            if not self.at("punct", ")"):
                args.append(self.value())
                while self.at("punct", ","):
                    self.next()
                    args.append(self.value())
            self.expect("punct", ")")
            self.expect("punct", ";")
            cont = self.computation()
            span = self.span_from(start)
            if anno is None:
                return Let(name, head, tuple(args), cont, span)
            return LetAnn(name, anno, head, tuple(args), cont, span)
        self.err(f"expected a computation, found {t.text or 'end of input'!r}")

    def value(self) -> Value:
        t = self.peek()
        start = t.start
        if t.kind == "ident":
            self.next()
            return Var(t.text, self.span_from(start))
        if t.kind == "int":
            self.next()
            return IntLit(int(t.text), self.span_from(start))
        if t.kind == "kw" and t.text in ("true", "false"):
            self.next()
            return BoolLit(t.text == "true", self.span_from(start))
        if t.kind == "punct" and t.text == "{":
            self.next()
            body = self.computation()
            self.expect("punct", "}")
            return Thunk(body, self.span_from(start))
        if t.kind == "punct" and t.text == "(":
            self.next()
            first = self.value()
            if self.at("punct", ","):
                self.next()
                second = self.value()
                self.expect("punct", ")")
                return PairVal(first, second, self.span_from(start))
            self.expect("punct", ")")
            return first
        self.err(f"expected a value, found {t.text or 'end of input'!r}")

    # -- programs ----------------------------------------------------------

    def program(self) -> Program:
        decls = []
        while self.at("kw", "data"):
            self.next()
            name_tok = self.expect("conid")
            if name_tok.text in self.sigs:
                self.err(f"datatype {name_tok.text} is already declared", name_tok)
            pol_tok = self.expect("ident")
            if pol_tok.text not in ("pos", "neg"):
                self.err("datatype polarity must be 'pos' or 'neg'", pol_tok)
            arity_tok = self.expect("int")
            decl = DataDecl(name_tok.text, "+" if pol_tok.text == "pos" else "-",
                            int(arity_tok.text))
            self.sigs[decl.name] = decl
            decls.append(decl)
        assumptions = []
        seen = set()
        while self.at("kw", "val"):
            self.next()
            name_tok = self.expect("ident")
            if name_tok.text in seen:
                self.err(f"duplicate assumption {name_tok.text}", name_tok)
            seen.add(name_tok.text)
            self.expect("punct", ":")
            tok0 = self.peek()
            ty = self.pos_type_checked("assumptions must have value types")
            if free_uvars(ty):
                loose = ", ".join(sorted(free_uvars(ty)))
                self.err(f"assumption type must be closed (unbound: {loose})", tok0)
            assumptions.append((name_tok.text, ty))
        self.expect("kw", "run")
        body = self.computation()
        self.expect("eof")
        return Program(tuple(decls), tuple(assumptions), body)


def parse_program(text: str, filename: str = "<input>") -> Program:
    """Parse a whole program; raises TypeCheckError(parse) with a span."""
    return _Parser(text, filename).program()


def parse_type(text: str, polarity: str = "any", filename: str = "<type>",
               signatures: Optional[dict] = None):
    """Parse a single type; `polarity` is '+', '-', or 'any'."""
    p = _Parser(text, filename, signatures)
    t = p.type_any()
    p.expect("eof")
    if polarity == "+" and not isinstance(t, PosType):
        p.err("expected a positive type")
    if polarity == "-" and not isinstance(t, NegType):
        p.err("expected a negative type")
    return t


# ---------------------------------------------------------------------------
# Pretty printing

def pretty(x) -> str:
    """Render a type, term, or context with minimal parentheses."""
    if isinstance(x, PosType):
        return _pp_pos(x)
    if isinstance(x, NegType):
        return _pp_neg(x)
    if isinstance(x, Value):
        return _pp_value(x)
    if isinstance(x, Computation):
        return _pp_comp(x)
    if isinstance(x, Context):
        return _pp_context(x)
    if isinstance(x, TypeEnv):
        return ", ".join(f"{n} : {_pp_pos(p)}" for n, p in x) or "·"
    raise TypeError(f"cannot pretty-print {x!r}")


def _pp_pos(p) -> str:
    if isinstance(p, (UVar, EVar)):
        return p.name
    if isinstance(p, Down):
        return f"dn ({_pp_neg(p.body)})"
    if isinstance(p, Data):
        if p.constructor == "Pair" and len(p.args) == 2:
            left, right = p.args
            lt = f"({_pp_pos(left)})" if _is_pair(left) else _pp_pos(left)
            return f"{lt} * {_pp_pos(right)}"
        if not p.args:
            return p.constructor
        return p.constructor + " " + " ".join(_pp_pos_atom(a) for a in p.args)
    raise TypeError(f"not a positive type: {p!r}")


def _is_pair(p) -> bool:
    return isinstance(p, Data) and p.constructor == "Pair" and len(p.args) == 2


def _pp_pos_atom(p) -> str:
    if isinstance(p, (UVar, EVar)) or (isinstance(p, Data) and not p.args):
        return _pp_pos(p)
    return f"({_pp_pos(p)})"


def _pp_neg(n) -> str:
    if isinstance(n, Forall):
        binders = []
        while isinstance(n, Forall):
            binders.append(n.binder)
            n = n.body
        return f"forall {' '.join(binders)}. {_pp_neg(n)}"
    if isinstance(n, Arrow):
        return f"{_pp_pos(n.domain)} -> {_pp_neg(n.codomain)}"
    if isinstance(n, Up):
        return f"up {_pp_pos_atom(n.body)}"
    if isinstance(n, NegData):
        if not n.args:
            return n.constructor
        return n.constructor + " " + " ".join(_pp_pos_atom(a) for a in n.args)
    raise TypeError(f"not a negative type: {n!r}")


def _pp_value(v) -> str:
    if isinstance(v, Var):
        return v.name
    if isinstance(v, IntLit):
        return str(v.value)
    if isinstance(v, BoolLit):
        return "true" if v.value else "false"
    if isinstance(v, Thunk):
        return "{" + _pp_comp(v.body) + "}"
    if isinstance(v, PairVal):
        return f"({_pp_value(v.first)}, {_pp_value(v.second)})"
    raise TypeError(f"not a value: {v!r}")


def _pp_comp(t) -> str:
    if isinstance(t, Lambda):
        return f"\\{t.param} : {_pp_pos(t.annotation)}. {_pp_comp(t.body)}"
    if isinstance(t, TypeAbs):
        return f"/\\{t.binder}. {_pp_comp(t.body)}"
    if isinstance(t, Return):
        return f"return {_pp_value(t.value)}"
    if isinstance(t, (Let, LetAnn)):
        anno = f" : {_pp_pos(t.annotation)}" if isinstance(t, LetAnn) else ""
        args = ", ".join(_pp_value(v) for v in t.args)
        return f"let {t.name}{anno} = {_pp_value(t.head)}({args}); {_pp_comp(t.cont)}"
    raise TypeError(f"not a computation: {t!r}")


def _pp_context(theta: Context) -> str:
    if not theta.entries:
        return "·"
    parts = []
    for e in theta.entries:
        if isinstance(e, Solved):
            parts.append(f"{e.name} = {_pp_pos(e.solution)}")
        else:
            parts.append(e.name)
    return ", ".join(parts)
