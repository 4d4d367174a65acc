"""Concrete syntax for formulas.

Grammar sketch (quantifiers bind weakest, then ->, then |, then &,
prefix negations strongest):

    formula  := ('E' | 'A') VAR ('in' '{' terms '}')? '.' formula
              | 'Ec' VAR+ '.' formula
              | implied
    implied  := disj ('->' disj)?
    disj     := conj ('|' conj)*
    conj     := unary ('&' unary)*
    unary    := '~' unary | '!' atom | atom | '(' formula ')'
    atom     := 'ci' '(' terms? ';' terms ';' terms ')'
              | 'dep' '(' terms? ';' terms ')'
              | 'const' '(' terms ')'
              | NAME '(' terms ')'                 -- relation (FO mode)
              | tuple ('=~*' | '=~' | '=' | '!=') tuple
              | term ('=' | '!=') term
              | NAME                               -- proposition (QPL mode)
    tuple    := '(' terms? ')'
    term     := NAME | '@' NAME

In propositional mode bare names are proposition literals and the
first-order forms (relations, equality, constants) are rejected; `~` is
accepted only there.  `!` is literal negation and applies to atoms only.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import FormulaSyntaxError, InputError
from . import syntax
from .syntax import (And, BoundedExists, BoundedForall, CondIndep, Const,
                     ConstExists, Constancy, Dep, Exists, Forall, Formula,
                     ClassicalNeg, Implies, MarginalEquiv, MarginalIdentity,
                     NegRel, Or, PropLit, Rel, TupleEq, TupleNeq, Var, VarEq,
                     VarNeq)


class Mode(enum.Enum):
    FO = "fo"
    QPL = "qpl"


_KEYWORDS = {"E", "A", "Ec", "in", "ci", "dep", "const"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<name>[A-Za-z_$][A-Za-z0-9_']*|[0-9][A-Za-z0-9_']*)
  | (?P<op>=~\*|=~|!=|->|[()={},;.|&~!@])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "op", "eof"
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        lexeme = match.group(0)
        if not match.group("ws"):
            kind = "name" if match.group("name") else "op"
            tokens.append(Token(kind, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = match.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], mode: Mode):
        self.tokens = tokens
        self.mode = mode
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != "eof":
            self.pos += 1
        return token

    def at_op(self, text: str) -> bool:
        token = self.peek()
        return token.kind == "op" and token.text == text

    def expect_op(self, text: str) -> Token:
        if not self.at_op(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def fail(self, message: str):
        token = self.peek()
        found = f", found {token.text!r}" if token.kind != "eof" else ", found end of input"
        raise FormulaSyntaxError(message + found, token.line, token.column)

    # -- grammar -----------------------------------------------------------

    def parse(self) -> Formula:
        formula = self.formula()
        if self.peek().kind != "eof":
            self.fail("trailing input")
        return formula

    def formula(self) -> Formula:
        token = self.peek()
        if token.kind == "name" and token.text in ("E", "A", "Ec"):
            return self.quantified()
        return self.implied()

    def quantified(self) -> Formula:
        keyword = self.advance().text
        if keyword == "Ec":
            vars = []
            while self.peek().kind == "name" and not self.at_op("."):
                vars.append(Var(self.variable_name()))
            if not vars:
                self.fail("Ec needs at least one variable")
            self.expect_op(".")
            return ConstExists(tuple(vars), self.formula())
        var = Var(self.variable_name())
        if self.peek().kind == "name" and self.peek().text == "in":
            self.advance()
            self.expect_op("{")
            choices = [self.term()]
            while self.at_op(","):
                self.advance()
                choices.append(self.term())
            self.expect_op("}")
            self.expect_op(".")
            body = self.formula()
            node = BoundedExists if keyword == "E" else BoundedForall
            return node(var, tuple(choices), body)
        self.expect_op(".")
        body = self.formula()
        return Exists(var, body) if keyword == "E" else Forall(var, body)

    def implied(self) -> Formula:
        left = self.disjunction()
        if self.at_op("->"):
            self.advance()
            right = self.disjunction()
            return Implies(left, right)
        return left

    def disjunction(self) -> Formula:
        out = self.conjunction()
        while self.at_op("|"):
            self.advance()
            out = Or(out, self.conjunction())
        return out

    def conjunction(self) -> Formula:
        out = self.unary()
        while self.at_op("&"):
            self.advance()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        if self.at_op("~"):
            if self.mode is not Mode.QPL:
                self.fail("classical negation ~ is only available in propositional mode")
            self.advance()
            return ClassicalNeg(self.unary())
        if self.at_op("!"):
            token = self.advance()
            atom = self.atom_or_group()
            return self.negate_literal(atom, token)
        return self.atom_or_group()

    def negate_literal(self, atom: Formula, bang: Token) -> Formula:
        if isinstance(atom, VarEq):
            return VarNeq(atom.lhs, atom.rhs)
        if isinstance(atom, Rel):
            return NegRel(atom.name, atom.args)
        if isinstance(atom, TupleEq):
            return TupleNeq(atom.left, atom.right)
        if isinstance(atom, PropLit) and atom.positive:
            return PropLit(atom.name, positive=False)
        raise FormulaSyntaxError(
            "! may negate only equality, relation, or proposition literals "
            "(formulas stay in negation normal form)", bang.line, bang.column)

    def atom_or_group(self) -> Formula:
        token = self.peek()
        if token.kind == "op" and token.text == "(":
            tuple_atom = self.try_tuple_atom()
            if tuple_atom is not None:
                return tuple_atom
            self.advance()
            inner = self.formula()
            self.expect_op(")")
            return inner
        return self.atom()

    def try_tuple_atom(self) -> Formula | None:
        """Parse '(t, ...) OP (t, ...)' if present; otherwise rewind."""
        saved = self.pos
        try:
            left = self.tuple_of_terms()
        except FormulaSyntaxError:
            self.pos = saved
            return None
        token = self.peek()
        if token.kind == "op" and token.text in ("=~", "=~*", "=", "!="):
            self.advance()
            right = self.tuple_of_terms()
            return self.tuple_atom(left, token, right)
        self.pos = saved
        return None

    def tuple_of_terms(self) -> list:
        self.expect_op("(")
        terms = []
        if not self.at_op(")"):
            terms.append(self.term())
            while self.at_op(","):
                self.advance()
                terms.append(self.term())
        self.expect_op(")")
        return terms

    def tuple_atom(self, left, op: Token, right) -> Formula:
        if op.text in ("=~", "=~*"):
            for side in (left, right):
                for term in side:
                    if not isinstance(term, Var):
                        raise FormulaSyntaxError(
                            f"{op.text} atoms range over variables, not constants",
                            op.line, op.column)
            if not left or not right:
                raise FormulaSyntaxError(
                    f"{op.text} atom over an empty tuple", op.line, op.column)
            if op.text == "=~":
                if len(left) != len(right):
                    raise FormulaSyntaxError(
                        f"=~ needs tuples of equal length, got {len(left)} and "
                        f"{len(right)}", op.line, op.column)
                return MarginalIdentity(tuple(left), tuple(right))
            return MarginalEquiv(tuple(left), tuple(right))
        if not left or len(left) != len(right):
            raise FormulaSyntaxError(
                f"{op.text} needs nonempty tuples of equal length",
                op.line, op.column)
        if len(left) == 1:
            return (VarEq if op.text == "=" else VarNeq)(left[0], right[0])
        return (TupleEq if op.text == "=" else TupleNeq)(tuple(left), tuple(right))

    def atom(self) -> Formula:
        token = self.peek()
        if token.kind == "op" and token.text == "@":
            lhs = self.term()
            return self.equality_tail(lhs)
        if token.kind != "name":
            self.fail("expected a formula")
        if token.text == "ci":
            return self.ci_atom()
        if token.text == "dep":
            return self.dep_atom()
        if token.text == "const":
            return self.const_atom()
        name = self.advance().text
        if self.at_op("("):
            if self.mode is Mode.QPL:
                raise FormulaSyntaxError(
                    "relation symbols are not part of the propositional grammar",
                    token.line, token.column)
            args = self.tuple_of_terms()
            if not args:
                self.fail(f"relation {name!r} needs at least one argument")
            return Rel(name, tuple(args))
        if self.peek().kind == "op" and self.peek().text in ("=", "!="):
            self.check_variable(name, token)
            return self.equality_tail(Var(name))
        if self.mode is Mode.QPL:
            self.check_variable(name, token)
            return PropLit(name)
        raise FormulaSyntaxError(
            f"{name!r} alone is not a formula outside propositional mode",
            token.line, token.column)

    def equality_tail(self, lhs) -> Formula:
        if self.mode is Mode.QPL:
            token = self.peek()
            raise FormulaSyntaxError(
                "equality atoms are not part of the propositional grammar",
                token.line, token.column)
        op = self.advance()
        if op.text not in ("=", "!="):
            raise FormulaSyntaxError("expected '=' or '!='", op.line, op.column)
        rhs = self.term()
        return (VarEq if op.text == "=" else VarNeq)(lhs, rhs)

    def ci_atom(self) -> Formula:
        self.advance()
        self.expect_op("(")
        cond = self.term_list_until(";")
        self.expect_op(";")
        left = self.term_list_until(";")
        self.expect_op(";")
        right = self.term_list_until(")")
        self.expect_op(")")
        token = self.peek()
        if not left or not right:
            raise FormulaSyntaxError(
                "ci needs nonempty second and third slots", token.line, token.column)
        return CondIndep(self.vars_only(cond), self.vars_only(left),
                         self.vars_only(right))

    def dep_atom(self) -> Formula:
        self.advance()
        self.expect_op("(")
        dets = self.term_list_until(";")
        self.expect_op(";")
        deps = self.term_list_until(")")
        self.expect_op(")")
        token = self.peek()
        if not deps:
            raise FormulaSyntaxError(
                "dep needs a nonempty dependent slot", token.line, token.column)
        return Dep(self.vars_only(dets), self.vars_only(deps))

    def const_atom(self) -> Formula:
        self.advance()
        args = self.tuple_of_terms()
        if not args:
            self.fail("const needs at least one variable")
        return Constancy(self.vars_only(args))

    def term_list_until(self, stop: str) -> list:
        terms = []
        if self.at_op(stop):
            return terms
        terms.append(self.term())
        while self.at_op(","):
            self.advance()
            terms.append(self.term())
        return terms

    def vars_only(self, terms) -> tuple[Var, ...]:
        for term in terms:
            if not isinstance(term, Var):
                token = self.peek()
                raise FormulaSyntaxError(
                    "dependency atoms range over variables, not constants",
                    token.line, token.column)
        return tuple(terms)

    def term(self):
        token = self.peek()
        if token.kind == "op" and token.text == "@":
            if self.mode is Mode.QPL:
                raise FormulaSyntaxError(
                    "constants are not part of the propositional grammar",
                    token.line, token.column)
            self.advance()
            name = self.peek()
            if name.kind != "name":
                self.fail("expected a constant name after '@'")
            self.advance()
            return Const(name.text)
        if token.kind != "name":
            self.fail("expected a variable")
        self.check_variable(token.text, token)
        return Var(self.advance().text)

    def variable_name(self) -> str:
        token = self.peek()
        if token.kind != "name":
            self.fail("expected a variable name")
        self.check_variable(token.text, token)
        return self.advance().text

    def check_variable(self, name: str, token: Token):
        if name in _KEYWORDS:
            raise FormulaSyntaxError(
                f"{name!r} is a reserved word", token.line, token.column)
        if name[0].isdigit():
            raise FormulaSyntaxError(
                f"variable names may not start with a digit: {name!r}",
                token.line, token.column)


def parse(text: str, mode: Mode = Mode.FO) -> Formula:
    """Parse concrete syntax into a formula AST.

    Raises FormulaSyntaxError with a line:column prefix on bad input.
    """
    return _Parser(_tokenize(text), mode).parse()


def parse_fo(text: str) -> Formula:
    return parse(text, Mode.FO)


def parse_qpl(text: str) -> Formula:
    return parse(text, Mode.QPL)
