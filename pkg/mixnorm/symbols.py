"""
Symbol expressions such as "bracket(xi)^2 * exp(-xi1^2)".

Grammar: numbers, xi1..xin, the vector xi (only as the argument of
bracket/anorm), pi, i, the operators + - * / ^ and the functions abs,
exp, sqrt, bracket, anorm. Parsing is top-down operator precedence;
^ is right associative and binds tighter than unary minus.
"""
import re

import numpy as np

from .anisotropy import aniso_norm, bracket
from .exceptions import SymbolSyntaxError

TOKEN_PATTERN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class Node:
    vector = False

    def evaluate(self, xi, a):
        raise NotImplementedError


class Constant(Node):
    def __init__(self, value):
        self.value = value

    def evaluate(self, xi, a):
        return np.full(np.shape(xi)[:-1], self.value)


class Coordinate(Node):
    def __init__(self, index):
        self.index = index

    def evaluate(self, xi, a):
        return np.asarray(xi, dtype=float)[..., self.index]


class Frequency(Node):
    vector = True

    def evaluate(self, xi, a):
        return np.asarray(xi, dtype=float)


class Apply(Node):
    def __init__(self, func, *args):
        self.func = func
        self.args = args

    def evaluate(self, xi, a):
        return self.func(*(arg.evaluate(xi, a) for arg in self.args))


class VectorApply(Node):
    def __init__(self, func, arg):
        self.func = func
        self.arg = arg

    def evaluate(self, xi, a):
        return self.func(self.arg.evaluate(xi, a), a)


def _power(base, exponent):
    base = np.asarray(base)
    exponent = np.asarray(exponent)
    real = not (np.iscomplexobj(base) or np.iscomplexobj(exponent))
    if real and (np.all(base >= 0) or np.all(exponent == np.round(exponent))):
        return np.power(base.astype(float), exponent)
    return np.power(base.astype(complex), exponent)


def _sqrt(values):
    values = np.asarray(values)
    if not np.iscomplexobj(values) and np.all(values >= 0):
        return np.sqrt(values)
    return np.sqrt(values.astype(complex))


SCALAR_FUNCTIONS = {"abs": np.abs, "exp": np.exp, "sqrt": _sqrt}
VECTOR_FUNCTIONS = {"bracket": bracket, "anorm": aniso_norm}
CONSTANTS = {"pi": np.pi, "i": 1j}


class Token:
    lbp = 0

    def __init__(self, text, position):
        self.text = text
        self.position = position

    def nud(self, parser):
        raise SymbolSyntaxError(f"unexpected {self.text!r}", position=self.position)

    def led(self, parser, left):
        raise SymbolSyntaxError(f"unexpected {self.text!r}", position=self.position)


class NumberToken(Token):
    def nud(self, parser):
        return Constant(float(self.text))


class NameToken(Token):
    def nud(self, parser):
        name = self.text
        if name in SCALAR_FUNCTIONS or name in VECTOR_FUNCTIONS:
            parser.expect("(")
            argument = parser.expression()
            parser.expect(")")
            if name in VECTOR_FUNCTIONS:
                if not argument.vector:
                    raise SymbolSyntaxError(f"{name} takes the vector xi", position=self.position)
                return VectorApply(VECTOR_FUNCTIONS[name], argument)
            parser.scalar(argument, self)
            return Apply(SCALAR_FUNCTIONS[name], argument)
        if name in CONSTANTS:
            return Constant(CONSTANTS[name])
        if name == "xi":
            return Frequency()
        match = re.fullmatch(r"xi(\d+)", name)
        if match:
            index = int(match.group(1))
            if not 1 <= index <= parser.n:
                raise SymbolSyntaxError(f"{name} outside xi1..xi{parser.n}", position=self.position)
            return Coordinate(index - 1)
        raise SymbolSyntaxError(f"unknown name {name!r}", position=self.position)


class BinaryToken(Token):
    OPERATIONS = {
        "+": (10, np.add),
        "-": (10, np.subtract),
        "*": (20, np.multiply),
        "/": (20, np.divide),
        "^": (30, _power),
    }
    # prefix minus sits between * and ^
    UNARY_BP = 25

    def __init__(self, text, position):
        super().__init__(text, position)
        self.lbp, self.operation = self.OPERATIONS[text]

    def nud(self, parser):
        if self.text not in "+-":
            return super().nud(parser)
        operand = parser.scalar(parser.expression(self.UNARY_BP), self)
        return operand if self.text == "+" else Apply(np.negative, operand)

    def led(self, parser, left):
        # ^ is right associative
        rbp = self.lbp - 1 if self.text == "^" else self.lbp
        right = parser.expression(rbp)
        parser.scalar(left, self)
        parser.scalar(right, self)
        return Apply(self.operation, left, right)


class ParenToken(Token):
    def nud(self, parser):
        inner = parser.expression()
        parser.expect(")")
        return inner


class EndToken(Token):
    pass


def tokenize(text):
    for match in TOKEN_PATTERN.finditer(text):
        number, name, other = match.groups()
        position = match.start(match.lastindex)
        if number:
            yield NumberToken(number, position)
        elif name:
            yield NameToken(name, position)
        elif other in BinaryToken.OPERATIONS:
            yield BinaryToken(other, position)
        elif other == "(":
            yield ParenToken(other, position)
        elif other == ")":
            yield Token(other, position)
        elif other.strip():
            raise SymbolSyntaxError(f"unknown character {other!r}", position=position)
    yield EndToken("end of input", len(text))


class Parser:
    def __init__(self, text, n):
        self.n = n
        self.tokens = tokenize(text)
        self.token = next(self.tokens)

    def advance(self):
        current = self.token
        self.token = next(self.tokens)
        return current

    def expect(self, text):
        if self.token.text != text:
            raise SymbolSyntaxError(f"expected {text!r}, found {self.token.text!r}", position=self.token.position)
        self.advance()

    def scalar(self, node, token):
        if node.vector:
            raise SymbolSyntaxError("the vector xi may only appear inside bracket() or anorm()", position=token.position)
        return node

    def expression(self, rbp=0):
        left = self.advance().nud(self)
        while rbp < self.token.lbp:
            left = self.advance().led(self, left)
        return left


class SymbolExpression:
    def __init__(self, source, n, tree):
        self.source = source
        self.n = n
        self.tree = tree

    def __call__(self, xi, a):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.asarray(self.tree.evaluate(xi, a), dtype=complex)

    def __repr__(self):
        return f"SymbolExpression({self.source!r})"


def parse(expression, n):
    if not expression or not expression.strip():
        raise SymbolSyntaxError("empty symbol expression", position=0)
    parser = Parser(expression, n)
    tree = parser.expression()
    if not isinstance(parser.token, EndToken):
        raise SymbolSyntaxError(f"unexpected {parser.token.text!r}", position=parser.token.position)
    parser.scalar(tree, parser.token)
    return SymbolExpression(expression, n, tree)
