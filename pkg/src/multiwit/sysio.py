"""System ingestion and persistence.

Three concerns live here: a recursive-descent parser for polynomial
systems with declared variable groups, a JSON archive for witness data,
and a deterministic counter-based random source (every "general" or
"random" choice in the toolkit draws from one of its streams).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .algebra import Polynomial, PolySystem, VariableGrouping

DEFAULT_SEED = 20230529


# ---------------------------------------------------------------------------
# Random source


class RandomSource:
    """Counter-based PRNG: identical (seed, stream, draw index) gives an
    identical value on every platform.  Streams are value types; derive a
    fresh one per worker/purpose with substream()."""

    def __init__(self, seed: int = DEFAULT_SEED, stream: int = 0):
        self.seed = int(seed) % 2**64
        self.stream = int(stream) % 2**64
        key = self.seed + (self.stream << 64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def substream(self, index: int) -> "RandomSource":
        mixed = (self.stream * 6364136223846793005 + index + 1442695040888963407) % 2**64
        return RandomSource(self.seed, mixed)

    def unit_complex(self) -> complex:
        theta = 2 * np.pi * self._gen.random()
        return complex(np.cos(theta), np.sin(theta))

    def gaussian_complex(self) -> complex:
        re, im = self._gen.normal(size=2)
        return complex(re, im) / np.sqrt(2)

    def gaussian_complex_array(self, *shape: int) -> np.ndarray:
        data = self._gen.normal(size=(2,) + shape)
        return (data[0] + 1j * data[1]) / np.sqrt(2)

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed}, stream={self.stream})"


def draw(rs: RandomSource, kind: str) -> complex:
    if kind == "unit-complex":
        return rs.unit_complex()
    if kind == "gaussian-complex":
        return rs.gaussian_complex()
    raise ValueError(f"unknown draw kind: {kind!r}")


# ---------------------------------------------------------------------------
# Parser


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


@dataclass
class SystemDocument:
    grouping: VariableGrouping
    system: PolySystem
    group_names: tuple[str, ...]
    poly_names: tuple[str, ...]
    source: str
    metadata: dict = field(default_factory=dict)


_SYMBOLS = set("+-*^=;()[]")


def _tokenize(text: str):
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in _SYMBOLS:
            tokens.append(("sym", ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE" and j + 1 < n and (
                text[j + 1].isdigit() or (text[j + 1] in "+-" and j + 2 < n and text[j + 2].isdigit())
            ):
                j += 2
                while j < n and text[j].isdigit():
                    j += 1
            imag = j < n and text[j] == "i"
            lit = text[i:j]
            try:
                value = float(lit)
            except ValueError:
                raise ParseError(f"bad number literal {lit!r}", line, col) from None
            if imag:
                j += 1
                tokens.append(("num", complex(0.0, value), line, col))
            else:
                tokens.append(("num", complex(value, 0.0), line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("id", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.group_names: list[str] = []
        self.group_sizes: list[int] = []
        self.var_names: list[str] = []
        self.var_index: dict[str, int] = {}
        self.poly_names: list[str] = []
        self.polys: list[Polynomial] = []
        self.grouping: VariableGrouping | None = None

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok[2], tok[3])

    def expect(self, kind: str, value=None):
        tok = self.next()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            self.error(f"expected {want!r}, found {tok[1]!r}", tok)
        return tok

    def parse(self) -> SystemDocument:
        while self.peek()[0] != "eof":
            tok = self.peek()
            if tok[0] == "id" and tok[1] == "group":
                self.parse_group()
            elif tok[0] == "id":
                self.parse_poly()
            else:
                self.error(f"expected declaration, found {tok[1]!r}")
        if not self.group_names:
            self.error("no variable groups declared")
        if not self.polys:
            self.error("no polynomials declared")
        return SystemDocument(
            grouping=self.grouping,
            system=PolySystem(self.polys),
            group_names=tuple(self.group_names),
            poly_names=tuple(self.poly_names),
            source=self.text,
        )

    def parse_group(self):
        if self.polys:
            self.error("group declarations must precede polynomials")
        self.expect("id", "group")
        name_tok = self.expect("id")
        name = name_tok[1]
        if name in self.group_names:
            self.error(f"duplicate group name {name!r}", name_tok)
        size = 1
        if self.peek()[:2] == ("sym", "["):
            self.next()
            num_tok = self.expect("num")
            size = num_tok[1].real
            if num_tok[1].imag != 0 or size != int(size) or size < 1:
                self.error("group size must be a positive integer", num_tok)
            size = int(size)
            self.expect("sym", "]")
        self.expect("sym", ";")
        self.group_names.append(name)
        self.group_sizes.append(size)
        if size == 1:
            new_vars = [name]
        else:
            new_vars = [f"{name}{j}" for j in range(1, size + 1)]
        for v in new_vars:
            if v in self.var_index:
                self.error(f"variable name {v!r} collides with an existing variable")
            self.var_index[v] = len(self.var_names)
            self.var_names.append(v)
        self.grouping = VariableGrouping.from_sizes(self.group_sizes, self.var_names)

    def parse_poly(self):
        name_tok = self.expect("id")
        name = name_tok[1]
        if self.grouping is None:
            self.error("polynomials must follow a group declaration", name_tok)
        if name in self.poly_names:
            self.error(f"duplicate polynomial name {name!r}", name_tok)
        if name in self.var_index or name in self.group_names:
            self.error(f"polynomial name {name!r} collides with a variable", name_tok)
        self.expect("sym", "=")
        p = self.parse_expr()
        self.expect("sym", ";")
        self.poly_names.append(name)
        self.polys.append(p)

    def parse_expr(self) -> Polynomial:
        negate = False
        if self.peek()[:2] == ("sym", "-"):
            self.next()
            negate = True
        elif self.peek()[:2] == ("sym", "+"):
            self.next()
        p = self.parse_term()
        if negate:
            p = -p
        while self.peek()[:2] in (("sym", "+"), ("sym", "-")):
            op = self.next()[1]
            q = self.parse_term()
            p = p + q if op == "+" else p - q
        return p

    def parse_term(self) -> Polynomial:
        p = self.parse_factor()
        while self.peek()[:2] == ("sym", "*"):
            self.next()
            p = p * self.parse_factor()
        return p

    def parse_factor(self) -> Polynomial:
        p = self.parse_atom()
        if self.peek()[:2] == ("sym", "^"):
            self.next()
            num_tok = self.expect("num")
            d = num_tok[1].real
            if num_tok[1].imag != 0 or d != int(d) or d < 0:
                self.error("exponent must be a nonnegative integer", num_tok)
            p = p ** int(d)
        return p

    def parse_atom(self) -> Polynomial:
        tok = self.peek()
        if tok[0] == "num":
            self.next()
            return Polynomial.constant(self.grouping, tok[1])
        if tok[0] == "id":
            self.next()
            v = self.var_index.get(tok[1])
            if v is None:
                self.error(f"undeclared identifier {tok[1]!r}", tok)
            return Polynomial.variable(self.grouping, v)
        if tok[:2] == ("sym", "("):
            self.next()
            p = self.parse_expr()
            self.expect("sym", ")")
            return p
        self.error(f"expected a number, variable, or '(', found {tok[1]!r}", tok)


def parse_system(text: str) -> SystemDocument:
    return _Parser(text).parse()


def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _fmt_coeff(c: complex) -> str:
    if c.imag == 0:
        return _fmt_real(c.real)
    return f"({_fmt_real(c.real)}+{_fmt_real(c.imag)}i)".replace("+-", "-")


def format_system(doc: SystemDocument) -> str:
    """Render a document back to grammar-conformant source text."""
    lines = []
    for name, size in zip(doc.group_names, doc.grouping.sizes):
        lines.append(f"group {name};" if size == 1 else f"group {name}[{size}];")
    names = doc.grouping.names
    for pname, p in zip(doc.poly_names, doc.system.polys):
        if not p.terms:
            lines.append(f"{pname} = 0;")
            continue
        parts = []
        for e in sorted(p.terms, key=lambda e: (-sum(e), tuple(-x for x in e))):
            c = p.terms[e]
            factors = [_fmt_coeff(c)]
            for v, d in enumerate(e):
                if d == 1:
                    factors.append(names[v])
                elif d > 1:
                    factors.append(f"{names[v]}^{d}")
            parts.append("*".join(factors))
        lines.append(f"{pname} = {' + '.join(parts)};".replace("+ -", "- "))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Witness archive


@dataclass
class WitnessArchive:
    """Serializable witness data: system source, slice bank, per-e points."""

    seed: int
    groups: list  # [{"name": str, "size": int}, ...]
    system: str  # source text in the system grammar
    slices: dict  # group name -> list of coefficient rows [const, c_1, ..., c_n] interleaved re/im
    witness: dict  # MultiIndex tuple -> list of points (complex vectors)
    version: int = 1


def _num(x: float):
    """17-significant-digit float for serialization (round-trips bit-exactly)."""
    return format(float(x), ".17g")


def _encode(obj, indent=0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {_encode(v, indent + 1)}' for k, v in obj.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(
                str(v) if isinstance(v, int) else _num(v) for v in obj
            ) + "]"
        inner = ",\n".join(f"{pad}  {_encode(v, indent + 1)}" for v in obj)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    return json.dumps(obj)


def _point_to_list(p: np.ndarray) -> list:
    out = []
    for z in np.asarray(p, dtype=complex):
        out.append(float(z.real))
        out.append(float(z.imag))
    return out


def _list_to_point(vals: list, nvars: int, where: str) -> np.ndarray:
    if len(vals) != 2 * nvars:
        raise ValueError(
            f"{where}: point has {len(vals)} reals, expected {2 * nvars}"
        )
    arr = np.asarray(vals, dtype=float)
    return arr[0::2] + 1j * arr[1::2]


def save_witness(archive: WitnessArchive, path: str) -> None:
    doc = {
        "version": archive.version,
        "seed": archive.seed,
        "groups": archive.groups,
        "system": archive.system,
        "slices": {
            str(gname): [[float(x) for x in row] for row in rows]
            for gname, rows in archive.slices.items()
        },
        "witness": {
            ",".join(str(int(x)) for x in e): [
                _point_to_list(p) for p in pts
            ]
            for e, pts in archive.witness.items()
        },
    }
    with open(path, "w") as fh:
        fh.write(_encode(doc) + "\n")


def load_witness(path: str) -> WitnessArchive:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("version") != 1:
        raise ValueError(f"unsupported witness archive version: {doc.get('version')!r}")
    for key in ("seed", "groups", "system", "slices", "witness"):
        if key not in doc:
            raise ValueError(f"truncated witness archive: missing field {key!r}")
    nvars = sum(g["size"] for g in doc["groups"])
    witness = {}
    for estr, pts in doc["witness"].items():
        e = tuple(int(x) for x in estr.split(","))
        if len(e) != len(doc["groups"]):
            raise ValueError(f"witness key {estr!r} arity mismatch with groups")
        witness[e] = [_list_to_point(p, nvars, f"witness[{estr}]") for p in pts]
    return WitnessArchive(
        seed=doc["seed"],
        groups=doc["groups"],
        system=doc["system"],
        slices={k: [list(map(float, row)) for row in v] for k, v in doc["slices"].items()},
        witness=witness,
        version=1,
    )
