"""Parser and pretty-printer for the diagram description language.

Grammar (EBNF)::

    program  = { statement } ;
    statement = "type" NAME { "," NAME } ";"
              | "box" NAME ":" objects "->" objects ";"
              | "diag" NAME "=" expr [ ";" ] ;
    objects  = "I" | NAME { ("*" | "⊗") NAME } ;
    expr     = tensor { ";" tensor } ;
    tensor   = atom { ("*" | "⊗") atom } ;
    atom     = "(" expr ")"
             | "id" "(" [ NAME { "," NAME } ] ")" | "swap" "(" NAME "," NAME ")"
             | "copy" "(" NAME ")" | "del" "(" NAME ")"
             | NAME ;

``id_X``, ``copy_X`` and ``del_X`` abbreviate the generator on a single type.
A ``;`` followed by a keyword or end of input ends a ``diag`` statement.
``#`` starts a comment running to the end of the line. ``→`` may replace
``->``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .diagram import Diagram
from .errors import DSLError
from .hypergraph import BoxSpec, Signature
from .terms import Copy, Del, Id, Par, Ref, Seq, Swap, Term, build_from_term, diagram_to_term, to_text

KEYWORDS = {"type", "box", "diag"}
_TOKEN = re.compile(
    r"""(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>\#[^\n]*)
      |(?P<arrow>->|→)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)
      |(?P<punct>[;:,()=*⊗])""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    line, start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DSLError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            tok = m.group()
            if tok == "⊗":
                tok = "*"
            elif tok == "→":
                tok = "->"
            out.append(Token(kind, tok, line, pos - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


@dataclass
class Program:
    signature: Signature
    diagrams: dict[str, Diagram] = field(default_factory=dict)
    terms: dict[str, Term] = field(default_factory=dict)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise DSLError(msg, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind == "eof":
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def name(self) -> Token:
        if self.tok.kind != "name":
            self.error(f"expected a name, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def at_keyword(self) -> bool:
        return self.tok.kind == "eof" or (self.tok.kind == "name" and self.tok.text in KEYWORDS)

    # -- terms --
    def expr(self) -> Term:
        start = self.tok
        parts = [self.tensor()]
        while self.tok.text == ";" and self.tok.kind == "punct":
            nxt = self.peek()
            if nxt.kind == "eof" or (nxt.kind == "name" and nxt.text in KEYWORDS):
                break
            self.i += 1
            parts.append(self.tensor())
        return parts[0] if len(parts) == 1 else Seq(tuple(parts), (start.line, start.col))

    def tensor(self) -> Term:
        start = self.tok
        parts = [self.atom()]
        while self.tok.text == "*":
            self.i += 1
            parts.append(self.atom())
        return parts[0] if len(parts) == 1 else Par(tuple(parts), (start.line, start.col))

    def atom(self) -> Term:
        t = self.tok
        loc = (t.line, t.col)
        if t.text == "(" and t.kind == "punct":
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        if t.kind != "name" or t.text in KEYWORDS:
            self.error(f"expected a term, found {t.text or 'end of input'!r}")
        self.i += 1
        word = t.text
        if word in ("id", "swap", "copy", "del") and self.tok.text == "(":
            self.i += 1
            args: list[str] = []
            if self.tok.text != ")":
                args.append(self.name().text)
                while self.tok.text == ",":
                    self.i += 1
                    args.append(self.name().text)
            self.expect(")")
            want = {"swap": 2, "copy": 1, "del": 1}.get(word)
            if want is not None and len(args) != want:
                raise DSLError(f"{word} takes {want} type argument(s), got {len(args)}", *loc)
            if word == "id":
                return Id(tuple(args), loc)
            if word == "swap":
                return Swap(args[0], args[1], loc)
            return (Copy if word == "copy" else Del)(args[0], loc)
        for prefix, make in (("id_", lambda x: Id((x,), loc)), ("copy_", lambda x: Copy(x, loc)), ("del_", lambda x: Del(x, loc))):
            if word.startswith(prefix) and len(word) > len(prefix):
                return make(word[len(prefix):])
        return Ref(word, loc)

    # -- statements --
    def objects(self) -> tuple[str, ...]:
        if self.tok.text == "I":
            self.i += 1
            return ()
        out = [self.name().text]
        while self.tok.text == "*":
            self.i += 1
            out.append(self.name().text)
        return tuple(out)

    def program(self) -> Program:
        types: list[str] = []
        boxes: list[BoxSpec] = []
        sig = Signature()
        prog = Program(sig)
        while self.tok.kind != "eof":
            kw = self.name()
            if kw.text == "type":
                while True:
                    n = self.name()
                    if n.text == "I" or n.text in types:
                        self.error(f"invalid or duplicate type name {n.text!r}", n)
                    types.append(n.text)
                    if self.tok.text != ",":
                        break
                    self.i += 1
                self.expect(";")
                sig = Signature(tuple(types), tuple(boxes))
            elif kw.text == "box":
                n = self.name()
                self.expect(":")
                ins = self.objects()
                self.expect("->")
                outs = self.objects()
                self.expect(";")
                if any(b.name == n.text for b in boxes) or n.text in KEYWORDS:
                    self.error(f"duplicate box name {n.text!r}", n)
                for t in ins + outs:
                    if t not in types:
                        self.error(f"unknown type {t!r} in box {n.text!r}", n)
                boxes.append(BoxSpec(n.text, ins, outs))
                sig = Signature(tuple(types), tuple(boxes))
            elif kw.text == "diag":
                n = self.name()
                self.expect("=")
                term = self.expr()
                if self.tok.text == ";":
                    self.i += 1
                if not self.at_keyword():
                    self.error(f"unexpected {self.tok.text!r} after diagram {n.text!r}")
                if n.text in prog.diagrams:
                    self.error(f"duplicate diagram name {n.text!r}", n)
                prog.diagrams[n.text] = build_from_term(term, sig, prog.diagrams)
                prog.terms[n.text] = term
            else:
                self.error(f"expected 'type', 'box' or 'diag', found {kw.text!r}", kw)
        prog.signature = sig
        # diagrams built before later declarations still refer to a prefix
        # signature; rebind so every diagram carries the final one
        prog.diagrams = {k: _rebind(d, sig) for k, d in prog.diagrams.items()}
        return prog


def _rebind(d: Diagram, sig: Signature) -> Diagram:
    from .hypergraph import Cospan, Hypergraph

    g = d.graph
    return Diagram(Cospan(Hypergraph(g.wire_labels, g.boxes, sig), d.cospan.left, d.cospan.right))


def parse(text: str) -> Program:
    """Parse a DSL source into its signature and named, normalized diagrams."""
    return _Parser(text).program()


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.expr()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}")
    return t


def format_signature(sig: Signature) -> str:
    lines = []
    if sig.types:
        lines.append(f"type {', '.join(sig.types)};")
    for b in sig.boxes:
        ins = " * ".join(b.inputs) or "I"
        outs = " * ".join(b.outputs) or "I"
        lines.append(f"box {b.name} : {ins} -> {outs};")
    return "\n".join(lines)


def format_program(sig: Signature, diagrams: dict[str, Diagram]) -> str:
    """Render a signature and diagrams back to DSL source."""
    out = [format_signature(sig)]
    for name, d in diagrams.items():
        out.append(f"diag {name} = {to_text(diagram_to_term(d))};")
    return "\n".join(out) + "\n"
