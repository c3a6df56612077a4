"""Delexicalized tree fragments with numbered variable slots.

A fragment is a labeled tree whose leaves are variables ``x0..xk``. A
variable is stored as a plain ``int`` child, so ``(VB x0)`` is
``Frag("VB", (0,))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .treebank import TreeParseError, _ATOM, _WS

__all__ = ["Frag", "parse_fragment"]


@dataclass(frozen=True)
class Frag:
    label: str
    children: tuple  # of Frag | int

    def serialize(self) -> str:
        parts: list[str] = []
        _write(self, parts)
        return "".join(parts)

    def variables(self) -> list[int]:
        """Variable indices in left-to-right frontier order."""
        out: list[int] = []
        _collect_vars(self, out)
        return out

    def __str__(self):
        return self.serialize()


def _write(f: Frag, out: list[str]) -> None:
    out.append("(")
    out.append(f.label)
    for c in f.children:
        out.append(" ")
        if isinstance(c, int):
            out.append(f"x{c}")
        else:
            _write(c, out)
    out.append(")")


def _collect_vars(f: Frag, out: list[int]) -> None:
    for c in f.children:
        if isinstance(c, int):
            out.append(c)
        else:
            _collect_vars(c, out)


_VAR = re.compile(r"^x(\d+)$")


def parse_fragment(text: str) -> Frag:
    """Parse the canonical fragment form back into a :class:`Frag`."""
    frag, pos = _parse(text, _WS.match(text).end())
    pos = _WS.match(text, pos).end()
    if pos != len(text):
        raise TreeParseError("trailing content after fragment", pos)
    return frag


def _parse(text: str, pos: int):
    if pos >= len(text) or text[pos] != "(":
        raise TreeParseError("expected '('", pos)
    pos = _WS.match(text, pos + 1).end()
    m = _ATOM.match(text, pos)
    if m is None:
        raise TreeParseError("empty fragment label", pos)
    label = m.group()
    pos = m.end()
    kids: list = []
    while True:
        pos = _WS.match(text, pos).end()
        if pos >= len(text):
            raise TreeParseError("unbalanced parentheses in fragment", len(text))
        if text[pos] == ")":
            if not kids:
                raise TreeParseError(f"fragment node {label!r} is empty", pos)
            return Frag(label, tuple(kids)), pos + 1
        if text[pos] == "(":
            child, pos = _parse(text, pos)
            kids.append(child)
        else:
            m = _ATOM.match(text, pos)
            vm = _VAR.match(m.group())
            if vm is None:
                raise TreeParseError(f"expected variable, got {m.group()!r}", pos)
            kids.append(int(vm.group(1)))
            pos = m.end()
