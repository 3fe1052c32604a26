"""Tokenizer for the declaration language."""
from __future__ import annotations

from dataclasses import dataclass


class ParseError(Exception):
    def __init__(self, msg: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {msg}")


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT NUM PUNCT EOF
    text: str
    line: int


PUNCT = ["==>", ":=", "->", "=>", "(", ")", "{", "}", ":", ";", ",", ".", "~", "|"]


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, n, line = 0, len(src), 1
    while i < n:
        c = src[i]
        if c == "\n":
            line += 1
            i += 1
            continue
        if c.isspace():
            i += 1
            continue
        if src.startswith("(*", i):
            depth, i = 1, i + 2
            while i < n and depth:
                if src.startswith("(*", i):
                    depth += 1
                    i += 2
                elif src.startswith("*)", i):
                    depth -= 1
                    i += 2
                else:
                    if src[i] == "\n":
                        line += 1
                    i += 1
            if depth:
                raise ParseError("unterminated comment", line)
            continue
        if src.startswith("--", i):
            while i < n and src[i] != "\n":
                i += 1
            continue
        for p in PUNCT:
            if src.startswith(p, i):
                toks.append(Token("PUNCT", p, line))
                i += len(p)
                break
        else:
            if c.isdigit():
                j = i
                while j < n and src[j].isdigit():
                    j += 1
                toks.append(Token("NUM", src[i:j], line))
                i = j
            elif c.isalpha() or c == "_":
                j = i
                while j < n and (src[j].isalnum() or src[j] in "_'"):
                    j += 1
                toks.append(Token("IDENT", src[i:j], line))
                i = j
            else:
                raise ParseError(f"unexpected character {c!r}", line)
    toks.append(Token("EOF", "", line))
    return toks
