"""Tokenizer for the SystemVerilog subset."""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Diagnostic, DiagnosticError, Loc, err

KEYWORDS = {
    "module", "endmodule", "input", "output", "inout", "logic", "wire",
    "reg", "bit", "parameter", "localparam", "assign", "always_comb",
    "always_ff", "always", "posedge", "negedge", "begin", "end", "if",
    "else", "case", "endcase", "default", "generate", "endgenerate",
    "genvar", "for", "typedef", "enum", "signed", "unsigned", "int",
    "integer",
}

# recognized so we can refuse them by name instead of misparsing
UNSUPPORTED_KEYWORDS = {
    "interface", "endinterface", "class", "endclass", "package",
    "endpackage", "import", "struct", "union", "initial", "final", "task",
    "function", "endtask", "endfunction", "assert", "property", "sequence",
    "covergroup", "modport", "virtual", "rand", "randc", "program",
    "specify", "primitive", "defparam", "real", "string", "event", "wand",
    "wor", "tri", "trireg", "supply0", "supply1", "casez", "casex",
    "unique", "priority", "inside", "packed", "byte", "shortint",
    "longint", "time", "var", "void", "return", "while", "do", "repeat",
    "forever", "fork", "join", "wait", "force", "release", "deassign",
    "alias", "checker", "config", "extern",
}

PUNCT = [
    "<<<", ">>>", "===", "!==",
    "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "**", "+:", "-:",
    "++", "--", "+=", "-=", "*=", "/=", "~^", "^~", "~&", "~|", "::",
    "(", ")", "[", "]", "{", "}", ";", ",", ".", ":", "?", "@", "#",
    "+", "-", "*", "/", "%", "&", "|", "^", "~", "!", "<", ">", "=",
]


@dataclass(frozen=True)
class Token:
    kind: str  # "id" | "kw" | "num" | "punct" | "sysid" | "eof"
    text: str
    loc: Loc
    # parsed literal payload for "num": (value, width|None, signed)
    num: tuple[int, int | None, bool] | None = None


def _isidstart(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _isid(ch: str) -> bool:
    return ch.isalnum() or ch in "_$"


def tokenize(text: str, path: str) -> list[Token]:
    toks: list[Token] = []
    diags: list[Diagnostic] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def loc() -> Loc:
        return Loc(path, line, col)

    def advance(k: int):
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            advance((j - i) if j >= 0 else (n - i))
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                diags.append(err(loc(), "unterminated block comment"))
                break
            advance(j + 2 - i)
            continue
        if ch == "`":
            diags.append(err(loc(), "unsupported construct: preprocessor directive"))
            j = text.find("\n", i)
            advance((j - i) if j >= 0 else (n - i))
            continue
        if ch == "$":
            start = loc()
            j = i + 1
            while j < n and _isid(text[j]):
                j += 1
            name = text[i:j]
            toks.append(Token("sysid", name, start))
            advance(j - i)
            continue
        if _isidstart(ch):
            start = loc()
            j = i
            while j < n and _isid(text[j]):
                j += 1
            word = text[i:j]
            if word in UNSUPPORTED_KEYWORDS:
                diags.append(
                    err(start, f"unsupported construct: '{word}'", "unsupported")
                )
                advance(j - i)
                continue
            kind = "kw" if word in KEYWORDS else "id"
            toks.append(Token(kind, word, start))
            advance(j - i)
            continue
        if ch.isdigit() or (ch == "'" and i + 1 < n):
            tok, length, diag = _lex_number(text, i, loc())
            if diag is not None:
                diags.append(diag)
                advance(length)
                continue
            toks.append(tok)
            advance(length)
            continue
        matched = False
        for p in PUNCT:
            if text.startswith(p, i):
                toks.append(Token("punct", p, loc()))
                advance(len(p))
                matched = True
                break
        if not matched:
            diags.append(err(loc(), f"stray character {ch!r}"))
            advance(1)
    if diags:
        raise DiagnosticError(diags)
    toks.append(Token("eof", "", loc()))
    return toks


_BASES = {"b": 2, "o": 8, "d": 10, "h": 16}


def _lex_number(text: str, i: int, start: Loc):
    n = len(text)
    j = i
    size: int | None = None
    if text[j].isdigit():
        k = j
        while k < n and (text[k].isdigit() or text[k] == "_"):
            k += 1
        if k < n and text[k] == "'":
            size = int(text[j:k].replace("_", ""))
            j = k
        else:
            value = int(text[j:k].replace("_", ""))
            # plain decimal: unsized, signed
            return Token("num", text[i:k], start, (value, None, True)), k - i, None

    # based literal or fill
    assert text[j] == "'"
    j += 1
    if j < n and text[j] in "01" and not (j + 1 < n and _isid(text[j + 1])):
        # '0 / '1 fill
        if size is not None:
            return None, j + 1 - i, err(start, "sized fill literal not supported")
        bit = int(text[j])
        return Token("fill", text[i:j + 1], start, (bit, None, False)), j + 1 - i, None
    signed = False
    if j < n and text[j] in "sS":
        signed = True
        j += 1
    if j >= n or text[j].lower() not in _BASES:
        return None, j - i, err(start, "malformed literal")
    base = _BASES[text[j].lower()]
    j += 1
    k = j
    digits = ""
    while k < n and (text[k].isalnum() or text[k] == "_" or text[k] == "?"):
        digits += text[k]
        k += 1
    digits = digits.replace("_", "")
    if not digits:
        return None, k - i, err(start, "malformed literal")
    if any(c in "xXzZ?" for c in digits):
        return None, k - i, err(
            start, "unsupported construct: x/z literal (two-valued subset)"
        )
    try:
        value = int(digits, base)
    except ValueError:
        return None, k - i, err(start, f"bad digits for base {base}")
    if size is not None:
        value &= (1 << size) - 1
        return Token("num", text[i:k], start, (value, size, signed)), k - i, None
    return Token("num", text[i:k], start, (value, None, signed)), k - i, None
