"""Text file formats. Vertex ids are 1-based on disk, 0-based in memory.

Hypergraph:  line 1 "hyg <n> <m> <k>", then m lines of k sorted vertex ids.
XOR:         line 1 "xor <n> <m> <k>", then m lines "<+1|-1> v1 .. vk".
"""

from __future__ import annotations

from .core import Hypergraph, KcertError, XorInstance


class ParseError(KcertError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _parse_header(line: str, tag: str) -> tuple[int, int, int]:
    parts = line.split()
    if len(parts) != 4 or parts[0] != tag:
        raise ParseError(1, f"expected header '{tag} <n> <m> <k>', got {line!r}")
    try:
        n, m, k = int(parts[1]), int(parts[2]), int(parts[3])
    except ValueError:
        raise ParseError(1, f"header fields must be integers, got {line!r}") from None
    if n < 1 or m < 0 or k < 2:
        raise ParseError(1, f"header values out of range: n={n}, m={m}, k={k}")
    return n, m, k


def _parse_vertices(tokens: list[str], n: int, k: int, lineno: int) -> tuple[int, ...]:
    if len(tokens) != k:
        raise ParseError(lineno, f"expected {k} vertex ids, got {len(tokens)}")
    try:
        verts = [int(t) for t in tokens]
    except ValueError:
        raise ParseError(lineno, f"vertex ids must be integers: {tokens!r}") from None
    for v in verts:
        if not 1 <= v <= n:
            raise ParseError(lineno, f"vertex {v} out of range 1..{n}")
    if len(set(verts)) != k:
        raise ParseError(lineno, f"duplicate vertex within a clause: {tokens!r}")
    if verts != sorted(verts):
        raise ParseError(lineno, f"vertex ids must be sorted ascending: {tokens!r}")
    return tuple(v - 1 for v in verts)


def _data_lines(text: str, m: int, tag: str) -> list[tuple[int, str]]:
    raw = text.split("\n")
    if raw and raw[-1] == "":
        raw.pop()
    if len(raw) != m + 1:
        raise ParseError(len(raw), f"{tag} file must have {m + 1} lines, found {len(raw)}")
    return [(i + 2, line) for i, line in enumerate(raw[1:])]


def parse_hypergraph(text: str) -> Hypergraph:
    first = text.split("\n", 1)[0]
    n, m, k = _parse_header(first, "hyg")
    edges = []
    for lineno, line in _data_lines(text, m, "hyg"):
        edges.append(_parse_vertices(line.split(), n, k, lineno))
    return Hypergraph(n=n, k=k, edges=tuple(edges))


def parse_xor(text: str) -> XorInstance:
    first = text.split("\n", 1)[0]
    n, m, k = _parse_header(first, "xor")
    edges, signs = [], []
    for lineno, line in _data_lines(text, m, "xor"):
        tokens = line.split()
        if not tokens:
            raise ParseError(lineno, "empty clause line")
        if tokens[0] not in ("+1", "-1"):
            raise ParseError(lineno, f"sign must be +1 or -1, got {tokens[0]!r}")
        signs.append(1 if tokens[0] == "+1" else -1)
        edges.append(_parse_vertices(tokens[1:], n, k, lineno))
    return XorInstance(hypergraph=Hypergraph(n=n, k=k, edges=tuple(edges)),
                       signs=tuple(signs))


def serialize_hypergraph(h: Hypergraph) -> str:
    lines = [f"hyg {h.n} {h.m} {h.k}"]
    for edge in h.edges:
        lines.append(" ".join(str(v + 1) for v in edge))
    return "\n".join(lines) + "\n"


def serialize_xor(inst: XorInstance) -> str:
    h = inst.hypergraph
    lines = [f"xor {h.n} {h.m} {h.k}"]
    for sign, edge in zip(inst.signs, h.edges):
        s = "+1" if sign == 1 else "-1"
        lines.append(s + " " + " ".join(str(v + 1) for v in edge))
    return "\n".join(lines) + "\n"


def load_hypergraph(path) -> Hypergraph:
    with open(path, "r", encoding="ascii") as fh:
        return parse_hypergraph(fh.read())


def load_xor(path) -> XorInstance:
    with open(path, "r", encoding="ascii") as fh:
        return parse_xor(fh.read())
