"""File formats: Newick/JSON trees and CSV/TSV similarity matrices."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

from .core import ClusterTree, ElementSet, SimilarityMatrix, fraction_str, matrix_from_entries, to_fraction

_DELIMS = set("(),;")


def _weight_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else fraction_str(q)


def to_newick(T: ClusterTree, weights: dict[int, Fraction] | None = None) -> str:
    """Newick string; internal weights are written as ``h=<value>`` node labels."""
    labels = T.elements.labels

    def emit(v):
        ch = T.children[v]
        if ch is None:
            return labels[T.leaf_element[v]]
        s = f"({emit(ch[0])},{emit(ch[1])})"
        if weights is not None and v in weights:
            s += f"h={_weight_str(weights[v])}"
        return s

    return emit(T.root) + ";"


def _tokenize(text: str):
    buf = []
    for ch in text:
        if ch in _DELIMS:
            if buf:
                yield "".join(buf).strip()
                buf = []
            yield ch
        elif ch.isspace():
            continue
        else:
            buf.append(ch)
    if buf:
        yield "".join(buf).strip()


def parse_newick(text: str, elements: ElementSet | None = None) -> tuple[ClusterTree, dict[int, Fraction] | None]:
    """Parse a rooted binary Newick string.

    Leaf labels name elements. Internal labels of the form ``h=<rational>`` are
    read as weights; branch lengths (``:x``) are ignored. If ``elements`` is not
    given, labels are taken in order of appearance.
    """
    tokens = list(_tokenize(text.strip()))
    if not tokens or tokens[-1] != ";":
        raise ValueError("Newick string must end with ';'")
    tokens.pop()
    pos = 0
    weights_by_nested: list = []

    def label_of(tok: str) -> str:
        return tok.split(":", 1)[0]

    def parse():
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of Newick string")
        tok = tokens[pos]
        if tok == "(":
            pos += 1
            parts = [parse()]
            while pos < len(tokens) and tokens[pos] == ",":
                pos += 1
                parts.append(parse())
            if pos >= len(tokens) or tokens[pos] != ")":
                raise ValueError("unbalanced parentheses in Newick string")
            pos += 1
            if len(parts) != 2:
                raise ValueError(f"cluster trees are binary; found a node with {len(parts)} children")
            node = (parts[0], parts[1])
            if pos < len(tokens) and tokens[pos] not in _DELIMS:
                lab = label_of(tokens[pos])
                pos += 1
                if lab:
                    if not lab.startswith("h="):
                        raise ValueError(f"unsupported internal label {lab!r}; expected h=<weight>")
                    weights_by_nested.append((node, to_fraction(lab[2:])))
            return node
        if tok in _DELIMS:
            raise ValueError(f"unexpected {tok!r} in Newick string")
        pos += 1
        lab = label_of(tok)
        if not lab:
            raise ValueError("empty leaf label")
        return lab

    nested = parse()
    if pos != len(tokens):
        raise ValueError("trailing tokens after Newick tree")

    if elements is None:
        order: list[str] = []

        def collect(x):
            if isinstance(x, tuple):
                collect(x[0])
                collect(x[1])
            else:
                order.append(x)

        collect(nested)
        elements = ElementSet(tuple(order))

    # Rebuild so internal node ids are known for each nested subtuple.
    children: list = []
    leaf_element: list = []
    node_id: dict[int, int] = {}

    def build(x):
        if isinstance(x, tuple):
            a, b = build(x[0]), build(x[1])
            children.append((a, b))
            leaf_element.append(None)
            node_id[id(x)] = len(children) - 1
        else:
            children.append(None)
            leaf_element.append(elements.index(x))
        return len(children) - 1

    root = build(nested)
    T = ClusterTree(elements, children, leaf_element, root)
    weights = {node_id[id(node)]: w for node, w in weights_by_nested} if weights_by_nested else None
    return T, weights


def tree_to_json(T: ClusterTree, weights: dict[int, Fraction] | None = None) -> dict:
    nodes = []
    for v, ch in enumerate(T.children):
        if ch is None:
            nodes.append({"id": v, "leaf": T.elements.labels[T.leaf_element[v]]})
        else:
            rec = {"id": v, "children": list(ch)}
            if weights is not None and v in weights:
                rec["h"] = fraction_str(weights[v])
            nodes.append(rec)
    return {"labels": list(T.elements.labels), "root": T.root, "nodes": nodes}


def tree_from_json(obj: dict, elements: ElementSet | None = None) -> tuple[ClusterTree, dict[int, Fraction] | None]:
    if elements is None:
        elements = ElementSet(tuple(obj["labels"]))
    nodes = sorted(obj["nodes"], key=lambda r: r["id"])
    if [r["id"] for r in nodes] != list(range(len(nodes))):
        raise ValueError("node ids must be 0..k-1")
    children, leaf_element, weights = [], [], {}
    for r in nodes:
        if "leaf" in r:
            children.append(None)
            leaf_element.append(elements.index(r["leaf"]))
        else:
            ch = r.get("children")
            if not ch or len(ch) != 2:
                raise ValueError(f"node {r['id']} must have exactly two children")
            children.append((int(ch[0]), int(ch[1])))
            leaf_element.append(None)
            if "h" in r:
                weights[r["id"]] = to_fraction(r["h"])
    T = ClusterTree(elements, children, leaf_element, int(obj["root"]))
    return T, (weights or None)


def read_tree(source: str, elements: ElementSet | None = None):
    """Read a tree from a Newick string, a ``.nwk``/``.json`` file, or inline JSON."""
    text = source
    p = Path(source)
    if not source.lstrip().startswith(("(", "{")) and p.exists():
        text = p.read_text()
    text = text.strip()
    if text.startswith("{"):
        return tree_from_json(json.loads(text), elements)
    if not text.endswith(";"):
        text += ";"
    return parse_newick(text, elements)


# Matrices -----------------------------------------------------------------


def parse_matrix_csv(text: str) -> SimilarityMatrix:
    """Full-matrix CSV: header ``labels,a,b,...`` then one row per label."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError("empty matrix file")
    header = [c.strip() for c in rows[0]]
    if header[0] != "labels":
        raise ValueError("CSV matrix must start with a 'labels' header cell")
    labels = header[1:]
    n = len(labels)
    if len(rows) - 1 != n:
        raise ValueError(f"expected {n} data rows, found {len(rows) - 1}")
    entries = []
    for i, r in enumerate(rows[1:]):
        r = [c.strip() for c in r]
        if r[0] != labels[i]:
            raise ValueError(f"row {i + 1} label {r[0]!r} does not match header {labels[i]!r}")
        if len(r) != n + 1:
            raise ValueError(f"row {r[0]!r} has {len(r) - 1} values, expected {n}")
        for j in range(n):
            if i != j:
                entries.append((labels[i], labels[j], r[j + 1]))
    return matrix_from_entries(labels, entries)


def parse_matrix_tsv(text: str) -> SimilarityMatrix:
    """Edge list ``label1<TAB>label2<TAB>value``; labels in order of appearance."""
    labels: list[str] = []
    seen = set()
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = [p.strip() for p in line.split("\t")]
        if len(parts) == 2:
            parts.append("0")
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 3 tab-separated fields")
        a, b, v = parts
        for lab in (a, b):
            if lab not in seen:
                seen.add(lab)
                labels.append(lab)
        entries.append((a, b, v))
    if not labels:
        raise ValueError("empty edge list")
    return matrix_from_entries(labels, entries)


def read_matrix(path: str | Path) -> SimilarityMatrix:
    text = Path(path).read_text()
    first = text.lstrip().split("\n", 1)[0]
    if first.startswith("labels,"):
        return parse_matrix_csv(text)
    return parse_matrix_tsv(text)


def matrix_to_csv(M: SimilarityMatrix) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    labels = M.elements.labels
    w.writerow(["labels", *labels])
    for i, lab in enumerate(labels):
        w.writerow([lab, *("-" if i == j else _weight_str(M.value(i, j)) for j in range(M.n))])
    return out.getvalue()
