"""Element sets, exact similarity matrices and cluster trees.

Everything here is immutable after construction. Similarities are stored as
:class:`fractions.Fraction` so that objective values can be compared exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

Rational = Union[int, str, Fraction]

# A nested split description: a label (leaf) or a pair of nested descriptions.
Nested = Union[str, int, tuple]


def to_fraction(value: Rational) -> Fraction:
    """Parse an exact rational. Decimal strings are read exactly ("0.25" -> 1/4)."""
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a string or Fraction")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {value!r}") from exc


def fraction_str(q: Fraction) -> str:
    """Serialize a rational as ``p/q`` (always with a denominator)."""
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class ElementSet:
    labels: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        if not labels:
            raise ValueError("element set must be nonempty")
        if len(set(labels)) != len(labels):
            raise ValueError("element labels must be unique")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    @classmethod
    def of_size(cls, n: int) -> "ElementSet":
        return cls(tuple(str(i) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValueError(f"unknown element label: {label!r}") from None

    def subset(self, indices: Iterable[int]) -> "ElementSet":
        return ElementSet(tuple(self.labels[i] for i in sorted(indices)))


class SimilarityMatrix:
    """Symmetric nonnegative similarities on distinct pairs of an element set.

    The diagonal is never stored; asking for ``value(i, i)`` is an error.
    """

    __slots__ = ("elements", "_rows")

    def __init__(self, elements: ElementSet, rows: Sequence[Sequence[Fraction | None]]):
        n = elements.n
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError("row table does not match element count")
        clean = []
        for i in range(n):
            row = []
            for j in range(n):
                if i == j:
                    row.append(None)
                    continue
                v = to_fraction(rows[i][j])
                if v < 0:
                    raise ValueError(f"negative similarity at ({elements.labels[i]}, {elements.labels[j]})")
                if j < i and v != clean[j][i]:
                    raise ValueError(
                        f"asymmetric entry for ({elements.labels[j]}, {elements.labels[i]})"
                    )
                row.append(v)
            clean.append(tuple(row))
        self.elements = elements
        self._rows = tuple(clean)

    @property
    def n(self) -> int:
        return self.elements.n

    def value(self, i: int, j: int) -> Fraction:
        if i == j:
            raise ValueError("the diagonal of a similarity matrix is undefined")
        return self._rows[i][j]

    __call__ = value

    def row(self, i: int) -> tuple:
        return self._rows[i]

    def pairs(self) -> Iterator[tuple[int, int, Fraction]]:
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                yield i, j, self._rows[i][j]

    def max_value(self) -> Fraction:
        return max((v for _, _, v in self.pairs()), default=Fraction(0))

    def scaled(self, factor: Rational) -> "SimilarityMatrix":
        factor = to_fraction(factor)
        if factor < 0:
            raise ValueError("scale factor must be nonnegative")
        n = self.n
        rows = [[None if i == j else self._rows[i][j] * factor for j in range(n)] for i in range(n)]
        return SimilarityMatrix(self.elements, rows)

    @classmethod
    def uniform(cls, n: int, value: Rational = 1, elements: ElementSet | None = None) -> "SimilarityMatrix":
        elements = elements or ElementSet.of_size(n)
        v = to_fraction(value)
        return cls(elements, [[None if i == j else v for j in range(n)] for i in range(n)])

    @classmethod
    def from_function(cls, elements: ElementSet, fn) -> "SimilarityMatrix":
        n = elements.n
        rows = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                rows[i][j] = rows[j][i] = to_fraction(fn(i, j))
        return cls(elements, rows)

    def __eq__(self, other):
        if not isinstance(other, SimilarityMatrix):
            return NotImplemented
        return self.elements == other.elements and self._rows == other._rows

    def __hash__(self):
        return hash((self.elements.labels, self._rows))

    def __repr__(self):
        return f"SimilarityMatrix(n={self.n}, labels={list(self.elements.labels)})"


def matrix_from_entries(labels: Sequence[str], entries: Iterable[tuple[str, str, Rational]]) -> SimilarityMatrix:
    """Build a matrix from ``(label, label, value)`` triples; missing pairs are 0."""
    elements = ElementSet(tuple(labels))
    n = elements.n
    seen: dict[tuple[int, int], Fraction] = {}
    for a, b, v in entries:
        i, j = elements.index(a), elements.index(b)
        if i == j:
            raise ValueError(f"diagonal entry for {a!r} is not allowed")
        q = to_fraction(v)
        if q < 0:
            raise ValueError(f"negative similarity for ({a}, {b})")
        key = (min(i, j), max(i, j))
        if key in seen and seen[key] != q:
            raise ValueError(f"conflicting symmetric entry for ({a}, {b}): {seen[key]} vs {q}")
        seen[key] = q
    rows = [[None if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    for (i, j), q in seen.items():
        rows[i][j] = rows[j][i] = q
    return SimilarityMatrix(elements, rows)


def restrict(M: SimilarityMatrix, subset: Iterable[int]) -> SimilarityMatrix:
    """Principal submatrix on ``subset``; element order follows the original indices."""
    idx = sorted(set(subset))
    if not idx:
        raise ValueError("cannot restrict to an empty subset")
    if idx[0] < 0 or idx[-1] >= M.n:
        raise ValueError("subset index out of range")
    rows = [[None if a == b else M.value(a, b) for b in idx] for a in idx]
    return SimilarityMatrix(M.elements.subset(idx), rows)


def _mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


class ClusterTree:
    """Rooted full binary tree whose leaves are the elements.

    Nodes live in an indexed pool. ``children[v]`` is ``None`` for a leaf and a
    ``(left, right)`` pair otherwise; ``leafsets[v]`` caches ``L(T_v)`` as a
    frozenset of element indices. Equality ignores child order.
    """

    __slots__ = ("elements", "children", "leaf_element", "parent", "root", "leafsets", "_node_of_leaf", "_key")

    def __init__(self, elements: ElementSet, children, leaf_element, root: int):
        self.elements = elements
        self.children = tuple(children)
        self.leaf_element = tuple(leaf_element)
        self.root = root
        size = len(self.children)
        parent = [None] * size
        for v, ch in enumerate(self.children):
            if ch is None:
                continue
            if len(ch) != 2:
                raise ValueError("internal nodes must have exactly two children")
            for c in ch:
                if parent[c] is not None:
                    raise ValueError("node has two parents")
                parent[c] = v
        self.parent = tuple(parent)

        leafsets: list = [None] * size
        node_of_leaf = {}

        def fill(v):
            stack = [(v, False)]
            while stack:
                u, done = stack.pop()
                ch = self.children[u]
                if ch is None:
                    e = self.leaf_element[u]
                    if e is None or not 0 <= e < elements.n:
                        raise ValueError("leaf without a valid element")
                    if e in node_of_leaf:
                        raise ValueError(f"element {elements.labels[e]!r} appears twice")
                    node_of_leaf[e] = u
                    leafsets[u] = frozenset((e,))
                elif done:
                    a, b = leafsets[ch[0]], leafsets[ch[1]]
                    leafsets[u] = a | b
                else:
                    stack.append((u, True))
                    stack.append((ch[1], False))
                    stack.append((ch[0], False))

        fill(root)
        if any(ls is None for ls in leafsets):
            raise ValueError("node pool contains nodes unreachable from the root")
        if len(node_of_leaf) != elements.n:
            missing = [elements.labels[i] for i in range(elements.n) if i not in node_of_leaf]
            raise ValueError(f"tree does not cover all elements; missing {missing}")
        self.leafsets = tuple(leafsets)
        self._node_of_leaf = node_of_leaf
        self._key = frozenset(_mask(leafsets[v]) for v in range(size) if self.children[v] is not None)

    # construction -----------------------------------------------------------

    @classmethod
    def from_nested(cls, elements: ElementSet, nested: Nested) -> "ClusterTree":
        """Build from nested pairs of element indices or labels, e.g. ``((0, 1), 2)``."""
        children: list = []
        leaf_element: list = []

        def build(x) -> int:
            if isinstance(x, tuple):
                if len(x) != 2:
                    raise ValueError(f"split must have exactly two parts, got {len(x)}")
                left, right = build(x[0]), build(x[1])
                children.append((left, right))
                leaf_element.append(None)
            else:
                e = x if isinstance(x, int) else elements.index(x)
                children.append(None)
                leaf_element.append(e)
            return len(children) - 1

        root = build(nested)
        return cls(elements, children, leaf_element, root)

    # queries ----------------------------------------------------------------

    @property
    def n(self) -> int:
        return self.elements.n

    def is_leaf(self, v: int) -> bool:
        return self.children[v] is None

    def internal_nodes(self) -> list[int]:
        """Internal nodes in preorder (root first)."""
        out, stack = [], [self.root]
        while stack:
            v = stack.pop()
            ch = self.children[v]
            if ch is not None:
                out.append(v)
                stack.append(ch[1])
                stack.append(ch[0])
        return out

    def leaf_node(self, element: int) -> int:
        try:
            return self._node_of_leaf[element]
        except KeyError:
            raise ValueError(f"element {element} is not a leaf of this tree") from None

    def node_of_cluster(self, cluster: Iterable[int]) -> int:
        target = frozenset(cluster)
        for v, ls in enumerate(self.leafsets):
            if ls == target:
                return v
        raise KeyError(f"no node with leaf set {sorted(target)}")

    def clusters(self) -> set[frozenset]:
        """Leaf sets of all internal nodes."""
        return {self.leafsets[v] for v in self.internal_nodes()}

    def canonical_key(self) -> frozenset:
        """Internal clusters as bitmasks; identifies the tree up to child swaps."""
        return self._key

    def subtree(self, v: int) -> "ClusterTree":
        """Subtree at ``v`` over the element subset ``L(T_v)`` (original index order)."""
        idx = sorted(self.leafsets[v])
        remap = {e: k for k, e in enumerate(idx)}
        return ClusterTree.from_nested(self.elements.subset(idx), _relabel(self.nested(v), remap))

    def nested(self, v: int | None = None):
        """Nested tuple of element indices, preserving child order."""
        v = self.root if v is None else v
        ch = self.children[v]
        if ch is None:
            return self.leaf_element[v]
        return (self.nested(ch[0]), self.nested(ch[1]))

    def canonical(self) -> "ClusterTree":
        """Same tree with children ordered by smallest leaf index."""

        def canon(x):
            if not isinstance(x, tuple):
                return x, x
            (a, ma), (b, mb) = canon(x[0]), canon(x[1])
            return ((a, b), ma) if ma < mb else ((b, a), mb)

        return ClusterTree.from_nested(self.elements, canon(self.nested())[0])

    def swapped(self, v: int) -> "ClusterTree":
        """Copy with the two children of internal node ``v`` exchanged."""
        ch = list(self.children)
        if ch[v] is None:
            raise ValueError("cannot swap children of a leaf")
        ch[v] = (ch[v][1], ch[v][0])
        return ClusterTree(self.elements, ch, self.leaf_element, self.root)

    def __eq__(self, other):
        if not isinstance(other, ClusterTree):
            return NotImplemented
        return self.elements == other.elements and self._key == other._key

    def __hash__(self):
        return hash((self.elements.labels, self._key))

    def __repr__(self):
        from .treeio import to_newick

        return f"ClusterTree({to_newick(self)})"


def _relabel(x, remap):
    if isinstance(x, tuple):
        return (_relabel(x[0], remap), _relabel(x[1], remap))
    return remap[x]


def tree_from_splits(elements: ElementSet | Sequence[str], description: Nested) -> ClusterTree:
    """Build a tree from a recursive bipartition given by labels, e.g. ``(("a", "b"), "c")``.

    For a one-element set the description is just that label.
    """
    if not isinstance(elements, ElementSet):
        elements = ElementSet(tuple(elements))

    def check(x):
        if isinstance(x, tuple):
            if len(x) != 2:
                raise ValueError(f"unary or non-binary split: {x!r}")
            check(x[0])
            check(x[1])
        elif isinstance(x, list):
            raise ValueError("use tuples for splits")

    check(description)
    return ClusterTree.from_nested(elements, description)


def lca(T: ClusterTree, x: int, y: int) -> int:
    """Lowest common ancestor node of two distinct leaves (element indices)."""
    if x == y:
        raise ValueError("lca needs two distinct elements")
    T.leaf_node(x)
    T.leaf_node(y)
    v = T.root
    while True:
        left, right = T.children[v]
        ls = T.leafsets[left]
        if x in ls and y in ls:
            v = left
            continue
        rs = T.leafsets[right]
        if x in rs and y in rs:
            v = right
            continue
        return v
