"""
Exact enumeration and counting behind the limiting moments.

Plane trees are stored as child counts in preorder (Lukasiewicz words). Vertices
at even depth live on the I-line (matrix rows), vertices at odd depth on the
K-line (samples). All counts are Python integers, so nothing overflows.
"""
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from src.core.errors import EnumerationCapError, NotATreeError, ParityError
from src.core.utils.config_manager import ConfigManager
from src.core.utils.report_logger import ReportLogger

logger = ReportLogger()

I_LINE = "I"
K_LINE = "K"

WalkStep = Union[int, Tuple[str, int]]


def binomial(a: int, b: int) -> int:
    """C(a, b) with C := 0 for a < b, a < 0 or b < 0."""
    if a < 0 or b < 0 or a < b:
        return 0
    return math.comb(a, b)


def catalan(l: int) -> int:
    if l < 0:
        raise ValueError("l must be >= 0")
    return math.comb(2 * l, l) // (l + 1)


# ============================================
# Types
# ============================================

@dataclass(frozen=True, order=True)
class DegreeProfile:
    """Multiset of K-line vertex degrees, kept sorted in descending order."""

    degrees: Tuple[int, ...]

    def __post_init__(self):
        if any(d < 1 for d in self.degrees):
            raise ValueError(f"degrees must be positive: {self.degrees}")
        object.__setattr__(self, 'degrees', tuple(sorted(self.degrees, reverse=True)))

    @classmethod
    def of(cls, degrees: Iterable[int]) -> 'DegreeProfile':
        return cls(tuple(int(d) for d in degrees))

    @property
    def edge_count(self) -> int:
        return sum(self.degrees)

    def __len__(self) -> int:
        return len(self.degrees)

    def __iter__(self) -> Iterator[int]:
        return iter(self.degrees)

    def __str__(self) -> str:
        return "{" + ",".join(str(d) for d in self.degrees) + "}"


@dataclass(frozen=True)
class PlaneTree:
    """Canonical ordered tree rooted on the I-line, encoded by preorder child counts."""

    child_counts: Tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.child_counts)
        object.__setattr__(self, 'child_counts', counts)
        if not counts or any(c < 0 for c in counts):
            raise NotATreeError(f"child counts must be a nonempty sequence of nonnegative integers: {counts}")
        if sum(counts) != len(counts) - 1:
            raise NotATreeError(f"child counts {counts} do not describe a tree")
        open_slots = 1
        for position, c in enumerate(counts):
            open_slots += c - 1
            if open_slots == 0 and position != len(counts) - 1:
                raise NotATreeError(f"child counts {counts} close before the last vertex")
        if self.edge_count < 1:
            raise NotATreeError("a plane tree needs at least one edge")

    @classmethod
    def trusted(cls, child_counts: Tuple[int, ...]) -> 'PlaneTree':
        """Wrap child counts already known to form a valid word, skipping the checks."""
        tree = object.__new__(cls)
        object.__setattr__(tree, 'child_counts', child_counts)
        return tree

    @property
    def edge_count(self) -> int:
        return len(self.child_counts) - 1

    @cached_property
    def depths(self) -> Tuple[int, ...]:
        """Depth of every vertex, in preorder."""
        depths = []
        pending: List[int] = []
        for c in self.child_counts:
            depths.append(len(pending))
            if pending:
                pending[-1] -= 1
            pending.append(c)
            while pending and pending[-1] == 0:
                pending.pop()
        return tuple(depths)

    @cached_property
    def parents(self) -> Tuple[int, ...]:
        """Preorder index of each vertex's parent (-1 for the root)."""
        parents = []
        stack: List[List[int]] = []
        for v, c in enumerate(self.child_counts):
            if stack:
                parents.append(stack[-1][0])
                stack[-1][1] -= 1
            else:
                parents.append(-1)
            stack.append([v, c])
            while stack and stack[-1][1] == 0:
                stack.pop()
        return tuple(parents)

    @property
    def i_vertex_count(self) -> int:
        return sum(1 for depth in self.depths if depth % 2 == 0)

    @property
    def k_vertex_count(self) -> int:
        return sum(1 for depth in self.depths if depth % 2 == 1)

    @property
    def r(self) -> int:
        """Number of I-line vertices besides the root."""
        return self.i_vertex_count - 1

    @cached_property
    def profile(self) -> DegreeProfile:
        """Degrees of the K-line vertices: one parent edge plus the children."""
        return DegreeProfile.of(c + 1 for c, depth in zip(self.child_counts, self.depths) if depth % 2 == 1)

    def to_dict(self) -> dict:
        return {"child_counts": list(self.child_counts), "r": self.r, "profile": list(self.profile.degrees)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> 'PlaneTree':
        return cls(tuple(json.loads(line)["child_counts"]))


# ============================================
# Trees
# ============================================

def _resolve_tree_cap(cap: Optional[int]) -> int:
    return ConfigManager().get_tree_cap() if cap is None else cap


def enumerate_canonical_trees(l: int, cap: Optional[int] = None) -> Iterator[PlaneTree]:
    """Yield the Catalan(l) canonical plane trees with l edges, star first."""
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    cap = _resolve_tree_cap(cap)
    if l > cap:
        logger.log_budget("canonical trees", l, cap)
        raise EnumerationCapError("canonical trees", l, cap)
    logger.debug(f"Enumerating {catalan(l)} canonical trees with {l} edges")
    return _lukasiewicz_words(l)


def _lukasiewicz_words(l: int) -> Iterator[PlaneTree]:
    word = [0] * (l + 1)

    def place(position: int, slots: int, edges_left: int) -> Iterator[PlaneTree]:
        # slots: vertices already promised by earlier child counts and not yet placed
        if position == l:
            if slots == 1 and edges_left == 0:
                word[l] = 0
                yield PlaneTree.trusted(tuple(word))
            return
        for c in range(edges_left, -1, -1):
            new_slots = slots - 1 + c
            if new_slots == 0 or new_slots > l - position:
                continue
            word[position] = c
            yield from place(position + 1, new_slots, edges_left - c)

    yield from place(0, 1, l)


def canonical_walk(tree: PlaneTree) -> Tuple[int, ...]:
    """
    The closed walk around the tree as 2l+1 labels, I and K alternating.

    Labels are numbered by first occurrence separately on each line, so the
    single edge gives (1, 1, 1) and the path on three vertices (1, 1, 2, 1, 1).
    """
    counts = tree.child_counts
    walk = [1]
    path = [1]
    remaining = [counts[0]]
    next_label = [1, 0]
    for c in counts[1:]:
        remaining[-1] -= 1
        line = len(path) % 2
        next_label[line] += 1
        label = next_label[line]
        walk.append(label)
        if c:
            path.append(label)
            remaining.append(c)
            continue
        walk.append(path[-1])
        while len(remaining) > 1 and not remaining[-1]:
            remaining.pop()
            path.pop()
            walk.append(path[-1])
    return tuple(walk)


def _vertex(key: int) -> Tuple[str, int]:
    return (K_LINE if key & 1 else I_LINE), key >> 1


def _vertex_keys(labels: Sequence[WalkStep]) -> List[int]:
    """Encode each step as 2*label + line (0 for I, 1 for K), checking I/K alternation."""
    if all(type(step) is int for step in labels):
        return [2 * label + (position & 1) for position, label in enumerate(labels)]
    keys: List[int] = []
    for position, step in enumerate(labels):
        parity = position & 1
        if type(step) is int:
            label = step
        elif isinstance(step, (tuple, list)):
            line, label = str(step[0]).upper(), int(step[1])
            if line not in (I_LINE, K_LINE):
                raise ParityError(f"unknown line tag {step[0]!r} at position {position}")
            expected = K_LINE if parity else I_LINE
            if line != expected:
                raise ParityError(f"step {position} is on the {line}-line, expected the {expected}-line")
        else:
            label = int(step)
        keys.append(2 * label + parity)
    return keys


def tree_from_walk(labels: Sequence[WalkStep]) -> PlaneTree:
    """
    Rebuild the plane tree traversed by a closed walk.

    Steps are plain integer labels (the line follows from the position, I first)
    or ("I", label) / ("K", label) pairs. The final return to the start vertex
    may be given explicitly or left implicit. Every step either enters a new
    vertex or backs up to the parent; anything else is not a tree.
    """
    keys = _vertex_keys(labels)
    if len(keys) < 2:
        raise NotATreeError("a walk needs at least one I and one K step")
    root = keys[0]
    if len(keys) % 2 == 1:
        if keys[-1] != root:
            raise NotATreeError(f"walk ends at {_vertex(keys[-1])} instead of its start {_vertex(root)}")
        keys.pop()
    keys.append(root)

    order = {root: 0}
    child_counts = [0]
    stack = [root]
    for vertex in keys[1:]:
        if len(stack) > 1 and vertex == stack[-2]:
            stack.pop()
            continue
        if vertex in order:
            raise NotATreeError(f"walk revisits {_vertex(vertex)} without backtracking")
        child_counts[order[stack[-1]]] += 1
        order[vertex] = len(child_counts)
        child_counts.append(0)
        stack.append(vertex)
    if len(stack) != 1:
        raise NotATreeError(f"walk {tuple(labels)} does not cross every edge of a tree exactly twice")
    return PlaneTree.trusted(tuple(child_counts))


def try_tree_from_walk(labels: Sequence[WalkStep]) -> Optional[PlaneTree]:
    """tree_from_walk, returning None instead of raising for non-tree walks."""
    try:
        return tree_from_walk(labels)
    except (NotATreeError, ParityError):
        return None


def relabel_canonical(labels: Sequence[int]) -> Tuple[int, ...]:
    """Relabel an alternating I/K walk by first occurrence on each line, starting at 1."""
    seen = ({}, {})
    out = []
    for position, label in enumerate(labels):
        line = seen[position % 2]
        if label not in line:
            line[label] = len(line) + 1
        out.append(line[label])
    return tuple(out)


def narayana_count(l: int, r: int) -> int:
    """Number of canonical trees with l edges and r+1 I-line vertices."""
    if l < 1 or r < 0 or r > l - 1:
        return 0
    return math.comb(l, r) * math.comb(l - 1, r) // (r + 1)


def count_ordered_trees(p: int, n: int, l: int) -> int:
    """Labelled ordered trees with l edges, I-labels from [p] and K-labels from [n], distinct per line."""
    return sum(narayana_count(l, r) * math.perm(p, r + 1) * math.perm(n, l - r) for r in range(l))


def count_ordered_trees_by_r(p: int, n: int, l: int) -> List[int]:
    """The terms of count_ordered_trees, indexed by r."""
    return [narayana_count(l, r) * math.perm(p, r + 1) * math.perm(n, l - r) for r in range(l)]


# ============================================
# Restricted compositions
# ============================================

def count_restricted_compositions(n: int, k: int, m: int) -> int:
    """F(n, k, m): k-tuples with parts in {1..m} summing to n."""
    if k < 1 or m < 1:
        raise ValueError(f"k and m must be positive, got k={k}, m={m}")
    return sum((-1) ** j * math.comb(k, j) * binomial(n - j * m - 1, k - 1) for j in range(k + 1))


def enumerate_restricted_compositions(n: int, k: int, m: int,
                                      budget: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Yield every k-composition of n with parts in {1..m}, in lexicographic order."""
    if k < 1 or m < 1:
        raise ValueError(f"k and m must be positive, got k={k}, m={m}")
    budget = ConfigManager().get_composition_budget() if budget is None else budget
    if k * m > budget:
        logger.log_budget("compositions", k * m, budget)
        raise EnumerationCapError("compositions", k * m, budget)
    return _compositions(n, k, m)


def _compositions(n: int, k: int, m: int) -> Iterator[Tuple[int, ...]]:
    if not k <= n <= k * m:
        return
    parts = [0] * k

    def fill_smallest(start: int, remaining: int):
        for i in range(start, k):
            part = max(1, remaining - (k - i - 1) * m)
            parts[i] = part
            remaining -= part

    fill_smallest(0, n)
    while True:
        yield tuple(parts)
        suffix = parts[k - 1]
        for i in range(k - 2, -1, -1):
            suffix += parts[i]
            rest = k - i - 1
            if parts[i] < m and suffix - parts[i] - 1 >= rest:
                parts[i] += 1
                fill_smallest(i + 1, suffix - parts[i])
                break
        else:
            return


def restricted_growth_strings(length: int) -> Iterator[Tuple[int, ...]]:
    """Set partitions of range(length) as restricted growth strings, e.g. (0, 1, 0)."""
    if length < 1:
        return
    word = [0] * length

    def extend(position: int, blocks: int) -> Iterator[Tuple[int, ...]]:
        if position == length:
            yield tuple(word)
            return
        for block in range(blocks + 1):
            word[position] = block
            yield from extend(position + 1, max(blocks, block + 1))

    yield from extend(1, 1)
