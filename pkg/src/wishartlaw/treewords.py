"""Canonical closed words on bipartite trees and their exact count tables.

A closed word of half-length ``k`` reads ``i1 j1 i2 ... jk i1``: letters
alternate between the row side I and the column side J, and consecutive
letters are the edges of a bipartite multigraph.  Two words are equivalent
when a relabeling of the I-indices and an independent relabeling of the
J-indices maps one onto the other; the canonical representative labels each
side in first-appearance order 1, 2, 3, ...

Only words whose graph is a tree (vertex count = edge count + 1) with every
edge traversed an even number of times are enumerated here; those are the
classes that survive in the limiting moment formula.  Counts are grouped by
the class key (a, s, l, b): edge count, vertex count, number of distinct
J-letters, and the sorted edge-multiplicity vector.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Iterator, Sequence

from .errors import GuardLimitError, MalformedWordError, ParameterError

#: Enumeration guard: walk counts grow super-exponentially in k, and the
#: default keeps a full table under desk-scale runtimes.
DEFAULT_GUARD = 10

#: Bump when the JSON layout of count tables changes; stale cache files are
#: recomputed rather than reinterpreted.
SCHEMA_VERSION = 1

Letter = tuple[str, int]


@dataclass(frozen=True)
class CanonicalWord:
    """A canonical representative of an equivalence class of closed words."""

    letters: tuple[Letter, ...]

    @property
    def k(self) -> int:
        """Half-length: the number of J-positions in the word."""
        return (len(self.letters) - 1) // 2

    def __str__(self) -> str:
        return " ".join(f"{side}{idx}" for side, idx in self.letters)


@dataclass(frozen=True, order=True)
class WordClassKey:
    """Class key (k, a, s, l, b) of a closed word."""

    k: int
    a: int
    s: int
    l: int
    b: tuple[int, ...]


@dataclass
class CountTable:
    """Exact class counts |W_k(a, a+1, l, b)| for one half-length k."""

    k: int
    entries: dict[WordClassKey, int] = field(default_factory=dict)

    def count(self, a: int, l: int, b: Sequence[int]) -> int:
        key = WordClassKey(self.k, a, a + 1, l, tuple(b))
        return self.entries.get(key, 0)

    def total(self) -> int:
        return sum(self.entries.values())

    def validate(self) -> None:
        """Check the structural invariants every produced table must satisfy."""
        bound = (2 * self.k) ** self.k // (self.k + 1) * comb(2 * self.k, self.k)
        for key, count in self.entries.items():
            if key.k != self.k:
                raise ValueError(f"foreign half-length in table: {key}")
            if key.s != key.a + 1:
                raise ValueError(f"non-tree key in table: {key}")
            if any(bi % 2 for bi in key.b):
                raise ValueError(f"odd multiplicity in table key: {key}")
            if sum(key.b) != 2 * self.k:
                raise ValueError(f"multiplicities of {key} do not sum to 2k")
            if not 1 <= key.l <= key.s - 1:
                raise ValueError(f"J-vertex count out of range in {key}")
            if not 0 < count <= bound:
                raise ValueError(f"count {count} outside (0, {bound}] for {key}")

    def to_json(self) -> str:
        entries = [
            {"a": key.a, "l": key.l, "b": list(key.b), "count": str(count)}
            for key, count in sorted(self.entries.items())
        ]
        return json.dumps(
            {"k": self.k, "schema": SCHEMA_VERSION, "entries": entries}, indent=1
        )

    @classmethod
    def from_json(cls, text: str) -> "CountTable":
        data = json.loads(text)
        k = int(data["k"])
        entries = {}
        for item in data["entries"]:
            b = tuple(int(x) for x in item["b"])
            key = WordClassKey(k, int(item["a"]), int(item["a"]) + 1, int(item["l"]), b)
            entries[key] = int(item["count"])
        table = cls(k=k, entries=entries)
        table.validate()
        return table


def _check_guard(k: int, max_k_guard: int) -> None:
    if k < 1:
        raise ParameterError(f"half-length k must be >= 1, got {k}")
    if k > max_k_guard:
        raise GuardLimitError(
            f"k={k} exceeds the enumeration guard {max_k_guard}; "
            "the class count grows super-exponentially"
        )


def _iter_tree_walks(
    k: int,
    max_mult: int | None = None,
    max_heavy: int | None = None,
) -> Iterator[tuple[Letter, ...]]:
    """Depth-first generation of canonical closed tree walks of length 2k.

    Vertices are created on the fly with labels issued in first-appearance
    order, so every emitted walk is canonical and no two emitted walks are
    equivalent.  Traversal moves only along existing edges or to a brand-new
    child, so the letter graph is a tree by construction.

    ``max_mult`` caps the final multiplicity of any edge and ``max_heavy``
    caps the number of edges allowed to exceed multiplicity 2; both exist to
    prune slice enumerations (e.g. b = (2,...,2) or (4,2,...,2)) without
    walking the full table.
    """
    # Vertices are (side, idx0): side 0 = I, 1 = J, labels 0-based here.
    root = (0, 0)
    adjacency: dict[tuple[int, int], list[tuple[int, int]]] = {root: []}
    depth = {root: 0}
    mult: dict[tuple[tuple[int, int], tuple[int, int]], int] = {}
    side_counts = [1, 0]  # created vertices per side
    walk = [root]
    out_sides = ("I", "J")

    def edge_key(u, v):
        return (u, v) if u[0] == 0 else (v, u)

    # odd = number of edges with odd current multiplicity; heavy = number of
    # edges with current multiplicity >= 3.
    def rec(current, steps_left, odd, heavy):
        d = depth[current]
        if steps_left == 0:
            if current == root and odd == 0:
                yield tuple(
                    (out_sides[side], idx + 1) for side, idx in walk
                )
            return
        if steps_left < d or (steps_left - d) & 1 or steps_left < odd:
            return

        other_side = 1 - current[0]

        # Traverse an existing edge (neighbors are stored in ascending label
        # order, so the DFS emits words lexicographically).
        for neigh in adjacency[current]:
            e = edge_key(current, neigh)
            m = mult[e]
            if max_mult is not None and m >= max_mult:
                continue
            heavy_inc = 1 if m == 2 else 0
            if heavy_inc and max_heavy is not None and heavy >= max_heavy:
                continue
            mult[e] = m + 1
            walk.append(neigh)
            yield from rec(
                neigh, steps_left - 1, odd + (1 if m % 2 == 0 else -1), heavy + heavy_inc
            )
            walk.pop()
            mult[e] = m

        # Create a new child; its fresh edge still needs a return traversal,
        # so at least depth+2 further steps must remain.
        if side_counts[0] + side_counts[1] <= k and steps_left >= d + 2:
            idx = side_counts[other_side]
            child = (other_side, idx)
            side_counts[other_side] += 1
            adjacency[current].append(child)
            adjacency[child] = [current]
            depth[child] = d + 1
            e = edge_key(current, child)
            mult[e] = 1
            walk.append(child)
            yield from rec(child, steps_left - 1, odd + 1, heavy)
            walk.pop()
            del mult[e]
            del depth[child]
            del adjacency[child]
            adjacency[current].pop()
            side_counts[other_side] -= 1

    yield from rec(root, 2 * k, 0, 0)


def canonicalize(raw: Sequence[Letter]) -> CanonicalWord:
    """Relabel a raw closed word into its canonical representative.

    Raises MalformedWordError unless the input alternates sides starting
    from I, is closed, and has odd length >= 3.
    """
    letters = [(str(side), int(idx)) for side, idx in raw]
    if len(letters) < 3 or len(letters) % 2 == 0:
        raise MalformedWordError(f"closed words have odd length >= 3, got {len(letters)}")
    if letters[0] != letters[-1]:
        raise MalformedWordError("word is not closed (first letter != last letter)")
    for pos, (side, idx) in enumerate(letters):
        expected = "I" if pos % 2 == 0 else "J"
        if side != expected:
            raise MalformedWordError(
                f"position {pos} has side {side!r}, expected {expected!r}"
            )
        if idx < 1:
            raise MalformedWordError(f"letter index must be positive, got {idx}")
    relabel: dict[Letter, int] = {}
    next_label = {"I": 1, "J": 1}
    canonical = []
    for side, idx in letters:
        if (side, idx) not in relabel:
            relabel[(side, idx)] = next_label[side]
            next_label[side] += 1
        canonical.append((side, relabel[(side, idx)]))
    return CanonicalWord(tuple(canonical))


def classify(word: CanonicalWord) -> WordClassKey:
    """Class key of a canonical word: edge/vertex/J-vertex counts and b."""
    letters = word.letters
    mult: dict[tuple[Letter, Letter], int] = {}
    for u, v in zip(letters, letters[1:]):
        e = (u, v) if u[0] == "I" else (v, u)
        mult[e] = mult.get(e, 0) + 1
    vertices = set(letters)
    j_vertices = sum(1 for side, _ in vertices if side == "J")
    b = tuple(sorted(mult.values(), reverse=True))
    return WordClassKey(
        k=word.k, a=len(mult), s=len(vertices), l=j_vertices, b=b
    )


def enumerate_tree_words(k: int, max_k_guard: int = DEFAULT_GUARD) -> list[CanonicalWord]:
    """All canonical closed tree words of half-length k with even edge counts.

    Output order is lexicographic on the letter sequence and deterministic.
    """
    _check_guard(k, max_k_guard)
    return [CanonicalWord(letters) for letters in _iter_tree_walks(k)]


def count_table(k: int, max_k_guard: int = DEFAULT_GUARD) -> CountTable:
    """Exact table of |W_k(a, a+1, l, b)| built by streaming the enumerator."""
    _check_guard(k, max_k_guard)
    entries: dict[WordClassKey, int] = {}
    for letters in _iter_tree_walks(k):
        key = classify(CanonicalWord(letters))
        entries[key] = entries.get(key, 0) + 1
    table = CountTable(k=k, entries=entries)
    table.validate()
    return table


def count_quadruple_words(k: int, max_k_guard: int = DEFAULT_GUARD) -> dict[int, int]:
    """Counts |W_k(k-1, k, l, (4,2,...,2))| keyed by l.

    These are the words with exactly one quadruple edge, the combinatorial
    side of the first-order 1/c perturbation.
    """
    if k < 2:
        raise ParameterError(f"quadruple-edge words need k >= 2, got {k}")
    _check_guard(k, max_k_guard)
    target_b = (4,) + (2,) * (k - 2)
    counts: dict[int, int] = {}
    for letters in _iter_tree_walks(k, max_mult=4, max_heavy=1):
        key = classify(CanonicalWord(letters))
        if key.b == target_b:
            counts[key.l] = counts.get(key.l, 0) + 1
    return counts


def count_contour_words(k: int, max_k_guard: int = DEFAULT_GUARD) -> dict[int, int]:
    """Counts |W_k(k, k+1, l, (2,...,2))| keyed by l (every edge browsed twice)."""
    _check_guard(k, max_k_guard)
    counts: dict[int, int] = {}
    for letters in _iter_tree_walks(k, max_mult=2, max_heavy=0):
        key = classify(CanonicalWord(letters))
        counts[key.l] = counts.get(key.l, 0) + 1
    return counts


def alpha_polynomial(counts_by_l: dict[int, int]) -> tuple[int, ...]:
    """Integer coefficients of sum_l count[l] * alpha^l (index = power of alpha)."""
    if not counts_by_l:
        return (0,)
    coeffs = [0] * (max(counts_by_l) + 1)
    for l, count in counts_by_l.items():
        coeffs[l] = count
    return tuple(coeffs)


def table_slice_by_l(table: CountTable, a: int, b: Sequence[int]) -> dict[int, int]:
    """Restrict a table to fixed (a, b) and return counts keyed by l."""
    b = tuple(b)
    return {
        key.l: count
        for key, count in table.entries.items()
        if key.a == a and key.b == b
    }


def cache_path(k: int, cache_dir: str) -> str:
    return os.path.join(cache_dir, f"counts_k{k}_v{SCHEMA_VERSION}.json")


def cached_count_table(
    k: int, cache_dir: str | None = None, max_k_guard: int = DEFAULT_GUARD
) -> CountTable:
    """count_table with an optional JSON file cache keyed by k and schema."""
    if cache_dir is None:
        return count_table(k, max_k_guard)
    path = cache_path(k, cache_dir)
    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as fh:
            return CountTable.from_json(fh.read())
    table = count_table(k, max_k_guard)
    os.makedirs(cache_dir, exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(table.to_json())
    os.replace(tmp, path)
    return table


def table_provider(
    cache_dir: str | None = None, max_k_guard: int = DEFAULT_GUARD
) -> Callable[[int], CountTable]:
    """A memoized ``k -> CountTable`` callable, the interface limit_moments expects."""
    memo: dict[int, CountTable] = {}

    def provide(k: int) -> CountTable:
        if k not in memo:
            memo[k] = cached_count_table(k, cache_dir, max_k_guard)
        return memo[k]

    return provide
