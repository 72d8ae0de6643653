"""Canonical forms of vertex-coloured structures with labelled tuples.

A structure is a vertex count, one colour per vertex and a map from vertex
tuples (any length) to labels.  Colours and labels must be mutually
comparable within their kind (ints, strings or tuples of those).

The certificate is computed by colour refinement followed by
individualization-refinement; the least leaf certificate wins.  Two
structures get equal certificates iff they are isomorphic.
"""

from __future__ import annotations

from typing import Any, Mapping, Sequence

Tuple = tuple[int, ...]


def _rank(values: Sequence[Any]) -> list[int]:
    order = {v: r for r, v in enumerate(sorted(set(values)))}
    return [order[v] for v in values]


class _Structure:
    def __init__(self, size: int, colours: Sequence[Any], tuples: Mapping[Tuple, Any]) -> None:
        self.size = size
        self.raw_colours = list(colours)
        self.base = _rank(self.raw_colours)
        labels = list(tuples.values())
        lab_rank = dict(zip(labels, _rank(labels))) if labels else {}
        self.raw_label = {r: lab for lab, r in lab_rank.items()}
        self.items: list[tuple[Tuple, int]] = [(t, lab_rank[lab]) for t, lab in tuples.items()]
        self.incident: list[list[tuple[int, int, Tuple]]] = [[] for _ in range(size)]
        for t, lab in self.items:
            for pos, v in enumerate(t):
                self.incident[v].append((pos, lab, t))
        self.table = {t: lab for t, lab in self.items}

    def refine(self, colours: list[int]) -> list[int]:
        """Equitable refinement; colour ranks stay isomorphism invariant."""
        cur = colours
        ncls = len(set(cur))
        for _ in range(self.size + 1):
            sigs = []
            for v in range(self.size):
                inc = sorted(
                    (pos, lab, tuple(cur[w] for w in t)) for pos, lab, t in self.incident[v]
                )
                sigs.append((cur[v], tuple(inc)))
            nxt = _rank(sigs)
            k = len(set(nxt))
            if k == ncls:
                return nxt
            cur, ncls = nxt, k
        return cur

    def certificate(self, colours: list[int]) -> tuple:
        perm = colours  # discrete: colour is the new vertex name
        tup = sorted((tuple(perm[v] for v in t), lab) for t, lab in self.items)
        inv = [0] * self.size
        for v, c in enumerate(perm):
            inv[c] = v
        raw = tuple((t, self.raw_label[lab]) for t, lab in tup)
        return (tuple(self.raw_colours[inv[c]] for c in range(self.size)), raw)

    def swap_is_automorphism(self, u: int, v: int) -> bool:
        if self.base[u] != self.base[v]:
            return False

        def sw(x: int) -> int:
            return v if x == u else u if x == v else x

        for t, lab in self.items:
            if u in t or v in t:
                if self.table.get(tuple(sw(x) for x in t)) != lab:
                    return False
        return True


def canonical_form(size: int, colours: Sequence[Any], tuples: Mapping[Tuple, Any]) -> tuple:
    """Isomorphism-complete certificate of a coloured labelled-tuple structure."""
    for t in tuples:
        for v in t:
            if not 0 <= v < size:
                raise ValueError(f"tuple {t} mentions vertex outside 0..{size - 1}")
    return canonical_labelling(size, colours, tuples)[0]


def canonical_labelling(size: int, colours: Sequence[Any], tuples: Mapping[Tuple, Any]) -> tuple[tuple, list[int]]:
    """Certificate plus one vertex permutation realizing it."""
    if len(colours) != size:
        raise ValueError("need one colour per vertex")
    if size == 0:
        return ((), tuple(sorted(((), lab) for lab in tuples.values()))), []
    s = _Structure(size, colours, tuples)
    best: list = [None, None]

    def go(colours: list[int]) -> None:
        colours = s.refine(colours)
        counts: dict[int, int] = {}
        for c in colours:
            counts[c] = counts.get(c, 0) + 1
        target = next((c for c in sorted(counts) if counts[c] > 1), None)
        if target is None:
            cert = s.certificate(colours)
            if best[0] is None or cert < best[0]:
                best[0], best[1] = cert, list(colours)
            return
        reps: list[int] = []
        for v in (w for w in range(s.size) if colours[w] == target):
            if not any(s.swap_is_automorphism(r, v) for r in reps):
                reps.append(v)
        for v in reps:
            go(_rank([2 * c + (1 if c == target and w != v else 0) for w, c in enumerate(colours)]))

    go(list(s.base))
    return best[0], best[1]


def refinement_rounds(size: int, colours: Sequence[Any], tuples: Mapping[Tuple, Any]) -> int:
    """Number of refinement passes before the colouring stabilizes."""
    s = _Structure(size, colours, tuples)
    cur = list(s.base)
    rounds = 0
    while True:
        rounds += 1
        sigs = []
        for v in range(size):
            inc = sorted((pos, lab, tuple(cur[w] for w in t)) for pos, lab, t in s.incident[v])
            sigs.append((cur[v], tuple(inc)))
        nxt = _rank(sigs)
        if len(set(nxt)) == len(set(cur)):
            return rounds
        cur = nxt


