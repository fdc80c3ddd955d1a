"""Immutable rooted trees for referral networks, with coalition trimming.

A referral tree records who invited whom: every node except the root has
exactly one parent (its referrer). Coalitions are plain sets of node ids;
"trimming" a coalition keeps only the members connected to the root through
other members, which is the part of a coalition that actually signed up.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator

Coalition = frozenset[int]
"""A set of node ids, interpreted against a particular tree."""


class TreeError(ValueError):
    """The input does not describe a valid rooted tree."""


class UnknownNodeError(TreeError):
    """A node id that is not part of the tree."""


def _check_id(i: int) -> None:
    if not isinstance(i, int) or isinstance(i, bool) or i <= 0:
        raise TreeError(f"node ids must be positive integers, got {i!r}")


class RootedTree:
    """A validated, immutable rooted tree over positive integer node ids.

    Nodes are stored densely in a canonical parent-before-child order so that
    traversal and trimming loops stay tight; the public surface always speaks
    original ids. Instances never change after construction and are safe to
    share across threads.
    """

    __slots__ = (
        "n",
        "root",
        "_ids",
        "_rank",
        "_parents",
        "_children",
        "_depths",
        "_subheights",
        "_height",
        "_sorted_ids",
    )

    def __init__(self, edges: Iterable[tuple[int, int]], root: int):
        _check_id(root)
        parent_of: dict[int, int] = {}
        for child, parent in edges:
            _check_id(child)
            _check_id(parent)
            if child in parent_of:
                raise TreeError(f"duplicate parent for node {child}")
            if child == parent:
                raise TreeError(f"cycle detected at node {child}")
            parent_of[child] = parent

        nodes = {root}
        nodes.update(parent_of)
        nodes.update(parent_of.values())

        if root in parent_of:
            # Distinguish a cycle running through the root from a plain
            # "root has a parent" mistake.
            seen = {root}
            cur = parent_of[root]
            while True:
                if cur in seen:
                    raise TreeError(f"cycle detected involving node {cur}")
                seen.add(cur)
                if cur not in parent_of:
                    raise TreeError(f"root {root} has a parent")
                cur = parent_of[cur]

        # One upward walk per unvisited node computes depths, and doubles as
        # cycle/reachability detection for components not touching the root.
        depth: dict[int, int] = {root: 0}
        for start in nodes:
            if start in depth:
                continue
            chain: list[int] = []
            on_chain: set[int] = set()
            cur = start
            while cur not in depth:
                if cur in on_chain:
                    raise TreeError(f"cycle detected involving node {cur}")
                chain.append(cur)
                on_chain.add(cur)
                if cur not in parent_of:
                    raise TreeError(f"node {cur} unreachable from root {root}")
                cur = parent_of[cur]
            base = depth[cur]
            for offset, member in enumerate(reversed(chain), start=1):
                depth[member] = base + offset

        # Canonical order: ascending ids when every edge points id-upward
        # (the common case for join-ordered referral data, and the order the
        # deterministic enumeration contract is stated in), otherwise by
        # (depth, id). Both guarantee parents precede children.
        if all(p < c for c, p in parent_of.items()):
            order = sorted(nodes)
        else:
            order = sorted(nodes, key=lambda i: (depth[i], i))

        rank = {node: r for r, node in enumerate(order)}
        parents = [-1] * len(order)
        children: list[list[int]] = [[] for _ in order]
        for r, node in enumerate(order):
            if node != root:
                pr = rank[parent_of[node]]
                parents[r] = pr
                children[pr].append(r)

        subheights = [0] * len(order)
        for r in range(len(order) - 1, -1, -1):
            if children[r]:
                subheights[r] = 1 + max(subheights[c] for c in children[r])

        self.n = len(order)
        self.root = root
        self._ids = tuple(order)
        self._rank = rank
        self._parents = tuple(parents)
        self._children = tuple(tuple(c) for c in children)
        self._depths = tuple(depth[node] for node in order)
        self._subheights = tuple(subheights)
        self._height = max(self._depths)
        self._sorted_ids = tuple(sorted(order))

    # -- basic queries -----------------------------------------------------

    def _rank_of(self, i: int) -> int:
        try:
            return self._rank[i]
        except (KeyError, TypeError):
            raise UnknownNodeError(f"unknown node id {i!r}") from None

    def __contains__(self, i: int) -> bool:
        return i in self._rank

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"RootedTree(n={self.n}, root={self.root})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RootedTree):
            return NotImplemented
        return self.root == other.root and self.edges() == other.edges()

    def __hash__(self) -> int:
        return hash((self.root, frozenset(self.edges())))

    @property
    def node_ids(self) -> tuple[int, ...]:
        """All node ids in ascending order."""
        return self._sorted_ids

    @property
    def height(self) -> int:
        return self._height

    def edges(self) -> frozenset[tuple[int, int]]:
        """All (child, parent) pairs."""
        ids = self._ids
        return frozenset(
            (ids[r], ids[p]) for r, p in enumerate(self._parents) if p >= 0
        )

    def parent(self, i: int) -> int | None:
        """Parent id of ``i``, or None for the root."""
        p = self._parents[self._rank_of(i)]
        return None if p < 0 else self._ids[p]

    def children(self, i: int) -> tuple[int, ...]:
        """Child ids of ``i`` in ascending order."""
        ids = self._ids
        return tuple(ids[c] for c in self._children[self._rank_of(i)])

    def depth(self, i: int) -> int:
        """Number of edges between ``i`` and the root."""
        return self._depths[self._rank_of(i)]

    def height_of_subtree(self, i: int) -> int:
        """Height of the subtree hanging from ``i`` (0 for a leaf)."""
        return self._subheights[self._rank_of(i)]

    def level(self, j: int, root: int | None = None) -> Coalition:
        """Nodes at depth ``j``, measured inside the subtree of ``root``.

        With ``root=None`` the whole tree is used. Raises ValueError when
        ``j`` lies outside ``0..height`` of the chosen scope.
        """
        if root is None:
            if not 0 <= j <= self._height:
                raise ValueError(f"level index {j} out of range 0..{self._height}")
            ids = self._ids
            return frozenset(
                ids[r] for r, d in enumerate(self._depths) if d == j
            )
        top = self._rank_of(root)
        if not 0 <= j <= self._subheights[top]:
            raise ValueError(
                f"level index {j} out of range 0..{self._subheights[top]}"
            )
        base = self._depths[top]
        ids = self._ids
        out = []
        stack = [top]
        while stack:
            r = stack.pop()
            rel = self._depths[r] - base
            if rel == j:
                out.append(ids[r])
                continue  # deeper nodes in this branch are below level j
            stack.extend(self._children[r])
        return frozenset(out)

    def ancestors(self, i: int) -> Coalition:
        """All nodes strictly between ``i`` and the root, plus the root."""
        out = []
        r = self._parents[self._rank_of(i)]
        ids = self._ids
        while r >= 0:
            out.append(ids[r])
            r = self._parents[r]
        return frozenset(out)

    def descendants(self, i: int) -> Coalition:
        """All nodes strictly below ``i``."""
        ids = self._ids
        out = []
        stack = list(self._children[self._rank_of(i)])
        while stack:
            r = stack.pop()
            out.append(ids[r])
            stack.extend(self._children[r])
        return frozenset(out)

    def subtree_nodes(self, i: int) -> Coalition:
        """``i`` together with all its descendants."""
        return self.descendants(i) | {i}

    # -- trimming ----------------------------------------------------------

    def _ranks_of(self, members: Iterable[int]) -> list[int]:
        rank = self._rank
        try:
            return [rank[i] for i in members]
        except (KeyError, TypeError):
            for i in members:
                if i not in rank:
                    raise UnknownNodeError(f"unknown node id {i!r}") from None
            raise

    def trim(self, members: Iterable[int]) -> Coalition:
        """Members of the coalition whose entire ancestor chain is inside it.

        Empty whenever the root is absent. The result is always parent-closed
        and contains the root when nonempty.
        """
        ranks = sorted(self._ranks_of(members))
        parents = self._parents
        kept: set[int] = set()
        for r in ranks:
            if r == 0 or parents[r] in kept:
                kept.add(r)
        ids = self._ids
        return frozenset(ids[r] for r in kept)

    def is_trimmed(self, members: Iterable[int]) -> bool:
        """True when trimming the coalition changes nothing."""
        rset = set(self._ranks_of(members))
        parents = self._parents
        return all(r == 0 or parents[r] in rset for r in rset)

    def adjacent(self, members: Iterable[int]) -> Coalition:
        """Nodes outside the coalition with an edge into it."""
        rset = set(self._ranks_of(members))
        parents = self._parents
        children = self._children
        out: set[int] = set()
        for r in rset:
            p = parents[r]
            if p >= 0 and p not in rset:
                out.add(p)
            for c in children[r]:
                if c not in rset:
                    out.add(c)
        ids = self._ids
        return frozenset(ids[r] for r in out)

    def enumerate_trimmed(self) -> Iterator[Coalition]:
        """Stream every parent-closed, root-connected coalition, plus the
        empty set, each exactly once.

        Sets are generated depth-first by extending with ever-later nodes in
        canonical order, so the stream is lexicographic over sorted member
        lists (exactly so whenever ids are parent-monotone, as in join-ordered
        data). Nothing close to the full power set is ever materialised.
        """
        yield frozenset()
        n = self.n
        ids = self._ids
        parents = self._parents
        in_set = bytearray(n)
        members: list[int] = [0]
        in_set[0] = 1

        def extend(start: int) -> Iterator[Coalition]:
            yield frozenset(ids[r] for r in members)
            for e in range(start, n):
                if not in_set[parents[e]]:
                    continue
                in_set[e] = 1
                members.append(e)
                yield from extend(e + 1)
                members.pop()
                in_set[e] = 0

        yield from extend(1)

    def enumerate_trimmed_containing(self, i: int) -> Iterator[Coalition]:
        """Stream every trimmed coalition that contains ``i`` (and therefore
        all of its ancestors), each exactly once, in a deterministic order."""
        n = self.n
        ids = self._ids
        parents = self._parents
        in_set = bytearray(n)
        members: list[int] = []
        r = self._rank_of(i)
        while r >= 0:
            in_set[r] = 1
            members.append(r)
            r = parents[r]

        def extend(start: int) -> Iterator[Coalition]:
            yield frozenset(ids[r] for r in members)
            for e in range(start, n):
                if in_set[e] or not in_set[parents[e]]:
                    continue
                in_set[e] = 1
                members.append(e)
                yield from extend(e + 1)
                members.pop()
                in_set[e] = 0

        yield from extend(1)

    def same_trim_count(self, members: Iterable[int]) -> int:
        """How many coalitions trim down to this exact trimmed set.

        Those are precisely the supersets avoiding every node adjacent to the
        set, hence ``2**(n - |set| - |adjacent|)``. Requires a nonempty
        trimmed set.
        """
        mset = frozenset(members)
        if not mset:
            raise TreeError("same-trim counting requires a nonempty trimmed set")
        if not self.is_trimmed(mset):
            raise TreeError(f"coalition {sorted(mset)} is not trimmed")
        return 2 ** (self.n - len(mset) - len(self.adjacent(mset)))


def build_tree(edges: Iterable[tuple[int, int]], root: int) -> RootedTree:
    """Build and validate a tree from (child, parent) pairs and a root id."""
    return RootedTree(edges, root)


def chain(n: int, start: int = 1) -> RootedTree:
    """A path of ``n`` nodes: start -> start+1 -> ... (root at the top)."""
    if n < 1:
        raise TreeError("chain needs at least one node")
    return RootedTree(
        [(start + k, start + k - 1) for k in range(1, n)], start
    )


def star(n: int, start: int = 1) -> RootedTree:
    """A root with ``n - 1`` direct children."""
    if n < 1:
        raise TreeError("star needs at least one node")
    return RootedTree([(start + k, start) for k in range(1, n)], start)


def complete_binary_tree(height: int) -> RootedTree:
    """A perfect binary tree of the given height, heap-numbered from 1."""
    if height < 0:
        raise TreeError("height must be nonnegative")
    n = 2 ** (height + 1) - 1
    return RootedTree([(k, k // 2) for k in range(2, n + 1)], 1)
