"""Tangled trivalent graphs in a marked disk as half-edge maps with rotation systems.

A web is stored as darts (half-edges) owned by nodes. Every node lists its darts in
counterclockwise order. Nodes are trivalent sources and sinks, four-valent crossings,
boundary terminals, and boxes (clasps and twist-region holes). Terminals are kept in
counterclockwise boundary order starting at the bottom-left base point: the bottom word
left to right, then the top word right to left.

Sign words read left to right. A "-" strand runs upward and a "+" strand downward, on
both the bottom and the top edge of a rectangle.
"""

from collections import deque
from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass
from typing import Literal

from a2_spider.errors import A2Error, BoundaryMismatchError, EmbeddingError
from a2_spider.qalg import Coefficient, RationalScalar, Scalar

NodeKind = Literal["source", "sink", "crossing", "terminal", "box"]
Over = Literal["\\", "/"]

_KIND_CODES: dict[str, int] = {"source": 0, "sink": 1, "crossing": 2, "terminal": 3, "box": 4}


@dataclass(frozen=True, slots=True)
class Box:
    """Label of a box node: a tag plus its bottom and top sign words."""

    tag: str
    bottom: str
    top: str
    data: tuple[int, ...] = ()

    def cabled(self, n: int) -> "Box":
        """Return the label after replacing every strand by n parallel copies."""
        return Box(self.tag, _repeat(self.bottom, n), _repeat(self.top, n), self.data)

    def key(self) -> tuple[str, str, str, tuple[int, ...]]:
        """Return a comparable key for canonical forms."""
        return (self.tag, self.bottom, self.top, self.data)


@dataclass(frozen=True, slots=True)
class Face:
    """One face of the combinatorial map."""

    darts: tuple[int, ...]
    boundary: bool

    @property
    def size(self) -> int:
        """Return the number of edges around the face."""
        return len(self.darts)


def _repeat(word: str, n: int) -> str:
    """Repeat every sign of a word n times."""
    return "".join(sign * n for sign in word)


def flip(word: str) -> str:
    """Exchange + and - in a sign word."""
    return word.translate(str.maketrans("+-", "-+"))


def validate_word(word: str) -> str:
    """Return the word when it only contains + and - signs."""
    if any(sign not in "+-" for sign in word):
        raise A2Error(f"Sign word {word!r} may only contain '+' and '-'.")
    return word


class Web:
    """Immutable tangled trivalent graph in a disk."""

    __slots__ = ("mate", "owner", "out", "kind", "ports", "over", "labels", "terminals",
                 "n_bottom", "loops", "_key")

    def __init__(
        self,
        mate: dict[int, int],
        owner: dict[int, int],
        out: dict[int, bool],
        kind: dict[int, str],
        ports: dict[int, tuple[int, ...]],
        over: dict[int, int],
        labels: dict[int, Box],
        terminals: tuple[int, ...],
        n_bottom: int,
        loops: int,
    ) -> None:
        self.mate = mate
        self.owner = owner
        self.out = out
        self.kind = kind
        self.ports = ports
        self.over = over
        self.labels = labels
        self.terminals = terminals
        self.n_bottom = n_bottom
        self.loops = loops
        self._key: Hashable | None = None

    @classmethod
    def empty(cls) -> "Web":
        """Return the empty closed diagram."""
        return cls({}, {}, {}, {}, {}, {}, {}, (), 0, 0)

    def builder(self) -> "WebBuilder":
        """Return a mutable copy."""
        builder = WebBuilder()
        builder.mate = dict(self.mate)
        builder.owner = dict(self.owner)
        builder.out = dict(self.out)
        builder.kind = dict(self.kind)
        builder.ports = {node: list(darts) for node, darts in self.ports.items()}
        builder.over = dict(self.over)
        builder.labels = dict(self.labels)
        builder.terminals = list(self.terminals)
        builder.n_bottom = self.n_bottom
        builder.loops = self.loops
        builder.next_id = max([*self.owner, *self.kind, -1]) + 1
        return builder

    @property
    def bottom_word(self) -> str:
        """Return the bottom sign word read left to right."""
        return "".join(
            "-" if self.out[self.ports[node][0]] else "+"
            for node in self.terminals[: self.n_bottom]
        )

    @property
    def top_word(self) -> str:
        """Return the top sign word read left to right."""
        return "".join(
            "+" if self.out[self.ports[node][0]] else "-"
            for node in reversed(self.terminals[self.n_bottom :])
        )

    @property
    def is_closed(self) -> bool:
        """Return whether the web has no boundary points."""
        return not self.terminals

    def nodes(self, kind: str | None = None) -> list[int]:
        """Return node ids, optionally restricted to one kind."""
        return sorted(node for node, node_kind in self.kind.items() if kind in (None, node_kind))

    @property
    def crossings(self) -> list[int]:
        """Return crossing node ids."""
        return self.nodes("crossing")

    @property
    def boxes(self) -> list[int]:
        """Return box node ids."""
        return self.nodes("box")

    def trivalent_count(self) -> int:
        """Return the number of sources and sinks."""
        return sum(1 for node_kind in self.kind.values() if node_kind in ("source", "sink"))

    def crossing_sign(self, node: int) -> int:
        """Return +1 or -1 for a crossing from its orientation and over strand."""
        return crossing_frame(self, node)[1]

    def components(self) -> list[list[int]]:
        """Return node sets of connected components in ascending order of first node."""
        seen: set[int] = set()
        result = []
        for start in sorted(self.kind):
            if start in seen:
                continue
            component = []
            queue = deque([start])
            seen.add(start)
            while queue:
                node = queue.popleft()
                component.append(node)
                for dart in self.ports[node]:
                    neighbor = self.owner[self.mate[dart]]
                    if neighbor not in seen:
                        seen.add(neighbor)
                        queue.append(neighbor)
            result.append(sorted(component))
        return result

    def key(self) -> Hashable:
        """Return the canonical form used to merge equal terms."""
        if self._key is None:
            self._key = canonical_key(self)
        return self._key

    def __repr__(self) -> str:
        counts = {kind: len(self.nodes(kind)) for kind in ("source", "sink", "crossing", "box")}
        return (
            f"Web(bottom={self.bottom_word!r}, top={self.top_word!r}, "
            f"{', '.join(f'{kind}s={count}' for kind, count in counts.items() if count)}"
            f"{', ' if any(counts.values()) else ''}loops={self.loops})"
        )


class WebBuilder:
    """Mutable half-edge map used to assemble and rewrite webs."""

    def __init__(self) -> None:
        self.mate: dict[int, int] = {}
        self.owner: dict[int, int] = {}
        self.out: dict[int, bool] = {}
        self.kind: dict[int, str] = {}
        self.ports: dict[int, list[int]] = {}
        self.over: dict[int, int] = {}
        self.labels: dict[int, Box] = {}
        self.terminals: list[int] = []
        self.n_bottom = 0
        self.loops = 0
        self.next_id = 0

    def _new_id(self) -> int:
        """Return a fresh id shared by the node and dart namespaces."""
        self.next_id += 1
        return self.next_id - 1

    def add_node(
        self,
        kind: str,
        outs: Sequence[bool],
        over: int | None = None,
        label: Box | None = None,
    ) -> tuple[int, list[int]]:
        """Add a node whose darts follow outs in counterclockwise order."""
        if kind in ("source", "sink"):
            if len(outs) != 3 or len(set(outs)) != 1 or outs[0] != (kind == "source"):
                raise A2Error(f"A {kind} needs three {'out' if kind == 'source' else 'in'} darts.")
        node = self._new_id()
        darts = []
        for is_out in outs:
            dart = self._new_id()
            self.owner[dart] = node
            self.out[dart] = bool(is_out)
            darts.append(dart)
        self.kind[node] = kind
        self.ports[node] = darts
        if kind == "crossing":
            self.over[node] = 0 if over is None else over
        if label is not None:
            self.labels[node] = label
        return node, darts

    def add_terminal(self, out: bool) -> tuple[int, int]:
        """Add a terminal node not yet placed in the boundary order."""
        node, (dart,) = self.add_node("terminal", [out])
        return node, dart

    def connect(self, first: int, second: int) -> None:
        """Join two free darts into one directed edge."""
        if self.out[first] == self.out[second]:
            raise EmbeddingError(
                f"Orientation conflict joining darts {first} and {second}: "
                f"both {'outgoing' if self.out[first] else 'incoming'}."
            )
        self.mate[first] = second
        self.mate[second] = first

    def unlink(self, dart: int) -> int:
        """Detach a dart from its edge and return the former partner."""
        partner = self.mate.pop(dart)
        self.mate.pop(partner, None)
        return partner

    def reroute(self, dart: int, replacement: int) -> None:
        """Move the edge ending at dart so that it ends at replacement instead."""
        partner = self.mate.pop(dart)
        self.mate[partner] = replacement
        self.mate[replacement] = partner
        if self.out[partner] == self.out[replacement]:
            raise EmbeddingError(f"Orientation conflict rerouting dart {dart}.")

    def fuse(self, first: int, second: int) -> None:
        """Remove two darts and join the edges that ended at them."""
        partner_first = self.mate.pop(first)
        if partner_first == second:
            self.mate.pop(second)
            self.loops += 1
            return
        partner_second = self.mate.pop(second)
        self.mate.pop(partner_first, None)
        self.mate.pop(partner_second, None)
        self.connect(partner_first, partner_second)

    def remove_node(self, node: int) -> None:
        """Delete a node whose darts are already detached."""
        for dart in self.ports.pop(node):
            if dart in self.mate:
                raise A2Error(f"Dart {dart} of node {node} is still attached.")
            del self.owner[dart]
            del self.out[dart]
        del self.kind[node]
        self.over.pop(node, None)
        self.labels.pop(node, None)

    def join_terminals(self, first: int, second: int) -> None:
        """Connect two boundary terminals through the outside of the disk."""
        self.fuse(self.ports[first][0], self.ports[second][0])
        for node in (first, second):
            self.remove_node(node)

    def absorb(self, web: Web) -> dict[int, int]:
        """Copy every node of web into this builder and return the id renaming."""
        renaming: dict[int, int] = {}
        for node in sorted(web.kind):
            renaming[node] = self._new_id()
            for dart in web.ports[node]:
                renaming[dart] = self._new_id()
        for node in web.kind:
            new_node = renaming[node]
            self.kind[new_node] = web.kind[node]
            self.ports[new_node] = [renaming[dart] for dart in web.ports[node]]
            for dart in web.ports[node]:
                self.owner[renaming[dart]] = new_node
                self.out[renaming[dart]] = web.out[dart]
            if node in web.over:
                self.over[new_node] = web.over[node]
            if node in web.labels:
                self.labels[new_node] = web.labels[node]
        for dart, partner in web.mate.items():
            self.mate[renaming[dart]] = renaming[partner]
        self.loops += web.loops
        return renaming

    def substitute(self, box: int, web: Web) -> None:
        """Replace a box by a rectangle web whose boundary matches its ports."""
        label = self.labels[box]
        if web.bottom_word != label.bottom or web.top_word != label.top:
            raise BoundaryMismatchError(
                f"Cannot fill box {label.bottom}->{label.top} with web "
                f"{web.bottom_word}->{web.top_word}."
            )
        renaming = self.absorb(web)
        inner = [renaming[node] for node in web.terminals]
        for box_dart, terminal in zip(list(self.ports[box]), inner):
            self.fuse(box_dart, self.ports[terminal][0])
            self.remove_node(terminal)
        self.remove_node(box)

    def freeze(self) -> Web:
        """Return an immutable snapshot."""
        return Web(
            mate=dict(self.mate),
            owner=dict(self.owner),
            out=dict(self.out),
            kind=dict(self.kind),
            ports={node: tuple(darts) for node, darts in self.ports.items()},
            over=dict(self.over),
            labels=dict(self.labels),
            terminals=tuple(self.terminals),
            n_bottom=self.n_bottom,
            loops=self.loops,
        )


def crossing_frame(web: Web | WebBuilder, node: int) -> tuple[tuple[int, int, int, int], int]:
    """Return the crossing darts as (BL, BR, TR, TL) with both strands upward, and its sign."""
    darts = web.ports[node]
    for k in range(4):
        if not web.out[darts[k]] and not web.out[darts[(k + 1) % 4]]:
            frame = tuple(darts[(k + i) % 4] for i in range(4))
            sign = 1 if k % 2 == web.over[node] else -1
            return frame, sign  # type: ignore[return-value]
    raise EmbeddingError(f"Crossing {node} does not carry two transversal strands.")


# Rectangle generators ------------------------------------------------------------------


def _rectangle(
    bottom: str,
    top: str,
    assemble: Callable[[WebBuilder, list[int], list[int]], None],
) -> Web:
    """Build a rectangle: create terminals, then let assemble wire their darts."""
    builder = WebBuilder()
    bottom_darts = []
    bottom_nodes = []
    for sign in bottom:
        node, dart = builder.add_terminal(out=sign == "-")
        bottom_nodes.append(node)
        bottom_darts.append(dart)
    top_darts = []
    top_nodes = []
    for sign in top:
        node, dart = builder.add_terminal(out=sign == "+")
        top_nodes.append(node)
        top_darts.append(dart)
    assemble(builder, bottom_darts, top_darts)
    builder.terminals = bottom_nodes + top_nodes[::-1]
    builder.n_bottom = len(bottom)
    return builder.freeze()


def identity(word: str) -> Web:
    """Return parallel straight strands on a sign word."""

    def assemble(builder: WebBuilder, bottom: list[int], top: list[int]) -> None:
        for lower, upper in zip(bottom, top):
            builder.connect(lower, upper)

    return _rectangle(validate_word(word), word, assemble)


def _pad(word: str, j: int, width: int, gadget: Web) -> Web:
    """Tensor a gadget acting on word[j:j+width] with identities on both sides."""
    return tensor(tensor(identity(word[:j]), gadget), identity(word[j + width :]))


def _check_position(word: str, j: int, width: int) -> None:
    """Validate that positions j..j+width-1 exist."""
    if j < 0 or j + width > len(word):
        raise A2Error(f"Position {j} out of range for word {word!r}.")


def h_web(word: str, j: int) -> Web:
    """Return the H web joining same-sign strands j and j+1 through two vertices."""
    _check_position(word, j, 2)
    sign = word[j]
    if word[j + 1] != sign:
        raise A2Error(f"H web needs equal signs at positions {j}, {j + 1} of {word!r}.")
    upward = sign == "-"

    def assemble(builder: WebBuilder, bottom: list[int], top: list[int]) -> None:
        _, (lower_right, lower_mid, lower_left) = builder.add_node(
            "sink" if upward else "source", [not upward] * 3
        )
        _, (upper_right, upper_left, upper_mid) = builder.add_node(
            "source" if upward else "sink", [upward] * 3
        )
        builder.connect(bottom[0], lower_left)
        builder.connect(bottom[1], lower_right)
        builder.connect(top[0], upper_left)
        builder.connect(top[1], upper_right)
        builder.connect(lower_mid, upper_mid)

    return _pad(word, j, 2, _rectangle(sign * 2, sign * 2, assemble))


def merge_web(word: str, j: int) -> Web:
    """Return the fork joining same-sign strands j, j+1 into one strand of opposite sign."""
    _check_position(word, j, 2)
    sign = word[j]
    if word[j + 1] != sign:
        raise A2Error(f"Merge needs equal signs at positions {j}, {j + 1} of {word!r}.")
    upward = sign == "-"

    def assemble(builder: WebBuilder, bottom: list[int], top: list[int]) -> None:
        _, (right, up, left) = builder.add_node("sink" if upward else "source", [not upward] * 3)
        builder.connect(bottom[0], left)
        builder.connect(bottom[1], right)
        builder.connect(top[0], up)

    return _pad(word, j, 2, _rectangle(sign * 2, flip(sign), assemble))


def split_web(word: str, j: int) -> Web:
    """Return the fork turning strand j into two strands of opposite sign."""
    _check_position(word, j, 1)
    sign = word[j]
    downward = sign == "+"

    def assemble(builder: WebBuilder, bottom: list[int], top: list[int]) -> None:
        _, (right, left, down) = builder.add_node(
            "source" if downward else "sink", [downward] * 3
        )
        builder.connect(bottom[0], down)
        builder.connect(top[0], left)
        builder.connect(top[1], right)

    return _pad(word, j, 1, _rectangle(sign, flip(sign) * 2, assemble))


def cap_web(word: str, j: int) -> Web:
    """Return the turnback joining opposite-sign bottom strands j and j+1."""
    _check_position(word, j, 2)
    if word[j] == word[j + 1]:
        raise A2Error(f"Cap needs opposite signs at positions {j}, {j + 1} of {word!r}.")

    def assemble(builder: WebBuilder, bottom: list[int], top: list[int]) -> None:
        del top
        builder.connect(bottom[0], bottom[1])

    return _pad(word, j, 2, _rectangle(word[j : j + 2], "", assemble))


def cup_web(word: str, j: int, pair: str) -> Web:
    """Return the turnback creating the opposite-sign pair at top positions j, j+1."""
    if len(pair) != 2 or pair[0] == pair[1]:
        raise A2Error(f"Cup pair must be '-+' or '+-', got {pair!r}.")
    if j < 0 or j > len(word):
        raise A2Error(f"Position {j} out of range for word {word!r}.")

    def assemble(builder: WebBuilder, bottom: list[int], top: list[int]) -> None:
        del bottom
        builder.connect(top[0], top[1])

    gadget = _rectangle("", validate_word(pair), assemble)
    return tensor(tensor(identity(word[:j]), gadget), identity(word[j:]))


def stair_web(word: str, j: int) -> Web:
    """Return the two-vertex exchange of opposite-sign strands j and j+1."""
    _check_position(word, j, 2)
    left_sign, right_sign = word[j], word[j + 1]
    if left_sign == right_sign:
        raise A2Error(f"Stair step needs opposite signs at positions {j}, {j + 1} of {word!r}.")
    left_is_sink = left_sign == "-"

    def assemble(builder: WebBuilder, bottom: list[int], top: list[int]) -> None:
        _, (left_mid, left_up, left_down) = builder.add_node(
            "sink" if left_is_sink else "source", [not left_is_sink] * 3
        )
        _, (right_up, right_mid, right_down) = builder.add_node(
            "source" if left_is_sink else "sink", [left_is_sink] * 3
        )
        builder.connect(bottom[0], left_down)
        builder.connect(top[0], left_up)
        builder.connect(bottom[1], right_down)
        builder.connect(top[1], right_up)
        builder.connect(left_mid, right_mid)

    return _pad(word, j, 2, _rectangle(left_sign + right_sign, right_sign + left_sign, assemble))


def crossing_web(word: str, j: int, over: Over = "\\") -> Web:
    """Return a crossing exchanging strands j and j+1, over strand on the given diagonal."""
    _check_position(word, j, 2)
    left_sign, right_sign = word[j], word[j + 1]

    def assemble(builder: WebBuilder, bottom: list[int], top: list[int]) -> None:
        outs = [left_sign == "+", right_sign == "+", left_sign == "-", right_sign == "-"]
        _, (lower_left, lower_right, upper_right, upper_left) = builder.add_node(
            "crossing", outs, over=1 if over == "\\" else 0
        )
        builder.connect(bottom[0], lower_left)
        builder.connect(bottom[1], lower_right)
        builder.connect(top[1], upper_right)
        builder.connect(top[0], upper_left)

    return _pad(word, j, 2, _rectangle(left_sign + right_sign, right_sign + left_sign, assemble))


def box_web(label: Box) -> Web:
    """Return a rectangle holding a single box node."""

    def assemble(builder: WebBuilder, bottom: list[int], top: list[int]) -> None:
        outs = [sign == "+" for sign in label.bottom] + [
            sign == "-" for sign in reversed(label.top)
        ]
        _, darts = builder.add_node("box", outs, label=label)
        for dart, terminal in zip(darts, bottom + top[::-1]):
            builder.connect(terminal, dart)

    return _rectangle(validate_word(label.bottom), validate_word(label.top), assemble)


def circle() -> Web:
    """Return a single closed loop."""
    return closure(identity("-"))


def theta() -> Web:
    """Return the closed theta web with one source and one sink."""
    return closure(compose(split_web("+", 0), merge_web("--", 0)))


# Gluing ---------------------------------------------------------------------------------


def compose(lower: Web, upper: Web) -> Web:
    """Stack upper on top of lower, gluing the top word of lower to the bottom word of upper."""
    lower_top, upper_bottom = lower.top_word, upper.bottom_word
    if lower_top != upper_bottom:
        position = next(
            (i for i, (a, b) in enumerate(zip(lower_top, upper_bottom)) if a != b),
            min(len(lower_top), len(upper_bottom)),
        )
        raise BoundaryMismatchError(
            f"Cannot compose: top word {lower_top!r} differs from bottom word "
            f"{upper_bottom!r} at point {position}."
        )
    builder = lower.builder()
    renaming = builder.absorb(upper)
    lower_top_nodes = list(reversed(lower.terminals[lower.n_bottom :]))
    upper_bottom_nodes = [renaming[node] for node in upper.terminals[: upper.n_bottom]]
    for first, second in zip(lower_top_nodes, upper_bottom_nodes):
        builder.join_terminals(first, second)
    builder.terminals = list(lower.terminals[: lower.n_bottom]) + [
        renaming[node] for node in upper.terminals[upper.n_bottom :]
    ]
    builder.n_bottom = lower.n_bottom
    return builder.freeze()


def compose_all(webs: Iterable[Web]) -> Web:
    """Compose webs listed from bottom to top."""
    iterator = iter(webs)
    result = next(iterator)
    for web in iterator:
        result = compose(result, web)
    return result


def tensor(left: Web, right: Web) -> Web:
    """Place two rectangles side by side."""
    if not right.kind and not right.loops:
        return left
    if not left.kind and not left.loops:
        return right
    builder = left.builder()
    renaming = builder.absorb(right)
    right_terminals = [renaming[node] for node in right.terminals]
    builder.terminals = (
        list(left.terminals[: left.n_bottom])
        + right_terminals
        + list(left.terminals[left.n_bottom :])
    )
    builder.n_bottom = left.n_bottom + right.n_bottom
    return builder.freeze()


def closure(web: Web) -> Web:
    """Connect top point i to bottom point i around the disk."""
    if web.bottom_word != web.top_word:
        raise BoundaryMismatchError(
            f"Cannot close: bottom word {web.bottom_word!r} differs from top word "
            f"{web.top_word!r}."
        )
    return partial_closure(web, web.n_bottom)


def partial_closure(web: Web, count: int, side: Literal["left", "right"] = "left") -> Web:
    """Close count outermost strands around the left or the right side of the disk."""
    bottom, top = web.bottom_word, web.top_word
    if side == "left":
        matching = bottom[:count] == top[:count]
    else:
        matching = bottom[len(bottom) - count :] == top[len(top) - count :]
    if count > min(len(bottom), len(top)) or not matching:
        raise BoundaryMismatchError(
            f"Cannot close {count} strand(s) of {bottom!r} -> {top!r} on the {side}."
        )
    builder = web.builder()
    bottom_nodes = list(web.terminals[: web.n_bottom])
    top_nodes = list(reversed(web.terminals[web.n_bottom :]))
    if side == "right":
        bottom_nodes.reverse()
        top_nodes.reverse()
    for i in range(count):
        builder.join_terminals(bottom_nodes[i], top_nodes[i])
    kept_bottom, kept_top = bottom_nodes[count:], top_nodes[count:]
    if side == "right":
        kept_bottom.reverse()
        kept_top.reverse()
    builder.terminals = kept_bottom + list(reversed(kept_top))
    builder.n_bottom = web.n_bottom - count
    return builder.freeze()


def mirror(web: Web) -> Web:
    """Reflect top to bottom and reverse every orientation."""
    builder = web.builder()
    for node, darts in builder.ports.items():
        darts.reverse()
        if builder.kind[node] == "source":
            builder.kind[node] = "sink"
        elif builder.kind[node] == "sink":
            builder.kind[node] = "source"
        elif builder.kind[node] == "crossing":
            builder.over[node] = 1 - builder.over[node]
    for dart in builder.out:
        builder.out[dart] = not builder.out[dart]
    for node, label in builder.labels.items():
        builder.labels[node] = Box(label.tag, label.top, label.bottom, label.data)
    builder.terminals.reverse()
    builder.n_bottom = len(web.terminals) - web.n_bottom
    return builder.freeze()


def cable(web: Web, n: int) -> Web:
    """Replace every strand by n parallel copies and every crossing by an n-by-n grid."""
    if n < 1:
        raise A2Error(f"Cabling needs n >= 1, got {n}.")
    if web.trivalent_count():
        raise A2Error("Only flat diagrams without trivalent vertices can be cabled.")
    if n == 1:
        return web
    builder = WebBuilder()
    copies: dict[int, list[int]] = {}
    terminal_groups: dict[int, list[int]] = {}
    for node in sorted(web.kind):
        kind = web.kind[node]
        darts = web.ports[node]
        if kind == "crossing":
            grid = {
                (x, y): builder.add_node("crossing", [web.out[d] for d in darts],
                                         over=web.over[node])[1]
                for x in range(n)
                for y in range(n)
            }
            for x in range(n):
                for y in range(n):
                    if y + 1 < n:
                        builder.connect(grid[x, y][2], grid[x, y + 1][0])
                    if x + 1 < n:
                        builder.connect(grid[x, y][1], grid[x + 1, y][3])
            copies[darts[0]] = [grid[j, 0][0] for j in range(n)]
            copies[darts[1]] = [grid[n - 1, j][1] for j in range(n)]
            copies[darts[2]] = [grid[n - 1 - j, n - 1][2] for j in range(n)]
            copies[darts[3]] = [grid[0, n - 1 - j][3] for j in range(n)]
        elif kind == "terminal":
            (dart,) = darts
            group = []
            local = []
            for _ in range(n):
                new_node, new_dart = builder.add_terminal(web.out[dart])
                group.append(new_node)
                local.append(new_dart)
            terminal_groups[node] = group
            copies[dart] = local[::-1]
        elif kind == "box":
            outs = [web.out[d] for d in darts for _ in range(n)]
            _, new_darts = builder.add_node("box", outs, label=web.labels[node].cabled(n))
            for i, dart in enumerate(darts):
                copies[dart] = new_darts[i * n : (i + 1) * n]
        else:
            raise A2Error(f"Cannot cable node kind {kind}.")
    for dart, partner in web.mate.items():
        if dart < partner:
            for k in range(n):
                builder.connect(copies[dart][k], copies[partner][n - 1 - k])
    for node in web.terminals:
        builder.terminals.extend(terminal_groups[node])
    builder.n_bottom = web.n_bottom * n
    builder.loops = web.loops * n
    return builder.freeze()


# Faces and canonical forms --------------------------------------------------------------


def faces(web: Web | WebBuilder) -> list[Face]:
    """Trace every face of every component and check the Euler relation."""
    position = {
        dart: index for darts in web.ports.values() for index, dart in enumerate(darts)
    }
    seen: set[int] = set()
    traced: list[Face] = []
    face_owner: list[int] = []
    component_of: dict[int, int] = {}
    for index, component in enumerate(_components(web)):
        for node in component:
            component_of[node] = index
    for start in sorted(position):
        if start in seen:
            continue
        darts = []
        dart = start
        boundary = False
        while dart not in seen:
            seen.add(dart)
            darts.append(dart)
            partner = web.mate[dart]
            node = web.owner[partner]
            if web.kind[node] == "terminal" or web.kind[web.owner[dart]] == "terminal":
                boundary = True
            ring = web.ports[node]
            dart = ring[(position[partner] - 1) % len(ring)]
        if dart != start:
            raise EmbeddingError("Rotation data does not define a permutation of darts.")
        traced.append(Face(tuple(darts), boundary))
        face_owner.append(component_of[web.owner[start]])
    counts: dict[int, list[int]] = {}
    for node, index in component_of.items():
        entry = counts.setdefault(index, [0, 0, 0])
        entry[0] += 1
        entry[1] += len(web.ports[node])
    for index in face_owner:
        counts[index][2] += 1
    for index, (vertices, darts, face_count) in counts.items():
        if vertices - darts // 2 + face_count != 2:
            raise EmbeddingError(
                f"Component {index} is not planar: V - E + F = "
                f"{vertices - darts // 2 + face_count}."
            )
    return traced


def _components(web: Web | WebBuilder) -> list[list[int]]:
    """Return connected node sets for frozen or mutable webs."""
    seen: set[int] = set()
    result = []
    for start in sorted(web.kind):
        if start in seen:
            continue
        component = []
        queue = deque([start])
        seen.add(start)
        while queue:
            node = queue.popleft()
            component.append(node)
            for dart in web.ports[node]:
                neighbor = web.owner[web.mate[dart]]
                if neighbor not in seen:
                    seen.add(neighbor)
                    queue.append(neighbor)
        result.append(component)
    return result


def _signature(web: Web, node: int, start: int, terminal_index: dict[int, int]) -> tuple:
    """Encode a node relative to the dart it was entered through."""
    kind = web.kind[node]
    code = _KIND_CODES[kind]
    if kind == "crossing":
        return (code, (web.over[node] - start) % 2)
    if kind == "terminal":
        return (code, terminal_index[node])
    if kind == "box":
        return (code, start, web.labels[node].key())
    return (code,)


def _traverse(web: Web, roots: Iterable[int], terminal_index: dict[int, int]) -> tuple:
    """Breadth-first code of the nodes reachable from the root darts, in root order."""
    ids: dict[int, int] = {}
    entry: dict[int, int] = {}
    code = []
    queue: deque[int] = deque()
    for root in roots:
        node = web.owner[root]
        if node in ids:
            continue
        ids[node] = len(ids)
        entry[node] = root
        queue.append(node)
        while queue:
            current = queue.popleft()
            ring = web.ports[current]
            start = ring.index(entry[current])
            row: list[tuple] = [_signature(web, current, start, terminal_index)]
            for step in range(len(ring)):
                dart = ring[(start + step) % len(ring)]
                partner = web.mate[dart]
                neighbor = web.owner[partner]
                if neighbor not in ids:
                    ids[neighbor] = len(ids)
                    entry[neighbor] = partner
                    queue.append(neighbor)
                other = web.ports[neighbor]
                offset = (other.index(partner) - other.index(entry[neighbor])) % len(other)
                row.append((ids[neighbor], offset, web.out[dart]))
            code.append(tuple(row))
    return tuple(code)


def closed_component_key(web: Web, component: Sequence[int]) -> tuple:
    """Return the least traversal code of a closed component over its rarest node class."""
    classes: dict[tuple, list[int]] = {}
    for node in component:
        kind = web.kind[node]
        label = web.labels[node].key() if kind == "box" else ()
        classes.setdefault((_KIND_CODES[kind], label), []).append(node)
    rarest = min(classes.values(), key=len)
    best: tuple | None = None
    for node in rarest:
        for dart in web.ports[node]:
            code = _traverse(web, [dart], {})
            if best is None or code < best:
                best = code
    return best if best is not None else ()


def canonical_key(web: Web) -> Hashable:
    """Return a key equal for webs that differ only by node and dart numbering."""
    terminal_index = {node: index for index, node in enumerate(web.terminals)}
    anchored = _traverse(web, [web.ports[node][0] for node in web.terminals], terminal_index)
    reached: set[int] = set()
    if web.terminals:
        for component in web.components():
            if any(web.kind[node] == "terminal" for node in component):
                reached.update(component)
    closed = sorted(
        closed_component_key(web, component)
        for component in web.components()
        if component[0] not in reached
    )
    return (web.n_bottom, anchored, tuple(closed), web.loops)


def restrict(web: Web, component: Sequence[int]) -> Web:
    """Return the closed sub-web spanned by one connected component."""
    nodes = set(component)
    darts = {dart for node in nodes for dart in web.ports[node]}
    return Web(
        mate={dart: web.mate[dart] for dart in darts},
        owner={dart: web.owner[dart] for dart in darts},
        out={dart: web.out[dart] for dart in darts},
        kind={node: web.kind[node] for node in nodes},
        ports={node: web.ports[node] for node in nodes},
        over={node: web.over[node] for node in nodes if node in web.over},
        labels={node: web.labels[node] for node in nodes if node in web.labels},
        terminals=(),
        n_bottom=0,
        loops=0,
    )


# Linear combinations --------------------------------------------------------------------


class WebSum:
    """Finite linear combination of webs over a common boundary.

    Coefficients are stored as polynomial numerators over one shared denominator, so
    clasp coefficients such as [m]/[m+1] stay exact without per-term fractions.
    """

    __slots__ = ("bottom", "top", "denominator", "_terms")

    def __init__(self, bottom: str = "", top: str = "", denominator: Scalar | None = None) -> None:
        self.bottom = bottom
        self.top = top
        self.denominator = denominator if denominator is not None else Scalar.one()
        self._terms: dict[Hashable, tuple[Scalar, Web]] = {}

    @classmethod
    def of(cls, web: Web, coefficient: RationalScalar | Scalar | Coefficient = 1) -> "WebSum":
        """Return a one-term sum."""
        rational = RationalScalar.coerce(coefficient)
        result = cls(web.bottom_word, web.top_word, rational.den)
        result.add_term(rational.num, web)
        return result

    @classmethod
    def scalar(cls, value: RationalScalar | Scalar | Coefficient) -> "WebSum":
        """Return value times the empty diagram."""
        return cls.of(Web.empty(), value)

    def copy(self) -> "WebSum":
        """Return a shallow copy."""
        result = WebSum(self.bottom, self.top, self.denominator)
        result._terms = dict(self._terms)
        return result

    def add_term(self, numerator: Scalar, web: Web) -> None:
        """Add numerator / denominator times web in place."""
        if web.bottom_word != self.bottom or web.top_word != self.top:
            raise BoundaryMismatchError(
                f"Term {web.bottom_word!r}->{web.top_word!r} does not match sum boundary "
                f"{self.bottom!r}->{self.top!r}."
            )
        if numerator.is_zero():
            return
        key = web.key()
        if key in self._terms:
            total = self._terms[key][0] + numerator
            if total.is_zero():
                del self._terms[key]
            else:
                self._terms[key] = (total, self._terms[key][1])
        else:
            self._terms[key] = (numerator, web)

    def terms(self) -> list[tuple[Scalar, Web]]:
        """Return (numerator, web) pairs in canonical order."""
        return [self._terms[key] for key in sorted(self._terms, key=repr)]

    def items(self) -> list[tuple[RationalScalar, Web]]:
        """Return (coefficient, web) pairs in canonical order."""
        return [(RationalScalar(num, self.denominator), web) for num, web in self.terms()]

    def coefficient(self, web: Web) -> RationalScalar:
        """Return the coefficient of a web, zero when absent."""
        numerator = self._terms.get(web.key(), (Scalar.zero(), web))[0]
        return RationalScalar(numerator, self.denominator)

    def is_zero(self) -> bool:
        """Return whether no term survives."""
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def _rebased(self, denominator: Scalar) -> "WebSum":
        """Return the same sum written over a multiple of its denominator."""
        if denominator == self.denominator:
            return self
        factor = denominator.divide(self.denominator)
        result = WebSum(self.bottom, self.top, denominator)
        for num, web in self._terms.values():
            result.add_term(num * factor, web)
        return result

    def __add__(self, other: "WebSum") -> "WebSum":
        if (self.bottom, self.top) != (other.bottom, other.top):
            raise BoundaryMismatchError(
                f"Cannot add sums over {self.bottom!r}->{self.top!r} and "
                f"{other.bottom!r}->{other.top!r}."
            )
        common = common_denominator(self.denominator, other.denominator)
        result = self._rebased(common).copy()
        for num, web in other._rebased(common)._terms.values():
            result.add_term(num, web)
        return result

    def __neg__(self) -> "WebSum":
        return self.scaled(-1)

    def __sub__(self, other: "WebSum") -> "WebSum":
        return self + (-other)

    def scaled(self, factor: RationalScalar | Scalar | Coefficient) -> "WebSum":
        """Multiply every coefficient by factor."""
        rational = RationalScalar.coerce(factor)
        result = WebSum(self.bottom, self.top, self.denominator * rational.den)
        for num, web in self._terms.values():
            result.add_term(num * rational.num, web)
        return result.simplified() if not rational.den.is_monomial() else result

    __mul__ = scaled
    __rmul__ = scaled

    def simplified(self) -> "WebSum":
        """Cancel common factors between the numerators and the denominator."""
        if self.denominator == Scalar.one():
            return self
        if not self._terms:
            return WebSum(self.bottom, self.top)
        common = self.denominator
        for num, _ in self._terms.values():
            if common.is_monomial() and common.coefficient(common.min_sixth) == 1:
                break
            common = scalar_gcd(common, num)
        result = WebSum(self.bottom, self.top, self.denominator.divide(common))
        for num, web in self._terms.values():
            result.add_term(num.divide(common), web)
        return result

    def map_terms(self, transform: Callable[[Web], "WebSum"]) -> "WebSum":
        """Extend a web-to-sum map linearly."""
        result: WebSum | None = None
        for num, web in self.terms():
            image = transform(web).scaled(num)
            result = image if result is None else result + image
        if result is None:
            return WebSum(self.bottom, self.top)
        return result.scaled(RationalScalar(1, self.denominator))

    def __repr__(self) -> str:
        return (
            f"WebSum({self.bottom!r}->{self.top!r}, terms={len(self._terms)}, "
            f"denominator={self.denominator})"
        )


def scalar_gcd(first: Scalar, second: Scalar) -> Scalar:
    """Return a gcd of two scalars normalized to a monic polynomial."""
    if first.is_zero():
        return second
    if second.is_zero():
        return first
    first_poly, _ = first.to_poly()
    second_poly, _ = second.to_poly()
    common = Scalar.from_poly(first_poly.gcd(second_poly))
    return common if not common.is_zero() else Scalar.one()


def common_denominator(first: Scalar, second: Scalar) -> Scalar:
    """Return a common multiple of two denominators."""
    if first == second:
        return first
    if second == Scalar.one():
        return first
    if first == Scalar.one():
        return second
    return (first * second).divide(scalar_gcd(first, second))


def sum_compose(lower: WebSum, upper: WebSum) -> WebSum:
    """Bilinear vertical stacking of two sums."""
    if lower.top != upper.bottom:
        raise BoundaryMismatchError(
            f"Cannot compose sums: top word {lower.top!r} differs from bottom word "
            f"{upper.bottom!r}."
        )
    result = WebSum(lower.bottom, upper.top, lower.denominator * upper.denominator)
    for num_lower, web_lower in lower.terms():
        for num_upper, web_upper in upper.terms():
            result.add_term(num_lower * num_upper, compose(web_lower, web_upper))
    return result.simplified()


def sum_compose_all(sums: Iterable[WebSum | Web]) -> WebSum:
    """Compose sums and webs listed from bottom to top."""
    result: WebSum | None = None
    for item in sums:
        current = item if isinstance(item, WebSum) else WebSum.of(item)
        result = current if result is None else sum_compose(result, current)
    if result is None:
        raise A2Error("Nothing to compose.")
    return result


def sum_tensor(left: WebSum, right: WebSum) -> WebSum:
    """Bilinear side-by-side placement of two sums."""
    result = WebSum(
        left.bottom + right.bottom, left.top + right.top, left.denominator * right.denominator
    )
    for num_left, web_left in left.terms():
        for num_right, web_right in right.terms():
            result.add_term(num_left * num_right, tensor(web_left, web_right))
    return result.simplified()


def sum_closure(total: WebSum) -> WebSum:
    """Close every term of a sum."""
    result = WebSum("", "", total.denominator)
    for num, web in total.terms():
        result.add_term(num, closure(web))
    return result


def sum_partial_closure(
    total: WebSum, count: int, side: Literal["left", "right"] = "left"
) -> WebSum:
    """Close count outermost strands of every term on the given side."""
    if side == "left":
        bottom, top = total.bottom[count:], total.top[count:]
    else:
        bottom, top = total.bottom[: len(total.bottom) - count], total.top[: len(total.top) - count]
    result = WebSum(bottom, top, total.denominator)
    for num, web in total.terms():
        result.add_term(num, partial_closure(web, count, side))
    return result


def sum_mirror(total: WebSum) -> WebSum:
    """Mirror every term of a sum."""
    result = WebSum(total.top, total.bottom, total.denominator)
    for num, web in total.terms():
        result.add_term(num, mirror(web))
    return result
