"""Skein rewriting: resolve crossings, remove loops, bigons and squares, evaluate closed webs."""

import random
import threading
from collections import OrderedDict
from collections.abc import Callable, Hashable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial

from a2_spider.config import RewriteTrace, Settings, TraceStep
from a2_spider.errors import A2Error, UnknownNameError
from a2_spider.qalg import RationalScalar, Scalar, qint
from a2_spider.web import (
    Face,
    Web,
    WebSum,
    closed_component_key,
    crossing_frame,
    faces,
    restrict,
)

Expansion = list[tuple[Scalar, Web]]

_PRIORITY = {"kink": 0, "twist": 1, "bigon": 2, "square": 3, "crossing": 4}


class EvaluationCache:
    """Thread-safe least-recently-used memo of closed component values."""

    def __init__(self) -> None:
        self._values: OrderedDict[Hashable, Scalar] = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, key: Hashable) -> Scalar | None:
        """Return a memoized value and mark it as recently used."""
        with self._lock:
            value = self._values.get(key)
            if value is None:
                self.misses += 1
                return None
            self._values.move_to_end(key)
            self.hits += 1
            return value

    def put(self, key: Hashable, value: Scalar) -> None:
        """Store a value, evicting the least recently used entries beyond the limit."""
        with self._lock:
            self._values[key] = value
            self._values.move_to_end(key)
            limit = Settings.cache_size()
            while len(self._values) > limit:
                self._values.popitem(last=False)

    def clear(self) -> None:
        """Drop every entry and reset the counters."""
        with self._lock:
            self._values.clear()
            self.hits = 0
            self.misses = 0

    def __len__(self) -> int:
        with self._lock:
            return len(self._values)


CACHE = EvaluationCache()


@dataclass(frozen=True, slots=True)
class Rewrite:
    """One applicable local relation."""

    rule: str
    location: tuple[int, ...]
    apply: Callable[[], Expansion]

    @property
    def family(self) -> str:
        """Return the rule name without its crossing sign."""
        return self.rule.rstrip("+-")

    def describe(self) -> str:
        """Render the location for trace lines."""
        return f"{self.family} at node(s) {', '.join(str(node) for node in self.location)}"


# Local relations -----------------------------------------------------------------------


def _third_port(web: Web, node: int, used: Sequence[int]) -> int:
    """Return the port of a trivalent node not listed in used."""
    (port,) = [dart for dart in web.ports[node] if dart not in used]
    return port


def _resolve(web: Web, node: int) -> Expansion:
    """Expand a crossing into its oriented smoothing and its two-vertex web."""
    (lower_left, lower_right, upper_right, upper_left), sign = crossing_frame(web, node)
    smoothing = web.builder()
    smoothing.fuse(lower_right, upper_right)
    smoothing.fuse(lower_left, upper_left)
    smoothing.remove_node(node)
    double = web.builder()
    _, (sink_right, sink_mid, sink_left) = double.add_node("sink", [False] * 3)
    _, (source_right, source_left, source_mid) = double.add_node("source", [True] * 3)
    double.reroute(lower_right, sink_right)
    double.reroute(lower_left, sink_left)
    double.reroute(upper_right, source_right)
    double.reroute(upper_left, source_left)
    double.connect(sink_mid, source_mid)
    double.remove_node(node)
    return [
        (Scalar.monomial(2 * sign), smoothing.freeze()),
        (Scalar.monomial(-sign, -1), double.freeze()),
    ]


def _kink(web: Web, node: int, loop_start: int) -> Expansion:
    """Remove a curl whose adjacent crossing ports are joined to each other."""
    sign = crossing_frame(web, node)[1]
    darts = web.ports[node]
    builder = web.builder()
    builder.unlink(darts[loop_start])
    builder.fuse(darts[(loop_start + 2) % 4], darts[(loop_start + 3) % 4])
    builder.remove_node(node)
    return [(Scalar.monomial(8 * sign), builder.freeze())]


def _vertex_twist(web: Web, crossing: int, face: Face) -> Expansion:
    """Untwist two strands that cross right before meeting at one trivalent vertex."""
    at_crossing = next(dart for dart in face.darts if web.owner[dart] == crossing)
    at_vertex = next(dart for dart in face.darts if web.owner[dart] != crossing)
    sign = crossing_frame(web, crossing)[1]
    ring = web.ports[crossing]
    first, second = at_crossing, web.mate[at_vertex]
    vertex_first, vertex_second = web.mate[first], at_vertex
    opposite_first = ring[(ring.index(first) + 2) % 4]
    opposite_second = ring[(ring.index(second) + 2) % 4]
    builder = web.builder()
    builder.unlink(first)
    builder.unlink(second)
    far_first = builder.unlink(opposite_first)
    far_second = builder.unlink(opposite_second)
    builder.connect(vertex_first, far_second)
    builder.connect(vertex_second, far_first)
    builder.remove_node(crossing)
    return [(Scalar.monomial(-4 * sign, -1), builder.freeze())]


def _bigon(web: Web, face: Face) -> Expansion:
    """Collapse a bigon between a source and a sink into one edge times [2]."""
    first, second = face.darts
    left, right = web.owner[first], web.owner[second]
    left_free = _third_port(web, left, (first, web.mate[second]))
    right_free = _third_port(web, right, (second, web.mate[first]))
    builder = web.builder()
    builder.unlink(first)
    builder.unlink(second)
    builder.fuse(left_free, right_free)
    builder.remove_node(left)
    builder.remove_node(right)
    return [(qint(2), builder.freeze())]


def _square(web: Web, face: Face) -> Expansion:
    """Replace a square by the sum of its two pairs of parallel arcs."""
    darts = face.darts
    nodes = [web.owner[dart] for dart in darts]
    free = [
        _third_port(web, nodes[i], (darts[i], web.mate[darts[i - 1]])) for i in range(4)
    ]
    results: Expansion = []
    for pairs in (((0, 1), (2, 3)), ((1, 2), (3, 0))):
        builder = web.builder()
        for dart in darts:
            if dart in builder.mate:
                builder.unlink(dart)
        for first, second in pairs:
            builder.fuse(free[first], free[second])
        for node in nodes:
            builder.remove_node(node)
        results.append((Scalar.one(), builder.freeze()))
    return results


def find_rewrites(web: Web) -> list[Rewrite]:
    """Return every applicable local relation in priority order."""
    found: list[Rewrite] = []
    crossing_faces: dict[int, int] = {}
    for face in faces(web):
        nodes = [web.owner[dart] for dart in face.darts]
        for node in nodes:
            if web.kind[node] == "crossing":
                crossing_faces[node] = min(crossing_faces.get(node, face.size), face.size)
        if face.boundary:
            continue
        kinds = [web.kind[node] for node in nodes]
        if face.size == 1 and kinds[0] == "crossing":
            (dart,) = face.darts
            ring = web.ports[nodes[0]]
            index = ring.index(dart)
            start = index if ring[(index + 1) % 4] == web.mate[dart] else (index - 1) % 4
            sign = "+" if web.crossing_sign(nodes[0]) > 0 else "-"
            found.append(
                Rewrite(f"kink{sign}", (nodes[0],), partial(_kink, web, nodes[0], start))
            )
        elif face.size == 2 and sorted(kinds) in (["crossing", "sink"], ["crossing", "source"]):
            crossing = nodes[kinds.index("crossing")]
            sign = "+" if web.crossing_sign(crossing) > 0 else "-"
            found.append(
                Rewrite(
                    f"twist{sign}",
                    tuple(sorted(nodes)),
                    partial(_vertex_twist, web, crossing, face),
                )
            )
        elif face.size == 2 and sorted(kinds) == ["sink", "source"]:
            found.append(Rewrite("bigon", tuple(sorted(nodes)), partial(_bigon, web, face)))
        elif (
            face.size == 4
            and len(set(nodes)) == 4
            and all(kind in ("source", "sink") for kind in kinds)
        ):
            found.append(Rewrite("square", tuple(sorted(nodes)), partial(_square, web, face)))
    for node in sorted(crossing_faces, key=lambda node: (crossing_faces[node], node)):
        sign = "+" if web.crossing_sign(node) > 0 else "-"
        found.append(Rewrite(f"crossing{sign}", (node,), partial(_resolve, web, node)))
    # On a sphere two faces can share their nodes; one rewrite per node set is enough.
    seen: set[tuple[str, tuple[int, ...]]] = set()
    unique: list[Rewrite] = []
    for rewrite in found:
        if (rewrite.family, rewrite.location) not in seen:
            seen.add((rewrite.family, rewrite.location))
            unique.append(rewrite)
    unique.sort(key=lambda rewrite: _PRIORITY[rewrite.family])
    return unique


def _without_loops(web: Web) -> tuple[Scalar, Web]:
    """Factor every free loop out as [3]."""
    if not web.loops:
        return Scalar.one(), web
    builder = web.builder()
    builder.loops = 0
    return qint(3) ** web.loops, builder.freeze()


# Public operations ---------------------------------------------------------------------


def resolve_crossing(web: Web, crossing: int) -> WebSum:
    """Apply the crossing relation at one crossing."""
    if web.kind.get(crossing) != "crossing":
        raise UnknownNameError(f"Node {crossing} is not a crossing of this web.")
    result = WebSum(web.bottom_word, web.top_word)
    for coefficient, term in _resolve(web, crossing):
        result.add_term(coefficient, term)
    return result


def _choose(
    rewrites: list[Rewrite],
    rng: random.Random | None,
    replay: TraceStep | None,
) -> int:
    """Pick the index of the rewrite to apply."""
    if replay is not None:
        return replay["choice"]
    if rng is not None:
        return rng.randrange(len(rewrites))
    return 0


def reduce(
    total: WebSum,
    trace: RewriteTrace | None = None,
    rng: random.Random | None = None,
    replay: Sequence[TraceStep] | None = None,
) -> WebSum:
    """Rewrite every term until only basis webs remain.

    Terms are reduced level by level and merged by canonical form after each level.
    Each pending term receives exactly one rewrite per level, chosen by priority, by
    rng when given, or by the recorded choices of replay.
    """
    pending = total
    output = WebSum(total.bottom, total.top, total.denominator)
    recorded = (
        iter([step for step in replay if step["rule"] != "circle"]) if replay is not None else None
    )
    level = 0
    while not pending.is_zero():
        terms = pending.terms()
        plans: list[tuple[int, Scalar, Web, Rewrite | None, int]] = []
        for index, (numerator, web) in enumerate(terms):
            factor, web = _without_loops(web)
            if trace is not None and factor != Scalar.one():
                trace.add(TraceStep(level=level, rule="circle", location=f"term {index}",
                                    terms=1, term=index, choice=-1))
            rewrites = find_rewrites(web)
            if not rewrites:
                output.add_term(numerator * factor, web)
                continue
            step = next(recorded, None) if recorded is not None else None
            choice = _choose(rewrites, rng, step)
            plans.append((index, numerator * factor, web, rewrites[choice], choice))
        next_level = WebSum(total.bottom, total.top, total.denominator)
        expansions = parallel_map(lambda plan: plan[3].apply(), plans)
        for (index, numerator, _, rewrite, choice), expansion in zip(plans, expansions):
            if trace is not None:
                trace.add(TraceStep(level=level, rule=rewrite.rule, location=rewrite.describe(),
                                    terms=len(expansion), term=index, choice=choice))
            for coefficient, web in expansion:
                next_level.add_term(numerator * coefficient, web)
        pending = next_level
        level += 1
    if trace is not None:
        trace.final_terms = len(output)
    return output


def parallel_map(function: Callable, items: list) -> list:
    """Apply a function to every item, fanning out to worker threads when configured."""
    threads = Settings.threads()
    if threads <= 1 or len(items) < 2:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(function, items))


def evaluate_closed(
    web: Web,
    trace: RewriteTrace | None = None,
    rng: random.Random | None = None,
) -> Scalar:
    """Return the scalar a closed web equals in the web space of the empty boundary."""
    if web.terminals:
        raise A2Error(
            f"Only closed webs evaluate to scalars; this one has boundary "
            f"{web.bottom_word!r}->{web.top_word!r}."
        )
    if web.boxes:
        raise A2Error("Expand clasp boxes before evaluating a closed web.")
    if trace is not None or rng is not None:
        reduced = reduce(WebSum.of(web), trace=trace, rng=rng)
        return _empty_coefficient(reduced).to_scalar()
    value = qint(3) ** web.loops
    for component in web.components():
        value = value * _evaluate_component(restrict(web, component), component)
        if value.is_zero():
            break
    return value


def _empty_coefficient(total: WebSum) -> RationalScalar:
    """Return the coefficient of the empty diagram, checking nothing else survived."""
    empty = Web.empty()
    leftovers = [web for _, web in total.terms() if web.key() != empty.key()]
    if leftovers:
        raise A2Error(f"Reduction left {len(leftovers)} non-empty basis web(s) in a closed sum.")
    return total.coefficient(empty)


def _evaluate_component(web: Web, component: Sequence[int]) -> Scalar:
    """Evaluate one connected closed web with memoization on its canonical form."""
    key = closed_component_key(web, component)
    cached = CACHE.get(key)
    if cached is not None:
        return cached
    factor = Scalar.one()
    current = web
    while True:
        loops, current = _without_loops(current)
        factor = factor * loops
        if len(current.components()) != 1:
            value = factor * evaluate_closed(current)
            break
        rewrites = find_rewrites(current)
        if not rewrites:
            raise A2Error("Closed web admits no rewrite; check that it is a valid web.")
        expansion = rewrites[0].apply()
        if len(expansion) == 1:
            coefficient, current = expansion[0]
            factor = factor * coefficient
            continue
        value = factor * sum(
            (coefficient * evaluate_closed(term) for coefficient, term in expansion),
            Scalar.zero(),
        )
        break
    CACHE.put(key, value)
    return value


def evaluate(total: WebSum) -> RationalScalar:
    """Evaluate a closed linear combination."""
    if total.bottom or total.top:
        raise A2Error("Only sums of closed webs evaluate to scalars.")
    value = Scalar.zero()
    for numerator, web in total.terms():
        value = value + numerator * evaluate_closed(web)
    return RationalScalar(value, total.denominator)


def graph_stats(web: Web) -> tuple[int, int]:
    """Return (trivalent vertex count, connected component count) of a flat web."""
    if web.crossings:
        raise A2Error("Graph statistics are defined for flat webs only.")
    return web.trivalent_count(), len(web.components()) + web.loops
