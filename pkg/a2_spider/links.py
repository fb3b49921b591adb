"""Link specs and the colored sl3 bracket.

A link spec is either an oriented PD code or a decomposition: a closed flat graph whose
hole boxes (``Box("hole", word, word, (index,))``) each stand for a left-handed twist
region. Kind A holes carry two parallel upward strands ("--"), kind B holes two
antiparallel strands ("-+").
"""

import random
from collections.abc import Mapping
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Literal

from a2_spider.clasp import (
    CLASP_TAG,
    clasp_box,
    evaluate_clasped,
    exchange,
    nested_caps,
    nested_cups,
    triangle,
)
from a2_spider.errors import A2Error, IntegralityError, ParseError
from a2_spider.formulas import TwistKind, big_gamma, delta_closure
from a2_spider.parsers import parse_pd, parse_webjson, pd_lines, web_to_json
from a2_spider.qalg import NormalizedScalar, RationalScalar, Scalar, mdeg, normalize
from a2_spider.registry import LinkLibrary
from a2_spider.skein import parallel_map
from a2_spider.web import (
    Box,
    Web,
    WebBuilder,
    WebSum,
    cable,
    closure,
    compose,
    compose_all,
    crossing_web,
    identity,
    mirror,
    tensor,
)

HOLE_TAG = "hole"
TWIST_WORDS: dict[TwistKind, str] = {"A": "--", "B": "-+"}
Pipeline = Literal["pd", "twist"]


@dataclass(frozen=True, slots=True)
class TwistRegion:
    """Left-handed twist region: its kind and number of half twists."""

    kind: TwistKind
    l: int  # noqa: E741

    def __post_init__(self) -> None:
        if self.kind not in TWIST_WORDS:
            raise ParseError(f"Twist kind must be 'A' or 'B', got {self.kind!r}.")
        if self.l < 1:
            raise ParseError(f"A twist region needs l >= 1 half twists, got {self.l}.")
        if self.kind == "B" and self.l % 2:
            raise ParseError(f"Kind B twist regions need an even l, got {self.l}.")

    @property
    def word(self) -> str:
        """Return the sign word of the two strands entering the region."""
        return TWIST_WORDS[self.kind]

    def to_dict(self) -> dict[str, object]:
        """Return the spec entry of this region."""
        return {"kind": self.kind, "l": self.l}


@dataclass(frozen=True)
class HoledDiskGraph:
    """Closed graph with hole boxes, each hole numbered by the first entry of its data."""

    web: Web

    @classmethod
    def from_document(cls, document: Mapping[str, Any]) -> "HoledDiskGraph":
        """Read a graph from the web JSON schema."""
        graph = cls(parse_webjson(document))
        graph.holes()
        return graph

    def holes(self) -> dict[int, int]:
        """Return hole index -> box node, checking every box is a numbered hole."""
        holes: dict[int, int] = {}
        for node in self.web.boxes:
            label = self.web.labels[node]
            if label.tag != HOLE_TAG or len(label.data) != 1:
                raise ParseError(f"Box {label.tag!r} is not a numbered hole.")
            if label.bottom != label.top:
                raise ParseError(f"Hole {label.data[0]} has different bottom and top words.")
            index = label.data[0]
            if index in holes:
                raise ParseError(f"Hole index {index} is used twice.")
            holes[index] = node
        return dict(sorted(holes.items()))

    def to_json(self) -> dict[str, Any]:
        """Return the web JSON document of the graph."""
        return web_to_json(self.web)


@dataclass(frozen=True)
class LinkSpec:
    """A link given by a PD code, a decomposition into twist regions, or a bare holed graph."""

    name: str
    pd: str | None = None
    graph: HoledDiskGraph | None = None
    regions: tuple[TwistRegion, ...] = field(default_factory=tuple)

    @property
    def form(self) -> str:
        """Return pd, decomposition or graph."""
        if self.pd is not None:
            return "pd"
        return "decomposition" if self.regions else "graph"

    @classmethod
    def load(cls, name: str) -> "LinkSpec":
        """Load a spec by library name or file path."""
        return cls.from_document(LinkLibrary.load(name))

    @classmethod
    def from_document(cls, document: Mapping[str, Any]) -> "LinkSpec":
        """Build a spec from a parsed YAML document."""
        name = str(document.get("name", "link"))
        forms = [key for key in ("pd", "decomposition", "graph") if key in document]
        if len(forms) != 1:
            raise ParseError(f"{name}: give exactly one of pd, decomposition or graph.")
        if "pd" in document:
            code = document["pd"]
            text = "\n".join(code) if isinstance(code, list) else str(code)
            parse_pd(text)
            return cls(name, pd=text)
        if "graph" in document:
            return cls(name, graph=HoledDiskGraph.from_document(document["graph"]))
        decomposition = document["decomposition"]
        try:
            regions = tuple(
                TwistRegion(str(item["kind"]), int(item["l"]))  # type: ignore[arg-type]
                for item in decomposition["regions"]
            )
        except (KeyError, TypeError, ValueError) as error:
            if isinstance(error, ParseError):
                raise
            raise ParseError(f"{name}: malformed twist regions: {error!r}.") from error
        spec = cls(name, graph=HoledDiskGraph.from_document(decomposition["graph"]),
                   regions=regions)
        spec.check_decomposition()
        return spec

    @classmethod
    def from_diagram(cls, name: str, web: Web) -> "LinkSpec":
        """Wrap a closed crossing diagram as a PD spec."""
        return cls(name, pd="\n".join(pd_lines(web)))

    def check_decomposition(self) -> None:
        """Validate holes against regions and the flatness of the graph."""
        assert self.graph is not None
        web = self.graph.web
        if web.terminals or web.trivalent_count():
            raise ParseError(f"{self.name}: a decomposition graph is closed and has no vertices.")
        holes = self.graph.holes()
        if sorted(holes) != list(range(len(self.regions))):
            raise ParseError(
                f"{self.name}: holes {sorted(holes)} do not match {len(self.regions)} region(s) "
                "numbered from 0."
            )
        for index, node in holes.items():
            word = web.labels[node].bottom
            if word != self.regions[index].word:
                raise ParseError(
                    f"{self.name}: hole {index} has word {word!r} but its region is of kind "
                    f"{self.regions[index].kind} ({self.regions[index].word!r})."
                )

    def diagram(self) -> Web:
        """Return the closed crossing diagram, flattening twist regions into crossings."""
        if self.pd is not None:
            return parse_pd(self.pd)
        if self.form != "decomposition":
            raise A2Error(f"{self.name}: a bare holed graph has no link diagram.")
        return flatten(self)

    def to_json(self) -> dict[str, Any]:
        """Return a spec document that from_document reads back."""
        if self.pd is not None:
            return {"name": self.name, "pd": self.pd.splitlines()}
        assert self.graph is not None
        if not self.regions:
            return {"name": self.name, "graph": self.graph.to_json()}
        return {
            "name": self.name,
            "decomposition": {
                "graph": self.graph.to_json(),
                "regions": [region.to_dict() for region in self.regions],
            },
        }


# Diagram surgery ------------------------------------------------------------------------


def twist_web(kind: TwistKind, l: int) -> Web:  # noqa: E741
    """Return l left-handed half twists on the two strands of a region."""
    word = TwistRegion(kind, l).word
    webs = []
    for _ in range(l):
        webs.append(crossing_web(word, 0, "\\"))
        word = word[::-1]
    return compose_all(webs)


def flatten(link: LinkSpec) -> Web:
    """Replace every hole of a decomposition by the crossings of its twist region."""
    assert link.graph is not None
    builder = link.graph.web.builder()
    for index, node in link.graph.holes().items():
        region = link.regions[index]
        builder.substitute(node, twist_web(region.kind, region.l))
    return builder.freeze()


def _through(web: Web, dart: int) -> int:
    """Return the dart where a strand entering a crossing or box at dart leaves it."""
    node = web.owner[dart]
    darts = web.ports[node]
    index = darts.index(dart)
    if web.kind[node] == "crossing":
        return darts[(index + 2) % 4]
    if web.kind[node] == "box":
        return darts[len(darts) - 1 - index]
    raise A2Error(f"Strands do not pass through {web.kind[node]} nodes.")


def strand_components(web: Web) -> list[list[int]]:
    """Return the link components of a closed diagram as lists of outgoing darts."""
    seen: set[int] = set()
    components = []
    for dart in sorted(web.out):
        if not web.out[dart] or dart in seen:
            continue
        component = []
        current = dart
        while current not in seen:
            seen.add(current)
            component.append(current)
            current = _through(web, web.mate[current])
        components.append(component)
    return components


def _insert_clasp(builder: WebBuilder, dart: int) -> None:
    """Place a one-strand clasp box on the edge leaving dart."""
    partner = builder.unlink(dart)
    _, (lower, upper) = builder.add_node("box", [False, True], label=Box(CLASP_TAG, "-", "-"))
    builder.connect(dart, lower)
    builder.connect(upper, partner)


def insert_clasps(web: Web, rng: random.Random | None = None, skip_boxes: bool = False) -> Web:
    """Put one clasp box on every component, on a random edge when rng is given.

    With skip_boxes, components already passing through a box are left alone.
    """
    builder = web.builder()
    for component in strand_components(web):
        if skip_boxes and any(web.kind[web.owner[dart]] == "box" for dart in component):
            continue
        _insert_clasp(builder, rng.choice(component) if rng is not None else component[0])
    return builder.freeze()


def split_union(first: LinkSpec, second: LinkSpec) -> LinkSpec:
    """Return the distant union of two links as a PD spec."""
    return LinkSpec.from_diagram(
        f"{first.name}+{second.name}", tensor(first.diagram(), second.diagram())
    )


# Invariants ------------------------------------------------------------------------------


def _without_loops(web: Web) -> tuple[Web, int]:
    """Split off the free loops of a diagram."""
    builder = web.builder()
    loops, builder.loops = builder.loops, 0
    return builder.freeze(), loops


def colored_bracket(link: LinkSpec, n: int, rng: random.Random | None = None) -> Scalar:
    """Return the bracket of the n-cabled diagram with one clasp on every component."""
    if n < 1:
        raise A2Error(f"Color must be at least 1, got {n}.")
    diagram, loops = _without_loops(link.diagram())
    clasped = cable(insert_clasps(diagram, rng), n)
    value = evaluate_clasped(WebSum.of(clasped)).to_scalar()
    return value * delta_closure(n, 0) ** loops


def jones_normalized(
    link: LinkSpec,
    n: int,
    rng: random.Random | None = None,
    pipeline: Pipeline = "pd",
) -> NormalizedScalar:
    """Return the normalized colored invariant, checking that it lies in Z[q]."""
    if pipeline == "twist":
        bracket = twist_region_bracket(link, n)
    else:
        bracket = colored_bracket(link, n, rng)
    result = normalize(bracket)
    if not result.unit.is_integral():
        raise IntegralityError(
            f"{link.name}: normalized invariant at color {n} is not in Z[q]: {result.unit}."
        )
    return result


# Twist regions ----------------------------------------------------------------------------


def padded(left: str, gadget: Web, right: str) -> Web:
    """Tensor a gadget with identity strands on both sides."""
    return tensor(tensor(identity(left), gadget), identity(right))


def m_web(kind: TwistKind, t: int, n: int, primed: bool = False) -> Web:
    """Return the clasped web replacing the t-th term of an n-cabled twist region.

    The primed variant drops the clasps; for kind A its middle clasp becomes a pair of
    exchanges sorting the middle word and restoring it.
    """
    if kind not in TWIST_WORDS:
        raise A2Error(f"Twist kind must be 'A' or 'B', got {kind!r}.")
    if n < 1 or not 0 <= t <= n:
        raise A2Error(f"M web needs n >= 1 and 0 <= t <= n, got t={t}, n={n}.")

    def clasp(word: str) -> Web:
        return identity(word) if primed else clasp_box(word)

    if kind == "A":
        outer = "-" * (n - t)
        middle = outer + "+" * t + outer
        bundles = tensor(clasp("-" * n), clasp("-" * n))
        webs = [bundles]
        if t:
            webs.append(padded(outer, triangle(t, "-"), outer))
        if primed:
            ordered = "-" * (2 * n - 2 * t) + "+" * t
            webs += [exchange(middle, ordered), exchange(ordered, middle)]
        else:
            webs.append(clasp_box(middle))
        if t:
            webs.append(padded(outer, mirror(triangle(t, "-")), outer))
        webs.append(bundles)
        return compose_all(webs)
    bundles = tensor(clasp("-" * n), clasp("+" * n))
    webs = [bundles, nested_caps(n, n, t, "-")]
    if t < n and not primed:
        webs.append(clasp_box("-" * (n - t) + "+" * (n - t)))
    webs += [nested_cups(n, n, t, "-"), bundles]
    return compose_all(webs)


def theta_web(kind: TwistKind, t: int, n: int) -> Web:
    """Return the closure of an M web."""
    return closure(m_web(kind, t, n))


def twisted_theta_web(kind: TwistKind, t: int, n: int, l: int) -> Web:  # noqa: E741
    """Return the closure of an M web stacked on l cabled half twists."""
    return closure(compose(cable(twist_web(kind, l), n), m_web(kind, t, n)))


def _twist_setup(link: LinkSpec, n: int) -> tuple[Web, dict[int, int], int]:
    """Cable the decomposition graph after clasping components that miss every hole."""
    if link.form != "decomposition":
        raise A2Error(f"{link.name}: the twist-region expansion needs a decomposition spec.")
    if n < 1:
        raise A2Error(f"Color must be at least 1, got {n}.")
    assert link.graph is not None
    graph, loops = _without_loops(link.graph.web)
    cabled = cable(insert_clasps(graph, skip_boxes=True), n)
    holes = {
        cabled.labels[node].data[0]: node
        for node in cabled.boxes
        if cabled.labels[node].tag == HOLE_TAG
    }
    return cabled, holes, loops


def twist_region_terms(link: LinkSpec, n: int) -> list[tuple[tuple[int, ...], RationalScalar]]:
    """Return every t-vector with its weighted evaluation, in lexicographic order."""
    cabled, holes, loops = _twist_setup(link, n)
    factor = delta_closure(n, 0) ** loops

    def term(vector: tuple[int, ...]) -> RationalScalar:
        builder = cabled.builder()
        coefficient = RationalScalar(factor)
        for index, t in enumerate(vector):
            region = link.regions[index]
            coefficient = coefficient * big_gamma(region.kind, n, t, region.l)
            builder.substitute(holes[index], m_web(region.kind, t, n))
        return coefficient * evaluate_clasped(WebSum.of(builder.freeze()))

    vectors = list(product(range(n + 1), repeat=len(link.regions)))
    return list(zip(vectors, parallel_map(term, vectors)))


def twist_region_bracket(link: LinkSpec, n: int) -> Scalar:
    """Return the colored bracket as a sum over twist webs of every region."""
    total = RationalScalar(0)
    for _, value in twist_region_terms(link, n):
        total = total + value
    return total.reduced().to_scalar()


def truncation_holds(link: LinkSpec, n: int) -> bool:
    """Return whether the all-zero twist term agrees with the bracket below q^(n+1+mdeg)."""
    terms = twist_region_terms(link, n)
    total = RationalScalar(0)
    for _, value in terms:
        total = total + value
    full = total.reduced().to_scalar()
    difference = (total - terms[0][1]).reduced()
    return difference.is_zero() or difference.mdeg() >= n + 1 + mdeg(full)


# Adequacy ---------------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class AdequacyWitness:
    """Arc leaving a hole and returning to the same side of it."""

    hole: int
    side: str
    ports: tuple[int, int]
    through: tuple[int, ...]

    def describe(self) -> str:
        """Return a one-line account of the arc."""
        via = f" through hole(s) {', '.join(map(str, self.through))}" if self.through else ""
        return (
            f"arc from {self.side} port {self.ports[0]} of hole {self.hole} returns to "
            f"{self.side} port {self.ports[1]}{via}"
        )

    def to_json(self) -> dict[str, object]:
        """Return a JSON-ready mapping."""
        return {
            "hole": self.hole,
            "side": self.side,
            "ports": list(self.ports),
            "through": list(self.through),
        }


@dataclass(frozen=True, slots=True)
class AdequacyResult:
    """Outcome of an adequacy check with the first offending arc."""

    adequate: bool
    witness: AdequacyWitness | None = None

    def to_json(self) -> dict[str, object]:
        """Return a JSON-ready mapping."""
        return {
            "adequate": self.adequate,
            "witness": None if self.witness is None else self.witness.to_json(),
        }


def _side(web: Web, dart: int) -> tuple[str, int]:
    """Return the side of a box port and its position read left to right."""
    node = web.owner[dart]
    index = web.ports[node].index(dart)
    width = len(web.labels[node].bottom)
    if index < width:
        return "bottom", index
    return "top", len(web.ports[node]) - 1 - index


def adequacy_check(graph: HoledDiskGraph) -> AdequacyResult:
    """Check that no arc around a clasped hole starts and ends on the same side of it.

    Each hole in turn keeps its box while the others become identities; an arc is then
    followed from every port of the hole until it comes back.
    """
    web = graph.web
    if web.terminals or web.crossings or web.trivalent_count() or web.loops:
        raise A2Error(
            "Adequacy is defined for closed graphs without crossings, vertices or loops."
        )
    holes = graph.holes()
    index_of = {node: index for index, node in holes.items()}
    for index, node in holes.items():
        for dart in web.ports[node]:
            through = []
            current = web.mate[dart]
            while web.owner[current] != node:
                through.append(index_of[web.owner[current]])
                current = web.mate[_through(web, current)]
            (start_side, start), (end_side, end) = _side(web, dart), _side(web, current)
            if start_side == end_side:
                return AdequacyResult(
                    False, AdequacyWitness(index, start_side, (start, end), tuple(through))
                )
    return AdequacyResult(True)
