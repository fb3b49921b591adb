"""Readers and writers for oriented PD codes and the web JSON schema."""

import re
from collections.abc import Mapping
from typing import Any

from a2_spider.errors import EmbeddingError, ParseError
from a2_spider.web import Box, Web, WebBuilder, faces, validate_word

_CROSSING_PATTERN = re.compile(
    r"^X\[\s*(\w+)\s*,\s*(\w+)\s*,\s*(\w+)\s*,\s*(\w+)\s*\]\s*([+-])$"
)
_LOOP_PATTERN = re.compile(r"^O$")


def parse_pd(code: str) -> Web:
    """Parse an oriented PD code into a closed diagram with blackboard framing.

    Each crossing line reads ``X[a,b,c,d] s``. Labels run counterclockwise from the
    incoming under strand a, so the under strand runs a -> c. A positive crossing has
    its over strand running d -> b, a negative one b -> d. A line ``O`` adds an
    unknotted component without crossings.
    """
    builder = WebBuilder()
    occurrences: dict[str, list[tuple[int, int, bool]]] = {}
    for line_number, raw_line in enumerate(code.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip().rstrip(",;")
        if not line:
            continue
        if _LOOP_PATTERN.match(line):
            builder.loops += 1
            continue
        match = _CROSSING_PATTERN.match(line)
        if match is None:
            raise ParseError(f"Line {line_number}: cannot read crossing {line!r}.")
        labels = match.groups()[:4]
        positive = match.group(5) == "+"
        outs = [False, positive, True, not positive]
        _, darts = builder.add_node("crossing", outs, over=1)
        for dart, label, is_out in zip(darts, labels, outs):
            occurrences.setdefault(label, []).append((line_number, dart, is_out))
    for label, uses in occurrences.items():
        if len(uses) != 2:
            lines = ", ".join(str(line_number) for line_number, _, _ in uses)
            raise ParseError(
                f"Strand {label!r} appears {len(uses)} time(s) (line {lines}); "
                "every strand label must appear exactly twice."
            )
        (first_line, first, first_out), (second_line, second, second_out) = uses
        if first_out == second_out:
            raise ParseError(
                f"Orientation conflict on strand {label!r} (lines {first_line} and "
                f"{second_line}): both ends are {'outgoing' if first_out else 'incoming'}."
            )
        builder.connect(first, second)
    return _checked(builder.freeze(), "PD code")


def pd_lines(web: Web) -> list[str]:
    """Write a closed crossing-only diagram back as oriented PD lines."""
    if web.terminals or any(kind != "crossing" for kind in web.kind.values()):
        raise ParseError("Only closed diagrams made of crossings have a PD code.")
    labels: dict[int, int] = {}
    for node in web.crossings:
        for dart in web.ports[node]:
            if web.out[dart]:
                labels[dart] = labels[web.mate[dart]] = len(labels) // 2 + 1
    lines = []
    for node in web.crossings:
        darts = web.ports[node]
        under = 1 - web.over[node]
        start = next(i for i in (under, under + 2) if not web.out[darts[i]])
        ordered = [darts[(start + i) % 4] for i in range(4)]
        sign = "+" if web.crossing_sign(node) > 0 else "-"
        lines.append(f"X[{','.join(str(labels[dart]) for dart in ordered)}] {sign}")
    lines.extend("O" for _ in range(web.loops))
    return lines


def parse_webjson(document: Mapping[str, Any]) -> Web:
    """Build a web from the JSON schema documented in docs/formats.md."""
    try:
        return _parse_webjson(document)
    except (KeyError, TypeError, ValueError) as error:
        if isinstance(error, ParseError):
            raise
        raise ParseError(f"Malformed web document: {error!r}.") from error


def _parse_webjson(document: Mapping[str, Any]) -> Web:
    """Build a web from a validated document."""
    builder = WebBuilder()
    half_edges: dict[str, int] = {}
    expected_out: dict[str, bool] = {}
    bottom_nodes: list[int] = []
    top_nodes: list[int] = []
    for index, point in enumerate(document.get("boundary", [])):
        sign = validate_word(str(point["sign"]))
        position = point["position"]
        if len(sign) != 1 or position not in ("bottom", "top"):
            raise ParseError(f"Boundary point {index} needs one sign and bottom/top position.")
        out = (sign == "-") if position == "bottom" else (sign == "+")
        node, dart = builder.add_terminal(out)
        _register(half_edges, str(point["halfedge"]), dart)
        expected_out[str(point["halfedge"])] = out
        (bottom_nodes if position == "bottom" else top_nodes).append(node)
    directions: dict[str, bool] = {}
    edges = list(document.get("edges", []))
    for edge in edges:
        for name, is_out in ((str(edge["from"]), True), (str(edge["to"]), False)):
            if name in directions:
                raise ParseError(f"Half-edge {name!r} is used by more than one edge.")
            directions[name] = is_out
    over_pairs = {str(item["id"]): int(item["over_pair"]) for item in document.get("crossings", [])}
    for node_document in document.get("nodes", []):
        node_id = str(node_document["id"])
        kind = str(node_document["kind"])
        rotation = [str(name) for name in node_document["rotation"]]
        missing = [name for name in rotation if name not in directions]
        if missing:
            raise ParseError(f"Node {node_id!r}: dangling half-edge(s) {missing}.")
        outs = [directions[name] for name in rotation]
        label = None
        if kind == "box":
            label_document = node_document["label"]
            label = Box(
                str(label_document["tag"]),
                validate_word(str(label_document["bottom"])),
                validate_word(str(label_document["top"])),
                tuple(int(value) for value in label_document.get("data", [])),
            )
        elif kind == "crossing":
            if len(rotation) != 4:
                raise ParseError(f"Crossing {node_id!r} needs four half-edges.")
            if node_id not in over_pairs:
                raise ParseError(f"Crossing {node_id!r} has no over_pair entry.")
        elif kind not in ("source", "sink"):
            raise ParseError(f"Node {node_id!r} has unknown kind {kind!r}.")
        try:
            _, darts = builder.add_node(kind, outs, over=over_pairs.get(node_id), label=label)
        except ValueError as error:
            raise ParseError(f"Node {node_id!r}: {error}") from error
        for name, dart in zip(rotation, darts):
            _register(half_edges, name, dart)
    for name, out in expected_out.items():
        if directions.get(name, out) != out:
            raise ParseError(f"Boundary half-edge {name!r} is oriented against its sign.")
    for edge in edges:
        try:
            first = half_edges[str(edge["from"])]
            second = half_edges[str(edge["to"])]
        except KeyError as error:
            raise ParseError(
                f"Edge {edge.get('id')!r} names an unknown half-edge {error}."
            ) from error
        builder.connect(first, second)
    unused = sorted(set(half_edges) - set(directions))
    if unused:
        raise ParseError(f"Half-edge(s) {unused} are not attached to any edge.")
    builder.terminals = bottom_nodes + top_nodes[::-1]
    builder.n_bottom = len(bottom_nodes)
    builder.loops = int(document.get("loops", 0))
    return _checked(builder.freeze(), "web document")


def _register(half_edges: dict[str, int], name: str, dart: int) -> None:
    """Record a half-edge name exactly once."""
    if name in half_edges:
        raise ParseError(f"Half-edge {name!r} is declared twice.")
    half_edges[name] = dart


def _checked(web: Web, source: str) -> Web:
    """Run the planarity check, reporting failures as parse errors."""
    try:
        faces(web)
    except EmbeddingError as error:
        raise ParseError(f"Invalid planar data in {source}: {error}") from error
    return web


def web_to_json(web: Web) -> dict[str, Any]:
    """Serialize a web with names derived from boundary order and node order."""
    terminals = set(web.terminals)
    ordered = list(web.terminals) + [node for node in sorted(web.kind) if node not in terminals]
    names = {
        node: f"t{index}" if index < len(terminals) else f"v{index - len(terminals)}"
        for index, node in enumerate(ordered)
    }
    half = {
        dart: f"{names[node]}:{port}"
        for node in ordered
        for port, dart in enumerate(web.ports[node])
    }
    boundary = []
    top_nodes = list(reversed(web.terminals[web.n_bottom :]))
    for node in list(web.terminals[: web.n_bottom]) + top_nodes:
        position = "bottom" if node in web.terminals[: web.n_bottom] else "top"
        out = web.out[web.ports[node][0]]
        sign = ("-" if out else "+") if position == "bottom" else ("+" if out else "-")
        boundary.append({"sign": sign, "position": position, "halfedge": half[web.ports[node][0]]})
    nodes = []
    crossings = []
    for node in ordered[len(web.terminals) :]:
        entry: dict[str, Any] = {
            "id": names[node],
            "kind": web.kind[node],
            "rotation": [half[dart] for dart in web.ports[node]],
        }
        if node in web.labels:
            label = web.labels[node]
            entry["label"] = {"tag": label.tag, "bottom": label.bottom, "top": label.top,
                              "data": list(label.data)}
        nodes.append(entry)
        if web.kind[node] == "crossing":
            crossings.append({"id": names[node], "over_pair": web.over[node]})
    edges = [
        {"from": half[dart], "to": half[web.mate[dart]]}
        for dart in sorted(web.mate, key=lambda dart: half[dart])
        if web.out[dart]
    ]
    for index, edge in enumerate(edges):
        edge["id"] = f"e{index}"
    return {
        "boundary": boundary,
        "nodes": nodes,
        "edges": [{"id": edge["id"], "from": edge["from"], "to": edge["to"]} for edge in edges],
        "crossings": crossings,
        "loops": web.loops,
    }
