"""Incidence graph of lines and points of the reduced locus, built by BFS over lattices.

RP: lines are Pi^{-1}-modular lattices, points are unimodular ones.
RU: lines are unimodular lattices with Nm in pi0*O_F, points are Pi-modular ones.
A point lies on a line when the point lattice sits inside the line lattice
(RP) or the other way round (RU); both are index-1 relations.
"""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .errors import PrecisionExhausted, TruncatedTail, UnsupportedModularity
from .herm_lattice import Lattice
from .neighbor_walk import classify, hyperbolic_ell, modular_neighbors
from .padic_tower import ExtDescriptor, ext_from_json

# (line modularity, point modularity)
MODULARITY = {"RP": (-1, 0), "RU": (0, 1)}


@dataclass
class Vertex:
    kind: str  # "line" or "point"
    ell: int
    hyperbolic: bool
    layer: int
    expanded: bool = False


@dataclass
class FiberGraph:
    ext: ExtDescriptor
    radius: int
    vertices: dict[str, Vertex] = field(default_factory=dict)
    edges: set[tuple[str, str]] = field(default_factory=set)  # (line key, point key)

    # -- views ------------------------------------------------------------------
    def lines(self) -> dict[str, Vertex]:
        return {k: v for k, v in self.vertices.items() if v.kind == "line"}

    def points(self) -> dict[str, Vertex]:
        return {k: v for k, v in self.vertices.items() if v.kind == "point"}

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {k: set() for k in self.vertices}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def degree(self, key: str) -> int:
        return sum(1 for a, b in self.edges if key in (a, b))

    def lattice(self, key: str) -> Lattice:
        return Lattice.from_key_str(self.ext, key)

    def __eq__(self, other):
        return (
            isinstance(other, FiberGraph)
            and self.ext == other.ext
            and self.radius == other.radius
            and self.vertices == other.vertices
            and self.edges == other.edges
        )


def base_line(ext: ExtDescriptor) -> Lattice:
    """Hyperbolic line vertex: the lattice spanned by e1, Pi^{-1} e2 (RP) or O_E^2 (RU)."""
    if ext.kind == "RP":
        return Lattice(ext, 0, -1, ())
    if ext.kind == "RU":
        return Lattice(ext, 0, 0, ())
    raise UnsupportedModularity("fiber graphs are built for ramified extensions")


def required_precision(ext: ExtDescriptor, radius: int) -> int:
    return ext.F.e * (radius + 6)


def _neighbors(args) -> list[tuple[str, int, bool]]:
    ext, key, from_i, to_i, min_ell = args
    L = Lattice.from_key_str(ext, key)
    _, found = modular_neighbors(L, from_i, to_i)
    out = []
    for M in found:
        ell, hyp = classify(M, to_i)
        if ell >= min_ell:
            out.append((M.key_str(), ell, hyp))
    return sorted(out)


def _run(tasks: list, jobs: int) -> list:
    if jobs <= 1 or len(tasks) < 2:
        return [_neighbors(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_neighbors, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def build_ball(base: Lattice | None, radius: int, ext: ExtDescriptor, jobs: int = 1) -> FiberGraph:
    """BFS from a line vertex, alternating lines and points, up to `radius` line layers.

    Points on lines of the last layer are recorded but not expanded.
    """
    if ext.kind not in MODULARITY:
        raise UnsupportedModularity("fiber graphs are built for ramified extensions")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    need = required_precision(ext, radius)
    if ext.F.precision < need:
        raise PrecisionExhausted(f"radius {radius} needs precision >= {need}")
    base = base_line(ext) if base is None else base
    i_line, i_point = MODULARITY[ext.kind]
    line_min = 1 if ext.kind == "RU" else 0
    ell, hyp = classify(base, i_line)
    if ell < line_min:
        raise UnsupportedModularity("base lattice is not a line vertex")
    g = FiberGraph(ext, radius)
    g.vertices[base.key_str()] = Vertex("line", ell, hyp, 0)
    frontier = [base.key_str()]
    for layer in range(radius + 1):
        frontier.sort()
        results = _run([(ext, k, i_line, i_point, 0) for k in frontier], jobs)
        new_points = []
        for lk, pts in zip(frontier, results):
            g.vertices[lk].expanded = True
            for pk, pell, phyp in pts:
                if pk not in g.vertices:
                    g.vertices[pk] = Vertex("point", pell, phyp, layer)
                    new_points.append(pk)
                g.edges.add((lk, pk))
        if layer == radius:
            break
        new_points.sort()
        results = _run([(ext, k, i_point, i_line, line_min) for k in new_points], jobs)
        frontier = []
        for pk, lines in zip(new_points, results):
            g.vertices[pk].expanded = True
            for lk, lell, lhyp in lines:
                if lk not in g.vertices:
                    g.vertices[lk] = Vertex("line", lell, lhyp, layer + 1)
                    frontier.append(lk)
                g.edges.add((lk, pk))
    return g


def hyperbolic_core(g: FiberGraph) -> FiberGraph:
    keep = {k: v for k, v in g.vertices.items() if v.hyperbolic}
    edges = {(a, b) for a, b in g.edges if a in keep and b in keep}
    return FiberGraph(g.ext, g.radius, dict(keep), edges)


def _components(nodes: set[str], adj: dict[str, set[str]]) -> list[set[str]]:
    seen: set[str] = set()
    comps = []
    for start in sorted(nodes):
        if start in seen:
            continue
        comp, stack = set(), [start]
        while stack:
            x = stack.pop()
            if x in comp:
                continue
            comp.add(x)
            stack.extend(y for y in adj[x] if y in nodes and y not in comp)
        seen |= comp
        comps.append(comp)
    return comps


def tails_report(g: FiberGraph, allow_truncated: bool = False) -> list[dict]:
    """Connected components of the non-hyperbolic part, with their attachment points.

    A component is truncated when it contains a point that was never expanded;
    such components raise TruncatedTail unless allow_truncated is set.
    """
    adj = g.adjacency()
    nh = {k for k, v in g.vertices.items() if not v.hyperbolic}
    top = hyperbolic_ell(g.ext)
    out = []
    for comp in _components(nh, adj):
        attach = sorted({y for x in comp for y in adj[x] if y not in nh})
        lines = [k for k in comp if g.vertices[k].kind == "line"]
        pts = [k for k in comp if g.vertices[k].kind == "point"]
        truncated = any(not g.vertices[k].expanded for k in pts)
        if truncated and not allow_truncated:
            raise TruncatedTail(f"tail at {attach} reaches the ball boundary; increase the radius")
        min_ell = min(g.vertices[k].ell for k in comp)
        out.append({
            "attachment": attach,
            "lines": len(lines),
            "points": len(pts),
            "size": len(comp),
            "max_drop": top - min_ell,
            "leaf_points": sum(1 for k in pts if g.vertices[k].expanded and len(adj[k]) == 1),
            "truncated": truncated,
        })
    out.sort(key=lambda r: (r["attachment"], r["size"]))
    return out


def closed_tails(g: FiberGraph) -> list[dict]:
    return [t for t in tails_report(g, allow_truncated=True) if not t["truncated"]]


def graph_stats(g: FiberGraph) -> dict:
    adj = g.adjacency()
    classes = Counter((v.kind, v.ell, v.hyperbolic) for v in g.vertices.values())
    degrees: dict[tuple, Counter] = {}
    for k, v in g.vertices.items():
        if v.expanded:
            degrees.setdefault((v.kind, v.ell, v.hyperbolic), Counter())[len(adj[k])] += 1
    return {
        "vertices": len(g.vertices),
        "edges": len(g.edges),
        "lines": len(g.lines()),
        "points": len(g.points()),
        "unexpanded_points": sum(1 for v in g.points().values() if not v.expanded),
        "classes": [
            {"kind": kind, "ell": ell, "hyperbolic": hyp, "count": n}
            for (kind, ell, hyp), n in sorted(classes.items())
        ],
        "degrees": [
            {"kind": kind, "ell": ell, "hyperbolic": hyp, "histogram": {str(d): c for d, c in sorted(h.items())}}
            for (kind, ell, hyp), h in sorted(degrees.items())
        ],
    }


# ---------------------------------------------------------------------------
# export / import


def to_json_obj(g: FiberGraph) -> dict:
    return {
        "meta": {"field": g.ext.to_json(), "radius": g.radius},
        "vertices": [
            {"key": k, "kind": v.kind, "ell": v.ell, "hyperbolic": v.hyperbolic, "layer": v.layer, "expanded": v.expanded}
            for k, v in sorted(g.vertices.items())
        ],
        "edges": [list(e) for e in sorted(g.edges)],
    }


def _dot_id(key: str) -> str:
    return '"' + key.replace('"', '\\"') + '"'


def to_dot(g: FiberGraph) -> str:
    out = ["graph fiber {"]
    for k, v in sorted(g.vertices.items()):
        shape = "box" if v.kind == "line" else "circle"
        style = "solid" if v.hyperbolic else "dashed"
        out.append(f"  {_dot_id(k)} [shape={shape}, style={style}, label=\"l={v.ell}\"];")
    for a, b in sorted(g.edges):
        style = "solid" if g.vertices[a].hyperbolic and g.vertices[b].hyperbolic else "dashed"
        out.append(f"  {_dot_id(a)} -- {_dot_id(b)} [style={style}];")
    out.append("}")
    return "\n".join(out) + "\n"


def export(g: FiberGraph, fmt: str) -> bytes:
    if fmt == "json":
        return (json.dumps(to_json_obj(g), indent=1, sort_keys=True) + "\n").encode()
    if fmt == "dot":
        return to_dot(g).encode()
    raise ValueError(f"unknown format {fmt!r}")


def import_json(data: bytes | str | dict, ext: ExtDescriptor | None = None) -> FiberGraph:
    obj = json.loads(data) if isinstance(data, (bytes, str)) else data
    meta = obj.get("meta", {})
    if ext is None:
        ext = ext_from_json(meta["field"])
    g = FiberGraph(ext, int(meta.get("radius", 0)))
    for v in obj["vertices"]:
        g.vertices[v["key"]] = Vertex(v["kind"], v["ell"], v["hyperbolic"], v.get("layer", 0), v.get("expanded", False))
    g.edges = {(a, b) for a, b in obj["edges"]}
    return g
