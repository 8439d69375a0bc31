"""Finite graphs of finite p-group models.

Assembly and certification: every edge map is verified as an injective
homomorphism at construction, vertex models are certified against their
presentations, and the fundamental-group presentation is produced with
stable letters for non-tree edges.  Specialisations (target model, vertex
maps, edge elements) are verified against the two defining conditions,
and a specialisation injective on every vertex group is packaged as a
PropernessWitness.

Vertex groups are usually concrete models with certified presentations;
a vertex may instead carry a presentation alone (used by
bracket_subgraph, where the bracketed group is an amalgam with no finite
model).
"""

from .presentations import (FinitePresentation, GroupHom,
                            check_model_satisfies, hom_injective_on)
from .words import Word, gen


class Graph:
    """Finite connected graph with oriented edges (d0, d1)."""

    def __init__(self, vertices, edges):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        vset = set(self.vertices)
        self.edges = {}
        for eid, (v0, v1) in dict(edges).items():
            if v0 not in vset or v1 not in vset:
                raise ValueError(f"edge {eid} touches an unknown vertex")
            self.edges[eid] = (v0, v1)
        if self.vertices and not self._is_connected():
            raise ValueError("graph is not connected")

    def ends(self, eid):
        return self.edges[eid]

    def is_loop(self, eid):
        v0, v1 = self.edges[eid]
        return v0 == v1

    def _is_connected(self):
        seen = {self.vertices[0]}
        frontier = [self.vertices[0]]
        while frontier:
            v = frontier.pop()
            for v0, v1 in self.edges.values():
                for a, b in ((v0, v1), (v1, v0)):
                    if a == v and b not in seen:
                        seen.add(b)
                        frontier.append(b)
        return len(seen) == len(self.vertices)


class SpanningTree:
    def __init__(self, root, edge_ids):
        self.root = root
        self.edge_ids = tuple(edge_ids)
        self._set = frozenset(edge_ids)

    def __contains__(self, eid):
        return eid in self._set

    def __repr__(self):
        return f"SpanningTree(root={self.root!r}, edges={self.edge_ids!r})"


def spanning_tree(graph_or_gog):
    """Deterministic BFS tree rooted at the lexicographically least vertex."""
    graph = getattr(graph_or_gog, "graph", graph_or_gog)
    root = min(graph.vertices)
    seen = {root}
    queue = [root]
    tree = []
    while queue:
        v = queue.pop(0)
        for eid, (v0, v1) in graph.edges.items():
            if v0 == v1:
                continue
            for a, b in ((v0, v1), (v1, v0)):
                if a == v and b not in seen:
                    seen.add(b)
                    tree.append(eid)
                    queue.append(b)
    if len(seen) != len(graph.vertices):
        raise ValueError("graph is not connected")
    return SpanningTree(root, tree)


class VertexData:
    """A vertex group: a model with a certified presentation, or a
    presentation alone (no finite model, e.g. a bracketed subgraph)."""

    def __init__(self, model=None, presentation=None, naming=None):
        if model is None and presentation is None:
            raise ValueError("vertex needs a model or a presentation")
        self.model = model
        self.presentation = presentation
        if naming is None and presentation is not None:
            naming = {g: g for g in presentation.generators}
        self.naming = naming

    @property
    def is_model(self):
        return self.model is not None

    def assignment(self):
        """Presentation generator -> model element."""
        return {g: self.model.generators[self.naming[g]]
                for g in self.presentation.generators}

    def inverse_naming(self):
        inv = {m: g for g, m in self.naming.items()}
        if len(inv) != len(self.naming):
            raise ValueError("vertex naming is not one-to-one")
        return inv


class EdgeData:
    """Edge group model, optionally with a presentation for hom checks."""

    def __init__(self, model, presentation=None, naming=None):
        self.model = model
        self.presentation = presentation
        if naming is None and presentation is not None:
            naming = {g: g for g in presentation.generators}
        self.naming = naming


def _rename_word(word, mapping):
    return Word(tuple((mapping[n], e) for n, e in word.syllables))


class GraphOfGroups:
    """Graph + vertex/edge groups + verified edge monomorphisms.

    edge_maps[eid] = (map0, map1); each map sends every edge-model
    generator name to either an element of the end's vertex model or a
    Word over the end's presentation generators (required when the end
    vertex is presentation-only).
    """

    def __init__(self, graph, vertex_data, edge_data, edge_maps, check=True):
        self.graph = graph
        self.vertices = dict(vertex_data)
        self.edges = dict(edge_data)
        for v in graph.vertices:
            if v not in self.vertices:
                raise ValueError(f"vertex {v} has no group")
        for eid in graph.edges:
            if eid not in self.edges or eid not in edge_maps:
                raise ValueError(f"edge {eid} has no group or maps")
        self.edge_maps = {}
        for eid in graph.edges:
            self.edge_maps[eid] = tuple(
                self._normalize_map(eid, k, edge_maps[eid][k]) for k in (0, 1))
        self.edge_homs = {}
        if check:
            self._certify()

    def _normalize_map(self, eid, k, raw):
        """Store (element, word) per edge generator; either may be None."""
        v = self.graph.ends(eid)[k]
        vd = self.vertices[v]
        ed = self.edges[eid]
        out = {}
        for gname in ed.model.generators:
            if gname not in raw:
                raise ValueError(f"edge {eid} end {k}: no image for {gname}")
            val = raw[gname]
            if isinstance(val, Word):
                if vd.presentation is None:
                    raise ValueError(f"edge {eid} end {k}: word image needs "
                                     "a vertex presentation")
                missing = val.names() - set(vd.presentation.generators)
                if missing:
                    raise ValueError(f"edge {eid} end {k}: image word uses "
                                     f"unknown names {sorted(missing)}")
                element = (vd.model.evaluate(val, vd.assignment())
                           if vd.is_model else None)
                out[gname] = (element, val)
            else:
                if not vd.is_model:
                    raise ValueError(f"edge {eid} end {k}: presentation-only "
                                     "vertex needs word images")
                vd.model._own(val)
                out[gname] = (val, None)
        return out

    def _certify(self):
        for v, vd in self.vertices.items():
            if vd.is_model and vd.presentation is not None:
                report = check_model_satisfies(vd.presentation, vd.model,
                                               vd.naming)
                if report["status"] != "pass":
                    raise ValueError(f"vertex {v}: presentation not satisfied: "
                                     f"{report['violations'][:2]}")
        for eid in self.graph.edges:
            homs = []
            for k in (0, 1):
                v = self.graph.ends(eid)[k]
                vd = self.vertices[v]
                if not vd.is_model:
                    homs.append(None)
                    continue
                ed = self.edges[eid]
                mapping = {g: self.edge_maps[eid][k][g][0]
                           for g in ed.model.generators}
                hom = GroupHom(ed.model, vd.model, mapping,
                               name=f"d{k}({eid})")
                report = hom.verify(ed.presentation, ed.naming)
                if report["status"] != "pass":
                    raise ValueError(f"edge {eid} end {k}: map is not a "
                                     f"homomorphism: {report['violations'][:2]}")
                if not hom_injective_on(hom, list(ed.model.generators)):
                    raise ValueError(f"edge {eid} end {k}: map is not injective")
                homs.append(hom)
            self.edge_homs[eid] = tuple(homs)

    def image_word(self, eid, k, gname):
        """The image of an edge generator as a word over the end vertex's
        presentation generators (stored word, else shortest model word)."""
        element, word = self.edge_maps[eid][k][gname]
        if word is not None:
            return word
        v = self.graph.ends(eid)[k]
        vd = self.vertices[v]
        model_word = vd.model.closure().word_for(element)
        return _rename_word(model_word, vd.inverse_naming())

    def image_element(self, eid, k, gname):
        element, _ = self.edge_maps[eid][k][gname]
        return element


def check_reduced(gog):
    """No edge map onto a full endpoint group, except at loops."""
    for eid in gog.graph.edges:
        if gog.graph.is_loop(eid):
            continue
        for k in (0, 1):
            v = gog.graph.ends(eid)[k]
            vd = gog.vertices[v]
            if not vd.is_model:
                raise ValueError(f"vertex {v} has no model; cannot compare orders")
            images = [gog.image_element(eid, k, g)
                      for g in gog.edges[eid].model.generators]
            if vd.model.closure(images).order >= vd.model.order:
                return False
    return True


def fp_naming(gog):
    """Fundamental-presentation name per vertex generator: bare when unique
    across vertices, '<vertex>.<name>' on collision."""
    owners = {}
    for v in gog.graph.vertices:
        pres = gog.vertices[v].presentation
        if pres is None:
            raise ValueError(f"vertex {v} lacks a certified presentation")
        for g in pres.generators:
            owners.setdefault(g, []).append(v)
    return {v: {g: (g if len(owners[g]) == 1 else f"{v}.{g}")
                for g in gog.vertices[v].presentation.generators}
            for v in gog.graph.vertices}


def stable_letters(gog, tree):
    return {eid: f"t_{eid}" for eid in gog.graph.edges if eid not in tree}


def fundamental_presentation(gog, tree=None):
    """Vertex presentations + one stable letter per non-tree edge, with
    edge identifications on edge-group generators.

    Relator per edge generator g: image0(g)^-1 * t_e * image1(g) * t_e^-1,
    with t_e omitted on tree edges.
    """
    tree = tree if tree is not None else spanning_tree(gog)
    qual = fp_naming(gog)
    gens, relators = [], []
    for v in gog.graph.vertices:
        pres = gog.vertices[v].presentation
        rename = qual[v]
        gens += [rename[g] for g in pres.generators]
        relators += [_rename_word(r, rename) for r in pres.relators]
    letters = stable_letters(gog, tree)
    clash = set(letters.values()) & set(gens)
    if clash:
        raise ValueError(f"stable letter names collide: {sorted(clash)}")
    gens += [letters[eid] for eid in gog.graph.edges if eid in letters]
    for eid in gog.graph.edges:
        v0, v1 = gog.graph.ends(eid)
        for gname in gog.edges[eid].model.generators:
            w0 = _rename_word(gog.image_word(eid, 0, gname), qual[v0])
            w1 = _rename_word(gog.image_word(eid, 1, gname), qual[v1])
            if eid in letters:
                t = gen(letters[eid])
                relators.append(~w0 * t * w1 * ~t)
            else:
                relators.append(~w0 * w1)
    name = "pi1(" + ",".join(gog.graph.vertices) + ")"
    return FinitePresentation(gens, relators, name)


class Specialisation:
    """Target model, per-vertex generator images, and edge elements."""

    def __init__(self, gog, target, vertex_maps, edge_elements=None, name=""):
        self.gog = gog
        self.target = target
        self.name = name
        self.vertex_maps = {}
        for v in gog.graph.vertices:
            vd = gog.vertices[v]
            names = (vd.model.generators if vd.is_model
                     else vd.presentation.generators)
            vmap = dict(vertex_maps[v])
            missing = set(names) - set(vmap)
            if missing:
                raise ValueError(f"vertex {v}: no image for {sorted(missing)}")
            for img in vmap.values():
                target._own(img)
            self.vertex_maps[v] = vmap
        self.edge_elements = {}
        for eid in gog.graph.edges:
            t = (edge_elements or {}).get(eid, target.identity)
            target._own(t)
            self.edge_elements[eid] = t

    def vertex_hom(self, v):
        vd = self.gog.vertices[v]
        source = vd.model if vd.is_model else vd.presentation
        return GroupHom(source, self.target, self.vertex_maps[v],
                        name=f"nu({v})")

    def edge_image(self, eid, k, gname):
        """nu_{d_k(e)} applied to the edge generator's image."""
        v = self.gog.graph.ends(eid)[k]
        vd = self.gog.vertices[v]
        word = self.gog.image_word(eid, k, gname)
        if vd.is_model:
            assignment = {g: self.vertex_maps[v][vd.naming[g]]
                          for g in vd.presentation.generators}
        else:
            assignment = self.vertex_maps[v]
        return self.target.evaluate(word, assignment)


def verify_specialisation(gog, spec):
    """Check vertex maps are homs, tree edges carry the identity, and both
    edge images agree up to conjugation by the edge element."""
    violations = []
    for v in gog.graph.vertices:
        vd = gog.vertices[v]
        hom = spec.vertex_hom(v)
        report = (hom.verify(vd.presentation, vd.naming) if vd.is_model
                  else hom.verify())
        for item in report["violations"]:
            violations.append({**item, "kind": "vertex-hom", "vertex": v})
    tree = spanning_tree(gog)
    for eid in tree.edge_ids:
        if not spec.edge_elements[eid].is_identity:
            violations.append({"kind": "tree-edge", "edge": eid})
    for eid in gog.graph.edges:
        t = spec.edge_elements[eid]
        for gname in gog.edges[eid].model.generators:
            lhs = spec.edge_image(eid, 0, gname)
            rhs = t * spec.edge_image(eid, 1, gname) * ~t
            if lhs != rhs:
                violations.append({"kind": "edge-compatibility", "edge": eid,
                                   "generator": gname,
                                   "d0_image": list(lhs.coords),
                                   "d1_image_conjugated": list(rhs.coords)})
    return {"check": "specialisation", "target": spec.target.name,
            "status": "pass" if not violations else "fail",
            "violations": violations}


class PropernessWitness:
    """A specialisation verified injective on every vertex group."""

    def __init__(self, specialisation, report, vertex_image_orders):
        self.specialisation = specialisation
        self.report = report
        self.vertex_image_orders = dict(vertex_image_orders)

    @property
    def valid(self):
        return self.report["status"] == "pass"

    def __repr__(self):
        state = "certified" if self.valid else "invalid"
        return f"<PropernessWitness into {self.specialisation.target.name}: {state}>"


def verify_properness_witness(gog, spec):
    """verify_specialisation plus per-vertex injectivity by closure orders."""
    base = verify_specialisation(gog, spec)
    violations = list(base["violations"])
    orders = {}
    for v in gog.graph.vertices:
        vd = gog.vertices[v]
        if not vd.is_model:
            violations.append({"kind": "injectivity", "vertex": v,
                               "detail": "presentation-only vertex cannot be certified"})
            continue
        images = [spec.vertex_maps[v][g] for g in vd.model.generators]
        image_order = spec.target.closure(images).order
        orders[v] = image_order
        if image_order != vd.model.order:
            violations.append({"kind": "injectivity", "vertex": v,
                               "vertex_order": vd.model.order,
                               "image_order": image_order})
    report = {"check": "properness-witness", "target": spec.target.name,
              "status": "pass" if not violations else "fail",
              "violations": violations}
    return PropernessWitness(spec, report, orders)


def bracket_subgraph(gog, subgraph_vertices, bracket_id=None):
    """Collapse a connected subgraph to one vertex carrying its fundamental
    presentation; crossing edge maps are re-targeted through it."""
    inside = [v for v in gog.graph.vertices if v in set(subgraph_vertices)]
    if set(subgraph_vertices) - set(inside):
        raise ValueError("subgraph vertices not in the graph")
    if not inside:
        raise ValueError("empty subgraph")
    bracket_id = bracket_id or "[" + "+".join(inside) + "]"
    inner_edges = {eid: ends for eid, ends in gog.graph.edges.items()
                   if ends[0] in inside and ends[1] in inside}
    sub_graph = Graph(inside, inner_edges)   # raises if disconnected
    sub_gog = GraphOfGroups(sub_graph,
                            {v: gog.vertices[v] for v in inside},
                            {eid: gog.edges[eid] for eid in inner_edges},
                            {eid: tuple({g: gog.image_word(eid, k, g)
                                         for g in gog.edges[eid].model.generators}
                                        for k in (0, 1))
                             for eid in inner_edges},
                            check=False)
    sub_fp = fundamental_presentation(sub_gog)
    qual = fp_naming(sub_gog)

    out_vertices = [v for v in gog.graph.vertices if v not in set(inside)]
    new_vertices = out_vertices + [bracket_id]
    new_edges, new_data, new_maps = {}, {}, {}
    for v in out_vertices:
        new_data[v] = gog.vertices[v]
    new_data[bracket_id] = VertexData(presentation=sub_fp)
    for eid, (v0, v1) in gog.graph.edges.items():
        if eid in inner_edges:
            continue
        ends = tuple(bracket_id if v in set(inside) else v for v in (v0, v1))
        maps = []
        for k, v in enumerate((v0, v1)):
            gnames = gog.edges[eid].model.generators
            if v in set(inside):
                maps.append({g: _rename_word(gog.image_word(eid, k, g), qual[v])
                             for g in gnames})
            else:
                maps.append({g: gog.image_element(eid, k, g) for g in gnames})
        new_edges[eid] = ends
        new_maps[eid] = tuple(maps)
    edge_data = {eid: gog.edges[eid] for eid in new_edges}
    return GraphOfGroups(Graph(new_vertices, new_edges), new_data,
                         edge_data, new_maps, check=False)
