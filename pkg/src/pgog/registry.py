"""Canonical example objects and the runnable example registry.

Builders here reconstruct the splittings the test-suite and CLI treat as
reference objects: two improper lines whose edge maps entangle generators
into commutator cycles, and a properly witnessed free-product line.  The
tower-built paths and their witnesses are registered lazily to keep import
costs low.

Each registry entry couples a builder with the claim it demonstrates and
the outcome it is pinned to; `run_example` executes one entry and
`run_all` aggregates every entry matching a glob, in registry order.
"""

from dataclasses import dataclass
from fnmatch import fnmatch
from importlib import resources

from . import models
from . import presentations as P
from . import reports
from .analysis import check_edge_bound, detect_collapse
from .gog import (EdgeData, Graph, GraphOfGroups, Specialisation, VertexData,
                  fundamental_presentation, verify_properness_witness)
from .words import commutator, gen


def _ea_edge(p, names):
    return EdgeData(models.ElementaryAbelian(p, names),
                    P.elementary_abelian_presentation(p, names))


def _heis_vertex(p, names):
    return VertexData(models.HeisenbergModP(p, names),
                      P.heisenberg_presentation(p, names))


def free_product_line(p):
    """Two one-generator vertices joined over the trivial group."""
    graph = Graph(["L", "R"], {"e": ("L", "R")})
    data = {
        "L": VertexData(models.ElementaryAbelian(p, ["a"]),
                        P.elementary_abelian_presentation(p, ["a"])),
        "R": VertexData(models.ElementaryAbelian(p, ["b"]),
                        P.elementary_abelian_presentation(p, ["b"])),
    }
    return GraphOfGroups(graph, data, {"e": _ea_edge(p, [])}, {"e": ({}, {})})


def improper_heisenberg_chain(p, levels):
    """Path of Heisenberg vertices; each edge glues the left vertex's second
    generator to the right commutator and the left commutator to the right
    vertex's first generator.  Proper over any single edge, improper as a
    whole: the inner generators are forced into arbitrarily deep commutators.
    """
    if levels < 2:
        raise ValueError("the chain needs at least two vertices")
    names = [(f"a{i}", f"b{i}") for i in range(1, levels + 1)]
    vertices = {f"V{i + 1}": _heis_vertex(p, pair)
                for i, pair in enumerate(names)}
    graph = Graph([f"V{i}" for i in range(1, levels + 1)],
                  {f"e{i}": (f"V{i}", f"V{i + 1}") for i in range(1, levels)})
    edge_data, edge_maps = {}, {}
    for i in range(1, levels):
        al, bl = names[i - 1]
        ar, br = names[i]
        edge_data[f"e{i}"] = _ea_edge(p, ["u", "v"])
        edge_maps[f"e{i}"] = (
            {"u": gen(bl), "v": commutator(gen(al), gen(bl))},
            {"u": commutator(gen(ar), gen(br)), "v": gen(ar)})
    return GraphOfGroups(graph, vertices, edge_data, edge_maps)


def improper_two_edge_line(p):
    """Three-vertex line, improper although each single edge is proper.

    The middle vertex is a product of two Heisenberg groups; the two edge
    maps tie the four x-generators into the cycle
    x1 -> x3 -> x4 -> x2 -> x1 of commutator definitions.
    """
    mid_pres = P.direct_product_presentation(
        P.heisenberg_presentation(p, ("x2", "y2")),
        P.heisenberg_presentation(p, ("x3", "y3")))
    mid_model = models.DirectProduct(
        models.HeisenbergModP(p, ("x2", "y2")),
        models.HeisenbergModP(p, ("x3", "y3")))
    graph = Graph(["L", "M", "R"], {"e1": ("L", "M"), "e2": ("M", "R")})
    vertex_data = {
        "L": _heis_vertex(p, ("x1", "y1")),
        "M": VertexData(mid_model, mid_pres),
        "R": _heis_vertex(p, ("x4", "y4")),
    }
    edge_data = {"e1": _ea_edge(p, ["u1", "v1"]),
                 "e2": _ea_edge(p, ["u2", "v2"])}
    edge_maps = {
        "e1": ({"u1": gen("x1"),
                "v1": commutator(gen("x1"), gen("y1"))},
               {"u1": commutator(gen("x2"), gen("y2")),
                "v1": gen("x3")}),
        "e2": ({"u2": gen("x2"),
                "v2": commutator(gen("x3"), gen("y3"))},
               {"u2": commutator(gen("x4"), gen("y4")),
                "v2": gen("x4")}),
    }
    return GraphOfGroups(graph, vertex_data, edge_data, edge_maps)


def free_product_witness(p):
    """The free-product line with its certified direct-product witness."""
    gog = free_product_line(p)
    target = models.ElementaryAbelian(p, ["x", "y"])
    spec = Specialisation(
        gog, target,
        {"L": {"a": target.generators["x"]},
         "R": {"b": target.generators["y"]}},
        name="free-line-witness")
    witness = verify_properness_witness(gog, spec)
    return gog, witness


def shipped_document(name="heisenberg_chain.gog"):
    """Parse a DSL file shipped inside the package."""
    from .dsl import parse_dsl
    text = resources.files("pgog.data").joinpath(name).read_text()
    return parse_dsl(text)


# -- runnable entries ----------------------------------------------------------


@dataclass(frozen=True)
class ExampleEntry:
    """A named runnable demonstration pinned to an expected outcome."""

    id: str
    claim: str
    expected: str                 # aggregate outcome: "pass" or "skip"
    run: object                   # params dict -> list of checks

    def __repr__(self):
        return f"<ExampleEntry {self.id}: expect {self.expected}>"


def _status(ok):
    return reports.PASS if ok else reports.FAIL


def _chain_runner(n):
    def run(params):
        p = params.get("p", 2)
        gog = improper_heisenberg_chain(p, n)
        report = detect_collapse(fundamental_presentation(gog), p)
        expected = {f"a{i}" for i in range(2, n + 1)}
        expected |= {f"b{i}" for i in range(1, n)}
        return [
            reports.make_check(
                "diverging-set", _status(set(report.collapsed) == expected),
                collapsed=list(report.collapsed), expected=sorted(expected)),
            reports.make_check(
                "residual-rank", _status(report.residual_rank == 2),
                residual_rank=report.residual_rank,
                residual_generators=list(report.residual.generators)),
        ]
    return run


def _two_edge_runner(params):
    p = params.get("p", 2)
    gog = improper_two_edge_line(p)
    report = detect_collapse(fundamental_presentation(gog), p)
    expected = {"x1", "x2", "x3", "x4"}
    return [reports.make_check(
        "diverging-set", _status(set(report.collapsed) == expected),
        collapsed=list(report.collapsed), expected=sorted(expected))]


def _single_edge_skip(params):
    return [reports.make_check(
        "single-edge-properness", reports.SKIP,
        reason="each one-edge subgraph of the two-edge line is claimed to be "
               "a proper amalgam on its own; no witness construction for "
               "Heisenberg amalgams ships here, so the claim is recorded "
               "without a machine check")]


def _free_line_runner(params):
    p = params.get("p", 2)
    gog, witness = free_product_witness(p)
    return [reports.from_check_dict(witness.report, name="witness"),
            reports.bound_check("edge-bound", check_edge_bound(gog, witness))]


def _tower_level(params, fallback=2):
    p = params.get("p", 2)
    return p, params.get("n", fallback if p == 2 else 1)


def _path_witness_runner(params):
    from .tower import build_witnesses
    p, n = _tower_level(params)
    path_witness, _ = build_witnesses(p, n)
    gog = path_witness.specialisation.gog
    return [reports.from_check_dict(path_witness.report, name="witness"),
            reports.make_check("vertex-orders", reports.PASS,
                               image_orders=path_witness.vertex_image_orders),
            reports.bound_check("edge-bound", check_edge_bound(gog, path_witness))]


def _joined_witness_runner(params):
    from .tower import build_witnesses
    p, n = _tower_level(params, fallback=1)
    _, joined_witness = build_witnesses(p, n)
    gog = joined_witness.specialisation.gog
    return [reports.from_check_dict(joined_witness.report, name="witness"),
            reports.make_check(
                "lamplighter-injective",
                _status(joined_witness.vertex_image_orders.get("W")
                        == gog.vertices["W"].model.order),
                image_order=joined_witness.vertex_image_orders.get("W"),
                vertex_order=gog.vertices["W"].model.order),
            reports.bound_check("edge-bound",
                                check_edge_bound(gog, joined_witness))]


def _retraction_runner(params):
    from .tower import build_level, check_retraction_square
    p = params.get("p", 2)
    levels = (2, 3) if p == 2 else (2,)
    return [reports.from_check_dict(check_retraction_square(build_level(p, n)),
                                    name=f"retraction-square-n{n}")
            for n in levels]


def _transition_runner(params):
    from .tower import (check_transition_maps, composed_transition_images,
                        double_fold_images)
    p = params.get("p", 2)
    pairs = [(0, 1), (1, 0), (1, 1), (2, 0)]
    checks = [reports.from_check_dict(check_transition_maps(p, n, m),
                                      name=f"transition-n{n}-m{m}")
              for n, m in pairs]
    for n, m in ((0, 1), (1, 0)):
        composed = composed_transition_images(p, n, m)
        direct = double_fold_images(p, n, m)
        mismatches = [g for g in direct
                      if tuple(composed[g].letters()) != tuple(direct[g].letters())]
        checks.append(reports.make_check(
            f"composed-fold-n{n}-m{m}", _status(not mismatches
                                                and set(composed) == set(direct)),
            generators=len(direct), mismatches=mismatches))
    return checks


def _two_generation_runner(params):
    from .tower import check_two_generation
    p, n = _tower_level(params)
    return [reports.from_check_dict(check_two_generation(p, n),
                                    name="two-generation")]


def _certification_runner(params):
    p = params.get("p", 2)
    n = params.get("n", 1)
    pairs = [("level-group", models.GnModel(p, n), P.gn_presentation(p, n)),
             ("path-witness", models.FnModel(p, max(n, 2)),
              P.fn_presentation(p, max(n, 2))),
             ("heisenberg", models.HeisenbergModP(p),
              P.heisenberg_presentation(p)),
             ("lamplighter", models.LamplighterLevel(p, n),
              P.lamplighter_presentation(p, n))]
    checks = []
    for label, model, pres in pairs:
        checks.append(reports.from_check_dict(
            P.check_model_satisfies(pres, model), name=f"satisfies {label}"))
    for label, model, pres in pairs[:1] + pairs[2:3]:
        table = P.coset_enumerate(pres)
        checks.append(reports.make_check(
            f"coset-count {label}",
            _status(table.complete and table.order == model.order),
            cosets=table.order, closure_order=model.order))
    return checks


def _normal_form_runner(params):
    import random

    from .amalgam import build_transversals, nf_multiply, normal_form
    from .tower import build_graphs
    p = params.get("p", 2)
    path = build_graphs(p, 2, 0).path
    counts = {key[0] + f"@{t.vertex}": t.coset_count
              for key, t in build_transversals(path).items()}
    rng = random.Random(7)
    vertices = list(path.graph.vertices)

    def random_form():
        letters = []
        for _ in range(rng.randrange(1, 4)):
            v = rng.choice(vertices)
            names = list(path.vertices[v].model.generators)
            letters.append((v, path.vertices[v].model.evaluate(
                gen(rng.choice(names)) ** rng.choice((1, -1)))))
        return normal_form(path, letters), letters

    inverses = associative = trials = 25
    inv_ok = assoc_ok = 0
    for _ in range(trials):
        x, letters = random_form()
        xi = normal_form(path, [(v, ~e) for v, e in reversed(letters)])
        inv_ok += nf_multiply(x, xi).is_trivial
        y, _ = random_form()
        z, _ = random_form()
        assoc_ok += (nf_multiply(nf_multiply(x, y), z)
                     == nf_multiply(x, nf_multiply(y, z)))
    return [
        reports.make_check("transversal-counts", reports.PASS, **counts),
        reports.make_check("inverses-cancel", _status(inv_ok == inverses),
                           ok=inv_ok, trials=inverses),
        reports.make_check("products-associate",
                           _status(assoc_ok == associative),
                           ok=assoc_ok, trials=associative),
    ]


def _bracketing_runner(params):
    from .gog import bracket_subgraph
    from .tower import build_graphs
    p = params.get("p", 2)
    path = build_graphs(p, 3, 0).path
    bracketed = bracket_subgraph(path, ["G2", "G3"])
    full = P.mod_p_rank(fundamental_presentation(path), p)
    folded = P.mod_p_rank(fundamental_presentation(bracketed), p)
    return [reports.make_check(
        "bracketed-rank", _status(full == folded),
        full_rank=full, bracketed_rank=folded,
        bracketed_vertices=list(bracketed.graph.vertices))]


def _separation_runner(params):
    from .amalgam import lamp_letter, path_letter, separate
    p = params.get("p", 2)
    letters = [path_letter("G1", gen("k1")), lamp_letter(1, gen("t"))]
    cert = separate(letters, p, max_level=params.get("max_level", 4))
    return [reports.make_check(
        "certificate", _status(not cert.image.is_identity
                               and cert.reevaluate() == cert.image),
        level=cert.level, target=cert.specialisation.target.name,
        image=list(cert.image.coords),
        certified_injective=cert.certified_injective)]


def _shipped_chain_runner(params):
    doc = shipped_document()
    gog = doc.graphs["chain"]
    reference = improper_heisenberg_chain(2, 3)
    parsed = detect_collapse(fundamental_presentation(gog), 2)
    expected = detect_collapse(fundamental_presentation(reference), 2)
    same_shape = (list(gog.graph.vertices) == list(reference.graph.vertices)
                  and dict(gog.graph.edges) == dict(reference.graph.edges))
    return [
        reports.make_check("parses", reports.PASS,
                           vertices=list(gog.graph.vertices),
                           edges=sorted(gog.graph.edges)),
        reports.make_check(
            "matches-reference",
            _status(same_shape and parsed.collapsed == expected.collapsed
                    and parsed.residual_rank == expected.residual_rank),
            collapsed=list(parsed.collapsed),
            residual_rank=parsed.residual_rank),
    ]


ENTRIES = tuple(
    [ExampleEntry(
        f"chains/improper-n{n}",
        f"the {n}-vertex Heisenberg chain collapses onto its end generators",
        reports.PASS, _chain_runner(n))
     for n in (2, 3, 4, 5)]
    + [
        ExampleEntry(
            "lines/two-edge-collapse",
            "the two-edge line with commutator-cycled edge maps kills all "
            "four x-generators",
            reports.PASS, _two_edge_runner),
        ExampleEntry(
            "lines/single-edge-properness",
            "each single edge of the two-edge line is a proper amalgam",
            reports.SKIP, _single_edge_skip),
        ExampleEntry(
            "lines/free-product-witness",
            "the trivial-edge line is properly witnessed by the direct "
            "product and meets the edge-count bound",
            reports.PASS, _free_line_runner),
        ExampleEntry(
            "tower/path-witness",
            "the level path embeds into its finite witness model",
            reports.PASS, _path_witness_runner),
        ExampleEntry(
            "tower/joined-witness",
            "the path joined with the lamplighter vertex embeds into its "
            "finite witness model, injectively on the lamplighter",
            reports.PASS, _joined_witness_runner),
        ExampleEntry(
            "tower/retraction-squares",
            "lamp folding commutes with vertex folding and retracts the "
            "level inclusions",
            reports.PASS, _retraction_runner),
        ExampleEntry(
            "tower/transition-maps",
            "tail-to-tail fold maps are homomorphisms retracting the tail "
            "inclusions",
            reports.PASS, _transition_runner),
        ExampleEntry(
            "tower/two-generation",
            "one lamp and the shift generate the whole lamplighter level",
            reports.PASS, _two_generation_runner),
        ExampleEntry(
            "tower/bracketing",
            "collapsing a sub-path into one vertex preserves the minimal "
            "generator count",
            reports.PASS, _bracketing_runner),
        ExampleEntry(
            "models/certification",
            "each closed-form model satisfies its presentation, and coset "
            "counts over the trivial subgroup match closure orders",
            reports.PASS, _certification_runner),
        ExampleEntry(
            "amalgam/normal-forms",
            "transversal counts, inverse cancellation, and associativity "
            "hold on the two-vertex path",
            reports.PASS, _normal_form_runner),
        ExampleEntry(
            "separation/mixed-word",
            "a vertex letter times a shift letter is certified nontrivial "
            "at the first level",
            reports.PASS, _separation_runner),
        ExampleEntry(
            "dsl/shipped-chain",
            "the shipped chain file parses to the reference improper chain",
            reports.PASS, _shipped_chain_runner),
    ])

_BY_ID = {entry.id: entry for entry in ENTRIES}


def example_ids():
    return [entry.id for entry in ENTRIES]


def _aggregate(checks):
    statuses = {c["status"] for c in checks}
    if reports.FAIL in statuses:
        return reports.FAIL
    if checks and statuses <= {reports.SKIP}:
        return reports.SKIP
    return reports.PASS


def _entry_checks(entry, params):
    try:
        checks = entry.run(params)
    except ValueError as exc:
        checks = [reports.make_check("execution", reports.FAIL,
                                     error=str(exc))]
    outcome = _aggregate(checks)
    checks.append(reports.make_check(
        "expected-outcome", _status(outcome == entry.expected),
        expected=entry.expected, outcome=outcome, claim=entry.claim))
    return checks


def run_example(example_id, **params):
    """Run one registered example and report its checks."""
    entry = _BY_ID.get(example_id)
    if entry is None:
        raise ValueError(f"unregistered example id {example_id!r}; "
                         f"known ids: {', '.join(example_ids())}")
    report = reports.Report(command=f"run {example_id}", parameters=params)
    report.extend(_entry_checks(entry, params))
    return report


def run_all(pattern="*", **params):
    """Run every registered example matching the glob, in registry order."""
    report = reports.Report(command=f"run-all {pattern}", parameters=params)
    for entry in ENTRIES:
        if not fnmatch(entry.id, pattern):
            continue
        for check in _entry_checks(entry, params):
            report.add(f"{entry.id}: {check['name']}", check["status"],
                       **check["details"])
    return report
