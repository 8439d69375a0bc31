"""Normal forms over path-shaped graphs of finite groups, plus separation.

Every graph the tower assembles is a path, so elements of its fundamental
group carry a canonical alternating form: a head element in the leftmost
vertex group followed by coset-representative syllables walking the path.
Representatives come from deterministic shortlex transversal tables, which
makes normal forms reproducible across runs; the form is empty exactly for
the trivial element, solving the word problem at desk scale.

separate() hunts for the least level whose lamp-joined splitting both keeps
a mixed word in nonempty reduced form and pushes it to a nontrivial image in
the level's verified finite quotient, and returns that quotient as an
explicit separation certificate.
"""

from dataclasses import dataclass
from functools import lru_cache

from . import models
from . import presentations as P
from .gog import verify_specialisation
from .tower import build_witnesses, joined_witness_specialisation
from .words import Word, from_letters

# full properness certification closes the whole lamplighter vertex; past
# this order only the homomorphism property is re-verified
FULL_WITNESS_BOUND = 1 << 16


# -- transversal tables ------------------------------------------------------


def _path_order(gog):
    """Vertex ids in path order; raises when the graph is not a path."""
    vertices = list(gog.graph.vertices)
    for eid in gog.graph.edges:
        if gog.graph.is_loop(eid):
            raise ValueError(f"not a path: edge {eid} is a loop")
    if len(gog.graph.edges) != len(vertices) - 1:
        raise ValueError("not a path: wrong edge count")
    neighbours = {v: [] for v in vertices}
    for eid in gog.graph.edges:
        a, b = gog.graph.ends(eid)
        neighbours[a].append(b)
        neighbours[b].append(a)
    if any(len(ns) > 2 for ns in neighbours.values()):
        raise ValueError("not a path: branching vertex")
    if len(vertices) == 1:
        return (vertices[0],)
    start = next(v for v in vertices if len(neighbours[v]) == 1)
    order, seen = [start], {start}
    while True:
        step = [w for w in neighbours[order[-1]] if w not in seen]
        if not step:
            break
        order.append(step[0])
        seen.add(step[0])
    if len(order) != len(vertices):
        raise ValueError("not a path: not connected")
    return tuple(order)


def _word_key(word):
    letters = tuple(word.letters())
    return (len(letters), letters)


class Transversal:
    """Right-coset representatives of one edge-group image in one vertex model.

    Each coset is represented by its element with the shortlex-least closure
    word, so tables are identical across runs; the identity represents the
    edge-image coset itself.
    """

    def __init__(self, edge_id, end, vertex, hom, representatives, rep_of,
                 to_edge):
        self.edge_id = edge_id
        self.end = end
        self.vertex = vertex
        self.hom = hom                      # edge group -> vertex model
        self.representatives = tuple(representatives)
        self._rep_of = rep_of               # coords -> representative
        self._to_edge = to_edge             # image coords -> edge element

    @property
    def coset_count(self):
        return len(self.representatives)

    def representative(self, element):
        """Canonical representative of the element's right coset."""
        if element.model != self.hom.target:
            raise ValueError(
                f"element does not belong to vertex {self.vertex}")
        return self._rep_of[element.coords]

    def pull_back(self, element):
        """The edge-group element mapping onto an edge-image element."""
        try:
            return self._to_edge[element.coords]
        except KeyError:
            raise ValueError(
                f"{element!r} is outside the edge image at {self.vertex}"
            ) from None

    def __repr__(self):
        return (f"<Transversal {self.edge_id}@{self.vertex}: "
                f"{self.coset_count} cosets>")


def _build_transversal(gog, eid, end):
    vertex = gog.graph.ends(eid)[end]
    model = gog.vertices[vertex].model
    edge_model = gog.edges[eid].model
    mapping = {g: gog.image_element(eid, end, g)
               for g in edge_model.generators}
    hom = P.GroupHom(edge_model, model, mapping, name=f"{eid}->{vertex}")
    to_edge = {hom.apply_element(k).coords: k for k in edge_model.closure()}
    closure = model.closure()
    elements = sorted(closure, key=lambda e: _word_key(closure.word_for(e)))
    image = [model.element(coords) for coords in to_edge]
    rep_of, reps = {}, []
    for e in elements:
        if e.coords in rep_of:
            continue
        reps.append(e)
        for kappa in image:
            rep_of[(kappa * e).coords] = e
    return Transversal(eid, end, vertex, hom, reps, rep_of, to_edge)


def build_transversals(gog):
    """Shortlex coset tables for both ends of every edge of a path."""
    _path_order(gog)
    return {(eid, end): _build_transversal(gog, eid, end)
            for eid in gog.graph.edges for end in (0, 1)}


class _PathTables:
    """Path layout plus transversal tables, built once per graph."""

    def __init__(self, gog):
        self.gog = gog
        self.order = _path_order(gog)
        self.position = {v: i for i, v in enumerate(self.order)}
        self.edge_between = {}
        for eid in gog.graph.edges:
            a, b = gog.graph.ends(eid)
            self.edge_between[(a, b)] = eid
            self.edge_between[(b, a)] = eid
        self.transversals = build_transversals(gog)

    def end_table(self, eid, vertex):
        a, _ = self.gog.graph.ends(eid)
        return self.transversals[(eid, 0 if vertex == a else 1)]

    def cross(self, eid, from_vertex, element):
        """Carry an edge-image element to the edge's other endpoint."""
        a, b = self.gog.graph.ends(eid)
        other = b if from_vertex == a else a
        k = self.end_table(eid, from_vertex).pull_back(element)
        return self.end_table(eid, other).hom.apply_element(k)


_TABLES = {}


def _tables(gog):
    entry = _TABLES.get(id(gog))
    if entry is None or entry.gog is not gog:
        entry = _PathTables(gog)
        _TABLES[id(gog)] = entry
    return entry


# -- reduced words -----------------------------------------------------------


class ReducedWord:
    """Canonical alternating form of a path fundamental-group element.

    head lives in the leftmost vertex group; each syllable records the
    vertex it sits in, its coset representative, and the edge it was
    entered by, so the walk along the path is recoverable.
    """

    def __init__(self, gog, base_vertex, head, syllables):
        self.gog = gog
        self.base_vertex = base_vertex
        self.head = head
        self.syllables = tuple(syllables)

    @property
    def is_trivial(self):
        return self.head.is_identity and not self.syllables

    @property
    def syllable_count(self):
        return len(self.syllables)

    def letters(self):
        """Vertex-tagged elements multiplying left-to-right to the element."""
        out = []
        if not self.head.is_identity:
            out.append((self.base_vertex, self.head))
        out.extend((v, rep) for v, rep, _ in self.syllables
                   if not rep.is_identity)
        return out

    def __eq__(self, other):
        return (isinstance(other, ReducedWord) and self.gog is other.gog
                and self.head == other.head
                and self.syllables == other.syllables)

    def __repr__(self):
        if self.is_trivial:
            return "<ReducedWord trivial>"
        parts = [f"{v}:{tuple(rep.coords)}" for v, rep, _ in self.syllables]
        return (f"<ReducedWord head={tuple(self.head.coords)} "
                + " ".join(parts) + ">")


class _Accumulator:
    """Right-multiplies letters into a reduced word, one at a time."""

    def __init__(self, tables):
        self.tables = tables
        self.gog = tables.gog
        self.base = tables.order[0]
        self.head = self.gog.vertices[self.base].model.identity
        self.stack = []     # (vertex, representative, entry edge)

    def end_vertex(self):
        return self.stack[-1][0] if self.stack else self.base

    def push(self, vertex, x):
        """Multiply by x, an element of the vertex's model, on the right."""
        cur = self.end_vertex()
        if cur != vertex:
            pos, walk = self.tables.position, self.tables.order
            step = 1 if pos[vertex] > pos[cur] else -1
            for k in range(pos[cur] + step, pos[vertex] + step, step):
                w = walk[k]
                eid = self.tables.edge_between[(walk[k - step], w)]
                self.stack.append(
                    (w, self.gog.vertices[w].model.identity, eid))
        self._merge(x)

    def _merge(self, x):
        # multiply x into the current end vertex and restore canonical form
        if x.is_identity:
            while self.stack and self.stack[-1][1].is_identity:
                self.stack.pop()
            return
        if not self.stack:
            self.head = self.head * x
            return
        vertex, rep, entry = self.stack.pop()
        y = rep * x
        s = self.tables.end_table(entry, vertex).representative(y)
        kappa = y * ~s
        if s.is_identity:
            self._merge(self.tables.cross(entry, vertex, kappa))
            return
        if kappa.is_identity:
            self.stack.append((vertex, s, entry))
            return
        self._merge(self.tables.cross(entry, vertex, kappa))
        self.push(vertex, s)

    def result(self):
        return ReducedWord(self.gog, self.base, self.head, self.stack)


def _as_items(gog, letters):
    items = []
    for i, (vertex, item) in enumerate(letters):
        if vertex not in gog.vertices:
            raise ValueError(f"letter {i}: unknown vertex {vertex!r}")
        model = gog.vertices[vertex].model
        if isinstance(item, Word):
            try:
                element = model.evaluate(item)
            except KeyError as exc:
                raise ValueError(f"letter {i} at {vertex}: {exc}") from None
        elif isinstance(item, models.GroupElement):
            if item.model != model:
                raise ValueError(
                    f"letter {i}: element does not belong to vertex {vertex}")
            element = item
        else:
            raise ValueError(f"letter {i}: expected a Word or GroupElement")
        items.append((vertex, element))
    return items


def normal_form(gog, letters):
    """Reduce vertex-tagged letters to the canonical alternating form.

    Letters are (vertex id, element-or-Word) pairs multiplied left to
    right; the result is empty exactly when the product is trivial in the
    path's fundamental group.
    """
    tables = _tables(gog)
    acc = _Accumulator(tables)
    for vertex, element in _as_items(gog, letters):
        acc.push(vertex, element)
    return acc.result()


def nf_multiply(x, y):
    """Normal form of the product of two reduced words over the same path."""
    if not isinstance(x, ReducedWord) or not isinstance(y, ReducedWord):
        raise ValueError("nf_multiply needs two ReducedWords")
    if x.gog is not y.gog:
        raise ValueError("reduced words live over different graphs")
    tables = _tables(x.gog)
    acc = _Accumulator(tables)
    for vertex, element in list(x.letters()) + list(y.letters()):
        acc.push(vertex, element)
    return acc.result()


# -- separation --------------------------------------------------------------


@dataclass(frozen=True)
class PathLetter:
    """A path-side letter: vertex-tagged words multiplied left to right."""

    syllables: tuple    # ((vertex id, Word), ...)


@dataclass(frozen=True)
class LampLetter:
    """A lamplighter-side letter, written at its native level."""

    level: int
    word: object        # Word over the lamp generators and the shift


def path_letter(*pairs):
    """path_letter(("G1", word), ...); a single pair may be passed flat."""
    if len(pairs) == 2 and isinstance(pairs[0], str):
        pairs = (pairs,)
    out = []
    for vertex, word in pairs:
        _vertex_index(vertex)
        if not isinstance(word, Word):
            raise ValueError(f"path letter at {vertex}: expected a Word")
        out.append((vertex, word))
    return PathLetter(tuple(out))


def lamp_letter(level, item):
    """A lamplighter letter from a Word or a lamplighter model element."""
    if isinstance(item, models.GroupElement):
        item = item.model.closure().word_for(item)
    if not isinstance(item, Word):
        raise ValueError("lamp letter: expected a Word or GroupElement")
    for name in item.names():
        if name != "t" and not (name.startswith("h") and name[1:].isdigit()):
            raise ValueError(f"lamp letter: unknown generator {name!r}")
    return LampLetter(int(level), item)


def _vertex_index(vertex):
    if not (vertex.startswith("G") and vertex[1:].isdigit()):
        raise ValueError(
            f"path letters live at vertices 'G<i>', got {vertex!r}")
    return int(vertex[1:])


def _fold_lamp_word(p, level, word):
    """Project a lamplighter word down to the given level's window."""
    window = p ** level
    letters = []
    for name, sign in word.letters():
        if name.startswith("h"):
            name = f"h{int(name[1:]) % window}"
        letters.append((name, sign))
    return from_letters(letters)


def _letter_is_empty(letter):
    if isinstance(letter, PathLetter):
        return all(not word for _, word in letter.syllables)
    return not letter.word


@lru_cache(maxsize=None)
def _level_data(p, level):
    """The lamp-joined splitting, its witness map, and how hard it was
    verified: fully (per-vertex injectivity) below FULL_WITNESS_BOUND,
    by the homomorphism conditions alone above it."""
    gog, spec = joined_witness_specialisation(p, level)
    if models.LamplighterLevel(p, level).order <= FULL_WITNESS_BOUND:
        build_witnesses(p, level)
        return gog, spec, True
    report = verify_specialisation(gog, spec)
    if report["status"] != "pass":
        raise ValueError(
            f"witness map failed at level {level}: {report['violations']}")
    return gog, spec, False


def _level_items(letters, p, level):
    items = []
    for letter in letters:
        if isinstance(letter, PathLetter):
            items.extend(letter.syllables)
        else:
            items.append(("W", _fold_lamp_word(p, level, letter.word)))
    return items


def _direct_image(letters, p, level, spec):
    image = spec.target.identity
    for letter in letters:
        if isinstance(letter, PathLetter):
            for vertex, word in letter.syllables:
                image = image * spec.vertex_hom(vertex).apply(word)
        else:
            folded = _fold_lamp_word(p, level, letter.word)
            image = image * spec.vertex_hom("W").apply(folded)
    return image


class SeparationCertificate:
    """A finite p-group quotient where the input word is visibly nontrivial."""

    def __init__(self, letters, level, specialisation, image, reduced,
                 certified_injective):
        self.letters = tuple(letters)
        self.level = level
        self.specialisation = specialisation
        self.image = image
        self.reduced = reduced
        self.certified_injective = certified_injective

    def reevaluate(self):
        """Recompute the image straight from the letters through the map."""
        p = self.specialisation.target.p
        return _direct_image(self.letters, p, self.level, self.specialisation)

    def __repr__(self):
        return (f"<SeparationCertificate level={self.level} "
                f"target={self.specialisation.target.name} "
                f"image={tuple(self.image.coords)}>")


def separate(letters, p, start_level=1, max_level=4):
    """Find the least level whose joined splitting separates the word.

    Letters alternate PathLetters (words in the path vertices, which embed
    upward unchanged) and LampLetters (folded down from their native
    levels).  A level certifies when the folded word has nonempty normal
    form and a nontrivial image in the level's witness quotient; the search
    is linear so the reported level is the least one.
    """
    letters = tuple(letters)
    for letter in letters:
        if not isinstance(letter, (PathLetter, LampLetter)):
            raise ValueError("letters must be PathLetter or LampLetter")
    if all(_letter_is_empty(letter) for letter in letters):
        raise ValueError("trivial element")
    lo, hi = start_level, max_level
    natives = set()
    for letter in letters:
        if isinstance(letter, PathLetter):
            lo = max(lo, max(_vertex_index(v) for v, _ in letter.syllables))
        else:
            natives.add(letter.level)
            hi = min(hi, letter.level)
    for level in range(lo, hi + 1):
        gog, spec, certified = _level_data(p, level)
        nf = normal_form(gog, _level_items(letters, p, level))
        if nf.is_trivial:
            # folding at the letters' own level loses nothing, so an empty
            # form there settles triviality outright
            if not natives or natives == {level}:
                raise ValueError("trivial element")
            continue
        image = _direct_image(letters, p, level, spec)
        if image.is_identity:
            continue
        return SeparationCertificate(letters, level, spec, image, nf,
                                     certified)
    raise ValueError(f"inconclusive: no level in [{start_level}, "
                     f"{max_level}] certifies the word")
