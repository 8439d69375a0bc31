"""Model-level checks against independent oracles.

Two oracles that share no code with the kernel:

* the Heisenberg model is compared entry-by-entry with 3x3 unitriangular
  matrix multiplication;
* the twist models (GnModel, FnModel) are compared with a letter-by-letter
  collection oracle that multiplies normal forms h^x k^u by pushing each
  lamp letter of the right factor through the chain string, applying the
  defining commutation relations one letter at a time.

The remaining tests pin down the defining relations, the closed-form
orders, and the model API surface.
"""

import random

import pytest

from pgog import backend, models
from pgog.words import commutator, gen


# -- Heisenberg vs unitriangular matrices -----------------------------------

def as_matrix(coords):
    a, b, c = coords
    return ((1, a, c), (0, 1, b), (0, 0, 1))


def mat_mul(p, m, n):
    return tuple(
        tuple(sum(m[i][k] * n[k][j] for k in range(3)) % p for j in range(3))
        for i in range(3))


@pytest.mark.parametrize("p", [2, 3])
def test_heisenberg_matches_matrix_group(p):
    m = models.HeisenbergModP(p)
    elems = [e.coords for e in m.closure()]
    assert len(elems) == p ** 3
    for a in elems:
        for b in elems:
            prod = backend.mul(m.blocks, a, b)
            assert as_matrix(prod) == mat_mul(p, as_matrix(a), as_matrix(b))


def test_heisenberg_commutator_is_central_of_order_p():
    for p in (2, 3):
        m = models.HeisenbergModP(p)
        x, y = m.generators["x"], m.generators["y"]
        z = m.commutator(x, y)
        assert not z.is_identity
        assert m.element_order(z) == p
        assert z * x == x * z and z * y == y * z
        assert m.power(z, p).is_identity


# -- twist models vs the collection oracle ----------------------------------

def collection_mul(p, nk, bumps, a, b):
    """Multiply h-left normal forms h^x k^u.

    Coordinates are (u_0..u_{nk-1}, x_0..).  bumps maps a lamp index j to
    (src, dst) layer pairs: one h_j letter passing the chain string turns
    each k_src letter loose a k_dst, i.e. u_dst += u_src.
    """
    u = list(a[:nk])
    for j, cnt in enumerate(b[nk:]):
        for _ in range(cnt):
            for src, dst in bumps.get(j, ()):
                u[dst] = (u[dst] + u[src]) % p
    x = [(pa + pb) % p for pa, pb in zip(a[nk:], b[nk:])]
    u = [(pa + pb) % p for pa, pb in zip(u, b[:nk])]
    return tuple(u + x)


def gn_oracle(p, n):
    return lambda a, b: collection_mul(p, 2, {p ** (n - 1): ((0, 1),)}, a, b)


def fn_oracle(p, n):
    bumps = {p ** i: ((i - 1, i),) for i in range(1, n)}
    return lambda a, b: collection_mul(p, n, bumps, a, b)


def assert_full_table(m, oracle):
    elems = [e.coords for e in m.closure()]
    for a in elems:
        for b in elems:
            assert backend.mul(m.blocks, a, b) == oracle(a, b)


def assert_sampled_table(m, oracle, trials=2000):
    mods = [m.p] * m.width
    rng = random.Random(5150)
    for _ in range(trials):
        a = tuple(rng.randrange(q) for q in mods)
        b = tuple(rng.randrange(q) for q in mods)
        assert backend.mul(m.blocks, a, b) == oracle(a, b)


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1)])
def test_gn_full_table_matches_collection(p, n):
    assert_full_table(models.GnModel(p, n), gn_oracle(p, n))


@pytest.mark.parametrize("p,n", [(2, 3), (3, 2)])
def test_gn_sampled_table_matches_collection(p, n):
    assert_sampled_table(models.GnModel(p, n), gn_oracle(p, n))


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1)])
def test_fn_full_table_matches_collection(p, n):
    assert_full_table(models.FnModel(p, n), fn_oracle(p, n))


@pytest.mark.parametrize("p,n", [(3, 2), (5, 1)])
def test_fn_sampled_table_matches_collection(p, n):
    assert_sampled_table(models.FnModel(p, n), fn_oracle(p, n))


# -- defining relations -------------------------------------------------------

@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_gn_relations(p, n):
    m = models.GnModel(p, n)
    pn = p ** n
    lo, hi = m.generators[f"k{n - 1}"], m.generators[f"k{n}"]
    hs = [m.generators[f"h{j}"] for j in range(pn)]
    assert m.commutator(lo, hs[p ** (n - 1)]) == hi
    for j in range(pn):
        assert m.commutator(hi, hs[j]).is_identity
        if j != p ** (n - 1):
            assert m.commutator(lo, hs[j]).is_identity
        assert m.element_order(hs[j]) == p
        for i in range(j):
            assert m.commutator(hs[i], hs[j]).is_identity
    assert m.element_order(lo) == p and m.element_order(hi) == p
    assert m.commutator(lo, hi).is_identity


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_fn_relations(p, n):
    m = models.FnModel(p, n)
    pn = p ** n
    ks = [m.generators[f"k{i}"] for i in range(1, n + 1)]
    hs = [m.generators[f"h{j}"] for j in range(pn)]
    for i in range(1, n):
        assert m.commutator(ks[i - 1], hs[p ** i]) == ks[i]
    twist_of = {p ** i: i for i in range(1, n)}
    for idx, k in enumerate(ks, start=1):
        for j in range(pn):
            if twist_of.get(j) != idx:
                assert m.commutator(k, hs[j]).is_identity
    for a in ks:
        for b in ks:
            assert m.commutator(a, b).is_identity
        assert m.element_order(a) == p


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (2, 3), (3, 1)])
def test_lamplighter_relations(p, n):
    m = models.LamplighterLevel(p, n)
    pn = p ** n
    t = m.generators["t"]
    hs = [m.generators[f"h{j}"] for j in range(pn)]
    for j in range(pn):
        assert ~t * hs[j] * t == hs[(j + 1) % pn]
        assert m.element_order(hs[j]) == p
        for i in range(j):
            assert m.commutator(hs[i], hs[j]).is_identity
    assert m.element_order(t) == pn
    assert m.closure([f"h{j}" for j in range(pn)]).order == p ** pn


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1)])
def test_en_witness_relations(p, n):
    m = models.EnWitnessModel(p, n)
    pn = p ** n
    t = m.generators["t"]
    hs = [m.generators[f"h{j}"] for j in range(pn)]
    for j in range(pn):
        assert ~t * hs[j] * t == hs[(j + 1) % pn]
    for i in range(1, n + 1):
        for r in range(pn):
            k = m.generators[f"k{i}_{r}"]
            assert ~t * k * t == m.generators[f"k{i}_{(r + 1) % pn}"]
            assert m.element_order(k) == p
    # each shifted copy of the chain twists at its own lamp index
    for r in range(pn):
        if n >= 2:
            k1 = m.generators[f"k1_{r}"]
            assert m.commutator(k1, hs[(p + r) % pn]) == m.generators[f"k2_{r}"]
            for j in range(pn):
                if j != (p + r) % pn:
                    assert m.commutator(k1, hs[j]).is_identity
        top = m.generators[f"k{n}_{r}"]
        for j in range(pn):
            assert m.commutator(top, hs[j]).is_identity
    assert m.element_order(t) == pn


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 3)])
def test_chain_witness_relations(p, n):
    m = models.ChainWitness(p, n)
    pn = p ** n
    ks = [m.generators[f"k{i}"] for i in range(1, n + 1)]
    hs = [m.generators[f"h{j}"] for j in range(pn)]
    twist_of = {p ** i: i for i in range(1, n)}
    # the full chain survives: [k_{i-1}, h at twist index] = k_i, nonzero
    for i in range(2, n + 1):
        assert m.commutator(ks[i - 2], hs[p ** (i - 1)]) == ks[i - 1]
        assert not ks[i - 1].is_identity
    # every commutation a chain vertex demands holds...
    for idx, k in enumerate(ks, start=1):
        for j in range(pn):
            if twist_of.get(j, n) >= idx:
                continue   # higher twist rows are not required to commute
            assert m.commutator(k, hs[j]).is_identity
        assert m.element_order(k) == p
    # ...including everything against the top generator
    for j in range(pn):
        assert m.commutator(ks[-1], hs[j]).is_identity
        assert m.element_order(hs[j]) == p
        for i in range(j):
            assert m.commutator(hs[i], hs[j]).is_identity
    c = m.generators["c"]
    assert m.element_order(c) == p
    for g in m.generators.values():
        assert m.commutator(c, g).is_identity


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (2, 3), (3, 2)])
def test_shifted_chain_witness_relations(p, n):
    m = models.ShiftedChainWitness(p, n)
    pn = p ** n
    t = m.generators["t"]
    ks = [m.generators[f"k{i}"] for i in range(1, n + 1)]
    hs = [m.generators[f"h{j}"] for j in range(pn)]
    for j in range(pn):
        assert ~t * hs[j] * t == hs[(j + 1) % pn]
    for i in range(2, n + 1):
        assert m.commutator(ks[i - 2], hs[p ** (i - 1)]) == ks[i - 1]
        assert not ks[i - 1].is_identity
    twist_of = {p ** i: i for i in range(1, n)}
    for idx, k in enumerate(ks, start=1):
        for j in range(pn):
            if twist_of.get(j, n) >= idx:
                continue
            assert m.commutator(k, hs[j]).is_identity
    for j in range(pn):
        assert m.commutator(ks[-1], hs[j]).is_identity
    assert m.element_order(t) == pn
    # the shift moves the chain to a fresh orbit copy and cycles back
    if n >= 2:
        moved = ~t * ks[0] * t
        assert moved != ks[0]
        assert m.power(~t, pn) * ks[0] * m.power(t, pn) == ks[0]
    c = m.generators["c"]
    assert m.element_order(c) == p
    for g in m.generators.values():
        assert m.commutator(c, g).is_identity


# -- closed-form orders -------------------------------------------------------

@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (2, 3), (3, 1)])
def test_order_formulas(p, n):
    pn = p ** n
    assert models.GnModel(p, n).order == p ** (2 + pn)
    assert models.LamplighterLevel(p, n).order == p ** (pn + n)
    if n <= 2:
        assert models.FnModel(p, n).order == p ** (n + pn)


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1)])
def test_en_witness_order(p, n):
    pn = p ** n
    assert models.EnWitnessModel(p, n).order == p ** (n * pn + pn + n)


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_chain_witness_order(p, n):
    # all 2^(n-1) module monomials are reachable, the lamps contribute p^n
    # dimensions, and c one more; the multiplier coordinates are locked to
    # the lamp at their twist index, so they add nothing.
    expected = p ** (2 ** (n - 1) + p ** n + 1)
    assert models.ChainWitness(p, n).order == expected


def test_cyclic_model_order_and_generator():
    m = models.CyclicModel(3, 2)
    assert m.order == 9
    assert m.element_order(m.generators["z"]) == 9
    assert m.power(m.generators["z"], 9).is_identity


# -- API surface --------------------------------------------------------------

def test_element_validation():
    m = models.GnModel(2, 1)
    with pytest.raises(ValueError, match="coordinates"):
        m.element((1, 0))
    e = m.element([1, 0, 1, 0])
    assert e.coords == (1, 0, 1, 0)


def test_cross_model_elements_rejected():
    a = models.GnModel(2, 1)
    b = models.LamplighterLevel(2, 1)
    with pytest.raises(ValueError, match="does not belong"):
        a.multiply(a.generators["k0"], b.generators["t"])
    with pytest.raises(ValueError, match="does not belong"):
        a.inverse(b.generators["t"])


def test_structural_equality_between_instances():
    a, b = models.GnModel(2, 2), models.GnModel(2, 2)
    assert a == b
    assert a.generators["k1"] == b.generators["k1"]
    # elements of a structurally equal twin are accepted
    assert a.multiply(a.generators["k1"], b.generators["h2"]) == \
        b.multiply(b.generators["k1"], a.generators["h2"])
    assert models.GnModel(2, 1) != models.FnModel(2, 1)


def test_power_and_negative_exponents():
    m = models.LamplighterLevel(2, 2)
    t = m.generators["t"]
    assert m.power(t, -1) == ~t
    assert m.power(t, 4).is_identity
    assert m.power(t, -3) == m.power(~t, 3)
    assert m.power(t, 0) == m.identity


def test_word_for_round_trip():
    m = models.GnModel(2, 2)
    table = m.closure()
    lengths = []
    for e in table:
        w = table.word_for(e)
        assert m.evaluate(w) == e
        lengths.append(len(w))
    assert lengths == sorted(lengths)   # BFS produces shortest words
    assert not table.word_for(m.identity)   # empty word


def test_word_for_rejects_foreign_and_missing():
    m = models.GnModel(2, 2)
    table = m.closure(["h0", "h1"])
    assert table.order == 4
    outside = m.generators["k1"]
    with pytest.raises(KeyError):
        table.word_for(outside)
    other = models.LamplighterLevel(2, 1)
    with pytest.raises(ValueError, match="different model"):
        table.word_for(other.generators["t"])


def test_closure_accepts_names_and_elements():
    m = models.LamplighterLevel(2, 2)
    by_name = m.closure(["h0", "t"])
    by_elem = m.closure([m.generators["h0"], m.generators["t"]])
    assert by_name.order == by_elem.order == m.order


def test_evaluate_with_assignment_and_missing_name():
    m = models.GnModel(2, 2)
    w = commutator(gen("a"), gen("b"))
    img = m.evaluate(w, {"a": m.generators["k1"], "b": m.generators["h2"]})
    assert img == m.generators["k2"]
    with pytest.raises(KeyError, match="no image"):
        m.evaluate(gen("zz"))


def test_size_guard_env_override(monkeypatch):
    monkeypatch.setenv("PGOG_SIZE_GUARD", "8")
    m = models.GnModel(2, 2)
    with pytest.raises(ValueError, match="size guard"):
        m.closure()
    monkeypatch.delenv("PGOG_SIZE_GUARD")
    assert m.closure().order == 64


def test_closure_limit_argument():
    m = models.GnModel(2, 2)
    with pytest.raises(ValueError, match="size guard"):
        m.closure(limit=10)


def test_direct_product_orders_multiply_and_names_guarded():
    h = models.HeisenbergModP(2)
    ea = models.ElementaryAbelian(2, ["a", "b"])
    prod = models.DirectProduct(h, ea)
    assert prod.order == h.order * ea.order
    assert prod.commutator(prod.generators["x"], prod.generators["a"]).is_identity
    with pytest.raises(ValueError, match="collide"):
        models.DirectProduct(h, models.HeisenbergModP(2))
    with pytest.raises(ValueError, match="share the prime"):
        models.DirectProduct(h, models.ElementaryAbelian(3, ["q"]))


def test_stacked_twist_models_refuse_depth_three():
    with pytest.raises(ValueError, match="non-associative"):
        models.FnModel(2, 3)
    with pytest.raises(ValueError, match="non-associative"):
        models.EnWitnessModel(2, 3)


def test_prime_level_validation():
    with pytest.raises(ValueError, match="prime"):
        models.PrimeLevel(4)
    with pytest.raises(ValueError, match="prime"):
        models.PrimeLevel(1)
    with pytest.raises(ValueError, match="level n"):
        models.PrimeLevel(2, 0)
    with pytest.raises(ValueError, match="level m"):
        models.PrimeLevel(2, 1, -1)
    with pytest.raises(ValueError, match="cap"):
        models.PrimeLevel(2, 21)
    lvl = models.PrimeLevel(3, 2, 0)
    assert (lvl.p, lvl.n, lvl.m) == (3, 2, 0)
