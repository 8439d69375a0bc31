# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled arithmetic kernel, semantics identical to _kernels_py.

Elements cross the boundary as int tuples; internally the closure loop
works on C arrays with a mixed-radix int64 key for the seen-set, so it
only supports models whose coordinate moduli multiply to < 2**62
(supports() reports this; the backend falls back to pure Python
otherwise).  BFS order matches the pure kernel exactly.
"""

from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t

cdef enum:
    EA = 0
    CYC = 1
    HEIS = 2
    GN = 3
    FN = 4
    LAMP = 5
    EN = 6
    MOD = 7


cdef struct Block:
    int kind
    int p
    int n
    int q
    int off
    int width


cdef int _load_blocks(object blocks, Block* blk, int nblk) except -1:
    cdef int i
    for i in range(nblk):
        blk[i].kind = blocks[i][0]
        blk[i].p = blocks[i][1]
        blk[i].n = blocks[i][2]
        blk[i].q = blocks[i][3]
        blk[i].off = blocks[i][4]
        blk[i].width = blocks[i][5]
    return 0


cdef void _mul_c(Block* blk, int nblk, long* a, long* b, long* out) noexcept nogil:
    cdef int kind, k, i, j, r, off, width, p, n, q, pn, x0, t, ppow, row, prev, tw
    cdef int dim, a0, tc, bit, src, s, v
    cdef long coef
    for k in range(nblk):
        kind = blk[k].kind
        p = blk[k].p
        n = blk[k].n
        q = blk[k].q
        off = blk[k].off
        width = blk[k].width
        if kind == EA:
            for i in range(off, off + width):
                out[i] = (a[i] + b[i]) % p
        elif kind == CYC:
            out[off] = (a[off] + b[off]) % q
        elif kind == HEIS:
            out[off] = (a[off] + b[off]) % p
            out[off + 1] = (a[off + 1] + b[off + 1]) % p
            out[off + 2] = (a[off + 2] + b[off + 2] + a[off] * b[off + 1]) % p
        elif kind == GN:
            tw = 1
            for i in range(n - 1):
                tw *= p
            out[off] = (a[off] + b[off]) % p
            out[off + 1] = (a[off + 1] + b[off + 1] + a[off] * b[off + 2 + tw]) % p
            for j in range(width - 2):
                out[off + 2 + j] = (a[off + 2 + j] + b[off + 2 + j]) % p
        elif kind == FN:
            pn = width - n
            x0 = off + n
            out[off] = (a[off] + b[off]) % p
            ppow = p
            for i in range(1, n):
                out[off + i] = (a[off + i] + b[off + i] + a[off + i - 1] * b[x0 + ppow]) % p
                ppow *= p
            for j in range(pn):
                out[x0 + j] = (a[x0 + j] + b[x0 + j]) % p
        elif kind == LAMP:
            pn = width - 1
            t = <int> a[off + pn]
            for j in range(pn):
                out[off + j] = (a[off + j] + b[off + (j + t) % pn]) % p
            out[off + pn] = (t + b[off + pn]) % q
        elif kind == EN:
            pn = (width - 1) / (n + 1)
            x0 = off + n * pn
            t = <int> a[x0 + pn]
            for r in range(pn):
                out[off + r] = (a[off + r] + b[off + (r + t) % pn]) % p
            ppow = p
            for i in range(1, n):
                row = off + i * pn
                prev = off + (i - 1) * pn
                for r in range(pn):
                    out[row + r] = (a[row + r] + b[row + (r + t) % pn]
                                    + a[prev + r] * b[x0 + (ppow + r + t) % pn]) % p
                ppow *= p
            for j in range(pn):
                out[x0 + j] = (a[x0 + j] + b[x0 + (j + t) % pn]) % p
            out[x0 + pn] = (t + b[x0 + pn]) % q
        elif kind == MOD:
            dim = 1 << n
            a0 = off + q * dim
            tc = off + width - 1
            t = <int> a[tc]
            for r in range(q):
                row = off + r * dim
                src = off + ((r + t) % q) * dim
                for s in range(dim):
                    out[row + s] = b[src + s]
                for v in range(n):
                    coef = a[a0 + v * q + r]
                    if coef != 0:
                        bit = 1 << v
                        for s in range(dim):
                            if s & bit:
                                out[row + s] = (out[row + s]
                                                + coef * out[row + (s ^ bit)]) % p
                for s in range(dim):
                    out[row + s] = (out[row + s] + a[row + s]) % p
            for v in range(n):
                for r in range(q):
                    out[a0 + v * q + r] = (a[a0 + v * q + r]
                                           + b[a0 + v * q + (r + t) % q]) % p
            out[tc] = (t + b[tc]) % q


cdef void _inv_c(Block* blk, int nblk, long* a, long* out, long* scratch) noexcept nogil:
    cdef int kind, k, i, j, r, off, width, p, n, q, pn, x0, t, ppow, row, prev, tw
    cdef int dim, a0, tc, bit, src, s, v
    cdef long coef
    for k in range(nblk):
        kind = blk[k].kind
        p = blk[k].p
        n = blk[k].n
        q = blk[k].q
        off = blk[k].off
        width = blk[k].width
        if kind == EA:
            for i in range(off, off + width):
                out[i] = (p - a[i]) % p
        elif kind == CYC:
            out[off] = (q - a[off]) % q
        elif kind == HEIS:
            out[off] = (p - a[off]) % p
            out[off + 1] = (p - a[off + 1]) % p
            out[off + 2] = (p - a[off + 2] + a[off] * a[off + 1]) % p
        elif kind == GN:
            tw = 1
            for i in range(n - 1):
                tw *= p
            out[off] = (p - a[off]) % p
            out[off + 1] = (p - a[off + 1] + a[off] * a[off + 2 + tw]) % p
            for j in range(width - 2):
                out[off + 2 + j] = (p - a[off + 2 + j]) % p
        elif kind == FN:
            pn = width - n
            x0 = off + n
            out[off] = (p - a[off]) % p
            ppow = p
            for i in range(1, n):
                out[off + i] = (p - a[off + i] + a[off + i - 1] * a[x0 + ppow]) % p
                ppow *= p
            for j in range(pn):
                out[x0 + j] = (p - a[x0 + j]) % p
        elif kind == LAMP:
            pn = width - 1
            t = <int> a[off + pn]
            for j in range(pn):
                out[off + j] = (p - a[off + (j - t + pn * 2) % pn]) % p
            out[off + pn] = (q - t) % q
        elif kind == EN:
            pn = (width - 1) / (n + 1)
            x0 = off + n * pn
            t = <int> a[x0 + pn]
            for r in range(pn):
                scratch[r] = (p - a[off + r]) % p
            ppow = p
            for i in range(1, n):
                row = i * pn
                prev = (i - 1) * pn
                for r in range(pn):
                    scratch[row + r] = (p - a[off + row + r]
                                        + a[off + prev + r] * a[x0 + (ppow + r) % pn]) % p
                ppow *= p
            for j in range(pn):
                scratch[n * pn + j] = (p - a[x0 + j]) % p
            for i in range(n):
                row = i * pn
                for r in range(pn):
                    out[off + row + r] = scratch[row + (r - t + pn * 2) % pn]
            for j in range(pn):
                out[x0 + j] = scratch[n * pn + (j - t + pn * 2) % pn]
            out[x0 + pn] = (q - t) % q
        elif kind == MOD:
            dim = 1 << n
            a0 = off + q * dim
            tc = off + width - 1
            t = <int> a[tc]
            for r in range(q):
                src = off + ((r - t + q * 2) % q) * dim
                for s in range(dim):
                    scratch[s] = a[src + s]
                for v in range(n):
                    coef = (p - a[a0 + v * q + (r - t + q * 2) % q]) % p
                    if coef != 0:
                        bit = 1 << v
                        for s in range(dim):
                            if s & bit:
                                scratch[s] = (scratch[s]
                                              + coef * scratch[s ^ bit]) % p
                row = off + r * dim
                for s in range(dim):
                    out[row + s] = (p - scratch[s]) % p
            for v in range(n):
                for r in range(q):
                    out[a0 + v * q + r] = (p - a[a0 + v * q + (r - t + q * 2) % q]) % p
            out[tc] = (q - t) % q


def _moduli(blocks, int width):
    mods = [0] * width
    for kind, p, n, q, off, w in blocks:
        for i in range(w):
            mods[off + i] = p
        if kind in (CYC, LAMP, EN, MOD):
            mods[off + w - 1] = q
    return mods


def supports(blocks, int width):
    """True when every coordinate tuple packs into a single int64 key."""
    prod = 1
    for m in _moduli(blocks, width):
        if m == 0:
            return False
        prod *= m
        if prod >= (1 << 62):
            return False
    return True


def mul(blocks, a, b):
    cdef int width = len(a)
    cdef int nblk = len(blocks)
    cdef Block* blk = <Block*> malloc(nblk * sizeof(Block))
    cdef long* buf = <long*> malloc(3 * width * sizeof(long))
    cdef int i
    try:
        _load_blocks(blocks, blk, nblk)
        for i in range(width):
            buf[i] = a[i]
            buf[width + i] = b[i]
        _mul_c(blk, nblk, buf, buf + width, buf + 2 * width)
        return tuple([buf[2 * width + i] for i in range(width)])
    finally:
        free(buf)
        free(blk)


def inv(blocks, a):
    cdef int width = len(a)
    cdef int nblk = len(blocks)
    cdef Block* blk = <Block*> malloc(nblk * sizeof(Block))
    cdef long* buf = <long*> malloc(3 * width * sizeof(long))
    cdef int i
    try:
        _load_blocks(blocks, blk, nblk)
        for i in range(width):
            buf[i] = a[i]
        _inv_c(blk, nblk, buf, buf + width, buf + 2 * width)
        return tuple([buf[width + i] for i in range(width)])
    finally:
        free(buf)
        free(blk)


def closure(blocks, identity, gens, limit):
    """BFS subgroup closure; same contract and order as the pure kernel."""
    cdef int width = len(identity)
    cdef int nblk = len(blocks)
    cdef int ngens = len(gens)
    cdef int i, gi
    cdef int64_t key
    if not supports(blocks, width):
        raise ValueError("model coordinates do not pack into int64")

    mods = _moduli(blocks, width)
    cdef int64_t* stride = <int64_t*> malloc(width * sizeof(int64_t))
    cdef Block* blk = <Block*> malloc(nblk * sizeof(Block))
    # element storage grows by doubling; gen coords live at the front
    cdef long* genbuf = <long*> malloc(max(ngens, 1) * width * sizeof(long))
    cdef long* cur = <long*> malloc(2 * width * sizeof(long))
    cdef long* out = cur + width
    cdef long cap = 1024 if limit > 1024 else limit
    cdef long* store = <long*> malloc(cap * width * sizeof(long))
    cdef long* store2
    cdef long nelem = 0, head = 0
    try:
        _load_blocks(blocks, blk, nblk)
        key = 1
        for i in range(width):
            stride[i] = key
            key *= mods[i]
        for gi in range(ngens):
            for i in range(width):
                genbuf[gi * width + i] = gens[gi][i]

        index = {}
        parent = [-1]
        genidx = [-1]
        key = 0
        for i in range(width):
            store[i] = identity[i]
            key += stride[i] * identity[i]
        index[key] = 0
        nelem = 1
        while head < nelem:
            for i in range(width):
                cur[i] = store[head * width + i]
            for gi in range(ngens):
                _mul_c(blk, nblk, cur, genbuf + gi * width, out)
                key = 0
                for i in range(width):
                    key += stride[i] * out[i]
                if key not in index:
                    if nelem >= limit:
                        raise ValueError(
                            f"closure exceeded size guard of {limit} elements")
                    if nelem >= cap:
                        cap = cap * 2 if cap * 2 < limit else limit
                        store2 = <long*> malloc(cap * width * sizeof(long))
                        for i in range(nelem * width):
                            store2[i] = store[i]
                        free(store)
                        store = store2
                    for i in range(width):
                        store[nelem * width + i] = out[i]
                    index[key] = nelem
                    parent.append(head)
                    genidx.append(gi)
                    nelem += 1
            head += 1
        elements = [tuple([store[j * width + i] for i in range(width)])
                    for j in range(nelem)]
        return elements, parent, genidx
    finally:
        free(store)
        free(cur)
        free(genbuf)
        free(blk)
        free(stride)
