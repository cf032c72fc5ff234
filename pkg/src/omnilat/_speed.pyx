# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: length-targeted transversal search and species forms.

Twin of omnilat._fallback with identical inputs and outputs.  Squares of
order up to 32 (species forms up to 7) fit the fixed-size buffers.
"""

import time

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

ACHIEVED = 0
EXHAUSTED = 1
TIMEOUT = 2

ctypedef unsigned long long u64

DEF MAXN = 32


cdef class _Search:
    cdef int n, ell, m, max_skips, has_group, sum_target
    cdef u64 forced_rows, forced_cols, required_syms, col_pool, sym_pool, all_mask
    cdef bint require_maximal
    cdef long long node_limit, nodes
    cdef double deadline
    cdef int rows[MAXN][MAXN]
    cdef u64 forb[MAXN]
    cdef int avail[MAXN]
    cdef int group[MAXN * MAXN]
    cdef int cr[MAXN]
    cdef int cc[MAXN]
    cdef int cs[MAXN]
    cdef int depth

    cdef bint leaf(self, u64 ur, u64 uc, u64 us, int csum):
        cdef int r, c
        cdef u64 fr
        if self.forced_rows & ~ur or self.forced_cols & ~uc:
            return False
        if self.required_syms & ~us:
            return False
        if self.sum_target >= 0 and csum != self.sum_target:
            return False
        if self.require_maximal:
            fr = self.all_mask & ~ur
            while fr:
                r = __builtin_ctzll(fr)
                fr &= fr - 1
                for c in range(self.n):
                    if uc >> c & 1:
                        continue
                    if not us >> self.rows[r][c] & 1:
                        return False
        return True

    cdef int rec(self, int i, int placed, int skips, u64 ur, u64 uc, u64 us, int csum):
        cdef int k, r, c, s, st, nsum, need
        cdef u64 cand, sbit
        self.nodes += 1
        if self.node_limit >= 0 and self.nodes > self.node_limit:
            return 2
        if self.deadline > 0 and self.nodes & 8191 == 0:
            if time.monotonic() > self.deadline:
                return 2
        if placed == self.ell:
            for k in range(i, self.m):
                if self.forced_rows >> self.avail[k] & 1:
                    return 1
            if self.leaf(ur, uc, us, csum):
                return 0
            return 1
        if i == self.m or self.m - i < self.ell - placed:
            return 1
        need = self.ell - placed
        if __builtin_popcountll(self.forced_cols & ~uc) > need:
            return 1
        if __builtin_popcountll(self.required_syms & ~us) > need:
            return 1
        r = self.avail[i]
        cand = self.col_pool & ~uc & ~self.forb[r]
        while cand:
            c = __builtin_ctzll(cand)
            cand &= cand - 1
            s = self.rows[r][c]
            sbit = (<u64>1) << s
            if us & sbit or not self.sym_pool >> s & 1:
                continue
            self.cr[self.depth] = r
            self.cc[self.depth] = c
            self.cs[self.depth] = s
            self.depth += 1
            nsum = self.group[csum * self.n + s] if self.has_group else 0
            st = self.rec(i + 1, placed + 1, skips,
                          ur | (<u64>1) << r, uc | (<u64>1) << c, us | sbit, nsum)
            if st != 1:
                return st
            self.depth -= 1
        if skips < self.max_skips and not self.forced_rows >> r & 1:
            st = self.rec(i + 1, placed, skips + 1, ur, uc, us, csum)
            if st != 1:
                return st
        return 1


def search(int n, grid, int ell, u64 forced_rows=0, u64 forced_cols=0,
           u64 required_syms=0, forbidden=(), preplaced=(),
           bint require_maximal=True, long long node_limit=-1,
           double time_limit=-1.0, group=None, int sum_target=-1):
    """Row-major DFS for one partial transversal of length ``ell``.

    Same contract as omnilat._fallback.search; see there for the rules.
    Returns (status, witness | None, nodes).
    """
    if n > MAXN:
        raise ValueError("order above compiled kernel limit")
    cdef _Search st = _Search.__new__(_Search)
    cdef int r, c, s, i
    cdef u64 ur = 0, uc = 0, us = 0
    cdef int csum = 0
    st.n = n
    st.ell = ell
    st.forced_rows = forced_rows
    st.forced_cols = forced_cols
    st.required_syms = required_syms
    st.require_maximal = require_maximal
    st.node_limit = node_limit
    st.nodes = 0
    st.sum_target = sum_target
    st.all_mask = ((<u64>1) << n) - 1
    st.deadline = time.monotonic() + time_limit if time_limit > 0 else -1.0
    for r in range(n):
        st.forb[r] = 0
        for c in range(n):
            st.rows[r][c] = grid[r * n + c]
    for cell in forbidden:
        st.forb[cell // n] |= (<u64>1) << (cell % n)
    st.has_group = group is not None
    if st.has_group:
        for i in range(n * n):
            st.group[i] = group[i]
    st.depth = 0
    for r, c in preplaced:
        s = st.rows[r][c]
        if ur >> r & 1 or uc >> c & 1 or us >> s & 1:
            raise ValueError("preplaced cells clash")
        ur |= (<u64>1) << r
        uc |= (<u64>1) << c
        us |= (<u64>1) << s
        st.cr[st.depth] = r
        st.cc[st.depth] = c
        st.cs[st.depth] = s
        st.depth += 1
        if st.has_group:
            csum = st.group[csum * n + s]
    if st.depth > ell:
        raise ValueError("more preplaced cells than the target length")
    st.m = 0
    for r in range(n):
        if not ur >> r & 1:
            st.avail[st.m] = r
            st.m += 1
    st.max_skips = n - ell
    st.col_pool = forced_cols if __builtin_popcountll(forced_cols) == ell else st.all_mask
    st.sym_pool = required_syms if __builtin_popcountll(required_syms) == ell else st.all_mask

    cdef int code = st.rec(0, st.depth, 0, ur, uc, us, csum)
    witness = None
    if code == 0:
        witness = sorted((st.cr[i], st.cc[i], st.cs[i]) for i in range(st.depth))
    return code, witness, st.nodes


DEF SPN = 8


cdef class _Species:
    cdef int n
    cdef int rows[SPN][SPN]
    cdef int col_sym_row[SPN][SPN]
    cdef unsigned char best[SPN * SPN]
    cdef int cols[SPN]
    cdef int rename[SPN]
    cdef int r0

    cdef void evaluate(self):
        cdef int i, j, c, ri, v, b, pos
        cdef bint better = False
        cdef int *base = self.rows[self.r0]
        for j in range(self.n):
            self.rename[base[self.cols[j]]] = j
        pos = self.n
        for i in range(1, self.n):
            ri = self.col_sym_row[self.cols[0]][base[self.cols[i]]]
            for j in range(self.n):
                v = self.rename[self.rows[ri][self.cols[j]]]
                if better:
                    self.best[pos] = <unsigned char>v
                else:
                    b = self.best[pos]
                    if v > b:
                        return
                    if v < b:
                        better = True
                        self.best[pos] = <unsigned char>v
                pos += 1

    cdef void permute(self, int j, u64 used):
        cdef int c
        if j == self.n:
            self.evaluate()
            return
        for c in range(self.n):
            if used >> c & 1:
                continue
            self.cols[j] = c
            self.permute(j + 1, used | (<u64>1) << c)


def species_min(int n, flat):
    """Least reduced form of one square over first-row choices x column orders.

    Same contract as omnilat._fallback.species_min.
    """
    if n > 7:
        raise ValueError("order above species kernel limit")
    cdef _Species sp = _Species.__new__(_Species)
    cdef int r, c
    sp.n = n
    for r in range(n):
        for c in range(n):
            sp.rows[r][c] = flat[r * n + c]
            sp.col_sym_row[c][sp.rows[r][c]] = r
    for c in range(n):
        sp.best[c] = <unsigned char>c
    for c in range(n, n * n):
        sp.best[c] = 255
    for r in range(n):
        sp.r0 = r
        sp.permute(0, 0)
    return bytes([sp.best[c] for c in range(n * n)])
