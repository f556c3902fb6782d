# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""GMP-backed simplex tableau; same API and pivot sequence as ``_tableau_py``."""
from fractions import Fraction

from libc.stdlib cimport free, malloc


cdef extern from "gmp.h":
    ctypedef struct __mpq_struct:
        pass
    ctypedef __mpq_struct *mpq_ptr
    void mpq_init(mpq_ptr)
    void mpq_clear(mpq_ptr)
    void mpq_set(mpq_ptr, mpq_ptr)
    void mpq_set_si(mpq_ptr, long, unsigned long)
    int mpq_set_str(mpq_ptr, const char *, int)
    char *mpq_get_str(char *, int, mpq_ptr)
    void mpq_mul(mpq_ptr, mpq_ptr, mpq_ptr)
    void mpq_sub(mpq_ptr, mpq_ptr, mpq_ptr)
    void mpq_div(mpq_ptr, mpq_ptr, mpq_ptr)
    void mpq_inv(mpq_ptr, mpq_ptr)
    int mpq_sgn(mpq_ptr)
    int mpq_cmp(mpq_ptr, mpq_ptr)
    void mpq_canonicalize(mpq_ptr)


cdef void _load(mpq_ptr dst, object q) except *:
    q = Fraction(q)
    s = f"{q.numerator}/{q.denominator}".encode("ascii")
    if mpq_set_str(dst, s, 10) != 0:
        raise ValueError(f"cannot load {q!r}")
    mpq_canonicalize(dst)


cdef object _read(mpq_ptr src):
    cdef char *buf = mpq_get_str(NULL, 10, src)
    try:
        return Fraction(buf.decode("ascii"))
    finally:
        free(buf)


cdef class Tableau:
    cdef public int m
    cdef public int n
    cdef public long pivots
    cdef int width          # n + m + 1 (rhs last)
    cdef int rows_alloc
    cdef mpq_ptr *T         # row pointers
    cdef mpq_ptr obj
    cdef int *basis_
    cdef int *nz
    cdef __mpq_struct tmp[3]

    def __cinit__(self, rows, rhs):
        cdef int i, j
        self.m = len(rows)
        self.n = len(rows[0]) if self.m else 0
        self.width = self.n + self.m + 1
        self.rows_alloc = self.m
        self.pivots = 0
        self.T = <mpq_ptr *> malloc(max(self.m, 1) * sizeof(mpq_ptr))
        self.basis_ = <int *> malloc(max(self.m, 1) * sizeof(int))
        self.nz = <int *> malloc(self.width * sizeof(int))
        self.obj = <mpq_ptr> malloc(self.width * sizeof(__mpq_struct))
        if self.T == NULL or self.basis_ == NULL or self.nz == NULL or self.obj == NULL:
            raise MemoryError()
        for j in range(3):
            mpq_init(&self.tmp[j])
        for j in range(self.width):
            mpq_init(&self.obj[j])
        for i in range(self.m):
            self.T[i] = <mpq_ptr> malloc(self.width * sizeof(__mpq_struct))
            if self.T[i] == NULL:
                raise MemoryError()
            for j in range(self.width):
                mpq_init(&self.T[i][j])
            row = rows[i]
            for j in range(self.n):
                v = row[j]
                if v:
                    _load(&self.T[i][j], v)
            mpq_set_si(&self.T[i][self.n + i], 1, 1)
            _load(&self.T[i][self.width - 1], rhs[i])
            self.basis_[i] = self.n + i

    def __dealloc__(self):
        cdef int i, j
        if self.T != NULL:
            for i in range(self.rows_alloc):
                if self.T[i] != NULL:
                    for j in range(self.width):
                        mpq_clear(&self.T[i][j])
                    free(self.T[i])
            free(self.T)
        if self.obj != NULL:
            for j in range(self.width):
                mpq_clear(&self.obj[j])
            free(self.obj)
        for j in range(3):
            mpq_clear(&self.tmp[j])
        free(self.basis_)
        free(self.nz)

    @property
    def basis(self):
        return [self.basis_[i] for i in range(self.m)]

    def set_objective(self, cost):
        cdef int i, j
        cdef mpq_ptr cb = &self.tmp[0]
        cdef mpq_ptr prod = &self.tmp[1]
        for j in range(self.width - 1):
            _load(&self.obj[j], cost[j])
        mpq_set_si(&self.obj[self.width - 1], 0, 1)
        for i in range(self.m):
            _load(cb, cost[self.basis_[i]])
            if mpq_sgn(cb) == 0:
                continue
            for j in range(self.width):
                if mpq_sgn(&self.T[i][j]) != 0:
                    mpq_mul(prod, cb, &self.T[i][j])
                    mpq_sub(&self.obj[j], &self.obj[j], prod)

    cdef void _pivot(self, int r, int c) noexcept:
        cdef int i, j, k, nnz = 0
        cdef mpq_ptr prow = self.T[r]
        cdef mpq_ptr inv = &self.tmp[0]
        cdef mpq_ptr f = &self.tmp[1]
        cdef mpq_ptr prod = &self.tmp[2]
        cdef mpq_ptr row
        mpq_inv(inv, &prow[c])
        for j in range(self.width):
            if mpq_sgn(&prow[j]) != 0:
                mpq_mul(&prow[j], &prow[j], inv)
                self.nz[nnz] = j
                nnz += 1
        for i in range(self.m):
            if i == r:
                continue
            row = self.T[i]
            if mpq_sgn(&row[c]) == 0:
                continue
            mpq_set(f, &row[c])
            for k in range(nnz):
                j = self.nz[k]
                mpq_mul(prod, f, &prow[j])
                mpq_sub(&row[j], &row[j], prod)
        if mpq_sgn(&self.obj[c]) != 0:
            mpq_set(f, &self.obj[c])
            for k in range(nnz):
                j = self.nz[k]
                mpq_mul(prod, f, &prow[j])
                mpq_sub(&self.obj[j], &self.obj[j], prod)
        self.basis_[r] = c
        self.pivots += 1

    def pivot(self, int r, int c):
        if mpq_sgn(&self.T[r][c]) == 0:
            raise ZeroDivisionError("pivot on a zero entry")
        self._pivot(r, c)

    def run(self, int allowed, bint bland_only):
        cdef int i, j, c, r
        cdef bint bland = bland_only
        cdef int rhs_col = self.width - 1
        cdef mpq_ptr ratio = &self.tmp[0]
        cdef __mpq_struct best_store
        cdef mpq_ptr best = &best_store
        cdef int cmpv
        mpq_init(best)
        try:
            while True:
                c = -1
                if bland:
                    for j in range(allowed):
                        if mpq_sgn(&self.obj[j]) < 0:
                            c = j
                            break
                else:
                    for j in range(allowed):
                        if mpq_sgn(&self.obj[j]) < 0:
                            if c < 0 or mpq_cmp(&self.obj[j], &self.obj[c]) < 0:
                                c = j
                if c < 0:
                    return True
                r = -1
                for i in range(self.m):
                    if mpq_sgn(&self.T[i][c]) > 0:
                        mpq_div(ratio, &self.T[i][rhs_col], &self.T[i][c])
                        if r < 0:
                            cmpv = -1
                        else:
                            cmpv = mpq_cmp(ratio, best)
                        if cmpv < 0 or (cmpv == 0 and self.basis_[i] < self.basis_[r]):
                            r = i
                            mpq_set(best, ratio)
                if r < 0:
                    return False
                if not bland_only:
                    bland = mpq_sgn(best) == 0
                self._pivot(r, c)
        finally:
            mpq_clear(best)

    def entry(self, int i, int j):
        return _read(&self.T[i][j])

    def obj_entry(self, int j):
        if j < 0:
            j += self.width
        return _read(&self.obj[j])

    def rhs(self):
        return [_read(&self.T[i][self.width - 1]) for i in range(self.m)]

    def row_nonzero(self, int i, int upto):
        cdef int j
        for j in range(upto):
            if mpq_sgn(&self.T[i][j]) != 0:
                return j
        return -1

    def drop_row(self, int i):
        cdef int last = self.m - 1
        cdef mpq_ptr gone = self.T[i]
        self.T[i] = self.T[last]
        self.T[last] = gone
        self.basis_[i] = self.basis_[last]
        self.m -= 1
