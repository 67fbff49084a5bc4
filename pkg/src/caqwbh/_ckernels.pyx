# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled walk kernels.

All kernels work in place on the float64 view of the amplitude vector:
``buf[4*x + 2*c]`` holds Re amp(x, c) and ``buf[4*x + 2*c + 1]`` holds
Im amp(x, c). Coin selectors index ``ctab``/``stab`` (0 and 1 for the message
coins, 2 for the Hadamard padding coin).

Arithmetic must match ``_kernels_py`` bit for bit, so every product is stored
to a double before the add (built with -ffp-contract=off).
"""


cdef inline void _coin(double* buf, const unsigned char* sel, Py_ssize_t n,
                       const double* ctab, const double* stab) noexcept nogil:
    cdef Py_ssize_t x
    cdef double c, s, a0r, a0i, a1r, a1i, u, v
    cdef double* p
    for x in range(n):
        c = ctab[sel[x]]
        s = stab[sel[x]]
        p = buf + 4 * x
        a0r = p[0]
        a0i = p[1]
        a1r = p[2]
        a1i = p[3]
        u = c * a0r
        v = s * a1r
        p[0] = u + v
        u = c * a0i
        v = s * a1i
        p[1] = u + v
        u = s * a0r
        v = c * a1r
        p[2] = u - v
        u = s * a0i
        v = c * a1i
        p[3] = u - v


cdef inline void _shift(double* buf, Py_ssize_t n, Py_ssize_t mask) noexcept nogil:
    cdef Py_ssize_t x, y
    cdef double t
    for x in range(n):
        if x & mask:
            continue
        y = x ^ mask
        t = buf[4 * x + 2]
        buf[4 * x + 2] = buf[4 * y + 2]
        buf[4 * y + 2] = t
        t = buf[4 * x + 3]
        buf[4 * x + 3] = buf[4 * y + 3]
        buf[4 * y + 3] = t


def coin(double[::1] buf, const unsigned char[::1] sel,
         const double[::1] ctab, const double[::1] stab):
    cdef Py_ssize_t n = sel.shape[0]
    if buf.shape[0] != 4 * n:
        raise ValueError("selector length does not match state size")
    with nogil:
        _coin(&buf[0], &sel[0], n, &ctab[0], &stab[0])


def shift(double[::1] buf, int bit):
    cdef Py_ssize_t n = buf.shape[0] // 4
    cdef Py_ssize_t mask = (<Py_ssize_t>1) << bit
    if mask >= n:
        raise ValueError("shift bit out of range")
    with nogil:
        _shift(&buf[0], n, mask)


def evolve(double[::1] buf, const unsigned char[::1] blocks, int q,
           const double[::1] ctab, const double[::1] stab):
    """Apply one step per N-entry row of ``blocks`` (flattened, row-major)."""
    cdef Py_ssize_t n = (<Py_ssize_t>1) << q
    cdef Py_ssize_t nsteps, t
    cdef int i
    if buf.shape[0] != 4 * n:
        raise ValueError("state size does not match q")
    if blocks.shape[0] % n:
        raise ValueError("block buffer is not a whole number of blocks")
    nsteps = blocks.shape[0] // n
    if nsteps == 0:
        return
    with nogil:
        for t in range(nsteps):
            for i in range(q):
                _coin(&buf[0], &blocks[t * n], n, &ctab[0], &stab[0])
                _shift(&buf[0], n, (<Py_ssize_t>1) << i)


def probabilities(const double[::1] buf, double[::1] out):
    cdef Py_ssize_t n = out.shape[0]
    cdef Py_ssize_t x
    cdef double a, b, c
    if buf.shape[0] != 4 * n:
        raise ValueError("output length does not match state size")
    with nogil:
        for x in range(n):
            a = buf[4 * x] * buf[4 * x]
            b = buf[4 * x + 1] * buf[4 * x + 1]
            a = a + b
            b = buf[4 * x + 2] * buf[4 * x + 2]
            c = buf[4 * x + 3] * buf[4 * x + 3]
            b = b + c
            out[x] = a + b
