# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernels. Same call contract as _kernels_np."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from "_corekern.h":
    ctypedef struct maflow_diag:
        double min_eig
        double max_abs_rhs
        double sum_rhs
        long long floor_hits
    void maflow_rhs_n1(const double *phi, int m,
                       double ih2x, double ih2y,
                       const double *w, int w_arr,
                       const double *logmu, int mu_arr,
                       const double *g,
                       double alpha, double c0,
                       double det_floor,
                       double *out, maflow_diag *diag) nogil
    void maflow_rhs_n2(const double *phi, int m,
                       const double *ih,
                       const double *w11, const double *w22,
                       const double *wbr, const double *wbi, int w_arr,
                       const double *logmu, int mu_arr,
                       const double *g,
                       double alpha, double c0,
                       double det_floor,
                       double *out, maflow_diag *diag) nogil


def rhs_n1(phi, w, logmu, g, double alpha, double c0, ih2, double det_floor, out):
    """Flow right-hand side on an n=1 grid.

    phi, out: (m, m) float64 C-contiguous. w and logmu may be scalars or
    per-node arrays; g may be None or a per-node array. Returns
    (min_eig, max_abs_rhs, sum_rhs, floor_hits).
    """
    cdef double[:, ::1] phiv = phi
    cdef double[:, ::1] outv = out
    cdef int m = phiv.shape[0]
    cdef double ih2x = ih2[0]
    cdef double ih2y = ih2[1]
    cdef maflow_diag diag

    cdef double wscalar = 0.0
    cdef double muscalar = 0.0
    cdef double[:, ::1] wv
    cdef double[:, ::1] muv
    cdef double[:, ::1] gv
    cdef const double *wp
    cdef const double *mup
    cdef const double *gp
    cdef int w_arr, mu_arr

    if np.isscalar(w):
        wscalar = w
        wp = &wscalar
        w_arr = 0
    else:
        wv = w
        wp = &wv[0, 0]
        w_arr = 1
    if np.isscalar(logmu):
        muscalar = logmu
        mup = &muscalar
        mu_arr = 0
    else:
        muv = logmu
        mup = &muv[0, 0]
        mu_arr = 1
    if g is None:
        gp = NULL
    else:
        gv = g
        gp = &gv[0, 0]

    with nogil:
        maflow_rhs_n1(&phiv[0, 0], m, ih2x, ih2y, wp, w_arr, mup, mu_arr,
                      gp, alpha, c0, det_floor, &outv[0, 0], &diag)
    return diag.min_eig, diag.max_abs_rhs, diag.sum_rhs, diag.floor_hits


def rhs_n2(phi, w11, w22, wbr, wbi, logmu, g, double alpha, double c0,
           ih, double det_floor, out):
    """Flow right-hand side on an n=2 grid (4D arrays, axes x1,y1,x2,y2).

    ih holds the four reciprocal spacings 1/h_axis. Background components
    are all scalars or all per-node arrays.
    """
    cdef double[:, :, :, ::1] phiv = phi
    cdef double[:, :, :, ::1] outv = out
    cdef int m = phiv.shape[0]
    cdef double ihv[4]
    cdef maflow_diag diag
    ihv[0] = ih[0]
    ihv[1] = ih[1]
    ihv[2] = ih[2]
    ihv[3] = ih[3]

    cdef double w11s = 0.0, w22s = 0.0, wbrs = 0.0, wbis = 0.0, mus = 0.0
    cdef double[:, :, :, ::1] a11, a22, abr, abi, muv, gv
    cdef const double *p11
    cdef const double *p22
    cdef const double *pbr
    cdef const double *pbi
    cdef const double *pmu
    cdef const double *pg
    cdef int w_arr, mu_arr

    if np.isscalar(w11):
        w11s = w11; w22s = w22; wbrs = wbr; wbis = wbi
        p11 = &w11s; p22 = &w22s; pbr = &wbrs; pbi = &wbis
        w_arr = 0
    else:
        a11 = w11; a22 = w22; abr = wbr; abi = wbi
        p11 = &a11[0, 0, 0, 0]; p22 = &a22[0, 0, 0, 0]
        pbr = &abr[0, 0, 0, 0]; pbi = &abi[0, 0, 0, 0]
        w_arr = 1
    if np.isscalar(logmu):
        mus = logmu
        pmu = &mus
        mu_arr = 0
    else:
        muv = logmu
        pmu = &muv[0, 0, 0, 0]
        mu_arr = 1
    if g is None:
        pg = NULL
    else:
        gv = g
        pg = &gv[0, 0, 0, 0]

    with nogil:
        maflow_rhs_n2(&phiv[0, 0, 0, 0], m, ihv, p11, p22, pbr, pbi, w_arr,
                      pmu, mu_arr, pg, alpha, c0, det_floor,
                      &outv[0, 0, 0, 0], &diag)
    return diag.min_eig, diag.max_abs_rhs, diag.sum_rhs, diag.floor_hits
