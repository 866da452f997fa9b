#include <math.h>
#include <stddef.h>

#include "_corekern.h"

/* Stencil evaluation order is pinned to match the numpy fallback:
 * per-axis second differences are formed as (plus + minus - 2*center)
 * and combined exactly as written there, so the two backends agree to
 * rounding noise. */

void maflow_rhs_n1(const double *phi, int m,
                   double ih2x, double ih2y,
                   const double *w, int w_arr,
                   const double *logmu, int mu_arr,
                   const double *g,
                   double alpha, double c0,
                   double det_floor,
                   double *out, maflow_diag *diag)
{
    double min_eig = HUGE_VAL;
    double max_abs = 0.0;
    double sum = 0.0;
    long long hits = 0;
    int i;

    for (i = 0; i < m; i++) {
        int ip = (i + 1 == m) ? 0 : i + 1;
        int im = (i == 0) ? m - 1 : i - 1;
        const double *rc = phi + (size_t)i * m;
        const double *ru = phi + (size_t)ip * m;
        const double *rd = phi + (size_t)im * m;
        double *ro = out + (size_t)i * m;
        size_t row = (size_t)i * m;
        int j;
        for (j = 0; j < m; j++) {
            int jp = (j + 1 == m) ? 0 : j + 1;
            int jm = (j == 0) ? m - 1 : j - 1;
            size_t k = row + j;
            double ctr = rc[j];
            double lap = (ru[j] + rd[j] - 2.0 * ctr) * ih2x
                       + (rc[jp] + rc[jm] - 2.0 * ctr) * ih2y;
            double e = (w_arr ? w[k] : w[0]) + 0.25 * lap;
            double dp = e > 0.0 ? e : 0.0;
            double dc = dp;
            if (dp < det_floor) { dc = det_floor; hits++; }
            double rhs = log(dc) - (mu_arr ? logmu[k] : logmu[0])
                       - c0 - alpha * ctr;
            if (g) rhs -= g[k];
            ro[j] = rhs;
            if (e < min_eig) min_eig = e;
            double a = fabs(rhs);
            if (a > max_abs) max_abs = a;
            sum += rhs;
        }
    }
    diag->min_eig = min_eig;
    diag->max_abs_rhs = max_abs;
    diag->sum_rhs = sum;
    diag->floor_hits = hits;
}

void maflow_rhs_n2(const double *phi, int m,
                   const double *ih,
                   const double *w11, const double *w22,
                   const double *wbr, const double *wbi, int w_arr,
                   const double *logmu, int mu_arr,
                   const double *g,
                   double alpha, double c0,
                   double det_floor,
                   double *out, maflow_diag *diag)
{
    size_t s2 = (size_t)m;
    size_t s1 = s2 * m;
    size_t s0 = s1 * m;
    double ih2_0 = ih[0] * ih[0];
    double ih2_1 = ih[1] * ih[1];
    double ih2_2 = ih[2] * ih[2];
    double ih2_3 = ih[3] * ih[3];
    double q02 = 0.25 * ih[0] * ih[2];
    double q13 = 0.25 * ih[1] * ih[3];
    double q03 = 0.25 * ih[0] * ih[3];
    double q12 = 0.25 * ih[1] * ih[2];
    double min_eig = HUGE_VAL;
    double max_abs = 0.0;
    double sum = 0.0;
    long long hits = 0;
    int a, b, c;

    for (a = 0; a < m; a++)
    for (b = 0; b < m; b++)
    for (c = 0; c < m; c++) {
        size_t ra = (size_t)a * s0;
        size_t rb = (size_t)b * s1;
        size_t rc = (size_t)c * s2;
        size_t base = ra + rb + rc;
        size_t ap = (size_t)((a + 1 == m) ? 0 : a + 1) * s0;
        size_t am = (size_t)((a == 0) ? m - 1 : a - 1) * s0;
        size_t bp = (size_t)((b + 1 == m) ? 0 : b + 1) * s1;
        size_t bm = (size_t)((b == 0) ? m - 1 : b - 1) * s1;
        size_t cp = (size_t)((c + 1 == m) ? 0 : c + 1) * s2;
        size_t cm = (size_t)((c == 0) ? m - 1 : c - 1) * s2;
        int d;
        for (d = 0; d < m; d++) {
            size_t dp_ = (d + 1 == m) ? 0 : d + 1;
            size_t dm_ = (d == 0) ? m - 1 : d - 1;
            size_t k = base + d;
            double ctr = phi[k];
            double sd0 = (phi[ap + rb + rc + d] + phi[am + rb + rc + d]
                          - 2.0 * ctr) * ih2_0;
            double sd1 = (phi[ra + bp + rc + d] + phi[ra + bm + rc + d]
                          - 2.0 * ctr) * ih2_1;
            double sd2 = (phi[ra + rb + cp + d] + phi[ra + rb + cm + d]
                          - 2.0 * ctr) * ih2_2;
            double sd3 = (phi[base + dp_] + phi[base + dm_]
                          - 2.0 * ctr) * ih2_3;
            double x02 = (phi[ap + rb + cp + d] - phi[ap + rb + cm + d]
                          - phi[am + rb + cp + d] + phi[am + rb + cm + d]) * q02;
            double x13 = (phi[ra + bp + rc + dp_] - phi[ra + bp + rc + dm_]
                          - phi[ra + bm + rc + dp_] + phi[ra + bm + rc + dm_]) * q13;
            double x03 = (phi[ap + rb + rc + dp_] - phi[ap + rb + rc + dm_]
                          - phi[am + rb + rc + dp_] + phi[am + rb + rc + dm_]) * q03;
            double x12 = (phi[ra + bp + cp + d] - phi[ra + bp + cm + d]
                          - phi[ra + bm + cp + d] + phi[ra + bm + cm + d]) * q12;
            double p11 = (w_arr ? w11[k] : w11[0]) + 0.25 * (sd0 + sd1);
            double p22 = (w_arr ? w22[k] : w22[0]) + 0.25 * (sd2 + sd3);
            double br = (w_arr ? wbr[k] : wbr[0]) + 0.25 * (x02 + x13);
            double bi = (w_arr ? wbi[k] : wbi[0]) + 0.25 * (x03 - x12);
            double tr = p11 + p22;
            double df = p11 - p22;
            double disc = sqrt(df * df + 4.0 * (br * br + bi * bi));
            double lam1 = 0.5 * (tr + disc);
            double lam2 = 0.5 * (tr - disc);
            double dp = (lam1 > 0.0 ? lam1 : 0.0) * (lam2 > 0.0 ? lam2 : 0.0);
            double dc = dp;
            if (dp < det_floor) { dc = det_floor; hits++; }
            double rhs = log(dc) - (mu_arr ? logmu[k] : logmu[0])
                       - c0 - alpha * ctr;
            if (g) rhs -= g[k];
            out[k] = rhs;
            if (lam2 < min_eig) min_eig = lam2;
            double ab = fabs(rhs);
            if (ab > max_abs) max_abs = ab;
            sum += rhs;
        }
    }
    diag->min_eig = min_eig;
    diag->max_abs_rhs = max_abs;
    diag->sum_rhs = sum;
    diag->floor_hits = hits;
}
