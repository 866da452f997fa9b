#ifndef MAFLOW_COREKERN_H
#define MAFLOW_COREKERN_H

/* Fused right-hand-side kernels for the explicit flow stepper.
 *
 * Per node: assemble the background-plus-Hessian matrix from central
 * differences, take the positive-part determinant through its closed-form
 * eigenvalues, clamp by det_floor, and emit
 *   rhs = log(det_clamped) - logmu - c0 - alpha*phi - g .
 * Diagnostics (minimum eigenvalue, floor hits, rhs sum, max |rhs|) are
 * accumulated in the same pass.
 */

typedef struct {
    double min_eig;       /* min over nodes of the smallest eigenvalue */
    double max_abs_rhs;
    double sum_rhs;
    long long floor_hits; /* nodes with positive-part det below det_floor */
} maflow_diag;

void maflow_rhs_n1(const double *phi, int m,
                   double ih2x, double ih2y,
                   const double *w, int w_arr,
                   const double *logmu, int mu_arr,
                   const double *g,
                   double alpha, double c0,
                   double det_floor,
                   double *out, maflow_diag *diag);

void maflow_rhs_n2(const double *phi, int m,
                   const double *ih,
                   const double *w11, const double *w22,
                   const double *wbr, const double *wbi, int w_arr,
                   const double *logmu, int mu_arr,
                   const double *g,
                   double alpha, double c0,
                   double det_floor,
                   double *out, maflow_diag *diag);

#endif
