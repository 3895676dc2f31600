#include <math.h>
#include <stdio.h>
#include "effham.h"

int main(void) {
    EffhamComplex h[4] = {{3.0, 0.0}, {0.0, -0.8}, {0.0, 0.8}, {1.0, 0.0}};
    EffhamOperator *op = NULL;
    if (effham_operator_from_dense(2, h, &op) != EFFHAM_STATUS_OK) return 1;
    EffhamNpad *st = NULL;
    if (effham_npad_new(op, true, &st) != EFFHAM_STATUS_OK) return 2;
    if (effham_npad_eliminate_coupling(st, 0, 1) != EFFHAM_STATUS_OK) return 3;
    EffhamOperator *cur = NULL;
    effham_npad_current(st, &cur);
    double d[2];
    if (effham_operator_diagonal(cur, d, 2) != EFFHAM_STATUS_OK) return 4;
    double r = sqrt(1.0 + 0.64);
    if (fabs(d[0] - (2.0 + r)) > 1e-12 || fabs(d[1] - (2.0 - r)) > 1e-12) return 5;
    if (effham_npad_eliminate_coupling(st, 0, 0) != EFFHAM_STATUS_INVALID_ARGUMENT) return 6;
    char msg[128];
    if (effham_last_error_message(msg, sizeof msg) == 0) return 7;
    double b;
    effham_mott_boundary_analytic(1, 0.0, &b);
    if (fabs(b - (1.0 - sqrt(2.0))) > 1e-15) return 8;
    effham_operator_free(cur);
    effham_npad_free(st);
    effham_operator_free(op);
    printf("ok\n");
    return 0;
}
