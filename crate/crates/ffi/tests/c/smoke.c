#include <stdio.h>
#include <string.h>
#include "hvw.h"

int main(void) {
    double mu[12] = {-2, 0, -1, 0.3, 0, 0, 1, -0.2, 2, 0.5, 3, 0};
    HvwQuadric *q = NULL;
    if (hvw_quadric_new(mu, &q) != HVW_STATUS_OK) return 10;
    double pt[HVW_POINT_LEN];
    if (hvw_quadric_sample(q, 7, pt) != HVW_STATUS_OK) return 11;
    double comm = -1;
    if (hvw_quadric_commutation(q, pt, &comm) != HVW_STATUS_OK || !(comm <= 1e-8)) return 12;
    hvw_quadric_free(q);

    if (hvw_quadric_new(NULL, &q) != HVW_STATUS_NULL_POINTER) return 13;
    if (strlen(hvw_last_error()) == 0) return 14;

    HvwReport *r = NULL;
    if (hvw_verify_run("{\"suites\": [\"relations\"], \"samples\": 4}", &r) != HVW_STATUS_OK) return 15;
    if (!hvw_report_passed(r)) return 16;
    HvwRecord rec;
    if (hvw_report_record(r, 0, &rec) != HVW_STATUS_OK || strncmp(rec.name, "relations/", 10) != 0) return 17;
    printf("%s", hvw_report_residual_table(r));
    hvw_report_free(r);
    return 0;
}
