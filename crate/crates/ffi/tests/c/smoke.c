#include <stdio.h>
#include <string.h>
#include "draftwise.h"

int main(int argc, char **argv) {
    if (argc < 2) return 10;
    DwScorer *scorer = NULL;
    if (dw_scorer_new(argv[1], NULL, &scorer) != DW_STATUS_OK) {
        fprintf(stderr, "%s\n", dw_last_error());
        return 11;
    }
    char *json = NULL;
    if (dw_score(scorer, "The hospital had no medicine and malaria nets were rare.", &json) != DW_STATUS_OK) return 12;
    printf("%s\n", json);
    dw_string_free(json);

    int64_t a[4] = {1, 2, 3, 4};
    int64_t b[4] = {4, 3, 2, 1};
    double k = 0.0;
    if (dw_qwk(a, b, 4, 1, 4, &k) != DW_STATUS_OK) return 13;
    printf("qwk %.3f\n", k);

    if (dw_score(NULL, "x", &json) != DW_STATUS_NULL_ARGUMENT) return 14;
    printf("error %s\n", dw_last_error());
    dw_scorer_free(scorer);
    return 0;
}
