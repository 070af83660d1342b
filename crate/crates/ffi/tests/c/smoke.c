#include <stdio.h>
#include <string.h>
#include "compocheck.h"

static const char *MODEL =
    "interface I { op ping; }\n"
    "class D { realizes I; }\n"
    "class A { port p: I; part d: D; connector self.p, d; }\n"
    "root A;\n";

int main(void) {
    CcModel *model = NULL;
    if (cc_model_load(MODEL, CC_FORMAT_DSL, &model) != CC_STATUS_OK) {
        fprintf(stderr, "load: %s\n", cc_last_error());
        return 1;
    }
    char *report = NULL;
    bool passed = false;
    if (cc_check(model, NULL, &report, &passed) != CC_STATUS_OK || !passed) {
        fprintf(stderr, "check failed\n");
        return 2;
    }
    cc_string_free(report);
    char *trace = NULL;
    bool safe = false;
    if (cc_simulate(model, "A", &trace, &safe) != CC_STATUS_OK || !safe) {
        fprintf(stderr, "simulate failed\n");
        return 3;
    }
    printf("%s", trace);
    cc_string_free(trace);
    cc_model_free(model);

    CcModel *bad = NULL;
    if (cc_model_load("class {", CC_FORMAT_DSL, &bad) != CC_STATUS_PARSE_ERROR || bad != NULL) {
        return 4;
    }
    if (strlen(cc_last_error()) == 0) {
        return 5;
    }
    return 0;
}
