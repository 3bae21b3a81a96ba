#include <stdio.h>
#include <stdlib.h>

#include "bendbeam.h"

static int fail(const char *what, bb_status s) {
    char msg[256];
    bb_last_error_message(msg, sizeof msg);
    fprintf(stderr, "%s failed (%d): %s\n", what, (int)s, msg);
    return 1;
}

int main(void) {
    double zmax = 0.0;
    bb_status s = bb_z_max(0.5, 0.002, 0.0, 0.0, &zmax);
    if (s != BB_STATUS_OK) return fail("bb_z_max", s);

    bb_scenario *scn = NULL;
    s = bb_scenario_from_preset("fig9c", &scn);
    if (s != BB_STATUS_OK) return fail("bb_scenario_from_preset", s);
    bb_scenario_reduce(scn);

    bb_field *src = NULL, *far = NULL;
    s = bb_scenario_source_field(scn, 0, 0, &src);
    if (s != BB_STATUS_OK) return fail("bb_scenario_source_field", s);
    s = bb_field_propagate(src, 150e9, 5.0, &far);
    if (s != BB_STATUS_OK) return fail("bb_field_propagate", s);

    double p0 = 0.0, p1 = 0.0;
    bb_field_power(src, &p0);
    bb_field_power(far, &p1);
    printf("bendbeam %s z_max=%.4f p0=%.6e p1=%.6e\n", bb_version(), zmax, p0, p1);

    bb_scenario *bad = NULL;
    s = bb_scenario_from_json("{\"units\": \"cgs\"}", &bad);
    if (s != BB_STATUS_VALIDATION) return fail("validation check", s);

    bb_field_free(far);
    bb_field_free(src);
    bb_scenario_free(scn);
    return 0;
}
