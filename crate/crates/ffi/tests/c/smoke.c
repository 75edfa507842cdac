#include <stdio.h>
#include <string.h>
#include "clusteralg.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (%s)\n", #cond, ca_last_error()); return 1; } } while (0)

int main(void) {
    const char *a3 = "{\"variables\":[\"x1\",\"x2\",\"x3\"],\"exchangeable\":[\"x1\",\"x2\",\"x3\"],"
                     "\"matrix\":[[0,1,0],[-1,0,-1],[0,1,0]]}";
    CaSeed *s = NULL, *m1 = NULL, *m2 = NULL;
    char *v = NULL;
    CHECK(ca_seed_from_json(a3, &s) == CA_STATUS_OK);
    CHECK(ca_seed_len(s) == 3);
    CHECK(ca_seed_mutate(s, "x2", &m1) == CA_STATUS_OK);
    CHECK(ca_seed_mutate(m1, "x1", &m2) == CA_STATUS_OK);
    CHECK(ca_seed_variable(m2, 0, &v) == CA_STATUS_OK);
    CHECK(strcmp(v, "(1 + x2 + x1*x3)/(x1*x2)") == 0);
    ca_string_free(v);
    CHECK(ca_seed_mutate(s, "nope", &m1) == CA_STATUS_SEED_ERROR);
    CHECK(strlen(ca_last_error()) > 0);
    CHECK(ca_seed_from_json("{", &m1) == CA_STATUS_INVALID_INPUT);
    ca_seed_free(m2);
    ca_seed_free(s);
    printf("ok\n");
    return 0;
}
