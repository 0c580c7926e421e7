#include <stdio.h>
#include <string.h>
#include "plu.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (%s)\n", #cond, plu_last_error()); return 1; } } while (0)

int main(void) {
    const char *g = "{\"elements\":[\"a\",\"b\",\"c\",\"d\",\"e\",\"f\"],"
                    "\"covers\":[[\"a\",\"b\"],[\"a\",\"c\"],[\"b\",\"d\"],[\"b\",\"e\"],"
                    "[\"c\",\"d\"],[\"c\",\"e\"],[\"d\",\"f\"],[\"e\",\"f\"]]}";
    PluPoset *p = NULL;
    CHECK(plu_poset_from_json(g, &p) == PLU_STATUS_OK);
    CHECK(plu_poset_len(p) == 6);
    bool star = true;
    CHECK(plu_check_star(p, 0, &star) == PLU_STATUS_OK);
    CHECK(!star);
    char *t = NULL;
    CHECK(plu_unification_type(p, "omega", &t) == PLU_STATUS_OK);
    CHECK(strcmp(t, "0") == 0);
    plu_string_free(t);
    CHECK(plu_unification_type(p, "bogus", &t) == PLU_STATUS_PARSE);
    PluMorphism *u1 = NULL, *u2 = NULL;
    CHECK(plu_witness_chain_g(1, "omega", &u1) == PLU_STATUS_OK);
    CHECK(plu_witness_chain_g(2, "omega", &u2) == PLU_STATUS_OK);
    bool f = false;
    CHECK(plu_factor_through(u1, u2, &f) == PLU_STATUS_OK);
    CHECK(f);
    plu_morphism_free(u1);
    plu_morphism_free(u2);
    plu_poset_free(p);
    printf("ok %s\n", plu_version());
    return 0;
}
