#include <assert.h>
#include <math.h>
#include <stdio.h>
#include <string.h>
#include "greenmachine.h"

int main(void) {
    printf("version: %s\n", gm_version());

    GmPlan *plan = NULL;
    assert(gm_plan_new(3, &plan) == GM_STATUS_OK);
    assert(gm_plan_depth(plan) == 3);
    uint64_t count = 0;
    assert(gm_beamsplitter_count(3, &count) == GM_STATUS_OK && count == 12);

    /* codeword 5 through the optical substrate */
    double re[8], im[8];
    for (uint64_t k = 0; k < 8; k++) {
        int32_t sign;
        assert(gm_hadamard_entry(5, k, 3, &sign) == GM_STATUS_OK);
        re[k] = (double)sign; im[k] = 0.0;
    }
    assert(gm_optical_propagate(plan, re, im, 8, 0.5, 0.5, 0.0, false) == GM_STATUS_OK);
    uint64_t index; double share;
    assert(gm_optical_decode(re, im, 8, &index, &share) == GM_STATUS_OK);
    assert(index == 5 && share > 1.0 - 1e-9);

    /* same codeword through the digital substrate */
    uint8_t symbols[8]; size_t written;
    assert(gm_digital_encode(5, 3, false, symbols, 8, &written) == GM_STATUS_OK);
    assert(gm_digital_propagate(plan, symbols, 8) == GM_STATUS_OK);
    int8_t polarity;
    assert(gm_digital_decode(symbols, 8, &index, &polarity) == GM_STATUS_OK);
    assert(index == 5 && polarity == 1);

    /* device delays */
    GmDatasheet *nmos = NULL;
    assert(gm_datasheet_preset("sira04dp", 5.0, &nmos) == GM_STATUS_OK);
    double t_on;
    assert(gm_turn_on_delay_s(nmos, 10.0, 5.0, &t_on) == GM_STATUS_OK);
    assert(fabs(t_on - 2.906517933317594e-8) < 1e-15);

    /* error path + message */
    GmPlan *bad = NULL;
    assert(gm_plan_new(0, &bad) == GM_STATUS_DOMAIN_ERROR);
    char msg[128];
    gm_last_error_message(msg, sizeof msg);
    assert(strstr(msg, "order") != NULL);

    /* comparison report */
    char *json = NULL;
    assert(gm_compare_report_json(10, 5.0, 10.0, GM_DELAY_POLICY_FIXED_DELAY,
                                  80e-9, 10.0, &json) == GM_STATUS_OK);
    assert(strstr(json, "\"latency_ratio\": 8000.0") != NULL);
    gm_string_free(json);

    gm_datasheet_free(nmos);
    gm_plan_free(plan);
    printf("c smoke test: OK\n");
    return 0;
}
