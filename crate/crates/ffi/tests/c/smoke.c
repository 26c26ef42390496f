#include <stdio.h>
#include <string.h>
#include "kcayley.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s\n", #cond); return 1; } } while (0)

int main(void) {
    KcChain *ssh = NULL;
    CHECK(kc_ssh_new(0.5, 1.0, &ssh) == KC_STATUS_OK);
    int64_t w = 0;
    CHECK(kc_chain_invariant(ssh, 64, &w) == KC_STATUS_OK && w == 1);
    size_t left = 0, right = 0;
    CHECK(kc_chain_end_modes(ssh, 40, &left, &right) == KC_STATUS_OK && left == 1 && right == 1);
    kc_chain_free(ssh);

    KcChain *flat = NULL;
    CHECK(kc_ssh_new(1.0, 1.0, &flat) == KC_STATUS_OK);
    CHECK(kc_chain_invariant(flat, 64, &w) == KC_STATUS_BULK_GAPLESS);
    CHECK(kc_last_error() != NULL);
    CHECK(strcmp(kc_status_name(KC_STATUS_BULK_GAPLESS), "bulk_gapless") == 0);
    kc_chain_free(flat);

    const char *argv[] = {"product", "--model", "circle", "--N", "16"};
    char *report = NULL;
    int code = -1;
    CHECK(kc_run(5, argv, &report, &code) == KC_STATUS_OK && code == 0);
    CHECK(strstr(report, "\"index\"") != NULL);
    kc_string_free(report);
    printf("ok %s\n", kc_version());
    return 0;
}
