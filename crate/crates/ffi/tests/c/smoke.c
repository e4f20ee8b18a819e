#include <math.h>
#include <stdio.h>

#include "barron_gauge.h"

#define CHECK(cond)                                          \
    do {                                                     \
        if (!(cond)) {                                       \
            char msg[256];                                   \
            bg_last_error(msg, sizeof msg);                  \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__,    \
                    __LINE__, #cond, msg);                   \
            return 1;                                        \
        }                                                    \
    } while (0)

int main(void) {
    const double a[] = {3.0, -3.0, -3.0};
    const double w[] = {0.0, 1.0, -1.0};
    const double b[] = {1.0, 0.0, 0.0};
    const double h[] = {1.0};
    BgNetwork *net = NULL;
    BgDomain *dom = NULL;
    double cost = 0.0;
    BgSpectralBound bound;

    CHECK(bg_network_new(1, 1, 3, a, w, b, &net) == BG_STATUS_OK);
    CHECK(bg_domain_box(h, 1, &dom) == BG_STATUS_OK);
    CHECK(bg_barron_cost_upper(net, dom, &cost) == BG_STATUS_OK);
    CHECK(cost == 3.0);
    CHECK(bg_spectral_upper(net, dom, 0.5, 1e-6, &bound) == BG_STATUS_OK);
    CHECK(bound.converged && bound.value > 0.0);
    CHECK(bg_spectral_upper(net, dom, 1.5, 1e-6, &bound) == BG_STATUS_INVALID_ARGUMENT);
    CHECK(bg_last_error(NULL, 0) > 0);
    CHECK(fabs(bg_ft_triangular(3.141592653589793) - 2.0 / pow(3.141592653589793, 3)) < 1e-15);
    bg_network_free(net);
    bg_domain_free(dom);
    printf("barron-gauge %s: cost %.1f, spectral %.6f\n", bg_version(), cost, bound.value);
    return 0;
}
