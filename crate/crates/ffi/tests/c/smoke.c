#include <math.h>
#include <stdio.h>

#include "rtn_entangle.h"

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "check failed at line %d: %s\n", __LINE__, #cond); \
      return 1;                                                      \
    }                                                                \
  } while (0)

int main(void) {
  double c0 = 0.0;
  CHECK(rtn_initial_concurrence(0.91, sqrt(0.5), &c0) == RTN_STATUS_OK);
  CHECK(fabs(c0 - 0.865) < 1e-12);

  RtnQubit q = {0.0, 5.0, 1.0, 0.0};
  RtnState s = {RTN_FAMILY_ONE_EXCITATION, 0.91, sqrt(0.5)};
  RtnModel *model = NULL;
  CHECK(rtn_model_new(&s, &q, NULL, &model) == RTN_STATUS_OK);

  RtnEvents *events = NULL;
  CHECK(rtn_model_events(model, 20.0, &events) == RTN_STATUS_OK);
  CHECK(rtn_events_revival_count(events) >= 1);
  bool found = false;
  double t_death = 0.0;
  CHECK(rtn_events_final_death_time(events, &found, &t_death) == RTN_STATUS_OK);
  CHECK(found && t_death > 0.0 && t_death < 20.0);
  rtn_events_free(events);
  rtn_model_free(model);

  RtnQubit bad = {0.0, -1.0, 1.0, 0.0};
  RtnComplex z;
  CHECK(rtn_coherence(&bad, 1.0, &z) == RTN_STATUS_DOMAIN);
  char msg[256];
  CHECK(rtn_last_error_message(msg, sizeof msg) > 1);

  printf("ok\n");
  return 0;
}
