/* Build a property from C callbacks, run it, and print the report.
 *
 *   cc demo.c -I../include -L../../../target/debug -lproptree_capi \
 *      -lpthread -ldl -lm -o demo
 */
#include <stdio.h>
#include <stdlib.h>

#include "proptree.h"

/* forall xs-length pair: x + y stays below the limit passed as user_data. */
static bool sum_below(const PbtEnv *env, void *user_data) {
  long limit = (long)user_data;
  int64_t x = 0, y = 0;
  if (pbt_env_get_i64(env, "x", &x) != PBT_STATUS_OK) return false;
  if (pbt_env_get_i64(env, "y", &y) != PBT_STATUS_OK) return false;
  return x + y < limit;
}

static int64_t gen_digit(const PbtEnv *env, PbtRng *rng, uint64_t size,
                         void *user_data) {
  (void)env;
  (void)size;
  (void)user_data;
  return (int64_t)pbt_rng_next_below(rng, 10);
}

int main(void) {
  PbtBuilder *builder = pbt_builder_new();
  if (pbt_builder_forall_i64(builder, "x", gen_digit, NULL) != PBT_STATUS_OK)
    return 1;
  if (pbt_builder_forall_i64_sized(builder, "y") != PBT_STATUS_OK) return 1;

  PbtProp *prop = NULL;
  if (pbt_builder_check(builder, sum_below, (void *)12, &prop) != PBT_STATUS_OK)
    return 1;
  pbt_builder_free(builder);

  PbtReport *report = NULL;
  if (pbt_run_loop(prop, 100000, 42, &report) != PBT_STATUS_OK) return 1;

  printf("foundbug=%d passed=%llu discards=%llu\n",
         pbt_report_foundbug(report),
         (unsigned long long)pbt_report_passed(report),
         (unsigned long long)pbt_report_discards(report));
  char *counterexample = pbt_report_counterexample(report);
  if (counterexample != NULL) {
    printf("counterexample:\n%s\n", counterexample);
    pbt_string_free(counterexample);
  }

  pbt_report_free(report);
  pbt_prop_free(prop);
  return 0;
}
