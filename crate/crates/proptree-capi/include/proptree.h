/* C interface to the proptree property-based testing framework. */

#ifndef PROPTREE_H
#define PROPTREE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes for every fallible entry point.
 */
typedef enum PbtStatus {
  PBT_STATUS_OK = 0,
  PBT_STATUS_NULL_ARGUMENT = 1,
  PBT_STATUS_INVALID_UTF8 = 2,
  PBT_STATUS_DUPLICATE_NAME = 3,
  PBT_STATUS_INVALID_ARGUMENT = 4,
  PBT_STATUS_MISSING_BINDING = 5,
  PBT_STATUS_RUN_FAILED = 6,
} PbtStatus;

/**
 * Opaque property builder; assembles quantifiers outermost-first.
 */
typedef struct PbtBuilder {
  uint8_t _private[0];
} PbtBuilder;

/**
 * Borrowed view of the environment inside callbacks; never freed by the
 * caller.
 */
typedef struct PbtEnv {
  uint8_t _private[0];
} PbtEnv;

/**
 * Borrowed deterministic random source inside generator callbacks.
 */
typedef struct PbtRng {
  uint8_t _private[0];
} PbtRng;

/**
 * Generator callback for an i64 variable: may read earlier bindings from
 * `env` and must draw randomness only from `rng`. Null is rejected.
 */
typedef int64_t (*PbtGenI64)(const struct PbtEnv *env,
                             struct PbtRng *rng,
                             uint64_t size,
                             void *user_data);

/**
 * Boolean predicate over the environment, used for preconditions and the
 * final check. Null is rejected.
 */
typedef bool (*PbtPredicate)(const struct PbtEnv *env, void *user_data);

/**
 * Opaque reified property.
 */
typedef struct PbtProp {
  uint8_t _private[0];
} PbtProp;

/**
 * Opaque campaign report.
 */
typedef struct PbtReport {
  uint8_t _private[0];
} PbtReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an empty property builder.
 */
struct PbtBuilder *pbt_builder_new(void);

/**
 * Releases a builder and any quantifiers still staged in it.
 *
 * # Safety
 * `b` must be null or a pointer from [`pbt_builder_new`] not yet freed.
 */
void pbt_builder_free(struct PbtBuilder *b);

/**
 * Quantifies over an i64 drawn uniformly from `[-size, size]`, with the
 * built-in step mutator and halving shrinker attached.
 *
 * # Safety
 * `b` must be a live builder; `name` a NUL-terminated string.
 */
enum PbtStatus pbt_builder_forall_i64_sized(struct PbtBuilder *b, const char *name);

/**
 * Quantifies over an i64 produced by a caller-supplied generator.
 *
 * # Safety
 * `b` must be a live builder and `name` a NUL-terminated string. The
 * callback and its `user_data` must stay valid for the property's
 * lifetime, and be thread-safe if the property is run in parallel.
 */
enum PbtStatus pbt_builder_forall_i64(struct PbtBuilder *b,
                                      const char *name,
                                      PbtGenI64 gen,
                                      void *user_data);

/**
 * Guards the rest of the property behind a precondition; failing draws
 * are discarded.
 *
 * # Safety
 * Same contract as [`pbt_builder_forall_i64`].
 */
enum PbtStatus pbt_builder_implies(struct PbtBuilder *b, PbtPredicate pred, void *user_data);

/**
 * Terminates the spine with the final predicate and yields the property.
 * The builder's staged quantifiers are consumed; the builder itself must
 * still be freed.
 *
 * # Safety
 * Same contract as [`pbt_builder_forall_i64`]; `out` must be writable.
 */
enum PbtStatus pbt_builder_check(struct PbtBuilder *b,
                                 PbtPredicate pred,
                                 void *user_data,
                                 struct PbtProp **out);

/**
 * # Safety
 * `p` must be null or a pointer from [`pbt_builder_check`] not yet freed.
 */
void pbt_prop_free(struct PbtProp *p);

/**
 * Reads an i64 binding inside a callback.
 *
 * # Safety
 * `env` must be the pointer passed to the running callback; `name` a
 * NUL-terminated string; `out` writable.
 */
enum PbtStatus pbt_env_get_i64(const struct PbtEnv *env, const char *name, int64_t *out);

/**
 * Number of bindings currently in the environment.
 *
 * # Safety
 * `env` must be null or the pointer passed to the running callback.
 */
size_t pbt_env_len(const struct PbtEnv *env);

/**
 * Deterministic uniform draw in `[0, bound)`; returns 0 when `bound` is 0
 * or `rng` is null.
 *
 * # Safety
 * `rng` must be null or the pointer passed to the running callback.
 */
uint64_t pbt_rng_next_below(struct PbtRng *rng, uint64_t bound);

/**
 * Runs the classic generate-and-check loop for up to `fuel` trials.
 *
 * # Safety
 * `prop` must be a live property; `out` must be writable.
 */
enum PbtStatus pbt_run_loop(const struct PbtProp *prop,
                            uint64_t fuel,
                            uint64_t seed,
                            struct PbtReport **out);

/**
 * Runs up to `tests` trials across `workers` threads. The property's
 * callbacks are invoked concurrently.
 *
 * # Safety
 * As [`pbt_run_loop`]; every callback in the property must additionally
 * tolerate concurrent invocation.
 */
enum PbtStatus pbt_parallel_run_loop(const struct PbtProp *prop,
                                     uint64_t tests,
                                     size_t workers,
                                     uint64_t seed,
                                     struct PbtReport **out);

/**
 * # Safety
 * `r` must be null or a live report pointer.
 */
bool pbt_report_foundbug(const struct PbtReport *r);

/**
 * # Safety
 * `r` must be null or a live report pointer.
 */
uint64_t pbt_report_passed(const struct PbtReport *r);

/**
 * # Safety
 * `r` must be null or a live report pointer.
 */
uint64_t pbt_report_discards(const struct PbtReport *r);

/**
 * The printed counterexample, or null when no bug was found. The caller
 * owns the string and releases it with `pbt_string_free`.
 *
 * # Safety
 * `r` must be null or a live report pointer.
 */
char *pbt_report_counterexample(const struct PbtReport *r);

/**
 * # Safety
 * `r` must be null or a report pointer not yet freed.
 */
void pbt_report_free(struct PbtReport *r);

/**
 * Frees strings returned by this library.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void pbt_string_free(char *s);

/**
 * Runs a full benchmark campaign described by a JSON configuration (the
 * same schema the `pbt` command line uses) and returns the JSON-lines
 * trial records. On failure the output string holds the error message.
 * Either way the caller frees it with `pbt_string_free`.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `out` must be writable.
 */
enum PbtStatus pbt_campaign_run_json(const char *config_json, char **out);

/**
 * Library version as a static string; do not free.
 */
const char *pbt_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROPTREE_H */
