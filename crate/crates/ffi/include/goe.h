#ifndef GOE_H
#define GOE_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GoeStatus {
  GOE_STATUS_OK = 0,
  /**
   * The check ran and the answer is negative (nothing found).
   */
  GOE_STATUS_NEGATIVE = 1,
  GOE_STATUS_INVALID_ARGUMENT = 2,
  GOE_STATUS_CAP_EXCEEDED = 3,
  GOE_STATUS_DECODE = 4,
  GOE_STATUS_NULL_POINTER = 5,
  GOE_STATUS_INTERNAL = 6,
} GoeStatus;

/**
 * Opaque linear cellular automaton.
 */
typedef struct GoeCa GoeCa;

/**
 * Opaque group-ring element.
 */
typedef struct GoeGrElem GoeGrElem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on this thread.
 */
const char *goe_last_error(void);

/**
 * Library version, static storage.
 */
const char *goe_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void goe_string_free(char *s);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum GoeStatus goe_ca_muller(uint64_t p, struct GoeCa **out);

/**
 * Identity automaton on a named group (`z`, `z2`, `w3`, `f2`, ...).
 *
 * # Safety
 * `group` must be a NUL-terminated string, `out` a valid handle slot.
 */
enum GoeStatus goe_ca_identity(const char *group, uint64_t p, size_t m, struct GoeCa **out);

/**
 * Decodes an automaton file (canonical JSON, digest checked when present).
 *
 * # Safety
 * `json` must be a NUL-terminated string, `out` a valid handle slot.
 */
enum GoeStatus goe_ca_from_json(const char *json, struct GoeCa **out);

/**
 * # Safety
 * `ca` must be a live handle, `out` a valid string slot.
 */
enum GoeStatus goe_ca_to_json(const struct GoeCa *ca, char **out);

/**
 * Alphabet dimension `m`; 0 for a null handle.
 *
 * # Safety
 * `ca` must be null or a live handle.
 */
size_t goe_ca_alphabet_dim(const struct GoeCa *ca);

/**
 * Group-ring matrix `Σ α_s s`, rendered as text.
 *
 * # Safety
 * `ca` must be a live handle, `out` a valid string slot.
 */
enum GoeStatus goe_ca_groupring_matrix(const struct GoeCa *ca, char **out);

/**
 * Garden-of-Eden search on `ball(window_radius)`. `Ok` with a witness file in
 * `out`, or `Negative` with `*out` set to null.
 *
 * # Safety
 * `ca` must be a live handle, `out` a valid string slot.
 */
enum GoeStatus goe_ca_goe_window(const struct GoeCa *ca, size_t window_radius, char **out);

/**
 * Kernel search on `ball(radius)`. `Ok` with a witness file in `out`, or
 * `Negative` with `*out` set to null.
 *
 * # Safety
 * `ca` must be a live handle, `out` a valid string slot.
 */
enum GoeStatus goe_ca_mep_search(const struct GoeCa *ca, size_t radius, char **out);

/**
 * # Safety
 * `ca` must be null or a handle from this library, freed at most once.
 */
void goe_ca_free(struct GoeCa *ca);

/**
 * `#Y` of the cycle system for `n`, and whether every size identity holds.
 *
 * # Safety
 * `size_y` and `passed` must be valid pointers.
 */
enum GoeStatus goe_lemma1_verify(size_t n, size_t *size_y, int *passed);

/**
 * Synthesis from a preset (`tree5`). `samples == 0` selects certified mode.
 * On success `ca_out` receives the automaton and `cert_out` the certificate file.
 *
 * # Safety
 * `preset` must be a NUL-terminated string; the out pointers must be valid.
 */
enum GoeStatus goe_synthesize(const char *preset,
                              uint64_t seed,
                              uint64_t samples,
                              struct GoeCa **ca_out,
                              char **cert_out);

/**
 * Parses a group-ring element over `GF(p^d)`, e.g. `"1 + 2*u - u^-1 v"`.
 *
 * # Safety
 * `group` and `text` must be NUL-terminated strings, `out` a valid handle slot.
 */
enum GoeStatus goe_grelem_parse(const char *group,
                                uint64_t p,
                                size_t d,
                                const char *text,
                                struct GoeGrElem **out);

/**
 * # Safety
 * `e` must be a live handle, `out` a valid string slot.
 */
enum GoeStatus goe_grelem_to_string(const struct GoeGrElem *e, char **out);

/**
 * # Safety
 * `a`, `b` must be live handles, `out` a valid handle slot.
 */
enum GoeStatus goe_grelem_mul(const struct GoeGrElem *a,
                              const struct GoeGrElem *b,
                              struct GoeGrElem **out);

/**
 * 1 when equal, 0 otherwise (including null handles).
 *
 * # Safety
 * `a`, `b` must be null or live handles.
 */
int goe_grelem_equal(const struct GoeGrElem *a, const struct GoeGrElem *b);

/**
 * Ore solution `a t = b s` with `t != 0`, on a free abelian group.
 *
 * # Safety
 * `a`, `s` must be live handles; `b_out`, `t_out` valid handle slots.
 */
enum GoeStatus goe_ore_solve(const struct GoeGrElem *a,
                             const struct GoeGrElem *s,
                             struct GoeGrElem **b_out,
                             struct GoeGrElem **t_out);

/**
 * # Safety
 * `e` must be null or a handle from this library, freed at most once.
 */
void goe_grelem_free(struct GoeGrElem *e);

/**
 * Runs the command line with `argv[0..argc]` (program name first) and
 * stores its exit code; output goes to the process stdout and stderr.
 *
 * # Safety
 * `argv` must point to `argc` NUL-terminated strings; `exit_code` must be valid.
 */
enum GoeStatus goe_cli_dispatch(int argc, const char *const *argv, int *exit_code);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GOE_H */
