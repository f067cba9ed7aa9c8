#ifndef DRAFTWISE_H
#define DRAFTWISE_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DwStatus {
  DW_STATUS_OK = 0,
  DW_STATUS_NULL_ARGUMENT = 1,
  DW_STATUS_INVALID_UTF8 = 2,
  DW_STATUS_INVALID_INPUT = 3,
  DW_STATUS_IO = 4,
  DW_STATUS_PANIC = 5,
} DwStatus;

/**
 * Opaque scoring handle: one article lexicon plus word vectors.
 */
typedef struct DwScorer DwScorer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Loads a lexicon file and, when `embeddings_path` is not null, a word
 * vector file.
 *
 * # Safety
 * Path arguments must be null or NUL-terminated strings; `out` must be a
 * valid pointer.
 */
enum DwStatus dw_scorer_new(const char *lexicon_path,
                            const char *embeddings_path,
                            struct DwScorer **out);

/**
 * Builds a scorer from lexicon JSON with no word vectors.
 *
 * # Safety
 * `lexicon_json` must be a NUL-terminated string; `out` must be valid.
 */
enum DwStatus dw_scorer_from_json(const char *lexicon_json, struct DwScorer **out);

/**
 * # Safety
 * `scorer` must be null or a handle from this library not yet freed.
 */
void dw_scorer_free(struct DwScorer *scorer);

/**
 * Scores one draft. `out_json` receives `{"score": ..., "feedback": ...}`.
 *
 * # Safety
 * `scorer` must be a live handle, `essay` a NUL-terminated string and
 * `out_json` a valid pointer.
 */
enum DwStatus dw_score(const struct DwScorer *scorer, const char *essay, char **out_json);

/**
 * Compares two drafts. `prev_ef` is 1, 2 or 3 for the feedback shown on
 * the old draft, or 0 to use the level implied by its score.
 *
 * # Safety
 * As for [`dw_score`].
 */
enum DwStatus dw_revise(const struct DwScorer *scorer,
                        const char *old_draft,
                        const char *new_draft,
                        int32_t prev_ef,
                        char **out_json);

/**
 * Evidence-use level (1, 2 or 3) for the given indicator values.
 *
 * # Safety
 * `out_level` must be a valid pointer.
 */
enum DwStatus dw_select_ef(uint32_t npe,
                           uint32_t spc,
                           uint32_t alpha,
                           uint32_t beta,
                           int32_t *out_level);

/**
 * Quadratic weighted kappa of two rating vectors over `min..=max`.
 *
 * # Safety
 * `a` and `b` must each point to `n` readable values; `out` must be valid.
 */
enum DwStatus dw_qwk(const int64_t *a,
                     const int64_t *b,
                     size_t n,
                     int64_t min,
                     int64_t max,
                     double *out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void dw_string_free(char *s);

/**
 * Message for the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *dw_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DRAFTWISE_H */
