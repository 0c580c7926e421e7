#ifndef PLU_H
#define PLU_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum PluStatus {
  PLU_STATUS_OK = 0,
  PLU_STATUS_NULL_POINTER = 1,
  PLU_STATUS_INVALID_UTF8 = 2,
  PLU_STATUS_PARSE = 3,
  PLU_STATUS_INVALID_INPUT = 4,
  PLU_STATUS_BUDGET_EXCEEDED = 5,
  PLU_STATUS_TYPE_IS_ZERO = 6,
  PLU_STATUS_MISMATCH = 7,
  PLU_STATUS_PANIC = 99,
} PluStatus;

typedef struct PluMorphism PluMorphism;

typedef struct PluPoset PluPoset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Valid until the next
 * failing call on the same thread.
 */
const char *plu_last_error(void);

/**
 * Library version, static storage.
 */
const char *plu_version(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void plu_string_free(char *s);

/**
 * Parses a poset document (`elements` plus `covers` or `leq`).
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` a writable pointer.
 */
enum PluStatus plu_poset_from_json(const char *json, struct PluPoset **out);

/**
 * # Safety
 * `p` must come from this library or be null.
 */
void plu_poset_free(struct PluPoset *p);

/**
 * Number of elements, or 0 for a null handle.
 *
 * # Safety
 * `p` must be a live handle or null.
 */
size_t plu_poset_len(const struct PluPoset *p);

/**
 * # Safety
 * `p` must be a live handle; `out` a writable pointer.
 */
enum PluStatus plu_poset_to_json(const struct PluPoset *p, char **out);

/**
 * Condition (*) when `n` is 0, otherwise (*_n).
 *
 * # Safety
 * `p` must be a live handle; `out` a writable pointer.
 */
enum PluStatus plu_check_star(const struct PluPoset *p, size_t n, bool *out);

/**
 * Unification type as text: "1", "2", ..., or "0".
 *
 * # Safety
 * `variety` is "b0", "b1", ..., "omega"; pointers as for the other calls.
 */
enum PluStatus plu_unification_type(const struct PluPoset *p, const char *variety, char **out);

/**
 * Full type report with evidence, as JSON.
 *
 * # Safety
 * As for `plu_unification_type`.
 */
enum PluStatus plu_type_report_json(const struct PluPoset *p, const char *variety, char **out);

/**
 * The product `x ⊙ y` as a new handle.
 *
 * # Safety
 * `x`, `y` live handles; `out` a writable pointer.
 */
enum PluStatus plu_odot(const struct PluPoset *x, const struct PluPoset *y, struct PluPoset **out);

/**
 * The down-set algebra of `p` as an algebra document.
 *
 * # Safety
 * `p` a live handle; `out` a writable pointer.
 */
enum PluStatus plu_dual_lattice_json(const struct PluPoset *p, char **out);

/**
 * Parses a morphism document with inline posets and validates it.
 *
 * # Safety
 * `json` nul-terminated; `out` a writable pointer.
 */
enum PluStatus plu_morphism_from_json(const char *json, struct PluMorphism **out);

/**
 * # Safety
 * `u` must come from this library or be null.
 */
void plu_morphism_free(struct PluMorphism *u);

/**
 * # Safety
 * `u` a live handle; `out` a writable pointer.
 */
enum PluStatus plu_morphism_to_json(const struct PluMorphism *u, char **out);

/**
 * The m-th unifier of the witness chain into G.
 *
 * # Safety
 * `variety` nul-terminated; `out` a writable pointer.
 */
enum PluStatus plu_witness_chain_g(size_t m, const char *variety, struct PluMorphism **out);

/**
 * Whether `u` factors through `v` (u = v ∘ w for some p-morphism w).
 *
 * # Safety
 * `u`, `v` live handles; `out` a writable pointer.
 */
enum PluStatus plu_factor_through(const struct PluMorphism *u,
                                  const struct PluMorphism *v,
                                  bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLU_H */
