#ifndef MYTHOS_H
#define MYTHOS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum MythosStatus {
  MYTHOS_STATUS_OK = 0,
  MYTHOS_STATUS_NULL_ARG = 1,
  MYTHOS_STATUS_UTF8 = 2,
  MYTHOS_STATUS_PARSE = 3,
  MYTHOS_STATUS_RESOURCE_LIMIT = 4,
  MYTHOS_STATUS_PRECONDITION = 5,
  MYTHOS_STATUS_IO = 6,
  MYTHOS_STATUS_INTERNAL = 7,
} MythosStatus;

/**
 * Opaque knowledge base with its reasoning settings.
 */
typedef struct MythosKb MythosKb;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string.
 */
const char *mythos_version(void);

/**
 * Message of the last failed call on this thread, or null.
 */
const char *mythos_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void mythos_string_free(char *s);

/**
 * Parses KRSS text into a new handle.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable.
 */
enum MythosStatus mythos_kb_parse(const char *text, struct MythosKb **out);

/**
 * Reads and parses a KRSS file into a new handle.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out` must be writable.
 */
enum MythosStatus mythos_kb_load(const char *path, struct MythosKb **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `kb` must come from this library and not have been freed.
 */
void mythos_kb_free(struct MythosKb *kb);

/**
 * Sets the completion-graph node cap. Zero is rejected.
 *
 * # Safety
 * `kb` must be a live handle.
 */
enum MythosStatus mythos_kb_set_node_cap(struct MythosKb *kb, size_t cap);

/**
 * # Safety
 * `kb` must be a live handle; `out` must be writable.
 */
enum MythosStatus mythos_kb_is_consistent(const struct MythosKb *kb, bool *out);

/**
 * Satisfiability of a concept written in KRSS.
 *
 * # Safety
 * `kb` must be a live handle, `concept` a nul-terminated string and `out` writable.
 */
enum MythosStatus mythos_kb_is_satisfiable(const struct MythosKb *kb,
                                           const char *concept,
                                           bool *out);

/**
 * Whether `sub` is subsumed by `sup`.
 *
 * # Safety
 * `kb` must be a live handle, `sup` and `sub` nul-terminated strings and `out` writable.
 */
enum MythosStatus mythos_kb_subsumes(const struct MythosKb *kb,
                                     const char *sup,
                                     const char *sub,
                                     bool *out);

/**
 * `{"coherent": bool, "unsat_concepts": [...]}`.
 *
 * # Safety
 * `kb` must be a live handle; `out` must be writable.
 */
enum MythosStatus mythos_kb_coherence_json(const struct MythosKb *kb, char **out);

/**
 * JSON array of anti-pattern matches.
 *
 * # Safety
 * `kb` must be a live handle; `out` must be writable.
 */
enum MythosStatus mythos_kb_antipatterns_json(const struct MythosKb *kb, char **out);

/**
 * The knowledge base as KRSS text.
 *
 * # Safety
 * `kb` must be a live handle; `out` must be writable.
 */
enum MythosStatus mythos_kb_serialize(const struct MythosKb *kb, char **out);

/**
 * Checks a myth against a fact and writes the conflict report as JSON.
 * `background` and `rules` (KRSS rule text) may be null. The node cap of
 * `myth` applies.
 *
 * # Safety
 * Handles must be live, strings nul-terminated and `out` writable.
 */
enum MythosStatus mythos_check_claim_json(const struct MythosKb *myth,
                                          const struct MythosKb *fact,
                                          const struct MythosKb *background,
                                          const char *rules,
                                          char **out);

/**
 * Parses N-Triples from the machine reader and normalizes them into a new handle.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable.
 */
enum MythosStatus mythos_ingest_ntriples(const char *text, struct MythosKb **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MYTHOS_H */
