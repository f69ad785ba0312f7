/* Generated by cbindgen from crates/ffi. Do not edit. */

#ifndef SETTLEGEN_H
#define SETTLEGEN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum SgStatus {
  SG_STATUS_OK = 0,
  SG_STATUS_NULL_ARGUMENT = 1,
  SG_STATUS_INVALID_UTF8 = 2,
  SG_STATUS_CONFIG = 3,
  SG_STATUS_PARSE = 4,
  SG_STATUS_OUT_OF_BOUNDS = 5,
  SG_STATUS_STAGE = 6,
  SG_STATUS_NETWORK = 7,
  SG_STATUS_IO = 8,
  SG_STATUS_INTERNAL = 9,
} SgStatus;

/*
 Opaque world handle.
 */
typedef struct SgWorld SgWorld;

/*
 Outcome of an HTTP export.
 */
typedef struct SgExportReport {
  size_t placed;
  size_t failed;
  size_t batches;
  size_t retries;
} SgExportReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. Valid until the
 next failing call on the same thread.
 */
const char *sg_last_error_message(void);

/*
 Library version as a static string.
 */
const char *sg_version(void);

/*
 Release a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void sg_string_free(char *s);

/*
 Load a world JSON file.

 # Safety
 `path` must be a nul-terminated string; `out` must be writable.
 */
enum SgStatus sg_world_load(const char *path, struct SgWorld **out);

/*
 Parse a world from a JSON document.

 # Safety
 `json` must be a nul-terminated string; `out` must be writable.
 */
enum SgStatus sg_world_from_json(const char *json, struct SgWorld **out);

/*
 Flat world of the given size and altitude.
 */
struct SgWorld *sg_world_new_flat(size_t width, size_t length, int32_t altitude);

/*
 Release a world handle. Null is ignored.

 # Safety
 `world` must come from this library and not have been freed.
 */
void sg_world_free(struct SgWorld *world);

/*
 Write the world JSON to `path`.

 # Safety
 `world` must be a live handle and `path` a nul-terminated string.
 */
enum SgStatus sg_world_save(const struct SgWorld *world, const char *path);

/*
 World JSON as a new string; release with `sg_string_free`.

 # Safety
 `world` must be a live handle; `out` must be writable.
 */
enum SgStatus sg_world_to_json(const struct SgWorld *world, char **out);

/*
 Width of the world, or 0 for a null handle.

 # Safety
 `world` must be null or a live handle.
 */
size_t sg_world_width(const struct SgWorld *world);

/*
 Length of the world, or 0 for a null handle.

 # Safety
 `world` must be null or a live handle.
 */
size_t sg_world_length(const struct SgWorld *world);

/*
 Number of entries in the edit log, or 0 for a null handle.

 # Safety
 `world` must be null or a live handle.
 */
size_t sg_world_edit_count(const struct SgWorld *world);

/*
 Surface altitude of column `(x, z)`.

 # Safety
 `world` must be a live handle; `out` must be writable.
 */
enum SgStatus sg_world_altitude(const struct SgWorld *world, size_t x, size_t z, int32_t *out);

/*
 Run the full pipeline from a JSON configuration (null or empty for the
 defaults). On success `out_world` receives the finished world and, when
 not null, `out_report` the report JSON.

 # Safety
 `config_json` must be null or a nul-terminated string; `out_world` must be
 writable; `out_report` must be null or writable.
 */
enum SgStatus sg_pipeline_run(const char *config_json,
                              struct SgWorld **out_world,
                              char **out_report);

/*
 Send the world's edit log to a block-placement endpoint with default
 batching and retries.

 # Safety
 `world` must be a live handle, `url` a nul-terminated string, and `out`
 null or writable.
 */
enum SgStatus sg_export_http(const struct SgWorld *world,
                             const char *url,
                             struct SgExportReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SETTLEGEN_H */
