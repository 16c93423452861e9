#ifndef MINIMERLIN_H
#define MINIMERLIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of an FFI call. Protocol-level failures are reported inside the
// response JSON with `MM_STATUS_OK`.
typedef enum MmStatus {
  MM_STATUS_OK = 0,
  MM_STATUS_NULL_ARGUMENT = 1,
  MM_STATUS_INVALID_UTF8 = 2,
  MM_STATUS_INTERIOR_NUL = 3,
  MM_STATUS_PANIC = 4,
} MmStatus;

// Opaque server handle holding per-file sessions.
typedef struct MmServer MmServer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a server with an empty session cache.
struct MmServer *mm_server_new(void);

// Releases a server created by [`mm_server_new`]. Null is ignored.
//
// # Safety
// `server` must come from [`mm_server_new`] and not be used afterwards.
void mm_server_free(struct MmServer *server);

// Answers `request` using the session cache of `server`.
//
// # Safety
// `server` must be a live handle, `request` a NUL-terminated string and
// `response` a writable pointer. On `MM_STATUS_OK`, `*response` holds a
// string to release with [`mm_string_free`]; otherwise it is set to null.
enum MmStatus mm_server_request(struct MmServer *server, const char *request, char **response);

// Answers `request` without any cache.
//
// # Safety
// Same contract as [`mm_server_request`] without the server handle.
enum MmStatus mm_single_request(const char *request, char **response);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void mm_string_free(char *s);

// Library version as a static NUL-terminated string.
const char *mm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MINIMERLIN_H */
