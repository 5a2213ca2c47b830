/* C interface to the hypnet library. Structured results are JSON strings owned by the caller
   and released with hn_string_free. Every call returns HN_OK or an error code; the message of the
   last failure on the calling thread is available from hn_last_error. */
#ifndef HYPNET_H
#define HYPNET_H

#include <stdint.h>

#if defined(_WIN32)
#define HN_API __declspec(dllexport)
#else
#define HN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hn_status {
    HN_OK = 0,
    HN_ERR_NON_POSITIVE_LENGTH = 1,
    HN_ERR_SELF_LOOP = 2,
    HN_ERR_DANGLING_ENDPOINT = 3,
    HN_ERR_ZERO_FIBER_DIMENSION = 4,
    HN_ERR_UNKNOWN_VERTEX = 5,
    HN_ERR_INVALID_PARAMETER = 6,
    HN_ERR_RANK_DEFICIENT_INPUT = 7,
    HN_ERR_SINGULAR_BOUNDARY_SYSTEM = 8,
    HN_ERR_DOMAIN_VIOLATION = 9,
    HN_ERR_GRID_TOO_COARSE = 10,
    HN_ERR_BLOWUP_DETECTED = 11,
    HN_ERR_DIMENSION_TOO_LARGE_FOR_EXPM = 12,
    HN_ERR_WEIGHT_NOT_DIAGONAL = 13,
    HN_ERR_WEIGHT_NOT_IDENTITY = 14,
    HN_ERR_CONFIG_PARSE = 15,
    HN_ERR_INTERNAL = 16,
    HN_ERR_NULL_ARGUMENT = 17
} hn_status;

typedef struct hn_system hn_system;

HN_API const char* hn_version(void);
HN_API const char* hn_status_name(int status);
HN_API const char* hn_last_error(void);
HN_API void hn_string_free(char* s);

/* tolerances_json may be NULL or an object such as {"sym": 1e-8}; it overrides the document. */
HN_API int hn_system_from_json(const char* config_json, const char* tolerances_json, hn_system** out);
HN_API int hn_system_from_file(const char* path, const char* tolerances_json, hn_system** out);
HN_API int hn_system_from_model(const char* name, const char* params_json, hn_system** out);
HN_API void hn_system_free(hn_system* sys);

HN_API int hn_system_dump(const hn_system* sys, char** out_json);
HN_API int hn_check(const hn_system* sys, char** out_json);
/* options may be NULL or {"lambda": x, "mu": y} to add cone checks at those shifts. */
HN_API int hn_classify(const hn_system* sys, const char* options_json, char** out_json);

/* options: {"property": "real"|"positive"|"linf", "dynamic": bool, "trials": n, "cells": n, "seed": n} */
HN_API int hn_qual(const hn_system* sys, const char* options_json, char** out_json);

/* options: {"cells", "t_final", "outputs", "method", "dt", "cfl", "initial", "seed"}; missing keys fall back
   to the system's simulation section. out_dir may be NULL. */
HN_API int hn_simulate(const hn_system* sys, const char* options_json, const char* out_dir, char** out_json);

/* options: {"f": {edge_id: csv_path}, "g": [...], "cells": n} */
HN_API int hn_resolvent(const hn_system* sys, const char* options_json, const char* out_dir, char** out_json);

HN_API int hn_models_list(char** out_json);
HN_API int hn_model_dump(const char* name, const char* params_json, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
