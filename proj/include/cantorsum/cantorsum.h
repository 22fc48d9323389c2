#ifndef CANTORSUM_CANTORSUM_H
#define CANTORSUM_CANTORSUM_H

/*
 * C interface to the cantorsum engine.
 *
 * Systems are opaque handles created from IFS description JSON. Operations that
 * take options accept a JSON object as text and return reports as heap strings
 * owned by the caller (release with cs_string_free). On failure the status is
 * nonzero and cs_last_error() describes it for the calling thread.
 */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(CANTORSUM_BUILDING_LIBRARY)
#define CS_API __attribute__((visibility("default")))
#else
#define CS_API
#endif

typedef struct cs_sum_system cs_sum_system;

typedef enum cs_status {
  CS_OK = 0,
  CS_NOT_FOUND = 1,
  CS_ERR_EMPTY_SYSTEM = 10,
  CS_ERR_RATIO_OUT_OF_RANGE,
  CS_ERR_ORIENTATION_OUT_OF_RANGE,
  CS_ERR_NO_CONVERGENCE,
  CS_ERR_INVALID_DIGIT,
  CS_ERR_ORIENTATION_MISMATCH,
  CS_ERR_NO_SHARED_SQUARE,
  CS_ERR_EPSILON_TOO_LARGE,
  CS_ERR_SEARCH_EXHAUSTED,
  CS_ERR_BUDGET_EXCEEDED,
  CS_ERR_WITNESS_UNAVAILABLE,
  CS_ERR_DOMAIN,
  CS_ERR_NONPOSITIVE_ETA,
  CS_ERR_DEGENERATE_SYSTEM,
  CS_ERR_PARSE,
  CS_ERR_INVALID_ARGUMENT = 40,
  CS_ERR_INTERNAL = 41
} cs_status;

CS_API const char* cs_version(void);
CS_API const char* cs_status_name(cs_status status);
/* Message of the last failed call on this thread; empty if none. */
CS_API const char* cs_last_error(void);
CS_API void cs_string_free(char* s);

CS_API cs_status cs_sum_system_from_json(const char* json_text, cs_sum_system** out);
CS_API cs_status cs_sum_system_from_file(const char* path, cs_sum_system** out);
CS_API void cs_sum_system_free(cs_sum_system* system);

/* Dimensions, hulls, r_min, D and the size factor as JSON. */
CS_API cs_status cs_analyze(const cs_sum_system* system, char** report_json);

/*
 * Options: {"eps": number or array, "scale_floor": number, "threads": int,
 *           "max_words": int, "max_squares": int, "method": "auto" | "search"}.
 * Returns CS_OK when every eps produced a verified witness, CS_NOT_FOUND when at
 * least one search was exhaustive without a witness, CS_ERR_BUDGET_EXCEEDED when
 * at least one search was cut short. The report is produced in all three cases.
 */
CS_API cs_status cs_certify_zero(const cs_sum_system* system, const char* options_json, char** report_json);

/* Accepts one witness object or a certify report; *all_verified is 1 when every witness re-verifies. */
CS_API cs_status cs_verify_witness(const cs_sum_system* system, const char* witness_json, int* all_verified,
                                   char** report_json);

/* Options: {"eta_lo", "eta_hi", "grid", "eps", "scale_floor", "threads", "max_words", "max_squares"}. */
CS_API cs_status cs_scan_projections(const cs_sum_system* system, const char* options_json, char** csv);

CS_API cs_status cs_classify_middle(double lam, double gam, double boundary_tol, char** report_json);
CS_API cs_status cs_region_map(int grid, double boundary_tol, char** csv, char** svg);

/* Options: {"radii": [numbers], "mode": "merged" | "raw"}. */
CS_API cs_status cs_covering_sums(const cs_sum_system* system, const char* options_json, char** csv);
/* Options: {"a": number, "radii": [numbers]}; "a" defaults to the left end of the sum's hull. */
CS_API cs_status cs_density(const cs_sum_system* system, const char* options_json, char** csv);

#ifdef __cplusplus
}
#endif

#endif
