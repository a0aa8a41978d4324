#ifndef GRWALK_GRWALK_H
#define GRWALK_GRWALK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(GRWALK_BUILDING_LIBRARY)
#    define GRWALK_API __declspec(dllexport)
#  else
#    define GRWALK_API __declspec(dllimport)
#  endif
#else
#  define GRWALK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum grw_status {
  GRW_OK = 0,
  GRW_ERROR_VALIDATION = 2, /* bad input data, options or arguments */
  GRW_ERROR_RUNTIME = 3     /* I/O or numerical failure */
} grw_status;

/* Immutable sign/size decomposition of non-zero returns in event time. */
typedef struct grw_decomposition grw_decomposition;

/* Message of the last failed call on this thread; "" when none. */
GRWALK_API const char* grw_last_error(void);
GRWALK_API const char* grw_version(void);

/* Strings returned through char** outputs are owned by the caller. */
GRWALK_API void grw_string_free(char* s);

/* ---- decompositions ---------------------------------------------------- */

/* Quote file -> decomposition. options_json (may be NULL):
 *   {"schema": "bid-ask"|"midprice", "delimiter": ",", "max_malformed_fraction": 0.05,
 *    "session_open": "08:00", "session_close": "16:30", "trim_open": "15m", "trim_close": "15m"}
 * stats_json (may be NULL) receives row/tick/return counts. */
GRWALK_API grw_status grw_ingest(const char* path, const char* options_json,
                                 grw_decomposition** out, char** stats_json);

GRWALK_API grw_status grw_decomposition_read(const char* path, grw_decomposition** out);
GRWALK_API grw_status grw_decomposition_write(const grw_decomposition* d, const char* path);

/* Builds a decomposition from columns. Timestamps are nanoseconds since the
 * epoch (naive local time); days are days since the epoch. */
GRWALK_API grw_status grw_decomposition_create(const int8_t* signs, const double* sizes,
                                               const int64_t* timestamps_ns,
                                               const int32_t* days, size_t n,
                                               grw_decomposition** out);
GRWALK_API size_t grw_decomposition_size(const grw_decomposition* d);
GRWALK_API grw_status grw_decomposition_get(const grw_decomposition* d, size_t index,
                                            int8_t* sign, double* size, int64_t* timestamp_ns);
GRWALK_API void grw_decomposition_free(grw_decomposition* d);

/* ---- analyses (all options documents may be NULL for defaults) --------- */

/* {"max_lag": 1000, "hill_k": "auto"|k, "dfa_order": 1, "dfa_windows": 20, "dfa_min_window": 10,
 *  "deterministic": "constant", "adf_lags": "schwert"|p, "cross_lag": 10, "day_min_events": 20,
 *  "level": 0.05, "bootstrap": {"block_length", "replicates", "seed"}, "threads": 1} */
GRWALK_API grw_status grw_analyze(const grw_decomposition* d, const char* options_json,
                                  char** report_json);

/* {"interval": "1h", "bins": 10, "max_lag": 1000, "min_events": 2, "with_intervals": false,
 *  "session_open", "session_close", "trim_open", "trim_close"}
 * Session fields default to the decomposition's stored session. bins_csv may be NULL. */
GRWALK_API grw_status grw_model(const grw_decomposition* d, const char* options_json,
                                char** report_json, char** bins_csv);

/* {"mode": "block-joint", "block_lengths": [60], "interval": "1h", "seed": 42,
 *  "replicates": 20, "bins": 10, "max_lag": 1000, "min_events": 2, "threads": 1, session fields}
 * "seed" is required. sweep_csv (may be NULL) gets rho against block length. */
GRWALK_API grw_status grw_shuffle(const grw_decomposition* d, const char* options_json,
                                  char** report_json, char** sweep_csv);

/* Synthetic series from a process spec document and an explicit seed. */
GRWALK_API grw_status grw_synth(const char* spec_json, uint64_t seed, grw_decomposition** out);

/* Monte Carlo Var(R_n) next to the predicted variance with true parameters.
 * options_json: {"n": [1, 10, 100], "replicates": 1000000, "seed": 7, "threads": 1};
 * "seed" is required. */
GRWALK_API grw_status grw_oracle(const char* spec_json, const char* options_json,
                                 char** report_json);

/* Consolidated bundle. inputs_json:
 *   {"analysis": path, "models": [paths], "experiments": [paths], "out_dir": path}
 * A missing input is a validation error naming the file. */
GRWALK_API grw_status grw_report(const char* inputs_json, char** report_json);

/* ---- scalar model helpers ---------------------------------------------- */

GRWALK_API grw_status grw_predicted_variance(double mu_s, double sigma2_s, double mu_w,
                                             double sigma2_w, size_t n, double k_s, double k_w,
                                             double k_sw, double* out);
GRWALK_API grw_status grw_rho(double interval_return, double predicted_variance, double* out);

#ifdef __cplusplus
}
#endif

#endif
