#ifndef J0RANK_H
#define J0RANK_H

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__)
#define J0R_API __attribute__((visibility("default")))
#else
#define J0R_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. 2, 3 and 4 are also the CLI exit codes. */
typedef enum j0r_status {
  J0R_OK = 0,
  J0R_ERR_USAGE = 2,
  J0R_ERR_INVARIANT = 3,
  J0R_ERR_CAPACITY = 4,
  J0R_ERR_PARSE = 5,
  J0R_ERR_IO = 6,
  J0R_ERR_NEEDS_MORE_PRIMES = 7,
  J0R_ERR_NUMERICAL = 8,
  J0R_ERR_INTERNAL = 9
} j0r_status;

/* The newforms of one prime level, with their coefficients. */
typedef struct j0r_level j0r_level;

typedef struct j0r_options {
  const char* cache_dir; /* NULL or "": no cache */
  int64_t pmax;          /* coefficient horizon */
  int jobs;
  double tol;            /* zero refinement width; 0 keeps the default */
} j0r_options;

typedef struct j0r_bound_params {
  const char* mode;          /* unconditional, harmonic, grh, sign or all */
  double lambda;             /* 0: 2 for unconditional/harmonic, (11/6) log q for grh */
  double height;             /* 0: log^3 q */
  const char* test_function; /* fejer or pp; NULL means fejer */
  int64_t C;                 /* Kloosterman cutoff; 0: floor(sqrt q) */
} j0r_bound_params;

J0R_API void j0r_options_init(j0r_options* options);
J0R_API void j0r_bound_params_init(j0r_bound_params* params);

J0R_API const char* j0r_version(void);
J0R_API const char* j0r_status_name(j0r_status status);
/* Message of the last failed call on this thread. */
J0R_API const char* j0r_last_error(void);
/* Releases strings returned through char** out-parameters. */
J0R_API void j0r_free(char* text);

/* Loads the level from the cache when it holds enough primes, otherwise
   computes it and stores it. */
J0R_API j0r_status j0r_level_open(int64_t q, const j0r_options* options, j0r_level** out);
J0R_API j0r_status j0r_level_load(const char* path, j0r_level** out);
J0R_API void j0r_level_close(j0r_level* level);
J0R_API int64_t j0r_level_q(const j0r_level* level);
J0R_API size_t j0r_level_forms(const j0r_level* level);
J0R_API int64_t j0r_level_pmax(const j0r_level* level);
/* Writes the records in the line format read by j0r_level_load. */
J0R_API j0r_status j0r_level_export(const j0r_level* level, const char* path);

/* Reports. JSON strings carry a "summary" line and a "passed" flag, which is
   also returned through *passed when that pointer is not NULL. */
J0R_API j0r_status j0r_eigens_report(const j0r_level* level, char** json, int* passed);
J0R_API j0r_status j0r_rank_report(const j0r_level* level, char** json, int* passed);
J0R_API j0r_status j0r_zeros_report(const j0r_level* level, double height, const j0r_options* options, char** json,
                                    char** csv, int* passed);
J0R_API j0r_status j0r_petersson_report(const j0r_level* level, const j0r_options* options, char** json, char** csv,
                                        int* passed);
J0R_API j0r_status j0r_explicit_report(const j0r_level* level, double lambda, const char* test_function,
                                       double height, const j0r_options* options, char** json, int* passed);
J0R_API j0r_status j0r_bound_report(const j0r_level* level, const j0r_bound_params* params,
                                    const j0r_options* options, char** json, int* passed);
/* boxes holds n_boxes (t1, t2) pairs. */
J0R_API j0r_status j0r_density_report(const int64_t* levels, size_t n_levels, const double* alphas, size_t n_alphas,
                                      const double* boxes, size_t n_boxes, double B, double c,
                                      const j0r_options* options, char** json, char** csv, int* passed);
J0R_API j0r_status j0r_kloosterman(int64_t m, int64_t n, int64_t c, double* out);

#ifdef __cplusplus
}
#endif

#endif
