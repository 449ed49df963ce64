#ifndef CANDO_H
#define CANDO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CANDO_API __declspec(dllexport)
#else
#define CANDO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct cando_instance cando_instance;
typedef struct cando_report cando_report;

/* Return codes. Every call that can fail returns one of these and records a
   message retrievable with cando_last_error() on the calling thread. */
typedef enum {
  CANDO_OK = 0,
  CANDO_ERR_INVALID_ARGUMENT = 1,
  CANDO_ERR_DIMENSION_MISMATCH = 2,
  CANDO_ERR_NON_FINITE = 3,
  CANDO_ERR_ASYMMETRIC = 4,
  CANDO_ERR_SINGULAR_G = 5,
  CANDO_ERR_BOUNDARY = 6,
  CANDO_ERR_MISSING_ORACLE = 7,
  CANDO_ERR_MISSING_TRUTH = 8,
  CANDO_ERR_SIZE_GUARD = 9,
  CANDO_ERR_IO = 10,
  CANDO_ERR_PARSE = 11,
  CANDO_ERR_VERSION = 12,
  CANDO_ERR_LINE_SEARCH = 13,
  CANDO_ERR_NUMERICAL = 14,
  CANDO_ERR_NULL_POINTER = 15,
  CANDO_ERR_BUFFER_TOO_SMALL = 16,
  CANDO_ERR_INTERNAL = 99
} cando_error;

typedef enum {
  CANDO_CONVERGED = 0,
  CANDO_MAX_ITERATIONS = 1,
  CANDO_LINE_SEARCH_FAILURE = 2,
  CANDO_NUMERICAL_BREAKDOWN = 3
} cando_solve_status;

typedef struct {
  int dim;
  int n_sensors;
  double rho;
  uint64_t seed;
  double noise;
  /* < 0: protocol default for dim, 0: no cap. */
  int max_degree;
} cando_generator_config;

CANDO_API const char* cando_version(void);
CANDO_API const char* cando_last_error(void);
CANDO_API const char* cando_error_name(int code);

/* dim 2, 100 sensors, rho 0.5, seed 1, no noise, default cap. */
CANDO_API void cando_generator_config_default(cando_generator_config* cfg);

CANDO_API int cando_generate(const cando_generator_config* cfg, cando_instance** out);
CANDO_API int cando_instance_load(const char* path, cando_instance** out);
CANDO_API int cando_instance_from_json(const char* text, cando_instance** out);
CANDO_API int cando_instance_save(const cando_instance* inst, const char* path);
CANDO_API void cando_instance_free(cando_instance* inst);

CANDO_API int cando_instance_dim(const cando_instance* inst, int* out);
CANDO_API int cando_instance_n_sensors(const cando_instance* inst, int* out);
/* Primal and dual dimensions n = N * dim and m = edge count. */
CANDO_API int cando_instance_sizes(const cando_instance* inst, size_t* n, size_t* m);
CANDO_API int cando_instance_has_truth(const cando_instance* inst, int* out);
/* Least-squares objective at x (length n). */
CANDO_API int cando_instance_primal(const cando_instance* inst, const double* x, size_t len,
                                    double* out);

/* solver: "cpras" or "cone". params_json may be NULL for defaults. A solver
   that stops without converging still returns CANDO_OK; inspect the status. */
CANDO_API int cando_solve(const cando_instance* inst, const char* solver, const char* params_json,
                          cando_report** out);
CANDO_API void cando_report_free(cando_report* report);

CANDO_API int cando_report_status(const cando_report* report, int* out);
CANDO_API const char* cando_report_status_name(const cando_report* report);
CANDO_API const char* cando_report_message(const cando_report* report);
CANDO_API int cando_report_iterations(const cando_report* report, int* out);
/* CANDO_ERR_MISSING_TRUTH when the instance had no ground truth. */
CANDO_API int cando_report_rmsd(const cando_report* report, double* out);
CANDO_API int cando_report_wall_time(const cando_report* report, double* out);
CANDO_API int cando_report_final_gamma_sq(const cando_report* report, double* out);
/* Copies up to cap entries of x (or sigma); *len receives the full length.
   CANDO_ERR_BUFFER_TOO_SMALL when cap is short. buf NULL with cap 0 only
   queries the length. */
CANDO_API int cando_report_x(const cando_report* report, double* buf, size_t cap, size_t* len);
CANDO_API int cando_report_sigma(const cando_report* report, double* buf, size_t cap, size_t* len);
CANDO_API int cando_report_write_json(const cando_report* report, const char* path);
CANDO_API int cando_report_write_trace(const cando_report* report, const char* path);
CANDO_API int cando_report_write_positions(const cando_report* report, const char* path);

/* Runs a bench spec file and writes its CSVs. *all_converged (optional) is 1
   when every repetition converged. */
CANDO_API int cando_bench_run(const char* spec_path, int* all_converged);

#ifdef __cplusplus
}
#endif

#endif
