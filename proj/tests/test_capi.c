/* C API exercised from plain C against the shared library. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "cando/cando.h"

static int failures = 0;

#define EXPECT(cond)                                            \
  do {                                                          \
    if (!(cond)) {                                              \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                               \
    }                                                           \
  } while (0)

static const char* kLine =
    "{\"version\": \"cando-snl-instance/1\", \"dim\": 1, \"N\": 1, \"anchors\": [[0.0], [1.0]],"
    " \"edges_h\": [], \"edges_e\": [[0, 0, 0.3], [0, 1, 0.7]], \"truth\": [[0.3]]}";

static void test_errors(void) {
  cando_instance* inst = NULL;
  EXPECT(cando_generate(NULL, &inst) == CANDO_ERR_NULL_POINTER);
  EXPECT(strlen(cando_last_error()) > 0);
  EXPECT(cando_instance_from_json("{not json", &inst) == CANDO_ERR_PARSE);
  EXPECT(inst == NULL);
  EXPECT(cando_instance_load("/nonexistent/instance.json", &inst) == CANDO_ERR_IO);
  EXPECT(strcmp(cando_error_name(CANDO_ERR_SIZE_GUARD), "SizeGuard") == 0);
  EXPECT(strcmp(cando_error_name(CANDO_OK), "OK") == 0);

  cando_generator_config cfg;
  cando_generator_config_default(&cfg);
  EXPECT(cfg.dim == 2 && cfg.n_sensors == 100 && cfg.rho == 0.5 && cfg.seed == 1);
  cfg.dim = 7;
  EXPECT(cando_generate(&cfg, &inst) == CANDO_ERR_INVALID_ARGUMENT);
  cando_instance_free(NULL);
  cando_report_free(NULL);
}

static void test_line(void) {
  cando_instance* inst = NULL;
  EXPECT(cando_instance_from_json(kLine, &inst) == CANDO_OK);
  size_t n = 0, m = 0;
  EXPECT(cando_instance_sizes(inst, &n, &m) == CANDO_OK);
  EXPECT(n == 1 && m == 2);
  int truth = 0;
  EXPECT(cando_instance_has_truth(inst, &truth) == CANDO_OK && truth == 1);
  double f = -1.0;
  const double x_true = 0.3;
  EXPECT(cando_instance_primal(inst, &x_true, 1, &f) == CANDO_OK && fabs(f) < 1e-14);
  EXPECT(cando_instance_primal(inst, &x_true, 2, &f) == CANDO_ERR_DIMENSION_MISMATCH);

  cando_report* rep = NULL;
  EXPECT(cando_solve(inst, "simplex", NULL, &rep) != CANDO_OK);
  EXPECT(cando_solve(inst, "cpras", "{\"bta\": 1}", &rep) == CANDO_ERR_PARSE);
  EXPECT(cando_solve(inst, "cpras", NULL, &rep) == CANDO_OK);
  int status = -1, iters = -1;
  EXPECT(cando_report_status(rep, &status) == CANDO_OK && status == CANDO_CONVERGED);
  EXPECT(strcmp(cando_report_status_name(rep), "Converged") == 0);
  EXPECT(cando_report_iterations(rep, &iters) == CANDO_OK && iters > 0);
  double rmsd = 1.0, gamma = 1.0, t = -1.0;
  EXPECT(cando_report_rmsd(rep, &rmsd) == CANDO_OK && rmsd <= 1e-5);
  EXPECT(cando_report_final_gamma_sq(rep, &gamma) == CANDO_OK && gamma < 1e-10);
  EXPECT(cando_report_wall_time(rep, &t) == CANDO_OK && t >= 0.0);

  size_t len = 0;
  EXPECT(cando_report_x(rep, NULL, 0, &len) == CANDO_OK && len == 1);
  double x = 0.0;
  double s1 = 0.0;
  EXPECT(cando_report_sigma(rep, &s1, 1, &len) == CANDO_ERR_BUFFER_TOO_SMALL && len == 2);
  EXPECT(cando_report_x(rep, &x, 1, &len) == CANDO_OK && fabs(x - 0.3) < 1e-5);
  double sigma[2];
  EXPECT(cando_report_sigma(rep, sigma, 2, &len) == CANDO_OK && len == 2);
  EXPECT(cando_report_write_json(rep, "/nonexistent/r.json") == CANDO_ERR_IO);
  cando_report_free(rep);

  EXPECT(cando_solve(inst, "cone", NULL, &rep) == CANDO_OK);
  EXPECT(cando_report_x(rep, &x, 1, &len) == CANDO_OK && fabs(x - 0.3) < 1e-4);
  cando_report_free(rep);
  cando_instance_free(inst);
}

static void test_generate_and_roundtrip(void) {
  cando_generator_config cfg;
  cando_generator_config_default(&cfg);
  cfg.n_sensors = 10;
  cfg.rho = 0.8;
  cfg.seed = 3;
  cando_instance* inst = NULL;
  EXPECT(cando_generate(&cfg, &inst) == CANDO_OK);
  int dim = 0, ns = 0;
  EXPECT(cando_instance_dim(inst, &dim) == CANDO_OK && dim == 2);
  EXPECT(cando_instance_n_sensors(inst, &ns) == CANDO_OK && ns == 10);
  const char* path = "cando_capi_instance.json";
  EXPECT(cando_instance_save(inst, path) == CANDO_OK);
  cando_instance* back = NULL;
  EXPECT(cando_instance_load(path, &back) == CANDO_OK);
  size_t n1, m1, n2, m2;
  cando_instance_sizes(inst, &n1, &m1);
  cando_instance_sizes(back, &n2, &m2);
  EXPECT(n1 == n2 && m1 == m2);

  cando_report *r1 = NULL, *r2 = NULL;
  EXPECT(cando_solve(inst, "cpras", NULL, &r1) == CANDO_OK);
  EXPECT(cando_solve(back, "cpras", NULL, &r2) == CANDO_OK);
  double x1[20], x2[20];
  size_t len;
  EXPECT(cando_report_x(r1, x1, 20, &len) == CANDO_OK && len == 20);
  EXPECT(cando_report_x(r2, x2, 20, &len) == CANDO_OK);
  EXPECT(memcmp(x1, x2, sizeof x1) == 0);
  EXPECT(cando_report_write_json(r1, "cando_capi_report.json") == CANDO_OK);
  EXPECT(cando_report_write_trace(r1, "cando_capi_trace.csv") == CANDO_OK);
  EXPECT(cando_report_write_positions(r1, "cando_capi_positions.csv") == CANDO_OK);
  cando_report_free(r1);
  cando_report_free(r2);
  cando_instance_free(inst);
  cando_instance_free(back);
  remove(path);
  remove("cando_capi_report.json");
  remove("cando_capi_trace.csv");
  remove("cando_capi_positions.csv");

  cando_instance* big = NULL;
  cfg.n_sensors = 150;
  EXPECT(cando_generate(&cfg, &big) == CANDO_OK);
  cando_report* rep = NULL;
  EXPECT(cando_solve(big, "cone", NULL, &rep) == CANDO_ERR_SIZE_GUARD);
  EXPECT(rep == NULL);
  cando_instance_free(big);
}

static void test_bench(void) {
  FILE* f = fopen("cando_capi_bench.json", "w");
  fputs("{\"runs\": [{\"n_sensors\": 4, \"rho\": 1.5, \"seeds\": [1, 2]}],"
        " \"aggregate_csv\": \"cando_capi_bench.csv\", \"detail_csv\": \"cando_capi_detail.csv\"}",
        f);
  fclose(f);
  int all = 0;
  EXPECT(cando_bench_run("cando_capi_bench.json", &all) == CANDO_OK && all == 1);
  EXPECT(cando_bench_run("/nonexistent/spec.json", &all) == CANDO_ERR_IO);
  remove("cando_capi_bench.json");
  remove("cando_capi_bench.csv");
  remove("cando_capi_detail.csv");
}

int main(void) {
  EXPECT(strlen(cando_version()) > 0);
  test_errors();
  test_line();
  test_generate_and_roundtrip();
  test_bench();
  printf("%s (%d failures)\n", failures == 0 ? "ok" : "FAILED", failures);
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
