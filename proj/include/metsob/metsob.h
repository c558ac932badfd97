/* C interface to the metsob library.
 *
 * Objects are opaque handles created by ms_*_create / ms_*_load / ms_*_generate
 * and released by the matching ms_*_free. Every fallible call returns an
 * ms_status; on failure ms_last_error() describes the problem (per thread).
 * Strings returned through char** outputs are JSON documents owned by the
 * caller and released with ms_string_free.
 */
#ifndef METSOB_H
#define METSOB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MS_API __declspec(dllexport)
#else
#define MS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ms_status {
  MS_OK = 0,
  MS_ERR_INVALID_ARGUMENT = 1,
  MS_ERR_NO_SUCH_POINT = 2,
  MS_ERR_INSUFFICIENT_GEOMETRY = 3,
  MS_ERR_UNRESOLVABLE_SCALE = 4,
  MS_ERR_NOT_CONNECTED = 5,
  MS_ERR_DEGENERATE_METRIC = 6,
  MS_ERR_HYPOTHESIS_FAILED = 7,
  MS_ERR_RADIUS_BELOW_RESOLUTION = 8,
  MS_ERR_EMPTY_PATCH = 9,
  MS_ERR_ZERO_DISTANCE = 10,
  MS_ERR_SUPERCRITICAL_TRACE = 11,
  MS_ERR_PRECONDITION_FAILED = 12,
  MS_ERR_NO_ADMISSIBLE_CURVE = 13,
  MS_ERR_IO = 14,
  MS_ERR_PARSE = 15,
  MS_ERR_INTERNAL = 16
} ms_status;

typedef enum ms_region { MS_INTERIOR = 0, MS_BOUNDARY = 1 } ms_region;
typedef enum ms_besov_form { MS_BESOV_GKS = 0, MS_BESOV_BP = 1, MS_BESOV_QUADRATURE = 2 } ms_besov_form;
typedef enum ms_extension_mode { MS_EXTEND_BESOV = 0, MS_EXTEND_LP = 1 } ms_extension_mode;

typedef struct ms_space ms_space;
typedef struct ms_field ms_field;
typedef struct ms_cover ms_cover;

/* ---- general ---- */
MS_API const char* ms_version(void);
MS_API const char* ms_last_error(void);
MS_API const char* ms_status_name(ms_status s);
MS_API void ms_string_free(char* s);
/* n <= 0 restores the default thread count. */
MS_API ms_status ms_set_threads(int n);

/* ---- spaces ---- */
/* kind: square | cusp | weighted_square | weighted_disc | sharpness_disc.
 * boundary_resolution = 0 uses resolution; n = 0 uses ceil(2/eps). */
MS_API ms_status ms_space_generate(const char* kind, int resolution, int boundary_resolution, double eps, int n,
                                   ms_space** out);
/* dmat_path may be NULL. */
MS_API ms_status ms_space_load(const char* path, const char* dmat_path, ms_space** out);
MS_API ms_status ms_space_save(const ms_space* space, const char* path);
/* coords has n*dim entries; regions holds ms_region values. */
MS_API ms_status ms_space_from_points(int dim, size_t n, const double* coords, const int* regions,
                                      const double* weights, ms_space** out);
MS_API void ms_space_free(ms_space* space);
MS_API ms_status ms_space_count(const ms_space* space, int region, size_t* out);
/* Global id of the region's local index. */
MS_API ms_status ms_space_global_id(const ms_space* space, int region, size_t local_index, size_t* out);
MS_API ms_status ms_space_info(const ms_space* space, char** json);
/* Open ball around point `center_id` (or around coords when center_id == SIZE_MAX).
 * Writes at most `capacity` ids in increasing order; *count receives the full size. */
MS_API ms_status ms_space_ball_members(const ms_space* space, size_t center_id, const double* coords, double radius,
                                       int region, size_t* ids, size_t capacity, size_t* count);
MS_API ms_status ms_space_ball_mass(const ms_space* space, size_t center_id, double radius, int region, double* out);
MS_API ms_status ms_space_mass_exponents(const ms_space* space, int region, char** json);
MS_API ms_status ms_space_codim_bounds(const ms_space* space, char** json);
MS_API ms_status ms_space_shell_mass(const ms_space* space, double rho, double* out);

/* ---- fields ---- */
MS_API ms_status ms_field_create(const ms_space* space, int region, const double* values, size_t n, ms_field** out);
MS_API ms_status ms_field_load(const ms_space* space, int region, const char* path, ms_field** out);
MS_API ms_status ms_field_save(const ms_field* field, const char* path);
/* family: fourier | jump | cone | power | noise. */
MS_API ms_status ms_field_random(const ms_space* space, int region, const char* family, uint64_t seed,
                                 ms_field** out);
/* The pointer stays valid until the field is freed. */
MS_API ms_status ms_field_values(const ms_field* field, const double** values, size_t* n);
MS_API ms_status ms_field_region(const ms_field* field, int* region);
MS_API void ms_field_free(ms_field* field);

/* ---- functionals ---- */
MS_API ms_status ms_lp_norm(const ms_space* space, const ms_field* f, double p, double* out);
/* q may be INFINITY; R = 0 selects twice the diameter of the field's region. */
MS_API ms_status ms_besov_norm(const ms_space* space, const ms_field* f, double alpha, double p, double q, double R,
                               int form, double* seminorm, double* norm);
MS_API ms_status ms_hajlasz_gradient(const ms_space* space, const ms_field* u, double alpha, ms_field** out);
MS_API ms_status ms_lip_field(const ms_space* space, const ms_field* u, double radius, ms_field** out);
MS_API ms_status ms_frac_maximal(const ms_space* space, const ms_field* f, double alpha, double p, ms_field** out);
MS_API ms_status ms_inequality_suite(const ms_space* space, const ms_field* const* corpus, size_t count,
                                     char** json);
/* a is row-major J x K. columns needs room for K entries. */
MS_API ms_status ms_select_small_row(const double* a, size_t rows, size_t cols, double k_bound, double eps,
                                     size_t min_card, size_t* j0, size_t* columns, size_t* n_columns);

/* ---- trace ---- */
/* R = 0 selects twice the interior diameter. trace_out may be NULL. */
MS_API ms_status ms_trace(const ms_space* space, const ms_field* u, double p, int k_max, double R, char** json,
                          ms_field** trace_out);
MS_API ms_status ms_trace_besov(const ms_space* space, const ms_field* u, const ms_field* g, double p, double theta,
                                char** json);
/* Weight log(scale/t)^exponent clipped below at 1; scale = 0 selects 2 diam. */
MS_API ms_status ms_weighted_trace(const ms_space* space, const ms_field* u, const ms_field* g, double p,
                                   double exponent, double scale, double theta, char** json);
MS_API ms_status ms_detect_divergence(const ms_space* space, const ms_field* u, double eps, double R, char** json);

/* ---- Whitney covers ---- */
MS_API ms_status ms_cover_build(const ms_space* space, ms_cover** out);
MS_API ms_status ms_cover_load(const ms_space* space, const char* path, ms_cover** out);
MS_API ms_status ms_cover_save(const ms_cover* cover, const char* path);
MS_API ms_status ms_cover_info(const ms_cover* cover, char** json);
/* overlap_limit = 0 accepts the bound recorded in the cover. */
MS_API ms_status ms_cover_check(const ms_space* space, const ms_cover* cover, size_t overlap_limit, char** json);
MS_API void ms_cover_free(ms_cover* cover);

/* ---- extension ---- */
/* theta < 0 skips the regime check of the Lp mode. F_out may be NULL. */
MS_API ms_status ms_extend(const ms_space* space, const ms_cover* cover, const ms_field* f, int mode, double p,
                           int k_max, double theta, ms_field** F_out, char** json);
MS_API ms_status ms_extension_gradient_report(const ms_space* space, const ms_cover* cover, const ms_field* f,
                                              double p, double vartheta, char** json);
MS_API ms_status ms_roundtrip_error(const ms_space* space, const ms_cover* cover, const ms_field* f, double p,
                                    int mode, double* out);

/* ---- experiments and frozen constants ---- */
/* Path of the constants file: $METSOB_CONSTANTS or the installed default. */
MS_API ms_status ms_constants_path(char** out);
/* config: {"experiment": "E1", "resolutions": [...], "p", "eps", "n", "seed", "fields", "out_dir"};
 * missing keys take the experiment defaults. Writes report.json and tables.csv
 * when out_dir is set. constants_path may be NULL (default path; missing file
 * skips frozen comparisons). */
MS_API ms_status ms_experiment_run(const char* config_json, const char* constants_path, int* passed, char** report);
/* config: {"seed", "square_resolution", ...}; NULL uses the defaults. */
MS_API ms_status ms_freeze(const char* path, const char* config_json, char** json);
/* Runs acceptance criterion id (1..9). */
MS_API ms_status ms_criterion_run(int id, const char* constants_path, int* passed, char** json);

#ifdef __cplusplus
}
#endif

#endif
