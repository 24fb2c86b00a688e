/* C interface to the bstlimit library. All functions return a bstl_status;
 * on failure bstl_last_error() describes the cause (per thread). Handles are
 * opaque and owned by the caller, who releases them with the matching
 * *_free function. */
#ifndef BSTLIMIT_H
#define BSTLIMIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(BSTLIMIT_BUILDING_LIBRARY)
#define BSTL_API __attribute__((visibility("default")))
#else
#define BSTL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bstl_status {
  BSTL_OK = 0,
  BSTL_DEPTH_OVERFLOW = 1,
  BSTL_ROOT_HAS_NO_PARENT = 2,
  BSTL_COMMON_PREFIX_EXCEEDS_CAP = 3,
  BSTL_NOT_EXTERNAL = 4,
  BSTL_NOT_IN_TREE = 5,
  BSTL_PARSE_ERROR = 6,
  BSTL_DUPLICATE_KEY = 7,
  BSTL_INVALID_PARAMETER = 8,
  BSTL_TOO_LARGE = 9,
  BSTL_INSUFFICIENT_SAMPLES = 10,
  BSTL_CONFIG_ERROR = 11,
  BSTL_IO_ERROR = 12,
  BSTL_BUFFER_TOO_SMALL = 13,
  BSTL_INTERNAL_ERROR = 99
} bstl_status;

typedef struct bstl_tree bstl_tree;
typedef struct bstl_rng bstl_rng;
typedef struct bstl_limit bstl_limit;

BSTL_API const char* bstl_version(void);
BSTL_API const char* bstl_mixer_id(void);
BSTL_API const char* bstl_status_name(bstl_status status);
/* Message of the last failure on the calling thread ("" if none). */
BSTL_API const char* bstl_last_error(void);

/* ---- trees ------------------------------------------------------------ */

/* New tree holding only the root. */
BSTL_API bstl_status bstl_tree_new(bstl_tree** out);
BSTL_API void bstl_tree_free(bstl_tree* tree);
BSTL_API bstl_status bstl_tree_clone(const bstl_tree* tree, bstl_tree** out);
/* Tree of the BST algorithm on n distinct keys. */
BSTL_API bstl_status bstl_tree_from_keys(const double* keys, size_t n, bstl_tree** out);
BSTL_API bstl_status bstl_tree_load(const char* path, bstl_tree** out);
BSTL_API bstl_status bstl_tree_save(const bstl_tree* tree, const char* path);
/* Parses the trajectory text format (one node word per line, "e" first). */
BSTL_API bstl_status bstl_tree_parse(const char* text, bstl_tree** out);
/* Serializes into buf; *needed receives the size including the terminator. */
BSTL_API bstl_status bstl_tree_write(const bstl_tree* tree, char* buf, size_t cap, size_t* needed);

BSTL_API bstl_status bstl_tree_size(const bstl_tree* tree, uint64_t* out);
BSTL_API bstl_status bstl_tree_height(const bstl_tree* tree, int* out);
BSTL_API bstl_status bstl_tree_fill_level(const bstl_tree* tree, int* out);
/* Node words use "e" for the root and 0/1 strings otherwise. */
BSTL_API bstl_status bstl_tree_insert(bstl_tree* tree, const char* word);
BSTL_API bstl_status bstl_tree_contains(const bstl_tree* tree, const char* word, int* out);
BSTL_API bstl_status bstl_tree_subtree_size(const bstl_tree* tree, const char* word, uint64_t* out);
/* Word of the node inserted at position index (0 = root). */
BSTL_API bstl_status bstl_tree_node(const bstl_tree* tree, uint64_t index, char* buf, size_t cap);
BSTL_API bstl_status bstl_tree_distance(const bstl_tree* tree, const char* u, const char* v, double rho,
                                        double* out);

/* ---- random streams and chains ---------------------------------------- */

BSTL_API bstl_status bstl_rng_new(uint64_t master_seed, uint64_t stream_id, bstl_rng** out);
BSTL_API void bstl_rng_free(bstl_rng* rng);
BSTL_API bstl_status bstl_rng_uniform(bstl_rng* rng, double* out);

/* One step of each chain; the inserted node index is written to *index
 * when index is non-null. */
BSTL_API bstl_status bstl_bst_step(bstl_tree* tree, bstl_rng* rng, uint64_t* index);
/* Digital search tree step with constant left-split probability p. */
BSTL_API bstl_status bstl_dst_step_const(bstl_tree* tree, double p, bstl_rng* rng, uint64_t* index);
BSTL_API bstl_status bstl_tilted_step(bstl_tree* tree, double z, bstl_rng* rng, uint64_t* index);
BSTL_API bstl_status bstl_tilted_probability(const bstl_tree* tree, double z, const char* word, double* out);

/* ---- functionals ------------------------------------------------------ */

typedef struct bstl_functionals {
  uint64_t n;
  uint64_t ipl;
  uint64_t wiener;
  uint64_t sum_sigma_squared;
  int height;
  int fill_level;
  double ipl_centered;
  double ipl_projection;
  double wiener_centered;
  double wiener_projection;
} bstl_functionals;

BSTL_API bstl_status bstl_tree_functionals(const bstl_tree* tree, bstl_functionals* out);
/* Silhouette quantities along the dyadic ray numerator / 2^exponent. */
BSTL_API bstl_status bstl_tree_silhouette(const bstl_tree* tree, uint64_t numerator, int exponent, int* sil,
                                          uint64_t* msil, double* projection);
/* Normalized external-profile generating function at z. */
BSTL_API bstl_status bstl_jabbour_martingale(const bstl_tree* tree, double z, double* out);

/* ---- limit tree ------------------------------------------------------- */

BSTL_API bstl_status bstl_limit_new(uint64_t seed, bstl_limit** out);
BSTL_API void bstl_limit_free(bstl_limit* limit);
BSTL_API bstl_status bstl_limit_xi(const bstl_limit* limit, const char* word, double* out);
BSTL_API bstl_status bstl_limit_mass(const bstl_limit* limit, const char* word, double* out);
BSTL_API bstl_status bstl_limit_rho_norm(const bstl_limit* limit, double rho, int depth, double* out);

typedef struct bstl_limit_values {
  double y, y_tail;
  double z, z_tail;
  double w, w_tail;
} bstl_limit_values;

BSTL_API bstl_status bstl_limit_series(const bstl_limit* limit, int depth, double mass_floor,
                                       bstl_limit_values* out);

typedef struct bstl_constants {
  double rho0;
  double alpha_minus;
  double alpha_plus;
  double alpha0;
  double euler_gamma;
  double kappa;
} bstl_constants;

BSTL_API bstl_status bstl_constants_get(bstl_constants* out);

/* ---- oracles ---------------------------------------------------------- */

/* Called once per shape with its canonical key and exact probability. */
typedef void (*bstl_shape_fn)(const char* shape, uint64_t numerator, uint64_t denominator, void* ctx);

BSTL_API bstl_status bstl_oracle_shapes(uint64_t n, bstl_shape_fn fn, void* ctx);
BSTL_API bstl_status bstl_oracle_wiener(const bstl_tree* tree, uint64_t* out);
BSTL_API bstl_status bstl_oracle_lca_sum(const bstl_tree* tree, uint64_t* out);
BSTL_API bstl_status bstl_oracle_lemma41(int i, int j, double* quadrature, double* harmonic_form);

/* ---- experiments and rendering ---------------------------------------- */

/* Called once per acceptance criterion of a run. */
typedef void (*bstl_criterion_fn)(const char* name, int passed, const char* detail, void* ctx);

/* Runs the experiment described by a JSON config file (or JSON text) and
 * writes its CSV and manifest. *all_passed is 1 when every criterion held. */
BSTL_API bstl_status bstl_experiment_run_file(const char* config_path, bstl_criterion_fn fn, void* ctx,
                                              int* all_passed);
BSTL_API bstl_status bstl_experiment_run_json(const char* config_json, bstl_criterion_fn fn, void* ctx,
                                              int* all_passed);
/* Default config of a named experiment as JSON text. */
BSTL_API bstl_status bstl_experiment_default_config(const char* name, char* buf, size_t cap, size_t* needed);

BSTL_API bstl_status bstl_render_tree(const bstl_tree* tree, double rho, const char* svg_path);
BSTL_API bstl_status bstl_render_silhouette(const bstl_tree* tree, uint64_t grid, const char* svg_path);
/* Writes the pi-digit demo into out_dir; digits_path may be null for the
 * bundled file. *count receives the number of files written. */
BSTL_API bstl_status bstl_render_pi_demo(const char* out_dir, const char* digits_path, size_t* count);

#ifdef __cplusplus
}
#endif

#endif /* BSTLIMIT_H */
