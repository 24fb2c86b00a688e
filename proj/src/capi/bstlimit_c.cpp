#include "bstlimit.h"

#include <cstring>
#include <sstream>
#include <string>

#include "bstlimit/chains.hpp"
#include "bstlimit/error.hpp"
#include "bstlimit/experiment.hpp"
#include "bstlimit/functionals.hpp"
#include "bstlimit/limit_tree.hpp"
#include "bstlimit/oracles.hpp"
#include "bstlimit/render.hpp"

using namespace bstlimit;

struct bstl_tree {
  BinaryTree tree;
};

struct bstl_rng {
  RngStream rng;
};

struct bstl_limit {
  LimitTree limit;
};

namespace {

thread_local std::string last_error;

bstl_status fail(bstl_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs f, translating exceptions into status codes.
template <class F>
bstl_status guard(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const Error& e) {
    return fail(static_cast<bstl_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BSTL_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(BSTL_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(BSTL_INTERNAL_ERROR, "unknown failure");
  }
}

bstl_status null_argument() { return fail(BSTL_INVALID_PARAMETER, "null argument"); }

bstl_status copy_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (!buf || cap < text.size() + 1) return fail(BSTL_BUFFER_TOO_SMALL, "buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return BSTL_OK;
}

template <class T>
bstl_status make(T** out, T* value) {
  *out = value;
  return BSTL_OK;
}

bstl_status run_config(const ExperimentConfig& config, bstl_criterion_fn fn, void* ctx, int* all_passed) {
  const auto result = run_and_write(config);
  if (fn) {
    for (const auto& c : result.criteria) fn(c.name.c_str(), c.passed ? 1 : 0, c.detail.c_str(), ctx);
  }
  if (all_passed) *all_passed = result.passed() ? 1 : 0;
  return BSTL_OK;
}

}  // namespace

extern "C" {

const char* bstl_version(void) { return artifact_version(); }

const char* bstl_mixer_id(void) { return RngStream::kMixerId; }

const char* bstl_status_name(bstl_status status) {
  switch (status) {
    case BSTL_OK: return "Ok";
    case BSTL_BUFFER_TOO_SMALL: return "BufferTooSmall";
    case BSTL_INTERNAL_ERROR: return "InternalError";
    default:
      if (status >= BSTL_DEPTH_OVERFLOW && status <= BSTL_IO_ERROR) {
        return to_string(static_cast<ErrorCode>(static_cast<int>(status)));
      }
      return "Unknown";
  }
}

const char* bstl_last_error(void) { return last_error.c_str(); }

bstl_status bstl_tree_new(bstl_tree** out) {
  if (!out) return null_argument();
  return guard([&] { return make(out, new bstl_tree{}); });
}

void bstl_tree_free(bstl_tree* tree) { delete tree; }

bstl_status bstl_tree_clone(const bstl_tree* tree, bstl_tree** out) {
  if (!tree || !out) return null_argument();
  return guard([&] { return make(out, new bstl_tree{tree->tree}); });
}

bstl_status bstl_tree_from_keys(const double* keys, size_t n, bstl_tree** out) {
  if (!keys || !out) return null_argument();
  return guard([&] { return make(out, new bstl_tree{bst_from_keys(std::span<const double>(keys, n))}); });
}

bstl_status bstl_tree_load(const char* path, bstl_tree** out) {
  if (!path || !out) return null_argument();
  return guard([&] { return make(out, new bstl_tree{BinaryTree::load(path)}); });
}

bstl_status bstl_tree_save(const bstl_tree* tree, const char* path) {
  if (!tree || !path) return null_argument();
  return guard([&] {
    tree->tree.save(path);
    return BSTL_OK;
  });
}

bstl_status bstl_tree_parse(const char* text, bstl_tree** out) {
  if (!text || !out) return null_argument();
  return guard([&] {
    std::istringstream in(text);
    return make(out, new bstl_tree{BinaryTree::read(in)});
  });
}

bstl_status bstl_tree_write(const bstl_tree* tree, char* buf, size_t cap, size_t* needed) {
  if (!tree) return null_argument();
  return guard([&] {
    std::ostringstream out;
    tree->tree.write(out);
    return copy_out(out.str(), buf, cap, needed);
  });
}

bstl_status bstl_tree_size(const bstl_tree* tree, uint64_t* out) {
  if (!tree || !out) return null_argument();
  *out = tree->tree.size();
  return BSTL_OK;
}

bstl_status bstl_tree_height(const bstl_tree* tree, int* out) {
  if (!tree || !out) return null_argument();
  *out = tree->tree.height();
  return BSTL_OK;
}

bstl_status bstl_tree_fill_level(const bstl_tree* tree, int* out) {
  if (!tree || !out) return null_argument();
  *out = tree->tree.fill_level();
  return BSTL_OK;
}

bstl_status bstl_tree_insert(bstl_tree* tree, const char* word) {
  if (!tree || !word) return null_argument();
  return guard([&] {
    tree->tree.insert(NodeId::parse(word));
    return BSTL_OK;
  });
}

bstl_status bstl_tree_contains(const bstl_tree* tree, const char* word, int* out) {
  if (!tree || !word || !out) return null_argument();
  return guard([&] {
    *out = tree->tree.contains(NodeId::parse(word)) ? 1 : 0;
    return BSTL_OK;
  });
}

bstl_status bstl_tree_subtree_size(const bstl_tree* tree, const char* word, uint64_t* out) {
  if (!tree || !word || !out) return null_argument();
  return guard([&] {
    *out = tree->tree.subtree_size(NodeId::parse(word));
    return BSTL_OK;
  });
}

bstl_status bstl_tree_node(const bstl_tree* tree, uint64_t index, char* buf, size_t cap) {
  if (!tree) return null_argument();
  if (index >= tree->tree.size()) return fail(BSTL_NOT_IN_TREE, "node index out of range");
  return guard([&] { return copy_out(tree->tree.node(index).to_string(), buf, cap, nullptr); });
}

bstl_status bstl_tree_distance(const bstl_tree* tree, const char* u, const char* v, double rho, double* out) {
  if (!tree || !u || !v || !out) return null_argument();
  return guard([&] {
    *out = tree->tree.distance(NodeId::parse(u), NodeId::parse(v), rho);
    return BSTL_OK;
  });
}

bstl_status bstl_rng_new(uint64_t master_seed, uint64_t stream_id, bstl_rng** out) {
  if (!out) return null_argument();
  return guard([&] { return make(out, new bstl_rng{RngStream(master_seed, stream_id)}); });
}

void bstl_rng_free(bstl_rng* rng) { delete rng; }

bstl_status bstl_rng_uniform(bstl_rng* rng, double* out) {
  if (!rng || !out) return null_argument();
  *out = rng->rng.uniform();
  return BSTL_OK;
}

bstl_status bstl_bst_step(bstl_tree* tree, bstl_rng* rng, uint64_t* index) {
  if (!tree || !rng) return null_argument();
  return guard([&] {
    const auto i = bst_step(tree->tree, rng->rng);
    if (index) *index = i;
    return BSTL_OK;
  });
}

bstl_status bstl_dst_step_const(bstl_tree* tree, double p, bstl_rng* rng, uint64_t* index) {
  if (!tree || !rng) return null_argument();
  return guard([&] {
    const auto i = dst_step(tree->tree, DrivingMeasure::constant(p), rng->rng);
    if (index) *index = i;
    return BSTL_OK;
  });
}

bstl_status bstl_tilted_step(bstl_tree* tree, double z, bstl_rng* rng, uint64_t* index) {
  if (!tree || !rng) return null_argument();
  return guard([&] {
    const auto i = tilted_step(tree->tree, z, rng->rng);
    if (index) *index = i;
    return BSTL_OK;
  });
}

bstl_status bstl_tilted_probability(const bstl_tree* tree, double z, const char* word, double* out) {
  if (!tree || !word || !out) return null_argument();
  return guard([&] {
    *out = tilted_transition_probability(tree->tree, z, NodeId::parse(word));
    return BSTL_OK;
  });
}

bstl_status bstl_tree_functionals(const bstl_tree* tree, bstl_functionals* out) {
  if (!tree || !out) return null_argument();
  return guard([&] {
    const auto& x = tree->tree;
    *out = {x.size(),          ipl(x),          wiener(x),           sum_sigma_squared(x),
            x.height(),        x.fill_level(),  ipl_centered(x),     ipl_projection(x),
            wiener_centered(x), wiener_projection(x)};
    return BSTL_OK;
  });
}

bstl_status bstl_tree_silhouette(const bstl_tree* tree, uint64_t numerator, int exponent, int* sil,
                                 uint64_t* msil, double* projection) {
  if (!tree) return null_argument();
  return guard([&] {
    const Ray v = Ray::dyadic(numerator, exponent);
    if (sil) *sil = silhouette(tree->tree, v);
    if (msil) *msil = metric_silhouette(tree->tree, v);
    if (projection) *projection = msil_projection(tree->tree, v);
    return BSTL_OK;
  });
}

bstl_status bstl_jabbour_martingale(const bstl_tree* tree, double z, double* out) {
  if (!tree || !out) return null_argument();
  return guard([&] {
    *out = jabbour_martingale(tree->tree, z);
    return BSTL_OK;
  });
}

bstl_status bstl_limit_new(uint64_t seed, bstl_limit** out) {
  if (!out) return null_argument();
  return guard([&] { return make(out, new bstl_limit{LimitTree(seed)}); });
}

void bstl_limit_free(bstl_limit* limit) { delete limit; }

bstl_status bstl_limit_xi(const bstl_limit* limit, const char* word, double* out) {
  if (!limit || !word || !out) return null_argument();
  return guard([&] {
    *out = limit->limit.xi(NodeId::parse(word));
    return BSTL_OK;
  });
}

bstl_status bstl_limit_mass(const bstl_limit* limit, const char* word, double* out) {
  if (!limit || !word || !out) return null_argument();
  return guard([&] {
    *out = limit->limit.mass(NodeId::parse(word));
    return BSTL_OK;
  });
}

bstl_status bstl_limit_rho_norm(const bstl_limit* limit, double rho, int depth, double* out) {
  if (!limit || !out) return null_argument();
  return guard([&] {
    *out = rho_norm(limit->limit, rho, depth);
    return BSTL_OK;
  });
}

bstl_status bstl_limit_series(const bstl_limit* limit, int depth, double mass_floor, bstl_limit_values* out) {
  if (!limit || !out) return null_argument();
  return guard([&] {
    const auto t = limit_series(limit->limit, depth, mass_floor);
    *out = {t.y.value, t.y.tail_bound, t.z.value, t.z.tail_bound, t.w.value, t.w.tail_bound};
    return BSTL_OK;
  });
}

bstl_status bstl_constants_get(bstl_constants* out) {
  if (!out) return null_argument();
  return guard([&] {
    const auto c = constants();
    *out = {c.rho0, c.alpha_minus, c.alpha_plus, c.alpha0, c.euler_gamma, kappa()};
    return BSTL_OK;
  });
}

bstl_status bstl_oracle_shapes(uint64_t n, bstl_shape_fn fn, void* ctx) {
  if (!fn) return null_argument();
  return guard([&] {
    const auto law = enumerate_shapes(n);
    for (const auto& [shape, p] : law.probability) {
      fn(shape.c_str(), static_cast<uint64_t>(boost::multiprecision::numerator(p)),
         static_cast<uint64_t>(boost::multiprecision::denominator(p)), ctx);
    }
    return BSTL_OK;
  });
}

bstl_status bstl_oracle_wiener(const bstl_tree* tree, uint64_t* out) {
  if (!tree || !out) return null_argument();
  return guard([&] {
    *out = wiener_bruteforce(tree->tree);
    return BSTL_OK;
  });
}

bstl_status bstl_oracle_lca_sum(const bstl_tree* tree, uint64_t* out) {
  if (!tree || !out) return null_argument();
  return guard([&] {
    *out = lca_double_sum(tree->tree);
    return BSTL_OK;
  });
}

bstl_status bstl_oracle_lemma41(int i, int j, double* quadrature, double* harmonic_form) {
  return guard([&] {
    const auto r = lemma41_integral(i, j);
    if (quadrature) *quadrature = r.quadrature;
    if (harmonic_form) *harmonic_form = r.harmonic_form;
    return BSTL_OK;
  });
}

bstl_status bstl_experiment_run_file(const char* config_path, bstl_criterion_fn fn, void* ctx, int* all_passed) {
  if (!config_path) return null_argument();
  return guard([&] { return run_config(load_config(config_path), fn, ctx, all_passed); });
}

bstl_status bstl_experiment_run_json(const char* config_json, bstl_criterion_fn fn, void* ctx, int* all_passed) {
  if (!config_json) return null_argument();
  return guard([&] { return run_config(parse_config(config_json), fn, ctx, all_passed); });
}

bstl_status bstl_experiment_default_config(const char* name, char* buf, size_t cap, size_t* needed) {
  if (!name) return null_argument();
  return guard([&] { return copy_out(config_to_json(default_config(name)), buf, cap, needed); });
}

bstl_status bstl_render_tree(const bstl_tree* tree, double rho, const char* svg_path) {
  if (!tree || !svg_path) return null_argument();
  return guard([&] {
    render_tree(tree->tree, rho, svg_path);
    return BSTL_OK;
  });
}

bstl_status bstl_render_silhouette(const bstl_tree* tree, uint64_t grid, const char* svg_path) {
  if (!tree || !svg_path) return null_argument();
  return guard([&] {
    render_silhouette(tree->tree, grid, svg_path);
    return BSTL_OK;
  });
}

bstl_status bstl_render_pi_demo(const char* out_dir, const char* digits_path, size_t* count) {
  if (!out_dir) return null_argument();
  return guard([&] {
    const auto files = pi_demo(out_dir, digits_path ? digits_path : "");
    if (count) *count = files.size();
    return BSTL_OK;
  });
}

}  // extern "C"
