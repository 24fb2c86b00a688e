#include "bstlimit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "bstlimit/chains.hpp"
#include "bstlimit/coupling.hpp"
#include "bstlimit/error.hpp"
#include "bstlimit/functionals.hpp"
#include "bstlimit/limit_tree.hpp"
#include "bstlimit/oracles.hpp"

#ifndef BSTLIMIT_VERSION
#define BSTLIMIT_VERSION "0.0.0"
#endif

namespace bstlimit {

using json = nlohmann::json;

const char* artifact_version() noexcept { return BSTLIMIT_VERSION; }

bool ExperimentResult::passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.passed; });
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"shape-law",    "ipl-limit",       "wiener-limit",
                                              "msil-limit",   "phase",           "constants",
                                              "tilted-law",   "dst-conditional", "height-fill"};
  return names;
}

ExperimentConfig default_config(const std::string& experiment) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end()) {
    raise(ErrorCode::ConfigError, "unknown experiment '" + experiment + "'");
  }
  ExperimentConfig c;
  c.experiment = experiment;
  c.csv_path = experiment + ".csv";
  c.manifest_path = experiment + ".manifest.json";
  const std::vector<std::uint64_t> ladder{1000, 10000, 100000};
  if (experiment == "shape-law") {
    c.n_values = {3, 4};
    c.replicates = 100000;
    c.master_seed = 0x5EED000000000001ULL;
  } else if (experiment == "ipl-limit") {
    c.n_values = ladder;
    c.replicates = 20;
    c.master_seed = 0x5EED000000000002ULL;
  } else if (experiment == "wiener-limit") {
    c.n_values = ladder;
    c.replicates = 20;
    c.master_seed = 0x5EED000000000003ULL;
  } else if (experiment == "msil-limit") {
    c.n_values = ladder;
    c.replicates = 20;
    c.master_seed = 0x5EED000000000004ULL;
  } else if (experiment == "phase") {
    c.replicates = 50;
    c.rho = {1.15, 1.4};
    c.alpha = {0.2, 0.5};
    c.master_seed = 0x5EED000000000005ULL;
  } else if (experiment == "constants") {
    c.replicates = 1;
  } else if (experiment == "tilted-law") {
    c.replicates = 100000;
    c.z = {0.3, 0.7, 2.0};
    c.master_seed = 0x5EED000000000007ULL;
  } else if (experiment == "dst-conditional") {
    c.n_values = {1, 2, 5, 20};
    c.replicates = 10000;
    c.master_seed = 0x5EED000000000008ULL;
  } else if (experiment == "height-fill") {
    c.n_values = {100000};
    c.replicates = 20;
    c.master_seed = 0x5EED000000000009ULL;
  }
  return c;
}

namespace {

[[noreturn]] void config_error(const std::string& what) { raise(ErrorCode::ConfigError, what); }

template <class T>
T get_field(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("field '") + key + "': " + e.what());
  }
}

std::uint64_t get_count(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_number_unsigned()) {
    config_error(std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("config must be a JSON object");
  static const std::vector<std::string> known{
      "schema_version", "experiment", "n_values", "replicates", "master_seed", "truncation_depth",
      "mass_floor",     "rho",        "z",        "alpha",      "ray_grid",    "workers",
      "output"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      config_error("unknown key '" + key + "'");
    }
  }
  if (!doc.contains("schema_version")) config_error("missing 'schema_version'");
  if (!doc.contains("experiment")) config_error("missing 'experiment'");
  const auto version = get_field<int>(doc, "schema_version");
  if (version != kConfigSchemaVersion) {
    config_error("unsupported schema_version " + std::to_string(version));
  }
  ExperimentConfig c = default_config(get_field<std::string>(doc, "experiment"));
  if (doc.contains("n_values")) {
    c.n_values.clear();
    if (!doc["n_values"].is_array()) config_error("'n_values' must be an array");
    for (const auto& v : doc["n_values"]) {
      if (!v.is_number_unsigned()) config_error("'n_values' entries must be positive integers");
      c.n_values.push_back(v.get<std::uint64_t>());
    }
  }
  if (doc.contains("replicates")) c.replicates = get_count(doc, "replicates");
  if (doc.contains("master_seed")) c.master_seed = get_count(doc, "master_seed");
  if (doc.contains("truncation_depth")) c.truncation_depth = get_field<int>(doc, "truncation_depth");
  if (doc.contains("mass_floor")) c.mass_floor = get_field<double>(doc, "mass_floor");
  if (doc.contains("rho")) c.rho = get_field<std::vector<double>>(doc, "rho");
  if (doc.contains("z")) c.z = get_field<std::vector<double>>(doc, "z");
  if (doc.contains("alpha")) c.alpha = get_field<std::vector<double>>(doc, "alpha");
  if (doc.contains("ray_grid")) c.ray_grid = get_count(doc, "ray_grid");
  if (doc.contains("workers")) c.workers = get_count(doc, "workers");
  if (doc.contains("output")) {
    const auto& out = doc["output"];
    if (!out.is_object()) config_error("'output' must be an object");
    for (const auto& [key, value] : out.items()) {
      if (key != "csv" && key != "manifest") config_error("unknown key 'output." + key + "'");
    }
    if (out.contains("csv")) c.csv_path = get_field<std::string>(out, "csv");
    if (out.contains("manifest")) c.manifest_path = get_field<std::string>(out, "manifest");
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot read config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

namespace {

json config_object(const ExperimentConfig& c) {
  return json{{"schema_version", c.schema_version},
              {"experiment", c.experiment},
              {"n_values", c.n_values},
              {"replicates", c.replicates},
              {"master_seed", c.master_seed},
              {"truncation_depth", c.truncation_depth},
              {"mass_floor", c.mass_floor},
              {"rho", c.rho},
              {"z", c.z},
              {"alpha", c.alpha},
              {"ray_grid", c.ray_grid},
              {"workers", c.workers},
              {"output", {{"csv", c.csv_path}, {"manifest", c.manifest_path}}}};
}

}  // namespace

std::string config_to_json(const ExperimentConfig& config) { return config_object(config).dump(2); }

void validate(const ExperimentConfig& c) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
    config_error("unknown experiment '" + c.experiment + "'");
  }
  if (c.replicates < 1) config_error("replicates must be >= 1");
  if (c.workers < 1 || c.workers > 256) config_error("workers must lie in 1..256");
  if (c.truncation_depth < 1 || c.truncation_depth > NodeId::kMaxDepth) {
    config_error("truncation_depth must lie in 1..62");
  }
  if (!(c.mass_floor >= 0.0 && c.mass_floor < 1.0)) config_error("mass_floor must lie in [0,1)");
  for (const auto n : c.n_values) {
    if (n < 1 || n > 10000000) config_error("n_values entries must lie in 1..1e7");
  }
  for (const double r : c.rho) {
    if (!(r >= 1.0) || !std::isfinite(r)) config_error("rho entries must be >= 1");
  }
  for (const double z : c.z) {
    if (!(z > 0.0) || !std::isfinite(z)) config_error("z entries must be positive");
  }
  for (const double a : c.alpha) {
    if (!(a > 0.0 && a < 1.0)) config_error("alpha entries must lie in (0,1)");
  }
  if (c.ray_grid < 1 || !std::has_single_bit(c.ray_grid) || c.ray_grid > (1U << 20)) {
    config_error("ray_grid must be a power of two <= 2^20");
  }
  const auto& e = c.experiment;
  const bool needs_n = e == "shape-law" || e == "ipl-limit" || e == "wiener-limit" ||
                       e == "msil-limit" || e == "dst-conditional" || e == "height-fill";
  if (needs_n && c.n_values.empty()) config_error(e + " needs n_values");
  if (e == "shape-law") {
    for (const auto n : c.n_values) {
      if (n > 8) config_error("shape-law is limited to n <= 8");
    }
  }
  if ((e == "shape-law" || e == "tilted-law" || e == "dst-conditional") && c.replicates < 1000) {
    config_error(e + " needs at least 1000 replicates for its goodness-of-fit tests");
  }
  if (e == "dst-conditional") {
    for (const auto n : c.n_values) {
      if (n > 100000) config_error("dst-conditional is limited to n <= 1e5");
    }
  }
  if (e == "phase") {
    if (c.rho.empty() || c.alpha.empty()) config_error("phase needs rho and alpha lists");
    if (c.truncation_depth < 2) config_error("phase needs truncation_depth >= 2");
  }
  if (e == "tilted-law" && c.z.empty()) config_error("tilted-law needs a z list");
}

namespace {

// Runs f(r) for r = 0..count-1 on up to `workers` threads; results are
// stored by replicate index, so the output does not depend on scheduling.
template <class F>
auto map_replicates(std::uint64_t count, std::uint64_t workers, F f) {
  using R = decltype(f(std::uint64_t{0}));
  std::vector<R> out(count);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::uint64_t r = next.fetch_add(1);
      if (r >= count) return;
      try {
        out[r] = f(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  const std::uint64_t threads = std::min<std::uint64_t>(workers, count);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::vector<std::uint64_t> sorted_ladder(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

struct Runner {
  const ExperimentConfig& cfg;
  ExperimentResult result;

  void row(std::int64_t replicate, std::uint64_t n, std::string quantity, std::string where,
           double value) {
    result.rows.push_back({cfg.experiment, replicate, n, std::move(quantity), std::move(where), value});
  }

  void criterion(std::string name, bool passed, std::string detail,
                 std::map<std::string, double> stats = {}) {
    result.criteria.push_back({std::move(name), passed, std::move(detail), std::move(stats)});
  }

  // Median of a per-replicate quantity along the n ladder must fall strictly.
  void decreasing_criterion(const std::string& name, const std::vector<std::uint64_t>& ladder,
                            const std::vector<double>& medians) {
    bool ok = true;
    std::string detail = "medians";
    std::map<std::string, double> stats;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      detail += " n=" + std::to_string(ladder[i]) + ":" + short_fmt(medians[i]);
      stats["median_n" + std::to_string(ladder[i])] = medians[i];
      if (i > 0 && !(medians[i] < medians[i - 1])) ok = false;
    }
    criterion(name, ok, detail, stats);
  }

  // ---------------------------------------------------------------------
  void shape_law() {
    const auto ladder = sorted_ladder(cfg.n_values);
    const std::uint64_t nmax = ladder.back();
    struct Rep {
      std::vector<std::string> step_shapes;
      std::vector<std::string> key_shapes;
    };
    const auto reps = map_replicates(cfg.replicates, cfg.workers, [&](std::uint64_t r) {
      Rep rep;
      RngStream rng(cfg.master_seed, r);
      BinaryTree x;
      for (std::uint64_t n = 2; n <= nmax; ++n) {
        bst_step(x, rng);
        if (std::binary_search(ladder.begin(), ladder.end(), n)) rep.step_shapes.push_back(shape_key(x));
      }
      if (ladder.front() == 1) rep.step_shapes.insert(rep.step_shapes.begin(), shape_key(BinaryTree{}));
      for (const auto n : ladder) {
        std::vector<double> keys(n);
        for (auto& k : keys) k = rng.uniform_open();
        rep.key_shapes.push_back(shape_key(bst_from_keys(keys)));
      }
      return rep;
    });
    for (std::size_t li = 0; li < ladder.size(); ++li) {
      const auto n = ladder[li];
      const auto law = enumerate_shapes(n);
      std::map<std::string, std::uint64_t> step_counts;
      std::map<std::string, std::uint64_t> key_counts;
      for (const auto& rep : reps) {
        ++step_counts[rep.step_shapes[li]];
        ++key_counts[rep.key_shapes[li]];
      }
      for (const auto& [label, counts] : {std::pair{"step", &step_counts}, std::pair{"keys", &key_counts}}) {
        std::vector<std::uint64_t> observed;
        std::vector<double> probs;
        bool within = true;
        std::uint64_t stray = 0;
        for (const auto& [shape, c] : *counts) {
          if (!law.probability.count(shape)) stray += c;
        }
        for (const auto& [shape, p] : law.probability) {
          const double pd = static_cast<double>(p);
          const auto it = counts->find(shape);
          const std::uint64_t c = it == counts->end() ? 0 : it->second;
          observed.push_back(c);
          probs.push_back(pd);
          within = within && within_binomial_sigma(c, cfg.replicates, pd);
          row(-1, n, std::string("frequency_") + label, shape, static_cast<double>(c) / cfg.replicates);
        }
        const auto gof = chi_square(observed, probs, 0.001);
        row(-1, n, std::string("chi2_p_") + label, "", gof.p_value);
        const bool ok = within && gof.passed && stray == 0;
        criterion("shape-law n=" + std::to_string(n) + " " + label, ok,
                  "per-shape 3 sigma " + std::string(within ? "ok" : "violated") +
                      ", chi2 p=" + short_fmt(gof.p_value),
                  {{"chi2", gof.statistic}, {"p_value", gof.p_value}, {"dof", double(gof.dof)}});
      }
      for (const auto& [shape, p] : law.probability) {
        row(-1, n, "probability_exact", shape, static_cast<double>(p));
      }
    }
  }

  // ---------------------------------------------------------------------
  // ipl-limit and wiener-limit share one coupled realization per replicate.
  void centered_limit(bool wiener_kind) {
    const auto ladder = sorted_ladder(cfg.n_values);
    const std::uint64_t nmax = ladder.back();
    struct Rep {
      double target;
      double tail;
      std::vector<double> centered, projection;
    };
    const auto reps = map_replicates(cfg.replicates, cfg.workers, [&](std::uint64_t r) {
      EtaCoupling c(cfg.master_seed, r, nmax);
      const auto t = limit_series(c, cfg.truncation_depth, cfg.mass_floor);
      Rep rep;
      if (wiener_kind) {
        rep.target = t.w.value;
        rep.tail = t.w.tail_bound;
      } else {
        rep.target = 2.0 * std::numbers::egamma - 4.0 + t.y.value;
        rep.tail = t.y.tail_bound;
      }
      for (const auto n : ladder) {
        const BinaryTree x = n == nmax ? c.tree() : c.tree().prefix(n);
        rep.centered.push_back(wiener_kind ? wiener_centered(x) : ipl_centered(x));
        rep.projection.push_back(wiener_kind ? wiener_projection(x) : ipl_projection(x));
      }
      return rep;
    });
    const std::string stat = wiener_kind ? "wiener_centered" : "ipl_centered";
    const std::string target = wiener_kind ? "w_hat" : "ipl_target";
    std::vector<double> medians;
    for (std::size_t li = 0; li < ladder.size(); ++li) {
      std::vector<double> errs;
      for (std::size_t r = 0; r < reps.size(); ++r) {
        const auto& rep = reps[r];
        const auto ri = static_cast<std::int64_t>(r);
        row(ri, ladder[li], stat, "", rep.centered[li]);
        row(ri, ladder[li], wiener_kind ? "wiener_projection" : "ipl_projection", "", rep.projection[li]);
        row(ri, ladder[li], "abs_error", "", std::abs(rep.centered[li] - rep.target));
        errs.push_back(std::abs(rep.centered[li] - rep.target));
      }
      medians.push_back(median(errs));
      row(-1, ladder[li], "median_abs_error", "", medians.back());
    }
    for (std::size_t r = 0; r < reps.size(); ++r) {
      row(static_cast<std::int64_t>(r), nmax, target, "K=" + std::to_string(cfg.truncation_depth), reps[r].target);
      row(static_cast<std::int64_t>(r), nmax, "tail_estimate", "", reps[r].tail);
    }
    const double bound = wiener_kind ? 0.2 : 0.1;
    const std::string base = cfg.experiment;
    criterion(base + " median error < " + short_fmt(bound) + " at n=" + std::to_string(nmax),
              medians.back() < bound, "median |error| = " + short_fmt(medians.back()),
              {{"median_abs_error", medians.back()}});
    decreasing_criterion(base + " median error strictly decreasing", ladder, medians);
  }

  // ---------------------------------------------------------------------
  void msil_limit() {
    const auto ladder = sorted_ladder(cfg.n_values);
    const std::uint64_t nmax = ladder.back();
    const auto rays = dyadic_grid(cfg.ray_grid);
    const auto reps = map_replicates(cfg.replicates, cfg.workers, [&](std::uint64_t r) {
      EtaCoupling c(cfg.master_seed, r, nmax);
      std::vector<double> limit(rays.size());
      for (std::size_t i = 0; i < rays.size(); ++i) {
        limit[i] = sigma_potential(c, rays[i], cfg.truncation_depth).value;
      }
      std::vector<double> sup(ladder.size(), 0.0);
      for (std::size_t li = 0; li < ladder.size(); ++li) {
        const BinaryTree x = ladder[li] == nmax ? c.tree() : c.tree().prefix(ladder[li]);
        const double n = static_cast<double>(x.size());
        for (std::size_t i = 0; i < rays.size(); ++i) {
          const double v = static_cast<double>(metric_silhouette(x, rays[i])) / n;
          sup[li] = std::max(sup[li], std::abs(v - limit[i]));
        }
      }
      return sup;
    });
    std::vector<double> medians;
    for (std::size_t li = 0; li < ladder.size(); ++li) {
      std::vector<double> col;
      for (std::size_t r = 0; r < reps.size(); ++r) {
        row(static_cast<std::int64_t>(r), ladder[li], "sup_msil_error",
            "grid=" + std::to_string(cfg.ray_grid), reps[r][li]);
        col.push_back(reps[r][li]);
      }
      medians.push_back(median(col));
      row(-1, ladder[li], "median_sup_msil_error", "grid=" + std::to_string(cfg.ray_grid), medians.back());
    }
    decreasing_criterion("msil-limit median sup error strictly decreasing", ladder, medians);
  }

  // ---------------------------------------------------------------------
  void phase() {
    const int k_hi = cfg.truncation_depth;
    const int k_lo = k_hi / 2;
    const double rho0 = constants().rho0;
    const double alpha0 = constants().alpha0;
    struct Rep {
      std::vector<double> level_ratio, norm;
      std::vector<double> q_lo, q_hi, bound;
    };
    const auto reps = map_replicates(cfg.replicates, cfg.workers, [&](std::uint64_t r) {
      const LimitTree lt(keyed_mix(cfg.master_seed, r));
      const auto lm = level_maxima(lt, k_hi);
      Rep rep;
      for (const double rho : cfg.rho) {
        rep.level_ratio.push_back(std::pow(rho, k_hi - k_lo) * lm.value[k_hi] / lm.value[k_lo]);
        double norm = 0.0;
        for (int k = 1; k <= k_hi; ++k) norm += std::pow(rho, k) * lm.value[k];
        rep.norm.push_back(norm);
      }
      const auto pairs_lo = heavy_split_pairs(lt, k_lo);
      const auto pairs_hi = heavy_split_pairs(lt, k_hi);
      for (const double a : cfg.alpha) {
        rep.q_lo.push_back(holder_quotient(lt, a, pairs_lo, k_lo));
        rep.q_hi.push_back(holder_quotient(lt, a, pairs_hi, k_hi));
        const double base = std::pow(2.0, a);
        double norm = 0.0;
        for (int k = 1; k <= k_hi; ++k) norm += std::pow(base, k) * lm.value[k];
        rep.bound.push_back(2.0 * norm / (base - 1.0));
      }
      return rep;
    });
    for (std::size_t i = 0; i < cfg.rho.size(); ++i) {
      const std::string where = "rho=" + short_fmt(cfg.rho[i]);
      std::vector<double> ratios;
      for (std::size_t r = 0; r < reps.size(); ++r) {
        row(static_cast<std::int64_t>(r), 0, "level_term_ratio", where, reps[r].level_ratio[i]);
        row(static_cast<std::int64_t>(r), 0, "rho_norm", where, reps[r].norm[i]);
        ratios.push_back(reps[r].level_ratio[i]);
      }
      const double med = median(ratios);
      row(-1, 0, "median_level_term_ratio", where, med);
      const std::string levels = "k=" + std::to_string(k_hi) + " vs k=" + std::to_string(k_lo);
      if (cfg.rho[i] < rho0) {
        criterion("phase " + where + " level term decays", med < 0.2,
                  levels + " median ratio " + short_fmt(med) + " (need < 0.2)", {{"median_ratio", med}});
      } else if (cfg.rho[i] > rho0) {
        criterion("phase " + where + " level term grows", med > 5.0,
                  levels + " median ratio " + short_fmt(med) + " (need > 5)", {{"median_ratio", med}});
      }
    }
    for (std::size_t i = 0; i < cfg.alpha.size(); ++i) {
      const std::string where = "alpha=" + short_fmt(cfg.alpha[i]);
      std::vector<double> ratios;
      bool bounded = true;
      for (std::size_t r = 0; r < reps.size(); ++r) {
        const auto ri = static_cast<std::int64_t>(r);
        row(ri, 0, "holder_quotient_K" + std::to_string(k_lo), where, reps[r].q_lo[i]);
        row(ri, 0, "holder_quotient_K" + std::to_string(k_hi), where, reps[r].q_hi[i]);
        ratios.push_back(reps[r].q_hi[i] / reps[r].q_lo[i]);
        bounded = bounded && reps[r].q_hi[i] <= reps[r].bound[i] * (1.0 + 1e-12);
      }
      const double med = median(ratios);
      row(-1, 0, "median_holder_ratio", where, med);
      if (cfg.alpha[i] < alpha0) {
        criterion("phase " + where + " holder quotient stable in K", med <= 1.05 && bounded,
                  "median Q(K=" + std::to_string(k_hi) + ")/Q(K=" + std::to_string(k_lo) + ") " +
                      short_fmt(med) + " (need <= 1.05), norm bound " + (bounded ? "holds" : "violated"),
                  {{"median_ratio", med}});
      } else if (cfg.alpha[i] > alpha0) {
        criterion("phase " + where + " holder quotient grows with K", med >= 2.0,
                  "median Q(K=" + std::to_string(k_hi) + ")/Q(K=" + std::to_string(k_lo) + ") " +
                      short_fmt(med) + " (need >= 2)",
                  {{"median_ratio", med}});
      }
    }
  }

  // ---------------------------------------------------------------------
  void constants_experiment() {
    const auto start = std::chrono::steady_clock::now();
    const Constants k = constants();
    const double kap = kappa();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row(-1, 0, "rho0", "", k.rho0);
    row(-1, 0, "alpha_minus", "", k.alpha_minus);
    row(-1, 0, "alpha_plus", "", k.alpha_plus);
    row(-1, 0, "alpha0", "", k.alpha0);
    row(-1, 0, "euler_gamma", "", k.euler_gamma);
    row(-1, 0, "kappa", "", kap);
    const double gap = 2.0 * std::numbers::e / k.alpha_plus - k.rho0;
    const double envelope = branching_envelope(std::log(k.rho0)).m_tilde;
    row(-1, 0, "two_e_over_alpha_plus_minus_rho0", "", gap);
    row(-1, 0, "m_tilde_at_log_rho0", "", envelope);
    const bool values_ok = std::abs(k.rho0 - 1.26107) <= 1e-5 && std::abs(k.alpha_minus - 0.373) <= 1e-3 &&
                           std::abs(k.alpha_plus - 4.311) <= 1e-3 && std::abs(k.alpha0 - 0.33464) <= 1e-5;
    criterion("constants match published values", values_ok,
              "rho0=" + fmt(k.rho0) + " alpha-=" + fmt(k.alpha_minus) + " alpha+=" + fmt(k.alpha_plus) +
                  " alpha0=" + fmt(k.alpha0),
              {{"rho0", k.rho0}, {"alpha_minus", k.alpha_minus}, {"alpha_plus", k.alpha_plus},
               {"alpha0", k.alpha0}});
    criterion("constants 2e/alpha+ = rho0", std::abs(gap) <= 1e-9, "residual " + fmt(gap), {{"residual", gap}});
    criterion("constants envelope at ln rho0 equals 1", std::abs(envelope - 1.0) <= 1e-9,
              "m~(ln rho0) = " + fmt(envelope), {{"value", envelope}});
    criterion("constants runtime < 1 s", seconds < 1.0, short_fmt(seconds) + " s", {{"seconds", seconds}});

    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= 20; ++j) {
        const auto l = lemma41_integral(i, j);
        worst = std::max(worst, std::abs(l.quadrature - l.harmonic_form));
      }
    }
    row(-1, 0, "lemma41_max_abs_error", "i:0..20 j:0..20", worst);
    criterion("beta-log integral quadrature max error < 1e-8", worst < 1e-8, "max |error| " + short_fmt(worst),
              {{"max_abs_error", worst}});
  }

  // ---------------------------------------------------------------------
  static std::vector<std::pair<std::string, BinaryTree>> tilted_trees() {
    auto make = [](std::initializer_list<const char*> words) {
      BinaryTree x;
      for (const char* w : words) x.insert(NodeId::parse(w));
      return x;
    };
    return {{"T1", make({"0"})}, {"T2", make({"0", "1", "10"})}, {"T3", make({"0", "00", "000"})}};
  }

  void tilted_law() {
    const auto trees = tilted_trees();
    // Outcome index = position of the inserted node in the tree's canonical
    // frontier order.
    std::vector<std::vector<std::vector<NodeId>>> frontiers;
    for (std::size_t zi = 0; zi < cfg.z.size(); ++zi) {
      frontiers.emplace_back();
      for (const auto& [name, x] : trees) {
        std::vector<NodeId> f;
        for (const auto& [u, p] : tilted_transition_law(x, cfg.z[zi])) f.push_back(u);
        frontiers.back().push_back(std::move(f));
      }
    }
    const auto reps = map_replicates(cfg.replicates, cfg.workers, [&](std::uint64_t r) {
      RngStream rng(cfg.master_seed, r);
      std::vector<std::uint8_t> outcome;
      for (std::size_t zi = 0; zi < cfg.z.size(); ++zi) {
        for (std::size_t ti = 0; ti < trees.size(); ++ti) {
          BinaryTree x = trees[ti].second;
          const NodeId u = x.node(tilted_step(x, cfg.z[zi], rng));
          const auto& f = frontiers[zi][ti];
          outcome.push_back(static_cast<std::uint8_t>(std::find(f.begin(), f.end(), u) - f.begin()));
        }
      }
      return outcome;
    });
    std::size_t slot = 0;
    for (std::size_t zi = 0; zi < cfg.z.size(); ++zi) {
      for (std::size_t ti = 0; ti < trees.size(); ++ti, ++slot) {
        const auto law = tilted_transition_law(trees[ti].second, cfg.z[zi]);
        std::vector<std::uint64_t> counts(law.size(), 0);
        for (const auto& rep : reps) ++counts[rep[slot]];
        std::vector<double> probs;
        bool within = true;
        const std::string tag = "z=" + short_fmt(cfg.z[zi]) + ";tree=" + trees[ti].first;
        for (std::size_t k = 0; k < law.size(); ++k) {
          probs.push_back(law[k].second);
          within = within && within_binomial_sigma(counts[k], cfg.replicates, law[k].second);
          const std::string where = tag + ";node=" + law[k].first.to_string();
          row(-1, trees[ti].second.size(), "probability_exact", where, law[k].second);
          row(-1, trees[ti].second.size(), "frequency", where,
              static_cast<double>(counts[k]) / static_cast<double>(cfg.replicates));
        }
        const auto gof = chi_square(counts, probs, 0.001);
        row(-1, trees[ti].second.size(), "chi2_p", tag, gof.p_value);
        criterion("tilted-law " + tag, within && gof.passed,
                  "per-node 3 sigma " + std::string(within ? "ok" : "violated") + ", chi2 p=" +
                      short_fmt(gof.p_value),
                  {{"chi2", gof.statistic}, {"p_value", gof.p_value}});
      }
    }
  }

  // ---------------------------------------------------------------------
  void dst_conditional() {
    const auto ladder = sorted_ladder(cfg.n_values);
    const std::uint64_t nmax = ladder.back();
    struct Rep {
      std::vector<double> indicator, mass;
      std::vector<std::uint64_t> left_size;
      double xi_root, xi_left;
    };
    const auto reps = map_replicates(cfg.replicates, cfg.workers, [&](std::uint64_t r) {
      EtaCoupling c(cfg.master_seed, r, nmax + 1);
      Rep rep;
      for (const auto n : ladder) {
        // Leftmost external node of X_n and whether step n+1 fills it.
        BinaryTree::Index i = 0;
        NodeId left = NodeId::root().child(0);
        for (;;) {
          const auto ch = c.tree().child_index(i, 0);
          if (ch == BinaryTree::npos || ch >= n) break;
          i = ch;
          left = c.tree().node(i).child(0);
        }
        rep.indicator.push_back(c.tree().node(n) == left ? 1.0 : 0.0);
        rep.mass.push_back(c.mass(left));
        // sigma(X_n, (0)): nodes among the first n that sit in the left subtree.
        std::uint64_t s = 0;
        for (BinaryTree::Index j = 1; j < n; ++j) s += c.tree().node(j).step(0) == 0 ? 1 : 0;
        rep.left_size.push_back(s);
      }
      rep.xi_root = c.xi(NodeId::root());
      rep.xi_left = c.xi(NodeId::root().child(0));
      return rep;
    });
    const double count = static_cast<double>(reps.size());
    for (std::size_t li = 0; li < ladder.size(); ++li) {
      const auto n = ladder[li];
      double mean = 0.0, mean_ind = 0.0, mean_mass = 0.0;
      for (const auto& rep : reps) {
        mean += rep.indicator[li] - rep.mass[li];
        mean_ind += rep.indicator[li];
        mean_mass += rep.mass[li];
      }
      mean /= count;
      mean_ind /= count;
      mean_mass /= count;
      double var = 0.0;
      for (const auto& rep : reps) {
        const double d = rep.indicator[li] - rep.mass[li] - mean;
        var += d * d;
      }
      var /= count - 1.0;
      const double zscore = var > 0.0 ? mean / std::sqrt(var / count) : 0.0;
      row(-1, n, "leftmost_frequency", "", mean_ind);
      row(-1, n, "leftmost_mean_mass", "", mean_mass);
      row(-1, n, "leftmost_z", "", zscore);
      criterion("dst-conditional leftmost node n=" + std::to_string(n), std::abs(zscore) <= 3.0,
                "frequency " + short_fmt(mean_ind) + " vs mean mass " + short_fmt(mean_mass) + ", z=" +
                    short_fmt(zscore),
                {{"z", zscore}});

      if (n >= 2) {
        // sigma(X_n,(0)) given xi_root is Bin(n-1, xi_root); pool the
        // conditional pmfs into expected counts.
        std::vector<std::uint64_t> observed(n, 0);
        std::vector<double> expected(n, 0.0);
        for (const auto& rep : reps) {
          ++observed[rep.left_size[li]];
          const double p = rep.xi_root;
          const double log_p = std::log(p), log_q = std::log1p(-p);
          for (std::uint64_t s = 0; s < n; ++s) {
            const double log_choose = std::lgamma(double(n)) - std::lgamma(double(s) + 1.0) -
                                      std::lgamma(double(n - s));
            expected[s] += std::exp(log_choose + double(s) * log_p + double(n - 1 - s) * log_q);
          }
        }
        for (auto& e : expected) e /= count;
        const auto gof = chi_square(observed, expected, 0.0027);
        row(-1, n, "binomial_split_chi2_p", "e", gof.p_value);
        criterion("dst-conditional binomial split n=" + std::to_string(n), gof.passed,
                  "chi2 p=" + short_fmt(gof.p_value), {{"chi2", gof.statistic}, {"p_value", gof.p_value}});
      }
    }
    std::vector<double> xs;
    double mx = 0.0, my = 0.0;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const auto ri = static_cast<std::int64_t>(r);
      row(ri, nmax + 1, "xi", "e", reps[r].xi_root);
      row(ri, nmax + 1, "xi", "0", reps[r].xi_left);
      xs.push_back(reps[r].xi_root);
      mx += reps[r].xi_root;
      my += reps[r].xi_left;
    }
    mx /= count;
    my /= count;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (const auto& rep : reps) {
      sxy += (rep.xi_root - mx) * (rep.xi_left - my);
      sxx += (rep.xi_root - mx) * (rep.xi_root - mx);
      syy += (rep.xi_left - my) * (rep.xi_left - my);
    }
    const double corr = sxy / std::sqrt(sxx * syy);
    const auto ks = ks_uniform(xs, 0.01);
    row(-1, nmax + 1, "xi_ks_p", "e", ks.p_value);
    row(-1, nmax + 1, "xi_corr", "e|0", corr);
    criterion("dst-conditional recovered xi uniform (KS 1%)", ks.passed,
              "D=" + short_fmt(ks.statistic) + " p=" + short_fmt(ks.p_value),
              {{"D", ks.statistic}, {"p_value", ks.p_value}});
    criterion("dst-conditional |corr(xi_e, xi_0)| < 0.05", std::abs(corr) < 0.05, "corr " + short_fmt(corr),
              {{"corr", corr}});
  }

  // ---------------------------------------------------------------------
  void height_fill() {
    const auto ladder = sorted_ladder(cfg.n_values);
    const std::uint64_t nmax = ladder.back();
    const auto reps = map_replicates(cfg.replicates, cfg.workers, [&](std::uint64_t r) {
      RngStream rng(cfg.master_seed, r);
      BinaryTree x;
      std::vector<std::pair<int, int>> hf;
      if (ladder.front() == 1) hf.emplace_back(x.height(), x.fill_level());
      for (std::uint64_t n = 2; n <= nmax; ++n) {
        bst_step(x, rng);
        if (std::binary_search(ladder.begin(), ladder.end(), n)) hf.emplace_back(x.height(), x.fill_level());
      }
      return hf;
    });
    std::vector<double> h_med, f_med;
    for (std::size_t li = 0; li < ladder.size(); ++li) {
      const double ln = std::log(static_cast<double>(ladder[li]));
      std::vector<double> hs, fs;
      for (std::size_t r = 0; r < reps.size(); ++r) {
        const auto ri = static_cast<std::int64_t>(r);
        row(ri, ladder[li], "height", "", reps[r][li].first);
        row(ri, ladder[li], "fill_level", "", reps[r][li].second);
        hs.push_back(reps[r][li].first / ln);
        fs.push_back(reps[r][li].second / ln);
      }
      h_med.push_back(median(hs));
      f_med.push_back(median(fs));
      row(-1, ladder[li], "median_height_over_log_n", "", h_med.back());
      row(-1, ladder[li], "median_fill_over_log_n", "", f_med.back());
    }
    const std::string at = " at n=" + std::to_string(nmax);
    criterion("height-fill median H/ln n in [3.0, 5.5]" + at, h_med.back() >= 3.0 && h_med.back() <= 5.5,
              "median " + short_fmt(h_med.back()), {{"median", h_med.back()}});
    criterion("height-fill median F/ln n in [0.15, 0.65]" + at, f_med.back() >= 0.15 && f_med.back() <= 0.65,
              "median " + short_fmt(f_med.back()), {{"median", f_med.back()}});
  }
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  Runner run{config, {}};
  const auto& e = config.experiment;
  if (e == "shape-law") run.shape_law();
  else if (e == "ipl-limit") run.centered_limit(false);
  else if (e == "wiener-limit") run.centered_limit(true);
  else if (e == "msil-limit") run.msil_limit();
  else if (e == "phase") run.phase();
  else if (e == "constants") run.constants_experiment();
  else if (e == "tilted-law") run.tilted_law();
  else if (e == "dst-conditional") run.dst_conditional();
  else if (e == "height-fill") run.height_fill();
  return std::move(run.result);
}

std::string to_csv(const std::vector<CsvRow>& rows) {
  std::string out = "experiment,replicate,n,quantity,node_or_ray,value\n";
  for (const auto& r : rows) {
    out += r.experiment;
    out += ',';
    out += std::to_string(r.replicate);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += r.quantity;
    out += ',';
    out += r.node_or_ray;
    out += ',';
    out += fmt(r.value);
    out += '\n';
  }
  return out;
}

std::string manifest_json(const ExperimentConfig& config, const ExperimentResult& result,
                          double wall_seconds) {
  json criteria = json::array();
  for (const auto& c : result.criteria) {
    criteria.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"statistics", c.statistics}});
  }
  const json doc{{"config", config_object(config)},
                 {"artifact_version", artifact_version()},
                 {"mixer", RngStream::kMixerId},
                 {"wall_seconds", wall_seconds},
                 {"rows", result.rows.size()},
                 {"passed", result.passed()},
                 {"criteria", criteria}};
  return doc.dump(2) + "\n";
}

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::error_code ec;
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot write '" + path + "'");
  out << text;
  out.close();
  if (!out) raise(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace

ExperimentResult run_and_write(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  auto result = run_experiment(config);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!config.csv_path.empty()) write_file(config.csv_path, to_csv(result.rows));
  if (!config.manifest_path.empty()) write_file(config.manifest_path, manifest_json(config, result, seconds));
  return result;
}

}  // namespace bstlimit
