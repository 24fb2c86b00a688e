// bstlab: command-line front end over the bstlimit C API.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bstlimit.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCriterion = 1;
constexpr int kExitError = 2;

struct Failure {
  int code;
};

void check(bstl_status s) {
  if (s == BSTL_OK) return;
  std::fprintf(stderr, "bstlab: %s: %s\n", bstl_status_name(s), bstl_last_error());
  throw Failure{kExitError};
}

// RAII holders for the opaque handles.
struct Tree {
  bstl_tree* p = nullptr;
  ~Tree() { bstl_tree_free(p); }
};
struct Rng {
  bstl_rng* p = nullptr;
  ~Rng() { bstl_rng_free(p); }
};
struct Limit {
  bstl_limit* p = nullptr;
  ~Limit() { bstl_limit_free(p); }
};

void print_tree(const bstl_tree* t) {
  size_t needed = 0;
  bstl_tree_write(t, nullptr, 0, &needed);
  std::vector<char> buf(needed);
  check(bstl_tree_write(t, buf.data(), buf.size(), &needed));
  std::fputs(buf.data(), stdout);
}

void print_value(const char* key, double v) { std::printf("%s=%.17g\n", key, v); }
void print_count(const char* key, unsigned long long v) { std::printf("%s=%llu\n", key, v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bstlab: binary search tree limit laboratory"};
  app.set_version_flag("--version", std::string(bstl_version()));
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a tree chain and write its trajectory");
  std::string chain;
  std::uint64_t sim_n = 10, sim_seed = 0, sim_stream = 0;
  double sim_z = 1.0, sim_split = 0.5;
  std::string sim_out;
  simulate->add_option("chain", chain, "bst, dst or tilted")->required()->check(CLI::IsMember({"bst", "dst", "tilted"}));
  simulate->add_option("--n", sim_n, "Final tree size")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{10000000}));
  simulate->add_option("--seed", sim_seed, "Master seed");
  simulate->add_option("--stream", sim_stream, "Stream id");
  simulate->add_option("--z", sim_z, "Tilt parameter (tilted chain)");
  simulate->add_option("--split-const", sim_split, "Constant left-split probability (dst chain)");
  simulate->add_option("--out", sim_out, "Trajectory file (default: stdout)");

  // functionals
  auto* functionals = app.add_subcommand("functionals", "Report tree functionals of a trajectory");
  std::string fn_in;
  bool fn_all = false;
  std::vector<double> fn_z;
  functionals->add_option("--in", fn_in, "Trajectory file")->required();
  functionals->add_flag("--all", fn_all, "Report every functional");
  functionals->add_option("--z", fn_z, "Evaluate the profile martingale at these z");

  // limit
  auto* limit = app.add_subcommand("limit", "Query a seeded limit tree");
  std::string limit_what;
  std::uint64_t limit_seed = 0;
  std::string limit_node = "e";
  double limit_rho = 1.0;
  int limit_depth = 40;
  double limit_floor = 1e-6;
  limit->add_option("what", limit_what, "mass, norm, series or constants")
      ->required()
      ->check(CLI::IsMember({"mass", "norm", "series", "constants"}));
  limit->add_option("--seed", limit_seed, "Limit tree seed");
  limit->add_option("--node", limit_node, "Node word (mass)");
  limit->add_option("--rho", limit_rho, "Weight base (norm)");
  limit->add_option("--depth", limit_depth, "Truncation depth");
  limit->add_option("--mass-floor", limit_floor, "Mass floor (series)");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Brute-force references");
  std::string oracle_what, oracle_in;
  std::uint64_t oracle_n = 3;
  int oracle_i = -1, oracle_j = -1;
  oracle->add_option("what", oracle_what, "shapes, wiener or lemma41")
      ->required()
      ->check(CLI::IsMember({"shapes", "wiener", "lemma41"}));
  oracle->add_option("--n", oracle_n, "Size (shapes)");
  oracle->add_option("--in", oracle_in, "Trajectory file (wiener)");
  oracle->add_option("--i", oracle_i, "First exponent (lemma41; default: whole grid)");
  oracle->add_option("--j", oracle_j, "Second exponent (lemma41)");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a configured experiment");
  std::string exp_config, exp_default;
  experiment->add_option("--config", exp_config, "JSON config file");
  experiment->add_option("--print-default", exp_default, "Print the default config of an experiment");

  // render
  auto* render = app.add_subcommand("render", "Write SVG renderings");
  std::string render_what, render_in, render_out, render_dir = "pi-demo", render_digits;
  double render_rho = 1.0;
  std::uint64_t render_grid = 256;
  render->add_option("what", render_what, "tree, silhouette or pi-demo")
      ->required()
      ->check(CLI::IsMember({"tree", "silhouette", "pi-demo"}));
  render->add_option("--in", render_in, "Trajectory file");
  render->add_option("--out", render_out, "SVG path");
  render->add_option("--rho", render_rho, "Metric weight base");
  render->add_option("--grid", render_grid, "Ray grid size (power of two)");
  render->add_option("--out-dir", render_dir, "Output directory (pi-demo)");
  render->add_option("--digits", render_digits, "Digit file (pi-demo; default: bundled)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (simulate->parsed()) {
      Tree t;
      Rng rng;
      check(bstl_tree_new(&t.p));
      check(bstl_rng_new(sim_seed, sim_stream, &rng.p));
      for (std::uint64_t k = 1; k < sim_n; ++k) {
        if (chain == "bst") check(bstl_bst_step(t.p, rng.p, nullptr));
        else if (chain == "dst") check(bstl_dst_step_const(t.p, sim_split, rng.p, nullptr));
        else check(bstl_tilted_step(t.p, sim_z, rng.p, nullptr));
      }
      if (sim_out.empty()) print_tree(t.p);
      else check(bstl_tree_save(t.p, sim_out.c_str()));
    } else if (functionals->parsed()) {
      Tree t;
      check(bstl_tree_load(fn_in.c_str(), &t.p));
      bstl_functionals f;
      check(bstl_tree_functionals(t.p, &f));
      print_count("n", f.n);
      print_count("ipl", f.ipl);
      print_count("wiener", f.wiener);
      print_count("height", static_cast<unsigned long long>(f.height));
      print_count("fill_level", static_cast<unsigned long long>(f.fill_level));
      if (fn_all) {
        print_count("sum_sigma_squared", f.sum_sigma_squared);
        print_value("ipl_centered", f.ipl_centered);
        print_value("ipl_projection", f.ipl_projection);
        print_value("wiener_centered", f.wiener_centered);
        print_value("wiener_projection", f.wiener_projection);
        if (fn_z.empty()) fn_z = {0.5, 1.0};
      }
      for (const double z : fn_z) {
        double m = 0.0;
        check(bstl_jabbour_martingale(t.p, z, &m));
        std::printf("profile_martingale[z=%g]=%.17g\n", z, m);
      }
    } else if (limit->parsed()) {
      if (limit_what == "constants") {
        bstl_constants c;
        check(bstl_constants_get(&c));
        print_value("rho0", c.rho0);
        print_value("alpha_minus", c.alpha_minus);
        print_value("alpha_plus", c.alpha_plus);
        print_value("alpha0", c.alpha0);
        print_value("euler_gamma", c.euler_gamma);
        print_value("kappa", c.kappa);
      } else {
        Limit l;
        check(bstl_limit_new(limit_seed, &l.p));
        if (limit_what == "mass") {
          double m = 0.0, xi = 0.0;
          check(bstl_limit_mass(l.p, limit_node.c_str(), &m));
          check(bstl_limit_xi(l.p, limit_node.c_str(), &xi));
          print_value("mass", m);
          print_value("xi", xi);
        } else if (limit_what == "norm") {
          double v = 0.0;
          check(bstl_limit_rho_norm(l.p, limit_rho, limit_depth, &v));
          print_value("rho_norm", v);
        } else {
          bstl_limit_values v;
          check(bstl_limit_series(l.p, limit_depth, limit_floor, &v));
          print_value("y", v.y);
          print_value("y_tail", v.y_tail);
          print_value("z", v.z);
          print_value("z_tail", v.z_tail);
          print_value("w", v.w);
          print_value("w_tail", v.w_tail);
        }
      }
    } else if (oracle->parsed()) {
      if (oracle_what == "shapes") {
        check(bstl_oracle_shapes(
            oracle_n,
            [](const char* shape, uint64_t num, uint64_t den, void*) {
              std::printf("%s %llu/%llu\n", shape, static_cast<unsigned long long>(num),
                          static_cast<unsigned long long>(den));
            },
            nullptr));
      } else if (oracle_what == "wiener") {
        if (oracle_in.empty()) {
          std::fprintf(stderr, "bstlab: oracle wiener needs --in\n");
          return kExitError;
        }
        Tree t;
        check(bstl_tree_load(oracle_in.c_str(), &t.p));
        std::uint64_t w = 0;
        check(bstl_oracle_wiener(t.p, &w));
        print_count("wiener_bruteforce", w);
      } else {
        double worst = 0.0;
        const int i0 = oracle_i < 0 ? 0 : oracle_i, i1 = oracle_i < 0 ? 20 : oracle_i;
        const int j0 = oracle_j < 0 ? 0 : oracle_j, j1 = oracle_j < 0 ? 20 : oracle_j;
        for (int i = i0; i <= i1; ++i) {
          for (int j = j0; j <= j1; ++j) {
            double q = 0.0, h = 0.0;
            check(bstl_oracle_lemma41(i, j, &q, &h));
            std::printf("%d %d %.17g %.17g\n", i, j, q, h);
            worst = std::max(worst, std::abs(q - h));
          }
        }
        print_value("max_abs_error", worst);
      }
    } else if (experiment->parsed()) {
      if (!exp_default.empty()) {
        size_t needed = 0;
        bstl_experiment_default_config(exp_default.c_str(), nullptr, 0, &needed);
        std::vector<char> buf(needed ? needed : 1);
        check(bstl_experiment_default_config(exp_default.c_str(), buf.data(), buf.size(), &needed));
        std::printf("%s\n", buf.data());
        return kExitOk;
      }
      if (exp_config.empty()) {
        std::fprintf(stderr, "bstlab: experiment needs --config or --print-default\n");
        return kExitError;
      }
      int passed = 0;
      check(bstl_experiment_run_file(
          exp_config.c_str(),
          [](const char* name, int ok, const char* detail, void*) {
            std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail);
          },
          nullptr, &passed));
      return passed ? kExitOk : kExitCriterion;
    } else if (render->parsed()) {
      if (render_what == "pi-demo") {
        size_t count = 0;
        check(bstl_render_pi_demo(render_dir.c_str(), render_digits.empty() ? nullptr : render_digits.c_str(),
                                  &count));
        std::printf("wrote %zu files to %s\n", count, render_dir.c_str());
      } else {
        if (render_in.empty() || render_out.empty()) {
          std::fprintf(stderr, "bstlab: render %s needs --in and --out\n", render_what.c_str());
          return kExitError;
        }
        Tree t;
        check(bstl_tree_load(render_in.c_str(), &t.p));
        if (render_what == "tree") check(bstl_render_tree(t.p, render_rho, render_out.c_str()));
        else check(bstl_render_silhouette(t.p, render_grid, render_out.c_str()));
      }
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitOk;
}
