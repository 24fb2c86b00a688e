// Acceptance run: criteria 1-9, one PASS/FAIL line each. Exit status is
// nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "bstlimit/chains.hpp"
#include "bstlimit/experiment.hpp"
#include "bstlimit/functionals.hpp"
#include "bstlimit/limit_tree.hpp"
#include "bstlimit/oracles.hpp"

using namespace bstlimit;

namespace {

struct Check {
  std::string name;
  bool ok;
  std::string detail;
};

struct Criterion {
  int number;
  std::string title;
  std::vector<Check> checks;

  void add(std::string name, bool ok, std::string detail = "") {
    checks.push_back({std::move(name), ok, std::move(detail)});
  }
  bool passed() const {
    for (const auto& c : checks) {
      if (!c.ok) return false;
    }
    return !checks.empty();
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

bool close(double a, double b, double rel = 1e-12) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

template <class F>
double one_step_average(const BinaryTree& x, F f) {
  double total = 0.0;
  const auto ext = x.externals();
  for (const auto& v : ext) {
    BinaryTree y = x;
    y.insert(v);
    total += f(y);
  }
  return total / static_cast<double>(ext.size());
}

// Tallies failures of one named identity across the random sample.
struct Tally {
  std::map<std::string, std::size_t> fails;
  std::map<std::string, double> worst;
  void note(const std::string& name, double a, double b, double rel = 1e-12) {
    const double err = std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
    worst[name] = std::max(worst[name], err);
    fails[name] += close(a, b, rel) ? 0 : 1;
  }
  void note_exact(const std::string& name, std::uint64_t a, std::uint64_t b) {
    worst[name] = std::max(worst[name], a == b ? 0.0 : 1.0);
    fails[name] += a == b ? 0 : 1;
  }
  void report(Criterion& c, std::size_t samples) const {
    for (const auto& [name, f] : fails) {
      c.add(name, f == 0,
            std::to_string(samples - f) + "/" + std::to_string(samples) + " trees, max rel err " +
                fmt(worst.at(name)));
    }
  }
};

Criterion identity_suite() {
  Criterion c{1, "exact identity suite", {}};
  Tally t;
  const std::size_t samples = 1000;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const auto x = testing::random_tree(0xACCE55, s, 1 + (s * 37) % 200);
    t.note_exact("IPL depth sum = subtree-size sum", ipl(x), ipl_via_subtree_sizes(x));
    t.note_exact("Wiener closed form = all-pairs brute force", wiener(x), wiener_bruteforce(x));

    auto psi = [s](NodeId u) { return to_open_unit(keyed_mix(s, u.key())); };
    double lhs = 0.0;
    for (BinaryTree::Index i = 0; i < x.size(); ++i) {
      const NodeId u = x.node(i);
      lhs += psi(u) - psi(u.child(0)) - psi(u.child(1));
    }
    double rhs = psi(NodeId::root());
    for (const auto& u : x.externals()) rhs -= psi(u);
    t.note("summation by parts", lhs, rhs);

    const auto prof = x.profiles();
    std::uint64_t bad = 0;
    for (std::size_t k = 0; k + 1 < prof.external.size(); ++k) {
      const std::uint64_t w_k = k < prof.internal.size() ? prof.internal[k] : 0;
      const std::uint64_t w_k1 = k + 1 < prof.internal.size() ? prof.internal[k + 1] : 0;
      bad += prof.external[k + 1] + w_k1 == 2 * w_k ? 0 : 1;
    }
    t.note_exact("profile identity v(k+1) = 2w(k) - w(k+1)", bad, 0);

    double kraft = 0.0;
    for (const auto& u : x.externals()) kraft += std::ldexp(1.0, -u.depth());
    t.note("Kraft sum over the frontier = 1", kraft, 1.0);

    for (const double z : {0.3, 0.5, 2.0}) {
      const auto [l, r] = yn_identity(x, z);
      t.note("Y_n = Psi_z identity", l, r);
    }
    t.note("M_n = 1 at z = 1/2", jabbour_martingale(x, 0.5), 1.0);
    t.note("M_n = 2 at z = 1", jabbour_martingale(x, 1.0), 2.0);
    for (const double z : {0.3, 2.0}) {
      double total = 0.0;
      for (const auto& u : x.externals()) total += tilted_transition_probability(x, z, u);
      t.note("tilted transition probabilities sum to 1", total, 1.0);
    }
  }
  t.report(c, samples);
  return c;
}

Criterion martingale_suite() {
  Criterion c{2, "one-step martingale suite", {}};
  Tally t;
  const std::size_t samples = 100;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const auto x = testing::random_tree(0x3A7, s, 1 + (s * 13) % 120);
    for (const double z : {0.3, 1.7}) {
      t.note("profile martingale", one_step_average(x, [z](const BinaryTree& y) { return jabbour_martingale(y, z); }),
             jabbour_martingale(x, z));
    }
    t.note("IPL projection", one_step_average(x, [](const BinaryTree& y) { return ipl_projection(y); }),
           ipl_projection(x));
    t.note("Wiener projection", one_step_average(x, [](const BinaryTree& y) { return wiener_projection(y); }),
           wiener_projection(x));
    for (BinaryTree::Index i = 0; i < x.size(); i += 1 + x.size() / 8) {
      const NodeId u = x.node(i);
      t.note("projected mass", one_step_average(x, [u](const BinaryTree& y) { return projected_mass(y, u); }),
             projected_mass(x, u));
    }
    for (std::uint64_t r = 0; r < 4; ++r) {
      const Ray v = Ray::seeded(s * 4 + r);
      t.note("metric silhouette projection",
             one_step_average(x, [&v](const BinaryTree& y) { return msil_projection(y, v); }), msil_projection(x, v));
    }
  }
  t.report(c, samples);
  return c;
}

void add_criteria(Criterion& c, const ExperimentResult& r, const std::function<bool(const std::string&)>& keep) {
  for (const auto& k : r.criteria) {
    if (keep(k.name)) c.add(k.name, k.passed, k.detail);
  }
}

}  // namespace

int main() {
  std::vector<Criterion> all;
  std::map<std::string, std::string> first_csv;
  auto run = [&first_csv](const std::string& name) {
    const auto start = std::chrono::steady_clock::now();
    auto r = run_experiment(default_config(name));
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("  [%s: %zu rows, %.1f s]\n", name.c_str(), r.rows.size(), sec);
    std::fflush(stdout);
    first_csv[name] = to_csv(r.rows);
    return r;
  };

  all.push_back(identity_suite());
  all.push_back(martingale_suite());

  const auto constants_run = run("constants");
  Criterion c3{3, "constants", {}};
  add_criteria(c3, constants_run, [](const std::string& n) { return n.rfind("constants", 0) == 0; });
  all.push_back(c3);
  Criterion c4{4, "beta-log integral identity", {}};
  add_criteria(c4, constants_run, [](const std::string& n) { return n.rfind("constants", 0) != 0; });
  all.push_back(c4);

  const auto any = [](const std::string&) { return true; };
  Criterion c5{5, "distributional checks", {}};
  for (const char* name : {"shape-law", "dst-conditional", "tilted-law"}) add_criteria(c5, run(name), any);
  all.push_back(c5);

  Criterion c6{6, "strong-limit convergence", {}};
  for (const char* name : {"ipl-limit", "wiener-limit", "msil-limit"}) add_criteria(c6, run(name), any);
  all.push_back(c6);

  Criterion c7{7, "phase transition", {}};
  add_criteria(c7, run("phase"), any);
  all.push_back(c7);

  Criterion c8{8, "height and fill sanity band", {}};
  add_criteria(c8, run("height-fill"), any);
  all.push_back(c8);

  // The first run of each experiment was serial; repeat it serially and with
  // four workers.
  Criterion c9{9, "reproducibility", {}};
  for (const auto& name : experiment_names()) {
    auto config = default_config(name);
    const bool serial_again = to_csv(run_experiment(config).rows) == first_csv.at(name);
    config.workers = 4;
    const bool parallel = to_csv(run_experiment(config).rows) == first_csv.at(name);
    c9.add(name + " CSV bytes identical", serial_again && parallel,
           std::string("serial rerun ") + (serial_again ? "same" : "DIFFERENT") + ", 4 workers " +
               (parallel ? "same" : "DIFFERENT"));
  }
  all.push_back(c9);

  bool ok = true;
  std::printf("\n");
  for (const auto& c : all) {
    for (const auto& k : c.checks) {
      std::printf("    %s  %s: %s\n", k.ok ? "ok  " : "FAIL", k.name.c_str(), k.detail.c_str());
    }
    std::printf("%s criterion %d: %s\n", c.passed() ? "PASS" : "FAIL", c.number, c.title.c_str());
    ok = ok && c.passed();
  }
  return ok ? 0 : 1;
}
