#include "bstlimit/render.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>

#include "bstlimit/chains.hpp"
#include "bstlimit/error.hpp"
#include "bstlimit/functionals.hpp"

#ifndef BSTLIMIT_DATA_DIR
#define BSTLIMIT_DATA_DIR "data"
#endif

namespace bstlimit {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 56.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 44.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double px(double x) { return kLeft + x * (kWidth - kLeft - kRight); }

// Frame with axes and labels; y grows downward in data units [0, y_max]
// when `down` is set, upward otherwise.
std::string frame(const std::string& title, const std::string& x_label, const std::string& y_label,
                  double y_max, bool down) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                  num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    s += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(title) + "</text>\n";
  }
  const double y0 = kTop;
  const double y1 = kHeight - kBottom;
  s += "<g stroke=\"#555\" stroke-width=\"1\">\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(y1) + "\"/>\n";
  const double xa = down ? y0 : y1;
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(xa) + "\" x2=\"" + num(kWidth - kRight) + "\" y2=\"" +
       num(xa) + "\"/>\n";
  s += "</g>\n";
  s += "<g font-size=\"11\" fill=\"#333\">\n";
  s += "<text x=\"" + num(kLeft) + "\" y=\"" + num(y1 + 16) + "\" text-anchor=\"middle\">0</text>\n";
  s += "<text x=\"" + num(kWidth - kRight) + "\" y=\"" + num(y1 + 16) + "\" text-anchor=\"middle\">1</text>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 8) + "\" text-anchor=\"middle\">" +
       escape(x_label) + "</text>\n";
  s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(down ? y0 + 4 : y1) + "\" text-anchor=\"end\">0</text>\n";
  s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(down ? y1 : y0 + 4) + "\" text-anchor=\"end\">" +
       escape([&] {
         char buf[32];
         std::snprintf(buf, sizeof buf, "%.3g", y_max);
         return std::string(buf);
       }()) +
       "</text>\n";
  s += "<text x=\"14\" y=\"" + num((y0 + y1) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
       num((y0 + y1) / 2) + ")\">" + escape(y_label) + "</text>\n";
  s += "</g>\n";
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot write '" + path + "'");
  out << text;
  out.close();
  if (!out) raise(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace

TreeLayout tree_layout(const BinaryTree& x, double rho) {
  if (!(rho > 0.0)) raise(ErrorCode::InvalidParameter, "rho must be positive");
  TreeLayout layout;
  std::vector<double> dist(x.size(), 0.0);
  for (BinaryTree::Index i = 1; i < x.size(); ++i) {
    // Parents precede children in insertion order.
    const NodeId u = x.node(i);
    dist[i] = dist[x.parent_index(i)] + x.edge_weight(u, rho);
    layout.segments.push_back({beta(u), dist[x.parent_index(i)], dist[i]});
    layout.depth_extent = std::max(layout.depth_extent, dist[i]);
  }
  for (BinaryTree::Index i = 0; i < x.size(); ++i) {
    double lo = beta(x.node(i));
    double hi = lo;
    bool any = false;
    for (int dir = 0; dir < 2; ++dir) {
      const auto c = x.child_index(i, dir);
      if (c == BinaryTree::npos) continue;
      any = true;
      lo = std::min(lo, beta(x.node(c)));
      hi = std::max(hi, beta(x.node(c)));
    }
    if (any) layout.connectors.push_back({dist[i], lo, hi});
  }
  return layout;
}

std::string tree_svg(const BinaryTree& x, double rho, const std::string& title) {
  const auto layout = tree_layout(x, rho);
  const double extent = layout.depth_extent > 0.0 ? layout.depth_extent : 1.0;
  const auto py = [&](double d) { return kTop + d / extent * (kHeight - kTop - kBottom); };
  std::string s = frame(title, "beta(u)", "distance from root", extent, true);
  s += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  for (const auto& c : layout.connectors) {
    s += "<line x1=\"" + num(px(c.x0)) + "\" y1=\"" + num(py(c.y)) + "\" x2=\"" + num(px(c.x1)) + "\" y2=\"" +
         num(py(c.y)) + "\"/>\n";
  }
  for (const auto& seg : layout.segments) {
    s += "<line x1=\"" + num(px(seg.x)) + "\" y1=\"" + num(py(seg.y0)) + "\" x2=\"" + num(px(seg.x)) +
         "\" y2=\"" + num(py(seg.y1)) + "\"/>\n";
  }
  s += "</g>\n</svg>\n";
  return s;
}

void render_tree(const BinaryTree& x, double rho, const std::string& svg_path, const std::string& title) {
  write_text(svg_path, tree_svg(x, rho, title));
}

std::vector<double> silhouette_profile(const BinaryTree& x, std::uint64_t grid) {
  if (grid == 0 || !std::has_single_bit(grid) || grid > (std::uint64_t{1} << 30)) {
    raise(ErrorCode::InvalidParameter, "grid must be a power of two <= 2^30");
  }
  const int exponent = std::countr_zero(grid) + 1;
  const double n = static_cast<double>(x.size());
  std::vector<double> values(grid);
  for (std::uint64_t i = 0; i < grid; ++i) {
    values[i] = static_cast<double>(metric_silhouette(x, Ray::dyadic(2 * i + 1, exponent))) / n;
  }
  return values;
}

std::string silhouette_svg(const BinaryTree& x, std::uint64_t grid, const std::string& title) {
  const auto values = silhouette_profile(x, grid);
  double top = *std::max_element(values.begin(), values.end());
  if (top <= 0.0) top = 1.0;
  const auto py = [&](double v) { return kHeight - kBottom - v / top * (kHeight - kTop - kBottom); };
  std::string s = frame(title, "t", "mSil / n", top, false);
  s += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
  const double g = static_cast<double>(grid);
  for (std::uint64_t i = 0; i < grid; ++i) {
    const double y = py(values[i]);
    s += num(px(static_cast<double>(i) / g)) + "," + num(y) + " ";
    s += num(px(static_cast<double>(i + 1) / g)) + "," + num(y) + (i + 1 < grid ? " " : "");
  }
  s += "\"/>\n</svg>\n";
  return s;
}

void render_silhouette(const BinaryTree& x, std::uint64_t grid, const std::string& svg_path,
                       const std::string& title) {
  write_text(svg_path, silhouette_svg(x, grid, title));
}

std::string default_pi_digits_path() { return std::string(BSTLIMIT_DATA_DIR) + "/pi_digits.txt"; }

std::vector<double> pi_keys(const std::string& digits_path, bool odd, std::size_t count) {
  std::ifstream in(digits_path);
  if (!in) raise(ErrorCode::IoError, "cannot read digit file '" + digits_path + "'");
  std::string digits;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    for (const char c : line) {
      if (c >= '0' && c <= '9') digits += c;
    }
  }
  std::vector<double> keys;
  for (std::size_t b = odd ? 0 : 1; keys.size() < count; b += 2) {
    if (10 * (b + 1) > digits.size()) {
      raise(ErrorCode::IoError, "digit file holds too few digits for " + std::to_string(count) + " keys");
    }
    keys.push_back(std::stod(digits.substr(10 * b, 10)) / 1e10);
  }
  return keys;
}

std::vector<std::string> pi_demo(const std::string& out_dir, const std::string& digits_path) {
  const std::string source = digits_path.empty() ? default_pi_digits_path() : digits_path;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::vector<std::string> written;
  for (const bool odd : {true, false}) {
    const auto keys = pi_keys(source, odd, 100);
    const std::string parity = odd ? "odd" : "even";
    for (const std::size_t n : {50, 100}) {
      const BinaryTree x = bst_from_keys(std::span<const double>(keys.data(), n));
      const std::string stem = out_dir + "/pi_" + parity + "_n" + std::to_string(n);
      render_tree(x, 1.0, stem + "_tree.svg", "metric tree, " + parity + " blocks, n=" + std::to_string(n));
      written.push_back(stem + "_tree.svg");
      if (odd) {
        render_silhouette(x, 256, stem + "_silhouette.svg",
                          "metric silhouette, odd blocks, n=" + std::to_string(n));
        written.push_back(stem + "_silhouette.svg");
      }
    }
  }
  return written;
}

}  // namespace bstlimit
