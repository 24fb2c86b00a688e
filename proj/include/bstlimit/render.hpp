#pragma once

#include <string>
#include <vector>

#include "bstlimit/tree.hpp"

namespace bstlimit {

/// Vertical segment at abscissa x spanning depth-distances [y0, y1].
struct Segment {
  double x;
  double y0;
  double y1;
};

/// Horizontal connector at depth-distance y spanning [x0, x1].
struct Connector {
  double y;
  double x0;
  double x1;
};

/// Metric drawing of a tree: one segment per non-root node u at beta(u),
/// from the parent's root distance to u's, in the rho-weighted metric.
struct TreeLayout {
  std::vector<Segment> segments;
  std::vector<Connector> connectors;
  double depth_extent = 0.0;
};

TreeLayout tree_layout(const BinaryTree& x, double rho);

/// SVG text of the layout, root at the top.
std::string tree_svg(const BinaryTree& x, double rho, const std::string& title = "");

/// Writes tree_svg to a file; throws IoError.
void render_tree(const BinaryTree& x, double rho, const std::string& svg_path,
                 const std::string& title = "");

/// mSil(x)(v)/n at the grid midpoints t = (2i+1)/(2 grid), grid a power of two.
std::vector<double> silhouette_profile(const BinaryTree& x, std::uint64_t grid);

std::string silhouette_svg(const BinaryTree& x, std::uint64_t grid, const std::string& title = "");

void render_silhouette(const BinaryTree& x, std::uint64_t grid, const std::string& svg_path,
                       const std::string& title = "");

/// Keys from alternating 10-digit blocks of pi - 3: odd blocks (1st, 3rd, ...)
/// or even blocks (2nd, 4th, ...), each scaled into [0,1).
std::vector<double> pi_keys(const std::string& digits_path, bool odd, std::size_t count);

/// Default location of the bundled digit file.
std::string default_pi_digits_path();

/// Renders the odd and even trees for n = 50 and 100 plus the silhouettes of
/// the odd trees into out_dir. Returns the written paths.
std::vector<std::string> pi_demo(const std::string& out_dir, const std::string& digits_path = "");

}  // namespace bstlimit
