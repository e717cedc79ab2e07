#pragma once

#include <string>
#include <utility>
#include <vector>

#include "htsne/types.hpp"

namespace htsne {

struct SvgStyle {
  int width = 800;
  int height = 800;
  int margin = 24;
  /// Dot radius in pixels; 0 picks one from the point count.
  double radius = 0.0;
  double opacity = 0.5;
  bool scale_bar = true;
  std::string title;
};

/// Scatter plot with one circle per point, grouped into one <g> per label and
/// coloured categorically. Same aspect ratio on both axes, with a scale bar
/// in embedding units. Output is a pure function of the inputs.
std::string emit_svg(const Embedding& emb, const Labels& labels, const SvgStyle& style = {});

/// The colour assigned to a label, as "#rrggbb". Negative labels are grey.
std::string label_color(int label);

/// Stacked line charts sharing one x axis, one panel per series.
std::string emit_line_chart(const std::vector<double>& x,
                            const std::vector<std::pair<std::string, std::vector<double>>>& series,
                            const std::string& x_label, const std::string& title = {});

}  // namespace htsne
