#pragma once

#include <string>

#include "sentipipe/core.hpp"

namespace sentipipe {

struct SvgOptions {
  int width = 720;
  int height = 260;
};

/// Line plot of an aggregated curve on a fixed [0,1] score axis, with the
/// ad's sentimental moments drawn as shaded bands behind the line.
std::string render_curve_svg(const AggregateCurve& curve, const AdSpec& ad, const SvgOptions& options = {});

}  // namespace sentipipe
