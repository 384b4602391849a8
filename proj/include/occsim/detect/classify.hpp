#pragma once

// LED-pattern classification by masked normalized cross-correlation against
// labelled templates. Occluded pixels are excluded from every score.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "occsim/core.hpp"
#include "occsim/image.hpp"

namespace occ::detect {

struct PatternTemplate {
  std::string label;
  Image pixels;
};

struct ClassifyResult {
  std::optional<std::size_t> index;  // empty: erasure
  std::string label;
  double score = 0;
  double confidence = 0;  // best minus second-best score
  bool tie = false;
  std::vector<double> scores;

  bool erasure() const { return !index.has_value(); }
};

/// Zero-mean NCC over pixels where `occluded` is false. Returns nullopt when
/// no pixel is visible or the RoI has no variance there.
inline std::optional<double> masked_ncc(const Image& roi, const Image& tpl, const Mask* occluded) {
  require(roi.same_shape(tpl), "template size must match the RoI");
  double n = 0, sr = 0, st = 0;
  auto visible = [&](int x, int y) { return !occluded || !occluded->get(x, y); };
  for (int y = 0; y < roi.height(); ++y)
    for (int x = 0; x < roi.width(); ++x)
      if (visible(x, y)) {
        n += 1;
        sr += roi(x, y);
        st += tpl(x, y);
      }
  if (n == 0) return std::nullopt;
  const double mr = sr / n, mt = st / n;
  double num = 0, vr = 0, vt = 0;
  for (int y = 0; y < roi.height(); ++y)
    for (int x = 0; x < roi.width(); ++x)
      if (visible(x, y)) {
        const double a = roi(x, y) - mr, b = tpl(x, y) - mt;
        num += a * b;
        vr += a * a;
        vt += b * b;
      }
  if (!(vr > 1e-15 * n)) return std::nullopt;
  if (!(vt > 1e-15 * n)) return 0.0;
  return num / std::sqrt(vr * vt);
}

/// Highest-scoring template; ties go to the lower index.
inline ClassifyResult classify_pattern(const Image& roi, const std::vector<PatternTemplate>& templates,
                                       const Mask* occlusion = nullptr) {
  require(!templates.empty(), "classify_pattern needs at least one template");
  if (occlusion) require(occlusion->width() == roi.width() && occlusion->height() == roi.height(),
                         "occlusion mask size must match the RoI");
  ClassifyResult r;
  double best = -std::numeric_limits<double>::infinity(), second = best;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    const auto s = masked_ncc(roi, templates[i].pixels, occlusion);
    if (!s) return r;  // fully masked or flat RoI
    r.scores.push_back(*s);
    if (*s > best) {
      second = best;
      best = *s;
      r.index = i;
    } else if (*s > second) {
      second = *s;
    }
  }
  r.label = templates[*r.index].label;
  r.score = best;
  r.confidence = templates.size() > 1 ? best - second : best;
  r.tie = templates.size() > 1 && r.confidence == 0;
  return r;
}

}  // namespace occ::detect
