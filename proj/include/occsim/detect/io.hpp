#pragma once

// Text forms of detection output.
//
//   # occsim rois v1
//   roi <id> <x> <y> <w> <h> <cx> <cy> <area> <fill> <tag>
//
//   # occsim keypoints v1
//   kp <x> <y> <scale> <orientation> <d0> ... <d127>

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "occsim/detect/keypoints.hpp"
#include "occsim/detect/regions.hpp"

namespace occ::io {

inline detect::RoiTag roi_tag_from(const std::string& s) {
  using detect::RoiTag;
  for (auto t : {RoiTag::Near, RoiTag::Far, RoiTag::TrafficLight, RoiTag::Rejected})
    if (detect::to_string(t) == s) return t;
  throw InvalidArgument("unknown RoI tag '" + s + "'");
}

inline void write_rois(std::ostream& os, const std::vector<detect::RoI>& rois) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "# occsim rois v1\n";
  for (const auto& r : rois)
    os << "roi " << r.id << ' ' << r.bbox.x0 << ' ' << r.bbox.y0 << ' ' << r.bbox.width() << ' '
       << r.bbox.height() << ' ' << r.centroid.x() << ' ' << r.centroid.y() << ' ' << r.area << ' '
       << r.circumcircle_fill << ' ' << detect::to_string(r.tag) << '\n';
}

inline std::vector<detect::RoI> read_rois(std::istream& is) {
  std::vector<detect::RoI> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kw, tag;
    detect::RoI r;
    int w = 0, h = 0;
    double cx = 0, cy = 0;
    if (!(ls >> kw >> r.id >> r.bbox.x0 >> r.bbox.y0 >> w >> h >> cx >> cy >> r.area >> r.circumcircle_fill >> tag) ||
        kw != "roi")
      throw InvalidArgument("malformed RoI line: " + line);
    r.bbox.x1 = r.bbox.x0 + w;
    r.bbox.y1 = r.bbox.y0 + h;
    r.centroid = Vec2(cx, cy);
    r.tag = roi_tag_from(tag);
    out.push_back(r);
  }
  return out;
}

inline void write_keypoints(std::ostream& os, const std::vector<detect::Keypoint>& kps) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "# occsim keypoints v1\n";
  for (const auto& k : kps) {
    os << "kp " << k.position.x() << ' ' << k.position.y() << ' ' << k.scale << ' ' << k.orientation;
    for (double d : k.descriptor) os << ' ' << d;
    os << '\n';
  }
}

inline std::vector<detect::Keypoint> read_keypoints(std::istream& is) {
  std::vector<detect::Keypoint> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kw;
    double x = 0, y = 0;
    detect::Keypoint k;
    if (!(ls >> kw >> x >> y >> k.scale >> k.orientation) || kw != "kp")
      throw InvalidArgument("malformed keypoint line: " + line);
    k.position = Vec2(x, y);
    for (double d; ls >> d;) k.descriptor.push_back(d);
    out.push_back(std::move(k));
  }
  return out;
}

}  // namespace occ::io
