// occsim command-line driver.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "occsim/occsim.hpp"

namespace fs = std::filesystem;
using namespace occ;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
};

harness::ScenarioConfig load(const Options& o) {
  harness::ScenarioConfig c = o.config.empty() ? harness::scenario_from(io::Tree{}) : harness::load_scenario(o.config);
  if (o.seed) {
    c.seed = *o.seed;
    c.ber.seed = c.throughput.seed = c.trace.seed = *o.seed;
  }
  return c;
}

std::ofstream open_out(const Options& o, const std::string& name) {
  fs::create_directories(o.out);
  const auto path = (fs::path(o.out) / name).string();
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  std::cout << "wrote " << path << '\n';
  return os;
}

std::string out_path(const Options& o, const std::string& name) {
  fs::create_directories(o.out);
  return (fs::path(o.out) / name).string();
}

// Arrays without a waveform from the config get the toggling beacon.
void bind_waveforms(scene::Scene& sc, double fps) {
  for (auto& a : sc.arrays)
    if (!a.waveform) a.waveform = harness::toggling_waveform(fps);
}

int cmd_ber(const Options& o) {
  auto c = load(o);
  scene::Scene sc = c.scene.empty() ? harness::default_interference_scene(c.camera.fps) : c.scene;
  bind_waveforms(sc, c.camera.fps);
  const auto im = harness::analyse_interference(sc, c.camera, c.detect);
  std::cout << "interference sources " << im.all.size() << ", inside accepted RoIs " << im.leaking.size() << '\n';
  const auto pts = harness::run_ber_sweep(c.ber, im);
  auto os = open_out(o, "ber.csv");
  harness::write_ber_csv(os, pts);
  return 0;
}

int cmd_throughput(const Options& o) {
  const auto c = load(o);
  auto os = open_out(o, "throughput.csv");
  harness::write_throughput_csv(os, harness::run_throughput(c.throughput));
  return 0;
}

int cmd_trace(const Options& o) {
  const auto c = load(o);
  const auto r = harness::run_packet_trace(c.trace);
  std::cout << "packets " << r.packets << ", received " << r.received << '\n';
  auto os = open_out(o, "trace.csv");
  harness::write_trace_csv(os, r);
  return 0;
}

int cmd_detect(const Options& o) {
  const auto c = load(o);
  Rng rng = derive_stream(c.seed, 0);
  scene::Scene sc = c.scene;
  if (sc.empty()) sc = harness::random_detection_scene(rng, c.camera).scene;
  bind_waveforms(sc, c.camera.fps);
  std::vector<Frame> frames;
  for (double t : scene::frame_times(c.camera, 0, 4)) frames.push_back(scene::render(sc, c.camera, t, c.channel, rng));
  for (std::size_t i = 0; i < frames.size(); ++i)
    io::write_pgm(out_path(o, "frame_" + std::to_string(i) + ".pgm"), frames[i].pixels);
  const Frame diff = detect::accumulated_differential(frames);
  io::write_pgm(out_path(o, "differential.pgm"), diff.pixels);
  const auto regions = detect::connected_components(
      detect::dilate(detect::binarize(diff.pixels, c.detect.threshold), c.detect.dilate_radius));
  const auto verdicts = detect::evaluate_regions(regions, c.camera.width, c.camera.height, c.detect.shape);
  const auto rois = detect::rois_from_differential(diff.pixels, c.detect);
  {
    auto os = open_out(o, "rois.txt");
    io::write_rois(os, rois);
  }
  auto os = open_out(o, "regions.csv");
  harness::CsvWriter w(os, "regions", {"id", "x", "y", "width", "height", "area", "fill", "verdict"});
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const auto& v = verdicts[i];
    w.cell(i).cell(v.roi.bbox.x0).cell(v.roi.bbox.y0).cell(v.roi.bbox.width()).cell(v.roi.bbox.height());
    w.cell(v.roi.area).cell(v.roi.circumcircle_fill).cell(std::string(detect::to_string(v.verdict)));
    w.end_row();
  }
  std::cout << "regions " << regions.size() << ", accepted " << rois.size() << '\n';
  return 0;
}

int cmd_range(const Options& o) {
  const auto c = load(o);
  scene::Scene sc = c.scene;
  if (sc.empty()) {
    scene::LedArraySpec a;
    a.id = "front";
    a.world_position = Vec3(0, 0.3, 10.2);
    sc.arrays.push_back(a);
  }
  bind_waveforms(sc, c.camera.fps);
  Rng rng = derive_stream(c.seed, 0);

  std::vector<Frame> frames;
  for (double t : scene::frame_times(c.camera, 0, 4)) frames.push_back(scene::render(sc, c.camera, t, c.channel, rng));
  const auto rois = detect::detect_rois(frames, c.detect);
  const auto pairs = ranging::pair_units(rois);

  // Stereo on the frame where the LEDs are lit.
  const auto [left, right] = scene::render_stereo(sc, c.camera, c.stereo.baseline, 0.0, c.channel, rng);
  const auto disp = ranging::sad_disparity(left.pixels, right.pixels, c.stereo.sad);
  io::write_pgm(out_path(o, "left.pgm"), left.pixels);
  io::write_pgm(out_path(o, "right.pgm"), right.pixels);
  ranging::write_disparity(out_path(o, "disparity.pgm"), out_path(o, "disparity.txt"), disp);

  const double fpx = c.camera.focal_px();
  controller::Controller ctl(c.controller.base_interval, c.controller.temporal_threshold);
  std::vector<controller::VehicleObservation> obs;
  {
    auto os = open_out(o, "ranging.csv");
    harness::CsvWriter w(os, "ranging",
                         {"pair", "centroid_x", "centroid_y", "separation_px", "array_distance", "disparity", "stereo_depth"});
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& a = rois[pairs[i].left];
      const auto& b = rois[pairs[i].right];
      const double sep = sc.arrays.front().left_right_separation;
      const double dist = ranging::inter_vehicle_distance(c.camera.focal_length, c.camera.pixel_size, sep,
                                                          pairs[i].separation_px);
      const auto d = ranging::median_disparity(disp, a.bbox);
      const double z = d && *d > 0 ? ranging::depth(*d, fpx, c.stereo.baseline) : 0.0;
      const double cx = 0.5 * (a.centroid.x() + b.centroid.x());
      w.cell(i).cell(cx).cell(0.5 * (a.centroid.y() + b.centroid.y())).cell(pairs[i].separation_px).cell(dist);
      w.cell(d.value_or(0.0)).cell(z);
      w.end_row();
      obs.push_back({"pair" + std::to_string(i), dist, cx});
    }
  }
  const auto& rec = ctl.step(0.0, obs);
  std::cout << "pairs " << pairs.size() << ", case " << controller::to_string(rec.kind) << ", next interval "
            << rec.interval << " s\n";
  auto os = open_out(o, "policy.csv");
  ctl.write_csv(os);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optical camera communication link simulator"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "scenario INI file");
  app.add_option("--seed", o.seed, "master seed (overrides [run] seed)");
  app.add_option("--out", o.out, "output directory")->capture_default_str();

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Sub subs[] = {
      {"ber", "BER versus SNR for the adaptive and standard receivers", cmd_ber},
      {"throughput", "throughput versus frame arrival rate", cmd_throughput},
      {"trace", "per-second packet reception trace", cmd_trace},
      {"detect-demo", "render a scene, detect RoIs, dump frames", cmd_detect},
      {"range-demo", "stereo and array-separation ranging on a rendered scene", cmd_range},
  };
  const Sub* chosen = nullptr;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->fallthrough();
    sub->callback([&chosen, &s] { chosen = &s; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return chosen->run(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
