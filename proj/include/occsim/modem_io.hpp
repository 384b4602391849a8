#pragma once

// Line-oriented text forms for golden files.
//
// Waveform:
//   # occsim waveform v1
//   scheme <name>
//   slot_duration <s>
//   pulse_rate <hz>
//   bit_rate <bps>
//   phase <cycles>
//   idle_level <level>
//   slots <n>
//   <i> <freq_a> <level_a> <phase_a> [<freq_b> <level_b> <phase_b>]    (n lines)
//
// Demod result:
//   # occsim demod v1
//   sync_found <0|1>
//   complete <0|1>
//   frames_consumed <n>
//   unclear_frames <n>
//   erasures <n>
//   bits <0/1 string, '-' when empty>

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "occsim/modem.hpp"

namespace occ::io {

inline std::string bits_to_string(const Bits& b) {
  std::string s;
  s.reserve(b.size());
  for (auto v : b) s.push_back(v ? '1' : '0');
  return s;
}

inline Bits bits_from_string(const std::string& s) {
  Bits b;
  for (char c : s) {
    if (c == '0' || c == '1') b.push_back(c == '1');
    else throw InvalidArgument("bit strings contain only '0' and '1'");
  }
  return b;
}

inline void write_waveform(std::ostream& os, const modem::LedWaveform& wf) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "# occsim waveform v1\n";
  os << "scheme " << modem::to_string(wf.scheme) << '\n';
  os << "slot_duration " << wf.slot_duration << '\n';
  os << "pulse_rate " << wf.pulse_rate << '\n';
  os << "bit_rate " << wf.bit_rate << '\n';
  os << "phase " << wf.phase << '\n';
  os << "idle_level " << wf.idle_level << '\n';
  os << "slots " << wf.slots() << '\n';
  const bool two = !wf.group_b.empty();
  for (std::size_t i = 0; i < wf.slots(); ++i) {
    const auto& a = wf.group_a[i];
    os << i << ' ' << a.frequency_hz << ' ' << a.level << ' ' << a.phase;
    if (two) {
      const auto& b = wf.group_b[i];
      os << ' ' << b.frequency_hz << ' ' << b.level << ' ' << b.phase;
    }
    os << '\n';
  }
}

namespace detail {

inline std::string next_content_line(std::istream& is) {
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    return line;
  }
  throw InvalidArgument("unexpected end of input");
}

template <class T>
T keyed(std::istream& is, const std::string& key) {
  std::istringstream ls(next_content_line(is));
  std::string k;
  T v{};
  if (!(ls >> k) || k != key || !(ls >> v)) throw InvalidArgument("expected '" + key + " <value>'");
  return v;
}

}  // namespace detail

inline modem::LedWaveform read_waveform(std::istream& is) {
  modem::LedWaveform wf;
  wf.scheme = modem::scheme_from_string(detail::keyed<std::string>(is, "scheme"));
  wf.slot_duration = detail::keyed<double>(is, "slot_duration");
  wf.pulse_rate = detail::keyed<double>(is, "pulse_rate");
  wf.bit_rate = detail::keyed<double>(is, "bit_rate");
  wf.phase = detail::keyed<double>(is, "phase");
  wf.idle_level = detail::keyed<double>(is, "idle_level");
  const auto n = detail::keyed<std::size_t>(is, "slots");
  for (std::size_t i = 0; i < n; ++i) {
    std::istringstream ls(detail::next_content_line(is));
    std::size_t idx = 0;
    modem::Drive a;
    if (!(ls >> idx >> a.frequency_hz >> a.level >> a.phase) || idx != i)
      throw InvalidArgument("malformed waveform slot line " + std::to_string(i));
    wf.group_a.push_back(a);
    modem::Drive b;
    if (ls >> b.frequency_hz >> b.level >> b.phase) wf.group_b.push_back(b);
  }
  require(wf.group_b.empty() || wf.group_b.size() == wf.group_a.size(), "group B must cover every slot or none");
  return wf;
}

inline void write_demod(std::ostream& os, const modem::DemodResult& r) {
  os << "# occsim demod v1\n";
  os << "sync_found " << (r.sync_found ? 1 : 0) << '\n';
  os << "complete " << (r.complete ? 1 : 0) << '\n';
  os << "frames_consumed " << r.frames_consumed << '\n';
  os << "unclear_frames " << r.unclear_frames << '\n';
  os << "erasures " << r.erasures << '\n';
  os << "bits " << (r.bits.empty() ? std::string("-") : bits_to_string(r.bits)) << '\n';
}

inline modem::DemodResult read_demod(std::istream& is) {
  modem::DemodResult r;
  r.sync_found = detail::keyed<int>(is, "sync_found") != 0;
  r.complete = detail::keyed<int>(is, "complete") != 0;
  r.frames_consumed = detail::keyed<std::size_t>(is, "frames_consumed");
  r.unclear_frames = detail::keyed<std::size_t>(is, "unclear_frames");
  r.erasures = detail::keyed<std::size_t>(is, "erasures");
  const auto bits = detail::keyed<std::string>(is, "bits");
  if (bits != "-") r.bits = bits_from_string(bits);
  return r;
}

}  // namespace occ::io
