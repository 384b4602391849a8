#include <gtest/gtest.h>

#include <sstream>

#include "occsim/modem.hpp"
#include "occsim/modem_io.hpp"

using namespace occ;
using namespace occ::modem;

namespace {

Packet packet(const std::string& s) { return Packet{io::bits_from_string(s)}; }

DemodResult nyquist_roundtrip(const Packet& p, int fps, double t0) {
  const auto wf = encode_nyquist_ook(p, fps);
  const auto lv = sample_frames(wf, fps, t0, frames_to_cover(wf, fps, t0) + 8);
  return decode_nyquist_ook(lv);
}

DemodResult ufsook_roundtrip(const Packet& p, const UfsookConfig& c, double phase, double t0) {
  const auto wf = encode_ufsook(p, c, phase);
  const auto lv = sample_frames(wf, c.camera_fps, t0, frames_to_cover(wf, c.camera_fps, t0) + 3, 50e-6);
  UfsookDecodeOptions o;
  o.full_scale = 1.0;
  return decode_ufsook(lv, c, o);
}

DemodResult s2psk_roundtrip(const Packet& p, const S2pskConfig& c, double phase, double t0) {
  const auto wf = encode_s2psk(p, c, phase);
  const auto n = frames_to_cover(wf, c.camera_fps, t0);
  std::vector<std::optional<double>> a(n), b(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) / c.camera_fps;
    a[k] = wf.sample(t, 0, 0);
    b[k] = wf.sample(t, 0, 1);
  }
  return decode_s2psk(a, b);
}

}  // namespace

TEST(Framing, StuffingInsertsZeroAfterFiveOnes) {
  EXPECT_EQ(io::bits_to_string(detail::stuff(io::bits_from_string("111111"))), "1111101");
  EXPECT_EQ(io::bits_to_string(detail::stuff(io::bits_from_string("0111110"))), "01111100");
  EXPECT_EQ(io::bits_to_string(detail::length_header(5)), "0000000000000101");
}

TEST(Framing, PayloadValidation) {
  EXPECT_THROW(encode_nyquist_ook(Packet{}, 600), InvalidArgument);
  EXPECT_THROW(encode_nyquist_ook(Packet{Bits{0, 2}}, 600), InvalidArgument);
  EXPECT_THROW(encode_nyquist_ook(packet("1"), 25), InvalidArgument);
}

TEST(Nyquist, PairRuleTable) {
  using F = FrameState;
  EXPECT_EQ(decide_pair(F::Bright, F::Bright), Symbol::One);
  EXPECT_EQ(decide_pair(F::Dark, F::Dark), Symbol::Zero);
  EXPECT_EQ(decide_pair(F::Unclear, F::Bright), Symbol::One);
  EXPECT_EQ(decide_pair(F::Dark, F::Unclear), Symbol::Zero);
  EXPECT_EQ(decide_pair(F::Unclear, F::Unclear), Symbol::Erasure);
  EXPECT_EQ(decide_pair(F::Bright, F::Dark), Symbol::Erasure);
  UnclearThresholds th;
  EXPECT_EQ(classify_frame(0.2, th), F::Dark);
  EXPECT_EQ(classify_frame(0.5, th), F::Unclear);
  EXPECT_EQ(classify_frame(0.9, th), F::Bright);
}

TEST(Nyquist, RateAnchorAndRoundTrip) {
  const auto p = packet("1011001110001111110");
  const auto wf = encode_nyquist_ook(p, 600);
  EXPECT_DOUBLE_EQ(wf.bit_rate, 150.0);
  EXPECT_DOUBLE_EQ(wf.pulse_rate, 300.0);
  for (double t0 : {-0.01, 0.0003, 0.0021}) {
    const auto r = nyquist_roundtrip(p, 600, t0);
    ASSERT_TRUE(r.ok()) << t0;
    EXPECT_EQ(r.bits, p.payload);
  }
}

TEST(Nyquist, FlatInputHasNoSync) {
  std::vector<double> flat(100, 0.4);
  EXPECT_FALSE(decode_nyquist_ook(flat).sync_found);
}

TEST(Ufsook, RateAnchorAt20Fps) {
  UfsookConfig c;
  c.camera_fps = 20;
  c.space_hz = 120;
  c.mark_hz = 110;
  const auto wf = encode_ufsook(packet("1"), c);
  EXPECT_DOUBLE_EQ(wf.bit_rate, 10.0);
}

TEST(Ufsook, FlickerAndHarmonicRules) {
  UfsookConfig c;
  c.space_hz = 90;
  EXPECT_THROW(c.validate(), InvalidArgument);
  UfsookConfig d;
  d.mark_hz = 110;  // 110/30 is not a half-integer multiple
  EXPECT_THROW(d.validate(), InvalidArgument);
  UfsookConfig ok;
  EXPECT_NO_THROW(ok.validate());
}

TEST(Ufsook, RoundTripUnderPhaseSweep) {
  const auto p = packet("0110100111110000101");
  const UfsookConfig c;
  for (double phase : {0.0, 0.13, 0.37, 0.5, 0.81})
    for (double t0 : {-0.05, 0.004}) {
      const auto r = ufsook_roundtrip(p, c, phase, t0);
      ASSERT_TRUE(r.ok()) << phase << " " << t0;
      EXPECT_EQ(r.bits, p.payload);
    }
}

TEST(Rolling, BandWidthAndRoundTrip) {
  EXPECT_DOUBLE_EQ(rolling_band_rows(1000, 1e-5), 50.0);
  const auto p = packet("1100101011111101");
  const auto wf = encode_rolling_ook(p, 5000);
  const int rows = static_cast<int>(wf.duration() / 1e-5) + 40;
  const Frame f = sample_rolling_frame(wf, rows, 1e-5, -2e-4);
  const std::vector<double> cands{5000};
  const auto r = decode_rolling_ook(f, 1e-5, cands);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.bits, p.payload);
}

TEST(Rolling, UndersampledAndRateChecks) {
  const auto wf = encode_rolling_ook(packet("10"), 5000);
  const Frame f = sample_rolling_frame(wf, 200, 1e-5, 0);
  const std::vector<double> too_fast{1e6};
  EXPECT_THROW(decode_rolling_ook(f, 1e-5, too_fast), DomainError);
  EXPECT_THROW(validate_rolling_rate(20, 30, 1e-5), InvalidArgument);
  EXPECT_THROW(validate_rolling_rate(2e5, 30, 1e-5), InvalidArgument);
  EXPECT_NO_THROW(validate_rolling_rate(5000, 30, 1e-5));
}

TEST(S2psk, AntiPhaseCarriesOne) {
  const S2pskConfig c;
  const auto wf = encode_s2psk(packet("1"), c);
  // Preamble slot: groups in phase. SFD's second slot (bit 1): anti-phase.
  const double t_pre = 0.3 / c.camera_fps;
  EXPECT_DOUBLE_EQ(wf.level_at(t_pre, 0), wf.level_at(t_pre, 1));
  const double t_one = (c.preamble_bits + 1 + 0.3) / c.camera_fps;
  EXPECT_NE(wf.level_at(t_one, 0), wf.level_at(t_one, 1));
}

TEST(S2psk, RoundTrip) {
  const auto p = packet("00111111101010");
  for (double phase : {0.0, 0.21, 0.77}) {
    const auto r = s2psk_roundtrip(p, S2pskConfig{}, phase, 0.006);
    ASSERT_TRUE(r.ok()) << phase;
    EXPECT_EQ(r.bits, p.payload);
  }
}

TEST(S2psk, MaskedGroupLevel) {
  const std::vector<double> lv{0.9, 0.1, 0.8, 0.7};
  const std::vector<std::uint8_t> m{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(*masked_group_level(lv, {}, 0.5), 0.75);
  EXPECT_DOUBLE_EQ(*masked_group_level(lv, m, 0.5), 0.5);
  const std::vector<std::uint8_t> all{1, 1, 1, 1};
  EXPECT_FALSE(masked_group_level(lv, all, 0.5).has_value());
}

TEST(S2psk, FullyOccludedGroupYieldsErasures) {
  std::vector<std::optional<double>> a(40, 1.0), b(40);
  const auto r = decode_s2psk(a, b);
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.erasures, 40u);
}

TEST(ModemIo, WaveformAndDemodRoundTrip) {
  const auto wf = encode_s2psk(packet("1011"), S2pskConfig{}, 0.25);
  std::stringstream ss;
  io::write_waveform(ss, wf);
  const auto back = io::read_waveform(ss);
  for (double t = 0; t < wf.duration(); t += 1e-3) {
    ASSERT_DOUBLE_EQ(back.level_at(t, 0), wf.level_at(t, 0));
    ASSERT_DOUBLE_EQ(back.level_at(t, 1), wf.level_at(t, 1));
  }
  DemodResult r;
  r.bits = io::bits_from_string("0110");
  r.sync_found = r.complete = true;
  r.frames_consumed = 12;
  std::stringstream ds;
  io::write_demod(ds, r);
  const auto rb = io::read_demod(ds);
  EXPECT_EQ(rb.bits, r.bits);
  EXPECT_EQ(rb.frames_consumed, 12u);
  EXPECT_TRUE(rb.ok());
}
