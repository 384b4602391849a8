#pragma once

// Intensity-modulation / direct-detection optical channel.
//
// Received photocurrent y = h * R * x + n, with x the transmitted optical
// intensity (0 or 2*Pt for on-off keying), R the detector responsivity, h the
// channel state and n zero-mean Gaussian noise of standard deviation sigma.
// Instantaneous SNR is gamma = gamma_o * h^2 with gamma_o = 2 Pt^2 R^2 / sigma^2.
//
// Fading: h = exp(-X) with X ~ Gamma(shape k, rate z). Writing u = gamma/gamma_o
// = exp(-2X), the change of variables X = -ln(u)/2 gives
//
//   f(gamma) = z^k / (2 Gamma(k) sqrt(gamma gamma_o))
//              * [ln(1/sqrt(u))]^(k-1) * sqrt(u)^(z-1),   0 < gamma <= gamma_o,
//
// which is the SNR density used throughout.
//
// OOK bit error rate: levels 0 and 2 Pt h R, threshold at the midpoint Pt h R
// (receiver knows h). An error occurs when noise crosses half the level gap,
// so BER = Q(Pt h R / sigma) = Q(sqrt(gamma / 2)).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "occsim/core.hpp"
#include "occsim/numerics.hpp"

namespace occ::channel {

struct FadingParams {
  double shape_k = 1.0;
  double scale_z = 1.0;

  void validate() const {
    require(shape_k > 0 && std::isfinite(shape_k), "fading shape k must be positive");
    require(scale_z > 0 && std::isfinite(scale_z), "fading scale z must be positive");
  }
};

struct ChannelParams {
  double transmit_power_avg = 0.5;  // Pt, optical watts
  double responsivity = 1.0;        // R, A/W
  double noise_std = 0.0;           // sigma_n, A
  std::optional<FadingParams> fading;  // absent: fixed gain

  void validate() const {
    require(transmit_power_avg > 0 && std::isfinite(transmit_power_avg),
            "transmit power must be positive");
    require(responsivity > 0 && std::isfinite(responsivity), "responsivity must be positive");
    require(noise_std >= 0 && std::isfinite(noise_std), "noise std must be non-negative");
    if (fading) fading->validate();
  }

  /// gamma_o = 2 Pt^2 R^2 / sigma^2.
  double gamma_o() const {
    validate();
    if (noise_std == 0) throw DomainError("infinite SNR: noise_std is zero");
    const double a = transmit_power_avg * responsivity / noise_std;
    return 2 * a * a;
  }

  /// Upper OOK level 2*Pt.
  double on_level() const { return 2 * transmit_power_avg; }
};

/// Noise std giving instantaneous SNR `gamma` at unit gain.
inline double noise_std_for_snr(double transmit_power_avg, double responsivity, double gamma) {
  require(gamma > 0, "target SNR must be positive");
  return std::sqrt(2.0 / gamma) * transmit_power_avg * responsivity;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) { return 10.0 * std::log10(v); }

struct ChannelSample {
  double sent_symbol = 0;
  double gain = 1;
  double received = 0;
  double noise_draw = 0;
};

template <class Urbg>
double draw_noise(double sigma, Urbg& rng) {
  if (sigma == 0) return 0.0;
  std::normal_distribution<double> n(0.0, sigma);
  return n(rng);
}

template <class Urbg>
ChannelSample transmit(double x, const ChannelParams& params, double gain, Urbg& rng) {
  params.validate();
  require(x >= 0 && std::isfinite(x), "transmitted intensity must be non-negative");
  require(gain > 0 && gain <= 1, "channel gain must lie in (0, 1]");
  ChannelSample s;
  s.sent_symbol = x;
  s.gain = gain;
  s.noise_draw = draw_noise(params.noise_std, rng);
  s.received = gain * params.responsivity * x + s.noise_draw;
  return s;
}

inline double snr(const ChannelParams& params, double gain) {
  require(gain >= 0 && gain <= 1, "channel gain must lie in [0, 1]");
  return params.gamma_o() * gain * gain;
}

/// SNR density at `gamma`; requires fading parameters.
inline double snr_pdf(double gamma, const ChannelParams& params) {
  require(params.fading.has_value(), "snr_pdf requires fading parameters");
  const double g0 = params.gamma_o();
  if (!(gamma > 0) || gamma > g0) throw DomainError("gamma outside (0, gamma_o]");
  const double k = params.fading->shape_k;
  const double z = params.fading->scale_z;
  const double u = gamma / g0;
  const double root = std::sqrt(u);
  const double log_term = -std::log(root);  // ln(1/sqrt(u))
  const double log_norm = k * std::log(z) - std::lgamma(k) - std::log(2.0 * std::sqrt(gamma * g0));
  if (log_term == 0) {
    if (k == 1) return std::exp(log_norm) * std::pow(root, z - 1);
    return k > 1 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::exp(log_norm + (k - 1) * std::log(log_term) + (z - 1) * std::log(root));
}

/// Mean SNR over the fading distribution, by quadrature on (0, gamma_o].
inline double average_snr(const ChannelParams& params) {
  const double g0 = params.gamma_o();
  if (!params.fading) return g0;
  auto integrand = [&](double g) { return g * snr_pdf(g, params); };
  return numerics::integrate(integrand, 0.0, g0).value;
}

inline double ook_ber_theory(double gamma) {
  require(gamma >= 0, "SNR must be non-negative");
  if (std::isinf(gamma)) return 0.0;
  return numerics::q_function(std::sqrt(gamma / 2.0));
}

/// BER averaged over the fading SNR density.
inline double faded_ook_ber_theory(const ChannelParams& params) {
  const double g0 = params.gamma_o();
  if (!params.fading) return ook_ber_theory(g0);
  auto integrand = [&](double g) { return ook_ber_theory(g) * snr_pdf(g, params); };
  return numerics::integrate(integrand, 0.0, g0).value;
}

template <class Urbg>
double sample_fading_gain(const FadingParams& fading, Urbg& rng) {
  fading.validate();
  std::gamma_distribution<double> x(fading.shape_k, 1.0 / fading.scale_z);
  double h = std::exp(-x(rng));
  // exp(-X) underflows only for astronomically large X; keep the gain in (0, 1].
  return std::max(h, std::numeric_limits<double>::min());
}

template <class Urbg>
double sample_gain(const ChannelParams& params, Urbg& rng) {
  return params.fading ? sample_fading_gain(*params.fading, rng) : 1.0;
}

struct BerEstimate {
  std::uint64_t symbols = 0;
  std::uint64_t errors = 0;
  double ber() const { return symbols ? static_cast<double>(errors) / symbols : 0.0; }
};

/// Monte Carlo OOK link: equiprobable symbols {0, 2Pt}, per-symbol gain from
/// the fading law (or 1), midpoint threshold with known gain.
template <class Urbg>
BerEstimate simulate_ook_ber(const ChannelParams& params, std::uint64_t symbols, Urbg& rng) {
  params.validate();
  std::bernoulli_distribution coin(0.5);
  BerEstimate est;
  est.symbols = symbols;
  const double on = params.on_level();
  for (std::uint64_t i = 0; i < symbols; ++i) {
    const bool bit = coin(rng);
    const double h = sample_gain(params, rng);
    const ChannelSample s = transmit(bit ? on : 0.0, params, h, rng);
    const bool decided = s.received > h * params.responsivity * params.transmit_power_avg;
    if (decided != bit) ++est.errors;
  }
  return est;
}

}  // namespace occ::channel
