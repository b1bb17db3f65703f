#include "auvtrack/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace auvtrack {

double thorp_absorption(double f_khz) {
  if (!(f_khz > 0.0)) throw std::invalid_argument("frequency must be > 0");
  const double f2 = f_khz * f_khz;
  return 0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 +
         0.003;
}

double transmission_loss(double d_m, double f_khz) {
  if (!(d_m > 0.0)) throw std::invalid_argument("distance must be > 0");
  return 20.0 * std::log10(d_m) + d_m * thorp_absorption(f_khz) * 1e-3;
}

double snr(const ModemConfig& cfg, double d_m) {
  return cfg.source_level - transmission_loss(d_m, cfg.frequency_khz) -
         cfg.noise_level + cfg.directivity_index;
}

long slot_index(double t, const TdmaConfig& tdma) {
  if (t < 0.0) throw std::invalid_argument("slot_index: t must be >= 0");
  // Slot boundaries are multiples of T_f; tolerate round-off just below one.
  return static_cast<long>(std::floor(t / tdma.slot_duration + 1e-9));
}

AgentId slot_owner(double t, const TdmaConfig& tdma) {
  if (tdma.slot_order.empty()) throw std::invalid_argument("empty TDMA order");
  const auto k = static_cast<std::size_t>(slot_index(t, tdma));
  return tdma.slot_order[k % tdma.slot_order.size()];
}

std::size_t slot_byte_budget(double bitrate, double slot_duration) {
  return static_cast<std::size_t>(std::floor(bitrate * slot_duration / 8.0));
}

bool transmit(const Vec2& sender_pos, const Vec2& receiver_pos,
              const ModemConfig& cfg, double pdr, std::mt19937_64& rng) {
  const double d = (sender_pos - receiver_pos).norm();
  if (!(d > 0.0)) throw std::invalid_argument("transmit: coincident nodes");
  // Draw unconditionally so the loss stream advances identically whether or
  // not the link is in range.
  std::bernoulli_distribution draw(pdr);
  const bool lucky = draw(rng);
  return snr(cfg, d) >= cfg.detection_threshold && lucky;
}

}  // namespace auvtrack
