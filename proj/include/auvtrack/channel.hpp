#pragma once

/**
 * @file channel.hpp
 * @brief Acoustic link budget (sonar equation with Thorp absorption) and
 *        TDMA medium access.
 */

#include <random>
#include <vector>

#include "auvtrack/world.hpp"

namespace auvtrack {

/// Acoustic modem parameters. Levels in dB, frequency in kHz.
struct ModemConfig {
  double source_level = 186.0;
  double noise_level = 20.0;
  double directivity_index = 0.0;
  double frequency_khz = 25.0;
  double detection_threshold = 10.0;
  double bitrate = 120.0;  ///< bits/s
  /// Ideal SNR used to normalize link gains. Non-positive selects the
  /// zero-loss value SL - NL + DI.
  double rho_max = 0.0;

  double ideal_snr() const {
    return rho_max > 0.0 ? rho_max
                         : source_level - noise_level + directivity_index;
  }
};

struct TdmaConfig {
  double slot_duration = 2.0;          ///< seconds
  std::vector<AgentId> slot_order;     ///< one slot per agent per round

  std::size_t slots() const { return slot_order.size(); }
  /// Synchronization overhead: one full round of transmissions.
  double round_duration() const { return slot_duration * slots(); }
};

/// Thorp absorption coefficient in dB/km for f in kHz.
double thorp_absorption(double f_khz);

/// Spherical spreading plus absorption, d in meters.
double transmission_loss(double d_m, double f_khz);

/// Received SNR in dB at range d.
double snr(const ModemConfig& cfg, double d_m);

/// Index of the slot containing time t.
long slot_index(double t, const TdmaConfig& tdma);

/// Agent allowed to transmit at time t.
AgentId slot_owner(double t, const TdmaConfig& tdma);

/// Byte budget of one channel access: floor(bitrate * T_f / 8).
std::size_t slot_byte_budget(double bitrate, double slot_duration);

/**
 * @brief Rolls delivery of one broadcast to one receiver.
 *
 * A packet is receivable only if the link SNR reaches the detection
 * threshold; receivable packets are then delivered with probability pdr.
 */
bool transmit(const Vec2& sender_pos, const Vec2& receiver_pos,
              const ModemConfig& cfg, double pdr, std::mt19937_64& rng);

}  // namespace auvtrack
