#pragma once

/**
 * @file packet.hpp
 * @brief Wire format of the per-slot acoustic broadcast.
 *
 * Frame layout (little-endian, IEEE-754 single precision):
 *
 *   byte 0      header: bits 0-3 sender id, bits 4-5 measurement count,
 *               bits 6-7 flags
 *   intent      x, y, theta, then H heading increments   ((3 + H) * 4 bytes)
 *   measurement t, bearing, x_obs, y_obs                   (16 bytes each)
 *
 * The header byte is link framing. The slot byte budget applies to the
 * payload (intent plus measurement blocks). H is recovered from the frame
 * length once the header has fixed the measurement count.
 */

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "auvtrack/channel.hpp"
#include "auvtrack/world.hpp"

namespace auvtrack {

inline constexpr std::size_t kHeaderBytes = 1;
inline constexpr std::size_t kRealBytes = 4;
inline constexpr std::size_t kMeasurementBytes = 4 * kRealBytes;
inline constexpr std::size_t kMaxMeasurementsPerPacket = 3;  // 2-bit field
inline constexpr AgentId kMaxSenderId = 15;                  // 4-bit field

struct AcousticPacket {
  AgentId sender = 0;
  std::uint8_t flags = 0;  ///< 2 bits, carried verbatim
  Vec2 p = Vec2::Zero();
  double theta = 0.0;
  std::vector<double> headings;  ///< H heading increments
  std::vector<Measurement> measurements;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::size_t intent_block_bytes(std::size_t horizon) {
  return (3 + horizon) * kRealBytes;
}

std::size_t payload_bytes(const AcousticPacket& pkt);

/// How many measurement blocks fit next to an H-step intent in budget bytes.
std::size_t measurement_capacity(std::size_t horizon, std::size_t budget);

/// Throws std::length_error if the payload exceeds budget.
std::vector<std::uint8_t> encode_packet(const AcousticPacket& pkt,
                                        std::size_t budget);

/// Throws DecodeError on malformed frames, sender ids >= n_agents, or
/// non-finite reals.
AcousticPacket decode_packet(std::span<const std::uint8_t> frame,
                             std::size_t n_agents);

}  // namespace auvtrack
