#include "auvtrack/packet.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

namespace auvtrack {

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

void put_real(std::vector<std::uint8_t>& out, double value) {
  const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(value));
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFFu));
  }
}

double get_real(std::span<const std::uint8_t> frame, std::size_t& pos) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) {
    bits |= static_cast<std::uint32_t>(frame[pos + i]) << (8 * i);
  }
  pos += 4;
  const float value = std::bit_cast<float>(bits);
  if (!std::isfinite(value)) throw DecodeError("non-finite real in frame");
  return value;
}

}  // namespace

std::size_t payload_bytes(const AcousticPacket& pkt) {
  return intent_block_bytes(pkt.headings.size()) +
         pkt.measurements.size() * kMeasurementBytes;
}

std::size_t measurement_capacity(std::size_t horizon, std::size_t budget) {
  const std::size_t intent = intent_block_bytes(horizon);
  if (intent > budget) return 0;
  return std::min(kMaxMeasurementsPerPacket,
                  (budget - intent) / kMeasurementBytes);
}

std::vector<std::uint8_t> encode_packet(const AcousticPacket& pkt,
                                        std::size_t budget) {
  if (pkt.sender > kMaxSenderId) {
    throw std::invalid_argument("sender id does not fit the header");
  }
  if (pkt.measurements.size() > kMaxMeasurementsPerPacket) {
    throw std::length_error("too many measurement blocks");
  }
  if (pkt.headings.empty()) {
    throw std::invalid_argument("intent block needs at least one increment");
  }
  const std::size_t payload = payload_bytes(pkt);
  if (payload > budget) {
    throw std::length_error("payload of " + std::to_string(payload) +
                            " bytes exceeds slot budget of " +
                            std::to_string(budget));
  }

  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + payload);
  out.push_back(static_cast<std::uint8_t>(
      (pkt.sender & 0x0Fu) | ((pkt.measurements.size() & 0x03u) << 4) |
      ((pkt.flags & 0x03u) << 6)));
  put_real(out, pkt.p.x());
  put_real(out, pkt.p.y());
  put_real(out, pkt.theta);
  for (double h : pkt.headings) put_real(out, h);
  for (const auto& m : pkt.measurements) {
    put_real(out, m.t);
    put_real(out, m.bearing);
    put_real(out, m.p_obs.x());
    put_real(out, m.p_obs.y());
  }
  return out;
}

AcousticPacket decode_packet(std::span<const std::uint8_t> frame,
                             std::size_t n_agents) {
  if (frame.size() < kHeaderBytes + intent_block_bytes(1)) {
    throw DecodeError("frame too short");
  }
  const std::uint8_t header = frame[0];
  AcousticPacket pkt;
  pkt.sender = header & 0x0Fu;
  const std::size_t n_meas = (header >> 4) & 0x03u;
  pkt.flags = (header >> 6) & 0x03u;
  if (pkt.sender >= n_agents) {
    throw DecodeError("unknown sender id " + std::to_string(pkt.sender));
  }

  const std::size_t fixed = kHeaderBytes + n_meas * kMeasurementBytes;
  if (frame.size() < fixed + intent_block_bytes(1) ||
      (frame.size() - fixed) % kRealBytes != 0) {
    throw DecodeError("frame length inconsistent with header");
  }
  const std::size_t horizon = (frame.size() - fixed) / kRealBytes - 3;

  std::size_t pos = kHeaderBytes;
  pkt.p.x() = get_real(frame, pos);
  pkt.p.y() = get_real(frame, pos);
  pkt.theta = get_real(frame, pos);
  pkt.headings.resize(horizon);
  for (auto& h : pkt.headings) h = get_real(frame, pos);
  pkt.measurements.resize(n_meas);
  for (auto& m : pkt.measurements) {
    m.t = get_real(frame, pos);
    m.bearing = get_real(frame, pos);
    m.p_obs.x() = get_real(frame, pos);
    m.p_obs.y() = get_real(frame, pos);
    m.source = pkt.sender;
  }
  return pkt;
}

}  // namespace auvtrack
