#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>

namespace henosim::protocol {

using NodeId = std::uint16_t;

inline constexpr NodeId kReceiverId = 0;

/// P1 periodic, P2 on-demand, P3 real-time, P4 time-critical.
enum class Priority : std::uint8_t { P1 = 1, P2 = 2, P3 = 3, P4 = 4 };

inline constexpr std::size_t kPriorityCount = 4;

inline constexpr std::size_t index_of(Priority p) { return static_cast<std::size_t>(p) - 1; }
inline constexpr int level_of(Priority p) { return static_cast<int>(p); }

const char* to_string(Priority p);

/// Quartile mapping of u in [0, 1): [0,.25)->P1 ... [.75,1)->P4.
Priority assign_priority(double u);

struct WakeupBeacon {
  NodeId sa = kReceiverId;
  bool energy_ok = true;  // E_s
  friend bool operator==(const WakeupBeacon&, const WakeupBeacon&) = default;
};

struct TxBeacon {
  NodeId sa = 0;
  NodeId da = kReceiverId;
  Priority priority = Priority::P1;
  friend bool operator==(const TxBeacon&, const TxBeacon&) = default;
};

struct RxBeacon {
  NodeId sa = kReceiverId;
  NodeId ss = 0;  // selected sender
  friend bool operator==(const RxBeacon&, const RxBeacon&) = default;
};

struct Ack {
  NodeId sa = kReceiverId;
  NodeId da = 0;
  std::uint16_t seq = 0;
  friend bool operator==(const Ack&, const Ack&) = default;
};

struct DataFrame {
  NodeId sa = 0;
  NodeId da = kReceiverId;
  Priority priority = Priority::P1;
  std::uint16_t seq = 0;
  std::uint32_t packet_id = 0;
  friend bool operator==(const DataFrame&, const DataFrame&) = default;
};

using Frame = std::variant<WakeupBeacon, TxBeacon, RxBeacon, Ack, DataFrame>;

enum class FrameKind : std::uint8_t { wb = 1, txb = 2, rxb = 3, ack = 4, data = 5 };

const char* to_string(FrameKind kind);
FrameKind kind_of(const Frame& frame);

/// On-air size including FC and FCS: WB 9, TxB 14, RxB 13, ACK 11, DATA 28.
std::size_t frame_size(FrameKind kind);

inline constexpr std::size_t kMaxFrameBytes = 28;

struct EncodedFrame {
  std::array<std::uint8_t, kMaxFrameBytes> bytes{};
  std::uint8_t size = 0;

  [[nodiscard]] std::span<const std::uint8_t> view() const { return {bytes.data(), size}; }
};

/// CRC-16/KERMIT, the IEEE 802.15.4 FCS polynomial.
std::uint16_t fcs16(std::span<const std::uint8_t> data);

/// Layout: FC (2, LE) | kind fields (LE) | zero padding | FCS (2, LE).
EncodedFrame encode_frame(const Frame& frame);

/// Throws FrameCorrupt on unknown kind, size mismatch, bad FCS or
/// out-of-range field.
Frame decode_frame(std::span<const std::uint8_t> bytes);

/// size * 8 / data_rate
double frame_airtime(FrameKind kind, double data_rate);
double frame_airtime(const Frame& frame, double data_rate);

}  // namespace henosim::protocol
