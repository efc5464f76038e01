#include "henosim/frame.hpp"

#include <string>

#include "henosim/errors.hpp"

namespace henosim::protocol {

namespace {

// Low three FC bits carry the 802.15.4 frame type, the high byte the beacon kind.
constexpr std::uint8_t kTypeBeacon = 0;
constexpr std::uint8_t kTypeData = 1;
constexpr std::uint8_t kTypeAck = 2;
constexpr std::uint8_t kTypeCommand = 3;

std::uint8_t ieee_type(FrameKind kind) {
  switch (kind) {
    case FrameKind::wb:
      return kTypeBeacon;
    case FrameKind::txb:
    case FrameKind::rxb:
      return kTypeCommand;
    case FrameKind::ack:
      return kTypeAck;
    case FrameKind::data:
      return kTypeData;
  }
  return 0xff;
}

class Writer {
 public:
  explicit Writer(EncodedFrame& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.bytes[pos_++] = v; }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v & 0xff));
    u8(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v & 0xffff));
    u16(static_cast<std::uint16_t>(v >> 16));
  }

 private:
  EncodedFrame& out_;
  std::size_t pos_ = 0;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return in_[pos_++]; }
  std::uint16_t u16() {
    const auto lo = u8();
    const auto hi = u8();
    return static_cast<std::uint16_t>(lo | (hi << 8));
  }
  std::uint32_t u32() {
    const std::uint32_t lo = u16();
    const std::uint32_t hi = u16();
    return lo | (hi << 16);
  }
  [[nodiscard]] std::size_t pos() const { return pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

Priority decode_priority(std::uint8_t raw) {
  if (raw < 1 || raw > 4) {
    throw FrameCorrupt("priority out of range: " + std::to_string(raw));
  }
  return static_cast<Priority>(raw);
}

}  // namespace

const char* to_string(Priority p) {
  switch (p) {
    case Priority::P1:
      return "P1";
    case Priority::P2:
      return "P2";
    case Priority::P3:
      return "P3";
    case Priority::P4:
      return "P4";
  }
  return "?";
}

Priority assign_priority(double u) {
  if (u < 0.25) {
    return Priority::P1;
  }
  if (u < 0.5) {
    return Priority::P2;
  }
  if (u < 0.75) {
    return Priority::P3;
  }
  return Priority::P4;
}

const char* to_string(FrameKind kind) {
  switch (kind) {
    case FrameKind::wb:
      return "WB";
    case FrameKind::txb:
      return "TxB";
    case FrameKind::rxb:
      return "RxB";
    case FrameKind::ack:
      return "ACK";
    case FrameKind::data:
      return "DATA";
  }
  return "?";
}

FrameKind kind_of(const Frame& frame) {
  return static_cast<FrameKind>(frame.index() + 1);
}

std::size_t frame_size(FrameKind kind) {
  switch (kind) {
    case FrameKind::wb:
      return 9;
    case FrameKind::txb:
      return 14;
    case FrameKind::rxb:
      return 13;
    case FrameKind::ack:
      return 11;
    case FrameKind::data:
      return 28;
  }
  return 0;
}

namespace {

constexpr std::array<std::uint16_t, 256> make_crc_table() {
  std::array<std::uint16_t, 256> table{};
  for (unsigned i = 0; i < 256; ++i) {
    std::uint16_t crc = static_cast<std::uint16_t>(i);
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 1U) != 0 ? static_cast<std::uint16_t>((crc >> 1) ^ 0x8408U)
                            : static_cast<std::uint16_t>(crc >> 1);
    }
    table[i] = crc;
  }
  return table;
}

constexpr auto kCrcTable = make_crc_table();

}  // namespace

std::uint16_t fcs16(std::span<const std::uint8_t> data) {
  std::uint16_t crc = 0;
  for (const auto byte : data) {
    crc = static_cast<std::uint16_t>((crc >> 8) ^ kCrcTable[(crc ^ byte) & 0xFFU]);
  }
  return crc;
}

EncodedFrame encode_frame(const Frame& frame) {
  const auto kind = kind_of(frame);
  EncodedFrame out;
  out.size = static_cast<std::uint8_t>(frame_size(kind));

  Writer w(out);
  w.u16(static_cast<std::uint16_t>((static_cast<unsigned>(kind) << 8) | ieee_type(kind)));
  std::visit(
      [&w](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, WakeupBeacon>) {
          w.u16(f.sa);
          w.u8(f.energy_ok ? 1 : 0);
        } else if constexpr (std::is_same_v<T, TxBeacon>) {
          w.u16(f.sa);
          w.u16(f.da);
          w.u8(static_cast<std::uint8_t>(f.priority));
        } else if constexpr (std::is_same_v<T, RxBeacon>) {
          w.u16(f.sa);
          w.u16(f.ss);
        } else if constexpr (std::is_same_v<T, Ack>) {
          w.u16(f.sa);
          w.u16(f.da);
          w.u16(f.seq);
        } else {
          w.u16(f.sa);
          w.u16(f.da);
          w.u8(static_cast<std::uint8_t>(f.priority));
          w.u16(f.seq);
          w.u32(f.packet_id);
        }
      },
      frame);

  // Padding is already zero; FCS covers everything before it.
  const std::size_t body = out.size - 2U;
  const auto crc = fcs16({out.bytes.data(), body});
  out.bytes[body] = static_cast<std::uint8_t>(crc & 0xff);
  out.bytes[body + 1] = static_cast<std::uint8_t>(crc >> 8);
  return out;
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) {
    throw FrameCorrupt("frame too short: " + std::to_string(bytes.size()) + " bytes");
  }
  const auto fc = static_cast<std::uint16_t>(bytes[0] | (bytes[1] << 8));
  const auto code = static_cast<unsigned>(fc >> 8);
  if (code < 1 || code > 5) {
    throw FrameCorrupt("unknown frame kind " + std::to_string(code));
  }
  const auto kind = static_cast<FrameKind>(code);
  if ((fc & 0x7U) != ieee_type(kind) || (fc & 0xf8U) != 0) {
    throw FrameCorrupt("frame control inconsistent with kind");
  }
  const auto expected = frame_size(kind);
  if (bytes.size() != expected) {
    throw FrameCorrupt(std::string(to_string(kind)) + " must be " + std::to_string(expected) +
                       " bytes, got " + std::to_string(bytes.size()));
  }
  const std::size_t body = expected - 2;
  const auto stored = static_cast<std::uint16_t>(bytes[body] | (bytes[body + 1] << 8));
  if (stored != fcs16(bytes.first(body))) {
    throw FrameCorrupt("FCS mismatch");
  }

  Reader r(bytes);
  r.u16();
  Frame frame;
  switch (kind) {
    case FrameKind::wb: {
      WakeupBeacon f;
      f.sa = r.u16();
      const auto es = r.u8();
      if (es > 1) {
        throw FrameCorrupt("energy state flag must be 0 or 1");
      }
      f.energy_ok = es == 1;
      frame = f;
      break;
    }
    case FrameKind::txb: {
      TxBeacon f;
      f.sa = r.u16();
      f.da = r.u16();
      f.priority = decode_priority(r.u8());
      frame = f;
      break;
    }
    case FrameKind::rxb: {
      RxBeacon f;
      f.sa = r.u16();
      f.ss = r.u16();
      frame = f;
      break;
    }
    case FrameKind::ack: {
      Ack f;
      f.sa = r.u16();
      f.da = r.u16();
      f.seq = r.u16();
      frame = f;
      break;
    }
    case FrameKind::data: {
      DataFrame f;
      f.sa = r.u16();
      f.da = r.u16();
      f.priority = decode_priority(r.u8());
      f.seq = r.u16();
      f.packet_id = r.u32();
      frame = f;
      break;
    }
  }
  for (std::size_t i = r.pos(); i < body; ++i) {
    if (bytes[i] != 0) {
      throw FrameCorrupt("non-zero padding");
    }
  }
  return frame;
}

double frame_airtime(FrameKind kind, double data_rate) {
  return static_cast<double>(frame_size(kind)) * 8.0 / data_rate;
}

double frame_airtime(const Frame& frame, double data_rate) {
  return frame_airtime(kind_of(frame), data_rate);
}

}  // namespace henosim::protocol
