#include "adn/messages.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "adn/error.hpp"

namespace adn {

namespace {

template <class U>
U to_little(U x) noexcept {
  if constexpr (std::endian::native == std::endian::little) {
    return x;
  } else {
    U out = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out = static_cast<U>((out << 8) | (x & 0xff));
      x = static_cast<U>(x >> 8);
    }
    return out;
  }
}

class Writer {
 public:
  explicit Writer(std::size_t capacity) { buf_.reserve(capacity); }

  template <class U>
  void put(U x) {
    x = to_little(x);
    const auto* p = reinterpret_cast<const std::byte*>(&x);
    buf_.insert(buf_.end(), p, p + sizeof(U));
  }

  void put_double(double x, const char* field) {
    if (!std::isfinite(x)) throw Error(ErrorCode::non_finite_value, std::string("non-finite ") + field);
    put(std::bit_cast<std::uint64_t>(x));
  }

  void header(MessageType type, std::uint8_t flags, std::uint32_t id, std::uint32_t count) {
    put(kMessageMagic);
    put(kMessageVersion);
    put(static_cast<std::uint8_t>(type));
    put(flags);
    put(id);
    put(count);
  }

  std::vector<std::byte> take() { return std::move(buf_); }

 private:
  std::vector<std::byte> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  template <class U>
  U get() {
    if (pos_ + sizeof(U) > bytes_.size()) throw Error(ErrorCode::malformed_message, "truncated message");
    U x;
    std::memcpy(&x, bytes_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return to_little(x);
  }

  double get_double() { return std::bit_cast<double>(get<std::uint64_t>()); }

  struct Header {
    std::uint8_t flags;
    std::uint32_t id;
    std::uint32_t count;
  };

  Header header(MessageType expected) {
    if (get<std::uint32_t>() != kMessageMagic) throw Error(ErrorCode::malformed_message, "bad magic");
    if (get<std::uint16_t>() != kMessageVersion) throw Error(ErrorCode::malformed_message, "unsupported version");
    if (get<std::uint8_t>() != static_cast<std::uint8_t>(expected)) {
      throw Error(ErrorCode::malformed_message, "unexpected message type");
    }
    Header h;
    h.flags = get<std::uint8_t>();
    h.id = get<std::uint32_t>();
    h.count = get<std::uint32_t>();
    return h;
  }

  void expect_size(std::size_t total) const {
    if (bytes_.size() != total) {
      throw Error(ErrorCode::malformed_message,
                  "expected " + std::to_string(total) + " bytes, got " + std::to_string(bytes_.size()));
    }
  }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t checked_count(std::size_t n) {
  if (n > 0xffffffffULL) throw Error(ErrorCode::invalid_input, "payload too large for the wire format");
  return static_cast<std::uint32_t>(n);
}

}  // namespace

std::vector<std::byte> serialize(const WorkerToMaster& msg) {
  const std::size_t d = msg.delta_shared.size();
  Writer w(worker_message_bytes(d));
  w.header(MessageType::worker_update, 0, msg.part, checked_count(d));
  w.put_double(msg.g_sum_new, "g_sum_new");
  w.put_double(msg.local_model_value, "local_model_value");
  w.put_double(msg.local_decrease, "local_decrease");
  for (double x : msg.delta_shared) w.put_double(x, "delta_shared");
  return w.take();
}

std::vector<std::byte> serialize(const MasterToWorker& msg) {
  if (!msg.accepted && !msg.delta_total.empty()) {
    throw Error(ErrorCode::invalid_input, "rejected rounds carry no update payload");
  }
  const std::size_t d = msg.delta_total.size();
  Writer w(kHeaderBytes + 8 + 8 * d);
  w.header(MessageType::master_decision, msg.accepted ? 1 : 0, msg.round, checked_count(d));
  w.put_double(msg.sigma_next, "sigma_next");
  for (double x : msg.delta_total) w.put_double(x, "delta_total");
  return w.take();
}

std::vector<std::byte> serialize(const ScalarMessage& msg) {
  Writer w(scalar_message_bytes());
  w.header(MessageType::scalar, 0, msg.id, 0);
  w.put_double(msg.value, "value");
  return w.take();
}

WorkerToMaster deserialize_worker(std::span<const std::byte> bytes) {
  Reader r(bytes);
  const auto h = r.header(MessageType::worker_update);
  if (h.flags != 0) throw Error(ErrorCode::malformed_message, "unexpected flags");
  r.expect_size(worker_message_bytes(h.count));
  WorkerToMaster msg;
  msg.part = h.id;
  msg.g_sum_new = r.get_double();
  msg.local_model_value = r.get_double();
  msg.local_decrease = r.get_double();
  msg.delta_shared.resize(h.count);
  for (auto& x : msg.delta_shared) x = r.get_double();
  return msg;
}

MasterToWorker deserialize_master(std::span<const std::byte> bytes) {
  Reader r(bytes);
  const auto h = r.header(MessageType::master_decision);
  if (h.flags > 1) throw Error(ErrorCode::malformed_message, "unexpected flags");
  MasterToWorker msg;
  msg.round = h.id;
  msg.accepted = h.flags == 1;
  if (!msg.accepted && h.count != 0) throw Error(ErrorCode::malformed_message, "payload on a rejected round");
  r.expect_size(kHeaderBytes + 8 + 8 * static_cast<std::size_t>(h.count));
  msg.sigma_next = r.get_double();
  msg.delta_total.resize(h.count);
  for (auto& x : msg.delta_total) x = r.get_double();
  return msg;
}

ScalarMessage deserialize_scalar(std::span<const std::byte> bytes) {
  Reader r(bytes);
  const auto h = r.header(MessageType::scalar);
  if (h.flags != 0 || h.count != 0) throw Error(ErrorCode::malformed_message, "unexpected scalar header");
  r.expect_size(scalar_message_bytes());
  ScalarMessage msg;
  msg.id = h.id;
  msg.value = r.get_double();
  return msg;
}

}  // namespace adn
