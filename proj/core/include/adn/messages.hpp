#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace adn {

/// Wire format shared by all messages: a 16-byte little-endian header
///
///   u32 magic | u16 version | u8 type | u8 flags | u32 id | u32 count
///
/// followed by the fixed scalar fields and then `count` float64 values.
inline constexpr std::uint32_t kMessageMagic = 0x314e4441;  // "ADN1"
inline constexpr std::uint16_t kMessageVersion = 1;
inline constexpr std::size_t kHeaderBytes = 16;

enum class MessageType : std::uint8_t { worker_update = 1, master_decision = 2, scalar = 3 };

/// Stage 2: worker k reports its proposed update.
struct WorkerToMaster {
  std::uint32_t part = 0;
  std::vector<double> delta_shared;  ///< A_k delta_k, length d
  double g_sum_new = 0.0;            ///< sum_{i in I_k} g(alpha_i + delta_i)
  double local_model_value = 0.0;    ///< M_k(delta_k)
  double local_decrease = 0.0;       ///< M_k(0) - M_k(delta_k)

  friend bool operator==(const WorkerToMaster&, const WorkerToMaster&) = default;
};

/// Stage 4: the master's verdict. The aggregated update travels only when the
/// round was accepted.
struct MasterToWorker {
  std::uint32_t round = 0;
  bool accepted = false;
  double sigma_next = 1.0;
  std::vector<double> delta_total;

  friend bool operator==(const MasterToWorker&, const MasterToWorker&) = default;
};

/// A single control value, e.g. a line-search step size or a partial objective.
struct ScalarMessage {
  std::uint32_t id = 0;
  double value = 0.0;

  friend bool operator==(const ScalarMessage&, const ScalarMessage&) = default;
};

/// Serialization throws NonFiniteValue on NaN/Inf fields; deserialization
/// throws MalformedMessage on any size, magic, version or type mismatch.
std::vector<std::byte> serialize(const WorkerToMaster& msg);
std::vector<std::byte> serialize(const MasterToWorker& msg);
std::vector<std::byte> serialize(const ScalarMessage& msg);

WorkerToMaster deserialize_worker(std::span<const std::byte> bytes);
MasterToWorker deserialize_master(std::span<const std::byte> bytes);
ScalarMessage deserialize_scalar(std::span<const std::byte> bytes);

constexpr std::size_t worker_message_bytes(std::size_t d) noexcept { return kHeaderBytes + 3 * 8 + 8 * d; }
constexpr std::size_t master_message_bytes(std::size_t d, bool accepted) noexcept {
  return kHeaderBytes + 8 + (accepted ? 8 * d : 0);
}
constexpr std::size_t scalar_message_bytes() noexcept { return kHeaderBytes + 8; }

}  // namespace adn
