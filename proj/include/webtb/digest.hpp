#pragma once

#include <array>
#include <cstdint>
#include <memory>

namespace webtb {

/// CPU-bound work unit: MD5 over a fixed 64-byte buffer, feeding each digest back
/// into the buffer so iterations cannot be elided. Not thread-safe; one per thread.
class DigestSpinner {
 public:
  explicit DigestSpinner(std::uint64_t seed = 0);
  ~DigestSpinner();
  DigestSpinner(DigestSpinner&&) noexcept;
  DigestSpinner& operator=(DigestSpinner&&) noexcept;

  /// Runs `iterations` digests.
  void spin(std::uint64_t iterations);

  const std::array<unsigned char, 64>& buffer() const { return buffer_; }

 private:
  struct Ctx;
  std::unique_ptr<Ctx> ctx_;
  std::array<unsigned char, 64> buffer_{};
};

}  // namespace webtb
