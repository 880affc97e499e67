#pragma once

// Wire messages of the proof-of-work stub. Each message is one JSON text frame with
// the fields below and an optional "pad" string that brings the frame to an exact size.
//
//   job:   {"job_id": str, "blob": hex str, "difficulty_target": uint, "pad": str}
//   share: {"job_id": str, "nonce": str, "hash_count_claimed": int, "pad": str}
//   error: {"error": str, "job_id": str}

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace webtb::fixture {

struct PowJob {
  std::string job_id;
  std::string blob;
  std::uint64_t difficulty_target = 0;
};

struct PowShare {
  std::string job_id;
  std::string nonce;
  std::int64_t hash_count_claimed = 0;
};

/// A frame smaller than `frame_size` is padded to exactly that size; a larger one is
/// left at its natural size. Targets less than 9 bytes above the natural size cannot
/// fit the pad field and come out at natural + 9.
std::string encode_job(const PowJob& job, std::size_t frame_size = 0);
std::string encode_share(const PowShare& share, std::size_t frame_size = 0);
std::string encode_error(std::string_view reason, std::string_view job_id);

/// nullopt unless the text is a JSON object with correctly typed share fields and a
/// non-negative claimed count.
std::optional<PowShare> decode_share(std::string_view text);
std::optional<PowJob> decode_job(std::string_view text);
/// Error reason when the frame is an error message.
std::optional<std::string> decode_error(std::string_view text);

}  // namespace webtb::fixture
