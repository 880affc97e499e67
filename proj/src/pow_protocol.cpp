#include "webtb/pow_protocol.hpp"

#include <json.hpp>

namespace webtb::fixture {
namespace {

using OJson = nlohmann::ordered_json;

// The pad field costs 9 bytes before any filler (`,"pad":""`), so a target between the
// natural size and natural + 9 is unreachable and yields natural + 9.
std::string padded(OJson msg, std::size_t frame_size) {
  auto text = msg.dump();
  if (text.size() >= frame_size) return text;
  msg["pad"] = "";
  const auto with_field = msg.dump().size();
  msg["pad"] = std::string(frame_size > with_field ? frame_size - with_field : 0, 'x');
  return msg.dump();
}

std::optional<OJson> parse_object(std::string_view text) {
  auto j = OJson::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

bool string_field(const OJson& j, const char* key) { return j.contains(key) && j[key].is_string(); }

}  // namespace

std::string encode_job(const PowJob& job, std::size_t frame_size) {
  return padded({{"job_id", job.job_id}, {"blob", job.blob}, {"difficulty_target", job.difficulty_target}},
                frame_size);
}

std::string encode_share(const PowShare& share, std::size_t frame_size) {
  return padded(
      {{"job_id", share.job_id}, {"nonce", share.nonce}, {"hash_count_claimed", share.hash_count_claimed}},
      frame_size);
}

std::string encode_error(std::string_view reason, std::string_view job_id) {
  return OJson{{"error", reason}, {"job_id", job_id}}.dump();
}

std::optional<PowShare> decode_share(std::string_view text) {
  const auto j = parse_object(text);
  if (!j || !string_field(*j, "job_id") || !string_field(*j, "nonce")) return std::nullopt;
  if (!j->contains("hash_count_claimed") || !(*j)["hash_count_claimed"].is_number_integer()) return std::nullopt;
  if (j->contains("pad") && !(*j)["pad"].is_string()) return std::nullopt;
  PowShare s;
  s.job_id = (*j)["job_id"].get<std::string>();
  s.nonce = (*j)["nonce"].get<std::string>();
  s.hash_count_claimed = (*j)["hash_count_claimed"].get<std::int64_t>();
  if (s.job_id.empty() || s.hash_count_claimed < 0) return std::nullopt;
  return s;
}

std::optional<PowJob> decode_job(std::string_view text) {
  const auto j = parse_object(text);
  if (!j || !string_field(*j, "job_id") || !string_field(*j, "blob")) return std::nullopt;
  if (!j->contains("difficulty_target") || !(*j)["difficulty_target"].is_number_unsigned()) return std::nullopt;
  PowJob job;
  job.job_id = (*j)["job_id"].get<std::string>();
  job.blob = (*j)["blob"].get<std::string>();
  job.difficulty_target = (*j)["difficulty_target"].get<std::uint64_t>();
  return job;
}

std::optional<std::string> decode_error(std::string_view text) {
  const auto j = parse_object(text);
  if (!j || !string_field(*j, "error")) return std::nullopt;
  return (*j)["error"].get<std::string>();
}

}  // namespace webtb::fixture
