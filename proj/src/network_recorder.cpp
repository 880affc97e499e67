#include "webtb/network_recorder.hpp"

namespace webtb::monitors {

double monotonic_seconds(std::chrono::steady_clock::time_point tp) {
  return std::chrono::duration<double>(tp.time_since_epoch()).count();
}

std::int64_t frame_payload_bytes(const nlohmann::json& response) {
  const auto data = response.value("payloadData", std::string{});
  if (response.value("opcode", 1) != 2) return static_cast<std::int64_t>(data.size());
  std::size_t pad = 0;
  if (!data.empty() && data.back() == '=') ++pad;
  if (data.size() > 1 && data[data.size() - 2] == '=') ++pad;
  return static_cast<std::int64_t>(data.size() / 4 * 3 - pad);
}

NetworkRecorder::NetworkRecorder(std::size_t max_records) : max_records_(max_records) {}

void NetworkRecorder::begin(std::chrono::steady_clock::time_point origin) {
  std::lock_guard lock(mu_);
  open_ = true;
  origin_ = origin;
  origin_monotonic_s_ = monotonic_seconds(origin);
  gap_ = false;
  pending_.clear();
  sockets_.clear();
  requests_.clear();
  frames_.clear();
  request_bytes_ = ws_bytes_ = 0;
}

void NetworkRecorder::end() {
  std::lock_guard lock(mu_);
  if (!open_) return;
  for (auto& [id, p] : pending_) {
    p.record.transferred_bytes = p.data_bytes;
    request_bytes_ += p.data_bytes;
    if (room()) {
      requests_.push_back(p.record);
    } else {
      gap_ = true;
    }
  }
  pending_.clear();
  open_ = false;
}

double NetworkRecorder::relative_time(const nlohmann::json& params) const {
  if (params.contains("timestamp") && params["timestamp"].is_number()) {
    return params["timestamp"].get<double>() - origin_monotonic_s_;
  }
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - origin_).count();
}

void NetworkRecorder::finish(const std::string& request_id, std::int64_t bytes, bool use_bytes) {
  const auto it = pending_.find(request_id);
  if (it == pending_.end()) return;
  auto rec = it->second.record;
  rec.transferred_bytes = use_bytes ? bytes : it->second.data_bytes;
  pending_.erase(it);
  request_bytes_ += rec.transferred_bytes;
  if (room()) {
    requests_.push_back(std::move(rec));
  } else {
    gap_ = true;
  }
}

void NetworkRecorder::on_event(const std::string& method, const nlohmann::json& params) {
  if (!method.starts_with("Network.")) return;
  std::lock_guard lock(mu_);
  if (!open_) return;
  const auto request_id = params.value("requestId", std::string{});

  if (method == "Network.requestWillBeSent") {
    // A redirect reuses the requestId; the previous hop is complete.
    if (params.contains("redirectResponse")) finish(request_id, 0, false);
    Pending p;
    p.record.t = relative_time(params);
    p.record.url = params.at("request").value("url", std::string{});
    p.record.initiator = params.contains("initiator") ? params["initiator"].value("type", std::string{}) : "";
    p.record.resource_type = params.value("type", std::string{});
    pending_[request_id] = std::move(p);
  } else if (method == "Network.responseReceived") {
    if (auto it = pending_.find(request_id); it != pending_.end()) {
      it->second.record.status_code = params.at("response").value("status", 0);
      if (params.contains("type")) it->second.record.resource_type = params["type"].get<std::string>();
    }
  } else if (method == "Network.dataReceived") {
    if (auto it = pending_.find(request_id); it != pending_.end()) {
      it->second.data_bytes += params.value("encodedDataLength", std::int64_t{0});
    }
  } else if (method == "Network.loadingFinished") {
    finish(request_id, static_cast<std::int64_t>(params.value("encodedDataLength", 0.0)), true);
  } else if (method == "Network.loadingFailed") {
    finish(request_id, 0, false);
  } else if (method == "Network.webSocketCreated") {
    sockets_[request_id] = params.value("url", std::string{});
  } else if (method == "Network.webSocketFrameSent" || method == "Network.webSocketFrameReceived") {
    WsFrameRecord f;
    f.t = relative_time(params);
    f.direction = method == "Network.webSocketFrameSent" ? WsFrameRecord::Direction::sent
                                                         : WsFrameRecord::Direction::received;
    f.payload_bytes = frame_payload_bytes(params.value("response", nlohmann::json::object()));
    if (auto it = sockets_.find(request_id); it != sockets_.end()) f.endpoint_url = it->second;
    ws_bytes_ += f.payload_bytes;
    if (room()) {
      frames_.push_back(std::move(f));
    } else {
      gap_ = true;
    }
  }
}

std::vector<Reading> NetworkRecorder::sample() {
  std::lock_guard lock(mu_);
  return {{"request_bytes", static_cast<double>(request_bytes_)}, {"ws_bytes", static_cast<double>(ws_bytes_)}};
}

std::vector<RequestRecord> NetworkRecorder::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::vector<WsFrameRecord> NetworkRecorder::frames() const {
  std::lock_guard lock(mu_);
  return frames_;
}

bool NetworkRecorder::gap() const {
  std::lock_guard lock(mu_);
  return gap_;
}

}  // namespace webtb::monitors
