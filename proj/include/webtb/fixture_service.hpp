#pragma once

// Local HTTP + WebSocket service hosting the synthetic corpus and the proof-of-work stub.
//
// Pages (query-string parameters override the configured defaults):
//   /control                       static page plus one stylesheet
//   /ads?slots=N&size=B            N distinct /adsrv/slotK resources of B bytes each
//   /miner?workers=W&throttle=T&interval=S&frame_size=F&hps=H&job_size=J
//   /state-test                    plants a cookie, a storage key and a service worker
// Stub:  ws /msp/pow               job on connect, next job after each accepted share
// Ledger: GET /ledger (JSON), POST /ledger/reset

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "webtb/profit_model.hpp"
#include "webtb/signature.hpp"

namespace webtb::fixture {

struct MinerPageParams {
  int workers = 1;
  double throttle = 0.0;            // idle fraction of each 100 ms slice
  double share_interval_s = 1.0;    // one share per interval when hashes_per_share == 0
  std::int64_t hashes_per_share = 0;
  std::int64_t frame_size = 186;    // share payload bytes
  std::int64_t job_size = 0;        // job payload bytes; 0 = natural size
};

struct AdPageParams {
  int slot_count = 3;
  std::int64_t resource_size = 2233;
};

struct FixtureConfig {
  MinerPageParams miner;
  AdPageParams ads;
  std::int64_t control_size = 2048;  // /control body bytes
  std::int64_t asset_size = 1024;    // /static/style.css body bytes
  std::string bind_address = "127.0.0.1";
  unsigned short port = 0;           // 0: ephemeral
};

/// Throws std::invalid_argument when a field is out of range.
void validate(const FixtureConfig& config);
/// {"miner": {"workers", "throttle", "share_interval_s", "hashes_per_share", "frame_size",
///  "job_size"}, "ads": {"slot_count", "resource_size"}, "control_size", "asset_size",
///  "bind_address", "port"}; absent keys keep their defaults.
FixtureConfig fixture_config_from_json(const nlohmann::json& j);
/// Applies recognized query parameters; throws std::invalid_argument on bad values.
MinerPageParams miner_params_from_query(const std::string& target, MinerPageParams defaults);
AdPageParams ad_params_from_query(const std::string& target, AdPageParams defaults);

struct SessionLedger {
  int id = 0;
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  std::int64_t claimed_hashes = 0;
  std::int64_t frames_received = 0;
  std::int64_t frames_sent = 0;
  std::int64_t bytes_received = 0;
  std::int64_t bytes_sent = 0;
  bool open = false;

  std::int64_t payload_bytes() const { return bytes_received + bytes_sent; }
};

struct LedgerSnapshot {
  std::vector<SessionLedger> sessions;

  /// Sum over sessions; id is 0.
  SessionLedger totals() const;
  nlohmann::json to_json() const;
  static LedgerSnapshot from_json(const nlohmann::json& j);
};

/// accepted × hashes_per_share hashes valued with the mining formula.
double revenue_crosscheck(const LedgerSnapshot& ledger, const profit::MiningRateModel& rates,
                          std::int64_t hashes_per_share);

/// Byte size of the response header block the service sends for a body of `body_size`.
std::int64_t response_header_bytes(const std::string& content_type, std::int64_t body_size, bool cacheable);

/// Blacklist entries matching the service's stub endpoint and ad resources.
detect::Blacklist fixture_blacklist();

class FixtureService {
 public:
  /// Binds and starts serving. Throws std::runtime_error when the port is taken.
  explicit FixtureService(FixtureConfig config);
  ~FixtureService();
  FixtureService(const FixtureService&) = delete;
  FixtureService& operator=(const FixtureService&) = delete;

  void stop();
  unsigned short port() const { return port_; }
  std::string base_url() const;
  const FixtureConfig& config() const { return config_; }

  LedgerSnapshot ledger() const;
  void reset_ledger();

 private:
  struct Impl;
  FixtureConfig config_;
  unsigned short port_ = 0;
  std::unique_ptr<Impl> impl_;
};

}  // namespace webtb::fixture
