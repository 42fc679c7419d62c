#include "quest/publisher/publisher.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "quest/bytes.hpp"
#include "quest/errors.hpp"

namespace quest::publisher {

using nlohmann::json;

Publisher Publisher::from_ids(const std::vector<DeviceId>& ids, std::string salt,
                              TimestampMs issued_at) {
  Publisher p;
  p.salt_ = std::move(salt);
  p.issued_at_ = issued_at;
  for (const auto& d : ids) p.hashes_.insert(p.hash_id(d));
  p.available_ = true;
  return p;
}

Publisher::Publisher(const Publisher& other)
    : salt_(other.salt_),
      issued_at_(other.issued_at_),
      hashes_(other.hashes_),
      available_(other.available_),
      audit_(other.audit_log()) {}

Publisher& Publisher::operator=(const Publisher& other) {
  if (this == &other) return *this;
  auto log = other.audit_log();
  salt_ = other.salt_;
  issued_at_ = other.issued_at_;
  hashes_ = other.hashes_;
  available_ = other.available_;
  std::lock_guard lock(audit_mutex_);
  audit_ = std::move(log);
  return *this;
}

std::string Publisher::hash_id(const DeviceId& device) const {
  std::string input = salt_ + device.str();
  unsigned char out[32];
  EVP_Digest(input.data(), input.size(), out, nullptr, EVP_sha256(), nullptr);
  return to_hex(ByteView(out, sizeof out));
}

bool Publisher::verify(const DeviceId& device) {
  AuditEntry e;
  e.device_hash = hash_id(device);
  if (!available_) {
    e.status = "list-unavailable";
  } else {
    e.status = "ok";
    e.result = hashes_.count(e.device_hash) != 0;
  }
  std::lock_guard lock(audit_mutex_);
  e.sequence = audit_.size() + 1;
  audit_.push_back(e);
  return e.result;
}

std::vector<AuditEntry> Publisher::audit_log() const {
  std::lock_guard lock(audit_mutex_);
  return audit_;
}

void Publisher::write_audit_jsonl(std::ostream& out) const {
  for (const auto& e : audit_log()) {
    out << json{{"seq", e.sequence}, {"device_hash", e.device_hash}, {"result", e.result},
                {"status", e.status}}
               .dump()
        << '\n';
  }
}

Publisher Publisher::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return Publisher{};
  try {
    const json doc = json::parse(in);
    Publisher p;
    p.salt_ = doc.at("salt").get<std::string>();
    p.issued_at_ = doc.value("issued_at", TimestampMs{0});
    for (const auto& h : doc.at("hashes")) p.hashes_.insert(h.get<std::string>());
    p.available_ = true;
    return p;
  } catch (const json::exception&) {
    return Publisher{};
  }
}

void Publisher::save(const std::filesystem::path& path) const {
  std::vector<std::string> sorted(hashes_.begin(), hashes_.end());
  std::sort(sorted.begin(), sorted.end());
  const json doc{{"salt", salt_}, {"issued_at", issued_at_}, {"hashes", sorted}};
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

void NotificationRegistry::add(const DeviceId& device, std::string contact) {
  contacts_[device] = std::move(contact);
}

NotificationRegistry NotificationRegistry::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read registry " + path.string());
  NotificationRegistry r;
  try {
    const json doc = json::parse(in);
    for (const auto& [id, contact] : doc.items()) r.add(DeviceId(id), contact.get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError("malformed registry " + path.string() + ": " + e.what());
  }
  return r;
}

void NotificationRegistry::save(const std::filesystem::path& path) const {
  json doc = json::object();
  for (const auto& [d, c] : contacts_) doc[d.str()] = c;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::vector<DeviceId> NotificationRegistry::record_notifications(const std::set<DeviceId>& ids) {
  std::vector<DeviceId> out;
  for (const auto& d : ids) {
    auto it = contacts_.find(d);
    if (it == contacts_.end()) continue;
    deliveries_.emplace_back(d, it->second);
    out.push_back(d);
  }
  return out;
}

}  // namespace quest::publisher
