#include "quest/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "quest/errors.hpp"

namespace quest {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
  Int out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("bad integer for " + std::string(key) + ": '" + std::string(value) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    double d = std::stod(std::string(value), &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + std::string(key) + ": '" + std::string(value) + "'");
  }
}

}  // namespace

SystemConfig parse_config(std::string_view text) {
  SystemConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));

    if (key == "epoch_duration") {
      cfg.epoch_duration_s = parse_int<std::int64_t>(key, value);
    } else if (key == "digest_digits") {
      cfg.digest_digits = parse_int<int>(key, value);
    } else if (key == "alphabet_size") {
      cfg.alphabet_size = parse_int<int>(key, value);
    } else if (key == "server_count") {
      cfg.server_count = parse_int<int>(key, value);
    } else if (key == "field_prime") {
      cfg.field_prime = parse_int<std::uint64_t>(key, value);
    } else if (key == "distance_index") {
      cfg.distance_index = parse_double(key, value);
    } else if (key == "top_k") {
      cfg.top_k = parse_int<int>(key, value);
    } else if (key == "acl_pad_bytes") {
      cfg.acl_pad_bytes = parse_int<std::size_t>(key, value);
    } else if (key.starts_with("capacity.")) {
      LocationId loc(key.substr(9));
      cfg.capacities[loc] = parse_int<std::int64_t>(key, value);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" +
                        std::string(key) + "'");
    }
  }
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const SystemConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "epoch_duration=" << cfg.epoch_duration_s << '\n'
      << "digest_digits=" << cfg.digest_digits << '\n'
      << "alphabet_size=" << cfg.alphabet_size << '\n'
      << "server_count=" << cfg.server_count << '\n'
      << "field_prime=" << cfg.field_prime << '\n'
      << "distance_index=" << cfg.distance_index << '\n'
      << "top_k=" << cfg.top_k << '\n'
      << "acl_pad_bytes=" << cfg.acl_pad_bytes << '\n';
  for (const auto& [loc, cap] : cfg.capacities) {
    out << "capacity." << loc.str() << '=' << cap << '\n';
  }
  return out.str();
}

void save_config(const SystemConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config " + path.string());
  out << format_config(cfg);
}

}  // namespace quest
