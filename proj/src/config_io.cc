#include "telesched/config_io.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace telesched {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string normalize_key(std::string_view key) {
  std::string k = trim(key);
  std::replace(k.begin(), k.end(), '_', '-');
  if (k.rfind("--", 0) == 0) k.erase(0, 2);
  return k;
}

double to_double(std::string_view key, std::string_view text) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw std::invalid_argument("invalid number for " + std::string(key) + ": '" + s + "'");
  }
  return v;
}

std::uint64_t to_count(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("invalid count for " + std::string(key) + ": '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is{std::string(text)};
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw std::invalid_argument("invalid boolean for " + std::string(key) + ": '" + std::string(text) + "'");
}

// "lambda_e:batch_size:buffer", e.g. "100:4:20".
ScaledSystem to_system(std::string_view text) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream is{std::string(text)};
  while (std::getline(is, part, ':')) parts.push_back(trim(part));
  if (parts.size() != 3) {
    throw std::invalid_argument("system must be lambda_e:batch_size:buffer, got '" + std::string(text) + "'");
  }
  ScaledSystem s;
  s.lambda_e = to_double("systems", parts[0]);
  s.batch_size = to_count("systems", parts[1]);
  s.buffer = parts[2] == "inf" ? kUnboundedCapacity : static_cast<std::size_t>(to_count("systems", parts[2]));
  return s;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

KeyValues read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  return parse_key_values(in);
}

const std::vector<std::string>& setting_keys() {
  static const std::vector<std::string> keys = {
      "scenario",     "tau",       "gamma",        "lambda-r",        "lambda-e",    "batch-size",
      "buffer",       "policy",    "policies",     "seed",            "replications", "horizon",
      "horizon-seconds", "warmup", "batch-order",  "score-drops-as-zero", "batch-sizes", "rates",
      "loads",        "systems",   "threads",      "out"};
  return keys;
}

void apply_setting(ExperimentSpec& spec, std::string_view raw_key, std::string_view raw_value) {
  const std::string key = normalize_key(raw_key);
  const std::string value = trim(raw_value);
  SimConfig& c = spec.base;
  if (key == "scenario") {
    c.scenario = parse_scenario(value);
  } else if (key == "tau") {
    c.noise.tau = to_double(key, value);
  } else if (key == "gamma") {
    c.noise.gamma = to_double(key, value);
  } else if (key == "lambda-r") {
    c.lambda_r = to_double(key, value);
  } else if (key == "lambda-e") {
    c.lambda_e = to_double(key, value);
    spec.rates = {c.lambda_e};
  } else if (key == "batch-size") {
    c.batch_size = to_count(key, value);
    spec.batch_sizes = {c.batch_size};
  } else if (key == "buffer") {
    c.buffer = value == "inf" ? kUnboundedCapacity : static_cast<std::size_t>(to_count(key, value));
  } else if (key == "policy") {
    c.policy = parse_policy(value);
    spec.policies = {c.policy};
  } else if (key == "policies") {
    spec.policies.clear();
    for (const auto& p : split_list(value)) spec.policies.push_back(parse_policy(p));
  } else if (key == "seed") {
    c.seed = to_count(key, value);
  } else if (key == "replications") {
    spec.replications = to_count(key, value);
  } else if (key == "horizon") {
    c.horizon_departures = to_count(key, value);
  } else if (key == "horizon-seconds") {
    c.horizon_seconds = to_double(key, value);
  } else if (key == "warmup") {
    c.warmup = to_count(key, value);
  } else if (key == "batch-order") {
    c.batch_order = parse_batch_order(value);
  } else if (key == "score-drops-as-zero") {
    c.score_drops_as_zero = to_bool(key, value);
  } else if (key == "batch-sizes") {
    spec.batch_sizes.clear();
    for (const auto& b : split_list(value)) spec.batch_sizes.push_back(to_count(key, b));
  } else if (key == "rates") {
    spec.rates.clear();
    for (const auto& r : split_list(value)) spec.rates.push_back(to_double(key, r));
  } else if (key == "loads") {
    spec.loads.clear();
    for (const auto& r : split_list(value)) spec.loads.push_back(to_double(key, r));
  } else if (key == "systems") {
    spec.systems.clear();
    for (const auto& s : split_list(value)) spec.systems.push_back(to_system(s));
  } else if (key == "threads") {
    spec.threads = static_cast<unsigned>(to_count(key, value));
  } else if (key == "out") {
    spec.out = value;
  } else {
    throw std::invalid_argument("unknown setting '" + std::string(raw_key) + "'");
  }
}

void apply_settings(ExperimentSpec& spec, const KeyValues& values) {
  for (const auto& [k, v] : values) apply_setting(spec, k, v);
}

}  // namespace telesched
