#include "pwlab/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace pwlab::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  for (std::size_t i = 0; i < key.size(); ++i) {
    const char ch = key[i];
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
    if (!ok || (ch == '.' && key[i + 1] == '.')) return false;
  }
  return true;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e;
}

std::string canonical(ValueType type, const std::string& value) {
  switch (type) {
    case ValueType::real:
      return format_real(parse_real(value));
    case ValueType::integer: {
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size()) throw std::invalid_argument("not an integer");
      return std::to_string(v);
    }
    case ValueType::boolean:
      if (value == "true" || value == "1" || value == "yes" || value == "on") return "true";
      if (value == "false" || value == "0" || value == "no" || value == "off") return "false";
      throw std::invalid_argument("not a boolean");
    case ValueType::text:
      return value;
    case ValueType::rational:
      return Rational::parse(value).str();
    case ValueType::real_list: {
      std::string out;
      for (double x : parse_real_list(value)) {
        if (!out.empty()) out += ", ";
        out += format_real(x);
      }
      return out;
    }
  }
  return value;
}

}  // namespace

std::string to_string(ValueType type) {
  switch (type) {
    case ValueType::real:
      return "real";
    case ValueType::integer:
      return "integer";
    case ValueType::boolean:
      return "boolean";
    case ValueType::text:
      return "text";
    case ValueType::rational:
      return "rational";
    case ValueType::real_list:
      return "list of reals";
  }
  return "?";
}

double parse_real(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  if (parse_number(s, v)) return v;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    std::string head = trim(s.substr(0, s.size() - 2));
    if (!head.empty() && head.back() == '*') head = trim(head.substr(0, head.size() - 1));
    if (head.empty()) return std::numbers::pi;
    if (head == "-") return -std::numbers::pi;
    if (parse_number(head, v)) return v * std::numbers::pi;
  }
  throw std::invalid_argument("cannot parse '" + raw + "' as a real");
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item));
  return out;
}

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

RawConfig parse_text(const std::string& text, const std::string& origin) {
  RawConfig raw;
  raw.origin = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
    const bool dup = std::any_of(raw.entries.begin(), raw.entries.end(), [&](const auto& e) { return e.first == key; });
    if (dup) throw ConfigError(where + ": duplicate key '" + key + "'");
    raw.entries.emplace_back(key, value);
  }
  return raw;
}

RawConfig parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path.string());
}

Resolved resolve(const RawConfig& raw, const Schema& schema) {
  for (const auto& [key, value] : raw.entries) {
    const bool known = std::any_of(schema.begin(), schema.end(), [&](const KeyDef& d) { return d.key == key; });
    if (!known) throw ConfigError(raw.origin + ": unknown key '" + key + "'");
  }
  Resolved out;
  for (const KeyDef& def : schema) {
    auto it = std::find_if(raw.entries.begin(), raw.entries.end(), [&](const auto& e) { return e.first == def.key; });
    std::string value;
    if (it != raw.entries.end()) {
      value = it->second;
    } else if (def.fallback) {
      value = *def.fallback;
    } else {
      throw ConfigError(raw.origin + ": missing required key '" + def.key + "'");
    }
    std::string canon;
    try {
      canon = canonical(def.type, value);
    } catch (const std::exception&) {
      throw ConfigError(raw.origin + ": key '" + def.key + "' expects " + to_string(def.type) + ", got '" + value +
                        "'");
    }
    out.values_[def.key] = {def.type, canon};
    out.ordered_.emplace_back(def.key, canon);
  }
  return out;
}

const std::string& Resolved::lookup(const std::string& key, ValueType type) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("config key '" + key + "' is not defined for this run");
  if (it->second.first != type) {
    throw ConfigError("config key '" + key + "' is " + to_string(it->second.first) + ", read as " + to_string(type));
  }
  return it->second.second;
}

double Resolved::real(const std::string& key) const { return parse_real(lookup(key, ValueType::real)); }

std::int64_t Resolved::integer(const std::string& key) const { return std::stoll(lookup(key, ValueType::integer)); }

bool Resolved::boolean(const std::string& key) const { return lookup(key, ValueType::boolean) == "true"; }

const std::string& Resolved::text(const std::string& key) const { return lookup(key, ValueType::text); }

Rational Resolved::rational(const std::string& key) const {
  return Rational::parse(lookup(key, ValueType::rational));
}

std::vector<double> Resolved::reals(const std::string& key) const {
  return parse_real_list(lookup(key, ValueType::real_list));
}

void Resolved::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
  std::string canon;
  try {
    canon = canonical(it->second.first, value);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects " + to_string(it->second.first) + ", got '" + value + "'");
  }
  it->second.second = canon;
  for (auto& e : ordered_) {
    if (e.first == key) e.second = canon;
  }
}

}  // namespace pwlab::config
