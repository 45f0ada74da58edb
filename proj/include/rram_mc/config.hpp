#pragma once

// Flat `section.key = value` run configuration. Blank lines and lines
// starting with '#' are ignored; trailing '#' comments are stripped.

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include <json.hpp>

#include "rram_mc/error.hpp"
#include "rram_mc/format.hpp"
#include "rram_mc/trainer.hpp"

namespace rram_mc {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  std::string_view digits = text;
  if constexpr (std::is_floating_point_v<T>)
    if (digits.size() > 1 && digits.front() == '+') digits.remove_prefix(1);
  const char* end = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(digits.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + std::string(text) + "' as a number");
  return value;
}

struct Field {
  std::function<void(RunConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const RunConfig&)> get;
  std::function<nlohmann::json(const RunConfig&)> to_json;
};

template <class T>
Field number_field(T RunConfig::*top) {
  return {[top](RunConfig& c, std::string_view k, std::string_view v) { c.*top = parse_number<T>(k, v); },
          [top](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_exact(c.*top);
            else return std::to_string(c.*top);
          },
          [top](const RunConfig& c) { return nlohmann::json(c.*top); }};
}

template <class Section, class T>
Field nested_field(Section RunConfig::*section, T Section::*member) {
  return {[=](RunConfig& c, std::string_view k, std::string_view v) { (c.*section).*member = parse_number<T>(k, v); },
          [=](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_exact((c.*section).*member);
            else return std::to_string((c.*section).*member);
          },
          [=](const RunConfig& c) { return nlohmann::json((c.*section).*member); }};
}

// Ordered so that config echoes list keys section by section.
inline const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = [] {
    std::vector<std::pair<std::string, Field>> t;
    t.emplace_back("run.mode", Field{[](RunConfig& c, std::string_view, std::string_view v) {
                                       try {
                                         c.mode = parse_mode(v);
                                       } catch (const InvalidInput& e) {
                                         throw ConfigError(std::string("config key 'run.mode': ") + e.what());
                                       }
                                     },
                                     [](const RunConfig& c) { return std::string(to_string(c.mode)); },
                                     [](const RunConfig& c) { return nlohmann::json(std::string(to_string(c.mode))); }});
    t.emplace_back("run.episodes", number_field(&RunConfig::episodes));
    t.emplace_back("run.seed", number_field(&RunConfig::seed));
    t.emplace_back("run.program_tolerance", number_field(&RunConfig::program_tolerance));
    t.emplace_back("run.max_program_pulses", number_field(&RunConfig::max_program_pulses));
    t.emplace_back("run.sigma_read", number_field(&RunConfig::sigma_read));

    t.emplace_back("device.g_min", nested_field(&RunConfig::device, &DeviceParams::g_min));
    t.emplace_back("device.g_max", nested_field(&RunConfig::device, &DeviceParams::g_max));
    t.emplace_back("device.a_set", nested_field(&RunConfig::device, &DeviceParams::a_set));
    t.emplace_back("device.a_reset", nested_field(&RunConfig::device, &DeviceParams::a_reset));
    t.emplace_back("device.sigma_c2c", nested_field(&RunConfig::device, &DeviceParams::sigma_c2c));
    t.emplace_back("device.sigma_d2d", nested_field(&RunConfig::device, &DeviceParams::sigma_d2d));
    t.emplace_back("device.v_set", nested_field(&RunConfig::device, &DeviceParams::v_set));
    t.emplace_back("device.v_reset", nested_field(&RunConfig::device, &DeviceParams::v_reset));
    t.emplace_back("device.v_read", nested_field(&RunConfig::device, &DeviceParams::v_read));
    t.emplace_back("device.t_pulse", nested_field(&RunConfig::device, &DeviceParams::t_pulse));
    t.emplace_back("device.t_read", nested_field(&RunConfig::device, &DeviceParams::t_read));
    t.emplace_back("device.weight_ratio", number_field(&RunConfig::weight_ratio));

    t.emplace_back("env.gravity", nested_field(&RunConfig::env, &EnvParams::gravity));
    t.emplace_back("env.cart_mass", nested_field(&RunConfig::env, &EnvParams::cart_mass));
    t.emplace_back("env.pole_mass", nested_field(&RunConfig::env, &EnvParams::pole_mass));
    t.emplace_back("env.pole_half_length", nested_field(&RunConfig::env, &EnvParams::pole_half_length));
    t.emplace_back("env.force_mag", nested_field(&RunConfig::env, &EnvParams::force_mag));
    t.emplace_back("env.dt", nested_field(&RunConfig::env, &EnvParams::dt));
    t.emplace_back("env.x_limit", nested_field(&RunConfig::env, &EnvParams::x_limit));
    t.emplace_back("env.theta_limit", nested_field(&RunConfig::env, &EnvParams::theta_limit));
    t.emplace_back("env.max_steps", nested_field(&RunConfig::env, &EnvParams::max_steps));

    t.emplace_back("agent.gamma", nested_field(&RunConfig::agent, &AgentConfig::gamma));
    t.emplace_back("agent.epsilon_start", nested_field(&RunConfig::agent, &AgentConfig::epsilon_start));
    t.emplace_back("agent.epsilon_decay", nested_field(&RunConfig::agent, &AgentConfig::epsilon_decay));
    t.emplace_back("agent.epsilon_min", nested_field(&RunConfig::agent, &AgentConfig::epsilon_min));
    t.emplace_back("agent.r_max", nested_field(&RunConfig::agent, &AgentConfig::r_max));
    return t;
  }();
  return table;
}

inline const Field* find_field(std::string_view key) {
  for (const auto& [name, field] : fields())
    if (name == key) return &field;
  return nullptr;
}

}  // namespace detail

inline std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& entry : detail::fields()) keys.push_back(entry.first);
  return keys;
}

// Applies one `key = value` assignment on top of `cfg`.
inline void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  const detail::Field* f = detail::find_field(key);
  if (!f) throw ConfigError("unknown config key '" + std::string(key) + "'");
  f->set(cfg, key, value);
}

inline void validate_config(const RunConfig& cfg) {
  try {
    cfg.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

inline RunConfig parse_config(std::string_view text, std::string_view origin = "<config>") {
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const auto where = [&] { return std::string(origin) + ":" + std::to_string(line_no) + ": "; };
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where() + "expected 'key = value'");
    const std::string_view key = detail::trim(line.substr(0, eq));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where() + "expected 'key = value'");
    if (!seen.insert(std::string(key)).second) throw ConfigError(where() + "duplicate key '" + std::string(key) + "'");
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where() + e.what());
    }
  }
  validate_config(cfg);
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

// Every key with its resolved value, in the same syntax parse_config accepts.
inline std::string format_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [name, field] : detail::fields()) out += name + " = " + field.get(cfg) + "\n";
  return out;
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, field] : detail::fields()) j[name] = field.to_json(cfg);
  return j;
}

}  // namespace rram_mc
