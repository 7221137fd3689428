#include "hpdg/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>

namespace hpdg
{

std::string to_string(RefinementMode mode)
{
  switch (mode)
  {
  case RefinementMode::uniform_h:
    return "uniform_h";
  case RefinementMode::uniform_p:
    return "uniform_p";
  case RefinementMode::adaptive_h:
    return "adaptive_h";
  case RefinementMode::adaptive_hp:
    return "adaptive_hp";
  }
  return "unknown";
}

std::optional<RefinementMode> parse_mode(std::string_view name)
{
  for (auto m : {RefinementMode::uniform_h, RefinementMode::uniform_p,
                 RefinementMode::adaptive_h, RefinementMode::adaptive_hp})
    if (to_string(m) == name)
      return m;
  return std::nullopt;
}

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string())
                         + (field.empty() ? std::string() : "'" + field + "': ") + message),
      line_(line), field_(std::move(field))
{
}

namespace
{

std::string trim(const std::string& s)
{
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos)
    return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v, int line)
{
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(line, key, "expected a number, got '" + v + "'");
  return x;
}

long to_long(const std::string& key, const std::string& v, int line)
{
  long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(line, key, "expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v, int line)
{
  if (v == "true" || v == "1" || v == "yes" || v == "on")
    return true;
  if (v == "false" || v == "0" || v == "no" || v == "off")
    return false;
  throw ConfigError(line, key, "expected true or false, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&, int)>;

const std::vector<std::pair<std::string, Setter>>& setters()
{
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"benchmark",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         const auto id = parse_benchmark(v);
         if (!id)
           throw ConfigError(l, k, "unknown benchmark '" + v + "'");
         c.benchmark = *id;
       }},
      {"k", [](RunConfig& c, const std::string& k, const std::string& v,
               int l) { c.k = to_double(k, v, l); }},
      {"mode",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         const auto m = parse_mode(v);
         if (!m)
           throw ConfigError(l, k, "unknown mode '" + v + "'");
         c.mode = *m;
       }},
      {"alpha", [](RunConfig& c, const std::string& k, const std::string& v,
                   int l) { c.dg.alpha = to_double(k, v, l); }},
      {"beta", [](RunConfig& c, const std::string& k, const std::string& v,
                  int l) { c.dg.beta = to_double(k, v, l); }},
      {"gamma", [](RunConfig& c, const std::string& k, const std::string& v,
                   int l) { c.dg.gamma = to_double(k, v, l); }},
      {"marking",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         if (v == "maximum")
           c.marking.strategy = MarkingStrategy::maximum;
         else if (v == "fixed_fraction")
           c.marking.strategy = MarkingStrategy::fixed_fraction;
         else
           throw ConfigError(l, k, "unknown marking strategy '" + v + "'");
       }},
      {"theta", [](RunConfig& c, const std::string& k, const std::string& v,
                   int l) { c.marking.theta = to_double(k, v, l); }},
      {"refinement",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         if (v == "nvb")
           c.refinement = RefinementStrategy::nvb;
         else if (v == "rgb")
           c.refinement = RefinementStrategy::rgb;
         else
           throw ConfigError(l, k, "unknown refinement strategy '" + v + "'");
       }},
      {"gamma_h", [](RunConfig& c, const std::string& k, const std::string& v,
                     int l) { c.hp.gamma_h = to_double(k, v, l); }},
      {"gamma_p", [](RunConfig& c, const std::string& k, const std::string& v,
                     int l) { c.hp.gamma_p = to_double(k, v, l); }},
      {"gamma_n", [](RunConfig& c, const std::string& k, const std::string& v,
                     int l) { c.hp.gamma_n = to_double(k, v, l); }},
      {"flux_degree_increment",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         c.reconstruction.flux_degree_increment = static_cast<int>(to_long(k, v, l));
       }},
      {"singular_extra",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         c.reconstruction.singular_extra = static_cast<int>(to_long(k, v, l));
       }},
      {"c_res", [](RunConfig& c, const std::string& k, const std::string& v,
                   int l) { c.c_res = to_double(k, v, l); }},
      {"underresolved", [](RunConfig& c, const std::string& k, const std::string& v,
                           int l) { c.underresolved = to_bool(k, v, l); }},
      {"degree", [](RunConfig& c, const std::string& k, const std::string& v,
                    int l) { c.degree = static_cast<int>(to_long(k, v, l)); }},
      {"cell_size", [](RunConfig& c, const std::string& k, const std::string& v,
                       int l) { c.cell_size = to_double(k, v, l); }},
      {"theta_deg", [](RunConfig& c, const std::string& k, const std::string& v,
                       int l) { c.case_params.theta_deg = to_double(k, v, l); }},
      {"n1", [](RunConfig& c, const std::string& k, const std::string& v,
                int l) { c.case_params.n1 = to_double(k, v, l); }},
      {"n2", [](RunConfig& c, const std::string& k, const std::string& v,
                int l) { c.case_params.n2 = to_double(k, v, l); }},
      {"beam_angle_deg", [](RunConfig& c, const std::string& k, const std::string& v,
                            int l) { c.case_params.beam_angle_deg = to_double(k, v, l); }},
      {"beam_w0", [](RunConfig& c, const std::string& k, const std::string& v,
                     int l) { c.case_params.beam_w0 = to_double(k, v, l); }},
      {"beam_origin_x", [](RunConfig& c, const std::string& k, const std::string& v,
                           int l) { c.case_params.beam_origin.x() = to_double(k, v, l); }},
      {"beam_origin_y", [](RunConfig& c, const std::string& k, const std::string& v,
                           int l) { c.case_params.beam_origin.y() = to_double(k, v, l); }},
      {"max_levels",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         c.max_levels = static_cast<int>(to_long(k, v, l));
       }},
      {"max_dofs", [](RunConfig& c, const std::string& k, const std::string& v,
                      int l) { c.max_dofs = to_long(k, v, l); }},
      {"output", [](RunConfig& c, const std::string&, const std::string& v,
                    int) { c.output = v; }},
      {"snapshot", [](RunConfig& c, const std::string&, const std::string& v,
                      int) { c.snapshot = v; }},
      {"residual_estimator",
       [](RunConfig& c, const std::string& k, const std::string& v, int l) {
         c.residual_estimator = to_bool(k, v, l);
       }},
      {"true_error", [](RunConfig& c, const std::string& k, const std::string& v,
                        int l) { c.true_error = to_bool(k, v, l); }},
      {"timing", [](RunConfig& c, const std::string& k, const std::string& v,
                    int l) { c.timing = to_bool(k, v, l); }},
  };
  return table;
}

} // namespace

const std::vector<std::string>& config_keys()
{
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, fn] : setters())
      k.push_back(name);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value,
                      int line)
{
  for (const auto& [name, fn] : setters())
    if (name == key)
    {
      if (value.empty())
        throw ConfigError(line, key, "missing value");
      fn(config, key, value, line);
      return;
    }
  throw ConfigError(line, key, "unknown key");
}

RunConfig parse_config(std::istream& in)
{
  RunConfig config;
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw))
  {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(raw.substr(0, hash));
    if (text.empty())
      continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, "", "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty())
      throw ConfigError(line, "", "missing key");
    if (!seen.insert(key).second)
      throw ConfigError(line, key, "duplicate key");
    set_config_value(config, key, value, line);
  }
  validate(config);
  return config;
}

RunConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError(0, "", "cannot open config file '" + path + "'");
  return parse_config(in);
}

void validate(const RunConfig& c)
{
  if (!(c.k > 0.0))
    throw ConfigError(0, "k", "must be positive");
  if (!(c.dg.alpha > 0.0))
    throw ConfigError(0, "alpha", "must be positive");
  if (!(c.dg.beta > 0.0))
    throw ConfigError(0, "beta", "must be positive");
  if (!(c.dg.gamma > 0.0 && c.dg.gamma < 1.0 / 3.0))
    throw ConfigError(0, "gamma", "must lie in (0, 1/3)");
  if (!(c.marking.theta > 0.0 && c.marking.theta <= 1.0))
    throw ConfigError(0, "theta", "must lie in (0, 1]");
  if (c.c_res && !(*c.c_res > 0.0))
    throw ConfigError(0, "c_res", "must be positive");
  if (c.degree && *c.degree < 1)
    throw ConfigError(0, "degree", "must be at least 1");
  if (c.cell_size && !(*c.cell_size > 0.0))
    throw ConfigError(0, "cell_size", "must be positive");
  if (c.max_levels < 0)
    throw ConfigError(0, "max_levels", "must be non-negative");
  if (c.max_dofs <= 0)
    throw ConfigError(0, "max_dofs", "must be positive");
  if (c.reconstruction.flux_degree_increment < 1)
    throw ConfigError(0, "flux_degree_increment", "must be at least 1");
  if (c.reconstruction.singular_extra < 0)
    throw ConfigError(0, "singular_extra", "must be non-negative");
  if (!(c.hp.gamma_h > 0.0 && c.hp.gamma_p > 0.0 && c.hp.gamma_n > 0.0))
    throw ConfigError(0, "gamma_h", "hp constants must be positive");
  if (!(c.case_params.theta_deg >= 0.0 && c.case_params.theta_deg < 90.0))
    throw ConfigError(0, "theta_deg", "must lie in [0, 90)");
  if (c.case_params.beam_w0 < 0.0)
    throw ConfigError(0, "beam_w0", "must be non-negative");
  if (c.output.empty())
    throw ConfigError(0, "output", "must not be empty");
}

} // namespace hpdg
