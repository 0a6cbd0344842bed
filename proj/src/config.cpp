#include "ymh/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ymh/io.hpp"

namespace ymh {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

std::string list_str(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i)
    s += format_double(v[i]) + (i + 1 < v.size() ? "," : "");
  return s;
}

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument("config: " + msg);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::map<std::string, bool> seen;
  std::string section;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::string s = trim(line);
    size_t hash_pos = s.find('#');
    if (hash_pos != std::string::npos) s = trim(s.substr(0, hash_pos));
    if (s.empty()) continue;
    if (s.front() == '[' && s.back() == ']') {
      section = s.substr(1, s.size() - 2);
      if (section != "run" && section != "params" && section != "data" &&
          section != "diagnostics")
        fail("unknown section [" + section + "] at line " +
             std::to_string(lineno));
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      fail("expected `key = value` at line " + std::to_string(lineno));
    std::string key = section + "." + trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    seen[key] = true;

    if (key == "run.model") c.model = val;
    else if (key == "run.h") c.h = std::stod(val);
    else if (key == "run.v_max") c.v_max = std::stod(val);
    else if (key == "run.t_origin") c.t_origin = std::stod(val);
    else if (key == "run.keep_stride") c.keep_stride = std::stoi(val);
    else if (key == "run.seed") c.seed = std::stoull(val);
    else if (key == "run.output") c.output = val;
    else if (key == "run.ceiling") c.ceiling = std::stod(val);
    else if (key == "params.gamma") c.gamma = std::stod(val);
    else if (key == "params.gamma1") c.gamma1 = std::stod(val);
    else if (key == "params.epsilon") c.epsilon = std::stod(val);
    else if (key == "params.R") c.R = std::stod(val);
    else if (key == "data.family") c.family = val;
    else if (key == "data.amplitude") c.amplitude = std::stod(val);
    else if (key == "data.support") c.support = std::stod(val);
    else if (key == "data.sigma") c.sigma = std::stod(val);
    else if (key == "data.delta") c.delta = std::stod(val);
    else if (key == "data.charge") c.charge = std::stod(val);
    else if (key == "diagnostics.u_rays") c.u_rays = parse_list(val);
    else if (key == "diagnostics.v_rays") c.v_rays = parse_list(val);
    else if (key == "diagnostics.r_lines") c.r_lines = parse_list(val);
    else if (key == "diagnostics.boundary_charge") c.boundary_charge = val == "true" || val == "1";
    else if (key == "diagnostics.energy_stride") c.energy_stride = std::stoi(val);
    else if (key == "diagnostics.checkpoint_stride") c.checkpoint_stride = std::stoi(val);
    else fail("unknown key `" + key + "` at line " + std::to_string(lineno));
  }

  static const char* required[] = {"run.model", "run.h", "run.v_max",
                                   "data.family"};
  std::string missing;
  for (const char* k : required)
    if (!seen.count(k)) missing += std::string(missing.empty() ? "" : ", ") + k;
  if (!missing.empty()) fail("missing required keys: " + missing);

  if (c.model != "mkg" && c.model != "su2")
    fail("model must be `mkg` or `su2`");
  if (!(c.h > 0.0)) fail("violated h > 0");
  if (!(c.v_max > 0.0)) fail("violated v_max > 0");
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) fail("violated gamma in (0,1)");
  if (!(c.gamma1 > 1.0 && c.gamma1 < 2.0)) fail("violated gamma1 in (1,2)");
  double eps_max = std::min(0.5 * (1.0 - c.gamma), 1e-3 * (c.gamma1 - 1.0));
  if (!(c.epsilon > 0.0 && c.epsilon < eps_max))
    fail("violated epsilon < min{(1-gamma)/2, 1e-3 (gamma1-1)} = " +
         format_double(eps_max));
  if (!(c.R > 1.0)) fail("violated R > 1");
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::string s;
  s += "[run]\n";
  s += "model = " + c.model + "\n";
  s += "h = " + format_double(c.h) + "\n";
  s += "v_max = " + format_double(c.v_max) + "\n";
  s += "t_origin = " + format_double(c.t_origin) + "\n";
  s += "keep_stride = " + std::to_string(c.keep_stride) + "\n";
  s += "seed = " + std::to_string(c.seed) + "\n";
  s += "output = " + c.output + "\n";
  s += "ceiling = " + format_double(c.ceiling) + "\n";
  s += "[params]\n";
  s += "gamma = " + format_double(c.gamma) + "\n";
  s += "gamma1 = " + format_double(c.gamma1) + "\n";
  s += "epsilon = " + format_double(c.epsilon) + "\n";
  s += "R = " + format_double(c.R) + "\n";
  s += "[data]\n";
  s += "family = " + c.family + "\n";
  s += "amplitude = " + format_double(c.amplitude) + "\n";
  s += "support = " + format_double(c.support) + "\n";
  s += "sigma = " + format_double(c.sigma) + "\n";
  s += "delta = " + format_double(c.delta) + "\n";
  s += "charge = " + format_double(c.charge) + "\n";
  s += "[diagnostics]\n";
  if (!c.u_rays.empty()) s += "u_rays = " + list_str(c.u_rays) + "\n";
  if (!c.v_rays.empty()) s += "v_rays = " + list_str(c.v_rays) + "\n";
  if (!c.r_lines.empty()) s += "r_lines = " + list_str(c.r_lines) + "\n";
  s += "boundary_charge = " + std::string(c.boundary_charge ? "true" : "false") + "\n";
  s += "energy_stride = " + std::to_string(c.energy_stride) + "\n";
  s += "checkpoint_stride = " + std::to_string(c.checkpoint_stride) + "\n";
  return s;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(serialize_config(*this)); }

}  // namespace ymh
