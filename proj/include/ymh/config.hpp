/* config.hpp
 *
 * Line-oriented `key = value` run configuration with [sections].  Unknown
 * keys are rejected; the run-level constants must satisfy
 *   gamma in (0,1),  gamma1 in (1,2),
 *   epsilon < min{(1-gamma)/2, 1e-3 (gamma1-1)},  R > 1.
 * Serialisation is canonical (fixed key order, shortest round-trip floats),
 * so serialize(parse(s)) is a fixed point.
 */
#ifndef YMH_CONFIG_HPP
#define YMH_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace ymh {

struct RunConfig {
  // [run]
  std::string model = "mkg";  // mkg | su2
  double h = 1.0 / 256.0;
  double v_max = 1.0;
  double t_origin = 0.0;
  int keep_stride = 0;
  std::uint64_t seed = 1;
  std::string output = "out";
  double ceiling = 1e8;

  // [params]
  double gamma = 0.5;
  double gamma1 = 1.5;
  double epsilon = 2e-4;
  double R = 2.0;

  // [data]
  std::string family = "bump";
  double amplitude = 1.0;
  double support = 0.25;
  double sigma = -0.5;
  double delta = 0.1;
  double charge = 0.0;

  // [diagnostics]
  std::vector<double> u_rays;
  std::vector<double> v_rays;
  std::vector<double> r_lines;
  bool boundary_charge = false;
  int energy_stride = 0;
  int checkpoint_stride = 0;

  std::uint64_t hash() const;  // FNV-1a of the canonical serialisation
};

RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& cfg);

}  // namespace ymh

#endif
