/* io.hpp
 *
 * Deterministic serialisation: CSV emission (17 significant digits, no
 * timestamps in bodies), binary checkpoints with bit-exact round-trip,
 * FNV-1a config hashing, and per-directory lockfiles.
 */
#ifndef YMH_IO_HPP
#define YMH_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace ymh {

struct ProbeSeries;  // solver.hpp

std::string format_double(double x);  // shortest round-trip decimal

std::uint64_t fnv1a64(const std::string& s);

// CSV with a single header row; every cell printed via format_double.
void write_csv(const std::string& path,
               const std::vector<std::string>& cols,
               const std::vector<std::vector<double>>& rows);
void write_probe_csv(const std::string& dir, const ProbeSeries& series);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& body);

// Exclusive ownership of an output directory (creates dir if needed).
// Throws if the lock is already held.
class DirLock {
 public:
  explicit DirLock(const std::string& dir);
  ~DirLock();
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  std::string path_;
};

}  // namespace ymh

#endif
