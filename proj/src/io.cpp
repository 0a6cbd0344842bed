#include "ymh/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "ymh/march_state.hpp"

namespace ymh {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_csv(const std::string& path, const std::vector<std::string>& cols,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  for (size_t i = 0; i < cols.size(); ++i)
    f << cols[i] << (i + 1 < cols.size() ? "," : "\n");
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      f << format_double(row[i]) << (i + 1 < row.size() ? "," : "\n");
  }
}

void write_probe_csv(const std::string& dir, const ProbeSeries& series) {
  write_csv(dir + "/" + series.name + ".csv", series.cols, series.rows);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(f),
                     std::istreambuf_iterator<char>());
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << body;
}

DirLock::DirLock(const std::string& dir) {
  std::filesystem::create_directories(dir);
  path_ = dir + "/.lock";
  FILE* f = std::fopen(path_.c_str(), "wx");
  if (!f)
    throw std::runtime_error("output directory is locked: " + dir);
  std::fclose(f);
}

DirLock::~DirLock() { std::remove(path_.c_str()); }

// ---------------------------------------------------------------------------
// Checkpoints.  Format: text header lines, then "payload\n" followed by raw
// little-endian doubles in a fixed order.  Round-trip is bit-exact.
// ---------------------------------------------------------------------------

namespace {

struct Writer {
  std::ofstream f;
  explicit Writer(const std::string& path) : f(path, std::ios::binary) {
    if (!f) throw std::runtime_error("cannot open " + path);
  }
  void line(const std::string& s) { f << s << "\n"; }
  void raw(const void* p, size_t n) { f.write(static_cast<const char*>(p), n); }
  void u64(std::uint64_t x) { raw(&x, sizeof x); }
  void i32(std::int32_t x) { raw(&x, sizeof x); }
  void real(double x) { raw(&x, sizeof x); }
  void vec(const std::vector<double>& v) {
    u64(v.size());
    if (!v.empty()) raw(v.data(), v.size() * sizeof(double));
  }
  void cvec(const std::vector<cplx>& v) {
    u64(v.size());
    if (!v.empty()) raw(v.data(), v.size() * sizeof(cplx));
  }
  void str(const std::string& s) {
    u64(s.size());
    raw(s.data(), s.size());
  }
};

struct Reader {
  std::ifstream f;
  explicit Reader(const std::string& path) : f(path, std::ios::binary) {
    if (!f) throw std::runtime_error("cannot open " + path);
  }
  std::string line() {
    std::string s;
    std::getline(f, s);
    return s;
  }
  void raw(void* p, size_t n) {
    f.read(static_cast<char*>(p), n);
    if (size_t(f.gcount()) != n)
      throw std::runtime_error("truncated checkpoint");
  }
  std::uint64_t u64() {
    std::uint64_t x;
    raw(&x, sizeof x);
    return x;
  }
  std::int32_t i32() {
    std::int32_t x;
    raw(&x, sizeof x);
    return x;
  }
  double real() {
    double x;
    raw(&x, sizeof x);
    return x;
  }
  std::vector<double> vec() {
    std::vector<double> v(u64());
    if (!v.empty()) raw(v.data(), v.size() * sizeof(double));
    return v;
  }
  std::vector<cplx> cvec() {
    std::vector<cplx> v(u64());
    if (!v.empty()) raw(v.data(), v.size() * sizeof(cplx));
    return v;
  }
  std::string str() {
    std::string s(u64(), '\0');
    if (!s.empty()) raw(s.data(), s.size());
    return s;
  }
};

void put_probe(Writer& w, const ProbeSeries& p) {
  w.str(p.name);
  w.u64(p.cols.size());
  for (const auto& c : p.cols) w.str(c);
  w.u64(p.rows.size());
  for (const auto& r : p.rows) w.vec(r);
}

ProbeSeries get_probe(Reader& r) {
  ProbeSeries p;
  p.name = r.str();
  p.cols.resize(r.u64());
  for (auto& c : p.cols) c = r.str();
  p.rows.resize(r.u64());
  for (auto& row : p.rows) row = r.vec();
  return p;
}

void put_grid(Writer& w, const NullGrid& g) {
  w.real(g.h);
  w.i32(g.n_v);
  w.real(g.t_origin);
}

NullGrid get_grid(Reader& r) {
  NullGrid g;
  g.h = r.real();
  g.n_v = r.i32();
  g.t_origin = r.real();
  return g;
}

}  // namespace

void write_march_checkpoint(const std::string& path, const MarchState& st) {
  Writer w(path + ".tmp");
  w.line("YMHCKPT1");
  w.line(st.model == Model::mkg ? "model mkg" : "model su2");
  w.line("diag " + std::to_string(st.next_diag));
  w.line("payload");
  put_grid(w, st.grid);
  // options
  w.i32(st.opt.keep_stride);
  w.real(st.opt.ceiling);
  w.u64(st.opt.probes.u_rays.size());
  for (double u : st.opt.probes.u_rays) w.real(u);
  w.u64(st.opt.probes.v_rays.size());
  for (double v : st.opt.probes.v_rays) w.real(v);
  w.u64(st.opt.probes.r_lines.size());
  for (double x : st.opt.probes.r_lines) w.real(x);
  w.i32(st.opt.probes.boundary_charge ? 1 : 0);
  w.i32(st.opt.probes.energy_stride);
  w.str(st.opt.checkpoint_path);
  w.i32(st.opt.checkpoint_stride);
  w.i32(st.opt.stop_after_diagonal);
  // march state
  w.real(st.w_axis);
  w.i32(st.next_diag);
  w.cvec(st.d0.psi);
  w.vec(st.d0.a);
  w.vec(st.d0.q);
  w.vec(st.d0.w);
  w.cvec(st.d1.psi);
  w.vec(st.d1.a);
  w.vec(st.d1.q);
  w.vec(st.d1.w);
  // accumulated output
  w.u64(st.out.config_hash);
  w.i32(st.out.keep_stride);
  w.u64(st.out.probes.size());
  for (const auto& p : st.out.probes) put_probe(w, p);
  w.u64(st.out.mkg.size());
  for (const auto& s : st.out.mkg) {
    w.real(s.t);
    w.i32(s.parity);
    w.i32(s.has_derivatives ? 1 : 0);
    w.cvec(s.psi);
    w.vec(s.a_u);
    w.vec(s.Q);
    w.cvec(s.du_psi);
    w.cvec(s.dv_psi);
  }
  w.u64(st.out.su2.size());
  for (const auto& s : st.out.su2) {
    w.real(s.t);
    w.i32(s.parity);
    w.i32(s.has_derivatives ? 1 : 0);
    w.vec(s.w);
    w.vec(s.dw_du);
    w.vec(s.dw_dv);
  }
  w.f.close();
  std::filesystem::rename(path + ".tmp", path);
}

MarchState read_march_checkpoint(const std::string& path) {
  Reader r(path);
  if (r.line() != "YMHCKPT1")
    throw std::runtime_error("not a checkpoint file: " + path);
  std::string model_line = r.line();
  r.line();  // diag (informational)
  if (r.line() != "payload") throw std::runtime_error("bad checkpoint header");

  MarchState st;
  st.model = model_line == "model mkg" ? Model::mkg : Model::su2;
  st.grid = get_grid(r);
  st.opt.keep_stride = r.i32();
  st.opt.ceiling = r.real();
  st.opt.probes.u_rays.resize(r.u64());
  for (auto& u : st.opt.probes.u_rays) u = r.real();
  st.opt.probes.v_rays.resize(r.u64());
  for (auto& v : st.opt.probes.v_rays) v = r.real();
  st.opt.probes.r_lines.resize(r.u64());
  for (auto& x : st.opt.probes.r_lines) x = r.real();
  st.opt.probes.boundary_charge = r.i32() != 0;
  st.opt.probes.energy_stride = r.i32();
  st.opt.checkpoint_path = r.str();
  st.opt.checkpoint_stride = r.i32();
  st.opt.stop_after_diagonal = r.i32();
  st.w_axis = r.real();
  st.next_diag = r.i32();
  st.d0.psi = r.cvec();
  st.d0.a = r.vec();
  st.d0.q = r.vec();
  st.d0.w = r.vec();
  st.d1.psi = r.cvec();
  st.d1.a = r.vec();
  st.d1.q = r.vec();
  st.d1.w = r.vec();
  st.out.model = st.model;
  st.out.grid = st.grid;
  st.out.config_hash = r.u64();
  st.out.keep_stride = r.i32();
  st.out.probes.resize(r.u64());
  for (auto& p : st.out.probes) p = get_probe(r);
  st.out.mkg.resize(r.u64());
  for (auto& s : st.out.mkg) {
    s.t = r.real();
    s.parity = r.i32();
    s.has_derivatives = r.i32() != 0;
    s.psi = r.cvec();
    s.a_u = r.vec();
    s.Q = r.vec();
    s.du_psi = r.cvec();
    s.dv_psi = r.cvec();
  }
  st.out.su2.resize(r.u64());
  for (auto& s : st.out.su2) {
    s.t = r.real();
    s.parity = r.i32();
    s.has_derivatives = r.i32() != 0;
    s.w = r.vec();
    s.dw_du = r.vec();
    s.dw_dv = r.vec();
  }
  return st;
}

}  // namespace ymh
