#include "smallnoise/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace smallnoise {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_path_csv(const NoisySample& sample, const std::string& path) {
  const int n = sample.n();
  const int d = sample.d();
  std::ostringstream out;
  out << (d == 2 ? "t,x1,x2,y1,y2\n" : "t,x1,y1\n");
  for (int i = 0; i <= n; ++i) {
    out << format_real(sample.latent.grid.time(i));
    for (int m = 0; m < d; ++m) out << ',' << format_real(sample.latent.x(i, m));
    for (int m = 0; m < d; ++m) out << ',' << format_real(sample.y(i, m));
    out << '\n';
  }
  write_text_file(path, out.str());
}

nlohmann::json truth_to_json(const LatentPath& path) {
  const PathTruth& t = path.truth;
  nlohmann::json j;
  j["d"] = path.d;
  j["n"] = path.grid.n;
  j["iv"] = {t.iv(0, 0)};
  j["iq"] = {t.iq(0, 0)};
  j["jump_qv"] = {t.jump_qv(0, 0)};
  if (path.d == 2) {
    j["iv"] = {t.iv(0, 0), t.iv(1, 1)};
    j["iq"] = {t.iq(0, 0), t.iq(1, 1)};
    j["jump_qv"] = {t.jump_qv(0, 0), t.jump_qv(1, 1)};
    j["jump_cov"] = t.jump_qv(0, 1);
    j["s0"] = t.s0;
    j["j42"] = t.j42;
    j["j24"] = t.j24;
    j["f22"] = t.f22;
  }
  j["d11"] = t.d11;
  j["jump_count"] = t.jumps.size();
  return j;
}

void write_truth_json(const LatentPath& path, const std::string& file) {
  write_text_file(file, truth_to_json(path).dump(2) + "\n");
}

nlohmann::json report_to_json(const TestReport& rep) {
  nlohmann::json j;
  j["t"] = rep.t;
  j["z"] = rep.z;
  j["variance"] = rep.variance.value;
  j["variant"] = to_string(rep.variant);
  j["level"] = rep.level;
  j["reject"] = rep.reject;
  j["n"] = rep.n;
  j["seed"] = rep.seed;
  j["no_cojump_mass"] = rep.no_cojump_mass;
  j["s122"] = rep.s122;
  j["s222"] = rep.s222;
  j["critical"] = rep.critical;
  j["ingredients"] = {{"f22", rep.variance.f22},   {"j22", rep.variance.j22},
                      {"j42", rep.variance.j42},   {"j24", rep.variance.j24},
                      {"zeta1", rep.variance.zeta_hat.size() > 0 ? rep.variance.zeta_hat(0) : 0.0},
                      {"zeta2", rep.variance.zeta_hat.size() > 1 ? rep.variance.zeta_hat(1) : 0.0}};
  return j;
}

}  // namespace smallnoise
