#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "germlab/classify.hpp"
#include "germlab/lyapunov.hpp"
#include "germlab/orbit.hpp"

namespace germlab {

/// 17 significant digits: enough for bit-exact double round-trips in CSV.
inline std::string format_replay(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Orbit dump: header "step,re_1,im_1,...,norm"; one row per stored point.
inline std::string orbit_to_csv(const OrbitRecord& rec) {
  const int m = static_cast<int>(rec.initial.size());
  std::string out = "step";
  for (int i = 1; i <= m; ++i) {
    out += ",re_" + std::to_string(i) + ",im_" + std::to_string(i);
  }
  out += ",norm\n";
  for (std::size_t k = 0; k < rec.points.size(); ++k) {
    long step = static_cast<long>(k) * rec.thinning;
    if (rec.escape_step && k + 1 == rec.points.size()) step = *rec.escape_step;
    out += std::to_string(step);
    for (int i = 0; i < m; ++i) {
      out += "," + format_replay(rec.points[k][i].real());
      out += "," + format_replay(rec.points[k][i].imag());
    }
    out += "," + format_replay(rec.points[k].norm()) + "\n";
  }
  return out;
}

inline nlohmann::json exponent_to_json(const ExponentEstimate& e) {
  return {{"kappa", e.kappa}, {"stderr", e.stderr_}, {"n", e.n},
          {"trials", e.trials}, {"seed", e.seed}};
}

inline nlohmann::json spectrum_to_json(const LyapunovSpectrum& s) {
  return {{"kappa", s.kappa},   {"alpha", s.alpha},   {"stderr", s.stderr_},
          {"n", s.n},           {"trials", s.trials}, {"seed", s.seed},
          {"gap_threshold", s.gap_threshold}};
}

inline nlohmann::json classification_to_json(const Classification& c) {
  return {{"verdict", to_string(c.verdict)},
          {"kappa_hat", c.kappa_hat},
          {"stderr", c.stderr_},
          {"elogdet", c.expected_log_det},
          {"eps_abs", c.eps_abs},
          {"n", c.n},
          {"trials", c.trials},
          {"seed", c.seed}};
}

inline nlohmann::json fatou_to_json(const FatouReport& r) {
  nlohmann::json per_point = nlohmann::json::array();
  for (const auto& p : r.per_point) {
    nlohmann::json coords = nlohmann::json::array();
    for (int i = 0; i < p.point.size(); ++i) {
      coords.push_back({p.point[i].real(), p.point[i].imag()});
    }
    per_point.push_back({{"point", coords},
                         {"bounded", p.bounded_count},
                         {"trials", p.trials}});
  }
  return {{"delta", r.delta},   {"N", r.max_steps},     {"trials", r.trials},
          {"test_points", r.test_points},               {"fraction", r.fraction},
          {"seed", r.seed},     {"per_point", per_point}};
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace germlab
