#include "cal/trajectory_io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>

#include "cal/errors.hpp"

namespace cal {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return buf.data();
}

std::string trajectory_csv(const Trajectory& traj) {
  const int n = traj.dim();
  std::string out = "t";
  for (const char* prefix : {"q_", "dq_", "d2q_", "d3q_"})
    for (int j = 1; j <= n; ++j) out += "," + std::string(prefix) + std::to_string(j);
  out += '\n';
  for (const State& s : traj.samples) {
    out += format_double(s.t);
    for (const Eigen::VectorXd* v : {&s.q, &s.dq, &s.d2q, &s.d3q})
      for (Eigen::Index j = 0; j < v->size(); ++j) {
        out += ',';
        out += format_double((*v)(j));
      }
    out += '\n';
  }
  return out;
}

std::string sha256_hex(const std::string& data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1)
    throw Error("SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error("write to " + path.string() + " failed");
}

std::string write_trajectory(const std::filesystem::path& dir, const std::string& stem,
                             const Trajectory& traj) {
  std::filesystem::create_directories(dir);
  const std::string csv = trajectory_csv(traj);
  const std::string checksum = sha256_hex(csv);
  write_text(dir / (stem + ".csv"), csv);

  const auto& p = traj.meta.params;
  nlohmann::ordered_json meta;
  meta["file"] = stem + ".csv";
  meta["sha256"] = checksum;
  meta["samples"] = traj.size();
  meta["dimension"] = traj.dim();
  meta["h"] = traj.meta.h;
  meta["parameters"] = {{"theta", p.theta}, {"mu", p.mu}, {"nu", p.nu}, {"gamma", p.gamma},
                        {"k", p.k}};
  meta["schedule"] = traj.meta.schedule_id;
  meta["potential"] = traj.meta.potential_id;
  meta["input"] = traj.meta.input_id;
  write_text(dir / (stem + ".meta.json"), meta.dump(2) + "\n");
  return checksum;
}

void write_plot_data(const std::filesystem::path& dir, const std::string& stem,
                     const Trajectory& traj) {
  std::filesystem::create_directories(dir);
  for (int j = 0; j < traj.dim(); ++j) {
    std::string text;
    for (const State& s : traj.samples)
      text += format_double(s.t) + ' ' + format_double(s.q(j)) + '\n';
    write_text(dir / (stem + "_q" + std::to_string(j + 1) + ".dat"), text);
  }
}

}  // namespace cal
