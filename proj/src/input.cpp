#include "cal/input.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "cal/errors.hpp"

namespace cal {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_increasing(const std::vector<double>& xs, const char* what) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1]))
      throw InvalidArgument(std::string(what) + " must be strictly increasing");
}

std::vector<double> parse_row(const std::string& line) {
  std::string cleaned = line;
  std::replace_if(cleaned.begin(), cleaned.end(),
                  [](char c) { return c == ',' || c == ';' || c == '\t'; }, ' ');
  std::istringstream in(cleaned);
  std::vector<double> row;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("non-numeric token '" + token + "'");
    }
    if (used != token.size()) throw InvalidArgument("non-numeric token '" + token + "'");
    row.push_back(v);
  }
  return row;
}

}  // namespace

InputSignal InputSignal::zero(int dimension) {
  if (dimension < 1) throw InvalidArgument("input dimension must be >= 1");
  return InputSignal(Zero{dimension});
}

InputSignal InputSignal::sinusoid(Eigen::VectorXd amplitude, Eigen::VectorXd frequency,
                                  Eigen::VectorXd phase) {
  if (amplitude.size() < 1) throw InvalidArgument("sinusoid needs at least one channel");
  if (phase.size() == 0) phase = Eigen::VectorXd::Zero(amplitude.size());
  if (frequency.size() != amplitude.size() || phase.size() != amplitude.size())
    throw DimensionMismatch("sinusoid amplitude/frequency/phase sizes differ");
  return InputSignal(Sinusoid{std::move(amplitude), std::move(frequency), std::move(phase)});
}

InputSignal InputSignal::piecewise_constant(std::vector<double> breakpoints,
                                            Eigen::MatrixXd values) {
  require_increasing(breakpoints, "piecewise_constant breakpoints");
  if (values.rows() != static_cast<Eigen::Index>(breakpoints.size()) + 1 || values.cols() < 1)
    throw DimensionMismatch("piecewise_constant needs breakpoints+1 value rows");
  return InputSignal(PiecewiseConstant{std::move(breakpoints), std::move(values)});
}

InputSignal InputSignal::smooth_noise(int dimension, std::uint64_t seed, double bandwidth,
                                      int components) {
  if (dimension < 1) throw InvalidArgument("input dimension must be >= 1");
  if (!(bandwidth > 0.0)) throw InvalidArgument("smooth_noise bandwidth must be > 0");
  if (components < 1) throw InvalidArgument("smooth_noise needs at least one component");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SmoothNoise s{dimension, seed, bandwidth, Eigen::MatrixXd(dimension, components),
                Eigen::MatrixXd(dimension, components), Eigen::MatrixXd(dimension, components)};
  const double scale = std::sqrt(2.0 / components);
  for (int j = 0; j < dimension; ++j) {
    for (int c = 0; c < components; ++c) {
      s.amplitude(j, c) = scale * (2.0 * unit(rng) - 1.0);
      s.frequency(j, c) = bandwidth * (1.0 - unit(rng));  // (0, bandwidth]
      s.phase(j, c) = 2.0 * std::numbers::pi * unit(rng);
    }
  }
  return InputSignal(std::move(s));
}

InputSignal InputSignal::sampled(std::vector<double> times, Eigen::MatrixXd values,
                                 std::string source) {
  if (times.empty()) throw InvalidArgument("sampled input needs at least one sample");
  require_increasing(times, "sample times");
  if (values.rows() != static_cast<Eigen::Index>(times.size()) || values.cols() < 1)
    throw DimensionMismatch("sampled input: one value row per time required");
  return InputSignal(Sampled{std::move(source), std::move(times), std::move(values)});
}

InputSignal InputSignal::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open input file " + path.string());

  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    try {
      row = parse_row(line);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (row.size() < 2)
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) +
                            ": need a time column and at least one value column");
    if (!rows.empty() && row.size() != rows.front().size() + 1)
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) +
                            ": inconsistent column count");
    times.push_back(row.front());
    rows.emplace_back(row.begin() + 1, row.end());
  }
  if (rows.empty()) throw InvalidArgument(path.string() + ": no samples");

  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return sampled(std::move(times), std::move(values), path.string());
}

int InputSignal::dimension() const {
  return std::visit(
      overloaded{
          [](const Zero& z) { return z.dimension; },
          [](const Sinusoid& s) { return static_cast<int>(s.amplitude.size()); },
          [](const PiecewiseConstant& p) { return static_cast<int>(p.values.cols()); },
          [](const SmoothNoise& s) { return s.dimension; },
          [](const Sampled& s) { return static_cast<int>(s.values.cols()); },
          [](const Gated& g) { return g.inner->dimension(); },
      },
      v_);
}

Eigen::VectorXd InputSignal::operator()(double t) const {
  return std::visit(
      overloaded{
          [](const Zero& z) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(z.dimension); },
          [t](const Sinusoid& s) -> Eigen::VectorXd {
            const double w = 2.0 * std::numbers::pi * t;
            return s.amplitude.array() * (w * s.frequency.array() + s.phase.array()).sin();
          },
          [t](const PiecewiseConstant& p) -> Eigen::VectorXd {
            const auto it = std::upper_bound(p.breakpoints.begin(), p.breakpoints.end(), t);
            return p.values.row(it - p.breakpoints.begin()).transpose();
          },
          [t](const SmoothNoise& s) -> Eigen::VectorXd {
            const double w = 2.0 * std::numbers::pi * t;
            return (s.amplitude.array() * (w * s.frequency.array() + s.phase.array()).sin())
                .rowwise()
                .sum();
          },
          [t](const Sampled& s) -> Eigen::VectorXd {
            if (t <= s.times.front()) return s.values.row(0).transpose();
            if (t >= s.times.back()) return s.values.row(s.values.rows() - 1).transpose();
            const auto hi = static_cast<Eigen::Index>(
                std::upper_bound(s.times.begin(), s.times.end(), t) - s.times.begin());
            const Eigen::Index lo = hi - 1;
            const double t0 = s.times[static_cast<std::size_t>(lo)];
            const double t1 = s.times[static_cast<std::size_t>(hi)];
            const double w = (t - t0) / (t1 - t0);
            return ((1.0 - w) * s.values.row(lo) + w * s.values.row(hi)).transpose();
          },
          [t](const Gated& g) -> Eigen::VectorXd {
            // RK stages can overshoot the horizon by rounding.
            const double tc = std::clamp(t, 0.0, g.schedule.horizon());
            if (g.schedule.phase_of(tc) == Phase::InA) return (*g.inner)(t);
            return Eigen::VectorXd::Zero(g.inner->dimension());
          },
      },
      v_);
}

std::string InputSignal::id() const {
  return std::visit(
      overloaded{
          [](const Zero& z) { return "zero(m=" + std::to_string(z.dimension) + ")"; },
          [](const Sinusoid& s) { return "sinusoid(m=" + std::to_string(s.amplitude.size()) + ")"; },
          [](const PiecewiseConstant& p) {
            return "piecewise_constant(m=" + std::to_string(p.values.cols()) + ")";
          },
          [](const SmoothNoise& s) {
            return "smooth_noise(m=" + std::to_string(s.dimension) +
                   ",seed=" + std::to_string(s.seed) + ")";
          },
          [](const Sampled& s) { return "sampled(" + s.source + ")"; },
          [](const Gated& g) { return "gated(" + g.inner->id() + "," + g.schedule.id() + ")"; },
      },
      v_);
}

InputSignal gate_input(const InputSignal& input, const Schedule& schedule) {
  return InputSignal(
      InputSignal::Gated{std::make_shared<const InputSignal>(input), schedule});
}

}  // namespace cal
