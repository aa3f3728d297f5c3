#include "enspace/load_profile.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "enspace/errors.hpp"

namespace enspace {

struct LoadProfile::Spline {
  gsl_spline* s = nullptr;
  ~Spline() { gsl_spline_free(s); }
};

namespace {

void check_table(const std::vector<double>& t, const std::vector<double>& P,
                 std::size_t min_points) {
  if (t.size() != P.size()) {
    throw InvalidInput("load table: time and power columns differ in length");
  }
  if (t.size() < min_points) {
    throw InvalidInput("load table: needs at least " +
                       std::to_string(min_points) + " points");
  }
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!std::isfinite(t[k]) || !std::isfinite(P[k])) {
      throw InvalidInput("load table: non-finite entry");
    }
    if (k > 0 && !(t[k] > t[k - 1])) {
      throw InvalidInput("load table: time must be strictly increasing");
    }
  }
}

}  // namespace

LoadProfile LoadProfile::constant(double P) {
  if (!std::isfinite(P)) throw InvalidInput("constant load: non-finite P");
  return LoadProfile(Constant{P});
}

LoadProfile LoadProfile::sigmoid_step(double P0, double dP, double k,
                                      double t0) {
  if (!std::isfinite(P0) || !std::isfinite(dP) || !std::isfinite(t0) ||
      !(k > 0.0) || !std::isfinite(k)) {
    throw InvalidInput("sigmoid load: parameters must be finite with k > 0");
  }
  return LoadProfile(Sigmoid{P0, dP, k, t0});
}

LoadProfile LoadProfile::piecewise_linear(std::vector<double> t,
                                          std::vector<double> P) {
  check_table(t, P, 1);
  return LoadProfile(Linear{std::move(t), std::move(P)});
}

LoadProfile LoadProfile::tabulated(std::vector<double> t,
                                   std::vector<double> P) {
  check_table(t, P, 3);
  // GSL aborts the process on error by default; we check return codes.
  gsl_set_error_handler_off();
  auto spline = std::make_shared<Spline>();
  spline->s = gsl_spline_alloc(gsl_interp_cspline, t.size());
  if (spline->s == nullptr ||
      gsl_spline_init(spline->s, t.data(), P.data(), t.size()) != GSL_SUCCESS) {
    throw InvalidInput("load table: spline construction failed");
  }
  return LoadProfile(Tabulated{std::move(t), std::move(P), std::move(spline)});
}

LoadProfile LoadProfile::tabulated_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("load table: cannot open " + path.string());
  std::vector<double> t, P;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double a = 0.0, b = 0.0;
    if (!(fields >> a >> b)) {
      throw InvalidInput("load table: " + path.string() + ":" +
                         std::to_string(lineno) + ": expected two numbers");
    }
    t.push_back(a);
    P.push_back(b);
  }
  LoadProfile profile = tabulated(std::move(t), std::move(P));
  profile.source_ = path.string();
  return profile;
}

LoadKind LoadProfile::kind() const {
  return static_cast<LoadKind>(data_.index());
}

LoadSample LoadProfile::evaluate(double t) const {
  struct Visitor {
    double t;
    LoadSample operator()(const Constant& c) const { return {c.P, 0.0, 0.0}; }
    LoadSample operator()(const Sigmoid& s) const {
      // s(t) = 1/(1+e^{-k(t-t0)}), s' = k s (1-s), s'' = k^2 s (1-s)(1-2s)
      const double sg = 1.0 / (1.0 + std::exp(-s.k * (t - s.t0)));
      const double d1 = s.k * sg * (1.0 - sg);
      const double d2 = s.k * d1 * (1.0 - 2.0 * sg);
      return {s.P0 + s.dP * sg, s.dP * d1, s.dP * d2};
    }
    LoadSample operator()(const Linear& l) const {
      if (l.t.size() == 1 || t <= l.t.front()) return {l.P.front(), 0.0, 0.0};
      if (t >= l.t.back()) return {l.P.back(), 0.0, 0.0};
      auto it = std::upper_bound(l.t.begin(), l.t.end(), t);
      const std::size_t k = static_cast<std::size_t>(it - l.t.begin()) - 1;
      const double slope = (l.P[k + 1] - l.P[k]) / (l.t[k + 1] - l.t[k]);
      return {l.P[k] + slope * (t - l.t[k]), slope, 0.0};
    }
    LoadSample operator()(const Tabulated& tab) const {
      if (t <= tab.t.front()) return {tab.P.front(), 0.0, 0.0};
      if (t >= tab.t.back()) return {tab.P.back(), 0.0, 0.0};
      // A null accelerator makes evaluation a pure binary search, which keeps
      // shared profiles safe to read from several threads.
      const gsl_spline* s = tab.spline->s;
      return {gsl_spline_eval(s, t, nullptr),
              gsl_spline_eval_deriv(s, t, nullptr),
              gsl_spline_eval_deriv2(s, t, nullptr)};
    }
  };
  return std::visit(Visitor{t}, data_);
}

const char* to_string(LoadKind kind) {
  switch (kind) {
    case LoadKind::constant: return "constant";
    case LoadKind::sigmoid_step: return "sigmoid";
    case LoadKind::piecewise_linear: return "piecewise_linear";
    case LoadKind::tabulated: return "tabulated";
  }
  return "unknown";
}

}  // namespace enspace
